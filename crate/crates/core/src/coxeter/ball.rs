use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::system::{CoxeterSystem, Gen, Word};
use crate::error::{Error, Result};

pub const DEFAULT_BALL_CAP: usize = 200_000;

/// Radius-`r` ball of the Cayley graph around `e`, elements in ShortLex
/// order of their normal forms.
#[derive(Debug, Clone)]
pub struct Ball {
    radius: usize,
    rank: usize,
    elements: Vec<Word>,
    index: HashMap<Word, usize>,
    /// `neighbors[i * rank + s]` is the index of `g_i s` when inside the ball.
    neighbors: Vec<Option<u32>>,
    sphere_sizes: Vec<usize>,
}

/// Enumerates all elements of norm `<= radius` by breadth-first search.
///
/// Processing each sphere in ShortLex order and generators in order means
/// the first discovery of an element is through its ShortLex-least prefix,
/// so the discovered words are exactly the normal forms.
pub fn enumerate_ball(sys: &CoxeterSystem, radius: usize, cap: usize) -> Result<Ball> {
    let rank = sys.rank();
    let mut elements = vec![Word::identity()];
    let mut index = HashMap::new();
    index.insert(Word::identity(), 0usize);
    let mut sphere_sizes = vec![1usize];
    let mut start = 0;
    for r in 0..radius {
        let end = elements.len();
        for i in start..end {
            for s in sys.generators() {
                let child = sys.append(&elements[i], s);
                if child.len() == r + 1 && !index.contains_key(&child) {
                    if elements.len() >= cap {
                        return Err(Error::SizeLimit {
                            cap,
                            radius: r + 1,
                            count: elements.len(),
                        });
                    }
                    index.insert(child.clone(), elements.len());
                    elements.push(child);
                }
            }
        }
        sphere_sizes.push(elements.len() - end);
        start = end;
    }
    let mut neighbors = vec![None; elements.len() * rank];
    for (i, g) in elements.iter().enumerate() {
        for s in sys.generators() {
            let gs = sys.append(g, s);
            neighbors[i * rank + s as usize] = index.get(&gs).map(|&j| j as u32);
        }
    }
    Ok(Ball {
        radius,
        rank,
        elements,
        index,
        neighbors,
        sphere_sizes,
    })
}

impl Ball {
    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[Word] {
        &self.elements
    }

    pub fn element(&self, i: usize) -> &Word {
        &self.elements[i]
    }

    pub fn index_of(&self, g: &Word) -> Option<usize> {
        self.index.get(g).copied()
    }

    pub fn contains(&self, g: &Word) -> bool {
        self.index.contains_key(g)
    }

    pub fn neighbor(&self, i: usize, s: Gen) -> Option<usize> {
        self.neighbors[i * self.rank + s as usize].map(|j| j as usize)
    }

    pub fn sphere_sizes(&self) -> &[usize] {
        &self.sphere_sizes
    }

    pub fn norm(&self, i: usize) -> usize {
        self.elements[i].len()
    }

    /// Indices of elements of norm `<= r`; a prefix of the element list.
    pub fn sub_ball(&self, r: usize) -> std::ops::Range<usize> {
        let n = self.sphere_sizes.iter().take(r + 1).sum();
        0..n
    }

    /// Undirected edges `{g, gs}` with both ends inside, each listed once
    /// from the endpoint with the smaller index.
    pub fn edges(&self) -> impl Iterator<Item = (usize, Gen, usize)> + '_ {
        (0..self.len()).flat_map(move |i| {
            (0..self.rank as Gen).filter_map(move |s| match self.neighbor(i, s) {
                Some(j) if i < j => Some((i, s, j)),
                _ => None,
            })
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BallDump {
    pub radius: usize,
    pub size: usize,
    pub sphere_sizes: Vec<usize>,
    pub normal_forms: Vec<String>,
}

impl Ball {
    pub fn dump(&self, sys: &CoxeterSystem) -> BallDump {
        BallDump {
            radius: self.radius,
            size: self.len(),
            sphere_sizes: self.sphere_sizes.clone(),
            normal_forms: self.elements.iter().map(|g| sys.format_word(&g.0)).collect(),
        }
    }
}

/// A geodesic in the Cayley graph, listed by its vertices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeodesicSegment {
    pub vertices: Vec<Word>,
}

impl GeodesicSegment {
    pub fn is_radial(&self) -> bool {
        self.vertices.windows(2).all(|w| w[0].len() < w[1].len())
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }
}

/// Radial geodesic from `e` to `g` along the prefixes of its normal form.
pub fn radial_segment(ball: &Ball, g: &Word, sys: &CoxeterSystem) -> Result<GeodesicSegment> {
    if !ball.contains(g) {
        return Err(Error::OutOfBall(sys.format_word(&g.0)));
    }
    let vertices = (0..=g.len()).map(|k| Word(g.0[..k].to_vec())).collect();
    Ok(GeodesicSegment { vertices })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cocycle {
    /// Reflections crossed in order, as normal forms.
    pub reflections: Vec<Word>,
    /// The input was not reduced and was replaced by its normal form.
    pub reduced_input: bool,
}

/// Walls crossed by the gallery spelled by `word`: the `i`-th entry is
/// `p s_i p⁻¹` with `p` the prefix before letter `i`.
pub fn reflection_cocycle(sys: &CoxeterSystem, word: &[Gen]) -> Cocycle {
    let (letters, reduced_input) = if sys.is_reduced(word) {
        (word.to_vec(), false)
    } else {
        (sys.normal_form(word).0, true)
    };
    let mut reflections = Vec::with_capacity(letters.len());
    for i in 0..letters.len() {
        let prefix = Word(letters[..i].to_vec());
        reflections.push(sys.reflection(&prefix, letters[i]));
    }
    Cocycle {
        reflections,
        reduced_input,
    }
}
