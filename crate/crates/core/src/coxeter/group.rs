//! A small interface over finitely generated groups with a word norm, so the
//! displacement search and the coloring harnesses run on Coxeter groups and
//! on the lattice `Z^d` alike.

use std::fmt::Debug;
use std::hash::Hash;

use serde::{Deserialize, Serialize};

use super::system::{CoxeterSystem, Word};

pub trait WordGroup {
    type Elem: Clone + Eq + Hash + Ord + Debug;

    fn identity(&self) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn inverse(&self, a: &Self::Elem) -> Self::Elem;
    fn norm(&self, a: &Self::Elem) -> usize;
    fn label(&self, a: &Self::Elem) -> String;

    fn distance(&self, a: &Self::Elem, b: &Self::Elem) -> usize {
        self.norm(&self.mul(&self.inverse(a), b))
    }

    fn pow(&self, a: &Self::Elem, k: usize) -> Self::Elem {
        let mut acc = self.identity();
        for _ in 0..k {
            acc = self.mul(&acc, a);
        }
        acc
    }
}

impl WordGroup for CoxeterSystem {
    type Elem = Word;

    fn identity(&self) -> Word {
        Word::identity()
    }

    fn mul(&self, a: &Word, b: &Word) -> Word {
        CoxeterSystem::mul(self, a, b)
    }

    fn inverse(&self, a: &Word) -> Word {
        CoxeterSystem::inverse(self, a)
    }

    fn norm(&self, a: &Word) -> usize {
        a.len()
    }

    fn label(&self, a: &Word) -> String {
        self.format_word(&a.0)
    }
}

/// `Z^d` with the standard generators `±e_i` and the `ℓ¹` word norm.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Lattice {
    pub dim: usize,
}

/// Lattice points order by norm, then coordinates.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LatticePoint(pub Vec<i64>);

impl LatticePoint {
    pub fn l1(&self) -> usize {
        self.0.iter().map(|x| x.unsigned_abs() as usize).sum()
    }
}

impl Ord for LatticePoint {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.l1().cmp(&other.l1()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for LatticePoint {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Lattice {
    pub fn new(dim: usize) -> Self {
        Lattice { dim }
    }

    pub fn point(&self, coords: &[i64]) -> LatticePoint {
        assert_eq!(coords.len(), self.dim);
        LatticePoint(coords.to_vec())
    }

    /// All points of `ℓ¹` norm `<= r`, sorted.
    pub fn ball(&self, r: usize) -> Vec<LatticePoint> {
        let r = r as i64;
        let mut out = vec![Vec::new()];
        for _ in 0..self.dim {
            out = out
                .into_iter()
                .flat_map(|p: Vec<i64>| {
                    let used: i64 = p.iter().map(|x| x.abs()).sum();
                    (-(r - used)..=(r - used)).map(move |x| {
                        let mut q = p.clone();
                        q.push(x);
                        q
                    })
                })
                .collect();
        }
        let mut pts: Vec<_> = out.into_iter().map(LatticePoint).collect();
        pts.sort();
        pts
    }
}

impl WordGroup for Lattice {
    type Elem = LatticePoint;

    fn identity(&self) -> LatticePoint {
        LatticePoint(vec![0; self.dim])
    }

    fn mul(&self, a: &LatticePoint, b: &LatticePoint) -> LatticePoint {
        LatticePoint(a.0.iter().zip(&b.0).map(|(x, y)| x + y).collect())
    }

    fn inverse(&self, a: &LatticePoint) -> LatticePoint {
        LatticePoint(a.0.iter().map(|x| -x).collect())
    }

    fn norm(&self, a: &LatticePoint) -> usize {
        a.l1()
    }

    fn label(&self, a: &LatticePoint) -> String {
        let parts: Vec<String> = a.0.iter().map(|x| x.to_string()).collect();
        format!("({})", parts.join(","))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DisplacementVerdict<E> {
    /// Every element of the tested set moves in norm within `n` powers.
    Exponent { n: usize },
    /// Elements whose norm is unchanged by all of `a, a², ..., a^{n_max}`,
    /// in the group's element order.
    Failure { witnesses: Vec<E> },
}

/// Least `n` such that each `g` in `elements` has some `1 <= k <= n` with
/// `‖g a^k‖ != ‖g‖`, or the elements for which no `k <= n_max` works.
pub fn displacement_exponent<G: WordGroup>(
    group: &G,
    a: &G::Elem,
    elements: &[G::Elem],
    n_max: usize,
) -> DisplacementVerdict<G::Elem> {
    assert!(*a != group.identity(), "displacement needs a nontrivial element");
    let powers: Vec<G::Elem> = (1..=n_max).map(|k| group.pow(a, k)).collect();
    let mut n = 0;
    let mut witnesses = Vec::new();
    for g in elements {
        let base = group.norm(g);
        match powers
            .iter()
            .position(|p| group.norm(&group.mul(g, p)) != base)
        {
            Some(k) => n = n.max(k + 1),
            None => witnesses.push(g.clone()),
        }
    }
    if witnesses.is_empty() {
        DisplacementVerdict::Exponent { n }
    } else {
        witnesses.sort();
        DisplacementVerdict::Failure { witnesses }
    }
}
