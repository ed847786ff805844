//! Norm colorings of groups and rooted trees, the finite-index transfer of
//! colorings, product colorings, and finite-window aperiodicity harnesses.

use std::collections::{HashMap, VecDeque};
use std::fmt::Debug;
use std::hash::Hash;

use serde::{Deserialize, Serialize};

use crate::coxeter::{Ball, CoxeterSystem, GeodesicSegment, WordGroup, Word};
use crate::error::{Error, Result};
use crate::seqs::ternary_term;

/// `(ν(d), d mod 3)` for a distance `d` from the base point: 9 colors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct NormColor {
    pub nu: u8,
    pub residue: u8,
}

impl NormColor {
    pub fn at_distance(d: usize) -> Self {
        NormColor {
            nu: ternary_term(d as u64),
            residue: (d % 3) as u8,
        }
    }

    /// Position in the 9-color palette.
    pub fn index(self) -> usize {
        3 * self.nu as usize + self.residue as usize
    }
}

pub const NORM_PALETTE_SIZE: usize = 9;

/// A coloring of a finite carrier.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupColoring<E: Eq + Hash, C> {
    pub assignment: HashMap<E, C>,
    pub palette_size: usize,
}

impl<E: Eq + Hash, C: Clone> GroupColoring<E, C> {
    pub fn get(&self, x: &E) -> Option<C> {
        self.assignment.get(x).cloned()
    }

    pub fn len(&self) -> usize {
        self.assignment.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignment.is_empty()
    }
}

pub fn norm_coloring(ball: &Ball) -> GroupColoring<Word, NormColor> {
    GroupColoring {
        assignment: ball
            .elements()
            .iter()
            .map(|g| (g.clone(), NormColor::at_distance(g.len())))
            .collect(),
        palette_size: NORM_PALETTE_SIZE,
    }
}

/// A finite rooted simplicial tree given by adjacency lists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RootedTree {
    pub adjacency: Vec<Vec<usize>>,
    pub root: usize,
}

impl RootedTree {
    pub fn from_edges(n: usize, edges: &[(usize, usize)], root: usize) -> Self {
        let mut adjacency = vec![Vec::new(); n];
        for &(a, b) in edges {
            adjacency[a].push(b);
            adjacency[b].push(a);
        }
        RootedTree { adjacency, root }
    }

    pub fn path(len: usize) -> Self {
        let edges: Vec<_> = (0..len).map(|i| (i, i + 1)).collect();
        Self::from_edges(len + 1, &edges, 0)
    }

    /// Distances from the root; errors on the first unreachable vertex.
    pub fn depths(&self) -> Result<Vec<usize>> {
        let n = self.adjacency.len();
        let mut depth = vec![usize::MAX; n];
        depth[self.root] = 0;
        let mut queue = VecDeque::from([self.root]);
        while let Some(v) = queue.pop_front() {
            for &u in &self.adjacency[v] {
                if depth[u] == usize::MAX {
                    depth[u] = depth[v] + 1;
                    queue.push_back(u);
                }
            }
        }
        match depth.iter().position(|&d| d == usize::MAX) {
            Some(v) => Err(Error::Disconnected(v)),
            None => Ok(depth),
        }
    }
}

pub fn tree_norm_coloring(tree: &RootedTree) -> Result<Vec<NormColor>> {
    Ok(tree
        .depths()?
        .into_iter()
        .map(NormColor::at_distance)
        .collect())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum ClaimVerdict {
    Pass,
    Fail { index: usize },
    HypothesesNotSatisfied,
}

/// Checks the radial-segment claim for one `g` and one radial segment:
/// if `g` preserves colors along the segment and moves some vertex by less
/// than half the vertex count, then `g` preserves all norms on it.
pub fn radial_claim_check<C, F>(
    sys: &CoxeterSystem,
    coloring: F,
    g: &Word,
    segment: &GeodesicSegment,
) -> Result<ClaimVerdict>
where
    C: PartialEq,
    F: Fn(&Word) -> Option<C>,
{
    debug_assert!(segment.is_radial());
    let k = segment.len();
    let mut moved = Vec::with_capacity(k);
    let mut colors_agree = true;
    for x in &segment.vertices {
        let gx = sys.mul(g, x);
        let cx = coloring(x).ok_or_else(|| Error::OutOfBall(sys.format_word(&x.0)))?;
        let cgx = coloring(&gx).ok_or_else(|| Error::OutOfBall(sys.format_word(&gx.0)))?;
        colors_agree &= cx == cgx;
        moved.push(gx);
    }
    let close = segment
        .vertices
        .iter()
        .zip(&moved)
        .any(|(x, gx)| 2 * sys.distance(x, gx) < k);
    if !(colors_agree && close) {
        return Ok(ClaimVerdict::HypothesesNotSatisfied);
    }
    Ok(
        match segment
            .vertices
            .iter()
            .zip(&moved)
            .position(|(x, gx)| x.len() != gx.len())
        {
            Some(index) => ClaimVerdict::Fail { index },
            None => ClaimVerdict::Pass,
        },
    )
}

/// Index `i` with `x y_i⁻¹ ∈ H`, checking that exactly one exists.
fn coset_of<G, P>(group: &G, x: &G::Elem, reps: &[G::Elem], in_h: &P) -> Result<usize>
where
    G: WordGroup,
    P: Fn(&G::Elem) -> bool,
{
    let hits: Vec<usize> = reps
        .iter()
        .enumerate()
        .filter(|(_, y)| in_h(&group.mul(x, &group.inverse(y))))
        .map(|(i, _)| i)
        .collect();
    match hits.as_slice() {
        [i] => Ok(*i),
        [] => Err(Error::NotTransversal(format!(
            "{} lies in no coset H y_i",
            group.label(x)
        ))),
        _ => Err(Error::NotTransversal(format!(
            "{} lies in several cosets",
            group.label(x)
        ))),
    }
}

/// Restriction of a `G`-coloring to `H`: `ψ(x) = (φ(x y_1), ..., φ(x y_n))`.
pub fn transfer_to_subgroup<G, C, P>(
    group: &G,
    phi: &HashMap<G::Elem, C>,
    reps: &[G::Elem],
    in_h: P,
) -> Result<HashMap<G::Elem, Vec<C>>>
where
    G: WordGroup,
    C: Clone,
    P: Fn(&G::Elem) -> bool,
{
    for x in phi.keys() {
        coset_of(group, x, reps, &in_h)?;
    }
    let mut psi = HashMap::new();
    for x in phi.keys().filter(|x| in_h(x)) {
        let tuple: Option<Vec<C>> = reps
            .iter()
            .map(|y| phi.get(&group.mul(x, y)).cloned())
            .collect();
        if let Some(t) = tuple {
            psi.insert(x.clone(), t);
        }
    }
    Ok(psi)
}

/// Extension of an `H`-coloring to `G`: `φ'(x) = (ψ(y_i⁻¹ x), i)` for
/// `x ∈ H y_i`, cosets tagged from 1.
pub fn transfer_to_group<G, C, P>(
    group: &G,
    psi: &HashMap<G::Elem, C>,
    reps: &[G::Elem],
    in_h: P,
    carrier: &[G::Elem],
) -> Result<HashMap<G::Elem, (C, usize)>>
where
    G: WordGroup,
    C: Clone,
    P: Fn(&G::Elem) -> bool,
{
    let mut phi = HashMap::new();
    for x in carrier {
        let i = coset_of(group, x, reps, &in_h)?;
        let y_inv_x = group.mul(&group.inverse(&reps[i]), x);
        if let Some(c) = psi.get(&y_inv_x) {
            phi.insert(x.clone(), (c.clone(), i + 1));
        }
    }
    Ok(phi)
}

/// `g ↦ (φ¹(g·x₀¹), ..., φⁿ(g·x₀ⁿ))`; each factor returns the color of the
/// orbit point, or `None` when it falls outside its enumerated tree.
pub fn product_coloring<E, C>(
    elements: &[E],
    factors: &[&dyn Fn(&E) -> Option<C>],
    label: impl Fn(&E) -> String,
) -> Result<GroupColoring<E, Vec<C>>>
where
    E: Clone + Eq + Hash,
{
    let mut assignment = HashMap::new();
    for g in elements {
        let mut tuple = Vec::with_capacity(factors.len());
        for f in factors {
            tuple.push(f(g).ok_or_else(|| Error::OrbitOutsideTree(label(g)))?);
        }
        assignment.insert(g.clone(), tuple);
    }
    Ok(GroupColoring {
        assignment,
        palette_size: NORM_PALETTE_SIZE * factors.len(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportScale {
    /// Displacements `g` with `0 < ‖g‖ <= g_radius`.
    pub g_radius: usize,
    /// Window centers `h` with `‖h‖ <= h_radius`.
    pub h_radius: usize,
    /// Window radius around each center.
    pub window: usize,
}

impl ReportScale {
    pub fn required_radius(&self) -> usize {
        self.g_radius + self.h_radius + self.window
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairRecord {
    pub g: String,
    pub h: String,
    pub witness_x: Option<String>,
    pub radius_used: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AperiodicityReport {
    pub scale: ReportScale,
    pub pairs: Vec<PairRecord>,
}

impl AperiodicityReport {
    pub fn unwitnessed(&self) -> impl Iterator<Item = &PairRecord> {
        self.pairs.iter().filter(|p| p.witness_x.is_none())
    }

    pub fn all_witnessed(&self) -> bool {
        self.unwitnessed().next().is_none()
    }
}

/// For every `g != e` and window center `h`, looks for `x` within the
/// window with `φ(g⁻¹x) != φ(x)`, nearest first and ShortLex among equals.
///
/// `elements` must list the group ball of radius `domain_radius` sorted by
/// norm then element order; the coloring must be defined on it.
pub fn aperiodicity_report<G, C, F>(
    group: &G,
    elements: &[G::Elem],
    domain_radius: usize,
    coloring: F,
    scale: ReportScale,
) -> Result<AperiodicityReport>
where
    G: WordGroup,
    C: PartialEq,
    F: Fn(&G::Elem) -> Option<C>,
{
    if domain_radius < scale.required_radius() {
        return Err(Error::BallTooSmall {
            required: scale.required_radius(),
            actual: domain_radius,
        });
    }
    let within = |r: usize| elements.iter().filter(move |x| group.norm(x) <= r);
    let gs: Vec<_> = within(scale.g_radius)
        .filter(|g| group.norm(g) > 0)
        .collect();
    let hs: Vec<_> = within(scale.h_radius).collect();
    let window: Vec<_> = within(scale.window).collect();
    let color = |x: &G::Elem| {
        coloring(x).ok_or_else(|| Error::OutOfBall(group.label(x)))
    };

    let mut pairs = Vec::with_capacity(gs.len() * hs.len());
    for h in &hs {
        let mut candidates: Vec<(usize, G::Elem)> = window
            .iter()
            .map(|y| (group.norm(y), group.mul(h, y)))
            .collect();
        candidates.sort();
        for g in &gs {
            let g_inv = group.inverse(g);
            let mut found = None;
            for (d, x) in &candidates {
                if color(&group.mul(&g_inv, x))? != color(x)? {
                    found = Some((group.label(x), *d));
                    break;
                }
            }
            pairs.push(PairRecord {
                g: group.label(g),
                h: group.label(h),
                witness_x: found.as_ref().map(|(x, _)| x.clone()),
                radius_used: found.map(|(_, d)| d),
            });
        }
    }
    Ok(AperiodicityReport { scale, pairs })
}
