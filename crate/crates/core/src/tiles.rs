//! Tile alphabets of geometric resolutions, weight functions, and the exact
//! balance classifier.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::coxeter::{Ball, CoxeterSystem, Gen, Word};
use crate::error::{Error, Result};
use crate::lp::{rat, LinearProgram, LpOutcome, Rational};
use crate::walls::{Level, LevelMap, Palette, WallSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Sign {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
}

impl Sign {
    pub fn from_parity(odd: bool) -> Self {
        if odd {
            Sign::Minus
        } else {
            Sign::Plus
        }
    }

    pub fn flip(self) -> Self {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }

    pub fn times(self, other: Sign) -> Sign {
        if self == other {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }

    pub fn value(self) -> i64 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FaceLabel {
    pub color: String,
    pub sign: Sign,
}

impl FaceLabel {
    pub fn opposite(&self) -> FaceLabel {
        FaceLabel {
            color: self.color.clone(),
            sign: self.sign.flip(),
        }
    }
}

impl fmt::Display for FaceLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = if self.sign == Sign::Plus { '+' } else { '-' };
        write!(f, "{}{}", self.color, s)
    }
}

/// Faces of one chamber as a sorted multiset.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Tile {
    pub faces: Vec<FaceLabel>,
}

impl Tile {
    pub fn new(mut faces: Vec<FaceLabel>) -> Self {
        faces.sort();
        Tile { faces }
    }

    pub fn labels(&self) -> Vec<String> {
        self.faces.iter().map(|f| f.to_string()).collect()
    }
}

/// Wall orientations relative to a base chamber: `+` puts the base on the
/// left of the wall.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrientationAssignment {
    pub base: Word,
    pub signs: Vec<Option<Sign>>,
    /// Walls left unoriented because their level is indeterminate.
    pub excluded: Vec<usize>,
}

/// `sign(M) = (-1)^lev(M)`, negated on the classes marked in `flips`.
pub fn orient_alternating(
    walls: &WallSet,
    palette: &Palette,
    levels: &LevelMap,
    flips: &[bool],
) -> OrientationAssignment {
    let mut signs = vec![None; walls.len()];
    let mut excluded = Vec::new();
    for (k, wall) in walls.walls().iter().enumerate() {
        match levels.level(k) {
            Level::Determinate(l) => {
                let flip = flips.get(palette.color(wall.generator)).copied().unwrap_or(false);
                signs[k] = Some(Sign::from_parity((l % 2 == 1) != flip));
            }
            Level::Indeterminate => excluded.push(k),
        }
    }
    OrientationAssignment {
        base: levels.base.clone(),
        signs,
        excluded,
    }
}

pub fn orient_all_plus(walls: &WallSet, base: &Word) -> OrientationAssignment {
    OrientationAssignment {
        base: base.clone(),
        signs: vec![Some(Sign::Plus); walls.len()],
        excluded: Vec::new(),
    }
}

/// Sign of an oriented wall as seen from chamber `g`: the orientation on
/// the base side, its opposite across the wall.
pub fn seen_sign(sys: &CoxeterSystem, reflection: &Word, orientation: Sign, base: &Word, g: &Word) -> Sign {
    if sys.wall_separates(reflection, base, g) {
        orientation.flip()
    } else {
        orientation
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub coloring: String,
    pub orientation: String,
    pub radius: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TileAlphabet {
    /// Face colors in sorted order.
    pub colors: Vec<String>,
    /// Distinct tiles in sorted order.
    pub tiles: Vec<Tile>,
    /// Chambers mapped to each tile.
    pub multiplicity: Vec<usize>,
    /// Interior chambers with an unlabeled face.
    pub excluded: Vec<String>,
    pub provenance: Provenance,
}

impl TileAlphabet {
    pub fn from_tiles(tiles: impl IntoIterator<Item = Tile>, provenance: Provenance) -> Self {
        let mut counts: BTreeMap<Tile, usize> = BTreeMap::new();
        for t in tiles {
            *counts.entry(t).or_default() += 1;
        }
        let colors: BTreeSet<String> = counts
            .keys()
            .flat_map(|t| t.faces.iter().map(|f| f.color.clone()))
            .collect();
        let (tiles, multiplicity) = counts.into_iter().unzip();
        TileAlphabet {
            colors: colors.into_iter().collect(),
            tiles,
            multiplicity,
            excluded: Vec::new(),
            provenance,
        }
    }

    /// Per-color signed face counts of each tile: the tile sum under `w` is
    /// the dot product with the `+` weights.
    pub fn tile_vectors(&self) -> Vec<Vec<i64>> {
        let pos: HashMap<&str, usize> = self
            .colors
            .iter()
            .enumerate()
            .map(|(k, c)| (c.as_str(), k))
            .collect();
        self.tiles
            .iter()
            .map(|t| {
                let mut v = vec![0; self.colors.len()];
                for f in &t.faces {
                    v[pos[f.color.as_str()]] += f.sign.value();
                }
                v
            })
            .collect()
    }
}

/// Face labels of chambers in a ball from a wall coloring and orientation.
pub struct BallResolution<'a> {
    pub sys: &'a CoxeterSystem,
    pub ball: &'a Ball,
    pub walls: &'a WallSet,
    pub colors: Vec<Option<String>>,
    pub orientation: &'a OrientationAssignment,
}

impl BallResolution<'_> {
    pub fn face(&self, i: usize, s: Gen) -> Option<FaceLabel> {
        let w = self.walls.wall_of_edge(i, s)?;
        let color = self.colors[w].clone()?;
        let sign = self.orientation.signs[w]?;
        let reflection = &self.walls.wall(w).reflection;
        Some(FaceLabel {
            color,
            sign: seen_sign(self.sys, reflection, sign, &self.orientation.base, self.ball.element(i)),
        })
    }

    /// Chamber tiles in slot order, or `None` if a face is unlabeled.
    pub fn slots(&self, i: usize) -> Option<Vec<FaceLabel>> {
        self.sys.generators().map(|s| self.face(i, s)).collect()
    }
}

/// Alphabet of the interior chambers (norm below the ball radius).
pub fn build_alphabet(res: &BallResolution, provenance: Provenance) -> TileAlphabet {
    let interior = res.ball.sub_ball(res.ball.radius().saturating_sub(1));
    let mut tiles = Vec::new();
    let mut excluded = Vec::new();
    for i in interior {
        match res.slots(i) {
            Some(faces) => tiles.push(Tile::new(faces)),
            None => excluded.push(res.sys.format_word(&res.ball.element(i).0)),
        }
    }
    let mut alphabet = TileAlphabet::from_tiles(tiles, provenance);
    alphabet.excluded = excluded;
    alphabet
}

/// Antisymmetric weights, stored by their value on `+` faces.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightFunction {
    pub plus: BTreeMap<String, Rational>,
}

impl WeightFunction {
    pub fn from_plus(plus: BTreeMap<String, Rational>) -> Self {
        WeightFunction { plus }
    }

    pub fn from_integers(plus: &BTreeMap<String, i64>) -> Self {
        WeightFunction {
            plus: plus.iter().map(|(c, &v)| (c.clone(), rat(v))).collect(),
        }
    }

    /// From values on signed faces; both signs of each color must be given
    /// and must be opposite. `colors` fixes the index reported on failure.
    pub fn from_signed(colors: &[String], values: &BTreeMap<FaceLabel, Rational>) -> Result<Self> {
        let mut plus = BTreeMap::new();
        for (k, c) in colors.iter().enumerate() {
            let get = |sign| values.get(&FaceLabel { color: c.clone(), sign });
            match (get(Sign::Plus), get(Sign::Minus)) {
                (Some(p), Some(m)) if *p == -m.clone() => {
                    plus.insert(c.clone(), p.clone());
                }
                _ => return Err(Error::NotAntisymmetric(k)),
            }
        }
        Ok(WeightFunction { plus })
    }

    pub fn value(&self, f: &FaceLabel) -> Rational {
        let v = self.plus.get(&f.color).cloned().unwrap_or_else(Rational::zero);
        match f.sign {
            Sign::Plus => v,
            Sign::Minus => -v,
        }
    }

    pub fn scaled(&self, lambda: &Rational) -> Self {
        WeightFunction {
            plus: self.plus.iter().map(|(c, v)| (c.clone(), v * lambda)).collect(),
        }
    }

    pub fn is_trivial(&self) -> bool {
        self.plus.values().all(|v| v.is_zero())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WitnessCheck {
    pub sums: Vec<Rational>,
    pub all_positive: bool,
}

pub fn verify_unbalanced_witness(alphabet: &TileAlphabet, w: &WeightFunction) -> WitnessCheck {
    let sums: Vec<Rational> = alphabet
        .tiles
        .iter()
        .map(|t| t.faces.iter().map(|f| w.value(f)).sum())
        .collect();
    let all_positive = sums.iter().all(|s| s.is_positive());
    WitnessCheck { sums, all_positive }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum BalanceVerdict {
    Unbalanced { witness: BTreeMap<String, i64> },
    StrictlyBalanced,
    /// A nontrivial weight with all tile sums `>= 0` exists, none with all
    /// sums `> 0`.
    Semibalanced { witness: BTreeMap<String, i64> },
    /// Every tile sum vanishes identically: no face colors survive the
    /// signed count.
    ZeroCone,
}

impl BalanceVerdict {
    pub fn name(&self) -> &'static str {
        match self {
            BalanceVerdict::Unbalanced { .. } => "unbalanced",
            BalanceVerdict::StrictlyBalanced => "strictly_balanced",
            BalanceVerdict::Semibalanced { .. } => "semibalanced",
            BalanceVerdict::ZeroCone => "zero_cone",
        }
    }
}

/// Scales a rational vector to coprime integers.
fn integer_scaled(x: &[Rational]) -> Result<Vec<i64>> {
    let den = x
        .iter()
        .fold(num_bigint::BigInt::from(1), |acc, v| acc.lcm(v.denom()));
    let ints: Vec<num_bigint::BigInt> = x.iter().map(|v| (v * BigRational::from_integer(den.clone())).to_integer()).collect();
    let g = ints
        .iter()
        .fold(num_bigint::BigInt::from(0), |acc, v| acc.gcd(v));
    ints.iter()
        .map(|v| {
            let v = if g.is_zero() { v.clone() } else { v / &g };
            v.to_i64()
                .ok_or_else(|| Error::Numerical("witness weight exceeds 64 bits".into()))
        })
        .collect()
}

/// Variables `p_c, q_c` in `[0, 1]` with `w = p - q`, plus optional extras.
fn weight_program(c: usize, extra: usize) -> LinearProgram {
    let mut lp = LinearProgram::new(2 * c + extra);
    for k in 0..2 * c {
        let mut row = vec![rat(0); 2 * c + extra];
        row[k] = rat(1);
        lp.add_le(row, rat(1));
    }
    lp
}

fn weights_from(x: &[Rational], c: usize) -> Vec<Rational> {
    (0..c).map(|k| &x[k] - &x[c + k]).collect()
}

pub fn classify_balance(alphabet: &TileAlphabet) -> Result<BalanceVerdict> {
    let vectors = alphabet.tile_vectors();
    let c = alphabet.colors.len();
    if vectors.iter().all(|v| v.iter().all(|&x| x == 0)) {
        return Ok(BalanceVerdict::ZeroCone);
    }
    let to_map = |w: Vec<i64>| -> BTreeMap<String, i64> {
        alphabet.colors.iter().cloned().zip(w).collect()
    };

    // max τ  s.t.  τ - v·(p - q) <= 0,  τ <= 1.
    let mut lp = weight_program(c, 1);
    for v in &vectors {
        let mut row = vec![rat(0); 2 * c + 1];
        for k in 0..c {
            row[k] = rat(-v[k]);
            row[c + k] = rat(v[k]);
        }
        row[2 * c] = rat(1);
        lp.add_le(row, rat(0));
    }
    let mut tau = vec![rat(0); 2 * c + 1];
    tau[2 * c] = rat(1);
    lp.add_le(tau, rat(1));
    lp.objective[2 * c] = rat(1);
    match lp.maximize() {
        LpOutcome::Optimal { value, x } if value.is_positive() => {
            return Ok(BalanceVerdict::Unbalanced {
                witness: to_map(integer_scaled(&weights_from(&x, c))?),
            });
        }
        LpOutcome::Optimal { .. } => {}
        LpOutcome::Unbounded => unreachable!("bounded by the box"),
    }

    // Cone {w : v·w >= 0 for all tiles} in the box: any nonzero coordinate
    // optimum refutes strict balance.
    let mut cone = weight_program(c, 0);
    for v in &vectors {
        let mut row = vec![rat(0); 2 * c];
        for k in 0..c {
            row[k] = rat(-v[k]);
            row[c + k] = rat(v[k]);
        }
        cone.add_le(row, rat(0));
    }
    for k in 0..c {
        for dir in [1, -1] {
            let mut lp = cone.clone();
            lp.objective[k] = rat(dir);
            lp.objective[c + k] = rat(-dir);
            if let LpOutcome::Optimal { value, x } = lp.maximize() {
                if value.is_positive() {
                    return Ok(BalanceVerdict::Semibalanced {
                        witness: to_map(integer_scaled(&weights_from(&x, c))?),
                    });
                }
            }
        }
    }
    Ok(BalanceVerdict::StrictlyBalanced)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlphabetReport {
    pub provenance: Provenance,
    pub colors: Vec<String>,
    pub tiles: Vec<Vec<String>>,
    pub multiplicity: Vec<usize>,
    pub excluded: Vec<String>,
    #[serde(flatten)]
    pub verdict: BalanceVerdict,
}

impl AlphabetReport {
    pub fn new(alphabet: &TileAlphabet, verdict: BalanceVerdict) -> Self {
        AlphabetReport {
            provenance: alphabet.provenance.clone(),
            colors: alphabet.colors.clone(),
            tiles: alphabet.tiles.iter().map(Tile::labels).collect(),
            multiplicity: alphabet.multiplicity.clone(),
            excluded: alphabet.excluded.clone(),
            verdict,
        }
    }
}

/// Orientation of a wall made independent of the base: the assigned sign
/// times `+` if the base lies on the identity's side of the wall.
fn absolute(sys: &CoxeterSystem, reflection: &Word, base: &Word, sign: Sign) -> Sign {
    if sys.wall_separates_from_base(reflection, base) {
        sign.flip()
    } else {
        sign
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RebaseRecord {
    pub g: String,
    /// Per class: `Some(true)` if every compared wall flipped,
    /// `Some(false)` if none did, `None` if the class was mixed.
    pub class_flips: Vec<Option<bool>>,
    pub walls_compared: usize,
    pub verdict: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RebaseReport {
    pub records: Vec<RebaseRecord>,
    pub consistent: bool,
}

/// For each `g`, recomputes alternating orientations from base chamber `g`
/// and compares them with those from the identity, as orientations of the
/// walls themselves. Every class must be preserved or reversed as a whole;
/// the rebased alphabet must then classify like the original.
pub fn rebase_parity_check(
    sys: &CoxeterSystem,
    ball: &Ball,
    walls: &WallSet,
    palette: &Palette,
    test_elements: &[Word],
) -> Result<RebaseReport> {
    let classes = palette.num_classes();
    let colors: Vec<Option<String>> = walls
        .walls()
        .iter()
        .map(|w| Some(class_name(palette.color(w.generator))))
        .collect();
    let e = Word::identity();
    let base_levels = crate::walls::peel_levels(sys, ball, walls, palette, &e)?;
    let base_orient = orient_alternating(walls, palette, &base_levels, &[]);
    let base_alphabet = build_alphabet(
        &BallResolution { sys, ball, walls, colors: colors.clone(), orientation: &base_orient },
        Provenance { coloring: "class".into(), orientation: "alternating".into(), radius: ball.radius() },
    );
    let base_verdict = classify_balance(&base_alphabet)?.name();

    let mut records = Vec::new();
    let mut consistent = true;
    for g in test_elements {
        let levels = crate::walls::peel_levels(sys, ball, walls, palette, g)?;
        let orient = orient_alternating(walls, palette, &levels, &[]);
        let mut seen: Vec<BTreeSet<bool>> = vec![BTreeSet::new(); classes];
        let mut compared = 0;
        for (k, wall) in walls.walls().iter().enumerate() {
            let (Some(a), Some(b)) = (base_orient.signs[k], orient.signs[k]) else { continue };
            let r = &wall.reflection;
            let flipped = absolute(sys, r, &e, a) != absolute(sys, r, g, b);
            seen[palette.color(wall.generator)].insert(flipped);
            compared += 1;
        }
        let class_flips: Vec<Option<bool>> = seen
            .iter()
            .map(|s| match s.len() {
                1 => s.iter().next().copied(),
                0 => Some(false),
                _ => None,
            })
            .collect();
        let alphabet = build_alphabet(
            &BallResolution { sys, ball, walls, colors: colors.clone(), orientation: &orient },
            Provenance { coloring: "class".into(), orientation: "alternating".into(), radius: ball.radius() },
        );
        let verdict = classify_balance(&alphabet)?.name();
        let ok = class_flips.iter().all(Option::is_some) && verdict == base_verdict;
        consistent &= ok;
        records.push(RebaseRecord {
            g: sys.format_word(&g.0),
            class_flips,
            walls_compared: compared,
            verdict: verdict.to_string(),
        });
    }
    Ok(RebaseReport { records, consistent })
}

/// Letter names for palette classes: `a`, `b`, ..., then `c26`, ...
pub fn class_name(class: usize) -> String {
    if class < 26 {
        ((b'a' + class as u8) as char).to_string()
    } else {
        format!("c{class}")
    }
}
