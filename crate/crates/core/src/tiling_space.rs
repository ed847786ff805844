//! Finite-depth view of tiling spaces: labeled tilings on a ball, patches
//! around the base chamber, a combinatorial patch distance and translation
//! comparisons.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_traits::{One, Pow};
use serde::{Deserialize, Serialize};

use crate::coxeter::{Ball, CoxeterSystem, Word};
use crate::error::{Error, Result};
use crate::lp::Rational;
use crate::tiles::{class_name, BallResolution, FaceLabel, Sign};
use crate::walls::{LevelOracle, Palette, WallColor};

/// Face labels of a chamber in generator order.
pub type TileLabel = Vec<FaceLabel>;

/// A tiling by coloring restricted to a ball: every chamber of norm at most
/// `radius` carries its face labels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledTiling {
    pub radius: usize,
    pub labels: HashMap<Word, TileLabel>,
}

impl LabeledTiling {
    pub fn from_fn(ball: &Ball, mut label: impl FnMut(&Word) -> TileLabel) -> Self {
        LabeledTiling {
            radius: ball.radius(),
            labels: ball.elements().iter().map(|g| (g.clone(), label(g))).collect(),
        }
    }

    /// The unsigned tiling by the constant coloring.
    pub fn constant(ball: &Ball, color: &str) -> Self {
        let label = vec![
            FaceLabel {
                color: color.to_string(),
                sign: Sign::Plus
            };
            ball.rank()
        ];
        Self::from_fn(ball, |_| label.clone())
    }

    /// Chambers of a ball resolution whose faces are all labeled; the radius
    /// shrinks to the largest fully labeled ball.
    pub fn from_resolution(res: &BallResolution) -> Self {
        let mut labels = HashMap::new();
        let mut radius = res.ball.radius();
        for (i, g) in res.ball.elements().iter().enumerate() {
            match res.slots(i) {
                Some(faces) => {
                    labels.insert(g.clone(), faces);
                }
                None => radius = radius.min(g.len().saturating_sub(1)),
            }
        }
        labels.retain(|g, _| g.len() <= radius);
        LabeledTiling { radius, labels }
    }

    pub fn label(&self, g: &Word) -> Option<&TileLabel> {
        self.labels.get(g)
    }
}

/// Face label of the refined wall color used by the strictly balanced,
/// limit-aperiodic tiling: class, `ν(depth)` and `depth mod 3`.
pub fn wall_color_name(c: WallColor) -> String {
    format!("{}{}{}", class_name(c.class), c.nu, c.residue)
}

/// The alternating geometric resolution over the identity base, labeled from
/// normal forms alone. With `refined`, faces carry the tree-depth wall color;
/// otherwise only the palette class.
pub fn exact_alternating_tiling(
    sys: &CoxeterSystem,
    palette: &Palette,
    ball: &Ball,
    refined: bool,
) -> LabeledTiling {
    let oracle = LevelOracle::new(sys, palette, Word::identity());
    LabeledTiling::from_fn(ball, |g| {
        sys.generators()
            .map(|s| {
                let face = oracle.face(g, s);
                let color = if refined {
                    wall_color_name(oracle.color(&face))
                } else {
                    class_name(face.class)
                };
                let sign = Sign::from_parity(face.level % 2 == 1);
                let across = sys.append(g, s).len() < g.len();
                FaceLabel {
                    color,
                    sign: if across { sign.flip() } else { sign },
                }
            })
            .collect()
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TilingPatch {
    pub depth: usize,
    pub tiles: BTreeMap<Word, TileLabel>,
}

pub fn restrict_patch(tiling: &LabeledTiling, n: usize) -> Result<TilingPatch> {
    if n >= tiling.radius {
        return Err(Error::DepthTooLarge {
            depth: n,
            radius: tiling.radius,
        });
    }
    Ok(TilingPatch {
        depth: n,
        tiles: tiling
            .labels
            .iter()
            .filter(|(g, _)| g.len() <= n)
            .map(|(g, t)| (g.clone(), t.clone()))
            .collect(),
    })
}

impl TilingPatch {
    pub fn restrict(&self, n: usize) -> Result<TilingPatch> {
        if n > self.depth {
            return Err(Error::DepthTooLarge {
                depth: n,
                radius: self.depth,
            });
        }
        Ok(TilingPatch {
            depth: n,
            tiles: self
                .tiles
                .iter()
                .filter(|(g, _)| g.len() <= n)
                .map(|(g, t)| (g.clone(), t.clone()))
                .collect(),
        })
    }

    /// Least norm of a chamber where the two patches disagree.
    fn first_disagreement(&self, other: &TilingPatch) -> Option<usize> {
        self.tiles
            .iter()
            .filter(|(g, t)| other.tiles.get(*g) != Some(*t))
            .map(|(g, _)| g.len())
            .chain(
                other
                    .tiles
                    .keys()
                    .filter(|g| !self.tiles.contains_key(*g))
                    .map(|g| g.len()),
            )
            .min()
    }

    pub fn dump(&self, sys: &CoxeterSystem) -> PatchDump {
        let mut distinct: Vec<&TileLabel> = self.tiles.values().collect();
        distinct.sort();
        distinct.dedup();
        let id: HashMap<&TileLabel, usize> = distinct.iter().enumerate().map(|(k, t)| (*t, k)).collect();
        PatchDump {
            depth: self.depth,
            tiles: distinct
                .iter()
                .map(|t| t.iter().map(|f| f.to_string()).collect::<Vec<_>>().join(" "))
                .collect(),
            chambers: self
                .tiles
                .iter()
                .map(|(g, t)| (sys.format_word(&g.0), id[t]))
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PatchDump {
    pub depth: usize,
    /// Distinct tile labels, faces in generator order.
    pub tiles: Vec<String>,
    /// Chambers in ShortLex order with their tile index.
    pub chambers: Vec<(String, usize)>,
}

/// `0` for equal patches, otherwise `2^-k` with `k` the largest depth on
/// which they agree (`k = -1` when the base tiles differ).
pub fn patch_distance(p: &TilingPatch, q: &TilingPatch) -> Result<Rational> {
    if p.depth != q.depth {
        return Err(Error::DepthMismatch(p.depth, q.depth));
    }
    Ok(match p.first_disagreement(q) {
        None => Rational::from_integer(BigInt::from(0)),
        Some(d) => {
            let two = BigInt::from(2);
            if d == 0 {
                Rational::from_integer(two)
            } else {
                Rational::new(BigInt::one(), two.pow((d - 1) as u32))
            }
        }
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum TranslateVerdict {
    Fixed { depth: usize },
    Differs { first_depth: usize },
}

/// Compares the patch of `g·T` with that of `T`: the tile of `g·T` at `x`
/// is the tile of `T` at `g⁻¹x`.
pub fn translate_compare(
    sys: &CoxeterSystem,
    tiling: &LabeledTiling,
    ball: &Ball,
    g: &Word,
    depth: usize,
) -> Result<TranslateVerdict> {
    let required = g.len() + depth;
    if required > tiling.radius || depth > ball.radius() {
        return Err(Error::BallTooSmall {
            required,
            actual: tiling.radius.min(ball.radius()),
        });
    }
    let g_inv = sys.inverse(g);
    for x in &ball.elements()[ball.sub_ball(depth)] {
        let moved = sys.mul(&g_inv, x);
        let here = tiling.label(x);
        let there = tiling.label(&moved);
        if here.is_none() || there.is_none() {
            return Err(Error::OutOfBall(sys.format_word(&moved.0)));
        }
        if here != there {
            return Ok(TranslateVerdict::Differs {
                first_depth: x.len(),
            });
        }
    }
    Ok(TranslateVerdict::Fixed { depth })
}

/// Depth-`depth` patch of `g·T`.
pub fn translated_patch(
    sys: &CoxeterSystem,
    tiling: &LabeledTiling,
    ball: &Ball,
    g: &Word,
    depth: usize,
) -> Result<TilingPatch> {
    if g.len() + depth > tiling.radius || depth > ball.radius() {
        return Err(Error::BallTooSmall {
            required: g.len() + depth,
            actual: tiling.radius.min(ball.radius()),
        });
    }
    let g_inv = sys.inverse(g);
    let mut tiles = BTreeMap::new();
    for x in &ball.elements()[ball.sub_ball(depth)] {
        let moved = sys.mul(&g_inv, x);
        let label = tiling
            .label(&moved)
            .ok_or_else(|| Error::OutOfBall(sys.format_word(&moved.0)))?;
        tiles.insert(x.clone(), label.clone());
    }
    Ok(TilingPatch { depth, tiles })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coxeter::{enumerate_ball, DEFAULT_BALL_CAP};
    use crate::tiles::{orient_alternating, BallResolution};
    use crate::walls::{enumerate_walls, peel_levels};

    fn hexagon(r: usize) -> (CoxeterSystem, Ball, Palette) {
        let sys = CoxeterSystem::right_angled_polygon(6);
        let ball = enumerate_ball(&sys, r, DEFAULT_BALL_CAP).unwrap();
        (sys, ball, Palette::alternating(6))
    }

    fn rebased_tiling(sys: &CoxeterSystem, ball: &Ball, palette: &Palette, base: &Word) -> LabeledTiling {
        let walls = enumerate_walls(sys, ball);
        let levels = peel_levels(sys, ball, &walls, palette, base).unwrap();
        let orientation = orient_alternating(&walls, palette, &levels, &[]);
        let colors = walls.walls().iter().map(|w| Some(class_name(palette.color(w.generator)))).collect();
        LabeledTiling::from_resolution(&BallResolution { sys, ball, walls: &walls, colors, orientation: &orientation })
    }

    #[test]
    fn translated_patch_distance() {
        let (sys, ball, palette) = hexagon(6);
        let t = exact_alternating_tiling(&sys, &palette, &ball, true);
        let e = translated_patch(&sys, &t, &ball, &Word::identity(), 3).unwrap();
        assert_eq!(e, restrict_patch(&t, 3).unwrap());
        let g = Word(vec![0, 2]);
        let moved = translated_patch(&sys, &t, &ball, &g, 3).unwrap();
        let d = patch_distance(&e, &moved).unwrap();
        let TranslateVerdict::Differs { first_depth } = translate_compare(&sys, &t, &ball, &g, 3).unwrap() else { panic!() };
        let expected = patch_distance(&e.restrict(first_depth).unwrap(), &moved.restrict(first_depth).unwrap()).unwrap();
        assert_eq!(d, expected);
        assert!(translated_patch(&sys, &t, &ball, &g, 5).is_err());
    }

    #[test]
    fn restriction_nests() {
        let (sys, ball, palette) = hexagon(4);
        let t = exact_alternating_tiling(&sys, &palette, &ball, true);
        let p0 = restrict_patch(&t, 0).unwrap();
        assert_eq!(p0.tiles.len(), 1);
        let p3 = restrict_patch(&t, 3).unwrap();
        assert_eq!(p3.tiles.len(), ball.sub_ball(3).len());
        assert_eq!(p3.restrict(1).unwrap(), restrict_patch(&t, 1).unwrap());
        assert!(restrict_patch(&t, 4).is_err());
    }

    #[test]
    fn exact_labels_match_ball_resolution() {
        let (sys, ball, palette) = hexagon(5);
        let exact = exact_alternating_tiling(&sys, &palette, &ball, false);
        let from_ball = rebased_tiling(&sys, &ball, &palette, &Word::identity());
        assert_eq!(from_ball.radius, 4);
        for (g, t) in &from_ball.labels {
            assert_eq!(exact.label(g), Some(t));
        }
    }

    #[test]
    fn distances() {
        let (sys, ball, palette) = hexagon(5);
        let e = Word::identity();
        let t_e = rebased_tiling(&sys, &ball, &palette, &e);
        let t_s = rebased_tiling(&sys, &ball, &palette, &Word(vec![0]));
        let t_st = rebased_tiling(&sys, &ball, &palette, &Word(vec![0, 2]));
        let patches: Vec<_> = [&t_e, &t_s, &t_st]
            .iter()
            .map(|t| restrict_patch(t, 2).unwrap())
            .collect();
        let d = patch_distance(&patches[0], &patches[1]).unwrap();
        assert!(d >= Rational::new(1.into(), 4.into()));
        assert_eq!(patch_distance(&patches[0], &patches[0]).unwrap(), Rational::from_integer(0.into()));
        for p in &patches {
            for q in &patches {
                assert_eq!(patch_distance(p, q).unwrap(), patch_distance(q, p).unwrap());
                for r in &patches {
                    let (pr, pq, qr) = (
                        patch_distance(p, r).unwrap(),
                        patch_distance(p, q).unwrap(),
                        patch_distance(q, r).unwrap(),
                    );
                    assert!(pr <= pq.max(qr));
                }
            }
        }
        let p1 = restrict_patch(&t_e, 1).unwrap();
        assert_eq!(patch_distance(&p1, &patches[0]), Err(Error::DepthMismatch(1, 2)));
    }

    #[test]
    fn translations() {
        let (sys, ball, palette) = hexagon(6);
        let t = exact_alternating_tiling(&sys, &palette, &ball, true);
        let c = LabeledTiling::constant(&ball, "x");
        let e = Word::identity();
        assert_eq!(translate_compare(&sys, &t, &ball, &e, 4).unwrap(), TranslateVerdict::Fixed { depth: 4 });
        for g in &ball.elements()[ball.sub_ball(2)] {
            assert!(matches!(translate_compare(&sys, &c, &ball, g, 4).unwrap(), TranslateVerdict::Fixed { .. }));
            if g.is_empty() {
                continue;
            }
            let v3 = translate_compare(&sys, &t, &ball, g, 3).unwrap();
            let v4 = translate_compare(&sys, &t, &ball, g, 4).unwrap();
            if let TranslateVerdict::Differs { .. } = v3 {
                assert_eq!(v3, v4);
            }
        }
        let far = Word(vec![0, 2, 4]);
        assert_eq!(
            translate_compare(&sys, &t, &ball, &far, 4),
            Err(Error::BallTooSmall { required: 7, actual: 6 })
        );
    }

    #[test]
    fn patch_dump_round_trip() {
        let (sys, ball, palette) = hexagon(3);
        let t = exact_alternating_tiling(&sys, &palette, &ball, true);
        let dump = restrict_patch(&t, 2).unwrap().dump(&sys);
        assert_eq!(dump.chambers.len(), 31);
        assert_eq!(dump.chambers[0], ("e".to_string(), dump.chambers[0].1));
        let text = serde_json::to_string(&dump).unwrap();
        assert_eq!(serde_json::from_str::<PatchDump>(&text).unwrap(), dump);
    }
}
