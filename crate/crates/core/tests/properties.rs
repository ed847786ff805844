use std::collections::BTreeMap;

use coxtile::coxeter::{enumerate_ball, DEFAULT_BALL_CAP};
use coxtile::hyperbolic::{build_polygon, lorentz, reflection_matrices, HIsometry, HPoint};
use coxtile::seqs::{morse_thue_term, square_free_prefix, ternary_term, z_color, z_witness, ZColoringKind};
use coxtile::tiles::{
    classify_balance, verify_unbalanced_witness, BalanceVerdict, FaceLabel, Provenance, Sign, Tile, TileAlphabet,
    WeightFunction,
};
use coxtile::tiling_space::{exact_alternating_tiling, patch_distance, translated_patch};
use coxtile::walls::Palette;
use coxtile::{CoxeterSystem, Word};
use proptest::prelude::*;

fn alphabet(tiles: &[Vec<(u8, bool)>]) -> TileAlphabet {
    let provenance = Provenance { coloring: "random".into(), orientation: "random".into(), radius: 0 };
    TileAlphabet::from_tiles(
        tiles.iter().map(|faces| {
            Tile::new(
                faces
                    .iter()
                    .map(|&(c, plus)| FaceLabel {
                        color: format!("c{c}"),
                        sign: if plus { Sign::Plus } else { Sign::Minus },
                    })
                    .collect(),
            )
        }),
        provenance,
    )
}

/// Brute force over weights in {-2..2}: is some weight strictly positive on
/// every tile, and is some nonzero weight nonnegative on every tile?
fn grid_oracle(a: &TileAlphabet) -> (bool, bool) {
    let vectors = a.tile_vectors();
    let k = a.colors.len();
    let (mut strict, mut weak) = (false, false);
    let mut w = vec![-2i64; k];
    loop {
        let sums: Vec<i64> = vectors.iter().map(|v| v.iter().zip(&w).map(|(x, y)| x * y).sum()).collect();
        if sums.iter().all(|&s| s > 0) {
            strict = true;
        }
        if w.iter().any(|&x| x != 0) && sums.iter().all(|&s| s >= 0) {
            weak = true;
        }
        let mut i = 0;
        while i < k && w[i] == 2 {
            w[i] = -2;
            i += 1;
        }
        if i == k {
            break;
        }
        w[i] += 1;
    }
    (strict, weak)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn morse_thue_recursion(i in 0u64..1 << 40) {
        prop_assert_eq!(morse_thue_term(2 * i), morse_thue_term(i));
        prop_assert_eq!(morse_thue_term(2 * i + 1), 1 - morse_thue_term(i));
    }

    #[test]
    fn ternary_terms_match_prefix_and_avoid_squares(start in 0usize..3000, len in 1usize..40) {
        let prefix = square_free_prefix(start + 2 * len);
        let window = &prefix.as_slice()[start..];
        for (k, &t) in window.iter().enumerate() {
            prop_assert_eq!(t, ternary_term((start + k) as u64));
        }
        prop_assert_ne!(&window[..len], &window[len..2 * len]);
    }

    #[test]
    fn witnesses_stay_close(n in -400i64..400, m in -10_000i64..10_000) {
        prop_assume!(n != 0);
        let q = z_witness(n, m).expect("bounded witness exists");
        prop_assert!((q - m).abs() <= 3 * n.abs());
        prop_assert_ne!(z_color(ZColoringKind::MorseThue, q), z_color(ZColoringKind::MorseThue, q + n));
    }

    #[test]
    fn classifier_matches_grid(tiles in prop::collection::vec(prop::collection::vec((0u8..4, any::<bool>()), 1..5), 1..6)) {
        let a = alphabet(&tiles);
        prop_assume!(a.colors.len() <= 4);
        let verdict = classify_balance(&a).unwrap();
        let (strict, weak) = grid_oracle(&a);
        if strict {
            prop_assert_eq!(verdict.name(), "unbalanced");
        }
        match verdict {
            // The grid may miss positive weights with larger entries, so the
            // witness is checked exactly instead.
            BalanceVerdict::Unbalanced { witness } => {
                let check = verify_unbalanced_witness(&a, &WeightFunction::from_integers(&witness));
                prop_assert!(check.all_positive);
            }
            BalanceVerdict::StrictlyBalanced => prop_assert!(!strict && !weak),
            // The grid may miss semibalance weights with larger entries.
            BalanceVerdict::Semibalanced { .. } => prop_assert!(!strict),
            BalanceVerdict::ZeroCone => prop_assert!(a.tile_vectors().iter().all(|v| v.iter().all(|&x| x == 0))),
        }
    }

    #[test]
    fn reflections_are_lorentz_involutions(n in 3usize..9, k in 0usize..16) {
        let poly = build_polygon(n).unwrap();
        let r = reflection_matrices(&poly).unwrap();
        let m = r[k % (2 * n)];
        prop_assert!(m.lorentz_defect() < 1e-9);
        prop_assert!(m.mul(&m).max_abs_diff(&HIsometry::identity()) < 1e-9);
        let v = m.apply(&HPoint::new(0.0, 0.0, 1.0));
        prop_assert!((lorentz(&v, &v) + 1.0).abs() < 1e-9 && v.z > 0.0);
    }
}

#[test]
fn patch_distance_is_an_ultrametric() {
    let sys = CoxeterSystem::right_angled_polygon(6);
    let ball = enumerate_ball(&sys, 6, DEFAULT_BALL_CAP).unwrap();
    let tiling = exact_alternating_tiling(&sys, &Palette::alternating(6), &ball, true);
    let gs: Vec<Word> = ball.elements()[ball.sub_ball(2)].to_vec();
    let patches: Vec<_> = gs.iter().map(|g| translated_patch(&sys, &tiling, &ball, g, 3).unwrap()).collect();
    let mut dist = BTreeMap::new();
    for (i, p) in patches.iter().enumerate() {
        for (j, q) in patches.iter().enumerate() {
            dist.insert((i, j), patch_distance(p, q).unwrap());
        }
    }
    for i in 0..patches.len() {
        assert_eq!(dist[&(i, i)], coxtile::lp::rat(0));
        for j in 0..patches.len() {
            assert_eq!(dist[&(i, j)], dist[&(j, i)]);
            for k in 0..patches.len() {
                let bound = dist[&(i, k)].clone().max(dist[&(k, j)].clone());
                assert!(dist[&(i, j)] <= bound);
            }
        }
    }
}
