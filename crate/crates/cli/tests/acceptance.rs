//! Acceptance suite: one line per criterion, nonzero exit if any fails.

#[path = "../../core/tests/common/oracle.rs"]
mod oracle;

use std::collections::BTreeSet;
use std::process::Command;
use std::time::{Duration, Instant};

use coxtile::colorings::{aperiodicity_report, norm_coloring, radial_claim_check, ClaimVerdict, ReportScale};
use coxtile::coxeter::{
    displacement_exponent, enumerate_ball, DisplacementVerdict, GeodesicSegment, Lattice, LatticePoint,
    DEFAULT_BALL_CAP,
};
use coxtile::hyperbolic::{build_polygon, overlap_check, reflection_matrices, HIsometry, RenderOptions, Scene};
use coxtile::seqs::{
    morse_thue_prefix, square_free_prefix, squares_gap_shift, squares_limit_defect, verify_power_free, z_color,
    z_witness, ZColoringKind,
};
use coxtile::tiles::{
    build_alphabet, class_name, classify_balance, orient_all_plus, orient_alternating, rebase_parity_check,
    verify_unbalanced_witness, BalanceVerdict, BallResolution, FaceLabel, Provenance, Sign, Tile, TileAlphabet,
    WeightFunction,
};
use coxtile::tiling_space::{exact_alternating_tiling, translate_compare, LabeledTiling, TranslateVerdict};
use coxtile::walls::{build_wall_tree, color_walls, enumerate_walls, peel_levels, separates, Palette};
use coxtile::{CoxeterSystem, Word};
use serde_json::Value;

type Check = Result<String, String>;

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn within(start: Instant, limit: Duration) -> Result<(), String> {
    let t = start.elapsed();
    ensure(t < limit, format!("took {t:.2?}, limit {limit:?}"))
}

struct Run {
    code: i32,
    stdout: Vec<u8>,
}

fn cli(args: &[&str]) -> Run {
    let out = Command::new(env!("CARGO_BIN_EXE_coxtile"))
        .args(args)
        .env_remove("COXTILE_BALL_CAP")
        .output()
        .expect("binary runs");
    Run {
        code: out.status.code().unwrap_or(-1),
        stdout: out.stdout,
    }
}

fn cli_json(args: &[&str]) -> Result<Value, String> {
    let run = cli(args);
    ensure(run.code == 0, format!("{args:?} exited {}", run.code))?;
    let v: Value = serde_json::from_slice(&run.stdout).map_err(|e| e.to_string())?;
    Ok(v["results"][0].clone())
}

fn c1_sequences() -> Check {
    let start = Instant::now();
    let mt = morse_thue_prefix(4096);
    ensure(verify_power_free(mt.as_slice(), 3, 4096).unwrap().is_free(), "Morse-Thue prefix has a cube")?;
    let t = square_free_prefix(4096);
    ensure(verify_power_free(t.as_slice(), 2, 4096).unwrap().is_free(), "ternary prefix has a square")?;
    ensure(t.as_slice()[..9] == [0, 2, 1, 0, 1, 2, 0, 2, 1], "first ternary terms")?;
    let seq = cli_json(&["seq", "--kind", "ternary", "--n", "9"])?;
    ensure(seq["terms"] == serde_json::json!([0, 2, 1, 0, 1, 2, 0, 2, 1]), "CLI ternary terms")?;
    within(start, Duration::from_secs(5))?;
    Ok(format!("cube-free and square-free to 4096, prefix 021012021 ({:.2?})", start.elapsed()))
}

fn c2_z_colorings() -> Check {
    let start = Instant::now();
    let mut pairs = 0;
    for n in (-100i64..=100).filter(|&n| n != 0) {
        for m in -100i64..=100 {
            let q = z_witness(n, m).ok_or(format!("no witness for n={n}, m={m}"))?;
            ensure((q - m).abs() <= 3 * n.abs(), format!("witness {q} too far for n={n}, m={m}"))?;
            let phi = |x| z_color(ZColoringKind::MorseThue, x);
            ensure(phi(q) != phi(q + n), format!("witness {q} does not separate n={n}"))?;
            pairs += 1;
        }
    }
    // Squares: the translate by h agrees with its shift by 1 on the whole
    // window of radius 10.
    let z = Lattice::new(1);
    let h = squares_gap_shift(squares_limit_defect(1, 10));
    let scale = ReportScale { g_radius: 1, h_radius: h as usize, window: 10 };
    let r = scale.required_radius();
    let carrier = z.ball(r);
    let report = aperiodicity_report(&z, &carrier, r, |p: &LatticePoint| Some(z_color(ZColoringKind::Squares, p.0[0])), scale)
        .map_err(|e| e.to_string())?;
    let hit = report.unwitnessed().any(|p| p.g == "(1)" && p.h == format!("({h})"));
    ensure(hit, "squares coloring has no unwitnessed pair")?;
    ensure((-10..=10).all(|x| z_color(ZColoringKind::Squares, h + x) == z_color(ZColoringKind::Squares, h + x - 1)), "window check")?;
    within(start, Duration::from_secs(10))?;
    Ok(format!("{pairs} pairs witnessed within 3|n|; squares unwitnessed at (1, {h}) ({:.2?})", start.elapsed()))
}

fn c3_coxeter_core() -> Check {
    let inf = CoxeterSystem::infinite_dihedral();
    let ball = enumerate_ball(&inf, 50, DEFAULT_BALL_CAP).unwrap();
    let expected: Vec<usize> = (0..=50).map(|r| if r == 0 { 1 } else { 2 }).collect();
    ensure(ball.sphere_sizes() == expected.as_slice(), "infinite dihedral sphere sizes")?;
    let mut compared = 0;
    for sys in [
        CoxeterSystem::dihedral(3),
        CoxeterSystem::dihedral(4),
        CoxeterSystem::dihedral(5),
        inf.clone(),
        CoxeterSystem::pentagon(),
    ] {
        let naive = oracle::NaiveGroup::new(sys.matrix());
        let reference = naive.ball(5000, 10_000);
        let r = reference.words.last().map_or(0, Vec::len);
        // The last layer may be cut by the cap; compare the complete ones.
        let complete = if reference.words.len() == 10_000 { r - 1 } else { r };
        let ball = enumerate_ball(&sys, complete, DEFAULT_BALL_CAP).unwrap();
        let want: Vec<&[u8]> = reference.words.iter().filter(|w| w.len() <= complete).map(Vec::as_slice).collect();
        let got: Vec<&[u8]> = ball.elements().iter().map(|w| w.letters()).collect();
        ensure(got == want, format!("normal forms differ from BFS on {:?}", sys.matrix()))?;
        compared += got.len();
    }
    let hex = CoxeterSystem::right_angled_polygon(6);
    let pent = CoxeterSystem::pentagon();
    let mut interior = 0;
    for sys in [&pent, &hex] {
        let ball = enumerate_ball(sys, 5, DEFAULT_BALL_CAP).unwrap();
        let walls = enumerate_walls(sys, &ball);
        let e = Word::identity();
        for g in &ball.elements()[ball.sub_ball(4)] {
            let count = (0..walls.len())
                .filter(|&w| separates(sys, &ball, &walls, w, &e, g).unwrap())
                .count();
            ensure(count == g.len(), format!("wall count {count} != norm {}", g.len()))?;
            interior += 1;
        }
    }
    Ok(format!("spheres 1,2,2,... to 50; {compared} normal forms match BFS; wall count = norm on {interior} elements"))
}

/// Every geodesic gallery with increasing norm, of at least `min_len`
/// edges, inside the ball.
fn radial_segments(sys: &CoxeterSystem, radius: usize, min_len: usize) -> Vec<GeodesicSegment> {
    fn extend(sys: &CoxeterSystem, path: &mut Vec<Word>, radius: usize, min_len: usize, out: &mut Vec<GeodesicSegment>) {
        if path.len() > min_len {
            out.push(GeodesicSegment { vertices: path.clone() });
        }
        let last = path.last().unwrap().clone();
        if last.len() == radius {
            return;
        }
        for s in sys.generators() {
            let next = sys.append(&last, s);
            if next.len() > last.len() {
                path.push(next);
                extend(sys, path, radius, min_len, out);
                path.pop();
            }
        }
    }
    let ball = enumerate_ball(sys, radius - min_len, DEFAULT_BALL_CAP).unwrap();
    let mut out = Vec::new();
    for y in ball.elements() {
        extend(sys, &mut vec![y.clone()], radius, min_len, &mut out);
    }
    out
}

fn c4_radial_claim() -> Check {
    let start = Instant::now();
    let sys = CoxeterSystem::pentagon();
    let big = enumerate_ball(&sys, 8, DEFAULT_BALL_CAP).unwrap();
    let phi = norm_coloring(&big);
    let segments = radial_segments(&sys, 6, 5);
    let gs = &big.elements()[big.sub_ball(2)];
    let mut passes = 0;
    for g in gs {
        for seg in &segments {
            match radial_claim_check(&sys, |x: &Word| phi.get(x), g, seg).map_err(|e| e.to_string())? {
                ClaimVerdict::Fail { index } => return Err(format!("claim fails at vertex {index}")),
                ClaimVerdict::Pass => passes += 1,
                ClaimVerdict::HypothesesNotSatisfied => {}
            }
        }
    }
    // Planted violation: recolor the image of a segment under a generator
    // so the hypotheses hold while norms shift. The image must miss the
    // segment itself, or the recoloring would change it too.
    let (seg, g) = segments
        .iter()
        .flat_map(|seg| sys.generators().map(move |s| (seg, Word(vec![s]))))
        .find(|(seg, g)| seg.vertices.iter().all(|x| !seg.vertices.contains(&sys.mul(g, x))))
        .ok_or("no segment with a disjoint image")?;
    let mut planted = phi.clone();
    for x in &seg.vertices {
        planted.assignment.insert(sys.mul(&g, x), phi.get(x).unwrap());
    }
    let caught = radial_claim_check(&sys, |x: &Word| planted.get(x), &g, seg).map_err(|e| e.to_string())?;
    ensure(matches!(caught, ClaimVerdict::Fail { .. }), format!("planted violation missed: {caught:?}"))?;
    within(start, Duration::from_secs(60))?;
    Ok(format!(
        "{} g x {} segments, {passes} with hypotheses met, all pass; planted violation caught ({:.2?})",
        gs.len(),
        segments.len(),
        start.elapsed()
    ))
}

fn c5_lattice() -> Check {
    let z2 = Lattice::new(2);
    let a = z2.point(&[1, -1]);
    for r in 1..=8i64 {
        let ball = z2.ball(2 * r as usize);
        let DisplacementVerdict::Failure { witnesses } = displacement_exponent(&z2, &a, &ball, r as usize) else {
            return Err(format!("no failure at r = {r}"));
        };
        ensure(witnesses.contains(&z2.point(&[r, r])), format!("(r, r) missing at r = {r}"))?;
        for k in 0..=r {
            ensure(z2.point(&[r - k, r + k]).l1() == 2 * r as usize, "norm of (r,r) - k(1,-1)")?;
        }
    }
    Ok("(r, r) is a failure witness for r = 1..8".into())
}

fn c6_walls() -> Check {
    let sys = CoxeterSystem::right_angled_polygon(6);
    let palette = Palette::alternating(6);
    let ball = enumerate_ball(&sys, 6, DEFAULT_BALL_CAP).unwrap();
    let walls = enumerate_walls(&sys, &ball);
    let classes = color_walls(&sys, &ball, &walls, &palette).map_err(|e| e.to_string())?;
    ensure(classes.len() == 2 && classes.iter().all(|c| c.certificate.residues_checked > 0), "class certificates")?;
    let e = Word::identity();
    let levels = peel_levels(&sys, &ball, &walls, &palette, &e).map_err(|e| e.to_string())?;
    let mut vertices = 0;
    for class in 0..2 {
        let tree = build_wall_tree(&sys, &ball, &walls, &palette, &levels, class).map_err(|e| e.to_string())?;
        tree.verify().map_err(|e| e.to_string())?;
        ensure(tree.edges().len() + 1 == tree.vertices.len(), "tree edge count")?;
        vertices += tree.vertices.len();
    }
    let tests: Vec<Word> = ball.elements()[ball.sub_ball(2)].to_vec();
    let report = rebase_parity_check(&sys, &ball, &walls, &palette, &tests).map_err(|e| e.to_string())?;
    ensure(report.consistent, "rebasing is not a per-class flip")?;
    Ok(format!(
        "{} walls in 2 disjoint classes, trees on {vertices} walls, {} rebases consistent",
        walls.len(),
        report.records.len()
    ))
}

fn grid_oracle(a: &TileAlphabet) -> (bool, bool) {
    let vs = a.tile_vectors();
    let k = a.colors.len();
    let mut w = vec![-2i64; k];
    let (mut positive, mut nonneg) = (false, false);
    loop {
        let sums: Vec<i64> = vs.iter().map(|v| v.iter().zip(&w).map(|(x, y)| x * y).sum()).collect();
        positive |= sums.iter().all(|&s| s > 0);
        nonneg |= w.iter().any(|&x| x != 0) && sums.iter().all(|&s| s >= 0);
        let mut i = 0;
        while i < k && w[i] == 2 {
            w[i] = -2;
            i += 1;
        }
        if i == k {
            return (positive, nonneg);
        }
        w[i] += 1;
    }
}

fn agrees_with_grid(a: &TileAlphabet) -> Result<(), String> {
    let verdict = classify_balance(a).map_err(|e| e.to_string())?;
    let (positive, nonneg) = grid_oracle(a);
    let ok = match &verdict {
        BalanceVerdict::Unbalanced { witness } => {
            verify_unbalanced_witness(a, &WeightFunction::from_integers(witness)).all_positive
        }
        BalanceVerdict::StrictlyBalanced => !positive && !nonneg,
        BalanceVerdict::Semibalanced { witness } => {
            let sums = verify_unbalanced_witness(a, &WeightFunction::from_integers(witness)).sums;
            !positive && sums.iter().all(|s| *s >= coxtile::lp::rat(0))
        }
        BalanceVerdict::ZeroCone => a.tile_vectors().iter().flatten().all(|&x| x == 0),
    };
    ensure(ok && (!positive || verdict.name() == "unbalanced"), format!("classifier and grid disagree: {}", verdict.name()))
}

fn random_alphabet(rng: &mut u64, colors: usize) -> TileAlphabet {
    let mut next = |n: u64| {
        *rng ^= *rng << 13;
        *rng ^= *rng >> 7;
        *rng ^= *rng << 17;
        *rng % n
    };
    let tiles: Vec<Tile> = (0..1 + next(6))
        .map(|_| {
            Tile::new(
                (0..1 + next(6))
                    .map(|_| FaceLabel {
                        color: format!("c{}", next(colors as u64)),
                        sign: if next(2) == 0 { Sign::Plus } else { Sign::Minus },
                    })
                    .collect(),
            )
        })
        .collect();
    TileAlphabet::from_tiles(tiles, Provenance { coloring: "random".into(), orientation: "random".into(), radius: 0 })
}

fn c7_balance() -> Check {
    let start = Instant::now();
    let sys = CoxeterSystem::right_angled_polygon(6);
    let palette = Palette::alternating(6);
    let ball = enumerate_ball(&sys, 5, DEFAULT_BALL_CAP).unwrap();
    let walls = enumerate_walls(&sys, &ball);
    let e = Word::identity();
    let levels = peel_levels(&sys, &ball, &walls, &palette, &e).map_err(|e| e.to_string())?;
    let colors: Vec<Option<String>> = walls.walls().iter().map(|w| Some(class_name(palette.color(w.generator)))).collect();
    let prov = |o: &str| Provenance { coloring: "class".into(), orientation: o.into(), radius: 5 };
    let alt = orient_alternating(&walls, &palette, &levels, &[]);
    let alt_alpha = build_alphabet(&BallResolution { sys: &sys, ball: &ball, walls: &walls, colors: colors.clone(), orientation: &alt }, prov("alternating"));
    let v = classify_balance(&alt_alpha).map_err(|e| e.to_string())?;
    ensure(v == BalanceVerdict::StrictlyBalanced, format!("alternating: {}", v.name()))?;
    let plus = orient_all_plus(&walls, &e);
    let plus_alpha = build_alphabet(&BallResolution { sys: &sys, ball: &ball, walls: &walls, colors, orientation: &plus }, prov("all_plus"));
    let v = classify_balance(&plus_alpha).map_err(|e| e.to_string())?;
    ensure(v.name() == "unbalanced", format!("all-plus: {}", v.name()))?;
    let ones = WeightFunction::from_integers(&plus_alpha.colors.iter().map(|c| (c.clone(), 1)).collect());
    ensure(verify_unbalanced_witness(&plus_alpha, &ones).all_positive, "the +-1 weight does not make every sum positive")?;
    // CLI agrees.
    let report = cli_json(&["balance", "--system", "hexagon", "--radius", "5"])?;
    ensure(report["verdict"] == "strictly_balanced", "CLI hexagon verdict")?;
    let report = cli_json(&["balance", "--system", "pentagon.json", "--orientation", "alternating", "--radius", "5"])?;
    ensure(report["verdict"] == "strictly_balanced", "CLI pentagon verdict")?;
    // Grid oracle on demo and random alphabets with at most six colors.
    let mut set = vec![alt_alpha, plus_alpha];
    let mut rng = 0x9e37_79b9_7f4a_7c15u64;
    for k in 0..400 {
        set.push(random_alphabet(&mut rng, 1 + k % 6));
    }
    let mut checked = 0;
    for a in set.iter().filter(|a| a.colors.len() <= 6) {
        agrees_with_grid(a)?;
        checked += 1;
    }
    within(start, Duration::from_secs(120))?;
    Ok(format!("alternating strictly balanced, all-plus unbalanced with +-1 witness, {checked} alphabets match the grid ({:.2?})", start.elapsed()))
}

fn c8_translation() -> Check {
    let sys = CoxeterSystem::right_angled_polygon(6);
    let palette = Palette::alternating(6);
    let ball = enumerate_ball(&sys, 8, DEFAULT_BALL_CAP).unwrap();
    let tiling = exact_alternating_tiling(&sys, &palette, &ball, true);
    let constant = LabeledTiling::constant(&ball, "a");
    let gs: Vec<&Word> = ball.elements()[ball.sub_ball(2)].iter().filter(|g| !g.is_empty()).collect();
    for g in &gs {
        let v = translate_compare(&sys, &tiling, &ball, g, 6).map_err(|e| e.to_string())?;
        ensure(matches!(v, TranslateVerdict::Differs { .. }), format!("{} fixes the tiling", sys.format_word(&g.0)))?;
        let v = translate_compare(&sys, &constant, &ball, g, 6).map_err(|e| e.to_string())?;
        ensure(matches!(v, TranslateVerdict::Fixed { .. }), "constant tiling moved")?;
    }
    let run = cli(&["space", "--system", "hexagon", "--radius", "8", "--depth", "6", "--g-radius", "2", "--expect", "differs"]);
    ensure(run.code == 0, "CLI space verdicts")?;
    Ok(format!("{} translates differ; constant tiling fixed by all", gs.len()))
}

fn c9_geometry() -> Check {
    let poly = build_polygon(3).map_err(|e| e.to_string())?;
    let worst = (0..6).map(|k| (poly.angle(k) - std::f64::consts::FRAC_PI_2).abs()).fold(0.0, f64::max);
    ensure(worst < 1e-9, format!("angle error {worst:e}"))?;
    let r = reflection_matrices(&poly).map_err(|e| e.to_string())?;
    for k in 0..6 {
        let p = r[k].mul(&r[(k + 1) % 6]);
        ensure(p.mul(&p).max_abs_diff(&HIsometry::identity()) < 1e-8, "(R_i R_i+1)^2 != I")?;
    }
    let scene = Scene::build(3, 4, DEFAULT_BALL_CAP, 1.0).map_err(|e| e.to_string())?;
    let ball = enumerate_ball(&scene.sys, 4, DEFAULT_BALL_CAP).unwrap();
    ensure(scene.render_tiles().len() == ball.len(), "tile count")?;
    let undeformed: Vec<_> = scene.placed.iter().map(|t| t.polygon.clone()).collect();
    let overlap = overlap_check(&undeformed, 3);
    ensure(overlap.max_fraction == 0.0, format!("overlap {overlap:?}"))?;
    ensure(overlap_check(&scene.deformed, 3).max_fraction == 0.0, "deformed tiles overlap")?;
    ensure(scene.convexity().map_err(|e| e.to_string())?.iter().all(|&c| c), "nonconvex deformed tile")?;
    let svg = scene.svg(&RenderOptions::default());
    let again = Scene::build(3, 4, DEFAULT_BALL_CAP, 1.0).unwrap().svg(&RenderOptions::default());
    ensure(svg == again, "SVG bytes differ")?;
    ensure(svg.matches("class=\"tile\"").count() == ball.len(), "SVG tile count")?;
    let one = cli(&["render", "--n", "3", "--radius", "0"]);
    let one = String::from_utf8_lossy(&one.stdout);
    ensure(one.matches("<polygon").count() == 1, "radius-0 render")?;
    Ok(format!("angles within {worst:.1e}, {} tiles, no overlap, all convex, SVG deterministic", ball.len()))
}

fn c10_reproducible() -> Check {
    let dir = std::env::temp_dir().join(format!("coxtile-accept-{}", std::process::id()));
    std::fs::create_dir_all(&dir).map_err(|e| e.to_string())?;
    let svg = dir.join("t.svg");
    let svg = svg.to_str().unwrap();
    let runs: Vec<(Vec<&str>, i32)> = vec![
        (vec!["seq", "--kind", "morse-thue", "--n", "64"], 0),
        (vec!["ball", "--system", "pentagon", "--radius", "4", "--list"], 0),
        (vec!["color", "--system", "pentagon", "--g-radius", "1", "--h-radius", "1", "--window", "2"], 0),
        (vec!["walls", "--system", "hexagon", "--radius", "4", "--rebase", "1", "--dump"], 0),
        (vec!["balance", "--system", "hexagon", "--radius", "4", "--orientation", "all-plus"], 0),
        (vec!["render", "--n", "3", "--radius", "2"], 0),
        (vec!["render", "--n", "3", "--radius", "2", "--svg", svg], 0),
        (vec!["space", "--system", "hexagon", "--radius", "6", "--depth", "3", "--tiling", "class", "--g-radius", "2", "--expect", "differs"], 1),
        (vec!["ball", "--system", "nonexistent", "--radius", "2"], 2),
        (vec!["frobnicate"], 2),
        (vec!["balance", "--system", "pentagon", "--radius", "3", "--palette", "a,b"], 2),
    ];
    for (args, code) in &runs {
        let (a, b) = (cli(args), cli(args));
        ensure(a.code == *code, format!("{args:?} exited {} not {code}", a.code))?;
        ensure(a.code == b.code && a.stdout == b.stdout, format!("{args:?} not reproducible"))?;
    }
    let capped = Command::new(env!("CARGO_BIN_EXE_coxtile"))
        .args(["ball", "--system", "pentagon", "--radius", "6"])
        .env("COXTILE_BALL_CAP", "50")
        .output()
        .map_err(|e| e.to_string())?;
    ensure(capped.status.code() == Some(2), "ball cap override ignored")?;
    let _ = std::fs::remove_dir_all(&dir);
    Ok(format!("{} invocations byte-identical with expected exit codes", runs.len()))
}

fn main() {
    let criteria: [(&str, fn() -> Check); 10] = [
        ("sequences", c1_sequences),
        ("Z colorings", c2_z_colorings),
        ("Coxeter core", c3_coxeter_core),
        ("radial claim", c4_radial_claim),
        ("Z^2 counterexample", c5_lattice),
        ("walls and levels", c6_walls),
        ("balance", c7_balance),
        ("translation", c8_translation),
        ("geometry", c9_geometry),
        ("reproducibility", c10_reproducible),
    ];
    let mut failed = BTreeSet::new();
    for (k, (name, check)) in criteria.iter().enumerate() {
        let outcome = std::panic::catch_unwind(check).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(detail) => println!("criterion {:>2} {name}: PASS  {detail}", k + 1),
            Err(why) => {
                println!("criterion {:>2} {name}: FAIL  {why}", k + 1);
                failed.insert(k + 1);
            }
        }
    }
    if !failed.is_empty() {
        println!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
    println!("all 10 criteria pass");
}
