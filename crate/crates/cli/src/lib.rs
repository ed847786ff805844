//! Command-line front end: argument parsing, subcommand runners and the JSON
//! report envelope.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use coxtile::colorings::{aperiodicity_report, norm_coloring, ReportScale};
use coxtile::coxeter::{enumerate_ball, DEFAULT_BALL_CAP};
use coxtile::hyperbolic::{overlap_check, RenderOptions, Scene};
use coxtile::lp::Rational;
use coxtile::seqs::{morse_thue_prefix, square_free_prefix, verify_power_free};
use coxtile::tiles::{
    build_alphabet, class_name, classify_balance, orient_all_plus, orient_alternating, rebase_parity_check,
    verify_unbalanced_witness, AlphabetReport, BalanceVerdict, BallResolution, Provenance, WeightFunction,
};
use coxtile::tiling_space::{
    exact_alternating_tiling, patch_distance, restrict_patch, translate_compare, translated_patch,
    wall_color_name, LabeledTiling,
};
use coxtile::walls::{
    build_wall_tree, color_walls, enumerate_walls, peel_levels, wall_coloring, wall_dump, Palette,
};
use coxtile::{CoxeterSystem, Error, Word};

pub const REPORT_VERSION: &str = "1";
pub const BALL_CAP_ENV: &str = "COXTILE_BALL_CAP";

#[derive(Debug, Parser)]
#[command(name = "coxtile", version, about = "Aperiodic colorings and tilings of Coxeter groups")]
pub struct Cli {
    /// Largest ball the enumerator may build.
    #[arg(long, global = true, env = BALL_CAP_ENV, default_value_t = DEFAULT_BALL_CAP)]
    pub ball_cap: usize,

    /// Write the JSON report here instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sequence prefixes and power-freeness.
    Seq(SeqArgs),
    /// Ball enumeration statistics.
    Ball(BallArgs),
    /// Norm coloring and its aperiodicity report.
    Color(ColorArgs),
    /// Wall classes, levels and wall trees.
    Walls(WallsArgs),
    /// Tile alphabet of a geometric resolution and its balance verdict.
    Balance(BalanceArgs),
    /// SVG of the convex-polygon tiling of the hyperbolic plane.
    Render(RenderArgs),
    /// Translate comparisons and patch distances.
    Space(SpaceArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SeqKind {
    MorseThue,
    Ternary,
}

#[derive(Debug, Args)]
pub struct SeqArgs {
    #[arg(long, value_enum)]
    pub kind: SeqKind,
    #[arg(long)]
    pub n: usize,
    /// Omit the terms from the report.
    #[arg(long)]
    pub no_terms: bool,
}

#[derive(Debug, Args)]
pub struct SystemArgs {
    /// JSON file, or one of pentagon, hexagon, polygon:P, dihedral:M,
    /// inf-dihedral (a missing file is matched by its stem).
    #[arg(long)]
    pub system: String,
}

#[derive(Debug, Args)]
pub struct BallArgs {
    #[command(flatten)]
    pub system: SystemArgs,
    #[arg(long)]
    pub radius: usize,
    /// Include the elements in ShortLex order.
    #[arg(long)]
    pub list: bool,
}

#[derive(Debug, Args)]
pub struct ColorArgs {
    #[command(flatten)]
    pub system: SystemArgs,
    #[arg(long, default_value_t = 1)]
    pub g_radius: usize,
    #[arg(long, default_value_t = 1)]
    pub h_radius: usize,
    #[arg(long, default_value_t = 2)]
    pub window: usize,
    /// Ball radius; defaults to the smallest the scale allows.
    #[arg(long)]
    pub radius: Option<usize>,
    /// Include every pair, not just the unwitnessed ones.
    #[arg(long)]
    pub pairs: bool,
}

#[derive(Debug, Args)]
pub struct PaletteArgs {
    /// `alternating`, `distinct`, `uniform` or a list such as `a,b,a,b`.
    /// Defaults to alternating for an even number of generators, otherwise
    /// distinct.
    #[arg(long)]
    pub palette: Option<String>,
}

#[derive(Debug, Args)]
pub struct WallsArgs {
    #[command(flatten)]
    pub system: SystemArgs,
    #[command(flatten)]
    pub palette: PaletteArgs,
    #[arg(long)]
    pub radius: usize,
    /// Base chamber for levels.
    #[arg(long, default_value = "e")]
    pub base: String,
    /// Also rebase at every g with ‖g‖ up to this norm.
    #[arg(long)]
    pub rebase: Option<usize>,
    /// Include one record per wall.
    #[arg(long)]
    pub dump: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Orientation {
    Alternating,
    AllPlus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FaceColoring {
    /// Palette class only.
    Class,
    /// Class refined by the wall-tree coloring.
    Refined,
}

#[derive(Debug, Args)]
pub struct BalanceArgs {
    #[command(flatten)]
    pub system: SystemArgs,
    #[command(flatten)]
    pub palette: PaletteArgs,
    #[arg(long)]
    pub radius: usize,
    #[arg(long, value_enum, default_value = "alternating")]
    pub orientation: Orientation,
    #[arg(long, value_enum, default_value = "class")]
    pub coloring: FaceColoring,
    /// Classes whose alternating orientation is reversed, e.g. `b`.
    #[arg(long, value_delimiter = ',')]
    pub flip: Vec<String>,
}

#[derive(Debug, Args)]
pub struct RenderArgs {
    /// The polygon has 2n sides.
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub radius: usize,
    /// Multiple of the default vertex displacement; 0 disables it.
    #[arg(long, default_value_t = 1.0)]
    pub epsilon: f64,
    /// Write the SVG here and print the JSON report; without it the SVG
    /// goes to stdout.
    #[arg(long)]
    pub svg: Option<PathBuf>,
    #[arg(long, default_value_t = 800)]
    pub pixels: u32,
    #[arg(long)]
    pub no_ticks: bool,
    /// Also search for the largest displacement multiple keeping tiles convex.
    #[arg(long)]
    pub scan: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TilingKind {
    Refined,
    Class,
    Constant,
}

#[derive(Debug, Args)]
pub struct SpaceArgs {
    #[command(flatten)]
    pub system: SystemArgs,
    #[command(flatten)]
    pub palette: PaletteArgs,
    #[arg(long)]
    pub radius: usize,
    #[arg(long)]
    pub depth: usize,
    /// Compare translates by every g with 0 < ‖g‖ ≤ this.
    #[arg(long, default_value_t = 1)]
    pub g_radius: usize,
    #[arg(long, value_enum, default_value = "refined")]
    pub tiling: TilingKind,
    /// Fail unless every translate has this verdict.
    #[arg(long, value_enum)]
    pub expect: Option<Expectation>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Expectation {
    Differs,
    Fixed,
}

/// Report envelope.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub version: String,
    pub results: Vec<Value>,
}

pub fn emit_report(results: Vec<Value>) -> String {
    let report = Report {
        version: REPORT_VERSION.into(),
        results,
    };
    let mut text = serde_json::to_string_pretty(&report).expect("report serializes");
    text.push('\n');
    text
}

pub fn parse_report(text: &str) -> serde_json::Result<Report> {
    serde_json::from_str(text)
}

/// Exact rational as `p/q`, always with a denominator.
pub fn rational_string(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

#[derive(Debug)]
pub enum Failure {
    /// Bad input or usage: exit 2.
    Input(String),
    /// A check did not hold: exit 1.
    Verification(String),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Input(_) => 2,
            Failure::Verification(_) => 1,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            Failure::Input(m) | Failure::Verification(m) => m,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        use Error::*;
        match e {
            InvalidWindow { .. } | InvalidPower(_) | InvalidMatrix { .. } | InvalidSystem(_)
            | UnknownGenerator { .. } | UnknownGeneratorName(_) | SizeLimit { .. } | OutOfBall(_)
            | BallTooSmall { .. } | DepthTooLarge { .. } | NoSuchPolygon(_) | PaletteConflict(_)
            | DepthMismatch(..) => Failure::Input(e.to_string()),
            _ => Failure::Verification(e.to_string()),
        }
    }
}

type Outcome = std::result::Result<Output, Failure>;

/// What a run produces: the JSON results, an optional non-JSON document for
/// stdout, and whether every check passed.
#[derive(Debug, Default)]
pub struct Output {
    pub results: Vec<Value>,
    pub raw: Option<String>,
    pub failed: Option<String>,
}

fn to_value<T: Serialize>(t: &T) -> Value {
    serde_json::to_value(t).expect("serializable")
}

pub fn load_system(spec: &str) -> std::result::Result<CoxeterSystem, Failure> {
    let path = Path::new(spec);
    if path.is_file() {
        let text = std::fs::read_to_string(path).map_err(|e| Failure::Input(format!("{spec}: {e}")))?;
        return CoxeterSystem::from_json(&text).map_err(Failure::from);
    }
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or(spec);
    let key = if spec.contains(':') { spec } else { stem };
    let bad = || Failure::Input(format!("unknown system {spec:?}"));
    let number = |s: &str| s.parse::<u32>().map_err(|_| bad());
    match key.split_once(':') {
        None => match key {
            "pentagon" => Ok(CoxeterSystem::pentagon()),
            "hexagon" => Ok(CoxeterSystem::right_angled_polygon(6)),
            "inf-dihedral" | "infinite-dihedral" => Ok(CoxeterSystem::infinite_dihedral()),
            _ => Err(bad()),
        },
        Some(("polygon", p)) => match number(p)? {
            p @ 5.. => Ok(CoxeterSystem::right_angled_polygon(p as usize)),
            _ => Err(Failure::Input("a right-angled polygon needs at least 5 sides".into())),
        },
        Some(("dihedral", m)) => match number(m)? {
            m @ 2.. => Ok(CoxeterSystem::dihedral(m)),
            _ => Err(Failure::Input("dihedral order must be at least 2".into())),
        },
        _ => Err(bad()),
    }
}

pub fn load_palette(arg: &PaletteArgs, sys: &CoxeterSystem) -> std::result::Result<Palette, Failure> {
    let rank = sys.rank();
    let palette = match arg.palette.as_deref() {
        None if rank % 2 == 0 => Palette::alternating(rank),
        None => Palette::distinct(rank),
        Some("alternating") => Palette::alternating(rank),
        Some("distinct") => Palette::distinct(rank),
        Some("uniform") => Palette::uniform(rank),
        Some(list) => Palette::parse(list)?,
    };
    palette.validate(sys)?;
    Ok(palette)
}

fn parse_word(sys: &CoxeterSystem, text: &str) -> std::result::Result<Word, Failure> {
    let letters = sys.parse_word(text)?;
    Ok(sys.normal_form(&letters))
}

pub fn run(cli: &Cli) -> Outcome {
    let cap = cli.ball_cap;
    match &cli.command {
        Command::Seq(a) => run_seq(a),
        Command::Ball(a) => run_ball(a, cap),
        Command::Color(a) => run_color(a, cap),
        Command::Walls(a) => run_walls(a, cap),
        Command::Balance(a) => run_balance(a, cap),
        Command::Render(a) => run_render(a, cap),
        Command::Space(a) => run_space(a, cap),
    }
}

fn run_seq(a: &SeqArgs) -> Outcome {
    let (terms, power, name) = match a.kind {
        SeqKind::MorseThue => (morse_thue_prefix(a.n).0, 3, "morse_thue"),
        SeqKind::Ternary => (square_free_prefix(a.n).0, 2, "ternary"),
    };
    let verdict = verify_power_free(&terms, power, terms.len())?;
    let mut out = Output::default();
    if !verdict.is_free() {
        out.failed = Some(format!("{name} prefix has a power of order {power}"));
    }
    let mut record = json!({
        "command": "seq",
        "kind": name,
        "n": a.n,
        "power": power,
        "power_free": to_value(&verdict),
    });
    if !a.no_terms {
        record["terms"] = to_value(&terms);
    }
    out.results.push(record);
    Ok(out)
}

fn run_ball(a: &BallArgs, cap: usize) -> Outcome {
    let sys = load_system(&a.system.system)?;
    let ball = enumerate_ball(&sys, a.radius, cap)?;
    let mut record = json!({
        "command": "ball",
        "generators": sys.generator_names(),
        "radius": a.radius,
        "size": ball.len(),
        "sphere_sizes": ball.sphere_sizes(),
    });
    if a.list {
        record["elements"] = to_value(&ball.dump(&sys));
    }
    Ok(Output {
        results: vec![record],
        ..Output::default()
    })
}

fn run_color(a: &ColorArgs, cap: usize) -> Outcome {
    let sys = load_system(&a.system.system)?;
    let scale = ReportScale {
        g_radius: a.g_radius,
        h_radius: a.h_radius,
        window: a.window,
    };
    let radius = a.radius.unwrap_or(scale.required_radius());
    let ball = enumerate_ball(&sys, radius, cap)?;
    let coloring = norm_coloring(&ball);
    let report = aperiodicity_report(&sys, ball.elements(), radius, |x| coloring.get(x), scale)?;
    let unwitnessed: Vec<Value> = report.unwitnessed().map(to_value).collect();
    let mut out = Output::default();
    if !unwitnessed.is_empty() {
        out.failed = Some(format!("{} pairs have no witness", unwitnessed.len()));
    }
    let mut record = json!({
        "command": "color",
        "radius": radius,
        "palette_size": coloring.palette_size,
        "scale": to_value(&scale),
        "pairs_checked": report.pairs.len(),
        "all_witnessed": unwitnessed.is_empty(),
        "unwitnessed": unwitnessed,
    });
    if a.pairs {
        record["pairs"] = to_value(&report.pairs);
    }
    out.results.push(record);
    Ok(out)
}

fn run_walls(a: &WallsArgs, cap: usize) -> Outcome {
    let sys = load_system(&a.system.system)?;
    let palette = load_palette(&a.palette, &sys)?;
    let ball = enumerate_ball(&sys, a.radius, cap)?;
    let base = parse_word(&sys, &a.base)?;
    let walls = enumerate_walls(&sys, &ball);
    let classes = color_walls(&sys, &ball, &walls, &palette)?;
    let levels = peel_levels(&sys, &ball, &walls, &palette, &base)?;
    let trees = (0..palette.num_classes())
        .map(|c| build_wall_tree(&sys, &ball, &walls, &palette, &levels, c))
        .collect::<coxtile::Result<Vec<_>>>()?;
    let name = |w: usize| sys.format_word(&walls.wall(w).reflection.0);
    let mut out = Output::default();
    let mut record = json!({
        "command": "walls",
        "radius": a.radius,
        "base": sys.format_word(&base.0),
        "palette": palette.colors(),
        "walls": walls.len(),
        "classes": classes.iter().map(|c| json!({
            "class": class_name(c.color),
            "members": c.members.len(),
            "certificate": to_value(&c.certificate),
        })).collect::<Vec<_>>(),
        "determinate": levels.levels.iter().filter(|l| l.value().is_some()).count(),
        "trees": trees.iter().map(|t| json!({
            "class": class_name(t.class),
            "vertices": t.vertices.len(),
            "root": t.root.map(name),
            "edges": t.edges().into_iter().map(|(x, y)| [name(x), name(y)]).collect::<Vec<_>>(),
            "max_degree": t.vertices.iter().map(|&v| t.degree(v)).max().unwrap_or(0),
        })).collect::<Vec<_>>(),
    });
    if let Some(k) = a.rebase {
        let tests: Vec<Word> = ball.elements()[ball.sub_ball(k.min(a.radius))].to_vec();
        let report = rebase_parity_check(&sys, &ball, &walls, &palette, &tests)?;
        if !report.consistent {
            out.failed = Some("rebasing changed levels other than by per-class flips".into());
        }
        record["rebase"] = to_value(&report);
    }
    if a.dump {
        record["wall_records"] = to_value(&wall_dump(&sys, &walls, &palette, &levels, &trees));
    }
    out.results.push(record);
    Ok(out)
}

fn run_balance(a: &BalanceArgs, cap: usize) -> Outcome {
    let sys = load_system(&a.system.system)?;
    let palette = load_palette(&a.palette, &sys)?;
    let ball = enumerate_ball(&sys, a.radius, cap)?;
    let walls = enumerate_walls(&sys, &ball);
    let e = Word::identity();
    let levels = peel_levels(&sys, &ball, &walls, &palette, &e)?;
    let mut flips = vec![false; palette.num_classes()];
    for name in &a.flip {
        let k = (0..flips.len())
            .find(|&k| class_name(k) == *name)
            .ok_or_else(|| Failure::Input(format!("unknown class {name:?}")))?;
        flips[k] = true;
    }
    let orientation = match a.orientation {
        Orientation::Alternating => orient_alternating(&walls, &palette, &levels, &flips),
        Orientation::AllPlus => orient_all_plus(&walls, &e),
    };
    let colors: Vec<Option<String>> = match a.coloring {
        FaceColoring::Class => walls
            .walls()
            .iter()
            .map(|w| Some(class_name(palette.color(w.generator))))
            .collect(),
        FaceColoring::Refined => {
            let trees = (0..palette.num_classes())
                .map(|c| build_wall_tree(&sys, &ball, &walls, &palette, &levels, c))
                .collect::<coxtile::Result<Vec<_>>>()?;
            let colored = wall_coloring(&trees)?;
            (0..walls.len()).map(|w| colored.get(&w).map(|&c| wall_color_name(c))).collect()
        }
    };
    let provenance = Provenance {
        coloring: match a.coloring {
            FaceColoring::Class => "class".into(),
            FaceColoring::Refined => "refined".into(),
        },
        orientation: match a.orientation {
            Orientation::Alternating => "alternating".into(),
            Orientation::AllPlus => "all_plus".into(),
        },
        radius: a.radius,
    };
    let res = BallResolution {
        sys: &sys,
        ball: &ball,
        walls: &walls,
        colors,
        orientation: &orientation,
    };
    let alphabet = build_alphabet(&res, provenance);
    let verdict = classify_balance(&alphabet)?;
    let mut out = Output::default();
    let mut record = json!({ "command": "balance" });
    if let BalanceVerdict::Unbalanced { witness } = &verdict {
        let check = verify_unbalanced_witness(&alphabet, &WeightFunction::from_integers(witness));
        if !check.all_positive {
            out.failed = Some("unbalanced witness does not make every tile sum positive".into());
        }
        record["witness_check"] = json!({
            "all_positive": check.all_positive,
            "sums": check.sums.iter().map(rational_string).collect::<Vec<_>>(),
        });
    }
    let report = to_value(&AlphabetReport::new(&alphabet, verdict));
    if let (Value::Object(target), Value::Object(fields)) = (&mut record, report) {
        target.extend(fields);
    }
    out.results.push(record);
    Ok(out)
}

fn run_render(a: &RenderArgs, cap: usize) -> Outcome {
    if !(a.epsilon >= 0.0 && a.epsilon.is_finite()) {
        return Err(Failure::Input("--epsilon must be a finite nonnegative number".into()));
    }
    let scene = Scene::build(a.n, a.radius, cap, a.epsilon)?;
    let opts = RenderOptions {
        pixels: a.pixels,
        ticks: !a.no_ticks,
        ..RenderOptions::default()
    };
    let svg = scene.svg(&opts);
    let convex = scene.convexity()?;
    let nonconvex: Vec<String> = scene
        .placed
        .iter()
        .zip(&convex)
        .filter(|(_, c)| !**c)
        .map(|(t, _)| scene.sys.format_word(&t.word.0))
        .collect();
    let overlap = overlap_check(&scene.deformed, 2);
    let mut out = Output::default();
    if !nonconvex.is_empty() {
        out.failed = Some(format!("{} tiles are not convex", nonconvex.len()));
    } else if overlap.max_fraction > 0.0 {
        out.failed = Some("tiles overlap".into());
    }
    match &a.svg {
        None => out.raw = Some(svg),
        Some(path) => {
            std::fs::write(path, &svg).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
            let mut record = json!({
                "command": "render",
                "n": a.n,
                "radius": a.radius,
                "tiles": scene.placed.len(),
                "side_length": format!("{:.12}", scene.base.side_length()),
                "epsilon": format!("{:.12}", scene.magnitudes.epsilon),
                "nonconvex": nonconvex,
                "overlap_samples_per_tile": overlap.samples_per_tile,
                "overlap_max_fraction": overlap.max_fraction,
                "drift_warnings": scene.warnings.len(),
                "svg": path.display().to_string(),
                "svg_bytes": svg.len(),
            });
            if a.scan {
                record["safe_epsilon_factor"] = json!(format!("{:.4}", scene.safe_epsilon_factor(1e-4)?));
            }
            out.results.push(record);
        }
    }
    Ok(out)
}

fn run_space(a: &SpaceArgs, cap: usize) -> Outcome {
    let sys = load_system(&a.system.system)?;
    let palette = load_palette(&a.palette, &sys)?;
    let ball = enumerate_ball(&sys, a.radius, cap)?;
    let tiling = match a.tiling {
        TilingKind::Refined => exact_alternating_tiling(&sys, &palette, &ball, true),
        TilingKind::Class => exact_alternating_tiling(&sys, &palette, &ball, false),
        TilingKind::Constant => LabeledTiling::constant(&ball, "a"),
    };
    let here = restrict_patch(&tiling, a.depth)?;
    let mut records = Vec::new();
    let mut mismatches = 0;
    for g in &ball.elements()[ball.sub_ball(a.g_radius.min(a.radius))] {
        if g.is_empty() {
            continue;
        }
        let verdict = translate_compare(&sys, &tiling, &ball, g, a.depth)?;
        let there = translated_patch(&sys, &tiling, &ball, g, a.depth)?;
        let distance = patch_distance(&here, &there)?;
        let fixed = matches!(verdict, coxtile::tiling_space::TranslateVerdict::Fixed { .. });
        if let Some(expect) = a.expect {
            if fixed != (expect == Expectation::Fixed) {
                mismatches += 1;
            }
        }
        let mut r = json!({ "g": sys.format_word(&g.0), "distance": rational_string(&distance) });
        if let (Value::Object(target), Value::Object(fields)) = (&mut r, to_value(&verdict)) {
            target.extend(fields);
        }
        records.push(r);
    }
    let mut out = Output::default();
    if mismatches > 0 {
        out.failed = Some(format!("{mismatches} translates have the wrong verdict"));
    }
    out.results.push(json!({
        "command": "space",
        "tiling": format!("{:?}", a.tiling).to_lowercase(),
        "radius": a.radius,
        "depth": a.depth,
        "patch": to_value(&here.dump(&sys)),
        "translates": records,
    }));
    Ok(out)
}

/// Runs the CLI and writes its output; returns the process exit code.
pub fn main_with(cli: &Cli) -> i32 {
    match run(cli) {
        Err(f) => {
            eprintln!("error: {}", f.message());
            f.exit_code()
        }
        Ok(out) => {
            let text = match out.raw {
                Some(raw) => raw,
                None => emit_report(out.results),
            };
            let written = match &cli.output {
                Some(path) => std::fs::write(path, &text).map_err(|e| format!("{}: {e}", path.display())),
                None => {
                    use std::io::Write;
                    std::io::stdout().write_all(text.as_bytes()).map_err(|e| e.to_string())
                }
            };
            if let Err(e) = written {
                eprintln!("error: {e}");
                return 2;
            }
            match out.failed {
                Some(msg) => {
                    eprintln!("verification failed: {msg}");
                    1
                }
                None => 0,
            }
        }
    }
}
