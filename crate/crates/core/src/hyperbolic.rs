//! Right-angled regular polygons in the hyperboloid model, their reflection
//! groups, tile placement, vertex deformation and Poincaré-disk SVG output.

use std::collections::HashMap;
use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::coxeter::{Ball, CoxeterSystem, Gen, Word};
use crate::error::{Error, Result};
use crate::tiles::Sign;

/// Point of the upper sheet `x² + y² − z² = −1`, or a spacelike vector.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HPoint {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

pub const ORIGIN: HPoint = HPoint { x: 0.0, y: 0.0, z: 1.0 };

pub fn lorentz(a: &HPoint, b: &HPoint) -> f64 {
    a.x * b.x + a.y * b.y - a.z * b.z
}

impl HPoint {
    pub fn new(x: f64, y: f64, z: f64) -> Self {
        HPoint { x, y, z }
    }

    fn scale(self, k: f64) -> Self {
        HPoint::new(self.x * k, self.y * k, self.z * k)
    }

    fn add(self, o: HPoint) -> Self {
        HPoint::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }

    fn sub(self, o: HPoint) -> Self {
        HPoint::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }

    /// `|x² + y² − z² + 1|`.
    pub fn hyperboloid_defect(&self) -> f64 {
        (lorentz(self, self) + 1.0).abs()
    }

    /// Rescales a timelike vector back onto the sheet.
    pub fn normalized(self) -> Self {
        self.scale(1.0 / (-lorentz(&self, &self)).sqrt())
    }

    pub fn poincare(&self) -> (f64, f64) {
        (self.x / (1.0 + self.z), self.y / (1.0 + self.z))
    }

    pub fn klein(&self) -> (f64, f64) {
        (self.x / self.z, self.y / self.z)
    }
}

/// Hyperbolic distance via `⟨a−b, a−b⟩ = 4 sinh²(d/2)`, which stays
/// accurate for nearby points.
pub fn distance(a: &HPoint, b: &HPoint) -> f64 {
    let c = a.sub(*b);
    2.0 * (lorentz(&c, &c).max(0.0).sqrt() / 2.0).asinh()
}

/// Point at parameter `t` on the geodesic from `a` to `b`.
pub fn geodesic_point(a: &HPoint, b: &HPoint, t: f64) -> HPoint {
    let d = distance(a, b);
    if d < 1e-15 {
        return *a;
    }
    let (wa, wb) = (((1.0 - t) * d).sinh() / d.sinh(), (t * d).sinh() / d.sinh());
    a.scale(wa).add(b.scale(wb))
}

/// Unit spacelike normal of the geodesic through `a` and `b`:
/// `J(a × b)`, normalized.
pub fn side_normal(a: &HPoint, b: &HPoint) -> Result<HPoint> {
    let c = HPoint::new(
        a.y * b.z - a.z * b.y,
        a.z * b.x - a.x * b.z,
        a.x * b.y - a.y * b.x,
    );
    let n = HPoint::new(c.x, c.y, -c.z);
    let q = lorentz(&n, &n);
    if q <= 1e-24 {
        return Err(Error::Numerical("degenerate side normal".into()));
    }
    Ok(n.scale(1.0 / q.sqrt()))
}

/// Linear isometry of the hyperboloid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HIsometry {
    pub m: [[f64; 3]; 3],
}

impl HIsometry {
    pub fn identity() -> Self {
        HIsometry {
            m: [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]],
        }
    }

    /// Reflection in the geodesic with unit normal `n`: `x − 2⟨x,n⟩n`.
    pub fn reflection(n: &HPoint) -> Self {
        let v = [n.x, n.y, n.z];
        let jv = [n.x, n.y, -n.z];
        let mut m = [[0.0; 3]; 3];
        for (i, row) in m.iter_mut().enumerate() {
            for (j, e) in row.iter_mut().enumerate() {
                *e = if i == j { 1.0 } else { 0.0 } - 2.0 * v[i] * jv[j];
            }
        }
        HIsometry { m }
    }

    pub fn apply(&self, p: &HPoint) -> HPoint {
        let v = [p.x, p.y, p.z];
        let r: Vec<f64> = self
            .m
            .iter()
            .map(|row| row.iter().zip(&v).map(|(a, b)| a * b).sum())
            .collect();
        HPoint::new(r[0], r[1], r[2])
    }

    pub fn mul(&self, o: &HIsometry) -> HIsometry {
        let mut m = [[0.0; 3]; 3];
        for (i, row) in m.iter_mut().enumerate() {
            for (j, e) in row.iter_mut().enumerate() {
                *e = (0..3).map(|k| self.m[i][k] * o.m[k][j]).sum();
            }
        }
        HIsometry { m }
    }

    fn column(&self, j: usize) -> HPoint {
        HPoint::new(self.m[0][j], self.m[1][j], self.m[2][j])
    }

    fn set_column(&mut self, j: usize, c: HPoint) {
        self.m[0][j] = c.x;
        self.m[1][j] = c.y;
        self.m[2][j] = c.z;
    }

    /// Largest entry of `MᵀJM − J`.
    pub fn lorentz_defect(&self) -> f64 {
        let j = [1.0, 1.0, -1.0];
        let mut worst: f64 = 0.0;
        for a in 0..3 {
            for b in 0..3 {
                let v = lorentz(&self.column(a), &self.column(b));
                let want = if a == b { j[a] } else { 0.0 };
                worst = worst.max((v - want).abs());
            }
        }
        worst
    }

    /// Gram–Schmidt of the columns in the Lorentz form, timelike column
    /// first.
    pub fn renormalized(&self) -> HIsometry {
        let mut out = *self;
        let t = self.column(2).normalized();
        out.set_column(2, t);
        let mut basis = vec![(t, -1.0)];
        for j in 0..2 {
            let mut c = self.column(j);
            for &(b, q) in &basis {
                c = c.sub(b.scale(lorentz(&c, &b) / q));
            }
            c = c.scale(1.0 / lorentz(&c, &c).sqrt());
            out.set_column(j, c);
            basis.push((c, 1.0));
        }
        out
    }

    pub fn max_abs_diff(&self, o: &HIsometry) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                worst = worst.max((self.m[i][j] - o.m[i][j]).abs());
            }
        }
        worst
    }
}

/// Polygon listed counterclockwise; side `k` runs from vertex `k` to `k+1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HPolygon {
    pub vertices: Vec<HPoint>,
}

impl HPolygon {
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn side(&self, k: usize) -> (HPoint, HPoint) {
        (self.vertices[k], self.vertices[(k + 1) % self.len()])
    }

    /// Interior angle at vertex `k` from the tangent vectors of its sides.
    pub fn angle(&self, k: usize) -> f64 {
        let n = self.len();
        let v = self.vertices[k];
        let tangent = |p: HPoint| p.add(v.scale(lorentz(&p, &v)));
        let a = tangent(self.vertices[(k + n - 1) % n]);
        let b = tangent(self.vertices[(k + 1) % n]);
        let c = lorentz(&a, &b) / (lorentz(&a, &a) * lorentz(&b, &b)).sqrt();
        c.clamp(-1.0, 1.0).acos()
    }

    pub fn side_length(&self) -> f64 {
        let (a, b) = self.side(0);
        distance(&a, &b)
    }

    pub fn transformed(&self, m: &HIsometry) -> HPolygon {
        HPolygon {
            vertices: self.vertices.iter().map(|v| m.apply(v)).collect(),
        }
    }

    /// Hyperboloid point from barycentric weights on the vertices.
    pub fn interior_point(&self, weights: &[f64]) -> HPoint {
        let mut p = HPoint::new(0.0, 0.0, 0.0);
        for (v, w) in self.vertices.iter().zip(weights) {
            p = p.add(v.scale(*w));
        }
        p.normalized()
    }
}

fn regular_polygon(p: usize, radius: f64) -> HPolygon {
    let (sh, ch) = (radius.sinh(), radius.cosh());
    HPolygon {
        vertices: (0..p)
            .map(|k| {
                let t = 2.0 * PI * k as f64 / p as f64;
                HPoint::new(sh * t.cos(), sh * t.sin(), ch)
            })
            .collect(),
    }
}

/// Regular right-angled `2n`-gon centered at the origin; the circumradius is
/// found by bisection on the vertex angle, which falls from the Euclidean
/// value towards 0 as the radius grows.
pub fn build_polygon(n: usize) -> Result<HPolygon> {
    let p = 2 * n;
    if p < 5 {
        return Err(Error::NoSuchPolygon(p));
    }
    let angle = |r: f64| regular_polygon(p, r).angle(0);
    let (mut lo, mut hi) = (1e-6, 1.0);
    while angle(hi) > FRAC_PI_2 {
        hi *= 2.0;
    }
    while hi - lo > 1e-12 {
        let mid = 0.5 * (lo + hi);
        if angle(mid) > FRAC_PI_2 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(regular_polygon(p, 0.5 * (lo + hi)))
}

/// Inward unit normals of the sides: `⟨c, n⟩ > 0` for the center `c`.
pub fn inward_normals(poly: &HPolygon) -> Result<Vec<HPoint>> {
    let center = poly.interior_point(&vec![1.0; poly.len()]);
    (0..poly.len())
        .map(|k| {
            let (a, b) = poly.side(k);
            let n = side_normal(&a, &b)?;
            Ok(if lorentz(&center, &n) < 0.0 { n.scale(-1.0) } else { n })
        })
        .collect()
}

pub fn reflection_matrices(poly: &HPolygon) -> Result<Vec<HIsometry>> {
    Ok(inward_normals(poly)?.iter().map(HIsometry::reflection).collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlacedTile {
    pub word: Word,
    pub isometry: HIsometry,
    pub polygon: HPolygon,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DriftWarning {
    pub word_length: usize,
    pub defect: f64,
}

/// Places `g·P` for every ball element by multiplying reflections along its
/// normal form, renormalizing every 6 factors.
pub fn place_tiles(
    ball: &Ball,
    matrices: &[HIsometry],
    base: &HPolygon,
) -> (Vec<PlacedTile>, Vec<DriftWarning>) {
    let mut isometries: Vec<HIsometry> = Vec::with_capacity(ball.len());
    let mut warnings = Vec::new();
    for g in ball.elements() {
        let m = match g.0.split_last() {
            None => HIsometry::identity(),
            Some((&s, prefix)) => {
                let parent = ball.index_of(&Word(prefix.to_vec())).expect("prefix-closed ball");
                let m = isometries[parent].mul(&matrices[s as usize]);
                if g.len() % 6 == 0 {
                    m.renormalized()
                } else {
                    m
                }
            }
        };
        isometries.push(m);
    }
    let tiles: Vec<PlacedTile> = ball
        .elements()
        .iter()
        .zip(isometries)
        .map(|(g, m)| PlacedTile {
            word: g.clone(),
            isometry: m,
            polygon: base.transformed(&m),
        })
        .collect();
    for t in &tiles {
        let defect = t
            .polygon
            .vertices
            .iter()
            .map(HPoint::hyperboloid_defect)
            .fold(0.0, f64::max);
        if defect > 1e-8 {
            warnings.push(DriftWarning {
                word_length: t.word.len(),
                defect,
            });
        }
    }
    (tiles, warnings)
}

/// Whether a Klein-disk point lies strictly inside a convex polygon of
/// either orientation, with a margin.
fn klein_inside(poly: &[(f64, f64)], p: (f64, f64), margin: f64) -> bool {
    let n = poly.len();
    let side = |k: usize| {
        let (a, b) = (poly[k], poly[(k + 1) % n]);
        let (ex, ey) = (b.0 - a.0, b.1 - a.1);
        (ex * (p.1 - a.1) - ey * (p.0 - a.0)) / (ex * ex + ey * ey).sqrt()
    };
    let first = side(0);
    first.abs() > margin && (1..n).all(|k| side(k) * first.signum() > margin)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OverlapReport {
    pub samples_per_tile: usize,
    /// Largest fraction of one tile's samples found inside another tile.
    pub max_fraction: f64,
    pub worst_pair: Option<(usize, usize)>,
}

/// Barycentric weights of fan-triangle sample points of a `p`-gon.
fn fan_weights(p: usize, per_fan: usize) -> Vec<Vec<f64>> {
    let mut weights = Vec::new();
    let steps = (per_fan + 2) as f64;
    for k in 0..p {
        for a in 1..=per_fan {
            for b in 1..=per_fan + 1 - a {
                let (u, v) = (a as f64 / steps, b as f64 / steps);
                let mut w = vec![(1.0 - u - v) / p as f64; p];
                w[k] += u;
                w[(k + 1) % p] += v;
                weights.push(w);
            }
        }
    }
    weights
}

/// Samples interior points of each (convex) polygon and counts those lying
/// strictly inside some other polygon, in the Klein model.
pub fn overlap_check(polygons: &[HPolygon], per_fan: usize) -> OverlapReport {
    let weights = polygons
        .first()
        .map_or_else(Vec::new, |p| fan_weights(p.len(), per_fan));
    let klein: Vec<Vec<(f64, f64)>> = polygons
        .iter()
        .map(|t| t.vertices.iter().map(HPoint::klein).collect())
        .collect();
    let boxes: Vec<[f64; 4]> = klein
        .iter()
        .map(|pts| {
            pts.iter().fold([f64::MAX, f64::MAX, f64::MIN, f64::MIN], |b, &(x, y)| {
                [b[0].min(x), b[1].min(y), b[2].max(x), b[3].max(y)]
            })
        })
        .collect();
    let mut report = OverlapReport {
        samples_per_tile: weights.len(),
        max_fraction: 0.0,
        worst_pair: None,
    };
    for (i, t) in polygons.iter().enumerate() {
        let pts: Vec<(f64, f64)> = weights.iter().map(|w| t.interior_point(w).klein()).collect();
        let own = boxes[i];
        for (j, other) in klein.iter().enumerate() {
            let b = boxes[j];
            if i == j || b[0] > own[2] || b[2] < own[0] || b[1] > own[3] || b[3] < own[1] {
                continue;
            }
            let inside = pts.iter().filter(|&&q| klein_inside(other, q, 1e-12)).count();
            let frac = inside as f64 / pts.len() as f64;
            if frac > report.max_fraction {
                report.max_fraction = frac;
                report.worst_pair = Some((i, j));
            }
        }
    }
    report
}

fn segments_cross(a: (f64, f64), b: (f64, f64), c: (f64, f64), d: (f64, f64)) -> bool {
    let orient = |p: (f64, f64), q: (f64, f64), r: (f64, f64)| {
        (q.0 - p.0) * (r.1 - p.1) - (q.1 - p.1) * (r.0 - p.0)
    };
    let (o1, o2) = (orient(a, b, c), orient(a, b, d));
    let (o3, o4) = (orient(c, d, a), orient(c, d, b));
    o1 * o2 < 0.0 && o3 * o4 < 0.0
}

/// Klein-model convexity: geodesics are chords there, so the polygon is
/// convex iff consecutive edge cross products share one sign. Errors on a
/// self-intersecting polygon.
pub fn convexity_check(poly: &HPolygon) -> Result<bool> {
    let pts: Vec<(f64, f64)> = poly.vertices.iter().map(HPoint::klein).collect();
    let n = pts.len();
    for i in 0..n {
        for j in i + 2..n {
            if i == 0 && j == n - 1 {
                continue;
            }
            if segments_cross(pts[i], pts[(i + 1) % n], pts[j], pts[(j + 1) % n]) {
                return Err(Error::Geometry(format!(
                    "sides {i} and {j} cross (vertex {} region)",
                    i + 1
                )));
            }
        }
    }
    let turns: Vec<f64> = (0..n)
        .map(|k| {
            let (a, b, c) = (pts[k], pts[(k + 1) % n], pts[(k + 2) % n]);
            (b.0 - a.0) * (c.1 - b.1) - (b.1 - a.1) * (c.0 - b.0)
        })
        .collect();
    Ok(turns.iter().all(|&t| t > 0.0) || turns.iter().all(|&t| t < 0.0))
}

/// Label data for one face of a placed tile: wall class (0 = a, 1 = b),
/// refined color index within the class (0..9) and the sign seen from the
/// tile.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FaceInfo {
    pub class: usize,
    pub color: usize,
    pub sign: Sign,
}

/// Per-color-pair displacement distances.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Magnitudes {
    pub epsilon: f64,
}

impl Magnitudes {
    /// `ε = 0.05 ×` side length of the base polygon.
    pub fn default_for(base: &HPolygon) -> Self {
        Magnitudes {
            epsilon: 0.05 * base.side_length(),
        }
    }

    pub fn scaled(self, k: f64) -> Self {
        Magnitudes {
            epsilon: self.epsilon * k,
        }
    }

    pub fn d(&self, i: usize, j: usize) -> f64 {
        self.epsilon * (9 * i + j + 1) as f64 / 100.0
    }
}

/// Moves every tiling vertex (the crossing of an `a`-wall and a `b`-wall) by
/// `d_ij` along the bisector of the quadrant where both oriented walls are
/// positive. Each geometric vertex, keyed by its rank-2 residue, is moved
/// once and shared by all tiles around it.
pub fn deform_vertices<F>(
    sys: &CoxeterSystem,
    tiles: &[PlacedTile],
    base: &HPolygon,
    faces: F,
    magnitudes: &Magnitudes,
) -> Result<Vec<HPolygon>>
where
    F: Fn(&Word, Gen) -> FaceInfo,
{
    let p = base.len();
    let normals = inward_normals(base)?;
    let mut moved: HashMap<(Word, Gen, Gen), HPoint> = HashMap::new();
    let mut out = Vec::with_capacity(tiles.len());
    for t in tiles {
        let g = &t.word;
        let mut vertices = Vec::with_capacity(p);
        for k in 0..p {
            let (s, u) = (((k + p - 1) % p) as Gen, k as Gen);
            let (lo, hi) = (s.min(u), s.max(u));
            let residue = [
                g.clone(),
                sys.append(g, lo),
                sys.append(g, hi),
                sys.append(&sys.append(g, lo), hi),
            ];
            let key = (residue.iter().min().unwrap().clone(), lo, hi);
            if let Some(v) = moved.get(&key) {
                vertices.push(*v);
                continue;
            }
            let (fs, fu) = (faces(g, s), faces(g, u));
            if fs.class == fu.class {
                return Err(Error::Geometry(format!(
                    "vertex {k} of tile {} is not an a/b crossing",
                    sys.format_word(&g.0)
                )));
            }
            let toward = |f: FaceInfo, n: &HPoint| {
                let n = t.isometry.apply(n);
                if f.sign == Sign::Plus { n } else { n.scale(-1.0) }
            };
            let bisector = toward(fs, &normals[s as usize]).add(toward(fu, &normals[u as usize]));
            let bisector = bisector.scale(1.0 / lorentz(&bisector, &bisector).sqrt());
            let (ia, ib) = if fs.class == 0 { (fs.color, fu.color) } else { (fu.color, fs.color) };
            let d = magnitudes.d(ia, ib);
            let v = t.polygon.vertices[k];
            let w = v.scale(d.cosh()).add(bisector.scale(d.sinh()));
            moved.insert(key, w);
            vertices.push(w);
        }
        out.push(HPolygon { vertices });
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct RenderSide {
    pub color: String,
    pub sign: Option<Sign>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RenderTile {
    pub word: String,
    pub polygon: HPolygon,
    pub sides: Vec<RenderSide>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RenderOptions {
    pub stroke_width: f64,
    pub pixels: u32,
    /// Largest chord deviation, in disk radii.
    pub chord_tolerance: f64,
    pub ticks: bool,
}

impl Default for RenderOptions {
    fn default() -> Self {
        RenderOptions {
            stroke_width: 0.004,
            pixels: 800,
            chord_tolerance: 0.005,
            ticks: true,
        }
    }
}

fn num(v: f64) -> String {
    let s = format!("{v:.5}");
    if s == "-0.00000" {
        "0.00000".into()
    } else {
        s
    }
}

/// Disk-space polyline of the geodesic from `a` to `b`, subdivided until
/// every chord midpoint is within `tol` of the curve.
pub fn geodesic_polyline(a: &HPoint, b: &HPoint, tol: f64) -> Vec<(f64, f64)> {
    fn rec(a: &HPoint, b: &HPoint, t0: f64, t1: f64, tol: f64, depth: u32, out: &mut Vec<(f64, f64)>) {
        let (p0, p1) = (geodesic_point(a, b, t0).poincare(), geodesic_point(a, b, t1).poincare());
        let tm = 0.5 * (t0 + t1);
        let pm = geodesic_point(a, b, tm).poincare();
        let mid = (0.5 * (p0.0 + p1.0), 0.5 * (p0.1 + p1.1));
        let err = ((pm.0 - mid.0).powi(2) + (pm.1 - mid.1).powi(2)).sqrt();
        if err > tol && depth < 20 {
            rec(a, b, t0, tm, tol, depth + 1, out);
            rec(a, b, tm, t1, tol, depth + 1, out);
        } else {
            out.push(p1);
        }
    }
    let mut out = vec![a.poincare()];
    rec(a, b, 0.0, 1.0, tol, 0, &mut out);
    out
}

/// Stroke color for a face label such as `a12`: hue by class, lightness by
/// the refined index.
pub fn label_color(label: &str) -> String {
    let mut chars = label.chars();
    let class = chars.next().map_or(0, |c| (c as u32).saturating_sub('a' as u32)) as f64;
    let index: u32 = chars.filter_map(|c| c.to_digit(10)).fold(0, |acc, d| acc * 3 + d);
    let hue = (215.0 + 150.0 * class) % 360.0;
    let light = 0.30 + 0.045 * (index % 9) as f64;
    hsl_hex(hue, 0.65, light)
}

fn hsl_hex(h: f64, s: f64, l: f64) -> String {
    let c = (1.0 - (2.0 * l - 1.0).abs()) * s;
    let x = c * (1.0 - ((h / 60.0) % 2.0 - 1.0).abs());
    let m = l - c / 2.0;
    let (r, g, b) = match (h / 60.0) as u32 {
        0 => (c, x, 0.0),
        1 => (x, c, 0.0),
        2 => (0.0, c, x),
        3 => (0.0, x, c),
        4 => (x, 0.0, c),
        _ => (c, 0.0, x),
    };
    let byte = |v: f64| ((v + m) * 255.0).round().clamp(0.0, 255.0) as u8;
    format!("#{:02x}{:02x}{:02x}", byte(r), byte(g), byte(b))
}

fn path_data(points: &[(f64, f64)]) -> String {
    let mut d = String::new();
    for (k, (x, y)) in points.iter().enumerate() {
        let _ = write!(d, "{}{} {}", if k == 0 { "M" } else { " L" }, num(*x), num(-*y));
    }
    d
}

/// SVG 1.1 document in the Poincaré disk, y axis pointing up.
pub fn render_svg(tiles: &[RenderTile], opts: &RenderOptions) -> String {
    let mut svg = String::new();
    let _ = writeln!(svg, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{p}" height="{p}" viewBox="-1.05 -1.05 2.1 2.1">"#,
        p = opts.pixels
    );
    let _ = writeln!(
        svg,
        r##"<circle cx="0" cy="0" r="1" fill="#fbfbf8" stroke="#222222" stroke-width="{}"/>"##,
        num(opts.stroke_width)
    );
    for t in tiles {
        let colors: Vec<&str> = t.sides.iter().map(|s| s.color.as_str()).collect();
        let _ = writeln!(
            svg,
            r#"<g class="tile" data-word="{}" data-colors="{}">"#,
            t.word,
            colors.join(" ")
        );
        let n = t.polygon.len();
        let mut outline = Vec::new();
        let mut sides = Vec::new();
        for k in 0..n {
            let (a, b) = t.polygon.side(k);
            let line = geodesic_polyline(&a, &b, opts.chord_tolerance);
            outline.extend_from_slice(&line[..line.len() - 1]);
            sides.push(line);
        }
        let points: Vec<String> = outline.iter().map(|(x, y)| format!("{},{}", num(*x), num(-*y))).collect();
        let _ = writeln!(svg, r##"<polygon points="{}" fill="#eef0f4" stroke="none"/>"##, points.join(" "));
        for (k, line) in sides.iter().enumerate() {
            let side = &t.sides[k];
            let _ = writeln!(
                svg,
                r#"<path d="{}" fill="none" stroke="{}" stroke-width="{}"/>"#,
                path_data(line),
                label_color(&side.color),
                num(opts.stroke_width)
            );
            if let (true, Some(sign)) = (opts.ticks, side.sign) {
                if let Some(tick) = tick_mark(&t.polygon, k, sign) {
                    let _ = writeln!(
                        svg,
                        r#"<path d="{}" fill="none" stroke="{}" stroke-width="{}"/>"#,
                        path_data(&tick),
                        label_color(&side.color),
                        num(opts.stroke_width)
                    );
                }
            }
        }
        let _ = writeln!(svg, "</g>");
    }
    svg.push_str("</svg>\n");
    svg
}

/// Short segment from the midpoint of side `k` toward its positive side:
/// into the tile when the tile sees `+`.
fn tick_mark(poly: &HPolygon, k: usize, sign: Sign) -> Option<Vec<(f64, f64)>> {
    let (a, b) = poly.side(k);
    let mid = geodesic_point(&a, &b, 0.5);
    let n = side_normal(&a, &b).ok()?;
    let center = poly.interior_point(&vec![1.0; poly.len()]);
    let inward = if lorentz(&center, &n) < 0.0 { n.scale(-1.0) } else { n };
    let dir = if sign == Sign::Plus { inward } else { inward.scale(-1.0) };
    let len = 0.12 * distance(&a, &b);
    let tip = mid.scale(len.cosh()).add(dir.scale(len.sinh()));
    Some(vec![mid.poincare(), tip.poincare()])
}

/// Colored, signed and deformed tiles of the right-angled `2n`-gon tiling
/// on a ball, resolved by the alternating orientation over `e`.
#[derive(Debug, Clone)]
pub struct Scene {
    pub sys: CoxeterSystem,
    pub ball: Ball,
    pub base: HPolygon,
    pub placed: Vec<PlacedTile>,
    /// Per tile, per side.
    pub faces: Vec<Vec<FaceInfo>>,
    pub magnitudes: Magnitudes,
    pub deformed: Vec<HPolygon>,
    pub warnings: Vec<DriftWarning>,
}

/// Face color name such as `a12` (class, ν, depth residue).
pub fn face_label(f: &FaceInfo) -> String {
    let (nu, residue) = (f.color / 3, f.color % 3);
    format!("{}{nu}{residue}", crate::tiles::class_name(f.class))
}

impl Scene {
    /// `epsilon_factor` scales the default magnitude; 0 leaves the tiles
    /// undeformed.
    pub fn build(n: usize, radius: usize, cap: usize, epsilon_factor: f64) -> Result<Scene> {
        let base = build_polygon(n)?;
        let sys = CoxeterSystem::right_angled_polygon(2 * n);
        let ball = crate::coxeter::enumerate_ball(&sys, radius, cap)?;
        let matrices = reflection_matrices(&base)?;
        let (placed, warnings) = place_tiles(&ball, &matrices, &base);
        let palette = crate::walls::Palette::alternating(2 * n);
        let oracle = crate::walls::LevelOracle::new(&sys, &palette, Word::identity());
        let faces = ball
            .elements()
            .iter()
            .map(|g| {
                sys.generators()
                    .map(|s| {
                        let face = oracle.face(g, s);
                        let color = oracle.color(&face);
                        let sign = Sign::from_parity(face.level % 2 == 1);
                        let across = sys.append(g, s).len() < g.len();
                        FaceInfo {
                            class: face.class,
                            color: 3 * color.nu as usize + color.residue as usize,
                            sign: if across { sign.flip() } else { sign },
                        }
                    })
                    .collect()
            })
            .collect();
        let mut scene = Scene {
            sys,
            ball,
            magnitudes: Magnitudes::default_for(&base).scaled(epsilon_factor),
            base,
            placed,
            faces,
            deformed: Vec::new(),
            warnings,
        };
        scene.deformed = scene.deform(&scene.magnitudes)?;
        Ok(scene)
    }

    pub fn deform(&self, magnitudes: &Magnitudes) -> Result<Vec<HPolygon>> {
        let lookup = |g: &Word, s: Gen| {
            let i = self.ball.index_of(g).expect("tile in ball");
            self.faces[i][s as usize]
        };
        deform_vertices(&self.sys, &self.placed, &self.base, lookup, magnitudes)
    }

    /// Per-tile Klein convexity of the deformed tiles.
    pub fn convexity(&self) -> Result<Vec<bool>> {
        self.deformed.iter().map(convexity_check).collect()
    }

    pub fn render_tiles(&self) -> Vec<RenderTile> {
        self.placed
            .iter()
            .zip(&self.deformed)
            .zip(&self.faces)
            .map(|((t, poly), faces)| RenderTile {
                word: self.sys.format_word(&t.word.0),
                polygon: poly.clone(),
                sides: faces
                    .iter()
                    .map(|f| RenderSide {
                        color: face_label(f),
                        sign: Some(f.sign),
                    })
                    .collect(),
            })
            .collect()
    }

    pub fn svg(&self, opts: &RenderOptions) -> String {
        render_svg(&self.render_tiles(), opts)
    }

    /// Largest multiple of the default magnitude, to `tol` relative
    /// precision, keeping every tile convex and simple; found by doubling
    /// and bisection, so it assumes failure is monotone in the factor.
    pub fn safe_epsilon_factor(&self, tol: f64) -> Result<f64> {
        let base = Magnitudes::default_for(&self.base);
        let ok = |k: f64| -> Result<bool> {
            let polys = self.deform(&base.scaled(k))?;
            Ok(polys.iter().all(|p| convexity_check(p).unwrap_or(false)))
        };
        let (mut lo, mut hi) = (0.0, 1.0);
        while ok(hi)? {
            lo = hi;
            hi *= 2.0;
            if hi > 1e6 {
                return Ok(lo);
            }
        }
        while hi - lo > tol * hi.max(1.0) {
            let mid = 0.5 * (lo + hi);
            if ok(mid)? {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(lo)
    }
}
