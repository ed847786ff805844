//! Walls of the chamber graph: enumeration from edge cocycles, separation,
//! palette color classes, level peeling, wall trees and the wall coloring.

use std::collections::{BTreeMap, HashMap, VecDeque};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::colorings::{tree_norm_coloring, NormColor, RootedTree, NORM_PALETTE_SIZE};
use crate::coxeter::{Ball, CoxeterSystem, Gen, Word};
use crate::error::{Error, Result};

const NO_WALL: u32 = u32::MAX;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Wall {
    /// The reflection `g s g⁻¹` in normal form.
    pub reflection: Word,
    /// Label of the crossed edge nearest the identity.
    pub generator: Gen,
    /// Crossed edges `(i, s)` with `i` the smaller ball index.
    pub edges: Vec<(u32, Gen)>,
}

/// All walls crossing at least one edge of a ball.
#[derive(Debug, Clone)]
pub struct WallSet {
    radius: usize,
    rank: usize,
    walls: Vec<Wall>,
    index: HashMap<Word, usize>,
    edge_wall: Vec<u32>,
}

impl WallSet {
    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn len(&self) -> usize {
        self.walls.len()
    }

    pub fn is_empty(&self) -> bool {
        self.walls.is_empty()
    }

    pub fn walls(&self) -> &[Wall] {
        &self.walls
    }

    pub fn wall(&self, w: usize) -> &Wall {
        &self.walls[w]
    }

    pub fn find(&self, reflection: &Word) -> Option<usize> {
        self.index.get(reflection).copied()
    }

    /// Wall crossed by the edge leaving ball element `i` along `s`.
    pub fn wall_of_edge(&self, i: usize, s: Gen) -> Option<usize> {
        match self.edge_wall[i * self.rank + s as usize] {
            NO_WALL => None,
            w => Some(w as usize),
        }
    }
}

pub fn enumerate_walls(sys: &CoxeterSystem, ball: &Ball) -> WallSet {
    let rank = sys.rank();
    let mut by_reflection: BTreeMap<Word, Wall> = BTreeMap::new();
    for (i, s, _) in ball.edges() {
        let r = sys.reflection(ball.element(i), s);
        by_reflection
            .entry(r.clone())
            .or_insert_with(|| Wall {
                reflection: r,
                generator: s,
                edges: Vec::new(),
            })
            .edges
            .push((i as u32, s));
    }
    let walls: Vec<Wall> = by_reflection.into_values().collect();
    let index: HashMap<Word, usize> = walls
        .iter()
        .enumerate()
        .map(|(k, w)| (w.reflection.clone(), k))
        .collect();
    let mut edge_wall = vec![NO_WALL; ball.len() * rank];
    for (k, wall) in walls.iter().enumerate() {
        for &(i, s) in &wall.edges {
            let j = ball.neighbor(i as usize, s).expect("edge inside ball");
            edge_wall[i as usize * rank + s as usize] = k as u32;
            edge_wall[j * rank + s as usize] = k as u32;
        }
    }
    WallSet {
        radius: ball.radius(),
        rank,
        walls,
        index,
        edge_wall,
    }
}

/// Side of each ball chamber relative to wall `w`: `true` when separated
/// from the identity. Propagates along ball edges, flipping across `w`.
pub fn wall_sides(ball: &Ball, walls: &WallSet, w: usize) -> Result<Vec<bool>> {
    let n = ball.len();
    let mut side: Vec<Option<bool>> = vec![None; n];
    side[0] = Some(false);
    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        let here = side[i].unwrap();
        for s in 0..ball.rank() as Gen {
            let Some(j) = ball.neighbor(i, s) else { continue };
            let there = here ^ (walls.wall_of_edge(i, s) == Some(w));
            match side[j] {
                None => {
                    side[j] = Some(there);
                    queue.push_back(j);
                }
                Some(t) if t != there => {
                    return Err(Error::Inconclusive(format!("wall #{w}")));
                }
                _ => {}
            }
        }
    }
    Ok(side.into_iter().map(|s| s.unwrap_or(false)).collect())
}

/// Whether `g` and `h` lie on different sides of wall `w` inside the ball.
pub fn separates(
    sys: &CoxeterSystem,
    ball: &Ball,
    walls: &WallSet,
    w: usize,
    g: &Word,
    h: &Word,
) -> Result<bool> {
    let locate = |x: &Word| {
        ball.index_of(x)
            .ok_or_else(|| Error::OutOfBall(sys.format_word(&x.0)))
    };
    let (gi, hi) = (locate(g)?, locate(h)?);
    let sides = wall_sides(ball, walls, w)?;
    Ok(sides[gi] != sides[hi])
}

/// Assignment of a base color to each generator. Colors are `0..k`, all used.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Palette {
    colors: Vec<usize>,
}

impl Palette {
    pub fn new(colors: Vec<usize>) -> Result<Self> {
        let k = colors.iter().max().map_or(0, |&c| c + 1);
        if let Some(missing) = (0..k).find(|c| !colors.contains(c)) {
            return Err(Error::InvalidSystem(format!(
                "palette colors must be 0..{k} with none skipped; {missing} is unused"
            )));
        }
        Ok(Palette { colors })
    }

    /// One color per generator.
    pub fn distinct(rank: usize) -> Self {
        Palette {
            colors: (0..rank).collect(),
        }
    }

    /// Two colors alternating around a polygon.
    pub fn alternating(rank: usize) -> Self {
        Palette {
            colors: (0..rank).map(|i| i % 2).collect(),
        }
    }

    pub fn uniform(rank: usize) -> Self {
        Palette {
            colors: vec![0; rank],
        }
    }

    /// Parses `a,b,a,...` or `0,1,0,...`; letters map to colors in order of
    /// first appearance.
    pub fn parse(text: &str) -> Result<Self> {
        let mut names: Vec<&str> = Vec::new();
        let mut colors = Vec::new();
        for tok in text.split(',').map(str::trim) {
            if tok.is_empty() {
                return Err(Error::InvalidSystem(format!("empty palette entry in {text:?}")));
            }
            let c = match names.iter().position(|n| *n == tok) {
                Some(c) => c,
                None => {
                    names.push(tok);
                    names.len() - 1
                }
            };
            colors.push(c);
        }
        Palette::new(colors)
    }

    pub fn color(&self, s: Gen) -> usize {
        self.colors[s as usize]
    }

    pub fn colors(&self) -> &[usize] {
        &self.colors
    }

    pub fn num_classes(&self) -> usize {
        self.colors.iter().max().map_or(0, |&c| c + 1)
    }

    /// Generators joined by an odd `m` are conjugate and must share a color.
    pub fn validate(&self, sys: &CoxeterSystem) -> Result<()> {
        if self.colors.len() != sys.rank() {
            return Err(Error::InvalidSystem(format!(
                "palette has {} entries for {} generators",
                self.colors.len(),
                sys.rank()
            )));
        }
        for s in sys.generators() {
            for t in sys.generators() {
                let m = sys.m(s, t);
                if s < t && m % 2 == 1 && self.color(s) != self.color(t) {
                    return Err(Error::PaletteConflict(format!(
                        "{}/{} are conjugate but colored differently",
                        sys.generator_names()[s as usize],
                        sys.generator_names()[t as usize]
                    )));
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DisjointnessCertificate {
    pub radius: usize,
    /// Finite rank-2 residues wholly inside the ball that were inspected.
    pub residues_checked: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WallColorClass {
    pub color: usize,
    pub members: Vec<usize>,
    pub certificate: DisjointnessCertificate,
}

/// Walls of the residue `x⟨s,t⟩` with `x` its shortest element, when the
/// residue is finite and fits in the ball.
fn residue_walls(ball: &Ball, walls: &WallSet, x: usize, s: Gen, t: Gen, m: usize) -> Option<Vec<usize>> {
    if ball.norm(x) + m > ball.radius() {
        return None;
    }
    let mut seen = vec![x];
    let mut out = Vec::new();
    let mut queue = VecDeque::from([x]);
    while let Some(i) = queue.pop_front() {
        for a in [s, t] {
            let j = ball.neighbor(i, a)?;
            if let Some(w) = walls.wall_of_edge(i, a) {
                if !out.contains(&w) {
                    out.push(w);
                }
            }
            if !seen.contains(&j) {
                seen.push(j);
                queue.push_back(j);
            }
        }
    }
    Some(out)
}

/// Groups walls by the palette color of their type and certifies that no
/// two walls of one class meet. Two walls meet exactly when both cross
/// edges of one finite rank-2 residue, so every such residue inside the
/// ball is inspected.
pub fn color_walls(
    sys: &CoxeterSystem,
    ball: &Ball,
    walls: &WallSet,
    palette: &Palette,
) -> Result<Vec<WallColorClass>> {
    palette.validate(sys)?;
    let mut residues_checked = 0;
    for x in 0..ball.len() {
        for s in sys.generators() {
            for t in sys.generators().filter(|&t| t > s) {
                let m = sys.m(s, t) as usize;
                if m == 0 {
                    continue;
                }
                let minimal = [s, t].iter().all(|&a| {
                    ball.neighbor(x, a)
                        .map_or(true, |j| ball.norm(j) > ball.norm(x))
                });
                if !minimal {
                    continue;
                }
                let Some(ws) = residue_walls(ball, walls, x, s, t, m) else {
                    continue;
                };
                residues_checked += 1;
                for (k, &a) in ws.iter().enumerate() {
                    for &b in &ws[k + 1..] {
                        if palette.color(walls.wall(a).generator)
                            == palette.color(walls.wall(b).generator)
                        {
                            let (a, b) = if a < b { (a, b) } else { (b, a) };
                            return Err(Error::PaletteInvalid {
                                radius: ball.radius(),
                                first: sys.format_word(&walls.wall(a).reflection.0),
                                second: sys.format_word(&walls.wall(b).reflection.0),
                            });
                        }
                    }
                }
            }
        }
    }
    let certificate = DisjointnessCertificate {
        radius: ball.radius(),
        residues_checked,
    };
    let mut classes: Vec<WallColorClass> = (0..palette.num_classes())
        .map(|color| WallColorClass {
            color,
            members: Vec::new(),
            certificate,
        })
        .collect();
    for (k, wall) in walls.walls().iter().enumerate() {
        classes[palette.color(wall.generator)].members.push(k);
    }
    Ok(classes)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Level {
    Determinate(usize),
    /// Not reached by peeling inside the ball.
    Indeterminate,
}

impl Level {
    pub fn value(self) -> Option<usize> {
        match self {
            Level::Determinate(l) => Some(l),
            Level::Indeterminate => None,
        }
    }
}

impl Serialize for Level {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Level::Determinate(l) => ser.serialize_u64(*l as u64),
            Level::Indeterminate => ser.serialize_str("indeterminate"),
        }
    }
}

impl<'de> Deserialize<'de> for Level {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Level(usize),
            Mark(String),
        }
        match Raw::deserialize(de)? {
            Raw::Level(l) => Ok(Level::Determinate(l)),
            Raw::Mark(m) if m == "indeterminate" => Ok(Level::Indeterminate),
            Raw::Mark(m) => Err(serde::de::Error::custom(format!("unknown level {m:?}"))),
        }
    }
}

/// Levels of every wall within its own color class, relative to a base
/// chamber.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LevelMap {
    pub base: Word,
    pub levels: Vec<Level>,
}

impl LevelMap {
    pub fn level(&self, w: usize) -> Level {
        self.levels[w]
    }
}

/// Peels each class from the base chamber: walls touching the base
/// component of the ball minus the class get the next level, then their
/// edges open up. A level found this way is exact, since the ball component
/// at each stage sits inside the true one; walls never reached are marked
/// indeterminate.
pub fn peel_levels(
    sys: &CoxeterSystem,
    ball: &Ball,
    walls: &WallSet,
    palette: &Palette,
    base: &Word,
) -> Result<LevelMap> {
    let b = ball
        .index_of(base)
        .ok_or_else(|| Error::OutOfBall(sys.format_word(&base.0)))?;
    let mut levels = vec![Level::Indeterminate; walls.len()];
    for class in 0..palette.num_classes() {
        let in_class = |w: usize| palette.color(walls.wall(w).generator) == class;
        let mut visited = vec![false; ball.len()];
        visited[b] = true;
        let mut queue = VecDeque::from([b]);
        let mut level = 1;
        loop {
            let mut touched = Vec::new();
            while let Some(i) = queue.pop_front() {
                for s in sys.generators() {
                    let Some(j) = ball.neighbor(i, s) else { continue };
                    if visited[j] {
                        continue;
                    }
                    match walls.wall_of_edge(i, s) {
                        Some(w) if in_class(w) && levels[w] == Level::Indeterminate => {
                            if !touched.contains(&w) {
                                touched.push(w);
                            }
                        }
                        _ => {
                            visited[j] = true;
                            queue.push_back(j);
                        }
                    }
                }
            }
            if touched.is_empty() {
                break;
            }
            for &w in &touched {
                levels[w] = Level::Determinate(level);
            }
            for &w in &touched {
                for &(i, s) in &walls.wall(w).edges {
                    let j = ball.neighbor(i as usize, s).unwrap();
                    for (p, q) in [(i as usize, j), (j, i as usize)] {
                        if visited[p] && !visited[q] {
                            visited[q] = true;
                            queue.push_back(q);
                        }
                    }
                }
            }
            level += 1;
        }
    }
    Ok(LevelMap {
        base: base.clone(),
        levels,
    })
}

/// Levels, tree parents and depths computed from normal forms alone, with
/// no ball: the class walls separating the base from a wall are read off a
/// reduced word to its near chamber, and they are nested in crossing order.
#[derive(Debug, Clone)]
pub struct LevelOracle<'a> {
    sys: &'a CoxeterSystem,
    palette: &'a Palette,
    base: Word,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FaceWall {
    pub reflection: Word,
    pub class: usize,
    pub level: usize,
    /// Class walls separating the base from this wall, outermost first.
    pub chain: Vec<Word>,
}

impl<'a> LevelOracle<'a> {
    pub fn new(sys: &'a CoxeterSystem, palette: &'a Palette, base: Word) -> Self {
        LevelOracle { sys, palette, base }
    }

    pub fn base(&self) -> &Word {
        &self.base
    }

    /// The wall on face `s` of chamber `g`.
    pub fn face(&self, g: &Word, s: Gen) -> FaceWall {
        let sys = self.sys;
        let reflection = sys.reflection(g, s);
        let near = if sys.wall_separates(&reflection, &self.base, g) {
            sys.append(g, s)
        } else {
            g.clone()
        };
        let class = self.palette.color(s);
        let path = sys.mul(&sys.inverse(&self.base), &near);
        let mut chain = Vec::new();
        for (i, &a) in path.0.iter().enumerate() {
            if self.palette.color(a) == class {
                let mut w = self.base.0.clone();
                w.extend_from_slice(&path.0[..i]);
                let prefix = sys.normal_form(&w);
                chain.push(sys.reflection(&prefix, a));
            }
        }
        FaceWall {
            reflection,
            class,
            level: chain.len() + 1,
            chain,
        }
    }

    /// Root of a class for the identity base: the least generator of that
    /// color, which is the ShortLex-least level-1 wall.
    pub fn root(&self, class: usize) -> Option<Word> {
        self.sys
            .generators()
            .find(|&s| self.palette.color(s) == class)
            .map(|s| Word(vec![s]))
    }

    /// Depth in the class wall tree: the root sits at 0, other level-1 walls
    /// hang from it, and every deeper wall hangs from the last wall of its
    /// chain. Defined for the identity base.
    pub fn depth(&self, face: &FaceWall) -> usize {
        debug_assert!(self.base.is_empty());
        let root = self.root(face.class);
        let starts_at_root = match face.chain.first() {
            Some(first) => Some(first) == root.as_ref(),
            None => Some(&face.reflection) == root.as_ref(),
        };
        if starts_at_root {
            face.level - 1
        } else {
            face.level
        }
    }

    pub fn color(&self, face: &FaceWall) -> WallColor {
        WallColor::new(face.class, self.depth(face))
    }
}

/// Refined wall color: the class together with the norm color of
/// the wall's depth in its class tree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct WallColor {
    pub class: usize,
    pub nu: u8,
    pub residue: u8,
}

impl WallColor {
    pub fn new(class: usize, depth: usize) -> Self {
        let c = NormColor::at_distance(depth);
        WallColor {
            class,
            nu: c.nu,
            residue: c.residue,
        }
    }

    pub fn from_norm(class: usize, c: NormColor) -> Self {
        WallColor {
            class,
            nu: c.nu,
            residue: c.residue,
        }
    }

    /// Position in the `9m` palette.
    pub fn index(self) -> usize {
        NORM_PALETTE_SIZE * self.class + 3 * self.nu as usize + self.residue as usize
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WallTree {
    pub class: usize,
    /// Determinate class walls, in wall-set order.
    pub vertices: Vec<usize>,
    pub parent: HashMap<usize, Option<usize>>,
    pub root: Option<usize>,
}

impl WallTree {
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out: Vec<_> = self
            .vertices
            .iter()
            .filter_map(|&v| self.parent[&v].map(|p| (p, v)))
            .collect();
        out.sort();
        out
    }

    pub fn degree(&self, w: usize) -> usize {
        self.edges().iter().filter(|&&(a, b)| a == w || b == w).count()
    }

    pub fn as_rooted(&self) -> Option<(RootedTree, HashMap<usize, usize>)> {
        let root = self.root?;
        let pos: HashMap<usize, usize> = self
            .vertices
            .iter()
            .enumerate()
            .map(|(k, &w)| (w, k))
            .collect();
        let edges: Vec<_> = self
            .edges()
            .into_iter()
            .map(|(a, b)| (pos[&a], pos[&b]))
            .collect();
        Some((RootedTree::from_edges(self.vertices.len(), &edges, pos[&root]), pos))
    }

    /// Acyclic and connected: one root, every other vertex with a parent in
    /// the tree, and no parent chain revisiting a vertex.
    pub fn verify(&self) -> Result<()> {
        let Some(root) = self.root else {
            return if self.vertices.is_empty() {
                Ok(())
            } else {
                Err(Error::TreeStructure("no root".into()))
            };
        };
        for &v in &self.vertices {
            let mut cur = v;
            let mut steps = 0;
            while let Some(p) = self.parent[&cur] {
                if !self.parent.contains_key(&p) {
                    return Err(Error::TreeStructure(format!("wall #{cur} has a parent outside the tree")));
                }
                cur = p;
                steps += 1;
                if steps > self.vertices.len() {
                    return Err(Error::TreeStructure(format!("cycle through wall #{v}")));
                }
            }
            if cur != root {
                return Err(Error::TreeStructure(format!("wall #{v} is not connected to the root")));
            }
        }
        Ok(())
    }
}

/// Builds the class tree on determinate walls: the root is the ShortLex-least
/// level-1 wall, other level-1 walls attach to it, and a level-`L` wall
/// attaches to the unique level-`L-1` class wall separating it from the base.
pub fn build_wall_tree(
    sys: &CoxeterSystem,
    ball: &Ball,
    walls: &WallSet,
    palette: &Palette,
    levels: &LevelMap,
    class: usize,
) -> Result<WallTree> {
    let oracle = LevelOracle::new(sys, palette, levels.base.clone());
    let vertices: Vec<usize> = (0..walls.len())
        .filter(|&w| palette.color(walls.wall(w).generator) == class)
        .filter(|&w| matches!(levels.level(w), Level::Determinate(_)))
        .collect();
    let root = vertices
        .iter()
        .copied()
        .filter(|&w| levels.level(w) == Level::Determinate(1))
        .min_by(|&a, &b| walls.wall(a).reflection.cmp(&walls.wall(b).reflection));
    let mut parent = HashMap::new();
    for &w in &vertices {
        let wall = walls.wall(w);
        let (i, s) = wall.edges[0];
        let face = oracle.face(ball.element(i as usize), s);
        let Level::Determinate(level) = levels.level(w) else { unreachable!() };
        let name = || sys.format_word(&wall.reflection.0);
        if face.level != level {
            return Err(Error::TreeStructure(format!(
                "wall {} peeled at level {level} but {} class walls separate it from the base",
                name(),
                face.level - 1
            )));
        }
        for (k, n) in face.chain.iter().enumerate() {
            let found = walls.find(n).map(|n| levels.level(n));
            if found != Some(Level::Determinate(k + 1)) {
                return Err(Error::TreeStructure(format!(
                    "wall {} between the base and {} is not at level {}",
                    sys.format_word(&n.0),
                    name(),
                    k + 1
                )));
            }
        }
        let p = match face.chain.last() {
            Some(n) => walls.find(n),
            None if Some(w) == root => None,
            None => root,
        };
        parent.insert(w, p);
    }
    let tree = WallTree {
        class,
        vertices,
        parent,
        root,
    };
    tree.verify()?;
    Ok(tree)
}

/// Union of per-class tree colorings: determinate walls get
/// `(class, ν(depth), depth mod 3)`, `9m` colors in all.
pub fn wall_coloring(trees: &[WallTree]) -> Result<HashMap<usize, WallColor>> {
    let mut out = HashMap::new();
    for tree in trees {
        let Some((rooted, pos)) = tree.as_rooted() else { continue };
        let colors = tree_norm_coloring(&rooted)?;
        for (&w, &k) in &pos {
            out.insert(w, WallColor::from_norm(tree.class, colors[k]));
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WallRecord {
    pub canonical_word: String,
    pub color: usize,
    pub level: Level,
    pub tree_parent: Option<String>,
}

pub fn wall_dump(
    sys: &CoxeterSystem,
    walls: &WallSet,
    palette: &Palette,
    levels: &LevelMap,
    trees: &[WallTree],
) -> Vec<WallRecord> {
    let parents: HashMap<usize, usize> = trees
        .iter()
        .flat_map(|t| t.parent.iter().filter_map(|(&w, &p)| p.map(|p| (w, p))))
        .collect();
    walls
        .walls()
        .iter()
        .enumerate()
        .map(|(k, wall)| WallRecord {
            canonical_word: sys.format_word(&wall.reflection.0),
            color: palette.color(wall.generator),
            level: levels.level(k),
            tree_parent: parents
                .get(&k)
                .map(|&p| sys.format_word(&walls.wall(p).reflection.0)),
        })
        .collect()
}
