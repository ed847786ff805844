use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Gen = u8;

/// A word in generator indices. Ordered ShortLex: length first, then
/// lexicographically in the user-supplied generator order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Word(pub Vec<Gen>);

impl Word {
    pub fn identity() -> Self {
        Word(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn letters(&self) -> &[Gen] {
        &self.0
    }

    pub fn reversed(&self) -> Word {
        Word(self.0.iter().rev().copied().collect())
    }
}

impl From<Vec<Gen>> for Word {
    fn from(v: Vec<Gen>) -> Self {
        Word(v)
    }
}

impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0
            .len()
            .cmp(&other.0.len())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// On-disk description: `{"generators": [...], "matrix": [[...]]}` with `0`
/// standing for an infinite-order product.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SystemDescription {
    pub generators: Vec<String>,
    pub matrix: Vec<Vec<u32>>,
}

/// A Coxeter system `(Γ, S)` with its Coxeter matrix.
#[derive(Debug, Clone)]
pub struct CoxeterSystem {
    names: Vec<String>,
    matrix: Vec<Vec<u32>>,
    right_angled: bool,
    /// `-2 B(α_s, α_t)`, row-major; `B = -cos(π/m)`, `-1` for `m = ∞`.
    twice_neg_form: Vec<f64>,
}

impl CoxeterSystem {
    pub fn new(names: Vec<String>, matrix: Vec<Vec<u32>>) -> Result<Self> {
        let n = names.len();
        if n == 0 {
            return Err(Error::InvalidSystem("no generators".into()));
        }
        if n > Gen::MAX as usize {
            return Err(Error::InvalidSystem(format!("too many generators ({n})")));
        }
        if matrix.len() != n || matrix.iter().any(|row| row.len() != n) {
            return Err(Error::InvalidSystem(format!(
                "matrix must be {n}x{n} to match the generator list"
            )));
        }
        for (i, name) in names.iter().enumerate() {
            if names[..i].contains(name) {
                return Err(Error::InvalidSystem(format!("duplicate generator {name:?}")));
            }
        }
        for i in 0..n {
            if matrix[i][i] != 1 {
                return Err(Error::InvalidMatrix {
                    row: i,
                    col: i,
                    reason: format!("diagonal entry must be 1, found {}", matrix[i][i]),
                });
            }
            for j in 0..n {
                if i == j {
                    continue;
                }
                if matrix[i][j] != matrix[j][i] {
                    return Err(Error::InvalidMatrix {
                        row: i,
                        col: j,
                        reason: format!(
                            "matrix is not symmetric ({} vs m[{j}][{i}] = {})",
                            matrix[i][j], matrix[j][i]
                        ),
                    });
                }
                if matrix[i][j] == 1 {
                    return Err(Error::InvalidMatrix {
                        row: i,
                        col: j,
                        reason: "off-diagonal entry 1 would identify two generators".into(),
                    });
                }
            }
        }
        let right_angled = (0..n).all(|i| (0..n).all(|j| i == j || matches!(matrix[i][j], 0 | 2)));
        let mut twice_neg_form = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                let b = match matrix[i][j] {
                    0 => -1.0,
                    m => -(std::f64::consts::PI / m as f64).cos(),
                };
                twice_neg_form[i * n + j] = -2.0 * b;
            }
        }
        Ok(CoxeterSystem {
            names,
            matrix,
            right_angled,
            twice_neg_form,
        })
    }

    pub fn from_description(desc: SystemDescription) -> Result<Self> {
        Self::new(desc.generators, desc.matrix)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let desc: SystemDescription = serde_json::from_str(text)
            .map_err(|e| Error::InvalidSystem(format!("malformed description: {e}")))?;
        Self::from_description(desc)
    }

    pub fn description(&self) -> SystemDescription {
        SystemDescription {
            generators: self.names.clone(),
            matrix: self.matrix.clone(),
        }
    }

    /// Finite dihedral group of order `2m`, or the infinite one for `m = 0`.
    pub fn dihedral(m: u32) -> Self {
        Self::new(
            vec!["s".into(), "t".into()],
            vec![vec![1, m], vec![m, 1]],
        )
        .expect("dihedral matrix is valid")
    }

    pub fn infinite_dihedral() -> Self {
        Self::dihedral(0)
    }

    /// Reflection group of a right-angled regular `p`-gon: adjacent sides
    /// commute, all other pairs generate infinite dihedral groups.
    pub fn right_angled_polygon(p: usize) -> Self {
        assert!(p >= 3);
        let names = (0..p).map(|i| format!("s{i}")).collect();
        let matrix = (0..p)
            .map(|i| {
                (0..p)
                    .map(|j| {
                        if i == j {
                            1
                        } else if (i + 1) % p == j || (j + 1) % p == i {
                            2
                        } else {
                            0
                        }
                    })
                    .collect()
            })
            .collect();
        Self::new(names, matrix).expect("polygon matrix is valid")
    }

    pub fn pentagon() -> Self {
        Self::right_angled_polygon(5)
    }

    pub fn rank(&self) -> usize {
        self.names.len()
    }

    pub fn generator_names(&self) -> &[String] {
        &self.names
    }

    pub fn m(&self, s: Gen, t: Gen) -> u32 {
        self.matrix[s as usize][t as usize]
    }

    pub fn matrix(&self) -> &[Vec<u32>] {
        &self.matrix
    }

    pub fn commute(&self, s: Gen, t: Gen) -> bool {
        self.m(s, t) == 2
    }

    pub fn is_right_angled(&self) -> bool {
        self.right_angled
    }

    pub fn generators(&self) -> impl Iterator<Item = Gen> {
        0..self.rank() as Gen
    }

    pub fn check_letters(&self, word: &[Gen]) -> Result<()> {
        match word.iter().find(|&&s| s as usize >= self.rank()) {
            Some(&s) => Err(Error::UnknownGenerator {
                index: s as usize,
                rank: self.rank(),
            }),
            None => Ok(()),
        }
    }

    /// ShortLex normal form of the element represented by `word`.
    pub fn normal_form(&self, word: &[Gen]) -> Word {
        if self.right_angled {
            self.normal_form_commuting(word)
        } else {
            self.normal_form_tits(word)
        }
    }

    /// `nf(g s)` for `g` already in normal form.
    pub fn append(&self, g: &Word, s: Gen) -> Word {
        if self.right_angled {
            let mut w = g.0.clone();
            self.push_commuting(&mut w, s);
            Word(w)
        } else {
            let mut w = g.0.clone();
            w.push(s);
            self.normal_form_tits(&w)
        }
    }

    /// Normal form via the Tits reflection representation: repeatedly strip
    /// the smallest left descent. A generator `s` is a left descent of `g`
    /// iff `g⁻¹(α_s)` is a negative root; nonzero root coefficients have
    /// magnitude at least 1, so the sign test has a wide margin.
    pub fn normal_form_tits(&self, word: &[Gen]) -> Word {
        let n = self.rank();
        let mut m = identity_matrix(n);
        for &s in word.iter().rev() {
            self.right_mul_sigma(&mut m, s);
        }
        let mut out = Vec::with_capacity(word.len());
        loop {
            let descent = (0..n).find(|&s| (0..n).any(|i| m[i * n + s] < -0.5));
            match descent {
                None => break,
                Some(s) => {
                    out.push(s as Gen);
                    self.right_mul_sigma(&mut m, s as Gen);
                    if out.len() > word.len() {
                        panic!("descent stripping did not terminate; numerical overflow");
                    }
                }
            }
        }
        Word(out)
    }

    /// Normal form by commutation rewriting; right-angled systems only.
    pub fn normal_form_commuting(&self, word: &[Gen]) -> Word {
        assert!(self.right_angled, "commutation rewriting needs a right-angled system");
        let mut w = Vec::with_capacity(word.len());
        for &s in word {
            self.push_commuting(&mut w, s);
        }
        Word(w)
    }

    fn push_commuting(&self, w: &mut Vec<Gen>, s: Gen) {
        // Walk back over letters commuting with s: cancel a matching s, or
        // find the left end of the block s may slide into.
        let mut left = w.len();
        while left > 0 {
            let t = w[left - 1];
            if t == s {
                w.remove(left - 1);
                return;
            }
            if !self.commute(s, t) {
                break;
            }
            left -= 1;
        }
        let pos = (left..w.len()).find(|&p| w[p] > s).unwrap_or(w.len());
        w.insert(pos, s);
    }

    /// `M <- M σ_s`; only column `s` changes.
    fn right_mul_sigma(&self, m: &mut [f64], s: Gen) {
        let n = self.rank();
        let s = s as usize;
        for i in 0..n {
            let ms = m[i * n + s];
            if ms == 0.0 {
                continue;
            }
            for j in 0..n {
                if j == s {
                    continue;
                }
                m[i * n + j] += ms * self.twice_neg_form[s * n + j];
            }
            m[i * n + s] = -ms;
        }
    }

    /// Tits representation matrix of the element spelled by `word`
    /// (row-major, in the simple-root basis).
    pub fn tits_matrix(&self, word: &[Gen]) -> Vec<f64> {
        let mut m = identity_matrix(self.rank());
        for &s in word {
            self.right_mul_sigma(&mut m, s);
        }
        m
    }

    pub fn length(&self, word: &[Gen]) -> usize {
        self.normal_form(word).len()
    }

    pub fn is_reduced(&self, word: &[Gen]) -> bool {
        self.length(word) == word.len()
    }

    pub fn mul(&self, a: &Word, b: &Word) -> Word {
        let mut w = a.0.clone();
        w.extend_from_slice(&b.0);
        self.normal_form(&w)
    }

    pub fn inverse(&self, a: &Word) -> Word {
        self.normal_form(&a.reversed().0)
    }

    /// The reflection `g s g⁻¹` in normal form.
    pub fn reflection(&self, g: &Word, s: Gen) -> Word {
        let mut w = g.0.clone();
        w.push(s);
        w.extend(g.0.iter().rev());
        self.normal_form(&w)
    }

    /// Whether the wall of reflection `r` separates the chamber `g` from the
    /// base chamber `e`: `ℓ(r g) < ℓ(g)`.
    pub fn wall_separates_from_base(&self, r: &Word, g: &Word) -> bool {
        self.mul(r, g).len() < g.len()
    }

    /// Whether the wall of `r` separates chambers `g` and `h`.
    pub fn wall_separates(&self, r: &Word, g: &Word, h: &Word) -> bool {
        self.wall_separates_from_base(r, g) != self.wall_separates_from_base(r, h)
    }

    pub fn parse_word(&self, text: &str) -> Result<Vec<Gen>> {
        let text = text.trim();
        if text.is_empty() || text == "e" {
            return Ok(Vec::new());
        }
        if text.contains(char::is_whitespace) {
            return text.split_whitespace().map(|t| self.parse_name(t)).collect();
        }
        // Greedy longest-name tokenization of a concatenated word.
        let mut out = Vec::new();
        let mut rest = text;
        while !rest.is_empty() {
            let (idx, len) = self
                .names
                .iter()
                .enumerate()
                .filter(|(_, n)| rest.starts_with(n.as_str()))
                .map(|(i, n)| (i, n.len()))
                .max_by_key(|&(_, l)| l)
                .ok_or_else(|| Error::UnknownGeneratorName(rest.to_string()))?;
            out.push(idx as Gen);
            rest = &rest[len..];
        }
        Ok(out)
    }

    fn parse_name(&self, name: &str) -> Result<Gen> {
        self.names
            .iter()
            .position(|n| n == name)
            .map(|i| i as Gen)
            .ok_or_else(|| Error::UnknownGeneratorName(name.to_string()))
    }

    /// Names concatenated when every name is one character, space-separated
    /// otherwise; the identity prints as `e`.
    pub fn format_word(&self, word: &[Gen]) -> String {
        if word.is_empty() {
            return "e".into();
        }
        let sep = if self.names.iter().all(|n| n.chars().count() == 1) {
            ""
        } else {
            " "
        };
        word.iter()
            .map(|&s| self.names[s as usize].as_str())
            .collect::<Vec<_>>()
            .join(sep)
    }
}

fn identity_matrix(n: usize) -> Vec<f64> {
    let mut m = vec![0.0; n * n];
    for i in 0..n {
        m[i * n + i] = 1.0;
    }
    m
}

impl fmt::Display for CoxeterSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CoxeterSystem[{}]", self.names.join(","))
    }
}
