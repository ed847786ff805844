//! Morse–Thue and square-free ternary sequences, power-freeness scans, and
//! the two colorings of the integers built from them.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Finite prefix of the Morse–Thue sequence.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BinarySeq(pub Vec<u8>);

/// Finite prefix of the square-free ternary sequence.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TernarySeq(pub Vec<u8>);

impl BinarySeq {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[u8] {
        &self.0
    }
}

impl TernarySeq {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[u8] {
        &self.0
    }
}

/// The `i`-th Morse–Thue term: parity of the binary digit sum of `i`.
#[inline]
pub fn morse_thue_term(i: u64) -> u8 {
    (i.count_ones() & 1) as u8
}

/// First `n` Morse–Thue terms, from the digit-sum formula.
pub fn morse_thue_prefix(n: usize) -> BinarySeq {
    BinarySeq((0..n as u64).map(morse_thue_term).collect())
}

/// The `k`-th iterate of `0 -> 01, 1 -> 10` applied to `0` (length `2^k`).
pub fn morse_thue_iterate(k: u32) -> BinarySeq {
    let mut word = vec![0u8];
    for _ in 0..k {
        word = word
            .iter()
            .flat_map(|&b| if b == 0 { [0, 1] } else { [1, 0] })
            .collect();
    }
    BinarySeq(word)
}

/// Recoding of a Morse–Thue length-2 factor: `01 -> 0`, `10 -> 1`,
/// `00 -> 2`, `11 -> 2`.
#[inline]
fn recode_pair(a: u8, b: u8) -> u8 {
    match (a, b) {
        (0, 1) => 0,
        (1, 0) => 1,
        _ => 2,
    }
}

/// `ν(i)`: the recoded Morse–Thue factor starting at `i`.
#[inline]
pub fn ternary_term(i: u64) -> u8 {
    recode_pair(morse_thue_term(i), morse_thue_term(i + 1))
}

/// First `n` terms of the square-free ternary sequence.
pub fn square_free_prefix(n: usize) -> TernarySeq {
    let mt = morse_thue_prefix(n + 1);
    TernarySeq(mt.0.windows(2).map(|w| recode_pair(w[0], w[1])).collect())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum PowerVerdict {
    Free,
    Witness { position: usize, word: Vec<u8> },
}

impl PowerVerdict {
    pub fn is_free(&self) -> bool {
        matches!(self, PowerVerdict::Free)
    }
}

/// Scans the first `scan` symbols of `seq` for a factor `W^p`.
///
/// The reported witness is the leftmost occurrence; among occurrences at the
/// same position the shortest `W` wins.
pub fn verify_power_free(seq: &[u8], p: usize, scan: usize) -> Result<PowerVerdict> {
    if !(2..=3).contains(&p) {
        return Err(Error::InvalidPower(p));
    }
    if scan > seq.len() {
        return Err(Error::InvalidWindow {
            requested: scan,
            available: seq.len(),
        });
    }
    let s = &seq[..scan];
    let mut best: Option<(usize, usize)> = None;
    // W^p at i with |W| = l  <=>  s[j] == s[j + l] for j in i..i + (p-1)l.
    for l in 1..=scan / p {
        let need = (p - 1) * l;
        let mut run = 0usize;
        // Scan backwards so that `run` counts matches starting at j.
        let mut found = None;
        for j in (0..scan - l).rev() {
            if s[j] == s[j + l] {
                run += 1;
            } else {
                run = 0;
            }
            if run >= need {
                found = Some(j);
            }
        }
        if let Some(i) = found {
            if best.map_or(true, |(bi, _)| i < bi) {
                best = Some((i, l));
            }
        }
    }
    Ok(match best {
        None => PowerVerdict::Free,
        Some((position, l)) => PowerVerdict::Witness {
            position,
            word: s[position..position + l].to_vec(),
        },
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ZColoringKind {
    MorseThue,
    Squares,
}

fn is_perfect_square(n: u64) -> bool {
    let r = (n as f64).sqrt() as u64;
    (r.saturating_sub(1)..=r + 1).any(|k| k * k == n)
}

/// Colorings of `Z` defined through `|x|`.
pub fn z_color(kind: ZColoringKind, x: i64) -> u8 {
    let a = x.unsigned_abs();
    match kind {
        ZColoringKind::MorseThue => morse_thue_term(a),
        ZColoringKind::Squares => is_perfect_square(a) as u8,
    }
}

/// Searches `|q - m| <= 3|n|` for `q` with `φ(q) != φ(q + n)` under the
/// Morse–Thue coloring. Ties go to the smaller `|q - m|`, then smaller `q`.
/// `None` would falsify the bounded-witness property at `(n, m)`.
pub fn z_witness(n: i64, m: i64) -> Option<i64> {
    assert!(n != 0, "z_witness requires a nonzero shift");
    let reach = 3 * n.abs();
    let phi = |x: i64| z_color(ZColoringKind::MorseThue, x);
    (0..=reach).find_map(|d| {
        [m - d, m + d]
            .into_iter()
            .find(|&q| phi(q) != phi(q + n))
    })
}

/// Shift at which the squares coloring is examined: the midpoint `m² + m`
/// of the gap between `m²` and `(m+1)²`.
pub fn squares_gap_shift(m: i64) -> i64 {
    m * m + m
}

/// Least `m >= 1` such that the squares coloring translated by `m² + m` is
/// identically zero on `[-ρ-|a|, ρ+|a|]`. Such windows exist for every `ρ`
/// because gaps between consecutive squares grow without bound, so the
/// translates accumulate on the constant coloring.
pub fn squares_limit_defect(a: i64, rho: i64) -> i64 {
    let half = rho + a.abs();
    (1..)
        .find(|&m| {
            let shift = squares_gap_shift(m);
            (-half..=half).all(|x| z_color(ZColoringKind::Squares, x + shift) == 0)
        })
        .expect("unbounded search")
}
