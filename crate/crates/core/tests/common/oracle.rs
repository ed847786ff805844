#![allow(dead_code)]

//! Naive Cayley-graph BFS over the Tits representation, used as an
//! independent oracle for normal forms. Elements are identified by their
//! rounded matrices; the ShortLex-least word of each element is the first
//! one found when layers are scanned in order and generators ascending.

use std::collections::HashMap;

pub struct NaiveGroup {
    rank: usize,
    gens: Vec<Vec<f64>>,
}

type Key = Vec<i64>;

fn key(m: &[f64]) -> Key {
    m.iter().map(|x| (x * 1e6).round() as i64).collect()
}

impl NaiveGroup {
    /// `matrix[s][t] = 0` is an infinite-order product.
    pub fn new(matrix: &[Vec<u32>]) -> Self {
        let n = matrix.len();
        let b = |s: usize, t: usize| {
            if s == t {
                1.0
            } else if matrix[s][t] == 0 {
                -1.0
            } else {
                -(std::f64::consts::PI / matrix[s][t] as f64).cos()
            }
        };
        // sigma_s(e_t) = e_t - 2 B(s, t) e_s, stored row-major.
        let gens = (0..n)
            .map(|s| {
                let mut m = vec![0.0; n * n];
                for t in 0..n {
                    m[t * n + t] += 1.0;
                    m[s * n + t] -= 2.0 * b(s, t);
                }
                m
            })
            .collect();
        NaiveGroup { rank: n, gens }
    }

    fn times(&self, a: &[f64], s: usize) -> Vec<f64> {
        let n = self.rank;
        let g = &self.gens[s];
        let mut out = vec![0.0; n * n];
        for i in 0..n {
            for k in 0..n {
                let x = a[i * n + k];
                if x != 0.0 {
                    for j in 0..n {
                        out[i * n + j] += x * g[k * n + j];
                    }
                }
            }
        }
        out
    }

    pub fn matrix_of(&self, word: &[u8]) -> Vec<f64> {
        let n = self.rank;
        let mut m = vec![0.0; n * n];
        for i in 0..n {
            m[i * n + i] = 1.0;
        }
        for &s in word {
            m = self.times(&m, s as usize);
        }
        m
    }

    /// ShortLex-least words of all elements up to `radius`, capped at
    /// `limit` elements, in ShortLex order.
    pub fn ball(&self, radius: usize, limit: usize) -> NaiveBall {
        let e = self.matrix_of(&[]);
        let mut words: Vec<Vec<u8>> = vec![Vec::new()];
        let mut index: HashMap<Key, usize> = HashMap::from([(key(&e), 0)]);
        let mut mats = vec![e];
        let mut layer = 0..1;
        for _ in 0..radius {
            let start = words.len();
            for i in layer.clone() {
                for s in 0..self.rank {
                    let m = self.times(&mats[i], s);
                    let k = key(&m);
                    if !index.contains_key(&k) && words.len() < limit {
                        index.insert(k, words.len());
                        let mut w = words[i].clone();
                        w.push(s as u8);
                        words.push(w);
                        mats.push(m);
                    }
                }
            }
            layer = start..words.len();
            if layer.is_empty() {
                break;
            }
        }
        NaiveBall { words, index }
    }
}

pub struct NaiveBall {
    pub words: Vec<Vec<u8>>,
    index: HashMap<Key, usize>,
}

impl NaiveBall {
    pub fn normal_form(&self, group: &NaiveGroup, word: &[u8]) -> Option<&[u8]> {
        self.index
            .get(&key(&group.matrix_of(word)))
            .map(|&i| self.words[i].as_slice())
    }
}
