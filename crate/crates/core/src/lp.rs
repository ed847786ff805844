//! Dense exact simplex over big rationals, for the small cone and
//! feasibility problems of the balance classifier.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Rational = BigRational;

pub fn rat(n: i64) -> Rational {
    BigRational::from_integer(BigInt::from(n))
}

/// `maximize c·x  s.t.  A x <= b, x >= 0` with `b >= 0`, so the slack basis
/// is feasible from the start.
#[derive(Debug, Clone)]
pub struct LinearProgram {
    pub constraints: Vec<Vec<Rational>>,
    pub bounds: Vec<Rational>,
    pub objective: Vec<Rational>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    Optimal { value: Rational, x: Vec<Rational> },
    Unbounded,
}

impl LinearProgram {
    pub fn new(num_vars: usize) -> Self {
        LinearProgram {
            constraints: Vec::new(),
            bounds: Vec::new(),
            objective: vec![Rational::zero(); num_vars],
        }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn add_le(&mut self, row: Vec<Rational>, bound: Rational) {
        assert_eq!(row.len(), self.num_vars());
        assert!(!bound.is_negative(), "right-hand sides must be nonnegative");
        self.constraints.push(row);
        self.bounds.push(bound);
    }

    /// Bland's rule throughout; the problems here are heavily degenerate
    /// (most right-hand sides are zero) so cycling must be ruled out.
    pub fn maximize(&self) -> LpOutcome {
        let m = self.constraints.len();
        let n = self.num_vars();
        let width = n + m + 1;
        let mut t: Vec<Vec<Rational>> = Vec::with_capacity(m + 1);
        for (i, row) in self.constraints.iter().enumerate() {
            let mut r = Vec::with_capacity(width);
            r.extend(row.iter().cloned());
            for k in 0..m {
                r.push(if k == i { Rational::one() } else { Rational::zero() });
            }
            r.push(self.bounds[i].clone());
            t.push(r);
        }
        let mut z: Vec<Rational> = self.objective.iter().map(|c| -c.clone()).collect();
        z.extend(std::iter::repeat(Rational::zero()).take(m + 1));
        t.push(z);
        let mut basis: Vec<usize> = (n..n + m).collect();

        loop {
            let Some(enter) = (0..n + m).find(|&j| t[m][j].is_negative()) else {
                break;
            };
            let mut leave: Option<(usize, Rational)> = None;
            for i in 0..m {
                if t[i][enter].is_positive() {
                    let ratio = &t[i][width - 1] / &t[i][enter];
                    let better = match &leave {
                        None => true,
                        Some((li, lr)) => ratio < *lr || (ratio == *lr && basis[i] < basis[*li]),
                    };
                    if better {
                        leave = Some((i, ratio));
                    }
                }
            }
            let Some((pivot_row, _)) = leave else {
                return LpOutcome::Unbounded;
            };
            pivot(&mut t, pivot_row, enter);
            basis[pivot_row] = enter;
        }

        let mut x = vec![Rational::zero(); n];
        for (i, &bv) in basis.iter().enumerate() {
            if bv < n {
                x[bv] = t[i][width - 1].clone();
            }
        }
        LpOutcome::Optimal {
            value: t[m][width - 1].clone(),
            x,
        }
    }
}

fn pivot(t: &mut [Vec<Rational>], row: usize, col: usize) {
    let p = t[row][col].clone();
    for v in t[row].iter_mut() {
        *v /= &p;
    }
    let pivot_row = t[row].clone();
    for (i, r) in t.iter_mut().enumerate() {
        if i == row || r[col].is_zero() {
            continue;
        }
        let f = r[col].clone();
        for (v, pv) in r.iter_mut().zip(&pivot_row) {
            if !pv.is_zero() {
                *v -= &f * pv;
            }
        }
    }
}
