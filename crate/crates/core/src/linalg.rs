//! Tridiagonal factorizations used by every radial solve.
//!
//! The Newton Jacobians of the constrained problems are symmetric but
//! indefinite, so the factorization pivots by rows (the banded LU of
//! LAPACK's `gtsv`: one extra superdiagonal of fill).

use crate::error::{Error, Result};

/// Tridiagonal matrix stored by diagonals. `lower[i]` is entry `(i+1, i)`,
/// `upper[i]` is entry `(i, i+1)`.
#[derive(Debug, Clone)]
pub struct Tridiagonal {
    pub lower: Vec<f64>,
    pub diag: Vec<f64>,
    pub upper: Vec<f64>,
}

impl Tridiagonal {
    pub fn symmetric(diag: Vec<f64>, off: Vec<f64>) -> Self {
        debug_assert_eq!(off.len() + 1, diag.len());
        Tridiagonal { lower: off.clone(), diag, upper: off }
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let n = self.len();
        (0..n)
            .map(|i| {
                let mut y = self.diag[i] * x[i];
                if i > 0 {
                    y += self.lower[i - 1] * x[i - 1];
                }
                if i + 1 < n {
                    y += self.upper[i] * x[i + 1];
                }
                y
            })
            .collect()
    }

    pub fn factor(&self) -> Result<TridiagonalLu> {
        TridiagonalLu::new(self)
    }
}

/// LU factors with partial pivoting.
#[derive(Debug, Clone)]
pub struct TridiagonalLu {
    // U has three diagonals: d, u1, u2.
    d: Vec<f64>,
    u1: Vec<f64>,
    u2: Vec<f64>,
    multipliers: Vec<f64>,
    swapped: Vec<bool>,
}

impl TridiagonalLu {
    fn new(a: &Tridiagonal) -> Result<Self> {
        let n = a.len();
        let mut d = a.diag.clone();
        let mut u1 = a.upper.clone();
        u1.push(0.0);
        let mut u2 = vec![0.0; n];
        let mut low = a.lower.clone();
        let mut multipliers = vec![0.0; n.saturating_sub(1)];
        let mut swapped = vec![false; n.saturating_sub(1)];
        let scale = a
            .diag
            .iter()
            .chain(a.upper.iter())
            .fold(0.0f64, |m, v| m.max(v.abs()))
            .max(f64::MIN_POSITIVE);

        for i in 0..n.saturating_sub(1) {
            if low[i].abs() > d[i].abs() {
                // swap rows i and i+1
                swapped[i] = true;
                let (di, ui1, ui2) = (d[i], u1[i], u2[i]);
                d[i] = low[i];
                u1[i] = d[i + 1];
                u2[i] = if i + 1 < n - 1 { u1[i + 1] } else { 0.0 };
                low[i] = di;
                d[i + 1] = ui1;
                if i + 1 < n - 1 {
                    u1[i + 1] = ui2;
                }
            }
            if d[i].abs() <= scale * 1e-300 {
                return Err(Error::Singular(i));
            }
            let m = low[i] / d[i];
            multipliers[i] = m;
            d[i + 1] -= m * u1[i];
            if i + 1 < n - 1 {
                u1[i + 1] -= m * u2[i];
            }
        }
        if n > 0 && d[n - 1].abs() <= scale * 1e-300 {
            return Err(Error::Singular(n - 1));
        }
        Ok(TridiagonalLu { d, u1, u2, multipliers, swapped })
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.d.len();
        let mut y = b.to_vec();
        for i in 0..n.saturating_sub(1) {
            if self.swapped[i] {
                y.swap(i, i + 1);
            }
            y[i + 1] -= self.multipliers[i] * y[i];
        }
        let mut x = vec![0.0; n];
        for i in (0..n).rev() {
            let mut acc = y[i];
            if i + 1 < n {
                acc -= self.u1[i] * x[i + 1];
            }
            if i + 2 < n {
                acc -= self.u2[i] * x[i + 2];
            }
            x[i] = acc / self.d[i];
        }
        x
    }
}

/// Solves the bordered system
/// `[J  -c] [x]   [f]`
/// `[c'  0] [l] = [g]`
/// by block elimination against the factored tridiagonal `J`.
pub fn solve_bordered(j: &TridiagonalLu, c: &[f64], f: &[f64], g: f64) -> Result<(Vec<f64>, f64)> {
    let x0 = j.solve(f);
    let y = j.solve(c);
    let cy: f64 = c.iter().zip(&y).map(|(a, b)| a * b).sum();
    let cx: f64 = c.iter().zip(&x0).map(|(a, b)| a * b).sum();
    let cn: f64 = c.iter().map(|v| v * v).sum::<f64>().sqrt();
    let yn: f64 = y.iter().map(|v| v * v).sum::<f64>().sqrt();
    if cy.abs() <= 1e-14 * cn * yn {
        return Err(Error::Singular(c.len()));
    }
    let l = (g - cx) / cy;
    let x = x0.iter().zip(&y).map(|(a, b)| a + l * b).collect();
    Ok((x, l))
}
