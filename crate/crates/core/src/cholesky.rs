//! Cholesky factorisation `A = L Lᵀ` of symmetric positive definite matrices.

use crate::error::{Error, Result};
use crate::matrix::Matrix;

/// Lower-triangular Cholesky factor. No pivoting.
#[derive(Debug, Clone, PartialEq)]
pub struct Cholesky {
    lower: Matrix,
}

impl Cholesky {
    /// Factors `a`. Only the lower triangle of `a` is read.
    pub fn factor(a: &Matrix) -> Result<Self> {
        let n = a.rows();
        if a.cols() != n {
            return Err(Error::DimensionMismatch {
                context: "cholesky square input",
                expected: n,
                found: a.cols(),
            });
        }
        let mut l = Matrix::zeros(n, n);
        for j in 0..n {
            let mut d = a[(j, j)];
            for p in 0..j {
                d -= l[(j, p)] * l[(j, p)];
            }
            if !(d > 0.0) || !d.is_finite() {
                return Err(Error::NotPositiveDefinite { pivot: j, value: d });
            }
            let d = libm::sqrt(d);
            l[(j, j)] = d;
            for i in (j + 1)..n {
                let mut s = a[(i, j)];
                for p in 0..j {
                    s -= l[(i, p)] * l[(j, p)];
                }
                l[(i, j)] = s / d;
            }
        }
        Ok(Cholesky { lower: l })
    }

    pub fn dim(&self) -> usize {
        self.lower.rows()
    }

    pub fn lower(&self) -> &Matrix {
        &self.lower
    }

    /// Solves `L X = B` for every column of `B`.
    pub fn solve_lower(&self, b: &Matrix) -> Result<Matrix> {
        self.check_rhs(b)?;
        let n = self.dim();
        let mut x = b.clone();
        for i in 0..n {
            for p in 0..i {
                let l_ip = self.lower[(i, p)];
                if l_ip == 0.0 {
                    continue;
                }
                for c in 0..x.cols() {
                    let v = x[(p, c)];
                    x[(i, c)] -= l_ip * v;
                }
            }
            let d = self.lower[(i, i)];
            for v in x.row_mut(i) {
                *v /= d;
            }
        }
        Ok(x)
    }

    /// Solves `Lᵀ X = B` for every column of `B`.
    pub fn solve_upper(&self, b: &Matrix) -> Result<Matrix> {
        self.check_rhs(b)?;
        let n = self.dim();
        let mut x = b.clone();
        for i in (0..n).rev() {
            for p in (i + 1)..n {
                let l_pi = self.lower[(p, i)];
                if l_pi == 0.0 {
                    continue;
                }
                for c in 0..x.cols() {
                    let v = x[(p, c)];
                    x[(i, c)] -= l_pi * v;
                }
            }
            let d = self.lower[(i, i)];
            for v in x.row_mut(i) {
                *v /= d;
            }
        }
        Ok(x)
    }

    /// Solves `A X = B`.
    pub fn solve(&self, b: &Matrix) -> Result<Matrix> {
        self.solve_upper(&self.solve_lower(b)?)
    }

    fn check_rhs(&self, b: &Matrix) -> Result<()> {
        if b.rows() != self.dim() {
            return Err(Error::DimensionMismatch {
                context: "cholesky right-hand side rows",
                expected: self.dim(),
                found: b.rows(),
            });
        }
        Ok(())
    }
}
