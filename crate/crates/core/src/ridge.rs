//! Weighted ridge regression in closed form.
//!
//! `W = C_α Zᵀ D_α Y` with `C_α = (Zᵀ D_α Z + λI)⁻¹`. `C_α` is never formed:
//! the Cholesky factor `L Lᵀ = Zᵀ D_α Z + λI` is kept and every quantity
//! involving `C_α` goes through triangular solves. In particular the n × n
//! objects (cross terms, leverages) are built as `Vᵀ V'` with `V = L⁻¹ Zᵀ`.

use alloc::vec::Vec;

use crate::cholesky::Cholesky;
use crate::dataset::{Dataset, SampleWeights};
use crate::error::{invalid, Error, Result};
use crate::matrix::Matrix;

/// A fitted weighted ridge model.
#[derive(Debug, Clone, PartialEq)]
pub struct RidgeSolution {
    weights: Matrix,
    lambda: f64,
    c_factor: Cholesky,
    alpha: SampleWeights,
}

pub(crate) fn check_lambda(lambda: f64) -> Result<()> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(invalid(alloc::format!(
            "lambda must be positive and finite, got {lambda}"
        )));
    }
    Ok(())
}

/// Fits `W = (Zᵀ D_α Z + λI)⁻¹ Zᵀ D_α Y`.
///
/// Rows with `α_i = 0` are skipped outright, so the result is the same as
/// fitting on the dataset with those rows removed.
pub fn fit_weighted_ridge(
    data: &Dataset,
    weights: &SampleWeights,
    lambda: f64,
) -> Result<RidgeSolution> {
    check_lambda(lambda)?;
    weights.check_len(data.n())?;
    let (m, k) = (data.m(), data.k());
    let z = data.features();
    let y = data.labels();

    let mut gram = Matrix::zeros(m, m);
    let mut rhs = Matrix::zeros(m, k);
    for (i, &a) in weights.as_slice().iter().enumerate() {
        if a == 0.0 {
            continue;
        }
        let zi = z.row(i);
        let yi = y.row(i);
        for p in 0..m {
            let azp = a * zi[p];
            for q in 0..=p {
                gram[(p, q)] += azp * zi[q];
            }
            for c in 0..k {
                rhs[(p, c)] += azp * yi[c];
            }
        }
    }
    for p in 0..m {
        gram[(p, p)] += lambda;
        for q in 0..p {
            gram[(q, p)] = gram[(p, q)];
        }
    }

    let c_factor = Cholesky::factor(&gram)?;
    let w = c_factor.solve(&rhs)?;
    Ok(RidgeSolution {
        weights: w,
        lambda,
        c_factor,
        alpha: weights.clone(),
    })
}

impl RidgeSolution {
    /// The m × k weight matrix `W`.
    pub fn weights(&self) -> &Matrix {
        &self.weights
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// The sample weights used for the fit.
    pub fn alpha(&self) -> &SampleWeights {
        &self.alpha
    }

    /// Cholesky factor of `Zᵀ D_α Z + λI`.
    pub fn c_factor(&self) -> &Cholesky {
        &self.c_factor
    }

    pub fn m(&self) -> usize {
        self.weights.rows()
    }

    pub fn k(&self) -> usize {
        self.weights.cols()
    }

    /// `features · W`.
    pub fn predict(&self, features: &Matrix) -> Result<Matrix> {
        self.check_features(features)?;
        features.matmul(&self.weights)
    }

    /// `Y − Z W` on the training data.
    pub fn residuals(&self, data: &Dataset) -> Result<Matrix> {
        self.check_data(data)?;
        let mut r = self.predict(data.features())?;
        for i in 0..r.rows() {
            for (v, &y) in r.row_mut(i).iter_mut().zip(data.labels().row(i)) {
                *v = y - *v;
            }
        }
        Ok(r)
    }

    /// `G = Z C_α Z_otherᵀ` (n × q).
    pub fn influence_crossterm(&self, data: &Dataset, other: &Matrix) -> Result<Matrix> {
        self.check_data(data)?;
        self.check_features(other)?;
        let v = self.whiten(data.features())?;
        let v_other = self.whiten(other)?;
        v.transpose().matmul(&v_other)
    }

    /// `G = Z C_α Zᵀ` (n × n), exactly symmetric.
    pub fn gram_crossterm(&self, data: &Dataset) -> Result<Matrix> {
        self.check_data(data)?;
        let v = self.whiten(data.features())?;
        v.transpose().matmul(&v)
    }

    /// Leverages `h_i = z_i C_α z_iᵀ`.
    ///
    /// Fails if some `α_i h_i >= 1`, which cannot happen for `λ > 0` in exact
    /// arithmetic.
    pub fn hat_diagonal(&self, data: &Dataset) -> Result<Vec<f64>> {
        self.check_data(data)?;
        let v = self.whiten(data.features())?;
        let mut h = alloc::vec![0.0; data.n()];
        for a in 0..v.rows() {
            for (hi, &x) in h.iter_mut().zip(v.row(a)) {
                *hi += x * x;
            }
        }
        for (i, (&hi, &ai)) in h.iter().zip(self.alpha.as_slice()).enumerate() {
            let margin = 1.0 - ai * hi;
            if !(margin > 0.0) {
                return Err(Error::DegenerateLeverage { index: i, margin });
            }
        }
        Ok(h)
    }

    /// `V = L⁻¹ Xᵀ` (m × rows of `x`).
    fn whiten(&self, x: &Matrix) -> Result<Matrix> {
        self.c_factor.solve_lower(&x.transpose())
    }

    fn check_features(&self, features: &Matrix) -> Result<()> {
        if features.cols() != self.m() {
            return Err(Error::DimensionMismatch {
                context: "feature columns",
                expected: self.m(),
                found: features.cols(),
            });
        }
        Ok(())
    }

    pub(crate) fn check_data(&self, data: &Dataset) -> Result<()> {
        self.check_features(data.features())?;
        if data.k() != self.k() {
            return Err(Error::DimensionMismatch {
                context: "label columns",
                expected: self.k(),
                found: data.k(),
            });
        }
        self.alpha.check_len(data.n())
    }
}
