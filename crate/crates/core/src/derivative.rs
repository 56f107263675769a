//! Derivatives of the fitted model and of a held-out validation loss with
//! respect to the sample weights `α`.
//!
//! Differentiating `(Zᵀ D_α Z + λI) W = Zᵀ D_α Y` in `α_r` gives the rank-one
//! update
//!
//! ```text
//! ∂W/∂α_r = C_α z_rᵀ (y_r − z_r W)
//! ```
//!
//! so each Jacobian slice is an outer product of `C_α z_rᵀ` with the training
//! residual of sample `r`. Contracting with `∂L_val/∂W = Z_valᵀ L` yields
//!
//! ```text
//! ∂L_val/∂α_r = Σ_c (y_r − z_r W)_c · (G L)_{r,c},   G = Z C_α Z_valᵀ
//! ```
//!
//! which is what [`val_loss_gradient`] evaluates. A sample whose training
//! residual is zero has a zero gradient coordinate.

use alloc::vec;
use alloc::vec::Vec;

use crate::dataset::{Dataset, SampleWeights};
use crate::error::{invalid, Error, Result};
use crate::loss::{loss_derivative_matrix, ValidationLoss};
use crate::matrix::Matrix;
use crate::par::map_indices;
use crate::ridge::{fit_weighted_ridge, RidgeSolution};

/// Gradient of a scalar loss with respect to `α`, with the loss value.
#[derive(Debug, Clone, PartialEq)]
pub struct DatasetGradient {
    pub values: Vec<f64>,
    pub loss_value: f64,
}

impl DatasetGradient {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Default cap on the number of entries in a dense Jacobian.
pub const JACOBIAN_CAP: usize = 10_000_000;

/// Dense `∂W/∂α` of shape n × m × k; `get(r, j, c) = ∂W_{j,c}/∂α_r`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelJacobian {
    n: usize,
    m: usize,
    k: usize,
    data: Vec<f64>,
}

impl ModelJacobian {
    pub fn zeros(n: usize, m: usize, k: usize) -> Self {
        ModelJacobian {
            n,
            m,
            k,
            data: vec![0.0; n * m * k],
        }
    }

    pub fn shape(&self) -> (usize, usize, usize) {
        (self.n, self.m, self.k)
    }

    #[inline]
    pub fn get(&self, r: usize, j: usize, c: usize) -> f64 {
        self.data[(r * self.m + j) * self.k + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, j: usize, c: usize, v: f64) {
        self.data[(r * self.m + j) * self.k + c] = v;
    }

    /// The m × k slice for sample `r`.
    pub fn slice(&self, r: usize) -> Matrix {
        let len = self.m * self.k;
        Matrix::from_vec(self.m, self.k, self.data[r * len..(r + 1) * len].to_vec())
            .expect("slice length")
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    /// `Σ_{j,c} J[r, j, c] · weights_grad[j, c]` for every `r`.
    pub fn contract(&self, weights_grad: &Matrix) -> Result<Vec<f64>> {
        if weights_grad.shape() != (self.m, self.k) {
            return Err(Error::DimensionMismatch {
                context: "jacobian contraction",
                expected: self.m * self.k,
                found: weights_grad.rows() * weights_grad.cols(),
            });
        }
        let len = self.m * self.k;
        Ok((0..self.n)
            .map(|r| {
                crate::matrix::dot(&self.data[r * len..(r + 1) * len], weights_grad.as_slice())
            })
            .collect())
    }
}

/// `∂W/∂α` with the default size cap.
pub fn model_dataset_jacobian(model: &RidgeSolution, data: &Dataset) -> Result<ModelJacobian> {
    model_dataset_jacobian_capped(model, data, JACOBIAN_CAP)
}

pub fn model_dataset_jacobian_capped(
    model: &RidgeSolution,
    data: &Dataset,
    cap: usize,
) -> Result<ModelJacobian> {
    model.check_data(data)?;
    let (n, m, k) = (data.n(), data.m(), data.k());
    let requested = n.saturating_mul(m).saturating_mul(k);
    if requested > cap {
        return Err(Error::SizeGuard { requested, cap });
    }
    // columns of u are C_α z_rᵀ
    let u = model.c_factor().solve(&data.features().transpose())?;
    let res = model.residuals(data)?;
    let mut jac = ModelJacobian::zeros(n, m, k);
    for r in 0..n {
        let rr = res.row(r);
        for j in 0..m {
            let ujr = u[(j, r)];
            for (c, &v) in rr.iter().enumerate() {
                jac.set(r, j, c, ujr * v);
            }
        }
    }
    Ok(jac)
}

/// `∂L_val/∂W = Z_valᵀ L`.
pub fn weights_gradient(
    model: &RidgeSolution,
    val: &Dataset,
    loss: ValidationLoss,
) -> Result<Matrix> {
    let pred = model.predict(val.features())?;
    let l = loss_derivative_matrix(loss, &pred, val.labels())?;
    val.features().transpose().matmul(&l)
}

/// Gradient of the summed validation loss on `val` with respect to the
/// training weights, evaluated at the fitted `model`.
pub fn val_loss_gradient(
    model: &RidgeSolution,
    train: &Dataset,
    train_weights: &SampleWeights,
    val: &Dataset,
    loss: ValidationLoss,
) -> Result<DatasetGradient> {
    if model.alpha() != train_weights {
        return Err(Error::WeightsMismatch);
    }
    model.check_data(train)?;
    if val.m() != train.m() || val.k() != train.k() {
        return Err(Error::DimensionMismatch {
            context: "validation shape",
            expected: train.m() * train.k(),
            found: val.m() * val.k(),
        });
    }
    let pred = model.predict(val.features())?;
    let l = loss_derivative_matrix(loss, &pred, val.labels())?;
    let loss_value = loss.total(&pred, val.labels())?;
    let g = model.influence_crossterm(train, val.features())?;
    let gl = g.matmul(&l)?;
    let res = model.residuals(train)?;
    let values = (0..train.n())
        .map(|r| crate::matrix::dot(res.row(r), gl.row(r)))
        .collect();
    Ok(DatasetGradient { values, loss_value })
}

/// Finite-difference gradient together with the rows that fell back to a
/// one-sided difference because `α_i − step < 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteDifference {
    pub gradient: DatasetGradient,
    pub one_sided: Vec<usize>,
}

/// Central differences of `objective` around `weights`, one coordinate at a
/// time. Coordinates with `α_i < step` use a forward difference instead.
pub fn central_difference<F>(
    weights: &SampleWeights,
    step: f64,
    objective: F,
) -> Result<FiniteDifference>
where
    F: Fn(&SampleWeights) -> Result<f64> + Sync + Send,
{
    if !(step > 0.0) || !step.is_finite() {
        return Err(invalid(alloc::format!(
            "finite-difference step must be positive, got {step}"
        )));
    }
    let loss_value = objective(weights)?;
    let alpha = weights.as_slice();
    let coords = map_indices(weights.len(), |i| -> Result<(f64, bool)> {
        let plus = objective(&weights.with(i, alpha[i] + step)?)?;
        if alpha[i] - step < 0.0 {
            Ok(((plus - loss_value) / step, true))
        } else {
            let minus = objective(&weights.with(i, alpha[i] - step)?)?;
            Ok(((plus - minus) / (2.0 * step), false))
        }
    });
    let mut values = Vec::with_capacity(coords.len());
    let mut one_sided = Vec::new();
    for (i, c) in coords.into_iter().enumerate() {
        let (v, side) = c?;
        values.push(v);
        if side {
            one_sided.push(i);
        }
    }
    Ok(FiniteDifference {
        gradient: DatasetGradient { values, loss_value },
        one_sided,
    })
}

/// Validation loss of the model refitted on `(train, weights)`.
pub fn validation_loss(
    train: &Dataset,
    weights: &SampleWeights,
    lambda: f64,
    val: &Dataset,
    loss: ValidationLoss,
) -> Result<f64> {
    let fit = fit_weighted_ridge(train, weights, lambda)?;
    loss.total(&fit.predict(val.features())?, val.labels())
}

/// Reference gradient by refitting at `α ± step` for every coordinate.
/// O(n) refits; meant for testing the closed form.
pub fn finite_difference_gradient(
    train: &Dataset,
    train_weights: &SampleWeights,
    lambda: f64,
    val: &Dataset,
    loss: ValidationLoss,
    step: f64,
) -> Result<FiniteDifference> {
    central_difference(train_weights, step, |w| {
        validation_loss(train, w, lambda, val, loss)
    })
}

/// Reference Jacobian `∂W/∂α` by central differences of refits.
pub fn finite_difference_jacobian(
    data: &Dataset,
    weights: &SampleWeights,
    lambda: f64,
    step: f64,
) -> Result<ModelJacobian> {
    if !(step > 0.0) {
        return Err(invalid("finite-difference step must be positive"));
    }
    let (n, m, k) = (data.n(), data.m(), data.k());
    let alpha = weights.as_slice();
    let base = fit_weighted_ridge(data, weights, lambda)?;
    let slices = map_indices(n, |r| -> Result<Matrix> {
        let plus = fit_weighted_ridge(data, &weights.with(r, alpha[r] + step)?, lambda)?;
        let mut d = plus.weights().clone();
        let (minus, denom) = if alpha[r] - step < 0.0 {
            (base.weights().clone(), step)
        } else {
            let w = fit_weighted_ridge(data, &weights.with(r, alpha[r] - step)?, lambda)?;
            (w.weights().clone(), 2.0 * step)
        };
        for j in 0..m {
            for c in 0..k {
                d[(j, c)] = (d[(j, c)] - minus[(j, c)]) / denom;
            }
        }
        Ok(d)
    });
    let mut jac = ModelJacobian::zeros(n, m, k);
    for (r, s) in slices.into_iter().enumerate() {
        let s = s?;
        for j in 0..m {
            for c in 0..k {
                jac.set(r, j, c, s[(j, c)]);
            }
        }
    }
    Ok(jac)
}
