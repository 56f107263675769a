//! Closed-form leave-one-out predictions for weighted ridge regression.
//!
//! Removing sample `i` from the weighted fit is a rank-one downdate, which
//! gives
//!
//! ```text
//! f_i = (z_i W_α − α_i h_i y_i) / (1 − α_i h_i),   h_i = z_i C_α z_iᵀ
//! ```
//!
//! This is the usual hat-matrix LOO identity applied to the rescaled data
//! `(√α_i z_i, √α_i y_i)` after dividing through by `√α_i`, so it stays finite
//! at `α_i = 0` where it reduces to `z_i W_α`. `f_i` does not depend on `α_i`.
//!
//! The LOO loss `Σ_i ℓ(f_i, y_i)` is differentiated through the quotient using
//! `∂(z_i W)/∂α_r = G_ir (y_r − z_r W)` and `∂h_i/∂α_r = −G_ir²` with
//! `G = Z C_α Zᵀ`:
//!
//! ```text
//! ∂L/∂α_r = Σ_{i≠r} [ G_ir ⟨ℓ'_i, y_r − z_r W⟩ + α_i G_ir² ⟨ℓ'_i, y_i − f_i⟩ ] / (1 − α_i h_i)
//! ```
//!
//! The `i = r` term vanishes identically and is skipped.

use alloc::vec;
use alloc::vec::Vec;

use crate::dataset::{Dataset, SampleWeights};
use crate::derivative::DatasetGradient;
use crate::error::{invalid, Error, Result};
use crate::loss::ValidationLoss;
use crate::matrix::{dot, Matrix};
use crate::par::map_indices;
use crate::ridge::{check_lambda, fit_weighted_ridge, RidgeSolution};

/// Smallest admissible `1 − α_i h_i`.
pub const LEVERAGE_MARGIN: f64 = 1e-12;

/// LOO predictions and losses for one `(data, α, λ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct LooReport {
    pub predictions: Matrix,
    pub per_sample_loss: Vec<f64>,
    pub total_loss: f64,
    pub gradient: Option<DatasetGradient>,
}

struct LooState {
    fit: RidgeSolution,
    fitted: Matrix,
    hat: Vec<f64>,
    denom: Vec<f64>,
    loo: Matrix,
}

fn check_n(data: &Dataset) -> Result<()> {
    if data.n() < 2 {
        return Err(invalid("leave-one-out needs at least two samples"));
    }
    Ok(())
}

fn loo_state(data: &Dataset, weights: &SampleWeights, lambda: f64) -> Result<LooState> {
    check_n(data)?;
    check_lambda(lambda)?;
    let fit = fit_weighted_ridge(data, weights, lambda)?;
    let fitted = fit.predict(data.features())?;
    let hat = fit.hat_diagonal(data)?;
    let alpha = weights.as_slice();
    let mut denom = Vec::with_capacity(data.n());
    let mut loo = Matrix::zeros(data.n(), data.k());
    for i in 0..data.n() {
        let ah = alpha[i] * hat[i];
        let d = 1.0 - ah;
        if !(d > LEVERAGE_MARGIN) {
            return Err(Error::DegenerateLeverage {
                index: i,
                margin: d,
            });
        }
        denom.push(d);
        let y = data.labels().row(i);
        let p = fitted.row(i);
        for (c, out) in loo.row_mut(i).iter_mut().enumerate() {
            *out = (p[c] - ah * y[c]) / d;
        }
    }
    Ok(LooState {
        fit,
        fitted,
        hat,
        denom,
        loo,
    })
}

/// Plain LOO predictions (`α = 1`).
pub fn loo_predictions_unweighted(data: &Dataset, lambda: f64) -> Result<Matrix> {
    loo_predictions_weighted(data, &SampleWeights::ones(data.n()), lambda)
}

/// Row `i` is the prediction at `z_i` of the model fitted with `α_i = 0`.
pub fn loo_predictions_weighted(
    data: &Dataset,
    weights: &SampleWeights,
    lambda: f64,
) -> Result<Matrix> {
    Ok(loo_state(data, weights, lambda)?.loo)
}

fn check_mask(mask: Option<&[bool]>, n: usize) -> Result<()> {
    match mask {
        Some(m) if m.len() != n => Err(Error::DimensionMismatch {
            context: "evaluation mask",
            expected: n,
            found: m.len(),
        }),
        _ => Ok(()),
    }
}

fn report(
    state: &LooState,
    data: &Dataset,
    loss: ValidationLoss,
    mask: Option<&[bool]>,
) -> Result<LooReport> {
    if let Some((row, col)) = state.loo.find_non_finite() {
        return Err(Error::NonFinite {
            context: "loo predictions",
            row,
            col,
        });
    }
    let per_sample_loss: Vec<f64> = (0..data.n())
        .map(|i| {
            if mask.is_none_or(|m| m[i]) {
                loss.value(state.loo.row(i), data.labels().row(i))
            } else {
                0.0
            }
        })
        .collect();
    let total_loss = per_sample_loss.iter().sum();
    Ok(LooReport {
        predictions: state.loo.clone(),
        per_sample_loss,
        total_loss,
        gradient: None,
    })
}

/// Unweighted loss of the weighted LOO predictions, `Σ_i ℓ(f_i, y_i)`.
pub fn loo_loss(
    data: &Dataset,
    weights: &SampleWeights,
    lambda: f64,
    loss: ValidationLoss,
) -> Result<LooReport> {
    let state = loo_state(data, weights, lambda)?;
    report(&state, data, loss, None)
}

/// Like [`loo_loss`] but only samples with `evaluated[i]` contribute; their
/// LOO predictions still use every sample with non-zero weight.
pub fn loo_loss_on(
    data: &Dataset,
    weights: &SampleWeights,
    lambda: f64,
    loss: ValidationLoss,
    evaluated: &[bool],
) -> Result<LooReport> {
    check_mask(Some(evaluated), data.n())?;
    let state = loo_state(data, weights, lambda)?;
    report(&state, data, loss, Some(evaluated))
}

/// Exact gradient of [`loo_loss`] with respect to `α`.
pub fn loo_loss_gradient(
    data: &Dataset,
    weights: &SampleWeights,
    lambda: f64,
    loss: ValidationLoss,
) -> Result<DatasetGradient> {
    Ok(loo_loss_with_gradient(data, weights, lambda, loss, None)?
        .gradient
        .expect("gradient requested"))
}

/// LOO report with the gradient filled in. `evaluated` restricts the loss as
/// in [`loo_loss_on`].
pub fn loo_loss_with_gradient(
    data: &Dataset,
    weights: &SampleWeights,
    lambda: f64,
    loss: ValidationLoss,
    evaluated: Option<&[bool]>,
) -> Result<LooReport> {
    check_mask(evaluated, data.n())?;
    let state = loo_state(data, weights, lambda)?;
    let mut rep = report(&state, data, loss, evaluated)?;

    let n = data.n();
    let k = data.k();
    let alpha = weights.as_slice();
    let y = data.labels();
    let g = state.fit.gram_crossterm(data)?;

    // a_i = ℓ'_i / d_i,  b_i = α_i ⟨ℓ'_i, y_i − f_i⟩ / d_i
    let mut a = Matrix::zeros(n, k);
    let mut b = vec![0.0; n];
    let mut dl = vec![0.0; k];
    let mut miss = vec![0.0; k];
    for i in 0..n {
        if !evaluated.is_none_or(|m| m[i]) {
            continue;
        }
        let f = state.loo.row(i);
        loss.derivative(f, y.row(i), &mut dl);
        for c in 0..k {
            a[(i, c)] = dl[c] / state.denom[i];
            miss[c] = y[(i, c)] - f[c];
        }
        b[i] = alpha[i] * dot(&dl, &miss) / state.denom[i];
    }

    let mut values = vec![0.0; n];
    let mut res = vec![0.0; k];
    for r in 0..n {
        for c in 0..k {
            res[c] = y[(r, c)] - state.fitted[(r, c)];
        }
        let g_r = g.row(r);
        let mut acc = 0.0;
        for i in 0..n {
            if i == r {
                continue;
            }
            let gir = g_r[i];
            acc += gir * dot(a.row(i), &res) + gir * gir * b[i];
        }
        values[r] = acc;
    }
    rep.gradient = Some(DatasetGradient {
        values,
        loss_value: rep.total_loss,
    });
    Ok(rep)
}

/// Leverages `h_i` at the weighted fit, as used by the LOO formulas.
pub fn loo_leverages(data: &Dataset, weights: &SampleWeights, lambda: f64) -> Result<Vec<f64>> {
    Ok(loo_state(data, weights, lambda)?.hat)
}

/// Reference LOO predictions by refitting with `α_i = 0` for every `i`.
pub fn brute_force_loo(data: &Dataset, weights: &SampleWeights, lambda: f64) -> Result<Matrix> {
    check_n(data)?;
    weights.check_len(data.n())?;
    let rows = map_indices(data.n(), |i| -> Result<Vec<f64>> {
        let fit = fit_weighted_ridge(data, &weights.with(i, 0.0)?, lambda)?;
        let z = data.features().select_rows(&[i]);
        Ok(fit.predict(&z)?.into_vec())
    });
    let rows: Vec<Vec<f64>> = rows.into_iter().collect::<Result<_>>()?;
    Matrix::from_rows(&rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn identity_data() -> Dataset {
        Dataset::one_hot(Matrix::identity(2), Matrix::identity(2)).unwrap()
    }

    #[test]
    fn removing_only_class_member_predicts_zero() {
        let f = loo_predictions_unweighted(&identity_data(), 1.0).unwrap();
        assert!(f.max_abs() < 1e-15);
        let bf = brute_force_loo(&identity_data(), &SampleWeights::ones(2), 1.0).unwrap();
        assert!(bf.max_abs() < 1e-15);
    }

    #[test]
    fn zero_weight_row_is_full_fit_prediction() {
        let z = Matrix::from_fn(5, 2, |i, j| {
            (i as f64 + 1.0) * if j == 0 { 0.3 } else { -0.7 } + j as f64
        });
        let d = Dataset::from_classes(z, &[0, 1, 0, 1, 1], 2).unwrap();
        let w = SampleWeights::new(vec![1.0, 0.0, 2.0, 0.5, 1.0]).unwrap();
        let f = loo_predictions_weighted(&d, &w, 0.3).unwrap();
        let fit = fit_weighted_ridge(&d, &w, 0.3).unwrap();
        let p = fit.predict(d.features()).unwrap();
        assert_eq!(f.row(1), p.row(1));
    }

    #[test]
    fn needs_two_samples() {
        let d = Dataset::from_classes(Matrix::identity(1), &[0], 1).unwrap();
        assert!(loo_loss(
            &d,
            &SampleWeights::ones(1),
            1.0,
            ValidationLoss::SquaredError
        )
        .is_err());
        assert!(brute_force_loo(&d, &SampleWeights::ones(1), 1.0).is_err());
    }

    #[test]
    fn symmetric_pair_has_equal_gradient() {
        let g = loo_loss_gradient(
            &identity_data(),
            &SampleWeights::ones(2),
            1.0,
            ValidationLoss::SquaredError,
        )
        .unwrap();
        assert_eq!(g.values[0], g.values[1]);
    }

    #[test]
    fn misclassified_only_zero_when_all_correct() {
        let z = Matrix::from_vec(4, 2, vec![2.0, 0.0, 2.1, 0.1, 0.0, 2.0, 0.1, 2.1]).unwrap();
        let d = Dataset::from_classes(z, &[0, 0, 1, 1], 2).unwrap();
        let rep = loo_loss(
            &d,
            &SampleWeights::ones(4),
            0.1,
            ValidationLoss::MisclassifiedCrossEntropy,
        )
        .unwrap();
        assert_eq!(rep.total_loss, 0.0);
        let g = loo_loss_gradient(
            &d,
            &SampleWeights::ones(4),
            0.1,
            ValidationLoss::MisclassifiedCrossEntropy,
        )
        .unwrap();
        assert!(g.values.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn mask_length_checked() {
        let d = identity_data();
        assert!(loo_loss_on(
            &d,
            &SampleWeights::ones(2),
            1.0,
            ValidationLoss::SquaredError,
            &[true]
        )
        .is_err());
    }
}
