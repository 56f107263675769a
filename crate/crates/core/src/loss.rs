//! Validation losses on model outputs and their derivatives `∂ℓ/∂f`.

use crate::error::{Error, Result};
use crate::matrix::{argmax, Matrix};

/// Per-sample loss applied to the k regression outputs. Totals are sums.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ValidationLoss {
    /// `‖f − y‖²`.
    SquaredError,
    /// Cross-entropy of `softmax(f)` against `y`, outputs used as logits.
    CrossEntropy,
    /// Cross-entropy counted only when the prediction is wrong, i.e. some
    /// other class strictly beats the true class. Ties count as correct.
    MisclassifiedCrossEntropy,
}

fn log_sum_exp(f: &[f64]) -> f64 {
    let max = f.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let s = f.iter().fold(0.0, |acc, &v| acc + libm::exp(v - max));
    max + libm::log(s)
}

fn is_misclassified(f: &[f64], y: &[f64]) -> bool {
    let truth = argmax(y);
    f.iter().any(|&v| v > f[truth])
}

impl ValidationLoss {
    pub fn value(self, f: &[f64], y: &[f64]) -> f64 {
        debug_assert_eq!(f.len(), y.len());
        match self {
            ValidationLoss::SquaredError => f
                .iter()
                .zip(y)
                .fold(0.0, |acc, (a, b)| acc + (a - b) * (a - b)),
            ValidationLoss::CrossEntropy => cross_entropy(f, y),
            ValidationLoss::MisclassifiedCrossEntropy => {
                if is_misclassified(f, y) {
                    cross_entropy(f, y)
                } else {
                    0.0
                }
            }
        }
    }

    /// Writes `∂ℓ/∂f` at `(f, y)` into `out`.
    pub fn derivative(self, f: &[f64], y: &[f64], out: &mut [f64]) {
        debug_assert!(f.len() == y.len() && y.len() == out.len());
        match self {
            ValidationLoss::SquaredError => {
                for ((o, a), b) in out.iter_mut().zip(f).zip(y) {
                    *o = 2.0 * (a - b);
                }
            }
            ValidationLoss::CrossEntropy => cross_entropy_grad(f, y, out),
            ValidationLoss::MisclassifiedCrossEntropy => {
                if is_misclassified(f, y) {
                    cross_entropy_grad(f, y, out);
                } else {
                    out.fill(0.0);
                }
            }
        }
    }

    /// Sum of per-row losses.
    pub fn total(self, predictions: &Matrix, labels: &Matrix) -> Result<f64> {
        check_shapes(predictions, labels)?;
        check_finite(predictions)?;
        Ok(predictions
            .row_iter()
            .zip(labels.row_iter())
            .fold(0.0, |acc, (f, y)| acc + self.value(f, y)))
    }
}

// −Σ_c y_c log softmax(f)_c
fn cross_entropy(f: &[f64], y: &[f64]) -> f64 {
    let lse = log_sum_exp(f);
    f.iter()
        .zip(y)
        .fold(0.0, |acc, (&fc, &yc)| acc + yc * (lse - fc))
}

// softmax(f) Σy − y; equals softmax(f) − y for one-hot rows.
fn cross_entropy_grad(f: &[f64], y: &[f64], out: &mut [f64]) {
    let lse = log_sum_exp(f);
    let mass: f64 = y.iter().sum();
    for ((o, &fc), &yc) in out.iter_mut().zip(f).zip(y) {
        *o = libm::exp(fc - lse) * mass - yc;
    }
}

fn check_shapes(predictions: &Matrix, labels: &Matrix) -> Result<()> {
    if predictions.shape() != labels.shape() {
        let (context, expected, found) = if predictions.rows() != labels.rows() {
            ("loss rows", labels.rows(), predictions.rows())
        } else {
            ("loss columns", labels.cols(), predictions.cols())
        };
        return Err(Error::DimensionMismatch {
            context,
            expected,
            found,
        });
    }
    Ok(())
}

fn check_finite(predictions: &Matrix) -> Result<()> {
    if let Some((row, col)) = predictions.find_non_finite() {
        return Err(Error::NonFinite {
            context: "predictions",
            row,
            col,
        });
    }
    Ok(())
}

/// The matrix `L` whose row `i` is `∂ℓ/∂f` at `(predictions_i, labels_i)`.
pub fn loss_derivative_matrix(
    loss: ValidationLoss,
    predictions: &Matrix,
    labels: &Matrix,
) -> Result<Matrix> {
    check_shapes(predictions, labels)?;
    check_finite(predictions)?;
    let mut out = Matrix::zeros(predictions.rows(), predictions.cols());
    for i in 0..predictions.rows() {
        loss.derivative(predictions.row(i), labels.row(i), out.row_mut(i));
    }
    Ok(out)
}
