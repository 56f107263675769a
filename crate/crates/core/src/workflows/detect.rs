use super::{check_mode, objective_gradient, CurationReport, TrajectoryPoint, ValidationMode};
use crate::dataset::{Dataset, SampleWeights};
use crate::error::{invalid, Result};
use crate::loss::ValidationLoss;

/// Flags every sample whose gradient coordinate at `α = 1` is at least
/// `epsilon`. The full gradient is kept in the report for later thresholding.
pub fn detect_detrimental(
    data: &Dataset,
    lambda: f64,
    loss: ValidationLoss,
    epsilon: f64,
    mode: ValidationMode,
    held_out: Option<&Dataset>,
) -> Result<CurationReport> {
    if epsilon.is_nan() {
        return Err(invalid("epsilon must not be NaN"));
    }
    check_mode(mode, held_out)?;
    let alpha = SampleWeights::ones(data.n());
    let grad = objective_gradient(data, &alpha, lambda, loss, mode, held_out, None)?;
    let mut report = CurationReport::new(lambda, alpha);
    report.detrimental = grad
        .values
        .iter()
        .enumerate()
        .filter(|(_, &g)| g >= epsilon)
        .map(|(i, &g)| (i, g))
        .collect();
    report.loss_trajectory.push(TrajectoryPoint {
        step: 0,
        loss: grad.loss_value,
    });
    report.gradient = Some(grad.values);
    Ok(report)
}
