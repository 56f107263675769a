use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use super::{check_mode, objective_gradient, CurationReport, TrajectoryPoint, ValidationMode};
use crate::dataset::{Dataset, SampleWeights};
use crate::error::{invalid, Result};
use crate::loss::ValidationLoss;

/// Projected gradient descent on the sample weights.
#[derive(Debug, Clone, PartialEq)]
pub struct ReweightConfig {
    pub steps: usize,
    pub learning_rate: f64,
    pub loss: ValidationLoss,
    /// Project onto `α ≥ 0` after every step. When off, a step that makes a
    /// weight negative is an error.
    pub clamp_nonnegative: bool,
    pub validation_mode: ValidationMode,
}

impl ReweightConfig {
    /// Four steps of size 0.15 on the misclassified-only LOO cross-entropy.
    pub fn loo() -> Self {
        ReweightConfig {
            steps: 4,
            learning_rate: 0.15,
            loss: ValidationLoss::MisclassifiedCrossEntropy,
            clamp_nonnegative: true,
            validation_mode: ValidationMode::Loo,
        }
    }

    /// Four steps of size 0.15 on held-out cross-entropy.
    pub fn held_out() -> Self {
        ReweightConfig {
            loss: ValidationLoss::CrossEntropy,
            validation_mode: ValidationMode::HeldOut,
            ..Self::loo()
        }
    }

    fn validate(&self) -> Result<()> {
        if self.steps == 0 {
            return Err(invalid("reweight needs at least one step"));
        }
        if !(self.learning_rate >= 0.0) || !self.learning_rate.is_finite() {
            return Err(invalid(alloc::format!(
                "learning rate must be finite and non-negative, got {}",
                self.learning_rate
            )));
        }
        Ok(())
    }
}

impl Default for ReweightConfig {
    fn default() -> Self {
        Self::loo()
    }
}

/// Starts from `α = 1` and takes `config.steps` steps `α ← α − η ∇_α L`,
/// refitting in between. The trajectory holds the loss before the first step
/// and after every step.
pub fn reweight(
    data: &Dataset,
    lambda: f64,
    config: &ReweightConfig,
    held_out: Option<&Dataset>,
) -> Result<CurationReport> {
    config.validate()?;
    check_mode(config.validation_mode, held_out)?;
    let grad_at = |w: &SampleWeights| {
        objective_gradient(
            data,
            w,
            lambda,
            config.loss,
            config.validation_mode,
            held_out,
            None,
        )
    };

    let mut alpha = SampleWeights::ones(data.n());
    let mut grad = grad_at(&alpha)?;
    let mut trajectory = alloc::vec![TrajectoryPoint {
        step: 0,
        loss: grad.loss_value
    }];
    for step in 1..=config.steps {
        let next: Vec<f64> = alpha
            .as_slice()
            .iter()
            .zip(&grad.values)
            .map(|(&a, &g)| {
                let v = a - config.learning_rate * g;
                if config.clamp_nonnegative {
                    v.max(0.0)
                } else {
                    v
                }
            })
            .collect();
        alpha = SampleWeights::new(next)?;
        grad = grad_at(&alpha)?;
        trajectory.push(TrajectoryPoint {
            step,
            loss: grad.loss_value,
        });
    }

    let mut report = CurationReport::new(lambda, alpha);
    report.loss_trajectory = trajectory;
    Ok(report)
}

/// Reweights the concatenation of `groups` and returns, per tag, the share of
/// the total final weight held by that group.
pub fn augmentation_weights(
    groups: &[(String, Dataset)],
    lambda: f64,
    config: &ReweightConfig,
    held_out: Option<&Dataset>,
) -> Result<BTreeMap<String, f64>> {
    if groups.len() < 2 {
        return Err(invalid("augmentation weights need at least two groups"));
    }
    let mut merged = groups[0].1.clone();
    for (_, g) in &groups[1..] {
        if g.m() != merged.m() {
            return Err(crate::Error::DimensionMismatch {
                context: "group feature columns",
                expected: merged.m(),
                found: g.m(),
            });
        }
        merged = merged.concat(g)?;
    }
    let report = reweight(&merged, lambda, config, held_out)?;
    let alpha = report.final_weights.as_slice();
    let total: f64 = alpha.iter().sum();
    if !(total > 0.0) {
        return Err(invalid(
            "all weights were clamped to zero; the learning rate is too large",
        ));
    }
    let mut out = BTreeMap::new();
    let mut offset = 0;
    for (tag, g) in groups {
        let share: f64 = alpha[offset..offset + g.n()].iter().sum();
        offset += g.n();
        if out.insert(tag.clone(), share / total).is_some() {
            return Err(invalid(alloc::format!("duplicate group tag {tag:?}")));
        }
    }
    Ok(out)
}
