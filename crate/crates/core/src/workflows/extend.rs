use alloc::vec;
use alloc::vec::Vec;

use super::{check_mode, objective_gradient, CurationReport, TrajectoryPoint, ValidationMode};
use crate::dataset::{Dataset, SampleWeights};
use crate::error::{invalid, Error, Result};
use crate::loss::ValidationLoss;

/// Which samples the LOO loss is summed over during [`extend`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LooScope {
    /// Only the core samples: the pool is never trusted as validation data.
    Core,
    /// Every merged sample, pool included.
    Merged,
}

/// Greedy dataset extension.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtendConfig {
    /// Pool samples added per round.
    pub batch_size: usize,
    /// Round cap; `None` means `ceil(pool / batch_size)`.
    pub max_rounds: Option<usize>,
    pub loss: ValidationLoss,
    pub validation_mode: ValidationMode,
    pub loo_scope: LooScope,
}

impl ExtendConfig {
    pub fn new(batch_size: usize) -> Self {
        ExtendConfig {
            batch_size,
            max_rounds: None,
            loss: ValidationLoss::SquaredError,
            validation_mode: ValidationMode::Loo,
            loo_scope: LooScope::Core,
        }
    }
}

/// Merges `core` and `pool` with weights 1 and 0, then repeatedly switches on
/// the `batch_size` unselected pool samples with the most negative gradient
/// (ties by ascending pool index). Stops when no remaining pool coordinate is
/// negative or after `max_rounds` rounds. Trajectory entry `t` is the loss
/// after `t` rounds.
pub fn extend(
    core: &Dataset,
    pool: &Dataset,
    lambda: f64,
    config: &ExtendConfig,
    held_out: Option<&Dataset>,
) -> Result<CurationReport> {
    if config.batch_size == 0 {
        return Err(invalid("batch size must be at least 1"));
    }
    if pool.m() != core.m() {
        return Err(Error::DimensionMismatch {
            context: "pool feature columns",
            expected: core.m(),
            found: pool.m(),
        });
    }
    check_mode(config.validation_mode, held_out)?;
    let merged = core.concat(pool)?;
    let (n_core, n_pool) = (core.n(), pool.n());
    let max_rounds = config
        .max_rounds
        .unwrap_or_else(|| n_pool.div_ceil(config.batch_size));

    let mask: Vec<bool> = (0..merged.n()).map(|i| i < n_core).collect();
    let evaluated = match config.loo_scope {
        LooScope::Core => Some(mask.as_slice()),
        LooScope::Merged => None,
    };

    let mut alpha: Vec<f64> = (0..merged.n())
        .map(|i| if i < n_core { 1.0 } else { 0.0 })
        .collect();
    let mut taken = vec![false; n_pool];
    let mut selected = Vec::new();
    let grad_at = |a: &[f64]| {
        objective_gradient(
            &merged,
            &SampleWeights::new(a.to_vec())?,
            lambda,
            config.loss,
            config.validation_mode,
            held_out,
            evaluated,
        )
    };

    let mut grad = grad_at(&alpha)?;
    let mut trajectory = vec![TrajectoryPoint {
        step: 0,
        loss: grad.loss_value,
    }];
    for round in 1..=max_rounds {
        let mut candidates: Vec<(f64, usize)> = (0..n_pool)
            .filter(|&p| !taken[p])
            .map(|p| (grad.values[n_core + p], p))
            .filter(|&(g, _)| g < 0.0)
            .collect();
        if candidates.is_empty() {
            break;
        }
        candidates.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        for &(_, p) in candidates.iter().take(config.batch_size) {
            taken[p] = true;
            alpha[n_core + p] = 1.0;
            selected.push(p);
        }
        grad = grad_at(&alpha)?;
        trajectory.push(TrajectoryPoint {
            step: round,
            loss: grad.loss_value,
        });
    }

    let mut report = CurationReport::new(lambda, SampleWeights::new(alpha)?);
    report.selected_indices = selected;
    report.loss_trajectory = trajectory;
    report.gradient = Some(grad.values);
    Ok(report)
}
