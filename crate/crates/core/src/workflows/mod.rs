//! Dataset curation built on the dataset gradient.
//!
//! All procedures work either against a held-out validation set or against
//! the closed-form leave-one-out loss of the training set itself, selected by
//! [`ValidationMode`].

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use crate::dataset::{Dataset, SampleWeights};
use crate::derivative::{val_loss_gradient, DatasetGradient};
use crate::error::{invalid, Result};
use crate::loo::loo_loss_with_gradient;
use crate::loss::ValidationLoss;
use crate::ridge::fit_weighted_ridge;

mod detect;
mod extend;
pub mod metrics;
mod reweight;
mod search;

pub use detect::detect_detrimental;
pub use extend::{extend, ExtendConfig, LooScope};
pub use metrics::{auc, error_rate, evaluate, f1_score};
pub use reweight::{augmentation_weights, reweight, ReweightConfig};
pub use search::{default_lambda_grid, lambda_grid_search, LambdaSearch};

/// Where the loss being differentiated comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ValidationMode {
    /// Closed-form leave-one-out loss on the training set.
    Loo,
    /// Loss on a separate validation set.
    HeldOut,
}

/// One entry of a loss trajectory.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectoryPoint {
    pub step: usize,
    pub loss: f64,
}

/// Outcome of a curation run.
#[derive(Debug, Clone, PartialEq)]
pub struct CurationReport {
    pub lambda: f64,
    pub final_weights: SampleWeights,
    /// Pool indices in selection order (extend only).
    pub selected_indices: Vec<usize>,
    /// `(index, gradient score)` pairs, ascending index.
    pub detrimental: Vec<(usize, f64)>,
    pub loss_trajectory: Vec<TrajectoryPoint>,
    pub metrics: BTreeMap<String, f64>,
    /// Full gradient vector, when the workflow produces one for downstream use.
    pub gradient: Option<Vec<f64>>,
}

impl CurationReport {
    pub(crate) fn new(lambda: f64, final_weights: SampleWeights) -> Self {
        CurationReport {
            lambda,
            final_weights,
            selected_indices: Vec::new(),
            detrimental: Vec::new(),
            loss_trajectory: Vec::new(),
            metrics: BTreeMap::new(),
            gradient: None,
        }
    }
}

pub(crate) fn check_mode(mode: ValidationMode, held_out: Option<&Dataset>) -> Result<()> {
    match (mode, held_out) {
        (ValidationMode::HeldOut, None) => Err(invalid("held-out mode needs a validation dataset")),
        (ValidationMode::Loo, Some(_)) => Err(invalid(
            "a validation dataset was given but the mode is LOO",
        )),
        _ => Ok(()),
    }
}

/// Loss and gradient at `weights` under the chosen validation mode.
/// `evaluated` restricts the LOO loss to a subset of samples.
pub(crate) fn objective_gradient(
    data: &Dataset,
    weights: &SampleWeights,
    lambda: f64,
    loss: ValidationLoss,
    mode: ValidationMode,
    held_out: Option<&Dataset>,
    evaluated: Option<&[bool]>,
) -> Result<DatasetGradient> {
    match (mode, held_out) {
        (ValidationMode::HeldOut, Some(val)) => {
            let fit = fit_weighted_ridge(data, weights, lambda)?;
            val_loss_gradient(&fit, data, weights, val, loss)
        }
        (ValidationMode::HeldOut, None) => Err(invalid("held-out mode needs a validation dataset")),
        (ValidationMode::Loo, _) => Ok(loo_loss_with_gradient(
            data, weights, lambda, loss, evaluated,
        )?
        .gradient
        .expect("gradient requested")),
    }
}
