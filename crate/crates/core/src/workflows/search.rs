use alloc::vec::Vec;

use crate::dataset::{Dataset, SampleWeights};
use crate::error::{invalid, Result};
use crate::loo::loo_loss;
use crate::loss::ValidationLoss;

/// Result of [`lambda_grid_search`].
#[derive(Debug, Clone, PartialEq)]
pub struct LambdaSearch {
    pub best_lambda: f64,
    /// `(λ, unweighted LOO loss)` in grid order.
    pub per_lambda_loss: Vec<(f64, f64)>,
}

/// `2ⁿ` for `n = −20, …, 4`.
pub fn default_lambda_grid() -> Vec<f64> {
    (-20..=4).map(|e| libm::ldexp(1.0, e)).collect()
}

/// Picks the `λ` with the smallest unweighted LOO loss; ties go to the
/// smaller `λ`.
pub fn lambda_grid_search(
    data: &Dataset,
    grid: &[f64],
    loss: ValidationLoss,
) -> Result<LambdaSearch> {
    if grid.is_empty() {
        return Err(invalid("lambda grid is empty"));
    }
    let ones = SampleWeights::ones(data.n());
    let mut table = Vec::with_capacity(grid.len());
    let mut best: Option<(f64, f64)> = None;
    for &lambda in grid {
        let l = loo_loss(data, &ones, lambda, loss)?.total_loss;
        table.push((lambda, l));
        let better = match best {
            None => true,
            Some((bl, bv)) => l < bv || (l == bv && lambda < bl),
        };
        if better {
            best = Some((lambda, l));
        }
    }
    Ok(LambdaSearch {
        best_lambda: best.expect("non-empty grid").0,
        per_lambda_loss: table,
    })
}
