//! Closed-form dataset derivatives for weighted ridge regression.
//!
//! A linear classifier `f(z) = zᵀW` is fitted on fixed feature vectors with
//! per-sample importance weights `α`:
//!
//! ```text
//! W_α = argmin_W  Σ_i α_i ‖zᵢᵀW − yᵢ‖² + λ‖W‖²  =  (Zᵀ D_α Z + λI)⁻¹ Zᵀ D_α Y
//! ```
//!
//! Because `W_α` is a rational function of `α`, the gradient of any smooth
//! loss evaluated on top of the fit can be written in closed form. This crate
//! provides:
//!
//! - [`ridge`]: the weighted fit, its Cholesky factor, cross terms
//!   `Z C_α Z'ᵀ` and leverages.
//! - [`derivative`]: the model/dataset Jacobian `∂W/∂α` and the gradient of a
//!   held-out validation loss with respect to `α`.
//! - [`loo`]: closed-form weighted leave-one-out predictions, the LOO loss and
//!   its exact gradient, with brute-force retraining oracles.
//! - [`workflows`]: reweighting, greedy dataset extension, detrimental sample
//!   detection, augmentation probabilities, `λ` search and metrics.
//!
//! The crate is `no_std` (it needs `alloc`). The `parallel` feature pulls in
//! `std` and `rayon` and runs the O(n) refits of the test oracles in parallel;
//! results are identical to the sequential path.
//!
//! ```
//! use diva_core::{Dataset, Matrix, SampleWeights, ridge::fit_weighted_ridge};
//!
//! let data = Dataset::one_hot(Matrix::identity(2), Matrix::identity(2)).unwrap();
//! let fit = fit_weighted_ridge(&data, &SampleWeights::ones(2), 1.0).unwrap();
//! assert!((fit.weights()[(0, 0)] - 0.5).abs() < 1e-15);
//! ```

#![cfg_attr(not(feature = "std"), no_std)]
#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![warn(missing_debug_implementations)]

extern crate alloc;

pub mod cholesky;
pub mod dataset;
pub mod derivative;
mod error;
pub mod loo;
pub mod loss;
pub mod matrix;
mod par;
pub mod ridge;
pub mod workflows;

pub use dataset::{Dataset, LabelKind, SampleWeights};
pub use derivative::DatasetGradient;
pub use error::{Error, Result};
pub use loo::LooReport;
pub use loss::ValidationLoss;
pub use matrix::Matrix;
pub use ridge::RidgeSolution;
