//! File formats, synthetic benchmarks, JSON reports and the command line
//! for [`diva_core`].

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod error;
pub mod io;
pub mod report;
pub mod synthetic;

pub use error::{Error, Result};
pub use io::{load_dataset, Format};
pub use report::{load_report, save_report, Report};
pub use synthetic::{generate_synthetic, Synthetic, SyntheticSpec};
