//! Versioned JSON reports.
//!
//! Reals are written in scientific notation with 17 significant digits, which
//! round-trips every finite `f64`. Non-finite values are written as `null` and
//! read back as NaN.

use std::collections::BTreeMap;
use std::path::Path;

use diva_core::workflows::CurationReport;
use diva_core::Matrix;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::io::write_file;

pub const SCHEMA_VERSION: u32 = 1;

/// An `f64` with lossless JSON encoding.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Real(pub f64);

impl Serialize for Real {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if self.0.is_finite() {
            let raw = serde_json::value::RawValue::from_string(format!("{:.16e}", self.0))
                .map_err(serde::ser::Error::custom)?;
            raw.serialize(s)
        } else {
            s.serialize_none()
        }
    }
}

impl<'de> Deserialize<'de> for Real {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        Ok(Real(Option::<f64>::deserialize(d)?.unwrap_or(f64::NAN)))
    }
}

fn reals(v: &[f64]) -> Vec<Real> {
    v.iter().copied().map(Real).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Detrimental {
    pub index: usize,
    pub score: Real,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Step {
    pub step: usize,
    pub loss: Real,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LambdaLoss {
    pub lambda: Real,
    pub loss: Real,
}

/// The on-disk report. Optional sections are omitted when absent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Report {
    pub schema_version: u32,
    pub command: String,
    pub lambda: Real,
    pub weights: Vec<Real>,
    pub selected_indices: Vec<usize>,
    pub detrimental: Vec<Detrimental>,
    pub trajectory: Vec<Step>,
    pub metrics: BTreeMap<String, Real>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda_search: Option<Vec<LambdaLoss>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gradient: Option<Vec<Real>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub per_sample_loss: Option<Vec<Real>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub predictions: Option<Vec<Vec<Real>>>,
}

impl Report {
    pub fn new(command: impl Into<String>, lambda: f64) -> Self {
        Report {
            schema_version: SCHEMA_VERSION,
            command: command.into(),
            lambda: Real(lambda),
            weights: Vec::new(),
            selected_indices: Vec::new(),
            detrimental: Vec::new(),
            trajectory: Vec::new(),
            metrics: BTreeMap::new(),
            notes: Vec::new(),
            lambda_search: None,
            gradient: None,
            per_sample_loss: None,
            predictions: None,
        }
    }

    pub fn from_curation(command: impl Into<String>, c: &CurationReport) -> Self {
        let mut r = Report::new(command, c.lambda);
        r.weights = reals(c.final_weights.as_slice());
        r.selected_indices = c.selected_indices.clone();
        r.detrimental = c
            .detrimental
            .iter()
            .map(|&(index, score)| Detrimental {
                index,
                score: Real(score),
            })
            .collect();
        r.trajectory = c
            .loss_trajectory
            .iter()
            .map(|p| Step {
                step: p.step,
                loss: Real(p.loss),
            })
            .collect();
        r.metrics = c
            .metrics
            .iter()
            .map(|(k, &v)| (k.clone(), Real(v)))
            .collect();
        r.gradient = c.gradient.as_deref().map(reals);
        r
    }

    pub fn set_metric(&mut self, key: impl Into<String>, value: f64) {
        self.metrics.insert(key.into(), Real(value));
    }

    pub fn set_lambda_search(&mut self, table: &[(f64, f64)]) {
        self.lambda_search = Some(
            table
                .iter()
                .map(|&(lambda, loss)| LambdaLoss {
                    lambda: Real(lambda),
                    loss: Real(loss),
                })
                .collect(),
        );
    }

    pub fn set_predictions(&mut self, p: &Matrix) {
        self.predictions = Some(p.row_iter().map(reals).collect());
    }

    pub fn weight_values(&self) -> Vec<f64> {
        self.weights.iter().map(|r| r.0).collect()
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self).map_err(|e| Error::Json {
            path: "<report>".into(),
            source: e,
        })?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Json {
            path: "<report>".into(),
            source: e,
        })
    }
}

/// Writes the report atomically.
pub fn save_report(report: &Report, path: &Path) -> Result<()> {
    write_file(path, report.to_json()?.as_bytes())
}

pub fn load_report(path: &Path) -> Result<Report> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::Json {
        path: path.into(),
        source: e,
    })
}
