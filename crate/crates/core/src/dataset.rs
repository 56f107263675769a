//! Training sets and per-sample importance weights.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{invalid, Error, Result};
use crate::matrix::{argmax, Matrix};

/// How the label matrix should be interpreted.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LabelKind {
    /// Each row has a single 1 and zeros elsewhere.
    OneHot,
    /// Arbitrary real targets, e.g. one-hot labels minus the outputs of a
    /// pretrained model. Treated exactly like one-hot labels everywhere.
    Residual,
}

/// Feature matrix `Z` (n × m) paired with a label matrix `Y` (n × k).
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    features: Matrix,
    labels: Matrix,
    kind: LabelKind,
    class_names: Option<Vec<String>>,
}

impl Dataset {
    /// Validates shapes and finiteness. With [`LabelKind::OneHot`] every label
    /// row must be an indicator vector.
    pub fn new(features: Matrix, labels: Matrix, kind: LabelKind) -> Result<Self> {
        let (n, m) = features.shape();
        if n == 0 || m == 0 || labels.cols() == 0 {
            return Err(invalid("dataset needs n >= 1, m >= 1 and k >= 1"));
        }
        if labels.rows() != n {
            return Err(Error::DimensionMismatch {
                context: "label rows",
                expected: n,
                found: labels.rows(),
            });
        }
        if let Some((row, col)) = features.find_non_finite() {
            return Err(Error::NonFinite {
                context: "features",
                row,
                col,
            });
        }
        if let Some((row, col)) = labels.find_non_finite() {
            return Err(Error::NonFinite {
                context: "labels",
                row,
                col,
            });
        }
        if kind == LabelKind::OneHot {
            for (i, row) in labels.row_iter().enumerate() {
                let ones = row.iter().filter(|&&v| v == 1.0).count();
                let zeros = row.iter().filter(|&&v| v == 0.0).count();
                if ones != 1 || zeros + 1 != row.len() {
                    return Err(invalid(alloc::format!("label row {i} is not one-hot")));
                }
            }
        }
        Ok(Dataset {
            features,
            labels,
            kind,
            class_names: None,
        })
    }

    pub fn one_hot(features: Matrix, labels: Matrix) -> Result<Self> {
        Self::new(features, labels, LabelKind::OneHot)
    }

    /// Builds one-hot labels from integer classes in `0..k`.
    pub fn from_classes(features: Matrix, classes: &[usize], k: usize) -> Result<Self> {
        let labels = one_hot_matrix(classes, k)?;
        Self::one_hot(features, labels)
    }

    pub fn with_class_names(mut self, names: Vec<String>) -> Result<Self> {
        if names.len() != self.k() {
            return Err(Error::DimensionMismatch {
                context: "class names",
                expected: self.k(),
                found: names.len(),
            });
        }
        self.class_names = Some(names);
        Ok(self)
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.features.rows()
    }

    #[inline]
    pub fn m(&self) -> usize {
        self.features.cols()
    }

    #[inline]
    pub fn k(&self) -> usize {
        self.labels.cols()
    }

    pub fn features(&self) -> &Matrix {
        &self.features
    }

    pub fn labels(&self) -> &Matrix {
        &self.labels
    }

    pub fn kind(&self) -> LabelKind {
        self.kind
    }

    pub fn class_names(&self) -> Option<&[String]> {
        self.class_names.as_deref()
    }

    /// Class index of each row (argmax of the label row).
    pub fn classes(&self) -> Vec<usize> {
        self.labels.row_iter().map(argmax).collect()
    }

    /// Keeps the listed rows, in order.
    pub fn subset(&self, indices: &[usize]) -> Result<Dataset> {
        if let Some(&bad) = indices.iter().find(|&&i| i >= self.n()) {
            return Err(invalid(alloc::format!(
                "row index {bad} out of range for {} samples",
                self.n()
            )));
        }
        Ok(Dataset {
            features: self.features.select_rows(indices),
            labels: self.labels.select_rows(indices),
            kind: self.kind,
            class_names: self.class_names.clone(),
        })
    }

    /// Drops row `i`.
    pub fn without_row(&self, i: usize) -> Result<Dataset> {
        let keep: Vec<usize> = (0..self.n()).filter(|&j| j != i).collect();
        self.subset(&keep)
    }

    /// Rows of `self` followed by rows of `other`. The result is one-hot only
    /// if both inputs are.
    pub fn concat(&self, other: &Dataset) -> Result<Dataset> {
        if self.k() != other.k() {
            return Err(Error::DimensionMismatch {
                context: "label columns",
                expected: self.k(),
                found: other.k(),
            });
        }
        let kind = if self.kind == LabelKind::OneHot && other.kind == LabelKind::OneHot {
            LabelKind::OneHot
        } else {
            LabelKind::Residual
        };
        Ok(Dataset {
            features: self.features.vstack(&other.features)?,
            labels: self.labels.vstack(&other.labels)?,
            kind,
            class_names: self.class_names.clone(),
        })
    }

    /// `(√D Z, √D Y)` for non-negative `scale`.
    pub fn row_scaled(&self, scale: &SampleWeights) -> Result<Dataset> {
        scale.check_len(self.n())?;
        let roots: Vec<f64> = scale.as_slice().iter().map(|&a| libm::sqrt(a)).collect();
        Ok(Dataset {
            features: self.features.scale_rows(&roots),
            labels: self.labels.scale_rows(&roots),
            kind: LabelKind::Residual,
            class_names: self.class_names.clone(),
        })
    }
}

pub(crate) fn one_hot_matrix(classes: &[usize], k: usize) -> Result<Matrix> {
    let mut y = Matrix::zeros(classes.len(), k);
    for (i, &c) in classes.iter().enumerate() {
        if c >= k {
            return Err(invalid(alloc::format!(
                "class {c} at row {i} out of range for k = {k}"
            )));
        }
        y[(i, c)] = 1.0;
    }
    Ok(y)
}

/// Non-negative importance weights `α`, one per training sample.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleWeights(Vec<f64>);

impl SampleWeights {
    pub fn new(alpha: Vec<f64>) -> Result<Self> {
        for (i, &a) in alpha.iter().enumerate() {
            if !a.is_finite() {
                return Err(Error::NonFinite {
                    context: "sample weights",
                    row: i,
                    col: 0,
                });
            }
            if a < 0.0 {
                return Err(invalid(alloc::format!(
                    "sample weight {i} is negative ({a})"
                )));
            }
        }
        Ok(SampleWeights(alpha))
    }

    pub fn ones(n: usize) -> Self {
        SampleWeights(vec![1.0; n])
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.0.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    #[inline]
    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    /// Copy with entry `i` replaced. `value` must be finite and non-negative.
    pub fn with(&self, i: usize, value: f64) -> Result<Self> {
        let mut v = self.0.clone();
        *v.get_mut(i)
            .ok_or_else(|| invalid(alloc::format!("weight index {i} out of range")))? = value;
        SampleWeights::new(v)
    }

    pub(crate) fn check_len(&self, n: usize) -> Result<()> {
        if self.len() != n {
            return Err(Error::DimensionMismatch {
                context: "sample weights length",
                expected: n,
                found: self.len(),
            });
        }
        Ok(())
    }
}
