//! Observed production data: n units, m inputs, s outputs.

use crate::scalar::Scalar;

/// Errors raised while constructing or loading a dataset.
#[derive(Debug, thiserror::Error)]
pub enum DataError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("header has no input columns (expected at least one 'in:' prefix)")]
    NoInputs,
    #[error("header has no output columns (expected at least one 'out:' prefix)")]
    NoOutputs,
    #[error("header column {index} ({name:?}) is not a label, 'in:' or 'out:' column")]
    UnrecognizedColumn { index: usize, name: String },
    #[error("header is missing a label column")]
    NoLabelColumn,
    #[error("row {row} has {got} fields, expected {expected}")]
    RaggedRow {
        row: usize,
        got: usize,
        expected: usize,
    },
    #[error("non-numeric cell {value:?} at row {row} (unit {label:?}), column {column:?}")]
    NonNumeric {
        row: usize,
        label: String,
        column: String,
        value: String,
    },
    #[error("negative value {value} at row {row} (unit {label:?}), column {column:?}")]
    Negative {
        row: usize,
        label: String,
        column: String,
        value: f64,
    },
    #[error("duplicate unit label {label:?} (rows {first} and {second})")]
    DuplicateLabel {
        label: String,
        first: usize,
        second: usize,
    },
    #[error("dataset is empty")]
    Empty,
    #[error("unit {label:?} has no strictly positive input")]
    AllZeroInputs { label: String },
    #[error("unit {label:?} has no strictly positive output")]
    AllZeroOutputs { label: String },
    #[error("inconsistent dimensions: {0}")]
    Dimensions(String),
    #[error("{0}")]
    Invalid(String),
}

/// A fixed set of decision making units with nonnegative inputs and outputs.
///
/// Inputs are stored as an m-by-n matrix and outputs as s-by-n, one column
/// per unit, mirroring the usual x_ij / y_rj layout.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset<S: Scalar = f64> {
    labels: Vec<String>,
    input_names: Vec<String>,
    output_names: Vec<String>,
    inputs: Vec<Vec<S>>,
    outputs: Vec<Vec<S>>,
}

impl<S: Scalar> Dataset<S> {
    /// Build a dataset, checking every invariant: consistent dimensions,
    /// nonnegative entries, unique labels, and per-unit at least one strictly
    /// positive input and output.
    pub fn new(
        labels: Vec<String>,
        input_names: Vec<String>,
        output_names: Vec<String>,
        inputs: Vec<Vec<S>>,
        outputs: Vec<Vec<S>>,
    ) -> Result<Self, DataError> {
        let n = labels.len();
        if n == 0 {
            return Err(DataError::Empty);
        }
        if inputs.is_empty() {
            return Err(DataError::NoInputs);
        }
        if outputs.is_empty() {
            return Err(DataError::NoOutputs);
        }
        if inputs.len() != input_names.len() || outputs.len() != output_names.len() {
            return Err(DataError::Dimensions(
                "matrix row count does not match column names".into(),
            ));
        }
        for (i, row) in inputs.iter().enumerate() {
            if row.len() != n {
                return Err(DataError::Dimensions(format!(
                    "input {i} has {} entries, expected {n}",
                    row.len()
                )));
            }
        }
        for (r, row) in outputs.iter().enumerate() {
            if row.len() != n {
                return Err(DataError::Dimensions(format!(
                    "output {r} has {} entries, expected {n}",
                    row.len()
                )));
            }
        }
        for (i, row) in inputs.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                if !v.is_finite() || v < S::zero() {
                    return Err(DataError::Negative {
                        row: j + 1,
                        label: labels[j].clone(),
                        column: format!("in:{}", input_names[i]),
                        value: v.to_f64().unwrap_or(f64::NAN),
                    });
                }
            }
        }
        for (r, row) in outputs.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                if !v.is_finite() || v < S::zero() {
                    return Err(DataError::Negative {
                        row: j + 1,
                        label: labels[j].clone(),
                        column: format!("out:{}", output_names[r]),
                        value: v.to_f64().unwrap_or(f64::NAN),
                    });
                }
            }
        }
        for j in 0..n {
            for k in 0..j {
                if labels[j] == labels[k] {
                    return Err(DataError::DuplicateLabel {
                        label: labels[j].clone(),
                        first: k + 1,
                        second: j + 1,
                    });
                }
            }
            if !inputs.iter().any(|row| row[j] > S::zero()) {
                return Err(DataError::AllZeroInputs {
                    label: labels[j].clone(),
                });
            }
            if !outputs.iter().any(|row| row[j] > S::zero()) {
                return Err(DataError::AllZeroOutputs {
                    label: labels[j].clone(),
                });
            }
        }
        Ok(Self {
            labels,
            input_names,
            output_names,
            inputs,
            outputs,
        })
    }

    /// Construct from plain matrices with generated labels and names.
    pub fn from_matrices(inputs: Vec<Vec<S>>, outputs: Vec<Vec<S>>) -> Result<Self, DataError> {
        let n = inputs.first().map(|r| r.len()).unwrap_or(0);
        let labels = (1..=n).map(|j| format!("DMU{j}")).collect();
        let input_names = (1..=inputs.len()).map(|i| format!("x{i}")).collect();
        let output_names = (1..=outputs.len()).map(|r| format!("y{r}")).collect();
        Self::new(labels, input_names, output_names, inputs, outputs)
    }

    /// Number of units.
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        false // the constructor rejects empty datasets
    }

    pub fn num_inputs(&self) -> usize {
        self.inputs.len()
    }

    pub fn num_outputs(&self) -> usize {
        self.outputs.len()
    }

    pub fn label(&self, j: usize) -> &str {
        &self.labels[j]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn input_names(&self) -> &[String] {
        &self.input_names
    }

    pub fn output_names(&self) -> &[String] {
        &self.output_names
    }

    /// x_ij: input i of unit j.
    pub fn input(&self, i: usize, j: usize) -> S {
        self.inputs[i][j]
    }

    /// y_rj: output r of unit j.
    pub fn output(&self, r: usize, j: usize) -> S {
        self.outputs[r][j]
    }

    /// Input column of unit j.
    pub fn input_col(&self, j: usize) -> Vec<S> {
        self.inputs.iter().map(|row| row[j]).collect()
    }

    /// Output column of unit j.
    pub fn output_col(&self, j: usize) -> Vec<S> {
        self.outputs.iter().map(|row| row[j]).collect()
    }

    /// Locate a unit by exact label.
    pub fn find(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// Copy with unit j's outputs replaced (used by frontier projection).
    pub fn with_outputs_replaced(&self, j: usize, new_outputs: &[S]) -> Result<Self, DataError> {
        if new_outputs.len() != self.num_outputs() {
            return Err(DataError::Dimensions(format!(
                "replacement outputs have {} entries, expected {}",
                new_outputs.len(),
                self.num_outputs()
            )));
        }
        let mut outputs = self.outputs.clone();
        for (r, &v) in new_outputs.iter().enumerate() {
            outputs[r][j] = v;
        }
        Self::new(
            self.labels.clone(),
            self.input_names.clone(),
            self.output_names.clone(),
            self.inputs.clone(),
            outputs,
        )
    }

    pub(crate) fn check_unit(&self, j: usize) -> Result<(), crate::DeaError> {
        if j < self.len() {
            Ok(())
        } else {
            Err(crate::DeaError::InvalidInput(format!(
                "unit index {j} out of range (dataset has {} units)",
                self.len()
            )))
        }
    }
}
