//! Dataset ingestion, direction-grid parsing, and report tables.
//!
//! The CSV schema: one header row with a single label column plus input
//! columns prefixed `in:` and output columns prefixed `out:`, then one row
//! per unit. Values are decimal-point numbers, nonnegative.

use std::path::Path;

use crate::classic;
use crate::dataset::{DataError, Dataset};
use crate::directional::{self, Direction, Method, StepConfig};
use crate::scalar::{Scalar, Tolerances};
use crate::DeaError;

/// Report rendering format.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Tsv,
    Markdown,
}

/// Everything a command run needs besides the data itself.
#[derive(Debug, Clone)]
pub struct RunConfig<S: Scalar = f64> {
    pub tolerances: Tolerances<S>,
    pub steps: StepConfig<S>,
    pub format: OutputFormat,
    pub method: Method,
    /// Print full-precision numbers instead of the table-friendly rounding.
    pub full_precision: bool,
    pub with_fgl: bool,
    pub with_ctt: bool,
}

impl<S: Scalar> Default for RunConfig<S> {
    fn default() -> Self {
        Self {
            tolerances: Tolerances::default(),
            steps: StepConfig::default(),
            format: OutputFormat::Csv,
            method: Method::Both,
            full_precision: false,
            with_fgl: false,
            with_ctt: false,
        }
    }
}

/// A rendered-table intermediate: headers plus string rows.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Table {
    pub headers: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn render(&self, format: OutputFormat) -> String {
        match format {
            OutputFormat::Csv => self.render_delimited(",", true),
            OutputFormat::Tsv => self.render_delimited("\t", false),
            OutputFormat::Markdown => self.render_markdown(),
        }
    }

    fn render_delimited(&self, sep: &str, quote: bool) -> String {
        let escape = |field: &str| -> String {
            if quote && (field.contains(',') || field.contains('"') || field.contains('\n')) {
                format!("\"{}\"", field.replace('"', "\"\""))
            } else {
                field.to_string()
            }
        };
        let mut out = String::new();
        out.push_str(
            &self
                .headers
                .iter()
                .map(|h| escape(h))
                .collect::<Vec<_>>()
                .join(sep),
        );
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.iter().map(|f| escape(f)).collect::<Vec<_>>().join(sep));
            out.push('\n');
        }
        out
    }

    fn render_markdown(&self) -> String {
        let mut out = String::new();
        out.push_str("| ");
        out.push_str(&self.headers.join(" | "));
        out.push_str(" |\n|");
        for _ in &self.headers {
            out.push_str(" --- |");
        }
        out.push('\n');
        for row in &self.rows {
            out.push_str("| ");
            out.push_str(&row.join(" | "));
            out.push_str(" |\n");
        }
        out
    }
}

/// Load a dataset from a CSV file.
pub fn load_dataset<S: Scalar>(path: impl AsRef<Path>) -> Result<Dataset<S>, DataError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| DataError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_dataset_csv(&text)
}

/// Parse a dataset from CSV text.
pub fn parse_dataset_csv<S: Scalar>(text: &str) -> Result<Dataset<S>, DataError> {
    let mut reader = csv::ReaderBuilder::new()
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());

    #[derive(Clone, Copy)]
    enum Col {
        Label,
        Input(usize),
        Output(usize),
    }

    let headers = reader.headers()?.clone();
    let mut mapping = Vec::with_capacity(headers.len());
    let mut input_names = Vec::new();
    let mut output_names = Vec::new();
    let mut label_col: Option<usize> = None;
    for (idx, name) in headers.iter().enumerate() {
        if let Some(rest) = name.strip_prefix("in:") {
            mapping.push(Col::Input(input_names.len()));
            input_names.push(rest.trim().to_string());
        } else if let Some(rest) = name.strip_prefix("out:") {
            mapping.push(Col::Output(output_names.len()));
            output_names.push(rest.trim().to_string());
        } else if label_col.is_none() {
            label_col = Some(idx);
            mapping.push(Col::Label);
        } else {
            return Err(DataError::UnrecognizedColumn {
                index: idx + 1,
                name: name.to_string(),
            });
        }
    }
    if label_col.is_none() {
        return Err(DataError::NoLabelColumn);
    }
    if input_names.is_empty() {
        return Err(DataError::NoInputs);
    }
    if output_names.is_empty() {
        return Err(DataError::NoOutputs);
    }

    let mut labels: Vec<String> = Vec::new();
    let mut inputs: Vec<Vec<S>> = vec![Vec::new(); input_names.len()];
    let mut outputs: Vec<Vec<S>> = vec![Vec::new(); output_names.len()];
    for (row_idx, record) in reader.records().enumerate() {
        let record = record?;
        let row = row_idx + 1;
        if record.len() == 1 && record.get(0).is_some_and(|f| f.is_empty()) {
            continue; // blank line
        }
        if record.len() != headers.len() {
            return Err(DataError::RaggedRow {
                row,
                got: record.len(),
                expected: headers.len(),
            });
        }
        let label = record.get(label_col.unwrap()).unwrap_or("").to_string();
        for (idx, field) in record.iter().enumerate() {
            match mapping[idx] {
                Col::Label => {}
                Col::Input(i) => {
                    let v = parse_cell::<S>(field, row, &label, &headers[idx])?;
                    inputs[i].push(v);
                }
                Col::Output(r) => {
                    let v = parse_cell::<S>(field, row, &label, &headers[idx])?;
                    outputs[r].push(v);
                }
            }
        }
        labels.push(label);
    }
    Dataset::new(labels, input_names, output_names, inputs, outputs)
}

fn parse_cell<S: Scalar>(
    field: &str,
    row: usize,
    label: &str,
    column: &str,
) -> Result<S, DataError> {
    let value: f64 = field.parse().map_err(|_| DataError::NonNumeric {
        row,
        label: label.to_string(),
        column: column.to_string(),
        value: field.to_string(),
    })?;
    if value < 0.0 {
        return Err(DataError::Negative {
            row,
            label: label.to_string(),
            column: column.to_string(),
            value,
        });
    }
    Ok(S::cast(value))
}

/// Parse a direction-grid spec: semicolon-separated entries, each either the
/// keyword `diag` or `omega=a,b,...` optionally followed by `|delta=c,d,...`
/// (all-ones when omitted). Components are normalized canonically.
pub fn parse_direction_grid<S: Scalar>(
    spec: &str,
    num_inputs: usize,
    num_outputs: usize,
) -> Result<Vec<Direction<S>>, DeaError> {
    let mut grid = Vec::new();
    for entry in spec.split(';') {
        let entry = entry.trim();
        if entry.is_empty() {
            continue;
        }
        if entry.eq_ignore_ascii_case("diag") {
            grid.push(Direction::diagonal(num_inputs, num_outputs));
            continue;
        }
        let mut omega: Option<Vec<S>> = None;
        let mut delta: Option<Vec<S>> = None;
        for part in entry.split('|') {
            let part = part.trim();
            if let Some(values) = part.strip_prefix("omega=") {
                omega = Some(parse_components(values)?);
            } else if let Some(values) = part.strip_prefix("delta=") {
                delta = Some(parse_components(values)?);
            } else {
                return Err(DeaError::InvalidInput(format!(
                    "direction entry {entry:?}: expected 'diag', 'omega=...' or 'delta=...', got {part:?}"
                )));
            }
        }
        let omega = omega.ok_or_else(|| {
            DeaError::InvalidInput(format!("direction entry {entry:?} has no omega part"))
        })?;
        let delta = delta.unwrap_or_else(|| vec![S::one(); num_outputs]);
        if omega.len() != num_inputs {
            return Err(DeaError::InvalidInput(format!(
                "direction entry {entry:?} has {} input components, dataset has {num_inputs}",
                omega.len()
            )));
        }
        if delta.len() != num_outputs {
            return Err(DeaError::InvalidInput(format!(
                "direction entry {entry:?} has {} output components, dataset has {num_outputs}",
                delta.len()
            )));
        }
        grid.push(Direction::new(omega, delta)?);
    }
    if grid.is_empty() {
        return Err(DeaError::InvalidInput("direction grid is empty".into()));
    }
    Ok(grid)
}

fn parse_components<S: Scalar>(list: &str) -> Result<Vec<S>, DeaError> {
    list.split(',')
        .map(|item| {
            let item = item.trim();
            item.parse::<f64>()
                .map(S::cast)
                .map_err(|_| DeaError::InvalidInput(format!("bad direction component {item:?}")))
        })
        .collect()
}

fn fmt_value<S: Scalar>(v: S, decimals: usize, full: bool) -> String {
    let v = v.to_f64().unwrap_or(f64::NAN);
    if full {
        format!("{v}")
    } else {
        format!("{v:.decimals$}")
    }
}

/// Efficiency table: expansion factor, technical efficiency, and congestion
/// degree per unit.
pub fn cmd_efficiency<S: Scalar>(d: &Dataset<S>, cfg: &RunConfig<S>) -> Result<Table, DeaError> {
    let headers = vec![
        "dmu".to_string(),
        "theta".to_string(),
        "pi".to_string(),
        "phi".to_string(),
    ];
    let mut rows = Vec::with_capacity(d.len());
    for j in 0..d.len() {
        let with_unit = |e: DeaError| DeaError::InvalidInput(format!("{}: {e}", d.label(j)));
        let theta = classic::bcc_output(d, j, &cfg.tolerances)
            .map_err(with_unit)?
            .theta_star;
        let pi = classic::wyts_pte(d, j, &cfg.tolerances).map_err(with_unit)?;
        let phi = pi / theta;
        rows.push(vec![
            d.label(j).to_string(),
            fmt_value(theta, 4, cfg.full_precision),
            fmt_value(pi, 4, cfg.full_precision),
            fmt_value(phi, 4, cfg.full_precision),
        ]);
    }
    Ok(Table { headers, rows })
}

/// Congestion table: the efficiency columns plus the No/Weak/Strong
/// classification, with the optional weak-disposability and per-input
/// congestion columns.
pub fn cmd_congestion<S: Scalar>(d: &Dataset<S>, cfg: &RunConfig<S>) -> Result<Table, DeaError> {
    let mut headers = vec![
        "dmu".to_string(),
        "theta".to_string(),
        "pi".to_string(),
        "phi".to_string(),
        "congestion".to_string(),
    ];
    if cfg.with_fgl {
        headers.push("fgl_beta".to_string());
        headers.push("fgl_ratio".to_string());
    }
    if cfg.with_ctt {
        for name in d.input_names() {
            headers.push(format!("congestion_in:{name}"));
        }
    }
    let mut rows = Vec::with_capacity(d.len());
    for j in 0..d.len() {
        let with_unit = |e: DeaError| DeaError::InvalidInput(format!("{}: {e}", d.label(j)));
        let mut report = classic::classify_congestion(d, j, &cfg.tolerances).map_err(with_unit)?;
        if cfg.with_fgl {
            report.fgl = Some(classic::fgl_congestion(d, j, &cfg.tolerances).map_err(with_unit)?);
        }
        if cfg.with_ctt {
            report.ctt = Some(classic::ctt_congestion(d, j, &cfg.tolerances).map_err(with_unit)?);
        }
        let mut row = vec![
            d.label(j).to_string(),
            fmt_value(report.theta_star, 4, cfg.full_precision),
            fmt_value(report.pi_star, 4, cfg.full_precision),
            fmt_value(report.phi, 4, cfg.full_precision),
            report.classification.to_string(),
        ];
        if let Some(fgl) = report.fgl {
            row.push(fmt_value(fgl.beta_star, 4, cfg.full_precision));
            row.push(fmt_value(fgl.ratio, 4, cfg.full_precision));
        }
        if let Some(ctt) = report.ctt {
            for v in ctt {
                row.push(fmt_value(v, 4, cfg.full_precision));
            }
        }
        rows.push(row);
    }
    Ok(Table { headers, rows })
}

fn fmt_estimate<S: Scalar>(
    value: Option<S>,
    no_data: bool,
    no_data_tag: &str,
    full: bool,
) -> String {
    if no_data {
        return format!("n/a ({no_data_tag})");
    }
    match value {
        Some(v) if v.is_infinite() => {
            if v > S::zero() {
                "+inf".to_string()
            } else {
                "-inf".to_string()
            }
        }
        Some(v) => fmt_value(v, 2, full),
        None => "-".to_string(),
    }
}

fn verdict(no_data: bool, congested: bool) -> String {
    if no_data {
        "n/a".to_string()
    } else if congested {
        "Yes".to_string()
    } else {
        "No".to_string()
    }
}

/// Directional table over units x directions. Returns the table and whether
/// any row failed (errors land in the last column instead of aborting).
pub fn cmd_directional<S: Scalar>(
    d: &Dataset<S>,
    units: &[usize],
    grid: &[Direction<S>],
    cfg: &RunConfig<S>,
) -> Result<(Table, Vec<DeaError>), DeaError> {
    if units.is_empty() {
        return Err(DeaError::InvalidInput("no units selected".into()));
    }
    if grid.is_empty() {
        return Err(DeaError::InvalidInput("direction grid is empty".into()));
    }
    let mut headers = vec!["dmu".to_string()];
    for i in 1..=d.num_inputs() {
        headers.push(format!("omega{i}"));
    }
    headers.extend(
        [
            "xi",
            "psi",
            "rho_lower",
            "rho_upper",
            "right",
            "left",
            "error",
        ]
        .map(str::to_string),
    );

    let mut rows = Vec::new();
    let mut errors = Vec::new();
    for &j in units {
        let sweep = directional::sweep(d, j, grid, cfg.method, &cfg.steps, &cfg.tolerances)?;
        for entry in sweep {
            let mut row = vec![d.label(j).to_string()];
            for &w in entry.direction.omega() {
                row.push(fmt_value(w, 2, cfg.full_precision));
            }
            match entry.outcome {
                Ok(res) => {
                    row.push(fmt_estimate(res.xi, res.dlss, "DLSS", cfg.full_precision));
                    row.push(fmt_estimate(res.psi, res.dsss, "DSSS", cfg.full_precision));
                    row.push(fmt_estimate(res.rho_lower, false, "", cfg.full_precision));
                    row.push(fmt_estimate(res.rho_upper, false, "", cfg.full_precision));
                    row.push(verdict(res.dlss, res.right_congested));
                    row.push(verdict(res.dsss, res.left_congested));
                    row.push(String::new());
                }
                Err(err) => {
                    for _ in 0..6 {
                        row.push(String::new());
                    }
                    row.push(err.to_string());
                    errors.push(err);
                }
            }
            rows.push(row);
        }
    }
    Ok((Table { headers, rows }, errors))
}

/// Bundled fixtures.
pub mod fixtures {
    use super::*;

    /// The 16-unit research-institute dataset (2 inputs, 4 outputs) used by
    /// the golden tests and the usage examples.
    pub fn cas2010<S: Scalar>() -> Dataset<S> {
        parse_dataset_csv(cas2010_csv()).expect("bundled fixture must parse")
    }

    /// Raw CSV text of the bundled fixture.
    pub fn cas2010_csv() -> &'static str {
        include_str!("../data/cas2010.csv")
    }
}
