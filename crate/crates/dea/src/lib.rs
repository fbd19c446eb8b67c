//! DEA congestion-analysis toolkit.
//!
//! Builds the classical congestion measurements (output-oriented BCC,
//! weak-disposability, slack-based, and equality-input technical efficiency)
//! and on top of them the directional machinery: detection of directional
//! smallest/largest scale size, right- and left-hand directional congestion
//! estimated by a finite-difference method with step validation, and
//! matching upper/lower scale-elasticity bounds from multiplier programs.
//!
//! All numeric code is generic over the scalar type ([`Scalar`], implemented
//! for `f32` and `f64`); `f64` is the default type parameter everywhere and
//! the precision the bundled tolerances are calibrated for.

// Model assembly reads more clearly with explicit unit/input/output indices.
#![allow(clippy::needless_range_loop)]

pub mod classic;
pub mod dataset;
pub mod directional;
pub mod io;
pub mod lp;
mod numeric;
pub mod scalar;

pub use dataset::{DataError, Dataset};
pub use scalar::{Scalar, Tolerances};

/// Default scalar type of the toolkit.
pub type Real = f64;

/// Umbrella error for the analysis operations.
#[derive(Debug, thiserror::Error)]
pub enum DeaError {
    #[error(transparent)]
    Data(#[from] DataError),
    #[error(transparent)]
    Lp(#[from] lp::LpError),
    /// A model that must be solvable came back infeasible or unbounded.
    #[error("internal inconsistency: {0}")]
    Inconsistent(String),
    /// No validated finite-difference step within the halving budget.
    #[error("step selection failed on the {side} side: no validated step above {last_step}")]
    StepSelectionFailed { side: &'static str, last_step: f64 },
    /// Caller-facing misuse (bad index, direction/dataset mismatch, ...).
    #[error("invalid input: {0}")]
    InvalidInput(String),
    /// Error from a named stage of the directional procedure.
    #[error("{stage}: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<DeaError>,
    },
}

impl DeaError {
    pub(crate) fn at(stage: &'static str, source: DeaError) -> Self {
        DeaError::Stage {
            stage,
            source: Box::new(source),
        }
    }

    /// True when the error reflects bad user input rather than a numerical
    /// failure (drives the CLI exit code).
    pub fn is_input_error(&self) -> bool {
        match self {
            DeaError::Data(_) | DeaError::InvalidInput(_) => true,
            DeaError::Lp(lp::LpError::Invalid(_)) => true,
            DeaError::Stage { source, .. } => source.is_input_error(),
            _ => false,
        }
    }
}
