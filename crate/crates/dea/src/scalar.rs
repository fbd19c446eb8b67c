//! Scalar abstraction so the whole toolkit can run on `f32` or `f64`.
//!
//! All numeric defaults (feasibility tolerance, classification threshold,
//! finite-difference step) are associated constants so each precision gets
//! sensible values. `f64` is the default everywhere and the one the bundled
//! tolerances are calibrated for.

use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::ops::{AddAssign, DivAssign, MulAssign, SubAssign};

use num_traits::{Float, FromPrimitive};

/// Floating-point scalar usable by the solver and the DEA models.
pub trait Scalar:
    Float
    + FromPrimitive
    + AddAssign
    + SubAssign
    + MulAssign
    + DivAssign
    + Sum
    + Debug
    + Display
    + Send
    + Sync
    + 'static
{
    /// Allowed constraint violation of a reported optimal point.
    const FEASIBILITY_TOL: Self;
    /// Allowed gap between primal and dual objective values.
    const DUALITY_TOL: Self;
    /// Threshold for "equals 1" / "equals 0" classification decisions.
    const CLASSIFICATION_TOL: Self;
    /// Default finite-difference step for directional estimates.
    const STEP_INITIAL: Self;
    /// Tolerance on the step-validation objective reaching one.
    const STEP_VALIDATION_TOL: Self;
    /// Smallest direction component accepted by the bounds method.
    const DIRECTION_EPSILON: Self;

    /// Lossy conversion from `f64`, for constants in generic code.
    fn cast(v: f64) -> Self {
        Self::from_f64(v).expect("f64 constant not representable in scalar type")
    }
}

impl Scalar for f64 {
    const FEASIBILITY_TOL: Self = 1e-8;
    const DUALITY_TOL: Self = 1e-7;
    const CLASSIFICATION_TOL: Self = 1e-6;
    const STEP_INITIAL: Self = 1e-6;
    const STEP_VALIDATION_TOL: Self = 1e-7;
    const DIRECTION_EPSILON: Self = 1e-9;
}

impl Scalar for f32 {
    const FEASIBILITY_TOL: Self = 1e-4;
    const DUALITY_TOL: Self = 1e-3;
    const CLASSIFICATION_TOL: Self = 1e-3;
    const STEP_INITIAL: Self = 1e-3;
    const STEP_VALIDATION_TOL: Self = 1e-4;
    const DIRECTION_EPSILON: Self = 1e-6;
}

/// Numeric tolerances shared by the solver and the classification logic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances<S: Scalar = f64> {
    /// Max row violation accepted on an optimal solution.
    pub feasibility: S,
    /// Max |primal objective - dual objective| accepted on an optimal solution.
    pub duality_gap: S,
    /// Threshold used by every "equals 1" / "less than 0" classification.
    pub classification: S,
}

impl<S: Scalar> Default for Tolerances<S> {
    fn default() -> Self {
        Self {
            feasibility: S::FEASIBILITY_TOL,
            duality_gap: S::DUALITY_TOL,
            classification: S::CLASSIFICATION_TOL,
        }
    }
}
