//! Directional congestion analysis.
//!
//! Works over the convex, equality-input technology: activities are convex
//! combinations of the observed units with inputs matched exactly and outputs
//! freely disposable downward. On that frontier a unit can be congested only
//! in certain input/output directions; this module detects the directions
//! and quantifies the effect two ways:
//!
//! * a finite-difference estimate: perturb the inputs by a validated small
//!   step `t` along the direction and read off the induced proportional
//!   output change `beta* / t` (right side expands inputs, left side
//!   contracts them);
//! * upper/lower bounds from a multiplier program whose fractional objective
//!   is linearized by the Charnes-Cooper substitution; its minimum equals the
//!   right estimate and its maximum the left estimate wherever both exist.
//!
//! Units for which no directional input expansion (contraction) is feasible
//! at all are of directional largest (smallest) scale size; the corresponding
//! side has no data, which is reported as such rather than as "no
//! congestion".

use std::borrow::Cow;

use crate::dataset::Dataset;
use crate::lp::{
    solve, solve_lexicographic, LinearProgram, LpSolution, LpStatus, Relation, Sense, VarDomain,
};
use crate::scalar::{Scalar, Tolerances};
use crate::DeaError;

/// An input/output direction pair, stored normalized: the input weights sum
/// to the input count and the output weights to the output count. Users may
/// pass any nonnegative, not-all-zero vectors; scaling is canonical.
#[derive(Debug, Clone, PartialEq)]
pub struct Direction<S: Scalar = f64> {
    omega: Vec<S>,
    delta: Vec<S>,
}

impl<S: Scalar> Direction<S> {
    pub fn new(omega: Vec<S>, delta: Vec<S>) -> Result<Self, DeaError> {
        let omega = Self::normalize(omega, "input")?;
        let delta = Self::normalize(delta, "output")?;
        Ok(Self { omega, delta })
    }

    /// The diagonal direction: every input and output weighted equally.
    pub fn diagonal(num_inputs: usize, num_outputs: usize) -> Self {
        Self {
            omega: vec![S::one(); num_inputs],
            delta: vec![S::one(); num_outputs],
        }
    }

    fn normalize(mut v: Vec<S>, side: &str) -> Result<Vec<S>, DeaError> {
        if v.is_empty() {
            return Err(DeaError::InvalidInput(format!("{side} direction is empty")));
        }
        if v.iter().any(|&w| w < S::zero() || !w.is_finite()) {
            return Err(DeaError::InvalidInput(format!(
                "{side} direction has a negative or non-finite component"
            )));
        }
        let total: S = v.iter().copied().sum();
        if total <= S::zero() {
            return Err(DeaError::InvalidInput(format!(
                "{side} direction is all zero"
            )));
        }
        let target = S::from_usize(v.len()).unwrap();
        let scale = target / total;
        for w in v.iter_mut() {
            *w *= scale;
        }
        Ok(v)
    }

    pub fn omega(&self) -> &[S] {
        &self.omega
    }

    pub fn delta(&self) -> &[S] {
        &self.delta
    }

    fn check_arity(&self, d: &Dataset<S>) -> Result<(), DeaError> {
        if self.omega.len() != d.num_inputs() {
            return Err(DeaError::InvalidInput(format!(
                "direction has {} input components, dataset has {}",
                self.omega.len(),
                d.num_inputs()
            )));
        }
        if self.delta.len() != d.num_outputs() {
            return Err(DeaError::InvalidInput(format!(
                "direction has {} output components, dataset has {}",
                self.delta.len(),
                d.num_outputs()
            )));
        }
        Ok(())
    }
}

/// Finite-difference step selection policy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepConfig<S: Scalar = f64> {
    /// First step tried; halved on validation failure.
    pub t_initial: S,
    /// How many halvings before giving up.
    pub max_halvings: u32,
    /// Tolerance on the validation objective reaching one.
    pub validation_tol: S,
}

impl<S: Scalar> Default for StepConfig<S> {
    fn default() -> Self {
        Self {
            t_initial: S::STEP_INITIAL,
            max_halvings: 20,
            validation_tol: S::STEP_VALIDATION_TOL,
        }
    }
}

/// Which estimation route(s) to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Fdm,
    Ulbm,
    Both,
}

impl Method {
    pub fn uses_fdm(self) -> bool {
        matches!(self, Method::Fdm | Method::Both)
    }

    pub fn uses_ulbm(self) -> bool {
        matches!(self, Method::Ulbm | Method::Both)
    }
}

/// A validated finite-difference estimate and the step it was taken at.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FdmEstimate<S: Scalar = f64> {
    pub value: S,
    pub step: S,
}

/// A supporting hyperplane `u.Y - v.X + mu0 = 0` of the technology through
/// the evaluated unit, with nonnegative output weights.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiplierSolution<S: Scalar = f64> {
    pub u: Vec<S>,
    pub v: Vec<S>,
    pub mu0: S,
}

/// Scale-elasticity bounds from the multiplier program. Infinite values
/// encode unboundedness: `rho_upper = +inf` iff the unit is of directional
/// smallest scale size, `rho_lower = -inf` iff of directional largest; the
/// corresponding multipliers are absent then.
#[derive(Debug, Clone, PartialEq)]
pub struct UlbmBounds<S: Scalar = f64> {
    pub rho_lower: S,
    pub rho_upper: S,
    pub dlss: bool,
    pub dsss: bool,
    /// Hyperplane attaining the lower bound.
    pub lower_multipliers: Option<MultiplierSolution<S>>,
    /// Hyperplane attaining the upper bound.
    pub upper_multipliers: Option<MultiplierSolution<S>>,
}

/// Projection of a unit onto the strongly efficient frontier: inputs kept,
/// outputs radially expanded and then slack-maximized.
#[derive(Debug, Clone)]
pub struct Projection<S: Scalar = f64> {
    pub dataset: Dataset<S>,
    pub theta: S,
    pub output_slacks: Vec<S>,
}

/// Full per-unit, per-direction verdict.
#[derive(Debug, Clone, PartialEq)]
pub struct DirectionalResult<S: Scalar = f64> {
    pub dmu: usize,
    pub direction: Direction<S>,
    /// True when the unit was projected onto the strong frontier first; the
    /// result then describes the projection.
    pub projected: bool,
    /// Directional largest scale size: no data on the right side.
    pub dlss: bool,
    /// Directional smallest scale size: no data on the left side.
    pub dsss: bool,
    /// Right-hand finite-difference estimate `beta*/t`.
    pub xi: Option<S>,
    /// Left-hand finite-difference estimate `beta*/t`.
    pub psi: Option<S>,
    pub t_right: Option<S>,
    pub t_left: Option<S>,
    /// Lower scale-elasticity bound; `-inf` on the no-data right side.
    pub rho_lower: Option<S>,
    /// Upper scale-elasticity bound; `+inf` on the no-data left side.
    pub rho_upper: Option<S>,
    pub right_congested: bool,
    pub left_congested: bool,
}

/// One row of a direction sweep; errors are recorded per row so a sweep
/// never aborts half-way.
#[derive(Debug)]
pub struct SweepRow<S: Scalar = f64> {
    pub direction: Direction<S>,
    pub outcome: Result<DirectionalResult<S>, DeaError>,
}

fn expect_optimal<S: Scalar>(sol: LpSolution<S>, what: &str) -> Result<LpSolution<S>, DeaError> {
    match sol.status {
        LpStatus::Optimal => Ok(sol),
        LpStatus::Infeasible => Err(DeaError::Inconsistent(format!("{what} is infeasible"))),
        LpStatus::Unbounded => Err(DeaError::Inconsistent(format!("{what} is unbounded"))),
    }
}

/// Membership test for the strongly efficient frontier: the unit is strongly
/// efficient iff no activity with the same inputs yields more of any output.
/// Realized as an additive dominance search (maximize total output surplus at
/// fixed inputs); the optimum is zero exactly on the strong frontier.
pub fn is_strongly_efficient<S: Scalar>(
    d: &Dataset<S>,
    dmu: usize,
    tol: &Tolerances<S>,
) -> Result<bool, DeaError> {
    d.check_unit(dmu)?;
    let n = d.len();
    let m = d.num_inputs();
    let s = d.num_outputs();
    // Variables: intensity weights, then one surplus per output.
    let nv = n + s;
    let mut cost = vec![S::zero(); nv];
    for r in 0..s {
        cost[n + r] = S::one();
    }
    let mut lp = LinearProgram::with_nonnegative_vars(Sense::Maximize, cost);
    for i in 0..m {
        let mut coeffs = vec![S::zero(); nv];
        for j in 0..n {
            coeffs[j] = d.input(i, j);
        }
        lp.push_row(coeffs, Relation::Equal, d.input(i, dmu));
    }
    for r in 0..s {
        let mut coeffs = vec![S::zero(); nv];
        for j in 0..n {
            coeffs[j] = d.output(r, j);
        }
        coeffs[n + r] = -S::one();
        lp.push_row(coeffs, Relation::GreaterEq, d.output(r, dmu));
    }
    lp.push_row(intensity_row(n, nv), Relation::Equal, S::one());
    let sol = expect_optimal(solve(&lp)?, "strong-efficiency test")?;
    Ok(sol.objective <= tol.classification)
}

fn intensity_row<S: Scalar>(n: usize, nv: usize) -> Vec<S> {
    let mut coeffs = vec![S::zero(); nv];
    for c in coeffs.iter_mut().take(n) {
        *c = S::one();
    }
    coeffs
}

/// Project a unit onto the strongly efficient frontier: maximize the radial
/// output expansion, then maximize the output slacks, and replace the unit's
/// outputs by `theta* y + s+*`. Inputs are unchanged. Idempotent on strongly
/// efficient units; the two-stage solve makes the projection deterministic.
pub fn project<S: Scalar>(
    d: &Dataset<S>,
    dmu: usize,
    _tol: &Tolerances<S>,
) -> Result<Projection<S>, DeaError> {
    d.check_unit(dmu)?;
    let n = d.len();
    let m = d.num_inputs();
    let s = d.num_outputs();
    // Variables: intensities, expansion factor, output slacks.
    let nv = n + 1 + s;
    let mut cost = vec![S::zero(); nv];
    cost[n] = S::one();
    let mut domains = vec![VarDomain::NonNegative; nv];
    domains[n] = VarDomain::Free;
    let mut lp = LinearProgram::new(Sense::Maximize, cost, domains);
    for i in 0..m {
        let mut coeffs = vec![S::zero(); nv];
        for j in 0..n {
            coeffs[j] = d.input(i, j);
        }
        lp.push_row(coeffs, Relation::Equal, d.input(i, dmu));
    }
    for r in 0..s {
        let mut coeffs = vec![S::zero(); nv];
        for j in 0..n {
            coeffs[j] = d.output(r, j);
        }
        coeffs[n] = -d.output(r, dmu);
        coeffs[n + 1 + r] = -S::one();
        lp.push_row(coeffs, Relation::Equal, S::zero());
    }
    lp.push_row(intensity_row(n, nv), Relation::Equal, S::one());
    let mut slack_cost = vec![S::zero(); nv];
    for r in 0..s {
        slack_cost[n + 1 + r] = S::one();
    }
    let sol = expect_optimal(
        solve_lexicographic(&lp, &slack_cost)?,
        "frontier projection",
    )?;
    let theta = sol.primal[n];
    let output_slacks: Vec<S> = (0..s).map(|r| sol.primal[n + 1 + r]).collect();
    let new_outputs: Vec<S> = (0..s)
        .map(|r| theta * d.output(r, dmu) + output_slacks[r])
        .collect();
    let dataset = d.with_outputs_replaced(dmu, &new_outputs)?;
    Ok(Projection {
        dataset,
        theta,
        output_slacks,
    })
}

/// Feasible-perturbation program shared by the scale-size tests: maximize the
/// input scaling `eta >= 0` along the direction (`sign` +1 expands, -1
/// contracts) with the output level free to move along its direction.
fn scale_size_program<S: Scalar>(
    d: &Dataset<S>,
    dmu: usize,
    dir: &Direction<S>,
    sign: S,
) -> LinearProgram<S> {
    let n = d.len();
    let m = d.num_inputs();
    let s = d.num_outputs();
    // Variables: intensities, eta, beta.
    let nv = n + 2;
    let mut cost = vec![S::zero(); nv];
    cost[n] = S::one();
    let mut domains = vec![VarDomain::NonNegative; nv];
    domains[n + 1] = VarDomain::Free;
    let mut lp = LinearProgram::new(Sense::Maximize, cost, domains);
    for i in 0..m {
        let mut coeffs = vec![S::zero(); nv];
        for j in 0..n {
            coeffs[j] = d.input(i, j);
        }
        coeffs[n] = -sign * dir.omega()[i] * d.input(i, dmu);
        lp.push_row(coeffs, Relation::Equal, d.input(i, dmu));
    }
    for r in 0..s {
        let mut coeffs = vec![S::zero(); nv];
        for j in 0..n {
            coeffs[j] = d.output(r, j);
        }
        coeffs[n + 1] = -sign * dir.delta()[r] * d.output(r, dmu);
        lp.push_row(coeffs, Relation::GreaterEq, d.output(r, dmu));
    }
    lp.push_row(intensity_row(n, nv), Relation::Equal, S::one());
    lp
}

/// Directional largest scale size: no feasible directional input expansion.
/// Expects a strongly efficient unit.
pub fn is_dlss<S: Scalar>(
    d: &Dataset<S>,
    dmu: usize,
    dir: &Direction<S>,
    tol: &Tolerances<S>,
) -> Result<bool, DeaError> {
    d.check_unit(dmu)?;
    dir.check_arity(d)?;
    let lp = scale_size_program(d, dmu, dir, S::one());
    let sol = solve(&lp)?;
    match sol.status {
        LpStatus::Optimal => Ok(sol.objective <= tol.classification),
        // Unbounded expansion means the direction does not touch any positive
        // input of this unit, so expansion is certainly feasible.
        LpStatus::Unbounded => Ok(false),
        LpStatus::Infeasible => Err(DeaError::Inconsistent(
            "scale-size program infeasible at its own unit".into(),
        )),
    }
}

/// Directional smallest scale size: no feasible directional input
/// contraction. Expects a strongly efficient unit.
pub fn is_dsss<S: Scalar>(
    d: &Dataset<S>,
    dmu: usize,
    dir: &Direction<S>,
    tol: &Tolerances<S>,
) -> Result<bool, DeaError> {
    d.check_unit(dmu)?;
    dir.check_arity(d)?;
    let lp = scale_size_program(d, dmu, dir, -S::one());
    let sol = solve(&lp)?;
    match sol.status {
        LpStatus::Optimal => Ok(sol.objective <= tol.classification),
        LpStatus::Unbounded => Ok(false),
        LpStatus::Infeasible => Err(DeaError::Inconsistent(
            "scale-size program infeasible at its own unit".into(),
        )),
    }
}

/// Inputs of the step-shifted point `(1 + sign * omega_i * t) x_i0`.
fn shifted_inputs<S: Scalar>(
    d: &Dataset<S>,
    dmu: usize,
    dir: &Direction<S>,
    t: S,
    sign: S,
) -> Vec<S> {
    (0..d.num_inputs())
        .map(|i| {
            let x = d.input(i, dmu);
            x + sign * dir.omega()[i] * t * x
        })
        .collect()
}

/// Fixed-step directional program: pin the inputs at the shifted point and
/// optimize the proportional output move `beta` (maximized on the right
/// side, minimized on the left).
fn fdm_program<S: Scalar>(
    d: &Dataset<S>,
    dmu: usize,
    dir: &Direction<S>,
    t: S,
    sign: S,
) -> LinearProgram<S> {
    let n = d.len();
    let m = d.num_inputs();
    let s = d.num_outputs();
    // Variables: intensities, beta.
    let nv = n + 1;
    let mut cost = vec![S::zero(); nv];
    cost[n] = S::one();
    let mut domains = vec![VarDomain::NonNegative; nv];
    domains[n] = VarDomain::Free;
    let sense = if sign > S::zero() {
        Sense::Maximize
    } else {
        Sense::Minimize
    };
    let mut lp = LinearProgram::new(sense, cost, domains);
    let shifted = shifted_inputs(d, dmu, dir, t, sign);
    for i in 0..m {
        let mut coeffs = vec![S::zero(); nv];
        for j in 0..n {
            coeffs[j] = d.input(i, j);
        }
        lp.push_row(coeffs, Relation::Equal, shifted[i]);
    }
    for r in 0..s {
        let mut coeffs = vec![S::zero(); nv];
        for j in 0..n {
            coeffs[j] = d.output(r, j);
        }
        coeffs[n] = -sign * dir.delta()[r] * d.output(r, dmu);
        lp.push_row(coeffs, Relation::GreaterEq, d.output(r, dmu));
    }
    lp.push_row(intensity_row(n, nv), Relation::Equal, S::one());
    lp
}

/// Supporting-hyperplane validation: the step `t` is small enough iff the
/// shifted point and the unit share a supporting hyperplane.
///
/// Over all hyperplanes supporting the technology whose directional
/// elasticity ratio equals the candidate estimate `beta*/t` (the constraint
/// is the exact product form of "orthogonal to the step segment", so no
/// cancellation enters), minimize the hyperplane value `V.X_0 - mu` at the
/// unit under the output-side normalization `U.Y_0 = 1`. The unit's own hull
/// row bounds the objective below by one; one is attained exactly when such
/// a hyperplane touches the unit, which makes it touch the shifted point as
/// well. The output-side normalization stays feasible on congested faces,
/// where the input multipliers turn negative.
fn validation_passes<S: Scalar>(
    d: &Dataset<S>,
    dmu: usize,
    dir: &Direction<S>,
    estimate: S,
    validation_tol: S,
) -> Result<bool, DeaError> {
    let n = d.len();
    let m = d.num_inputs();
    let s = d.num_outputs();
    // Variables: output multipliers, input multipliers, offset.
    let nv = s + m + 1;
    let mut cost = vec![S::zero(); nv];
    for i in 0..m {
        cost[s + i] = d.input(i, dmu);
    }
    cost[s + m] = -S::one();
    let mut domains = vec![VarDomain::Free; nv];
    for dom in domains.iter_mut().take(s) {
        *dom = VarDomain::NonNegative;
    }
    let mut lp = LinearProgram::new(Sense::Minimize, cost, domains);
    for j in 0..n {
        let mut coeffs = vec![S::zero(); nv];
        for r in 0..s {
            coeffs[r] = d.output(r, j);
        }
        for i in 0..m {
            coeffs[s + i] = -d.input(i, j);
        }
        coeffs[s + m] = S::one();
        lp.push_row(coeffs, Relation::LessEq, S::zero());
    }
    let mut norm = vec![S::zero(); nv];
    for r in 0..s {
        norm[r] = d.output(r, dmu);
    }
    lp.push_row(norm, Relation::Equal, S::one());
    let mut ratio = vec![S::zero(); nv];
    for r in 0..s {
        ratio[r] = estimate * dir.delta()[r] * d.output(r, dmu);
    }
    for i in 0..m {
        ratio[s + i] = -dir.omega()[i] * d.input(i, dmu);
    }
    lp.push_row(ratio, Relation::Equal, S::zero());

    let sol = solve(&lp)?;
    match sol.status {
        LpStatus::Optimal => Ok((sol.objective - S::one()).abs() <= validation_tol),
        // No supporting hyperplane matches the candidate ratio: the step
        // went past the face.
        LpStatus::Infeasible => Ok(false),
        LpStatus::Unbounded => Err(DeaError::Inconsistent(
            "step-validation program unbounded".into(),
        )),
    }
}

enum FdmCandidate<S: Scalar> {
    /// Step landed outside the technology; halve.
    StepTooLarge,
    Value(S),
}

fn fdm_candidate<S: Scalar>(
    d: &Dataset<S>,
    dmu: usize,
    dir: &Direction<S>,
    t: S,
    sign: S,
    side: &'static str,
) -> Result<FdmCandidate<S>, DeaError> {
    let lp = fdm_program(d, dmu, dir, t, sign);
    let sol = solve(&lp)?;
    match sol.status {
        LpStatus::Optimal => Ok(FdmCandidate::Value(sol.objective)),
        LpStatus::Infeasible => Ok(FdmCandidate::StepTooLarge),
        LpStatus::Unbounded => Err(DeaError::Inconsistent(format!(
            "{side} directional program unbounded: the output direction does not \
             touch any positive output of the unit"
        ))),
    }
}

fn validate_candidate<S: Scalar>(
    d: &Dataset<S>,
    dmu: usize,
    dir: &Direction<S>,
    t: S,
    beta: S,
    validation_tol: S,
) -> Result<bool, DeaError> {
    validation_passes(d, dmu, dir, beta / t, validation_tol)
}

fn fdm_estimate<S: Scalar>(
    d: &Dataset<S>,
    dmu: usize,
    dir: &Direction<S>,
    steps: &StepConfig<S>,
    sign: S,
    side: &'static str,
) -> Result<FdmEstimate<S>, DeaError> {
    d.check_unit(dmu)?;
    dir.check_arity(d)?;
    let mut t = steps.t_initial;
    if t <= S::zero() || !t.is_finite() {
        return Err(DeaError::InvalidInput(
            "step size must be strictly positive".into(),
        ));
    }
    let half = S::cast(0.5);
    for _ in 0..=steps.max_halvings {
        match fdm_candidate(d, dmu, dir, t, sign, side)? {
            FdmCandidate::StepTooLarge => {}
            FdmCandidate::Value(beta) => {
                if validate_candidate(d, dmu, dir, t, beta, steps.validation_tol)? {
                    return Ok(FdmEstimate {
                        value: beta / t,
                        step: t,
                    });
                }
                log::debug!("{side} step {t} failed hyperplane validation, halving");
            }
        }
        t *= half;
    }
    Err(DeaError::StepSelectionFailed {
        side,
        last_step: (t / half).to_f64().unwrap_or(f64::NAN),
    })
}

/// Right-hand directional congestion estimate for a strongly efficient,
/// non-DLSS unit: the validated `beta*/t` under directional input expansion.
/// Negative values mean congestion to the right.
pub fn right_fdm<S: Scalar>(
    d: &Dataset<S>,
    dmu: usize,
    dir: &Direction<S>,
    steps: &StepConfig<S>,
    _tol: &Tolerances<S>,
) -> Result<FdmEstimate<S>, DeaError> {
    fdm_estimate(d, dmu, dir, steps, S::one(), "right")
}

/// Left-hand counterpart under directional input contraction, for non-DSSS
/// units. Negative values mean congestion to the left.
pub fn left_fdm<S: Scalar>(
    d: &Dataset<S>,
    dmu: usize,
    dir: &Direction<S>,
    steps: &StepConfig<S>,
    _tol: &Tolerances<S>,
) -> Result<FdmEstimate<S>, DeaError> {
    fdm_estimate(d, dmu, dir, steps, -S::one(), "left")
}

/// Does the step `t` pass the right-side supporting-hyperplane test?
pub fn validate_step_right<S: Scalar>(
    d: &Dataset<S>,
    dmu: usize,
    dir: &Direction<S>,
    t: S,
    steps: &StepConfig<S>,
) -> Result<bool, DeaError> {
    d.check_unit(dmu)?;
    dir.check_arity(d)?;
    match fdm_candidate(d, dmu, dir, t, S::one(), "right")? {
        FdmCandidate::StepTooLarge => Ok(false),
        FdmCandidate::Value(beta) => validate_candidate(d, dmu, dir, t, beta, steps.validation_tol),
    }
}

/// Does the step `t` pass the left-side supporting-hyperplane test?
pub fn validate_step_left<S: Scalar>(
    d: &Dataset<S>,
    dmu: usize,
    dir: &Direction<S>,
    t: S,
    steps: &StepConfig<S>,
) -> Result<bool, DeaError> {
    d.check_unit(dmu)?;
    dir.check_arity(d)?;
    match fdm_candidate(d, dmu, dir, t, -S::one(), "left")? {
        FdmCandidate::StepTooLarge => Ok(false),
        FdmCandidate::Value(beta) => validate_candidate(d, dmu, dir, t, beta, steps.validation_tol),
    }
}

/// Scale-elasticity bounds via the linearized multiplier program.
///
/// Requires every direction component strictly positive (the linearization
/// divides by them); directions with zero components must use the
/// finite-difference path instead. Expects a strongly efficient unit.
pub fn ulbm_bounds<S: Scalar>(
    d: &Dataset<S>,
    dmu: usize,
    dir: &Direction<S>,
    _tol: &Tolerances<S>,
) -> Result<UlbmBounds<S>, DeaError> {
    d.check_unit(dmu)?;
    dir.check_arity(d)?;
    let eps = S::DIRECTION_EPSILON;
    if dir.omega().iter().any(|&w| w < eps) || dir.delta().iter().any(|&w| w < eps) {
        return Err(DeaError::InvalidInput(
            "bounds method needs strictly positive direction components; \
             use the finite-difference method for directions with zeros"
                .into(),
        ));
    }

    let n = d.len();
    let m = d.num_inputs();
    let s = d.num_outputs();
    // Variables: transformed input multipliers, transformed output
    // multipliers, the Charnes-Cooper scaling, and the scaled offset.
    let nv = m + s + 2;
    let gamma = |i: usize| i;
    let lambda = |r: usize| m + r;
    let tau = m + s;
    let mu = m + s + 1;

    let mut cost = vec![S::zero(); nv];
    for i in 0..m {
        cost[gamma(i)] = d.input(i, dmu);
    }
    let mut domains = vec![VarDomain::Free; nv];
    for r in 0..s {
        domains[lambda(r)] = VarDomain::NonNegative;
    }
    domains[tau] = VarDomain::NonNegative;

    let hyperplane_row = |j: usize| {
        let mut coeffs = vec![S::zero(); nv];
        for r in 0..s {
            coeffs[lambda(r)] = d.output(r, j) / dir.delta()[r];
        }
        for i in 0..m {
            coeffs[gamma(i)] = -d.input(i, j) / dir.omega()[i];
        }
        coeffs[mu] = S::one();
        coeffs
    };

    let build = |sense: Sense| {
        let mut lp = LinearProgram::new(sense, cost.clone(), domains.clone());
        for j in 0..n {
            lp.push_row(hyperplane_row(j), Relation::LessEq, S::zero());
        }
        lp.push_row(hyperplane_row(dmu), Relation::Equal, S::zero());
        let mut anchor = vec![S::zero(); nv];
        for i in 0..m {
            anchor[gamma(i)] = d.input(i, dmu) / dir.omega()[i];
        }
        anchor[mu] = -S::one();
        anchor[tau] = -S::one();
        lp.push_row(anchor, Relation::Equal, S::zero());
        let mut norm = vec![S::zero(); nv];
        for r in 0..s {
            norm[lambda(r)] = d.output(r, dmu);
        }
        lp.push_row(norm, Relation::Equal, S::one());
        lp
    };

    // Undo the Charnes-Cooper substitution to expose the hyperplane weights.
    let untransform = |primal: &[S]| {
        let scaling = primal[tau];
        MultiplierSolution {
            u: (0..s)
                .map(|r| primal[lambda(r)] / (scaling * dir.delta()[r]))
                .collect(),
            v: (0..m)
                .map(|i| primal[gamma(i)] / (scaling * dir.omega()[i]))
                .collect(),
            mu0: primal[mu] / scaling,
        }
    };

    let upper = solve(&build(Sense::Maximize))?;
    let (rho_upper, dsss, upper_multipliers) = match upper.status {
        LpStatus::Optimal => (upper.objective, false, Some(untransform(&upper.primal))),
        LpStatus::Unbounded => (S::infinity(), true, None),
        LpStatus::Infeasible => {
            return Err(DeaError::Inconsistent(
                "bounds program infeasible: unit is not strongly efficient".into(),
            ))
        }
    };
    let lower = solve(&build(Sense::Minimize))?;
    let (rho_lower, dlss, lower_multipliers) = match lower.status {
        LpStatus::Optimal => (lower.objective, false, Some(untransform(&lower.primal))),
        LpStatus::Unbounded => (S::neg_infinity(), true, None),
        LpStatus::Infeasible => {
            return Err(DeaError::Inconsistent(
                "bounds program infeasible: unit is not strongly efficient".into(),
            ))
        }
    };
    Ok(UlbmBounds {
        rho_lower,
        rho_upper,
        dlss,
        dsss,
        lower_multipliers,
        upper_multipliers,
    })
}

/// Full directional verdict for one unit and one direction.
///
/// Units off the strong frontier are first projected onto it (the result is
/// flagged and describes the projection). Then, per side: the scale-size
/// test decides whether data exists at all; if it does, the requested
/// method(s) produce the estimate and/or bounds, and the congestion flags are
/// the sign tests on the estimates.
pub fn analyze<S: Scalar>(
    d: &Dataset<S>,
    dmu: usize,
    dir: &Direction<S>,
    method: Method,
    steps: &StepConfig<S>,
    tol: &Tolerances<S>,
) -> Result<DirectionalResult<S>, DeaError> {
    d.check_unit(dmu)?;
    dir.check_arity(d)?;

    let efficient = is_strongly_efficient(d, dmu, tol)
        .map_err(|e| DeaError::at("strong-efficiency test", e))?;
    let work: Cow<'_, Dataset<S>> = if efficient {
        Cow::Borrowed(d)
    } else {
        let proj = project(d, dmu, tol).map_err(|e| DeaError::at("frontier projection", e))?;
        Cow::Owned(proj.dataset)
    };
    let work = work.as_ref();

    let dlss =
        is_dlss(work, dmu, dir, tol).map_err(|e| DeaError::at("right scale-size check", e))?;
    let (xi, t_right) = if !dlss && method.uses_fdm() {
        let est = right_fdm(work, dmu, dir, steps, tol)
            .map_err(|e| DeaError::at("right-hand estimate", e))?;
        (Some(est.value), Some(est.step))
    } else {
        (None, None)
    };

    let dsss =
        is_dsss(work, dmu, dir, tol).map_err(|e| DeaError::at("left scale-size check", e))?;
    let (psi, t_left) = if !dsss && method.uses_fdm() {
        let est = left_fdm(work, dmu, dir, steps, tol)
            .map_err(|e| DeaError::at("left-hand estimate", e))?;
        (Some(est.value), Some(est.step))
    } else {
        (None, None)
    };

    let (rho_lower, rho_upper) = if method.uses_ulbm() {
        let bounds =
            ulbm_bounds(work, dmu, dir, tol).map_err(|e| DeaError::at("elasticity bounds", e))?;
        if bounds.dlss != dlss || bounds.dsss != dsss {
            return Err(DeaError::at(
                "elasticity bounds",
                DeaError::Inconsistent(format!(
                    "scale-size flags disagree: bounds say dlss={} dsss={}, tests say dlss={dlss} dsss={dsss}",
                    bounds.dlss, bounds.dsss
                )),
            ));
        }
        (Some(bounds.rho_lower), Some(bounds.rho_upper))
    } else {
        (None, None)
    };

    let negative = |v: S| v < -tol.classification;
    let right_congested = !dlss
        && match (xi, rho_lower) {
            (Some(v), _) => negative(v),
            (None, Some(r)) => negative(r),
            (None, None) => false,
        };
    let left_congested = !dsss
        && match (psi, rho_upper) {
            (Some(v), _) => negative(v),
            (None, Some(r)) => negative(r),
            (None, None) => false,
        };

    Ok(DirectionalResult {
        dmu,
        direction: dir.clone(),
        projected: !efficient,
        dlss,
        dsss,
        xi,
        psi,
        t_right,
        t_left,
        rho_lower,
        rho_upper,
        right_congested,
        left_congested,
    })
}

/// Run [`analyze`] over a grid of directions, collecting per-direction
/// outcomes in order. The grid must be nonempty; duplicate directions simply
/// produce duplicate rows.
pub fn sweep<S: Scalar>(
    d: &Dataset<S>,
    dmu: usize,
    grid: &[Direction<S>],
    method: Method,
    steps: &StepConfig<S>,
    tol: &Tolerances<S>,
) -> Result<Vec<SweepRow<S>>, DeaError> {
    if grid.is_empty() {
        return Err(DeaError::InvalidInput("direction grid is empty".into()));
    }
    d.check_unit(dmu)?;
    Ok(grid
        .iter()
        .map(|dir| SweepRow {
            direction: dir.clone(),
            outcome: analyze(d, dmu, dir, method, steps, tol),
        })
        .collect())
}
