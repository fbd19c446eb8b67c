//! Dense linear-program solver: two-phase simplex with free variables,
//! equality/inequality rows, row duals, and a lexicographic two-objective
//! mode.
//!
//! Every model in this crate is lowered onto [`LinearProgram`]. Problem sizes
//! are tens of variables, so the solver favors reproducibility and accuracy
//! over scale: pivoting is deterministic (lowest-index tie-breaking, Bland's
//! rule under stalling) and optimal vertices are re-solved from the original
//! column data with LU plus compensated iterative refinement. The refinement
//! matters: downstream finite-difference estimates divide optimal values of
//! order 1e-6 by the step size, which amplifies any solver error a
//! million-fold.

mod simplex;
mod standard;

use std::fmt::Write as _;

use crate::numeric;
use crate::scalar::Scalar;

pub use simplex::constraint_violations;

/// Optimization direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Maximize,
    Minimize,
}

/// Row relation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    LessEq,
    Equal,
    GreaterEq,
}

/// Per-variable domain.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarDomain {
    NonNegative,
    Free,
}

/// One constraint row `coeffs . x (<=|=|>=) rhs`.
#[derive(Debug, Clone)]
pub struct Row<S: Scalar = f64> {
    pub coeffs: Vec<S>,
    pub relation: Relation,
    pub rhs: S,
}

/// A dense LP instance.
#[derive(Debug, Clone)]
pub struct LinearProgram<S: Scalar = f64> {
    pub sense: Sense,
    pub cost: Vec<S>,
    pub rows: Vec<Row<S>>,
    pub domains: Vec<VarDomain>,
}

/// Solver failure distinct from an infeasible or unbounded instance.
#[derive(Debug, Clone, thiserror::Error)]
pub enum LpError {
    /// The instance itself is malformed (dimension mismatch, NaN, empty).
    #[error("malformed linear program: {0}")]
    Invalid(String),
    /// The pivot loop hit its iteration cap.
    #[error("simplex iteration limit exceeded")]
    IterationLimit,
    /// The arithmetic broke down (singular basis, persistent disagreement).
    #[error("numerical failure in simplex: {0}")]
    Numerical(String),
}

/// Status of a solved instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

/// Result of [`solve`] / [`solve_lexicographic`].
///
/// `objective`, `primal` and `duals` are meaningful only when `status` is
/// [`LpStatus::Optimal`]; otherwise the vectors are empty and the objective is
/// NaN. Duals are reported against the original rows, so that
/// `sum(duals[k] * rows[k].rhs) == objective` at an optimum.
#[derive(Debug, Clone)]
pub struct LpSolution<S: Scalar = f64> {
    pub status: LpStatus,
    pub objective: S,
    /// Second-stage objective, set by [`solve_lexicographic`].
    pub secondary_objective: Option<S>,
    pub primal: Vec<S>,
    pub duals: Vec<S>,
    pub iterations: usize,
}

impl<S: Scalar> LpSolution<S> {
    pub fn is_optimal(&self) -> bool {
        self.status == LpStatus::Optimal
    }

    /// Dual objective `sum(duals . rhs)`; equals the primal objective at an
    /// optimum up to the duality-gap tolerance.
    pub fn dual_objective(&self, lp: &LinearProgram<S>) -> S {
        let rhs: Vec<S> = lp.rows.iter().map(|r| r.rhs).collect();
        numeric::dot(&self.duals, &rhs)
    }

    fn non_optimal(status: LpStatus, iterations: usize) -> Self {
        Self {
            status,
            objective: S::nan(),
            secondary_objective: None,
            primal: Vec::new(),
            duals: Vec::new(),
            iterations,
        }
    }
}

impl<S: Scalar> LinearProgram<S> {
    /// New program with the given cost vector and per-variable domains.
    pub fn new(sense: Sense, cost: Vec<S>, domains: Vec<VarDomain>) -> Self {
        Self {
            sense,
            cost,
            rows: Vec::new(),
            domains,
        }
    }

    /// All-nonnegative convenience constructor.
    pub fn with_nonnegative_vars(sense: Sense, cost: Vec<S>) -> Self {
        let n = cost.len();
        Self::new(sense, cost, vec![VarDomain::NonNegative; n])
    }

    pub fn num_vars(&self) -> usize {
        self.cost.len()
    }

    pub fn push_row(&mut self, coeffs: Vec<S>, relation: Relation, rhs: S) {
        self.rows.push(Row {
            coeffs,
            relation,
            rhs,
        });
    }

    /// Check the structural invariants: consistent dimensions, at least one
    /// variable and one row, finite data.
    pub fn validate(&self) -> Result<(), LpError> {
        let n = self.num_vars();
        if n == 0 {
            return Err(LpError::Invalid("no variables".into()));
        }
        if self.rows.is_empty() {
            return Err(LpError::Invalid("no rows".into()));
        }
        if self.domains.len() != n {
            return Err(LpError::Invalid(format!(
                "domain count {} does not match variable count {}",
                self.domains.len(),
                n
            )));
        }
        if self.cost.iter().any(|c| !c.is_finite()) {
            return Err(LpError::Invalid("non-finite cost coefficient".into()));
        }
        for (k, row) in self.rows.iter().enumerate() {
            if row.coeffs.len() != n {
                return Err(LpError::Invalid(format!(
                    "row {} has {} coefficients, expected {}",
                    k,
                    row.coeffs.len(),
                    n
                )));
            }
            if row.coeffs.iter().any(|c| !c.is_finite()) || !row.rhs.is_finite() {
                return Err(LpError::Invalid(format!("non-finite value in row {k}")));
            }
        }
        Ok(())
    }

    /// Plain-text dump of the instance (sense, costs, rows, domains), for bug
    /// reports and trace logs.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{}",
            match self.sense {
                Sense::Maximize => "maximize",
                Sense::Minimize => "minimize",
            }
        );
        let _ = write!(out, "cost:");
        for c in &self.cost {
            let _ = write!(out, " {c}");
        }
        let _ = writeln!(out);
        for row in &self.rows {
            let _ = write!(out, "row:");
            for c in &row.coeffs {
                let _ = write!(out, " {c}");
            }
            let rel = match row.relation {
                Relation::LessEq => "<=",
                Relation::Equal => "=",
                Relation::GreaterEq => ">=",
            };
            let _ = writeln!(out, " {} {}", rel, row.rhs);
        }
        let _ = write!(out, "domains:");
        for d in &self.domains {
            let _ = write!(
                out,
                " {}",
                match d {
                    VarDomain::NonNegative => "nonneg",
                    VarDomain::Free => "free",
                }
            );
        }
        let _ = writeln!(out);
        out
    }
}

/// Solve an LP. Returns an input error for malformed instances; `Infeasible`
/// and `Unbounded` are reported through [`LpSolution::status`].
pub fn solve<S: Scalar>(lp: &LinearProgram<S>) -> Result<LpSolution<S>, LpError> {
    lp.validate()?;
    if log::log_enabled!(log::Level::Trace) {
        log::trace!("solving LP:\n{}", lp.dump());
    }
    let std = standard::standardize(lp);
    let cost = standard::map_cost(&std, &lp.cost, lp.sense);
    match simplex::solve_from_scratch(&std, &cost)? {
        simplex::StdOutcome::Infeasible { iterations } => {
            Ok(LpSolution::non_optimal(LpStatus::Infeasible, iterations))
        }
        simplex::StdOutcome::Unbounded { iterations } => {
            Ok(LpSolution::non_optimal(LpStatus::Unbounded, iterations))
        }
        simplex::StdOutcome::Optimal(sol) => Ok(map_back(lp, &std, &sol, None)),
    }
}

/// Two-stage lexicographic solve: optimize `lp.cost`, then optimize
/// `secondary_cost` (same sense) over the primary-optimal face.
///
/// This realizes non-Archimedean composite objectives exactly instead of
/// through a literal small epsilon. The second stage restricts entering
/// columns to those with zero first-stage reduced cost, which is precisely
/// the primary-optimal face by complementary slackness. The reported
/// `objective` is the primary optimum; the second-stage value is in
/// `secondary_objective`.
pub fn solve_lexicographic<S: Scalar>(
    lp: &LinearProgram<S>,
    secondary_cost: &[S],
) -> Result<LpSolution<S>, LpError> {
    lp.validate()?;
    if secondary_cost.len() != lp.num_vars() {
        return Err(LpError::Invalid(format!(
            "secondary cost has {} entries, expected {}",
            secondary_cost.len(),
            lp.num_vars()
        )));
    }
    if secondary_cost.iter().any(|c| !c.is_finite()) {
        return Err(LpError::Invalid(
            "non-finite secondary cost coefficient".into(),
        ));
    }
    let std = standard::standardize(lp);
    let cost1 = standard::map_cost(&std, &lp.cost, lp.sense);
    let sol1 = match simplex::solve_from_scratch(&std, &cost1)? {
        simplex::StdOutcome::Infeasible { iterations } => {
            return Ok(LpSolution::non_optimal(LpStatus::Infeasible, iterations))
        }
        simplex::StdOutcome::Unbounded { iterations } => {
            return Ok(LpSolution::non_optimal(LpStatus::Unbounded, iterations))
        }
        simplex::StdOutcome::Optimal(sol) => sol,
    };

    // Columns strictly priced out at stage one must stay at zero on the
    // optimal face; banning them from entering pins the primary objective.
    let price_tol = simplex::price_tolerance(&cost1);
    let mut banned = vec![false; std.cols.len()];
    for j in 0..std.cols.len() {
        banned[j] = std.artificial[j] || sol1.reduced_costs[j] < -price_tol;
    }
    let cost2 = standard::map_cost(&std, secondary_cost, lp.sense);
    let stage1_iters = sol1.iterations;
    match simplex::optimize_from_basis(&std, &cost2, sol1.basis.clone(), banned)? {
        simplex::StdOutcome::Infeasible { .. } => Err(LpError::Numerical(
            "second lexicographic stage lost feasibility".into(),
        )),
        simplex::StdOutcome::Unbounded { iterations } => Ok(LpSolution::non_optimal(
            LpStatus::Unbounded,
            stage1_iters + iterations,
        )),
        simplex::StdOutcome::Optimal(mut sol2) => {
            sol2.iterations += stage1_iters;
            // Report the primary objective at the final vertex.
            let primary = numeric::dot(&cost1, &sol2.x);
            let secondary = sol2.objective;
            let mut out = map_back(lp, &std, &sol2, Some(primary));
            out.secondary_objective = Some(match lp.sense {
                Sense::Maximize => secondary,
                Sense::Minimize => -secondary,
            });
            Ok(out)
        }
    }
}

fn map_back<S: Scalar>(
    lp: &LinearProgram<S>,
    std: &standard::StdForm<S>,
    sol: &simplex::StdSolution<S>,
    objective_override: Option<S>,
) -> LpSolution<S> {
    let mut primal = vec![S::zero(); lp.num_vars()];
    for (j, kind) in std.kind.iter().enumerate() {
        match *kind {
            standard::ColKind::Plus(v) => primal[v] += sol.x[j],
            standard::ColKind::Minus(v) => primal[v] -= sol.x[j],
            _ => {}
        }
    }
    let sense_sign = match lp.sense {
        Sense::Maximize => S::one(),
        Sense::Minimize => -S::one(),
    };
    let duals = (0..lp.rows.len())
        .map(|k| {
            let flip = if std.flipped[k] { -S::one() } else { S::one() };
            sense_sign * flip * sol.y[k]
        })
        .collect();
    let objective = sense_sign * objective_override.unwrap_or(sol.objective);
    LpSolution {
        status: LpStatus::Optimal,
        objective,
        secondary_objective: None,
        primal,
        duals,
        iterations: sol.iterations,
    }
}
