//! The pivot engine: a dense revised simplex that refactorizes every
//! iteration.
//!
//! The step-validation programs downstream contain rows that differ only at
//! the 1e-6 scale, so an updated tableau drifts by more than its own pivot
//! tolerance within a handful of pivots. At these problem sizes (tens of
//! rows) refactorizing is cheap, so every pricing and ratio decision is made
//! from fresh LU solves with compensated refinement instead of accumulated
//! updates. Entering columns use Dantzig pricing with lowest-index
//! tie-breaking, switching permanently to Bland's rule after a stall; the
//! leaving row uses a two-pass tolerance test that prefers large pivot
//! elements. Pivot eligibility is relative to the column scale, which keeps
//! near-dependent columns out of the basis.

use super::standard::StdForm;
use super::{LinearProgram, LpError, Relation, VarDomain};
use crate::numeric::{self, Lu};
use crate::scalar::Scalar;

const ITERATION_CAP: usize = 20_000;
const STALL_LIMIT: usize = 64;
const REFINE_ITERS: usize = 2;

pub(crate) enum StdOutcome<S: Scalar> {
    Optimal(StdSolution<S>),
    Infeasible { iterations: usize },
    Unbounded { iterations: usize },
}

/// Optimal point of the standard-form program.
pub(crate) struct StdSolution<S: Scalar> {
    /// Full standard-form primal vector (zeros on nonbasic columns).
    pub x: Vec<S>,
    /// Row duals of the standard form (internal max orientation).
    pub y: Vec<S>,
    pub basis: Vec<usize>,
    pub objective: S,
    /// Reduced cost per column (zero on basic columns).
    pub reduced_costs: Vec<S>,
    pub iterations: usize,
}

/// Threshold below which a reduced cost counts as non-improving.
pub(crate) fn price_tolerance<S: Scalar>(cost: &[S]) -> S {
    let scale = cost.iter().fold(
        S::zero(),
        |acc, c| if c.abs() > acc { c.abs() } else { acc },
    );
    S::FEASIBILITY_TOL * S::cast(0.1) * (S::one() + scale)
}

/// Solve from the natural slack/artificial starting basis (phase one if
/// artificials are present, then phase two).
pub(crate) fn solve_from_scratch<S: Scalar>(
    std: &StdForm<S>,
    cost: &[S],
) -> Result<StdOutcome<S>, LpError> {
    let mut iterations = 0usize;
    let mut basis = std.initial_basis.clone();
    let mut banned = vec![false; std.cols.len()];

    if std.has_artificial {
        let phase1_cost: Vec<S> = std
            .artificial
            .iter()
            .map(|&a| if a { -S::one() } else { S::zero() })
            .collect();
        let sol = match run_phase(std, &phase1_cost, basis, banned.clone(), true)? {
            StdOutcome::Optimal(sol) => sol,
            // Phase one is bounded (objective <= 0) and feasible by
            // construction, so neither branch can occur.
            _ => return Err(LpError::Numerical("phase one did not terminate".into())),
        };
        iterations += sol.iterations;
        let bscale = b_scale(std);
        if sol.objective < -S::FEASIBILITY_TOL * bscale {
            log::debug!("phase one optimum {} -> infeasible", sol.objective);
            return Ok(StdOutcome::Infeasible { iterations });
        }
        basis = drive_out_artificials(std, sol.basis)?;
        for (j, &a) in std.artificial.iter().enumerate() {
            banned[j] = a;
        }
    }

    match run_phase(std, cost, basis, banned, false)? {
        StdOutcome::Optimal(mut sol) => {
            sol.iterations += iterations;
            Ok(StdOutcome::Optimal(sol))
        }
        StdOutcome::Unbounded { iterations: it } => Ok(StdOutcome::Unbounded {
            iterations: iterations + it,
        }),
        StdOutcome::Infeasible { iterations: it } => Ok(StdOutcome::Infeasible {
            iterations: iterations + it,
        }),
    }
}

/// Re-optimize a different objective starting from a feasible basis,
/// with extra columns banned from entering (lexicographic second stage).
pub(crate) fn optimize_from_basis<S: Scalar>(
    std: &StdForm<S>,
    cost: &[S],
    basis: Vec<usize>,
    banned: Vec<bool>,
) -> Result<StdOutcome<S>, LpError> {
    run_phase(std, cost, basis, banned, false)
}

fn b_scale<S: Scalar>(std: &StdForm<S>) -> S {
    std.b
        .iter()
        .fold(S::one(), |acc, v| if v.abs() > acc { v.abs() } else { acc })
}

/// Fresh per-iteration view of the current basis.
struct Factored<S: Scalar> {
    lu: Lu<S>,
    xb: Vec<S>,
    y: Vec<S>,
    objective: S,
}

fn factorize<S: Scalar>(
    std: &StdForm<S>,
    cost: &[S],
    basis: &[usize],
    refine: usize,
) -> Result<Factored<S>, LpError> {
    let cols: Vec<&[S]> = basis.iter().map(|&j| std.cols[j].as_slice()).collect();
    let lu = Lu::factor(&cols).map_err(|_| LpError::Numerical("singular basis".into()))?;
    let xb = lu.solve_refined(&cols, &std.b, refine);
    let cb: Vec<S> = basis.iter().map(|&j| cost[j]).collect();
    let y = lu.solve_transposed_refined(&cols, &cb, refine);
    let objective = numeric::dot(&cb, &xb);
    Ok(Factored {
        lu,
        xb,
        y,
        objective,
    })
}

/// One simplex phase. Every iteration refactorizes the basis and recomputes
/// the data it prices on.
fn run_phase<S: Scalar>(
    std: &StdForm<S>,
    cost: &[S],
    mut basis: Vec<usize>,
    banned: Vec<bool>,
    phase_one: bool,
) -> Result<StdOutcome<S>, LpError> {
    let nrows = std.nrows;
    let ncols = std.cols.len();
    let price_tol = price_tolerance(cost);
    // Tie-grouping slack for the ratio test: a few hundred ulps of the
    // right-hand-side scale.
    let ratio_relax = S::epsilon() * S::cast(1024.0) * b_scale(std);
    // Basic values may drift a touch negative when a row's direction entry
    // falls below the pivot eligibility cutoff; repair only infeasibilities
    // that matter against the feasibility contract.
    let repair_gate = S::FEASIBILITY_TOL * S::cast(0.1) * b_scale(std);

    let mut iterations = 0usize;
    let mut bland = false;
    let mut stall = 0usize;
    let mut best = S::neg_infinity();
    let mut is_basic = vec![false; ncols];

    loop {
        let fac = factorize(std, cost, &basis, 1)?;
        for flag in is_basic.iter_mut() {
            *flag = false;
        }
        for &j in &basis {
            is_basic[j] = true;
        }

        // Repair step: a genuinely negative basic value (possible after the
        // phase transition or a degenerate exchange) leaves by a dual pivot.
        let worst_row = (0..nrows)
            .filter(|&i| fac.xb[i] < -repair_gate)
            .min_by(|&a, &b| fac.xb[a].partial_cmp(&fac.xb[b]).unwrap());
        if let Some(row) = worst_row {
            let entering = dual_entering(std, cost, &fac, &basis, &banned, &is_basic, row)?;
            log::trace!(
                "dual step: row {row} (value {}) leaves, column {entering} enters",
                fac.xb[row]
            );
            basis[row] = entering;
            iterations += 1;
            if iterations > ITERATION_CAP {
                return Err(LpError::IterationLimit);
            }
            continue;
        }

        // Pricing.
        let mut enter: Option<usize> = None;
        let mut enter_rc = S::zero();
        for j in 0..ncols {
            if banned[j] || is_basic[j] {
                continue;
            }
            let rc = cost[j] - numeric::dot(&std.cols[j], &fac.y);
            if rc <= price_tol {
                continue;
            }
            if bland {
                enter = Some(j);
                enter_rc = rc;
                break;
            }
            if enter.is_none() || rc > enter_rc {
                enter = Some(j);
                enter_rc = rc;
            }
        }
        let Some(enter) = enter else {
            let mut sol = recover(std, cost, &basis, iterations)?;
            sol.iterations = iterations;
            return Ok(StdOutcome::Optimal(sol));
        };

        // Direction and ratio test.
        let cols: Vec<&[S]> = basis.iter().map(|&j| std.cols[j].as_slice()).collect();
        let d = fac.lu.solve_refined(&cols, &std.cols[enter], 1);
        let Some(leave) = ratio_test(&fac.xb, &d, &basis, ratio_relax, bland) else {
            if phase_one {
                // The phase-one objective is bounded by zero, so a ray here
                // is an artifact of a tiny-entry column; if the artificials
                // already sit at zero the phase is done.
                if fac.objective >= -S::FEASIBILITY_TOL * b_scale(std) {
                    let mut sol = recover(std, cost, &basis, iterations)?;
                    sol.iterations = iterations;
                    return Ok(StdOutcome::Optimal(sol));
                }
                return Err(LpError::Numerical(
                    "phase one stalled on a ray artifact".into(),
                ));
            }
            return Ok(StdOutcome::Unbounded { iterations });
        };

        log::trace!(
            "pivot: enter col {enter} (rc {enter_rc}), leave row {leave} (var {})",
            basis[leave]
        );
        basis[leave] = enter;
        iterations += 1;
        if iterations > ITERATION_CAP {
            return Err(LpError::IterationLimit);
        }
        let improve = S::epsilon() * S::cast(64.0) * (S::one() + best.abs());
        if fac.objective > best + improve {
            best = fac.objective;
            stall = 0;
        } else {
            stall += 1;
            if stall > STALL_LIMIT && !bland {
                log::debug!("stalled for {STALL_LIMIT} pivots, switching to Bland's rule");
                bland = true;
            }
        }
    }
}

/// Leaving-row selection on fresh basis data.
///
/// Bland mode is the textbook minimal ratio with ties broken by the lowest
/// basic column index. The default is a two-pass tolerance test: bound the
/// ratio with the basic values relaxed by the feasibility gate, then among
/// rows within the bound take the largest pivot element. Pivot eligibility
/// is relative to the direction's scale so near-dependent columns are never
/// pivoted in.
fn ratio_test<S: Scalar>(
    xb: &[S],
    d: &[S],
    basis: &[usize],
    ratio_relax: S,
    bland: bool,
) -> Option<usize> {
    let dscale = d
        .iter()
        .fold(S::one(), |acc, v| if v.abs() > acc { v.abs() } else { acc });
    let pivot_tol = S::epsilon() * S::cast(1024.0) * dscale;
    let pos = |v: S| if v > S::zero() { v } else { S::zero() };
    if bland {
        let mut pick: Option<(usize, S)> = None;
        for i in 0..xb.len() {
            if d[i] <= pivot_tol {
                continue;
            }
            let ratio = pos(xb[i]) / d[i];
            match pick {
                None => pick = Some((i, ratio)),
                Some((pi, pr)) => {
                    if ratio < pr || (ratio == pr && basis[i] < basis[pi]) {
                        pick = Some((i, ratio));
                    }
                }
            }
        }
        return pick.map(|(i, _)| i);
    }
    let mut bound: Option<S> = None;
    for i in 0..xb.len() {
        if d[i] <= pivot_tol {
            continue;
        }
        let relaxed = (pos(xb[i]) + ratio_relax) / d[i];
        bound = Some(bound.map_or(relaxed, |t: S| t.min(relaxed)));
    }
    let bound = bound?;
    let mut pick: Option<usize> = None;
    for i in 0..xb.len() {
        if d[i] <= pivot_tol || pos(xb[i]) / d[i] > bound {
            continue;
        }
        match pick {
            None => pick = Some(i),
            Some(p) => {
                if d[i] > d[p] || (d[i] == d[p] && basis[i] < basis[p]) {
                    pick = Some(i);
                }
            }
        }
    }
    pick
}

/// Entering column for a dual repair step on `row`: among columns whose
/// direction entry in that row is negative, the one keeping the reduced
/// costs nonpositive (smallest `rc / entry`; ties prefer the larger entry
/// magnitude, then the lower index).
fn dual_entering<S: Scalar>(
    std: &StdForm<S>,
    cost: &[S],
    fac: &Factored<S>,
    basis: &[usize],
    banned: &[bool],
    is_basic: &[bool],
    row: usize,
) -> Result<usize, LpError> {
    // Row of B^-1 A: w = B^-T e_row, entry_j = w . A_j.
    let cols: Vec<&[S]> = basis.iter().map(|&j| std.cols[j].as_slice()).collect();
    let mut unit = vec![S::zero(); basis.len()];
    unit[row] = S::one();
    let w = fac.lu.solve_transposed_refined(&cols, &unit, 1);
    let wscale = w
        .iter()
        .fold(S::one(), |acc, v| if v.abs() > acc { v.abs() } else { acc });
    let mut pick: Option<(usize, S, S)> = None;
    for j in 0..std.cols.len() {
        if banned[j] || is_basic[j] {
            continue;
        }
        let entry = numeric::dot(&w, &std.cols[j]);
        let cscale = std.cols[j]
            .iter()
            .fold(S::one(), |acc, v| if v.abs() > acc { v.abs() } else { acc });
        // The noise floor of `entry` scales with both factors of the dot.
        if entry >= -S::epsilon() * S::cast(1024.0) * wscale * cscale {
            continue;
        }
        let rc = cost[j] - numeric::dot(&std.cols[j], &fac.y);
        let ratio = rc / entry;
        let better = match pick {
            None => true,
            Some((pj, pr, pe)) => {
                ratio < pr || (ratio == pr && (entry.abs() > pe || (entry.abs() == pe && j < pj)))
            }
        };
        if better {
            pick = Some((j, ratio, entry.abs()));
        }
    }
    pick.map(|(j, _, _)| j).ok_or_else(|| {
        LpError::Numerical("no dual pivot available to repair an infeasible basic value".into())
    })
}

/// After phase one, swap any artificial still in the basis for a structural
/// column when its row allows it; a row with no candidate is redundant and
/// keeps its artificial pinned at zero.
fn drive_out_artificials<S: Scalar>(
    std: &StdForm<S>,
    mut basis: Vec<usize>,
) -> Result<Vec<usize>, LpError> {
    if basis.iter().all(|&j| !std.artificial[j]) {
        return Ok(basis);
    }
    for row in 0..std.nrows {
        if !std.artificial[basis[row]] {
            continue;
        }
        let cols: Vec<&[S]> = basis.iter().map(|&j| std.cols[j].as_slice()).collect();
        let lu = Lu::factor(&cols).map_err(|_| LpError::Numerical("singular basis".into()))?;
        let mut unit = vec![S::zero(); basis.len()];
        unit[row] = S::one();
        let w = lu.solve_transposed_refined(&cols, &unit, 1);
        let candidate = (0..std.cols.len()).find(|&j| {
            !std.artificial[j]
                && !basis.contains(&j)
                && numeric::dot(&w, &std.cols[j]).abs() > S::cast(1e-7)
        });
        if let Some(j) = candidate {
            basis[row] = j;
        }
    }
    Ok(basis)
}

/// Refined recovery of the vertex identified by `basis`.
fn recover<S: Scalar>(
    std: &StdForm<S>,
    cost: &[S],
    basis: &[usize],
    iterations: usize,
) -> Result<StdSolution<S>, LpError> {
    let fac = factorize(std, cost, basis, REFINE_ITERS)?;
    let mut x = vec![S::zero(); std.cols.len()];
    for (i, &j) in basis.iter().enumerate() {
        x[j] = fac.xb[i];
    }
    let mut reduced_costs = vec![S::zero(); std.cols.len()];
    for j in 0..std.cols.len() {
        if basis.contains(&j) {
            continue;
        }
        reduced_costs[j] = cost[j] - numeric::dot(&std.cols[j], &fac.y);
    }
    Ok(StdSolution {
        x,
        y: fac.y,
        basis: basis.to_vec(),
        objective: fac.objective,
        reduced_costs,
        iterations,
    })
}

/// Max constraint violation and max domain violation of a point, for checks
/// against the feasibility tolerance.
pub fn constraint_violations<S: Scalar>(lp: &LinearProgram<S>, x: &[S]) -> (S, S) {
    let mut row_violation = S::zero();
    for row in &lp.rows {
        let lhs = numeric::dot(&row.coeffs, x);
        let v = match row.relation {
            Relation::LessEq => lhs - row.rhs,
            Relation::GreaterEq => row.rhs - lhs,
            Relation::Equal => (lhs - row.rhs).abs(),
        };
        if v > row_violation {
            row_violation = v;
        }
    }
    let mut domain_violation = S::zero();
    for (v, d) in x.iter().zip(lp.domains.iter()) {
        if *d == VarDomain::NonNegative && -*v > domain_violation {
            domain_violation = -*v;
        }
    }
    (row_violation, domain_violation)
}
