//! Classical congestion measurement: output-oriented BCC efficiency, the
//! weak-disposability ratio, slack-based input congestion amounts, the
//! equality-input technical efficiency, and the strong/weak congestion
//! classifier built on them.

use crate::dataset::Dataset;
use crate::directional;
use crate::lp::{solve, solve_lexicographic, LinearProgram, LpStatus, Relation, Sense, VarDomain};
use crate::scalar::{Scalar, Tolerances};
use crate::DeaError;

/// Output-oriented BCC result under strong disposability with convexity.
#[derive(Debug, Clone)]
pub struct BccResult<S: Scalar = f64> {
    /// Radial output expansion factor, >= 1.
    pub theta_star: S,
    /// Stage-two maximal input slacks, one per input.
    pub input_slacks: Vec<S>,
    /// Stage-two maximal output slacks, one per output.
    pub output_slacks: Vec<S>,
    /// Intensity weights over the units (sum to one).
    pub intensity: Vec<S>,
}

/// Weak-disposability congestion measure: the optimum of the proportional
/// weak-disposal program and its ratio to the BCC expansion factor.
#[derive(Debug, Clone, Copy)]
pub struct FglResult<S: Scalar = f64> {
    pub beta_star: S,
    /// `beta*/theta*`; one means no congestion detected by this route.
    pub ratio: S,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CongestionClass {
    None,
    Weak,
    Strong,
}

impl std::fmt::Display for CongestionClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            CongestionClass::None => "No",
            CongestionClass::Weak => "Weak",
            CongestionClass::Strong => "Strong",
        })
    }
}

/// Per-unit congestion summary.
#[derive(Debug, Clone)]
pub struct CongestionReport<S: Scalar = f64> {
    pub dmu: usize,
    /// BCC expansion factor (strong disposability).
    pub theta_star: S,
    /// Technical-efficiency expansion factor (equality inputs).
    pub pi_star: S,
    /// Congestion degree `pi*/theta*`, in (0, 1].
    pub phi: S,
    pub congested: bool,
    pub classification: CongestionClass,
    /// `1 + omega-bar` from the strong/weak separation program; set when
    /// congested. `+inf` when that program is unbounded.
    pub rho_bar: Option<S>,
    /// Weak-disposability measure, on request.
    pub fgl: Option<FglResult<S>>,
    /// Per-input congestion amounts, on request.
    pub ctt: Option<Vec<S>>,
}

/// Output-oriented BCC efficiency: maximize the radial output expansion
/// under input/output slacks and convexity, then maximize the total slack at
/// the optimal expansion (the two-stage reading of the non-Archimedean
/// objective).
pub fn bcc_output<S: Scalar>(
    d: &Dataset<S>,
    dmu: usize,
    _tol: &Tolerances<S>,
) -> Result<BccResult<S>, DeaError> {
    d.check_unit(dmu)?;
    let n = d.len();
    let m = d.num_inputs();
    let s = d.num_outputs();
    // Variables: intensities, theta, input slacks, output slacks.
    let nv = n + 1 + m + s;
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
        coeffs[n + 1 + i] = S::one();
        lp.push_row(coeffs, Relation::Equal, d.input(i, dmu));
    }
    for r in 0..s {
        let mut coeffs = vec![S::zero(); nv];
        for j in 0..n {
            coeffs[j] = d.output(r, j);
        }
        coeffs[n] = -d.output(r, dmu);
        coeffs[n + 1 + m + r] = -S::one();
        lp.push_row(coeffs, Relation::Equal, S::zero());
    }
    let mut convexity = vec![S::zero(); nv];
    for c in convexity.iter_mut().take(n) {
        *c = S::one();
    }
    lp.push_row(convexity, Relation::Equal, S::one());

    let mut slack_cost = vec![S::zero(); nv];
    for c in slack_cost.iter_mut().skip(n + 1) {
        *c = S::one();
    }
    let sol = solve_lexicographic(&lp, &slack_cost)?;
    if sol.status != LpStatus::Optimal {
        return Err(DeaError::Inconsistent(format!(
            "BCC program for unit {} returned {:?} (self-reference should be feasible)",
            d.label(dmu),
            sol.status
        )));
    }
    Ok(BccResult {
        theta_star: sol.primal[n],
        input_slacks: sol.primal[n + 1..n + 1 + m].to_vec(),
        output_slacks: sol.primal[n + 1 + m..].to_vec(),
        intensity: sol.primal[..n].to_vec(),
    })
}

/// Weak-disposability congestion measure: all inputs scaled by a common
/// factor in [0, 1], outputs expanded proportionally. With a single input
/// this coincides with the BCC program, so the ratio is one.
pub fn fgl_congestion<S: Scalar>(
    d: &Dataset<S>,
    dmu: usize,
    tol: &Tolerances<S>,
) -> Result<FglResult<S>, DeaError> {
    d.check_unit(dmu)?;
    let theta = bcc_output(d, dmu, tol)?.theta_star;
    let n = d.len();
    let m = d.num_inputs();
    let s = d.num_outputs();
    // Variables: intensities, beta, the common input scaling.
    let nv = n + 2;
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
        coeffs[n + 1] = -d.input(i, dmu);
        lp.push_row(coeffs, Relation::Equal, S::zero());
    }
    for r in 0..s {
        let mut coeffs = vec![S::zero(); nv];
        for j in 0..n {
            coeffs[j] = d.output(r, j);
        }
        coeffs[n] = -d.output(r, dmu);
        lp.push_row(coeffs, Relation::GreaterEq, S::zero());
    }
    let mut convexity = vec![S::zero(); nv];
    for c in convexity.iter_mut().take(n) {
        *c = S::one();
    }
    lp.push_row(convexity, Relation::Equal, S::one());
    let mut scaling_cap = vec![S::zero(); nv];
    scaling_cap[n + 1] = S::one();
    lp.push_row(scaling_cap, Relation::LessEq, S::one());

    let sol = solve(&lp)?;
    if sol.status != LpStatus::Optimal {
        return Err(DeaError::Inconsistent(format!(
            "weak-disposal program for unit {} returned {:?}",
            d.label(dmu),
            sol.status
        )));
    }
    Ok(FglResult {
        beta_star: sol.objective,
        ratio: sol.objective / theta,
    })
}

/// Slack-based per-input congestion amounts: project the unit with the BCC
/// optimum, then subtract from each stage-one input slack the largest part
/// that could still be removed while staying on the frontier. Units sharing
/// the input measurement scale is assumed; the amounts are in input units.
pub fn ctt_congestion<S: Scalar>(
    d: &Dataset<S>,
    dmu: usize,
    tol: &Tolerances<S>,
) -> Result<Vec<S>, DeaError> {
    d.check_unit(dmu)?;
    let bcc = bcc_output(d, dmu, tol)?;
    let n = d.len();
    let m = d.num_inputs();
    let s = d.num_outputs();
    let projected_in: Vec<S> = (0..m)
        .map(|i| d.input(i, dmu) - bcc.input_slacks[i])
        .collect();
    let projected_out: Vec<S> = (0..s)
        .map(|r| bcc.theta_star * d.output(r, dmu) + bcc.output_slacks[r])
        .collect();

    // Variables: intensities, removable input amounts.
    let nv = n + m;
    let mut cost = vec![S::zero(); nv];
    for i in 0..m {
        cost[n + i] = S::one();
    }
    let mut lp = LinearProgram::with_nonnegative_vars(Sense::Maximize, cost);
    for i in 0..m {
        let mut coeffs = vec![S::zero(); nv];
        for j in 0..n {
            coeffs[j] = d.input(i, j);
        }
        coeffs[n + i] = -S::one();
        lp.push_row(coeffs, Relation::Equal, projected_in[i]);
    }
    for r in 0..s {
        let mut coeffs = vec![S::zero(); nv];
        for j in 0..n {
            coeffs[j] = d.output(r, j);
        }
        lp.push_row(coeffs, Relation::Equal, projected_out[r]);
    }
    let mut convexity = vec![S::zero(); nv];
    for c in convexity.iter_mut().take(n) {
        *c = S::one();
    }
    lp.push_row(convexity, Relation::Equal, S::one());
    for i in 0..m {
        let mut cap = vec![S::zero(); nv];
        cap[n + i] = S::one();
        lp.push_row(cap, Relation::LessEq, bcc.input_slacks[i]);
    }

    let sol = solve(&lp)?;
    if sol.status != LpStatus::Optimal {
        return Err(DeaError::Inconsistent(format!(
            "input-congestion program for unit {} returned {:?}",
            d.label(dmu),
            sol.status
        )));
    }
    Ok((0..m)
        .map(|i| {
            let amount = bcc.input_slacks[i] - sol.primal[n + i];
            if amount < S::zero() {
                S::zero()
            } else {
                amount
            }
        })
        .collect())
}

/// Pure technical efficiency over the equality-input technology: the radial
/// output expansion with inputs matched exactly. Always between one and the
/// BCC expansion factor.
pub fn wyts_pte<S: Scalar>(
    d: &Dataset<S>,
    dmu: usize,
    _tol: &Tolerances<S>,
) -> Result<S, DeaError> {
    d.check_unit(dmu)?;
    let n = d.len();
    let m = d.num_inputs();
    let s = d.num_outputs();
    // Variables: intensities, pi.
    let nv = n + 1;
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
        lp.push_row(coeffs, Relation::GreaterEq, S::zero());
    }
    let mut convexity = vec![S::zero(); nv];
    for c in convexity.iter_mut().take(n) {
        *c = S::one();
    }
    lp.push_row(convexity, Relation::Equal, S::one());
    let sol = solve(&lp)?;
    if sol.status != LpStatus::Optimal {
        return Err(DeaError::Inconsistent(format!(
            "technical-efficiency program for unit {} returned {:?}",
            d.label(dmu),
            sol.status
        )));
    }
    Ok(sol.objective)
}

/// The strong/weak separation value `1 + omega-bar`: maximize the offset of
/// a supporting hyperplane through the (projected) unit, with the output
/// multipliers normalized at that unit. Negative means strong congestion.
/// `+inf` when the program is unbounded.
fn separation_rho_bar<S: Scalar>(d: &Dataset<S>, dmu: usize) -> Result<S, DeaError> {
    let n = d.len();
    let m = d.num_inputs();
    let s = d.num_outputs();
    // Variables: output multipliers, input multipliers, offset.
    let nv = s + m + 1;
    let mut cost = vec![S::zero(); nv];
    cost[s + m] = S::one();
    let mut domains = vec![VarDomain::Free; nv];
    for dom in domains.iter_mut().take(s) {
        *dom = VarDomain::NonNegative;
    }
    let mut lp = LinearProgram::new(Sense::Maximize, cost, domains);
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
    let mut through = vec![S::zero(); nv];
    for r in 0..s {
        through[r] = d.output(r, dmu);
    }
    for i in 0..m {
        through[s + i] = -d.input(i, dmu);
    }
    through[s + m] = S::one();
    lp.push_row(through, Relation::Equal, S::zero());
    let mut norm = vec![S::zero(); nv];
    for r in 0..s {
        norm[r] = d.output(r, dmu);
    }
    lp.push_row(norm, Relation::Equal, S::one());

    let sol = solve(&lp)?;
    match sol.status {
        LpStatus::Optimal => Ok(S::one() + sol.objective),
        LpStatus::Unbounded => Ok(S::infinity()),
        LpStatus::Infeasible => Err(DeaError::Inconsistent(
            "strong/weak separation program infeasible at a frontier point".into(),
        )),
    }
}

/// Classify a unit's congestion status.
///
/// The unit is congested iff the degree `pi*/theta*` falls below one.
/// Congested units are then separated into strong and weak congestion by the
/// sign of `1 + omega-bar`, evaluated at the unit's strong-frontier
/// projection. The weak-disposability and slack-based measures are optional
/// report fields filled by the callers that want them.
pub fn classify_congestion<S: Scalar>(
    d: &Dataset<S>,
    dmu: usize,
    tol: &Tolerances<S>,
) -> Result<CongestionReport<S>, DeaError> {
    d.check_unit(dmu)?;
    let bcc = bcc_output(d, dmu, tol)?;
    let pi_star = wyts_pte(d, dmu, tol)?;
    let phi = pi_star / bcc.theta_star;
    let congested = phi < S::one() - tol.classification;
    let (classification, rho_bar) = if congested {
        let proj = directional::project(d, dmu, tol)?;
        let rho = separation_rho_bar(&proj.dataset, dmu)?;
        let class = if rho < -tol.classification {
            CongestionClass::Strong
        } else {
            CongestionClass::Weak
        };
        (class, Some(rho))
    } else {
        (CongestionClass::None, None)
    };
    Ok(CongestionReport {
        dmu,
        theta_star: bcc.theta_star,
        pi_star,
        phi,
        congested,
        classification,
        rho_bar,
        fgl: None,
        ctt: None,
    })
}
