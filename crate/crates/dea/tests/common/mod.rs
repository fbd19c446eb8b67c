#![allow(clippy::needless_range_loop)]

//! Shared test oracles: brute-force LP enumeration, random instance
//! generators, and direct congestion-definition searches. Everything here is
//! deliberately independent of the solver's internal machinery.

use dea::dataset::Dataset;
use dea::lp::{LinearProgram, Relation, Sense, VarDomain};
use rand::Rng;

pub fn assert_close(actual: f64, expected: f64, tol: f64, what: &str) {
    assert!(
        (actual - expected).abs() <= tol,
        "{what}: got {actual}, expected {expected} (tol {tol})"
    );
}

// ---------------------------------------------------------------------------
// Brute-force LP oracle.
//
// Plan: convert to an equality form with split free variables and slack
// columns (the form is pointed, so vertices exist whenever feasible),
// row-reduce to full row rank (catching inconsistent rows), then enumerate
// every square basis. Feasible basic solutions give the vertex values;
// unboundedness shows up as an improving edge at some feasible basis.
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OracleStatus {
    Optimal(f64),
    Infeasible,
    Unbounded,
}

/// Gaussian elimination with partial pivoting on a dense column-major
/// system; returns None when singular.
fn gauss_solve(cols: &[&[f64]], rhs: &[f64]) -> Option<Vec<f64>> {
    let n = rhs.len();
    let mut a = vec![vec![0.0; n + 1]; n];
    for (j, col) in cols.iter().enumerate() {
        for i in 0..n {
            a[i][j] = col[i];
        }
    }
    for i in 0..n {
        a[i][n] = rhs[i];
    }
    for k in 0..n {
        let mut p = k;
        for i in k + 1..n {
            if a[i][k].abs() > a[p][k].abs() {
                p = i;
            }
        }
        if a[p][k].abs() < 1e-9 {
            return None;
        }
        a.swap(k, p);
        for i in k + 1..n {
            let f = a[i][k] / a[k][k];
            for j in k..=n {
                a[i][j] -= f * a[k][j];
            }
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let mut acc = a[i][n];
        for j in i + 1..n {
            acc -= a[i][j] * x[j];
        }
        x[i] = acc / a[i][i];
    }
    Some(x)
}

/// Advance `subset` to the next r-combination of {0..k}; false when done.
fn next_combination(subset: &mut [usize], k: usize) -> bool {
    let r = subset.len();
    let mut i = r;
    while i > 0 {
        i -= 1;
        if subset[i] != i + k - r {
            subset[i] += 1;
            for t in i + 1..r {
                subset[t] = subset[t - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Reduce rows of [A | b] to full row rank. Returns None when some dependent
/// row is inconsistent (certainly infeasible).
fn row_reduce(rows: Vec<Vec<f64>>, rhs: Vec<f64>) -> Option<(Vec<Vec<f64>>, Vec<f64>)> {
    let k = rows.first().map_or(0, Vec::len);
    let mut aug: Vec<Vec<f64>> = rows
        .into_iter()
        .zip(rhs)
        .map(|(mut row, b)| {
            row.push(b);
            row
        })
        .collect();
    let nrows = aug.len();
    let mut rank = 0;
    for col in 0..k {
        let mut p = rank;
        for i in rank..nrows {
            if aug[i][col].abs() > aug[p][col].abs() {
                p = i;
            }
        }
        if rank >= nrows || aug[p][col].abs() < 1e-9 {
            continue;
        }
        aug.swap(rank, p);
        for i in 0..nrows {
            if i == rank {
                continue;
            }
            let f = aug[i][col] / aug[rank][col];
            if f != 0.0 {
                for j in col..=k {
                    aug[i][j] -= f * aug[rank][j];
                }
            }
        }
        rank += 1;
        if rank == nrows {
            break;
        }
    }
    for row in aug.iter().skip(rank) {
        if row[k].abs() > 1e-7 {
            return None;
        }
    }
    aug.truncate(rank);
    let rhs = aug.iter().map(|row| row[k]).collect();
    let rows = aug
        .into_iter()
        .map(|mut row| {
            row.pop();
            row
        })
        .collect();
    Some((rows, rhs))
}

/// Exhaustive oracle for small LPs.
pub fn oracle_solve(lp: &LinearProgram<f64>) -> OracleStatus {
    let sign = match lp.sense {
        Sense::Maximize => 1.0,
        Sense::Minimize => -1.0,
    };
    // Own standard form: split frees, slack per inequality.
    let mut cols: Vec<Vec<f64>> = Vec::new();
    let mut cost: Vec<f64> = Vec::new();
    for v in 0..lp.num_vars() {
        let col: Vec<f64> = lp.rows.iter().map(|r| r.coeffs[v]).collect();
        cols.push(col.clone());
        cost.push(sign * lp.cost[v]);
        if lp.domains[v] == VarDomain::Free {
            cols.push(col.iter().map(|c| -c).collect());
            cost.push(-sign * lp.cost[v]);
        }
    }
    for (k, row) in lp.rows.iter().enumerate() {
        let unit = match row.relation {
            Relation::LessEq => 1.0,
            Relation::GreaterEq => -1.0,
            Relation::Equal => continue,
        };
        let mut col = vec![0.0; lp.rows.len()];
        col[k] = unit;
        cols.push(col);
        cost.push(0.0);
    }
    let rhs: Vec<f64> = lp.rows.iter().map(|r| r.rhs).collect();

    // Row-reduce to full rank (row-major view of the columns).
    let k = cols.len();
    let row_major: Vec<Vec<f64>> = (0..lp.rows.len())
        .map(|i| (0..k).map(|j| cols[j][i]).collect())
        .collect();
    let Some((reduced_rows, reduced_rhs)) = row_reduce(row_major, rhs) else {
        return OracleStatus::Infeasible;
    };
    let nr = reduced_rows.len();
    let cols: Vec<Vec<f64>> = (0..k)
        .map(|j| (0..nr).map(|i| reduced_rows[i][j]).collect())
        .collect();

    if nr == 0 {
        // No binding rows survive: the origin is feasible, and any positive
        // cost direction is unbounded.
        return if cost.iter().any(|&c| c > 1e-9) {
            OracleStatus::Unbounded
        } else {
            OracleStatus::Optimal(sign * 0.0)
        };
    }
    if k < nr {
        // Cannot happen after reduction (rank <= k), kept as a guard.
        return OracleStatus::Infeasible;
    }

    let mut best: Option<f64> = None;
    let mut unbounded = false;
    let mut subset: Vec<usize> = (0..nr).collect();
    loop {
        let basis_cols: Vec<&[f64]> = subset.iter().map(|&j| cols[j].as_slice()).collect();
        if let Some(xb) = gauss_solve(&basis_cols, &reduced_rhs) {
            if xb.iter().all(|&v| v >= -1e-9) {
                let value: f64 = subset.iter().zip(&xb).map(|(&j, &v)| cost[j] * v).sum();
                best = Some(best.map_or(value, |b: f64| b.max(value)));
                if !unbounded {
                    for j in 0..k {
                        if subset.contains(&j) {
                            continue;
                        }
                        if let Some(d) = gauss_solve(&basis_cols, cols[j].as_slice()) {
                            let ray_ok = d.iter().all(|&di| di <= 1e-9);
                            let rc = cost[j]
                                - subset
                                    .iter()
                                    .zip(&d)
                                    .map(|(&bj, &di)| cost[bj] * di)
                                    .sum::<f64>();
                            if ray_ok && rc > 1e-7 {
                                unbounded = true;
                                break;
                            }
                        }
                    }
                }
            }
        }
        if !next_combination(&mut subset, k) {
            break;
        }
    }
    match best {
        None => OracleStatus::Infeasible,
        Some(_) if unbounded => OracleStatus::Unbounded,
        Some(v) => OracleStatus::Optimal(sign * v),
    }
}

// ---------------------------------------------------------------------------
// Random generators (seeded by the callers).
// ---------------------------------------------------------------------------

pub fn random_lp(rng: &mut impl Rng) -> LinearProgram<f64> {
    let nv = rng.gen_range(1..=5);
    let nr = rng.gen_range(1..=5);
    let cost: Vec<f64> = (0..nv).map(|_| rng.gen_range(-4..=4) as f64).collect();
    let domains: Vec<VarDomain> = (0..nv)
        .map(|_| {
            if rng.gen_bool(0.2) {
                VarDomain::Free
            } else {
                VarDomain::NonNegative
            }
        })
        .collect();
    let sense = if rng.gen_bool(0.5) {
        Sense::Maximize
    } else {
        Sense::Minimize
    };
    let mut lp = LinearProgram::new(sense, cost, domains);
    for _ in 0..nr {
        let coeffs: Vec<f64> = (0..nv)
            .map(|_| {
                if rng.gen_bool(0.2) {
                    0.0
                } else {
                    rng.gen_range(-4..=4) as f64
                }
            })
            .collect();
        let relation = match rng.gen_range(0..3) {
            0 => Relation::LessEq,
            1 => Relation::GreaterEq,
            _ => Relation::Equal,
        };
        lp.push_row(coeffs, relation, rng.gen_range(-6..=6) as f64);
    }
    lp
}

/// Random production dataset with strictly positive entries.
pub fn random_dataset(rng: &mut impl Rng, n: usize, m: usize, s: usize) -> Dataset<f64> {
    let inputs: Vec<Vec<f64>> = (0..m)
        .map(|_| (0..n).map(|_| rng.gen_range(0.5..10.0)).collect())
        .collect();
    let outputs: Vec<Vec<f64>> = (0..s)
        .map(|_| (0..n).map(|_| rng.gen_range(0.5..10.0)).collect())
        .collect();
    Dataset::from_matrices(inputs, outputs).unwrap()
}

// ---------------------------------------------------------------------------
// Direct congestion-definition searches (independent routes used to
// cross-check the classifier and the directional verdicts).
// ---------------------------------------------------------------------------

/// Proportional (strong) congestion search: the best proportional output
/// level reachable with proportionally scaled-down inputs. The unit is
/// strongly congested iff the optimum exceeds one.
pub fn proportional_congestion_gain(d: &Dataset<f64>, dmu: usize) -> f64 {
    let n = d.len();
    let m = d.num_inputs();
    let s = d.num_outputs();
    // Variables: intensities, alpha, beta.
    let nv = n + 2;
    let mut cost = vec![0.0; nv];
    cost[n + 1] = 1.0;
    let mut domains = vec![VarDomain::NonNegative; nv];
    domains[n + 1] = VarDomain::Free;
    let mut lp = LinearProgram::new(Sense::Maximize, cost, domains);
    for i in 0..m {
        let mut coeffs = vec![0.0; nv];
        for j in 0..n {
            coeffs[j] = d.input(i, j);
        }
        coeffs[n] = -d.input(i, dmu);
        lp.push_row(coeffs, Relation::Equal, 0.0);
    }
    for r in 0..s {
        let mut coeffs = vec![0.0; nv];
        for j in 0..n {
            coeffs[j] = d.output(r, j);
        }
        coeffs[n + 1] = -d.output(r, dmu);
        lp.push_row(coeffs, Relation::GreaterEq, 0.0);
    }
    let mut conv = vec![0.0; nv];
    for c in conv.iter_mut().take(n) {
        *c = 1.0;
    }
    lp.push_row(conv, Relation::Equal, 1.0);
    let mut cap = vec![0.0; nv];
    cap[n] = 1.0;
    lp.push_row(cap, Relation::LessEq, 1.0);
    let sol = dea::lp::solve(&lp).unwrap();
    assert!(sol.is_optimal(), "proportional search must be solvable");
    sol.objective
}

/// Definition-3 witness: largest `t` such that some activity removes at
/// least `t` total input while adding at least `t` total output. Positive
/// means weakly congested.
pub fn weak_congestion_witness(d: &Dataset<f64>, dmu: usize) -> f64 {
    let n = d.len();
    let m = d.num_inputs();
    let s = d.num_outputs();
    // Variables: intensities, input reductions, output additions, t.
    let nv = n + m + s + 1;
    let mut cost = vec![0.0; nv];
    cost[nv - 1] = 1.0;
    let mut lp = LinearProgram::with_nonnegative_vars(Sense::Maximize, cost);
    for i in 0..m {
        let mut coeffs = vec![0.0; nv];
        for j in 0..n {
            coeffs[j] = d.input(i, j);
        }
        coeffs[n + i] = 1.0;
        lp.push_row(coeffs, Relation::Equal, d.input(i, dmu));
    }
    for r in 0..s {
        let mut coeffs = vec![0.0; nv];
        for j in 0..n {
            coeffs[j] = d.output(r, j);
        }
        coeffs[n + m + r] = -1.0;
        lp.push_row(coeffs, Relation::GreaterEq, d.output(r, dmu));
    }
    let mut conv = vec![0.0; nv];
    for c in conv.iter_mut().take(n) {
        *c = 1.0;
    }
    lp.push_row(conv, Relation::Equal, 1.0);
    let mut a_floor = vec![0.0; nv];
    for i in 0..m {
        a_floor[n + i] = 1.0;
    }
    a_floor[nv - 1] = -1.0;
    lp.push_row(a_floor, Relation::GreaterEq, 0.0);
    let mut b_floor = vec![0.0; nv];
    for r in 0..s {
        b_floor[n + m + r] = 1.0;
    }
    b_floor[nv - 1] = -1.0;
    lp.push_row(b_floor, Relation::GreaterEq, 0.0);
    let sol = dea::lp::solve(&lp).unwrap();
    assert!(sol.is_optimal(), "witness search must be solvable");
    sol.objective
}
