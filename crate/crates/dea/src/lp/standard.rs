//! Conversion to computational standard form: maximize `c.x` subject to
//! `A x = b`, `x >= 0`, `b >= 0`.
//!
//! Free variables are split into positive and negative parts. Rows with a
//! negative right-hand side are negated first (flipping their relation), then
//! every inequality gains a slack or surplus column and every row that lacks
//! a natural basic column gains an artificial one.

use super::{LinearProgram, Relation, VarDomain};
use crate::scalar::Scalar;

/// What an internal column stands for.
#[derive(Debug, Clone, Copy)]
pub(crate) enum ColKind {
    /// Positive part of original variable `v`.
    Plus(usize),
    /// Negative part of a free original variable `v`.
    Minus(usize),
    /// Slack (+1) or surplus (-1) of a row.
    Slack,
    /// Artificial variable of a row.
    Artificial,
}

pub(crate) struct StdForm<S: Scalar> {
    pub nrows: usize,
    /// Column-major constraint matrix.
    pub cols: Vec<Vec<S>>,
    pub b: Vec<S>,
    pub kind: Vec<ColKind>,
    pub artificial: Vec<bool>,
    /// Rows negated during normalization (for dual sign recovery).
    pub flipped: Vec<bool>,
    /// One basic column per row: slacks where possible, artificials else.
    pub initial_basis: Vec<usize>,
    pub has_artificial: bool,
}

pub(crate) fn standardize<S: Scalar>(lp: &LinearProgram<S>) -> StdForm<S> {
    let nrows = lp.rows.len();
    let nvars = lp.num_vars();

    let mut flipped = vec![false; nrows];
    let mut relations = Vec::with_capacity(nrows);
    let mut b = Vec::with_capacity(nrows);
    for (k, row) in lp.rows.iter().enumerate() {
        if row.rhs < S::zero() {
            flipped[k] = true;
            b.push(-row.rhs);
            relations.push(match row.relation {
                Relation::LessEq => Relation::GreaterEq,
                Relation::GreaterEq => Relation::LessEq,
                Relation::Equal => Relation::Equal,
            });
        } else {
            b.push(row.rhs);
            relations.push(row.relation);
        }
    }

    let row_coeff = |k: usize, v: usize| {
        let c = lp.rows[k].coeffs[v];
        if flipped[k] {
            -c
        } else {
            c
        }
    };

    let mut cols: Vec<Vec<S>> = Vec::new();
    let mut kind: Vec<ColKind> = Vec::new();
    for v in 0..nvars {
        let col: Vec<S> = (0..nrows).map(|k| row_coeff(k, v)).collect();
        if lp.domains[v] == VarDomain::Free {
            kind.push(ColKind::Minus(v));
            cols.push(col.iter().map(|&c| -c).collect());
        }
        kind.push(ColKind::Plus(v));
        cols.push(col);
    }

    let mut initial_basis = vec![usize::MAX; nrows];
    for (k, rel) in relations.iter().enumerate() {
        let unit = match rel {
            Relation::LessEq => S::one(),
            Relation::GreaterEq => -S::one(),
            Relation::Equal => continue,
        };
        let mut col = vec![S::zero(); nrows];
        col[k] = unit;
        kind.push(ColKind::Slack);
        cols.push(col);
        if *rel == Relation::LessEq {
            initial_basis[k] = cols.len() - 1;
        }
    }

    let mut has_artificial = false;
    for k in 0..nrows {
        if initial_basis[k] == usize::MAX {
            let mut col = vec![S::zero(); nrows];
            col[k] = S::one();
            kind.push(ColKind::Artificial);
            cols.push(col);
            initial_basis[k] = cols.len() - 1;
            has_artificial = true;
        }
    }

    let artificial = kind
        .iter()
        .map(|k| matches!(k, ColKind::Artificial))
        .collect();

    StdForm {
        nrows,
        cols,
        b,
        kind,
        artificial,
        flipped,
        initial_basis,
        has_artificial,
    }
}

/// Map an original-space cost vector onto the standard-form columns, oriented
/// for internal maximization.
pub(crate) fn map_cost<S: Scalar>(std: &StdForm<S>, cost: &[S], sense: super::Sense) -> Vec<S> {
    let sign = match sense {
        super::Sense::Maximize => S::one(),
        super::Sense::Minimize => -S::one(),
    };
    std.kind
        .iter()
        .map(|k| match *k {
            ColKind::Plus(v) => sign * cost[v],
            ColKind::Minus(v) => -sign * cost[v],
            ColKind::Slack | ColKind::Artificial => S::zero(),
        })
        .collect()
}
