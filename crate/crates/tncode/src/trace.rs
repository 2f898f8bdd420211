//! Leg contraction on check matrices.
//!
//! Contracting two legs keeps exactly the row-space elements whose action on
//! the pair has the Bell-pair form X^a Z^b on one leg and X^a Z^{-b} on the
//! other, then deletes both legs. `self_trace` computes that subgroup with one
//! kernel computation; `self_trace_case_analysis` reaches the same answer by
//! reducing the traced columns and dispatching on their rank, case by case.
//! `single_trace` and `conjoin` build multi-tensor contractions out of
//! self-traces.

use crate::fieldvec::FieldMatrix;
use crate::symplectic::CheckMatrix;
use crate::{Error, Result};

/// Outcome of one or more leg contractions.
#[derive(Debug, Clone)]
pub struct TraceResult {
    /// Contracted matrix over the surviving legs.
    pub matrix: CheckMatrix,
    /// Coefficient rows expressing each output row as a combination of the
    /// input rows (with the traced columns deleted afterwards).
    pub provenance: FieldMatrix,
    /// Input row-space dimensions dropped because no combination satisfied
    /// the matching rule.
    pub dropped_rank: usize,
}

fn check_legs(h: &CheckMatrix, leg_a: usize, leg_b: usize) -> Result<()> {
    let n = h.n_legs();
    if leg_a >= n {
        return Err(Error::IndexOutOfBounds {
            index: leg_a,
            bound: n,
        });
    }
    if leg_b >= n {
        return Err(Error::IndexOutOfBounds {
            index: leg_b,
            bound: n,
        });
    }
    if leg_a == leg_b {
        return Err(Error::LegReuse(leg_a));
    }
    Ok(())
}

/// Shared tail: delete the traced columns from the matched rows, reduce, and
/// compose provenance. `coeffs` expresses each matched row over the input
/// rows. The rank consistency check applies only to full-rank inputs.
fn finish(
    h: &CheckMatrix,
    leg_a: usize,
    leg_b: usize,
    matched: FieldMatrix,
    coeffs: FieldMatrix,
    dropped_rank: usize,
) -> Result<TraceResult> {
    let n = h.n_legs();
    let deleted = matched.delete_cols(&[leg_a, leg_b, n + leg_a, n + leg_b]);
    let (red, transform) = deleted.rref_tracked();
    let out_rank = red.matrix.rows();
    if h.rank() == n && out_rank != n - 2 {
        return Err(Error::TraceRank {
            got: out_rank,
            expected: n - 2,
        });
    }
    Ok(TraceResult {
        matrix: CheckMatrix::from_commuting_matrix(red.matrix, n - 2),
        provenance: transform.matmul(&coeffs)?,
        dropped_rank,
    })
}

/// Contract two legs of one matrix using the kernel of the matching
/// constraints: a coefficient vector c over the rows survives when the
/// combined row has x_a = x_b and z_a = -z_b.
pub fn self_trace(h: &CheckMatrix, leg_a: usize, leg_b: usize) -> Result<TraceResult> {
    check_legs(h, leg_a, leg_b)?;
    let d = h.modulus();
    let n = h.n_legs();
    let r = h.rank();
    let m = h.matrix();
    let mut constraints = FieldMatrix::zeros(2, r, d);
    for i in 0..r {
        let row = m.row(i);
        constraints.set(0, i, d.sub(row[leg_a], row[leg_b]));
        constraints.set(1, i, d.add(row[n + leg_a], row[n + leg_b]));
    }
    let kernel = constraints.kernel();
    let matched = kernel.matmul(m)?;
    let dropped = r - kernel.rows();
    finish(h, leg_a, leg_b, matched, kernel, dropped)
}

/// Contract two legs by the explicit case analysis on the traced columns.
///
/// The rows are first reduced so that at most four of them act on the traced
/// pair; the rest pass through untouched. The survivors among the acting rows
/// depend on the rank s of their leg-pair action:
///
/// * s = 4: the pair supports independent X and Z on both legs, so the
///   matched combinations are X_a X_b and Z_a Z_b^{-1};
/// * s = 3: two matching equations on three coefficients, solved by the
///   cross product (or its 2-dimensional kernel when the equations are
///   dependent);
/// * s = 2 with the action separable into one row per leg: scan the scalar l
///   for which l * (x, z) on leg a mirrors the leg-b action as (x, -z), and
///   drop both rows when no l works;
/// * s = 2 entangled across both legs: solve the 2x2 matching system;
/// * s = 1: the lone row survives only if its own action already matches;
/// * s = 0: nothing acts on the pair.
///
/// Same contract as `self_trace`; the two implementations are
/// cross-checked in tests.
pub fn self_trace_case_analysis(
    h: &CheckMatrix,
    leg_a: usize,
    leg_b: usize,
) -> Result<TraceResult> {
    check_legs(h, leg_a, leg_b)?;
    let d = h.modulus();
    let n = h.n_legs();
    let r = h.rank();
    let m = h.matrix();

    // Action of each row on the traced pair, columns (x_a, x_b, z_a, z_b).
    let mut tuples = FieldMatrix::zeros(r, 4, d);
    for i in 0..r {
        let row = m.row(i);
        tuples.set(i, 0, row[leg_a]);
        tuples.set(i, 1, row[leg_b]);
        tuples.set(i, 2, row[n + leg_a]);
        tuples.set(i, 3, row[n + leg_b]);
    }
    // Split the rows into s pivot combinations that carry all the action on
    // the pair and r - s combinations that act trivially there.
    let (reduced_tuples, pivot_transform) = {
        let (red, t) = tuples.rref_tracked();
        (red.matrix, t)
    };
    let silent = tuples.transpose().kernel();
    let s = reduced_tuples.rows();

    // Matching functionals evaluated on each pivot combination.
    let mut system = FieldMatrix::zeros(2, s, d);
    for j in 0..s {
        let t = reduced_tuples.row(j);
        system.set(0, j, d.sub(t[0], t[1]));
        system.set(1, j, d.add(t[2], t[3]));
    }

    // Coefficient rows (over the pivot combinations) that satisfy matching.
    let case_coeffs: FieldMatrix = match s {
        0 => FieldMatrix::zeros(0, 0, d),
        1 => {
            let mut c = FieldMatrix::zeros(0, 1, d);
            if system.get(0, 0) == 0 && system.get(1, 0) == 0 {
                c.push_row(&[1]);
            }
            c
        }
        2 => {
            let a_block = reduced_tuples.select_cols(&[0, 2]);
            let b_block = reduced_tuples.select_cols(&[1, 3]);
            if a_block.rank() <= 1 && b_block.rank() <= 1 {
                // Separable: one combination acting only on leg a, one only
                // on leg b, then the scalar scan.
                let ca = first_nonzero_row(&b_block.transpose().kernel());
                let cb = first_nonzero_row(&a_block.transpose().kernel());
                let act_a = reduced_tuples.combine_rows(&ca);
                let act_b = reduced_tuples.combine_rows(&cb);
                let (i1, j1) = (act_a[0], act_a[2]);
                let (i2, j2) = (act_b[1], act_b[3]);
                let mut c = FieldMatrix::zeros(0, 2, d);
                for l in 0..d.get() {
                    if d.mul(l, i1) == i2 && d.mul(l, j1) == d.neg(j2) {
                        let row: Vec<u32> = (0..2)
                            .map(|k| d.add(d.mul(l, ca[k]), cb[k]))
                            .collect();
                        c.push_row(&row);
                        break;
                    }
                }
                c
            } else {
                system.kernel()
            }
        }
        3 => {
            let cross = vec![
                d.sub(
                    d.mul(system.get(0, 1), system.get(1, 2)),
                    d.mul(system.get(0, 2), system.get(1, 1)),
                ),
                d.sub(
                    d.mul(system.get(0, 2), system.get(1, 0)),
                    d.mul(system.get(0, 0), system.get(1, 2)),
                ),
                d.sub(
                    d.mul(system.get(0, 0), system.get(1, 1)),
                    d.mul(system.get(0, 1), system.get(1, 0)),
                ),
            ];
            if cross.iter().any(|&v| v != 0) {
                FieldMatrix::from_rows(&[cross], 3, d)?
            } else {
                // Dependent equations: the kernel is two-dimensional.
                system.kernel()
            }
        }
        4 => {
            // Reduced tuples form the identity on (x_a, x_b, z_a, z_b), so
            // the survivors are rows 0+1 (X X) and rows 2-3 (Z Z^{-1}).
            FieldMatrix::from_rows(&[vec![1, 1, 0, 0], vec![0, 0, 1, d.neg(1)]], 4, d)?
        }
        _ => unreachable!("tuple rank is at most 4"),
    };

    let matched_dim = case_coeffs.rows();
    // Stack matched pivot combinations over the silent rows, in input terms.
    let mut coeffs = if matched_dim > 0 {
        case_coeffs.matmul(&pivot_transform)?
    } else {
        FieldMatrix::zeros(0, r, d)
    };
    for i in 0..silent.rows() {
        coeffs.push_row(silent.row(i));
    }
    let matched = coeffs.matmul(m)?;
    let dropped = s - matched_dim;
    finish(h, leg_a, leg_b, matched, coeffs, dropped)
}

fn first_nonzero_row(m: &FieldMatrix) -> Vec<u32> {
    for i in 0..m.rows() {
        if m.row(i).iter().any(|&v| v != 0) {
            return m.row(i).to_vec();
        }
    }
    panic!("expected a nonzero kernel vector");
}

/// Contract one leg of h1 against one leg of h2: direct sum, then self-trace.
/// Surviving legs keep h1's order followed by h2's.
pub fn single_trace(
    h1: &CheckMatrix,
    h2: &CheckMatrix,
    leg_a: usize,
    leg_b: usize,
) -> Result<TraceResult> {
    let sum = h1.direct_sum(h2)?;
    self_trace(&sum, leg_a, h1.n_legs() + leg_b)
}

/// Contract a whole set of leg pairs in sequence, composing provenance.
///
/// With `h2` present the pairs are (leg of h1, leg of h2) and the combined
/// leg order is h1's legs then h2's; without it the pairs are internal to
/// h1. Surviving legs keep that order. An empty pair list returns the direct
/// sum (or h1 itself).
pub fn conjoin(
    h1: &CheckMatrix,
    h2: Option<&CheckMatrix>,
    edge_pairs: &[(usize, usize)],
) -> Result<TraceResult> {
    let combined = match h2 {
        Some(h2) => h1.direct_sum(h2)?,
        None => h1.clone(),
    };
    let offset = match h2 {
        Some(_) => h1.n_legs(),
        None => 0,
    };
    let pairs: Vec<(usize, usize)> = edge_pairs
        .iter()
        .map(|&(a, b)| (a, b + offset))
        .collect();
    let mut seen = std::collections::HashSet::new();
    for &(a, b) in &pairs {
        if a == b || !seen.insert(a) || !seen.insert(b) {
            return Err(Error::LegReuse(if seen.contains(&a) { a } else { b }));
        }
    }
    conjoin_combined(&combined, &pairs)
}

/// Sequential self-traces over legs named in the original indexing of
/// `combined`, with live column tracking and composed provenance.
pub(crate) fn conjoin_combined(
    combined: &CheckMatrix,
    pairs: &[(usize, usize)],
) -> Result<TraceResult> {
    let d = combined.modulus();
    let mut live: Vec<usize> = (0..combined.n_legs()).collect();
    let mut current = combined.clone();
    let mut provenance = FieldMatrix::identity(combined.rank(), d);
    let mut dropped = 0usize;
    for &(a, b) in pairs {
        let pos_a = live
            .iter()
            .position(|&l| l == a)
            .ok_or(Error::LegReuse(a))?;
        let pos_b = live
            .iter()
            .position(|&l| l == b)
            .ok_or(Error::LegReuse(b))?;
        let step = self_trace(&current, pos_a, pos_b)?;
        provenance = step.provenance.matmul(&provenance)?;
        dropped += step.dropped_rank;
        current = step.matrix;
        let (lo, hi) = (pos_a.min(pos_b), pos_a.max(pos_b));
        live.remove(hi);
        live.remove(lo);
    }
    Ok(TraceResult {
        matrix: current,
        provenance,
        dropped_rank: dropped,
    })
}
