//! Measurements on extracted codes: region entropy, erasure correctability,
//! and brute-force distance.
//!
//! Everything here is exact linear algebra or bounded enumeration; nothing
//! samples. Distance enumerates the span of stabilizers, gauge generators and
//! logical representatives when that fits the budget, and otherwise scans
//! Paulis by ascending weight.

use crate::duality::CodeReport;
use crate::fieldvec::{FieldMatrix, FieldModulus};
use crate::symplectic::{print_pauli, symplectic_product, CheckMatrix, PauliVector};
use crate::{Error, Result};

/// Elements of the group span that fit the default exhaustive budget.
pub const DEFAULT_ENUMERATION_BUDGET: u64 = 1 << 24;

/// Rank of the subgroup of the row space supported entirely inside `legs`.
pub fn subgroup_rank_within(state: &CheckMatrix, legs: &[usize]) -> usize {
    state.subgroup_rank_within(legs)
}

/// Region entropy of a full-rank state in units of log d.
pub fn region_entropy(state: &CheckMatrix, legs: &[usize]) -> usize {
    legs.len() - state.subgroup_rank_within(legs)
}

/// True when the reduced state on `legs` is the uniform mixture, i.e. no
/// nontrivial row-space element lives inside the region.
pub fn is_maximally_mixed(state: &CheckMatrix, legs: &[usize]) -> bool {
    state.subgroup_rank_within(legs) == 0
}

/// Rank of the subspace of a row space (not necessarily commuting) whose
/// elements vanish outside `legs`.
fn subspace_rank_within(m: &FieldMatrix, n_legs: usize, legs: &[usize]) -> usize {
    let outside: Vec<usize> = (0..n_legs).filter(|l| !legs.contains(l)).collect();
    let mut cols = Vec::with_capacity(2 * outside.len());
    cols.extend(outside.iter().copied());
    cols.extend(outside.iter().map(|&l| l + n_legs));
    let basis = m.rref().matrix;
    basis.select_cols(&cols).transpose().kernel().rows()
}

/// Stabilizer and gauge rows stacked over the physical legs.
fn stabilizer_gauge_rows(report: &CodeReport) -> FieldMatrix {
    let mut m = report.stabilizers.matrix().clone();
    for g in &report.gauge {
        m.push_row(&g.to_row());
    }
    m
}

/// True when erasing `legs` (indices into the physical legs) loses no
/// logical information: every region-supported Pauli that commutes with all
/// stabilizers already lies in the stabilizer-gauge group.
pub fn is_correctable_erasure(report: &CodeReport, legs: &[usize]) -> bool {
    let n = report.n;
    let d = report.stabilizers.modulus();
    let stabs = report.stabilizers.matrix();
    let r = stabs.rows();
    // Centralizer within the region: region Paulis commuting with all rows.
    let mut constraints = FieldMatrix::zeros(r, 2 * legs.len(), d);
    for si in 0..r {
        let row = stabs.row(si);
        for (j, &l) in legs.iter().enumerate() {
            constraints.set(si, j, row[n + l]);
            constraints.set(si, legs.len() + j, d.neg(row[l]));
        }
    }
    let centralizer_dim = constraints.kernel().rows();
    let group_dim = subspace_rank_within(&stabilizer_gauge_rows(report), n, legs);
    centralizer_dim == group_dim
}

/// How a distance figure was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Exhaustive,
    WeightCapped,
}

/// Exact distance, or a floor when the capped search exhausted its cap.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Distance {
    Exact(usize),
    AtLeast(usize),
}

impl Distance {
    pub fn value(&self) -> usize {
        match *self {
            Distance::Exact(v) | Distance::AtLeast(v) => v,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Distance::Exact(_))
    }
}

#[derive(Debug, Clone)]
pub struct DistanceReport {
    pub distance: Distance,
    /// Minimal-weight logical operator, lexicographically smallest among
    /// the minimal ones. Absent when only a floor was established.
    pub witness: Option<PauliVector>,
    pub method: Method,
}

/// Dressed distance with the default enumeration budget.
pub fn distance(report: &CodeReport, weight_cap: Option<usize>) -> Result<DistanceReport> {
    distance_opts(report, weight_cap, false, DEFAULT_ENUMERATION_BUDGET)
}

/// Bare distance: logical representatives may not be cleaned by gauge
/// multiplication.
pub fn distance_bare(report: &CodeReport, weight_cap: Option<usize>) -> Result<DistanceReport> {
    distance_opts(report, weight_cap, true, DEFAULT_ENUMERATION_BUDGET)
}

pub fn distance_opts(
    report: &CodeReport,
    weight_cap: Option<usize>,
    bare: bool,
    budget: u64,
) -> Result<DistanceReport> {
    if report.true_k == 0 {
        return Err(Error::Unsupported(
            "distance needs at least one logical qudit".into(),
        ));
    }
    let d = report.stabilizers.modulus();
    // Multipliers that do not change the logical class.
    let group = if bare {
        report.stabilizers.matrix().clone()
    } else {
        stabilizer_gauge_rows(report)
    };
    let mut logicals = FieldMatrix::zeros(0, 2 * report.n, d);
    for pair in &report.logical_pairs {
        logicals.push_row(&pair.x.representation.to_row());
        logicals.push_row(&pair.z.representation.to_row());
    }
    let dims = (group.rows() + logicals.rows()) as u32;
    let size = (d.get() as u64).checked_pow(dims);
    match size {
        Some(s) if s <= budget => Ok(exhaustive(&group, &logicals, report.n, d)),
        _ => match weight_cap {
            Some(cap) => weight_capped(report, bare, cap),
            None => Err(Error::BudgetExceeded(format!(
                "{}^{} group elements exceed the enumeration budget; pass a weight cap",
                d.get(),
                dims
            ))),
        },
    }
}

struct Best {
    weight: usize,
    printed: String,
    pauli: PauliVector,
}

fn consider(best: &mut Option<Best>, current: &[u32], n: usize, d: FieldModulus) {
    let weight = (0..n)
        .filter(|&l| current[l] != 0 || current[n + l] != 0)
        .count();
    if let Some(b) = best.as_ref() {
        if weight > b.weight {
            return;
        }
    }
    let pauli = PauliVector::from_row(current, d);
    let printed = print_pauli(&pauli);
    let replace = match best.as_ref() {
        None => true,
        Some(b) => weight < b.weight || (weight == b.weight && printed < b.printed),
    };
    if replace {
        *best = Some(Best {
            weight,
            printed,
            pauli,
        });
    }
}

/// Walk the whole span: every nonzero combination of logical rows times
/// every combination of group rows. Vectors are updated in place; adding a
/// row d times returns to the start.
fn exhaustive(group: &FieldMatrix, logicals: &FieldMatrix, n: usize, d: FieldModulus) -> DistanceReport {
    fn dfs(
        rows: &FieldMatrix,
        depth: usize,
        current: &mut Vec<u32>,
        d: FieldModulus,
        n: usize,
        best: &mut Option<Best>,
    ) {
        if depth == rows.rows() {
            consider(best, current, n, d);
            return;
        }
        for _ in 0..d.get() {
            dfs(rows, depth + 1, current, d, n, best);
            let row = rows.row(depth);
            for (c, &v) in current.iter_mut().zip(row.iter()) {
                *c = d.add(*c, v);
            }
        }
    }

    let mut best: Option<Best> = None;
    let mut logical_coeffs = vec![0u32; logicals.rows()];
    loop {
        // Advance the odometer over logical coefficients, skipping all-zero.
        let mut i = 0;
        while i < logical_coeffs.len() {
            logical_coeffs[i] += 1;
            if logical_coeffs[i] < d.get() {
                break;
            }
            logical_coeffs[i] = 0;
            i += 1;
        }
        if i == logical_coeffs.len() {
            break;
        }
        let mut current = logicals.combine_rows(&logical_coeffs);
        dfs(group, 0, &mut current, d, n, &mut best);
    }
    let best = best.expect("logical span is nonempty");
    DistanceReport {
        distance: Distance::Exact(best.weight),
        witness: Some(best.pauli),
        method: Method::Exhaustive,
    }
}

/// Ascending-weight scan: for each support and nonidentity assignment, keep
/// the candidates that commute with the stabilizers (and the gauge group in
/// bare mode) yet fall outside the trivial-action group.
fn weight_capped(report: &CodeReport, bare: bool, cap: usize) -> Result<DistanceReport> {
    let n = report.n;
    let d = report.stabilizers.modulus();
    let mut commute_with = report.stabilizers.rows_pauli();
    if bare {
        commute_with.extend(report.gauge.iter().cloned());
    }
    let trivial = if bare {
        report.stabilizers.matrix().rref().matrix
    } else {
        stabilizer_gauge_rows(report).rref().matrix
    };

    let mut support = Vec::new();
    for w in 1..=cap.min(n) {
        let mut best: Option<Best> = None;
        support.clear();
        scan_supports(
            n,
            w,
            0,
            &mut support,
            &mut |legs: &[usize]| -> Result<()> {
                let mut digits = vec![1u32; w];
                loop {
                    let mut candidate = PauliVector::identity(n, d);
                    for (j, &l) in legs.iter().enumerate() {
                        candidate.set_leg(l, digits[j] / d.get(), digits[j] % d.get());
                    }
                    let commutes = commute_with
                        .iter()
                        .map(|s| symplectic_product(&candidate, s))
                        .collect::<Result<Vec<u32>>>()?
                        .iter()
                        .all(|&v| v == 0);
                    if commutes && !trivial.row_space_contains(&candidate.to_row()) {
                        consider(&mut best, &candidate.to_row(), n, d);
                    }
                    // Next all-nonidentity assignment.
                    let mut j = 0;
                    while j < w {
                        digits[j] += 1;
                        if digits[j] < d.get() * d.get() {
                            break;
                        }
                        digits[j] = 1;
                        j += 1;
                    }
                    if j == w {
                        break;
                    }
                }
                Ok(())
            },
        )?;
        if let Some(b) = best {
            return Ok(DistanceReport {
                distance: Distance::Exact(b.weight),
                witness: Some(b.pauli),
                method: Method::WeightCapped,
            });
        }
    }
    Ok(DistanceReport {
        distance: Distance::AtLeast(cap + 1),
        witness: None,
        method: Method::WeightCapped,
    })
}

fn scan_supports(
    n: usize,
    want: usize,
    from: usize,
    acc: &mut Vec<usize>,
    visit: &mut impl FnMut(&[usize]) -> Result<()>,
) -> Result<()> {
    if acc.len() == want {
        return visit(acc);
    }
    let remaining = want - acc.len();
    for l in from..=(n - remaining) {
        acc.push(l);
        scan_supports(n, want, l + 1, acc, visit)?;
        acc.pop();
    }
    Ok(())
}
