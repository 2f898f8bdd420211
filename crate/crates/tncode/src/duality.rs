//! Moving between codes and states.
//!
//! An [[n,k]] code plus a choice of logical operators becomes an [[n+k,0]]
//! state by appending one leg per encoded qudit: each X-type logical gains X
//! on its new leg, each Z-type logical gains Z^{-1}. `extract` inverts this
//! for any full-rank state with a physical/logical leg split, recovering the
//! stabilizer group, the constraints among the logical legs, and canonically
//! paired logical operators.

use crate::fieldvec::FieldMatrix;
use crate::symplectic::{symplectic_product, CheckMatrix, PauliVector};
use crate::{Error, Result};

/// A code folded into a state, remembering which legs were appended.
#[derive(Debug, Clone)]
pub struct AugmentedCode {
    pub state_matrix: CheckMatrix,
    pub logical_columns: Vec<usize>,
}

/// One logical operator, seen from both sides of the leg split.
#[derive(Debug, Clone)]
pub struct LogicalOperator {
    /// Action on the logical legs.
    pub action: PauliVector,
    /// Physical-leg representative, commuting with every stabilizer.
    pub representation: PauliVector,
}

/// Conjugate pair: the physical representations have symplectic product +1.
#[derive(Debug, Clone)]
pub struct LogicalPair {
    pub x: LogicalOperator,
    pub z: LogicalOperator,
}

/// Everything extracted from a built state under a leg-role assignment.
///
/// For a freshly extracted report, true_k = n - stabilizer rank
/// = apparent_k - constraint rank. Gauge fixing lowers true_k below that by
/// moving pairs into the gauge list.
#[derive(Debug, Clone)]
pub struct CodeReport {
    pub n: usize,
    pub apparent_k: usize,
    pub true_k: usize,
    /// Stabilizer group on the physical legs.
    pub stabilizers: CheckMatrix,
    /// Identifications among the logical legs, on those legs.
    pub constraints: CheckMatrix,
    pub logical_pairs: Vec<LogicalPair>,
    /// Gauge generators on the physical legs (empty until gauge_fix).
    pub gauge: Vec<PauliVector>,
    pub css: bool,
    pub self_dual: bool,
    /// Original column indices of the physical legs, ascending.
    pub physical_legs: Vec<usize>,
    /// Original column indices of the logical legs, ascending.
    pub logical_legs: Vec<usize>,
}

/// Fold a code into a state by appending one leg per logical pair.
///
/// Requires the logicals to commute with the code rows and with each other
/// except within a pair, where the symplectic product must be invertible
/// (the Z side is rescaled internally to make it exactly 1).
pub fn augment(
    h: &CheckMatrix,
    logical_x: &[PauliVector],
    logical_z: &[PauliVector],
) -> Result<AugmentedCode> {
    let n = h.n_legs();
    let k = logical_x.len();
    let d = h.modulus();
    if logical_z.len() != k {
        return Err(Error::Shape(
            "need equally many X and Z logicals".into(),
        ));
    }
    if h.rank() + k != n {
        return Err(Error::Shape(format!(
            "rank {} plus {} logical pairs does not fill {} legs",
            h.rank(),
            k,
            n
        )));
    }
    for (i, p) in logical_x.iter().chain(logical_z.iter()).enumerate() {
        for (j, row) in h.rows_pauli().iter().enumerate() {
            if symplectic_product(p, row)? != 0 {
                return Err(Error::NonCommuting(i, j, symplectic_product(p, row)?));
            }
        }
    }
    let mut z_scaled = Vec::with_capacity(k);
    for i in 0..k {
        for j in 0..k {
            let s_xx = symplectic_product(&logical_x[i], &logical_x[j])?;
            let s_zz = symplectic_product(&logical_z[i], &logical_z[j])?;
            let s_xz = symplectic_product(&logical_x[i], &logical_z[j])?;
            if s_xx != 0 || s_zz != 0 || (i != j && s_xz != 0) {
                return Err(Error::Shape(format!(
                    "logicals {} and {} are not canonically conjugate",
                    i, j
                )));
            }
        }
        let sigma = symplectic_product(&logical_x[i], &logical_z[i])?;
        if sigma == 0 {
            return Err(Error::Shape(format!(
                "logical pair {} has commuting members",
                i
            )));
        }
        z_scaled.push(logical_z[i].pow(d.inv(sigma)));
    }

    let total = n + k;
    let mut m = FieldMatrix::zeros(0, 2 * total, d);
    let pad = |p: &PauliVector, extra_x: Option<usize>, extra_z: Option<usize>| {
        let mut row = vec![0u32; 2 * total];
        for l in 0..n {
            row[l] = p.x(l);
            row[total + l] = p.z(l);
        }
        if let Some(l) = extra_x {
            row[l] = 1;
        }
        if let Some(l) = extra_z {
            row[total + l] = d.neg(1);
        }
        row
    };
    for row in h.rows_pauli() {
        m.push_row(&pad(&row, None, None));
    }
    for (i, p) in logical_x.iter().enumerate() {
        m.push_row(&pad(p, Some(n + i), None));
    }
    for (i, p) in z_scaled.iter().enumerate() {
        m.push_row(&pad(p, None, Some(n + i)));
    }
    let state = CheckMatrix::from_rows_matrix(m, total)?;
    if state.rank() != total {
        return Err(Error::Shape(
            "augmented matrix is rank-deficient; logicals overlap the code rows".into(),
        ));
    }
    Ok(AugmentedCode {
        state_matrix: state,
        logical_columns: (n..total).collect(),
    })
}

/// Recover code structure from a full-rank state and a logical-leg choice.
pub fn extract(state: &CheckMatrix, logical_legs: &[usize]) -> Result<CodeReport> {
    let total = state.n_legs();
    let d = state.modulus();
    let mut is_logical = vec![false; total];
    for &l in logical_legs {
        if l >= total {
            return Err(Error::IndexOutOfBounds {
                index: l,
                bound: total,
            });
        }
        if is_logical[l] {
            return Err(Error::LegReuse(l));
        }
        is_logical[l] = true;
    }
    let logical_legs: Vec<usize> = (0..total).filter(|&l| is_logical[l]).collect();
    let physical_legs: Vec<usize> = (0..total).filter(|&l| !is_logical[l]).collect();
    let n = physical_legs.len();
    let apparent_k = logical_legs.len();

    let stab_paulis = state.subgroup_within(&physical_legs);
    let constraint_paulis = state.subgroup_within(&logical_legs);
    let stabilizers = CheckMatrix::new(stab_paulis, n, d)?;
    let constraints = CheckMatrix::new(constraint_paulis, apparent_k, d)?;
    let r_p = stabilizers.rank();
    let r_l = constraints.rank();
    if n < r_p || apparent_k < r_l || n - r_p != apparent_k - r_l {
        return Err(Error::Shape(format!(
            "leg counting broke: n={} r_P={} apparent_k={} r_L={}",
            n, r_p, apparent_k, r_l
        )));
    }
    let true_k = n - r_p;

    // Embed both projected groups back on all legs, then grow a basis of the
    // remaining row-space directions; those carry the logical pairs.
    let mut span = FieldMatrix::zeros(0, 2 * total, d);
    let embed = |p: &PauliVector, legs: &[usize]| {
        let mut row = vec![0u32; 2 * total];
        for (i, &l) in legs.iter().enumerate() {
            row[l] = p.x(i);
            row[total + l] = p.z(i);
        }
        row
    };
    for row in stabilizers.rows_pauli() {
        span.push_row(&embed(&row, &physical_legs));
    }
    for row in constraints.rows_pauli() {
        span.push_row(&embed(&row, &logical_legs));
    }
    let mut pool: Vec<PauliVector> = Vec::new();
    let mut rank = span.rank();
    for i in 0..state.rank() {
        let candidate = state.matrix().row(i);
        let mut trial = span.clone();
        trial.push_row(candidate);
        if trial.rank() > rank {
            span = trial;
            rank += 1;
            pool.push(PauliVector::from_row(candidate, d));
        }
    }
    if pool.len() != 2 * true_k {
        return Err(Error::Shape(format!(
            "expected {} logical directions, found {}",
            2 * true_k,
            pool.len()
        )));
    }

    // Pair the pool symplectically by the action on the logical legs. The
    // full elements all commute, so action and representation products are
    // negatives of each other; normalizing the representation side to +1
    // makes -1 the action-side target.
    let omega = |a: &PauliVector, b: &PauliVector| -> u32 {
        symplectic_product(&a.restrict(&logical_legs), &b.restrict(&logical_legs)).unwrap()
    };
    let mut pairs = Vec::with_capacity(true_k);
    while !pool.is_empty() {
        let u = pool.remove(0);
        let partner = pool
            .iter()
            .position(|v| omega(&u, v) != 0)
            .ok_or_else(|| {
                Error::Shape("logical direction without a conjugate partner".into())
            })?;
        let w = pool.remove(partner);
        let s = omega(&u, &w);
        let w = w.pow(d.neg(d.inv(s)));
        for v in pool.iter_mut() {
            let a = d.neg(omega(&w, v));
            let b = omega(&u, v);
            *v = v.mul(&u.pow(a)).unwrap().mul(&w.pow(b)).unwrap();
        }
        pairs.push(LogicalPair {
            x: LogicalOperator {
                action: u.restrict(&logical_legs),
                representation: u.restrict(&physical_legs),
            },
            z: LogicalOperator {
                action: w.restrict(&logical_legs),
                representation: w.restrict(&physical_legs),
            },
        });
    }

    let css = stabilizers.is_css();
    let self_dual = stabilizers.is_self_dual_css();
    Ok(CodeReport {
        n,
        apparent_k,
        true_k,
        stabilizers,
        constraints,
        logical_pairs: pairs,
        gauge: Vec::new(),
        css,
        self_dual,
        physical_legs,
        logical_legs,
    })
}

/// Demote all pairs not listed in `keep` to gauge degrees of freedom.
pub fn gauge_fix(report: &CodeReport, keep: &[usize]) -> Result<CodeReport> {
    let mut kept = vec![false; report.logical_pairs.len()];
    for &i in keep {
        if i >= kept.len() {
            return Err(Error::IndexOutOfBounds {
                index: i,
                bound: kept.len(),
            });
        }
        if kept[i] {
            return Err(Error::LegReuse(i));
        }
        kept[i] = true;
    }
    let mut out = report.clone();
    out.logical_pairs = Vec::new();
    for (i, pair) in report.logical_pairs.iter().enumerate() {
        if kept[i] {
            out.logical_pairs.push(pair.clone());
        } else {
            out.gauge.push(pair.x.representation.clone());
            out.gauge.push(pair.z.representation.clone());
        }
    }
    out.true_k = out.logical_pairs.len();
    Ok(out)
}

/// Gauge-fix onto a prescribed conjugate pair instead of one of the
/// extracted pairs. The representatives must lie in the span of stabilizers
/// and logical representations and have invertible symplectic product (the
/// Z side is rescaled to make it exactly 1). Everything in that span
/// commuting with both becomes a gauge generator.
pub fn gauge_fix_pair(
    report: &CodeReport,
    x_rep: &PauliVector,
    z_rep: &PauliVector,
) -> Result<CodeReport> {
    let d = report.stabilizers.modulus();
    let n = report.n;
    if x_rep.n_legs() != n || z_rep.n_legs() != n {
        return Err(Error::Shape("logical representative length mismatch".into()));
    }
    let s = symplectic_product(x_rep, z_rep)?;
    if s == 0 {
        return Err(Error::Unsupported(
            "prescribed pair has zero symplectic product".into(),
        ));
    }
    let z_rep = z_rep.pow(d.inv(s));

    // Span of stabilizers and logical classes, with the actions of the
    // logical rows kept alongside for recombination.
    let r = report.stabilizers.rank();
    let mut span = report.stabilizers.matrix().clone();
    let mut actions: Vec<&PauliVector> = Vec::new();
    for pair in &report.logical_pairs {
        span.push_row(&pair.x.representation.to_row());
        actions.push(&pair.x.action);
        span.push_row(&pair.z.representation.to_row());
        actions.push(&pair.z.action);
    }
    let combine_action = |coeffs: &[u32]| -> PauliVector {
        let mut act = PauliVector::identity(report.apparent_k, d);
        for (i, a) in actions.iter().enumerate() {
            act = act.mul(&a.pow(coeffs[r + i])).unwrap();
        }
        act
    };
    let cx = span
        .solve(&x_rep.to_row())
        .ok_or(Error::NotInRowSpace)?;
    let cz = span
        .solve(&z_rep.to_row())
        .ok_or(Error::NotInRowSpace)?;

    // Functionals v -> <v, x> and v -> <v, z>; their joint kernel within
    // the span is the stabilizer-plus-gauge group.
    let mut functionals = FieldMatrix::zeros(2 * n, 2, d);
    for (j, target) in [x_rep, &z_rep].iter().enumerate() {
        let row = target.to_row();
        for leg in 0..n {
            functionals.set(leg, j, row[n + leg]);
            functionals.set(n + leg, j, d.neg(row[leg]));
        }
    }
    let products = span.matmul(&functionals)?;
    let coeff_basis = products.transpose().kernel();
    let mut gauge = Vec::new();
    for i in 0..coeff_basis.rows() {
        let mut row_mat = FieldMatrix::zeros(0, span.rows(), d);
        row_mat.push_row(coeff_basis.row(i));
        let element = row_mat.matmul(&span)?;
        let p = PauliVector::from_row(element.row(0), d);
        if !report.stabilizers.contains(&p) {
            gauge.push(p);
        }
    }

    let mut out = report.clone();
    out.logical_pairs = vec![LogicalPair {
        x: LogicalOperator {
            action: combine_action(&cx),
            representation: x_rep.clone(),
        },
        z: LogicalOperator {
            action: combine_action(&cz),
            representation: z_rep,
        },
    }];
    out.gauge = gauge;
    out.true_k = 1;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fieldvec::FieldModulus;
    use crate::symplectic::parse_pauli;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn f(d: u32) -> FieldModulus {
        FieldModulus::new(d).unwrap()
    }

    fn cm(rows: &[&str], n: usize, d: u32) -> CheckMatrix {
        let m = f(d);
        let paulis: Vec<PauliVector> = rows.iter().map(|s| parse_pauli(s, m).unwrap()).collect();
        CheckMatrix::new(paulis, n, m).unwrap()
    }

    use crate::testutil::random_state;

    fn code_422() -> (CheckMatrix, Vec<PauliVector>, Vec<PauliVector>) {
        let d2 = f(2);
        let h = cm(&["XXXX", "ZZZZ"], 4, 2);
        let lx = vec![
            parse_pauli("XIIX", d2).unwrap(),
            parse_pauli("XXII", d2).unwrap(),
        ];
        let lz = vec![
            parse_pauli("ZZII", d2).unwrap(),
            parse_pauli("ZIIZ", d2).unwrap(),
        ];
        (h, lx, lz)
    }

    #[test]
    fn augment_nothing_is_identity() {
        let bell = cm(&["XX", "ZZ"], 2, 2);
        let a = augment(&bell, &[], &[]).unwrap();
        assert!(a.state_matrix.row_space_equal(&bell));
        assert!(a.logical_columns.is_empty());
    }

    #[test]
    fn augment_422_gives_full_rank_state() {
        let (h, lx, lz) = code_422();
        let a = augment(&h, &lx, &lz).unwrap();
        assert_eq!(a.state_matrix.n_legs(), 6);
        assert_eq!(a.state_matrix.rank(), 6);
        assert_eq!(a.logical_columns, vec![4, 5]);
        // Appended rows act as X / Z on their own new leg.
        assert!(a
            .state_matrix
            .contains(&parse_pauli("XIIXXI", f(2)).unwrap()));
        assert!(a
            .state_matrix
            .contains(&parse_pauli("ZZIIZI", f(2)).unwrap()));
    }

    #[test]
    fn augment_rejects_bad_logicals() {
        let (h, lx, mut lz) = code_422();
        lz.swap(0, 1);
        // Swapped pairs anticommute across pairs.
        assert!(augment(&h, &lx, &lz).is_err());
        let anticommuting = vec![
            parse_pauli("ZIII", f(2)).unwrap(),
            parse_pauli("ZIIZ", f(2)).unwrap(),
        ];
        assert!(augment(&h, &lx, &anticommuting).is_err());
    }

    #[test]
    fn extract_ghz_with_one_logical_leg() {
        let ghz = cm(&["XXX", "ZZI", "IZZ"], 3, 2);
        let report = extract(&ghz, &[2]).unwrap();
        assert_eq!(report.n, 2);
        assert_eq!(report.apparent_k, 1);
        assert_eq!(report.true_k, 1);
        assert_eq!(report.stabilizers.rank(), 1);
        assert!(report.stabilizers.contains(&parse_pauli("ZZ", f(2)).unwrap()));
        assert_eq!(report.constraints.rank(), 0);
        assert_eq!(report.logical_pairs.len(), 1);
        let pair = &report.logical_pairs[0];
        assert_eq!(
            symplectic_product(&pair.x.representation, &pair.z.representation).unwrap(),
            1
        );
    }

    #[test]
    fn extract_after_augment_recovers_the_code() {
        let (h, lx, lz) = code_422();
        let a = augment(&h, &lx, &lz).unwrap();
        let report = extract(&a.state_matrix, &a.logical_columns).unwrap();
        assert_eq!((report.n, report.apparent_k, report.true_k), (4, 2, 2));
        assert!(report.stabilizers.row_space_equal(&h));
        assert_eq!(report.constraints.rank(), 0);
        assert!(report.css);
        assert!(report.self_dual);
        // The logical span is reproduced up to pair mixing. Representations
        // anticommute within pairs, so compare plain row spaces.
        let mut mine = FieldMatrix::zeros(0, 8, f(2));
        for r in h.rows_pauli() {
            mine.push_row(&r.to_row());
        }
        for p in lx.iter().chain(lz.iter()) {
            mine.push_row(&p.to_row());
        }
        let mut theirs = FieldMatrix::zeros(0, 8, f(2));
        for r in h.rows_pauli() {
            theirs.push_row(&r.to_row());
        }
        for p in &report.logical_pairs {
            theirs.push_row(&p.x.representation.to_row());
            theirs.push_row(&p.z.representation.to_row());
        }
        assert!(mine.row_space_equal(&theirs));
    }

    #[test]
    fn extraction_invariants_on_random_states() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for count in 0..120 {
            let d = [2u32, 3, 5][count % 3];
            let total = rng.gen_range(2..8);
            let state = random_state(&mut rng, total, d);
            let k = rng.gen_range(0..=total);
            let logical: Vec<usize> = (0..k).map(|i| total - 1 - i).collect();
            let report = extract(&state, &logical).unwrap();
            assert_eq!(report.n + report.apparent_k, total);
            assert_eq!(report.n - report.stabilizers.rank(), report.true_k);
            assert_eq!(
                report.apparent_k - report.constraints.rank(),
                report.true_k
            );
            assert_eq!(report.logical_pairs.len(), report.true_k);
            for (i, pi) in report.logical_pairs.iter().enumerate() {
                for s in report.stabilizers.rows_pauli() {
                    assert_eq!(
                        symplectic_product(&pi.x.representation, &s).unwrap(),
                        0
                    );
                    assert_eq!(
                        symplectic_product(&pi.z.representation, &s).unwrap(),
                        0
                    );
                }
                for (j, pj) in report.logical_pairs.iter().enumerate() {
                    let xz =
                        symplectic_product(&pi.x.representation, &pj.z.representation).unwrap();
                    let xx =
                        symplectic_product(&pi.x.representation, &pj.x.representation).unwrap();
                    let zz =
                        symplectic_product(&pi.z.representation, &pj.z.representation).unwrap();
                    assert_eq!(xz, if i == j { 1 } else { 0 });
                    assert_eq!(xx, 0);
                    assert_eq!(zz, 0);
                }
            }
        }
    }

    #[test]
    fn round_trip_on_random_codes() {
        let mut rng = ChaCha8Rng::seed_from_u64(37);
        let mut done = 0;
        while done < 60 {
            let d = [2u32, 3, 5][done % 3];
            let total = rng.gen_range(3..7);
            let k = rng.gen_range(1..total.min(3));
            let state = random_state(&mut rng, total, d);
            let logical: Vec<usize> = ((total - k)..total).collect();
            let report = extract(&state, &logical).unwrap();
            if report.constraints.rank() != 0 {
                continue;
            }
            let lx: Vec<PauliVector> = report
                .logical_pairs
                .iter()
                .map(|p| p.x.representation.clone())
                .collect();
            let lz: Vec<PauliVector> = report
                .logical_pairs
                .iter()
                .map(|p| p.z.representation.clone())
                .collect();
            let again = augment(&report.stabilizers, &lx, &lz).unwrap();
            let report2 = extract(&again.state_matrix, &again.logical_columns).unwrap();
            assert!(report2.stabilizers.row_space_equal(&report.stabilizers));
            assert_eq!(report2.true_k, report.true_k);
            done += 1;
        }
    }

    #[test]
    fn gauge_fix_moves_pairs_to_gauge() {
        let (h, lx, lz) = code_422();
        let a = augment(&h, &lx, &lz).unwrap();
        let report = extract(&a.state_matrix, &a.logical_columns).unwrap();
        let fixed = gauge_fix(&report, &[0]).unwrap();
        assert_eq!(fixed.true_k, 1);
        assert_eq!(fixed.logical_pairs.len(), 1);
        assert_eq!(fixed.gauge.len(), 2);
        let all = gauge_fix(&report, &[0, 1]).unwrap();
        assert_eq!(all.true_k, 2);
        assert!(all.gauge.is_empty());
        assert!(gauge_fix(&report, &[5]).is_err());
    }
}
