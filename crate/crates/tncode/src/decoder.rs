//! Exact maximum-likelihood decoding for desk-scale codes.
//!
//! Everything here enumerates: coset probabilities are brute-force sums over
//! the stabilizer span, so the costs grow as d^(n-k) and the budget guard
//! refuses anything past [`DEFAULT_ENUMERATION_BUDGET`]. That is the point.
//! These routines exist to give exact answers on small codes, as ground truth
//! for faster approximate decoders and for the indicator-tensor export that
//! feeds external tensor-network decoders.

use std::collections::BTreeSet;
use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::analysis::DEFAULT_ENUMERATION_BUDGET;
use crate::duality::CodeReport;
use crate::fieldvec::{FieldMatrix, FieldModulus};
use crate::symplectic::{symplectic_product, PauliVector};
use crate::{Error, Result};

/// I.i.d. single-leg Pauli noise.
///
/// One distribution over the d^2 single-leg Paulis X^x Z^z, applied
/// independently to every physical leg; entry (x, z) lives at index x*d + z.
#[derive(Debug, Clone)]
pub struct NoiseModel {
    modulus: FieldModulus,
    strength: f64,
    probs: Vec<f64>,
}

impl NoiseModel {
    /// Depolarizing channel: identity with probability 1-p, each of the
    /// d^2 - 1 nonidentity single-leg Paulis with probability p/(d^2-1).
    pub fn depolarizing(d: u32, p: f64) -> Result<Self> {
        let modulus = FieldModulus::new(d)?;
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::Shape(format!(
                "noise strength {} is not a probability",
                p
            )));
        }
        let count = (d * d) as usize;
        let each = p / (count as f64 - 1.0);
        let mut probs = vec![each; count];
        probs[0] = 1.0 - p;
        Ok(NoiseModel {
            modulus,
            strength: p,
            probs,
        })
    }

    pub fn dimension(&self) -> u32 {
        self.modulus.get()
    }

    /// The parameter the model was built from.
    pub fn strength(&self) -> f64 {
        self.strength
    }

    /// Probability of the single-leg Pauli X^x Z^z.
    pub fn single(&self, x: u32, z: u32) -> f64 {
        let d = self.modulus.get();
        self.probs[(x % d * d + z % d) as usize]
    }

    /// Probability of drawing exactly this pattern across all its legs.
    pub fn probability(&self, e: &PauliVector) -> f64 {
        (0..e.n_legs()).map(|l| self.single(e.x(l), e.z(l))).product()
    }

    /// Draw an error on `n_legs` legs.
    pub fn sample(&self, n_legs: usize, rng: &mut impl Rng) -> PauliVector {
        let d = self.modulus.get();
        let mut e = PauliVector::identity(n_legs, self.modulus);
        for l in 0..n_legs {
            let mut u: f64 = rng.gen();
            for (i, &p) in self.probs.iter().enumerate() {
                u -= p;
                if u < 0.0 {
                    e.set_leg(l, i as u32 / d, i as u32 % d);
                    break;
                }
            }
            // Rounding may leave u barely positive after the last bucket;
            // that mass belongs to the final Pauli.
            if u >= 0.0 {
                let last = d * d - 1;
                e.set_leg(l, last / d, last % d);
            }
        }
        e
    }
}

/// Symplectic product of the error with each stabilizer generator, in row
/// order. Zero syndrome means the error commutes with the whole group.
pub fn syndrome(report: &CodeReport, error: &PauliVector) -> Result<Vec<u32>> {
    report
        .stabilizers
        .rows_pauli()
        .iter()
        .map(|row| symplectic_product(row, error))
        .collect()
}

/// Any error producing the given syndrome, with no optimality claim.
///
/// Solves the linear system <S_i, e> = s_i; a solution always exists because
/// the generator rows are independent.
pub fn pure_error(report: &CodeReport, syndrome: &[u32]) -> Result<PauliVector> {
    let d = report.stabilizers.modulus();
    let n = report.n;
    let rows = report.stabilizers.rows_pauli();
    if syndrome.len() != rows.len() {
        return Err(Error::Shape(format!(
            "syndrome has {} entries, code has {} generators",
            syndrome.len(),
            rows.len()
        )));
    }
    if rows.is_empty() {
        return Ok(PauliVector::identity(n, d));
    }
    // Each generator S_i acts on errors as the functional (-S_i.z | S_i.x);
    // stack those as columns and solve for the error row.
    let mut f = FieldMatrix::zeros(0, 2 * n, d);
    for row in &rows {
        let mut func = vec![0u32; 2 * n];
        for l in 0..n {
            func[l] = d.neg(row.z(l));
            func[n + l] = row.x(l);
        }
        f.push_row(&func);
    }
    let e_row = f
        .transpose()
        .solve(syndrome)
        .ok_or_else(|| Error::Shape("syndrome is not reachable".into()))?;
    Ok(PauliVector::from_row(&e_row, d))
}

/// Logical coset label of an error: strip a pure error with the same
/// syndrome, then read each pair's exponents off symplectic products with
/// the conjugate partners. Entries alternate (a_1, b_1, ..., a_k, b_k),
/// meaning the residue acts as X_1^a_1 Z_1^b_1 ... modulo stabilizers.
pub fn logical_class(report: &CodeReport, error: &PauliVector) -> Result<Vec<u32>> {
    let d = report.stabilizers.modulus();
    let s = syndrome(report, error)?;
    let pure = pure_error(report, &s)?;
    let residue = error.mul(&pure.pow(d.neg(1)))?;
    let mut label = Vec::with_capacity(2 * report.logical_pairs.len());
    for pair in &report.logical_pairs {
        label.push(symplectic_product(&residue, &pair.z.representation)?);
        label.push(symplectic_product(&pair.x.representation, &residue)?);
    }
    Ok(label)
}

/// Visit every element of the span of `rows`, identity first, calling `f`
/// once per element. Runs a mixed-radix odometer so each step is a single
/// row multiplication instead of a fresh product.
fn for_each_span<F>(rows: &[PauliVector], n_legs: usize, modulus: FieldModulus, mut f: F) -> Result<()>
where
    F: FnMut(&PauliVector) -> Result<()>,
{
    let d = modulus.get();
    let mut digits = vec![0u32; rows.len()];
    let mut current = PauliVector::identity(n_legs, modulus);
    loop {
        f(&current)?;
        let mut i = 0;
        loop {
            if i == rows.len() {
                return Ok(());
            }
            // Bumping digit i multiplies by rows[i] whether it wraps or not:
            // the wrap completes rows[i]^d = identity and carries.
            current = current.mul(&rows[i])?;
            digits[i] += 1;
            if digits[i] < d {
                break;
            }
            digits[i] = 0;
            i += 1;
        }
    }
}

/// Result of maximum-likelihood decoding one syndrome.
#[derive(Debug, Clone)]
pub struct DecodeOutcome {
    pub syndrome: Vec<u32>,
    /// Winning logical label, alternating (a_1, b_1, ...) per pair.
    pub label: Vec<u32>,
    /// Pure error times the winning representative; applying its inverse
    /// returns to the codespace undoing the most likely logical action.
    pub correction: PauliVector,
    /// Per-label total noise probability of the matching cosets. Sums to the
    /// probability of seeing this syndrome at all.
    pub coset_probs: Vec<(Vec<u32>, f64)>,
    /// Filled in when the true error is known.
    pub success: Option<bool>,
}

fn mixed_radix(mut index: u64, digits: usize, d: u32) -> Vec<u32> {
    let mut label = vec![0u32; digits];
    for slot in (0..digits).rev() {
        label[slot] = (index % d as u64) as u32;
        index /= d as u64;
    }
    label
}

fn enumeration_cost(d: u32, exponent: usize) -> Result<u64> {
    let mut cost: u64 = 1;
    for _ in 0..exponent {
        cost = cost
            .checked_mul(d as u64)
            .filter(|&c| c <= DEFAULT_ENUMERATION_BUDGET)
            .ok_or_else(|| {
                Error::BudgetExceeded(format!(
                    "coset enumeration needs {}^{} evaluations",
                    d, exponent
                ))
            })?;
    }
    Ok(cost)
}

/// Exact maximum-likelihood decoding by exhaustive coset sums.
///
/// For every logical label the total noise probability of the matching
/// coset is computed by enumerating the full stabilizer span (gauge
/// generators included, so gauge action is treated as harmless). The label
/// with the largest total wins; ties break to the lexicographically
/// smallest label, so the outcome is deterministic.
pub fn ml_decode(
    report: &CodeReport,
    noise: &NoiseModel,
    syndrome_bits: &[u32],
) -> Result<DecodeOutcome> {
    let d = report.stabilizers.modulus();
    if noise.dimension() != d.get() {
        return Err(Error::ModulusMismatch(noise.dimension(), d.get()));
    }
    let k = report.logical_pairs.len();
    let mut span_rows = report.stabilizers.rows_pauli();
    span_rows.extend(report.gauge.iter().cloned());
    enumeration_cost(d.get(), span_rows.len() + 2 * k)?;
    let classes = (d.get() as u64).pow(2 * k as u32);

    let pure = pure_error(report, syndrome_bits)?;
    let mut coset_probs = Vec::with_capacity(classes as usize);
    let mut best: Option<(Vec<u32>, PauliVector, f64)> = None;
    for index in 0..classes {
        let label = mixed_radix(index, 2 * k, d.get());
        let mut base = pure.clone();
        for (i, pair) in report.logical_pairs.iter().enumerate() {
            base = base.mul(&pair.x.representation.pow(label[2 * i]))?;
            base = base.mul(&pair.z.representation.pow(label[2 * i + 1]))?;
        }
        let mut total = 0.0;
        for_each_span(&span_rows, report.n, d, |s| {
            total += noise.probability(&base.mul(s)?);
            Ok(())
        })?;
        if best.as_ref().is_none_or(|(_, _, t)| total > *t) {
            best = Some((label.clone(), base.clone(), total));
        }
        coset_probs.push((label, total));
    }
    let (label, correction, _) = best.expect("at least the identity label exists");
    Ok(DecodeOutcome {
        syndrome: syndrome_bits.to_vec(),
        label,
        correction,
        coset_probs,
        success: None,
    })
}

/// Decode a known error and record whether the correction undoes it.
///
/// Success means correction * error^{-1} lies in the stabilizer group
/// extended by gauge: zero syndrome and zero logical label.
pub fn decode_error(
    report: &CodeReport,
    noise: &NoiseModel,
    error: &PauliVector,
) -> Result<DecodeOutcome> {
    let s = syndrome(report, error)?;
    let mut out = ml_decode(report, noise, &s)?;
    let d = report.stabilizers.modulus();
    let quotient = out.correction.mul(&error.pow(d.neg(1)))?;
    let class = logical_class(report, &quotient)?;
    out.success = Some(class.iter().all(|&c| c == 0));
    Ok(out)
}

/// Estimated failure rate with a 95% Wilson confidence interval.
#[derive(Debug, Clone)]
pub struct MonteCarloReport {
    /// Noise strength, echoed for the CSV.
    pub p: f64,
    pub trials: u64,
    pub failures: u64,
    pub rate: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

impl MonteCarloReport {
    pub fn csv_header() -> &'static str {
        "p,trials,failures,rate,ci_low,ci_high"
    }

    pub fn csv_line(&self) -> String {
        format!(
            "{},{},{},{},{},{}",
            self.p, self.trials, self.failures, self.rate, self.ci_low, self.ci_high
        )
    }
}

/// Sample errors, decode each, count logical failures.
///
/// Trial t draws from stream t of a counter RNG seeded with `seed`, so runs
/// are reproducible and trials stay independent no matter how they are
/// scheduled. Decoding is deterministic per syndrome and memoized.
pub fn monte_carlo(
    report: &CodeReport,
    noise: &NoiseModel,
    trials: u64,
    seed: u64,
) -> Result<MonteCarloReport> {
    if trials == 0 {
        return Err(Error::Shape("need at least one trial".into()));
    }
    let d = report.stabilizers.modulus();
    let mut cache: HashMap<Vec<u32>, PauliVector> = HashMap::new();
    let mut failures = 0u64;
    for trial in 0..trials {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(trial);
        let error = noise.sample(report.n, &mut rng);
        let s = syndrome(report, &error)?;
        let correction = match cache.get(&s) {
            Some(c) => c.clone(),
            None => {
                let out = ml_decode(report, noise, &s)?;
                cache.insert(s.clone(), out.correction.clone());
                out.correction
            }
        };
        let quotient = correction.mul(&error.pow(d.neg(1)))?;
        if logical_class(report, &quotient)?.iter().any(|&c| c != 0) {
            failures += 1;
        }
    }
    let n = trials as f64;
    let rate = failures as f64 / n;
    let z = 1.959963984540054f64;
    let center = (rate + z * z / (2.0 * n)) / (1.0 + z * z / n);
    let half = z * (rate * (1.0 - rate) / n + z * z / (4.0 * n * n)).sqrt() / (1.0 + z * z / n);
    Ok(MonteCarloReport {
        p: noise.strength(),
        trials,
        failures,
        rate,
        ci_low: (center - half).max(0.0),
        ci_high: (center + half).min(1.0),
    })
}

/// Sparse indicator tensor of every physical Pauli string representing one
/// logical operator, for qubit codes. One 4-valued index per physical leg:
/// 0 identity, 1 X, 2 Y, 3 Z.
#[derive(Debug, Clone)]
pub struct TLTensor {
    /// Which logical operator, alternating (a_1, b_1, ...) exponents.
    pub label: Vec<u32>,
    /// Physical leg count, the tensor order.
    pub n: usize,
    /// Index tuples set to one, sorted.
    pub entries: Vec<Vec<u8>>,
}

impl TLTensor {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// One entry per line, the n index digits concatenated.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for entry in &self.entries {
            for &g in entry {
                out.push(char::from(b'0' + g));
            }
            out.push('\n');
        }
        out
    }
}

fn tuple_digit(x: u32, z: u32) -> u8 {
    match (x & 1, z & 1) {
        (0, 0) => 0,
        (1, 0) => 1,
        (1, 1) => 2,
        _ => 3,
    }
}

fn tl_for_label(report: &CodeReport, label: &[u32]) -> Result<TLTensor> {
    let d = report.stabilizers.modulus();
    let mut base = PauliVector::identity(report.n, d);
    for (i, pair) in report.logical_pairs.iter().enumerate() {
        base = base.mul(&pair.x.representation.pow(label[2 * i]))?;
        base = base.mul(&pair.z.representation.pow(label[2 * i + 1]))?;
    }
    let mut span_rows = report.stabilizers.rows_pauli();
    span_rows.extend(report.gauge.iter().cloned());
    enumeration_cost(2, span_rows.len())?;
    let mut set = BTreeSet::new();
    for_each_span(&span_rows, report.n, d, |s| {
        let rep = base.mul(s)?;
        set.insert((0..report.n).map(|l| tuple_digit(rep.x(l), rep.z(l))).collect::<Vec<u8>>());
        Ok(())
    })?;
    Ok(TLTensor {
        label: label.to_vec(),
        n: report.n,
        entries: set.into_iter().collect(),
    })
}

fn require_qubits(report: &CodeReport) -> Result<()> {
    if report.stabilizers.modulus().get() != 2 {
        return Err(Error::Unsupported(
            "indicator tensors are defined for qubit codes".into(),
        ));
    }
    Ok(())
}

/// Indicator tensor of one logical operator, given as a Pauli on the
/// logical legs. The action is resolved into pair exponents (modulo
/// constraints), then every stabilizer-equivalent physical representative
/// is enumerated; an [[n,k]] code yields exactly 2^(n-k) entries.
pub fn export_tl(report: &CodeReport, logical: &PauliVector) -> Result<TLTensor> {
    require_qubits(report)?;
    let d = report.stabilizers.modulus();
    let legs = report.logical_legs.len();
    if logical.n_legs() != legs {
        return Err(Error::Shape(format!(
            "logical acts on {} legs, code has {} logical legs",
            logical.n_legs(),
            legs
        )));
    }
    let k = report.logical_pairs.len();
    let mut actions = FieldMatrix::zeros(0, 2 * legs, d);
    for pair in &report.logical_pairs {
        actions.push_row(&pair.x.action.to_row());
        actions.push_row(&pair.z.action.to_row());
    }
    for row in report.constraints.rows_pauli() {
        actions.push_row(&row.to_row());
    }
    let coeffs = actions
        .solve(&logical.to_row())
        .ok_or(Error::NotInRowSpace)?;
    tl_for_label(report, &coeffs[..2 * k])
}

/// Indicator tensors for all 4^k logical labels of a qubit code, in
/// lexicographic label order. The tensors are pairwise disjoint and their
/// entry counts add up to 2^(n+k): together they index the full normalizer.
pub fn export_tl_family(report: &CodeReport) -> Result<Vec<TLTensor>> {
    require_qubits(report)?;
    let k = report.logical_pairs.len();
    enumeration_cost(2, report.stabilizers.rank() + report.gauge.len() + 2 * k)?;
    (0..1u64 << (2 * k))
        .map(|index| tl_for_label(report, &mixed_radix(index, 2 * k, 2)))
        .collect()
}
