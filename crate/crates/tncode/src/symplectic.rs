//! Pauli vectors and check matrices over prime-dimension qudits.
//!
//! A Pauli on n legs is stored phase-free as exponent vectors (x|z): leg i
//! carries X^{x_i} Z^{z_i}. A check matrix is a set of pairwise commuting
//! Paulis, canonicalized by row reduction on construction so that equal row
//! spaces compare equal. No operator phases are tracked anywhere.

use crate::fieldvec::{FieldMatrix, FieldModulus};
use crate::{Error, Result};

/// Phase-free Pauli operator on a fixed number of legs.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PauliVector {
    x: Vec<u32>,
    z: Vec<u32>,
    modulus: FieldModulus,
}

impl PauliVector {
    pub fn identity(n_legs: usize, modulus: FieldModulus) -> Self {
        PauliVector {
            x: vec![0; n_legs],
            z: vec![0; n_legs],
            modulus,
        }
    }

    pub fn from_xz(x: Vec<u32>, z: Vec<u32>, modulus: FieldModulus) -> Result<Self> {
        if x.len() != z.len() {
            return Err(Error::Shape("x and z exponent lengths differ".into()));
        }
        let d = modulus.get();
        Ok(PauliVector {
            x: x.into_iter().map(|v| v % d).collect(),
            z: z.into_iter().map(|v| v % d).collect(),
            modulus,
        })
    }

    /// Split a (x_0..x_{n-1} | z_0..z_{n-1}) row into a Pauli.
    pub fn from_row(row: &[u32], modulus: FieldModulus) -> Self {
        assert!(row.len().is_multiple_of(2));
        let n = row.len() / 2;
        PauliVector {
            x: row[..n].to_vec(),
            z: row[n..].to_vec(),
            modulus,
        }
    }

    /// Concatenate into the (x | z) row layout.
    pub fn to_row(&self) -> Vec<u32> {
        let mut row = self.x.clone();
        row.extend_from_slice(&self.z);
        row
    }

    pub fn n_legs(&self) -> usize {
        self.x.len()
    }

    pub fn modulus(&self) -> FieldModulus {
        self.modulus
    }

    pub fn x(&self, leg: usize) -> u32 {
        self.x[leg]
    }

    pub fn z(&self, leg: usize) -> u32 {
        self.z[leg]
    }

    pub fn set_leg(&mut self, leg: usize, x: u32, z: u32) {
        let d = self.modulus.get();
        self.x[leg] = x % d;
        self.z[leg] = z % d;
    }

    pub fn is_identity(&self) -> bool {
        self.x.iter().all(|&v| v == 0) && self.z.iter().all(|&v| v == 0)
    }

    /// Number of legs acted on non-trivially.
    pub fn weight(&self) -> usize {
        (0..self.n_legs())
            .filter(|&i| self.x[i] != 0 || self.z[i] != 0)
            .count()
    }

    /// Legs acted on non-trivially.
    pub fn support(&self) -> Vec<usize> {
        (0..self.n_legs())
            .filter(|&i| self.x[i] != 0 || self.z[i] != 0)
            .collect()
    }

    /// Phase-free product: exponents add componentwise.
    pub fn mul(&self, other: &PauliVector) -> Result<PauliVector> {
        if self.modulus != other.modulus {
            return Err(Error::ModulusMismatch(
                self.modulus.get(),
                other.modulus.get(),
            ));
        }
        if self.n_legs() != other.n_legs() {
            return Err(Error::Shape("pauli leg counts differ".into()));
        }
        let d = self.modulus;
        Ok(PauliVector {
            x: self
                .x
                .iter()
                .zip(&other.x)
                .map(|(&a, &b)| d.add(a, b))
                .collect(),
            z: self
                .z
                .iter()
                .zip(&other.z)
                .map(|(&a, &b)| d.add(a, b))
                .collect(),
            modulus: self.modulus,
        })
    }

    /// Raise to an integer power (componentwise exponent scaling).
    pub fn pow(&self, k: u32) -> PauliVector {
        let d = self.modulus;
        PauliVector {
            x: self.x.iter().map(|&a| d.mul(a, k % d.get())).collect(),
            z: self.z.iter().map(|&a| d.mul(a, k % d.get())).collect(),
            modulus: self.modulus,
        }
    }

    /// Keep only the listed legs, in order.
    pub fn restrict(&self, legs: &[usize]) -> PauliVector {
        PauliVector {
            x: legs.iter().map(|&l| self.x[l]).collect(),
            z: legs.iter().map(|&l| self.z[l]).collect(),
            modulus: self.modulus,
        }
    }
}

/// Sum over legs of x_p z_q - z_p x_q, mod d. Zero exactly when the two
/// operators commute.
pub fn symplectic_product(p: &PauliVector, q: &PauliVector) -> Result<u32> {
    if p.modulus != q.modulus {
        return Err(Error::ModulusMismatch(p.modulus.get(), q.modulus.get()));
    }
    if p.n_legs() != q.n_legs() {
        return Err(Error::Shape("pauli leg counts differ".into()));
    }
    let d = p.modulus;
    let mut acc = 0u32;
    for i in 0..p.n_legs() {
        let term = d.sub(d.mul(p.x[i], q.z[i]), d.mul(p.z[i], q.x[i]));
        acc = d.add(acc, term);
    }
    Ok(acc)
}

fn symplectic_product_rows(a: &[u32], b: &[u32], n: usize, d: FieldModulus) -> u32 {
    let mut acc = 0u32;
    for i in 0..n {
        let term = d.sub(d.mul(a[i], b[n + i]), d.mul(a[n + i], b[i]));
        acc = d.add(acc, term);
    }
    acc
}

/// Parse a Pauli string. For d = 2 the format is one of I, X, Y, Z per leg.
/// For any d the token format `x<a>z<b>` joined by `;` is accepted, e.g.
/// `x1z0;x0z2` (two legs).
pub fn parse_pauli(s: &str, modulus: FieldModulus) -> Result<PauliVector> {
    let d = modulus.get();
    let bad = |reason: &str| Error::PauliParse {
        input: s.to_string(),
        reason: reason.to_string(),
    };
    if s.contains('x') || s.contains(';') {
        if s.is_empty() {
            return Ok(PauliVector::identity(0, modulus));
        }
        let mut xs = Vec::new();
        let mut zs = Vec::new();
        for tok in s.split(';') {
            let rest = tok
                .strip_prefix('x')
                .ok_or_else(|| bad("token must start with x"))?;
            let zpos = rest.find('z').ok_or_else(|| bad("token missing z"))?;
            let (a, b) = rest.split_at(zpos);
            let a: u32 = a.parse().map_err(|_| bad("bad x exponent"))?;
            let b: u32 = b[1..].parse().map_err(|_| bad("bad z exponent"))?;
            if a >= d || b >= d {
                return Err(bad("exponent out of range for modulus"));
            }
            xs.push(a);
            zs.push(b);
        }
        return PauliVector::from_xz(xs, zs, modulus);
    }
    if d != 2 {
        return Err(bad("single-letter form is only defined for d = 2"));
    }
    let mut xs = Vec::new();
    let mut zs = Vec::new();
    for c in s.chars() {
        let (x, z) = match c {
            'I' => (0, 0),
            'X' => (1, 0),
            'Z' => (0, 1),
            'Y' => (1, 1),
            _ => return Err(bad("expected one of I, X, Y, Z")),
        };
        xs.push(x);
        zs.push(z);
    }
    PauliVector::from_xz(xs, zs, modulus)
}

/// Print a Pauli in the format `parse_pauli` accepts for its modulus.
pub fn print_pauli(p: &PauliVector) -> String {
    if p.modulus.get() == 2 {
        (0..p.n_legs())
            .map(|i| match (p.x[i], p.z[i]) {
                (0, 0) => 'I',
                (1, 0) => 'X',
                (0, 1) => 'Z',
                _ => 'Y',
            })
            .collect()
    } else {
        (0..p.n_legs())
            .map(|i| format!("x{}z{}", p.x[i], p.z[i]))
            .collect::<Vec<_>>()
            .join(";")
    }
}

/// Pairwise-commuting set of Paulis in reduced row echelon form.
///
/// Construction canonicalizes by row reduction; the original generator order
/// is not preserved, but the row space is, so two check matrices with the
/// same row space are equal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckMatrix {
    n_legs: usize,
    mat: FieldMatrix,
}

impl CheckMatrix {
    /// Validates that the rows pairwise commute, then canonicalizes.
    pub fn new(rows: Vec<PauliVector>, n_legs: usize, modulus: FieldModulus) -> Result<Self> {
        let mut m = FieldMatrix::zeros(0, 2 * n_legs, modulus);
        for (i, p) in rows.iter().enumerate() {
            if p.modulus() != modulus {
                return Err(Error::ModulusMismatch(modulus.get(), p.modulus().get()));
            }
            if p.n_legs() != n_legs {
                return Err(Error::Shape(format!(
                    "row {} has {} legs, expected {}",
                    i,
                    p.n_legs(),
                    n_legs
                )));
            }
            m.push_row(&p.to_row());
        }
        Self::from_rows_matrix(m, n_legs)
    }

    /// Build from a raw (x | z) row matrix, validating commutation.
    pub fn from_rows_matrix(mat: FieldMatrix, n_legs: usize) -> Result<Self> {
        if mat.cols() != 2 * n_legs {
            return Err(Error::Shape(format!(
                "check matrix needs {} columns, got {}",
                2 * n_legs,
                mat.cols()
            )));
        }
        let d = mat.modulus();
        for i in 0..mat.rows() {
            for j in (i + 1)..mat.rows() {
                let s = symplectic_product_rows(mat.row(i), mat.row(j), n_legs, d);
                if s != 0 {
                    return Err(Error::NonCommuting(i, j, s));
                }
            }
        }
        Ok(Self::from_commuting_matrix(mat, n_legs))
    }

    /// Internal constructor for matrices already known to be commuting
    /// (for example linear combinations of rows of a valid check matrix).
    pub(crate) fn from_commuting_matrix(mat: FieldMatrix, n_legs: usize) -> Self {
        CheckMatrix {
            n_legs,
            mat: mat.rref().matrix,
        }
    }

    pub fn n_legs(&self) -> usize {
        self.n_legs
    }

    pub fn modulus(&self) -> FieldModulus {
        self.mat.modulus()
    }

    pub fn rank(&self) -> usize {
        self.mat.rows()
    }

    pub fn matrix(&self) -> &FieldMatrix {
        &self.mat
    }

    pub fn row_pauli(&self, r: usize) -> PauliVector {
        PauliVector::from_row(self.mat.row(r), self.mat.modulus())
    }

    pub fn rows_pauli(&self) -> Vec<PauliVector> {
        (0..self.rank()).map(|r| self.row_pauli(r)).collect()
    }

    /// True when the Pauli lies in the row space.
    pub fn contains(&self, p: &PauliVector) -> bool {
        p.n_legs() == self.n_legs
            && p.modulus() == self.modulus()
            && self.mat.row_space_contains(&p.to_row())
    }

    pub fn row_space_equal(&self, other: &CheckMatrix) -> bool {
        self.n_legs == other.n_legs && self.mat == other.mat
    }

    /// Direct sum: self's legs first, then other's.
    pub fn direct_sum(&self, other: &CheckMatrix) -> Result<CheckMatrix> {
        if self.modulus() != other.modulus() {
            return Err(Error::ModulusMismatch(
                self.modulus().get(),
                other.modulus().get(),
            ));
        }
        let n = self.n_legs + other.n_legs;
        let d = self.modulus();
        let mut m = FieldMatrix::zeros(0, 2 * n, d);
        for r in 0..self.rank() {
            let row = self.mat.row(r);
            let mut v = vec![0u32; 2 * n];
            v[..self.n_legs].copy_from_slice(&row[..self.n_legs]);
            v[n..n + self.n_legs].copy_from_slice(&row[self.n_legs..]);
            m.push_row(&v);
        }
        for r in 0..other.rank() {
            let row = other.mat.row(r);
            let mut v = vec![0u32; 2 * n];
            v[self.n_legs..n].copy_from_slice(&row[..other.n_legs]);
            v[n + self.n_legs..].copy_from_slice(&row[other.n_legs..]);
            m.push_row(&v);
        }
        Ok(CheckMatrix::from_commuting_matrix(m, n))
    }

    /// Reorder legs: new leg i is old leg perm[i].
    pub fn permute_legs(&self, perm: &[usize]) -> Result<CheckMatrix> {
        if perm.len() != self.n_legs {
            return Err(Error::Shape("permutation length mismatch".into()));
        }
        let mut cols = Vec::with_capacity(2 * self.n_legs);
        cols.extend(perm.iter().copied());
        cols.extend(perm.iter().map(|&p| p + self.n_legs));
        Ok(CheckMatrix::from_commuting_matrix(
            self.mat.select_cols(&cols),
            self.n_legs,
        ))
    }

    /// Rank of the subgroup of the row space supported entirely inside
    /// `legs` (every element zero outside the region).
    pub fn subgroup_rank_within(&self, legs: &[usize]) -> usize {
        let outside: Vec<usize> = (0..self.n_legs).filter(|l| !legs.contains(l)).collect();
        let mut cols = Vec::with_capacity(2 * outside.len());
        cols.extend(outside.iter().copied());
        cols.extend(outside.iter().map(|&l| l + self.n_legs));
        let restricted = self.mat.select_cols(&cols);
        // Coefficient vectors that vanish outside the region; since the rows
        // are independent after canonicalization, the kernel dimension is the
        // subgroup rank.
        restricted.transpose().kernel().rows()
    }

    /// Basis of the subgroup supported inside `legs`, restricted to those legs.
    pub fn subgroup_within(&self, legs: &[usize]) -> Vec<PauliVector> {
        let outside: Vec<usize> = (0..self.n_legs).filter(|l| !legs.contains(l)).collect();
        let mut cols = Vec::with_capacity(2 * outside.len());
        cols.extend(outside.iter().copied());
        cols.extend(outside.iter().map(|&l| l + self.n_legs));
        let restricted = self.mat.select_cols(&cols);
        let coeffs = restricted.transpose().kernel();
        (0..coeffs.rows())
            .map(|r| {
                let full = self.mat.combine_rows(coeffs.row(r));
                PauliVector::from_row(&full, self.modulus()).restrict(legs)
            })
            .collect()
    }

    /// Splits the row space into pure-X and pure-Z parts; true when they
    /// together span everything.
    pub fn is_css(&self) -> bool {
        let (x_rank, z_rank) = self.css_part_ranks();
        x_rank + z_rank == self.rank()
    }

    /// CSS with the X-part supports spanning the same classical code as the
    /// Z-part supports.
    pub fn is_self_dual_css(&self) -> bool {
        if !self.is_css() {
            return false;
        }
        let (x_part, z_part) = self.css_parts();
        let xm = pauli_block(&x_part, self.n_legs, self.modulus(), true);
        let zm = pauli_block(&z_part, self.n_legs, self.modulus(), false);
        xm.row_space_equal(&zm)
    }

    fn css_part_ranks(&self) -> (usize, usize) {
        let n = self.n_legs;
        let x_cols: Vec<usize> = (0..n).collect();
        let z_cols: Vec<usize> = (n..2 * n).collect();
        let hx = self.mat.select_cols(&x_cols);
        let hz = self.mat.select_cols(&z_cols);
        // Pure-X elements are combinations whose z-part vanishes; their count
        // is the kernel dimension of the z-block acting on coefficients.
        let pure_x = hz.transpose().kernel().rows();
        let pure_z = hx.transpose().kernel().rows();
        (pure_x, pure_z)
    }

    /// Bases for the pure-X and pure-Z subgroups of the row space.
    pub fn css_parts(&self) -> (Vec<PauliVector>, Vec<PauliVector>) {
        let n = self.n_legs;
        let d = self.modulus();
        let hx = self.mat.select_cols(&(0..n).collect::<Vec<_>>());
        let hz = self.mat.select_cols(&(n..2 * n).collect::<Vec<_>>());
        let x_coeffs = hz.transpose().kernel();
        let z_coeffs = hx.transpose().kernel();
        let build = |coeffs: &FieldMatrix| -> Vec<PauliVector> {
            (0..coeffs.rows())
                .map(|r| PauliVector::from_row(&self.mat.combine_rows(coeffs.row(r)), d))
                .collect()
        };
        (build(&x_coeffs), build(&z_coeffs))
    }
}

fn pauli_block(
    paulis: &[PauliVector],
    n_legs: usize,
    d: FieldModulus,
    x_part: bool,
) -> FieldMatrix {
    let mut m = FieldMatrix::zeros(0, n_legs, d);
    for p in paulis {
        let row: Vec<u32> = (0..n_legs)
            .map(|l| if x_part { p.x(l) } else { p.z(l) })
            .collect();
        m.push_row(&row);
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(d: u32) -> FieldModulus {
        FieldModulus::new(d).unwrap()
    }

    fn pv(s: &str) -> PauliVector {
        parse_pauli(s, f(2)).unwrap()
    }

    #[test]
    fn single_leg_products() {
        let d2 = f(2);
        let x = parse_pauli("XI", d2).unwrap();
        let z = parse_pauli("ZI", d2).unwrap();
        assert_eq!(symplectic_product(&x, &z).unwrap(), 1);
        assert_eq!(symplectic_product(&z, &x).unwrap(), 1);

        let d5 = f(5);
        let x = parse_pauli("x1z0", d5).unwrap();
        let z = parse_pauli("x0z1", d5).unwrap();
        // x*z' - z*x' = 1 on one leg; the reverse order gives -1 = 4.
        assert_eq!(symplectic_product(&x, &z).unwrap(), 1);
        assert_eq!(symplectic_product(&z, &x).unwrap(), 4);
    }

    #[test]
    fn commuting_examples() {
        let d2 = f(2);
        let a = parse_pauli("XX", d2).unwrap();
        let b = parse_pauli("ZZ", d2).unwrap();
        assert_eq!(symplectic_product(&a, &b).unwrap(), 0);
        let y = parse_pauli("Y", d2).unwrap();
        let x = parse_pauli("X", d2).unwrap();
        assert_eq!(symplectic_product(&y, &x).unwrap(), 1);
    }

    #[test]
    fn parse_print_round_trip() {
        let d2 = f(2);
        for s in ["XIZY", "IIII", "Y", ""] {
            let p = parse_pauli(s, d2).unwrap();
            assert_eq!(print_pauli(&p), s);
        }
        let d3 = f(3);
        for s in ["x1z0;x0z2", "x2z2", "x0z0;x0z0;x1z1"] {
            let p = parse_pauli(s, d3).unwrap();
            assert_eq!(print_pauli(&p), s);
        }
    }

    #[test]
    fn parse_rejects_malformed() {
        assert!(parse_pauli("XQ", f(2)).is_err());
        assert!(parse_pauli("x1", f(3)).is_err());
        assert!(parse_pauli("x3z0", f(3)).is_err());
        assert!(parse_pauli("XYZ", f(3)).is_err());
    }

    #[test]
    fn weight_counts_nonidentity_legs() {
        assert_eq!(pv("XIZY").weight(), 3);
        assert_eq!(pv("IIII").weight(), 0);
        let p = parse_pauli("x1z2;x0z0;x0z1", f(3)).unwrap();
        assert_eq!(p.weight(), 2);
    }

    #[test]
    fn check_matrix_rejects_noncommuting() {
        let d2 = f(2);
        let err = CheckMatrix::new(vec![pv("X"), pv("Z")], 1, d2);
        assert!(matches!(err, Err(Error::NonCommuting(0, 1, 1))));
        let ok = CheckMatrix::new(vec![pv("XX"), pv("ZZ")], 2, d2).unwrap();
        assert_eq!(ok.rank(), 2);
    }

    #[test]
    fn canonical_form_ignores_generator_order() {
        let d2 = f(2);
        let a = CheckMatrix::new(vec![pv("XXXX"), pv("ZZZZ")], 4, d2).unwrap();
        let b = CheckMatrix::new(vec![pv("ZZZZ"), pv("YYYY"), pv("XXXX")], 4, d2).unwrap();
        assert!(a.row_space_equal(&b));
        assert_eq!(a, b);
    }

    #[test]
    fn css_detection() {
        let d2 = f(2);
        // Bell pair state: CSS and self-dual.
        let bell = CheckMatrix::new(vec![pv("XX"), pv("ZZ")], 2, d2).unwrap();
        assert!(bell.is_css());
        assert!(bell.is_self_dual_css());
        // Five-qubit code stabilizers: not CSS.
        let five = CheckMatrix::new(
            vec![pv("XZZXI"), pv("IXZZX"), pv("XIXZZ"), pv("ZXIXZ")],
            5,
            d2,
        )
        .unwrap();
        assert!(!five.is_css());
        assert!(!five.is_self_dual_css());
    }

    #[test]
    fn subgroup_within_region() {
        let d2 = f(2);
        let ghz = CheckMatrix::new(vec![pv("XXX"), pv("ZZI"), pv("IZZ")], 3, d2).unwrap();
        // Elements supported on legs {0,1}: ZZI only (rank 1).
        assert_eq!(ghz.subgroup_rank_within(&[0, 1]), 1);
        // Single leg: nothing.
        assert_eq!(ghz.subgroup_rank_within(&[0]), 0);
        let sub = ghz.subgroup_within(&[0, 1]);
        assert_eq!(sub.len(), 1);
        assert_eq!(print_pauli(&sub[0]), "ZZ");
    }

    #[test]
    fn direct_sum_and_permute() {
        let d2 = f(2);
        let bell = CheckMatrix::new(vec![pv("XX"), pv("ZZ")], 2, d2).unwrap();
        let sum = bell.direct_sum(&bell).unwrap();
        assert_eq!(sum.n_legs(), 4);
        assert_eq!(sum.rank(), 4);
        assert!(sum.contains(&pv("XXII")));
        assert!(sum.contains(&pv("IIZZ")));
        assert!(!sum.contains(&pv("XIXI")));
        let perm = sum.permute_legs(&[0, 2, 1, 3]).unwrap();
        assert!(perm.contains(&pv("XIXI")));
    }

    #[test]
    fn qudit_bell_state() {
        let d3 = f(3);
        let xx = parse_pauli("x1z0;x1z0", d3).unwrap();
        let zz_inv = parse_pauli("x0z1;x0z2", d3).unwrap();
        let bell = CheckMatrix::new(vec![xx, zz_inv], 2, d3).unwrap();
        assert_eq!(bell.rank(), 2);
        // Z (x) Z does not commute with X (x) X for d = 3 and is rejected.
        let zz = parse_pauli("x0z1;x0z1", d3).unwrap();
        let xx = parse_pauli("x1z0;x1z0", d3).unwrap();
        assert!(CheckMatrix::new(vec![xx, zz], 2, d3).is_err());
    }
}
