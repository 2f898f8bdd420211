//! Dense linear algebra over the prime field used for check-matrix entries.
//!
//! Everything downstream (symplectic products, tracing, extraction) reduces
//! to row reduction, kernels and row-space solves over GF(d), so those live
//! here with no quantum vocabulary attached.

use crate::{Error, Result};

/// A prime modulus d. Entries of all vectors and matrices are canonical
/// residues in 0..d.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub struct FieldModulus(u32);

impl FieldModulus {
    pub fn new(d: u32) -> Result<Self> {
        if d < 2 || !is_prime(d) {
            return Err(Error::NotPrime(d));
        }
        Ok(FieldModulus(d))
    }

    pub fn get(self) -> u32 {
        self.0
    }

    #[inline]
    pub fn reduce(self, v: i64) -> u32 {
        let d = self.0 as i64;
        (((v % d) + d) % d) as u32
    }

    #[inline]
    pub fn add(self, a: u32, b: u32) -> u32 {
        let s = a + b;
        if s >= self.0 {
            s - self.0
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(self, a: u32, b: u32) -> u32 {
        if a >= b {
            a - b
        } else {
            a + self.0 - b
        }
    }

    #[inline]
    pub fn neg(self, a: u32) -> u32 {
        if a == 0 {
            0
        } else {
            self.0 - a
        }
    }

    #[inline]
    pub fn mul(self, a: u32, b: u32) -> u32 {
        ((a as u64 * b as u64) % self.0 as u64) as u32
    }

    /// Multiplicative inverse by Fermat's little theorem. a must be nonzero.
    pub fn inv(self, a: u32) -> u32 {
        assert!(!a.is_multiple_of(self.0), "inverse of zero");
        self.pow(a, self.0 - 2)
    }

    pub fn pow(self, base: u32, mut exp: u32) -> u32 {
        let mut acc: u64 = 1;
        let d = self.0 as u64;
        let mut b = base as u64 % d;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc * b % d;
            }
            b = b * b % d;
            exp >>= 1;
        }
        acc as u32
    }
}

fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut p = 2u32;
    while (p as u64) * (p as u64) <= n as u64 {
        if n.is_multiple_of(p) {
            return false;
        }
        p += 1;
    }
    true
}

/// Row-major dense matrix over GF(d).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldMatrix {
    rows: usize,
    cols: usize,
    data: Vec<u32>,
    modulus: FieldModulus,
}

/// Result of row reduction: the reduced matrix has its zero rows removed,
/// so `matrix.rows() == rank`.
#[derive(Debug, Clone)]
pub struct Reduced {
    pub matrix: FieldMatrix,
    pub pivots: Vec<usize>,
}

impl FieldMatrix {
    pub fn zeros(rows: usize, cols: usize, modulus: FieldModulus) -> Self {
        FieldMatrix {
            rows,
            cols,
            data: vec![0; rows * cols],
            modulus,
        }
    }

    pub fn identity(n: usize, modulus: FieldModulus) -> Self {
        let mut m = Self::zeros(n, n, modulus);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    pub fn from_rows(rows: &[Vec<u32>], cols: usize, modulus: FieldModulus) -> Result<Self> {
        let mut m = Self::zeros(rows.len(), cols, modulus);
        for (i, r) in rows.iter().enumerate() {
            if r.len() != cols {
                return Err(Error::Shape(format!(
                    "row {} has {} entries, expected {}",
                    i,
                    r.len(),
                    cols
                )));
            }
            for (j, &v) in r.iter().enumerate() {
                m.set(i, j, v % modulus.get());
            }
        }
        Ok(m)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn modulus(&self) -> FieldModulus {
        self.modulus
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> u32 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: u32) {
        self.data[r * self.cols + c] = v % self.modulus.get();
    }

    pub fn row(&self, r: usize) -> &[u32] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_vec(&self, r: usize) -> Vec<u32> {
        self.row(r).to_vec()
    }

    pub fn push_row(&mut self, row: &[u32]) {
        assert_eq!(row.len(), self.cols);
        let d = self.modulus.get();
        self.data.extend(row.iter().map(|&v| v % d));
        self.rows += 1;
    }

    /// Stack other below self.
    pub fn vstack(&self, other: &FieldMatrix) -> Result<FieldMatrix> {
        if self.cols != other.cols {
            return Err(Error::Shape("vstack column mismatch".into()));
        }
        if self.modulus != other.modulus {
            return Err(Error::ModulusMismatch(
                self.modulus.get(),
                other.modulus.get(),
            ));
        }
        let mut m = self.clone();
        m.data.extend_from_slice(&other.data);
        m.rows += other.rows;
        Ok(m)
    }

    pub fn transpose(&self) -> FieldMatrix {
        let mut t = FieldMatrix::zeros(self.cols, self.rows, self.modulus);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.set(c, r, self.get(r, c));
            }
        }
        t
    }

    /// self * other.
    pub fn matmul(&self, other: &FieldMatrix) -> Result<FieldMatrix> {
        if self.cols != other.rows {
            return Err(Error::Shape("matmul inner dimension mismatch".into()));
        }
        let d = self.modulus.get() as u64;
        let mut out = FieldMatrix::zeros(self.rows, other.cols, self.modulus);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k) as u64;
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    let cur = out.data[i * other.cols + j] as u64;
                    out.data[i * other.cols + j] = ((cur + a * other.get(k, j) as u64) % d) as u32;
                }
            }
        }
        Ok(out)
    }

    /// Apply a coefficient vector to the rows: c * self.
    pub fn combine_rows(&self, coeffs: &[u32]) -> Vec<u32> {
        assert_eq!(coeffs.len(), self.rows);
        let d = self.modulus.get() as u64;
        let mut out = vec![0u64; self.cols];
        for (i, &c) in coeffs.iter().enumerate() {
            if c == 0 {
                continue;
            }
            let row = self.row(i);
            for (o, &v) in out.iter_mut().zip(row.iter()) {
                *o = (*o + c as u64 * v as u64) % d;
            }
        }
        out.into_iter().map(|v| v as u32).collect()
    }

    /// Keep only the listed columns, in the given order.
    pub fn select_cols(&self, cols: &[usize]) -> FieldMatrix {
        let mut m = FieldMatrix::zeros(self.rows, cols.len(), self.modulus);
        for r in 0..self.rows {
            for (j, &c) in cols.iter().enumerate() {
                m.set(r, j, self.get(r, c));
            }
        }
        m
    }

    /// Drop the listed columns.
    pub fn delete_cols(&self, drop: &[usize]) -> FieldMatrix {
        let keep: Vec<usize> = (0..self.cols).filter(|c| !drop.contains(c)).collect();
        self.select_cols(&keep)
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&v| v == 0)
    }

    /// Reduced row echelon form with zero rows removed.
    pub fn rref(&self) -> Reduced {
        let (reduced, pivots, _) = rref_impl(self, false);
        Reduced {
            matrix: reduced,
            pivots,
        }
    }

    /// Like `rref`, but also returns the transform T with
    /// T * self == reduced (row-for-row, zero rows removed).
    pub fn rref_tracked(&self) -> (Reduced, FieldMatrix) {
        let (reduced, pivots, transform) = rref_impl(self, true);
        (
            Reduced {
                matrix: reduced,
                pivots,
            },
            transform.expect("transform requested"),
        )
    }

    pub fn rank(&self) -> usize {
        self.rref().matrix.rows
    }

    /// Basis for the right kernel {v : self * v = 0}, one basis vector per row.
    pub fn kernel(&self) -> FieldMatrix {
        let d = self.modulus;
        let red = self.rref();
        let pivots = &red.pivots;
        let is_pivot: Vec<bool> = {
            let mut v = vec![false; self.cols];
            for &p in pivots {
                v[p] = true;
            }
            v
        };
        let free: Vec<usize> = (0..self.cols).filter(|&c| !is_pivot[c]).collect();
        let mut basis = FieldMatrix::zeros(free.len(), self.cols, d);
        for (bi, &f) in free.iter().enumerate() {
            basis.set(bi, f, 1);
            for (ri, &p) in pivots.iter().enumerate() {
                basis.set(bi, p, d.neg(red.matrix.get(ri, f)));
            }
        }
        basis
    }

    /// Solve x * self == b for a coefficient vector x over the rows.
    /// Returns None when b is outside the row space.
    pub fn solve(&self, b: &[u32]) -> Option<Vec<u32>> {
        assert_eq!(b.len(), self.cols, "solve target length must equal cols");
        let d = self.modulus;
        // Row-reduce self while accumulating the same operations on an
        // identity block, then express b over the reduced rows.
        let (red, transform) = self.rref_tracked();
        let mut residue: Vec<u32> = b.iter().map(|&v| v % d.get()).collect();
        let mut coeff_reduced = vec![0u32; red.matrix.rows()];
        for (ri, &p) in red.pivots.iter().enumerate() {
            let c = residue[p];
            if c != 0 {
                coeff_reduced[ri] = c;
                let row = red.matrix.row(ri);
                for (x, &v) in residue.iter_mut().zip(row.iter()) {
                    *x = d.sub(*x, d.mul(c, v));
                }
            }
        }
        if residue.iter().any(|&v| v != 0) {
            return None;
        }
        // Pull the coefficients back through the reduction transform.
        let mut x = vec![0u32; self.rows];
        for (ri, &c) in coeff_reduced.iter().enumerate() {
            if c == 0 {
                continue;
            }
            for (xi, v) in x.iter_mut().enumerate() {
                *v = d.add(*v, d.mul(c, transform.get(ri, xi)));
            }
        }
        Some(x)
    }

    /// True when v lies in the row space.
    pub fn row_space_contains(&self, v: &[u32]) -> bool {
        self.solve(v).is_some()
    }

    /// True when both matrices span the same row space.
    pub fn row_space_equal(&self, other: &FieldMatrix) -> bool {
        if self.cols != other.cols || self.modulus != other.modulus {
            return false;
        }
        self.rref().matrix == other.rref().matrix
    }
}

fn rref_impl(
    m: &FieldMatrix,
    track: bool,
) -> (FieldMatrix, Vec<usize>, Option<FieldMatrix>) {
    let d = m.modulus;
    let mut a = m.clone();
    let mut t = if track {
        Some(FieldMatrix::identity(m.rows, d))
    } else {
        None
    };
    let mut pivots = Vec::new();
    let mut pivot_row = 0usize;
    for col in 0..a.cols {
        if pivot_row == a.rows {
            break;
        }
        let Some(src) = (pivot_row..a.rows).find(|&r| a.get(r, col) != 0) else {
            continue;
        };
        swap_rows(&mut a, pivot_row, src);
        if let Some(t) = t.as_mut() {
            swap_rows(t, pivot_row, src);
        }
        let inv = d.inv(a.get(pivot_row, col));
        if inv != 1 {
            scale_row(&mut a, pivot_row, inv);
            if let Some(t) = t.as_mut() {
                scale_row(t, pivot_row, inv);
            }
        }
        for r in 0..a.rows {
            if r == pivot_row {
                continue;
            }
            let f = a.get(r, col);
            if f == 0 {
                continue;
            }
            let nf = d.neg(f);
            add_scaled_row(&mut a, r, pivot_row, nf);
            if let Some(t) = t.as_mut() {
                add_scaled_row(t, r, pivot_row, nf);
            }
        }
        pivots.push(col);
        pivot_row += 1;
    }
    // Drop zero rows (all rows from pivot_row down are zero by construction).
    let rank = pivots.len();
    a.data.truncate(rank * a.cols);
    a.rows = rank;
    let t = t.map(|mut t| {
        t.data.truncate(rank * t.cols);
        t.rows = rank;
        t
    });
    (a, pivots, t)
}

fn swap_rows(m: &mut FieldMatrix, a: usize, b: usize) {
    if a == b {
        return;
    }
    let cols = m.cols;
    let (lo, hi) = if a < b { (a, b) } else { (b, a) };
    let (head, tail) = m.data.split_at_mut(hi * cols);
    head[lo * cols..(lo + 1) * cols].swap_with_slice(&mut tail[..cols]);
}

fn scale_row(m: &mut FieldMatrix, r: usize, f: u32) {
    let d = m.modulus;
    let cols = m.cols;
    for v in &mut m.data[r * cols..(r + 1) * cols] {
        *v = d.mul(*v, f);
    }
}

/// row r += f * row src.
fn add_scaled_row(m: &mut FieldMatrix, r: usize, src: usize, f: u32) {
    let d = m.modulus;
    let cols = m.cols;
    let (r_slice, src_slice) = if r < src {
        let (head, tail) = m.data.split_at_mut(src * cols);
        (&mut head[r * cols..(r + 1) * cols], &tail[..cols])
    } else {
        let (head, tail) = m.data.split_at_mut(r * cols);
        (&mut tail[..cols], &head[src * cols..(src + 1) * cols])
    };
    for (x, &s) in r_slice.iter_mut().zip(src_slice.iter()) {
        *x = d.add(*x, d.mul(f, s));
    }
}
