//! Random instance generators shared by the test suites.

use crate::fieldvec::{FieldMatrix, FieldModulus};
use crate::symplectic::CheckMatrix;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Random full-rank stabilizer state matrix: start from <Z_i> and apply
/// random symplectic column operations (x/z rotation on a leg, rescaling,
/// controlled additions between legs), all of which preserve commutation
/// and rank.
pub fn random_state(rng: &mut ChaCha8Rng, n: usize, d: u32) -> CheckMatrix {
    let m = FieldModulus::new(d).unwrap();
    let mut mat = FieldMatrix::zeros(n, 2 * n, m);
    for i in 0..n {
        mat.set(i, n + i, 1);
    }
    for _ in 0..(6 * n) {
        match rng.gen_range(0..3) {
            0 => {
                // Swap x and z on one leg, negating one side.
                let l = rng.gen_range(0..n);
                for r in 0..n {
                    let x = mat.get(r, l);
                    let z = mat.get(r, n + l);
                    mat.set(r, l, z);
                    mat.set(r, n + l, m.neg(x));
                }
            }
            1 => {
                // Multiply x by c, z by c^{-1} on one leg.
                let l = rng.gen_range(0..n);
                let c = rng.gen_range(1..d);
                let ci = m.inv(c);
                for r in 0..n {
                    mat.set(r, l, m.mul(mat.get(r, l), c));
                    mat.set(r, n + l, m.mul(mat.get(r, n + l), ci));
                }
            }
            _ => {
                // Controlled addition between two legs:
                // x_j += c x_i, z_i -= c z_j keeps all products intact.
                if n < 2 {
                    continue;
                }
                let i = rng.gen_range(0..n);
                let mut j = rng.gen_range(0..n);
                if i == j {
                    j = (j + 1) % n;
                }
                let c = rng.gen_range(1..d);
                for r in 0..n {
                    let xi = mat.get(r, i);
                    let zj = mat.get(r, n + j);
                    mat.set(r, j, m.add(mat.get(r, j), m.mul(c, xi)));
                    mat.set(r, n + i, m.sub(mat.get(r, n + i), m.mul(c, zj)));
                }
            }
        }
    }
    CheckMatrix::from_rows_matrix(mat, n).unwrap()
}

/// Random full-rank CSS state: a random X-type row space plus the full
/// Z-type complement (kernel of the X block), so x-rank + z-rank = n.
pub fn random_css_state(rng: &mut ChaCha8Rng, n: usize, d: u32) -> CheckMatrix {
    let m = FieldModulus::new(d).unwrap();
    let rx = rng.gen_range(0..=n);
    let mut hx = FieldMatrix::zeros(0, n, m);
    for _ in 0..rx {
        let row: Vec<u32> = (0..n).map(|_| rng.gen_range(0..d)).collect();
        hx.push_row(&row);
    }
    let hx = hx.rref().matrix;
    let hz = hx.kernel();
    let mut mat = FieldMatrix::zeros(0, 2 * n, m);
    for r in 0..hx.rows() {
        let mut row = vec![0u32; 2 * n];
        row[..n].copy_from_slice(hx.row(r));
        mat.push_row(&row);
    }
    for r in 0..hz.rows() {
        let mut row = vec![0u32; 2 * n];
        row[n..].copy_from_slice(hz.row(r));
        mat.push_row(&row);
    }
    CheckMatrix::from_rows_matrix(mat, n).unwrap()
}

/// Random full-rank self-dual CSS state: X rows span a random leg
/// permutation of a self-dual classical code G (so the mirrored Z rows span
/// the same code and the state has rank n). Needs 1 + a^2 = 0 solvable and n
/// even (d = 2, 5, ...), or n divisible by 4 otherwise (d = 3, ...).
pub fn random_self_dual_state(rng: &mut ChaCha8Rng, n: usize, d: u32) -> CheckMatrix {
    let m = FieldModulus::new(d).unwrap();
    let a_opt = (0..d).find(|&a| m.add(1, m.mul(a, a)) == 0);
    let mut gx = FieldMatrix::zeros(0, n, m);
    let mut filled = 0usize;
    while filled < n {
        if let Some(a) = a_opt {
            assert!(filled + 2 <= n, "need even n for this modulus");
            let mut row = vec![0u32; n];
            row[filled] = 1;
            row[filled + 1] = a;
            gx.push_row(&row);
            filled += 2;
        } else {
            assert!(filled + 4 <= n, "need n divisible by 4 for this modulus");
            // [[1,0,1,1],[0,1,1,-1]] is self-orthogonal with self-dual span.
            let mut r1 = vec![0u32; n];
            let mut r2 = vec![0u32; n];
            r1[filled] = 1;
            r1[filled + 2] = 1;
            r1[filled + 3] = 1;
            r2[filled + 1] = 1;
            r2[filled + 2] = 1;
            r2[filled + 3] = m.neg(1);
            gx.push_row(&r1);
            gx.push_row(&r2);
            filled += 4;
        }
    }
    let perm: Vec<usize> = {
        let mut p: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            p.swap(i, rng.gen_range(0..=i));
        }
        p
    };
    let gx = gx.select_cols(&perm);
    let mut mat = FieldMatrix::zeros(0, 2 * n, m);
    for r in 0..gx.rows() {
        let mut xrow = vec![0u32; 2 * n];
        xrow[..n].copy_from_slice(gx.row(r));
        mat.push_row(&xrow);
        let mut zrow = vec![0u32; 2 * n];
        zrow[n..].copy_from_slice(gx.row(r));
        mat.push_row(&zrow);
    }
    CheckMatrix::from_rows_matrix(mat, n).unwrap()
}
