//! Direct solvers for the small symmetric pentadiagonal systems of the
//! semi-implicit snake update: plain banded elimination for open curves
//! and a rank-4 corner correction (push-through identity) for the cyclic
//! systems of closed curves.

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Five diagonals of a pentadiagonal matrix. `off1[i]` is the entry at
/// `(i, i+1)` (and `(i+1, i)`: the systems here are symmetric),
/// `off2[i]` the entry at `(i, i+2)`.
#[derive(Debug, Clone)]
pub struct Pentadiagonal<S> {
    pub diag: Vec<S>,
    pub off1: Vec<S>,
    pub off2: Vec<S>,
}

impl<S: Real> Pentadiagonal<S> {
    pub fn n(&self) -> usize {
        self.diag.len()
    }

    /// Solve `A x = rhs` by Gaussian elimination restricted to the band,
    /// no pivoting; the snake systems are diagonally dominated enough.
    pub fn solve(&self, rhs: &[S]) -> Result<Vec<S>> {
        let n = self.n();
        assert_eq!(rhs.len(), n);
        let mut d = self.diag.clone();
        // working copies of the upper band rows
        let mut a = vec![S::zero(); n]; // (i, i+1)
        let mut b = vec![S::zero(); n]; // (i, i+2)
        let mut c = vec![S::zero(); n]; // (i, i-1), mutated during elimination
        let mut e = vec![S::zero(); n]; // (i, i-2)
        for i in 0..n {
            if i + 1 < n {
                a[i] = self.off1[i];
                c[i + 1] = self.off1[i];
            }
            if i + 2 < n {
                b[i] = self.off2[i];
                e[i + 2] = self.off2[i];
            }
        }
        let mut x = rhs.to_vec();
        for i in 0..n {
            if d[i] == S::zero() || !d[i].is_finite() {
                return Err(Error::SingularSystem(format!("zero pivot at row {i}")));
            }
            if i + 1 < n {
                let m = c[i + 1] / d[i];
                d[i + 1] = d[i + 1] - m * a[i];
                if i + 2 < n {
                    a[i + 1] = a[i + 1] - m * b[i];
                }
                x[i + 1] = x[i + 1] - m * x[i];
            }
            if i + 2 < n {
                let m = e[i + 2] / d[i];
                c[i + 2] = c[i + 2] - m * a[i];
                d[i + 2] = d[i + 2] - m * b[i];
                x[i + 2] = x[i + 2] - m * x[i];
            }
        }
        for i in (0..n).rev() {
            let mut v = x[i];
            if i + 1 < n {
                v = v - a[i] * x[i + 1];
            }
            if i + 2 < n {
                v = v - b[i] * x[i + 2];
            }
            x[i] = v / d[i];
        }
        Ok(x)
    }
}

/// Solve the cyclic pentadiagonal system with constant stencil
/// `(m2, m1, m0, m1, m2)` (rows wrap modulo n). Requires `n >= 5`.
///
/// The matrix is split as `B + U C U^T` with `B` the truncated band and
/// the correction carrying the six wrap entries; the solve uses
/// `x = B\d - B\U (I + C U^T B\U)^{-1} C U^T B\d`.
pub fn solve_cyclic_pentadiagonal<S: Real>(m0: S, m1: S, m2: S, rhs: &[S]) -> Result<Vec<S>> {
    let n = rhs.len();
    if n < 5 {
        return Err(Error::InvalidParam(
            "cyclic pentadiagonal solve needs n >= 5".into(),
        ));
    }
    let band = Pentadiagonal {
        diag: vec![m0; n],
        off1: vec![m1; n - 1],
        off2: vec![m2; n - 2],
    };
    // U columns: unit vectors at rows 0, 1, n-2, n-1.
    let idx = [0usize, 1, n - 2, n - 1];
    // Corner block C in that ordering: (0,n-2)=m2, (0,n-1)=m1, (1,n-1)=m2
    // plus the symmetric entries.
    let mut cmat = [[S::zero(); 4]; 4];
    cmat[0][2] = m2;
    cmat[0][3] = m1;
    cmat[1][3] = m2;
    cmat[2][0] = m2;
    cmat[3][0] = m1;
    cmat[3][1] = m2;

    let y = band.solve(rhs)?;
    let mut zs: Vec<Vec<S>> = Vec::with_capacity(4);
    for &k in &idx {
        let mut u = vec![S::zero(); n];
        u[k] = S::one();
        zs.push(band.solve(&u)?);
    }

    // W = U^T Z (4x4), t = U^T y (4)
    let mut wmat = [[S::zero(); 4]; 4];
    let mut t = [S::zero(); 4];
    for r in 0..4 {
        t[r] = y[idx[r]];
        for c in 0..4 {
            wmat[r][c] = zs[c][idx[r]];
        }
    }
    // M = I + C * W, g = C * t
    let mut mmat = [[S::zero(); 4]; 4];
    let mut g = [S::zero(); 4];
    for r in 0..4 {
        for c in 0..4 {
            let mut acc = if r == c { S::one() } else { S::zero() };
            for k in 0..4 {
                acc = acc + cmat[r][k] * wmat[k][c];
            }
            mmat[r][c] = acc;
        }
        let mut acc = S::zero();
        for k in 0..4 {
            acc = acc + cmat[r][k] * t[k];
        }
        g[r] = acc;
    }
    let s = solve4(mmat, g)?;
    let mut x = y;
    for (col, &sv) in zs.iter().zip(s.iter()) {
        for i in 0..n {
            x[i] = x[i] - col[i] * sv;
        }
    }
    Ok(x)
}

/// 4x4 dense solve with partial pivoting.
fn solve4<S: Real>(mut a: [[S; 4]; 4], mut b: [S; 4]) -> Result<[S; 4]> {
    for col in 0..4 {
        let mut piv = col;
        for r in col + 1..4 {
            if a[r][col].abs() > a[piv][col].abs() {
                piv = r;
            }
        }
        if a[piv][col] == S::zero() {
            return Err(Error::SingularSystem("singular corner system".into()));
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for r in col + 1..4 {
            let m = a[r][col] / a[col][col];
            for c in col..4 {
                a[r][c] = a[r][c] - m * a[col][c];
            }
            b[r] = b[r] - m * b[col];
        }
    }
    let mut x = [S::zero(); 4];
    for r in (0..4).rev() {
        let mut v = b[r];
        for c in r + 1..4 {
            v = v - a[r][c] * x[c];
        }
        x[r] = v / a[r][r];
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Dense Gaussian elimination with partial pivoting; test oracle.
    fn dense_solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
        let n = b.len();
        for col in 0..n {
            let piv = (col..n)
                .max_by(|&r, &s| a[r][col].abs().partial_cmp(&a[s][col].abs()).unwrap())
                .unwrap();
            a.swap(col, piv);
            b.swap(col, piv);
            for r in col + 1..n {
                let m = a[r][col] / a[col][col];
                for c in col..n {
                    a[r][c] -= m * a[col][c];
                }
                b[r] -= m * b[col];
            }
        }
        let mut x = vec![0.0; n];
        for r in (0..n).rev() {
            let mut v = b[r];
            for c in r + 1..n {
                v -= a[r][c] * x[c];
            }
            x[r] = v / a[r][r];
        }
        x
    }

    #[test]
    fn banded_matches_dense_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..30 {
            let n = rng.gen_range(5..40);
            let mut diag = vec![0.0f64; n];
            let mut off1 = vec![0.0f64; n - 1];
            let mut off2 = vec![0.0f64; n - 2];
            for v in &mut off1 {
                *v = rng.gen_range(-1.0..1.0);
            }
            for v in &mut off2 {
                *v = rng.gen_range(-1.0..1.0);
            }
            for (i, v) in diag.iter_mut().enumerate() {
                // keep comfortably diagonally dominant
                let mut s = 5.0;
                if i >= 1 {
                    s += off1[i - 1].abs();
                }
                if i + 1 < n {
                    s += off1[i].abs();
                }
                if i >= 2 {
                    s += off2[i - 2].abs();
                }
                if i + 2 < n {
                    s += off2[i].abs();
                }
                *v = s;
            }
            let rhs: Vec<f64> = (0..n).map(|_| rng.gen_range(-10.0..10.0)).collect();
            let p = Pentadiagonal {
                diag: diag.clone(),
                off1: off1.clone(),
                off2: off2.clone(),
            };
            let x = p.solve(&rhs).unwrap();
            let mut dense = vec![vec![0.0; n]; n];
            for i in 0..n {
                dense[i][i] = diag[i];
                if i + 1 < n {
                    dense[i][i + 1] = off1[i];
                    dense[i + 1][i] = off1[i];
                }
                if i + 2 < n {
                    dense[i][i + 2] = off2[i];
                    dense[i + 2][i] = off2[i];
                }
            }
            let oracle = dense_solve(dense, rhs);
            for (a, b) in x.iter().zip(&oracle) {
                assert!((a - b).abs() < 1e-9, "{a} vs {b}");
            }
        }
    }

    #[test]
    fn cyclic_matches_dense_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        for _ in 0..30 {
            let n = rng.gen_range(5..40);
            let m1: f64 = rng.gen_range(-0.8..0.8);
            let m2: f64 = rng.gen_range(-0.8..0.8);
            let m0 = 1.0 + 2.0 * m1.abs() + 2.0 * m2.abs() + rng.gen_range(0.5..2.0);
            let rhs: Vec<f64> = (0..n).map(|_| rng.gen_range(-10.0..10.0)).collect();
            let x = solve_cyclic_pentadiagonal(m0, m1, m2, &rhs).unwrap();
            let mut dense = vec![vec![0.0; n]; n];
            for i in 0..n {
                dense[i][i] += m0;
                dense[i][(i + 1) % n] += m1;
                dense[(i + 1) % n][i] += m1;
                dense[i][(i + 2) % n] += m2;
                dense[(i + 2) % n][i] += m2;
            }
            // symmetric accumulation double-counts nothing for n >= 5
            let oracle = dense_solve(dense, rhs);
            for (a, b) in x.iter().zip(&oracle) {
                assert!((a - b).abs() < 1e-8, "n={n}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn cyclic_identity_when_offdiagonals_zero() {
        let rhs = vec![1.0, -2.0, 3.0, 4.0, -5.0, 0.5];
        let x = solve_cyclic_pentadiagonal(2.0f64, 0.0, 0.0, &rhs).unwrap();
        for (a, b) in x.iter().zip(&rhs) {
            assert!((a - b / 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn too_small_cyclic_rejected() {
        assert!(solve_cyclic_pentadiagonal(1.0f64, 0.1, 0.1, &[1.0; 4]).is_err());
    }
}
