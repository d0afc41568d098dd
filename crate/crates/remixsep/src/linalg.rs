//! Dense linear algebra helpers: small complex matrices (row-major slices
//! of length m*m) for the per-frequency beamforming math, and a real
//! symmetric Cholesky used by the metrics projections.

use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum LinalgError {
    #[error("singular matrix (pivot {0:.3e})")]
    Singular(f64),
    #[error("matrix not positive definite at column {0}")]
    NotPositiveDefinite(usize),
}

pub fn identity(m: usize) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); m * m];
    for i in 0..m {
        out[i * m + i] = Complex64::new(1.0, 0.0);
    }
    out
}

/// C = A * B for m x m row-major complex matrices.
pub fn mat_mul(a: &[Complex64], b: &[Complex64], m: usize) -> Vec<Complex64> {
    let mut c = vec![Complex64::new(0.0, 0.0); m * m];
    for i in 0..m {
        for k in 0..m {
            let aik = a[i * m + k];
            for j in 0..m {
                c[i * m + j] += aik * b[k * m + j];
            }
        }
    }
    c
}

/// Conjugate transpose.
pub fn herm_transpose(a: &[Complex64], m: usize) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); m * m];
    for i in 0..m {
        for j in 0..m {
            out[j * m + i] = a[i * m + j].conj();
        }
    }
    out
}

pub fn trace(a: &[Complex64], m: usize) -> Complex64 {
    (0..m).map(|i| a[i * m + i]).sum()
}

/// (A + A^H) / 2.
pub fn hermitize(a: &mut [Complex64], m: usize) {
    for i in 0..m {
        a[i * m + i] = Complex64::new(a[i * m + i].re, 0.0);
        for j in (i + 1)..m {
            let avg = 0.5 * (a[i * m + j] + a[j * m + i].conj());
            a[i * m + j] = avg;
            a[j * m + i] = avg.conj();
        }
    }
}

pub fn max_herm_deviation(a: &[Complex64], m: usize) -> f64 {
    let mut dev: f64 = 0.0;
    for i in 0..m {
        for j in 0..m {
            dev = dev.max((a[i * m + j] - a[j * m + i].conj()).norm());
        }
    }
    dev
}

/// LU factorization with partial pivoting, then solve A X = B where B holds
/// `nrhs` columns (row-major m x nrhs). Returns X.
pub fn lu_solve(
    a: &[Complex64],
    b: &[Complex64],
    m: usize,
    nrhs: usize,
) -> Result<Vec<Complex64>, LinalgError> {
    let mut lu = a.to_vec();
    let mut x = b.to_vec();
    let mut perm: Vec<usize> = (0..m).collect();

    for col in 0..m {
        // Pivot on the largest magnitude in this column.
        let mut best = col;
        let mut best_mag = lu[perm[col] * m + col].norm();
        for row in (col + 1)..m {
            let mag = lu[perm[row] * m + col].norm();
            if mag > best_mag {
                best = row;
                best_mag = mag;
            }
        }
        if best_mag < 1e-300 {
            return Err(LinalgError::Singular(best_mag));
        }
        perm.swap(col, best);
        let p = perm[col];
        let pivot = lu[p * m + col];
        for row in (col + 1)..m {
            let r = perm[row];
            let factor = lu[r * m + col] / pivot;
            lu[r * m + col] = factor;
            for j in (col + 1)..m {
                let sub = factor * lu[p * m + j];
                lu[r * m + j] -= sub;
            }
            for j in 0..nrhs {
                let sub = factor * x[p * nrhs + j];
                x[r * nrhs + j] -= sub;
            }
        }
    }

    // Back substitution.
    let mut out = vec![Complex64::new(0.0, 0.0); m * nrhs];
    for col in (0..m).rev() {
        let p = perm[col];
        for j in 0..nrhs {
            let mut acc = x[p * nrhs + j];
            for k in (col + 1)..m {
                acc -= lu[p * m + k] * out[k * nrhs + j];
            }
            out[col * nrhs + j] = acc / lu[p * m + col];
        }
    }
    Ok(out)
}

/// Eigenvalues of a Hermitian matrix via the cyclic Jacobi method.
/// Returned in ascending order.
pub fn herm_eigenvalues(a: &[Complex64], m: usize) -> Vec<f64> {
    let mut w = a.to_vec();
    for _sweep in 0..60 {
        let mut off = 0.0f64;
        for i in 0..m {
            for j in (i + 1)..m {
                off = off.max(w[i * m + j].norm());
            }
        }
        if off < 1e-14 {
            break;
        }
        for p in 0..m {
            for q in (p + 1)..m {
                let apq = w[p * m + q];
                if apq.norm() < 1e-300 {
                    continue;
                }
                let app = w[p * m + p].re;
                let aqq = w[q * m + q].re;
                // Unitary 2x2 rotation J = [[c, s], [-conj(s), c]] with
                // s = e^{i phase} * sin(theta) chosen to zero the (p,q) entry.
                let phase = apq / apq.norm();
                let tau = (aqq - app) / (2.0 * apq.norm());
                let t = tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = phase * (t * c);

                for k in 0..m {
                    let wpk = w[p * m + k];
                    let wqk = w[q * m + k];
                    w[p * m + k] = c * wpk - s.conj() * wqk;
                    w[q * m + k] = s * wpk + c * wqk;
                }
                for k in 0..m {
                    let wkp = w[k * m + p];
                    let wkq = w[k * m + q];
                    w[k * m + p] = c * wkp - s * wkq;
                    w[k * m + q] = s.conj() * wkp + c * wkq;
                }
            }
        }
    }
    let mut eig: Vec<f64> = (0..m).map(|i| w[i * m + i].re).collect();
    eig.sort_by(|a, b| a.partial_cmp(b).unwrap());
    eig
}

/// In-place lower Cholesky factorization of a symmetric positive definite
/// real matrix (row-major n x n). The strict upper triangle is left stale.
pub fn chol_factor(a: &mut [f64], n: usize) -> Result<(), LinalgError> {
    for j in 0..n {
        let mut d = a[j * n + j];
        for k in 0..j {
            d -= a[j * n + k] * a[j * n + k];
        }
        if d <= 0.0 || !d.is_finite() {
            return Err(LinalgError::NotPositiveDefinite(j));
        }
        let djj = d.sqrt();
        a[j * n + j] = djj;
        for i in (j + 1)..n {
            let mut s = a[i * n + j];
            let (row_i, row_j) = (i * n, j * n);
            for k in 0..j {
                s -= a[row_i + k] * a[row_j + k];
            }
            a[i * n + j] = s / djj;
        }
    }
    Ok(())
}

/// Solve L L^T x = b given the Cholesky factor from [`chol_factor`].
pub fn chol_solve(l: &[f64], b: &mut [f64], n: usize) {
    for i in 0..n {
        let mut s = b[i];
        for k in 0..i {
            s -= l[i * n + k] * b[k];
        }
        b[i] = s / l[i * n + i];
    }
    for i in (0..n).rev() {
        let mut s = b[i];
        for k in (i + 1)..n {
            s -= l[k * n + i] * b[k];
        }
        b[i] = s / l[i * n + i];
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_matrix(rng: &mut ChaCha8Rng, m: usize) -> Vec<Complex64> {
        (0..m * m)
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect()
    }

    fn random_hermitian_psd(rng: &mut ChaCha8Rng, m: usize) -> Vec<Complex64> {
        // B B^H is Hermitian PSD by construction.
        let b = random_matrix(rng, m);
        let bh = herm_transpose(&b, m);
        mat_mul(&b, &bh, m)
    }

    #[test]
    fn lu_solve_recovers_solution() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..50 {
            let m = rng.gen_range(1..6);
            let a = random_matrix(&mut rng, m);
            let x_true = random_matrix(&mut rng, m);
            let b = mat_mul(&a, &x_true, m);
            let x = lu_solve(&a, &b, m, m).unwrap();
            for (got, want) in x.iter().zip(&x_true) {
                assert!((got - want).norm() < 1e-9);
            }
        }
    }

    #[test]
    fn lu_solve_flags_singular() {
        let a = vec![Complex64::new(0.0, 0.0); 4];
        let b = identity(2);
        assert!(matches!(
            lu_solve(&a, &b, 2, 2),
            Err(LinalgError::Singular(_))
        ));
    }

    #[test]
    fn jacobi_eigenvalues_match_trace_and_psd() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..30 {
            let m = rng.gen_range(2..6);
            let a = random_hermitian_psd(&mut rng, m);
            let eig = herm_eigenvalues(&a, m);
            let tr: f64 = trace(&a, m).re;
            let sum: f64 = eig.iter().sum();
            assert!((sum - tr).abs() < 1e-9 * tr.abs().max(1.0));
            assert!(eig[0] > -1e-10 * tr.abs().max(1.0), "psd violated: {eig:?}");
        }
    }

    #[test]
    fn jacobi_eigenvalues_known_matrix() {
        // [[2, i], [-i, 2]] has eigenvalues 1 and 3.
        let a = vec![
            Complex64::new(2.0, 0.0),
            Complex64::new(0.0, 1.0),
            Complex64::new(0.0, -1.0),
            Complex64::new(2.0, 0.0),
        ];
        let eig = herm_eigenvalues(&a, 2);
        assert!((eig[0] - 1.0).abs() < 1e-12);
        assert!((eig[1] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn cholesky_solves_spd_system() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let n = 40;
        // A = M M^T + I is SPD.
        let mvals: Vec<f64> = (0..n * n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let mut a = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                let mut s = 0.0;
                for k in 0..n {
                    s += mvals[i * n + k] * mvals[j * n + k];
                }
                a[i * n + j] = s + if i == j { 1.0 } else { 0.0 };
            }
        }
        let x_true: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let mut b = vec![0.0; n];
        for i in 0..n {
            b[i] = (0..n).map(|j| a[i * n + j] * x_true[j]).sum();
        }
        let mut l = a.clone();
        chol_factor(&mut l, n).unwrap();
        chol_solve(&l, &mut b, n);
        for (got, want) in b.iter().zip(&x_true) {
            assert!((got - want).abs() < 1e-8);
        }
    }
}
