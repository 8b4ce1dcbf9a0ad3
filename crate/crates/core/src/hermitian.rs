//! Dense complex Hermitian matrix helpers for small per-bin systems.
//!
//! Channel counts are single digit, so Cholesky-based solves beat any
//! general-purpose LAPACK detour and keep the build dependency-free.

use ndarray::{Array1, Array2};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Symmetrize in place: `a <- (a + a^H) / 2`.
pub fn hermitize(a: &mut Array2<Complex64>) {
    let n = a.nrows();
    for i in 0..n {
        a[(i, i)] = Complex64::new(a[(i, i)].re, 0.0);
        for j in i + 1..n {
            let m = 0.5 * (a[(i, j)] + a[(j, i)].conj());
            a[(i, j)] = m;
            a[(j, i)] = m.conj();
        }
    }
}

/// Maximum elementwise deviation from Hermitian symmetry.
pub fn hermitian_deviation(a: &Array2<Complex64>) -> f64 {
    let n = a.nrows();
    let mut dev = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            dev = dev.max((a[(i, j)] - a[(j, i)].conj()).norm());
        }
    }
    dev
}

/// Lower Cholesky factor of a Hermitian positive-definite matrix.
pub fn cholesky(a: &Array2<Complex64>) -> Option<Array2<Complex64>> {
    let n = a.nrows();
    let mut l: Array2<Complex64> = Array2::zeros((n, n));
    for j in 0..n {
        let mut d = a[(j, j)].re;
        for k in 0..j {
            d -= l[(j, k)].norm_sqr();
        }
        if !(d > 0.0) || !d.is_finite() {
            return None;
        }
        let dj = d.sqrt();
        l[(j, j)] = Complex64::new(dj, 0.0);
        for i in j + 1..n {
            let mut s = a[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)].conj();
            }
            l[(i, j)] = s / dj;
        }
    }
    Some(l)
}

/// Solve `A x = b` given the lower Cholesky factor of `A`.
pub fn cholesky_solve(l: &Array2<Complex64>, b: &Array1<Complex64>) -> Array1<Complex64> {
    let n = l.nrows();
    let mut z = b.clone();
    for i in 0..n {
        for k in 0..i {
            let t = l[(i, k)] * z[k];
            z[i] -= t;
        }
        z[i] /= l[(i, i)];
    }
    // Back substitution with L^H.
    for i in (0..n).rev() {
        for k in i + 1..n {
            let t = l[(k, i)].conj() * z[k];
            z[i] -= t;
        }
        z[i] /= l[(i, i)];
    }
    z
}

/// Inverse of a Hermitian positive-definite matrix via Cholesky.
pub fn inverse(a: &Array2<Complex64>) -> Result<Array2<Complex64>> {
    let n = a.nrows();
    let l = cholesky(a).ok_or(Error::SingularMatrix { bin: usize::MAX })?;
    let mut inv = Array2::zeros((n, n));
    for j in 0..n {
        let mut e: Array1<Complex64> = Array1::zeros(n);
        e[j] = Complex64::ONE;
        let col = cholesky_solve(&l, &e);
        for i in 0..n {
            inv[(i, j)] = col[i];
        }
    }
    Ok(inv)
}

/// `ln det A` from the Cholesky factor.
pub fn log_det_from_cholesky(l: &Array2<Complex64>) -> f64 {
    (0..l.nrows()).map(|i| 2.0 * l[(i, i)].re.ln()).sum()
}

/// Real quadratic form `y^H A y` for Hermitian `A`.
pub fn quadratic_form(a: &Array2<Complex64>, y: &Array1<Complex64>) -> f64 {
    let n = a.nrows();
    let mut acc = Complex64::ZERO;
    for i in 0..n {
        for j in 0..n {
            acc += y[i].conj() * a[(i, j)] * y[j];
        }
    }
    acc.re
}

/// Smallest eigenvalue estimate via inverse power iteration.
pub fn min_eigenvalue(a: &Array2<Complex64>, iterations: usize) -> Option<f64> {
    let n = a.nrows();
    let l = cholesky(a)?;
    let mut x: Array1<Complex64> =
        Array1::from_shape_fn(n, |i| Complex64::new(1.0 + i as f64 * 0.37, 0.13 * i as f64));
    let mut lambda_inv = 0.0;
    for _ in 0..iterations {
        let y = cholesky_solve(&l, &x);
        let norm = y.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            return None;
        }
        x = y.mapv(|v| v / norm);
        lambda_inv = norm;
    }
    // After normalization the Rayleigh quotient of A^-1 converged to
    // 1/lambda_min; refine once.
    let ax = {
        let mut out: Array1<Complex64> = Array1::zeros(n);
        for i in 0..n {
            for j in 0..n {
                let t = a[(i, j)] * x[j];
                out[i] += t;
            }
        }
        out
    };
    let num: f64 = x.iter().zip(ax.iter()).map(|(xi, yi)| (xi.conj() * yi).re).sum();
    let den: f64 = x.iter().map(|c| c.norm_sqr()).sum();
    if den > 0.0 {
        Some(num / den)
    } else {
        Some(1.0 / lambda_inv)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use ndarray::array;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn test_matrix() -> Array2<Complex64> {
        // Hermitian PD: A = M M^H + I.
        let m = array![
            [c(1.0, 0.2), c(0.3, -0.4), c(0.1, 0.0)],
            [c(0.5, 0.1), c(2.0, 0.0), c(-0.2, 0.3)],
            [c(0.0, -0.6), c(0.4, 0.4), c(1.5, -0.1)],
        ];
        let mh = m.t().mapv(|v: Complex64| v.conj());
        let mut a = m.dot(&mh);
        for i in 0..3 {
            a[(i, i)] += Complex64::ONE;
        }
        a
    }

    #[test]
    fn cholesky_reconstructs() {
        let a = test_matrix();
        let l = cholesky(&a).unwrap();
        let lh = l.t().mapv(|v: Complex64| v.conj());
        let r = l.dot(&lh);
        for (x, y) in a.iter().zip(r.iter()) {
            assert_abs_diff_eq!(x.re, y.re, epsilon = 1e-12);
            assert_abs_diff_eq!(x.im, y.im, epsilon = 1e-12);
        }
    }

    #[test]
    fn solve_and_inverse_agree() {
        let a = test_matrix();
        let b = array![c(1.0, -1.0), c(0.5, 2.0), c(-0.3, 0.1)];
        let l = cholesky(&a).unwrap();
        let x = cholesky_solve(&l, &b);
        let inv = inverse(&a).unwrap();
        let x2 = inv.dot(&b);
        for (u, v) in x.iter().zip(x2.iter()) {
            assert_abs_diff_eq!(u.re, v.re, epsilon = 1e-10);
            assert_abs_diff_eq!(u.im, v.im, epsilon = 1e-10);
        }
        // Residual A x - b.
        let r = a.dot(&x) - &b;
        assert!(r.iter().all(|v| v.norm() < 1e-10));
    }

    #[test]
    fn log_det_matches_2x2_closed_form() {
        let a = array![[c(2.0, 0.0), c(0.5, 0.5)], [c(0.5, -0.5), c(3.0, 0.0)]];
        let det = 2.0 * 3.0 - c(0.5, 0.5).norm_sqr();
        let l = cholesky(&a).unwrap();
        assert_abs_diff_eq!(log_det_from_cholesky(&l), det.ln(), epsilon = 1e-12);
    }

    #[test]
    fn non_pd_rejected() {
        let a = array![[c(1.0, 0.0), c(2.0, 0.0)], [c(2.0, 0.0), c(1.0, 0.0)]];
        assert!(cholesky(&a).is_none());
    }

    #[test]
    fn min_eigenvalue_of_diagonal() {
        let a = array![
            [c(3.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)],
            [c(0.0, 0.0), c(0.25, 0.0), c(0.0, 0.0)],
            [c(0.0, 0.0), c(0.0, 0.0), c(7.0, 0.0)],
        ];
        let lam = min_eigenvalue(&a, 50).unwrap();
        assert_abs_diff_eq!(lam, 0.25, epsilon = 1e-9);
    }
}
