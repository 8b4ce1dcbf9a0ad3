//! FFT-based convolution and correlation helpers.

use num_complex::Complex64;
use rustfft::FftPlanner;

fn next_pow2(n: usize) -> usize {
    n.next_power_of_two()
}

fn fft_forward(buf: &mut [Complex64]) {
    let mut planner = FftPlanner::new();
    planner.plan_fft_forward(buf.len()).process(buf);
}

fn fft_inverse(buf: &mut [Complex64]) {
    let mut planner = FftPlanner::new();
    planner.plan_fft_inverse(buf.len()).process(buf);
    let scale = 1.0 / buf.len() as f64;
    for v in buf.iter_mut() {
        *v *= scale;
    }
}

/// Full linear convolution, output length `a.len() + b.len() - 1`.
pub fn convolve(a: &[f64], b: &[f64]) -> Vec<f64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let out_len = a.len() + b.len() - 1;
    let n = next_pow2(out_len);
    let mut fa: Vec<Complex64> = vec![Complex64::ZERO; n];
    let mut fb: Vec<Complex64> = vec![Complex64::ZERO; n];
    for (dst, &src) in fa.iter_mut().zip(a) {
        dst.re = src;
    }
    for (dst, &src) in fb.iter_mut().zip(b) {
        dst.re = src;
    }
    fft_forward(&mut fa);
    fft_forward(&mut fb);
    for (x, y) in fa.iter_mut().zip(&fb) {
        *x *= y;
    }
    fft_inverse(&mut fa);
    fa[..out_len].iter().map(|c| c.re).collect()
}

/// Cross-correlation at non-negative lags: `out[i] = sum_n x[n] * y[n + i]`
/// for `i` in `0..max_lag`, with zero padding outside the signals.
pub fn cross_correlation(x: &[f64], y: &[f64], max_lag: usize) -> Vec<f64> {
    if x.is_empty() || y.is_empty() || max_lag == 0 {
        return vec![0.0; max_lag];
    }
    let n = next_pow2(x.len() + y.len());
    let mut fx: Vec<Complex64> = vec![Complex64::ZERO; n];
    let mut fy: Vec<Complex64> = vec![Complex64::ZERO; n];
    for (dst, &src) in fx.iter_mut().zip(x) {
        dst.re = src;
    }
    for (dst, &src) in fy.iter_mut().zip(y) {
        dst.re = src;
    }
    fft_forward(&mut fx);
    fft_forward(&mut fy);
    for (a, b) in fx.iter_mut().zip(&fy) {
        *a = a.conj() * *b;
    }
    fft_inverse(&mut fx);
    (0..max_lag)
        .map(|i| if i < n { fx[i].re } else { 0.0 })
        .collect()
}

/// Autocorrelation at non-negative lags: `out[m] = sum_n x[n] * x[n + m]`.
pub fn autocorrelation(x: &[f64], max_lag: usize) -> Vec<f64> {
    cross_correlation(x, x, max_lag)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn convolve_naive(a: &[f64], b: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; a.len() + b.len() - 1];
        for (i, &ai) in a.iter().enumerate() {
            for (j, &bj) in b.iter().enumerate() {
                out[i + j] += ai * bj;
            }
        }
        out
    }

    #[test]
    fn convolution_matches_naive() {
        let a: Vec<f64> = (0..37).map(|i| (i as f64 * 0.7).sin()).collect();
        let b: Vec<f64> = (0..12).map(|i| (i as f64 * 1.3).cos()).collect();
        let fast = convolve(&a, &b);
        let slow = convolve_naive(&a, &b);
        assert_eq!(fast.len(), slow.len());
        for (f, s) in fast.iter().zip(&slow) {
            assert_abs_diff_eq!(f, s, epsilon = 1e-10);
        }
    }

    #[test]
    fn correlation_matches_naive() {
        let x: Vec<f64> = (0..50).map(|i| ((i * 7 % 13) as f64) - 6.0).collect();
        let y: Vec<f64> = (0..41).map(|i| ((i * 5 % 11) as f64) - 5.0).collect();
        let fast = cross_correlation(&x, &y, 20);
        for (i, &f) in fast.iter().enumerate() {
            let mut slow = 0.0;
            for n in 0..x.len() {
                if n + i < y.len() {
                    slow += x[n] * y[n + i];
                }
            }
            assert_abs_diff_eq!(f, slow, epsilon = 1e-10);
        }
    }
}
