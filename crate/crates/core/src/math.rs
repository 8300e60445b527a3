// SPDX-License-Identifier: Apache-2.0

//! Small numerical helpers shared by the model modules.

pub(crate) fn ln_factorial(n: usize) -> f64 {
    libm::lgamma(n as f64 + 1.0)
}

pub(crate) fn ln_binomial(n: usize, k: usize) -> f64 {
    ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k)
}

/// Fock amplitude `e^{-b^2/2} b^n / sqrt(n!)` of a real coherent amplitude `b >= 0`.
pub fn poisson_amplitude(b: f64, n: usize) -> f64 {
    if b == 0.0 {
        return if n == 0 { 1.0 } else { 0.0 };
    }
    libm::exp(-0.5 * b * b + n as f64 * libm::log(b) - 0.5 * ln_factorial(n))
}

/// Golden-section minimisation of a unimodal function on `[lo, hi]`.
///
/// Returns `(x, f(x))` once the bracket is narrower than `tol`.
pub(crate) fn golden_section<F>(mut f: F, mut lo: f64, mut hi: f64, tol: f64) -> (f64, f64)
where
    F: FnMut(f64) -> f64,
{
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while hi - lo > tol {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        }
    }
    if f1 <= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// Reduce an angle into `[0, 2 pi)`.
pub fn wrap_two_pi(angle: f64) -> f64 {
    let tau = core::f64::consts::TAU;
    let r = angle % tau;
    if r < 0.0 {
        r + tau
    } else {
        r
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn poisson_amplitudes_normalise() {
        let total: f64 = (0..80).map(|n| poisson_amplitude(3.0, n).powi(2)).sum();
        assert!((total - 1.0).abs() < 1e-13);
        assert_eq!(poisson_amplitude(0.0, 0), 1.0);
        assert_eq!(poisson_amplitude(0.0, 3), 0.0);
    }

    #[test]
    fn golden_section_finds_parabola_minimum() {
        let (x, fx) = golden_section(|x| (x - 0.3) * (x - 0.3), 0.0, 4.0, 1e-9);
        assert!((x - 0.3).abs() < 1e-8);
        assert!(fx < 1e-16);
    }

    #[test]
    fn binomials() {
        assert!((libm::exp(ln_binomial(10, 3)) - 120.0).abs() < 1e-9);
        assert_eq!(ln_binomial(7, 0), 0.0);
    }

    #[test]
    fn wrapping() {
        assert!((wrap_two_pi(12.0) - (12.0 - core::f64::consts::TAU)).abs() < 1e-15);
        assert!((wrap_two_pi(-0.5) - (core::f64::consts::TAU - 0.5)).abs() < 1e-15);
    }
}
