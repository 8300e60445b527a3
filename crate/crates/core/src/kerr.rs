// SPDX-License-Identifier: Apache-2.0

//! The two-mode state after the cross-Kerr interaction, kept in coherent-branch form.
//!
//! A product `|beta>|alpha>` evolved under `exp(-i phi0 n_a n_b)` stays a sum
//! over signal Fock states `|n>` each tagged with a rotated probe coherent state
//! `|alpha e^{-i phi0 n}>`. Probe loss only multiplies the pairwise branch
//! coherences by overlap factors, so the full two-mode operator is
//!
//! ```text
//! rho = sum_{m,n} c_m c_n^* D[m,n] |m><n| (x) |mu_m><mu_n|
//! ```
//!
//! and every probe-side quantity reduces to coherent-state overlaps.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::RangeInclusive;

use num_complex::Complex64;

use crate::error::{check_nonnegative, Error, Result};
use crate::math::poisson_amplitude;

pub const DEFAULT_K_SIGMA: f64 = 8.0;
pub const DEFAULT_TRUNCATION_TOL: f64 = 1e-10;

/// Upper Fock cutoff `ceil(beta^2 + k_sigma * beta + 10)` for a coherent amplitude `beta`.
pub fn fock_cutoff(beta: f64, k_sigma: f64) -> usize {
    libm::ceil(beta * beta + k_sigma * beta + 10.0) as usize
}

/// Inclusive range of signal Fock indices kept in a state.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FockWindow {
    pub lo: usize,
    pub hi: usize,
}

impl FockWindow {
    /// `0..=cutoff`.
    pub fn full(cutoff: usize) -> Self {
        FockWindow { lo: 0, hi: cutoff }
    }

    /// Window of mean +/- (k sigma + 10) around the Poisson weight of `|beta>`.
    ///
    /// For bright signals the lower tail is as negligible as the upper one and
    /// dropping it keeps the branch matrices at O((k beta)^2) instead of O(beta^4).
    pub fn around_poisson(beta: f64, k_sigma: f64) -> Self {
        let lo = libm::floor(beta * beta - k_sigma * beta - 10.0);
        FockWindow {
            lo: if lo > 0.0 { lo as usize } else { 0 },
            hi: fock_cutoff(beta, k_sigma),
        }
    }

    pub fn len(&self) -> usize {
        self.hi - self.lo + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn indices(&self) -> RangeInclusive<usize> {
        self.lo..=self.hi
    }

    pub fn contains(&self, n: usize) -> bool {
        (self.lo..=self.hi).contains(&n)
    }
}

/// Pairwise branch coherence factors `D[m,n]`.
#[derive(Debug, Clone, PartialEq)]
enum Decoherence {
    /// All entries one: no probe loss applied yet.
    Unit,
    /// Dense row-major `len x len` matrix over the window.
    Dense(Vec<Complex64>),
}

/// Signal Fock amplitudes paired with probe coherent amplitudes and branch coherences.
#[derive(Debug, Clone, PartialEq)]
pub struct BranchState {
    window: FockWindow,
    coeffs: Vec<Complex64>,
    probe: Vec<Complex64>,
    decoherence: Decoherence,
}

impl BranchState {
    /// `|beta>|alpha>` over an explicit Fock window, checking the truncation deficit.
    pub fn coherent_product(
        alpha: f64,
        beta: f64,
        window: FockWindow,
        tolerance: f64,
    ) -> Result<Self> {
        check_nonnegative("alpha", alpha)?;
        check_nonnegative("beta", beta)?;
        if window.hi < window.lo {
            return Err(Error::Dimension("Fock window is empty"));
        }
        let coeffs: Vec<Complex64> = window
            .indices()
            .map(|n| Complex64::new(poisson_amplitude(beta, n), 0.0))
            .collect();
        let state = BranchState {
            window,
            coeffs,
            probe: vec![Complex64::new(alpha, 0.0); window.len()],
            decoherence: Decoherence::Unit,
        };
        let deficit = state.truncation_deficit();
        if deficit >= tolerance {
            return Err(Error::Truncation { deficit, tolerance });
        }
        Ok(state)
    }

    pub fn window(&self) -> FockWindow {
        self.window
    }

    /// Largest signal Fock index kept.
    pub fn cutoff(&self) -> usize {
        self.window.hi
    }

    /// `c_n` over the window, starting at `window().lo`.
    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Probe amplitudes `mu_n` over the window.
    pub fn probe_amplitudes(&self) -> &[Complex64] {
        &self.probe
    }

    /// `c_n` for an absolute Fock index (zero outside the window).
    pub fn coeff(&self, n: usize) -> Complex64 {
        if self.window.contains(n) {
            self.coeffs[n - self.window.lo]
        } else {
            Complex64::new(0.0, 0.0)
        }
    }

    /// `mu_n` for an absolute Fock index inside the window.
    pub fn probe_amplitude(&self, n: usize) -> Complex64 {
        self.probe[n - self.window.lo]
    }

    /// `D[m,n]` for absolute Fock indices inside the window.
    pub fn decoherence(&self, m: usize, n: usize) -> Complex64 {
        self.decoherence_local(m - self.window.lo, n - self.window.lo)
    }

    pub(crate) fn decoherence_local(&self, i: usize, j: usize) -> Complex64 {
        match &self.decoherence {
            Decoherence::Unit => Complex64::new(1.0, 0.0),
            Decoherence::Dense(d) => d[i * self.window.len() + j],
        }
    }

    /// `sum |c_n|^2`.
    pub fn norm_sqr(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    /// Norm missing because of the finite Fock window.
    pub fn truncation_deficit(&self) -> f64 {
        (1.0 - self.norm_sqr()).max(0.0)
    }

    /// Apply the cross-Kerr unitary: `mu_n -> mu_n e^{-i phi0 n}`.
    pub fn cross_kerr(mut self, phi0: f64) -> Self {
        let lo = self.window.lo;
        for (k, mu) in self.probe.iter_mut().enumerate() {
            *mu *= Complex64::from_polar(1.0, -phi0 * (lo + k) as f64);
        }
        self
    }

    /// Mix the probe with vacuum on a beamsplitter of transmission `nu` and trace out the
    /// reflected port: `mu_n -> sqrt(nu) mu_n`, `D[m,n] *= <r mu_n | r mu_m>` with `r^2 = 1 - nu`.
    pub fn probe_loss(mut self, nu: f64) -> Result<Self> {
        crate::error::check_unit("nu", nu)?;
        if nu == 1.0 {
            return Ok(self);
        }
        let len = self.window.len();
        let r = libm::sqrt(1.0 - nu);
        let mut d = match core::mem::replace(&mut self.decoherence, Decoherence::Unit) {
            Decoherence::Unit => vec![Complex64::new(1.0, 0.0); len * len],
            Decoherence::Dense(d) => d,
        };
        let lost: Vec<Complex64> = self.probe.iter().map(|mu| mu * r).collect();
        for i in 0..len {
            d[i * len + i] *= crate::channels::coherent_overlap(lost[i], lost[i]);
            for j in (i + 1)..len {
                let f = crate::channels::coherent_overlap(lost[j], lost[i]);
                d[i * len + j] *= f;
                d[j * len + i] *= f.conj();
            }
        }
        let t = libm::sqrt(nu);
        for mu in self.probe.iter_mut() {
            *mu *= t;
        }
        self.decoherence = Decoherence::Dense(d);
        Ok(self)
    }
}

/// `|beta>|alpha>` over Fock indices `0..=cutoff`.
pub fn make_coherent_product(alpha: f64, beta: f64, cutoff: usize) -> Result<BranchState> {
    if cutoff < 1 {
        return Err(Error::Dimension("cutoff must be at least 1"));
    }
    BranchState::coherent_product(alpha, beta, FockWindow::full(cutoff), DEFAULT_TRUNCATION_TOL)
}

/// Cross-Kerr evolution `exp(-i phi0 n_a n_b)` on the branch state.
pub fn apply_cross_kerr(state: BranchState, phi0: f64) -> BranchState {
    state.cross_kerr(phi0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    /// Upper Poisson tail by direct summation of the pmf recursion.
    fn poisson_tail_above(mean: f64, cutoff: usize) -> f64 {
        let mut p = libm::exp(-mean);
        for n in 1..=cutoff {
            p *= mean / n as f64;
        }
        // sum the tail explicitly rather than 1 - head to avoid cancellation
        let mut tail = 0.0;
        let mut n = cutoff;
        loop {
            n += 1;
            p *= mean / n as f64;
            tail += p;
            if p < 1e-300 || (n > cutoff + 10 && p < tail * 1e-17) {
                break;
            }
        }
        tail
    }

    #[test]
    fn cutoff_examples() {
        assert_eq!(fock_cutoff(0.0, 8.0), 10);
        assert_eq!(fock_cutoff(libm::sqrt(30.0), 8.0), 84);
        assert_eq!(fock_cutoff(50.0, 8.0), 2910);
        assert!(poisson_tail_above(30.0, 84) < 1e-10);
        // e^{-2500} underflows the recursion, so sum the log-space pmf instead
        let tail: f64 = (2911..4000)
            .map(|n| libm::exp(-2500.0 + n as f64 * libm::log(2500.0) - libm::lgamma(n as f64 + 1.0)))
            .sum();
        assert!(tail < 1e-10, "{tail}");
    }

    #[test]
    fn vacuum_signal_product() {
        let s = make_coherent_product(1.0, 0.0, 5).unwrap();
        assert_eq!(s.coeff(0), Complex64::new(1.0, 0.0));
        assert!(s.coeffs()[1..].iter().all(|c| c.norm() == 0.0));
        assert!(s.probe_amplitudes().iter().all(|m| *m == Complex64::new(1.0, 0.0)));
    }

    #[test]
    fn coherent_product_sqrt10() {
        let b = libm::sqrt(10.0);
        let s = make_coherent_product(b, b, 60).unwrap();
        let mut fact = 1.0;
        for n in 0..=60usize {
            if n > 0 {
                fact *= n as f64;
            }
            let expected = libm::exp(-5.0) * b.powi(n as i32) / libm::sqrt(fact);
            assert_relative_eq!(s.coeff(n).re, expected, max_relative = 1e-11);
        }
        let deficit = s.truncation_deficit();
        assert!(deficit < 1e-10);
        assert!((deficit - poisson_tail_above(10.0, 60)).abs() < 1e-13);
    }

    #[test]
    fn bright_product_has_poisson_mean() {
        let s = make_coherent_product(50.0, 50.0, fock_cutoff(50.0, 8.0)).unwrap();
        let mean: f64 = s
            .coeffs()
            .iter()
            .enumerate()
            .map(|(n, c)| n as f64 * c.norm_sqr())
            .sum();
        assert!((mean - 2500.0).abs() < 1e-6, "{mean}");
    }

    #[test]
    fn truncation_error_is_reported() {
        let err = make_coherent_product(1.0, 5.0, 20).unwrap_err();
        assert!(matches!(err, Error::Truncation { .. }));
    }

    #[test]
    fn windowed_product_keeps_norm() {
        let w = FockWindow::around_poisson(70.0, DEFAULT_K_SIGMA);
        assert_eq!(w.lo, 4330);
        assert_eq!(w.hi, 5470);
        let s = BranchState::coherent_product(70.0, 70.0, w, DEFAULT_TRUNCATION_TOL).unwrap();
        assert!(s.truncation_deficit() < 1e-10);
    }

    #[test]
    fn kerr_examples() {
        let b = libm::sqrt(10.0);
        let s = make_coherent_product(b, b, 60).unwrap();
        assert_eq!(apply_cross_kerr(s.clone(), 0.0), s);
        let k = apply_cross_kerr(s.clone(), 0.4);
        let expected = Complex64::from_polar(b, -2.0);
        assert!((k.probe_amplitude(5) - expected).norm() < 1e-14);
        assert!(k.probe_amplitudes().iter().all(|m| (m.norm() - b).abs() < 1e-14));

        let b30 = libm::sqrt(30.0);
        let phase = 0.4 * b30 * b30;
        assert!((crate::math::wrap_two_pi(phase) - 5.717).abs() < 1e-3);
    }

    #[test]
    fn kerr_period_disentangles() {
        let s = make_coherent_product(2.0, 1.5, 30).unwrap();
        let k = apply_cross_kerr(s, core::f64::consts::TAU);
        let first = k.probe_amplitudes()[0];
        assert!(k.probe_amplitudes().iter().all(|m| (m - first).norm() < 1e-12));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn kerr_preserves_norms_and_inverts(alpha in 0.0..4.0f64, beta in 0.0..3.0f64, phi in -7.0..7.0f64) {
                let s = make_coherent_product(alpha, beta, fock_cutoff(beta, 8.0)).unwrap();
                let k = apply_cross_kerr(s.clone(), phi);
                prop_assert_eq!(k.norm_sqr(), s.norm_sqr());
                for (a, b) in k.probe_amplitudes().iter().zip(s.probe_amplitudes()) {
                    prop_assert!((a.norm() - b.norm()).abs() < 1e-12);
                }
                let back = apply_cross_kerr(k, -phi);
                for (a, b) in back.probe_amplitudes().iter().zip(s.probe_amplitudes()) {
                    prop_assert!((a - b).norm() < 1e-12);
                }
            }
        }
    }
}
