// SPDX-License-Identifier: Apache-2.0

//! Noisy, binned heterodyne post-selection on the probe.
//!
//! Heterodyne detection is the POVM `{|delta><delta| / pi}`. Binning around a
//! target `delta` (width `epsilon`) and Gaussian phase noise both smear the
//! sharp projection with a Gaussian envelope; their widths add in quadrature
//! into `Delta`. Acceptance statistics depend on `epsilon` only, the
//! conditional state on `Delta`.

use alloc::vec;

use num_complex::Complex64;

use crate::channels::coherent_overlap;
use crate::density::SignalDensity;
use crate::error::{check_nonnegative, check_positive, Error, Result};
use crate::kerr::BranchState;
use crate::params::Parameters;

const FRAC_1_PI: f64 = core::f64::consts::FRAC_1_PI;

/// Raw traces below this are treated as an empty post-selection bin.
pub const EMPTY_BIN_THRESHOLD: f64 = 1e-300;

/// Post-selection target and the widths that smear it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeterodyneSettings {
    /// Post-selection centre in the heterodyne plane.
    pub delta: Complex64,
    /// Width of the acceptance envelope.
    pub epsilon: f64,
    /// Technical phase noise, radians.
    pub delta_phi: f64,
    /// Amplitude that converts phase noise into a width in the plane.
    pub gamma: f64,
}

impl HeterodyneSettings {
    pub fn new(delta: Complex64, epsilon: f64, delta_phi: f64, gamma: f64) -> Result<Self> {
        check_positive("epsilon", epsilon)?;
        if !(0.0..core::f64::consts::PI).contains(&delta_phi) {
            return Err(Error::OutOfRange {
                name: "delta_phi",
                value: delta_phi,
                allowed: "[0, pi)",
            });
        }
        check_nonnegative("gamma", gamma)?;
        Ok(HeterodyneSettings {
            delta,
            epsilon,
            delta_phi,
            gamma,
        })
    }

    /// Defaults for a parameter set: `gamma` is the probe amplitude reaching the
    /// detector, `sqrt(nu) alpha`, and `delta` is the probe branch of the mean
    /// signal photon number `beta^2`.
    pub fn for_parameters(p: &Parameters) -> Result<Self> {
        Self::new(
            mean_rotation_center(p),
            p.epsilon,
            p.delta_phi,
            libm::sqrt(p.nu) * p.alpha,
        )
    }

    /// Total envelope width `Delta`.
    pub fn envelope(&self) -> f64 {
        envelope_width(self.epsilon, self.delta_phi, self.gamma)
    }
}

/// Post-selection centre on the probe branch of `n = beta^2`: `sqrt(nu) alpha e^{-i phi0 beta^2}`.
pub fn mean_rotation_center(p: &Parameters) -> Complex64 {
    Complex64::from_polar(libm::sqrt(p.nu) * p.alpha, -p.phi0 * p.beta * p.beta)
}

/// `Delta = sqrt(epsilon^2 + (gamma tan(delta_phi / 2))^2)`.
pub fn envelope_width(epsilon: f64, delta_phi: f64, gamma: f64) -> f64 {
    let noise = gamma * libm::tan(0.5 * delta_phi);
    libm::sqrt(epsilon * epsilon + noise * noise)
}

/// Sharp projection kernel `<delta|mu_m><mu_n|delta>`.
pub fn sharp_projection_kernel(mu_m: Complex64, mu_n: Complex64, delta: Complex64) -> Complex64 {
    coherent_overlap(delta, mu_m) * coherent_overlap(mu_n, delta)
}

/// `(1 / 2 pi Delta^2) \int exp(-|z - delta|^2 / 2 Delta^2) <z|mu_m><mu_n|z> d^2 z` in closed form.
///
/// With `t = 1 / (1 + 2 Delta^2)` the Gaussian integral evaluates to
/// `t exp((1 - t) mu_m conj(mu_n) + t (conj(delta) mu_m + delta conj(mu_n) - |delta|^2) - (|mu_m|^2 + |mu_n|^2) / 2)`,
/// which reduces to the sharp kernel at `Delta = 0` without cancellation.
pub fn averaged_projection_kernel(
    mu_m: Complex64,
    mu_n: Complex64,
    delta: Complex64,
    envelope: f64,
) -> Complex64 {
    let t = 1.0 / (1.0 + 2.0 * envelope * envelope);
    let exponent = (1.0 - t) * mu_m * mu_n.conj()
        + t * (delta.conj() * mu_m + delta * mu_n.conj() - delta.norm_sqr())
        - 0.5 * (mu_m.norm_sqr() + mu_n.norm_sqr());
    exponent.exp() * t
}

fn project_with<K>(state: &BranchState, kernel: K) -> Result<SignalDensity>
where
    K: Fn(Complex64, Complex64) -> Complex64,
{
    let window = state.window();
    let len = window.len();
    let c = state.coeffs();
    let mu = state.probe_amplitudes();
    let mut data = vec![Complex64::new(0.0, 0.0); len * len];
    for i in 0..len {
        let ci = c[i];
        if ci.norm_sqr() == 0.0 {
            continue;
        }
        for j in i..len {
            let v = ci * c[j].conj() * state.decoherence_local(i, j) * kernel(mu[i], mu[j]) * FRAC_1_PI;
            data[i * len + j] = v;
            data[j * len + i] = v.conj();
        }
        // the diagonal is real by construction; drop rounding residue
        data[i * len + i].im = 0.0;
    }
    let rho = SignalDensity::from_block(window.lo, len, data)?;
    if !(rho.trace_raw() >= EMPTY_BIN_THRESHOLD) {
        return Err(Error::EmptyBin {
            trace_raw: rho.trace_raw(),
        });
    }
    Ok(rho)
}

/// Sharp heterodyne outcome `delta`: `rho_s[m,n] = c_m c_n^* D[m,n] <delta|mu_m><mu_n|delta> / pi`.
///
/// The raw trace is the Husimi density of the probe at `delta`.
pub fn project_heterodyne(state: &BranchState, delta: Complex64) -> Result<SignalDensity> {
    project_with(state, |a, b| sharp_projection_kernel(a, b, delta))
}

/// Heterodyne post-selection smeared over the envelope `Delta` of `settings`.
pub fn project_heterodyne_averaged(
    state: &BranchState,
    settings: &HeterodyneSettings,
) -> Result<SignalDensity> {
    let envelope = settings.envelope();
    let delta = settings.delta;
    project_with(state, |a, b| averaged_projection_kernel(a, b, delta, envelope))
}

/// Probability that an outcome passes the acceptance envelope
/// `exp(-|z - delta|^2 / 2 epsilon^2)` around `delta`.
///
/// Each branch contributes `|c_n|^2 (2 eps^2 / (1 + 2 eps^2)) exp(-|delta - mu_n|^2 / (1 + 2 eps^2))`.
pub fn postselection_probability(state: &BranchState, delta: Complex64, epsilon: f64) -> Result<f64> {
    check_positive("epsilon", epsilon)?;
    let w = 2.0 * epsilon * epsilon;
    let scale = w / (1.0 + w);
    let p = state
        .coeffs()
        .iter()
        .zip(state.probe_amplitudes())
        .map(|(c, mu)| c.norm_sqr() * libm::exp(-(delta - mu).norm_sqr() / (1.0 + w)))
        .sum::<f64>()
        * scale;
    Ok(p.clamp(0.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::apply_probe_loss;
    use crate::kerr::{apply_cross_kerr, fock_cutoff, make_coherent_product};

    /// Midpoint-rule 2-D quadrature of the smeared kernel on a square around `delta`.
    fn kernel_by_quadrature(mu_m: Complex64, mu_n: Complex64, delta: Complex64, env: f64, n: usize) -> Complex64 {
        let half = 6.0 * env.max(0.5) + 0.5 * (mu_m - delta).norm().max((mu_n - delta).norm());
        let h = 2.0 * half / n as f64;
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..n {
            for j in 0..n {
                let z = delta + Complex64::new(-half + (i as f64 + 0.5) * h, -half + (j as f64 + 0.5) * h);
                let weight = libm::exp(-(z - delta).norm_sqr() / (2.0 * env * env));
                acc += sharp_projection_kernel(mu_m, mu_n, z) * weight;
            }
        }
        acc * h * h / (2.0 * core::f64::consts::PI * env * env)
    }

    #[test]
    fn envelope_examples() {
        assert_eq!(envelope_width(0.3, 0.0, 12.0), 0.3);
        assert!((envelope_width(0.0, 0.4, 2.0) - 2.0 * libm::tan(0.2)).abs() < 1e-15);
        let gamma = 70.0 * libm::sqrt(0.5);
        let expected = libm::sqrt(0.09 + (gamma * libm::tan(0.005)) * (gamma * libm::tan(0.005)));
        let d = envelope_width(0.3, 0.01, gamma);
        assert_eq!(d, expected);
        // sqrt(0.09 + 0.247486^2)
        assert!((d - 0.38891).abs() < 1e-5, "{d}");
    }

    #[test]
    fn kernel_sharp_limit() {
        let mu = Complex64::new(1.2, -0.7);
        let k = averaged_projection_kernel(mu, mu, mu, 1e-6);
        assert!((k - 1.0).norm() < 1e-6);
    }

    #[test]
    fn diagonal_kernel_matches_quadrature() {
        let mu = Complex64::new(0.8, 0.3);
        for (delta, env) in [(Complex64::new(0.2, -0.4), 0.35), (Complex64::new(1.5, 0.9), 0.8)] {
            let k = averaged_projection_kernel(mu, mu, delta, env);
            assert!(k.im.abs() < 1e-15 && k.re > 0.0);
            let q = kernel_by_quadrature(mu, mu, delta, env, 400);
            assert!((k - q).norm() < 1e-8, "{k} vs {q}");
        }
    }

    #[test]
    fn off_diagonal_kernel_matches_quadrature() {
        let mu_m = Complex64::from_polar(2.0, -0.3);
        let mu_n = Complex64::from_polar(2.0, -0.9);
        let delta = Complex64::from_polar(2.1, -0.5);
        let k = averaged_projection_kernel(mu_m, mu_n, delta, 0.4);
        let q = kernel_by_quadrature(mu_m, mu_n, delta, 0.4, 400);
        assert!((k - q).norm() < 1e-8, "{k} vs {q}");
    }

    #[test]
    fn smearing_only_washes_out_coherences() {
        let b = libm::sqrt(30.0);
        let s = apply_cross_kerr(make_coherent_product(b, b, fock_cutoff(b, 8.0)).unwrap(), 0.4);
        let delta = Complex64::new(-3.41, 2.09);
        // a sharp projection leaves every branch pair fully coherent; the envelope
        // lowers |K_mn| below sqrt(K_mm K_nn)
        let mu = |k| s.probe_amplitude(k);
        for (m, n) in [(20, 25), (25, 41), (30, 33), (10, 50)] {
            let sharp = sharp_projection_kernel(mu(m), mu(n), delta);
            let sharp_diag = sharp_projection_kernel(mu(m), mu(m), delta) * sharp_projection_kernel(mu(n), mu(n), delta);
            assert!((sharp.norm_sqr() / sharp_diag.re - 1.0).abs() < 1e-9);
            let smooth = averaged_projection_kernel(mu(m), mu(n), delta, 0.3);
            let smooth_diag = averaged_projection_kernel(mu(m), mu(m), delta, 0.3)
                * averaged_projection_kernel(mu(n), mu(n), delta, 0.3);
            assert!(smooth.norm_sqr() / smooth_diag.re < 1.0 - 1e-6, "{m},{n}");
        }
    }

    #[test]
    fn product_state_projection_keeps_populations() {
        let s = make_coherent_product(3.0, 2.0, fock_cutoff(2.0, 8.0)).unwrap();
        let rho = project_heterodyne(&s, Complex64::new(3.0, 0.0)).unwrap().normalized();
        for n in 0..=s.cutoff() {
            assert!((rho.get(n, n).re - s.coeff(n).norm_sqr() / s.norm_sqr()).abs() < 1e-13);
        }
        let settings = HeterodyneSettings::new(Complex64::new(2.0, 1.0), 0.4, 0.1, 3.0).unwrap();
        let avg = project_heterodyne_averaged(&s, &settings).unwrap().normalized();
        for m in 0..=s.cutoff() {
            for n in 0..=s.cutoff() {
                let expected = s.coeff(m) * s.coeff(n).conj() / s.norm_sqr();
                assert!((avg.get(m, n) - expected).norm() < 1e-13);
            }
        }
    }

    #[test]
    fn far_outcome_is_suppressed() {
        let s = apply_cross_kerr(make_coherent_product(3.0, 2.0, 60).unwrap(), 0.1);
        let delta = Complex64::new(-9.0, 0.5);
        let rho = project_heterodyne(&s, delta).unwrap();
        let closest = s
            .probe_amplitudes()
            .iter()
            .map(|mu| (delta - mu).norm_sqr())
            .fold(f64::INFINITY, f64::min);
        assert!(rho.trace_raw() < libm::exp(-closest));
    }

    #[test]
    fn empty_bin_is_an_error() {
        let s = make_coherent_product(3.0, 1.0, 30).unwrap();
        let err = project_heterodyne(&s, Complex64::new(1e3, 0.0)).unwrap_err();
        assert!(matches!(err, Error::EmptyBin { .. }));
    }

    #[test]
    fn success_probability_limits() {
        let s = apply_probe_loss(apply_cross_kerr(make_coherent_product(4.0, 3.0, 60).unwrap(), 0.05), 0.8).unwrap();
        let delta = s.probe_amplitude(9);
        assert!((postselection_probability(&s, delta, 1e6).unwrap() - 1.0).abs() < 1e-6);

        // centre moved radially by five standard deviations of the enveloped outcome density
        let eps = 0.3;
        let sigma = libm::sqrt(0.5 + eps * eps);
        let far = delta * (1.0 + 5.0 * sigma / delta.norm());
        assert!(postselection_probability(&s, far, eps).unwrap() < 1e-4);
    }

    #[test]
    fn success_probability_matches_quadrature() {
        let s = apply_cross_kerr(make_coherent_product(2.0, 1.0, 30).unwrap(), 0.3);
        let delta = Complex64::new(1.7, -0.4);
        let eps = 0.5;
        let n = 400;
        let half = 8.0;
        let h = 2.0 * half / n as f64;
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                let z = Complex64::new(-half + (i as f64 + 0.5) * h, -half + (j as f64 + 0.5) * h);
                let q: f64 = s
                    .coeffs()
                    .iter()
                    .zip(s.probe_amplitudes())
                    .map(|(c, mu)| c.norm_sqr() * coherent_overlap(z, *mu).norm_sqr())
                    .sum::<f64>()
                    * FRAC_1_PI;
                acc += q * libm::exp(-(z - delta).norm_sqr() / (2.0 * eps * eps));
            }
        }
        acc *= h * h;
        let p = postselection_probability(&s, delta, eps).unwrap();
        assert!((p - acc).abs() < 1e-8, "{p} vs {acc}");
    }

    #[test]
    fn sharp_limit_of_averaged_projection() {
        let s = apply_probe_loss(apply_cross_kerr(make_coherent_product(3.0, 2.5, 60).unwrap(), 0.2), 0.8).unwrap();
        let delta = s.probe_amplitude(6);
        let sharp = project_heterodyne(&s, delta).unwrap();
        let settings = HeterodyneSettings::new(delta, 1e-4, 0.0, 0.0).unwrap();
        let smooth = project_heterodyne_averaged(&s, &settings).unwrap();
        let scale = sharp.block().iter().map(|z| z.norm()).fold(0.0, f64::max);
        for m in 0..=60 {
            for n in 0..=60 {
                let a = sharp.get(m, n);
                let b = smooth.get(m, n);
                assert!((a - b).norm() <= 1e-6 * a.norm().max(1e-3 * scale), "{m},{n}");
            }
        }
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn acceptance_grows_with_epsilon(e1 in 0.01..3.0f64, e2 in 0.01..3.0f64, phi in 0.0..0.5f64) {
                let s = apply_cross_kerr(make_coherent_product(3.0, 2.0, 60).unwrap(), phi);
                let delta = s.probe_amplitude(4);
                let (lo, hi) = if e1 < e2 { (e1, e2) } else { (e2, e1) };
                prop_assert!(postselection_probability(&s, delta, lo).unwrap() <= postselection_probability(&s, delta, hi).unwrap() + 1e-15);
            }

            #[test]
            fn projections_are_hermitian(re in -3.0..3.0f64, im in -3.0..3.0f64, env in 0.0..1.0f64) {
                let s = apply_probe_loss(apply_cross_kerr(make_coherent_product(2.0, 1.5, 30).unwrap(), 0.7), 0.6).unwrap();
                let settings = HeterodyneSettings::new(Complex64::new(re, im), env.max(1e-3), 0.0, 0.0).unwrap();
                let rho = project_heterodyne_averaged(&s, &settings).unwrap();
                prop_assert!(rho.hermiticity_error() < 1e-15);
                let n = rho.normalized();
                prop_assert!((n.trace() - 1.0).abs() < 1e-12);
                prop_assert!(n.populations().iter().all(|p| *p >= 0.0));
                prop_assert!(n.min_eigenvalue() > -1e-10);
            }
        }
    }
}
