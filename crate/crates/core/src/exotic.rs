// SPDX-License-Identifier: Apache-2.0

//! Non-Gaussian outputs of the Kerr post-selection: the Bayesian width
//! predictor, Fock-basis Wigner maps, two-peak number superpositions and
//! the optomechanical overlap formulas.

use alloc::vec;
use alloc::vec::Vec;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::channels::coherent_overlap;
use crate::density::SignalDensity;
use crate::error::{check_nonnegative, check_positive, Error, Result};
use crate::kerr::{fock_cutoff, DEFAULT_K_SIGMA};
use crate::math::poisson_amplitude;

/// Largest population allowed in the top Fock level before a Wigner map is refused.
pub const WIGNER_TAIL_TOL: f64 = 1e-8;

/// Posterior number variance `m sigma^2 / phi0^2 / (m + sigma^2 / phi0^2)` after
/// a phase readout of precision `sigma` on a Poisson prior of mean `m_bar`.
pub fn bayesian_posterior_variance(m_bar: f64, sigma: f64, phi0: f64) -> Result<f64> {
    check_positive("m_bar", m_bar)?;
    check_positive("sigma", sigma)?;
    check_positive("phi0", phi0)?;
    let s = (sigma / phi0) * (sigma / phi0);
    Ok(m_bar * s / (m_bar + s))
}

/// Wigner function of a Fock-basis state at `(x, p)`, with `x = a + a^dag`.
///
/// Uses the Laguerre recursion over the Wigner functions of `|m><n|`;
/// the result integrates to one over the `(x, p)` plane.
pub fn fock_wigner_value(rho: &SignalDensity, x: f64, p: f64) -> f64 {
    let size = rho.cutoff() + 1;
    let lo = rho.offset();
    let a = Complex64::new(0.5 * x, 0.5 * p);
    let mut w = vec![Complex64::new(0.0, 0.0); size];
    w[0] = Complex64::new(libm::exp(-2.0 * a.norm_sqr()) * core::f64::consts::FRAC_1_PI, 0.0);
    let mut total = if lo == 0 { rho.get(0, 0).re * w[0].re } else { 0.0 };
    for n in 1..size {
        w[n] = a * w[n - 1] * (2.0 / libm::sqrt(n as f64));
        if lo == 0 {
            total += 2.0 * (rho.get(0, n) * w[n]).re;
        }
    }
    for m in 1..size {
        let sm = libm::sqrt(m as f64);
        let mut temp = w[m];
        w[m] = (a.conj() * temp * 2.0 - w[m - 1] * sm) / sm;
        if m >= lo {
            total += (rho.get(m, m) * w[m]).re;
        }
        for n in m + 1..size {
            let next = (a * w[n - 1] * 2.0 - temp * sm) / libm::sqrt(n as f64);
            temp = w[n];
            w[n] = next;
            if m >= lo {
                total += 2.0 * (rho.get(m, n) * w[n]).re;
            }
        }
    }
    0.5 * total
}

/// Refuse states whose top Fock level still carries population.
pub fn check_wigner_cutoff(rho: &SignalDensity) -> Result<()> {
    let pops = rho.populations();
    let trace = rho.trace();
    let top = pops.last().copied().unwrap_or(0.0) / trace;
    if top > WIGNER_TAIL_TOL {
        return Err(Error::CutoffTooSmall {
            cutoff: rho.cutoff(),
            tail_mass: top,
        });
    }
    Ok(())
}

/// Wigner map on the grid `xs x ps`; entry `(i, j)` is `W(xs[i], ps[j])`.
///
/// The state is normalised first. Fails when the top Fock level still carries
/// population, since the truncated map is then missing part of the state.
pub fn fock_wigner_grid(rho: &SignalDensity, xs: &[f64], ps: &[f64]) -> Result<DMatrix<f64>> {
    check_wigner_cutoff(rho)?;
    let rho = rho.normalized();
    Ok(DMatrix::from_fn(xs.len(), ps.len(), |i, j| fock_wigner_value(&rho, xs[i], ps[j])))
}

/// Distribution of the quadrature `x = a + a^dag`, `<x|rho|x>`, on the points `xs`.
pub fn quadrature_distribution(rho: &SignalDensity, xs: &[f64]) -> Vec<f64> {
    let rho = rho.normalized();
    let size = rho.cutoff() + 1;
    let lo = rho.offset();
    let mut psi = vec![0.0; size];
    xs.iter()
        .map(|&x| {
            // number-state wavefunctions for unit vacuum variance
            psi[0] = libm::pow(2.0 * core::f64::consts::PI, -0.25) * libm::exp(-0.25 * x * x);
            if size > 1 {
                psi[1] = x * psi[0];
            }
            for n in 1..size - 1 {
                psi[n + 1] = (x * psi[n] - libm::sqrt(n as f64) * psi[n - 1]) / libm::sqrt(n as f64 + 1.0);
            }
            let mut total = 0.0;
            for m in lo..size {
                total += rho.get(m, m).re * psi[m] * psi[m];
                for n in m + 1..size {
                    total += 2.0 * rho.get(m, n).re * psi[m] * psi[n];
                }
            }
            total
        })
        .collect()
}

/// Number distribution obtained by post-selecting a Kerr-entangled probe on a sharp outcome.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TwoPeakState {
    /// Normalised amplitudes `c_n`, `n = 0..=cutoff`.
    pub amplitudes: Vec<Complex64>,
    /// Detected peaks, largest first.
    pub peaks: Vec<usize>,
    /// Index distance between the two largest peaks, if there are two.
    pub separation: Option<usize>,
}

impl TwoPeakState {
    pub fn populations(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|c| c.norm_sqr()).collect()
    }
}

/// Lossless, noiseless post-selection of `|beta>|alpha>` after the Kerr
/// interaction: `c_n ~ e^{-beta^2/2} beta^n / sqrt(n!) <delta|alpha e^{-i phi0 n}>`.
pub fn two_peak_amplitudes(alpha: f64, beta: f64, phi0: f64, delta: Complex64) -> Result<TwoPeakState> {
    check_nonnegative("alpha", alpha)?;
    check_nonnegative("beta", beta)?;
    let cutoff = fock_cutoff(beta, DEFAULT_K_SIGMA);
    let mut amplitudes: Vec<Complex64> = (0..=cutoff)
        .map(|n| {
            let mu = Complex64::from_polar(alpha, -phi0 * n as f64);
            coherent_overlap(delta, mu) * poisson_amplitude(beta, n)
        })
        .collect();
    let norm = libm::sqrt(amplitudes.iter().map(|c| c.norm_sqr()).sum::<f64>());
    if !(norm > 0.0) {
        return Err(Error::EmptyBin { trace_raw: 0.0 });
    }
    for c in &mut amplitudes {
        *c /= norm;
    }
    let pops: Vec<f64> = amplitudes.iter().map(|c| c.norm_sqr()).collect();
    let peaks = find_peaks(&pops);
    let separation = match peaks.as_slice() {
        [a, b, ..] => Some(a.abs_diff(*b)),
        _ => None,
    };
    Ok(TwoPeakState {
        amplitudes,
        peaks,
        separation,
    })
}

/// Local maxima above 10% of the global maximum, at least 3 indices apart, largest first.
pub fn find_peaks(values: &[f64]) -> Vec<usize> {
    let max = values.iter().cloned().fold(0.0, f64::max);
    if !(max > 0.0) {
        return Vec::new();
    }
    let mut candidates: Vec<usize> = (0..values.len())
        .filter(|&i| {
            let v = values[i];
            v > 0.1 * max
                && (i == 0 || v >= values[i - 1])
                && (i + 1 == values.len() || v > values[i + 1])
        })
        .collect();
    candidates.sort_by(|&a, &b| values[b].total_cmp(&values[a]).then(a.cmp(&b)));
    let mut peaks: Vec<usize> = Vec::new();
    for c in candidates {
        if peaks.iter().all(|&p| p.abs_diff(c) >= 3) {
            peaks.push(c);
        }
    }
    peaks
}

/// Phonon coherent amplitude `kappa(t) = (4 g / omega_m) sin^2(omega_m t / 2)`.
pub fn phonon_kappa(g: f64, omega_m: f64, t: f64) -> Result<f64> {
    check_positive("omega_m", omega_m)?;
    let s = libm::sin(0.5 * omega_m * t);
    Ok(4.0 * g / omega_m * s * s)
}

/// Which-path overlap `exp(-(M - N)^2 kappa(t)^2)` of the phonon states tied to photon numbers `N` and `M`.
pub fn optomech_overlap(g: f64, omega_m: f64, t: f64, n: u64, m: u64) -> Result<f64> {
    let kappa = phonon_kappa(g, omega_m, t)?;
    let k = m.abs_diff(n) as f64;
    Ok(libm::exp(-k * k * kappa * kappa))
}

/// Factor by which the coupling of a `|0>, |1>` superposition must grow to match
/// the overlap reached by a superposition of `|N>` and `|M>`.
pub fn equivalent_coupling_multiplier(n: u64, m: u64) -> u64 {
    m.abs_diff(n)
}
