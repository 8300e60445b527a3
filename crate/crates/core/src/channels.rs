// SPDX-License-Identifier: Apache-2.0

//! Photon loss in each arm.
//!
//! The probe stays a coherent-state branch under loss, so loss there is applied
//! analytically. The signal is attenuated in the Fock basis with the
//! amplitude-damping Kraus sum `A_k |n> = sqrt(C(n,k) eta^(n-k) (1-eta)^k) |n-k>`.

use alloc::vec;

use num_complex::Complex64;

use crate::density::SignalDensity;
use crate::error::{check_unit, Result};
use crate::kerr::BranchState;
use crate::math::ln_binomial;

/// Coherent-state overlap `<mu|nu> = exp(-|mu|^2/2 - |nu|^2/2 + conj(mu) nu)`.
pub fn coherent_overlap(mu: Complex64, nu: Complex64) -> Complex64 {
    (mu.conj() * nu - 0.5 * (mu.norm_sqr() + nu.norm_sqr())).exp()
}

/// Probe-arm loss with transmission `nu`.
pub fn apply_probe_loss(state: BranchState, nu: f64) -> Result<BranchState> {
    state.probe_loss(nu)
}

/// Kraus weight `sqrt(C(j,k) eta^(j-k) (1-eta)^k)` for losing `k` of `j` photons.
fn kraus_weight(j: usize, k: usize, eta: f64) -> f64 {
    if eta == 0.0 {
        return if k == j { 1.0 } else { 0.0 };
    }
    if eta == 1.0 {
        return if k == 0 { 1.0 } else { 0.0 };
    }
    let ln = ln_binomial(j, k) + (j - k) as f64 * libm::log(eta) + k as f64 * libm::log1p(-eta);
    libm::exp(0.5 * ln)
}

/// Signal-arm loss with transmission `eta`.
///
/// The output covers Fock indices `0..=cutoff` of the input, whatever its offset.
/// Cost is O(cutoff^3); bright post-selected states are attenuated on their
/// Gaussian moments instead (see [`crate::gaussian::apply_loss`]).
pub fn apply_signal_loss(rho: &SignalDensity, eta: f64) -> Result<SignalDensity> {
    check_unit("eta", eta)?;
    if eta == 1.0 {
        return Ok(rho.clone());
    }
    let cutoff = rho.cutoff();
    let dim = cutoff + 1;
    // weights[j * dim + k] for k <= j
    let mut weights = vec![0.0; dim * dim];
    for j in 0..dim {
        for k in 0..=j {
            weights[j * dim + k] = kraus_weight(j, k, eta);
        }
    }
    let lo = rho.offset();
    let mut out = vec![Complex64::new(0.0, 0.0); dim * dim];
    for m in 0..dim {
        for n in m..dim {
            // sources (m+k, n+k) must sit inside the stored window
            let k_start = lo.saturating_sub(m);
            let mut acc = Complex64::new(0.0, 0.0);
            for k in k_start..=(cutoff - n) {
                let w = weights[(m + k) * dim + k] * weights[(n + k) * dim + k];
                acc += rho.get(m + k, n + k) * w;
            }
            out[m * dim + n] = acc;
            out[n * dim + m] = acc.conj();
        }
    }
    let mut lossy = SignalDensity::from_block(0, dim, out)?;
    // trace preserving: the outcome density of the input carries over
    lossy.set_trace_raw(rho.trace_raw());
    Ok(lossy)
}
