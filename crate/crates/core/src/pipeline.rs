// SPDX-License-Identifier: Apache-2.0

//! The full measurement chain for one parameter set: coherent product, Kerr
//! interaction, probe loss, heterodyne post-selection, signal loss, and the
//! click-model `g2` at the best displacement.
//!
//! Two routes share everything up to the post-selected signal density. The
//! Gaussian route reduces it to moments and applies signal loss to the
//! covariance; the Fock oracle keeps the number basis throughout and is only
//! practical for small amplitudes.

use alloc::vec::Vec;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::channels::{apply_probe_loss, apply_signal_loss};
use crate::density::SignalDensity;
use crate::error::Result;
use crate::gaussian::{apply_loss, moments_from_density, GaussianState};
use crate::heterodyne::{
    mean_rotation_center, postselection_probability, project_heterodyne, project_heterodyne_averaged,
    HeterodyneSettings,
};
use crate::kerr::{BranchState, FockWindow, DEFAULT_K_SIGMA, DEFAULT_TRUNCATION_TOL};
use crate::params::Parameters;
use crate::photon_stats::{
    g2_at_displacement, g2_at_displacement_fock, optimize_displacement, optimize_displacement_fock,
    principal_axes,
};

/// Which reduction of the post-selected signal is used.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Variant {
    /// Moment-matched Gaussian state, loss on the covariance.
    Gaussian,
    /// Number-basis state throughout, loss by Kraus sum.
    FockOracle,
}

impl Variant {
    pub fn as_str(self) -> &'static str {
        match self {
            Variant::Gaussian => "gaussian",
            Variant::FockOracle => "fock-oracle",
        }
    }
}

/// Numerical and measurement settings that are not part of [`Parameters`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PipelineOptions {
    /// Width of the Fock window in Poisson standard deviations.
    pub k_sigma: f64,
    /// Largest signal norm allowed outside the window.
    pub truncation_tol: f64,
    /// Amplitude converting phase noise to envelope width; defaults to `sqrt(nu) alpha`.
    pub gamma: Option<f64>,
    /// Post-selection centre; defaults to the branch of the mean photon number.
    pub delta: Option<Complex64>,
    /// Project on the bare outcome instead of the smeared envelope.
    pub sharp: bool,
}

impl Default for PipelineOptions {
    fn default() -> Self {
        PipelineOptions {
            k_sigma: DEFAULT_K_SIGMA,
            truncation_tol: DEFAULT_TRUNCATION_TOL,
            gamma: None,
            delta: None,
            sharp: false,
        }
    }
}

/// Heterodyne settings implied by a parameter set and overrides.
pub fn heterodyne_settings(p: &Parameters, opts: &PipelineOptions) -> Result<HeterodyneSettings> {
    HeterodyneSettings::new(
        opts.delta.unwrap_or_else(|| mean_rotation_center(p)),
        p.epsilon,
        p.delta_phi,
        opts.gamma.unwrap_or(libm::sqrt(p.nu) * p.alpha),
    )
}

/// Fock window used for the signal.
pub fn signal_window(p: &Parameters, opts: &PipelineOptions) -> FockWindow {
    FockWindow::around_poisson(p.beta, opts.k_sigma)
}

/// `|beta>|alpha>` after the Kerr interaction and probe loss.
pub fn prepare_branches(p: &Parameters, opts: &PipelineOptions) -> Result<BranchState> {
    p.validate()?;
    let state = BranchState::coherent_product(p.alpha, p.beta, signal_window(p, opts), opts.truncation_tol)?;
    apply_probe_loss(state.cross_kerr(p.phi0), p.nu)
}

/// Signal state right after post-selection, before signal loss.
#[derive(Debug, Clone, PartialEq)]
pub struct Postselected {
    /// Unnormalised signal density; its raw trace is the outcome density.
    pub signal: SignalDensity,
    /// Probability that an outcome lands in the acceptance envelope.
    pub success_probability: f64,
    pub settings: HeterodyneSettings,
    pub window: FockWindow,
}

/// Run the chain up to and including the heterodyne post-selection.
pub fn postselect(p: &Parameters, opts: &PipelineOptions) -> Result<Postselected> {
    let settings = heterodyne_settings(p, opts)?;
    let branches = prepare_branches(p, opts)?;
    let signal = if opts.sharp {
        project_heterodyne(&branches, settings.delta)?
    } else {
        project_heterodyne_averaged(&branches, &settings)?
    };
    let success_probability = postselection_probability(&branches, settings.delta, settings.epsilon)?;
    Ok(Postselected {
        signal,
        success_probability,
        settings,
        window: branches.window(),
    })
}

/// Gaussian signal state just before the displacement and click measurement.
#[derive(Debug, Clone, PartialEq)]
pub struct PipelineOutput {
    pub state: GaussianState,
    pub success_probability: f64,
    pub settings: HeterodyneSettings,
    pub window: FockWindow,
}

/// The Gaussian route.
///
/// Loss on the signal is applied to the moments (`M -> eta M + (1 - eta) I`),
/// which equals the Kraus sum for the first and second moments exactly.
pub fn run_pipeline(p: &Parameters, opts: &PipelineOptions) -> Result<PipelineOutput> {
    let post = postselect(p, opts)?;
    let before_loss = moments_from_density(&post.signal.normalized())?;
    Ok(PipelineOutput {
        state: apply_loss(&before_loss, p.eta)?,
        success_probability: post.success_probability,
        settings: post.settings,
        window: post.window,
    })
}

/// The Fock route: post-selected signal after the Kraus loss channel, normalised.
pub fn run_fock_oracle(p: &Parameters, opts: &PipelineOptions) -> Result<(SignalDensity, Postselected)> {
    let post = postselect(p, opts)?;
    let lossy = apply_signal_loss(&post.signal, p.eta)?.normalized();
    Ok((lossy, post))
}

/// Outcome for one parameter point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PointResult {
    /// Mean photon number after the optimal displacement.
    pub n_displacement: f64,
    /// Minimum click `g2(0)`.
    pub g2: f64,
    pub success_prob: f64,
    /// Phase-space direction of the optimal displacement.
    pub axis_angle: f64,
    /// `d^2 g2 / d nbar^2` at the optimum.
    pub curvature: f64,
}

/// Run the chosen route and minimise `g2` over the displacement.
pub fn evaluate(p: &Parameters, variant: Variant, opts: &PipelineOptions) -> Result<PointResult> {
    evaluate_curve(p, variant, opts, &[]).map(|(point, _)| point)
}

/// [`evaluate`] plus the click `g2` at each mean photon number in `grid`,
/// taking the better principal axis at every point.
pub fn evaluate_curve(
    p: &Parameters,
    variant: Variant,
    opts: &PipelineOptions,
    grid: &[f64],
) -> Result<(PointResult, Vec<f64>)> {
    let (opt, success_prob, curve) = match variant {
        Variant::Gaussian => {
            let out = run_pipeline(p, opts)?;
            let curve = grid
                .iter()
                .map(|&n| g2_best_axis(&out.state, p.p_dark, n))
                .collect::<Result<Vec<_>>>()?;
            (optimize_displacement(&out.state, p.p_dark)?, out.success_probability, curve)
        }
        Variant::FockOracle => {
            let (rho, post) = run_fock_oracle(p, opts)?;
            let [a, b] = principal_axes(&moments_from_density(&rho)?);
            let curve = grid
                .iter()
                .map(|&n| {
                    let ga = g2_at_displacement_fock(&rho, p.p_dark, n, a)?;
                    let gb = g2_at_displacement_fock(&rho, p.p_dark, n, b)?;
                    Ok(ga.min(gb))
                })
                .collect::<Result<Vec<_>>>()?;
            (optimize_displacement_fock(&rho, p.p_dark)?, post.success_probability, curve)
        }
    };
    let point = PointResult {
        n_displacement: opt.mean_photons,
        g2: opt.g2,
        success_prob,
        axis_angle: opt.axis_angle,
        curvature: opt.curvature,
    };
    Ok((point, curve))
}

/// Click `g2` after displacing to `mean_photons`, along whichever principal axis gives the lower value.
pub fn g2_best_axis(state: &GaussianState, p_dark: f64, mean_photons: f64) -> Result<f64> {
    let [a, b] = principal_axes(state);
    let ga = g2_at_displacement(state, p_dark, mean_photons, a)?;
    let gb = g2_at_displacement(state, p_dark, mean_photons, b)?;
    Ok(ga.min(gb))
}

/// Peak bytes held by the large matrices of one evaluation.
pub fn memory_estimate(p: &Parameters, variant: Variant, opts: &PipelineOptions) -> u64 {
    const ENTRY: u64 = 16;
    let window = signal_window(p, opts);
    let w = window.len() as u64;
    // branch coherences (only stored once the probe is lossy) and the projected signal
    let branches = if p.nu < 1.0 { w * w } else { 0 };
    let mut total = (branches + w * w) * ENTRY;
    if variant == Variant::FockOracle {
        let full = window.hi as u64 + 1;
        let reach = libm::sqrt(full as f64) + p.beta;
        let out = (reach * reach + 10.0 * reach + 21.0) as u64;
        total += (full * full + full * out) * ENTRY;
    }
    total
}
