// SPDX-License-Identifier: Apache-2.0

//! Second-order coherence: the exact Fock-basis value and the click-detector
//! estimate with dark counts, plus the search over the pre-detection displacement.

use alloc::vec::Vec;

use nalgebra::DVector;
use num_complex::Complex64;

use crate::density::SignalDensity;
use crate::error::{Error, Result};
use crate::gaussian::{apply_symplectic, beamsplitter_symplectic, joint_vacuum_probability, GaussianState};
use crate::math::golden_section;

/// Lower end of the displacement search, in mean photons.
pub const MIN_MEAN_PHOTONS: f64 = 1e-3;
/// Upper end of the displacement search, in mean photons.
pub const MAX_MEAN_PHOTONS: f64 = 4.0;
/// Golden-section bracket width at which the search stops.
pub const SEARCH_TOL: f64 = 1e-4;
/// A curve whose spread is below this is treated as flat rather than bounded.
pub const FLAT_TOL: f64 = 1e-9;
const COARSE_POINTS: usize = 64;

/// `Tr[rho a^dag a^dag a a] / Tr[rho a^dag a]^2` for a (possibly unnormalised) state.
pub fn g2_exact(rho: &SignalDensity) -> Result<f64> {
    let trace = rho.trace();
    let mut n1 = 0.0;
    let mut n2 = 0.0;
    for (k, p) in (rho.offset()..).zip(rho.populations()) {
        let n = k as f64;
        n1 += n * p;
        n2 += n * (n - 1.0) * p;
    }
    if !(trace > 0.0) || !(n1 > 0.0) {
        return Err(Error::ZeroIntensity);
    }
    Ok(n2 * trace / (n1 * n1))
}

/// Click probabilities of the two detectors behind a 50/50 beamsplitter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClickProbabilities {
    /// Detector one clicks, detector two anything.
    pub ca: f64,
    /// Detector two clicks, detector one anything.
    pub ac: f64,
    /// Both click.
    pub cc: f64,
}

impl ClickProbabilities {
    /// Combine no-click probabilities of the light alone with independent dark counts.
    ///
    /// `na` and `an` are the probabilities that no photon reaches detector one or
    /// detector two respectively, `nn` that neither sees a photon.
    pub fn from_no_click(na: f64, an: f64, nn: f64, p_dark: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&p_dark) {
            return Err(Error::OutOfRange {
                name: "p_dark",
                value: p_dark,
                allowed: "[0, 1)",
            });
        }
        let quiet = 1.0 - p_dark;
        let ca = 1.0 - na * quiet;
        let ac = 1.0 - an * quiet;
        // inclusion-exclusion over the two "no click" events
        let cc = ac - na * quiet + nn * quiet * quiet;
        Ok(ClickProbabilities { ca, ac, cc })
    }

    /// `P(cc) / (P(ca) P(ac))`.
    pub fn g2(&self) -> Result<f64> {
        let singles = self.ca * self.ac;
        if !(singles > 0.0) {
            return Err(Error::ZeroSingles);
        }
        Ok(self.cc / singles)
    }
}

/// Click probabilities for a single-mode Gaussian input split against vacuum.
pub fn click_probabilities(g: &GaussianState, p_dark: f64) -> Result<ClickProbabilities> {
    if g.modes() != 1 {
        return Err(Error::ModeCount {
            expected: 1,
            found: g.modes(),
        });
    }
    let split = apply_symplectic(&g.tensor(&GaussianState::vacuum(1))?, &beamsplitter_symplectic(0.5)?)?;
    let na = joint_vacuum_probability(&split.mode(0)?);
    let an = joint_vacuum_probability(&split.mode(1)?);
    let nn = joint_vacuum_probability(&split);
    ClickProbabilities::from_no_click(na, an, nn, p_dark)
}

/// Click-detector estimate of `g2(0)` for a Gaussian input.
pub fn g2_click(g: &GaussianState, p_dark: f64) -> Result<f64> {
    click_probabilities(g, p_dark)?.g2()
}

/// Click probabilities computed directly from Fock populations.
///
/// Behind a 50/50 splitter a photon number `n` leaves one port empty with
/// probability `2^-n`, and both ports are empty only for `n = 0`.
pub fn click_probabilities_fock(rho: &SignalDensity, p_dark: f64) -> Result<ClickProbabilities> {
    click_from_populations(rho.offset(), &rho.populations(), p_dark)
}

fn click_from_populations(offset: usize, populations: &[f64], p_dark: f64) -> Result<ClickProbabilities> {
    let trace: f64 = populations.iter().sum();
    if !(trace > 0.0) {
        return Err(Error::ZeroIntensity);
    }
    let mut half_empty = 0.0;
    let mut weight = libm::pow(0.5, offset as f64);
    for p in populations {
        half_empty += p * weight;
        weight *= 0.5;
    }
    let empty = if offset == 0 { populations[0] } else { 0.0 };
    ClickProbabilities::from_no_click(half_empty / trace, half_empty / trace, empty / trace, p_dark)
}

/// Fock-basis click estimate of `g2(0)`.
pub fn g2_click_fock(rho: &SignalDensity, p_dark: f64) -> Result<f64> {
    click_probabilities_fock(rho, p_dark)?.g2()
}

/// Result of the displacement search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DisplacementOptimum {
    /// Mean photon number `|d|^2 / 4` after displacement.
    pub mean_photons: f64,
    /// Click `g2(0)` at the optimum.
    pub g2: f64,
    /// Phase-space direction of the residual displacement, in `[0, pi)`.
    pub axis_angle: f64,
    /// `d^2 g2 / d nbar^2` at the optimum; small values mean the optimum is forgiving.
    pub curvature: f64,
}

/// Phase-space displacement vector of mean photon number `mean_photons` along `angle`.
pub fn displacement_vector(mean_photons: f64, angle: f64) -> DVector<f64> {
    let (s, c) = libm::sincos(angle);
    let amp = 2.0 * libm::sqrt(mean_photons.max(0.0));
    DVector::from_vec(alloc::vec![amp * c, amp * s])
}

/// Principal axes of a single-mode covariance, major axis first, each in `[0, pi)`.
pub fn principal_axes(g: &GaussianState) -> [f64; 2] {
    let m = g.covariance();
    let major = 0.5 * libm::atan2(2.0 * m[(0, 1)], m[(0, 0)] - m[(1, 1)]);
    let wrap = |a: f64| {
        let pi = core::f64::consts::PI;
        let r = a % pi;
        if r < 0.0 {
            r + pi
        } else {
            r
        }
    };
    [wrap(major), wrap(major + core::f64::consts::FRAC_PI_2)]
}

/// Click `g2` after re-centring `g` and displacing it to `mean_photons` along `angle`.
pub fn g2_at_displacement(g: &GaussianState, p_dark: f64, mean_photons: f64, angle: f64) -> Result<f64> {
    let centred = GaussianState::new(g.covariance().clone(), displacement_vector(mean_photons, angle))?;
    g2_click(&centred, p_dark)
}

/// Fock-basis click `g2` after re-centring `rho` and displacing it to `mean_photons` along `angle`.
pub fn g2_at_displacement_fock(rho: &SignalDensity, p_dark: f64, mean_photons: f64, angle: f64) -> Result<f64> {
    let rho = rho.normalized();
    let shift = Complex64::from_polar(libm::sqrt(mean_photons.max(0.0)), angle) - rho.expect_a();
    click_from_populations(0, &rho.displaced_populations(shift), p_dark)?.g2()
}

/// Minimise the click `g2` over the displacement applied just before detection.
///
/// The state is re-centred and displaced along each principal axis of its
/// covariance; the mean photon number is searched on a log grid over
/// `[MIN_MEAN_PHOTONS, MAX_MEAN_PHOTONS]` and refined by golden section.
pub fn optimize_displacement(g: &GaussianState, p_dark: f64) -> Result<DisplacementOptimum> {
    if g.modes() != 1 {
        return Err(Error::ModeCount {
            expected: 1,
            found: g.modes(),
        });
    }
    let axes = principal_axes(g);
    let cov = g.covariance().clone();
    minimize_over_axes(axes, |nbar, angle| {
        let centred = GaussianState::new(cov.clone(), displacement_vector(nbar, angle))?;
        g2_click(&centred, p_dark)
    })
}

/// Fock-basis version of [`optimize_displacement`]: the state is displaced in
/// the number basis and clicks are counted from the exact populations.
pub fn optimize_displacement_fock(rho: &SignalDensity, p_dark: f64) -> Result<DisplacementOptimum> {
    let rho = rho.normalized();
    let centre = rho.expect_a();
    let g = crate::gaussian::moments_from_density(&rho)?;
    minimize_over_axes(principal_axes(&g), |nbar, angle| {
        let target = Complex64::from_polar(libm::sqrt(nbar), angle);
        let pops = rho.displaced_populations(target - centre);
        click_from_populations(0, &pops, p_dark)?.g2()
    })
}

fn minimize_over_axes<F>(axes: [f64; 2], mut g2_at: F) -> Result<DisplacementOptimum>
where
    F: FnMut(f64, f64) -> Result<f64>,
{
    let (ln_lo, ln_hi) = (libm::log(MIN_MEAN_PHOTONS), libm::log(MAX_MEAN_PHOTONS));
    let grid: Vec<f64> = (0..COARSE_POINTS)
        .map(|i| libm::exp(ln_lo + (ln_hi - ln_lo) * i as f64 / (COARSE_POINTS - 1) as f64))
        .collect();

    let mut best: Option<(usize, usize, f64)> = None;
    let mut spread = (f64::INFINITY, f64::NEG_INFINITY);
    let mut curves = [Vec::new(), Vec::new()];
    for (a, &angle) in axes.iter().enumerate() {
        for (i, &nbar) in grid.iter().enumerate() {
            let v = g2_at(nbar, angle)?;
            spread = (spread.0.min(v), spread.1.max(v));
            curves[a].push(v);
            if best.is_none_or(|(_, _, b)| v < b) {
                best = Some((a, i, v));
            }
        }
    }
    let (a, i, coarse) = best.ok_or(Error::ZeroSingles)?;
    let angle = axes[a];

    if spread.1 - spread.0 <= FLAT_TOL {
        return Ok(DisplacementOptimum {
            mean_photons: grid[i],
            g2: coarse,
            axis_angle: angle,
            curvature: 0.0,
        });
    }
    if i == 0 || i == COARSE_POINTS - 1 {
        return Err(Error::OptimumAtBoundary {
            mean_photons: grid[i],
        });
    }

    let mut failure = None;
    let (nbar, g2) = golden_section(
        |x| match g2_at(x, angle) {
            Ok(v) => v,
            Err(e) => {
                failure.get_or_insert(e);
                f64::INFINITY
            }
        },
        grid[i - 1],
        grid[i + 1],
        SEARCH_TOL.min(1e-3 * grid[i]),
    );
    if let Some(e) = failure {
        return Err(e);
    }
    let (nbar, g2) = if g2 <= coarse { (nbar, g2) } else { (grid[i], coarse) };

    let h = 1e-2 * nbar;
    let curvature = (g2_at(nbar + h, angle)? - 2.0 * g2 + g2_at(nbar - h, angle)?) / (h * h);
    Ok(DisplacementOptimum {
        mean_photons: nbar,
        g2,
        axis_angle: angle,
        curvature,
    })
}
