// SPDX-License-Identifier: Apache-2.0

use thiserror::Error;

/// Errors raised by the model.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{name} = {value} is outside {allowed}")]
    OutOfRange {
        name: &'static str,
        value: f64,
        allowed: &'static str,
    },

    #[error("Fock truncation leaves {deficit:e} of the norm outside the basis (tolerance {tolerance:e})")]
    Truncation { deficit: f64, tolerance: f64 },

    #[error("post-selection bin is empty: raw trace {trace_raw:e} underflows")]
    EmptyBin { trace_raw: f64 },

    #[error("covariance violates the uncertainty relation: smallest symplectic eigenvalue {min_symplectic_eigenvalue}")]
    Unphysical { min_symplectic_eigenvalue: f64 },

    #[error("matrix is not symplectic: max |S Omega S^T - Omega| = {deviation:e}")]
    NotSymplectic { deviation: f64 },

    #[error("covariance matrix is singular")]
    Singular,

    #[error("mean photon number vanishes, g2 is undefined")]
    ZeroIntensity,

    #[error("single-detector click probability vanishes, g2 is undefined")]
    ZeroSingles,

    #[error("expected a {expected}-mode state, got {found} modes")]
    ModeCount { expected: usize, found: usize },

    #[error("dimension mismatch: {0}")]
    Dimension(&'static str),

    #[error("g2 minimum sits on the search boundary at mean photon number {mean_photons}")]
    OptimumAtBoundary { mean_photons: f64 },

    #[error("Fock cutoff {cutoff} too small: {tail_mass:e} of the population sits in the top level")]
    CutoffTooSmall { cutoff: usize, tail_mass: f64 },
}

pub type Result<T> = core::result::Result<T, Error>;

pub(crate) fn check_unit(name: &'static str, value: f64) -> Result<()> {
    if (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(Error::OutOfRange {
            name,
            value,
            allowed: "[0, 1]",
        })
    }
}

pub(crate) fn check_nonnegative(name: &'static str, value: f64) -> Result<()> {
    if value >= 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(Error::OutOfRange {
            name,
            value,
            allowed: "[0, inf)",
        })
    }
}

pub(crate) fn check_positive(name: &'static str, value: f64) -> Result<()> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(Error::OutOfRange {
            name,
            value,
            allowed: "(0, inf)",
        })
    }
}
