// SPDX-License-Identifier: Apache-2.0

//! Cross-Kerr number squeezing, modelled end to end.
//!
//! A signal coherent state `|beta>` and a probe `|alpha>` interact through a
//! cross-Kerr phase `phi0` per photon. The probe is kept as one coherent branch
//! per signal photon number, so loss and heterodyne post-selection act on it
//! through closed-form overlaps. The post-selected signal is reduced to a
//! Gaussian state and its `g2(0)` is estimated with a click-detector model
//! after an optimised displacement.
//!
//! The crate is `no_std` with `alloc`.

#![no_std]

// `!(x > 0.0)` is used deliberately so that NaN lands in the error branch
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod channels;
pub mod density;
pub mod error;
pub mod exotic;
pub mod gaussian;
pub mod heterodyne;
pub mod kerr;
mod math;
pub mod params;
pub mod photon_stats;
pub mod pipeline;

pub use density::SignalDensity;
pub use error::{Error, Result};
pub use gaussian::GaussianState;
pub use heterodyne::HeterodyneSettings;
pub use kerr::{BranchState, FockWindow};
pub use math::{poisson_amplitude, wrap_two_pi};
pub use num_complex::Complex64;
pub use params::{NamedSet, ParamName, Parameters};
pub use pipeline::{evaluate, run_pipeline, PipelineOptions, PointResult, Variant};
