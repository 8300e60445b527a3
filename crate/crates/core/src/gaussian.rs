// SPDX-License-Identifier: Apache-2.0

//! One- and two-mode Gaussian states.
//!
//! Quadratures are `x = a + a^dag`, `p = -i (a - a^dag)`, ordered
//! `(x1, p1, x2, p2)`. In this convention the vacuum covariance is the
//! identity, a coherent state `|g>` has displacement `(2 Re g, 2 Im g)` and
//! mean photon number `|d|^2 / 4`, and the uncertainty relation reads
//! `M + i Omega >= 0` with `Omega = diag([[0, 1], [-1, 0]], ...)`.

use nalgebra::{DMatrix, DVector};

use crate::density::SignalDensity;
use crate::error::{check_unit, Error, Result};

/// Tolerance for the uncertainty relation and symmetry checks.
pub const PHYSICALITY_TOL: f64 = 1e-8;
/// Tolerance for `S Omega S^T = Omega`.
pub const SYMPLECTIC_TOL: f64 = 1e-10;

/// Covariance matrix and displacement vector of a one- or two-mode Gaussian state.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianState {
    cov: DMatrix<f64>,
    mean: DVector<f64>,
}

impl GaussianState {
    /// Validated constructor.
    pub fn new(cov: DMatrix<f64>, mean: DVector<f64>) -> Result<Self> {
        let dim = cov.nrows();
        if !(dim == 2 || dim == 4) || cov.ncols() != dim || mean.len() != dim {
            return Err(Error::Dimension("one or two modes: 2x2 or 4x4 covariance"));
        }
        let asym = (&cov - cov.transpose()).amax();
        if asym > PHYSICALITY_TOL {
            return Err(Error::Dimension("covariance must be symmetric"));
        }
        let g = GaussianState {
            cov: (&cov + cov.transpose()) * 0.5,
            mean,
        };
        let nu_min = g.min_symplectic_eigenvalue();
        if !(nu_min >= 1.0 - PHYSICALITY_TOL) {
            return Err(Error::Unphysical {
                min_symplectic_eigenvalue: nu_min,
            });
        }
        Ok(g)
    }

    pub fn vacuum(modes: usize) -> Self {
        GaussianState {
            cov: DMatrix::identity(2 * modes, 2 * modes),
            mean: DVector::zeros(2 * modes),
        }
    }

    /// Single-mode coherent state `|g>` given as `(re, im)`.
    pub fn coherent(re: f64, im: f64) -> Self {
        GaussianState {
            cov: DMatrix::identity(2, 2),
            mean: DVector::from_vec(alloc::vec![2.0 * re, 2.0 * im]),
        }
    }

    /// Single-mode thermal state with mean photon number `nbar`.
    pub fn thermal(nbar: f64) -> Self {
        GaussianState {
            cov: DMatrix::identity(2, 2) * (2.0 * nbar + 1.0),
            mean: DVector::zeros(2),
        }
    }

    /// Single-mode squeezed thermal state `V R(theta) diag(e^{2r}, e^{-2r}) R(theta)^T`.
    pub fn squeezed_thermal(r: f64, thermal_variance: f64, theta: f64) -> Self {
        GaussianState {
            cov: williamson_matrix(r, thermal_variance, theta),
            mean: DVector::zeros(2),
        }
    }

    pub fn modes(&self) -> usize {
        self.cov.nrows() / 2
    }

    pub fn covariance(&self) -> &DMatrix<f64> {
        &self.cov
    }

    pub fn displacement(&self) -> &DVector<f64> {
        &self.mean
    }

    /// Mean photon number `(tr M - 2n + |d|^2) / 4`, summed over modes.
    pub fn mean_photons(&self) -> f64 {
        (self.cov.trace() - self.cov.nrows() as f64 + self.mean.norm_squared()) / 4.0
    }

    /// Smallest symplectic eigenvalue; at least one for a physical state.
    pub fn min_symplectic_eigenvalue(&self) -> f64 {
        let m = &self.cov;
        if self.modes() == 1 {
            return libm::sqrt(m.determinant().max(0.0));
        }
        let a = m.view((0, 0), (2, 2)).determinant();
        let b = m.view((2, 2), (2, 2)).determinant();
        let c = m.view((0, 2), (2, 2)).determinant();
        let seralian = a + b + 2.0 * c;
        let det = m.determinant();
        let disc = (seralian * seralian - 4.0 * det).max(0.0);
        libm::sqrt(((seralian - libm::sqrt(disc)) / 2.0).max(0.0))
    }

    /// Reduced state of one mode.
    pub fn mode(&self, index: usize) -> Result<GaussianState> {
        if index >= self.modes() {
            return Err(Error::Dimension("mode index out of range"));
        }
        let k = 2 * index;
        Ok(GaussianState {
            cov: self.cov.view((k, k), (2, 2)).into_owned(),
            mean: self.mean.rows(k, 2).into_owned(),
        })
    }

    /// Tensor product with another single- or two-mode state (at most two modes in total).
    pub fn tensor(&self, other: &GaussianState) -> Result<GaussianState> {
        let n = self.cov.nrows() + other.cov.nrows();
        if n > 4 {
            return Err(Error::Dimension("at most two modes"));
        }
        let mut cov = DMatrix::zeros(n, n);
        let k = self.cov.nrows();
        cov.view_mut((0, 0), (k, k)).copy_from(&self.cov);
        cov.view_mut((k, k), (n - k, n - k)).copy_from(&other.cov);
        let mut mean = DVector::zeros(n);
        mean.rows_mut(0, k).copy_from(&self.mean);
        mean.rows_mut(k, n - k).copy_from(&other.mean);
        Ok(GaussianState { cov, mean })
    }

    fn require_modes(&self, expected: usize) -> Result<()> {
        if self.modes() == expected {
            Ok(())
        } else {
            Err(Error::ModeCount {
                expected,
                found: self.modes(),
            })
        }
    }
}

/// Williamson parameters of a single-mode covariance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Williamson {
    /// Squeezing parameter, `>= 0`.
    pub r: f64,
    /// Thermal variance `sqrt(det M)`, `>= 1`.
    pub thermal_variance: f64,
    /// Orientation of the anti-squeezed axis in `[0, pi)`.
    pub theta: f64,
}

impl Williamson {
    pub fn reconstruct(&self) -> DMatrix<f64> {
        williamson_matrix(self.r, self.thermal_variance, self.theta)
    }
}

fn williamson_matrix(r: f64, v: f64, theta: f64) -> DMatrix<f64> {
    let (s, c) = libm::sincos(theta);
    let rot = DMatrix::from_row_slice(2, 2, &[c, -s, s, c]);
    let diag = DMatrix::from_row_slice(2, 2, &[libm::exp(2.0 * r), 0.0, 0.0, libm::exp(-2.0 * r)]);
    let m = &rot * diag * rot.transpose() * v;
    (&m + m.transpose()) * 0.5
}

/// Decompose a single-mode covariance as `V R(theta) diag(e^{2r}, e^{-2r}) R(theta)^T`.
pub fn williamson(g: &GaussianState) -> Result<Williamson> {
    g.require_modes(1)?;
    let m = &g.cov;
    let det = m.determinant();
    let v = libm::sqrt(det.max(0.0));
    if !(v >= 1.0 - PHYSICALITY_TOL) || m[(0, 0)] <= 0.0 {
        return Err(Error::Unphysical {
            min_symplectic_eigenvalue: v,
        });
    }
    let (a, b, c) = (m[(0, 0)], m[(0, 1)], m[(1, 1)]);
    let half_gap = libm::hypot(0.5 * (a - c), b);
    let major = 0.5 * (a + c) + half_gap;
    // e^{2r} = major / V, with V^2 = major * minor
    let r = 0.5 * libm::log(major / v);
    let mut theta = if half_gap == 0.0 {
        0.0
    } else {
        0.5 * libm::atan2(2.0 * b, a - c)
    };
    if theta < 0.0 {
        theta += core::f64::consts::PI;
    }
    if theta >= core::f64::consts::PI {
        theta -= core::f64::consts::PI;
    }
    Ok(Williamson {
        r: r.max(0.0),
        thermal_variance: v,
        theta,
    })
}

/// The symplectic form for `modes` modes.
pub fn symplectic_form(modes: usize) -> DMatrix<f64> {
    let n = 2 * modes;
    let mut omega = DMatrix::zeros(n, n);
    for k in 0..modes {
        omega[(2 * k, 2 * k + 1)] = 1.0;
        omega[(2 * k + 1, 2 * k)] = -1.0;
    }
    omega
}

/// Largest entry of `|S Omega S^T - Omega|`.
pub fn symplectic_deviation(s: &DMatrix<f64>) -> f64 {
    let omega = symplectic_form(s.nrows() / 2);
    (s * &omega * s.transpose() - omega).amax()
}

/// `M -> S M S^T`, `d -> S d`.
pub fn apply_symplectic(g: &GaussianState, s: &DMatrix<f64>) -> Result<GaussianState> {
    if s.nrows() != g.cov.nrows() || s.ncols() != g.cov.ncols() {
        return Err(Error::Dimension("symplectic matrix does not match the state"));
    }
    let deviation = symplectic_deviation(s);
    if !(deviation <= SYMPLECTIC_TOL) {
        return Err(Error::NotSymplectic { deviation });
    }
    let cov = s * &g.cov * s.transpose();
    Ok(GaussianState {
        cov: (&cov + cov.transpose()) * 0.5,
        mean: s * &g.mean,
    })
}

/// Beamsplitter between two modes with amplitude transmission `sqrt(T) = cos theta`.
pub fn beamsplitter_symplectic(transmissivity: f64) -> Result<DMatrix<f64>> {
    check_unit("transmissivity", transmissivity)?;
    let t = libm::sqrt(transmissivity);
    let r = libm::sqrt(1.0 - transmissivity);
    #[rustfmt::skip]
    let s = DMatrix::from_row_slice(4, 4, &[
        t, 0.0, r, 0.0,
        0.0, t, 0.0, r,
        -r, 0.0, t, 0.0,
        0.0, -r, 0.0, t,
    ]);
    Ok(s)
}

/// `d -> d + d0`.
pub fn displace(g: &GaussianState, d0: &DVector<f64>) -> Result<GaussianState> {
    if d0.len() != g.mean.len() {
        return Err(Error::Dimension("displacement length does not match the state"));
    }
    Ok(GaussianState {
        cov: g.cov.clone(),
        mean: &g.mean + d0,
    })
}

/// Single-mode loss of transmission `eta`: mix with vacuum on a beamsplitter and
/// keep the transmitted port, giving `M -> eta M + (1 - eta) I`, `d -> sqrt(eta) d`.
pub fn apply_loss(g: &GaussianState, eta: f64) -> Result<GaussianState> {
    g.require_modes(1)?;
    let joint = g.tensor(&GaussianState::vacuum(1))?;
    apply_symplectic(&joint, &beamsplitter_symplectic(eta)?)?.mode(0)
}

/// Normalised Wigner density `exp(-(r-d)^T M^{-1} (r-d) / 2) / ((2 pi)^n sqrt(det M))`.
pub fn wigner_value(g: &GaussianState, r: &DVector<f64>) -> Result<f64> {
    if r.len() != g.mean.len() {
        return Err(Error::Dimension("phase-space point does not match the state"));
    }
    let det = g.cov.determinant();
    let inv = g.cov.clone().try_inverse().ok_or(Error::Singular)?;
    if !(det > 0.0) {
        return Err(Error::Singular);
    }
    let x = r - &g.mean;
    let q = x.dot(&(inv * &x));
    let norm = libm::pow(2.0 * core::f64::consts::PI, g.modes() as f64) * libm::sqrt(det);
    Ok(libm::exp(-0.5 * q) / norm)
}

/// Vacuum overlap `<0..0|rho|0..0> = 2^n / sqrt(det(M + I)) exp(-d^T (M + I)^{-1} d / 2)`.
pub fn joint_vacuum_probability(g: &GaussianState) -> f64 {
    let n = g.cov.nrows();
    let shifted = &g.cov + DMatrix::<f64>::identity(n, n);
    let det = shifted.determinant();
    let q = match shifted.clone().try_inverse() {
        Some(inv) => g.mean.dot(&(inv * &g.mean)),
        None => 0.0,
    };
    libm::pow(2.0, g.modes() as f64) / libm::sqrt(det) * libm::exp(-0.5 * q)
}

/// First and second moments of a Fock-basis state, as a single-mode Gaussian.
///
/// Fails with [`Error::Unphysical`] when the moment-matched covariance breaks
/// the uncertainty relation, which happens when the truncation is too coarse
/// for the state.
pub fn moments_from_density(rho: &SignalDensity) -> Result<GaussianState> {
    let trace = rho.trace();
    if !(trace > 0.0) {
        return Err(Error::ZeroIntensity);
    }
    let a = rho.expect_a() / trace;
    let a2 = rho.expect_a2() / trace;
    let n = rho.mean_photons() / trace;
    // central moments: <da^2> and <da^dag da>
    let da2 = a2 - a * a;
    let dn = n - a.norm_sqr();
    let cov = DMatrix::from_row_slice(
        2,
        2,
        &[
            2.0 * da2.re + 2.0 * dn + 1.0,
            2.0 * da2.im,
            2.0 * da2.im,
            -2.0 * da2.re + 2.0 * dn + 1.0,
        ],
    );
    let mean = DVector::from_vec(alloc::vec![2.0 * a.re, 2.0 * a.im]);
    GaussianState::new(cov, mean)
}
