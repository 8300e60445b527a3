// SPDX-License-Identifier: Apache-2.0

//! Truncated Fock-basis density matrices of the signal mode.

use alloc::vec;
use alloc::vec::Vec;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::math::poisson_amplitude;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Signal-mode density matrix over Fock indices `offset..=cutoff`.
///
/// Entries outside the stored window are zero. The matrix may be unnormalised;
/// `trace_raw` keeps the trace it had when it was produced (for a post-selected
/// state this is the outcome density) and survives [`SignalDensity::normalized`].
#[derive(Debug, Clone, PartialEq)]
pub struct SignalDensity {
    offset: usize,
    dim: usize,
    data: Vec<Complex64>,
    trace_raw: f64,
}

impl SignalDensity {
    /// Build from a row-major `dim x dim` block starting at Fock index `offset`.
    pub fn from_block(offset: usize, dim: usize, data: Vec<Complex64>) -> Result<Self> {
        if dim == 0 || data.len() != dim * dim {
            return Err(Error::Dimension("density block must be dim x dim with dim > 0"));
        }
        let trace_raw = (0..dim).map(|i| data[i * dim + i].re).sum();
        Ok(SignalDensity {
            offset,
            dim,
            data,
            trace_raw,
        })
    }

    /// `|psi><psi|` for amplitudes starting at Fock index `offset`.
    pub fn from_pure(offset: usize, amplitudes: &[Complex64]) -> Result<Self> {
        let dim = amplitudes.len();
        let mut data = vec![ZERO; dim * dim];
        for (i, a) in amplitudes.iter().enumerate() {
            for (j, b) in amplitudes.iter().enumerate() {
                data[i * dim + j] = a * b.conj();
            }
        }
        Self::from_block(offset, dim, data)
    }

    /// Diagonal state with the given populations of `|0>, |1>, ...`.
    pub fn from_populations(populations: &[f64]) -> Result<Self> {
        let dim = populations.len();
        let mut data = vec![ZERO; dim * dim];
        for (i, p) in populations.iter().enumerate() {
            data[i * dim + i] = Complex64::new(*p, 0.0);
        }
        Self::from_block(0, dim, data)
    }

    /// Fock state `|n><n|` in a basis `0..=cutoff`.
    pub fn fock(n: usize, cutoff: usize) -> Result<Self> {
        if n > cutoff {
            return Err(Error::Dimension("Fock index above cutoff"));
        }
        let mut pops = vec![0.0; cutoff + 1];
        pops[n] = 1.0;
        Self::from_populations(&pops)
    }

    /// Truncated coherent state `|gamma><gamma|` in a basis `0..=cutoff`.
    pub fn coherent(gamma: Complex64, cutoff: usize) -> Result<Self> {
        let r = gamma.norm();
        let phase = gamma.arg();
        let amps: Vec<Complex64> = (0..=cutoff)
            .map(|n| Complex64::from_polar(poisson_amplitude(r, n), phase * n as f64))
            .collect();
        Self::from_pure(0, &amps)
    }

    /// Truncated thermal state with mean photon number `nbar` in a basis `0..=cutoff`.
    pub fn thermal(nbar: f64, cutoff: usize) -> Result<Self> {
        let q = nbar / (1.0 + nbar);
        let pops: Vec<f64> = (0..=cutoff)
            .map(|n| libm::pow(q, n as f64) / (1.0 + nbar))
            .collect();
        Self::from_populations(&pops)
    }

    /// Lowest stored Fock index.
    pub fn offset(&self) -> usize {
        self.offset
    }

    /// Number of stored Fock levels.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Largest stored Fock index.
    pub fn cutoff(&self) -> usize {
        self.offset + self.dim - 1
    }

    pub fn trace_raw(&self) -> f64 {
        self.trace_raw
    }

    pub(crate) fn set_trace_raw(&mut self, trace_raw: f64) {
        self.trace_raw = trace_raw;
    }

    /// Row-major block over `offset..=cutoff`.
    pub fn block(&self) -> &[Complex64] {
        &self.data
    }

    /// `rho[m,n]` for absolute Fock indices; zero outside the window.
    pub fn get(&self, m: usize, n: usize) -> Complex64 {
        if m < self.offset || n < self.offset || m > self.cutoff() || n > self.cutoff() {
            return ZERO;
        }
        self.data[(m - self.offset) * self.dim + (n - self.offset)]
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|i| self.data[i * self.dim + i].re).sum()
    }

    /// Copy scaled to unit trace; `trace_raw` is kept.
    pub fn normalized(&self) -> Self {
        let t = self.trace();
        let mut out = self.clone();
        for z in out.data.iter_mut() {
            *z /= t;
        }
        out
    }

    /// Diagonal `rho[n,n]` for `n = 0..=cutoff`, zero-padded below the window.
    pub fn populations(&self) -> Vec<f64> {
        let mut p = vec![0.0; self.cutoff() + 1];
        for i in 0..self.dim {
            p[self.offset + i] = self.data[i * self.dim + i].re;
        }
        p
    }

    /// `Tr[rho a^dag a]`.
    pub fn mean_photons(&self) -> f64 {
        (0..self.dim)
            .map(|i| (self.offset + i) as f64 * self.data[i * self.dim + i].re)
            .sum()
    }

    /// `Tr[rho a] = sum_n sqrt(n) rho[n, n-1]`.
    pub fn expect_a(&self) -> Complex64 {
        (1..self.dim)
            .map(|i| {
                let n = (self.offset + i) as f64;
                self.data[i * self.dim + i - 1] * libm::sqrt(n)
            })
            .sum()
    }

    /// `Tr[rho a^2] = sum_n sqrt(n (n-1)) rho[n, n-2]`.
    pub fn expect_a2(&self) -> Complex64 {
        (2..self.dim)
            .map(|i| {
                let n = (self.offset + i) as f64;
                self.data[i * self.dim + i - 2] * libm::sqrt(n * (n - 1.0))
            })
            .sum()
    }

    /// Largest `|rho[m,n] - conj(rho[n,m])|`.
    pub fn hermiticity_error(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.dim {
            for j in i..self.dim {
                let e = (self.data[i * self.dim + j] - self.data[j * self.dim + i].conj()).norm();
                worst = worst.max(e);
            }
        }
        worst
    }

    /// Smallest eigenvalue of the Hermitian part. Dense O(dim^3); meant for checks.
    pub fn min_eigenvalue(&self) -> f64 {
        let m = DMatrix::from_fn(self.dim, self.dim, |i, j| {
            (self.data[i * self.dim + j] + self.data[j * self.dim + i].conj()) * 0.5
        });
        m.symmetric_eigenvalues().iter().cloned().fold(f64::INFINITY, f64::min)
    }

    /// `D(gamma) rho D(gamma)^dag`, computed on a basis large enough to hold the shifted state.
    pub fn displaced(&self, gamma: Complex64) -> Result<Self> {
        let cutoff = self.cutoff();
        let reach = libm::sqrt(cutoff as f64) + gamma.norm();
        let out_dim = libm::ceil(reach * reach + 10.0 * reach + 20.0) as usize + 1;
        let cols = displacement_columns(gamma, cutoff, out_dim);

        // T = Dm rho (restricted to the stored window), then out = T Dm^dag
        let mut t = vec![ZERO; out_dim * self.dim];
        for k in 0..out_dim {
            for j in 0..self.dim {
                let mut acc = ZERO;
                for i in 0..self.dim {
                    acc += cols[(self.offset + i) * out_dim + k] * self.data[i * self.dim + j];
                }
                t[k * self.dim + j] = acc;
            }
        }
        let mut out = vec![ZERO; out_dim * out_dim];
        for k in 0..out_dim {
            for l in k..out_dim {
                let mut acc = ZERO;
                for j in 0..self.dim {
                    acc += t[k * self.dim + j] * cols[(self.offset + j) * out_dim + l].conj();
                }
                out[k * out_dim + l] = acc;
                out[l * out_dim + k] = acc.conj();
            }
        }
        let mut shifted = Self::from_block(0, out_dim, out)?;
        shifted.set_trace_raw(self.trace_raw);
        Ok(shifted)
    }

    /// Diagonal of `D(gamma) rho D(gamma)^dag` only.
    pub fn displaced_populations(&self, gamma: Complex64) -> Vec<f64> {
        let cutoff = self.cutoff();
        let reach = libm::sqrt(cutoff as f64) + gamma.norm();
        let out_dim = libm::ceil(reach * reach + 10.0 * reach + 20.0) as usize + 1;
        let cols = displacement_columns(gamma, cutoff, out_dim);
        (0..out_dim)
            .map(|k| {
                let mut acc = ZERO;
                for i in 0..self.dim {
                    let left = cols[(self.offset + i) * out_dim + k];
                    if left == ZERO {
                        continue;
                    }
                    let mut row = ZERO;
                    for j in 0..self.dim {
                        row += self.data[i * self.dim + j] * cols[(self.offset + j) * out_dim + k].conj();
                    }
                    acc += left * row;
                }
                acc.re
            })
            .collect()
    }
}

/// `D(gamma)|n>` for `n = 0..=cutoff`, each truncated to `out_dim` levels, stored column after column.
///
/// Walks each diagonal `k - n = const` with the Laguerre recurrence written for
/// the normalised elements `sqrt(j!/(j+a)!) e^{-x/2} x^{a/2} L_j^a(x)`, `x = |gamma|^2`,
/// which stays bounded where a recursion over columns loses all precision.
fn displacement_columns(gamma: Complex64, cutoff: usize, out_dim: usize) -> Vec<Complex64> {
    let mut cols = vec![ZERO; (cutoff + 1) * out_dim];
    let r = gamma.norm();
    let x = r * r;
    let theta = gamma.arg();
    let reach = out_dim.max(cutoff + 1);
    for a in 0..reach {
        let lower = Complex64::from_polar(1.0, a as f64 * theta);
        let upper = Complex64::from_polar(if a % 2 == 0 { 1.0 } else { -1.0 }, -(a as f64) * theta);
        let af = a as f64;
        let mut prev = 0.0;
        let mut cur = poisson_amplitude(r, a);
        let mut j = 0usize;
        loop {
            // <j + a|D|j> and <j|D|j + a>
            let lower_in = j + a < out_dim && j <= cutoff;
            let upper_in = a > 0 && j < out_dim && j + a <= cutoff;
            if !lower_in && !upper_in {
                break;
            }
            if lower_in {
                cols[j * out_dim + j + a] = lower * cur;
            }
            if upper_in {
                cols[(j + a) * out_dim + j] = upper * cur;
            }
            let jf = j as f64;
            let next = ((2.0 * jf + 1.0 + af - x) * cur - libm::sqrt(jf * (jf + af)) * prev)
                / libm::sqrt((jf + 1.0) * (jf + 1.0 + af));
            prev = cur;
            cur = next;
            j += 1;
        }
    }
    cols
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coherent_moments() {
        let g = Complex64::new(1.2, -0.4);
        let rho = SignalDensity::coherent(g, 50).unwrap();
        assert!((rho.trace() - 1.0).abs() < 1e-12);
        assert!((rho.expect_a() - g).norm() < 1e-12);
        assert!((rho.expect_a2() - g * g).norm() < 1e-12);
        assert!((rho.mean_photons() - g.norm_sqr()).abs() < 1e-12);
        assert!(rho.hermiticity_error() < 1e-15);
    }

    #[test]
    fn thermal_populations() {
        let rho = SignalDensity::thermal(0.4, 80).unwrap();
        assert!((rho.trace() - 1.0).abs() < 1e-12);
        assert!((rho.mean_photons() - 0.4).abs() < 1e-12);
        assert!(rho.min_eigenvalue() >= 0.0);
    }

    #[test]
    fn normalisation_keeps_raw_trace() {
        let rho = SignalDensity::from_populations(&[0.2, 0.1, 0.1]).unwrap();
        let n = rho.normalized();
        assert!((n.trace() - 1.0).abs() < 1e-15);
        assert!((n.trace_raw() - 0.4).abs() < 1e-15);
    }

    #[test]
    fn displacing_vacuum_gives_coherent_state() {
        let vac = SignalDensity::fock(0, 4).unwrap();
        let g = Complex64::new(0.7, 0.3);
        let shifted = vac.displaced(g).unwrap();
        let expected = SignalDensity::coherent(g, shifted.cutoff()).unwrap();
        for m in 0..10 {
            for n in 0..10 {
                assert!((shifted.get(m, n) - expected.get(m, n)).norm() < 1e-13);
            }
        }
    }

    #[test]
    fn displacement_composes() {
        // D(-g) applied to |g> returns vacuum
        let g = Complex64::new(2.0, -1.0);
        let rho = SignalDensity::coherent(g, 60).unwrap();
        let back = rho.displaced(-g).unwrap();
        assert!((back.get(0, 0).re - 1.0).abs() < 1e-10);
        let pops = rho.displaced_populations(-g);
        assert!((pops[0] - 1.0).abs() < 1e-10);
        assert!((pops.iter().sum::<f64>() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn displaced_fock_state_matches_laguerre_form() {
        // D|1> = (a^dag - g*)|g>: <0|D|1> = -g* e^{-|g|^2/2}, <1|D|1> = (1 - |g|^2) e^{-|g|^2/2}
        let g = Complex64::new(0.3, 0.4);
        let cols = displacement_columns(g, 1, 30);
        let e = libm::exp(-0.125);
        assert!((cols[1] - g * e).norm() < 1e-15);
        assert!((cols[30] + g.conj() * e).norm() < 1e-15);
        assert!((cols[31] - Complex64::new(e * (1.0 - 0.25), 0.0)).norm() < 1e-15);
    }

    #[test]
    fn bright_displacement_stays_unitary() {
        let g = Complex64::new(4.2, -0.4);
        let rho = SignalDensity::coherent(g, 94).unwrap();
        let back = rho.displaced(-g).unwrap();
        assert!((back.trace() - 1.0).abs() < 1e-10);
        assert!((back.get(0, 0).re - 1.0).abs() < 1e-10);
        let top = SignalDensity::fock(94, 94).unwrap().displaced(Complex64::new(0.0, 3.0)).unwrap();
        assert!((top.trace() - 1.0).abs() < 1e-10);
    }
}
