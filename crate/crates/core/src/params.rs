// SPDX-License-Identifier: Apache-2.0

//! Experiment configuration and the three built-in parameter sets.

use core::fmt;
use core::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{check_nonnegative, check_positive, check_unit, Error, Result};

/// One experiment configuration.
///
/// Transmissions and the dark-count probability are per-window
/// probabilities; `epsilon` is measured in heterodyne-plane units (a
/// coherent state has unit width there); phases are in radians.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Parameters {
    /// Signal-arm transmission.
    pub eta: f64,
    /// Probe-arm transmission.
    pub nu: f64,
    /// Technical phase noise of the heterodyne measurement.
    pub delta_phi: f64,
    /// Width of the post-selection acceptance envelope.
    pub epsilon: f64,
    /// Dark-count probability per detector per counting window.
    pub p_dark: f64,
    /// Phase shift per signal photon.
    pub phi0: f64,
    /// Probe amplitude.
    pub alpha: f64,
    /// Signal amplitude.
    pub beta: f64,
}

impl Parameters {
    pub const CURRENT: Parameters = Parameters {
        eta: 0.5,
        nu: 0.5,
        delta_phi: 0.02,
        epsilon: 0.3,
        p_dark: 0.1,
        phi0: 0.00002,
        alpha: 50.0,
        beta: 50.0,
    };

    pub const OPTIMALLY_ACHIEVABLE: Parameters = Parameters {
        eta: 0.5,
        nu: 0.5,
        delta_phi: 0.01,
        epsilon: 0.3,
        p_dark: 0.001,
        phi0: 0.00002,
        alpha: 70.0,
        beta: 70.0,
    };

    pub const OPTIMISTIC: Parameters = Parameters {
        eta: 0.5,
        nu: 0.5,
        delta_phi: 0.01,
        epsilon: 0.3,
        p_dark: 0.0001,
        phi0: 0.00002,
        alpha: 70.0,
        beta: 70.0,
    };

    pub fn validate(&self) -> Result<()> {
        check_unit("eta", self.eta)?;
        check_unit("nu", self.nu)?;
        if !(0.0..core::f64::consts::PI).contains(&self.delta_phi) {
            return Err(Error::OutOfRange {
                name: "delta_phi",
                value: self.delta_phi,
                allowed: "[0, pi)",
            });
        }
        check_positive("epsilon", self.epsilon)?;
        if !(0.0..1.0).contains(&self.p_dark) {
            return Err(Error::OutOfRange {
                name: "p_dark",
                value: self.p_dark,
                allowed: "[0, 1)",
            });
        }
        if !self.phi0.is_finite() {
            return Err(Error::OutOfRange {
                name: "phi0",
                value: self.phi0,
                allowed: "finite reals",
            });
        }
        check_nonnegative("alpha", self.alpha)?;
        check_nonnegative("beta", self.beta)?;
        Ok(())
    }

    pub fn get(&self, name: ParamName) -> f64 {
        match name {
            ParamName::Eta => self.eta,
            ParamName::Nu => self.nu,
            ParamName::DeltaPhi => self.delta_phi,
            ParamName::Epsilon => self.epsilon,
            ParamName::PDark => self.p_dark,
            ParamName::Phi0 => self.phi0,
            ParamName::Alpha => self.alpha,
            ParamName::Beta => self.beta,
        }
    }

    pub fn set(&mut self, name: ParamName, value: f64) {
        let slot = match name {
            ParamName::Eta => &mut self.eta,
            ParamName::Nu => &mut self.nu,
            ParamName::DeltaPhi => &mut self.delta_phi,
            ParamName::Epsilon => &mut self.epsilon,
            ParamName::PDark => &mut self.p_dark,
            ParamName::Phi0 => &mut self.phi0,
            ParamName::Alpha => &mut self.alpha,
            ParamName::Beta => &mut self.beta,
        };
        *slot = value;
    }

    pub fn with(mut self, name: ParamName, value: f64) -> Self {
        self.set(name, value);
        self
    }
}

/// Names of the eight model parameters, as used in config files and sweeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ParamName {
    Eta,
    Nu,
    DeltaPhi,
    Epsilon,
    PDark,
    Phi0,
    Alpha,
    Beta,
}

impl ParamName {
    pub const ALL: [ParamName; 8] = [
        ParamName::Eta,
        ParamName::Nu,
        ParamName::DeltaPhi,
        ParamName::Epsilon,
        ParamName::PDark,
        ParamName::Phi0,
        ParamName::Alpha,
        ParamName::Beta,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ParamName::Eta => "eta",
            ParamName::Nu => "nu",
            ParamName::DeltaPhi => "delta_phi",
            ParamName::Epsilon => "epsilon",
            ParamName::PDark => "p_dark",
            ParamName::Phi0 => "phi0",
            ParamName::Alpha => "alpha",
            ParamName::Beta => "beta",
        }
    }
}

impl fmt::Display for ParamName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnknownName;

impl fmt::Display for UnknownName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("unknown name")
    }
}

impl FromStr for ParamName {
    type Err = UnknownName;

    fn from_str(s: &str) -> core::result::Result<Self, Self::Err> {
        ParamName::ALL
            .into_iter()
            .find(|p| p.as_str() == s)
            .ok_or(UnknownName)
    }
}

/// The three built-in parameter sets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NamedSet {
    Current,
    Achievable,
    Optimistic,
}

impl NamedSet {
    pub fn parameters(self) -> Parameters {
        match self {
            NamedSet::Current => Parameters::CURRENT,
            NamedSet::Achievable => Parameters::OPTIMALLY_ACHIEVABLE,
            NamedSet::Optimistic => Parameters::OPTIMISTIC,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            NamedSet::Current => "current",
            NamedSet::Achievable => "achievable",
            NamedSet::Optimistic => "optimistic",
        }
    }
}

impl FromStr for NamedSet {
    type Err = UnknownName;

    fn from_str(s: &str) -> core::result::Result<Self, Self::Err> {
        match s {
            "current" => Ok(NamedSet::Current),
            "achievable" | "optimally-achievable" => Ok(NamedSet::Achievable),
            "optimistic" => Ok(NamedSet::Optimistic),
            _ => Err(UnknownName),
        }
    }
}
