// SPDX-License-Identifier: Apache-2.0

//! Parameter sweeps. Points are independent; they run on the rayon pool and
//! are merged back in input order, so the output never depends on scheduling.

use std::str::FromStr;
use std::time::Instant;

use kerrsim_core::pipeline::evaluate_curve;
use kerrsim_core::{ParamName, Parameters, PipelineOptions, Variant};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::RunConfig;
use crate::error::{CliError, Result};

pub const CODE_VERSION: &str = env!("CARGO_PKG_VERSION");

/// What a sweep varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepTarget {
    Param(ParamName),
    /// Mean photon number of the displacement, at fixed physics.
    Displacement,
}

impl SweepTarget {
    pub fn as_str(self) -> &'static str {
        match self {
            SweepTarget::Param(p) => p.as_str(),
            SweepTarget::Displacement => "displacement",
        }
    }
}

impl FromStr for SweepTarget {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        if s == "displacement" {
            return Ok(SweepTarget::Displacement);
        }
        s.parse::<ParamName>()
            .map(SweepTarget::Param)
            .map_err(|_| CliError::Config(format!("cannot sweep `{s}`")))
    }
}

/// One emitted row. `optimal` marks the displacement optimum; other rows are
/// points on the `g2` versus mean-photon-number curve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub swept_name: String,
    pub swept_value: f64,
    pub n_displacement: f64,
    pub g2: f64,
    pub success_prob: f64,
    pub optimal: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepMetadata {
    pub parameters: Parameters,
    pub variant: Variant,
    pub options: PipelineOptions,
    pub code_version: String,
    /// Only recorded on request, so default output is byte-reproducible.
    pub wall_time_s: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub metadata: SweepMetadata,
    pub rows: Vec<SweepRow>,
}

impl SweepResult {
    /// Rows must be present, `g2` positive and success a probability.
    pub fn check(&self) -> Result<()> {
        if self.rows.is_empty() {
            return Err(CliError::Config("sweep produced no rows".into()));
        }
        for r in &self.rows {
            if !(r.g2 > 0.0) || !(0.0..=1.0).contains(&r.success_prob) {
                return Err(CliError::Model(kerrsim_core::Error::Dimension(
                    "sweep row outside its physical range",
                )));
            }
        }
        Ok(())
    }
}

/// Evaluate `values` of `target` around `base`. A non-empty `grid` adds the
/// `g2` curve at those mean photon numbers for every swept value.
pub fn sweep(base: &RunConfig, target: SweepTarget, values: &[f64], grid: &[f64], timing: bool) -> Result<SweepResult> {
    if values.is_empty() {
        return Err(CliError::Config("no sweep values given".into()));
    }
    let start = Instant::now();
    let rows = match target {
        SweepTarget::Displacement => {
            let (point, curve) = evaluate_curve(&base.parameters, base.variant, &base.options, values)?;
            let name = target.as_str();
            let mut rows: Vec<SweepRow> = values
                .iter()
                .zip(curve)
                .map(|(&n, g2)| SweepRow {
                    swept_name: name.into(),
                    swept_value: n,
                    n_displacement: n,
                    g2,
                    success_prob: point.success_prob,
                    optimal: false,
                })
                .collect();
            rows.push(SweepRow {
                swept_name: name.into(),
                swept_value: point.n_displacement,
                n_displacement: point.n_displacement,
                g2: point.g2,
                success_prob: point.success_prob,
                optimal: true,
            });
            rows
        }
        SweepTarget::Param(name) => {
            let points: Vec<Result<Vec<SweepRow>>> = values
                .par_iter()
                .map(|&v| {
                    let p = base.parameters.with(name, v);
                    p.validate()?;
                    let (point, curve) = evaluate_curve(&p, base.variant, &base.options, grid)?;
                    let mut rows = vec![SweepRow {
                        swept_name: name.as_str().into(),
                        swept_value: v,
                        n_displacement: point.n_displacement,
                        g2: point.g2,
                        success_prob: point.success_prob,
                        optimal: true,
                    }];
                    rows.extend(grid.iter().zip(curve).map(|(&n, g2)| SweepRow {
                        swept_name: name.as_str().into(),
                        swept_value: v,
                        n_displacement: n,
                        g2,
                        success_prob: point.success_prob,
                        optimal: false,
                    }));
                    Ok(rows)
                })
                .collect();
            let mut rows = Vec::new();
            for p in points {
                rows.extend(p?);
            }
            rows
        }
    };
    let result = SweepResult {
        metadata: SweepMetadata {
            parameters: base.parameters,
            variant: base.variant,
            options: base.options,
            code_version: CODE_VERSION.into(),
            wall_time_s: timing.then(|| start.elapsed().as_secs_f64()),
        },
        rows,
    };
    result.check()?;
    Ok(result)
}

/// `start:stop:count`, inclusive, evenly spaced.
pub fn parse_range(s: &str) -> Result<Vec<f64>> {
    let bad = || CliError::Config(format!("expected `start:stop:count`, got `{s}`"));
    let parts: Vec<&str> = s.split(':').collect();
    let [a, b, n] = parts.as_slice() else {
        return Err(bad());
    };
    let a: f64 = a.trim().parse().map_err(|_| bad())?;
    let b: f64 = b.trim().parse().map_err(|_| bad())?;
    let n: usize = n.trim().parse().map_err(|_| bad())?;
    if n == 0 || !a.is_finite() || !b.is_finite() {
        return Err(bad());
    }
    if n == 1 {
        return Ok(vec![a]);
    }
    let step = (b - a) / (n - 1) as f64;
    Ok((0..n).map(|i| if i + 1 == n { b } else { a + step * i as f64 }).collect())
}

/// Comma-separated numbers.
pub fn parse_list(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| CliError::Config(format!("`{t}` is not a number")))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use kerrsim_core::NamedSet;

    fn small() -> RunConfig {
        let mut cfg = RunConfig::from_set(NamedSet::Optimistic);
        cfg.parameters.alpha = 6.0;
        cfg.parameters.beta = 6.0;
        cfg.parameters.phi0 = 0.098 / 36.0;
        cfg
    }

    #[test]
    fn ranges_and_lists() {
        assert_eq!(parse_range("0:1:5").unwrap(), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        assert_eq!(parse_range("2:3:1").unwrap(), vec![2.0]);
        assert!(parse_range("0:1").is_err());
        assert!(parse_range("0:1:0").is_err());
        assert_eq!(parse_list("0.3, 0.5,0.7").unwrap(), vec![0.3, 0.5, 0.7]);
        assert!(parse_list("0.3,x").is_err());
    }

    #[test]
    fn targets() {
        assert_eq!("nu".parse::<SweepTarget>().unwrap(), SweepTarget::Param(ParamName::Nu));
        assert_eq!("displacement".parse::<SweepTarget>().unwrap(), SweepTarget::Displacement);
        assert_eq!("kappa".parse::<SweepTarget>().unwrap_err().exit_code(), 2);
    }

    #[test]
    fn rows_follow_input_order() {
        let values = [0.7, 0.3, 0.5];
        let r = sweep(&small(), SweepTarget::Param(ParamName::Nu), &values, &[0.1, 0.5], false).unwrap();
        assert_eq!(r.rows.len(), 9);
        let optimal: Vec<f64> = r.rows.iter().filter(|r| r.optimal).map(|r| r.swept_value).collect();
        assert_eq!(optimal, values);
        // more probe loss, less squeezing
        let g2 = |nu: f64| r.rows.iter().find(|r| r.optimal && r.swept_value == nu).unwrap().g2;
        assert!(g2(0.3) > g2(0.5) && g2(0.5) > g2(0.7));
        assert!(r.metadata.wall_time_s.is_none());
    }

    #[test]
    fn repeat_runs_are_identical() {
        let a = sweep(&small(), SweepTarget::Param(ParamName::Epsilon), &[0.2, 0.4], &[], false).unwrap();
        let b = sweep(&small(), SweepTarget::Param(ParamName::Epsilon), &[0.2, 0.4], &[], false).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn displacement_curve_has_its_optimum_below() {
        let r = sweep(&small(), SweepTarget::Displacement, &[0.005, 0.02, 0.1, 0.5], &[], false).unwrap();
        let best = r.rows.iter().find(|r| r.optimal).unwrap();
        assert!(r.rows.iter().filter(|r| !r.optimal).all(|r| r.g2 >= best.g2 - 1e-9));
    }

    #[test]
    fn invalid_value_is_a_config_error() {
        let err = sweep(&small(), SweepTarget::Param(ParamName::Eta), &[0.5, 1.5], &[], false).unwrap_err();
        assert_eq!(err.exit_code(), 2);
        assert_eq!(sweep(&small(), SweepTarget::Displacement, &[], &[], false).unwrap_err().exit_code(), 2);
    }
}
