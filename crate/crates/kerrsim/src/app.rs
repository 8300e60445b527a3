// SPDX-License-Identifier: Apache-2.0

//! Command-line entry point.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use kerrsim_core::exotic::{
    check_wigner_cutoff, equivalent_coupling_multiplier, fock_wigner_value, optomech_overlap, phonon_kappa,
    two_peak_amplitudes,
};
use kerrsim_core::pipeline::{memory_estimate, run_fock_oracle};
use kerrsim_core::{evaluate, NamedSet, ParamName, Parameters, PointResult, Variant};
use rayon::prelude::*;
use serde::Serialize;

use crate::checks::{all_checks, property_checks, KNOWN_DEVIATIONS};
use crate::config::{parse_complex, parse_lines, RunConfig};
use crate::error::{CliError, Result, EXIT_NUMERICAL};
use crate::output::{self, Format, OverlapRow, WignerGrid};
use crate::sweep::{parse_list, parse_range, sweep, SweepMetadata, SweepTarget, CODE_VERSION};

/// Runs estimated above this many bytes need `--allow-large`.
pub const MEMORY_LIMIT: u64 = 1 << 30;

#[derive(Debug, Parser)]
#[command(name = "kerrsim", version, about = "Photon-number squeezing by cross-Kerr interaction and heterodyne post-selection")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate one parameter point: optimal displacement, minimum g2, success probability.
    Run {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Vary one parameter, or the displacement, and tabulate the optimum.
    Sweep {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        output: OutputArgs,
        /// Parameter to vary, or `displacement`.
        #[arg(long)]
        param: String,
        /// Comma-separated values.
        #[arg(long, conflicts_with = "range", required_unless_present = "range", allow_hyphen_values = true)]
        values: Option<String>,
        /// `start:stop:count`, inclusive.
        #[arg(long, allow_hyphen_values = true)]
        range: Option<String>,
        /// Mean photon numbers at which to also tabulate the g2 curve, `start:stop:count`.
        #[arg(long)]
        grid: Option<String>,
        /// Record wall time in the metadata (makes output non-reproducible).
        #[arg(long)]
        timing: bool,
    },
    /// Wigner function of the post-selected signal on a grid.
    ///
    /// Without `--set` or a config file the small-amplitude preset
    /// alpha = beta = sqrt(10), phi0 = 0.4, signal transmission 0.7 is used.
    Wigner {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        output: OutputArgs,
        #[arg(long, default_value = "-10:10:201", allow_hyphen_values = true)]
        xs: String,
        #[arg(long, default_value = "-10:10:201", allow_hyphen_values = true)]
        ps: String,
        /// Use the binned, noise-smeared projection instead of a sharp outcome.
        #[arg(long)]
        smeared: bool,
    },
    /// Number amplitudes of the lossless two-peak state.
    Twopeak {
        #[command(flatten)]
        output: OutputArgs,
        #[arg(long, default_value_t = 30f64.sqrt())]
        alpha: f64,
        #[arg(long, default_value_t = 30f64.sqrt())]
        beta: f64,
        #[arg(long, default_value_t = 0.4)]
        phi0: f64,
        /// Heterodyne outcome, `re,im`.
        #[arg(long, default_value = "-3.41,2.09", allow_hyphen_values = true)]
        delta: String,
    },
    /// Photon-phonon which-path overlaps for superpositions of `|N>` and `|M>`.
    Optomech {
        #[command(flatten)]
        output: OutputArgs,
        #[arg(long, default_value_t = 1.0)]
        g: f64,
        #[arg(long, default_value_t = 1.0)]
        omega_m: f64,
        #[arg(long, default_value_t = std::f64::consts::PI)]
        t: f64,
        #[arg(long, default_value_t = 0)]
        n: u64,
        /// Tabulate `M = N ..= N + m_max`.
        #[arg(long, default_value_t = 16)]
        m_max: u64,
    },
    /// Run the built-in property checks.
    Selftest {
        /// Also run the full-scale parameter-set checks (slower).
        #[arg(long)]
        all: bool,
    },
}

#[derive(Debug, Clone, Default, Args)]
pub struct ModelArgs {
    /// Built-in parameter set: current, achievable or optimistic.
    #[arg(long)]
    pub set: Option<String>,
    /// Flat `key = value` file applied on top of the parameter set.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub eta: Option<f64>,
    #[arg(long)]
    pub nu: Option<f64>,
    #[arg(long)]
    pub delta_phi: Option<f64>,
    #[arg(long)]
    pub epsilon: Option<f64>,
    #[arg(long)]
    pub p_dark: Option<f64>,
    #[arg(long)]
    pub phi0: Option<f64>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub beta: Option<f64>,
    /// Post-selection centre `re,im`; defaults to the mean-photon-number branch.
    #[arg(long, allow_hyphen_values = true)]
    pub delta: Option<String>,
    /// Amplitude converting phase noise into envelope width; defaults to sqrt(nu) alpha.
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long)]
    pub k_sigma: Option<f64>,
    #[arg(long)]
    pub truncation_tol: Option<f64>,
    /// Number-basis pipeline instead of the Gaussian reduction.
    #[arg(long)]
    pub oracle: bool,
    /// Project on the bare heterodyne outcome.
    #[arg(long)]
    pub sharp: bool,
    /// Run even when the memory estimate exceeds 1 GiB.
    #[arg(long)]
    pub allow_large: bool,
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    /// Output file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

impl ModelArgs {
    /// Set, then config file, then flags. `preset` is used when neither the
    /// flags nor the file name a set.
    pub fn resolve(&self, preset: Parameters) -> Result<RunConfig> {
        let file = match &self.config {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
                parse_lines(&text, path)?
            }
            None => Vec::new(),
        };
        let named = match &self.set {
            Some(s) => Some(s.clone()),
            None => file.iter().rev().find(|(k, _, _)| k == "set").map(|(_, v, _)| v.clone()),
        };
        let mut cfg = RunConfig::from_set(NamedSet::Optimistic);
        cfg.parameters = match named {
            Some(s) => s
                .parse::<NamedSet>()
                .map_err(|_| CliError::Config(format!("unknown parameter set `{s}`")))?
                .parameters(),
            None => preset,
        };
        let origin = self.config.clone().unwrap_or_default();
        for (key, value, line) in file.iter().filter(|(k, _, _)| k != "set") {
            cfg.apply(key, value).map_err(|message| CliError::ConfigLine {
                path: origin.clone(),
                line: *line,
                message,
            })?;
        }
        let flags = [
            (ParamName::Eta, self.eta),
            (ParamName::Nu, self.nu),
            (ParamName::DeltaPhi, self.delta_phi),
            (ParamName::Epsilon, self.epsilon),
            (ParamName::PDark, self.p_dark),
            (ParamName::Phi0, self.phi0),
            (ParamName::Alpha, self.alpha),
            (ParamName::Beta, self.beta),
        ];
        for (name, value) in flags {
            if let Some(v) = value {
                cfg.parameters.set(name, v);
            }
        }
        if let Some(d) = &self.delta {
            cfg.options.delta = Some(parse_complex(d).map_err(CliError::Config)?);
        }
        if self.gamma.is_some() {
            cfg.options.gamma = self.gamma;
        }
        if let Some(k) = self.k_sigma {
            cfg.options.k_sigma = k;
        }
        if let Some(t) = self.truncation_tol {
            cfg.options.truncation_tol = t;
        }
        if self.oracle {
            cfg.variant = Variant::FockOracle;
        }
        if self.sharp {
            cfg.options.sharp = true;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn gate(&self, cfg: &RunConfig, points: impl IntoIterator<Item = Parameters>) -> Result<()> {
        if self.allow_large {
            return Ok(());
        }
        let bytes = points
            .into_iter()
            .map(|p| memory_estimate(&p, cfg.variant, &cfg.options))
            .max()
            .unwrap_or(0);
        if bytes > MEMORY_LIMIT {
            return Err(CliError::TooLarge {
                bytes,
                limit: MEMORY_LIMIT,
            });
        }
        Ok(())
    }
}

/// Small-amplitude preset for Wigner maps.
pub fn wigner_preset() -> Parameters {
    Parameters {
        eta: 0.7,
        nu: 1.0,
        delta_phi: 0.0,
        epsilon: 0.3,
        p_dark: 0.0,
        phi0: 0.4,
        alpha: 10f64.sqrt(),
        beta: 10f64.sqrt(),
    }
}

#[derive(Debug, Serialize)]
struct RunReport {
    metadata: SweepMetadata,
    result: PointResult,
}

/// Parse arguments, run, and return the process exit code.
pub fn main() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match execute(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("kerrsim: {e}");
            e.exit_code()
        }
    }
}

pub fn execute(command: Command) -> Result<i32> {
    match command {
        Command::Run { model, output } => {
            let cfg = model.resolve(NamedSet::Optimistic.parameters())?;
            model.gate(&cfg, [cfg.parameters])?;
            let result = evaluate(&cfg.parameters, cfg.variant, &cfg.options)?;
            let out = output::open(output.out.as_deref())?;
            match output.format {
                Format::Json => output::write_json(
                    &RunReport {
                        metadata: SweepMetadata {
                            parameters: cfg.parameters,
                            variant: cfg.variant,
                            options: cfg.options,
                            code_version: CODE_VERSION.into(),
                            wall_time_s: None,
                        },
                        result,
                    },
                    out,
                )?,
                Format::Csv => {
                    let mut w = csv::Writer::from_writer(out);
                    w.serialize(result)?;
                    w.flush()?;
                }
            }
        }
        Command::Sweep {
            model,
            output,
            param,
            values,
            range,
            grid,
            timing,
        } => {
            let cfg = model.resolve(NamedSet::Optimistic.parameters())?;
            let target: SweepTarget = param.parse()?;
            let values = match (values, range) {
                (Some(v), _) => parse_list(&v)?,
                (None, Some(r)) => parse_range(&r)?,
                (None, None) => return Err(CliError::Config("give --values or --range".into())),
            };
            let grid = grid.as_deref().map(parse_range).transpose()?.unwrap_or_default();
            match target {
                SweepTarget::Param(name) => model.gate(&cfg, values.iter().map(|&v| cfg.parameters.with(name, v)))?,
                SweepTarget::Displacement => model.gate(&cfg, [cfg.parameters])?,
            }
            let result = sweep(&cfg, target, &values, &grid, timing)?;
            output::write_sweep(&result, output.format, output::open(output.out.as_deref())?)?;
        }
        Command::Wigner {
            model,
            output,
            xs,
            ps,
            smeared,
        } => {
            let mut cfg = model.resolve(wigner_preset())?;
            cfg.variant = Variant::FockOracle;
            cfg.options.sharp = !smeared;
            model.gate(&cfg, [cfg.parameters])?;
            let (xs, ps) = (parse_range(&xs)?, parse_range(&ps)?);
            let (rho, _) = run_fock_oracle(&cfg.parameters, &cfg.options)?;
            check_wigner_cutoff(&rho)?;
            let rho = rho.normalized();
            let values: Vec<Vec<f64>> = xs
                .par_iter()
                .map(|&x| ps.iter().map(|&p| fock_wigner_value(&rho, x, p)).collect())
                .collect();
            let min = values.iter().flatten().cloned().fold(f64::INFINITY, f64::min);
            let cell = step(&xs) * step(&ps);
            let integral = values.iter().flatten().sum::<f64>() * cell;
            output::write_wigner(
                &WignerGrid {
                    xs,
                    ps,
                    values,
                    min,
                    integral,
                },
                output.format,
                output::open(output.out.as_deref())?,
            )?;
        }
        Command::Twopeak {
            output,
            alpha,
            beta,
            phi0,
            delta,
        } => {
            let delta = parse_complex(&delta).map_err(CliError::Config)?;
            let state = two_peak_amplitudes(alpha, beta, phi0, delta)?;
            output::write_two_peak(&state, output.format, output::open(output.out.as_deref())?)?;
        }
        Command::Optomech {
            output,
            g,
            omega_m,
            t,
            n,
            m_max,
        } => {
            let kappa = phonon_kappa(g, omega_m, t)?;
            let rows = (n..=n + m_max)
                .map(|m| {
                    Ok(OverlapRow {
                        n,
                        m,
                        kappa,
                        overlap: optomech_overlap(g, omega_m, t, n, m)?,
                        coupling_multiplier: equivalent_coupling_multiplier(n, m),
                    })
                })
                .collect::<kerrsim_core::Result<Vec<_>>>()?;
            output::write_overlaps(&rows, output.format, output::open(output.out.as_deref())?)?;
        }
        Command::Selftest { all } => {
            let outcomes = if all { all_checks() } else { property_checks() };
            let mut unexpected = 0;
            for o in &outcomes {
                let known = !o.passed && KNOWN_DEVIATIONS.contains(&o.id);
                println!("{}{}", o.line(), if known { " (known deviation)" } else { "" });
                if !o.passed && !known {
                    unexpected += 1;
                }
            }
            return Ok(if unexpected == 0 { 0 } else { EXIT_NUMERICAL });
        }
    }
    Ok(0)
}

fn step(grid: &[f64]) -> f64 {
    match grid {
        [a, b, ..] => b - a,
        _ => 1.0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn flags_override_the_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("k.cfg");
        std::fs::write(&path, "nu = 0.7\nset = current\neta = 0.9\n").unwrap();
        let args = ModelArgs {
            config: Some(path),
            eta: Some(0.4),
            ..Default::default()
        };
        let cfg = args.resolve(NamedSet::Optimistic.parameters()).unwrap();
        assert_eq!(cfg.parameters.alpha, 50.0);
        assert_eq!(cfg.parameters.nu, 0.7);
        assert_eq!(cfg.parameters.eta, 0.4);

        let args = ModelArgs {
            set: Some("achievable".into()),
            ..args
        };
        let cfg = args.resolve(NamedSet::Optimistic.parameters()).unwrap();
        assert_eq!(cfg.parameters.p_dark, 1e-3);
        assert_eq!(cfg.parameters.nu, 0.7);
    }

    #[test]
    fn preset_applies_without_a_set() {
        let cfg = ModelArgs::default().resolve(wigner_preset()).unwrap();
        assert_eq!(cfg.parameters, wigner_preset());
        let bad = ModelArgs {
            set: Some("heroic".into()),
            ..Default::default()
        };
        assert_eq!(bad.resolve(wigner_preset()).unwrap_err().exit_code(), 2);
    }

    #[test]
    fn memory_gate() {
        let args = ModelArgs {
            oracle: true,
            ..Default::default()
        };
        let cfg = args.resolve(NamedSet::Optimistic.parameters()).unwrap();
        assert!(matches!(args.gate(&cfg, [cfg.parameters]), Err(CliError::TooLarge { .. })));
        let args = ModelArgs {
            allow_large: true,
            ..args
        };
        assert!(args.gate(&cfg, [cfg.parameters]).is_ok());
        let gaussian = ModelArgs::default();
        let cfg = gaussian.resolve(NamedSet::Optimistic.parameters()).unwrap();
        assert!(gaussian.gate(&cfg, [cfg.parameters]).is_ok());
    }
}
