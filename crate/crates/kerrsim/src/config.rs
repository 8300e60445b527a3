// SPDX-License-Identifier: Apache-2.0

//! Run configuration: a named parameter set, a flat `key = value` file and
//! command-line overrides, applied in that order.

use std::path::Path;

use kerrsim_core::{Complex64, NamedSet, ParamName, Parameters, PipelineOptions, Variant};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

/// Everything needed to evaluate one parameter point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub parameters: Parameters,
    pub options: PipelineOptions,
    pub variant: Variant,
}

impl RunConfig {
    pub fn from_set(set: NamedSet) -> Self {
        RunConfig {
            parameters: set.parameters(),
            options: PipelineOptions::default(),
            variant: Variant::Gaussian,
        }
    }

    /// Apply one `key = value` setting.
    pub fn apply(&mut self, key: &str, value: &str) -> std::result::Result<(), String> {
        let number = || -> std::result::Result<f64, String> {
            value.parse::<f64>().map_err(|_| format!("`{value}` is not a number"))
        };
        if let Ok(name) = key.parse::<ParamName>() {
            self.parameters.set(name, number()?);
            return Ok(());
        }
        match key {
            "set" => {
                let set: NamedSet = value.parse().map_err(|_| format!("unknown parameter set `{value}`"))?;
                self.parameters = set.parameters();
            }
            "delta" => self.options.delta = Some(parse_complex(value)?),
            "gamma" => self.options.gamma = Some(number()?),
            "k_sigma" => self.options.k_sigma = number()?,
            "truncation_tol" => self.options.truncation_tol = number()?,
            "sharp" => self.options.sharp = parse_bool(value)?,
            "variant" => {
                self.variant = match value {
                    "gaussian" => Variant::Gaussian,
                    "fock-oracle" | "oracle" => Variant::FockOracle,
                    _ => return Err(format!("unknown variant `{value}`")),
                }
            }
            _ => return Err(format!("unknown key `{key}`")),
        }
        Ok(())
    }

    /// Apply every line of a config file. `#` starts a comment.
    pub fn apply_text(&mut self, text: &str, origin: &Path) -> Result<()> {
        for (key, value, line) in parse_lines(text, origin)? {
            self.apply(&key, &value).map_err(|message| CliError::ConfigLine {
                path: origin.to_path_buf(),
                line,
                message,
            })?;
        }
        Ok(())
    }

    /// Reject values the model cannot accept before any work starts.
    pub fn validate(&self) -> Result<()> {
        self.parameters.validate()?;
        let o = &self.options;
        if !(o.k_sigma > 0.0 && o.k_sigma.is_finite()) {
            return Err(CliError::Config(format!("k_sigma must be positive, got {}", o.k_sigma)));
        }
        if !(o.truncation_tol > 0.0 && o.truncation_tol < 1.0) {
            return Err(CliError::Config(format!(
                "truncation_tol must lie in (0, 1), got {}",
                o.truncation_tol
            )));
        }
        if let Some(g) = o.gamma {
            if !(g >= 0.0 && g.is_finite()) {
                return Err(CliError::Config(format!("gamma must be non-negative, got {g}")));
            }
        }
        Ok(())
    }
}

/// `(key, value, line number)` triples of a flat config file.
pub fn parse_lines(text: &str, origin: &Path) -> Result<Vec<(String, String, usize)>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(CliError::ConfigLine {
                path: origin.to_path_buf(),
                line: i + 1,
                message: format!("expected `key = value`, got `{line}`"),
            });
        };
        out.push((key.trim().to_string(), value.trim().to_string(), i + 1));
    }
    Ok(out)
}

/// `re,im` as a complex number.
pub fn parse_complex(s: &str) -> std::result::Result<Complex64, String> {
    let (re, im) = s
        .split_once(',')
        .ok_or_else(|| format!("expected `re,im`, got `{s}`"))?;
    let re = re.trim().parse::<f64>().map_err(|_| format!("bad real part in `{s}`"))?;
    let im = im.trim().parse::<f64>().map_err(|_| format!("bad imaginary part in `{s}`"))?;
    Ok(Complex64::new(re, im))
}

fn parse_bool(s: &str) -> std::result::Result<bool, String> {
    match s {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => Err(format!("expected true or false, got `{s}`")),
    }
}
