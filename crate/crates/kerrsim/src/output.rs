// SPDX-License-Identifier: Apache-2.0

//! CSV and JSON writers.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use clap::ValueEnum;
use kerrsim_core::exotic::TwoPeakState;
use serde::Serialize;

use crate::error::{CliError, Result};
use crate::sweep::SweepResult;

/// Sweep CSV columns, in order.
pub const SWEEP_HEADER: [&str; 6] = ["swept_name", "swept_value", "n_displacement", "g2", "success_prob", "optimal"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// A file, or stdout when no path is given.
pub fn open(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

pub fn write_sweep<W: Write>(result: &SweepResult, format: Format, out: W) -> Result<()> {
    if result.rows.is_empty() {
        return Err(CliError::Config("refusing to write an empty sweep".into()));
    }
    match format {
        Format::Json => write_json(result, out),
        Format::Csv => {
            let mut w = headerless(out);
            w.write_record(SWEEP_HEADER)?;
            for r in &result.rows {
                w.serialize(r)?;
            }
            w.flush()?;
            Ok(())
        }
    }
}

// headers are written explicitly so their order is fixed here, not by serde
fn headerless<W: Write>(out: W) -> csv::Writer<W> {
    csv::WriterBuilder::new().has_headers(false).from_writer(out)
}

pub fn read_sweep_json(path: &Path) -> Result<SweepResult> {
    let text = std::fs::read_to_string(path)?;
    let result: SweepResult = serde_json::from_str(&text)?;
    if result.rows.is_empty() {
        return Err(CliError::Config(format!("{}: sweep has no rows", path.display())));
    }
    Ok(result)
}

pub fn write_json<T: Serialize, W: Write>(value: &T, mut out: W) -> Result<()> {
    serde_json::to_writer_pretty(&mut out, value)?;
    out.write_all(b"\n")?;
    out.flush()?;
    Ok(())
}

/// Wigner values as long-form `x,p,w` rows, `p` varying fastest.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WignerGrid {
    pub xs: Vec<f64>,
    pub ps: Vec<f64>,
    /// `values[i][j] = W(xs[i], ps[j])`.
    pub values: Vec<Vec<f64>>,
    pub min: f64,
    pub integral: f64,
}

pub fn write_wigner<W: Write>(grid: &WignerGrid, format: Format, out: W) -> Result<()> {
    match format {
        Format::Json => write_json(grid, out),
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record(["x", "p", "w"])?;
            for (i, x) in grid.xs.iter().enumerate() {
                for (j, p) in grid.ps.iter().enumerate() {
                    w.serialize((x, p, grid.values[i][j]))?;
                }
            }
            w.flush()?;
            Ok(())
        }
    }
}

pub fn write_two_peak<W: Write>(state: &TwoPeakState, format: Format, out: W) -> Result<()> {
    match format {
        Format::Json => write_json(state, out),
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record(["n", "re", "im", "population", "peak"])?;
            for (n, c) in state.amplitudes.iter().enumerate() {
                w.serialize((n, c.re, c.im, c.norm_sqr(), state.peaks.contains(&n)))?;
            }
            w.flush()?;
            Ok(())
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OverlapRow {
    pub n: u64,
    pub m: u64,
    pub kappa: f64,
    pub overlap: f64,
    pub coupling_multiplier: u64,
}

pub fn write_overlaps<W: Write>(rows: &[OverlapRow], format: Format, out: W) -> Result<()> {
    match format {
        Format::Json => write_json(&rows, out),
        Format::Csv => {
            let mut w = headerless(out);
            w.write_record(["n", "m", "kappa", "overlap", "coupling_multiplier"])?;
            for r in rows {
                w.serialize(r)?;
            }
            w.flush()?;
            Ok(())
        }
    }
}
