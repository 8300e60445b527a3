// SPDX-License-Identifier: Apache-2.0

//! Command-line driver, configuration and file formats for `kerrsim-core`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod app;
pub mod checks;
pub mod config;
pub mod error;
pub mod output;
pub mod sweep;

pub use error::{CliError, Result};
