//! File formats, reports and command implementations on top of
//! `persuade-core`.
//!
//! - [`io`]: instance files and JSON encodings of mechanisms, construction
//!   certificates and oracle bounds.
//! - [`format`]: tables rendered as JSON, CSV or aligned text.
//! - [`report`]: `solve` and `check` on a single instance.
//! - [`reproduce`]: claimed values recomputed with their tolerances.
//! - [`bench`]: ratio sweeps over generator seeds.

pub mod bench;
pub mod format;
pub mod io;
pub mod report;
pub mod reproduce;

use std::path::PathBuf;

use anyhow::{bail, Result};
use persuade_core::instances::{self, generate, GeneratorSpec};
use persuade_core::ValueDistribution;

/// Where an instance comes from.
#[derive(Debug, Clone, PartialEq)]
pub enum Source {
    Example { id: String, eps: Option<f64>, n: Option<usize> },
    File(PathBuf),
    Family(GeneratorSpec),
}

impl Source {
    /// Exactly one of the three options must be set.
    pub fn from_options(
        example: Option<String>,
        instance: Option<PathBuf>,
        family: Option<String>,
        eps: Option<f64>,
        n: Option<usize>,
        seed: Option<u64>,
    ) -> Result<Self> {
        match (example, instance, family) {
            (Some(id), None, None) => Ok(Source::Example { id, eps, n }),
            (None, Some(path), None) => Ok(Source::File(path)),
            (None, None, Some(spec)) => {
                let mut spec: GeneratorSpec = spec.parse()?;
                if let Some(seed) = seed {
                    spec.seed = seed;
                }
                if let Some(eps) = eps {
                    spec.eps = eps;
                }
                Ok(Source::Family(spec))
            }
            _ => bail!("give exactly one of --example, --instance, --family"),
        }
    }

    pub fn load(&self) -> Result<ValueDistribution> {
        Ok(match self {
            Source::Example { id, eps, n } => instances::builtin(id, *eps, *n)?,
            Source::File(path) => io::load_instance(path)?,
            Source::Family(spec) => generate(spec)?,
        })
    }
}
