use std::path::PathBuf;

use anyhow::{bail, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub cache_dir: PathBuf,
    pub format: Format,
    /// Worker threads; 0 lets the pool decide.
    pub jobs: usize,
    /// q-expansion coefficients per form.
    pub terms: Option<usize>,
    /// Trace-formula residual tolerance.
    pub tol: f64,
    /// Slack for nonnegativity checks.
    pub nonneg_tol: f64,
    pub verbose: bool,
}

impl RunConfig {
    pub fn new(cache_dir: PathBuf) -> Self {
        RunConfig {
            cache_dir,
            format: Format::Json,
            jobs: 0,
            terms: None,
            tol: 1e-6,
            nonneg_tol: 1e-6,
            verbose: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(t) = self.terms {
            if t < 30 {
                bail!("--terms must be at least 30 (λ_f(p) for p ≤ 20 and the extension need it)");
            }
        }
        if !(self.tol > 0.0) || !(self.nonneg_tol >= 0.0) {
            bail!("tolerances must be positive");
        }
        Ok(())
    }
}
