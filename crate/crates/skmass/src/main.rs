use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use skmass::cache::{BasisCache, CACHE_ENV};
use skmass::commands::{self, AfeOptions, Outcome, Session, UsageError};
use skmass::config::{Format, RunConfig};
use skmass::output::write_rows;

#[derive(Parser, Debug)]
#[command(name = "skmass", version, about = "Hecke eigenforms, trace formula checks, sym^2 L-values and pullback masses at level one")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Debug)]
struct Common {
    /// Output format.
    #[arg(long = "out", value_enum, default_value = "json", global = true)]
    out: Format,
    /// Eigenbasis cache directory (overrides the environment).
    #[arg(long, global = true, env = CACHE_ENV)]
    cache_dir: Option<PathBuf>,
    /// Worker threads (0: all cores).
    #[arg(long, default_value_t = 0, global = true)]
    jobs: usize,
    /// q-expansion coefficients per eigenform.
    #[arg(long, global = true)]
    terms: Option<usize>,
    /// Residual tolerance for trace-check.
    #[arg(long, default_value_t = 1e-6, global = true)]
    tol: f64,
    /// Progress and cache messages on stderr.
    #[arg(short, long, global = true)]
    verbose: bool,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Eigenbasis of S_weight: dimension and λ_f(p) for p ≤ 20.
    Basis {
        #[arg(long)]
        weight: u32,
    },
    /// Petersson formula lhs and rhs on a grid of (m, n).
    TraceCheck {
        #[arg(long)]
        weight: u32,
        #[arg(long, default_value_t = 12)]
        m_max: u64,
        #[arg(long, default_value_t = 12)]
        n_max: u64,
        /// Kloosterman cutoff (default ceil(200·4π√(mn)/k) + 50 per pair).
        #[arg(long)]
        cmax: Option<u64>,
    },
    /// L(1/2, sym²f × g) for all f ∈ B_{k+1}, g ∈ B_{2k}.
    Lvalue {
        /// 2k.
        #[arg(long)]
        weight: u32,
        /// Decay parameter A of W.
        #[arg(long, default_value_t = 8.0)]
        a: f64,
        /// Real part of the W contour.
        #[arg(long, default_value_t = 1.0)]
        sigma: f64,
        /// Fixed cutoff n m² ≤ X (default: chosen from the tail bound).
        #[arg(long)]
        cutoff: Option<u64>,
    },
    /// N(F_g) for every g ∈ B_{2k}.
    Mass {
        #[arg(long)]
        weight: u32,
        /// Evaluate the same sum for k even (outside the lift setting).
        #[arg(long)]
        allow_even: bool,
    },
    /// (12/(2k−1)) Σ_g N(F_g) per weight.
    MassAverage {
        #[arg(long, value_delimiter = ',', required = true)]
        weight: Vec<u32>,
    },
    /// Amplified lower bound at 2k with amplifier length N.
    Amplify {
        #[arg(long)]
        weight: u32,
        #[arg(long = "amp-N", alias = "N")]
        amp_n: u64,
        #[arg(long, default_value_t = 0)]
        g0: usize,
    },
    /// |B_N(u, v)| growth along an N grid.
    BnScan {
        #[arg(long)]
        weight: u32,
        #[arg(long, default_value_t = 0)]
        g0: usize,
        #[arg(long, default_value_t = 0.01)]
        eps: f64,
        #[arg(long, default_value_t = 0.6)]
        delta: f64,
        #[arg(long = "amp-N", value_delimiter = ',', default_values_t = [100u64, 10_000, 1_000_000])]
        amp_n: Vec<u64>,
    },
    /// Exponents η, δ1, δ2, δ3 and the bound 1 − η.
    Exponents {
        #[arg(long, default_value_t = 1e-13)]
        eps: f64,
        #[arg(long, default_value_t = 0.6)]
        delta: f64,
    },
}

fn emit<R: Serialize>(o: Outcome<R>, format: Format) -> Result<bool> {
    for n in &o.notes {
        eprintln!("{n}");
    }
    write_rows(&o.rows, format, std::io::stdout().lock())?;
    Ok(o.ok)
}

fn run(cli: Cli) -> Result<bool> {
    let mut cfg = RunConfig::new(BasisCache::resolve_dir(cli.common.cache_dir.as_deref()));
    cfg.format = cli.common.out;
    cfg.jobs = cli.common.jobs;
    cfg.terms = cli.common.terms;
    cfg.tol = cli.common.tol;
    cfg.verbose = cli.common.verbose;
    if let Err(e) = cfg.validate() {
        return Err(UsageError(e.to_string()).into());
    }
    let f = cfg.format;
    let s = Session::new(cfg);
    match cli.cmd {
        Cmd::Basis { weight } => emit(commands::cmd_basis(&s, weight)?, f),
        Cmd::TraceCheck { weight, m_max, n_max, cmax } => emit(commands::cmd_trace_check(&s, weight, m_max, n_max, cmax)?, f),
        Cmd::Lvalue { weight, a, sigma, cutoff } => emit(commands::cmd_lvalue(&s, weight, AfeOptions { a, sigma, cutoff })?, f),
        Cmd::Mass { weight, allow_even } => emit(commands::cmd_mass(&s, weight, allow_even)?, f),
        Cmd::MassAverage { weight } => emit(commands::cmd_mass_average(&s, &weight)?, f),
        Cmd::Amplify { weight, amp_n, g0 } => emit(commands::cmd_amplify(&s, weight, amp_n, g0)?, f),
        Cmd::BnScan { weight, g0, eps, delta, amp_n } => emit(commands::cmd_bn_scan(&s, weight, g0, eps, delta, &amp_n)?, f),
        Cmd::Exponents { eps, delta } => emit(commands::cmd_exponents(eps, delta)?, f),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("error: an asserted invariant failed");
            ExitCode::from(1)
        }
        Err(e) if e.downcast_ref::<UsageError>().is_some() => {
            eprintln!("usage error: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(3)
        }
    }
}
