//! Command pipelines. Each returns rows for the writer plus whether every
//! asserted invariant held.

use std::fmt;

use anyhow::{anyhow, Result};
use rayon::prelude::*;
use serde::Serialize;
use skmass_core::amplifier::{
    amplified_sum, amplifier_coeffs, b_n_growth_scan, default_points, exponent_optimizer_with, hecke_amplifier_identity,
    lower_bound_check, BnVariant,
};
use skmass_core::arith::{isqrt, primes_up_to};
use skmass_core::extend::extend_basis;
use skmass_core::lseries::CentralSetup;
use skmass_core::mass::{MassContext, MassReport};
use skmass_core::qseries::{cusp_dimension, default_precision};
use skmass_core::specfun::WeightFnParams;
use skmass_core::trace::{default_c_max, petersson_rhs_grid, HarmonicWeights, KloostermanGrid, TraceCheckReport};
use skmass_core::{EigenBasis, Error};

use crate::cache::{BasisCache, CacheStatus};
use crate::config::RunConfig;

/// Bad arguments; the binary exits with status 2.
#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage<T>(msg: impl Into<String>) -> Result<T> {
    Err(UsageError(msg.into()).into())
}

#[derive(Debug, Clone)]
pub struct Outcome<R> {
    pub rows: Vec<R>,
    pub ok: bool,
    /// Human-readable lines for stderr.
    pub notes: Vec<String>,
}

pub struct Session {
    pub cfg: RunConfig,
    cache: BasisCache,
}

impl Session {
    pub fn new(cfg: RunConfig) -> Self {
        let cache = BasisCache::new(cfg.cache_dir.clone());
        Session { cfg, cache }
    }

    pub fn basis(&self, weight: u32) -> Result<EigenBasis> {
        if weight % 2 == 1 || weight == 0 {
            return usage(format!("weight {weight} must be a positive even integer"));
        }
        let precision = self.cfg.terms.unwrap_or_else(|| default_precision(weight));
        let (b, status) = self.cache.load(weight, precision)?;
        if self.cfg.verbose {
            let s = match status {
                CacheStatus::Hit => "cache hit",
                CacheStatus::Miss => "computed",
                CacheStatus::Rewritten(_) => "recomputed",
            };
            eprintln!("weight {weight}: dimension {}, {s}", b.dimension());
        }
        Ok(b)
    }

    fn pool(&self) -> Result<rayon::ThreadPool> {
        Ok(rayon::ThreadPoolBuilder::new().num_threads(self.cfg.jobs).build()?)
    }
}

fn extend(b: &mut EigenBasis, bound: u64) -> Result<()> {
    extend_basis(b, bound)?;
    Ok(())
}

fn lift_k(two_k: u32) -> Result<u32> {
    if two_k % 2 == 1 || two_k < 4 {
        return usage(format!("weight {two_k} is not of the form 2k"));
    }
    Ok(two_k / 2)
}

fn parity(two_k: u32, allow_even: bool) -> Result<u32> {
    let k = lift_k(two_k)?;
    if k % 2 == 0 && !allow_even {
        return usage(Error::Parity { weight: two_k }.to_string());
    }
    Ok(k)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BasisRow {
    pub weight: u32,
    pub dimension: usize,
    pub precision: usize,
    pub label: Option<usize>,
    pub p: Option<u64>,
    pub lambda_p: Option<f64>,
}

/// Dimension and λ_f(p) for p ≤ 20.
pub fn cmd_basis(s: &Session, weight: u32) -> Result<Outcome<BasisRow>> {
    let b = s.basis(weight)?;
    let mut rows = Vec::new();
    let base = BasisRow {
        weight,
        dimension: b.dimension(),
        precision: b.precision,
        label: None,
        p: None,
        lambda_p: None,
    };
    if b.is_empty() {
        rows.push(base.clone());
    }
    for f in &b.forms {
        for p in primes_up_to(20) {
            rows.push(BasisRow {
                label: Some(f.label),
                p: Some(p),
                lambda_p: Some(f.try_lambda(p)?),
                ..base.clone()
            });
        }
    }
    Ok(Outcome {
        rows,
        ok: true,
        notes: vec![format!("weight {weight}: dimension {}", b.dimension())],
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceRow {
    pub k: u32,
    pub m: u64,
    pub n: u64,
    pub lhs: f64,
    pub rhs: f64,
    pub c_max: u64,
    pub residual: f64,
    pub non_real: bool,
}

impl From<(TraceCheckReport, bool)> for TraceRow {
    fn from((r, non_real): (TraceCheckReport, bool)) -> Self {
        TraceRow {
            k: r.k,
            m: r.m,
            n: r.n,
            lhs: r.lhs,
            rhs: r.rhs,
            c_max: r.c_max,
            residual: r.residual,
            non_real,
        }
    }
}

/// Petersson formula on 1 ≤ m ≤ m_max, 1 ≤ n ≤ n_max.
pub fn cmd_trace_check(s: &Session, k: u32, m_max: u64, n_max: u64, c_max: Option<u64>) -> Result<Outcome<TraceRow>> {
    if k % 2 == 1 || k < 4 {
        return usage(format!("weight {k} must be an even integer at least 4"));
    }
    if m_max == 0 || n_max == 0 {
        return usage("m and n ranges must be nonempty");
    }
    let b = s.basis(k)?;
    let hw = HarmonicWeights::new(&b, m_max.max(n_max) as usize)?;
    let cm = |m, n| c_max.unwrap_or_else(|| default_c_max(k, m, n));
    let top = (1..=m_max)
        .flat_map(|m| (1..=n_max).map(move |n| (m, n)))
        .map(|(m, n)| cm(m, n))
        .max()
        .unwrap_or(1);
    let grid = KloostermanGrid::new(m_max, n_max, top);
    let pairs: Vec<(u64, u64)> = (1..=m_max).flat_map(|m| (1..=n_max).map(move |n| (m, n))).collect();
    let rows: Vec<TraceRow> = s.pool()?.install(|| {
        pairs
            .par_iter()
            .map(|&(m, n)| -> Result<TraceRow> {
                let lhs = hw.lhs(m, n)?;
                let rhs = petersson_rhs_grid(k, m, n, cm(m, n), &grid)?;
                Ok((TraceCheckReport::new(k, m, n, lhs, rhs.value, rhs.c_max), rhs.non_real).into())
            })
            .collect::<Result<_>>()
    })?;
    let worst = rows.iter().map(|r| r.residual).fold(0.0, f64::max);
    Ok(Outcome {
        rows,
        ok: worst < s.cfg.tol,
        notes: vec![format!("weight {k}: dimension {}, largest residual {worst:.3e}", b.dimension())],
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LValueRow {
    pub weight: u32,
    pub k: u32,
    pub f_label: usize,
    pub g_label: usize,
    pub value: f64,
    pub error_estimate: f64,
    pub cutoff: u64,
    pub contour_height: f64,
    pub a: f64,
    pub sigma: f64,
    pub flagged: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AfeOptions {
    pub a: f64,
    pub sigma: f64,
    pub cutoff: Option<u64>,
}

impl Default for AfeOptions {
    fn default() -> Self {
        AfeOptions {
            a: 8.0,
            sigma: 1.0,
            cutoff: None,
        }
    }
}

/// L(1/2, sym²f × g) for every f ∈ B_{k+1}, g ∈ B_{2k}.
pub fn cmd_lvalue(s: &Session, two_k: u32, opts: AfeOptions) -> Result<Outcome<LValueRow>> {
    let k = parity(two_k, false)?;
    let params = WeightFnParams::new(k).with_a(opts.a).with_sigma(opts.sigma);
    if let Err(e) = params.validate() {
        return usage(e.to_string());
    }
    let mut g = s.basis(two_k)?;
    let mut f = s.basis(k + 1)?;
    if f.is_empty() || g.is_empty() {
        return Ok(Outcome {
            rows: Vec::new(),
            ok: true,
            notes: vec![format!("S_{} is empty; no central values", k + 1)],
        });
    }
    let setup = match opts.cutoff {
        Some(x) => CentralSetup::with_cutoff(&params, x)?,
        None => CentralSetup::new(&params)?,
    };
    let bound = setup.required_bound() as u64;
    extend(&mut f, bound)?;
    extend(&mut g, bound)?;
    let syms = f
        .forms
        .iter()
        .map(|ff| skmass_core::lseries::SymSquareCoeffs::new(ff, bound as usize))
        .collect::<std::result::Result<Vec<_>, _>>()?;
    let lams = g
        .forms
        .iter()
        .map(|gg| gg.lambda_table(bound as usize))
        .collect::<std::result::Result<Vec<_>, _>>()?;
    let pairs: Vec<(usize, usize)> = (0..f.dimension()).flat_map(|i| (0..g.dimension()).map(move |j| (i, j))).collect();
    let rows: Vec<LValueRow> = s.pool()?.install(|| {
        pairs
            .par_iter()
            .map(|&(i, j)| -> Result<LValueRow> {
                let v = setup.evaluate(&syms[i], &lams[j], true)?;
                Ok(LValueRow {
                    weight: two_k,
                    k,
                    f_label: f.forms[i].label,
                    g_label: g.forms[j].label,
                    value: v.value,
                    error_estimate: v.error_estimate,
                    cutoff: setup.x_max,
                    contour_height: v.truncation.contour_height,
                    a: opts.a,
                    sigma: opts.sigma,
                    flagged: v.flagged,
                })
            })
            .collect::<Result<_>>()
    })?;
    let ok = rows.iter().all(|r| r.value.is_finite() && r.value >= -s.cfg.nonneg_tol);
    let flagged = rows.iter().filter(|r| r.flagged).count();
    let mut notes = vec![format!("weight {two_k}: {} central values, cutoff nm^2 <= {}", rows.len(), setup.x_max)];
    if flagged > 0 {
        notes.push(format!("{flagged} values flagged by the cutoff-doubling check"));
    }
    Ok(Outcome { rows, ok, notes })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MassRow {
    pub weight: u32,
    pub g_label: usize,
    pub n_fg: f64,
    pub s_g: f64,
    pub l_three_halves: f64,
    pub l_sym2: f64,
    pub central_sum: f64,
    pub central_min: Option<f64>,
    pub f_count: usize,
    pub error_estimate: f64,
    pub outside_lift: bool,
}

impl From<&MassReport> for MassRow {
    fn from(r: &MassReport) -> Self {
        MassRow {
            weight: r.weight,
            g_label: r.g_label,
            n_fg: r.n_fg,
            s_g: r.s_g,
            l_three_halves: r.l_three_halves.value,
            l_sym2: r.l_sym2.value,
            central_sum: r.central.iter().fold(0.0, |a, c| a + c.1.value),
            central_min: r.central.iter().map(|c| c.1.value).reduce(f64::min),
            f_count: r.central.len(),
            error_estimate: r.error_estimate,
            outside_lift: r.outside_lift,
        }
    }
}

/// Loaded and extended B_{2k}, B_{k+1} with the shared W table.
struct MassInputs {
    g: EigenBasis,
    ctx: MassContext,
}

fn mass_inputs(s: &Session, two_k: u32, allow_even: bool, extra_bound: u64) -> Result<MassInputs> {
    let k = parity(two_k, allow_even)?;
    let params = WeightFnParams::new(k);
    let mut g = s.basis(two_k)?;
    let mut f = if cusp_dimension(k + 1) == 0 || (k + 1) % 2 == 1 {
        EigenBasis {
            weight: k + 1,
            forms: Vec::new(),
            precision: 0,
        }
    } else {
        s.basis(k + 1)?
    };
    let bound = if f.is_empty() {
        0
    } else {
        CentralSetup::new(&params)?.required_bound() as u64
    };
    extend(&mut f, bound)?;
    extend(&mut g, bound.max(extra_bound))?;
    let ctx = MassContext::new(&f, &params, allow_even)?;
    Ok(MassInputs { g, ctx })
}

fn mass_reports(s: &Session, inp: &MassInputs) -> Result<Vec<MassReport>> {
    s.pool()?.install(|| {
        inp.g
            .forms
            .par_iter()
            .map(|g| inp.ctx.mass(g).map_err(|e| anyhow!(e)))
            .collect()
    })
}

fn mass_ok(r: &MassReport, tol: f64) -> bool {
    r.n_fg.is_finite() && r.n_fg >= -tol && r.central.iter().all(|c| c.1.value >= -tol)
}

/// N(F_g) for every g ∈ B_{2k}.
pub fn cmd_mass(s: &Session, two_k: u32, allow_even: bool) -> Result<Outcome<MassRow>> {
    let inp = mass_inputs(s, two_k, allow_even, 0)?;
    let reports = mass_reports(s, &inp)?;
    let ok = reports.iter().all(|r| mass_ok(r, s.cfg.nonneg_tol));
    let mut notes = vec![format!("weight {two_k}: {} forms", reports.len())];
    if allow_even && (two_k / 2) % 2 == 0 {
        notes.push("k even: exploratory evaluation outside the lift setting".into());
    }
    Ok(Outcome {
        rows: reports.iter().map(MassRow::from).collect(),
        ok,
        notes,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MassAverageRow {
    pub weight: u32,
    pub g_count: usize,
    pub f_count: usize,
    pub average: f64,
    pub n_min: Option<f64>,
    pub n_max: Option<f64>,
}

/// (12/(2k−1)) Σ_g N(F_g) for each weight in the list.
pub fn cmd_mass_average(s: &Session, weights: &[u32]) -> Result<Outcome<MassAverageRow>> {
    let mut rows = Vec::with_capacity(weights.len());
    let mut ok = true;
    for &w in weights {
        let inp = mass_inputs(s, w, false, 0)?;
        let reports = mass_reports(s, &inp)?;
        ok &= reports.iter().all(|r| mass_ok(r, s.cfg.nonneg_tol));
        let sum: f64 = reports.iter().map(|r| r.n_fg).sum();
        rows.push(MassAverageRow {
            weight: w,
            g_count: reports.len(),
            f_count: reports.first().map_or(0, |r| r.central.len()),
            average: 12.0 / (w as f64 - 1.0) * sum,
            n_min: reports.iter().map(|r| r.n_fg).reduce(f64::min),
            n_max: reports.iter().map(|r| r.n_fg).reduce(f64::max),
        });
    }
    Ok(Outcome {
        rows,
        ok,
        notes: vec!["averages are exploratory; no closeness to a limit is asserted".into()],
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AmplifyRow {
    pub weight: u32,
    pub amp_n: u64,
    pub g0_label: usize,
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
    pub hecke_sum: f64,
    pub prime_count: u64,
    pub direct: f64,
    pub expanded: f64,
}

/// Lower bound (12/(2k−1)) S_{g0} π(√N)² ≤ S_A and the Hecke identity behind it.
pub fn cmd_amplify(s: &Session, two_k: u32, amp_n: u64, g0_label: usize) -> Result<Outcome<AmplifyRow>> {
    if amp_n < 4 {
        return usage("the amplifier length N must be at least 4");
    }
    let inp = mass_inputs(s, two_k, false, isqrt(amp_n).max(2))?;
    if inp.g.is_empty() {
        return Ok(Outcome {
            rows: Vec::new(),
            ok: true,
            notes: vec![format!("S_{two_k} is empty")],
        });
    }
    let Some(g0) = inp.g.forms.iter().find(|f| f.label == g0_label) else {
        return usage(format!("no form with label {g0_label} in weight {two_k}"));
    };
    let reports = mass_reports(s, &inp)?;
    let lb = lower_bound_check(&inp.g, &reports, g0_label, amp_n)?;
    let (hecke_sum, np) = hecke_amplifier_identity(g0, amp_n)?;
    let sum = amplified_sum(&inp.g, &reports, &amplifier_coeffs(g0, amp_n)?)?;
    let hecke_ok = (hecke_sum - np as f64).abs() < 1e-9;
    Ok(Outcome {
        rows: vec![AmplifyRow {
            weight: two_k,
            amp_n,
            g0_label,
            lhs: lb.lhs,
            rhs: lb.rhs,
            holds: lb.holds,
            hecke_sum,
            prime_count: np,
            direct: sum.direct,
            expanded: sum.expanded,
        }],
        ok: lb.holds && hecke_ok,
        notes: vec![format!("weight {two_k}, N = {amp_n}: lhs {:.6e} <= rhs {:.6e}", lb.lhs, lb.rhs)],
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanRowOut {
    pub weight: u32,
    pub g0_label: Option<usize>,
    pub u: f64,
    pub v: f64,
    pub variant: &'static str,
    pub n: u64,
    pub value: f64,
    pub shape: f64,
    pub ratio: f64,
}

fn variant_name(v: BnVariant) -> &'static str {
    match v {
        BnVariant::Mellin => "mellin",
        BnVariant::Estimation => "estimation",
        BnVariant::Primed { .. } => "primed",
        BnVariant::Epsilon => "epsilon",
    }
}

/// |B_N(u, v)| along the N grid for the amplifier built from g0.
pub fn cmd_bn_scan(
    s: &Session,
    weight: u32,
    g0_label: usize,
    eps: f64,
    delta: f64,
    n_grid: &[u64],
) -> Result<Outcome<ScanRowOut>> {
    if !(delta > 0.5 && delta < 1.0) || !(eps > 0.0 && eps < 0.5) {
        return usage("need 0 < eps < 1/2 and 1/2 < delta < 1");
    }
    if n_grid.is_empty() || n_grid.iter().any(|&n| n < 4) || n_grid.windows(2).any(|w| w[0] >= w[1]) {
        return usage("the N grid must ascend and start at 4 or more");
    }
    let mut b = s.basis(weight)?;
    let top = isqrt(*n_grid.last().expect("nonempty"));
    extend(&mut b, top.max(2))?;
    let g0 = if b.is_empty() {
        None
    } else {
        match b.forms.iter().find(|f| f.label == g0_label) {
            Some(f) => Some(f),
            None => return usage(format!("no form with label {g0_label} in weight {weight}")),
        }
    };
    let scan = b_n_growth_scan(g0, &default_points(eps, delta), n_grid)?;
    let rows = scan
        .rows
        .iter()
        .map(|r| ScanRowOut {
            weight,
            g0_label: g0.map(|g| g.label),
            u: r.point.0,
            v: r.point.1,
            variant: variant_name(r.variant),
            n: r.n_max,
            value: r.value,
            shape: r.shape,
            ratio: r.ratio,
        })
        .collect();
    let mut notes: Vec<String> = scan
        .spreads
        .iter()
        .map(|(p, sp)| format!("ratio spread at ({}, {}): {sp:.3}", p.0, p.1))
        .collect();
    notes.push(format!(
        "slope at (-{delta}, 0): {:.4} (limit {:.4})",
        scan.delta_slope,
        -0.5 + 4.0 * delta + 0.05
    ));
    Ok(Outcome {
        rows,
        ok: scan.bounded_ok && scan.slope_ok,
        notes,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExponentRow {
    pub name: &'static str,
    pub value: f64,
}

/// η, δ1, δ2, δ3 and the final exponent 1 − η.
pub fn cmd_exponents(eps: f64, delta: f64) -> Result<Outcome<ExponentRow>> {
    let e = match exponent_optimizer_with(eps, delta) {
        Ok(e) => e,
        Err(Error::Domain(m)) => return usage(m),
        Err(e) => return Err(e.into()),
    };
    let rows = vec![
        ExponentRow { name: "eta", value: e.eta },
        ExponentRow { name: "delta1", value: e.delta1 },
        ExponentRow { name: "delta2", value: e.delta2 },
        ExponentRow { name: "delta3", value: e.delta3 },
        ExponentRow { name: "delta", value: e.delta },
        ExponentRow { name: "epsilon", value: e.epsilon },
        ExponentRow { name: "bound_exponent", value: e.bound_exponent },
        ExponentRow { name: "residual_1", value: e.residuals[0] },
        ExponentRow { name: "residual_2", value: e.residuals[1] },
        ExponentRow { name: "residual_3", value: e.residuals[2] },
        ExponentRow { name: "fourth_term_margin", value: e.fourth_term_margin },
    ];
    let ok = (e.delta1 - 27.0 / 91.0).abs() < 5e-3
        && e.delta3 > 1.0 / 210.0
        && e.delta3 < 1.0 / 209.0
        && (e.bound_exponent - (1.0 - 1.0 / 210.0)).abs() < 2e-4
        && e.residuals.iter().all(|r| r.abs() < 1e-12);
    Ok(Outcome {
        rows,
        ok,
        notes: vec![format!("bound exponent 1 - eta = {:.8} (1 - 1/210 = {:.8})", e.bound_exponent, 1.0 - 1.0 / 210.0)],
    })
}
