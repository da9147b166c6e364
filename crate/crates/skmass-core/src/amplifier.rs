//! Amplifier coefficients, the amplified sum S_A, the diagonal sums B_N(u, v)
//! and the exponent bookkeeping behind the power saving.

use alloc::vec::Vec;

use crate::arith::{gcd, primes_up_to};
use crate::mass::MassReport;
use crate::qseries::{EigenBasis, HeckeEigenform};
use crate::{Error, Result};

/// α_n: λ_{g0}(p) at primes p ≤ √N, −1 at p² ≤ N, zero elsewhere.
#[derive(Debug, Clone, PartialEq)]
pub struct AmplifierCoeffs {
    pub n_max: u64,
    pub g0_weight: u32,
    pub g0_label: usize,
    /// (n, p, e) with n = p^e, ascending in n.
    pub support: Vec<(u64, u64, u32)>,
    pub values: Vec<f64>,
}

impl AmplifierCoeffs {
    /// Coefficients given directly; every n must be a prime or a prime square.
    pub fn from_values(n_max: u64, entries: &[(u64, f64)]) -> Result<Self> {
        let mut support = Vec::with_capacity(entries.len());
        let mut values = Vec::with_capacity(entries.len());
        let mut sorted = entries.to_vec();
        sorted.sort_by_key(|e| e.0);
        for (n, v) in sorted {
            if n == 0 || n > n_max {
                return Err(Error::Domain("amplifier: index outside 1..=N"));
            }
            let f = crate::arith::factorize(n);
            if f.len() != 1 || f[0].1 > 2 {
                return Err(Error::Domain("amplifier: support must be primes and prime squares"));
            }
            support.push((n, f[0].0, f[0].1));
            values.push(v);
        }
        Ok(AmplifierCoeffs {
            n_max,
            g0_weight: 0,
            g0_label: 0,
            support,
            values,
        })
    }

    pub fn get(&self, n: u64) -> f64 {
        match self.support.binary_search_by_key(&n, |s| s.0) {
            Ok(i) => self.values[i],
            Err(_) => 0.0,
        }
    }

    pub fn l2_norm_sq(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum()
    }

    /// Σ_n α_n λ_g(n).
    pub fn amplify(&self, g: &HeckeEigenform) -> Result<f64> {
        let mut s = 0.0;
        for (&(n, _, _), a) in self.support.iter().zip(&self.values) {
            s += a * g.try_lambda(n)?;
        }
        Ok(s)
    }
}

pub fn amplifier_coeffs(g0: &HeckeEigenform, n_max: u64) -> Result<AmplifierCoeffs> {
    if n_max < 4 {
        return Err(Error::Domain("amplifier: N must be at least 4"));
    }
    let root = crate::arith::isqrt(n_max);
    let mut entries = Vec::new();
    for p in primes_up_to(root as usize) {
        entries.push((p, g0.try_lambda(p)?));
        entries.push((p * p, -1.0));
    }
    let mut c = AmplifierCoeffs::from_values(n_max, &entries)?;
    c.g0_weight = g0.weight;
    c.g0_label = g0.label;
    Ok(c)
}

/// Σ_{p ≤ √N} (λ(p)² − λ(p²)), equal to π(√N) by the Hecke relation.
pub fn hecke_amplifier_identity(g0: &HeckeEigenform, n_max: u64) -> Result<(f64, u64)> {
    let ps = primes_up_to(crate::arith::isqrt(n_max) as usize);
    let mut s = 0.0;
    for &p in &ps {
        let l = g0.try_lambda(p)?;
        s += l * l - g0.try_lambda(p * p)?;
    }
    Ok((s, ps.len() as u64))
}

#[derive(Debug, Clone, PartialEq)]
pub struct AmplifiedSum {
    /// (12/(2k−1)) Σ_g |Σ_n α_n λ_g(n)|² S_g.
    pub direct: f64,
    /// The same after the Hecke relation: Σ_{n1,n2} α α Σ_{d|(n1,n2)} λ_g(n1n2/d²).
    pub expanded: f64,
    /// |Σ_n α_n λ_g(n)|² per g.
    pub amplified: Vec<f64>,
}

fn weight_factor(two_k: u32) -> f64 {
    12.0 / (two_k as f64 - 1.0)
}

/// S_A from the mass reports of every g ∈ B_{2k}; the two forms must agree to 1e−10.
pub fn amplified_sum(basis_2k: &EigenBasis, reports: &[MassReport], coeffs: &AmplifierCoeffs) -> Result<AmplifiedSum> {
    if reports.len() != basis_2k.dimension() {
        return Err(Error::Domain("amplified_sum: one mass report per form is required"));
    }
    let wf = weight_factor(basis_2k.weight);
    let mut direct = 0.0;
    let mut expanded = 0.0;
    let mut amplified = Vec::with_capacity(reports.len());
    for (g, r) in basis_2k.forms.iter().zip(reports) {
        if r.g_label != g.label || r.weight != g.weight {
            return Err(Error::Domain("amplified_sum: reports out of order"));
        }
        let a = coeffs.amplify(g)?;
        amplified.push(a * a);
        direct += a * a * r.s_g;
        let mut e = 0.0;
        for (i, &(n1, _, _)) in coeffs.support.iter().enumerate() {
            for (j, &(n2, _, _)) in coeffs.support.iter().enumerate() {
                let mut inner = 0.0;
                for d in crate::arith::divisors(gcd(n1, n2)) {
                    inner += g.try_lambda(n1 * n2 / (d * d))?;
                }
                e += coeffs.values[i] * coeffs.values[j] * inner;
            }
        }
        expanded += e * r.s_g;
    }
    let (direct, expanded) = (wf * direct, wf * expanded);
    if (direct - expanded).abs() > 1e-10 * direct.abs().max(1.0) {
        return Err(Error::Numerical(alloc::format!(
            "Hecke expansion of the amplified sum disagrees: {direct} vs {expanded}"
        )));
    }
    Ok(AmplifiedSum {
        direct,
        expanded,
        amplified,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LowerBound {
    /// (12/(2k−1)) S_{g0} π(√N)².
    pub lhs: f64,
    /// S_A.
    pub rhs: f64,
    pub holds: bool,
}

/// The single-term lower bound for S_A with the amplifier built from g0.
pub fn lower_bound_check(basis_2k: &EigenBasis, reports: &[MassReport], g0_label: usize, n_max: u64) -> Result<LowerBound> {
    if basis_2k.is_empty() {
        return Ok(LowerBound {
            lhs: 0.0,
            rhs: 0.0,
            holds: true,
        });
    }
    for r in reports {
        if r.s_g < -1e-6 {
            return Err(Error::Numerical(alloc::format!(
                "S_g = {} is negative; dropping terms is not justified",
                r.s_g
            )));
        }
    }
    let g0 = basis_2k
        .forms
        .iter()
        .position(|f| f.label == g0_label)
        .ok_or(Error::Domain("lower_bound_check: no form with that label"))?;
    let coeffs = amplifier_coeffs(&basis_2k.forms[g0], n_max)?;
    let s = amplified_sum(basis_2k, reports, &coeffs)?;
    let np = primes_up_to(crate::arith::isqrt(n_max) as usize).len() as f64;
    let lhs = weight_factor(basis_2k.weight) * reports[g0].s_g * np * np;
    Ok(LowerBound {
        lhs,
        rhs: s.direct,
        holds: lhs <= s.direct + 1e-8,
    })
}

/// Which diagonal sum to evaluate.
///
/// The three estimation objects keep μ(n1n2/a2b2²) exactly as printed next to the
/// constraint a2b2²d² | n1n2, so only d = 1 survives in them; the Mellin sum is the
/// definition itself and keeps every d.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BnVariant {
    /// Σ_d Σ_{n1,n2 ≤ N/d} α_{dn1} α_{dn2} Σ_{a2 b2² | n1n2} μ(n1n2/a2b2²) σ_{v/2−u}(a2²) b2^(2+4u)
    ///   / ((n1n2)^(3/2+2u) a2^(v−2u)).
    Mellin,
    /// Σ_{n1,n2} α α (n1n2)^(−3/2−2u) Σ_{d|(n1,n2)} d^(3+4u) Σ_{a2 b2² d² | n1n2} μ(n1n2/a2b2²) σ_0(a2²) b2^(2+4u).
    Estimation,
    /// Σ_{n1,n2} α α (n1n2)^(−5/2−ε) Σ_{d|(n1,n2)} d^(5+ε) Σ_{a2 b2² d² | n1n2} |μ(n1n2/a2b2²)| a2^(2+ε) b2^(4+2ε).
    Primed { eps: f64 },
    /// As `Estimation` with σ_{v/2−u}(a2²) a2^(2u−v) in place of σ_0(a2²).
    Epsilon,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BnPoint {
    pub u: f64,
    pub v: f64,
    pub variant: BnVariant,
    /// Every term replaced by its absolute value.
    pub absolute: bool,
    pub n_max: u64,
    pub value: f64,
}

/// Local factor at p^e of Σ μ(p^e/ab²) σ_s(a²) a^x b^y over a b² | p^(e − reserved).
fn local_factor(p: f64, e: u32, reserved: u32, sigma_s: Option<f64>, a_exp: f64, b_exp: f64, absolute: bool) -> f64 {
    if reserved > e {
        return 0.0;
    }
    let room = e - reserved;
    let mut s = 0.0;
    let mut beta = 0;
    while 2 * beta <= room {
        for alpha in 0..=(room - 2 * beta) {
            let rest = e - alpha - 2 * beta;
            if rest > 1 {
                continue;
            }
            let sign = if rest == 1 && !absolute { -1.0 } else { 1.0 };
            // σ_s(p^(2α)) = Σ_{j ≤ 2α} p^(js)
            let sig = match sigma_s {
                Some(t) => (0..=2 * alpha).map(|j| libm::pow(p, j as f64 * t)).sum::<f64>(),
                None => 1.0,
            };
            s += sign * sig * libm::pow(p, alpha as f64 * a_exp + beta as f64 * b_exp);
        }
        beta += 1;
    }
    s
}

/// Inner sum Σ_{a2 b2² | n} μ(n/a2b2²) σ_{v/2−u}(a2²) b2^(2+4u) a2^(2u−v) n^(−3/2−2u).
pub fn bn_inner(n: u64, u: f64, v: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::Domain("bn_inner: n must be positive"));
    }
    let mut s = libm::pow(n as f64, -1.5 - 2.0 * u);
    for (p, e) in crate::arith::factorize(n) {
        s *= local_factor(p as f64, e, 0, Some(v / 2.0 - u), 2.0 * u - v, 2.0 + 4.0 * u, false);
    }
    Ok(s)
}

fn merge(a: &[(u64, u32)], b: &[(u64, u32)]) -> Vec<(u64, u32)> {
    let mut out: Vec<(u64, u32)> = a.to_vec();
    for &(p, e) in b {
        match out.iter_mut().find(|x| x.0 == p) {
            Some(x) => x.1 += e,
            None => out.push((p, e)),
        }
    }
    out
}

/// B_N at (u, v) for the chosen variant.
pub fn b_n_sum(u: f64, v: f64, variant: BnVariant, absolute: bool, coeffs: &AmplifierCoeffs) -> Result<BnPoint> {
    if !u.is_finite() || !v.is_finite() {
        return Err(Error::Domain("b_n_sum: point must be finite"));
    }
    if let BnVariant::Primed { eps } = variant {
        if !(eps >= 0.0) {
            return Err(Error::Domain("b_n_sum: eps must be nonnegative"));
        }
    }
    let sup = &coeffs.support;
    let mut total = 0.0;
    for (i, &(n1, p1, e1)) in sup.iter().enumerate() {
        for (j, &(n2, p2, e2)) in sup.iter().enumerate() {
            let mut aa = coeffs.values[i] * coeffs.values[j];
            if absolute {
                aa = aa.abs();
            }
            if aa == 0.0 {
                continue;
            }
            let prod = merge(&[(p1, e1)], &[(p2, e2)]);
            let nn = (n1 * n2) as f64;
            let mut s = 0.0;
            for d in crate::arith::divisors(gcd(n1, n2)) {
                let dfac = crate::arith::factorize(d);
                let reserved = |p: u64| dfac.iter().find(|x| x.0 == p).map_or(0, |x| 2 * x.1);
                let df = d as f64;
                let t = match variant {
                    BnVariant::Mellin => {
                        // n1n2 → n1n2/d² after writing α_{dn}
                        let mut t = libm::pow(nn / (df * df), -1.5 - 2.0 * u);
                        for &(p, e) in &prod {
                            let r = reserved(p);
                            t *= local_factor(p as f64, e - r, 0, Some(v / 2.0 - u), 2.0 * u - v, 2.0 + 4.0 * u, absolute);
                        }
                        t
                    }
                    BnVariant::Estimation | BnVariant::Epsilon => {
                        let (sig, ax) = if variant == BnVariant::Epsilon {
                            (v / 2.0 - u, 2.0 * u - v)
                        } else {
                            (0.0, 0.0)
                        };
                        let mut t = libm::pow(nn, -1.5 - 2.0 * u) * libm::pow(df, 3.0 + 4.0 * u);
                        for &(p, e) in &prod {
                            t *= local_factor(p as f64, e, reserved(p), Some(sig), ax, 2.0 + 4.0 * u, absolute);
                        }
                        t
                    }
                    BnVariant::Primed { eps } => {
                        let mut t = libm::pow(nn, -2.5 - eps) * libm::pow(df, 5.0 + eps);
                        for &(p, e) in &prod {
                            t *= local_factor(p as f64, e, reserved(p), None, 2.0 + eps, 4.0 + 2.0 * eps, true);
                        }
                        t
                    }
                };
                s += t;
            }
            total += aa * if absolute { s.abs() } else { s };
        }
    }
    if !total.is_finite() {
        return Err(Error::Numerical("b_n_sum: non-finite value".into()));
    }
    Ok(BnPoint {
        u,
        v,
        variant,
        absolute,
        n_max: coeffs.n_max,
        value: total,
    })
}

/// Mellin B_N(u, v) by plain enumeration of d, n1, n2, a2, b2.
pub fn b_n_mellin_brute(u: f64, v: f64, coeffs: &AmplifierCoeffs) -> Result<f64> {
    let n = coeffs.n_max;
    let mut total = 0.0;
    for d in 1..=n {
        let ns: Vec<(u64, f64)> = coeffs
            .support
            .iter()
            .zip(&coeffs.values)
            .filter(|(s, _)| s.0 % d == 0)
            .map(|(s, a)| (s.0 / d, *a))
            .collect();
        for &(n1, a1) in &ns {
            for &(n2, a2c) in &ns {
                let m = n1 * n2;
                let mut inner = 0.0;
                for a2 in crate::arith::divisors(m) {
                    let mut b2 = 1u64;
                    while a2 * b2 * b2 <= m {
                        if m % (a2 * b2 * b2) == 0 {
                            let mu = crate::arith::mobius(m / (a2 * b2 * b2))? as f64;
                            if mu != 0.0 {
                                let sig = crate::arith::sigma_alpha(a2 * a2, v / 2.0 - u)?;
                                inner += mu * sig * libm::pow(b2 as f64, 2.0 + 4.0 * u)
                                    / libm::pow(a2 as f64, v - 2.0 * u);
                            }
                        }
                        b2 += 1;
                    }
                }
                total += a1 * a2c * inner / libm::pow(m as f64, 1.5 + 2.0 * u);
            }
        }
    }
    Ok(total)
}

/// One row of a growth scan.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanRow {
    pub point: (f64, f64),
    pub variant: BnVariant,
    pub n_max: u64,
    pub value: f64,
    /// log log N for the bounded points, N^(−1/2+4δ) for (−δ, 0).
    pub shape: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GrowthScan {
    pub rows: Vec<ScanRow>,
    /// max/min of value/shape per bounded point.
    pub spreads: Vec<((f64, f64), f64)>,
    /// Least-squares slope of log |B_N(−δ, 0)| against log N.
    pub delta_slope: f64,
    pub delta: f64,
    pub bounded_ok: bool,
    pub slope_ok: bool,
}

/// Default scan points (0,0), (−ε/2, ε), (−1/4, 0), (−δ, 0).
pub fn default_points(eps: f64, delta: f64) -> [(f64, f64); 4] {
    [(0.0, 0.0), (-eps / 2.0, eps), (-0.25, 0.0), (-delta, 0.0)]
}

/// |B_N| along N_grid with amplifiers from g0; the last point is the (−δ, 0) one.
pub fn b_n_growth_scan(
    g0: Option<&HeckeEigenform>,
    points: &[(f64, f64); 4],
    n_grid: &[u64],
) -> Result<GrowthScan> {
    if n_grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Domain("b_n_growth_scan: N grid must ascend"));
    }
    let delta = -points[3].0;
    let mut rows = Vec::new();
    for &n in n_grid {
        let coeffs = match g0 {
            Some(g) => amplifier_coeffs(g, n)?,
            None => AmplifierCoeffs::from_values(n, &[])?,
        };
        for (idx, &(u, v)) in points.iter().enumerate() {
            let variant = if idx == 1 { BnVariant::Epsilon } else { BnVariant::Estimation };
            let b = b_n_sum(u, v, variant, true, &coeffs)?;
            let nf = n as f64;
            let shape = if idx == 3 {
                libm::pow(nf, -0.5 + 4.0 * delta)
            } else {
                libm::log(libm::log(nf))
            };
            rows.push(ScanRow {
                point: (u, v),
                variant,
                n_max: n,
                value: b.value,
                shape,
                ratio: b.value / shape,
            });
        }
    }
    let mut spreads = Vec::new();
    let mut bounded_ok = true;
    for &pt in &points[..3] {
        let rs: Vec<f64> = rows.iter().filter(|r| r.point == pt).map(|r| r.ratio).collect();
        let hi = rs.iter().cloned().fold(f64::MIN, f64::max);
        let lo = rs.iter().cloned().fold(f64::MAX, f64::min);
        let spread = if hi == 0.0 && lo == 0.0 { 1.0 } else { hi / lo };
        if !(spread < 10.0) {
            bounded_ok = false;
        }
        spreads.push((pt, spread));
    }
    let dr: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.point == points[3] && r.value > 0.0)
        .map(|r| (libm::log(r.n_max as f64), libm::log(r.value)))
        .collect();
    let delta_slope = if dr.len() >= 2 {
        let n = dr.len() as f64;
        let mx = dr.iter().map(|p| p.0).sum::<f64>() / n;
        let my = dr.iter().map(|p| p.1).sum::<f64>() / n;
        let sxy: f64 = dr.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = dr.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
        sxy / sxx
    } else {
        0.0
    };
    let slope_ok = delta_slope <= -0.5 + 4.0 * delta + 0.05;
    Ok(GrowthScan {
        rows,
        spreads,
        delta_slope,
        delta,
        bounded_ok,
        slope_ok,
    })
}

/// Exponents (η, δ1, δ2, δ3) equating the k-powers of the final estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExponentSolution {
    pub eta: f64,
    pub delta1: f64,
    pub delta2: f64,
    pub delta3: f64,
    /// Contour parameter in (1/2, 1) at which the fourth term is reported.
    pub delta: f64,
    /// Slack in δ3 = δ1δ2/62 − ε.
    pub epsilon: f64,
    /// 1 − η.
    pub bound_exponent: f64,
    /// −η + δ3, −η − (δ2 − 1), −η − (20η/3 − 1/3 + δ1).
    pub residuals: [f64; 3],
    /// max over δ ∈ (1/2, 1) of the fourth exponent plus η (negative when dominated).
    pub fourth_term_margin: f64,
}

/// Solves −η = −δ3 = δ2 − 1 = 20η/3 − 1/3 + δ1 with δ3 = δ1δ2/62 − ε.
pub fn exponent_optimizer() -> Result<ExponentSolution> {
    exponent_optimizer_with(1e-13, 0.6)
}

pub fn exponent_optimizer_with(epsilon: f64, delta: f64) -> Result<ExponentSolution> {
    if !(delta > 0.5 && delta < 1.0) {
        return Err(Error::Domain("exponent_optimizer: delta must lie in (1/2, 1)"));
    }
    if !(epsilon >= 0.0) {
        return Err(Error::Domain("exponent_optimizer: epsilon must be nonnegative"));
    }
    // δ3 = η, δ2 = 1 − η, δ1 = 1/3 − 23η/3, so 62η + 62ε = (1/3 − 23η/3)(1 − η):
    // 23η² − 210η + 1 − 186ε = 0, smaller root
    let c = 1.0 - 186.0 * epsilon;
    let disc = 210.0 * 210.0 - 4.0 * 23.0 * c;
    if disc < 0.0 {
        return Err(Error::Numerical("exponent system has no real root".into()));
    }
    // stable form of the smaller root
    let eta_q = 2.0 * c / (210.0 + libm::sqrt(disc));
    let f = |eta: f64| 62.0 * (eta + epsilon) - (1.0 / 3.0 - 23.0 * eta / 3.0) * (1.0 - eta);
    let (mut lo, mut hi) = (0.0f64, 0.5f64);
    if f(lo) * f(hi) > 0.0 {
        return Err(Error::Numerical("exponent system has no root in (0, 1/2)".into()));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(lo) * f(mid) <= 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let eta_b = 0.5 * (lo + hi);
    if (eta_q - eta_b).abs() > 1e-10 {
        return Err(Error::Numerical(alloc::format!(
            "quadratic and bisection disagree: {eta_q} vs {eta_b}"
        )));
    }
    let eta = eta_q;
    if !(eta > 0.0 && eta < 0.5) {
        return Err(Error::Numerical("exponent system has no root in (0, 1/2)".into()));
    }
    let delta3 = eta;
    let delta2 = 1.0 - eta;
    let delta1 = 1.0 / 3.0 - 23.0 * eta / 3.0;
    let residuals = [
        -eta + delta3,
        -eta - (delta2 - 1.0),
        -eta - (20.0 * eta / 3.0 - 1.0 / 3.0 + delta1),
    ];
    let mut margin = f64::MIN;
    for i in 1..1000 {
        let d = 0.5 + 0.5 * i as f64 / 1000.0;
        let e4 = -1.5 * eta + 4.0 * eta * d - 2.0 * d;
        margin = margin.max(e4 + eta);
    }
    if margin >= 0.0 {
        return Err(Error::Numerical("fourth exponent is not dominated".into()));
    }
    Ok(ExponentSolution {
        eta,
        delta1,
        delta2,
        delta3,
        delta,
        epsilon,
        bound_exponent: 1.0 - eta,
        residuals,
        fourth_term_margin: margin,
    })
}
