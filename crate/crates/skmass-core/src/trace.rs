//! The Petersson trace formula checked numerically, and the diagonal and
//! off-diagonal pieces of M_f(r).

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::arith::{gcd, tau_divisors};
use crate::lseries::{l_sym2_fe, CentralSetup, SymSquareCoeffs};
use crate::qseries::{EigenBasis, HeckeEigenform};
use crate::specfun::{bessel_abs_bound, bessel_decay_bound, bessel_j, KloostermanTable, WeightFnParams};
use crate::{Error, Result};

const ZETA2: f64 = PI * PI / 6.0;

/// Terms whose Weil-times-Bessel majorant falls below this are not evaluated.
const SKIP: f64 = 1e-22;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceCheckReport {
    pub k: u32,
    pub m: u64,
    pub n: u64,
    pub lhs: f64,
    pub rhs: f64,
    pub c_max: u64,
    pub residual: f64,
}

impl TraceCheckReport {
    pub fn new(k: u32, m: u64, n: u64, lhs: f64, rhs: f64, c_max: u64) -> Self {
        TraceCheckReport {
            k,
            m,
            n,
            lhs,
            rhs,
            c_max,
            residual: (lhs - rhs).abs(),
        }
    }

    /// |lhs − rhs| from the stored sides.
    pub fn recomputed_residual(&self) -> f64 {
        (self.lhs - self.rhs).abs()
    }
}

/// Harmonic weights 2π²/((k−1) L(1, sym²f)) for a basis.
#[derive(Debug, Clone, PartialEq)]
pub struct HarmonicWeights {
    pub k: u32,
    pub weights: Vec<f64>,
    lambdas: Vec<Vec<f64>>,
}

impl HarmonicWeights {
    /// Precomputes λ_f(n) for n ≤ n_max.
    pub fn new(basis: &EigenBasis, n_max: usize) -> Result<Self> {
        let k = basis.weight;
        let mut weights = Vec::with_capacity(basis.dimension());
        let mut lambdas = Vec::with_capacity(basis.dimension());
        for f in &basis.forms {
            let l = l_sym2_fe(f)?;
            weights.push(2.0 * PI * PI / ((k as f64 - 1.0) * l.value));
            lambdas.push(f.lambda_table(n_max)?);
        }
        Ok(HarmonicWeights { k, weights, lambdas })
    }

    pub fn lhs(&self, m: u64, n: u64) -> Result<f64> {
        if m == 0 || n == 0 {
            return Err(Error::Domain("petersson_lhs: indices must be positive"));
        }
        let mut s = 0.0;
        for (w, l) in self.weights.iter().zip(&self.lambdas) {
            let top = l.len() as u64 - 1;
            if m.max(n) > top {
                return Err(Error::InsufficientPrecision {
                    needed: m.max(n),
                    available: top,
                });
            }
            s += w * l[m as usize] * l[n as usize];
        }
        Ok(s)
    }
}

/// (2π²/(k−1)) Σ_f λ_f(m)λ_f(n)/L(1, sym²f).
pub fn petersson_lhs(basis: &EigenBasis, m: u64, n: u64) -> Result<f64> {
    HarmonicWeights::new(basis, m.max(n) as usize)?.lhs(m, n)
}

/// S(m, n; c) for all m ≤ m_max, n ≤ n_max, c ≤ c_max.
#[derive(Debug, Clone)]
pub struct KloostermanGrid {
    pub m_max: u64,
    pub n_max: u64,
    pub c_max: u64,
    values: Vec<f64>,
}

impl KloostermanGrid {
    pub fn new(m_max: u64, n_max: u64, c_max: u64) -> Self {
        let per_c = (m_max * n_max) as usize;
        let mut values = vec![0.0; per_c * c_max as usize];
        for c in 1..=c_max {
            let t = KloostermanTable::new(c);
            let base = (c as usize - 1) * per_c;
            for m in 1..=m_max {
                for n in 1..=n_max {
                    values[base + ((m - 1) * n_max + (n - 1)) as usize] = t.sum(m, n);
                }
            }
        }
        KloostermanGrid {
            m_max,
            n_max,
            c_max,
            values,
        }
    }

    pub fn get(&self, m: u64, n: u64, c: u64) -> Option<f64> {
        if m == 0 || n == 0 || c == 0 || m > self.m_max || n > self.n_max || c > self.c_max {
            return None;
        }
        let per_c = self.m_max * self.n_max;
        Some(self.values[((c - 1) * per_c + (m - 1) * self.n_max + (n - 1)) as usize])
    }
}

/// Right side of the trace formula. For odd k the sum is purely imaginary
/// and `value` holds the modulus of δ + i^(−k)·(…), with `non_real` set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RhsValue {
    pub value: f64,
    pub c_max: u64,
    /// Terms actually evaluated.
    pub terms: u64,
    pub non_real: bool,
}

fn weil(m: u64, n: u64, c: u64) -> f64 {
    let g = gcd(gcd(m, n), c);
    tau_divisors(c).unwrap_or(u64::MAX) as f64 * libm::sqrt(g as f64) * libm::sqrt(c as f64)
}

fn rhs_with(k: u32, m: u64, n: u64, c_max: u64, kl: &dyn Fn(u64) -> Result<f64>) -> Result<RhsValue> {
    if k < 2 {
        return Err(Error::Domain("petersson_rhs: k must be at least 2"));
    }
    if m == 0 || n == 0 {
        return Err(Error::Domain("petersson_rhs: indices must be positive"));
    }
    if c_max == 0 {
        return Err(Error::Domain("petersson_rhs: c_max must be at least 1"));
    }
    let nu = k - 1;
    let a = 4.0 * PI * libm::sqrt((m * n) as f64);
    let mut s = 0.0;
    let mut terms = 0;
    let g = libm::sqrt(gcd(m, n) as f64);
    let nuf = nu as f64;
    for c in 1..=c_max {
        let x = a / c as f64;
        if c as f64 > a && nu >= 2 {
            // Σ_{c' ≥ c} 2π·2√c'·g/c'·(a/2c')^ν/ν! with τ(c) ≤ 2√c
            let tail = 4.0 * PI * g * bessel_decay_bound(nu, a) * libm::pow(c as f64 - 1.0, 0.5 - nuf) / (nuf - 0.5);
            if tail < SKIP {
                break;
            }
        }
        if 2.0 * PI * weil(m, n, c) / c as f64 * bessel_abs_bound(nu, x) < SKIP {
            continue;
        }
        terms += 1;
        s += kl(c)? / c as f64 * bessel_j(nu, x)?;
    }
    let delta = if m == n { 1.0 } else { 0.0 };
    let off = 2.0 * PI * s;
    let (value, non_real) = match k % 4 {
        0 => (delta + off, false),
        2 => (delta - off, false),
        _ => (libm::hypot(delta, off), true),
    };
    Ok(RhsValue {
        value,
        c_max,
        terms,
        non_real,
    })
}

/// δ_{mn} + 2π i^(−k) Σ_{c ≤ c_max} S(m,n;c)/c · J_{k−1}(4π√(mn)/c).
pub fn petersson_rhs(k: u32, m: u64, n: u64, c_max: u64) -> Result<RhsValue> {
    rhs_with(k, m, n, c_max, &|c| crate::specfun::kloosterman(m as i64, n as i64, c))
}

/// As `petersson_rhs`, reading Kloosterman sums from a grid where possible.
pub fn petersson_rhs_grid(k: u32, m: u64, n: u64, c_max: u64, grid: &KloostermanGrid) -> Result<RhsValue> {
    rhs_with(k, m, n, c_max, &|c| match grid.get(m, n, c) {
        Some(v) => Ok(v),
        None => crate::specfun::kloosterman(m as i64, n as i64, c),
    })
}

/// c_max = ceil(200·4π√(mn)/k) + 50.
pub fn default_c_max(k: u32, m: u64, n: u64) -> u64 {
    libm::ceil(200.0 * 4.0 * PI * libm::sqrt((m * n) as f64) / k as f64) as u64 + 50
}

/// Both sides of the trace formula at (m, n).
pub fn trace_check(basis: &EigenBasis, m: u64, n: u64, c_max: u64) -> Result<TraceCheckReport> {
    let lhs = petersson_lhs(basis, m, n)?;
    let rhs = petersson_rhs(basis.weight, m, n, c_max)?;
    Ok(TraceCheckReport::new(basis.weight, m, n, lhs, rhs.value, c_max))
}

/// Bound for |D_1| = |2π Σ_c S(m,n;c)/c J_{k−1}(4π√(mn)/c)| from the Weil bound
/// and min(0.8 k^(−1/3), 0.8 x^(−1/3), (x/2)^ν/ν!), summed over all c.
pub fn offdiag_tail_bound(k: u32, m: u64, n: u64) -> Result<f64> {
    if k < 3 {
        return Err(Error::Domain("offdiag_tail_bound: k must be at least 3"));
    }
    if m == 0 || n == 0 {
        return Err(Error::Domain("offdiag_tail_bound: indices must be positive"));
    }
    let nu = k - 1;
    let a = 4.0 * PI * libm::sqrt((m * n) as f64);
    let g = libm::sqrt(gcd(m, n) as f64);
    let mut s = 0.0;
    let mut c = 1u64;
    loop {
        let x = a / c as f64;
        s += weil(m, n, c) / c as f64 * bessel_abs_bound(nu, x);
        if c as f64 > 2.0 * a {
            // Σ_{c' > c} 2√c'·g·c'^(−1)·(a/2c')^ν/ν! ≤ 2g (a/2)^ν/ν! · c^(1/2−ν)/(ν−1/2)
            let nuf = nu as f64;
            let tail = 2.0 * g * bessel_decay_bound(nu, a) * libm::pow(c as f64, 0.5 - nuf) / (nuf - 0.5);
            if tail < 1e-3 * s || tail < 1e-30 {
                s += tail;
                break;
            }
        }
        c += 1;
        if c > 100_000_000 {
            return Err(Error::Numerical("offdiag_tail_bound: c-sum did not settle".into()));
        }
    }
    Ok(2.0 * PI * s)
}

/// A value of M_f(r) or one of its parts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MfValue {
    pub value: f64,
    /// Retained terms satisfy m n² ≤ x_max.
    pub x_max: u64,
    /// Largest c touched in the off-diagonal part (0 when none).
    pub c_max: u64,
    pub error_estimate: f64,
}

/// W table and A_f coefficients shared by M_f(r) and its two parts.
#[derive(Debug, Clone)]
pub struct MfSetup {
    pub k: u32,
    pub central: CentralSetup,
    sym: SymSquareCoeffs,
}

fn check_f(f: &HeckeEigenform, params: &WeightFnParams) -> Result<u32> {
    let k = f.weight - 1;
    if k % 2 == 0 || params.k != k {
        return Err(Error::Domain("M_f: need f of weight k + 1 and W built for k"));
    }
    Ok(k)
}

impl MfSetup {
    pub fn new(f: &HeckeEigenform, params: &WeightFnParams) -> Result<Self> {
        let k = check_f(f, params)?;
        let central = CentralSetup::new(params)?;
        let sym = SymSquareCoeffs::new(f, central.required_bound())?;
        Ok(MfSetup { k, central, sym })
    }

    fn check_r(&self, r: u64) -> Result<()> {
        if r == 0 {
            return Err(Error::Domain("M_f: r must be positive"));
        }
        if r > self.central.x_max {
            return Err(Error::Domain("M_f: r beyond the W cutoff"));
        }
        Ok(())
    }

    /// (12/(2k−1)) Σ_g λ_g(r) L(1/2, sym²f × g)/L(1, sym²g).
    pub fn full(&self, r: u64, basis_2k: &EigenBasis) -> Result<MfValue> {
        self.check_r(r)?;
        if basis_2k.weight != 2 * self.k {
            return Err(Error::Domain("M_f: basis must have weight 2k"));
        }
        let b = self.central.required_bound().max(r as usize);
        let mut s = 0.0;
        let mut err = 0.0;
        for g in &basis_2k.forms {
            let lam = g.lambda_table(b)?;
            let c = self.central.evaluate(&self.sym, &lam, true)?;
            let l1 = l_sym2_fe(g)?;
            let t = lam[r as usize] * c.value / l1.value;
            s += t;
            err += lam[r as usize].abs() * c.error_estimate / l1.value + t.abs() * l1.error_estimate / l1.value;
        }
        let scale = 12.0 / (2.0 * self.k as f64 - 1.0);
        Ok(MfValue {
            value: scale * s,
            x_max: self.central.x_max,
            c_max: 0,
            error_estimate: scale * err,
        })
    }

    /// (2/ζ(2)) Σ_n A_f(n, r) r^(−1/2) n^(−1) W(r n²).
    pub fn diagonal(&self, r: u64) -> Result<MfValue> {
        self.check_r(r)?;
        let x = self.central.x_max;
        let mut s = 0.0;
        let mut n = 1u64;
        while r * n * n <= x {
            s += self.sym.get(n as usize, r as usize) / n as f64 * self.central.w((r * n * n) as usize);
            n += 1;
        }
        Ok(MfValue {
            value: 2.0 / ZETA2 * s / libm::sqrt(r as f64),
            x_max: x,
            c_max: 0,
            error_estimate: 2.0 / ZETA2 * self.central.tail_bound,
        })
    }

    /// Argument below which J_{2k−1} is under the skip threshold.
    fn bessel_threshold(&self) -> f64 {
        let nu = (2 * self.k - 1) as f64;
        2.0 * libm::exp((libm::log(SKIP) + libm::lgamma(nu + 1.0)) / nu)
    }

    /// Largest c retained for the Kloosterman variable m.
    pub fn c_cut(&self, m: u64, r: u64, c_max: Option<u64>) -> u64 {
        let c = libm::floor(4.0 * PI * libm::sqrt((m * r) as f64) / self.bessel_threshold()) as u64;
        match c_max {
            Some(cm) => c.min(cm),
            None => c,
        }
    }

    /// (4π(−1)^k/ζ(2)) Σ_{m,n} A_f(n, m) m^(−1/2) n^(−1) W(m n²)
    ///   · Σ_c S(m, r; c)/c · J_{2k−1}(4π√(mr)/c).
    pub fn offdiag(&self, r: u64, c_max: Option<u64>) -> Result<MfValue> {
        self.check_r(r)?;
        let x = self.central.x_max;
        let nu = 2 * self.k - 1;
        let thr = self.bessel_threshold();
        // B(m) for every Kloosterman variable m ≤ x
        let mut bsum = vec![0.0; x as usize + 1];
        let c_top = self.c_cut(x, r, c_max);
        for c in 1..=c_top {
            let cf = c as f64;
            let lo = libm::ceil(libm::pow(cf * thr / (4.0 * PI), 2.0) / r as f64).max(1.0) as u64;
            if lo > x {
                break;
            }
            let row = KloostermanTable::new(c).row(r);
            for m in lo..=x {
                let s = row[(m % c) as usize];
                if s == 0.0 {
                    continue;
                }
                let arg = 4.0 * PI * libm::sqrt((m * r) as f64) / cf;
                bsum[m as usize] += s / cf * bessel_j(nu, arg)?;
            }
        }
        let mut s = 0.0;
        for (m, b) in bsum.iter().enumerate().skip(1) {
            if *b == 0.0 {
                continue;
            }
            let mu = m as u64;
            let mut inner = 0.0;
            let mut n = 1u64;
            while mu * n * n <= x {
                inner += self.sym.get(n as usize, m) / n as f64 * self.central.w((mu * n * n) as usize);
                n += 1;
            }
            s += b * inner / libm::sqrt(m as f64);
        }
        let sign = if self.k % 2 == 0 { 1.0 } else { -1.0 };
        Ok(MfValue {
            value: sign * 4.0 * PI / ZETA2 * s,
            x_max: x,
            c_max: c_top,
            error_estimate: 4.0 * PI / ZETA2 * self.central.tail_bound,
        })
    }
}

/// M_f(r) as a finite sum over B_{2k}.
pub fn m_f(r: u64, f: &HeckeEigenform, basis_2k: &EigenBasis, params: &WeightFnParams) -> Result<MfValue> {
    MfSetup::new(f, params)?.full(r, basis_2k)
}

pub fn m_f_diagonal(r: u64, f: &HeckeEigenform, params: &WeightFnParams) -> Result<MfValue> {
    MfSetup::new(f, params)?.diagonal(r)
}

pub fn m_f_offdiag(r: u64, f: &HeckeEigenform, params: &WeightFnParams, c_max: Option<u64>) -> Result<MfValue> {
    MfSetup::new(f, params)?.offdiag(r, c_max)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlannerConfig {
    pub eps: f64,
    /// Constant in C ≤ c_const·√(Mr)/k.
    pub c_const: f64,
    /// Constant in M ≤ m_const·k^(2+ε)/n².
    pub m_const: f64,
}

impl Default for PlannerConfig {
    fn default() -> Self {
        PlannerConfig {
            eps: 0.1,
            c_const: 100.0,
            m_const: 100.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TruncationPlan {
    pub k: u32,
    pub r: u64,
    pub n: u64,
    /// Admissible M range [m_lo, m_hi]; m_lo from C ≥ 1, m_hi from the W cutoff.
    pub m_lo: f64,
    pub m_hi: f64,
    /// Largest c, reached at M = m_hi; c·n ≤ c_const·m_const^(1/2)·√r·k^(ε/2).
    pub c_hi: f64,
    pub c_const: f64,
    /// Dyadic boxes (M, C) with M = 2^i, C = 2^j covering the admissible set.
    pub boxes: Vec<(f64, f64)>,
}

impl TruncationPlan {
    pub fn is_empty(&self) -> bool {
        self.boxes.is_empty()
    }

    /// Whether the term (m, c) lies inside the planned ranges.
    pub fn covers(&self, m: u64, c: u64) -> bool {
        let mf = m as f64;
        c >= 1 && mf >= self.m_lo && mf <= self.m_hi && (c as f64) <= self.c_bound(mf)
    }

    /// C(M) = c_const·√(Mr)/k.
    pub fn c_bound(&self, m: f64) -> f64 {
        self.c_const * libm::sqrt(m * self.r as f64) / self.k as f64
    }
}

/// Dyadic (M, C) ranges for the off-diagonal part: M ≤ m_const k^(2+ε)/n²,
/// C ≤ c_const √(Mr)/k, and C ≥ 1.
pub fn truncation_planner(k: u32, r: u64, n: u64, cfg: &PlannerConfig) -> Result<TruncationPlan> {
    if k == 0 || r == 0 || n == 0 {
        return Err(Error::Domain("truncation_planner: k, r, n must be positive"));
    }
    if !(cfg.eps > 0.0) || !(cfg.c_const > 0.0) || !(cfg.m_const > 0.0) {
        return Err(Error::Domain("truncation_planner: constants must be positive"));
    }
    let kf = k as f64;
    let rf = r as f64;
    let m_hi = cfg.m_const * libm::pow(kf, 2.0 + cfg.eps) / (n * n) as f64;
    let m_lo = kf * kf / (cfg.c_const * cfg.c_const * rf);
    let c_of = |m: f64| cfg.c_const * libm::sqrt(m * rf) / kf;
    let c_hi = c_of(m_hi);
    let mut boxes = Vec::new();
    if m_hi >= m_lo && c_hi >= 1.0 {
        let mut mm = 1.0;
        while mm <= m_hi {
            if 2.0 * mm > m_lo {
                let top = c_of((2.0 * mm).min(m_hi));
                let mut cc = 1.0;
                while cc <= top {
                    boxes.push((mm, cc));
                    cc *= 2.0;
                }
            }
            mm *= 2.0;
        }
    }
    Ok(TruncationPlan {
        k,
        r,
        n,
        m_lo,
        m_hi,
        c_hi,
        c_const: cfg.c_const,
        boxes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extend::extend_basis;
    use crate::qseries::{default_precision, hecke_eigenbasis};

    fn basis(w: u32) -> EigenBasis {
        hecke_eigenbasis(w, default_precision(w)).unwrap()
    }

    #[test]
    fn delta_sides_agree() {
        let b = basis(12);
        assert!(petersson_lhs(&basis(14), 1, 1).unwrap() == 0.0);
        let l = petersson_lhs(&b, 1, 1).unwrap();
        assert!((l - 2.0 * PI * PI / 11.0 / 0.631792945727560).abs() < 1e-11);
        let r30 = petersson_rhs(12, 1, 1, 30).unwrap();
        let r60 = petersson_rhs(12, 1, 1, 60).unwrap();
        assert!((r30.value - l).abs() < 1e-10, "{} vs {l}", r30.value);
        assert!((r30.value - r60.value).abs() < 1e-12);
        assert!(!r30.non_real);
        let f = &b.forms[0];
        let l23 = petersson_lhs(&b, 2, 3).unwrap();
        assert!((l23 - l * f.lambda(2) * f.lambda(3)).abs() < 1e-13);
        let r12 = petersson_rhs(12, 1, 2, default_c_max(12, 1, 2)).unwrap();
        assert!(r12.value.abs() <= offdiag_tail_bound(12, 1, 2).unwrap());
    }

    #[test]
    fn empty_space_rhs_vanishes() {
        let r = petersson_rhs(14, 1, 1, 100_000).unwrap();
        assert!(r.value.abs() < 1e-10, "{}", r.value);
        let r = petersson_rhs(14, 3, 7, default_c_max(14, 3, 7)).unwrap();
        assert!(r.value.abs() < 1e-10);
    }

    #[test]
    fn odd_weight_is_flagged() {
        let r = petersson_rhs(13, 1, 1, 50).unwrap();
        assert!(r.non_real && r.value >= 1.0);
    }

    #[test]
    fn grid_matches_direct() {
        let g = KloostermanGrid::new(5, 5, 80);
        for (m, n) in [(1, 1), (2, 5), (4, 4)] {
            let a = petersson_rhs(16, m, n, 80).unwrap();
            let b = petersson_rhs_grid(16, m, n, 80, &g).unwrap();
            assert!((a.value - b.value).abs() < 1e-13);
        }
    }

    #[test]
    fn tail_bound_dominates() {
        assert!(offdiag_tail_bound(40, 1, 1).unwrap() < 0.01);
        assert!(offdiag_tail_bound(2, 1, 1).is_err());
        for k in (12..=42).step_by(2) {
            for m in 1..=10 {
                for n in 1..=10 {
                    let r = petersson_rhs(k, m, n, default_c_max(k, m, n)).unwrap();
                    let d = if m == n { 1.0 } else { 0.0 };
                    let b = offdiag_tail_bound(k, m, n).unwrap();
                    assert!((r.value - d).abs() <= b, "k={k} ({m},{n})");
                }
            }
        }
    }

    #[test]
    fn planner_examples() {
        let cfg = PlannerConfig::default();
        let p = truncation_planner(11, 4, 1, &cfg).unwrap();
        assert!((p.m_lo - 121.0 / 4.0 / 1e4).abs() < 1e-12);
        assert!((p.m_hi / 100.0 - libm::pow(121.0, 1.05)).abs() < 1e-9);
        assert!(!p.is_empty());
        let bare = PlannerConfig {
            c_const: 1.0,
            m_const: 1.0,
            ..cfg
        };
        let k = 1000u32;
        let edge = libm::pow(k as f64, 0.05);
        assert!(!truncation_planner(k, 1, libm::floor(edge) as u64, &bare).unwrap().is_empty());
        assert!(truncation_planner(k, 1, libm::floor(edge) as u64 + 1, &bare).unwrap().is_empty());
        assert!(truncation_planner(11, 0, 1, &cfg).is_err());
    }

    #[test]
    fn mf_parts_add_up() {
        let mut f = basis(12);
        let mut g = basis(22);
        let p = WeightFnParams::new(11);
        let bound = CentralSetup::new(&p).unwrap().required_bound() as u64;
        extend_basis(&mut f, bound).unwrap();
        extend_basis(&mut g, bound).unwrap();
        let setup = MfSetup::new(&f.forms[0], &p).unwrap();
        let full = setup.full(1, &g).unwrap();
        let d = setup.diagonal(1).unwrap();
        let o = setup.offdiag(1, None).unwrap();
        assert!((full.value - d.value - o.value).abs() < 1e-8, "{} {} {}", full.value, d.value, o.value);
        assert!(setup.offdiag(0, None).is_err());
        let plan = truncation_planner(11, 1, 1, &PlannerConfig::default()).unwrap();
        assert!(plan.m_hi >= setup.central.x_max as f64, "{} {}", plan.m_hi, setup.central.x_max);
        for m in 1..=setup.central.x_max {
            assert!(plan.covers(m, setup.c_cut(m, 1, None).max(1)));
        }
    }
}
