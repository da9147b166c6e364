//! L-values: symmetric-square coefficients, L(s, g) for 1 < s ≤ 3, L(1, sym²f)
//! and the central value L(1/2, sym²f × g).

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

use crate::arith::{factorize, gcd};
use crate::qseries::HeckeEigenform;
use crate::specfun::{self, loggamma, MellinKernel, WeightFnParams};
use crate::{Error, Result};

const LN_2PI: f64 = 1.837_877_066_409_345_5;
const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    /// Approximate functional equation with two test functions compared.
    FunctionalEquation,
    /// Σ A(n,1)/n · e^(−n/X) at scales X and 4X.
    SmoothedSeries,
    /// Plain partial sum with a divisor-function tail bound.
    DirectSeries,
    /// The displayed double sum with the weight W.
    CentralAfe,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Truncation {
    pub n_max: u64,
    pub m_max: u64,
    pub contour_height: f64,
    pub scale: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LValueResult {
    pub value: f64,
    pub truncation: Truncation,
    pub error_estimate: f64,
    pub method: Method,
    pub flagged: bool,
}

/// A_f(r, 1) = Σ_{ab² = r} λ_f(a²) for r up to a bound, and A_f(m, n) from it.
#[derive(Debug, Clone, PartialEq)]
pub struct SymSquareCoeffs {
    pub weight: u32,
    pub label: usize,
    a1: Vec<f64>,
}

impl SymSquareCoeffs {
    pub fn new(f: &HeckeEigenform, bound: usize) -> Result<Self> {
        let sq = f.lambda_square_table(bound)?;
        let mut a1 = vec![0.0; bound + 1];
        let mut b = 1;
        while b * b <= bound {
            let b2 = b * b;
            for a in 1..=bound / b2 {
                a1[a * b2] += sq[a];
            }
            b += 1;
        }
        Ok(SymSquareCoeffs {
            weight: f.weight,
            label: f.label,
            a1,
        })
    }

    pub fn bound(&self) -> usize {
        self.a1.len() - 1
    }

    /// A_f(r, 1).
    pub fn a1(&self, r: usize) -> f64 {
        self.a1[r]
    }

    pub fn a1_table(&self) -> &[f64] {
        &self.a1
    }

    /// A_f(m, n) = Σ_{d | (m,n)} μ(d) A_f(m/d, 1) A_f(n/d, 1).
    pub fn get(&self, m: usize, n: usize) -> f64 {
        let g = gcd(m as u64, n as u64);
        if g == 1 {
            return self.a1[m] * self.a1[n];
        }
        let ps: Vec<u64> = factorize(g).into_iter().map(|(p, _)| p).collect();
        let mut s = 0.0;
        for mask in 0u32..(1 << ps.len()) {
            let mut d = 1usize;
            for (i, p) in ps.iter().enumerate() {
                if mask & (1 << i) != 0 {
                    d *= *p as usize;
                }
            }
            let sign = if mask.count_ones() % 2 == 0 { 1.0 } else { -1.0 };
            s += sign * self.a1[m / d] * self.a1[n / d];
        }
        s
    }

    pub fn try_get(&self, m: usize, n: usize) -> Result<f64> {
        if m == 0 || n == 0 {
            return Err(Error::Domain("sym_square_coeff: indices must be positive"));
        }
        if m.max(n) > self.bound() {
            return Err(Error::InsufficientPrecision {
                needed: m.max(n) as u64,
                available: self.bound() as u64,
            });
        }
        Ok(self.get(m, n))
    }
}

/// A_f(m, n) straight from the definition.
pub fn sym_square_coeff(f: &HeckeEigenform, m: u64, n: u64) -> Result<f64> {
    if m == 0 || n == 0 {
        return Err(Error::Domain("sym_square_coeff: indices must be positive"));
    }
    let a1 = |r: u64| -> Result<f64> {
        let mut s = 0.0;
        let mut b = 1;
        while b * b <= r {
            if r % (b * b) == 0 {
                let a = r / (b * b);
                s += f.try_lambda(a * a)?;
            }
            b += 1;
        }
        Ok(s)
    };
    let g = gcd(m, n);
    let mut s = 0.0;
    for d in crate::arith::divisors(g) {
        let mu = crate::arith::mobius(d)?;
        if mu != 0 {
            s += mu as f64 * a1(m / d)? * a1(n / d)?;
        }
    }
    Ok(s)
}

/// Kernels for L(s0) = Σ a_n n^(−s0) V1(n) + ε Σ a_n n^(s0−1) V2(n), test function e^(c·w²).
struct AfeKernels {
    v1: MellinKernel,
    v2: MellinKernel,
    /// (σ', sup-bound of |V1| x^σ', same for V2) on shifted lines
    shifted: Vec<(f64, f64, f64)>,
}

fn afe_kernels(
    log_gamma: &dyn Fn(Complex64) -> Result<Complex64>,
    s0: f64,
    damp: f64,
) -> Result<AfeKernels> {
    let base = log_gamma(Complex64::new(s0, 0.0))?;
    let g1 = |w: Complex64| Ok(log_gamma(w + s0)? - base + w * w * damp - w.ln());
    let g2 = |w: Complex64| Ok(log_gamma(w + (1.0 - s0))? - base + w * w * damp - w.ln());
    let step = 0.05;
    let v1 = MellinKernel::new(1.0, step, g1)?;
    let v2 = MellinKernel::new(1.0, step, g2)?;
    let mut shifted = Vec::new();
    let mut sig = 2.0;
    while sig <= 64.0 {
        let b1 = MellinKernel::new(sig, 0.1, g1)?.abs_integral();
        let b2 = MellinKernel::new(sig, 0.1, g2)?.abs_integral();
        shifted.push((sig, b1, b2));
        sig *= 1.5;
    }
    Ok(AfeKernels { v1, v2, shifted })
}

/// Length N beyond which both halves of the AFE are below 1e−20 termwise,
/// from |V(x)| ≤ x^(−σ') (1/2π)∫|G(σ'+it)| dt.
fn afe_length(k: &AfeKernels, s0: f64) -> u64 {
    let bound = |x: f64| -> f64 {
        let lx = libm::log(x);
        let mut t1 = f64::INFINITY;
        let mut t2 = f64::INFINITY;
        for &(sig, b1, b2) in &k.shifted {
            t1 = t1.min(b1 * libm::exp((1.0 - s0 - sig) * lx));
            t2 = t2.min(b2 * libm::exp((s0 - sig) * lx));
        }
        t1.max(t2)
    };
    let mut n = 8u64;
    while bound(n as f64) >= 1e-20 && n < 1 << 26 {
        n = n * 5 / 4 + 1;
    }
    n
}

fn afe_sum(k: &AfeKernels, s0: f64, eps: f64, coeffs: &[f64], n_max: u64) -> f64 {
    let mut s = 0.0;
    for n in 1..=n_max {
        let a = coeffs[n as usize];
        if a == 0.0 {
            continue;
        }
        let x = n as f64;
        s += a * (libm::pow(x, -s0) * k.v1.value(x) + eps * libm::pow(x, s0 - 1.0) * k.v2.value(x));
    }
    s
}

fn afe_value(
    log_gamma: &dyn Fn(Complex64) -> Result<Complex64>,
    s0: f64,
    eps: f64,
    coeffs: &dyn Fn(usize) -> Result<Vec<f64>>,
) -> Result<LValueResult> {
    let ka = afe_kernels(log_gamma, s0, 0.0)?;
    let kb = afe_kernels(log_gamma, s0, 1.0 / 64.0)?;
    let n_max = afe_length(&ka, s0).max(afe_length(&kb, s0));
    let c = coeffs(n_max as usize)?;
    let va = afe_sum(&ka, s0, eps, &c, n_max);
    let vb = afe_sum(&kb, s0, eps, &c, n_max);
    let err = (va - vb).abs() + 1e-15 * va.abs();
    Ok(LValueResult {
        value: va,
        truncation: Truncation {
            n_max,
            m_max: 0,
            contour_height: ka.v1.height.max(ka.v2.height),
            scale: 0.0,
        },
        error_estimate: err,
        method: Method::FunctionalEquation,
        flagged: err > 1e-8,
    })
}

/// log γ(s) for L(s, sym²f): Γ_R(s+1) Γ_C(s+k−1).
fn log_gamma_sym2(k: u32) -> impl Fn(Complex64) -> Result<Complex64> {
    move |s: Complex64| {
        let lnpi = libm::log(PI);
        Ok(-(s + 1.0) * (0.5 * lnpi)
            + loggamma((s + 1.0) * 0.5)?
            + core::f64::consts::LN_2
            - (s + (k as f64 - 1.0)) * LN_2PI
            + loggamma(s + (k as f64 - 1.0))?)
    }
}

/// log γ(s) for L(s, g): (2π)^(−s) Γ(s + (κ−1)/2).
fn log_gamma_g(kappa: u32) -> impl Fn(Complex64) -> Result<Complex64> {
    move |s: Complex64| Ok(-s * LN_2PI + loggamma(s + (kappa as f64 - 1.0) / 2.0)?)
}

/// L(1, sym²f) from the functional equation of Λ(s) = Γ_R(s+1)Γ_C(s+k−1)L(s, sym²f).
pub fn l_sym2_fe(f: &HeckeEigenform) -> Result<LValueResult> {
    let lg = log_gamma_sym2(f.weight);
    let coeffs = |n: usize| -> Result<Vec<f64>> { Ok(SymSquareCoeffs::new(f, n)?.a1) };
    let r = afe_value(&lg, 1.0, 1.0, &coeffs)?;
    if !(r.value > 0.0) {
        return Err(Error::Numerical(alloc::format!("L(1, sym^2 f) = {} is not positive", r.value)));
    }
    Ok(r)
}

/// L(s, g) for 1 < s ≤ 3 from the functional equation (root number i^κ).
pub fn l_g_special(g: &HeckeEigenform, s: f64) -> Result<LValueResult> {
    if !(s > 1.0) || s > 3.0 {
        return Err(Error::Domain("l_g_special: s must lie in (1, 3]"));
    }
    let kappa = g.weight;
    let eps = if kappa % 4 == 0 { 1.0 } else { -1.0 };
    let lg = log_gamma_g(kappa);
    let coeffs = |n: usize| -> Result<Vec<f64>> { g.lambda_table(n) };
    afe_value(&lg, s, eps, &coeffs)
}

/// Σ_{n ≤ n_max} λ_g(n) n^(−s) with the tail bound 2 Σ_{n > n_max} τ(n) n^(−s).
pub fn l_g_direct(g: &HeckeEigenform, s: f64, n_max: u64) -> Result<LValueResult> {
    if !(s > 1.0) {
        return Err(Error::Domain("l_g_direct: s must exceed 1"));
    }
    let t = g.lambda_table(n_max as usize)?;
    let mut v = 0.0;
    for (n, l) in t.iter().enumerate().skip(1) {
        v += l * libm::pow(n as f64, -s);
    }
    let err = 2.0 * divisor_tail(n_max as f64, s);
    Ok(LValueResult {
        value: v,
        truncation: Truncation {
            n_max,
            ..Default::default()
        },
        error_estimate: err,
        method: Method::DirectSeries,
        flagged: err > 1e-8,
    })
}

/// Upper bound for Σ_{n > N} τ(n) n^(−s), s > 1, N ≥ 1.
pub fn divisor_tail(n: f64, s: f64) -> f64 {
    let a = s - 1.0;
    let ln = libm::log(n);
    libm::pow(n, -a) * ((ln + 2.0 * EULER_GAMMA) / a + 1.0 / (a * a))
        + 4.0 * libm::pow(n, 0.5 - s) * s / (s - 0.5)
}

/// Σ_{r ≤ T} A_f(r,1)/r · e^(−r/X) with T = 40X.
pub fn smoothed_sym2(f: &HeckeEigenform, x: f64) -> Result<(f64, u64)> {
    let t = libm::ceil(40.0 * x) as usize;
    let a = SymSquareCoeffs::new(f, t)?;
    let mut s = 0.0;
    for (r, v) in a.a1.iter().enumerate().skip(1).rev() {
        s += v / r as f64 * libm::exp(-(r as f64) / x);
    }
    Ok((s, t as u64))
}

/// The smoothed series at X with |S(4X) − S(X)| as error estimate; flagged above 1e−4.
pub fn l_sym2_at_1(f: &HeckeEigenform, x: f64) -> Result<LValueResult> {
    if !(x >= 10.0) {
        return Err(Error::Domain("l_sym2_at_1: smoothing scale must be at least 10"));
    }
    let (v, n1) = smoothed_sym2(f, x)?;
    let (v4, _) = smoothed_sym2(f, 4.0 * x)?;
    let err = (v4 - v).abs();
    Ok(LValueResult {
        value: v,
        truncation: Truncation {
            n_max: n1,
            scale: x,
            ..Default::default()
        },
        error_estimate: err,
        method: Method::SmoothedSeries,
        flagged: err > 1e-4,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DirichletApprox {
    pub scale: f64,
    pub value: f64,
    pub reference: f64,
    pub defect: f64,
}

/// The lemma's smoothed series at an explicit scale X against a reference L(1, sym²f).
pub fn dirichlet_poly_at_scale(f: &HeckeEigenform, x: f64, reference: f64) -> Result<DirichletApprox> {
    if !(x > 0.0) {
        return Err(Error::Domain("dirichlet_poly: scale must be positive"));
    }
    let (value, _) = smoothed_sym2(f, x)?;
    Ok(DirichletApprox {
        scale: x,
        value,
        reference,
        defect: (value - reference).abs(),
    })
}

/// Scale k^δ1 with f ∈ B_{k+1}; the reference is L(1, sym²f) from the functional equation.
pub fn dirichlet_poly_approx(f: &HeckeEigenform, delta1: f64, k: u32) -> Result<DirichletApprox> {
    if k + 1 != f.weight {
        return Err(Error::Domain("dirichlet_poly_approx: need f of weight k + 1"));
    }
    if !(delta1 > 0.0) {
        return Err(Error::Domain("dirichlet_poly_approx: delta1 must be positive"));
    }
    let reference = l_sym2_fe(f)?.value;
    dirichlet_poly_at_scale(f, libm::pow(k as f64, delta1), reference)
}

/// W tabulated on the integers with the tail bound used to pick the cutoff.
#[derive(Debug, Clone)]
pub struct CentralSetup {
    pub k: u32,
    pub params: WeightFnParams,
    /// Retained terms satisfy n m² ≤ x_max.
    pub x_max: u64,
    pub tail_bound: f64,
    pub contour_height: f64,
    w: Vec<f64>,
    w_error: f64,
}

fn zeta_factor() -> Result<f64> {
    let z = specfun::zeta_real(1.5)?;
    let z3 = specfun::zeta_real(3.0)?;
    Ok(libm::pow(z, 6.0) * libm::pow(z3, 3.0))
}

/// Rigorous-style bound for Σ_{n m² > X} |λ_g(n) A_f(m,n) W(nm²)| n^(−1/2) m^(−1).
///
/// Uses |W(x)| ≤ x^(−σ′) I(σ′), |λ_g(n)| ≤ τ(n), |A(m,n)| ≤ τ_3(m)τ_3(n) and
/// Rankin's trick at exponent 1.
pub fn central_tail_bound(k: u32, params: &WeightFnParams, x: f64) -> Result<f64> {
    let zf = zeta_factor()?;
    let mut best = f64::INFINITY;
    let top = (5.0 * params.a) as u32;
    for sp in 2..top {
        let p = WeightFnParams {
            sigma: sp as f64,
            ..*params
        };
        let kern = MellinKernel::new(p.sigma, p.quadrature_step, |s| {
            specfun::weight_log_integrand(s, &WeightFnParams { k, ..p })
        })?;
        let b = kern.abs_integral() * libm::pow(x, 1.0 - sp as f64) * zf;
        best = best.min(b);
    }
    Ok(best)
}

impl CentralSetup {
    /// Cutoff X = c·k² with c = 40, 80, ... until the tail bound is below 1e−8.
    pub fn new(params: &WeightFnParams) -> Result<Self> {
        params.validate()?;
        let k = params.k;
        let k2 = (k as f64) * (k as f64);
        let mut c = 40.0;
        let (x_max, tail) = loop {
            let x = libm::floor(c * k2);
            let t = central_tail_bound(k, params, x)?;
            if t < 1e-8 {
                break (x as u64, t);
            }
            c *= 2.0;
            if c > 1e6 {
                return Err(Error::Numerical("central value cutoff does not converge".into()));
            }
        };
        Self::build(params, x_max, tail)
    }

    /// Fixed cutoff n m² ≤ x_max.
    pub fn with_cutoff(params: &WeightFnParams, x_max: u64) -> Result<Self> {
        params.validate()?;
        if x_max == 0 {
            return Err(Error::Domain("central value cutoff must be positive"));
        }
        let tail = central_tail_bound(params.k, params, x_max as f64)?;
        Self::build(params, x_max, tail)
    }

    fn build(params: &WeightFnParams, x_max: u64, tail: f64) -> Result<Self> {
        let kern = specfun::weight_kernel(params)?;
        let mut w = vec![0.0; 2 * x_max as usize + 1];
        let mut w_error = 0.0f64;
        for (x, slot) in w.iter_mut().enumerate().skip(1) {
            let q = kern.eval(x as f64);
            *slot = q.value;
            w_error = w_error.max(q.error);
        }
        Ok(CentralSetup {
            k: params.k,
            params: *params,
            x_max,
            tail_bound: tail,
            contour_height: kern.height,
            w,
            w_error,
        })
    }

    /// Largest index of λ_g and A_f(·,1) touched (the doubled cutoff).
    pub fn required_bound(&self) -> usize {
        2 * self.x_max as usize
    }

    pub fn w(&self, x: usize) -> f64 {
        self.w[x]
    }

    /// Central value from precomputed coefficient tables; `n_first` picks the loop order.
    pub fn evaluate(&self, sym: &SymSquareCoeffs, lam_g: &[f64], n_first: bool) -> Result<LValueResult> {
        let x2 = self.required_bound();
        if sym.bound() < x2 || lam_g.len() <= x2 {
            return Err(Error::InsufficientPrecision {
                needed: x2 as u64,
                available: sym.bound().min(lam_g.len().saturating_sub(1)) as u64,
            });
        }
        let x1 = self.x_max as usize;
        let (mut s1, mut s2, mut abs) = (0.0, 0.0, 0.0);
        let mut term = |n: usize, m: usize| {
            let x = n * m * m;
            let t = lam_g[n] * sym.get(m, n) / (libm::sqrt(n as f64) * m as f64) * self.w[x];
            s2 += t;
            if x <= x1 {
                s1 += t;
                abs += t.abs() / self.w[x].abs().max(1e-300);
            }
        };
        if n_first {
            let mut m = 1;
            while m * m <= x2 {
                for n in 1..=x2 / (m * m) {
                    term(n, m);
                }
                m += 1;
            }
        } else {
            for n in 1..=x2 {
                let mut m = 1;
                while n * m * m <= x2 {
                    term(n, m);
                    m += 1;
                }
            }
        }
        let (v1, v2) = (2.0 * s1, 2.0 * s2);
        let err = 2.0 * self.tail_bound + 2.0 * abs * self.w_error;
        Ok(LValueResult {
            value: v1,
            truncation: Truncation {
                n_max: self.x_max,
                m_max: crate::arith::isqrt(self.x_max),
                contour_height: self.contour_height,
                scale: self.x_max as f64 / (self.k as f64 * self.k as f64),
            },
            error_estimate: err,
            method: Method::CentralAfe,
            flagged: (v2 - v1).abs() > 1e-5 || self.w_error > 1e-8,
        })
    }
}

fn check_pair(f: &HeckeEigenform, g: &HeckeEigenform) -> Result<u32> {
    if g.weight % 2 != 0 || f.weight != g.weight / 2 + 1 {
        return Err(Error::Domain("l_central: need f of weight k+1 and g of weight 2k"));
    }
    Ok(g.weight / 2)
}

/// L(1/2, sym²f × g) = 2 Σ λ_g(n) A_f(m,n) n^(−1/2) m^(−1) W(nm²).
pub fn l_central(f: &HeckeEigenform, g: &HeckeEigenform, params: &WeightFnParams) -> Result<LValueResult> {
    let k = check_pair(f, g)?;
    if params.k != k {
        return Err(Error::Domain("l_central: W parameters built for another k"));
    }
    let setup = CentralSetup::new(params)?;
    let b = setup.required_bound();
    let sym = SymSquareCoeffs::new(f, b)?;
    let lam = g.lambda_table(b)?;
    setup.evaluate(&sym, &lam, true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extend::extend_basis;
    use crate::qseries::{hecke_eigenbasis, EigenBasis};

    fn basis(w: u32, bound: u64) -> EigenBasis {
        let mut b = hecke_eigenbasis(w, crate::qseries::default_precision(w)).unwrap();
        extend_basis(&mut b, bound).unwrap();
        b
    }

    #[test]
    fn sym2_coefficients() {
        let b = basis(12, 60);
        let f = &b.forms[0];
        let s = SymSquareCoeffs::new(f, 50).unwrap();
        assert_eq!(s.get(1, 1), 1.0);
        assert!((s.get(2, 1) - f.lambda(4)).abs() < 1e-14);
        assert!((s.get(4, 1) - f.lambda(16) - 1.0).abs() < 1e-14);
        for m in 1..=20u64 {
            for n in 1..=20u64 {
                let d = sym_square_coeff(f, m, n).unwrap();
                assert!((d - s.get(m as usize, n as usize)).abs() < 1e-12);
            }
        }
        assert!(sym_square_coeff(f, 0, 1).is_err());
    }

    #[test]
    fn fe_values_match_oracle() {
        // independent AFE on Re w = 1.5 with G = 1
        let cases: [(u32, &[(f64, f64)]); 4] = [
            (12, &[(0.877354125388836, 0.631792945727560)]),
            (22, &[(0.641764737779191, 0.940990211916471)]),
            (24, &[(0.878052951285542, 1.575535344801582), (1.802414352777458, 1.884636759030735)]),
            (42, &[
                (0.457384339559610, 3.143418225865418),
                (0.918839242423515, 0.735370770760801),
                (1.219865771005893, 2.505631387582807),
            ]),
        ];
        for (w, want) in cases {
            let b = basis(w, 2000);
            for (f, (l32, ls2)) in b.forms.iter().zip(want.iter()) {
                let a = l_g_special(f, 1.5).unwrap();
                let s = l_sym2_fe(f).unwrap();
                assert!((a.value - l32).abs() < 1e-10, "w={w}: {} vs {l32}", a.value);
                assert!((s.value - ls2).abs() < 1e-10, "w={w}: {} vs {ls2}", s.value);
                assert!(a.error_estimate < 1e-10 && s.error_estimate < 1e-10);
            }
        }
    }

    #[test]
    fn direct_series_bracket() {
        let b = basis(22, 2000);
        let r = l_g_direct(&b.forms[0], 3.0, 2000).unwrap();
        assert!(r.value > 0.3 && r.value < 1.7);
        let afe = l_g_special(&b.forms[0], 3.0).unwrap();
        assert!((r.value - afe.value).abs() <= r.error_estimate);
        assert!(l_g_special(&b.forms[0], 1.0).is_err());
    }

    #[test]
    fn central_value_delta() {
        let b12 = basis(12, 20_000);
        let b22 = basis(22, 20_000);
        let p = WeightFnParams::new(11);
        let r = l_central(&b12.forms[0], &b22.forms[0], &p).unwrap();
        assert!((r.value - 0.70152373050).abs() < 1e-9, "{}", r.value);
        assert!(!r.flagged);
        let setup = CentralSetup::new(&p).unwrap();
        let sym = SymSquareCoeffs::new(&b12.forms[0], setup.required_bound()).unwrap();
        let lam = b22.forms[0].lambda_table(setup.required_bound()).unwrap();
        let other = setup.evaluate(&sym, &lam, false).unwrap();
        assert!((other.value - r.value).abs() < 1e-10);
    }
}
