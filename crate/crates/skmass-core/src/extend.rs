//! Hecke eigenvalues far beyond the exact q-expansion, read off from values of
//! the form on horocycles.
//!
//! On the strip n ∈ (N/2, N] the form is sampled at z = l/M + iy with y = c0/N.
//! Each sample is pulled back into the fundamental domain where the exact
//! expansion converges fast, and an FFT of length M recovers a(n)e^(−2πny).

use std::vec::Vec;

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::arith::primes_up_to;
use crate::qseries::{EigenBasis, HeckeEigenform, PrimeTable};
use crate::{Error, Result};

const TWO_PI: f64 = 2.0 * core::f64::consts::PI;

/// Outcome of an extension run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExtensionReport {
    pub bound: u64,
    /// Largest |λ_analytic(n) − λ_exact(n)| on the validation strip.
    pub overlap_error: f64,
    /// Largest |λ(p)| over the new primes.
    pub max_prime_lambda: f64,
}

struct Sampler {
    k: u32,
    polys: Vec<Vec<f64>>,
}

impl Sampler {
    fn new(forms: &[&HeckeEigenform]) -> Result<Self> {
        let k = forms[0].weight;
        let e = (k as f64 - 1.0) / 2.0;
        // Σ_{n>Q} 2 n^(e+1/2) r^n below 1e−22 with r = e^(−π√3)
        let lr = -core::f64::consts::PI * 3f64.sqrt();
        let mut q = 8usize;
        while (2f64).ln() + (e + 0.5) * (q as f64).ln() + lr * q as f64 > -50.0 {
            q += 1;
        }
        let mut polys = Vec::with_capacity(forms.len());
        for f in forms {
            if f.precision() <= q {
                return Err(Error::InsufficientPrecision {
                    needed: q as u64 + 1,
                    available: f.precision() as u64,
                });
            }
            let coeffs = (1..=q)
                .map(|n| num_traits::ToPrimitive::to_f64(f.a(n).expect("in range")).unwrap_or(f64::NAN))
                .collect();
            polys.push(coeffs);
        }
        Ok(Sampler { k, polys })
    }

    /// F(z) for z = l/m + iy, all forms at once. The reduction starts from
    /// `gamma`, which is left holding the matrix used.
    fn sample(&self, l: i64, m: i64, y: f64, gamma: &mut [i64; 4], out: &mut [Complex64]) -> Result<()> {
        let [mut a, mut b, mut c, mut d] = *gamma;
        let mf = m as f64;
        let mut iter = 0;
        let (wr, wi, jr, ji) = loop {
            let cn = c * l + d * m;
            let an = a * l + b * m;
            let jr = cn as f64 / mf;
            let ji = c as f64 * y;
            let j2 = jr * jr + ji * ji;
            let wi = y / j2;
            let wr = ((an as f64 / mf) * jr + (a as f64) * (c as f64) * y * y) / j2;
            iter += 1;
            if iter > 10_000 {
                return Err(Error::Numerical("fundamental-domain reduction did not terminate".into()));
            }
            if wr.abs() > 0.5 + 1e-12 {
                let n = wr.round() as i64;
                a -= n * c;
                b -= n * d;
                continue;
            }
            if wr * wr + wi * wi < 1.0 - 1e-12 {
                (a, b, c, d) = (-c, -d, a, b);
                continue;
            }
            break (wr, wi, jr, ji);
        };
        *gamma = [a, b, c, d];
        let j = Complex64::new(jr, ji);
        let w = Complex64::new(wr, wi);
        let lead = Complex64::new(0.0, TWO_PI) * w - j.ln() * self.k as f64;
        let q = Complex64::new(0.0, TWO_PI * wr).exp() * (-TWO_PI * wi).exp();
        let scale = lead.exp();
        for (slot, p) in out.iter_mut().zip(self.polys.iter()) {
            let mut acc = Complex64::new(0.0, 0.0);
            for a in p.iter().rev() {
                acc = acc * q + a;
            }
            *slot = scale * acc;
        }
        Ok(())
    }
}

fn smooth_size(n: usize) -> usize {
    let mut m = n;
    loop {
        let mut r = m;
        for p in [2, 3, 5] {
            while r % p == 0 {
                r /= p;
            }
        }
        if r == 1 {
            return m;
        }
        m += 1;
    }
}

/// λ(n) for n ∈ (lo, hi] for every form (rows per form).
fn strip(sampler: &Sampler, planner: &mut FftPlanner<f64>, lo: u64, hi: u64) -> Result<Vec<Vec<f64>>> {
    let k = sampler.k as f64;
    let e = (k - 1.0) / 2.0;
    let c0 = (k / (2.0 * TWO_PI)).max(2.0);
    let y = c0 / hi as f64;
    let ratio = hi as f64 / lo as f64;
    let mut alpha = 1.0;
    while e * (1.0 + alpha * ratio).ln() - TWO_PI * alpha * c0 > -35.0 {
        alpha += 0.25;
    }
    let m = smooth_size((alpha * hi as f64).ceil() as usize + 1);
    let nf = sampler.polys.len();
    let mut bufs = vec![vec![Complex64::new(0.0, 0.0); m]; nf];
    let mut vals = vec![Complex64::new(0.0, 0.0); nf];
    let mut gamma = [1, 0, 0, 1];
    for l in 0..=m / 2 {
        sampler.sample(l as i64, m as i64, y, &mut gamma, &mut vals)?;
        for (buf, v) in bufs.iter_mut().zip(vals.iter()) {
            buf[l] = *v;
            if l != 0 && m - l != l {
                buf[m - l] = v.conj();
            }
        }
    }
    let fft = planner.plan_fft_forward(m);
    let mut out = Vec::with_capacity(nf);
    for mut buf in bufs {
        fft.process(&mut buf);
        let row = (lo + 1..=hi)
            .map(|n| {
                let nf = n as f64;
                buf[n as usize].re / m as f64 * (TWO_PI * nf * y - e * nf.ln()).exp()
            })
            .collect();
        out.push(row);
    }
    Ok(out)
}

/// Analytic λ(n) for lo < n ≤ hi for each form of a single weight.
pub fn analytic_lambdas(forms: &[&HeckeEigenform], lo: u64, hi: u64) -> Result<Vec<Vec<f64>>> {
    if forms.is_empty() || hi <= lo {
        return Ok(vec![Vec::new(); forms.len()]);
    }
    if lo == 0 {
        return Err(Error::Domain("analytic_lambdas: lo must be positive"));
    }
    // keep the FFT buffers of one batch under ~512 MB
    let per_form = 16 * 8 * hi as usize;
    let batch = ((1usize << 29) / per_form.max(1)).clamp(1, forms.len());
    let mut planner = FftPlanner::new();
    let mut rows = Vec::with_capacity(forms.len());
    for group in forms.chunks(batch) {
        let sampler = Sampler::new(group)?;
        let mut part_rows = vec![Vec::with_capacity((hi - lo) as usize); group.len()];
        let mut a = lo;
        while a < hi {
            let b = (2 * a).min(hi);
            let part = strip(&sampler, &mut planner, a, b)?;
            for (r, p) in part_rows.iter_mut().zip(part) {
                r.extend(p);
            }
            a = b;
        }
        rows.extend(part_rows);
    }
    Ok(rows)
}

/// Attach λ_f(p) for all primes p ≤ bound to every form in the basis.
pub fn extend_basis(basis: &mut EigenBasis, bound: u64) -> Result<ExtensionReport> {
    let mut report = ExtensionReport {
        bound,
        overlap_error: 0.0,
        max_prime_lambda: 0.0,
    };
    if basis.forms.is_empty() {
        return Ok(report);
    }
    let exact = basis.precision as u64 - 1;
    if bound <= exact || basis.forms.iter().all(|f| f.prime_bound() >= bound) {
        report.bound = bound.max(exact);
        return Ok(report);
    }
    let forms: Vec<&HeckeEigenform> = basis.forms.iter().collect();
    let check_lo = (exact / 2).max(1);
    let check = analytic_lambdas(&forms, check_lo, exact)?;
    for (f, row) in forms.iter().zip(check.iter()) {
        for (i, v) in row.iter().enumerate() {
            let n = check_lo + 1 + i as u64;
            report.overlap_error = report.overlap_error.max((v - f.lambda(n)).abs());
        }
    }
    if !(report.overlap_error < 1e-8) {
        return Err(Error::Numerical(format!(
            "eigenvalue extension disagrees with exact data by {:e}",
            report.overlap_error
        )));
    }
    let rows = analytic_lambdas(&forms, exact, bound)?;
    let primes: Vec<u32> = primes_up_to(bound as usize)
        .into_iter()
        .filter(|&p| p > exact)
        .map(|p| p as u32)
        .collect();
    let mut tables = Vec::with_capacity(rows.len());
    for row in rows {
        let lambdas: Vec<f64> = primes
            .iter()
            .map(|&p| row[(p as u64 - exact - 1) as usize])
            .collect();
        for v in &lambdas {
            report.max_prime_lambda = report.max_prime_lambda.max(v.abs());
        }
        tables.push(PrimeTable {
            primes: primes.clone(),
            lambdas,
            bound,
        });
    }
    if report.max_prime_lambda > 2.0 + 1e-6 {
        return Err(Error::Numerical(format!(
            "extended eigenvalue violates the Deligne bound: {}",
            report.max_prime_lambda
        )));
    }
    for (f, t) in basis.forms.iter_mut().zip(tables) {
        f.set_prime_table(t);
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qseries::hecke_eigenbasis;

    #[test]
    fn matches_exact_coefficients() {
        for w in [12u32, 24, 42] {
            let b = hecke_eigenbasis(w, 400).unwrap();
            let forms: Vec<&HeckeEigenform> = b.forms.iter().collect();
            let rows = analytic_lambdas(&forms, 60, 399).unwrap();
            for (f, row) in forms.iter().zip(rows.iter()) {
                for (i, v) in row.iter().enumerate() {
                    let n = 61 + i as u64;
                    assert!((v - f.lambda(n)).abs() < 1e-11, "w={w} n={n}: {v} vs {}", f.lambda(n));
                }
            }
        }
    }

    #[test]
    fn extended_table_is_multiplicative() {
        let mut b = hecke_eigenbasis(22, 88).unwrap();
        let rep = extend_basis(&mut b, 20_000).unwrap();
        assert!(rep.overlap_error < 1e-10);
        let f = &b.forms[0];
        let t = f.lambda_table(20_000).unwrap();
        let sampler_rows = analytic_lambdas(&[f], 10_000, 20_000).unwrap();
        for (i, v) in sampler_rows[0].iter().enumerate() {
            let n = 10_001 + i;
            assert!((v - t[n]).abs() < 1e-9, "n={n}");
        }
    }
}
