//! Exact q-expansions, Victor–Miller bases, Hecke operators and eigenbases for
//! level one.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Pow, Signed, ToPrimitive, Zero};

use crate::arith::{divisor_power_sums, factorize, gcd, spf_table};
use crate::linalg::{self, RatMatrix};
use crate::{Error, Result};

/// Fractional decimal digits kept for non-rational eigenform coefficients.
pub const CANONICAL_DIGITS: u32 = 64;

/// Bits to which T_2 eigenvalues are refined before the eigenvector solve.
const EIGEN_BITS: u32 = 640;

/// A truncated q-series with exact rational coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct QExpansion {
    pub weight: u32,
    pub coeffs: Vec<BigRational>,
}

impl QExpansion {
    pub fn new(weight: u32, coeffs: Vec<BigRational>) -> Self {
        QExpansion { weight, coeffs }
    }

    pub fn from_integers(weight: u32, coeffs: &[BigInt]) -> Self {
        QExpansion {
            weight,
            coeffs: coeffs.iter().cloned().map(BigRational::from_integer).collect(),
        }
    }

    pub fn precision(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeff(&self, n: usize) -> Option<&BigRational> {
        self.coeffs.get(n)
    }

    /// Sum of two expansions of equal weight, truncated to the shorter one.
    pub fn add(&self, other: &QExpansion) -> Result<QExpansion> {
        if self.weight != other.weight {
            return Err(Error::Domain("add: weights differ"));
        }
        let p = self.precision().min(other.precision());
        let coeffs = (0..p).map(|i| &self.coeffs[i] + &other.coeffs[i]).collect();
        Ok(QExpansion::new(self.weight, coeffs))
    }

    /// Product; weights add and precision is the minimum.
    pub fn mul(&self, other: &QExpansion) -> QExpansion {
        let p = self.precision().min(other.precision());
        let mut out = vec![BigRational::zero(); p];
        for (i, a) in self.coeffs.iter().take(p).enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().take(p - i).enumerate() {
                out[i + j] += a * b;
            }
        }
        QExpansion::new(self.weight + other.weight, out)
    }

    pub fn scale(&self, c: &BigRational) -> QExpansion {
        QExpansion::new(self.weight, self.coeffs.iter().map(|a| a * c).collect())
    }

    /// T_n applied to the expansion; the result has precision ⌊(P−1)/n⌋ + 1.
    pub fn hecke(&self, n: u64) -> Result<QExpansion> {
        if n == 0 {
            return Err(Error::Domain("hecke: n must be positive"));
        }
        let p = self.precision() as u64;
        if p == 0 {
            return Ok(self.clone());
        }
        let out_len = (p - 1) / n + 1;
        let k1 = self.weight.saturating_sub(1);
        let mut out = Vec::with_capacity(out_len as usize);
        for m in 0..out_len {
            let mut s = BigRational::zero();
            if m == 0 {
                // constant term: σ_{k−1}(n) a(0)
                if !self.coeffs[0].is_zero() {
                    let mut sig = BigInt::zero();
                    for d in crate::arith::divisors(n) {
                        sig += BigInt::from(d).pow(k1);
                    }
                    s = &self.coeffs[0] * BigRational::from_integer(sig);
                }
            } else {
                for d in crate::arith::divisors(gcd(n, m)) {
                    let idx = (m * n / (d * d)) as usize;
                    let w = BigRational::from_integer(BigInt::from(d).pow(k1));
                    s += w * &self.coeffs[idx];
                }
            }
            out.push(s);
        }
        Ok(QExpansion::new(self.weight, out))
    }
}

fn zmul(a: &[BigInt], b: &[BigInt], p: usize) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); p];
    for (i, x) in a.iter().take(p).enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().take(p - i).enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn eisenstein_int(weight: u32, precision: usize) -> Result<Vec<BigInt>> {
    let c: i64 = match weight {
        4 => 240,
        6 => -504,
        _ => return Err(Error::Domain("eisenstein_series: weight must be 4 or 6")),
    };
    let sig = divisor_power_sums(weight - 1, precision);
    let mut v: Vec<BigInt> = sig.iter().map(|&s| BigInt::from(s) * c).collect();
    if let Some(v0) = v.first_mut() {
        *v0 = BigInt::one();
    }
    Ok(v)
}

/// E_4 or E_6 to the given number of coefficients.
pub fn eisenstein_series(weight: u32, precision: usize) -> Result<QExpansion> {
    if precision == 0 {
        return Err(Error::Domain("eisenstein_series: precision must be at least 1"));
    }
    Ok(QExpansion::from_integers(weight, &eisenstein_int(weight, precision)?))
}

fn delta_int(precision: usize) -> Vec<BigInt> {
    let e4 = eisenstein_int(4, precision).expect("weight 4");
    let e6 = eisenstein_int(6, precision).expect("weight 6");
    let e4c = zmul(&zmul(&e4, &e4, precision), &e4, precision);
    let e6s = zmul(&e6, &e6, precision);
    let d = BigInt::from(1728);
    e4c.iter().zip(e6s.iter()).map(|(a, b)| (a - b) / &d).collect()
}

/// Δ = (E_4³ − E_6²)/1728.
pub fn delta(precision: usize) -> QExpansion {
    QExpansion::from_integers(12, &delta_int(precision))
}

/// dim S_k for level one.
pub fn cusp_dimension(weight: u32) -> usize {
    if weight % 2 == 1 || weight < 12 {
        return 0;
    }
    let d = (weight / 12) as usize;
    if weight % 12 == 2 {
        d - 1
    } else {
        d
    }
}

/// S_k with its Victor–Miller basis.
#[derive(Debug, Clone, PartialEq)]
pub struct CuspSpace {
    pub weight: u32,
    pub dimension: usize,
    pub basis: Vec<QExpansion>,
    pub precision: usize,
}

fn vm_basis_int(weight: u32, precision: usize) -> Vec<Vec<BigInt>> {
    let d = cusp_dimension(weight);
    if d == 0 {
        return Vec::new();
    }
    let p = precision;
    let e4 = eisenstein_int(4, p).expect("weight 4");
    let e6 = eisenstein_int(6, p).expect("weight 6");
    let dl = delta_int(p);
    let mut e4_pows: Vec<Vec<BigInt>> = vec![{
        let mut one = vec![BigInt::zero(); p];
        one[0] = BigInt::one();
        one
    }];
    let mut rows = Vec::with_capacity(d);
    let mut dpow = dl.clone();
    for j in 1..=d {
        let rest = weight - 12 * j as u32;
        // rest = 4a + 6b with b ∈ {0, 1}
        let (a, b) = if rest % 4 == 0 { (rest / 4, 0) } else { ((rest - 6) / 4, 1) };
        while e4_pows.len() <= a as usize {
            let last = e4_pows.last().expect("nonempty");
            let next = zmul(last, &e4, p);
            e4_pows.push(next);
        }
        let mut row = zmul(&dpow, &e4_pows[a as usize], p);
        if b == 1 {
            row = zmul(&row, &e6, p);
        }
        rows.push(row);
        if j < d {
            dpow = zmul(&dpow, &dl, p);
        }
    }
    // rows[j-1] = q^j + O(q^{j+1}) with integer coefficients; clear above-diagonal entries
    for i in (0..d).rev() {
        for j in (i + 1)..d {
            let c = rows[i][j + 1].clone();
            if c.is_zero() {
                continue;
            }
            let (lo, hi) = rows.split_at_mut(j);
            for (x, y) in lo[i].iter_mut().zip(hi[0].iter()) {
                *x -= &c * y;
            }
        }
    }
    rows
}

/// Victor–Miller basis of S_weight: element i is q^(i+1) + O(q^(d+1)).
pub fn victor_miller_basis(weight: u32, precision: usize) -> Result<CuspSpace> {
    if weight % 2 == 1 {
        return Err(Error::Domain("victor_miller_basis: weight must be even"));
    }
    let d = cusp_dimension(weight);
    if precision <= d {
        return Err(Error::InsufficientPrecision {
            needed: d as u64 + 1,
            available: precision as u64,
        });
    }
    let basis = vm_basis_int(weight, precision)
        .iter()
        .map(|r| QExpansion::from_integers(weight, r))
        .collect();
    Ok(CuspSpace {
        weight,
        dimension: d,
        basis,
        precision,
    })
}

/// Matrix of T_n on the echelon basis: column j holds the coordinates of T_n b_j.
pub fn hecke_operator_matrix(space: &CuspSpace, n: u64) -> Result<RatMatrix> {
    if n == 0 {
        return Err(Error::Domain("hecke_operator_matrix: n must be positive"));
    }
    let d = space.dimension;
    let needed = n * (d as u64 + 1);
    if (space.precision as u64) < needed {
        return Err(Error::InsufficientPrecision {
            needed,
            available: space.precision as u64,
        });
    }
    let mut m = linalg::zeros(d, d);
    for (j, b) in space.basis.iter().enumerate() {
        let t = b.hecke(n)?;
        for (i, row) in m.iter_mut().enumerate() {
            row[j] = t.coeffs[i + 1].clone();
        }
    }
    Ok(m)
}

/// Prime eigenvalues beyond the exact range, sorted by prime.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PrimeTable {
    pub primes: Vec<u32>,
    pub lambdas: Vec<f64>,
    /// Every prime ≤ bound is present.
    pub bound: u64,
}

/// A normalized Hecke eigenform.
#[derive(Debug, Clone, PartialEq)]
pub struct HeckeEigenform {
    pub weight: u32,
    pub label: usize,
    pub coeffs: QExpansion,
    /// True when the coefficients are the exact rational q-expansion.
    pub exact: bool,
    /// Relative residual ‖T_2 v − λv‖/‖v‖ of the eigenvector.
    pub residual: f64,
    lam: Vec<f64>,
    ext: PrimeTable,
}

fn rat_to_f64(x: &BigRational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

fn normalized(a: &BigRational, n: usize, weight: u32) -> f64 {
    if a.is_zero() {
        return 0.0;
    }
    let e = (weight as f64 - 1.0) / 2.0;
    let v = rat_to_f64(a);
    if v.is_finite() && v != 0.0 {
        return v / libm::pow(n as f64, e);
    }
    let (ln, sign) = ln_abs(a);
    sign * libm::exp(ln - e * libm::log(n as f64))
}

fn ln_abs(a: &BigRational) -> (f64, f64) {
    let ln_int = |b: &BigInt| {
        let bits = b.bits();
        let shift = bits.saturating_sub(60);
        let top = (b.abs() >> shift).to_f64().unwrap_or(1.0);
        libm::log(top) + shift as f64 * core::f64::consts::LN_2
    };
    let sign = if a.is_negative() { -1.0 } else { 1.0 };
    (ln_int(a.numer()) - ln_int(a.denom()), sign)
}

impl HeckeEigenform {
    pub fn new(weight: u32, label: usize, coeffs: QExpansion, exact: bool, residual: f64) -> Self {
        let lam = coeffs
            .coeffs
            .iter()
            .enumerate()
            .map(|(n, a)| if n == 0 { 0.0 } else { normalized(a, n, weight) })
            .collect();
        HeckeEigenform {
            weight,
            label,
            coeffs,
            exact,
            residual,
            lam,
            ext: PrimeTable::default(),
        }
    }

    pub fn precision(&self) -> usize {
        self.coeffs.precision()
    }

    /// a_f(n) as an exact rational, for n below the precision.
    pub fn a(&self, n: usize) -> Option<&BigRational> {
        self.coeffs.coeff(n)
    }

    /// All primes up to this bound have known λ_f(p).
    pub fn prime_bound(&self) -> u64 {
        self.ext.bound.max(self.precision().saturating_sub(1) as u64)
    }

    pub fn prime_table(&self) -> &PrimeTable {
        &self.ext
    }

    /// Attach λ_f(p) for primes beyond the exact range.
    pub fn set_prime_table(&mut self, table: PrimeTable) {
        self.ext = table;
    }

    pub fn lambda_prime(&self, p: u64) -> Option<f64> {
        if (p as usize) < self.lam.len() {
            return Some(self.lam[p as usize]);
        }
        let p32 = u32::try_from(p).ok()?;
        self.ext
            .primes
            .binary_search(&p32)
            .ok()
            .map(|i| self.ext.lambdas[i])
    }

    fn lambda_prime_power(&self, p: u64, e: u32) -> Result<f64> {
        let lp = self.lambda_prime(p).ok_or(Error::InsufficientPrecision {
            needed: p,
            available: self.prime_bound(),
        })?;
        let (mut prev, mut cur) = (1.0, lp);
        if e == 0 {
            return Ok(1.0);
        }
        for _ in 1..e {
            let next = lp * cur - prev;
            prev = cur;
            cur = next;
        }
        Ok(cur)
    }

    /// λ_f(n) = a_f(n) n^(−(k−1)/2); beyond the exact range through
    /// multiplicativity and the prime-power recursion.
    pub fn try_lambda(&self, n: u64) -> Result<f64> {
        if n == 0 {
            return Err(Error::Domain("lambda: n must be positive"));
        }
        if (n as usize) < self.lam.len() {
            return Ok(self.lam[n as usize]);
        }
        let mut v = 1.0;
        for (p, e) in factorize(n) {
            v *= self.lambda_prime_power(p, e)?;
        }
        Ok(v)
    }

    /// Panics outside the known range; see [`try_lambda`](Self::try_lambda).
    pub fn lambda(&self, n: u64) -> f64 {
        self.try_lambda(n).expect("lambda out of range")
    }

    /// λ_f(n) for 0 ≤ n ≤ n_max (index 0 holds 0).
    pub fn lambda_table(&self, n_max: usize) -> Result<Vec<f64>> {
        if n_max as u64 > self.prime_bound() {
            return Err(Error::InsufficientPrecision {
                needed: n_max as u64,
                available: self.prime_bound(),
            });
        }
        let mut t = vec![0.0; n_max + 1];
        let exact = self.lam.len().min(n_max + 1);
        t[..exact].copy_from_slice(&self.lam[..exact]);
        if exact > n_max {
            return Ok(t);
        }
        let spf = spf_table(n_max);
        let mut pi = 0;
        for n in exact..=n_max {
            let p = spf[n] as usize;
            if p == n {
                while self.ext.primes[pi] < n as u32 {
                    pi += 1;
                }
                t[n] = self.ext.lambdas[pi];
                continue;
            }
            let mut m = n;
            let mut pe = 1;
            while m % p == 0 {
                m /= p;
                pe *= p;
            }
            t[n] = if m == 1 {
                t[p] * t[n / p] - t[n / (p * p)]
            } else {
                t[pe] * t[m]
            };
        }
        Ok(t)
    }

    /// λ_f(a²) for 0 ≤ a ≤ a_max (index 0 holds 0); needs primes up to a_max.
    pub fn lambda_square_table(&self, a_max: usize) -> Result<Vec<f64>> {
        if a_max as u64 > self.prime_bound() {
            return Err(Error::InsufficientPrecision {
                needed: a_max as u64,
                available: self.prime_bound(),
            });
        }
        let mut t = vec![0.0; a_max + 1];
        if a_max == 0 {
            return Ok(t);
        }
        t[1] = 1.0;
        let spf = spf_table(a_max);
        for a in 2..=a_max {
            let p = spf[a] as usize;
            let mut m = a;
            let mut e = 0;
            while m % p == 0 {
                m /= p;
                e += 1;
            }
            let pe = a / m;
            t[a] = if m == 1 {
                self.lambda_prime_power(p as u64, 2 * e)?
            } else {
                t[pe] * t[m]
            };
        }
        Ok(t)
    }

    /// Coefficients as canonical decimal strings: integers for exact forms,
    /// otherwise fixed-point with [`CANONICAL_DIGITS`] fractional digits.
    pub fn coefficient_strings(&self) -> Vec<String> {
        self.coeffs.coeffs.iter().map(rational_to_decimal).collect()
    }
}

/// Decimal string of a rational whose denominator divides a power of ten.
pub fn rational_to_decimal(x: &BigRational) -> String {
    if x.is_integer() {
        return x.numer().to_string();
    }
    let scale = BigInt::from(10).pow(CANONICAL_DIGITS);
    let scaled = round_div(&(x.numer() * &scale), x.denom());
    let neg = scaled.is_negative();
    let digits = scaled.abs().to_string();
    let width = CANONICAL_DIGITS as usize + 1;
    let padded = if digits.len() < width {
        format!("{}{}", "0".repeat(width - digits.len()), digits)
    } else {
        digits
    };
    let split = padded.len() - CANONICAL_DIGITS as usize;
    format!(
        "{}{}.{}",
        if neg { "-" } else { "" },
        &padded[..split],
        &padded[split..]
    )
}

/// Parse a decimal string produced by [`rational_to_decimal`].
pub fn decimal_to_rational(s: &str) -> Result<BigRational> {
    let bad = || Error::Domain("malformed decimal coefficient");
    let (int_part, frac) = match s.split_once('.') {
        Some((a, b)) => (a, b),
        None => (s, ""),
    };
    let digits = format!("{int_part}{frac}");
    let num: BigInt = digits.parse().map_err(|_| bad())?;
    if frac.chars().any(|c| !c.is_ascii_digit()) {
        return Err(bad());
    }
    let den = BigInt::from(10).pow(frac.len() as u32);
    Ok(BigRational::new(num, den))
}

fn round_div(a: &BigInt, b: &BigInt) -> BigInt {
    // nearest integer, ties away from zero; b > 0
    let two = BigInt::from(2);
    let (q, r) = a.div_mod_floor(b);
    if &r * &two >= *b {
        q + 1
    } else {
        q
    }
}

fn canonicalize(x: &BigRational) -> BigRational {
    let scale = BigInt::from(10).pow(CANONICAL_DIGITS);
    BigRational::new(round_div(&(x.numer() * &scale), x.denom()), scale)
}

/// Hecke eigenbasis of S_weight ordered by λ_f(2).
#[derive(Debug, Clone, PartialEq)]
pub struct EigenBasis {
    pub weight: u32,
    pub forms: Vec<HeckeEigenform>,
    pub precision: usize,
}

impl EigenBasis {
    pub fn dimension(&self) -> usize {
        self.forms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.forms.is_empty()
    }

    /// Canonical serialization: one list of decimal strings per form.
    pub fn to_decimal_strings(&self) -> Vec<Vec<String>> {
        self.forms.iter().map(|f| f.coefficient_strings()).collect()
    }

    /// Rebuild from canonical strings and re-validate the T_2 eigen relation.
    pub fn from_decimal_strings(weight: u32, forms: &[Vec<String>]) -> Result<EigenBasis> {
        let d = cusp_dimension(weight);
        if forms.len() != d {
            return Err(Error::Domain("eigenbasis dimension does not match the weight"));
        }
        let precision = forms.first().map_or(0, |f| f.len());
        let mut out = Vec::with_capacity(d);
        for (label, strs) in forms.iter().enumerate() {
            if strs.len() != precision {
                return Err(Error::Domain("eigenbasis forms differ in precision"));
            }
            let coeffs = strs
                .iter()
                .map(|s| decimal_to_rational(s))
                .collect::<Result<Vec<_>>>()?;
            let exact = coeffs.iter().all(|c| c.is_integer());
            let q = QExpansion::new(weight, coeffs);
            let residual = t2_residual_on_expansion(&q)?;
            if !q.coeffs.get(1).is_some_and(|c| c.is_one()) || residual > 1e-20 {
                return Err(Error::Numerical(format!(
                    "stored form {label} fails validation (residual {residual:e})"
                )));
            }
            out.push(HeckeEigenform::new(weight, label, q, exact, residual));
        }
        for w in out.windows(2) {
            if w[0].lambda(2) >= w[1].lambda(2) {
                return Err(Error::Domain("stored eigenforms not ordered by lambda(2)"));
            }
        }
        Ok(EigenBasis {
            weight,
            forms: out,
            precision,
        })
    }
}

fn rel_norm(v: &[BigRational]) -> f64 {
    v.iter().map(|x| rat_to_f64(x).abs()).fold(0.0, f64::max)
}

/// ‖T_2 f − a(2) f‖ / ‖f‖ over the coefficients determined by the expansion.
fn t2_residual_on_expansion(f: &QExpansion) -> Result<f64> {
    let t = f.hecke(2)?;
    let a2 = f.coeffs.get(2).cloned().unwrap_or_default();
    let mut worst = 0.0f64;
    for m in 1..t.precision() {
        let diff = &t.coeffs[m] - &a2 * &f.coeffs[m];
        let scale = rat_to_f64(&t.coeffs[m]).abs().max(rat_to_f64(&f.coeffs[m]).abs()).max(1.0);
        worst = worst.max(rat_to_f64(&diff).abs() / scale);
    }
    Ok(worst)
}

/// Exact T_2 eigen-decomposition of S_weight (numerical roots at ~640 bits).
pub fn hecke_eigenbasis(weight: u32, precision: usize) -> Result<EigenBasis> {
    if weight % 2 == 1 {
        return Err(Error::Domain("hecke_eigenbasis: weight must be even"));
    }
    let d = cusp_dimension(weight);
    if d == 0 {
        return Ok(EigenBasis {
            weight,
            forms: Vec::new(),
            precision,
        });
    }
    let space = victor_miller_basis(weight, precision.max(2 * (d + 1)))?;
    if d == 1 {
        let mut b = space.basis[0].clone();
        b.coeffs.truncate(precision);
        let residual = t2_residual_on_expansion(&b)?;
        return Ok(EigenBasis {
            weight,
            forms: vec![HeckeEigenform::new(weight, 0, b, true, residual)],
            precision,
        });
    }
    let t2 = hecke_operator_matrix(&space, 2)?;
    let chi = linalg::char_poly(&t2);
    let g = linalg::poly_gcd(&chi, &linalg::derivative(&chi));
    if linalg::degree(&g) > 0 {
        return Err(Error::EigenvalueCollision { weight });
    }
    let roots = linalg::real_roots(&chi, EIGEN_BITS);
    if roots.len() != d {
        return Err(Error::Numerical(format!(
            "T_2 in weight {weight}: found {} real roots, expected {d}",
            roots.len()
        )));
    }
    let mut forms = Vec::with_capacity(d);
    for lam in roots.iter() {
        let mut a = t2.clone();
        for (i, row) in a.iter_mut().enumerate() {
            row[i] -= lam;
        }
        let v = linalg::null_vector(&a)
            .ok_or_else(|| Error::Numerical(format!("singular eigenvector solve in weight {weight}")))?;
        let mut coeffs = vec![BigRational::zero(); precision];
        for (j, b) in space.basis.iter().enumerate() {
            for (n, c) in coeffs.iter_mut().enumerate() {
                if !b.coeffs[n].is_zero() {
                    *c += &v[j] * &b.coeffs[n];
                }
            }
        }
        let coeffs: Vec<BigRational> = coeffs.iter().map(canonicalize).collect();
        // coordinates are a(1), ..., a(d) in the echelon basis
        let vc: Vec<BigRational> = (1..=d).map(|i| coeffs[i].clone()).collect();
        let lam_c = coeffs[2].clone();
        let mut res = Vec::with_capacity(d);
        for (i, row) in t2.iter().enumerate() {
            let mut s = -(&lam_c * &vc[i]);
            for (j, x) in row.iter().enumerate() {
                s += x * &vc[j];
            }
            res.push(s);
        }
        let residual = rel_norm(&res) / rel_norm(&vc);
        if residual.is_nan() || residual > 1e-20 {
            return Err(Error::Numerical(format!(
                "eigenvector residual {residual:e} in weight {weight}"
            )));
        }
        forms.push((lam.clone(), QExpansion::new(weight, coeffs), residual));
    }
    forms.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(Ordering::Equal));
    let forms = forms
        .into_iter()
        .enumerate()
        .map(|(i, (_, q, r))| HeckeEigenform::new(weight, i, q, false, r))
        .collect();
    Ok(EigenBasis {
        weight,
        forms,
        precision,
    })
}

/// max(60, 4·weight).
pub fn default_precision(weight: u32) -> usize {
    (4 * weight as usize).max(60)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(q: &QExpansion) -> Vec<i64> {
        q.coeffs.iter().map(|c| c.to_integer().to_i64().unwrap()).collect()
    }

    #[test]
    fn eisenstein_examples() {
        assert_eq!(ints(&eisenstein_series(4, 3).unwrap()), vec![1, 240, 2160]);
        assert_eq!(ints(&eisenstein_series(6, 3).unwrap()), vec![1, -504, -16632]);
        assert_eq!(ints(&eisenstein_series(4, 1).unwrap()), vec![1]);
        assert!(eisenstein_series(8, 3).is_err());
    }

    #[test]
    fn delta_expansion() {
        let s = victor_miller_basis(12, 5).unwrap();
        assert_eq!(s.dimension, 1);
        assert_eq!(ints(&s.basis[0]), vec![0, 1, -24, 252, -1472]);
    }

    #[test]
    fn dimension_table() {
        let table = [
            (12, 1), (14, 0), (16, 1), (18, 1), (20, 1), (22, 1), (24, 2), (26, 1),
            (28, 2), (30, 2), (34, 2), (38, 2), (42, 3),
        ];
        for (k, d) in table {
            assert_eq!(cusp_dimension(k), d, "weight {k}");
        }
    }

    #[test]
    fn echelon_shape_24() {
        let s = victor_miller_basis(24, 5).unwrap();
        assert_eq!(s.dimension, 2);
        assert_eq!(ints(&s.basis[0])[..3], [0, 1, 0]);
        assert_eq!(ints(&s.basis[1])[..3], [0, 0, 1]);
    }

    #[test]
    fn precision_guard() {
        assert!(victor_miller_basis(24, 2).is_err());
        let s = victor_miller_basis(24, 5).unwrap();
        match hecke_operator_matrix(&s, 2) {
            Err(Error::InsufficientPrecision { needed, .. }) => assert_eq!(needed, 6),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn t2_matrices() {
        let s12 = victor_miller_basis(12, 10).unwrap();
        let m = hecke_operator_matrix(&s12, 2).unwrap();
        assert_eq!(m[0][0], BigRational::from_integer((-24).into()));
        assert_eq!(hecke_operator_matrix(&s12, 1).unwrap(), linalg::identity(1));
        let s24 = victor_miller_basis(24, 10).unwrap();
        let t = linalg::trace(&hecke_operator_matrix(&s24, 2).unwrap());
        assert_eq!(t, BigRational::from_integer(1080.into()));
    }

    #[test]
    fn eigen_examples() {
        let b = hecke_eigenbasis(12, 30).unwrap();
        assert_eq!(b.dimension(), 1);
        let want = -24.0 / libm::pow(2.0, 5.5);
        assert!((b.forms[0].lambda(2) - want).abs() < 1e-15);
        assert!(hecke_eigenbasis(14, 30).unwrap().is_empty());
        let b22 = hecke_eigenbasis(22, 30).unwrap();
        assert_eq!(b22.forms[0].a(2).unwrap(), &BigRational::from_integer((-288).into()));
    }

    #[test]
    fn eigen_24_values() {
        let b = hecke_eigenbasis(24, 60).unwrap();
        let a2: Vec<f64> = b.forms.iter().map(|f| rat_to_f64(f.a(2).unwrap())).collect();
        assert!((a2[0] + 4016.351171716245).abs() < 1e-9);
        assert!((a2[1] - 5096.351171716245).abs() < 1e-9);
        assert!(b.forms.iter().all(|f| f.residual < 1e-20));
    }

    #[test]
    fn decimal_roundtrip() {
        let b = hecke_eigenbasis(24, 40).unwrap();
        let s = b.to_decimal_strings();
        let back = EigenBasis::from_decimal_strings(24, &s).unwrap();
        assert_eq!(back.to_decimal_strings(), s);
        assert_eq!(back.forms[0].coeffs, b.forms[0].coeffs);
    }
}
