//! Elementary arithmetic functions: gcd, Möbius, divisor sums, factorization, sieves.

use alloc::vec;
use alloc::vec::Vec;

use crate::Error;

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Extended gcd on signed integers: returns `(g, x, y)` with `a*x + b*y = g`.
pub fn ext_gcd(a: i64, b: i64) -> (i64, i64, i64) {
    let (mut r0, mut r1) = (a, b);
    let (mut s0, mut s1) = (1i64, 0i64);
    let (mut t0, mut t1) = (0i64, 1i64);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if r0 < 0 {
        (-r0, -s0, -t0)
    } else {
        (r0, s0, t0)
    }
}

/// Inverse of `a` modulo `c`, if it exists. `c = 1` gives 0.
pub fn mod_inverse(a: u64, c: u64) -> Option<u64> {
    if c == 1 {
        return Some(0);
    }
    let (g, x, _) = ext_gcd((a % c) as i64, c as i64);
    if g != 1 {
        return None;
    }
    Some(x.rem_euclid(c as i64) as u64)
}

/// Prime factorization by trial division, primes ascending.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

fn positive(n: u64, what: &'static str) -> Result<(), Error> {
    if n == 0 {
        Err(Error::Domain(what))
    } else {
        Ok(())
    }
}

/// Möbius function.
pub fn mobius(n: u64) -> Result<i8, Error> {
    positive(n, "mobius: argument must be positive")?;
    let f = factorize(n);
    if f.iter().any(|&(_, e)| e > 1) {
        return Ok(0);
    }
    Ok(if f.len() % 2 == 0 { 1 } else { -1 })
}

/// σ_α(n) = Σ_{d|n} d^α for real α.
pub fn sigma_alpha(n: u64, alpha: f64) -> Result<f64, Error> {
    positive(n, "sigma_alpha: argument must be positive")?;
    let mut s = 0.0;
    for d in divisors(n) {
        s += libm::pow(d as f64, alpha);
    }
    Ok(s)
}

/// Number of divisors.
pub fn tau_divisors(n: u64) -> Result<u64, Error> {
    positive(n, "tau_divisors: argument must be positive")?;
    Ok(factorize(n).iter().map(|&(_, e)| e as u64 + 1).product())
}

/// Checked gcd for the `arith` surface: both arguments positive.
pub fn gcd_checked(a: u64, b: u64) -> Result<u64, Error> {
    positive(a, "gcd: arguments must be positive")?;
    positive(b, "gcd: arguments must be positive")?;
    Ok(gcd(a, b))
}

/// All divisors of `n`, ascending.
pub fn divisors(n: u64) -> Vec<u64> {
    let mut ds = vec![1u64];
    for (p, e) in factorize(n) {
        let len = ds.len();
        let mut pk = 1;
        for _ in 0..e {
            pk *= p;
            for i in 0..len {
                ds.push(ds[i] * pk);
            }
        }
    }
    ds.sort_unstable();
    ds
}

/// Boolean prime sieve on `0..=n`.
pub fn prime_sieve(n: usize) -> Vec<bool> {
    let mut s = vec![true; n + 1];
    s[0] = false;
    if n >= 1 {
        s[1] = false;
    }
    let mut i = 2;
    while i * i <= n {
        if s[i] {
            let mut j = i * i;
            while j <= n {
                s[j] = false;
                j += i;
            }
        }
        i += 1;
    }
    s
}

pub fn primes_up_to(n: usize) -> Vec<u64> {
    prime_sieve(n)
        .iter()
        .enumerate()
        .filter(|(_, &b)| b)
        .map(|(i, _)| i as u64)
        .collect()
}

/// π(x) by sieve.
pub fn prime_pi(x: u64) -> u64 {
    prime_sieve(x as usize).iter().filter(|&&b| b).count() as u64
}

/// Integer square root (floor).
pub fn isqrt(n: u64) -> u64 {
    let mut r = libm::sqrt(n as f64) as u64;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

/// Smallest-prime-factor table on `0..=n`.
pub fn spf_table(n: usize) -> Vec<u32> {
    let mut spf = vec![0u32; n + 1];
    for i in 2..=n {
        if spf[i] == 0 {
            let mut j = i;
            while j <= n {
                if spf[j] == 0 {
                    spf[j] = i as u32;
                }
                j += i;
            }
        }
    }
    spf
}

/// σ_j(n) for all `n < len` as u128; σ_j(0) is set to 0.
pub fn divisor_power_sums(j: u32, len: usize) -> Vec<u128> {
    let mut s = vec![0u128; len];
    for d in 1..len {
        let dj = (d as u128).pow(j);
        let mut m = d;
        while m < len {
            s[m] += dj;
            m += d;
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_values() {
        assert_eq!(mobius(4).unwrap(), 0);
        assert_eq!(mobius(6).unwrap(), 1);
        assert_eq!(mobius(30).unwrap(), -1);
        assert_eq!(tau_divisors(12).unwrap(), 6);
        assert_eq!(divisors(12), vec![1, 2, 3, 4, 6, 12]);
        assert_eq!(gcd_checked(12, 18).unwrap(), 6);
        assert_eq!(prime_pi(100), 25);
        assert_eq!(mod_inverse(3, 7), Some(5));
        assert_eq!(mod_inverse(2, 4), None);
        assert_eq!(isqrt(99), 9);
        assert_eq!(spf_table(12)[12], 2);
    }

    #[test]
    fn sigma_third() {
        let c = libm::cbrt(2.0);
        let want = 1.0 + c + c * c + 2.0;
        assert!((sigma_alpha(8, 1.0 / 3.0).unwrap() - want).abs() < 1e-14);
    }

    #[test]
    fn zero_rejected() {
        assert!(mobius(0).is_err());
        assert!(sigma_alpha(0, 1.0).is_err());
        assert!(tau_divisors(0).is_err());
        assert!(gcd_checked(0, 3).is_err());
    }
}
