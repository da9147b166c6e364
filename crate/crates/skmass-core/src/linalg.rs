//! Exact rational matrices and polynomials, Sturm root isolation.

use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Dense row-major matrix of rationals.
pub type RatMatrix = Vec<Vec<BigRational>>;

pub fn identity(n: usize) -> RatMatrix {
    let mut m = zeros(n, n);
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = BigRational::one();
    }
    m
}

pub fn zeros(r: usize, c: usize) -> RatMatrix {
    vec![vec![BigRational::zero(); c]; r]
}

pub fn mat_mul(a: &RatMatrix, b: &RatMatrix) -> RatMatrix {
    let n = a.len();
    let k = b.len();
    let m = if k == 0 { 0 } else { b[0].len() };
    let mut out = zeros(n, m);
    for i in 0..n {
        for l in 0..k {
            if a[i][l].is_zero() {
                continue;
            }
            for j in 0..m {
                out[i][j] += &a[i][l] * &b[l][j];
            }
        }
    }
    out
}

pub fn trace(a: &RatMatrix) -> BigRational {
    let mut t = BigRational::zero();
    for (i, row) in a.iter().enumerate() {
        t += &row[i];
    }
    t
}

/// Characteristic polynomial det(xI − A), coefficients from x^0 upward (monic).
/// Faddeev–LeVerrier.
pub fn char_poly(a: &RatMatrix) -> Vec<BigRational> {
    let n = a.len();
    let mut c = vec![BigRational::zero(); n + 1];
    c[n] = BigRational::one();
    let mut m = zeros(n, n);
    for k in 1..=n {
        let mut am = mat_mul(a, &m);
        for (i, row) in am.iter_mut().enumerate() {
            row[i] += &c[n + 1 - k];
        }
        m = am;
        let t = trace(&mat_mul(a, &m));
        c[n - k] = -t / BigRational::from_integer(BigInt::from(k));
    }
    c
}

fn trim(p: &mut Vec<BigRational>) {
    while p.len() > 1 && p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
}

pub fn degree(p: &[BigRational]) -> usize {
    let mut d = p.len().saturating_sub(1);
    while d > 0 && p[d].is_zero() {
        d -= 1;
    }
    d
}

pub fn eval(p: &[BigRational], x: &BigRational) -> BigRational {
    let mut acc = BigRational::zero();
    for c in p.iter().rev() {
        acc = acc * x + c;
    }
    acc
}

pub fn derivative(p: &[BigRational]) -> Vec<BigRational> {
    if p.len() <= 1 {
        return vec![BigRational::zero()];
    }
    p.iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| c * BigRational::from_integer(BigInt::from(i)))
        .collect()
}

/// Remainder of `a` divided by `b` (b nonzero).
pub fn poly_rem(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let mut r: Vec<BigRational> = a.to_vec();
    trim(&mut r);
    let db = degree(b);
    let lead = &b[db];
    loop {
        if is_zero_poly(&r) {
            break;
        }
        let dr = degree(&r);
        if dr < db {
            break;
        }
        let q = &r[dr] / lead;
        for i in 0..=db {
            let t = &q * &b[i];
            r[dr - db + i] -= t;
        }
        r.truncate(dr);
        if r.is_empty() {
            r.push(BigRational::zero());
        }
        trim(&mut r);
    }
    r
}

fn is_zero_poly(p: &[BigRational]) -> bool {
    p.iter().all(|c| c.is_zero())
}

/// Monic gcd.
pub fn poly_gcd(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    trim(&mut x);
    trim(&mut y);
    while !is_zero_poly(&y) {
        let r = poly_rem(&x, &y);
        x = y;
        y = r;
    }
    let d = degree(&x);
    let lead = x[d].clone();
    x.truncate(d + 1);
    x.iter().map(|c| c / &lead).collect()
}

/// Sturm sequence p, p', −rem(p, p'), ...
pub fn sturm_sequence(p: &[BigRational]) -> Vec<Vec<BigRational>> {
    let mut seq = vec![p.to_vec(), derivative(p)];
    loop {
        let n = seq.len();
        if degree(&seq[n - 1]) == 0 {
            break;
        }
        let r = poly_rem(&seq[n - 2], &seq[n - 1]);
        if is_zero_poly(&r) {
            break;
        }
        seq.push(r.into_iter().map(|c| -c).collect());
    }
    seq
}

fn sign_changes(seq: &[Vec<BigRational>], x: &BigRational) -> usize {
    let mut last = 0i8;
    let mut count = 0;
    for p in seq {
        let v = eval(p, x);
        let s = if v.is_positive() {
            1
        } else if v.is_negative() {
            -1
        } else {
            0
        };
        if s != 0 {
            if last != 0 && s != last {
                count += 1;
            }
            last = s;
        }
    }
    count
}

/// Isolate the real roots of a squarefree polynomial and refine each to an
/// interval of width at most 2^(−bits). Returns midpoints in ascending order.
pub fn real_roots(p: &[BigRational], bits: u32) -> Vec<BigRational> {
    let d = degree(p);
    if d == 0 {
        return Vec::new();
    }
    let lead = p[d].abs();
    let mut bound = BigRational::one();
    for c in &p[..d] {
        let r = c.abs() / &lead;
        if r > bound {
            bound = r;
        }
    }
    bound += BigRational::one();
    let seq = sturm_sequence(p);
    let two = BigRational::from_integer(BigInt::from(2));

    let mut isolated = Vec::new();
    let mut stack = vec![(-bound.clone(), bound)];
    while let Some((a, b)) = stack.pop() {
        let n = sign_changes(&seq, &a) - sign_changes(&seq, &b);
        if n == 0 {
            continue;
        }
        if n == 1 {
            isolated.push((a, b));
            continue;
        }
        let mid = (&a + &b) / &two;
        stack.push((a, mid.clone()));
        stack.push((mid, b));
    }

    let eps = BigRational::new(BigInt::one(), BigInt::one() << bits);
    let mut roots = Vec::with_capacity(isolated.len());
    for (mut a, mut b) in isolated {
        // roots of p never sit at a Sturm interval end (a, b] unless at b
        if eval(p, &b).is_zero() {
            roots.push(b);
            continue;
        }
        let sa = eval(p, &a).is_positive();
        while &b - &a > eps {
            let mid = (&a + &b) / &two;
            let v = eval(p, &mid);
            if v.is_zero() {
                a = mid.clone();
                b = mid;
                break;
            }
            if v.is_positive() == sa {
                a = mid;
            } else {
                b = mid;
            }
        }
        roots.push((&a + &b) / &two);
    }
    roots.sort();
    roots
}

/// Solve A v = 0 approximately with v_0 = 1, using d − 1 pivoted equations.
/// Pivots are chosen by largest magnitude.
pub fn null_vector(a: &RatMatrix) -> Option<Vec<BigRational>> {
    let d = a.len();
    if d == 0 {
        return None;
    }
    if d == 1 {
        return Some(vec![BigRational::one()]);
    }
    // rows: [A[i][1..], -A[i][0]]
    let mut rows: Vec<Vec<BigRational>> = a
        .iter()
        .map(|r| {
            let mut v: Vec<BigRational> = r[1..].to_vec();
            v.push(-r[0].clone());
            v
        })
        .collect();
    let n = d - 1;
    let mut pivot_rows = Vec::with_capacity(n);
    let mut used = vec![false; d];
    for col in 0..n {
        let mut best: Option<usize> = None;
        for (i, r) in rows.iter().enumerate() {
            if used[i] {
                continue;
            }
            if best.is_none_or(|b| r[col].abs() > rows[b][col].abs()) {
                best = Some(i);
            }
        }
        let p = best?;
        if rows[p][col].is_zero() {
            return None;
        }
        used[p] = true;
        pivot_rows.push(p);
        let piv = rows[p].clone();
        for (i, r) in rows.iter_mut().enumerate() {
            if i == p || r[col].is_zero() {
                continue;
            }
            let f = &r[col] / &piv[col];
            for j in col..=n {
                let t = &f * &piv[j];
                r[j] -= t;
            }
        }
    }
    let mut v = vec![BigRational::one(); d];
    for (col, &p) in pivot_rows.iter().enumerate() {
        v[col + 1] = &rows[p][n] / &rows[p][col];
    }
    Some(v)
}
