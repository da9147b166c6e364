use proptest::prelude::*;
use skmass_core::arith::{divisors, gcd, primes_up_to};
use skmass_core::linalg::mat_mul;
use skmass_core::qseries::{
    cusp_dimension, default_precision, hecke_eigenbasis, hecke_operator_matrix, victor_miller_basis, EigenBasis,
};
use std::sync::OnceLock;

const WEIGHTS: [u32; 14] = [12, 16, 18, 20, 22, 24, 26, 28, 30, 32, 34, 36, 38, 42];

fn exact_bases() -> &'static Vec<EigenBasis> {
    static B: OnceLock<Vec<EigenBasis>> = OnceLock::new();
    B.get_or_init(|| WEIGHTS.iter().map(|&w| hecke_eigenbasis(w, 2501).unwrap()).collect())
}

#[test]
fn dimension_table() {
    let want = [(12, 1), (14, 0), (16, 1), (18, 1), (20, 1), (22, 1), (24, 2), (26, 1), (28, 2), (30, 2), (34, 2), (38, 2), (42, 3)];
    for (w, d) in want {
        assert_eq!(cusp_dimension(w), d, "weight {w}");
        assert_eq!(hecke_eigenbasis(w, default_precision(w)).unwrap().dimension(), d);
    }
}

#[test]
fn hecke_relations_on_exact_coefficients() {
    for b in exact_bases() {
        for f in &b.forms {
            for m in 1..=50u64 {
                for n in 1..=50u64 {
                    let rhs: f64 = divisors(gcd(m, n)).iter().map(|d| f.lambda(m * n / (d * d))).sum();
                    let r = (f.lambda(m) * f.lambda(n) - rhs).abs();
                    assert!(r < 1e-9, "weight {} form {} ({m},{n}): {r:e}", b.weight, f.label);
                }
            }
        }
    }
}

#[test]
fn deligne_bound() {
    for b in exact_bases() {
        for f in &b.forms {
            for p in primes_up_to(100) {
                assert!(f.lambda(p).abs() <= 2.0 + 1e-9);
            }
        }
    }
}

#[test]
fn hecke_operators_commute() {
    let space = victor_miller_basis(24, 240).unwrap();
    let t: Vec<_> = (1..=10).map(|n| hecke_operator_matrix(&space, n).unwrap()).collect();
    for i in 0..10 {
        for j in 0..10 {
            assert_eq!(mat_mul(&t[i], &t[j]), mat_mul(&t[j], &t[i]), "T_{} T_{}", i + 1, j + 1);
        }
    }
    // T_2 T_3 = T_6 exactly
    assert_eq!(mat_mul(&t[1], &t[2]), t[5]);
}

#[test]
fn serialization_round_trip() {
    for w in [12u32, 24, 42] {
        let b = hecke_eigenbasis(w, default_precision(w)).unwrap();
        let strings = b.to_decimal_strings();
        let back = EigenBasis::from_decimal_strings(w, &strings).unwrap();
        assert_eq!(back.to_decimal_strings(), strings);
        for (f, g) in b.forms.iter().zip(&back.forms) {
            assert_eq!(f.coeffs, g.coeffs);
        }
    }
}

#[test]
fn tampered_coefficients_are_rejected() {
    let b = hecke_eigenbasis(24, 96).unwrap();
    let mut s = b.to_decimal_strings();
    s[1][7] = s[1][7].replacen('.', "3.", 1);
    assert!(EigenBasis::from_decimal_strings(24, &s).is_err());
    let mut s = b.to_decimal_strings();
    s.swap(0, 1);
    assert!(EigenBasis::from_decimal_strings(24, &s).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn multiplicative_on_coprime_pairs(wi in 0usize..WEIGHTS.len(), m in 1u64..50, n in 1u64..50) {
        prop_assume!(gcd(m, n) == 1);
        for f in &exact_bases()[wi].forms {
            prop_assert!((f.lambda(m * n) - f.lambda(m) * f.lambda(n)).abs() < 1e-9);
        }
    }

    #[test]
    fn prime_power_recursion(wi in 0usize..WEIGHTS.len(), pi in 0usize..6, e in 1u32..4) {
        let p = [2u64, 3, 5, 7, 11, 13][pi];
        prop_assume!(p.pow(e + 1) <= 2500);
        for f in &exact_bases()[wi].forms {
            let lhs = f.lambda(p) * f.lambda(p.pow(e));
            let rhs = f.lambda(p.pow(e + 1)) + f.lambda(p.pow(e - 1));
            prop_assert!((lhs - rhs).abs() < 1e-9);
        }
    }
}
