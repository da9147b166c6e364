use proptest::prelude::*;
use skmass_core::amplifier::{
    amplifier_coeffs, b_n_mellin_brute, b_n_sum, exponent_optimizer_with, hecke_amplifier_identity, AmplifierCoeffs,
    BnVariant,
};
use skmass_core::arith::prime_pi;
use skmass_core::extend::extend_basis;
use skmass_core::lseries::SymSquareCoeffs;
use skmass_core::qseries::{default_precision, hecke_eigenbasis, EigenBasis};
use skmass_core::trace::{default_c_max, petersson_rhs, HarmonicWeights};
use std::sync::OnceLock;

const SUPPORT: [u64; 12] = [2, 3, 4, 5, 7, 9, 11, 13, 25, 29, 49, 59];

const TRACE_WEIGHTS: [u32; 5] = [12, 16, 20, 24, 28];

fn harmonic() -> &'static Vec<HarmonicWeights> {
    static H: OnceLock<Vec<HarmonicWeights>> = OnceLock::new();
    H.get_or_init(|| {
        TRACE_WEIGHTS
            .iter()
            .map(|&k| HarmonicWeights::new(&hecke_eigenbasis(k, 200).unwrap(), 150).unwrap())
            .collect()
    })
}

fn amp_bases() -> &'static Vec<EigenBasis> {
    static B: OnceLock<Vec<EigenBasis>> = OnceLock::new();
    B.get_or_init(|| {
        [12u32, 22, 24, 30, 34, 42]
            .iter()
            .map(|&w| {
                let mut b = hecke_eigenbasis(w, default_precision(w)).unwrap();
                extend_basis(&mut b, 10_000).unwrap();
                b
            })
            .collect()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn trace_formula_identity(wi in 0usize..TRACE_WEIGHTS.len(), m in 1u64..=12, n in 1u64..=12) {
        let k = TRACE_WEIGHTS[wi];
        let lhs = harmonic()[wi].lhs(m, n).unwrap();
        let rhs = petersson_rhs(k, m, n, default_c_max(k, m, n)).unwrap();
        prop_assert!(!rhs.non_real);
        prop_assert!((lhs - rhs.value).abs() < 1e-6, "k={} ({},{}) {} vs {}", k, m, n, lhs, rhs.value);
        let swapped = petersson_rhs(k, n, m, default_c_max(k, n, m)).unwrap();
        prop_assert!((swapped.value - rhs.value).abs() < 1e-12);
    }

    #[test]
    fn hecke_amplifier_identity_holds(bi in 0usize..6, n in 4u64..=10_000) {
        for g in &amp_bases()[bi].forms {
            let (s, np) = hecke_amplifier_identity(g, n).unwrap();
            prop_assert_eq!(np, prime_pi(skmass_core::arith::isqrt(n)));
            prop_assert!((s - np as f64).abs() < 1e-9);
        }
    }

    #[test]
    fn sym_square_multiplicative(bi in 0usize..6, a in 1usize..40, b in 1usize..40) {
        prop_assume!(skmass_core::arith::gcd(a as u64, b as u64) == 1);
        for f in &amp_bases()[bi].forms {
            let s = SymSquareCoeffs::new(f, 2000).unwrap();
            prop_assert!((s.a1(a * b) - s.a1(a) * s.a1(b)).abs() < 1e-9);
        }
    }

    #[test]
    fn b_n_forms_agree(
        entries in proptest::collection::vec((0usize..SUPPORT.len(), -2.0f64..2.0), 1..6),
        u in -0.7f64..0.3,
        v in 0.0f64..0.5,
    ) {
        let entries: Vec<(u64, f64)> = entries.into_iter().map(|(i, a)| (SUPPORT[i], a)).collect();
        let c = AmplifierCoeffs::from_values(60, &dedup(entries)).unwrap();
        let mellin = b_n_sum(u, v, BnVariant::Mellin, false, &c).unwrap().value;
        let brute = b_n_mellin_brute(u, v, &c).unwrap();
        prop_assert!((mellin - brute).abs() <= 1e-10 * brute.abs().max(1.0));
        for variant in [BnVariant::Mellin, BnVariant::Estimation, BnVariant::Epsilon, BnVariant::Primed { eps: 0.01 }] {
            let s = b_n_sum(u, v, variant, false, &c).unwrap().value;
            let t = b_n_sum(u, v, variant, true, &c).unwrap().value;
            prop_assert!(t >= 0.0 && s.abs() <= t * (1.0 + 1e-12) + 1e-15);
        }
    }

    #[test]
    fn exponent_residuals(eps in 0.0f64..1e-3, delta in 0.51f64..0.99) {
        let s = exponent_optimizer_with(eps, delta).unwrap();
        for r in s.residuals {
            prop_assert!(r.abs() < 1e-12);
        }
        prop_assert!(s.eta > 0.0 && s.eta < 0.005);
        prop_assert!(s.fourth_term_margin < 0.0);
    }
}

fn dedup(mut e: Vec<(u64, f64)>) -> Vec<(u64, f64)> {
    e.sort_by_key(|x| x.0);
    e.dedup_by_key(|x| x.0);
    e
}

#[test]
fn amplifier_support_shape() {
    for b in amp_bases() {
        for g in &b.forms {
            let c = amplifier_coeffs(g, 10_000).unwrap();
            for &(n, p, e) in &c.support {
                assert!(p as f64 <= 100.0 && (e == 1 || e == 2) && n == p.pow(e));
            }
        }
    }
}
