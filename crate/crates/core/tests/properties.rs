use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

use cy3_core::mirror::{lambert_extract, lambert_series, prepotential_integrality};
use cy3_core::series::{basis, revert, series_from_json, series_to_json};
use cy3_core::{CoeffRing, PadicRing, RationalRing, Series};

type PSeries = Series<PadicRing>;

const P: u64 = 5;
const M: u32 = 8;
const DEG: u32 = 4;

fn ring() -> PadicRing {
    PadicRing::for_degree(P, M, 6).unwrap()
}

fn padic_series(nvars: usize, degree: u32, coeffs: &[i64]) -> PSeries {
    let r = ring();
    let b = basis(nvars, degree);
    let c = (0..b.len()).map(|i| r.from_i64(coeffs[i % coeffs.len()])).collect();
    Series::from_coeffs(&r, b, c)
}

fn rational_series(coeffs: &[(i64, i64)]) -> Series<RationalRing> {
    let b = basis(2, DEG);
    let c = (0..b.len())
        .map(|i| {
            let (n, d) = coeffs[i % coeffs.len()];
            BigRational::new(n.into(), d.into())
        })
        .collect();
    Series::from_coeffs(&RationalRing, b, c)
}

fn coeffs() -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec(-10_000i64..10_000, 15)
}

fn without_constant(mut c: Vec<i64>) -> Vec<i64> {
    c[0] = 0;
    c
}

fn agrees(a: &PSeries, b: &PSeries) -> bool {
    a.agrees(b, M as i64, a.degree())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn padic_series_ring_axioms(a in coeffs(), b in coeffs(), c in coeffs()) {
        let (a, b, c) = (padic_series(2, DEG, &a), padic_series(2, DEG, &b), padic_series(2, DEG, &c));
        prop_assert!(agrees(&a.add(&b), &b.add(&a)));
        prop_assert!(agrees(&a.mul(&b), &b.mul(&a)));
        prop_assert!(agrees(&a.mul(&b).mul(&c), &a.mul(&b.mul(&c))));
        prop_assert!(agrees(&a.add(&b).mul(&c), &a.mul(&c).add(&b.mul(&c))));
        prop_assert!(agrees(&a.add(&a.neg()), &a.zero_like()));
        prop_assert!(agrees(&a.mul(&a.one_like()), &a));
    }

    #[test]
    fn rational_series_ring_axioms(
        a in prop::collection::vec((-50i64..50, 1i64..20), 15),
        b in prop::collection::vec((-50i64..50, 1i64..20), 15),
        c in prop::collection::vec((-50i64..50, 1i64..20), 15),
    ) {
        let (a, b, c) = (rational_series(&a), rational_series(&b), rational_series(&c));
        prop_assert_eq!(a.mul(&b), b.mul(&a));
        prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
        prop_assert_eq!(a.add(&b).mul(&c), a.mul(&c).add(&b.mul(&c)));
        prop_assert_eq!(a.sub(&a), a.zero_like());
    }

    #[test]
    fn inverse_is_two_sided(a in coeffs(), unit in 1i64..4) {
        let mut a = padic_series(2, DEG, &a);
        a.set(&[0, 0], ring().from_i64(unit + 5 * (unit - 1)));
        let inv = a.invert().unwrap();
        prop_assert!(agrees(&a.mul(&inv), &a.one_like()));
    }

    #[test]
    fn exp_log_round_trip(a in coeffs(), c in -100i64..100) {
        let mut x = padic_series(2, DEG, &without_constant(a));
        x.set(&[0, 0], ring().from_i64(5 * c));
        let e = x.exp().unwrap();
        prop_assert!(agrees(&e.log().unwrap(), &x));
        let one_plus = x.add(&x.one_like());
        prop_assert!(agrees(&one_plus.log().unwrap().exp().unwrap(), &one_plus));
    }

    #[test]
    fn exp_is_a_homomorphism(a in coeffs(), b in coeffs()) {
        let x = padic_series(2, DEG, &without_constant(a));
        let y = padic_series(2, DEG, &without_constant(b));
        let lhs = x.add(&y).exp().unwrap();
        let rhs = x.exp().unwrap().mul(&y.exp().unwrap());
        prop_assert!(agrees(&lhs, &rhs));
    }

    #[test]
    fn substitution_is_a_ring_homomorphism(a in coeffs(), b in coeffs(), g0 in coeffs(), g1 in coeffs()) {
        let (a, b) = (padic_series(2, DEG, &a), padic_series(2, DEG, &b));
        let images = [padic_series(2, DEG, &without_constant(g0)), padic_series(2, DEG, &without_constant(g1))];
        let sub = |s: &PSeries| s.substitute(&images).unwrap();
        prop_assert!(agrees(&sub(&a.mul(&b)), &sub(&a).mul(&sub(&b))));
        prop_assert!(agrees(&sub(&a.add(&b)), &sub(&a).add(&sub(&b))));
        prop_assert!(agrees(&sub(&a.one_like()), &a.one_like()));
    }

    #[test]
    fn univariate_revert_round_trip(c in prop::collection::vec(-10_000i64..10_000, 7), unit in 1i64..5) {
        let mut c = c;
        c[0] = 0;
        c[1] = unit + 5 * c[1];
        let f = padic_series(1, 6, &c);
        let g = revert(std::slice::from_ref(&f)).unwrap();
        let t = f.var_like(0);
        prop_assert!(f.substitute(&g).unwrap().agrees(&t, M as i64, 6));
        prop_assert!(g[0].substitute(std::slice::from_ref(&f)).unwrap().agrees(&t, M as i64, 6));
    }

    #[test]
    fn multivariate_revert_round_trip(g0 in coeffs(), g1 in coeffs(), shear in -100i64..100) {
        let r = ring();
        let mut f0 = padic_series(2, DEG, &without_constant(g0));
        let mut f1 = padic_series(2, DEG, &without_constant(g1));
        f0.set(&[1, 0], r.one());
        f0.set(&[0, 1], r.from_i64(shear));
        f1.set(&[1, 0], r.zero());
        f1.set(&[0, 1], r.one());
        let f = [f0, f1];
        let g = revert(&f).unwrap();
        for (j, fj) in f.iter().enumerate() {
            prop_assert!(agrees(&fj.substitute(&g).unwrap(), &fj.var_like(j)));
            prop_assert!(agrees(&g[j].substitute(&f).unwrap(), &fj.var_like(j)));
        }
    }

    #[test]
    fn series_json_round_trip(a in coeffs(), shift in -3i64..3) {
        let r = ring();
        let a = padic_series(2, DEG, &a).scale(&r.p_pow(shift));
        let back = series_from_json(&r, &series_to_json(&a)).unwrap();
        prop_assert_eq!(back, a);
    }

    #[test]
    fn lambert_round_trip(b in prop::collection::vec((-1000i64..1000, 1i64..30), 1..16), norm in 1i64..10) {
        let b: Vec<BigRational> = b.into_iter().map(|(n, d)| BigRational::new(n.into(), d.into())).collect();
        let y = lambert_series(&b, norm);
        prop_assert_eq!(lambert_extract(&y, norm).unwrap(), b);
    }

    #[test]
    fn integral_b_lists_pass_every_prime(b in prop::collection::vec(-100_000i64..100_000, 1..40)) {
        let b: Vec<BigRational> = b.into_iter().map(|n| BigRational::from_integer(n.into())).collect();
        for p in [2, 3, 5, 7, 11, 13] {
            prop_assert!(prepotential_integrality(&b, p, b.len(), 5).pass);
        }
    }

    #[test]
    fn denominator_25_fails_at_its_index(b in prop::collection::vec(-100_000i64..100_000, 1..40), k in 0usize..40) {
        let mut b: Vec<BigRational> = b.into_iter().map(|n| BigRational::from_integer(n.into())).collect();
        let k = k % b.len();
        b[k] += BigRational::new(BigInt::from(1), BigInt::from(25));
        let r = prepotential_integrality(&b, 5, b.len(), 5);
        prop_assert!(!r.pass);
        prop_assert_eq!(r.first_failure, Some(k + 1));
    }
}
