mod common;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use stairfloer::filtcx::{homology, restrict, FilteredComplex, Region};
use stairfloer::invariants::{epsilon, epsilon_by_basis, invariants, tau};
use stairfloer::laurent::LaurentPoly;
use stairfloer::staircase::{StairSum, Staircase};

use common::{genus, random_sample, SUITE_MAX_GENERATORS};

fn staircase() -> impl Strategy<Value = Staircase> {
    prop::collection::vec(1i64..=4, 1..=4).prop_map(|h| Staircase::new(h).unwrap())
}

fn sample() -> impl Strategy<Value = common::Sample> {
    any::<u64>().prop_map(|seed| random_sample(&mut ChaCha8Rng::seed_from_u64(seed), SUITE_MAX_GENERATORS))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn alexander_round_trip(s in staircase()) {
        let poly = s.to_alexander();
        prop_assert!(poly.is_symmetric());
        prop_assert_eq!(Staircase::from_alexander(&poly).unwrap(), s);
    }

    #[test]
    fn staircase_invariants(s in staircase()) {
        let c = s.to_complex();
        let r = invariants(&c).unwrap();
        prop_assert_eq!(r.tau, genus(&s));
        prop_assert_eq!(r.epsilon, 1);
        prop_assert_eq!(epsilon(&c.dual()).unwrap(), -1);
    }

    #[test]
    fn identities_on_random_products(x in sample()) {
        let r = invariants(&x.complex).unwrap();
        prop_assert!(r.check().is_ok(), "{:?} on {}", r, x.describe());
        prop_assert_eq!(r.tau, x.expected_tau());
        prop_assert_eq!(epsilon(&x.complex.dual()).unwrap(), -r.epsilon);
    }

    #[test]
    fn basis_route_agrees(x in sample()) {
        let e = epsilon(&x.complex).unwrap();
        if let Ok(b) = epsilon_by_basis(&x.complex) {
            prop_assert_eq!(b, e, "{}", x.describe());
        }
    }

    #[test]
    fn tensor_and_dual_keep_square_zero(x in sample()) {
        for c in &x.intermediates {
            prop_assert!(c.validate().is_ok());
        }
        prop_assert_eq!(homology(&restrict(&x.complex, Region::Column)).dimension, 1);
        prop_assert_eq!(x.complex.dual().dual(), x.complex.clone());
    }

    #[test]
    fn tau_is_additive(a in sample(), b in sample()) {
        prop_assume!(a.complex.len() * b.complex.len() <= 2_000);
        let t = tau(&a.complex.tensor(&b.complex)).unwrap();
        prop_assert_eq!(t, tau(&a.complex).unwrap() + tau(&b.complex).unwrap());
    }

    #[test]
    fn self_difference_is_equal(s in staircase()) {
        let c = s.to_complex();
        prop_assert_eq!(epsilon(&c.tensor(&c.dual())).unwrap(), 0);
    }

    #[test]
    fn sums_parse_back(terms in prop::collection::vec((staircase(), -3i64..=3), 0..4)) {
        let sum = terms.into_iter().fold(StairSum::zero(), |acc, (s, k)| acc + StairSum::single(s, k));
        prop_assert_eq!(sum.to_string().parse::<StairSum>().unwrap(), sum.clone());
        let json = serde_json::to_string(&sum).unwrap();
        prop_assert_eq!(serde_json::from_str::<StairSum>(&json).unwrap(), sum);
    }

    #[test]
    fn complex_json_round_trip(x in sample()) {
        let json = serde_json::to_string(&x.complex).unwrap();
        let back: FilteredComplex = serde_json::from_str(&json).unwrap();
        prop_assert_eq!(back.digest(), x.complex.digest());
    }

    #[test]
    fn laurent_division_inverts_product(
        a in prop::collection::vec((-4i64..6, -3i64..=3), 1..5),
        b in prop::collection::vec((-4i64..6, -3i64..=3), 1..5),
    ) {
        let (a, b) = (LaurentPoly::from_terms(a), LaurentPoly::from_terms(b));
        prop_assume!(!b.is_zero());
        prop_assert_eq!((&a * &b).exact_div(&b).unwrap(), a);
    }
}
