mod common;

use common::{rand_f64_exp, two_prod_exact, two_sum_exact, Dyadic};
use mpcore::mcfloat::{quick_two_sum, two_prod, two_sum};
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::SeedableRng;

fn p2(e: i32) -> f64 {
    2f64.powi(e)
}

#[test]
fn random_pairs_are_exact() {
    let mut rng = StdRng::seed_from_u64(0x5eed);
    for _ in 0..100_000 {
        let a = rand_f64_exp(&mut rng, -300, 300);
        let b = rand_f64_exp(&mut rng, -300, 300);
        assert!(two_sum_exact(a, b), "two_sum({a:e}, {b:e})");
        assert!(two_prod_exact(a, b), "two_prod({a:e}, {b:e})");
    }
}

#[test]
fn close_exponents_and_cancellation() {
    let mut rng = StdRng::seed_from_u64(7);
    for _ in 0..20_000 {
        let a = rand_f64_exp(&mut rng, -3, 3);
        let b = rand_f64_exp(&mut rng, -3, 3);
        assert!(two_sum_exact(a, -a * (1.0 + b * p2(-40))));
        assert!(two_sum_exact(a, b));
        assert!(two_prod_exact(a, b));
    }
}

#[test]
fn product_example_expands_exactly() {
    let x = 1.0 + p2(-27);
    assert_eq!(two_prod(x, x).unwrap(), (1.0 + p2(-26), p2(-54)));
    let exact = Dyadic::of(x).mul(&Dyadic::of(x));
    assert!(exact.same_value(&Dyadic::of(1.0 + p2(-26)).add(&Dyadic::of(p2(-54)))));
}

#[test]
fn overflow_is_reported() {
    assert!(two_sum(f64::MAX, f64::MAX).is_err());
    assert!(two_prod(p2(600), p2(600)).is_err());
    assert!(two_prod(p2(-500), p2(-480)).is_err());
}

proptest! {
    #[test]
    fn two_sum_exact_prop(a in -1e300f64..1e300, b in -1e300f64..1e300) {
        prop_assert!(two_sum_exact(a, b));
    }

    #[test]
    fn two_prod_exact_prop(a in -1e150f64..1e150, b in -1e150f64..1e150) {
        prop_assume!(a * b == 0.0 || (a * b).abs() > 1e-290);
        prop_assert!(two_prod_exact(a, b));
    }

    #[test]
    fn quick_two_sum_matches_two_sum(a in -1e300f64..1e300, b in -1e300f64..1e300) {
        let (hi, lo) = if a.abs() >= b.abs() { (a, b) } else { (b, a) };
        prop_assert_eq!(quick_two_sum(hi, lo).unwrap(), two_sum(hi, lo).unwrap());
    }
}
