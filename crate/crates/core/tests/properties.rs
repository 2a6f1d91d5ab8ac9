mod common;

use hatm::laplace::{div_s, inverse_laplace, laplace, LaplaceImage};
use hatm::BiPoly;
use proptest::prelude::*;

use common::{close, hbar_poly, poly};

fn is_canonical(p: &BiPoly) -> bool {
    let keys: Vec<_> = p.terms().map(|(k, _)| k).collect();
    p.terms().all(|(_, c)| c != 0.0) && keys.windows(2).all(|w| w[0] < w[1])
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 1000, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn div_s_commutes_with_integration(p in poly()) {
        let via_transform = inverse_laplace(&div_s(&laplace(&p))).unwrap();
        prop_assert!(close(&via_transform, &p.integrate_t(), 1e-12));
    }

    #[test]
    fn laplace_is_linear(p in poly(), q in poly(), a in -5.0f64..5.0) {
        let lhs = laplace(&(&p.scale(a) + &q));
        let rhs = laplace(&p).scale(a).add(&laplace(&q));
        for k in 1..=7 {
            prop_assert!(close(&lhs.coeff(k), &rhs.coeff(k), 1e-12));
        }
    }

    #[test]
    fn inverse_laplace_is_linear(
        f in prop::collection::vec((1u32..6, hbar_poly()), 0..4),
        g in prop::collection::vec((1u32..6, hbar_poly()), 0..4),
        a in -5.0f64..5.0,
    ) {
        let img = |terms: Vec<(u32, BiPoly)>| {
            LaplaceImage::from_terms(terms.into_iter().map(|(k, c)| (i64::from(k), c))).unwrap()
        };
        let (f, g) = (img(f), img(g));
        let lhs = inverse_laplace(&f.scale(a).add(&g)).unwrap();
        let rhs = &inverse_laplace(&f).unwrap().scale(a) + &inverse_laplace(&g).unwrap();
        prop_assert!(close(&lhs, &rhs, 1e-12));
    }

    #[test]
    fn integral_vanishes_at_zero_for_every_hbar(p in poly(), h in -2.0f64..2.0) {
        prop_assert_eq!(p.integrate_t().eval(h, 0.0), 0.0);
    }

    #[test]
    fn every_operation_returns_canonical_form(p in poly(), q in poly(), a in -3.0f64..3.0) {
        for r in [
            &p + &q, &p - &q, &p * &q, -&p, p.scale(a), p.scale(0.0), p.diff_t(),
            p.integrate_t(), p.at_t_zero(), p.shift_hbar(2), p.truncate(3, 3), &p - &p,
        ] {
            prop_assert!(is_canonical(&r), "{r}");
        }
        prop_assert!((&p - &p).is_zero());
    }

    #[test]
    fn evaluation_is_a_ring_homomorphism(p in poly(), q in poly(), h in -1.5f64..0.5, t in 0.0f64..1.0) {
        let (x, y) = (p.eval(h, t), q.eval(h, t));
        let scale = 1.0 + 1e3 * (1.0 + x.abs()) * (1.0 + y.abs());
        prop_assert!(((&p * &q).eval(h, t) - x * y).abs() <= 1e-12 * scale);
        prop_assert!(((&p + &q).eval(h, t) - (x + y)).abs() <= 1e-12 * scale);
    }

    #[test]
    fn shift_hbar_is_multiplication_by_hbar_power(p in poly(), k in 0u32..4) {
        let mut power = BiPoly::one();
        for _ in 0..k {
            power = &power * &BiPoly::hbar();
        }
        prop_assert_eq!(p.shift_hbar(k), &p * &power);
    }
}

#[test]
fn images_reject_powers_below_one_and_time_dependent_coefficients() {
    assert!(LaplaceImage::term(0, BiPoly::one()).is_err());
    assert!(LaplaceImage::term(-2, BiPoly::one()).is_err());
    assert!(LaplaceImage::term(1, BiPoly::t()).is_err());
    assert!(LaplaceImage::term(1, BiPoly::hbar()).is_ok());
}
