//! Invariants of the classifiers under symmetries, time rescaling and the
//! sphere index balance.

use lienard_core::global::{classify_global, g1_check, index_balance, origin_unique, GlobalError};
use lienard_core::infinity::{classify_infinity, monodromy_infinity};
use lienard_core::origin::{center_test, classify_origin, monodromy_origin, Verdict};
use lienard_core::poly::ratio;
use lienard_core::sampling::{random_system, Target};
use lienard_core::system::{GeneralizedLienardSystem, SymmetryTransform};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn draw(seed: u64, target: &Target) -> GeneralizedLienardSystem {
    random_system(&mut ChaCha8Rng::seed_from_u64(seed), target)
}

fn infinity_target() -> Target {
    Target::Infinity { ells: (2..=7).collect(), max_high: 10 }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn origin_portrait_is_symmetry_invariant(seed in any::<u64>()) {
        let s = draw(seed, &Target::Origin { max_low: 5 });
        let base = classify_origin(&s).map(|c| c.portrait);
        for t in SymmetryTransform::all() {
            let moved = classify_origin(&s.apply(t)).map(|c| c.portrait);
            prop_assert_eq!(&moved, &base, "{}", t.label());
        }
        prop_assert_eq!(monodromy_origin(&s).is_some(), monodromy_origin(&s.apply(SymmetryTransform::all()[3])).is_some());
    }

    #[test]
    fn infinity_portrait_is_symmetry_invariant(seed in any::<u64>()) {
        let s = draw(seed, &infinity_target());
        let base = classify_infinity(&s).map(|c| c.portrait);
        for t in SymmetryTransform::all() {
            let moved = classify_infinity(&s.apply(t)).map(|c| c.portrait);
            prop_assert_eq!(&moved, &base, "{}", t.label());
        }
    }

    #[test]
    fn scaling_the_field_keeps_portraits(seed in any::<u64>(), num in 1i64..7, den in 1i64..7, flip in any::<bool>()) {
        let s = draw(seed, &infinity_target());
        let k = if flip { ratio(-num, den) } else { ratio(num, den) };
        let scaled = s.scale_field(&k);
        prop_assert_eq!(
            classify_infinity(&scaled).map(|c| c.portrait),
            classify_infinity(&s).map(|c| c.portrait)
        );
        prop_assert_eq!(
            classify_origin(&scaled).map(|c| c.portrait),
            classify_origin(&s).map(|c| c.portrait)
        );
    }

    #[test]
    fn sphere_index_balances(seed in any::<u64>()) {
        let s = draw(seed, &infinity_target());
        if let (Ok(o), Ok(i)) = (classify_origin(&s), classify_infinity(&s)) {
            let b = index_balance(&s, &o, &i);
            prop_assert!(b.holds(), "{:?} {:?} {} {}", s, b, o.portrait, i.portrait);
        }
    }
}

fn monodromic_draw(rng: &mut ChaCha8Rng) -> GeneralizedLienardSystem {
    loop {
        let s = random_system(rng, &infinity_target());
        if monodromy_origin(&s).is_some() {
            return s;
        }
    }
}

#[test]
fn global_center_routes_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    let (mut centers, mut global) = (0, 0);
    for _ in 0..400 {
        let s = monodromic_draw(&mut rng);
        let c = match classify_global(&s) {
            Ok(c) => c,
            Err(GlobalError::CenterUndecided { .. }) => continue,
            Err(e) => panic!("{:?}: {}", s, e),
        };
        let center = matches!(center_test(&s, None, false).unwrap().verdict, Verdict::Center);
        let route = center && origin_unique(&s) && monodromy_infinity(&s).unwrap().is_some();
        let criteria = g1_check(&s).holds && c.criteria.g2.is_some() && c.criteria.g3 == Some(true) && c.criteria.g4.is_some();
        assert_eq!(criteria, route, "{:?}", s);
        assert_eq!(c.global_center, criteria, "{:?}", s);
        centers += center as usize;
        global += c.global_center as usize;
        if let (Ok(o), Ok(i)) = (classify_origin(&s), classify_infinity(&s)) {
            if c.criteria.origin_unique {
                assert!(lienard_core::global::index_check(&o, &i), "{:?}", s);
            }
        }
    }
    assert!(centers > 20 && global > 5, "centers {} global {}", centers, global);
}
