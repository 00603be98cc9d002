//! Property tests for the invariants that hold over whole input families.

use emknot::clebsch::{
    clebsch_to_scalar, gauge_t1, pair_field, scalar_to_clebsch, CValue, ClebschPair,
};
use emknot::field::{ScalarField, SpaceTimePoint, Vec3};
use emknot::topology::{canonical_hopf_link, gauss_linking};
use proptest::prelude::*;
use std::f64::consts::PI;

fn test_pair() -> ClebschPair {
    ClebschPair::new(
        ScalarField::spatial(|r| r.x.sin() * r.y.sin()),
        ScalarField::spatial(|r| r.z / (2.0 * PI) + 0.1 * r.x.sin()),
        false,
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    /// T₁ with an arbitrary smooth polynomial g leaves the generated field
    /// unchanged.
    #[test]
    fn gauge_t1_leaves_field_invariant(
        c0 in -1.0f64..1.0,
        c1 in -1.0f64..1.0,
        c2 in -1.0f64..1.0,
        c3 in -1.0f64..1.0,
    ) {
        let pair = test_pair();
        let before = pair_field(&pair);
        let after = pair_field(&gauge_t1(&pair, move |p| {
            c0 + p * (c1 + p * (c2 + p * c3))
        }));
        for &(x, y, z) in &[(0.4, 0.9, 1.3), (2.0, 1.1, 0.6), (1.5, 2.4, 2.9)] {
            let pt = SpaceTimePoint::new(x, y, z, 0.0);
            let d = (before.eval(&pt) - after.eval(&pt)).norm();
            prop_assert!(d < 1e-7, "field changed by {d}");
        }
    }

    /// Scalar ↔ Clebsch round trip: identity on p, identity modulo 1 on s.
    #[test]
    fn scalar_clebsch_round_trip(p in 0.01f64..0.99, s in -2.0f64..2.0) {
        let pair = ClebschPair::new(
            ScalarField::new(move |_| p),
            ScalarField::new(move |_| s),
            true,
        );
        let round = scalar_to_clebsch(&clebsch_to_scalar(&pair));
        let pt = SpaceTimePoint::new(1.0, 1.0, 1.0, 0.0);
        prop_assert!((round.p.eval(&pt) - p).abs() < 1e-12);
        let ds = round.s.eval(&pt) - s;
        prop_assert!((ds - ds.round()).abs() < 1e-12);
    }

    /// Clebsch conversion of a finite scalar always lands p in [0, 1].
    #[test]
    fn magnitude_variable_in_range(re in -10.0f64..10.0, im in -10.0f64..10.0) {
        let v = CValue::finite(re, im);
        let p = v.p_value();
        prop_assert!((0.0..=1.0).contains(&p));
    }

    /// Linking is symmetric and odd under orientation reversal for rigidly
    /// placed canonical pairs.
    #[test]
    fn linking_symmetry_and_reversal(
        angle in 0.0f64..2.0,
        dx in -1.0f64..1.0,
        dz in -1.0f64..1.0,
    ) {
        let (c1, c2) = canonical_hopf_link(128);
        let rot = nalgebra::Rotation3::from_euler_angles(angle, 0.3 * angle, -angle);
        let shift = Vec3::new(dx, 0.0, dz);
        let c1 = c1.transformed(&rot, shift);
        let c2 = c2.transformed(&rot, shift);
        let ab = gauss_linking(&c1, &c2).unwrap().raw;
        let ba = gauss_linking(&c2, &c1).unwrap().raw;
        prop_assert!((ab - ba).abs() < 1e-9);
        let rev = gauss_linking(&c1, &c2.reversed()).unwrap().raw;
        prop_assert!((rev + ab).abs() < 1e-12);
        prop_assert!((ab.abs() - 1.0).abs() < 0.01);
    }
}
