//! Property-based invariants for the distribution helpers and the
//! structural recovery/loss curves.

use merton_core::analytics::{
    a_from_pd, structural_loss, structural_recovery, StructuralParam,
};
use merton_core::model::individual_loss;
use merton_core::numerics::{std_normal_cdf, std_normal_quantile};
use proptest::prelude::*;

proptest! {
    #[test]
    fn normal_cdf_symmetry(x in -8.0f64..8.0) {
        let left = std_normal_cdf(-x).unwrap();
        let right = std_normal_cdf(x).unwrap();
        prop_assert!((left + right - 1.0).abs() < 1e-14);
    }

    #[test]
    fn normal_quantile_roundtrip(p in 1e-10f64..=0.9999999) {
        let x = std_normal_quantile(p).unwrap();
        let back = std_normal_cdf(x).unwrap();
        prop_assert!((back - p).abs() < 1e-12 * (1.0 + 1.0 / p));
    }

    #[test]
    fn recovery_stays_in_unit_interval(
        pd in 1e-9f64..=0.9999,
        b in 0.01f64..2.0,
    ) {
        let b = StructuralParam::new(b).unwrap();
        let r = structural_recovery(pd, &b).unwrap();
        prop_assert!((0.0..=1.0).contains(&r), "r = {r}");
    }

    #[test]
    fn recovery_decreases_with_default_probability(
        pd in 1e-6f64..=0.99,
        b in 0.05f64..1.5,
    ) {
        let b = StructuralParam::new(b).unwrap();
        let here = structural_recovery(pd, &b).unwrap();
        let above = structural_recovery((pd * 1.01).min(0.999), &b).unwrap();
        prop_assert!(above <= here + 1e-12, "{above} > {here} at pd = {pd}");
    }

    #[test]
    fn recovery_decreases_with_b(
        pd in 1e-6f64..=0.99,
        b in 0.05f64..1.0,
    ) {
        let lo = StructuralParam::new(b).unwrap();
        let hi = StructuralParam::new(b * 1.05).unwrap();
        let r_lo = structural_recovery(pd, &lo).unwrap();
        let r_hi = structural_recovery(pd, &hi).unwrap();
        prop_assert!(r_hi <= r_lo + 1e-12, "{r_hi} > {r_lo} at pd = {pd}, b = {b}");
    }

    #[test]
    fn loss_and_recovery_are_consistent(
        pd in 1e-6f64..=0.999,
        b in 0.01f64..2.0,
    ) {
        let b = StructuralParam::new(b).unwrap();
        let l = structural_loss(pd, &b).unwrap();
        let r = structural_recovery(pd, &b).unwrap();
        prop_assert!((l - pd * (1.0 - r)).abs() < 1e-12, "l = {l}, pd(1-r) = {}", pd * (1.0 - r));
    }

    #[test]
    fn loss_increases_with_default_probability(
        pd in 1e-6f64..=0.99,
        b in 0.05f64..1.5,
    ) {
        let b = StructuralParam::new(b).unwrap();
        let here = structural_loss(pd, &b).unwrap();
        let above = structural_loss((pd * 1.01).min(0.999), &b).unwrap();
        prop_assert!(above >= here - 1e-12);
    }

    #[test]
    fn loss_bounded_by_default_probability(
        pd in 1e-9f64..=0.9999,
        b in 0.01f64..2.0,
    ) {
        let b = StructuralParam::new(b).unwrap();
        let l = structural_loss(pd, &b).unwrap();
        prop_assert!(l >= 0.0 && l <= pd, "l = {l}, pd = {pd}");
    }

    #[test]
    fn a_from_pd_inverts_the_default_probability(
        pd in 1e-8f64..=0.9999,
        b in 0.02f64..1.5,
    ) {
        let b = StructuralParam::new(b).unwrap();
        let a = a_from_pd(pd, &b).unwrap();
        let back = std_normal_cdf((a + 0.5 * b.b * b.b) / b.b).unwrap();
        prop_assert!((back - pd).abs() < 1e-10 * (1.0 + 1.0 / pd));
    }

    #[test]
    fn individual_loss_in_unit_interval(
        value in 0.0f64..400.0,
        face in 1.0f64..200.0,
    ) {
        let l = individual_loss(value, face);
        prop_assert!((0.0..=1.0).contains(&l));
        if value >= face {
            prop_assert!(l == 0.0);
        } else {
            prop_assert!((l - (face - value) / face).abs() < 1e-15);
        }
    }

    #[test]
    fn individual_loss_decreases_with_value(
        value in 0.0f64..100.0,
        face in 1.0f64..200.0,
    ) {
        let here = individual_loss(value, face);
        let above = individual_loss(value + 0.5, face);
        prop_assert!(above <= here);
    }
}
