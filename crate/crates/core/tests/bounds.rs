use gnf_core::complexity::{audit, bound_time, bound_value_size, inputs, AuditOptions};
use gnf_core::engine::{evaluate, EvalOptions};
use gnf_core::{fixtures, Atom, Bound, GnfSystem};
use proptest::prelude::*;

fn ab() -> Vec<Atom> {
    vec![Atom::new("a").unwrap(), Atom::new("b").unwrap()]
}

#[test]
fn sampled_inputs_up_to_size_twenty_stay_within_both_bounds() {
    let ws = inputs::random_family(&ab(), 1..=20, 200, 2024);
    for (name, text) in [("mirror", fixtures::MIRROR), ("identity", fixtures::IDENTITY)] {
        let sys = GnfSystem::parse(text).unwrap();
        let r = audit(&sys, name, 1, &ws, AuditOptions::default()).unwrap();
        assert!(r.is_clean(), "{:?}", r.violations.first());
        assert_eq!(r.summary.count, 4000);
        assert!(r.summary.max_size_ratio <= 0.25 + 1e-12);
    }
}

#[test]
fn structured_families_stay_within_both_bounds() {
    let sys = GnfSystem::parse(fixtures::MIRROR).unwrap();
    let mut ws = Vec::new();
    for n in 1..=64 {
        ws.push(inputs::flat(&ab(), n));
        ws.push(inputs::chain(n));
        ws.push(inputs::balanced(&ab(), n));
    }
    let r = audit(&sys, "mirror", 1, &ws, AuditOptions::default()).unwrap();
    assert!(r.is_clean(), "{:?}", r.violations.first());
}

#[test]
fn flat_lists_grow_at_most_quadratically() {
    let sys = GnfSystem::parse(fixtures::MIRROR).unwrap();
    let ws: Vec<_> = (4..=64).map(|n| inputs::flat(&ab(), n)).collect();
    let r = audit(&sys, "mirror", 1, &ws, AuditOptions { force: false, fit: true }).unwrap();
    let e = r.fitted_exponent.unwrap();
    assert!(e <= 2.25, "exponent {e}");
    // steps are linear in the list length here
    assert!((e - 1.0).abs() < 0.1, "exponent {e}");
    assert!(r.fit_residual.unwrap() >= 0.0);
}

#[test]
fn initial_only_system_has_flat_cost() {
    let sys = GnfSystem::parse(fixtures::EMPTY).unwrap();
    let ws: Vec<_> = (4..=64).map(|n| inputs::flat(&ab(), n)).collect();
    let r = audit(&sys, "empty", 1, &ws, AuditOptions { force: false, fit: true }).unwrap();
    assert!(r.inputs.iter().all(|row| row.measurement.output_size == 0));
    let e = r.fitted_exponent.unwrap();
    // only the size-proportional lookup and memo charges grow
    assert!(e <= 1.0 + 1e-9, "exponent {e}");
}

proptest! {
    #[test]
    fn bounds_agree_across_scalars(c in 1u64..50, p in 1u32..4, r in 0u64..20, s in 1u64..200) {
        let big = bound_time(&Bound::from(c), p, &Bound::from(r), &Bound::from(s)).unwrap();
        if let Some(small) = bound_time(&u128::from(c), p, &u128::from(r), &u128::from(s)) {
            prop_assert_eq!(Bound::from(small), big);
        }
        let big = bound_value_size(&Bound::from(c), p, &Bound::from(s)).unwrap();
        let small = bound_value_size(&u128::from(c), p, &u128::from(s)).unwrap();
        prop_assert_eq!(Bound::from(small), big);
    }

    #[test]
    fn measurement_flags_match_exact_comparison(seed: u64, n in 1u64..24) {
        let sys = GnfSystem::parse(fixtures::MIRROR).unwrap();
        let w = inputs::random_family(&ab(), [n], 1, seed).remove(0);
        let m = evaluate(&sys, 1, &w, EvalOptions::default()).unwrap().measurement;
        prop_assert_eq!(m.size_ok(), Bound::from(m.output_size) <= m.bound_size);
        prop_assert_eq!(m.time_ok(), Bound::from(m.steps) <= m.bound_time);
        prop_assert!(m.size_ok() && m.time_ok());
    }
}
