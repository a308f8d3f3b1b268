use absentia_core::certify::{check_budget_ab, check_budget_nsa, check_budget_robust, check_budget_thm1, Budget, ObviousOutcome, Verdict};
use absentia_core::field::{ab_potential, explicit_potential, flux_distance, transverse_gauge, AngularFluxDensity, RadialFieldProfile};
use absentia_core::forms::{assemble_dirichlet_form, diamagnetic_check};
use absentia_core::hardy::circle_eigenvalue;
use absentia_core::mesh::{build_grid, GridFunction};
use absentia_core::C;
use proptest::prelude::*;
use std::sync::Arc;

const NAMES: [&str; 6] = ["b1", "b2", "b3", "b4", "b5", "b6"];

fn budget_from(values: &[f64], a2: f64) -> Budget {
    let mut b = Budget::new();
    for (n, v) in NAMES.iter().zip(values) {
        b.set(n, *v).unwrap();
    }
    b.set("a2", a2).unwrap();
    b
}

fn rank(v: Verdict) -> u8 {
    match v {
        Verdict::Certified => 2,
        Verdict::NotCertified => 1,
        Verdict::Inapplicable => 0,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn flux_distance_is_periodic_and_even(x in -5.0f64..5.0) {
        let d = flux_distance(x);
        prop_assert!((0.0..=0.5).contains(&d));
        prop_assert!((flux_distance(x + 1.0) - d).abs() < 1e-12);
        prop_assert!((flux_distance(-x) - d).abs() < 1e-12);
    }

    #[test]
    fn circle_eigenvalue_depends_on_flux_distance_only(
        mean in -2.0f64..2.0,
        c1 in -0.5f64..0.5,
        s1 in -0.5f64..0.5,
    ) {
        let a = circle_eigenvalue(&AngularFluxDensity::series(mean, vec![c1], vec![s1]).unwrap(), 32).unwrap();
        let shifted = circle_eigenvalue(&AngularFluxDensity::series(mean + 1.0, vec![c1], vec![s1]).unwrap(), 32).unwrap();
        let flipped = circle_eigenvalue(&AngularFluxDensity::series(-mean, vec![-c1], vec![-s1]).unwrap(), 32).unwrap();
        let beta = flux_distance(mean);
        prop_assert!((a.value - beta * beta).abs() < 1e-9);
        prop_assert!((shifted.value - a.value).abs() < 1e-9);
        prop_assert!((flipped.value - a.value).abs() < 1e-9);
    }

    #[test]
    fn budgets_are_monotone(
        values in prop::collection::vec(0.0f64..0.6, 6),
        a2 in 0.0f64..0.3,
        which in 0usize..6,
        bump in 0.0f64..0.5,
        beta in 0.05f64..0.5,
    ) {
        let base = budget_from(&values, a2);
        let mut raised = values.clone();
        raised[which] += bump;
        let more = budget_from(&raised, a2);
        let alpha = AngularFluxDensity::constant(beta);
        let pairs = [
            (check_budget_thm1(&base), check_budget_thm1(&more)),
            (check_budget_nsa(&base, ObviousOutcome::Holds), check_budget_nsa(&more, ObviousOutcome::Holds)),
            (check_budget_robust(&base, None), check_budget_robust(&more, None)),
            (check_budget_ab(&alpha, &base, None), check_budget_ab(&alpha, &more, None)),
        ];
        for (lo, hi) in pairs {
            prop_assert!(hi.budget_value >= lo.budget_value);
            prop_assert!(rank(hi.verdict) <= rank(lo.verdict));
        }
    }

    #[test]
    fn auto_epsilon_is_minimal(a2 in 0.0f64..0.3, eps in 1e-3f64..1.0, beta in 0.05f64..0.5) {
        let b = budget_from(&[0.1, 0.2, 0.1, 0.0, 0.0, 0.0], a2);
        prop_assert!(check_budget_robust(&b, None).budget_value <= check_budget_robust(&b, Some(eps)).budget_value + 1e-12);
        let alpha = AngularFluxDensity::constant(beta);
        prop_assert!(check_budget_ab(&alpha, &b, None).budget_value <= check_budget_ab(&alpha, &b, Some(eps)).budget_value + 1e-12);
    }

    #[test]
    fn diamagnetic_inequality_on_random_data(
        strength in -3.0f64..3.0,
        mean in -1.0f64..1.0,
        values in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 16 * 9),
    ) {
        let disk = build_grid(0.0, 2.0, 8, 16, 1.0).unwrap();
        let annulus = build_grid(0.1, 2.0, 8, 16, 1.0).unwrap();
        let free = transverse_gauge(&RadialFieldProfile::zero());
        let cases = [
            (&disk, transverse_gauge(&RadialFieldProfile::constant(strength).unwrap())),
            (&annulus, ab_potential(&AngularFluxDensity::constant(mean))),
        ];
        for (g, a) in cases {
            let psi = GridFunction {
                values: g.nodes().iter().zip(&values).map(|(n, &(re, im))| {
                    if n.dirichlet { C::new(0.0, 0.0) } else { C::new(re, im) }
                }).collect(),
            };
            let ha = assemble_dirichlet_form(&a, g).unwrap();
            let h0 = assemble_dirichlet_form(&free, g).unwrap();
            prop_assert!(diamagnetic_check(&ha, &h0, &psi).unwrap().holds);
        }
    }

    #[test]
    fn linear_gauge_shift_preserves_the_form(
        c in -2.0f64..2.0,
        values in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 16 * 8 + 1),
    ) {
        // A + ∇χ with χ = c·x₁, against ψ multiplied by e^{-iχ}.
        let g = build_grid(0.0, 2.0, 8, 16, 1.0).unwrap();
        let a = explicit_potential::<f64>(Arc::new(|p| [-p.y / 2.0, p.x / 2.0]), None);
        let shifted = explicit_potential::<f64>(Arc::new(move |p| [-p.y / 2.0 + c, p.x / 2.0]), None);
        let psi = GridFunction {
            values: g.nodes().iter().zip(&values).map(|(n, &(re, im))| {
                if n.dirichlet { C::new(0.0, 0.0) } else { C::new(re, im) }
            }).collect(),
        };
        let gauged = GridFunction {
            values: g.nodes().iter().zip(&psi.values).map(|(n, z)| z * C::from_polar(1.0, -c * n.point.x)).collect(),
        };
        let h = assemble_dirichlet_form(&a, &g).unwrap();
        let hs = assemble_dirichlet_form(&shifted, &g).unwrap();
        let lhs = h.value(&psi).unwrap();
        let rhs = hs.value(&gauged).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-9 * (1.0 + lhs.abs()), "{} vs {}", lhs, rhs);
    }
}
