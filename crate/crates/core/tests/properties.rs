use proptest::prelude::*;

use reoa::lemma::{g_alpha, h_alpha, m_alpha};
use reoa::measures::{
    concurrence_pure_bipartition, f_alpha, renyi_entanglement_pure, AlphaParam, MuParam, ALPHA_MAX,
    ALPHA_MIN,
};
use reoa::polygamy::{
    check_eq19_pure, check_eq1_eq2, check_eq24, decide, BoundSide, CheckMode, PartitionSpec,
    Verdict, OPTIMIZER_TOL,
};
use reoa::roof::{decompositions_from_isometry, isometry_param_len, OptBudget};
use reoa::states::{
    ginibre_random_mixed, haar_random_pure, state_from_json, state_to_json, RngSeed, State,
};

fn side() -> impl Strategy<Value = BoundSide> {
    prop_oneof![
        Just(BoundSide::Exact),
        Just(BoundSide::LowerBound),
        Just(BoundSide::UpperBound)
    ]
}

fn lemma_alpha() -> impl Strategy<Value = AlphaParam> {
    (ALPHA_MIN..=ALPHA_MAX).prop_map(|a| AlphaParam::new(a).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn verdicts_respect_bound_directions(lhs in side(), rhs in side(), margin in -1.0f64..1.0, tol in 0.0f64..1e-3) {
        let v = decide(lhs, rhs, margin, tol);
        let lhs_high = matches!(lhs, BoundSide::Exact | BoundSide::UpperBound);
        let rhs_low = matches!(rhs, BoundSide::Exact | BoundSide::LowerBound);
        let lhs_low = matches!(lhs, BoundSide::Exact | BoundSide::LowerBound);
        let rhs_high = matches!(rhs, BoundSide::Exact | BoundSide::UpperBound);
        match v {
            Verdict::Holds => prop_assert!(margin >= -tol && lhs_high && rhs_low),
            Verdict::Violation => prop_assert!(margin < -tol && lhs_low && rhs_high),
            Verdict::Consistent => prop_assert!(margin >= -tol && !(lhs_high && rhs_low)),
            Verdict::Inconclusive => prop_assert!(margin < -tol && !(lhs_low && rhs_high)),
        }
    }

    #[test]
    fn g_is_non_negative_on_the_quarter_disc(r in 0.0f64..=1.0, t in 0.0f64..=std::f64::consts::FRAC_PI_2, a in lemma_alpha()) {
        let (x, y) = (r * t.cos(), r * t.sin());
        prop_assert!(g_alpha(x, y, a).unwrap() >= -1e-9);
    }

    #[test]
    fn m_is_non_positive(x in 0.0f64..=1.0, a in lemma_alpha()) {
        prop_assert!(m_alpha(x, a).unwrap() <= 1e-9);
    }

    #[test]
    fn h_signs_split_at_unit_alpha(x in 1e-3f64..0.999, a in lemma_alpha()) {
        let h = h_alpha(x, a).unwrap();
        if a.value() >= 1.0 {
            prop_assert!(h <= 1e-9);
        } else {
            prop_assert!(h >= -1e-9);
        }
    }

    #[test]
    fn f_alpha_is_monotone(x in 0.0f64..1.0, dx in 0.0f64..0.1, a in 0.05f64..4.0) {
        let a = AlphaParam::new(a).unwrap();
        let y = (x + dx).min(1.0);
        prop_assert!(f_alpha(y, a).unwrap() >= f_alpha(x, a).unwrap() - 1e-12);
    }

    #[test]
    fn squared_concurrence_polygamy_is_exact(seed in any::<u64>(), n in 3usize..=5) {
        let psi = haar_random_pure(n, RngSeed(seed)).unwrap();
        let r = check_eq1_eq2(&psi, &PartitionSpec::first(n).unwrap()).unwrap();
        prop_assert!(r.margin >= -1e-9);
        prop_assert_ne!(r.verdict, Verdict::Violation);
    }

    #[test]
    fn pure_lhs_agrees_two_ways(seed in any::<u64>(), n in 3usize..=4, a in lemma_alpha()) {
        let psi = haar_random_pure(n, RngSeed(seed)).unwrap();
        let direct = renyi_entanglement_pure(&psi, &[0], a).unwrap();
        let via = f_alpha(concurrence_pure_bipartition(&psi, &[0]).unwrap(), a).unwrap();
        prop_assert!((direct - via).abs() <= 1e-9);
    }

    #[test]
    fn isometry_decompositions_reconstruct(seed in any::<u64>(), rank in 1usize..=4, scale in 0.0f64..3.0) {
        let rho = ginibre_random_mixed(2, rank, RngSeed(seed)).unwrap();
        let len = isometry_param_len(&rho).unwrap();
        let params: Vec<f64> = (0..len).map(|k| scale * ((k as f64 + 1.0) * 1.618).sin()).collect();
        let d = decompositions_from_isometry(&rho, &params).unwrap();
        prop_assert!(d.reconstruct().max_abs_diff(rho.matrix()) < 1e-10);
        prop_assert!((d.weights().iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn state_json_round_trips(seed in any::<u64>(), n in 1usize..=3, mixed in any::<bool>()) {
        let state = if mixed {
            State::Mixed(ginibre_random_mixed(n, 1 << n, RngSeed(seed)).unwrap())
        } else {
            State::Pure(haar_random_pure(n, RngSeed(seed)).unwrap())
        };
        let text = state_to_json(&state);
        let back = state_from_json(&text).unwrap();
        prop_assert_eq!(state_to_json(&back), text);
    }

    #[test]
    fn mu_power_is_monotone_in_base(mu in 0.0f64..=1.0, x in 0.0f64..2.0, dx in 0.0f64..1.0) {
        let m = MuParam::new(mu).unwrap();
        prop_assert!(m.pow(x + dx) >= m.pow(x));
    }
}

#[test]
fn zero_to_the_zero_is_zero() {
    assert_eq!(MuParam::new(0.0).unwrap().pow(0.0), 0.0);
    assert_eq!(MuParam::new(0.0).unwrap().pow(0.3), 1.0);
}

/// Along a fine μ grid the verdict can only change where the margin passes through zero.
#[test]
fn powered_margin_has_no_spurious_flips() {
    let budget = OptBudget::default();
    for seed in 0..20 {
        let psi = haar_random_pure(3 + seed as usize % 2, RngSeed(4000 + seed)).unwrap();
        let part = PartitionSpec::first(psi.n_qubits()).unwrap();
        let state = State::Pure(psi.clone());
        for a in [ALPHA_MIN, 1.0, ALPHA_MAX] {
            let a = AlphaParam::new(a).unwrap();
            let reports: Vec<_> = (0..=40)
                .map(|k| {
                    let mu = MuParam::new(k as f64 / 40.0).unwrap();
                    check_eq24(&state, &part, a, mu, CheckMode::Certified, &budget).unwrap()
                })
                .collect();
            for w in reports.windows(2) {
                if w[0].verdict != w[1].verdict {
                    assert!(
                        w[0].margin.abs().min(w[1].margin.abs()) <= OPTIMIZER_TOL,
                        "seed {seed}"
                    );
                }
            }
            let eq19 = check_eq19_pure(&psi, &part, a, CheckMode::Certified, &budget).unwrap();
            assert_eq!(reports[40].verdict, eq19.verdict);
            assert!((reports[40].margin - eq19.margin).abs() < 1e-12);
        }
    }
}
