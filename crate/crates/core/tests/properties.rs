use bosonic_geom::classical::{death_evolve, ClassicalPMF, DeathOptions};
use bosonic_geom::fisher::{quantum_fisher, DEFAULT_FISHER_STEP};
use bosonic_geom::fock::{
    displace, fock_rearrangement, majorizes_states, random_state, relative_entropy, von_neumann_entropy,
    DensityMatrix, MajorizationMode, RandomFamily,
};
use bosonic_geom::gaussian::{
    cou_step, fisher_isoperimetric_ratio, g_entropy, gaussian_evolve, h_function, j_pm_gaussian,
    thermal_isoperimetric_product, ClassicalOUParams, GaussianStateSpec, FOUR_PI_E,
};
use bosonic_geom::semigroups::{
    convolve_with, entropy_rate, evolve, PhaseDensity, QuadratureRule, SemigroupKind, SolverOptions,
    DEFAULT_RATE_STEP,
};
use bosonic_geom::verify::{run_suite, Role, SuiteConfig};
use proptest::prelude::*;

fn family() -> impl Strategy<Value = RandomFamily> {
    prop_oneof![Just(RandomFamily::FullRank), Just(RandomFamily::Diagonal), Just(RandomFamily::PureMixedEps),]
}

fn dist(a: &DensityMatrix, b: &DensityMatrix) -> f64 {
    (a.matrix() - b.matrix()).norm()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn random_states_are_density_matrices(dim in 2usize..40, seed in any::<u64>(), fam in family()) {
        let rho = random_state(dim, seed, fam).unwrap();
        let spec = rho.spectrum();
        prop_assert!((spec.iter().sum::<f64>() - 1.0).abs() < 1e-10);
        prop_assert!(spec.iter().all(|&x| x >= -1e-10));
    }

    #[test]
    fn rearrangement_keeps_spectrum_and_majorizes(dim in 2usize..24, seed in any::<u64>(), fam in family()) {
        let rho = random_state(dim, seed, fam).unwrap();
        let down = fock_rearrangement(&rho);
        prop_assert!((von_neumann_entropy(&down) - von_neumann_entropy(&rho)).abs() < 1e-10);
        prop_assert!(majorizes_states(&down, &rho, MajorizationMode::Full).unwrap().holds);
        prop_assert!(majorizes_states(&down, &rho, MajorizationMode::Fock).unwrap().holds);
    }

    #[test]
    fn relative_entropy_is_nonnegative(dim in 2usize..24, s1 in any::<u64>(), s2 in any::<u64>()) {
        let rho = random_state(dim, s1, RandomFamily::FullRank).unwrap();
        let sigma = random_state(dim, s2, RandomFamily::FullRank).unwrap();
        prop_assert!(relative_entropy(&rho, &sigma).unwrap() >= -1e-10);
        prop_assert!(relative_entropy(&rho, &rho).unwrap().abs() < 1e-10);
    }

    #[test]
    fn fock_semigroup_property(
        seed in any::<u64>(),
        s in 0.0f64..0.5,
        t in 0.0f64..0.5,
        which in 0usize..2,
    ) {
        let kind = [SemigroupKind::Attenuator, SemigroupKind::qou(1.5, 0.5).unwrap()][which];
        let rho = random_state(24, seed, RandomFamily::FullRank).unwrap();
        let opts = SolverOptions::numeric();
        let two = evolve(&evolve(&rho, kind, s, &opts).unwrap(), kind, t, &opts).unwrap();
        let one = evolve(&rho, kind, s + t, &opts).unwrap();
        prop_assert!(dist(&one, &two) < 1e-6);
    }

    #[test]
    fn gaussian_semigroup_property(
        kappa in 1.0f64..5.0,
        z in 1.0f64..3.0,
        angle in 0.0f64..3.0,
        s in 0.0f64..2.0,
        t in 0.0f64..2.0,
        which in 0usize..4,
    ) {
        let kind = [
            SemigroupKind::Heat,
            SemigroupKind::Attenuator,
            SemigroupKind::Amplifier,
            SemigroupKind::qou(1.3, 0.7).unwrap(),
        ][which];
        let spec = GaussianStateSpec::new([0.2, -0.1], kappa, z, angle).unwrap();
        let two = gaussian_evolve(&gaussian_evolve(&spec, kind, s).unwrap(), kind, t).unwrap();
        let one = gaussian_evolve(&spec, kind, s + t).unwrap();
        let (a, b) = (one.covariance(), two.covariance());
        for i in 0..2 {
            prop_assert!((one.mean[i] - two.mean[i]).abs() < 1e-9 * (1.0 + one.mean[i].abs()));
            for j in 0..2 {
                prop_assert!((a[i][j] - b[i][j]).abs() < 1e-9 * (1.0 + a[i][j].abs()));
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn atom_scaling_law(seed in any::<u64>(), t in 0.01f64..0.5, x in -0.5f64..0.5, y in -0.5f64..0.5) {
        let rho = random_state(32, seed, RandomFamily::FullRank).unwrap();
        let f = PhaseDensity::atoms(vec![[x, y], [-y, 0.3]], vec![0.4, 0.6]).unwrap();
        let lhs = convolve_with(&f, &rho, t, QuadratureRule::Exact).unwrap().state;
        let rhs = convolve_with(&f.scaled(t.sqrt()), &rho, 1.0, QuadratureRule::Exact).unwrap().state;
        prop_assert!(dist(&lhs, &rhs) < 1e-8);
    }

    #[test]
    fn heat_flow_compatibility(seed in any::<u64>(), t in 0.02f64..0.2, mu in 0.0f64..0.05, nu in 0.0f64..0.2) {
        let rho = random_state(72, seed, RandomFamily::FullRank).unwrap();
        let f = PhaseDensity::gaussian([0.0; 2], [[0.8, 0.1], [0.1, 0.5]]).unwrap();
        let opts = SolverOptions::numeric();
        let xi = mu + t * nu;
        let lhs = evolve(
            &convolve_with(&f, &rho, t, QuadratureRule::Exact).unwrap().state,
            SemigroupKind::Heat,
            xi,
            &opts,
        )
        .unwrap();
        let heated = evolve(&rho, SemigroupKind::Heat, mu, &opts).unwrap();
        let rhs = convolve_with(&f.with_added_variance(nu).unwrap(), &heated, t, QuadratureRule::Exact)
            .unwrap()
            .state;
        prop_assert!(dist(&lhs, &rhs) < 1e-5, "{}", dist(&lhs, &rhs));
    }

    #[test]
    fn translation_covariance(
        seed in any::<u64>(),
        t in 0.02f64..0.2,
        q in prop::array::uniform2(-0.3f64..0.3),
        c in prop::array::uniform2(-0.3f64..0.3),
    ) {
        let rho = random_state(96, seed, RandomFamily::FullRank).unwrap();
        let f = PhaseDensity::gaussian([0.0; 2], [[0.6, 0.0], [0.0, 0.9]]).unwrap();
        let omega = [q[0] + t.sqrt() * c[0], q[1] + t.sqrt() * c[1]];
        let lhs = displace(&convolve_with(&f, &rho, t, QuadratureRule::Exact).unwrap().state, omega).unwrap();
        let rhs = convolve_with(&f.shifted(c), &displace(&rho, q).unwrap(), t, QuadratureRule::Exact)
            .unwrap()
            .state;
        prop_assert!(dist(&lhs, &rhs) < 1e-5, "{}", dist(&lhs, &rhs));
    }

    #[test]
    fn fisher_splits_into_entropy_rates(seed in any::<u64>()) {
        let rho = random_state(64, seed, RandomFamily::FullRank).unwrap();
        let opts = SolverOptions::numeric();
        let j = quantum_fisher(&rho, DEFAULT_FISHER_STEP).unwrap().value;
        let jm = entropy_rate(&rho, SemigroupKind::Attenuator, DEFAULT_RATE_STEP, &opts).unwrap().value;
        let jp = entropy_rate(&rho, SemigroupKind::Amplifier, DEFAULT_RATE_STEP, &opts).unwrap().value;
        let sum = 2.0 * std::f64::consts::PI * (jm + jp);
        prop_assert!(j >= 0.0);
        prop_assert!((j - sum).abs() <= 2e-2 * j, "J={j} 2π(J-+J+)={sum}");
    }

    #[test]
    fn convolution_data_processing(
        s1 in any::<u64>(),
        s2 in any::<u64>(),
        t in 0.01f64..0.3,
        vf in prop::array::uniform2(0.3f64..2.0),
        vg in prop::array::uniform2(0.3f64..2.0),
    ) {
        let rho = random_state(32, s1, RandomFamily::FullRank).unwrap();
        let sigma = random_state(32, s2, RandomFamily::Diagonal).unwrap();
        let cf = [[vf[0], 0.0], [0.0, vf[1]]];
        let cg = [[vg[0], 0.0], [0.0, vg[1]]];
        let f = PhaseDensity::gaussian([0.0; 2], cf).unwrap();
        let g = PhaseDensity::gaussian([0.0; 2], cg).unwrap();
        let out_rho = convolve_with(&f, &rho, t, QuadratureRule::Exact).unwrap().state;
        let out_sigma = convolve_with(&g, &sigma, t, QuadratureRule::Exact).unwrap().state;
        // Relative entropy of centered Gaussians with diagonal covariances.
        let kl: f64 = (0..2)
            .map(|i| 0.5 * (cf[i][i] / cg[i][i] - 1.0 - (cf[i][i] / cg[i][i]).ln()))
            .sum();
        let lhs = relative_entropy(&out_rho, &out_sigma).unwrap();
        let rhs = kl + relative_entropy(&rho, &sigma).unwrap();
        prop_assert!(lhs <= rhs + 1e-6, "{lhs} > {rhs}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn maximum_entropy_at_fixed_mean(weights in prop::collection::vec(0.0f64..1.0, 2..40)) {
        prop_assume!(weights.iter().sum::<f64>() > 1e-6);
        let p = ClassicalPMF::from_weights(&weights).unwrap();
        prop_assert!(p.entropy() <= g_entropy(p.mean()) + 1e-10);
    }

    #[test]
    fn death_process_conserves_probability(weights in prop::collection::vec(0.0f64..1.0, 2..30), t in 0.0f64..3.0) {
        prop_assume!(weights.iter().sum::<f64>() > 1e-6);
        let p = ClassicalPMF::from_weights(&weights).unwrap();
        let q = death_evolve(&p, t, &DeathOptions::default()).unwrap();
        prop_assert!((q.probs().iter().sum::<f64>() - 1.0).abs() <= 1e-10);
        prop_assert!(q.probs().iter().all(|&x| x >= 0.0));
        prop_assert!(q.mean() <= p.mean() + 1e-12);
    }

    #[test]
    fn cou_contracts_at_rate_two_theta(
        theta in 0.01f64..10.0,
        sigma2 in 0.01f64..10.0,
        log_var in -6.0f64..6.0,
        t in 0.0f64..5.0,
    ) {
        let step = cou_step(&ClassicalOUParams::new(theta, sigma2).unwrap(), 10f64.powf(log_var), t).unwrap();
        prop_assert!(step.rate_margin >= -1e-12);
        prop_assert!(step.relent >= 0.0);
    }

    #[test]
    fn qou_margin_function_is_nonnegative(lambda in 0.1f64..3.0, ratio in 1.01f64..4.0, log_n in -4.0f64..4.0) {
        let h = h_function(10f64.powf(log_n), lambda * ratio, lambda).unwrap();
        prop_assert!(h >= -1e-12 * (1.0 + lambda * lambda * ratio * ratio));
    }

    #[test]
    fn gaussian_amplifier_rate_at_least_two(kappa in 1.0001f64..100.0, z in 1.0f64..50.0) {
        prop_assert!(j_pm_gaussian(kappa, z).unwrap().1 >= 2.0 - 1e-12);
    }

    #[test]
    fn thermal_isoperimetric_bounds(log_n in -3.0f64..4.0) {
        let n = 10f64.powf(log_n);
        prop_assert!(thermal_isoperimetric_product(n).unwrap() >= FOUR_PI_E * (1.0 - 1e-12));
        prop_assert!(fisher_isoperimetric_ratio(n).unwrap() >= 1.0 - 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn reports_are_consistent(seed in any::<u64>(), cases in 1usize..6, tol in 1e-14f64..1e-9, which in 0usize..2) {
        let mut cfg = SuiteConfig::for_suite(["appendix-d", "cou"][which]).unwrap();
        cfg.seed = seed;
        cfg.cases = cases;
        cfg.tolerance = tol;
        let report = run_suite(&cfg).unwrap();
        for c in &report.cases {
            prop_assert_eq!(c.passed, c.margin.is_some_and(|m| m >= -c.tolerance));
        }
        let asserted: Vec<f64> = report
            .cases
            .iter()
            .filter(|c| c.role == Role::Asserted)
            .filter_map(|c| c.margin)
            .collect();
        let min = asserted.iter().copied().fold(f64::INFINITY, f64::min);
        prop_assert_eq!(report.summary.min_margin, Some(min));
        prop_assert_eq!(report.passed(), report.failing_cases().next().is_none());
        let again = run_suite(&cfg).unwrap();
        prop_assert_eq!(report.cases, again.cases);
    }
}
