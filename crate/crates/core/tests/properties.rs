use proptest::prelude::*;

use shadowcorr::analytic::{
    check_ordering, cm_probe_with_tolerance, mix_expectation, ClusterParams, ClusterTransform, GridParams,
    GridTransform, InterferenceTransform, PoissonLogAttenuation,
};
use shadowcorr::experiment::csv::format_sig;
use shadowcorr::geometry::{
    count_crossings, grid_cell, sample_ppp, sample_segments, segments_intersect, OriginIndex, Point, Window,
};
use shadowcorr::metrics::{delay_tail_from_probabilities, paired_difference};
use shadowcorr::simulate::{interference_values, laplace_from_samples, Deployment, Scenario};
use shadowcorr::special::{marcum_q1, poisson_support};
use shadowcorr::{CorrelationMode, Seed};

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig {
        cases,
        ..ProptestConfig::default()
    }
}

fn point() -> impl Strategy<Value = Point> {
    (-20.0..20.0f64, -20.0..20.0f64).prop_map(|(x, y)| Point::new(x, y))
}

proptest! {
    #![proptest_config(config(64))]

    #[test]
    fn grid_cell_contains_its_point(p in point(), delta in 0.1..20.0f64) {
        let (i, j) = grid_cell(p, delta);
        prop_assert!((i as f64 - 0.5) * delta <= p.x + 1e-9 && p.x < (i as f64 + 0.5) * delta + 1e-9);
        prop_assert!((j as f64 - 0.5) * delta <= p.y + 1e-9 && p.y < (j as f64 + 0.5) * delta + 1e-9);
    }

    #[test]
    fn intersection_is_symmetric(a in point(), b in point(), c in point(), d in point()) {
        let x = segments_intersect(a, b, c, d);
        prop_assert_eq!(x, segments_intersect(c, d, a, b));
        prop_assert_eq!(x, segments_intersect(b, a, d, c));
    }

    #[test]
    fn origin_index_agrees_with_direct_count(seed in 0u64..1000, lb in 0.05..1.0f64, len in 0.5..8.0f64) {
        let window = Window::new(10.0).unwrap();
        let segs = sample_segments(lb, len, window, Seed::new(seed, 0)).unwrap();
        let pts = sample_ppp(1.0, window, Seed::new(seed, 1)).unwrap();
        let index = OriginIndex::new(&segs);
        for p in &pts.points {
            prop_assert_eq!(index.count(*p), count_crossings(&segs, Point::ORIGIN, *p));
        }
    }

    #[test]
    fn sampling_is_a_function_of_the_seed(seed in any::<u64>(), rep in 0u64..100) {
        let w = Window::new(5.0).unwrap();
        let a = sample_ppp(1.5, w, Seed::new(seed, rep)).unwrap();
        let b = sample_ppp(1.5, w, Seed::new(seed, rep)).unwrap();
        prop_assert_eq!(a.points, b.points);
        prop_assert!(w.contains(&Point::ORIGIN));
    }

    #[test]
    fn log_attenuation_law_moments(k in 0.01..1.0f64, mu in 0.0..30.0f64) {
        let law = PoissonLogAttenuation::new(k, mu).unwrap();
        let atoms = law.atoms(1e-14);
        let mass: f64 = atoms.iter().map(|a| a.1).sum();
        let mean: f64 = atoms.iter().map(|a| a.0 * a.1).sum();
        prop_assert!((mass - 1.0).abs() < 1e-12);
        prop_assert!((mean - law.expectation()).abs() < 1e-10);
        prop_assert!(law.second_moment() >= law.expectation().powi(2) - 1e-15);
        // 1/(1+aT) is convex in T
        let a = 3.0;
        prop_assert!(mix_expectation(a, &law, 1e-12) >= 1.0 / (1.0 + a * law.expectation()) - 1e-12);
    }

    #[test]
    fn poisson_support_covers_requested_mass(mu in 0.0..500.0f64) {
        let atoms = poisson_support(mu, 1e-10);
        let mass: f64 = atoms.iter().map(|a| a.1).sum();
        prop_assert!(mass > 1.0 - 1e-9 && mass < 1.0 + 1e-12);
    }

    #[test]
    fn marcum_is_a_survival_function(a in 0.0..6.0f64, b in 0.0..8.0f64, db in 0.0..2.0f64) {
        let q = marcum_q1(a, b);
        prop_assert!((0.0..=1.0 + 1e-12).contains(&q));
        prop_assert!(marcum_q1(a, b + db) <= q + 1e-12);
        prop_assert!(marcum_q1(a + 0.5, b) >= q - 1e-12);
    }

    #[test]
    fn formatted_numbers_keep_six_digits(mantissa in 1.0..10.0f64, exp in -12i32..12, neg in any::<bool>()) {
        let v = if neg { -mantissa } else { mantissa } * 10f64.powi(exp);
        let back: f64 = format_sig(v).parse().unwrap();
        prop_assert!(((back - v) / v).abs() <= 5.1e-6, "{} -> {}", v, format_sig(v));
    }

    #[test]
    fn delay_tail_in_unit_interval_and_nonincreasing(ps in proptest::collection::vec(0.0..=1.0f64, 1..200)) {
        let d = delay_tail_from_probabilities(&ps, 30);
        prop_assert!(d.tail.windows(2).all(|w| w[1] <= w[0] + 1e-15));
        prop_assert!(d.tail.iter().all(|t| (0.0..=1.0).contains(t)));
        prop_assert_eq!(d.censored_mass, d.tail[29]);
    }

    #[test]
    fn paired_difference_of_identical_samples_is_zero(xs in proptest::collection::vec(-5.0..5.0f64, 2..50)) {
        let d = paired_difference(&xs, &xs);
        prop_assert_eq!(d.value, 0.0);
        prop_assert_eq!(d.stderr, 0.0);
    }
}

proptest! {
    #![proptest_config(config(8))]

    #[test]
    fn empirical_laplace_is_a_decreasing_unit_curve(seed in 0u64..1000, delta in 0.5..10.0f64, k in 0.01..1.0f64) {
        let sc = Scenario::new(
            Deployment::Ppp { intensity: 1.0 },
            shadowcorr::shadowing::ShadowModel::Grid { cell_size: delta, obstacle_intensity: 1.0, attenuation: k },
            CorrelationMode::Correlated,
            4.0,
        ).unwrap();
        let xs = interference_values(&sc, 200, seed).unwrap();
        let s = [0.0, 0.01, 0.1, 1.0, 10.0];
        let c = laplace_from_samples(&xs, &s);
        prop_assert_eq!(c.values[0], 1.0);
        prop_assert!(c.values.windows(2).all(|w| w[1] <= w[0]));
        prop_assert!(c.values.iter().all(|v| (0.0..=1.0).contains(v)));
    }

    #[test]
    fn grid_transform_ordering_and_complete_monotonicity(
        delta in 0.5..10.0f64, lb in 0.1..2.0f64, k in 0.05..0.9f64, rho in prop_oneof![Just(0.0), 0.1..0.5f64]
    ) {
        let t = GridTransform::new(GridParams::new(1.0, 4.0, delta, lb, k).with_exclusion(rho)).unwrap();
        let s_grid = [0.05, 0.3, 1.0, 3.0];
        let cor = t.curve(&s_grid, CorrelationMode::Correlated).unwrap();
        let ind = t.curve(&s_grid, CorrelationMode::Independent).unwrap();
        prop_assert!(check_ordering(&cor, &ind).unwrap().holds);
        for mode in CorrelationMode::BOTH {
            let f = |s: f64| t.laplace(s, mode).unwrap();
            prop_assert!(cm_probe_with_tolerance(f, 3, &[0.2, 1.0], 0.1, t.tolerance()));
        }
    }

    #[test]
    fn cluster_transform_ordering(ld in 0.5..10.0f64, rd in 0.3..3.0f64, k in 0.05..0.9f64) {
        let t = ClusterTransform::new(ClusterParams::new(1.0 / ld, ld, rd, 4.0, 1.0, k)).unwrap();
        let s_grid = [0.05, 0.5, 5.0];
        let cor = t.curve(&s_grid, CorrelationMode::Correlated).unwrap();
        let ind = t.curve(&s_grid, CorrelationMode::Independent).unwrap();
        prop_assert!(check_ordering(&cor, &ind).unwrap().holds);
        prop_assert!(cor.values.windows(2).all(|w| w[1] <= w[0] + 2.0 * t.tolerance()));
    }
}
