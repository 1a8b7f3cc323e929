//! Invariants checked over generated inputs.

use nvsim::bounds::{min_ratio, martingale_bound_mt};
use nvsim::demand::{DemandDistribution, GammaParams, WeibullParams};
use nvsim::km::{km_fit, KmEstimate};
use nvsim::newsvendor::{expected_cost, optimal_order, realized_cost, weibull_order, CostParams};
use nvsim::policies::{conjugate_update, CensoredObservation, OnlineGradient, Policy};
use nvsim::report::format_sig6;
use nvsim::rng::{trial_stream, StreamPurpose};
use nvsim::sim::mean_stderr;
use proptest::prelude::*;

fn weibull() -> impl Strategy<Value = WeibullParams> {
    (0.2f64..5.0, 0.5f64..3.0).prop_map(|(theta, k)| WeibullParams::new(theta, k).unwrap())
}

fn costs() -> impl Strategy<Value = CostParams> {
    (0.05f64..5.0, 0.05f64..5.0).prop_map(|(h, p)| CostParams::new(h, p).unwrap())
}

fn observation() -> impl Strategy<Value = CensoredObservation> {
    (0.0f64..5.0, 0.0f64..5.0).prop_map(|(y, d)| CensoredObservation::reveal(y, d).unwrap())
}

proptest! {
    #[test]
    fn posterior_equals_brute_force_sums(
        k in 0.5f64..3.0,
        log in prop::collection::vec(observation(), 0..200),
    ) {
        let prior = GammaParams::new(4.0, 4.0).unwrap();
        let post = log.iter().fold(prior, |p, o| conjugate_update(&p, k, o));
        let alpha = 4.0 + log.iter().filter(|o| o.uncensored()).count() as f64;
        let beta = 4.0 + log.iter().map(|o| o.sale().powf(k)).sum::<f64>();
        prop_assert_eq!(post.alpha(), alpha);
        prop_assert!((post.beta() - beta).abs() <= 1e-12 * beta);
    }

    #[test]
    fn censored_observation_hides_demand(y in 0.0f64..5.0, d in 0.0f64..5.0) {
        let obs = CensoredObservation::reveal(y, d).unwrap();
        prop_assert_eq!(obs.sale(), y.min(d));
        prop_assert_eq!(obs.uncensored(), d < y);
        if !obs.uncensored() {
            prop_assert_eq!(obs.sale(), obs.order());
        }
    }

    #[test]
    fn km_survival_is_a_survival_function(log in prop::collection::vec(observation(), 1..150)) {
        let km = km_fit(&log).unwrap();
        let s = km.survival_values();
        prop_assert!(s.iter().all(|v| (0.0..=1.0).contains(v)));
        prop_assert!(s.windows(2).all(|w| w[1] <= w[0]));
        prop_assert_eq!(km.eval(-1.0), 1.0);
    }

    #[test]
    fn km_is_permutation_invariant(log in prop::collection::vec(observation(), 1..60), seed in any::<u64>()) {
        let mut shuffled = log.clone();
        let n = shuffled.len();
        let mut state = seed;
        for i in (1..n).rev() {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            shuffled.swap(i, (state >> 33) as usize % (i + 1));
        }
        prop_assert_eq!(km_fit(&log).unwrap(), km_fit(&shuffled).unwrap());
    }

    #[test]
    fn quantile_round_trip(w in weibull(), q in 0.0f64..0.999) {
        let y = w.inverse_cdf(q).unwrap();
        prop_assert!((w.cdf(y).unwrap() - q).abs() <= 1e-12);
    }

    #[test]
    fn order_decreases_in_theta(cp in costs(), k in 0.5f64..3.0, theta in 0.1f64..10.0, bump in 1e-3f64..1.0) {
        prop_assert!(weibull_order(&cp, theta + bump, k) < weibull_order(&cp, theta, k));
        prop_assert!(weibull_order(&cp, theta, k) > 0.0);
    }

    #[test]
    fn expected_cost_is_convex(cp in costs(), w in weibull(), a in 0.0f64..4.0, b in 0.0f64..4.0) {
        let mid = expected_cost(&cp, &w, 0.5 * (a + b)).unwrap();
        let chord = 0.5 * (expected_cost(&cp, &w, a).unwrap() + expected_cost(&cp, &w, b).unwrap());
        prop_assert!(mid <= chord + 1e-8);
    }

    #[test]
    fn quantile_order_minimises_cost(cp in costs(), w in weibull(), offset in -1.0f64..1.0) {
        let ystar = optimal_order(&cp, &w);
        let y = (ystar + offset).max(0.0);
        prop_assert!(expected_cost(&cp, &w, ystar).unwrap() <= expected_cost(&cp, &w, y).unwrap() + 1e-8);
    }

    #[test]
    fn expected_cost_is_lipschitz(cp in costs(), w in weibull(), a in 0.0f64..4.0, b in 0.0f64..4.0) {
        let gap = (expected_cost(&cp, &w, a).unwrap() - expected_cost(&cp, &w, b).unwrap()).abs();
        prop_assert!(gap <= cp.max_unit_cost() * (a - b).abs() + 1e-8);
    }

    #[test]
    fn sequence_ratio_lemma(
        pairs in prop::collection::vec((0.0f64..10.0, 0.0f64..10.0), 1..50),
        anchor in 0.01f64..10.0,
    ) {
        let (mut a, mut b): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
        b.push(anchor);
        a.push(0.0);
        let lower = min_ratio(&a, &b).unwrap();
        let total = a.iter().sum::<f64>() / b.iter().sum::<f64>();
        prop_assert!(total >= lower - 1e-12);
    }

    #[test]
    fn oco_stays_in_range(
        cp in costs(),
        log in prop::collection::vec(observation(), 1..200),
    ) {
        let prior = GammaParams::new(4.0, 4.0).unwrap();
        let mut oco = OnlineGradient::from_prior(cp, &prior, 1.0).unwrap();
        let y_max = oco.y_max();
        for obs in &log {
            oco.observe(obs);
            prop_assert!((0.0..=y_max).contains(&oco.current()));
        }
    }

    #[test]
    fn sig6_round_trips(v in -1e7f64..1e7) {
        let text = format_sig6(v);
        let back: f64 = text.parse().unwrap();
        prop_assert_eq!(format_sig6(back), text.clone());
        prop_assert!((back - v).abs() <= 5e-6 * v.abs() + 1e-300);
    }
}

#[test]
fn realized_cost_averages_to_expected_cost() {
    let cp = CostParams::new(1.0 / 9.0, 1.0).unwrap();
    let w = WeibullParams::new(1.5, 2.0).unwrap();
    let mut rng = trial_stream(3, 0, StreamPurpose::Demand);
    for y in [0.2, 0.8, 1.6] {
        let costs: Vec<f64> = (0..200_000)
            .map(|_| realized_cost(&cp, y, w.sample(&mut rng)).unwrap())
            .collect();
        let (mean, se) = mean_stderr(&costs);
        let exact = expected_cost(&cp, &w, y).unwrap();
        assert!((mean - exact).abs() <= 4.0 * se, "y={y}: {mean} vs {exact} (se {se})");
    }
}

#[test]
fn weibull_samples_pass_a_ks_check() {
    let w = WeibullParams::new(0.7, 1.8).unwrap();
    let mut rng = trial_stream(4, 0, StreamPurpose::Demand);
    let n = 5000;
    let mut xs: Vec<f64> = (0..n).map(|_| w.sample(&mut rng)).collect();
    xs.sort_by(f64::total_cmp);
    let d = xs
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = w.cdf_value(x);
            (f - i as f64 / n as f64).abs().max(((i + 1) as f64 / n as f64 - f).abs())
        })
        .fold(0.0f64, f64::max);
    // DKW at level 1e-3.
    let eps = ((2.0f64 / 1e-3).ln() / (2.0 * n as f64)).sqrt();
    assert!(d <= eps, "KS distance {d} vs {eps}");
}

#[test]
fn uncensored_km_matches_ecdf() {
    let w = WeibullParams::new(2.0, 0.8).unwrap();
    let mut rng = trial_stream(8, 0, StreamPurpose::Demand);
    let draws: Vec<f64> = (0..300).map(|_| w.sample(&mut rng)).collect();
    let km = KmEstimate::from_pairs(draws.iter().map(|&d| (d, true))).unwrap();
    for &x in km.breakpoints() {
        let above = draws.iter().filter(|&&d| d > x).count() as f64 / draws.len() as f64;
        assert_eq!(km.eval(x), above);
    }
}

/// `M_t = sum (delta_i - theta* Y_i^k)` has mean zero for any order sequence
/// and stays inside `sqrt(8t) ln(2t^2/delta)` except with probability
/// `delta / t^2`.
#[test]
fn martingale_stays_inside_its_bound() {
    let theta = 1.3;
    let k = 1.5;
    let w = WeibullParams::new(theta, k).unwrap();
    let delta = 0.1;
    let t = 400u64;
    let mut finals = Vec::new();
    for rep in 0..500 {
        let mut rng = trial_stream(13, rep, StreamPurpose::Demand);
        let mut m = 0.0;
        for i in 0..t {
            let y = 0.3 + (i % 7) as f64 * 0.2;
            let obs = CensoredObservation::reveal(y, w.sample(&mut rng)).unwrap();
            m += obs.indicator() - theta * obs.sale().powf(k);
        }
        assert!(m.abs() <= martingale_bound_mt(t, delta), "rep {rep}: {m}");
        finals.push(m);
    }
    let (mean, se) = mean_stderr(&finals);
    assert!(mean.abs() <= 4.0 * se, "mean {mean} se {se}");
}
