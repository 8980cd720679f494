mod common;

use market_survival::diagnostics::{
    check_survival_conditions, drift_breakdown, gibbs_gap, growth_rate, quarter_distance, submartingale_check,
    sufficient_condition_check, survival_verdict, SurvivalProxy,
};
use market_survival::engine::{run, ProfileRun};
use market_survival::market::MarketSpec;
use market_survival::payoff::{Atom, DiscreteIidModel, PayoffModel};
use market_survival::strategy::{survival_discrete_exact, Schedule};
use market_survival::{RngStream, SimplexVector, StrategyHandle};
use proptest::prelude::*;

use common::random_simplex;

fn two_point(p: f64, delta: f64) -> PayoffModel {
    PayoffModel::Iid(DiscreteIidModel::one_hot(&[p, 1.0 - p], delta).unwrap())
}

fn interior(n: usize) -> impl Strategy<Value = SimplexVector> {
    prop::collection::vec(0.01..1.0f64, n).prop_map(|raw| {
        let s: f64 = raw.iter().sum();
        SimplexVector::new(raw.iter().map(|x| x / s).collect()).unwrap()
    })
}

proptest! {
    #[test]
    fn gap_vanishes_only_on_the_diagonal(a in interior(5), b in interior(5)) {
        let gap = gibbs_gap(&a, &b).unwrap();
        prop_assert!(gap >= quarter_distance(&a, &b) - 1e-12);
        prop_assert!(gibbs_gap(&a, &a).unwrap().abs() <= 1e-12);
        if a.dist2(&b) > 1e-10 {
            prop_assert!(gap > 0.0);
        }
    }

    #[test]
    fn drift_dominates_the_log_bound(
        opponents in prop::collection::vec(interior(3), 1..4),
        own in interior(3),
        scale in -3.0..3.0f64,
        delta in 0.0..0.6f64,
    ) {
        let model = PayoffModel::Iid(
            DiscreteIidModel::new(vec![
                (Atom::new(vec![1.0, 0.0, 0.5], delta), 0.5),
                (Atom::new(vec![0.0, 2.0, 0.0], delta), 0.3),
                (Atom::new(vec![0.2, 0.2, 1.0], delta), 0.2),
            ])
            .unwrap(),
        );
        let mut profile = vec![own];
        profile.extend(opponents);
        let wealth: Vec<f64> = (0..profile.len()).map(|k| scale.exp() * (1.0 + k as f64)).collect();
        let d = drift_breakdown(&model, 0, &profile, &wealth, 0).unwrap();
        prop_assert!(d.log_drift >= d.lower_bound - 1e-12, "{d:?}");
        prop_assert!(d.drift >= -1e-12, "{d:?}");
    }
}

#[test]
fn identical_investors_have_zero_drift() {
    let model = two_point(0.6, 0.2);
    let lam = SimplexVector::new(vec![0.3, 0.7]).unwrap();
    let d = drift_breakdown(&model, 0, &[lam.clone(), lam.clone(), lam], &[1.0, 2.0, 3.0], 1).unwrap();
    assert!(d.log_drift.abs() < 1e-15);
}

#[test]
fn survival_investor_has_positive_drift_against_uniform() {
    let model = two_point(0.6, 0.0);
    let hat = survival_discrete_exact(&model, 0, 2.0).unwrap();
    let drift = submartingale_check(&model, 0, &[hat, SimplexVector::uniform(2)], &[1.0, 1.0], 0).unwrap();
    assert!(drift > 0.0);
}

#[test]
fn continuous_model_is_rejected() {
    let kernel = market_survival::KernelSpec::new(vec![], vec![1.0, 0.0], 0.0, 0.0).unwrap();
    let err = submartingale_check(
        &PayoffModel::Kernel(kernel),
        0,
        &[SimplexVector::uniform(2)],
        &[1.0],
        0,
    );
    assert!(err.is_err());
}

fn run_pair(first: StrategyHandle, second: StrategyHandle, delta: f64, horizon: f64, seed: u64) -> market_survival::Trajectory {
    run(&ProfileRun::new(
        MarketSpec::new(vec![1.0, 1.0], two_point(0.6, delta)),
        vec![first, second],
        horizon,
        seed,
    ))
    .unwrap()
}

#[test]
fn survival_against_itself_meets_every_condition() {
    let traj = run_pair(StrategyHandle::SurvivalExact, StrategyHandle::SurvivalExact, 0.3, 500.0, 1);
    let report = check_survival_conditions(&traj, 0);
    assert_eq!(report.condition_a_violations, 0);
    assert_eq!(report.uh_total, 0.0);
    assert_eq!(report.max_jump_term, 0.0);
    let v = survival_verdict(&traj, 0, &SurvivalProxy::default());
    assert_eq!(v.min_relative, 0.5);
    assert!(v.survives);
}

#[test]
fn zero_weight_on_a_paying_asset_breaks_condition_a_every_step() {
    let corner = StrategyHandle::Constant(SimplexVector::vertex(2, 0));
    let traj = run_pair(corner, StrategyHandle::SurvivalExact, 0.3, 200.0, 2);
    let report = check_survival_conditions(&traj, 0);
    assert_eq!(report.condition_a_violations, 200);
    assert!(!report.condition_a);
    assert_eq!(report.uh_total, f64::INFINITY);
}

#[test]
fn harmonic_perturbation_has_converging_uh_within_the_sufficient_bound() {
    let hat = StrategyHandle::SurvivalExact;
    let perturbed =
        StrategyHandle::perturbed(hat.clone(), Schedule::Harmonic { scale: 1.0 }, SimplexVector::uniform(2)).unwrap();
    let traj = run_pair(perturbed, hat, 0.5, 2000.0, 3);
    let report = check_survival_conditions(&traj, 0);
    assert!(report.condition_a && report.condition_b && report.condition_c, "{report:?}");
    assert!(report.uh_tail_slope.abs() < 1e-6);
    let bound = sufficient_condition_check(&traj, 0);
    assert!(bound.holds, "{bound:?}");
    assert!(bound.xi > 0.0 && bound.xi_hat > 0.0);
}

#[test]
fn deterministic_model_growth_rate_matches_the_multiplier() {
    // identical investors split W_t = W_{t-1} / 2 + 4 evenly
    let model = PayoffModel::Iid(DiscreteIidModel::deterministic(Atom::new(vec![1.0, 3.0], 0.5)).unwrap());
    let lam = StrategyHandle::Constant(SimplexVector::new(vec![0.25, 0.75]).unwrap());
    let traj = run(&ProfileRun::new(
        MarketSpec::new(vec![1.0, 1.0], model),
        vec![lam.clone(), lam],
        100.0,
        0,
    ))
    .unwrap();
    let mut w: f64 = 2.0;
    for _ in 0..100 {
        w = 0.5 * w + 4.0;
    }
    let rate = growth_rate(&traj, 0);
    assert!((rate.terminal - (w / 2.0).ln() / 100.0).abs() < 1e-14);
    assert_eq!(growth_rate(&traj, 0).rates, growth_rate(&traj, 1).rates);
}

#[test]
fn random_states_keep_the_survival_drift_nonnegative() {
    let mut rng = RngStream::new(77, 0);
    for delta in [0.0, 0.3] {
        let model = two_point(0.25, delta);
        for _ in 0..200 {
            let r = random_simplex(&mut rng, 3);
            let w: Vec<f64> = r.as_slice().iter().map(|x| 5.0 * x).collect();
            let hat = survival_discrete_exact(&model, 0, 5.0).unwrap();
            let profile = vec![hat, random_simplex(&mut rng, 2), random_simplex(&mut rng, 2)];
            assert!(submartingale_check(&model, 0, &profile, &w, 0).unwrap() >= -1e-12);
        }
    }
}
