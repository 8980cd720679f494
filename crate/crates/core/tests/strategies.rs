use market_survival::payoff::{Atom, DiscreteIidModel, JumpAtom, KernelSpec, PayoffModel};
use market_survival::strategy::{
    survival_continuous, survival_discrete_exact, survival_discrete_mc_with_error, Schedule, StrategyContext,
};
use market_survival::{RngStream, SimplexVector, StrategyHandle};
use proptest::prelude::*;

fn atoms(n: usize) -> impl Strategy<Value = Vec<(Vec<f64>, f64, f64)>> {
    prop::collection::vec(
        (prop::collection::vec(0.0..4.0f64, n), 0.0..0.9f64, 0.05..1.0f64),
        1..5,
    )
    .prop_filter("some payoff", |v| v.iter().any(|(x, _, _)| x.iter().sum::<f64>() > 0.0))
}

fn iid(raw: &[(Vec<f64>, f64, f64)], scale: f64) -> PayoffModel {
    let total: f64 = raw.iter().map(|(_, _, p)| p).sum();
    let mut support: Vec<(Atom, f64)> = raw
        .iter()
        .map(|(x, d, p)| (Atom::new(x.iter().map(|v| v * scale).collect(), *d), p / total))
        .collect();
    let head: f64 = support[..support.len() - 1].iter().map(|(_, p)| p).sum();
    support.last_mut().unwrap().1 = 1.0 - head;
    PayoffModel::Iid(DiscreteIidModel::new(support).unwrap())
}

proptest! {
    #[test]
    fn discrete_survival_is_homogeneous(raw in atoms(3), w in 0.01..100.0f64, c in 1e-3..1e3f64) {
        let a = survival_discrete_exact(&iid(&raw, 1.0), 0, w).unwrap();
        let b = survival_discrete_exact(&iid(&raw, c), 0, c * w).unwrap();
        for k in 0..3 {
            prop_assert!((a[k] - b[k]).abs() < 1e-12);
        }
    }

    #[test]
    fn continuous_survival_ignores_the_clock_scale(
        raw in atoms(2),
        drift in prop::collection::vec(0.0..2.0f64, 2),
        w in 0.01..100.0f64,
        c in 1e-3..1e3f64,
    ) {
        let jumps = raw
            .iter()
            .map(|(x, v, rate)| JumpAtom { jump: x.clone(), v: v * 0.5, intensity: *rate })
            .collect();
        let kernel = KernelSpec::new(jumps, drift, 0.0, 0.5).unwrap();
        let a = survival_continuous(&kernel, w).unwrap();
        let b = survival_continuous(&kernel.rescaled(c).unwrap(), w).unwrap();
        for k in 0..2 {
            prop_assert!((a[k] - b[k]).abs() < 1e-12);
        }
    }
}

#[test]
fn monte_carlo_error_shrinks_like_root_n() {
    let model = PayoffModel::Iid(
        DiscreteIidModel::new(vec![
            (Atom::new(vec![1.0, 0.0, 0.5], 0.1), 0.5),
            (Atom::new(vec![0.0, 2.0, 0.0], 0.0), 0.3),
            (Atom::new(vec![0.2, 0.2, 1.0], 0.4), 0.2),
        ])
        .unwrap(),
    );
    let exact = survival_discrete_exact(&model, 0, 3.0).unwrap();
    let mut rng = RngStream::new(1, 0);
    let (small, se_small) = survival_discrete_mc_with_error(&model, 0, 3.0, &mut rng, 1_000).unwrap();
    let (large, se_large) = survival_discrete_mc_with_error(&model, 0, 3.0, &mut rng, 100_000).unwrap();
    for k in 0..3 {
        assert!((se_small[k] / se_large[k] - 10.0).abs() < 2.0);
        assert!((small[k] - exact[k]).abs() <= 5.0 * se_small[k]);
        assert!((large[k] - exact[k]).abs() <= 5.0 * se_large[k]);
    }
}

#[test]
fn constant_perturbation_stays_away_from_survival() {
    let model = PayoffModel::Iid(DiscreteIidModel::one_hot(&[0.6, 0.4], 0.0).unwrap());
    let handle = StrategyHandle::perturbed(
        StrategyHandle::SurvivalExact,
        Schedule::Constant(0.5),
        SimplexVector::uniform(2),
    )
    .unwrap();
    let mut rng = RngStream::new(0, 1);
    for t in [1.0, 10.0, 1000.0] {
        let ctx = StrategyContext {
            model: &model,
            time: t,
            regime: 0,
            wealth: 1.0,
        };
        let l = handle.evaluate(&ctx, &mut rng).unwrap();
        assert!((l[0] - 0.55).abs() < 1e-15);
    }
}
