//! Built-in scenarios backing the acceptance checks.

use serde::Serialize;

use crate::config::{
    resolve, AtomDoc, ConfigError, DiagnosticsDoc, MarketDoc, PayoffDoc, RegimeDoc, ScenarioConfig,
    ScenarioDocument, ScheduleDoc, SeedsDoc, StrategyDoc,
};
use crate::payoff::JumpAtom;

/// A catalog entry: what the scenario exercises and what a healthy run shows.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Scenario {
    pub name: &'static str,
    /// The result the scenario exercises.
    pub anchor: &'static str,
    pub expected: &'static str,
    #[serde(skip)]
    build: fn() -> ScenarioDocument,
}

impl Scenario {
    pub fn document(&self) -> ScenarioDocument {
        (self.build)()
    }

    pub fn config(&self) -> Result<ScenarioConfig, ConfigError> {
        resolve(&self.document())
    }
}

/// Probability that asset 1 pays in the two-point model.
pub const TWO_POINT_P: f64 = 0.6;

/// Asset 1 or asset 2 pays one unit, with probabilities `p` and `1 - p`.
pub fn two_point_payoff(p: f64, delta: f64) -> PayoffDoc {
    PayoffDoc::Discrete {
        atoms: vec![
            AtomDoc {
                payoff: vec![1.0, 0.0],
                delta,
                prob: p,
            },
            AtomDoc {
                payoff: vec![0.0, 1.0],
                delta,
                prob: 1.0 - p,
            },
        ],
    }
}

fn uniform_opponent() -> StrategyDoc {
    StrategyDoc::Constant {
        weights: vec![0.5, 0.5],
    }
}

fn harmonic_perturbation() -> StrategyDoc {
    StrategyDoc::Perturbed {
        base: Box::new(StrategyDoc::Survival),
        schedule: ScheduleDoc::Harmonic { scale: 1.0 },
        target: vec![0.5, 0.5],
    }
}

fn two_point(name: &str, delta: f64, strategies: Vec<StrategyDoc>, horizon: f64) -> ScenarioDocument {
    ScenarioDocument {
        name: Some(name.into()),
        description: None,
        market: MarketDoc {
            initial_wealth: vec![1.0; strategies.len()],
        },
        payoff: two_point_payoff(TWO_POINT_P, delta),
        strategies,
        horizon,
        seeds: SeedsDoc::Range { base: 0, count: 100 },
        grid: None,
        step: None,
        diagnostics: DiagnosticsDoc::default(),
        output_dir: None,
    }
}

fn dominance_2pt() -> ScenarioDocument {
    two_point("dominance-2pt", 0.0, vec![StrategyDoc::Survival, uniform_opponent()], 2000.0)
}

fn dominance_2pt_invest() -> ScenarioDocument {
    two_point("dominance-2pt-invest", 0.5, vec![StrategyDoc::Survival, uniform_opponent()], 2000.0)
}

fn growth_rates() -> ScenarioDocument {
    two_point("growth-rates", 0.0, vec![StrategyDoc::Survival, uniform_opponent()], 5000.0)
}

fn closeness_divergence() -> ScenarioDocument {
    two_point(
        "closeness-divergence",
        0.0,
        vec![uniform_opponent(), harmonic_perturbation()],
        2000.0,
    )
}

fn survival_perturbed() -> ScenarioDocument {
    two_point(
        "survival-perturbed",
        0.0,
        vec![harmonic_perturbation(), StrategyDoc::Survival],
        2000.0,
    )
}

fn jump_kernel(v: f64) -> PayoffDoc {
    PayoffDoc::Kernel {
        atoms: vec![
            JumpAtom {
                jump: vec![1.0, 0.0],
                v,
                intensity: TWO_POINT_P,
            },
            JumpAtom {
                jump: vec![0.0, 1.0],
                v,
                intensity: 1.0 - TWO_POINT_P,
            },
        ],
        drift: vec![0.0, 0.0],
        v_rate: 0.0,
        gamma_v: 0.5,
    }
}

fn continuous_jump_equivalence() -> ScenarioDocument {
    ScenarioDocument {
        name: Some("continuous-jump-equivalence".into()),
        description: None,
        market: MarketDoc {
            initial_wealth: vec![1.0, 1.0],
        },
        payoff: jump_kernel(0.2),
        strategies: vec![StrategyDoc::Survival, uniform_opponent()],
        horizon: 200.0,
        seeds: SeedsDoc::Range { base: 0, count: 20 },
        grid: Some(1.0),
        step: None,
        diagnostics: DiagnosticsDoc::default(),
        output_dir: None,
    }
}

fn continuous_drift() -> ScenarioDocument {
    let mut doc = continuous_jump_equivalence();
    doc.name = Some("continuous-drift".into());
    doc.payoff = match jump_kernel(0.1) {
        PayoffDoc::Kernel { atoms, gamma_v, .. } => PayoffDoc::Kernel {
            atoms,
            drift: vec![0.3, 0.1],
            v_rate: 0.05,
            gamma_v,
        },
        other => other,
    };
    doc.horizon = 50.0;
    doc
}

fn markov_regimes() -> ScenarioDocument {
    let regime = |label: &str, p: f64| RegimeDoc {
        label: label.into(),
        atoms: match two_point_payoff(p, 0.1) {
            PayoffDoc::Discrete { atoms } => atoms,
            _ => unreachable!(),
        },
    };
    ScenarioDocument {
        name: Some("markov-regimes".into()),
        description: None,
        market: MarketDoc {
            initial_wealth: vec![1.0, 1.0, 1.0],
        },
        payoff: PayoffDoc::Markov {
            regimes: vec![regime("calm", 0.7), regime("turbulent", 0.3)],
            transition: vec![vec![0.9, 0.1], vec![0.2, 0.8]],
            initial_regime: 0,
        },
        strategies: vec![
            StrategyDoc::Survival,
            uniform_opponent(),
            StrategyDoc::Constant {
                weights: vec![0.7, 0.3],
            },
        ],
        horizon: 2000.0,
        seeds: SeedsDoc::Range { base: 0, count: 20 },
        grid: None,
        step: None,
        diagnostics: DiagnosticsDoc::default(),
        output_dir: None,
    }
}

/// The fixed catalog, in a stable order.
pub fn catalog() -> Vec<Scenario> {
    vec![
        Scenario {
            name: "survival-perturbed",
            anchor: "survival criterion; sufficient condition via closeness",
            expected: "survival weights perturbed by eps_t = 1/t against the survival investor: \
                       U.H converges, relative wealth stays above the floor in at least 95% of seeds",
            build: survival_perturbed,
        },
        Scenario {
            name: "closeness-divergence",
            anchor: "necessity of finite closeness",
            expected: "the constant (0.5, 0.5) investor accumulates closeness without bound; \
                       the 1/t perturbation's closeness increment over [1000, 2000] is at most 1e-3",
            build: closeness_divergence,
        },
        Scenario {
            name: "dominance-2pt",
            anchor: "dominance of the survival strategy",
            expected: "survival investor (0.6, 0.4) keeps r >= 0.05 and ends with r >= 0.95 \
                       against (0.5, 0.5) when payoffs are fully consumed (delta = 0)",
            build: dominance_2pt,
        },
        Scenario {
            name: "dominance-2pt-invest",
            anchor: "dominance of the survival strategy",
            expected: "as dominance-2pt with half of wealth reinvested (delta = 0.5), \
                       which keeps the H increments bounded below",
            build: dominance_2pt_invest,
        },
        Scenario {
            name: "growth-rates",
            anchor: "maximal asymptotic growth rate of wealth",
            expected: "at T = 5000 the survival investor's (1/t) ln Y is at least every competitor's minus 1e-3",
            build: growth_rates,
        },
        Scenario {
            name: "continuous-jump-equivalence",
            anchor: "continuous-time wealth equation",
            expected: "pure-jump kernel: post-jump states equal the discrete step map applied at the jump times",
            build: continuous_jump_equivalence,
        },
        Scenario {
            name: "continuous-drift",
            anchor: "continuous-time wealth equation",
            expected: "jumps plus payoff drift and consumption rate; wealth stays within its exponent bounds",
            build: continuous_drift,
        },
        Scenario {
            name: "markov-regimes",
            anchor: "survival strategy under regime switching",
            expected: "the regime-aware survival investor gains wealth share against two constant investors",
            build: markov_regimes,
        },
    ]
}

pub fn find(name: &str) -> Option<Scenario> {
    catalog().into_iter().find(|s| s.name == name)
}
