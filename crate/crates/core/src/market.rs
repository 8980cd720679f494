//! Market description, wealth snapshots and recorded trajectories.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::payoff::PayoffModel;
use crate::simplex::SimplexVector;

#[derive(Debug, Clone, PartialEq)]
pub struct MarketSpec {
    pub num_investors: usize,
    pub num_assets: usize,
    pub initial_wealth: Vec<f64>,
    pub payoff: PayoffModel,
}

impl MarketSpec {
    /// Builds a spec with `M` and `N` taken from the wealth vector and model.
    pub fn new(initial_wealth: Vec<f64>, payoff: PayoffModel) -> Self {
        Self {
            num_investors: initial_wealth.len(),
            num_assets: payoff.num_assets(),
            initial_wealth,
            payoff,
        }
    }

    /// Like [`MarketSpec::new`] but fails on any violation.
    pub fn validated(initial_wealth: Vec<f64>, payoff: PayoffModel) -> Result<Self> {
        let spec = Self::new(initial_wealth, payoff);
        match validate_market(&spec).first() {
            None => Ok(spec),
            Some(v) => Err(Error::InvalidModel(v.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation(pub String);

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

/// Reports every broken invariant of `spec`; an empty list means valid.
pub fn validate_market(spec: &MarketSpec) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut push = |s: String| out.push(Violation(s));
    if spec.num_investors < 2 {
        push("M ≥ 2 required".into());
    }
    if spec.num_assets < 2 {
        push("N ≥ 2 required".into());
    }
    if spec.initial_wealth.len() != spec.num_investors {
        push(format!(
            "initial wealth has {} entries but M = {}",
            spec.initial_wealth.len(),
            spec.num_investors
        ));
    }
    if spec
        .initial_wealth
        .iter()
        .any(|y| !(y.is_finite() && *y > 0.0))
    {
        push("initial wealth must be strictly positive".into());
    }
    if spec.payoff.num_assets() != spec.num_assets {
        push(format!(
            "payoff model has {} assets but N = {}",
            spec.payoff.num_assets(),
            spec.num_assets
        ));
    }
    out
}

/// Investor wealths at one instant, with the derived total and shares.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WealthState {
    pub time: f64,
    pub wealth: Vec<f64>,
    pub total: f64,
    pub relative: Vec<f64>,
}

impl WealthState {
    pub fn new(time: f64, wealth: Vec<f64>) -> Result<Self> {
        if let Some(y) = wealth.iter().find(|y| !(y.is_finite() && **y > 0.0)) {
            return Err(Error::NonPositiveWealth(*y));
        }
        let total: f64 = wealth.iter().sum();
        let relative = wealth.iter().map(|y| y / total).collect();
        Ok(Self {
            time,
            wealth,
            total,
            relative,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EventKind {
    Initial,
    /// One period of the discrete-time market.
    Step,
    /// A jump of `(X, V)` in continuous time.
    Jump,
    /// A sampling point of the recording grid (no jump).
    Grid,
}

/// Continuous part of `(X, V)` accumulated since the previous record.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DriftSegment {
    pub duration: f64,
    pub dx: Vec<f64>,
    pub dv: f64,
    /// Increment of the continuous part of `theta . |X| - V` with `theta = 1/W_-`.
    pub dz: f64,
}

/// What happened between the previous record and this one.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PayoffEvent {
    pub time: f64,
    pub kind: EventKind,
    /// Jump of `X` (in discrete time, the payoff `A_t`).
    pub dx: Vec<f64>,
    /// Jump of `V` (in discrete time, `delta_t`).
    pub dv: f64,
    /// Total wealth just before the jump.
    pub wealth_before: f64,
    pub segment: Option<DriftSegment>,
}

impl PayoffEvent {
    pub fn initial(num_assets: usize, wealth: f64) -> Self {
        Self {
            time: 0.0,
            kind: EventKind::Initial,
            dx: vec![0.0; num_assets],
            dv: 0.0,
            wealth_before: wealth,
            segment: None,
        }
    }

    /// Jump of the exponent driver `theta . |X| - V`.
    pub fn jump_dz(&self) -> f64 {
        self.dx.iter().sum::<f64>() / self.wealth_before - self.dv
    }
}

/// Strategy data in force over the interval ending at a record.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StepInfo {
    pub regime: usize,
    pub lambda_hat: SimplexVector,
    pub strategies: Vec<SimplexVector>,
    /// Increment of `H` over the interval.
    pub dh: f64,
    /// `U^m = lambda_hat . (ln lambda_hat - ln lambda^m)` per investor.
    pub gibbs: Vec<f64>,
    /// True when `dh` is a jump of `H` (discrete time) rather than an integral.
    pub atomic: bool,
}

/// Running path integrals against `H`.
#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct Accumulators {
    pub h: f64,
    /// `(U^m . H)_t`
    pub uh: Vec<f64>,
    /// `(||lambda_hat - lambda^m||^2 . H)_t`
    pub closeness: Vec<f64>,
    /// Same, against the representative strategy of investors other than `m`.
    pub rep_closeness: Vec<f64>,
}

impl Accumulators {
    pub fn zeros(m: usize) -> Self {
        Self {
            h: 0.0,
            uh: vec![0.0; m],
            closeness: vec![0.0; m],
            rep_closeness: vec![0.0; m],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Record {
    pub state: WealthState,
    pub event: PayoffEvent,
    pub step: Option<StepInfo>,
    pub acc: Accumulators,
    /// Cumulative payoffs `X_t`.
    pub cum_x: Vec<f64>,
    /// Cumulative investment proportion `V_t`.
    pub cum_v: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trajectory {
    pub num_investors: usize,
    pub num_assets: usize,
    pub records: Vec<Record>,
}

impl Trajectory {
    pub fn new(initial: WealthState, num_assets: usize) -> Self {
        let m = initial.wealth.len();
        let event = PayoffEvent::initial(num_assets, initial.total);
        Self {
            num_investors: m,
            num_assets,
            records: vec![Record {
                state: initial,
                event,
                step: None,
                acc: Accumulators::zeros(m),
                cum_x: vec![0.0; num_assets],
                cum_v: 0.0,
            }],
        }
    }

    pub fn initial(&self) -> &WealthState {
        &self.records[0].state
    }

    pub fn last(&self) -> &Record {
        self.records.last().expect("trajectory always holds its initial state")
    }

    pub fn push(&mut self, record: Record) {
        debug_assert!(record.state.time > self.last().state.time);
        self.records.push(record);
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        self.records.iter().map(|r| r.state.time)
    }

    pub fn relative(&self, m: usize) -> impl Iterator<Item = f64> + '_ {
        self.records.iter().map(move |r| r.state.relative[m])
    }
}
