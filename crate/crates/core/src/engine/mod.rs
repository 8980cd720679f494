//! Wealth evolution under a strategy profile.
//!
//! The discrete engine applies the payoff-division recursion step by step.
//! The continuous engine is event driven: jumps of `(X, V)` are drawn from the
//! kernel and applied with the same division rule, while between jumps the
//! interacting ODE `dY^m = (sum_n share^{m,n} b^n - v_rate Y^m) dt` is
//! integrated (exactly when `b = 0`, by fixed-step RK4 otherwise).

mod exponent;
mod ode;

pub use exponent::{
    consumption_exponent_series, stochastic_exponent, wealth_exponent, ExponentAccumulator,
};
pub use ode::{rk4_step, substeps};

use crate::diagnostics::gibbs_gap;
use crate::error::{Error, Result};
use crate::market::{
    validate_market, Accumulators, DriftSegment, EventKind, MarketSpec, PayoffEvent, Record,
    StepInfo, Trajectory, WealthState,
};
use crate::payoff::{next_jump, KernelSpec, PayoffModel};
use crate::rng::RngStream;
use crate::simplex::SimplexVector;
use crate::strategy::{representative, survival_point, StrategyContext, StrategyHandle};

/// Stream id of the payoff generator; strategy `m` uses `STRATEGY_STREAM + m`.
pub const PAYOFF_STREAM: u64 = 0;
pub const STRATEGY_STREAM: u64 = 1;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorConfig {
    /// Maximum RK4 substep between jumps.
    pub step: f64,
    /// Uniform recording interval; `None` records only jumps and the horizon.
    pub grid: Option<f64>,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self {
            step: 1e-2,
            grid: Some(1.0),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProfileRun {
    pub market: MarketSpec,
    pub strategies: Vec<StrategyHandle>,
    /// Number of steps (discrete) or model time (continuous).
    pub horizon: f64,
    pub seed: u64,
    pub integrator: IntegratorConfig,
}

impl ProfileRun {
    pub fn new(market: MarketSpec, strategies: Vec<StrategyHandle>, horizon: f64, seed: u64) -> Self {
        Self {
            market,
            strategies,
            horizon,
            seed,
            integrator: IntegratorConfig::default(),
        }
    }

    pub fn with_integrator(mut self, integrator: IntegratorConfig) -> Self {
        self.integrator = integrator;
        self
    }

    fn check(&self) -> Result<()> {
        if self.strategies.len() != self.market.initial_wealth.len() {
            return Err(Error::Dimension {
                expected: self.market.initial_wealth.len(),
                got: self.strategies.len(),
            });
        }
        // a lone investor is allowed here for closed-form checks
        if let Some(v) = validate_market(&self.market)
            .into_iter()
            .find(|v| v.0 != "M ≥ 2 required")
        {
            return Err(Error::InvalidModel(v.0));
        }
        if !(self.horizon.is_finite() && self.horizon >= 0.0) {
            return Err(Error::NonFinite(format!("horizon {}", self.horizon)));
        }
        Ok(())
    }
}

fn check_step_inputs(y_prev: &[f64], profile: &[SimplexVector], payoff: &[f64], delta: f64) -> Result<()> {
    if profile.len() != y_prev.len() {
        return Err(Error::Dimension {
            expected: y_prev.len(),
            got: profile.len(),
        });
    }
    if let Some(y) = y_prev.iter().find(|y| !(y.is_finite() && **y > 0.0)) {
        return Err(Error::NonPositiveWealth(*y));
    }
    if payoff.iter().any(|a| !a.is_finite() || *a < 0.0) {
        return Err(Error::NonFinite("payoff must be finite and non-negative".into()));
    }
    if !(0.0..1.0).contains(&delta) {
        return Err(Error::NonFinite(format!("delta {delta} outside [0, 1)")));
    }
    if let Some(l) = profile.iter().find(|l| l.dim() != payoff.len()) {
        return Err(Error::Dimension {
            expected: payoff.len(),
            got: l.dim(),
        });
    }
    Ok(())
}

/// Shares `lambda^{m,n} Y^m / sum_k lambda^{k,n} Y^k` of asset `n` received by
/// investor `m`, with the convention `0/0 = 1/M`. Indexed `[n][m]`.
pub fn payoff_shares(y: &[f64], profile: &[SimplexVector]) -> Vec<Vec<f64>> {
    let m = y.len();
    let n_assets = profile[0].dim();
    (0..n_assets)
        .map(|n| {
            let denom: f64 = profile.iter().zip(y).map(|(l, yk)| l[n] * yk).sum();
            if denom > 0.0 {
                profile.iter().zip(y).map(|(l, yk)| l[n] * yk / denom).collect()
            } else {
                vec![1.0 / m as f64; m]
            }
        })
        .collect()
}

/// One period: `Y^m = (1 - delta) Y^m + sum_n share^{m,n} A^n`.
pub fn discrete_step(y_prev: &[f64], profile: &[SimplexVector], payoff: &[f64], delta: f64) -> Result<Vec<f64>> {
    check_step_inputs(y_prev, profile, payoff, delta)?;
    let shares = payoff_shares(y_prev, profile);
    let mut y: Vec<f64> = y_prev.iter().map(|v| (1.0 - delta) * v).collect();
    for (row, a) in shares.iter().zip(payoff) {
        for (ym, s) in y.iter_mut().zip(row) {
            *ym += s * a;
        }
    }
    Ok(y)
}

fn evaluate_profile(
    strategies: &[StrategyHandle],
    ctx: &StrategyContext<'_>,
    rngs: &mut [RngStream],
) -> Result<Vec<SimplexVector>> {
    strategies
        .iter()
        .zip(rngs.iter_mut())
        .map(|(s, rng)| s.evaluate(ctx, rng))
        .collect()
}

/// Per-investor densities (per unit of `H`) of the path integrals.
struct Densities {
    gibbs: Vec<f64>,
    closeness: Vec<f64>,
    rep_closeness: Vec<f64>,
}

fn densities(lambda_hat: &SimplexVector, profile: &[SimplexVector], relative: &[f64]) -> Result<Densities> {
    let m = profile.len();
    let mut d = Densities {
        gibbs: Vec::with_capacity(m),
        closeness: Vec::with_capacity(m),
        rep_closeness: Vec::with_capacity(m),
    };
    for (k, lam) in profile.iter().enumerate() {
        d.gibbs.push(gibbs_gap(lambda_hat, lam)?);
        d.closeness.push(lambda_hat.dist2(lam));
        // a coalition whose wealth has underflowed contributes nothing
        let rep = match representative(profile, relative, k) {
            Ok(r) => lambda_hat.dist2(&r),
            Err(Error::EmptyCoalition) => 0.0,
            Err(e) => return Err(e),
        };
        d.rep_closeness.push(rep);
    }
    Ok(d)
}

fn advance(acc: &mut Accumulators, d: &Densities, dh: f64) {
    acc.h += dh;
    for k in 0..d.gibbs.len() {
        // 0 * inf stays 0: no selection pressure, no penalty
        if dh > 0.0 {
            acc.uh[k] += d.gibbs[k] * dh;
        }
        acc.closeness[k] += d.closeness[k] * dh;
        acc.rep_closeness[k] += d.rep_closeness[k] * dh;
    }
}

fn strategy_rngs(seed: u64, m: usize) -> Vec<RngStream> {
    (0..m as u64)
        .map(|k| RngStream::new(seed, STRATEGY_STREAM + k))
        .collect()
}

/// Runs the discrete-time market for `horizon` steps.
pub fn run_discrete(run: &ProfileRun) -> Result<Trajectory> {
    run.check()?;
    let model = &run.market.payoff;
    if !model.is_discrete() {
        return Err(Error::NotDiscrete);
    }
    let steps = run.horizon.round() as usize;
    let m = run.strategies.len();
    let mut traj = Trajectory::new(
        WealthState::new(0.0, run.market.initial_wealth.clone())?,
        model.num_assets(),
    );
    let mut payoff_rng = RngStream::new(run.seed, PAYOFF_STREAM);
    let mut rngs = strategy_rngs(run.seed, m);
    let mut regime = model.initial_regime();
    let mut acc = Accumulators::zeros(m);
    let mut cum_x = vec![0.0; model.num_assets()];
    let mut cum_v = 0.0;

    for t in 1..=steps {
        let prev = &traj.last().state;
        let w_prev = prev.total;
        let ctx = StrategyContext {
            model,
            time: t as f64,
            regime,
            wealth: w_prev,
        };
        let profile = evaluate_profile(&run.strategies, &ctx, &mut rngs)?;
        let hat = survival_point(model, regime, w_prev)?;
        let dh = hat.norm / w_prev;
        let d = densities(&hat.weights, &profile, &prev.relative)?;
        advance(&mut acc, &d, dh);

        let (atom, next_regime) = model.sample_discrete(regime, &mut payoff_rng)?;
        let y = discrete_step(&prev.wealth, &profile, &atom.payoff, atom.delta)?;
        for (c, a) in cum_x.iter_mut().zip(&atom.payoff) {
            *c += a;
        }
        cum_v += atom.delta;
        let state = WealthState::new(t as f64, y)?;
        let record = Record {
            event: PayoffEvent {
                time: t as f64,
                kind: EventKind::Step,
                dx: atom.payoff,
                dv: atom.delta,
                wealth_before: w_prev,
                segment: None,
            },
            step: Some(StepInfo {
                regime,
                lambda_hat: hat.weights,
                strategies: profile,
                dh,
                gibbs: d.gibbs,
                atomic: true,
            }),
            state,
            acc: acc.clone(),
            cum_x: cum_x.clone(),
            cum_v,
        };
        traj.push(record);
        regime = next_regime;
    }
    Ok(traj)
}

/// Layout of the augmented ODE state: wealths, then `H`, `U.H`, closeness,
/// representative closeness, then the continuous exponent driver.
#[derive(Clone, Copy)]
struct Layout {
    m: usize,
}

impl Layout {
    fn len(&self) -> usize {
        4 * self.m + 2
    }
    fn h(&self) -> usize {
        self.m
    }
    fn uh(&self, k: usize) -> usize {
        self.m + 1 + k
    }
    fn closeness(&self, k: usize) -> usize {
        2 * self.m + 1 + k
    }
    fn rep(&self, k: usize) -> usize {
        3 * self.m + 1 + k
    }
    fn dz(&self) -> usize {
        4 * self.m + 1
    }
}

struct ContinuousSystem<'a> {
    model: &'a PayoffModel,
    kernel: &'a KernelSpec,
    strategies: &'a [StrategyHandle],
    layout: Layout,
    exact_wealth: bool,
    scratch_rngs: Vec<RngStream>,
}

impl ContinuousSystem<'_> {
    fn profile_at(&mut self, t: f64, y: &[f64]) -> Result<(Vec<SimplexVector>, f64)> {
        let w: f64 = y.iter().sum();
        let ctx = StrategyContext {
            model: self.model,
            time: t,
            regime: 0,
            wealth: w,
        };
        Ok((evaluate_profile(self.strategies, &ctx, &mut self.scratch_rngs)?, w))
    }

    /// Derivative of the full augmented state.
    fn derivative(&mut self, t: f64, s: &[f64]) -> Result<Vec<f64>> {
        let lay = self.layout;
        let m = lay.m;
        let y = &s[..m];
        if y.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
            return Err(Error::Integration { time: t });
        }
        let (profile, w) = self.profile_at(t, y)?;
        let hat = survival_point(self.model, 0, w)?;
        let rate = hat.norm / w;
        let relative: Vec<f64> = y.iter().map(|v| v / w).collect();
        let d = densities(&hat.weights, &profile, &relative)?;
        let b = self.kernel.drift();
        let v_rate = self.kernel.v_rate();
        let mut out = vec![0.0; lay.len()];
        let shares = payoff_shares(y, &profile);
        for k in 0..m {
            let inflow: f64 = shares.iter().zip(b).map(|(row, bn)| row[k] * bn).sum();
            out[k] = inflow - v_rate * y[k];
            out[lay.uh(k)] = if rate > 0.0 { d.gibbs[k] * rate } else { 0.0 };
            out[lay.closeness(k)] = d.closeness[k] * rate;
            out[lay.rep(k)] = d.rep_closeness[k] * rate;
        }
        out[lay.h()] = rate;
        out[lay.dz()] = b.iter().sum::<f64>() / w - v_rate;
        Ok(out)
    }

    fn step(&mut self, t: f64, s: &[f64], dt: f64) -> Result<Vec<f64>> {
        let m = self.layout.m;
        let next = if self.exact_wealth {
            // wealth decays exactly; the accumulators do not feed back, so
            // RK4 on them reduces to Simpson's rule with exact wealth nodes
            let v_rate = self.kernel.v_rate();
            let decay = |h: f64| (-v_rate * h).exp();
            let mut nodes = Vec::with_capacity(3);
            for h in [0.0, 0.5 * dt, dt] {
                let mut node = s.to_vec();
                let f = decay(h);
                for v in node.iter_mut().take(m) {
                    *v *= f;
                }
                nodes.push(node);
            }
            let f0 = self.derivative(t, &nodes[0])?;
            let f1 = self.derivative(t + 0.5 * dt, &nodes[1])?;
            let f2 = self.derivative(t + dt, &nodes[2])?;
            let mut out = nodes.pop().expect("three nodes");
            for i in m..out.len() {
                out[i] = s[i] + dt / 6.0 * (f0[i] + 4.0 * f1[i] + f2[i]);
            }
            out
        } else {
            let mut err = None;
            let mut f = |tt: f64, ss: &[f64]| match self.derivative(tt, ss) {
                Ok(v) => v,
                Err(e) => {
                    err.get_or_insert(e);
                    vec![f64::NAN; ss.len()]
                }
            };
            let out = rk4_step(&mut f, t, s, dt);
            if let Some(e) = err {
                return Err(e);
            }
            out
        };
        // U.H may legitimately be +inf; everything else must stay finite
        let lay = self.layout;
        let finite = next
            .iter()
            .enumerate()
            .all(|(i, v)| v.is_finite() || (i >= lay.uh(0) && i < lay.uh(m) && *v == f64::INFINITY));
        if !finite || next[..m].iter().any(|v| *v <= 0.0) {
            return Err(Error::Integration { time: t + dt });
        }
        Ok(next)
    }
}

/// Runs the continuous-time market up to model time `horizon`.
pub fn run_continuous(run: &ProfileRun) -> Result<Trajectory> {
    run.check()?;
    let model = &run.market.payoff;
    let kernel = model.as_kernel()?;
    if run.strategies.iter().any(|s| s.uses_rng()) {
        return Err(Error::InvalidStrategy(
            "Monte Carlo strategies need a discrete payoff model".into(),
        ));
    }
    let IntegratorConfig { step, grid } = run.integrator;
    if !(step.is_finite() && step > 0.0) || grid.is_some_and(|g| !(g.is_finite() && g > 0.0)) {
        return Err(Error::NonFinite("integrator step and grid must be positive".into()));
    }
    let m = run.strategies.len();
    let n_assets = kernel.num_assets();
    let horizon = run.horizon;
    let mut sys = ContinuousSystem {
        model,
        kernel,
        strategies: &run.strategies,
        layout: Layout { m },
        exact_wealth: kernel.drift().iter().all(|b| *b == 0.0),
        scratch_rngs: strategy_rngs(run.seed, m),
    };
    let lay = Layout { m };
    let mut traj = Trajectory::new(WealthState::new(0.0, run.market.initial_wealth.clone())?, n_assets);
    let mut payoff_rng = RngStream::new(run.seed, PAYOFF_STREAM);

    let mut state = vec![0.0; lay.len()];
    state[..m].copy_from_slice(&run.market.initial_wealth);
    let mut t = 0.0;
    let mut pending_jump = next_jump(kernel, &mut payoff_rng, 0.0);
    let mut grid_index = 1u64;
    let mut cum_x = vec![0.0; n_assets];
    let mut cum_v = 0.0;
    // segment start: time and state snapshot
    let mut seg_t0 = 0.0;
    let mut seg_state = state.clone();

    while t < horizon {
        let grid_t = grid.map_or(f64::INFINITY, |g| g * grid_index as f64);
        let jump_t = pending_jump.map_or(f64::INFINITY, |(tj, _)| tj);
        let target = horizon.min(grid_t).min(jump_t);

        let (n, dt) = substeps(t, target, step);
        for i in 0..n {
            let ti = t + i as f64 * dt;
            state = sys.step(ti, &state, dt)?;
        }
        t = target;

        let jump_now = jump_t <= target;
        let duration = t - seg_t0;
        let segment = DriftSegment {
            duration,
            dx: kernel.drift().iter().map(|b| b * duration).collect(),
            dv: kernel.v_rate() * duration,
            dz: state[lay.dz()] - seg_state[lay.dz()],
        };
        for (c, d) in cum_x.iter_mut().zip(&segment.dx) {
            *c += d;
        }
        cum_v += segment.dv;

        let (profile, w_before) = sys.profile_at(t, &state[..m])?;
        let hat = survival_point(model, 0, w_before)?;
        let relative: Vec<f64> = state[..m].iter().map(|v| v / w_before).collect();
        let gibbs = densities(&hat.weights, &profile, &relative)?.gibbs;

        let (kind, dx, dv) = if jump_now {
            let (_, idx) = pending_jump.expect("jump pending");
            let atom = &kernel.atoms()[idx];
            let y = discrete_step(&state[..m], &profile, &atom.jump, atom.v)?;
            state[..m].copy_from_slice(&y);
            for (c, x) in cum_x.iter_mut().zip(&atom.jump) {
                *c += x;
            }
            cum_v += atom.v;
            pending_jump = next_jump(kernel, &mut payoff_rng, t);
            (EventKind::Jump, atom.jump.clone(), atom.v)
        } else {
            (EventKind::Grid, vec![0.0; n_assets], 0.0)
        };
        while grid.is_some_and(|g| g * grid_index as f64 <= t) {
            grid_index += 1;
        }

        let acc = Accumulators {
            h: state[lay.h()],
            uh: (0..m).map(|k| state[lay.uh(k)]).collect(),
            closeness: (0..m).map(|k| state[lay.closeness(k)]).collect(),
            rep_closeness: (0..m).map(|k| state[lay.rep(k)]).collect(),
        };
        let record = Record {
            state: WealthState::new(t, state[..m].to_vec())?,
            event: PayoffEvent {
                time: t,
                kind,
                dx,
                dv,
                wealth_before: w_before,
                segment: Some(segment),
            },
            step: Some(StepInfo {
                regime: 0,
                lambda_hat: hat.weights,
                strategies: profile,
                dh: state[lay.h()] - seg_state[lay.h()],
                gibbs,
                atomic: false,
            }),
            acc,
            cum_x: cum_x.clone(),
            cum_v,
        };
        traj.push(record);
        seg_t0 = t;
        seg_state = state.clone();
    }
    Ok(traj)
}

/// Dispatches on the payoff model's time setting.
pub fn run(run: &ProfileRun) -> Result<Trajectory> {
    if run.market.payoff.is_discrete() {
        run_discrete(run)
    } else {
        run_continuous(run)
    }
}
