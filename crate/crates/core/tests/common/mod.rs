//! Helpers shared by the integration test targets.
#![allow(dead_code)]

use market_survival::engine::{consumption_exponent_series, wealth_exponent};
use market_survival::market::{EventKind, Trajectory};
use market_survival::{RngStream, SimplexVector};
use rand::Rng;
use rand_distr::Exp1;

/// Uniform draw from the open simplex (flat Dirichlet).
pub fn random_simplex(rng: &mut RngStream, n: usize) -> SimplexVector {
    let raw: Vec<f64> = (0..n).map(|_| rng.sample::<f64, _>(Exp1)).collect();
    let s: f64 = raw.iter().sum();
    SimplexVector::new(raw.iter().map(|x| x / s).collect()).unwrap()
}

/// Largest violations of the engine identities along one trajectory.
#[derive(Debug, Clone, Copy, Default)]
pub struct IdentityErrors {
    /// `W_t` against `(1 - delta_t) W_{t-1} + |A_t|`, relative to `W_t`.
    pub total_wealth: f64,
    /// Relative excess below `Y_0 E(-V)` or above `Y_0 + |X|`.
    pub wealth_bounds: f64,
    /// `W_T` against `W_0 E(theta . |X| - V)_T`, relative.
    pub exponent: f64,
}

impl IdentityErrors {
    pub fn merge(self, o: Self) -> Self {
        Self {
            total_wealth: self.total_wealth.max(o.total_wealth),
            wealth_bounds: self.wealth_bounds.max(o.wealth_bounds),
            exponent: self.exponent.max(o.exponent),
        }
    }
}

pub fn identity_errors(traj: &Trajectory) -> IdentityErrors {
    let mut e = IdentityErrors::default();
    let y0 = &traj.initial().wealth;
    let consumption = consumption_exponent_series(traj).unwrap();
    for (i, r) in traj.records.iter().enumerate().skip(1) {
        let prev = &traj.records[i - 1].state;
        // the map only applies where the event carries no drift segment
        let drift_free = r.event.segment.as_ref().is_none_or(|s| s.dx.iter().all(|x| *x == 0.0) && s.dv == 0.0);
        if matches!(r.event.kind, EventKind::Step | EventKind::Jump) && drift_free {
            let expected = (1.0 - r.event.dv) * prev.total + r.event.dx.iter().sum::<f64>();
            e.total_wealth = e.total_wealth.max((r.state.total - expected).abs() / r.state.total);
        }
        let cum_x: f64 = r.cum_x.iter().sum();
        for (m, y) in r.state.wealth.iter().enumerate() {
            let lower = y0[m] * consumption[i];
            let upper = y0[m] + cum_x;
            e.wealth_bounds = e.wealth_bounds.max((lower - y) / lower).max((y - upper) / upper);
        }
    }
    let rebuilt = traj.initial().total * wealth_exponent(traj).unwrap().value();
    let w_t = traj.last().state.total;
    e.exponent = (rebuilt - w_t).abs() / w_t;
    e
}
