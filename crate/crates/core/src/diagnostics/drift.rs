//! Exact one-step drift of the log relative wealth in discrete time.
//!
//! With a finite-support payoff model the conditional expectation of
//! `ln r_t^m` given the current state is a finite sum, so the submartingale
//! property of `S = ln r^m + U . H` can be checked without sampling.

use crate::diagnostics::gibbs::{gibbs_gap, lln};
use crate::engine::discrete_step;
use crate::error::{Error, Result};
use crate::payoff::PayoffModel;
use crate::simplex::SimplexVector;
use crate::strategy::survival_point;

/// Components of the one-step drift of `S` for investor `m`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriftBreakdown {
    /// `E[ln r_t^m | F_{t-1}] - ln r_{t-1}^m`.
    pub log_drift: f64,
    /// `U_t` for investor `m`.
    pub gibbs: f64,
    /// `Delta H_t = |a_t| / W_{t-1}`.
    pub dh: f64,
    /// `log_drift + U_t Delta H_t`.
    pub drift: f64,
    /// `lambda_hat . (lln lambda^m - lln pi) |a| / W_{t-1}`, a lower bound of `log_drift`.
    pub lower_bound: f64,
}

fn check_state(profile: &[SimplexVector], wealth: &[f64], m: usize) -> Result<()> {
    if profile.len() != wealth.len() {
        return Err(Error::Dimension {
            expected: wealth.len(),
            got: profile.len(),
        });
    }
    if m >= wealth.len() {
        return Err(Error::Dimension {
            expected: wealth.len(),
            got: m + 1,
        });
    }
    Ok(())
}

pub fn drift_breakdown(
    model: &PayoffModel,
    regime: usize,
    profile: &[SimplexVector],
    wealth: &[f64],
    m: usize,
) -> Result<DriftBreakdown> {
    if !model.is_discrete() {
        return Err(Error::NotDiscrete);
    }
    check_state(profile, wealth, m)?;
    let w: f64 = wealth.iter().sum();
    let mut log_drift = 0.0;
    for (p, atom) in model.enumerate_support(regime)? {
        let y = discrete_step(wealth, profile, &atom.payoff, atom.delta)?;
        let w_next: f64 = y.iter().sum();
        // ln(r'/r) = ln(Y'/Y) - ln(W'/W)
        log_drift += p * ((y[m] / wealth[m]).ln() - (w_next / w).ln());
    }
    let hat = survival_point(model, regime, w)?;
    let dh = hat.norm / w;
    let gibbs = gibbs_gap(&hat.weights, &profile[m])?;
    let penalty = if dh > 0.0 { gibbs * dh } else { 0.0 };

    let relative: Vec<f64> = wealth.iter().map(|y| y / w).collect();
    let pi: Vec<f64> = (0..hat.weights.dim())
        .map(|n| profile.iter().zip(&relative).map(|(l, r)| l[n] * r).sum())
        .collect();
    let lower_bound = hat
        .weights
        .as_slice()
        .iter()
        .zip(profile[m].as_slice())
        .zip(&pi)
        .map(|((h, l), p)| h * (lln(*l) - lln(*p)))
        .sum::<f64>()
        * dh;

    Ok(DriftBreakdown {
        log_drift,
        gibbs,
        dh,
        drift: log_drift + penalty,
        lower_bound,
    })
}

/// One-step drift of `S_t = ln r_t^m + (U . H)_t` at the given state.
pub fn submartingale_check(
    model: &PayoffModel,
    regime: usize,
    profile: &[SimplexVector],
    wealth: &[f64],
    m: usize,
) -> Result<f64> {
    drift_breakdown(model, regime, profile, wealth, m).map(|d| d.drift)
}
