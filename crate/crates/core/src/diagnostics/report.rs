//! Path-level verdicts computed from recorded trajectories.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::market::Trajectory;
use crate::simplex::SimplexVector;

/// Threshold on `lambda_hat^n` above which `lambda^n = 0` breaks condition (a).
pub const SUPPORT_THRESHOLD: f64 = 1e-12;

/// Least-squares slope of `ys` against `xs`; zero with fewer than two points.
pub fn ls_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len().min(ys.len());
    if n < 2 {
        return 0.0;
    }
    let mx = xs[..n].iter().sum::<f64>() / n as f64;
    let my = ys[..n].iter().sum::<f64>() / n as f64;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (x, y) in xs[..n].iter().zip(&ys[..n]) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
    }
    if sxx == 0.0 {
        0.0
    } else {
        sxy / sxx
    }
}

/// Index where the trailing fraction `frac` of `len` points begins.
fn tail_start(len: usize, frac: f64) -> usize {
    let keep = ((len as f64 * frac).ceil() as usize).clamp(2.min(len), len);
    len - keep
}

fn tail_slope(traj: &Trajectory, frac: f64, value: impl Fn(usize) -> f64) -> f64 {
    let start = tail_start(traj.records.len(), frac);
    let xs: Vec<f64> = traj.times().skip(start).collect();
    let ys: Vec<f64> = (start..traj.records.len()).map(value).collect();
    ls_slope(&xs, &ys)
}

/// `sum_t ||lambda_hat_t - lambda_t||^2 Delta H_t` over aligned series.
pub fn closeness_integral(lambda: &[SimplexVector], lambda_hat: &[SimplexVector], dh: &[f64]) -> Result<f64> {
    if lambda.len() != lambda_hat.len() || lambda.len() != dh.len() {
        return Err(Error::Dimension {
            expected: lambda.len(),
            got: lambda_hat.len().min(dh.len()),
        });
    }
    Ok(lambda
        .iter()
        .zip(lambda_hat)
        .zip(dh)
        .map(|((l, h), d)| h.dist2(l) * d)
        .sum())
}

/// Closeness integral of investor `m` at every record.
pub fn closeness_series(traj: &Trajectory, m: usize) -> Vec<f64> {
    traj.records.iter().map(|r| r.acc.closeness[m]).collect()
}

/// `H` increment `|a + b| / W_- * dG`.
pub fn h_increment(a: &[f64], b: &[f64], w_minus: f64, dg: f64) -> Result<f64> {
    if !(w_minus.is_finite() && w_minus > 0.0) {
        return Err(Error::NonPositiveWealth(w_minus));
    }
    let norm: f64 = a.iter().sum::<f64>() + b.iter().sum::<f64>();
    Ok(norm / w_minus * dg)
}

/// Finite-horizon stand-in for "inf_t r_t^m > 0".
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SurvivalProxy {
    pub floor: f64,
    /// Least-squares slope of `ln r` over the last decile must be at least this.
    pub min_tail_slope: f64,
    pub tail_fraction: f64,
}

impl Default for SurvivalProxy {
    fn default() -> Self {
        Self {
            floor: 0.05,
            min_tail_slope: -1e-4,
            tail_fraction: 0.1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SurvivalVerdict {
    pub min_relative: f64,
    pub terminal_relative: f64,
    pub tail_slope: f64,
    pub above_floor: bool,
    pub survives: bool,
}

pub fn survival_verdict(traj: &Trajectory, m: usize, proxy: &SurvivalProxy) -> SurvivalVerdict {
    let min_relative = traj.relative(m).fold(f64::INFINITY, f64::min);
    let terminal_relative = traj.last().state.relative[m];
    let tail_slope = tail_slope(traj, proxy.tail_fraction, |i| traj.records[i].state.relative[m].ln());
    let above_floor = min_relative >= proxy.floor;
    SurvivalVerdict {
        min_relative,
        terminal_relative,
        tail_slope,
        above_floor,
        survives: above_floor && tail_slope >= proxy.min_tail_slope,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GrowthSeries {
    pub times: Vec<f64>,
    pub rates: Vec<f64>,
    pub terminal: f64,
}

/// `(1/t) ln Y_t^m` at every record with `t > 0`.
pub fn growth_rate(traj: &Trajectory, m: usize) -> GrowthSeries {
    let (times, rates): (Vec<f64>, Vec<f64>) = traj
        .records
        .iter()
        .filter(|r| r.state.time > 0.0)
        .map(|r| (r.state.time, r.state.wealth[m].ln() / r.state.time))
        .unzip();
    let terminal = rates.last().copied().unwrap_or(f64::NAN);
    GrowthSeries {
        times,
        rates,
        terminal,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GrowthComparison {
    pub terminal: Vec<f64>,
    /// Investor with the highest terminal rate.
    pub leader: usize,
    /// `terminal[m] - max_{k != m} terminal[k]` per investor.
    pub margin: Vec<f64>,
}

pub fn compare_growth(traj: &Trajectory) -> GrowthComparison {
    let terminal: Vec<f64> = (0..traj.num_investors).map(|m| growth_rate(traj, m).terminal).collect();
    let leader = (0..terminal.len())
        .max_by(|a, b| terminal[*a].total_cmp(&terminal[*b]))
        .unwrap_or(0);
    let margin = (0..terminal.len())
        .map(|m| {
            let best_other = terminal
                .iter()
                .enumerate()
                .filter(|(k, _)| *k != m)
                .map(|(_, r)| *r)
                .fold(f64::NEG_INFINITY, f64::max);
            terminal[m] - best_other
        })
        .collect();
    GrowthComparison {
        terminal,
        leader,
        margin,
    }
}

/// Finite-horizon proxies for the three conditions of the survival criterion.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SurvivalConditionsReport {
    pub investor: usize,
    pub condition_a_violations: usize,
    pub uh_total: f64,
    /// Slope of `U . H` over the last decile, per unit time.
    pub uh_tail_slope: f64,
    /// Largest `U_tau Delta H_tau` at the first crossing of each integer level.
    pub max_jump_term: f64,
    pub levels_crossed: usize,
    pub condition_a: bool,
    pub condition_b: bool,
    pub condition_c: bool,
}

/// Tail slope of `U . H` below which the integral is reported as converging.
pub const UH_SLOPE_TOLERANCE: f64 = 1e-4;

pub fn check_survival_conditions(traj: &Trajectory, m: usize) -> SurvivalConditionsReport {
    let mut violations = 0;
    let mut next_level = 1.0;
    let mut levels_crossed = 0;
    let mut max_jump_term: f64 = 0.0;
    for r in &traj.records {
        let Some(step) = &r.step else { continue };
        let lam = &step.strategies[m];
        let broken = lam
            .as_slice()
            .iter()
            .zip(step.lambda_hat.as_slice())
            .any(|(l, h)| *l == 0.0 && *h > SUPPORT_THRESHOLD);
        if broken {
            violations += 1;
        }
        let uh = r.acc.uh[m];
        if uh >= next_level {
            let term = if step.atomic && step.dh > 0.0 {
                step.gibbs[m] * step.dh
            } else {
                0.0
            };
            max_jump_term = max_jump_term.max(term);
            let new_level = uh.floor() + 1.0;
            levels_crossed += if new_level.is_finite() {
                (new_level - next_level) as usize
            } else {
                1
            };
            next_level = new_level;
        }
    }
    let uh_total = traj.last().acc.uh[m];
    let uh_tail_slope = if uh_total.is_finite() {
        tail_slope(traj, 0.1, |i| traj.records[i].acc.uh[m])
    } else {
        f64::INFINITY
    };
    SurvivalConditionsReport {
        investor: m,
        condition_a_violations: violations,
        uh_total,
        uh_tail_slope,
        max_jump_term,
        levels_crossed,
        condition_a: violations == 0,
        condition_b: uh_total.is_finite() && uh_tail_slope <= UH_SLOPE_TOLERANCE,
        condition_c: max_jump_term.is_finite(),
    }
}

/// Bound `U . H <= ln(xi) / ((xi - 1) xi_hat) * closeness` along a path.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SufficientConditionReport {
    pub xi: f64,
    pub xi_hat: f64,
    pub factor: f64,
    pub closeness: f64,
    pub uh_total: f64,
    pub holds: bool,
}

pub fn sufficient_condition_check(traj: &Trajectory, m: usize) -> SufficientConditionReport {
    let (mut xi, mut xi_hat) = (f64::INFINITY, f64::INFINITY);
    for step in traj.records.iter().filter_map(|r| r.step.as_ref()) {
        xi = xi.min(step.strategies[m].min_component());
        xi_hat = xi_hat.min(step.lambda_hat.min_component());
    }
    let factor = if xi > 0.0 && xi < 1.0 && xi_hat > 0.0 {
        xi.ln() / ((xi - 1.0) * xi_hat)
    } else {
        f64::INFINITY
    };
    let closeness = traj.last().acc.closeness[m];
    let uh_total = traj.last().acc.uh[m];
    let bound = if closeness == 0.0 { 0.0 } else { factor * closeness };
    SufficientConditionReport {
        xi,
        xi_hat,
        factor,
        closeness,
        uh_total,
        holds: uh_total <= bound * (1.0 + 1e-9) + 1e-12,
    }
}

/// Time series of the quantities in the submartingale argument.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DriftLedger {
    pub times: Vec<f64>,
    /// `Z_t = ln r_t^m`
    pub z: Vec<f64>,
    /// `S_t = Z_t + (U . H)_t`
    pub s: Vec<f64>,
    pub h: Vec<f64>,
    pub closeness: Vec<f64>,
}

pub fn drift_ledger(traj: &Trajectory, m: usize) -> DriftLedger {
    let mut l = DriftLedger {
        times: Vec::new(),
        z: Vec::new(),
        s: Vec::new(),
        h: Vec::new(),
        closeness: Vec::new(),
    };
    for r in &traj.records {
        let z = r.state.relative[m].ln();
        l.times.push(r.state.time);
        l.z.push(z);
        l.s.push(z + r.acc.uh[m]);
        l.h.push(r.acc.h);
        l.closeness.push(r.acc.closeness[m]);
    }
    l
}

/// Pass count over a batch of seeds with a 95% Wilson interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BatchVerdict {
    pub seeds: usize,
    pub passing: usize,
    pub fraction: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

impl BatchVerdict {
    pub fn from_flags<I: IntoIterator<Item = bool>>(flags: I) -> Self {
        let (mut n, mut k) = (0usize, 0usize);
        for f in flags {
            n += 1;
            k += f as usize;
        }
        if n == 0 {
            return Self {
                seeds: 0,
                passing: 0,
                fraction: f64::NAN,
                ci_low: 0.0,
                ci_high: 1.0,
            };
        }
        let z = 1.959963984540054;
        let nf = n as f64;
        let p = k as f64 / nf;
        let denom = 1.0 + z * z / nf;
        let centre = (p + z * z / (2.0 * nf)) / denom;
        let half = z * (p * (1.0 - p) / nf + z * z / (4.0 * nf * nf)).sqrt() / denom;
        Self {
            seeds: n,
            passing: k,
            fraction: p,
            ci_low: (centre - half).max(0.0),
            ci_high: (centre + half).min(1.0),
        }
    }
}
