//! Stochastic exponents of finite-variation drivers.
//!
//! For a driver `Z` with continuous part `Z^c` and jumps `dZ_s > -1`,
//! `E(Z)_t = exp(Z^c_t) * prod_{s <= t} (1 + dZ_s)`. Values are kept in log
//! form so long horizons neither overflow nor underflow.

use crate::error::{Error, Result};
use crate::market::{EventKind, Trajectory};

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ExponentAccumulator {
    log_value: f64,
}

impl ExponentAccumulator {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds a continuous increment `dz_c` followed by a jump `dz_jump`.
    pub fn push(&mut self, dz_c: f64, dz_jump: f64) -> Result<()> {
        if !(dz_jump > -1.0) {
            return Err(Error::ExponentJump(dz_jump));
        }
        if !dz_c.is_finite() || !dz_jump.is_finite() {
            return Err(Error::NonFinite("exponent increment".into()));
        }
        self.log_value += dz_c + dz_jump.ln_1p();
        Ok(())
    }

    pub fn value(&self) -> f64 {
        self.log_value.exp()
    }

    pub fn log_value(&self) -> f64 {
        self.log_value
    }
}

/// `E(Z)` for an ordered list of `(continuous increment, jump)` pairs.
pub fn stochastic_exponent(increments: &[(f64, f64)]) -> Result<ExponentAccumulator> {
    let mut acc = ExponentAccumulator::new();
    for &(c, j) in increments {
        acc.push(c, j)?;
    }
    Ok(acc)
}

/// `E(theta . |X| - V)_T` rebuilt from the recorded events, so that
/// `W_T = W_0 * E(...)` can be checked against the engine.
pub fn wealth_exponent(traj: &Trajectory) -> Result<ExponentAccumulator> {
    let increments: Vec<(f64, f64)> = traj
        .records
        .iter()
        .skip(1)
        .map(|r| {
            let c = r.event.segment.as_ref().map_or(0.0, |s| s.dz);
            let j = match r.event.kind {
                EventKind::Step | EventKind::Jump => r.event.jump_dz(),
                _ => 0.0,
            };
            (c, j)
        })
        .collect();
    stochastic_exponent(&increments)
}

/// `E(-V)_t` at every record.
pub fn consumption_exponent_series(traj: &Trajectory) -> Result<Vec<f64>> {
    let mut acc = ExponentAccumulator::new();
    let mut out = Vec::with_capacity(traj.records.len());
    for r in &traj.records {
        if r.event.kind != EventKind::Initial {
            let c = r.event.segment.as_ref().map_or(0.0, |s| -s.dv);
            acc.push(c, -r.event.dv)?;
        }
        out.push(acc.value());
    }
    Ok(out)
}
