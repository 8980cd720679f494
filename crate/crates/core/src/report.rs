//! Per-seed runs, their summaries, and the text formats they are written in.

use std::io::{self, Write};

use serde::Serialize;

use crate::config::ScenarioConfig;
use crate::diagnostics::{
    check_survival_conditions, compare_growth, growth_rate, sufficient_condition_check, survival_verdict,
    BatchVerdict, GrowthComparison, SufficientConditionReport, SurvivalVerdict, SurvivalConditionsReport,
};
use crate::engine::{run, wealth_exponent, ProfileRun};
use crate::error::Result;
use crate::market::Trajectory;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InvestorSummary {
    pub investor: usize,
    pub terminal_wealth: f64,
    pub terminal_relative: f64,
    pub uh_total: f64,
    pub closeness: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub survival: Option<SurvivalVerdict>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub growth_rate: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub conditions: Option<SurvivalConditionsReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sufficient: Option<SufficientConditionReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunSummary {
    pub seed: u64,
    pub records: usize,
    pub horizon: f64,
    pub total_wealth: f64,
    pub h: f64,
    /// Relative gap between `W_T` and `W_0 E(theta . |X| - V)_T`.
    pub exponent_mismatch: f64,
    pub investors: Vec<InvestorSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub growth: Option<GrowthComparison>,
}

pub struct SeedOutcome {
    pub trajectory: Trajectory,
    pub summary: RunSummary,
}

pub fn profile_run(config: &ScenarioConfig, seed: u64) -> ProfileRun {
    ProfileRun::new(config.market.clone(), config.strategies.clone(), config.horizon, seed)
        .with_integrator(config.integrator)
}

pub fn summarize(config: &ScenarioConfig, seed: u64, traj: &Trajectory) -> Result<RunSummary> {
    let d = &config.diagnostics;
    let last = traj.last();
    let exponent = wealth_exponent(traj)?;
    let rebuilt = traj.initial().total * exponent.value();
    let investors = d
        .tracked
        .iter()
        .map(|&m| InvestorSummary {
            investor: m,
            terminal_wealth: last.state.wealth[m],
            terminal_relative: last.state.relative[m],
            uh_total: last.acc.uh[m],
            closeness: last.acc.closeness[m],
            survival: d.survival.then(|| survival_verdict(traj, m, &d.proxy)),
            growth_rate: d.growth.then(|| growth_rate(traj, m).terminal),
            conditions: d.conditions.then(|| check_survival_conditions(traj, m)),
            sufficient: d.sufficient.then(|| sufficient_condition_check(traj, m)),
        })
        .collect();
    Ok(RunSummary {
        seed,
        records: traj.records.len(),
        horizon: config.horizon,
        total_wealth: last.state.total,
        h: last.acc.h,
        exponent_mismatch: (rebuilt - last.state.total).abs() / last.state.total,
        investors,
        growth: d.growth.then(|| compare_growth(traj)),
    })
}

pub fn run_seed(config: &ScenarioConfig, seed: u64) -> Result<SeedOutcome> {
    let trajectory = run(&profile_run(config, seed))?;
    let summary = summarize(config, seed, &trajectory)?;
    Ok(SeedOutcome { trajectory, summary })
}

/// Writes one row per record: `t, Y^1..Y^M, r^1..r^M, W, H, UH^1..UH^M,
/// closeness^1..closeness^M`, with 17 significant digits.
pub fn write_trajectory_csv<W: Write>(traj: &Trajectory, out: &mut W) -> io::Result<()> {
    let m = traj.num_investors;
    let mut header = vec!["t".to_string()];
    for prefix in ["Y", "r"] {
        header.extend((1..=m).map(|k| format!("{prefix}{k}")));
    }
    header.push("W".into());
    header.push("H".into());
    for prefix in ["UH", "closeness"] {
        header.extend((1..=m).map(|k| format!("{prefix}{k}")));
    }
    writeln!(out, "{}", header.join(","))?;
    let mut row = String::new();
    for r in &traj.records {
        row.clear();
        let values = std::iter::once(r.state.time)
            .chain(r.state.wealth.iter().copied())
            .chain(r.state.relative.iter().copied())
            .chain([r.state.total, r.acc.h])
            .chain(r.acc.uh.iter().copied())
            .chain(r.acc.closeness.iter().copied());
        for (i, v) in values.enumerate() {
            if i > 0 {
                row.push(',');
            }
            row.push_str(&format_number(v));
        }
        writeln!(out, "{row}")?;
    }
    Ok(())
}

/// Round-trip exact decimal form of a double.
pub fn format_number(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else if v.is_nan() {
        "nan".into()
    } else if v > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

/// Outcome of one seed within a batch.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum SeedResult {
    Ok(RunSummary),
    Failed { seed: u64, error: String },
}

impl SeedResult {
    pub fn seed(&self) -> u64 {
        match self {
            SeedResult::Ok(s) => s.seed,
            SeedResult::Failed { seed, .. } => *seed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InvestorAggregate {
    pub investor: usize,
    pub mean_terminal_relative: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub survival: Option<BatchVerdict>,
}

/// Aggregate over all seeds, with per-seed summaries sorted by seed.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BatchSummary {
    pub scenario: String,
    pub description: String,
    pub seeds: usize,
    pub failed: usize,
    pub investors: Vec<InvestorAggregate>,
    pub runs: Vec<SeedResult>,
}

impl BatchSummary {
    pub fn new(config: &ScenarioConfig, mut runs: Vec<SeedResult>) -> Self {
        runs.sort_by_key(SeedResult::seed);
        let ok: Vec<&RunSummary> = runs
            .iter()
            .filter_map(|r| match r {
                SeedResult::Ok(s) => Some(s),
                SeedResult::Failed { .. } => None,
            })
            .collect();
        let investors = config
            .diagnostics
            .tracked
            .iter()
            .enumerate()
            .map(|(slot, &m)| {
                let terminal: f64 = ok.iter().map(|s| s.investors[slot].terminal_relative).sum();
                InvestorAggregate {
                    investor: m,
                    mean_terminal_relative: terminal / ok.len().max(1) as f64,
                    survival: config.diagnostics.survival.then(|| {
                        BatchVerdict::from_flags(
                            ok.iter()
                                .map(|s| s.investors[slot].survival.is_some_and(|v| v.survives)),
                        )
                    }),
                }
            })
            .collect();
        Self {
            scenario: config.name.clone(),
            description: config.description.clone(),
            seeds: runs.len(),
            failed: runs.len() - ok.len(),
            investors,
            runs,
        }
    }
}
