//! Scenario documents: strict JSON in, validated run descriptions out.
//!
//! Parsing happens in two passes. The first deserializes the document with
//! unknown keys rejected, so a misspelt field fails loudly with its path. The
//! second checks the semantic constraints (probabilities, deltas, strategy
//! dimensions, distinct seeds) and reports every problem found, each tagged
//! with the JSON path it came from.

use std::collections::BTreeSet;
use std::fmt;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::diagnostics::SurvivalProxy;
use crate::engine::IntegratorConfig;
use crate::market::{validate_market, MarketSpec};
use crate::payoff::{Atom, DiscreteIidModel, JumpAtom, KernelSpec, MarkovModulatedModel, PayoffModel};
use crate::simplex::SimplexVector;
use crate::strategy::{Schedule, StrategyHandle, TableEntry};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioDocument {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    pub market: MarketDoc,
    pub payoff: PayoffDoc,
    pub strategies: Vec<StrategyDoc>,
    /// Steps for discrete models, model time for jump kernels.
    pub horizon: f64,
    pub seeds: SeedsDoc,
    /// Recording interval of the continuous engine.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<f64>,
    /// Maximum integrator substep of the continuous engine.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub step: Option<f64>,
    #[serde(default)]
    pub diagnostics: DiagnosticsDoc,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MarketDoc {
    pub initial_wealth: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AtomDoc {
    pub payoff: Vec<f64>,
    #[serde(default)]
    pub delta: f64,
    pub prob: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegimeDoc {
    pub label: String,
    pub atoms: Vec<AtomDoc>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PayoffDoc {
    Discrete {
        atoms: Vec<AtomDoc>,
    },
    Markov {
        regimes: Vec<RegimeDoc>,
        transition: Vec<Vec<f64>>,
        #[serde(default)]
        initial_regime: usize,
    },
    Kernel {
        atoms: Vec<JumpAtom>,
        drift: Vec<f64>,
        #[serde(default)]
        v_rate: f64,
        gamma_v: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ScheduleDoc {
    Zero,
    Constant { eps: f64 },
    /// `eps_t = min(1, scale / t)`
    Harmonic {
        #[serde(default = "one")]
        scale: f64,
    },
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TableRowDoc {
    pub from: f64,
    pub weights: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum StrategyDoc {
    Constant {
        weights: Vec<f64>,
    },
    Survival,
    SurvivalMc {
        samples: usize,
    },
    Perturbed {
        base: Box<StrategyDoc>,
        schedule: ScheduleDoc,
        target: Vec<f64>,
    },
    Table {
        rows: Vec<TableRowDoc>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged, deny_unknown_fields)]
pub enum SeedsDoc {
    List(Vec<u64>),
    Range { base: u64, count: u64 },
}

impl SeedsDoc {
    fn expand(&self) -> Vec<u64> {
        match self {
            SeedsDoc::List(v) => v.clone(),
            SeedsDoc::Range { base, count } => (0..*count).map(|k| base.wrapping_add(k)).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DiagnosticsDoc {
    pub survival: bool,
    pub conditions: bool,
    pub growth: bool,
    pub sufficient: bool,
    /// Investors the per-investor diagnostics are computed for; all if absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tracked: Option<Vec<usize>>,
    pub floor: f64,
    pub min_tail_slope: f64,
    pub tail_fraction: f64,
}

impl Default for DiagnosticsDoc {
    fn default() -> Self {
        let proxy = SurvivalProxy::default();
        Self {
            survival: true,
            conditions: true,
            growth: true,
            sufficient: true,
            tracked: None,
            floor: proxy.floor,
            min_tail_slope: proxy.min_tail_slope,
            tail_fraction: proxy.tail_fraction,
        }
    }
}

/// Which diagnostics a run computes, and for whom.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiagnosticsConfig {
    pub survival: bool,
    pub conditions: bool,
    pub growth: bool,
    pub sufficient: bool,
    pub tracked: Vec<usize>,
    pub proxy: SurvivalProxy,
}

/// A fully validated scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub name: String,
    pub description: String,
    pub market: MarketSpec,
    pub strategies: Vec<StrategyHandle>,
    pub horizon: f64,
    pub seeds: Vec<u64>,
    pub integrator: IntegratorConfig,
    pub diagnostics: DiagnosticsConfig,
    pub output_dir: Option<PathBuf>,
}

/// One semantic problem, located by its JSON path.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConfigIssue {
    pub path: String,
    pub message: String,
}

impl fmt::Display for ConfigIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.path, self.message)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("{path}: {message}")]
    Syntax { path: String, message: String },
    #[error("{}", join_issues(.0))]
    Invalid(Vec<ConfigIssue>),
}

impl ConfigError {
    pub fn issues(&self) -> Vec<ConfigIssue> {
        match self {
            ConfigError::Syntax { path, message } => vec![ConfigIssue {
                path: path.clone(),
                message: message.clone(),
            }],
            ConfigError::Invalid(v) => v.clone(),
        }
    }
}

fn join_issues(issues: &[ConfigIssue]) -> String {
    issues.iter().map(|i| i.to_string()).collect::<Vec<_>>().join("; ")
}

/// Parses and validates a scenario document.
pub fn parse_config(text: &str) -> Result<ScenarioConfig, ConfigError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let doc: ScenarioDocument = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        ConfigError::Syntax {
            path: if path == "." { "$".into() } else { format!("$.{path}") },
            message: e.into_inner().to_string(),
        }
    })?;
    resolve(&doc)
}

#[derive(Default)]
struct Issues(Vec<ConfigIssue>);

impl Issues {
    fn push(&mut self, path: impl Into<String>, message: impl Into<String>) {
        self.0.push(ConfigIssue {
            path: path.into(),
            message: message.into(),
        });
    }
}

fn check_atom(issues: &mut Issues, path: &str, atom: &AtomDoc) {
    if !(0.0..1.0).contains(&atom.delta) {
        issues.push(format!("{path}.delta"), format!("delta must lie in [0,1), got {}", atom.delta));
    }
    if !(atom.prob.is_finite() && atom.prob > 0.0) {
        issues.push(format!("{path}.prob"), format!("probability must be positive, got {}", atom.prob));
    }
    if let Some(x) = atom.payoff.iter().find(|x| !(x.is_finite() && **x >= 0.0)) {
        issues.push(format!("{path}.payoff"), format!("payoffs must be finite and non-negative, got {x}"));
    }
}

fn build_iid(issues: &mut Issues, path: &str, atoms: &[AtomDoc]) -> Option<DiscreteIidModel> {
    let before = issues.0.len();
    for (i, a) in atoms.iter().enumerate() {
        check_atom(issues, &format!("{path}.atoms[{i}]"), a);
    }
    if issues.0.len() > before {
        return None;
    }
    let support = atoms
        .iter()
        .map(|a| (Atom::new(a.payoff.clone(), a.delta), a.prob))
        .collect();
    DiscreteIidModel::new(support)
        .map_err(|e| issues.push(format!("{path}.atoms"), e.to_string()))
        .ok()
}

fn build_payoff(issues: &mut Issues, doc: &PayoffDoc) -> Option<PayoffModel> {
    match doc {
        PayoffDoc::Discrete { atoms } => build_iid(issues, "$.payoff", atoms).map(PayoffModel::Iid),
        PayoffDoc::Markov {
            regimes,
            transition,
            initial_regime,
        } => {
            let built: Vec<_> = regimes
                .iter()
                .enumerate()
                .map(|(k, r)| build_iid(issues, &format!("$.payoff.regimes[{k}]"), &r.atoms))
                .collect();
            let built: Option<Vec<_>> = built.into_iter().collect();
            let labels = regimes.iter().map(|r| r.label.clone()).collect();
            MarkovModulatedModel::new(labels, built?, transition.clone(), *initial_regime)
                .map(PayoffModel::Markov)
                .map_err(|e| issues.push("$.payoff", e.to_string()))
                .ok()
        }
        PayoffDoc::Kernel {
            atoms,
            drift,
            v_rate,
            gamma_v,
        } => KernelSpec::new(atoms.clone(), drift.clone(), *v_rate, *gamma_v)
            .map(PayoffModel::Kernel)
            .map_err(|e| issues.push("$.payoff", e.to_string()))
            .ok(),
    }
}

fn simplex(issues: &mut Issues, path: &str, w: &[f64], n: usize) -> Option<SimplexVector> {
    if w.len() != n {
        issues.push(path, format!("expected {n} weights, got {}", w.len()));
        return None;
    }
    SimplexVector::new(w.to_vec())
        .map_err(|e| issues.push(path, e.to_string()))
        .ok()
}

fn build_schedule(issues: &mut Issues, path: &str, doc: &ScheduleDoc) -> Option<Schedule> {
    let s = match *doc {
        ScheduleDoc::Zero => Schedule::Zero,
        ScheduleDoc::Constant { eps } => Schedule::Constant(eps),
        ScheduleDoc::Harmonic { scale } => Schedule::Harmonic { scale },
    };
    Some(s).filter(|s| match *s {
        Schedule::Constant(c) if !(0.0..=1.0).contains(&c) => {
            issues.push(path, format!("eps must lie in [0,1], got {c}"));
            false
        }
        Schedule::Harmonic { scale } if !(scale.is_finite() && scale >= 0.0) => {
            issues.push(path, format!("scale must be non-negative, got {scale}"));
            false
        }
        _ => true,
    })
}

fn build_strategy(
    issues: &mut Issues,
    path: &str,
    doc: &StrategyDoc,
    model: Option<&PayoffModel>,
    n: usize,
) -> Option<StrategyHandle> {
    match doc {
        StrategyDoc::Constant { weights } => simplex(issues, &format!("{path}.weights"), weights, n).map(StrategyHandle::Constant),
        StrategyDoc::Survival => Some(StrategyHandle::SurvivalExact),
        StrategyDoc::SurvivalMc { samples } => {
            if *samples == 0 {
                issues.push(format!("{path}.samples"), "at least one sample is required");
                return None;
            }
            if model.is_some_and(|m| !m.is_discrete()) {
                issues.push(path, "survival_mc needs a discrete payoff model");
                return None;
            }
            Some(StrategyHandle::SurvivalMc { samples: *samples })
        }
        StrategyDoc::Perturbed { base, schedule, target } => {
            let base = build_strategy(issues, &format!("{path}.base"), base, model, n);
            let schedule = build_schedule(issues, &format!("{path}.schedule"), schedule);
            let target = simplex(issues, &format!("{path}.target"), target, n);
            StrategyHandle::perturbed(base?, schedule?, target?)
                .map_err(|e| issues.push(path, e.to_string()))
                .ok()
        }
        StrategyDoc::Table { rows } => {
            if rows.is_empty() {
                issues.push(format!("{path}.rows"), "a table needs at least one row");
                return None;
            }
            let regimes = match model {
                Some(PayoffModel::Markov(mm)) => mm.regimes().len(),
                _ => 1,
            };
            let mut entries = Vec::new();
            for (i, row) in rows.iter().enumerate() {
                let rp = format!("{path}.rows[{i}]");
                if !row.from.is_finite() {
                    issues.push(format!("{rp}.from"), "start time must be finite");
                }
                if row.weights.len() != 1 && row.weights.len() != regimes {
                    issues.push(
                        format!("{rp}.weights"),
                        format!("expected 1 or {regimes} weight vectors, got {}", row.weights.len()),
                    );
                    continue;
                }
                let weights: Option<Vec<_>> = row
                    .weights
                    .iter()
                    .enumerate()
                    .map(|(k, w)| simplex(issues, &format!("{rp}.weights[{k}]"), w, n))
                    .collect();
                if let Some(weights) = weights {
                    entries.push(TableEntry { from: row.from, weights });
                }
            }
            StrategyHandle::table(entries)
                .map_err(|e| issues.push(path, e.to_string()))
                .ok()
        }
    }
}

/// Validates a parsed document.
pub fn resolve(doc: &ScenarioDocument) -> Result<ScenarioConfig, ConfigError> {
    let mut issues = Issues::default();
    let model = build_payoff(&mut issues, &doc.payoff);
    let n = match (&model, &doc.payoff) {
        (Some(m), _) => m.num_assets(),
        (None, PayoffDoc::Discrete { atoms }) => atoms.first().map_or(0, |a| a.payoff.len()),
        (None, PayoffDoc::Markov { regimes, .. }) => regimes
            .first()
            .and_then(|r| r.atoms.first())
            .map_or(0, |a| a.payoff.len()),
        (None, PayoffDoc::Kernel { drift, .. }) => drift.len(),
    };
    let m = doc.market.initial_wealth.len();

    if doc.strategies.len() != m {
        issues.push(
            "$.strategies",
            format!("{} strategies for {m} investors", doc.strategies.len()),
        );
    }
    let strategies: Vec<_> = doc
        .strategies
        .iter()
        .enumerate()
        .map(|(i, s)| build_strategy(&mut issues, &format!("$.strategies[{i}]"), s, model.as_ref(), n))
        .collect();

    let market = model.map(|payoff| MarketSpec::new(doc.market.initial_wealth.clone(), payoff));
    if let Some(spec) = &market {
        for v in validate_market(spec) {
            issues.push("$.market", v.0);
        }
    }

    let discrete = market.as_ref().is_some_and(|s| s.payoff.is_discrete());
    if !(doc.horizon.is_finite() && doc.horizon > 0.0) {
        issues.push("$.horizon", format!("horizon must be positive, got {}", doc.horizon));
    } else if discrete && doc.horizon.fract() != 0.0 {
        issues.push("$.horizon", "a discrete model needs a whole number of steps");
    }

    let seeds = doc.seeds.expand();
    if seeds.is_empty() {
        issues.push("$.seeds", "at least one seed is required");
    }
    let mut seen = BTreeSet::new();
    for (i, s) in seeds.iter().enumerate() {
        if !seen.insert(*s) {
            issues.push(format!("$.seeds[{i}]"), format!("duplicate seed {s}"));
        }
    }

    let mut integrator = IntegratorConfig::default();
    if let Some(g) = doc.grid {
        if g.is_finite() && g > 0.0 {
            integrator.grid = Some(g);
        } else {
            issues.push("$.grid", format!("grid must be positive, got {g}"));
        }
    }
    if let Some(h) = doc.step {
        if h.is_finite() && h > 0.0 {
            integrator.step = h;
        } else {
            issues.push("$.step", format!("step must be positive, got {h}"));
        }
    }

    let d = &doc.diagnostics;
    let tracked = d.tracked.clone().unwrap_or_else(|| (0..m).collect());
    for (i, k) in tracked.iter().enumerate() {
        if *k >= m {
            issues.push(format!("$.diagnostics.tracked[{i}]"), format!("investor {k} does not exist"));
        }
    }
    if !(d.floor.is_finite() && (0.0..1.0).contains(&d.floor)) {
        issues.push("$.diagnostics.floor", "floor must lie in [0,1)");
    }
    if !(d.tail_fraction > 0.0 && d.tail_fraction <= 1.0) {
        issues.push("$.diagnostics.tail_fraction", "tail fraction must lie in (0,1]");
    }
    if !d.min_tail_slope.is_finite() {
        issues.push("$.diagnostics.min_tail_slope", "slope threshold must be finite");
    }

    let strategies: Option<Vec<_>> = strategies.into_iter().collect();
    match (issues.0.is_empty(), market, strategies) {
        (true, Some(market), Some(strategies)) => Ok(ScenarioConfig {
            name: doc.name.clone().unwrap_or_else(|| "scenario".into()),
            description: doc.description.clone().unwrap_or_default(),
            market,
            strategies,
            horizon: doc.horizon,
            seeds,
            integrator,
            diagnostics: DiagnosticsConfig {
                survival: d.survival,
                conditions: d.conditions,
                growth: d.growth,
                sufficient: d.sufficient,
                tracked,
                proxy: SurvivalProxy {
                    floor: d.floor,
                    min_tail_slope: d.min_tail_slope,
                    tail_fraction: d.tail_fraction,
                },
            },
            output_dir: doc.output_dir.clone(),
        }),
        _ => Err(ConfigError::Invalid(issues.0)),
    }
}
