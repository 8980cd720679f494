//! Exogenous payoff environments.
//!
//! Discrete-time models emit one `(A_t, delta_t)` pair per step, drawn from a
//! finite support so conditional expectations can be enumerated exactly. The
//! continuous-time model is a finite atomic jump kernel on `(x, v)` with a
//! constant payoff drift `b` and consumption rate, measured against the
//! operational clock `G_t = t`.

use rand_distr::{Distribution, Exp1};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::RngStream;

/// Tolerance on probability vectors and transition rows.
pub const PROB_TOLERANCE: f64 = 1e-12;

/// One point of a discrete payoff distribution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub payoff: Vec<f64>,
    pub delta: f64,
}

impl Atom {
    pub fn new(payoff: Vec<f64>, delta: f64) -> Self {
        Self { payoff, delta }
    }

    /// `|A|`, the l1 norm of the payoff vector.
    pub fn total(&self) -> f64 {
        self.payoff.iter().sum()
    }
}

fn check_delta(delta: f64) -> Result<()> {
    if !(0.0..1.0).contains(&delta) {
        return Err(Error::InvalidModel(format!(
            "delta must lie in [0,1), got {delta}"
        )));
    }
    Ok(())
}

fn check_nonneg(what: &str, xs: &[f64]) -> Result<()> {
    if let Some(x) = xs.iter().find(|x| !x.is_finite() || **x < 0.0) {
        return Err(Error::InvalidModel(format!(
            "{what} must be finite and non-negative, got {x}"
        )));
    }
    Ok(())
}

fn cumulative(probs: &[f64]) -> Vec<f64> {
    let mut acc = 0.0;
    let mut cum: Vec<f64> = probs
        .iter()
        .map(|p| {
            acc += p;
            acc
        })
        .collect();
    if let Some(last) = cum.last_mut() {
        *last = 1.0;
    }
    cum
}

fn pick(cum: &[f64], u: f64) -> usize {
    cum.partition_point(|c| *c <= u).min(cum.len() - 1)
}

/// I.i.d. payoffs over a finite support.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteIidModel {
    atoms: Vec<Atom>,
    probs: Vec<f64>,
    cum: Vec<f64>,
}

impl DiscreteIidModel {
    pub fn new(support: Vec<(Atom, f64)>) -> Result<Self> {
        if support.is_empty() {
            return Err(Error::InvalidModel("support is empty".into()));
        }
        let n = support[0].0.payoff.len();
        for (atom, p) in &support {
            if atom.payoff.len() != n {
                return Err(Error::InvalidModel(format!(
                    "atoms disagree on asset count ({} vs {n})",
                    atom.payoff.len()
                )));
            }
            check_nonneg("payoff", &atom.payoff)?;
            check_delta(atom.delta)?;
            if !(p.is_finite() && *p > 0.0) {
                return Err(Error::InvalidModel(format!(
                    "atom probabilities must be positive, got {p}"
                )));
            }
        }
        let total: f64 = support.iter().map(|(_, p)| p).sum();
        if (total - 1.0).abs() > PROB_TOLERANCE {
            return Err(Error::InvalidModel(format!(
                "probabilities sum to {total}, expected 1"
            )));
        }
        let (atoms, probs): (Vec<_>, Vec<_>) = support.into_iter().unzip();
        let cum = cumulative(&probs);
        Ok(Self { atoms, probs, cum })
    }

    /// A model that emits the same atom every step.
    pub fn deterministic(atom: Atom) -> Result<Self> {
        Self::new(vec![(atom, 1.0)])
    }

    /// Asset `k` pays one unit with probability `probs[k]`, nothing else pays.
    pub fn one_hot(probs: &[f64], delta: f64) -> Result<Self> {
        let n = probs.len();
        Self::new(
            probs
                .iter()
                .enumerate()
                .map(|(k, p)| {
                    let mut a = vec![0.0; n];
                    a[k] = 1.0;
                    (Atom::new(a, delta), *p)
                })
                .collect(),
        )
    }

    pub fn num_assets(&self) -> usize {
        self.atoms[0].payoff.len()
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn gamma_v(&self) -> f64 {
        self.atoms.iter().map(|a| a.delta).fold(0.0, f64::max)
    }

    fn draw(&self, rng: &mut RngStream) -> usize {
        pick(&self.cum, rng.uniform())
    }
}

/// Payoffs emitted by the regime occupied at the start of each step; the
/// regime then moves along a Markov chain.
#[derive(Debug, Clone, PartialEq)]
pub struct MarkovModulatedModel {
    labels: Vec<String>,
    regimes: Vec<DiscreteIidModel>,
    transition: Vec<Vec<f64>>,
    transition_cum: Vec<Vec<f64>>,
    initial_regime: usize,
}

impl MarkovModulatedModel {
    pub fn new(
        labels: Vec<String>,
        regimes: Vec<DiscreteIidModel>,
        transition: Vec<Vec<f64>>,
        initial_regime: usize,
    ) -> Result<Self> {
        let k = regimes.len();
        if k == 0 {
            return Err(Error::InvalidModel("no regimes".into()));
        }
        if labels.len() != k {
            return Err(Error::InvalidModel(format!(
                "{} labels for {k} regimes",
                labels.len()
            )));
        }
        let n = regimes[0].num_assets();
        if regimes.iter().any(|r| r.num_assets() != n) {
            return Err(Error::InvalidModel(
                "regimes disagree on asset count".into(),
            ));
        }
        if transition.len() != k || transition.iter().any(|row| row.len() != k) {
            return Err(Error::InvalidModel(format!(
                "transition matrix must be {k}x{k}"
            )));
        }
        for (i, row) in transition.iter().enumerate() {
            check_nonneg("transition probability", row)?;
            let s: f64 = row.iter().sum();
            if (s - 1.0).abs() > PROB_TOLERANCE {
                return Err(Error::InvalidModel(format!(
                    "transition row {i} sums to {s}, expected 1"
                )));
            }
        }
        if initial_regime >= k {
            return Err(Error::InvalidModel(format!(
                "initial regime {initial_regime} out of range"
            )));
        }
        let transition_cum = transition.iter().map(|r| cumulative(r)).collect();
        Ok(Self {
            labels,
            regimes,
            transition,
            transition_cum,
            initial_regime,
        })
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn regimes(&self) -> &[DiscreteIidModel] {
        &self.regimes
    }

    pub fn transition(&self) -> &[Vec<f64>] {
        &self.transition
    }

    pub fn initial_regime(&self) -> usize {
        self.initial_regime
    }
}

/// One atom of a jump kernel: jumps `(x, v)` arriving at rate `intensity`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JumpAtom {
    pub jump: Vec<f64>,
    pub v: f64,
    pub intensity: f64,
}

/// Time-homogeneous atomic jump kernel with continuous payoff drift.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelSpec {
    atoms: Vec<JumpAtom>,
    drift: Vec<f64>,
    v_rate: f64,
    gamma_v: f64,
}

impl KernelSpec {
    pub fn new(atoms: Vec<JumpAtom>, drift: Vec<f64>, v_rate: f64, gamma_v: f64) -> Result<Self> {
        let n = drift.len();
        check_nonneg("drift", &drift)?;
        if !(v_rate.is_finite() && v_rate >= 0.0) {
            return Err(Error::InvalidModel(format!(
                "v_rate must be non-negative, got {v_rate}"
            )));
        }
        if !(0.0..1.0).contains(&gamma_v) {
            return Err(Error::InvalidModel(format!(
                "gamma_v must lie in [0,1), got {gamma_v}"
            )));
        }
        for atom in &atoms {
            if atom.jump.len() != n {
                return Err(Error::InvalidModel(format!(
                    "jump atom has {} assets, drift has {n}",
                    atom.jump.len()
                )));
            }
            check_nonneg("jump size", &atom.jump)?;
            if !(atom.intensity.is_finite() && atom.intensity >= 0.0) {
                return Err(Error::InvalidModel(format!(
                    "intensity must be non-negative, got {}",
                    atom.intensity
                )));
            }
            if !(atom.v >= 0.0 && atom.v <= gamma_v) {
                return Err(Error::InvalidModel(format!(
                    "jump of V {} outside [0, gamma_v = {gamma_v}]",
                    atom.v
                )));
            }
            if atom.v == 0.0 && atom.jump.iter().all(|x| *x == 0.0) {
                return Err(Error::InvalidModel("jump atom (x, v) is zero".into()));
            }
        }
        Ok(Self {
            atoms,
            drift,
            v_rate,
            gamma_v,
        })
    }

    pub fn num_assets(&self) -> usize {
        self.drift.len()
    }

    pub fn atoms(&self) -> &[JumpAtom] {
        &self.atoms
    }

    pub fn drift(&self) -> &[f64] {
        &self.drift
    }

    pub fn v_rate(&self) -> f64 {
        self.v_rate
    }

    pub fn gamma_v(&self) -> f64 {
        self.gamma_v
    }

    pub fn total_intensity(&self) -> f64 {
        self.atoms.iter().map(|a| a.intensity).sum()
    }

    /// Same kernel with every intensity and the drift multiplied by `c`,
    /// i.e. the same dynamics measured on the clock `G_t = c t`.
    pub fn rescaled(&self, c: f64) -> Result<Self> {
        let atoms = self
            .atoms
            .iter()
            .map(|a| JumpAtom {
                intensity: a.intensity * c,
                ..a.clone()
            })
            .collect();
        let drift = self.drift.iter().map(|b| b * c).collect();
        Self::new(atoms, drift, self.v_rate, self.gamma_v)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum PayoffModel {
    Iid(DiscreteIidModel),
    Markov(MarkovModulatedModel),
    Kernel(KernelSpec),
}

impl PayoffModel {
    pub fn num_assets(&self) -> usize {
        match self {
            PayoffModel::Iid(m) => m.num_assets(),
            PayoffModel::Markov(m) => m.regimes[0].num_assets(),
            PayoffModel::Kernel(k) => k.num_assets(),
        }
    }

    pub fn is_discrete(&self) -> bool {
        !matches!(self, PayoffModel::Kernel(_))
    }

    pub fn initial_regime(&self) -> usize {
        match self {
            PayoffModel::Markov(m) => m.initial_regime,
            _ => 0,
        }
    }

    pub fn gamma_v(&self) -> f64 {
        match self {
            PayoffModel::Iid(m) => m.gamma_v(),
            PayoffModel::Markov(m) => m.regimes.iter().map(|r| r.gamma_v()).fold(0.0, f64::max),
            PayoffModel::Kernel(k) => k.gamma_v(),
        }
    }

    pub fn as_kernel(&self) -> Result<&KernelSpec> {
        match self {
            PayoffModel::Kernel(k) => Ok(k),
            _ => Err(Error::NotContinuous),
        }
    }

    fn emission(&self, regime: usize) -> Result<&DiscreteIidModel> {
        match self {
            PayoffModel::Iid(m) => Ok(m),
            PayoffModel::Markov(m) => m
                .regimes
                .get(regime)
                .ok_or_else(|| Error::InvalidModel(format!("regime {regime} out of range"))),
            PayoffModel::Kernel(_) => Err(Error::NotDiscrete),
        }
    }

    /// Draws the payoff of one step and the regime for the next step.
    pub fn sample_discrete(&self, regime: usize, rng: &mut RngStream) -> Result<(Atom, usize)> {
        let emission = self.emission(regime)?;
        let atom = emission.atoms[emission.draw(rng)].clone();
        let next = match self {
            PayoffModel::Markov(m) => pick(&m.transition_cum[regime], rng.uniform()),
            _ => regime,
        };
        Ok((atom, next))
    }

    /// Exact one-step conditional distribution of `(A_t, delta_t)` given the
    /// current regime.
    pub fn enumerate_support(&self, regime: usize) -> Result<Vec<(f64, &Atom)>> {
        let emission = self.emission(regime)?;
        Ok(emission.probs.iter().copied().zip(&emission.atoms).collect())
    }
}

/// Draws the next jump after `t_now`: its time and the index of the atom.
/// Returns `None` when the kernel has zero total intensity.
pub fn next_jump(kernel: &KernelSpec, rng: &mut RngStream, t_now: f64) -> Option<(f64, usize)> {
    let total = kernel.total_intensity();
    if total <= 0.0 {
        return None;
    }
    let wait: f64 = Exp1.sample(rng);
    let target = rng.uniform() * total;
    let mut acc = 0.0;
    let mut index = kernel.atoms.len() - 1;
    for (i, atom) in kernel.atoms.iter().enumerate() {
        acc += atom.intensity;
        if target < acc {
            index = i;
            break;
        }
    }
    // zero-intensity atoms at the tail must never be selected
    while kernel.atoms[index].intensity == 0.0 {
        index -= 1;
    }
    Some((t_now + wait / total, index))
}

/// `a^n = sum_atoms rho * x^n / (1 - v + |x| / W_-)`.
pub fn kernel_a_process(kernel: &KernelSpec, w_minus: f64) -> Result<Vec<f64>> {
    if !(w_minus.is_finite() && w_minus > 0.0) {
        return Err(Error::NonPositiveWealth(w_minus));
    }
    let mut a = vec![0.0; kernel.num_assets()];
    for atom in &kernel.atoms {
        let size: f64 = atom.jump.iter().sum();
        let denom = 1.0 - atom.v + size / w_minus;
        for (an, xn) in a.iter_mut().zip(&atom.jump) {
            *an += atom.intensity * xn / denom;
        }
    }
    Ok(a)
}
