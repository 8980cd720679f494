//! Investment strategies.
//!
//! All strategies here are basic: their weights depend on time, the current
//! regime and total wealth `W_{t-}` only, never on how wealth is split among
//! competitors. Total wealth is itself a functional of the payoff path, so
//! letting the survival strategy read it keeps it basic.

use crate::error::{Error, Result};
use crate::market::WealthState;
use crate::payoff::{kernel_a_process, KernelSpec, PayoffModel};
use crate::rng::RngStream;
use crate::simplex::{make_simplex, SimplexVector};

/// Perturbation weight schedule `t -> eps_t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Schedule {
    Zero,
    Constant(f64),
    /// `eps_t = min(1, scale / t)`.
    Harmonic { scale: f64 },
}

impl Schedule {
    pub fn eps(&self, t: f64) -> f64 {
        match *self {
            Schedule::Zero => 0.0,
            Schedule::Constant(c) => c,
            Schedule::Harmonic { scale } => {
                if t <= 0.0 {
                    1.0
                } else {
                    (scale / t).min(1.0)
                }
            }
        }
    }

    fn validate(&self) -> Result<()> {
        let ok = match *self {
            Schedule::Zero => true,
            Schedule::Constant(c) => (0.0..=1.0).contains(&c),
            Schedule::Harmonic { scale } => scale.is_finite() && scale >= 0.0,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidStrategy(format!(
                "schedule {self:?} leaves [0, 1]"
            )))
        }
    }
}

/// One row of a piecewise-constant table: weights from time `from` on, one
/// vector per regime (or a single vector shared by all regimes).
#[derive(Debug, Clone, PartialEq)]
pub struct TableEntry {
    pub from: f64,
    pub weights: Vec<SimplexVector>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum StrategyHandle {
    Constant(SimplexVector),
    /// The survival strategy computed from the model by exact enumeration
    /// (discrete) or kernel integration (continuous).
    SurvivalExact,
    /// The discrete survival strategy estimated by Monte Carlo.
    SurvivalMc { samples: usize },
    Perturbed {
        base: Box<StrategyHandle>,
        schedule: Schedule,
        target: SimplexVector,
    },
    Table(Vec<TableEntry>),
}

/// Information a basic strategy may look at when choosing weights.
#[derive(Debug, Clone, Copy)]
pub struct StrategyContext<'a> {
    pub model: &'a PayoffModel,
    pub time: f64,
    pub regime: usize,
    /// Total wealth `W_{t-}` before the payoff of the current period.
    pub wealth: f64,
}

impl StrategyHandle {
    /// `(1 - eps_t) base_t + eps_t target`.
    pub fn perturbed(base: StrategyHandle, schedule: Schedule, target: SimplexVector) -> Result<Self> {
        schedule.validate()?;
        Ok(StrategyHandle::Perturbed {
            base: Box::new(base),
            schedule,
            target,
        })
    }

    pub fn table(mut entries: Vec<TableEntry>) -> Result<Self> {
        if entries.is_empty() || entries.iter().any(|e| e.weights.is_empty()) {
            return Err(Error::InvalidStrategy("empty strategy table".into()));
        }
        entries.sort_by(|a, b| a.from.total_cmp(&b.from));
        Ok(StrategyHandle::Table(entries))
    }

    pub fn uses_rng(&self) -> bool {
        match self {
            StrategyHandle::SurvivalMc { .. } => true,
            StrategyHandle::Perturbed { base, .. } => base.uses_rng(),
            _ => false,
        }
    }

    pub fn evaluate(&self, ctx: &StrategyContext<'_>, rng: &mut RngStream) -> Result<SimplexVector> {
        match self {
            StrategyHandle::Constant(w) => Ok(w.clone()),
            StrategyHandle::SurvivalExact => Ok(survival_point(ctx.model, ctx.regime, ctx.wealth)?.weights),
            StrategyHandle::SurvivalMc { samples } => {
                survival_discrete_mc(ctx.model, ctx.regime, ctx.wealth, rng, *samples)
            }
            StrategyHandle::Perturbed {
                base,
                schedule,
                target,
            } => {
                let b = base.evaluate(ctx, rng)?;
                b.mix(target, schedule.eps(ctx.time))
            }
            StrategyHandle::Table(entries) => {
                let idx = entries.partition_point(|e| e.from <= ctx.time).saturating_sub(1);
                let row = &entries[idx].weights;
                let w = if row.len() == 1 {
                    &row[0]
                } else {
                    row.get(ctx.regime).ok_or_else(|| {
                        Error::InvalidStrategy(format!("no table weights for regime {}", ctx.regime))
                    })?
                };
                Ok(w.clone())
            }
        }
    }
}

/// The survival strategy together with the norm `|a + b|` that drives `H`.
#[derive(Debug, Clone, PartialEq)]
pub struct SurvivalPoint {
    pub weights: SimplexVector,
    pub norm: f64,
}

/// Survival strategy for whichever time setting `model` describes.
pub fn survival_point(model: &PayoffModel, regime: usize, wealth: f64) -> Result<SurvivalPoint> {
    let mut a = match model {
        PayoffModel::Kernel(k) => kernel_a_process(k, wealth)?,
        _ => discrete_a_process(model, regime, wealth)?,
    };
    if let PayoffModel::Kernel(k) = model {
        for (an, bn) in a.iter_mut().zip(k.drift()) {
            *an += bn;
        }
    }
    let norm = a.iter().sum();
    Ok(SurvivalPoint {
        weights: make_simplex(&a)?,
        norm,
    })
}

/// `a^n = W_{t-1} E[A_t^n / W_t | F_{t-1}]` with `W_t = (1 - delta_t) W_{t-1} + |A_t|`.
pub fn discrete_a_process(model: &PayoffModel, regime: usize, w_prev: f64) -> Result<Vec<f64>> {
    if !(w_prev.is_finite() && w_prev > 0.0) {
        return Err(Error::NonPositiveWealth(w_prev));
    }
    let support = model.enumerate_support(regime)?;
    let mut a = vec![0.0; model.num_assets()];
    for (p, atom) in support {
        let scale = p * w_prev / ((1.0 - atom.delta) * w_prev + atom.total());
        for (an, xn) in a.iter_mut().zip(&atom.payoff) {
            *an += scale * xn;
        }
    }
    Ok(a)
}

pub fn survival_discrete_exact(model: &PayoffModel, regime: usize, w_prev: f64) -> Result<SimplexVector> {
    make_simplex(&discrete_a_process(model, regime, w_prev)?)
}

/// Monte Carlo estimate of the discrete survival strategy with the
/// delta-method standard error of each component.
pub fn survival_discrete_mc_with_error(
    model: &PayoffModel,
    regime: usize,
    w_prev: f64,
    rng: &mut RngStream,
    samples: usize,
) -> Result<(SimplexVector, Vec<f64>)> {
    if samples == 0 {
        return Err(Error::InvalidStrategy("Monte Carlo needs at least one sample".into()));
    }
    if !(w_prev.is_finite() && w_prev > 0.0) {
        return Err(Error::NonPositiveWealth(w_prev));
    }
    let n_assets = model.num_assets();
    let mut sx = vec![0.0; n_assets];
    let mut sxx = vec![0.0; n_assets];
    let mut sxs = vec![0.0; n_assets];
    let (mut ss, mut sss) = (0.0, 0.0);
    for _ in 0..samples {
        let (atom, _) = model.sample_discrete(regime, rng)?;
        let scale = w_prev / ((1.0 - atom.delta) * w_prev + atom.total());
        let s = scale * atom.total();
        for (k, xn) in atom.payoff.iter().enumerate() {
            let x = scale * xn;
            sx[k] += x;
            sxx[k] += x * x;
            sxs[k] += x * s;
        }
        ss += s;
        sss += s * s;
    }
    let weights = make_simplex(&sx)?;
    let n = samples as f64;
    let mean_s = ss / n;
    let se = if mean_s > 0.0 && samples > 1 {
        (0..n_assets)
            .map(|k| {
                let l = weights[k];
                let sum_e2 = sxx[k] - 2.0 * l * sxs[k] + l * l * sss;
                (sum_e2.max(0.0) / (n * (n - 1.0))).sqrt() / mean_s
            })
            .collect()
    } else {
        vec![0.0; n_assets]
    };
    Ok((weights, se))
}

pub fn survival_discrete_mc(
    model: &PayoffModel,
    regime: usize,
    w_prev: f64,
    rng: &mut RngStream,
    samples: usize,
) -> Result<SimplexVector> {
    survival_discrete_mc_with_error(model, regime, w_prev, rng, samples).map(|(w, _)| w)
}

/// `make_simplex(a + b)` for an atomic kernel; the continuous consumption
/// rate plays no part.
pub fn survival_continuous(kernel: &KernelSpec, w_minus: f64) -> Result<SimplexVector> {
    let mut a = kernel_a_process(kernel, w_minus)?;
    for (an, bn) in a.iter_mut().zip(kernel.drift()) {
        *an += bn;
    }
    make_simplex(&a)
}

/// Wealth-weighted average of the strategies of every investor but `m`.
pub fn representative(profile: &[SimplexVector], relative: &[f64], m: usize) -> Result<SimplexVector> {
    if profile.len() != relative.len() {
        return Err(Error::Dimension {
            expected: profile.len(),
            got: relative.len(),
        });
    }
    if relative[m] >= 1.0 {
        return Err(Error::EmptyCoalition);
    }
    let mut acc = vec![0.0; profile[0].dim()];
    for (k, (lam, r)) in profile.iter().zip(relative).enumerate() {
        if k == m {
            continue;
        }
        for (a, l) in acc.iter_mut().zip(lam.as_slice()) {
            *a += l * r;
        }
    }
    if acc.iter().sum::<f64>() <= 0.0 {
        return Err(Error::EmptyCoalition);
    }
    make_simplex(&acc)
}

/// Representative strategy computed from a wealth snapshot.
pub fn representative_of(profile: &[SimplexVector], state: &WealthState, m: usize) -> Result<SimplexVector> {
    representative(profile, &state.relative, m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::payoff::{Atom, DiscreteIidModel, JumpAtom};

    fn sv(w: &[f64]) -> SimplexVector {
        SimplexVector::new(w.to_vec()).unwrap()
    }

    fn iid(support: Vec<(Atom, f64)>) -> PayoffModel {
        PayoffModel::Iid(DiscreteIidModel::new(support).unwrap())
    }

    #[test]
    fn two_point_closed_form_ignores_wealth() {
        let model = iid(vec![
            (Atom::new(vec![1.0, 0.0], 0.0), 0.3),
            (Atom::new(vec![0.0, 1.0], 0.0), 0.7),
        ]);
        for w in [0.01, 1.0, 250.0] {
            let s = survival_discrete_exact(&model, 0, w).unwrap();
            assert!((s[0] - 0.3).abs() < 1e-12);
        }
    }

    #[test]
    fn asymmetric_payoff_hand_value() {
        let model = iid(vec![
            (Atom::new(vec![2.0, 0.0], 0.0), 0.5),
            (Atom::new(vec![0.0, 1.0], 0.0), 0.5),
        ]);
        let a = discrete_a_process(&model, 0, 1.0).unwrap();
        assert!((a[0] - 1.0 / 3.0).abs() < 1e-15);
        assert!((a[1] - 0.25).abs() < 1e-15);
        let s = survival_discrete_exact(&model, 0, 1.0).unwrap();
        assert!((s[0] - 4.0 / 7.0).abs() < 1e-15);
        assert!((s[1] - 3.0 / 7.0).abs() < 1e-15);
    }

    #[test]
    fn symmetric_support_gives_uniform() {
        let model = iid(vec![
            (Atom::new(vec![3.0, 1.0], 0.2), 0.5),
            (Atom::new(vec![1.0, 3.0], 0.2), 0.5),
        ]);
        let s = survival_discrete_exact(&model, 0, 2.5).unwrap();
        assert!((s[0] - 0.5).abs() < 1e-15);
        assert!(survival_discrete_exact(&model, 0, 0.0).is_err());
    }

    #[test]
    fn monte_carlo_single_atom_is_exact() {
        let model = iid(vec![(Atom::new(vec![1.0, 3.0], 0.1), 1.0)]);
        let mut rng = RngStream::new(1, 0);
        let s = survival_discrete_mc(&model, 0, 1.0, &mut rng, 1).unwrap();
        let exact = survival_discrete_exact(&model, 0, 1.0).unwrap();
        assert!(s.dist2(&exact) < 1e-30);
        assert!(survival_discrete_mc(&model, 0, 1.0, &mut rng, 0).is_err());
    }

    fn unit_kernel(rates: (f64, f64), drift: Vec<f64>) -> KernelSpec {
        KernelSpec::new(
            vec![
                JumpAtom {
                    jump: vec![1.0, 0.0],
                    v: 0.0,
                    intensity: rates.0,
                },
                JumpAtom {
                    jump: vec![0.0, 1.0],
                    v: 0.0,
                    intensity: rates.1,
                },
            ],
            drift,
            0.0,
            0.0,
        )
        .unwrap()
    }

    #[test]
    fn continuous_survival_values() {
        let s = survival_continuous(&unit_kernel((1.0, 2.0), vec![0.0, 0.0]), 1.0).unwrap();
        assert!((s[0] - 1.0 / 3.0).abs() < 1e-15);
        let drift_only = KernelSpec::new(vec![], vec![3.0, 1.0], 0.5, 0.0).unwrap();
        assert_eq!(survival_continuous(&drift_only, 1.0).unwrap().as_slice(), &[0.75, 0.25]);
        let nothing = KernelSpec::new(vec![], vec![0.0, 0.0, 0.0], 0.5, 0.0).unwrap();
        assert_eq!(survival_continuous(&nothing, 1.0).unwrap(), SimplexVector::uniform(3));
    }

    #[test]
    fn perturbation_endpoints() {
        let model = iid(vec![
            (Atom::new(vec![1.0, 0.0], 0.0), 0.6),
            (Atom::new(vec![0.0, 1.0], 0.0), 0.4),
        ]);
        let ctx = StrategyContext {
            model: &model,
            time: 7.0,
            regime: 0,
            wealth: 2.0,
        };
        let mut rng = RngStream::new(0, 0);
        let target = SimplexVector::uniform(2);
        let base = StrategyHandle::SurvivalExact;
        let hat = base.evaluate(&ctx, &mut rng).unwrap();
        let none = StrategyHandle::perturbed(base.clone(), Schedule::Zero, target.clone()).unwrap();
        assert_eq!(none.evaluate(&ctx, &mut rng).unwrap(), hat);
        let full = StrategyHandle::perturbed(base.clone(), Schedule::Constant(1.0), target.clone()).unwrap();
        assert_eq!(full.evaluate(&ctx, &mut rng).unwrap(), target);
        let harmonic =
            StrategyHandle::perturbed(base, Schedule::Harmonic { scale: 1.0 }, target).unwrap();
        let lam = harmonic.evaluate(&ctx, &mut rng).unwrap();
        assert!((hat.dist2(&lam) - 0.02 / 49.0).abs() < 1e-15);
        assert!(StrategyHandle::perturbed(
            StrategyHandle::SurvivalExact,
            Schedule::Constant(1.5),
            SimplexVector::uniform(2)
        )
        .is_err());
    }

    #[test]
    fn table_is_piecewise_constant_per_regime() {
        let model = iid(vec![(Atom::new(vec![1.0, 0.0], 0.0), 1.0)]);
        let t = StrategyHandle::table(vec![
            TableEntry {
                from: 10.0,
                weights: vec![sv(&[0.1, 0.9]), sv(&[0.2, 0.8])],
            },
            TableEntry {
                from: 0.0,
                weights: vec![sv(&[0.5, 0.5])],
            },
        ])
        .unwrap();
        let at = |time, regime| {
            let ctx = StrategyContext {
                model: &model,
                time,
                regime,
                wealth: 1.0,
            };
            t.evaluate(&ctx, &mut RngStream::new(0, 0)).unwrap()
        };
        assert_eq!(at(3.0, 1), sv(&[0.5, 0.5]));
        assert_eq!(at(10.0, 1), sv(&[0.2, 0.8]));
        assert_eq!(at(50.0, 0), sv(&[0.1, 0.9]));
    }

    #[test]
    fn representative_cases() {
        let l1 = sv(&[0.9, 0.1]);
        let l2 = sv(&[0.3, 0.7]);
        let rep = representative(&[l1.clone(), l2.clone()], &[0.4, 0.6], 0).unwrap();
        assert!(rep.dist2(&l2) < 1e-30);

        let profile = [sv(&[0.5, 0.5]), sv(&[1.0, 0.0]), sv(&[0.0, 1.0])];
        let rep = representative(&profile, &[0.5, 0.25, 0.25], 0).unwrap();
        assert!(rep.dist2(&SimplexVector::uniform(2)) < 1e-30);

        let same = [l1.clone(), l1.clone(), l1.clone()];
        let rep = representative(&same, &[0.2, 0.3, 0.5], 1).unwrap();
        assert!(rep.dist2(&l1) < 1e-30);

        assert_eq!(
            representative(&[l1, l2], &[1.0, 0.0], 0).unwrap_err(),
            Error::EmptyCoalition
        );
    }
}
