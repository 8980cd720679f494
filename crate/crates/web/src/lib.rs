//! Browser bindings: a relative-wealth race, the survival weights as a
//! function of total wealth, and the Gibbs gap against its quadratic floor.
//!
//! Each export has a plain Rust counterpart in [`demo`] so the logic is
//! testable off the browser.

use wasm_bindgen::prelude::*;

pub mod demo {
    use market_survival::diagnostics::{gibbs_gap, quarter_distance};
    use market_survival::engine::{run, ProfileRun};
    use market_survival::market::MarketSpec;
    use market_survival::payoff::{Atom, DiscreteIidModel, PayoffModel};
    use market_survival::strategy::survival_discrete_exact;
    use market_survival::{SimplexVector, StrategyHandle};

    fn two_point(p: f64, delta: f64) -> Result<PayoffModel, String> {
        DiscreteIidModel::one_hot(&[p, 1.0 - p], delta)
            .map(PayoffModel::Iid)
            .map_err(|e| e.to_string())
    }

    /// Relative wealth `r_t` of the survival investor racing a constant
    /// `(q, 1 - q)` investor in the two-point model, for `t = 0..=steps`.
    pub fn race(p: f64, delta: f64, q: f64, steps: u32, seed: u64) -> Result<Vec<f64>, String> {
        let model = two_point(p, delta)?;
        let opponent = SimplexVector::new(vec![q, 1.0 - q]).map_err(|e| e.to_string())?;
        let spec = ProfileRun::new(
            MarketSpec::new(vec![1.0, 1.0], model),
            vec![StrategyHandle::SurvivalExact, StrategyHandle::Constant(opponent)],
            f64::from(steps),
            seed,
        );
        let traj = run(&spec).map_err(|e| e.to_string())?;
        Ok(traj.relative(0).collect())
    }

    /// Survival weight on asset 1 at `points` log-spaced total wealths in
    /// `[w_min, w_max]`, when asset 1 pays `x` with probability `p` and
    /// asset 2 pays `y` otherwise. Returns `(W, weight)` pairs, flattened.
    pub fn survival_curve(
        p: f64,
        x: f64,
        y: f64,
        delta: f64,
        w_min: f64,
        w_max: f64,
        points: u32,
    ) -> Result<Vec<f64>, String> {
        if !(w_min > 0.0 && w_max > w_min) || points < 2 {
            return Err("need 0 < w_min < w_max and at least two points".into());
        }
        let model = DiscreteIidModel::new(vec![
            (Atom::new(vec![x, 0.0], delta), p),
            (Atom::new(vec![0.0, y], delta), 1.0 - p),
        ])
        .map(PayoffModel::Iid)
        .map_err(|e| e.to_string())?;
        let (lo, hi) = (w_min.ln(), w_max.ln());
        let mut out = Vec::with_capacity(2 * points as usize);
        for i in 0..points {
            let w = (lo + (hi - lo) * f64::from(i) / f64::from(points - 1)).exp();
            let hat = survival_discrete_exact(&model, 0, w).map_err(|e| e.to_string())?;
            out.extend([w, hat[0]]);
        }
        Ok(out)
    }

    /// `(alpha_1, gap, |alpha - beta|^2 / 4)` triples, flattened, as `alpha`
    /// sweeps the two-asset simplex with `beta = (b, 1 - b)` held fixed.
    pub fn gibbs_curve(b: f64, points: u32) -> Result<Vec<f64>, String> {
        let beta = SimplexVector::new(vec![b, 1.0 - b]).map_err(|e| e.to_string())?;
        if points < 2 {
            return Err("at least two points are needed".into());
        }
        let mut out = Vec::with_capacity(3 * points as usize);
        for i in 0..points {
            let a = f64::from(i) / f64::from(points - 1);
            let alpha = SimplexVector::new(vec![a, 1.0 - a]).map_err(|e| e.to_string())?;
            let gap = gibbs_gap(&alpha, &beta).map_err(|e| e.to_string())?;
            out.extend([a, gap, quarter_distance(&alpha, &beta)]);
        }
        Ok(out)
    }
}

fn to_js(e: String) -> JsValue {
    JsValue::from_str(&e)
}

#[wasm_bindgen]
pub fn race(p: f64, delta: f64, q: f64, steps: u32, seed: u32) -> Result<Vec<f64>, JsValue> {
    demo::race(p, delta, q, steps, u64::from(seed)).map_err(to_js)
}

#[wasm_bindgen(js_name = survivalCurve)]
pub fn survival_curve(
    p: f64,
    x: f64,
    y: f64,
    delta: f64,
    w_min: f64,
    w_max: f64,
    points: u32,
) -> Result<Vec<f64>, JsValue> {
    demo::survival_curve(p, x, y, delta, w_min, w_max, points).map_err(to_js)
}

#[wasm_bindgen(js_name = gibbsCurve)]
pub fn gibbs_curve(b: f64, points: u32) -> Result<Vec<f64>, JsValue> {
    demo::gibbs_curve(b, points).map_err(to_js)
}
