//! Numerical checks of survival, closeness, dominance and growth.

mod drift;
mod gibbs;
mod report;

pub use drift::{drift_breakdown, submartingale_check, DriftBreakdown};
pub use gibbs::{gibbs_gap, gibbs_gap_lln, lln, quarter_distance};
pub use report::{
    check_survival_conditions, closeness_integral, closeness_series, compare_growth,
    drift_ledger, growth_rate, h_increment, ls_slope, sufficient_condition_check,
    survival_verdict, BatchVerdict, DriftLedger, GrowthComparison, GrowthSeries,
    SufficientConditionReport, SurvivalProxy, SurvivalVerdict, SurvivalConditionsReport,
    SUPPORT_THRESHOLD, UH_SLOPE_TOLERANCE,
};
