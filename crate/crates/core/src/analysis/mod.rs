//! Energy monitoring, parameter conditions, integral accumulation and rate fits.

mod conditions;
pub(crate) mod energy;
mod integrals;
mod rates;

pub use conditions::{
    check_conditions_grid, check_conditions_grid_schedule, check_conditions_polynomial, Condition,
    ConditionReport, Outcome, ScheduleFns, Setting,
};
pub use energy::{
    energy, energy_monotonicity_report, energy_series, envelope_bound_excess, MonotonicityReport,
    UPHILL_TOLERANCE,
};
pub use integrals::{accumulate_theorem2_integrals, Integral, IntegralTable};
pub use rates::{default_window, fit_rate, RateFit, FIT_FLOOR, MIN_FIT_SAMPLES};
