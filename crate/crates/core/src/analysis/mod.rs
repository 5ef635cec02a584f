//! Lemma-level checks, exponent fitting and parameter-region arithmetic.

pub mod calg;
pub mod conditions;
pub mod fit;
pub mod holder;
pub mod jkl;

pub use calg::{
    calg, calg_normal_exponent, calg_time_exponent, verify_calg_bounds, CalGBoundsReport,
    CalGBranch, GFunArgs,
};
pub use conditions::{check_conditions, ConditionInputs, ConditionsReport, NavierStokesChoice};
pub use fit::{default_window, fit_log_log, fit_power_law, log_space, PowerLawFit};
pub use holder::{
    epsilon0, holder_exponent, holder_exponent_on, holder_time_exponent, lower_bound_onset,
    OnsetGrid, OnsetReport,
};
pub use jkl::{multi_indices, verify_jkl, JklReport};
