//! Time value of money and learning-curve primitives.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Hours in a (non-leap) calendar year.
pub const HOURS_PER_YEAR: f64 = 8760.0;

/// Present value of one unit paid at the end of each year for `years` years.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnnuityFactor {
    pub value: f64,
    pub rate: f64,
    pub years: f64,
}

/// Present value interest factor of an annuity, `(1 - (1 + r)^-n) / r`.
///
/// A zero rate returns the analytic limit `n`. The factor is evaluated via
/// `expm1`/`ln_1p` so it stays accurate for rates close to zero.
pub fn pvifa(discount_rate: f64, lifetime_years: f64) -> Result<AnnuityFactor> {
    if !(discount_rate.is_finite() && discount_rate >= 0.0) {
        return Err(Error::Domain(format!(
            "discount rate must be a non-negative number, got {discount_rate}"
        )));
    }
    if !(lifetime_years.is_finite() && lifetime_years > 0.0) {
        return Err(Error::Domain(format!(
            "annuity lifetime must be positive, got {lifetime_years}"
        )));
    }
    let value = if discount_rate == 0.0 {
        lifetime_years
    } else {
        -(-lifetime_years * discount_rate.ln_1p()).exp_m1() / discount_rate
    };
    Ok(AnnuityFactor { value, rate: discount_rate, years: lifetime_years })
}

/// Converts a stack lifetime in thousands of operating hours into calendar
/// years at the given capacity factor.
pub fn lifetime_hours_to_years(lifetime_thousand_hours: f64, capacity_factor: f64) -> Result<f64> {
    if !(lifetime_thousand_hours.is_finite() && lifetime_thousand_hours > 0.0) {
        return Err(Error::Domain(format!(
            "lifetime must be positive, got {lifetime_thousand_hours} thousand hours"
        )));
    }
    if !(capacity_factor.is_finite() && capacity_factor > 0.0 && capacity_factor <= 1.0) {
        return Err(Error::Domain(format!(
            "capacity factor must be in (0, 1], got {capacity_factor}"
        )));
    }
    Ok(1000.0 * lifetime_thousand_hours / (HOURS_PER_YEAR * capacity_factor))
}

/// Wright's law: unit cost falls by `learning_rate` for every doubling of
/// cumulative installed capacity.
pub fn wright_capital_cost(
    base_unit_cost: f64,
    learning_rate: f64,
    cumulative_base: f64,
    cumulative_target: f64,
) -> Result<f64> {
    if !(base_unit_cost.is_finite() && base_unit_cost >= 0.0) {
        return Err(Error::Domain(format!("unit cost must be >= 0, got {base_unit_cost}")));
    }
    if !(learning_rate.is_finite() && (0.0..1.0).contains(&learning_rate)) {
        return Err(Error::Domain(format!("learning rate must be in [0, 1), got {learning_rate}")));
    }
    if !(cumulative_base.is_finite() && cumulative_base > 0.0) {
        return Err(Error::Domain(format!(
            "base cumulative production must be positive, got {cumulative_base}"
        )));
    }
    if !(cumulative_target.is_finite() && cumulative_target >= cumulative_base) {
        return Err(Error::Domain(format!(
            "target cumulative production {cumulative_target} is below base {cumulative_base}"
        )));
    }
    let doublings = (cumulative_target / cumulative_base).log2();
    Ok(base_unit_cost * (1.0 - learning_rate).powf(doublings))
}
