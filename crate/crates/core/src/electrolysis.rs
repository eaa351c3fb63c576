//! Levelized cost and carbon intensity of electrolytic hydrogen.
//!
//! All money and production quantities are discounted lifetime totals for a
//! single plant of the technology's rated capacity. The plant runs
//! `capacity_factor` of the year, which also stretches its calendar life
//! since the lifetime is counted in operating hours.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::finance::{lifetime_hours_to_years, pvifa, AnnuityFactor, HOURS_PER_YEAR};
use crate::model::{LcohBreakdown, Pathway, StateCode, TechnologyParams};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmissionsResult {
    /// kg CO2e per kg H2.
    pub carbon_intensity: f64,
    pub pathway: Pathway,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub state: Option<StateCode>,
}

/// Annuity factor over the plant's calendar life at the given capacity factor.
pub fn plant_annuity(params: &TechnologyParams, capacity_factor: f64) -> Result<AnnuityFactor> {
    let years = lifetime_hours_to_years(params.lifetime, capacity_factor)?;
    pvifa(params.discount_rate, years)
}

/// Upfront capital, USD.
pub fn capital_cost(params: &TechnologyParams) -> f64 {
    params.unit_system_cost * params.capacity
}

/// Discounted fixed O&M over the plant life, USD.
pub fn om_cost(params: &TechnologyParams, annuity: &AnnuityFactor) -> f64 {
    params.unit_om_cost * annuity.value
}

/// Discounted electricity purchases over the plant life, USD.
pub fn electricity_cost(
    price: f64,
    params: &TechnologyParams,
    annuity: &AnnuityFactor,
    capacity_factor: f64,
) -> f64 {
    price * annual_energy(params, capacity_factor) * annuity.value
}

/// Discounted hydrogen output over the plant life, kg.
pub fn hydrogen_production(
    params: &TechnologyParams,
    annuity: &AnnuityFactor,
    capacity_factor: f64,
) -> f64 {
    annual_energy(params, capacity_factor) * annuity.value / params.efficiency
}

// kWh consumed per calendar year
fn annual_energy(params: &TechnologyParams, capacity_factor: f64) -> f64 {
    params.capacity * HOURS_PER_YEAR * capacity_factor
}

/// Full cost breakdown and levelized cost at an electricity price in USD/kWh.
pub fn lcoh(params: &TechnologyParams, price: f64, capacity_factor: f64) -> Result<LcohBreakdown> {
    if !(price.is_finite() && price >= 0.0) {
        return Err(Error::Domain(format!("electricity price must be >= 0, got {price}")));
    }
    if !(params.efficiency.is_finite() && params.efficiency > 0.0) {
        return Err(Error::Domain(format!(
            "{}: efficiency must be positive, got {}",
            params.name, params.efficiency
        )));
    }
    let annuity = plant_annuity(params, capacity_factor)?;
    let capital = capital_cost(params);
    let om = om_cost(params, &annuity);
    let electricity = electricity_cost(price, params, &annuity, capacity_factor);
    let production = hydrogen_production(params, &annuity, capacity_factor);
    if !(production > 0.0) {
        return Err(Error::Domain(format!("{}: zero hydrogen production", params.name)));
    }
    Ok(LcohBreakdown {
        capital_cost: capital,
        om_cost: om,
        electricity_cost: electricity,
        hydrogen_production: production,
        lcoh: (capital + om + electricity) / production,
    })
}

/// Carbon intensity of hydrogen from grid electricity: grid intensity times
/// specific energy consumption.
pub fn carbon_intensity(grid_ci: f64, params: &TechnologyParams) -> Result<EmissionsResult> {
    if !(grid_ci.is_finite() && grid_ci >= 0.0) {
        return Err(Error::Domain(format!("grid carbon intensity must be >= 0, got {grid_ci}")));
    }
    Ok(EmissionsResult {
        carbon_intensity: grid_ci * params.efficiency,
        pathway: params.name.into(),
        state: None,
    })
}
