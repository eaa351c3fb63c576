//! Projection of technology parameters and grid intensity through time, plus
//! breakeven and crossover solvers.

use serde::{Deserialize, Serialize};

use crate::electrolysis::lcoh;
use crate::error::{Error, Result};
use crate::finance::wright_capital_cost;
use crate::ingest::Dataset;
use crate::model::{
    ElectricityPriceRule, GridTrajectory, Scenario, StateEnergyProfile, TechnologyParams, Year,
};

/// Technology parameters at the scenario's target year: capital cost moved
/// along the learning curve, plus any lifetime or O&M overrides the scenario
/// carries. Everything else is untouched.
pub fn project_params(params: &TechnologyParams, scenario: &Scenario) -> Result<TechnologyParams> {
    let mut out = params.clone();
    out.unit_system_cost = wright_capital_cost(
        params.unit_system_cost,
        params.learning_rate(scenario.learning_case),
        params.cumulative_production_base,
        scenario.cumulative_target(params),
    )?;
    if let Some(&lifetime) = scenario.lifetime_override.get(&params.name) {
        out.lifetime = lifetime;
    }
    if let Some(&om) = scenario.om_cost_override.get(&params.name) {
        out.unit_om_cost = om;
    }
    Ok(out)
}

/// Electricity price an electrolyser pays in a state under a price rule.
pub fn effective_electricity_price(profile: &StateEnergyProfile, rule: ElectricityPriceRule) -> f64 {
    match rule {
        ElectricityPriceRule::AsDataset => profile.electricity_price,
        ElectricityPriceRule::FixedValue(v) => v,
        ElectricityPriceRule::Multiplier(m) => m * profile.electricity_price,
    }
}

/// Grid carbon intensity in `query_year` given its base-year value.
pub fn grid_ci_at(
    base_ci: f64,
    trajectory: GridTrajectory,
    base_year: Year,
    query_year: Year,
) -> Result<f64> {
    if query_year < base_year {
        return Err(Error::Domain(format!(
            "query year {query_year} precedes base year {base_year}"
        )));
    }
    match trajectory {
        GridTrajectory::Constant => Ok(base_ci),
        GridTrajectory::LinearToZero(zero) => Ok(base_ci * linear_factor(zero, base_year, query_year)?),
    }
}

// Remaining share of base-year intensity on a straight line to zero.
fn linear_factor(zero_year: Year, base_year: Year, query_year: Year) -> Result<f64> {
    if zero_year <= base_year {
        return Err(Error::Domain(format!(
            "zero year {zero_year} must be after base year {base_year}"
        )));
    }
    if query_year >= zero_year {
        return Ok(0.0);
    }
    Ok(f64::from(zero_year - query_year) / f64::from(zero_year - base_year))
}

/// Outcome of a breakeven search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Breakeven {
    /// USD/kWh at which LCOH equals the target.
    Price { usd_per_kwh: f64 },
    /// The target is below the LCOH at free electricity.
    Unattainable { zero_price_lcoh: f64 },
}

impl Breakeven {
    pub fn price(&self) -> Option<f64> {
        match *self {
            Breakeven::Price { usd_per_kwh } => Some(usd_per_kwh),
            Breakeven::Unattainable { .. } => None,
        }
    }
}

/// Electricity price at which the technology's LCOH equals `target_lcoh`.
///
/// LCOH is affine in price with slope equal to the specific energy
/// consumption, so the root is closed-form and unique.
pub fn breakeven_electricity_price(
    params: &TechnologyParams,
    capacity_factor: f64,
    target_lcoh: f64,
) -> Result<Breakeven> {
    if !target_lcoh.is_finite() {
        return Err(Error::Domain(format!("target LCOH must be finite, got {target_lcoh}")));
    }
    let floor = lcoh(params, 0.0, capacity_factor)?.lcoh;
    if target_lcoh < floor {
        return Ok(Breakeven::Unattainable { zero_price_lcoh: floor });
    }
    Ok(Breakeven::Price { usd_per_kwh: (target_lcoh - floor) / params.efficiency })
}

/// Unweighted mean electrolysis carbon intensity over all states and the
/// given technologies in `year`, kg CO2e per kg H2.
pub fn average_electrolysis_ci(
    dataset: &Dataset,
    techs: &[TechnologyParams],
    trajectory: GridTrajectory,
    year: Year,
) -> Result<f64> {
    Ok(base_average_ci(dataset, techs)? * trajectory_factor(trajectory, dataset.vintage_year, year)?)
}

fn base_average_ci(dataset: &Dataset, techs: &[TechnologyParams]) -> Result<f64> {
    if techs.is_empty() || dataset.is_empty() {
        return Err(Error::Domain("crossover needs at least one technology and one state".into()));
    }
    let mean_eff = techs.iter().map(|t| t.efficiency).sum::<f64>() / techs.len() as f64;
    let mean_grid = dataset.profiles.iter().map(|p| p.grid_carbon_intensity).sum::<f64>()
        / dataset.len() as f64;
    Ok(mean_eff * mean_grid)
}

fn trajectory_factor(trajectory: GridTrajectory, base_year: Year, year: Year) -> Result<f64> {
    grid_ci_at(1.0, trajectory, base_year, year)
}

/// First year in which the average electrolysis carbon intensity is strictly
/// below `smr_ci_target`.
///
/// Returns the dataset's base year if it is already below, and `None` when
/// the trajectory never gets there (a constant grid, or a non-positive
/// target).
pub fn crossover_year(
    dataset: &Dataset,
    techs: &[TechnologyParams],
    trajectory: GridTrajectory,
    smr_ci_target: f64,
) -> Result<Option<Year>> {
    let base_year = dataset.vintage_year;
    let start = base_average_ci(dataset, techs)?;
    if start < smr_ci_target {
        return Ok(Some(base_year));
    }
    let zero_year = match trajectory {
        GridTrajectory::Constant => return Ok(None),
        GridTrajectory::LinearToZero(z) => z,
    };
    // validates zero_year > base_year
    linear_factor(zero_year, base_year, base_year)?;
    if smr_ci_target <= 0.0 {
        return Ok(None);
    }

    // start * (z - y) / (z - b) < target  <=>  y > z - target * (z - b) / start
    let span = f64::from(zero_year - base_year);
    let bound = f64::from(zero_year) - smr_ci_target * span / start;
    let below = |y: Year| -> Result<bool> {
        Ok(start * trajectory_factor(trajectory, base_year, y)? < smr_ci_target)
    };
    let mut year = (bound.floor() as Year + 1).clamp(base_year, zero_year);
    // guard the float rounding at the boundary
    while year > base_year && below(year - 1)? {
        year -= 1;
    }
    while !below(year)? {
        year += 1;
    }
    Ok(Some(year))
}
