//! Steam-methane reforming: an affine cost surrogate in the two state-varying
//! prices, and life-cycle emissions interpolated over methane leakage.

use crate::electrolysis::EmissionsResult;
use crate::error::{Error, Result};
use crate::model::{EmissionsAnchor, Pathway, SmrParams, StateEnergyProfile};

/// SMR hydrogen cost in USD/kg for one state's gas and electricity prices.
pub fn smr_lcoh(params: &SmrParams, profile: &StateEnergyProfile, with_ccs: bool) -> f64 {
    let adder = if with_ccs { params.ccs_adder } else { 0.0 };
    params.base_cost + price_component(params, profile) + adder
}

/// The part of the SMR cost that varies between states.
pub fn price_component(params: &SmrParams, profile: &StateEnergyProfile) -> f64 {
    params.gas_sensitivity * profile.gas_price
        + params.electricity_sensitivity * profile.electricity_price
}

/// Intercept that makes the mean no-capture SMR cost over `profiles` equal
/// `target_mean`.
pub fn calibrate_base_cost(
    params: &SmrParams,
    profiles: &[StateEnergyProfile],
    target_mean: f64,
) -> Result<f64> {
    if profiles.is_empty() {
        return Err(Error::Domain("cannot calibrate against an empty dataset".into()));
    }
    let mean = profiles.iter().map(|p| price_component(params, p)).sum::<f64>()
        / profiles.len() as f64;
    Ok(target_mean - mean)
}

/// Life-cycle SMR emissions at `params.leakage_rate`, kg CO2e per kg H2.
pub fn smr_emissions(params: &SmrParams, with_ccs: bool) -> Result<EmissionsResult> {
    let column = |a: &EmissionsAnchor| if with_ccs { a.with_ccs } else { a.without_ccs };
    let value = interpolate(&params.emissions_anchors, params.leakage_rate, column)?;
    Ok(EmissionsResult {
        carbon_intensity: value,
        pathway: if with_ccs { Pathway::SmrCcs } else { Pathway::Smr },
        state: None,
    })
}

// Piecewise-linear lookup on anchors sorted by leakage. No extrapolation.
fn interpolate(
    anchors: &[EmissionsAnchor],
    x: f64,
    column: impl Fn(&EmissionsAnchor) -> f64,
) -> Result<f64> {
    let (first, last) = match (anchors.first(), anchors.last()) {
        (Some(f), Some(l)) if anchors.len() >= 2 => (f, l),
        _ => return Err(Error::Domain("emissions table needs at least two anchors".into())),
    };
    if !(x >= first.leakage && x <= last.leakage) {
        return Err(Error::Domain(format!(
            "leakage rate {x} outside anchor range [{}, {}]",
            first.leakage, last.leakage
        )));
    }
    // first anchor whose leakage is >= x
    let hi = anchors.partition_point(|a| a.leakage < x);
    let upper = &anchors[hi];
    if upper.leakage == x {
        return Ok(column(upper));
    }
    let lower = &anchors[hi - 1];
    let t = (x - lower.leakage) / (upper.leakage - lower.leakage);
    Ok(column(lower) + t * (column(upper) - column(lower)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::StateCode;
    use proptest::prelude::*;

    fn profile(elec: f64, gas: f64) -> StateEnergyProfile {
        StateEnergyProfile::new(StateCode::new("TX").unwrap(), elec, gas, 0.4, 2020).unwrap()
    }

    #[test]
    fn ccs_adds_exactly_the_adder() {
        let p = SmrParams::default();
        let s = profile(0.0534, 2.21);
        let diff = smr_lcoh(&p, &s, true) - smr_lcoh(&p, &s, false);
        assert!((diff - 0.4).abs() < 1e-12);
    }

    #[test]
    fn intercept_at_zero_prices() {
        let p = SmrParams::default();
        let s = StateEnergyProfile {
            state: StateCode::new("TX").unwrap(),
            electricity_price: 0.0,
            gas_price: 0.0,
            grid_carbon_intensity: 0.0,
            vintage_year: 2020,
        };
        assert_eq!(smr_lcoh(&p, &s, false), p.base_cost);
        assert_eq!(smr_lcoh(&p, &s, true), p.base_cost + p.ccs_adder);
    }

    #[test]
    fn emissions_at_three_percent_leakage() {
        let p = SmrParams::default();
        let without = smr_emissions(&p, false).unwrap();
        let with = smr_emissions(&p, true).unwrap();
        assert!((without.carbon_intensity - 12.9).abs() < 1e-12);
        assert!((with.carbon_intensity - 5.3).abs() < 1e-12);
        assert_eq!(without.pathway, Pathway::Smr);
        assert_eq!(with.pathway, Pathway::SmrCcs);
    }

    #[test]
    fn emissions_fixed_points_at_anchors() {
        let mut p = SmrParams::default();
        for a in p.emissions_anchors.clone() {
            p.leakage_rate = a.leakage;
            assert_eq!(smr_emissions(&p, false).unwrap().carbon_intensity, a.without_ccs);
            assert_eq!(smr_emissions(&p, true).unwrap().carbon_intensity, a.with_ccs);
        }
    }

    #[test]
    fn no_extrapolation() {
        let mut p = SmrParams::default();
        p.leakage_rate = 0.001;
        assert!(smr_emissions(&p, false).is_err());
        p.leakage_rate = 0.09;
        assert!(smr_emissions(&p, true).is_err());
    }

    #[test]
    fn calibration_hits_target_mean() {
        let p = SmrParams::default();
        let states = [profile(0.05, 3.0), profile(0.10, 6.0), profile(0.07, 4.5)];
        let base = calibrate_base_cost(&p, &states, 1.0).unwrap();
        let q = SmrParams { base_cost: base, ..p };
        let mean = states.iter().map(|s| smr_lcoh(&q, s, false)).sum::<f64>() / 3.0;
        assert!((mean - 1.0).abs() < 1e-12);
        assert!(calibrate_base_cost(&q, &[], 1.0).is_err());
    }

    proptest! {
        #[test]
        fn finite_differences_recover_sensitivities(e in 0.01f64..0.3, g in 0.5f64..25.0, h in 0.5f64..4.0) {
            let p = SmrParams::default();
            let base = smr_lcoh(&p, &profile(e, g), false);
            let dg = (smr_lcoh(&p, &profile(e, g + h), false) - base) / h;
            let de = (smr_lcoh(&p, &profile(e + h, g), false) - base) / h;
            prop_assert!((dg - p.gas_sensitivity).abs() <= 1e-12 * p.gas_sensitivity);
            prop_assert!((de - p.electricity_sensitivity).abs() <= 1e-12 * p.electricity_sensitivity);
        }

        #[test]
        fn emissions_monotone_and_ccs_lower(a in 0.002f64..=0.08, b in 0.002f64..=0.08) {
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            let at = |x: f64, ccs: bool| {
                let p = SmrParams { leakage_rate: x, ..SmrParams::default() };
                smr_emissions(&p, ccs).unwrap().carbon_intensity
            };
            prop_assert!(at(lo, false) <= at(hi, false));
            prop_assert!(at(lo, true) <= at(hi, true));
            prop_assert!(at(lo, true) <= at(lo, false));
        }
    }
}
