//! Domain types and the built-in technology registry.
//!
//! Everything here is an immutable value object once validated. Constructors
//! and `validate` methods enforce the numeric invariants so downstream
//! calculations can assume well-formed inputs.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Calendar year.
pub type Year = i32;

/// Electrolysis technology.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Technology {
    Alkaline,
    #[serde(rename = "PEM")]
    Pem,
    #[serde(rename = "SOEC")]
    Soec,
}

impl Technology {
    pub const ALL: [Technology; 3] = [Technology::Alkaline, Technology::Pem, Technology::Soec];

    pub fn as_str(self) -> &'static str {
        match self {
            Technology::Alkaline => "Alkaline",
            Technology::Pem => "PEM",
            Technology::Soec => "SOEC",
        }
    }
}

impl fmt::Display for Technology {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Technology {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "alkaline" | "alk" => Ok(Technology::Alkaline),
            "pem" => Ok(Technology::Pem),
            "soec" => Ok(Technology::Soec),
            _ => Err(Error::Validation(format!("unknown technology `{s}`"))),
        }
    }
}

/// Production pathway as reported in result tables. Ordering is the report
/// row order within a state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Pathway {
    Alkaline,
    #[serde(rename = "PEM")]
    Pem,
    #[serde(rename = "SOEC")]
    Soec,
    #[serde(rename = "SMR")]
    Smr,
    #[serde(rename = "SMR+CCS")]
    SmrCcs,
}

impl Pathway {
    pub const ALL: [Pathway; 5] = [
        Pathway::Alkaline,
        Pathway::Pem,
        Pathway::Soec,
        Pathway::Smr,
        Pathway::SmrCcs,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Pathway::Alkaline => "Alkaline",
            Pathway::Pem => "PEM",
            Pathway::Soec => "SOEC",
            Pathway::Smr => "SMR",
            Pathway::SmrCcs => "SMR+CCS",
        }
    }

    pub fn technology(self) -> Option<Technology> {
        match self {
            Pathway::Alkaline => Some(Technology::Alkaline),
            Pathway::Pem => Some(Technology::Pem),
            Pathway::Soec => Some(Technology::Soec),
            Pathway::Smr | Pathway::SmrCcs => None,
        }
    }

    pub fn is_electrolysis(self) -> bool {
        self.technology().is_some()
    }
}

impl From<Technology> for Pathway {
    fn from(t: Technology) -> Self {
        match t {
            Technology::Alkaline => Pathway::Alkaline,
            Technology::Pem => Pathway::Pem,
            Technology::Soec => Pathway::Soec,
        }
    }
}

impl fmt::Display for Pathway {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Two-letter U.S. postal code (DC included).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct StateCode(String);

impl StateCode {
    pub fn new(code: &str) -> Result<Self> {
        let code = code.trim();
        if code.len() == 2 && code.bytes().all(|b| b.is_ascii_uppercase()) {
            Ok(StateCode(code.to_owned()))
        } else {
            Err(Error::Validation(format!(
                "invalid state code `{code}`: expected two upper-case letters"
            )))
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl TryFrom<String> for StateCode {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        StateCode::new(&s)
    }
}

impl From<StateCode> for String {
    fn from(s: StateCode) -> String {
        s.0
    }
}

impl fmt::Display for StateCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

fn require(cond: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::Validation(msg()))
    }
}

fn positive(v: f64) -> bool {
    v.is_finite() && v > 0.0
}

fn unit_open(v: f64) -> bool {
    v.is_finite() && v > 0.0 && v < 1.0
}

/// Economic and physical parameters of one electrolysis technology.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TechnologyParams {
    pub name: Technology,
    /// Fractional cost reduction per capacity doubling, APS case.
    pub learning_rate_aps: f64,
    /// Fractional cost reduction per capacity doubling, NZE case.
    pub learning_rate_nze: f64,
    /// Installed capacity at the base year, MW.
    pub cumulative_production_base: f64,
    /// Plant size, kW.
    pub capacity: f64,
    /// Stack lifetime, thousands of operating hours.
    pub lifetime: f64,
    /// Specific energy consumption, kWh per kg H2.
    pub efficiency: f64,
    /// Capital cost, USD/kW.
    pub unit_system_cost: f64,
    /// Fixed O&M, USD/yr.
    pub unit_om_cost: f64,
    pub discount_rate: f64,
}

impl TechnologyParams {
    pub fn validate(&self) -> Result<()> {
        let n = self.name;
        require(unit_open(self.learning_rate_aps), || {
            format!("{n}: learning_rate_aps must be in (0, 1), got {}", self.learning_rate_aps)
        })?;
        require(unit_open(self.learning_rate_nze), || {
            format!("{n}: learning_rate_nze must be in (0, 1), got {}", self.learning_rate_nze)
        })?;
        require(unit_open(self.discount_rate), || {
            format!("{n}: discount_rate must be in (0, 1), got {}", self.discount_rate)
        })?;
        for (field, v) in [
            ("cumulative_production_base", self.cumulative_production_base),
            ("capacity", self.capacity),
            ("lifetime", self.lifetime),
            ("efficiency", self.efficiency),
            ("unit_system_cost", self.unit_system_cost),
            ("unit_om_cost", self.unit_om_cost),
        ] {
            require(positive(v), || format!("{n}: {field} must be > 0, got {v}"))?;
        }
        Ok(())
    }

    pub fn learning_rate(&self, case: LearningCase) -> f64 {
        match case {
            LearningCase::Aps => self.learning_rate_aps,
            LearningCase::Nze => self.learning_rate_nze,
        }
    }
}

/// The three technologies with their published 2020 parameters.
pub fn default_registry() -> Vec<TechnologyParams> {
    vec![
        TechnologyParams {
            name: Technology::Alkaline,
            learning_rate_aps: 0.145,
            learning_rate_nze: 0.140,
            cumulative_production_base: 20_000.0,
            capacity: 10_000.0,
            lifetime: 60.0,
            efficiency: 56.0,
            unit_system_cost: 750.0,
            unit_om_cost: 1_800.0,
            discount_rate: 0.07,
        },
        TechnologyParams {
            name: Technology::Pem,
            learning_rate_aps: 0.140,
            learning_rate_nze: 0.135,
            cumulative_production_base: 90.0,
            capacity: 10_000.0,
            lifetime: 75.0,
            efficiency: 51.0,
            unit_system_cost: 1_200.0,
            unit_om_cost: 1_500.0,
            discount_rate: 0.07,
        },
        TechnologyParams {
            name: Technology::Soec,
            learning_rate_aps: 0.105,
            learning_rate_nze: 0.100,
            cumulative_production_base: 2.0,
            capacity: 1_000.0,
            lifetime: 40.0,
            efficiency: 44.0,
            unit_system_cost: 2_500.0,
            unit_om_cost: 20_000.0,
            discount_rate: 0.07,
        },
    ]
}

/// Looks up a technology in a registry.
pub fn find_technology(registry: &[TechnologyParams], tech: Technology) -> Result<&TechnologyParams> {
    registry
        .iter()
        .find(|p| p.name == tech)
        .ok_or_else(|| Error::Validation(format!("technology {tech} missing from registry")))
}

/// One state's energy prices and grid intensity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateEnergyProfile {
    pub state: StateCode,
    /// Industrial electricity, USD/kWh.
    pub electricity_price: f64,
    /// Industrial natural gas, USD/MMBtu.
    pub gas_price: f64,
    /// kg CO2e per kWh.
    pub grid_carbon_intensity: f64,
    pub vintage_year: Year,
}

impl StateEnergyProfile {
    pub fn new(
        state: StateCode,
        electricity_price: f64,
        gas_price: f64,
        grid_carbon_intensity: f64,
        vintage_year: Year,
    ) -> Result<Self> {
        let profile = StateEnergyProfile {
            state,
            electricity_price,
            gas_price,
            grid_carbon_intensity,
            vintage_year,
        };
        profile.validate()?;
        Ok(profile)
    }

    pub fn validate(&self) -> Result<()> {
        let s = &self.state;
        require(positive(self.electricity_price), || {
            format!("{s}: electricity_price must be > 0, got {}", self.electricity_price)
        })?;
        require(positive(self.gas_price), || {
            format!("{s}: gas_price must be > 0, got {}", self.gas_price)
        })?;
        require(
            self.grid_carbon_intensity.is_finite() && self.grid_carbon_intensity >= 0.0,
            || {
                format!(
                    "{s}: grid_carbon_intensity must be >= 0, got {}",
                    self.grid_carbon_intensity
                )
            },
        )
    }
}

/// Discounted lifetime totals for one electrolysis plant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LcohBreakdown {
    /// USD
    pub capital_cost: f64,
    /// USD, discounted
    pub om_cost: f64,
    /// USD, discounted
    pub electricity_cost: f64,
    /// kg H2, discounted
    pub hydrogen_production: f64,
    /// USD per kg H2
    pub lcoh: f64,
}

impl LcohBreakdown {
    pub fn total_cost(&self) -> f64 {
        self.capital_cost + self.om_cost + self.electricity_cost
    }
}

/// One point of the SMR life-cycle emissions table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EmissionsAnchor {
    /// Upstream methane leakage fraction.
    pub leakage: f64,
    /// kg CO2e per kg H2 without capture.
    pub without_ccs: f64,
    /// kg CO2e per kg H2 with 90% CO2 capture.
    pub with_ccs: f64,
}

/// Parameters of the affine SMR cost surrogate and the leakage-indexed
/// emissions table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SmrParams {
    /// USD/kg H2, price-independent part.
    pub base_cost: f64,
    /// USD/kg H2 per USD/MMBtu.
    pub gas_sensitivity: f64,
    /// USD/kg H2 per USD/kWh.
    pub electricity_sensitivity: f64,
    /// USD/kg H2 added by 90% capture.
    pub ccs_adder: f64,
    pub emissions_anchors: Vec<EmissionsAnchor>,
    pub leakage_rate: f64,
}

impl Default for SmrParams {
    /// Surrogate coefficients, not H2A outputs. `base_cost` is calibrated so
    /// the shipped 2020 dataset averages 1.00 USD/kg without capture (see
    /// [`crate::smr::calibrate_base_cost`]).
    fn default() -> Self {
        SmrParams {
            base_cost: 0.2145,
            gas_sensitivity: 0.16,
            electricity_sensitivity: 0.03,
            ccs_adder: 0.4,
            emissions_anchors: vec![
                EmissionsAnchor { leakage: 0.002, without_ccs: 10.1, with_ccs: 1.94 },
                EmissionsAnchor { leakage: 0.015, without_ccs: 11.4, with_ccs: 3.5 },
                EmissionsAnchor { leakage: 0.080, without_ccs: 17.9, with_ccs: 11.3 },
            ],
            leakage_rate: 0.030,
        }
    }
}

impl SmrParams {
    pub fn validate(&self) -> Result<()> {
        require(self.base_cost.is_finite(), || "smr: base_cost must be finite".into())?;
        for (field, v) in [
            ("gas_sensitivity", self.gas_sensitivity),
            ("electricity_sensitivity", self.electricity_sensitivity),
            ("ccs_adder", self.ccs_adder),
        ] {
            require(v.is_finite() && v >= 0.0, || format!("smr: {field} must be >= 0, got {v}"))?;
        }
        require(self.emissions_anchors.len() >= 2, || {
            "smr: emissions_anchors needs at least 2 entries".into()
        })?;
        for a in &self.emissions_anchors {
            require(
                a.leakage.is_finite()
                    && (0.0..=1.0).contains(&a.leakage)
                    && a.without_ccs.is_finite()
                    && a.without_ccs >= 0.0
                    && a.with_ccs.is_finite()
                    && a.with_ccs >= 0.0,
                || format!("smr: malformed emissions anchor {a:?}"),
            )?;
        }
        require(
            self.emissions_anchors.windows(2).all(|w| w[0].leakage < w[1].leakage),
            || "smr: anchor leakage values must be strictly increasing".into(),
        )?;
        require(
            self.leakage_rate.is_finite() && (0.0..=1.0).contains(&self.leakage_rate),
            || format!("smr: leakage_rate must be in [0, 1], got {}", self.leakage_rate),
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LearningCase {
    #[serde(rename = "APS")]
    Aps,
    #[serde(rename = "NZE")]
    Nze,
}

/// How electrolysis plants pay for electricity in a scenario.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ElectricityPriceRule {
    AsDataset,
    /// USD/kWh for every state.
    FixedValue(f64),
    /// Fraction of each state's dataset price.
    Multiplier(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GridTrajectory {
    Constant,
    /// Linear decline from the base year to zero in the given year.
    LinearToZero(Year),
}

/// A named projection of technology costs, prices, and grid intensity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    pub target_year: Year,
    pub learning_case: LearningCase,
    /// Installed capacity at `target_year`, MW. Technologies not listed stay
    /// at their base cumulative production.
    #[serde(default)]
    pub cumulative_production_target: BTreeMap<Technology, f64>,
    pub electricity_price_rule: ElectricityPriceRule,
    pub capacity_factor: f64,
    pub grid_trajectory: GridTrajectory,
    /// Replacement lifetimes at `target_year`, thousands of operating hours.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub lifetime_override: BTreeMap<Technology, f64>,
    /// Replacement fixed O&M at `target_year`, USD/yr.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub om_cost_override: BTreeMap<Technology, f64>,
}

impl Scenario {
    /// Base-year scenario: no learning, dataset prices, full-time operation,
    /// constant grid.
    pub fn baseline(name: impl Into<String>, year: Year) -> Self {
        Scenario {
            name: name.into(),
            target_year: year,
            learning_case: LearningCase::Aps,
            cumulative_production_target: BTreeMap::new(),
            electricity_price_rule: ElectricityPriceRule::AsDataset,
            capacity_factor: 1.0,
            grid_trajectory: GridTrajectory::Constant,
            lifetime_override: BTreeMap::new(),
            om_cost_override: BTreeMap::new(),
        }
    }

    /// Checks the scenario's self-contained invariants. Returns the scenario
    /// so construction reads as `Scenario { .. }.validated()?`.
    pub fn validated(self) -> Result<Self> {
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        let n = &self.name;
        require(!n.trim().is_empty(), || "scenario name must not be empty".into())?;
        require(
            self.capacity_factor.is_finite()
                && self.capacity_factor > 0.0
                && self.capacity_factor <= 1.0,
            || format!("scenario {n}: capacity_factor must be in (0, 1], got {}", self.capacity_factor),
        )?;
        match self.electricity_price_rule {
            ElectricityPriceRule::AsDataset => {}
            ElectricityPriceRule::FixedValue(v) | ElectricityPriceRule::Multiplier(v) => {
                require(v.is_finite() && v >= 0.0, || {
                    format!("scenario {n}: electricity price rule value must be >= 0, got {v}")
                })?
            }
        }
        for (t, v) in &self.cumulative_production_target {
            require(positive(*v), || {
                format!("scenario {n}: cumulative_production_target[{t}] must be > 0, got {v}")
            })?;
        }
        for (t, v) in &self.lifetime_override {
            require(positive(*v), || format!("scenario {n}: lifetime_override[{t}] must be > 0, got {v}"))?;
        }
        for (t, v) in &self.om_cost_override {
            require(v.is_finite() && *v >= 0.0, || {
                format!("scenario {n}: om_cost_override[{t}] must be >= 0, got {v}")
            })?;
        }
        Ok(())
    }

    /// Checks the invariants that depend on the registry and the dataset's
    /// base year.
    pub fn validate_against(&self, registry: &[TechnologyParams], base_year: Year) -> Result<()> {
        let n = &self.name;
        require(self.target_year >= base_year, || {
            format!("scenario {n}: target_year {} precedes base year {base_year}", self.target_year)
        })?;
        if let GridTrajectory::LinearToZero(zero) = self.grid_trajectory {
            require(zero > base_year, || {
                format!("scenario {n}: zero year {zero} must be after base year {base_year}")
            })?;
        }
        self.validate_registry(registry)
    }

    /// Checks that every cumulative-production target is at or above the
    /// technology's base (no forgetting).
    pub fn validate_registry(&self, registry: &[TechnologyParams]) -> Result<()> {
        let n = &self.name;
        for (tech, target) in &self.cumulative_production_target {
            let params = find_technology(registry, *tech)?;
            require(*target >= params.cumulative_production_base, || {
                format!(
                    "scenario {n}: cumulative_production_target[{tech}] = {target} is below base {}",
                    params.cumulative_production_base
                )
            })?;
        }
        Ok(())
    }

    pub fn cumulative_target(&self, params: &TechnologyParams) -> f64 {
        self.cumulative_production_target
            .get(&params.name)
            .copied()
            .unwrap_or(params.cumulative_production_base)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_matches_published_table() {
        let reg = default_registry();
        assert_eq!(reg.len(), 3);
        let alk = find_technology(&reg, Technology::Alkaline).unwrap();
        assert_eq!(alk.unit_system_cost, 750.0);
        let soec = find_technology(&reg, Technology::Soec).unwrap();
        assert_eq!(soec.unit_om_cost, 20_000.0);
        let pem = find_technology(&reg, Technology::Pem).unwrap();
        assert_eq!(
            (pem.learning_rate_aps, pem.learning_rate_nze, pem.lifetime, pem.efficiency),
            (0.14, 0.135, 75.0, 51.0)
        );
        let mut names: Vec<_> = reg.iter().map(|p| p.name).collect();
        names.dedup();
        assert_eq!(names.len(), 3);
        for p in &reg {
            p.validate().unwrap();
        }
    }

    #[test]
    fn registry_serde_round_trip() {
        let reg = default_registry();
        let json = serde_json::to_string(&reg).unwrap();
        let back: Vec<TechnologyParams> = serde_json::from_str(&json).unwrap();
        assert_eq!(reg, back);
    }

    #[test]
    fn technology_rejects_out_of_range_rates() {
        let mut p = default_registry().remove(0);
        p.learning_rate_aps = 1.5;
        assert!(p.validate().is_err());
        let mut p = default_registry().remove(0);
        p.efficiency = 0.0;
        assert!(p.validate().is_err());
    }

    #[test]
    fn state_code_format() {
        assert!(StateCode::new("WA").is_ok());
        assert!(StateCode::new("DC").is_ok());
        assert!(StateCode::new("wa").is_err());
        assert!(StateCode::new("WAS").is_err());
    }

    #[test]
    fn profile_invariants() {
        let wa = StateCode::new("WA").unwrap();
        assert!(StateEnergyProfile::new(wa.clone(), 0.05, 4.0, 0.0, 2020).is_ok());
        assert!(StateEnergyProfile::new(wa.clone(), -0.01, 4.0, 0.1, 2020).is_err());
        assert!(StateEnergyProfile::new(wa.clone(), 0.05, 0.0, 0.1, 2020).is_err());
        assert!(StateEnergyProfile::new(wa, 0.05, 4.0, -0.1, 2020).is_err());
    }

    #[test]
    fn default_smr_params_are_valid() {
        let p = SmrParams::default();
        p.validate().unwrap();
        assert_eq!(p.ccs_adder, 0.4);
        assert_eq!(p.leakage_rate, 0.030);
    }

    #[test]
    fn smr_anchor_order_enforced() {
        let mut p = SmrParams::default();
        p.emissions_anchors.swap(0, 1);
        assert!(p.validate().is_err());
        p.emissions_anchors.truncate(1);
        assert!(p.validate().is_err());
    }

    #[test]
    fn scenario_validation() {
        let reg = default_registry();
        let base = Scenario::baseline("base", 2020).validated().unwrap();
        base.validate_against(&reg, 2020).unwrap();

        let mut s = base.clone();
        s.capacity_factor = 0.0;
        assert!(s.validated().is_err());

        let mut s = base.clone();
        s.capacity_factor = 1.2;
        assert!(s.validate().is_err());

        let mut s = base.clone();
        s.grid_trajectory = GridTrajectory::LinearToZero(2020);
        assert!(s.validate_against(&reg, 2020).is_err());

        let mut s = base.clone();
        s.cumulative_production_target.insert(Technology::Alkaline, 100.0);
        assert!(s.validate_against(&reg, 2020).is_err());

        let mut s = base;
        s.target_year = 2019;
        assert!(s.validate_against(&reg, 2020).is_err());
    }

    #[test]
    fn pathway_order_and_names() {
        let mut v = Pathway::ALL.to_vec();
        v.reverse();
        v.sort();
        assert_eq!(v, Pathway::ALL);
        assert_eq!(serde_json::to_string(&Pathway::SmrCcs).unwrap(), "\"SMR+CCS\"");
        assert_eq!("pem".parse::<Technology>().unwrap(), Technology::Pem);
    }
}
