//! Loading and validating state datasets and model configuration.
//!
//! State data is CSV with a mandatory header:
//!
//! ```text
//! state,electricity_usd_per_kwh,gas_usd_per_mmbtu,grid_ci_kg_per_kwh[,vintage_year]
//! ```
//!
//! Column order is free. Leading lines starting with `#` are kept as the
//! dataset's source notes. Units are fixed; nothing is auto-converted.
//!
//! Configuration is JSON with optional top-level sections `technologies`,
//! `smr` and `scenarios`. A missing section falls back to the built-in
//! defaults. A present section replaces the defaults wholesale, except that
//! `technologies` entries replace the default entry of the same name and
//! leave the other technologies untouched.

use std::collections::{BTreeSet, HashMap};
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{
    default_registry, SmrParams, Scenario, StateCode, StateEnergyProfile, TechnologyParams, Year,
};

pub const COL_STATE: &str = "state";
pub const COL_ELECTRICITY: &str = "electricity_usd_per_kwh";
pub const COL_GAS: &str = "gas_usd_per_mmbtu";
pub const COL_GRID_CI: &str = "grid_ci_kg_per_kwh";
pub const COL_VINTAGE: &str = "vintage_year";

const REQUIRED_COLUMNS: [&str; 4] = [COL_STATE, COL_ELECTRICITY, COL_GAS, COL_GRID_CI];

/// Vintage assumed when a state file has no `vintage_year` column.
pub const DEFAULT_VINTAGE: Year = 2020;

/// A single-vintage snapshot of per-state energy data.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub profiles: Vec<StateEnergyProfile>,
    pub vintage_year: Year,
    pub source_notes: String,
}

impl Dataset {
    pub fn new(profiles: Vec<StateEnergyProfile>, vintage_year: Year, source_notes: String) -> Result<Self> {
        if profiles.is_empty() {
            return Err(Error::Validation("dataset has no state profiles".into()));
        }
        let mut seen = BTreeSet::new();
        for p in &profiles {
            p.validate()?;
            if !seen.insert(p.state.as_str()) {
                return Err(Error::Validation(format!("duplicate state {}", p.state)));
            }
            if p.vintage_year != vintage_year {
                return Err(Error::Validation(format!(
                    "{}: vintage {} differs from dataset vintage {vintage_year}",
                    p.state, p.vintage_year
                )));
            }
        }
        Ok(Dataset { profiles, vintage_year, source_notes })
    }

    pub fn len(&self) -> usize {
        self.profiles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.profiles.is_empty()
    }

    pub fn get(&self, state: &str) -> Option<&StateEnergyProfile> {
        self.profiles.iter().find(|p| p.state.as_str() == state)
    }

    /// Canonical CSV form. Loading the output reproduces this dataset, and
    /// re-emitting it is byte-identical.
    pub fn to_csv_string(&self) -> String {
        let mut out = String::new();
        for line in self.source_notes.lines() {
            if line.is_empty() {
                out.push_str("#\n");
            } else {
                let _ = writeln!(out, "# {line}");
            }
        }
        let _ = writeln!(
            out,
            "{COL_STATE},{COL_ELECTRICITY},{COL_GAS},{COL_GRID_CI},{COL_VINTAGE}"
        );
        for p in &self.profiles {
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                p.state, p.electricity_price, p.gas_price, p.grid_carbon_intensity, p.vintage_year
            );
        }
        out
    }
}

/// Options for [`load_state_profiles_with`].
#[derive(Debug, Clone)]
pub struct LoadOptions {
    /// Strict mode rejects blank fields and unknown columns. Lenient mode
    /// skips rows with blank fields (recording them in the source notes) and
    /// ignores unknown columns.
    pub strict: bool,
    pub default_vintage: Year,
}

impl Default for LoadOptions {
    fn default() -> Self {
        LoadOptions { strict: true, default_vintage: DEFAULT_VINTAGE }
    }
}

pub fn load_state_profiles(path: impl AsRef<Path>) -> Result<Dataset> {
    load_state_profiles_with(path, &LoadOptions::default())
}

pub fn load_state_profiles_with(path: impl AsRef<Path>, opts: &LoadOptions) -> Result<Dataset> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| Error::Io { path: path.into(), source })?;
    parse_state_profiles(&text, path, opts)
}

/// Parses state CSV text. `origin` is only used in error messages.
pub fn parse_state_profiles(text: &str, origin: &Path, opts: &LoadOptions) -> Result<Dataset> {
    let parse_err = |message: String| Error::Parse { path: origin.to_path_buf(), message };

    let mut notes = Vec::new();
    let mut body_start = 0;
    for line in text.split_inclusive('\n') {
        let trimmed = line.trim_end_matches(['\r', '\n']);
        if let Some(note) = trimmed.strip_prefix('#') {
            notes.push(note.strip_prefix(' ').unwrap_or(note).to_owned());
            body_start += line.len();
        } else {
            break;
        }
    }
    let body = &text[body_start..];

    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(body.as_bytes());
    let headers = reader.headers().map_err(|e| parse_err(e.to_string()))?.clone();

    let mut index = HashMap::new();
    for (i, name) in headers.iter().enumerate() {
        if index.insert(name.to_owned(), i).is_some() {
            return Err(parse_err(format!("duplicate column `{name}`")));
        }
        let known = REQUIRED_COLUMNS.contains(&name) || name == COL_VINTAGE;
        if !known && opts.strict {
            return Err(parse_err(format!("unknown column `{name}`")));
        }
    }
    for col in REQUIRED_COLUMNS {
        if !index.contains_key(col) {
            return Err(Error::MissingColumn { path: origin.to_path_buf(), column: col.to_owned() });
        }
    }
    let vintage_col = index.get(COL_VINTAGE).copied();

    let mut profiles = Vec::new();
    let mut skipped = Vec::new();
    let mut vintage: Option<Year> = None;
    let mut seen = BTreeSet::new();

    for (row_no, record) in reader.records().enumerate() {
        let record = record.map_err(|e| parse_err(e.to_string()))?;
        let line = notes.len() + row_no + 2;
        let field = |col: &str| record.get(index[col]).unwrap_or("");

        let state_raw = field(COL_STATE);
        let state = StateCode::new(state_raw)
            .map_err(|e| parse_err(format!("line {line}: {e}")))?;

        let blank: Vec<&str> = REQUIRED_COLUMNS
            .iter()
            .copied()
            .chain(vintage_col.map(|_| COL_VINTAGE))
            .filter(|c| field(c).is_empty())
            .collect();
        if !blank.is_empty() {
            if opts.strict {
                return Err(Error::Validation(format!(
                    "{state}: missing value for {}",
                    blank.join(", ")
                )));
            }
            skipped.push(format!("{state} (blank {})", blank.join(", ")));
            continue;
        }

        let number = |col: &str| -> Result<f64> {
            let raw = field(col);
            raw.parse::<f64>().map_err(|_| {
                parse_err(format!("line {line}: {state}: `{raw}` in column {col} is not a number"))
            })
        };
        let row_vintage = match vintage_col {
            Some(i) => {
                let raw = record.get(i).unwrap_or("");
                raw.parse::<Year>().map_err(|_| {
                    parse_err(format!("line {line}: {state}: `{raw}` is not a year"))
                })?
            }
            None => opts.default_vintage,
        };
        match vintage {
            None => vintage = Some(row_vintage),
            Some(v) if v != row_vintage => {
                return Err(Error::Validation(format!(
                    "{state}: vintage {row_vintage} differs from earlier rows ({v})"
                )))
            }
            Some(_) => {}
        }

        if !seen.insert(state.clone()) {
            return Err(Error::Validation(format!("duplicate state {state}")));
        }
        let (electricity_price, gas_price, grid_carbon_intensity) =
            (number(COL_ELECTRICITY)?, number(COL_GAS)?, number(COL_GRID_CI)?);
        let profile = StateEnergyProfile {
            state,
            electricity_price,
            gas_price,
            grid_carbon_intensity,
            vintage_year: row_vintage,
        };
        profile.validate()?;
        profiles.push(profile);
    }

    if !skipped.is_empty() {
        notes.push(format!("skipped incomplete rows: {}", skipped.join("; ")));
    }
    let vintage = vintage.unwrap_or(opts.default_vintage);
    Dataset::new(profiles, vintage, notes.join("\n"))
}

/// Fully resolved model configuration.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Config {
    pub technologies: Vec<TechnologyParams>,
    pub smr: SmrParams,
    pub scenarios: Vec<Scenario>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    #[serde(default)]
    technologies: Option<Vec<TechnologyParams>>,
    #[serde(default)]
    smr: Option<SmrParams>,
    #[serde(default)]
    scenarios: Option<Vec<Scenario>>,
}

/// Scenario list used when a config has no `scenarios` section.
pub fn default_scenarios() -> Vec<Scenario> {
    vec![Scenario::baseline("base-2020", DEFAULT_VINTAGE)]
}

impl Default for Config {
    fn default() -> Self {
        Config {
            technologies: default_registry(),
            smr: SmrParams::default(),
            scenarios: default_scenarios(),
        }
    }
}

impl Config {
    pub fn scenario(&self, name: &str) -> Result<&Scenario> {
        self.scenarios.iter().find(|s| s.name == name).ok_or_else(|| {
            let known: Vec<&str> = self.scenarios.iter().map(|s| s.name.as_str()).collect();
            Error::Validation(format!("unknown scenario `{name}` (known: {})", known.join(", ")))
        })
    }

    /// Pretty JSON with every section spelled out. Stable across
    /// load/serialize cycles.
    pub fn to_canonical_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("config serializes");
        s.push('\n');
        s
    }

    pub fn validate(&self) -> Result<()> {
        let mut names = BTreeSet::new();
        for t in &self.technologies {
            t.validate()?;
            if !names.insert(t.name) {
                return Err(Error::Validation(format!("technology {} listed twice", t.name)));
            }
        }
        self.smr.validate()?;
        let mut scen = BTreeSet::new();
        for s in &self.scenarios {
            s.validate()?;
            s.validate_registry(&self.technologies)?;
            if !scen.insert(s.name.as_str()) {
                return Err(Error::Validation(format!("scenario `{}` listed twice", s.name)));
            }
        }
        Ok(())
    }
}

pub fn load_config(path: impl AsRef<Path>) -> Result<Config> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| Error::Io { path: path.into(), source })?;
    parse_config(&text, path)
}

/// Parses config JSON. Empty (or whitespace-only) input yields the defaults.
pub fn parse_config(text: &str, origin: &Path) -> Result<Config> {
    if text.trim().is_empty() {
        return Ok(Config::default());
    }
    let file: ConfigFile = serde_json::from_str(text)
        .map_err(|e| Error::Parse { path: PathBuf::from(origin), message: e.to_string() })?;

    let mut technologies = default_registry();
    if let Some(overrides) = file.technologies {
        let mut given = BTreeSet::new();
        for t in overrides {
            if !given.insert(t.name) {
                return Err(Error::Validation(format!("technology {} listed twice", t.name)));
            }
            match technologies.iter_mut().find(|d| d.name == t.name) {
                Some(slot) => *slot = t,
                None => technologies.push(t),
            }
        }
    }
    let config = Config {
        technologies,
        smr: file.smr.unwrap_or_default(),
        scenarios: file.scenarios.unwrap_or_else(default_scenarios),
    };
    config.validate()?;
    Ok(config)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Technology;

    fn parse(text: &str) -> Result<Dataset> {
        parse_state_profiles(text, Path::new("test.csv"), &LoadOptions::default())
    }

    const TWO_ROWS: &str = "state,electricity_usd_per_kwh,gas_usd_per_mmbtu,grid_ci_kg_per_kwh\n\
                            WA,0.0462,5.33,0.097\n\
                            OK,0.0472,2.52,0.376\n";

    #[test]
    fn loads_two_rows_in_order() {
        let d = parse(TWO_ROWS).unwrap();
        assert_eq!(d.len(), 2);
        assert_eq!(d.profiles[0].state.as_str(), "WA");
        assert_eq!(d.profiles[1].state.as_str(), "OK");
        assert_eq!(d.vintage_year, DEFAULT_VINTAGE);
    }

    #[test]
    fn column_order_is_free() {
        let text = "grid_ci_kg_per_kwh,state,gas_usd_per_mmbtu,electricity_usd_per_kwh\n0.1,WA,5.0,0.05\n";
        let d = parse(text).unwrap();
        assert_eq!(d.profiles[0].electricity_price, 0.05);
        assert_eq!(d.profiles[0].grid_carbon_intensity, 0.1);
    }

    #[test]
    fn negative_price_names_state_and_field() {
        let text = "state,electricity_usd_per_kwh,gas_usd_per_mmbtu,grid_ci_kg_per_kwh\nWA,-0.01,5.0,0.1\n";
        let err = parse(text).unwrap_err().to_string();
        assert!(err.contains("WA") && err.contains("electricity_price"), "{err}");
    }

    #[test]
    fn missing_column_is_named() {
        let text = "state,electricity_usd_per_kwh,grid_ci_kg_per_kwh\nWA,0.05,0.1\n";
        match parse(text) {
            Err(Error::MissingColumn { column, .. }) => assert_eq!(column, COL_GAS),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn duplicate_state_rejected() {
        let text = format!("{TWO_ROWS}WA,0.05,5.0,0.1\n");
        let err = parse(&text).unwrap_err().to_string();
        assert!(err.contains("duplicate state WA"), "{err}");
    }

    #[test]
    fn non_numeric_and_empty() {
        let text = "state,electricity_usd_per_kwh,gas_usd_per_mmbtu,grid_ci_kg_per_kwh\nWA,abc,5.0,0.1\n";
        assert!(matches!(parse(text), Err(Error::Parse { .. })));
        let header_only = "state,electricity_usd_per_kwh,gas_usd_per_mmbtu,grid_ci_kg_per_kwh\n";
        assert!(matches!(parse(header_only), Err(Error::Validation(_))));
    }

    #[test]
    fn blank_fields_strict_vs_lenient() {
        let text = format!("{TWO_ROWS}TX,,2.2,0.41\n");
        assert!(parse(&text).is_err());
        let lenient = LoadOptions { strict: false, ..LoadOptions::default() };
        let d = parse_state_profiles(&text, Path::new("t.csv"), &lenient).unwrap();
        assert_eq!(d.len(), 2);
        assert!(d.source_notes.contains("TX"));
    }

    #[test]
    fn unknown_column_strict_only() {
        let text = "state,electricity_usd_per_kwh,gas_usd_per_mmbtu,grid_ci_kg_per_kwh,extra\nWA,0.05,5.0,0.1,x\n";
        assert!(parse(text).is_err());
        let lenient = LoadOptions { strict: false, ..LoadOptions::default() };
        assert!(parse_state_profiles(text, Path::new("t.csv"), &lenient).is_ok());
    }

    #[test]
    fn vintage_column_and_notes() {
        let text = "# source: test\n# second line\nstate,electricity_usd_per_kwh,gas_usd_per_mmbtu,grid_ci_kg_per_kwh,vintage_year\n\
                    WA,0.05,5.0,0.1,2021\nOR,0.06,4.0,0.2,2021\n";
        let d = parse(text).unwrap();
        assert_eq!(d.vintage_year, 2021);
        assert_eq!(d.source_notes, "source: test\nsecond line");
        let mixed = text.replace("OR,0.06,4.0,0.2,2021", "OR,0.06,4.0,0.2,2020");
        assert!(parse(&mixed).is_err());
    }

    #[test]
    fn canonical_csv_is_a_fixed_point() {
        let text = "# note\nstate,grid_ci_kg_per_kwh,electricity_usd_per_kwh,gas_usd_per_mmbtu\nWA,0.097,0.0462,5.33\nOK,0.376,0.0472,2.52\n";
        let d1 = parse(text).unwrap();
        let s1 = d1.to_csv_string();
        let d2 = parse(&s1).unwrap();
        assert_eq!(d1, d2);
        assert_eq!(s1, d2.to_csv_string());
    }

    #[test]
    fn empty_config_gives_defaults() {
        assert_eq!(parse_config("", Path::new("c.json")).unwrap(), Config::default());
        assert_eq!(parse_config("  {}  ", Path::new("c.json")).unwrap(), Config::default());
    }

    #[test]
    fn technology_override_replaces_one_entry() {
        let mut soec = crate::model::find_technology(&default_registry(), Technology::Soec)
            .unwrap()
            .clone();
        soec.unit_system_cost = 2000.0;
        let text = serde_json::json!({ "technologies": [soec] }).to_string();
        let c = parse_config(&text, Path::new("c.json")).unwrap();
        let defaults = default_registry();
        for t in &c.technologies {
            if t.name == Technology::Soec {
                assert_eq!(t.unit_system_cost, 2000.0);
            } else {
                assert_eq!(Some(t), defaults.iter().find(|d| d.name == t.name));
            }
        }
    }

    #[test]
    fn partial_technology_entry_rejected() {
        let text = r#"{"technologies":[{"name":"SOEC","unit_system_cost":2000}]}"#;
        assert!(matches!(parse_config(text, Path::new("c.json")), Err(Error::Parse { .. })));
    }

    #[test]
    fn learning_rate_out_of_range_rejected() {
        let mut alk = default_registry().remove(0);
        alk.learning_rate_aps = 1.5;
        let text = serde_json::json!({ "technologies": [alk] }).to_string();
        assert!(matches!(parse_config(&text, Path::new("c.json")), Err(Error::Validation(_))));
    }

    #[test]
    fn unknown_keys_rejected() {
        for text in [
            r#"{"technologys": []}"#,
            r#"{"smr": {"base_cost": 1.0, "gas_sensitivity": 0.1, "electricity_sensitivity": 0.0,
                 "ccs_adder": 0.4, "emissions_anchors": [], "leakage_rate": 0.03, "typo": 1}}"#,
        ] {
            assert!(parse_config(text, Path::new("c.json")).is_err(), "{text}");
        }
    }

    #[test]
    fn config_canonical_json_is_a_fixed_point() {
        let c1 = Config::default();
        let s1 = c1.to_canonical_json();
        let c2 = parse_config(&s1, Path::new("c.json")).unwrap();
        assert_eq!(c1, c2);
        assert_eq!(s1, c2.to_canonical_json());
    }

    #[test]
    fn scenario_lookup() {
        let c = Config::default();
        assert!(c.scenario("base-2020").is_ok());
        let err = c.scenario("nope").unwrap_err().to_string();
        assert!(err.contains("base-2020"));
    }
}
