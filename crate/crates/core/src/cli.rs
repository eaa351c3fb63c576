//! Batch command-line front end.
//!
//! Every subcommand writes its result to the given writer (stdout in the
//! binary) or to `--out`, and maps failures onto fixed exit codes:
//! 0 success, 1 input error, 2 computation error, 3 no solution.

use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{ArgAction, Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::analysis::{national_average, pareto_frontier, state_table, StateResult};
use crate::error::{Error, ErrorKind, Result};
use crate::ingest::{load_state_profiles_with, parse_config, Config, Dataset, LoadOptions};
use crate::model::{GridTrajectory, Pathway, Scenario, Technology, TechnologyParams, Year};
use crate::scenario::{breakeven_electricity_price, crossover_year, project_params, Breakeven};
use crate::smr::{smr_emissions, smr_lcoh};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_COMPUTATION: i32 = 2;
pub const EXIT_NO_SOLUTION: i32 = 3;

pub const DEFAULT_SCENARIO: &str = "base-2020";

#[derive(Debug, Parser)]
#[command(name = "h2cost", version, about = "Levelized cost and carbon intensity of hydrogen by U.S. state")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Per-state LCOH and carbon intensity for every pathway, with summary.
    Lcoh(LcohArgs),
    /// Electricity price at which electrolysis matches a target LCOH.
    Breakeven(BreakevenArgs),
    /// First year average electrolysis intensity drops below SMR levels.
    Crossover(CrossoverArgs),
    /// Cost/carbon Pareto frontier across states.
    Frontier(FrontierArgs),
    /// Load and validate inputs without computing anything.
    Validate(ValidateArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Args)]
pub struct InputArgs {
    /// State data CSV.
    #[arg(long)]
    pub dataset: Option<PathBuf>,
    /// JSON config with technologies, smr and scenarios sections.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Reject blank fields and unknown columns in the dataset.
    #[arg(long, default_value_t = true, action = ArgAction::Set)]
    pub strict: bool,
}

#[derive(Debug, Clone, Args)]
pub struct LcohArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long, default_value = DEFAULT_SCENARIO)]
    pub scenario: String,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Output file; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct BreakevenArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long, default_value = DEFAULT_SCENARIO)]
    pub scenario: String,
    /// `all`, `alkaline`, `pem` or `soec`.
    #[arg(long, default_value = "all")]
    pub technology: String,
    /// `smr-ccs` (dataset-average SMR+CCS cost, needs --dataset) or a value in USD/kg.
    #[arg(long, default_value = "smr-ccs")]
    pub target: String,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Debug, Clone, Args)]
pub struct CrossoverArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// `constant` or `linear-to-zero:<year>`; defaults to the scenario's trajectory.
    #[arg(long)]
    pub trajectory: Option<String>,
    #[arg(long, default_value = DEFAULT_SCENARIO)]
    pub scenario: String,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Debug, Clone, Args)]
pub struct FrontierArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long, default_value = DEFAULT_SCENARIO)]
    pub scenario: String,
    /// Also consider the SMR pathways.
    #[arg(long)]
    pub include_smr: bool,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct ValidateArgs {
    #[command(flatten)]
    pub input: InputArgs,
}

/// Result of a successful command.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Done,
    NoSolution,
}

/// Runs a parsed command line, printing errors to `err`. Returns the exit code.
pub fn run(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let result = match &cli.command {
        Command::Lcoh(a) => cmd_lcoh(a, out),
        Command::Breakeven(a) => cmd_breakeven(a, out),
        Command::Crossover(a) => cmd_crossover(a, out),
        Command::Frontier(a) => cmd_frontier(a, out),
        Command::Validate(a) => cmd_validate(a, out),
    };
    match result {
        Ok(Outcome::Done) => EXIT_OK,
        Ok(Outcome::NoSolution) => EXIT_NO_SOLUTION,
        Err(e) => {
            let (tag, code) = match e.kind() {
                ErrorKind::Input => ("input", EXIT_INPUT),
                ErrorKind::Computation => ("computation", EXIT_COMPUTATION),
            };
            let msg = e.to_string().replace('\n', " ");
            let _ = writeln!(err, "error[{tag}]: {msg}");
            code
        }
    }
}

struct Inputs {
    dataset: Option<(Dataset, String)>,
    config: Config,
    config_hash: String,
}

fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn read(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).map_err(|source| Error::Io { path: path.into(), source })
}

fn load_inputs(args: &InputArgs) -> Result<Inputs> {
    let (config, config_hash) = match &args.config {
        Some(path) => {
            let bytes = read(path)?;
            let text = String::from_utf8(bytes.clone()).map_err(|e| Error::Parse {
                path: path.clone(),
                message: e.to_string(),
            })?;
            (parse_config(&text, path)?, sha256_hex(&bytes))
        }
        None => (Config::default(), "builtin-defaults".to_owned()),
    };
    let dataset = match &args.dataset {
        Some(path) => {
            let hash = sha256_hex(&read(path)?);
            let opts = LoadOptions { strict: args.strict, ..LoadOptions::default() };
            Some((load_state_profiles_with(path, &opts)?, hash))
        }
        None => None,
    };
    Ok(Inputs { dataset, config, config_hash })
}

fn require_dataset(inputs: &Inputs) -> Result<(&Dataset, &str)> {
    inputs
        .dataset
        .as_ref()
        .map(|(d, h)| (d, h.as_str()))
        .ok_or_else(|| Error::Validation("--dataset is required for this command".into()))
}

fn write_output(path: Option<&Path>, body: &str, out: &mut dyn Write) -> Result<()> {
    let io_err = |p: &Path| {
        let p = p.to_path_buf();
        move |source| Error::Io { path: p, source }
    };
    match path {
        Some(p) => fs::write(p, body).map_err(io_err(p)),
        None => out.write_all(body.as_bytes()).map_err(io_err(Path::new("<stdout>"))),
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serializes");
    s.push('\n');
    s
}

#[derive(Debug, Clone, Serialize)]
pub struct Metadata {
    pub tool: String,
    pub version: String,
    pub scenario: String,
    pub dataset_vintage: Year,
    pub dataset_sha256: String,
    pub config_sha256: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct AverageRow {
    pub pathway: Pathway,
    pub lcoh: f64,
    pub carbon_intensity: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct FrontierPoint {
    pub state: String,
    pub pathway: Pathway,
}

#[derive(Debug, Clone, Serialize)]
pub struct CrossoverRow {
    /// A technology name or `electrolysis-average`.
    pub technology: String,
    pub reference: Pathway,
    pub reference_ci: f64,
    pub year: Option<Year>,
}

#[derive(Debug, Clone, Serialize)]
pub struct BreakevenRow {
    pub technology: Technology,
    pub target_lcoh: f64,
    pub result: Breakeven,
}

#[derive(Debug, Clone, Serialize)]
pub struct Summary {
    pub averages: Vec<AverageRow>,
    /// Frontier over the electrolysis rows.
    pub frontier: Vec<FrontierPoint>,
    pub crossover: Vec<CrossoverRow>,
    pub breakeven: Vec<BreakevenRow>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub metadata: Metadata,
    pub rows: Vec<StateResult>,
    pub summary: Summary,
}

/// Crossover years for each technology and for their average, against the
/// SMR and SMR+CCS emission levels.
pub fn crossover_rows(
    dataset: &Dataset,
    config: &Config,
    trajectory: GridTrajectory,
) -> Result<Vec<CrossoverRow>> {
    let mut techs: Vec<&TechnologyParams> = config.technologies.iter().collect();
    techs.sort_by_key(|t| t.name);
    let mut rows = Vec::new();
    for reference in [Pathway::Smr, Pathway::SmrCcs] {
        let level = smr_emissions(&config.smr, reference == Pathway::SmrCcs)?.carbon_intensity;
        for t in &techs {
            rows.push(CrossoverRow {
                technology: t.name.to_string(),
                reference,
                reference_ci: level,
                year: crossover_year(dataset, std::slice::from_ref(*t), trajectory, level)?,
            });
        }
        let all: Vec<TechnologyParams> = techs.iter().map(|t| (*t).clone()).collect();
        rows.push(CrossoverRow {
            technology: "electrolysis-average".into(),
            reference,
            reference_ci: level,
            year: crossover_year(dataset, &all, trajectory, level)?,
        });
    }
    Ok(rows)
}

/// Mean SMR+CCS cost over the dataset, USD/kg.
pub fn average_smr_ccs_lcoh(dataset: &Dataset, config: &Config) -> f64 {
    dataset.profiles.iter().map(|p| smr_lcoh(&config.smr, p, true)).sum::<f64>()
        / dataset.len() as f64
}

/// Breakeven prices for the selected technologies after projecting them to
/// the scenario's target year.
pub fn breakeven_rows(
    config: &Config,
    scenario: &Scenario,
    techs: &[Technology],
    target_lcoh: f64,
) -> Result<Vec<BreakevenRow>> {
    scenario.validate_registry(&config.technologies)?;
    let mut rows = Vec::new();
    for &tech in techs {
        let params = crate::model::find_technology(&config.technologies, tech)?;
        let projected = project_params(params, scenario)
            .map_err(|e| e.in_context("*", tech.as_str()))?;
        let result = breakeven_electricity_price(&projected, scenario.capacity_factor, target_lcoh)
            .map_err(|e| e.in_context("*", tech.as_str()))?;
        rows.push(BreakevenRow { technology: tech, target_lcoh, result });
    }
    Ok(rows)
}

fn electrolysis_frontier(rows: &[StateResult]) -> Vec<StateResult> {
    let electrolysis: Vec<StateResult> =
        rows.iter().filter(|r| r.pathway.is_electrolysis()).cloned().collect();
    pareto_frontier(&electrolysis)
}

/// Builds the full report for one scenario.
pub fn build_report(
    dataset: &Dataset,
    dataset_hash: &str,
    config: &Config,
    config_hash: &str,
    scenario: &Scenario,
) -> Result<Report> {
    let rows = state_table(dataset, &config.technologies, &config.smr, scenario)?;

    let mut averages = Vec::new();
    for pathway in Pathway::ALL {
        if rows.iter().any(|r| r.pathway == pathway) {
            let (lcoh, carbon_intensity) = national_average(&rows, pathway)?;
            averages.push(AverageRow { pathway, lcoh, carbon_intensity });
        }
    }
    let frontier = electrolysis_frontier(&rows)
        .into_iter()
        .map(|r| FrontierPoint { state: r.state.to_string(), pathway: r.pathway })
        .collect();
    let crossover = match scenario.grid_trajectory {
        GridTrajectory::Constant => Vec::new(),
        t @ GridTrajectory::LinearToZero(_) => crossover_rows(dataset, config, t)?,
    };
    let mut techs: Vec<Technology> = config.technologies.iter().map(|t| t.name).collect();
    techs.sort();
    let breakeven = breakeven_rows(config, scenario, &techs, average_smr_ccs_lcoh(dataset, config))?;

    Ok(Report {
        metadata: Metadata {
            tool: env!("CARGO_PKG_NAME").into(),
            version: env!("CARGO_PKG_VERSION").into(),
            scenario: scenario.name.clone(),
            dataset_vintage: dataset.vintage_year,
            dataset_sha256: dataset_hash.into(),
            config_sha256: config_hash.into(),
        },
        rows,
        summary: Summary { averages, frontier, crossover, breakeven },
    })
}

/// Fixed-format CSV of the report rows, one line per (state, pathway).
pub fn report_csv(report: &Report) -> String {
    let on_frontier: std::collections::BTreeSet<(String, Pathway)> = report
        .summary
        .frontier
        .iter()
        .map(|f| (f.state.clone(), f.pathway))
        .collect();
    let mut s = String::from(
        "state,pathway,lcoh_usd_per_kg,carbon_intensity_kg_per_kg,on_electrolysis_frontier\n",
    );
    for r in &report.rows {
        let flag = on_frontier.contains(&(r.state.to_string(), r.pathway)) as u8;
        let _ = writeln!(s, "{},{},{:.4},{:.4},{}", r.state, r.pathway, r.lcoh, r.carbon_intensity, flag);
    }
    s
}

fn summary_text(report: &Report) -> String {
    let mut s = String::new();
    for a in &report.summary.averages {
        let _ = writeln!(
            s,
            "# average {}: lcoh {:.4} USD/kg, carbon intensity {:.4} kg/kg",
            a.pathway, a.lcoh, a.carbon_intensity
        );
    }
    s
}

pub fn cmd_lcoh(args: &LcohArgs, out: &mut dyn Write) -> Result<Outcome> {
    let inputs = load_inputs(&args.input)?;
    let (dataset, dataset_hash) = require_dataset(&inputs)?;
    let scenario = inputs.config.scenario(&args.scenario)?;
    let report = build_report(dataset, dataset_hash, &inputs.config, &inputs.config_hash, scenario)?;
    let body = match args.format {
        Format::Csv => report_csv(&report),
        Format::Json => to_json(&report),
    };
    write_output(args.out.as_deref(), &body, out)?;
    if args.out.is_some() && args.format == Format::Csv {
        let text = summary_text(&report);
        out.write_all(text.as_bytes())
            .map_err(|source| Error::Io { path: "<stdout>".into(), source })?;
    }
    Ok(Outcome::Done)
}

fn parse_technologies(arg: &str) -> Result<Vec<Technology>> {
    if arg.eq_ignore_ascii_case("all") {
        Ok(Technology::ALL.to_vec())
    } else {
        arg.split(',').map(|t| t.trim().parse()).collect()
    }
}

pub fn cmd_breakeven(args: &BreakevenArgs, out: &mut dyn Write) -> Result<Outcome> {
    let inputs = load_inputs(&args.input)?;
    let scenario = inputs.config.scenario(&args.scenario)?;
    let techs = parse_technologies(&args.technology)?;
    let target = if args.target.eq_ignore_ascii_case("smr-ccs") || args.target.eq_ignore_ascii_case("smr_ccs") {
        let (dataset, _) = require_dataset(&inputs)?;
        average_smr_ccs_lcoh(dataset, &inputs.config)
    } else {
        args.target.parse::<f64>().map_err(|_| {
            Error::Validation(format!("--target must be `smr-ccs` or a number, got `{}`", args.target))
        })?
    };
    let rows = breakeven_rows(&inputs.config, scenario, &techs, target)?;

    let body = match args.format {
        Format::Json => to_json(&rows),
        Format::Csv => {
            let mut s = String::from("technology,target_lcoh_usd_per_kg,breakeven_usd_per_kwh\n");
            for r in &rows {
                let price = match r.result {
                    Breakeven::Price { usd_per_kwh } => format!("{usd_per_kwh:.6}"),
                    Breakeven::Unattainable { .. } => "no non-negative breakeven".into(),
                };
                let _ = writeln!(s, "{},{:.4},{}", r.technology, r.target_lcoh, price);
            }
            s
        }
    };
    write_output(None, &body, out)?;
    if rows.iter().any(|r| r.result.price().is_none()) {
        Ok(Outcome::NoSolution)
    } else {
        Ok(Outcome::Done)
    }
}

/// Parses `constant` or `linear-to-zero:<year>`.
pub fn parse_trajectory(arg: &str) -> Result<GridTrajectory> {
    let arg = arg.trim();
    if arg.eq_ignore_ascii_case("constant") {
        return Ok(GridTrajectory::Constant);
    }
    arg.strip_prefix("linear-to-zero:")
        .and_then(|y| y.trim().parse::<Year>().ok())
        .map(GridTrajectory::LinearToZero)
        .ok_or_else(|| {
            Error::Validation(format!(
                "--trajectory must be `constant` or `linear-to-zero:<year>`, got `{arg}`"
            ))
        })
}

pub fn cmd_crossover(args: &CrossoverArgs, out: &mut dyn Write) -> Result<Outcome> {
    let inputs = load_inputs(&args.input)?;
    let (dataset, _) = require_dataset(&inputs)?;
    let trajectory = match &args.trajectory {
        Some(t) => parse_trajectory(t)?,
        None => inputs.config.scenario(&args.scenario)?.grid_trajectory,
    };
    if let GridTrajectory::LinearToZero(z) = trajectory {
        if z <= dataset.vintage_year {
            return Err(Error::Validation(format!(
                "zero year {z} must be after dataset vintage {}",
                dataset.vintage_year
            )));
        }
    }
    let rows = crossover_rows(dataset, &inputs.config, trajectory)?;
    let body = match args.format {
        Format::Json => to_json(&rows),
        Format::Csv => {
            let mut s = String::from("technology,reference,reference_ci_kg_per_kg,crossover_year\n");
            for r in &rows {
                let year = r.year.map_or_else(|| "no crossover".to_owned(), |y| y.to_string());
                let _ = writeln!(s, "{},{},{:.4},{}", r.technology, r.reference, r.reference_ci, year);
            }
            s
        }
    };
    write_output(None, &body, out)?;
    Ok(Outcome::Done)
}

pub fn cmd_frontier(args: &FrontierArgs, out: &mut dyn Write) -> Result<Outcome> {
    let inputs = load_inputs(&args.input)?;
    let (dataset, _) = require_dataset(&inputs)?;
    let scenario = inputs.config.scenario(&args.scenario)?;
    let rows = state_table(dataset, &inputs.config.technologies, &inputs.config.smr, scenario)?;
    let frontier = if args.include_smr { pareto_frontier(&rows) } else { electrolysis_frontier(&rows) };
    let body = match args.format {
        Format::Json => to_json(&frontier),
        Format::Csv => {
            let mut s = String::from("state,pathway,lcoh_usd_per_kg,carbon_intensity_kg_per_kg\n");
            for r in &frontier {
                let _ = writeln!(s, "{},{},{:.4},{:.4}", r.state, r.pathway, r.lcoh, r.carbon_intensity);
            }
            s
        }
    };
    write_output(args.out.as_deref(), &body, out)?;
    Ok(Outcome::Done)
}

pub fn cmd_validate(args: &ValidateArgs, out: &mut dyn Write) -> Result<Outcome> {
    let inputs = load_inputs(&args.input)?;
    let mut s = String::new();
    if let Some((d, hash)) = &inputs.dataset {
        let _ = writeln!(s, "dataset ok: {} states, vintage {}, sha256 {hash}", d.len(), d.vintage_year);
        for scenario in &inputs.config.scenarios {
            scenario.validate_against(&inputs.config.technologies, d.vintage_year)?;
        }
    }
    let names: Vec<&str> = inputs.config.scenarios.iter().map(|s| s.name.as_str()).collect();
    let _ = writeln!(
        s,
        "config ok: {} technologies, scenarios [{}], sha256 {}",
        inputs.config.technologies.len(),
        names.join(", "),
        inputs.config_hash
    );
    write_output(None, &s, out)?;
    Ok(Outcome::Done)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trajectory_parsing() {
        assert_eq!(parse_trajectory("constant").unwrap(), GridTrajectory::Constant);
        assert_eq!(parse_trajectory("linear-to-zero:2035").unwrap(), GridTrajectory::LinearToZero(2035));
        assert!(parse_trajectory("linear:2035").is_err());
    }

    #[test]
    fn technology_lists() {
        assert_eq!(parse_technologies("all").unwrap(), Technology::ALL.to_vec());
        assert_eq!(parse_technologies("pem,soec").unwrap(), vec![Technology::Pem, Technology::Soec]);
        assert!(parse_technologies("pem,xyz").is_err());
    }

    #[test]
    fn cli_parses_flags() {
        let cli = Cli::try_parse_from([
            "h2cost", "lcoh", "--dataset", "d.csv", "--config", "c.json", "--scenario", "2050",
            "--format", "json", "--out", "o.json", "--strict", "false",
        ])
        .unwrap();
        match cli.command {
            Command::Lcoh(a) => {
                assert_eq!(a.scenario, "2050");
                assert_eq!(a.format, Format::Json);
                assert!(!a.input.strict);
            }
            other => panic!("{other:?}"),
        }
    }
}
