//! Cross-state analytics: the per-state result table, averages, rankings and
//! the cost/carbon Pareto frontier.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::electrolysis::{carbon_intensity, lcoh};
use crate::error::{Error, Result};
use crate::ingest::Dataset;
use crate::model::{Pathway, Scenario, SmrParams, StateCode, TechnologyParams};
use crate::scenario::{effective_electricity_price, grid_ci_at, project_params};
use crate::smr::{smr_emissions, smr_lcoh};

/// Cost and carbon intensity of one pathway in one state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateResult {
    pub state: StateCode,
    pub pathway: Pathway,
    /// USD per kg H2.
    pub lcoh: f64,
    /// kg CO2e per kg H2.
    pub carbon_intensity: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    Lcoh,
    CarbonIntensity,
}

impl Metric {
    pub fn of(self, r: &StateResult) -> f64 {
        match self {
            Metric::Lcoh => r.lcoh,
            Metric::CarbonIntensity => r.carbon_intensity,
        }
    }
}

/// Evaluates every pathway in every state under a scenario.
///
/// Electrolysis rows use the projected technology parameters, the scenario's
/// electricity price rule and the grid intensity at the target year. SMR rows
/// use the dataset prices. Rows come back sorted by (state, pathway).
pub fn state_table(
    dataset: &Dataset,
    registry: &[TechnologyParams],
    smr: &SmrParams,
    scenario: &Scenario,
) -> Result<Vec<StateResult>> {
    scenario.validate()?;
    scenario.validate_against(registry, dataset.vintage_year)?;

    let mut projected = Vec::with_capacity(registry.len());
    for params in registry {
        let p = project_params(params, scenario)
            .map_err(|e| e.in_context("*", params.name.as_str()))?;
        projected.push(p);
    }
    projected.sort_by_key(|p| p.name);

    let smr_ci = smr_emissions(smr, false).map_err(|e| e.in_context("*", "SMR"))?;
    let smr_ccs_ci = smr_emissions(smr, true).map_err(|e| e.in_context("*", "SMR+CCS"))?;

    let mut rows = Vec::with_capacity(dataset.len() * (projected.len() + 2));
    for profile in &dataset.profiles {
        let state = profile.state.as_str();
        let price = effective_electricity_price(profile, scenario.electricity_price_rule);
        let grid = grid_ci_at(
            profile.grid_carbon_intensity,
            scenario.grid_trajectory,
            dataset.vintage_year,
            scenario.target_year,
        )
        .map_err(|e| e.in_context(state, "grid"))?;

        for params in &projected {
            let ctx = |e: Error| e.in_context(state, params.name.as_str());
            let cost = lcoh(params, price, scenario.capacity_factor).map_err(ctx)?;
            let ci = carbon_intensity(grid, params).map_err(ctx)?;
            rows.push(StateResult {
                state: profile.state.clone(),
                pathway: params.name.into(),
                lcoh: cost.lcoh,
                carbon_intensity: ci.carbon_intensity,
            });
        }
        for (with_ccs, ci) in [(false, &smr_ci), (true, &smr_ccs_ci)] {
            rows.push(StateResult {
                state: profile.state.clone(),
                pathway: ci.pathway,
                lcoh: smr_lcoh(smr, profile, with_ccs),
                carbon_intensity: ci.carbon_intensity,
            });
        }
    }
    rows.sort_by(|a, b| a.state.cmp(&b.state).then(a.pathway.cmp(&b.pathway)));
    Ok(rows)
}

/// Unweighted mean (LCOH, carbon intensity) over the states for one pathway.
pub fn national_average(results: &[StateResult], pathway: Pathway) -> Result<(f64, f64)> {
    let (n, cost, ci) = results
        .iter()
        .filter(|r| r.pathway == pathway)
        .fold((0usize, 0.0, 0.0), |(n, c, i), r| (n + 1, c + r.lcoh, i + r.carbon_intensity));
    if n == 0 {
        return Err(Error::Domain(format!("no results for pathway {pathway}")));
    }
    Ok((cost / n as f64, ci / n as f64))
}

/// Indices of the points not dominated when minimizing both coordinates.
///
/// `a` dominates `b` when it is no worse in both coordinates and strictly
/// better in at least one. Exact duplicates therefore never dominate each
/// other. Indices are returned in ascending order.
pub fn pareto_indices(points: &[(f64, f64)]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&i, &j| {
        let (a, b) = (points[i], points[j]);
        a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1))
    });

    let mut keep = Vec::new();
    // lowest second coordinate among points with a strictly smaller first one
    let mut best_before = f64::INFINITY;
    let mut k = 0;
    while k < order.len() {
        let x = points[order[k]].0;
        let group_end = order[k..]
            .iter()
            .position(|&i| points[i].0.total_cmp(&x) != Ordering::Equal)
            .map_or(order.len(), |off| k + off);
        // group is sorted by the second coordinate, so its minimum comes first
        let group_min = points[order[k]].1;
        if group_min < best_before {
            keep.extend(
                order[k..group_end]
                    .iter()
                    .copied()
                    .take_while(|&i| points[i].1 == group_min),
            );
            best_before = group_min;
        }
        k = group_end;
    }
    keep.sort_unstable();
    keep
}

/// Points of `results` on the (LCOH, carbon intensity) Pareto frontier, in
/// input order.
pub fn pareto_frontier(results: &[StateResult]) -> Vec<StateResult> {
    let points: Vec<(f64, f64)> = results.iter().map(|r| (r.lcoh, r.carbon_intensity)).collect();
    pareto_indices(&points).into_iter().map(|i| results[i].clone()).collect()
}

/// Results of one pathway sorted ascending by `metric`; ties go to the
/// alphabetically earlier state.
pub fn rank_states(results: &[StateResult], metric: Metric, pathway: Pathway) -> Vec<StateResult> {
    let mut out: Vec<StateResult> = results.iter().filter(|r| r.pathway == pathway).cloned().collect();
    out.sort_by(|a, b| metric.of(a).total_cmp(&metric.of(b)).then_with(|| a.state.cmp(&b.state)));
    out
}

/// Number of states whose carbon intensity on `pathway` is strictly below
/// `threshold_ci`.
pub fn count_below(results: &[StateResult], pathway: Pathway, threshold_ci: f64) -> usize {
    results
        .iter()
        .filter(|r| r.pathway == pathway && r.carbon_intensity < threshold_ci)
        .count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{default_registry, StateEnergyProfile};
    use proptest::prelude::*;

    fn row(state: &str, pathway: Pathway, lcoh: f64, ci: f64) -> StateResult {
        StateResult { state: StateCode::new(state).unwrap(), pathway, lcoh, carbon_intensity: ci }
    }

    // O(n^2) reference: keep i unless some j dominates it.
    fn brute_force_frontier(points: &[(f64, f64)]) -> Vec<usize> {
        (0..points.len())
            .filter(|&i| {
                let (a, b) = points[i];
                !points.iter().any(|&(c, d)| c <= a && d <= b && (c < a || d < b))
            })
            .collect()
    }

    #[test]
    fn frontier_small_example() {
        let pts = [(1.0, 1.0), (2.0, 2.0), (1.5, 0.5)];
        assert_eq!(pareto_indices(&pts), vec![0, 2]);
        assert_eq!(pareto_indices(&[(3.0, 4.0)]), vec![0]);
        assert!(pareto_indices(&[]).is_empty());
    }

    #[test]
    fn frontier_ties() {
        // duplicates both survive; equal cost with higher CI is dominated
        let pts = [(1.0, 1.0), (1.0, 1.0), (1.0, 2.0), (2.0, 1.0), (0.5, 3.0)];
        assert_eq!(pareto_indices(&pts), brute_force_frontier(&pts));
        assert_eq!(pareto_indices(&pts), vec![0, 1, 4]);
    }

    #[test]
    fn state_table_one_state() {
        let p = StateEnergyProfile::new(StateCode::new("WA").unwrap(), 0.0462, 5.33, 0.097, 2020).unwrap();
        let d = Dataset::new(vec![p], 2020, String::new()).unwrap();
        let rows = state_table(
            &d,
            &default_registry(),
            &SmrParams::default(),
            &Scenario::baseline("base", 2020),
        )
        .unwrap();
        assert_eq!(rows.len(), 5);
        let paths: Vec<Pathway> = rows.iter().map(|r| r.pathway).collect();
        assert_eq!(paths, Pathway::ALL);
        let (cost, ci) = national_average(&rows, Pathway::Pem).unwrap();
        assert_eq!((cost, ci), (rows[1].lcoh, rows[1].carbon_intensity));
    }

    #[test]
    fn national_average_empty_is_error() {
        assert!(national_average(&[], Pathway::Smr).is_err());
    }

    #[test]
    fn rank_ties_alphabetical() {
        let rows = [
            row("TX", Pathway::Pem, 3.0, 1.0),
            row("AL", Pathway::Pem, 3.0, 2.0),
            row("OK", Pathway::Pem, 2.0, 3.0),
            row("AK", Pathway::Soec, 1.0, 0.0),
        ];
        let ranked = rank_states(&rows, Metric::Lcoh, Pathway::Pem);
        let codes: Vec<&str> = ranked.iter().map(|r| r.state.as_str()).collect();
        assert_eq!(codes, ["OK", "AL", "TX"]);
    }

    #[test]
    fn count_below_threshold() {
        let rows = [
            row("WA", Pathway::Soec, 5.0, 4.2),
            row("ID", Pathway::Soec, 6.0, 3.0),
            row("WV", Pathway::Soec, 6.0, 38.0),
        ];
        assert_eq!(count_below(&rows, Pathway::Soec, 5.3), 2);
        assert_eq!(count_below(&rows, Pathway::Soec, 0.0), 0);
        assert_eq!(count_below(&rows, Pathway::Pem, 100.0), 0);
    }

    fn arb_points() -> impl Strategy<Value = Vec<(f64, f64)>> {
        // coarse grid so ties are common
        prop::collection::vec((0u8..20, 0u8..20), 0..60)
            .prop_map(|v| v.into_iter().map(|(a, b)| (a as f64 * 0.5, b as f64 * 0.25)).collect())
    }

    proptest! {
        #[test]
        fn frontier_matches_brute_force(pts in arb_points()) {
            prop_assert_eq!(pareto_indices(&pts), brute_force_frontier(&pts));
        }

        #[test]
        fn frontier_invariant_under_monotone_rescaling(pts in arb_points()) {
            let scaled: Vec<(f64, f64)> = pts.iter().map(|&(a, b)| (a.exp(), 3.0 * b + 7.0)).collect();
            prop_assert_eq!(pareto_indices(&pts), pareto_indices(&scaled));
        }

        #[test]
        fn average_permutation_invariant(mut v in prop::collection::vec(0.0f64..20.0, 1..40), seed in any::<u64>()) {
            let rows: Vec<StateResult> = v.iter().map(|&x| row("AA", Pathway::Alkaline, x, x / 2.0)).collect();
            let (a, _) = national_average(&rows, Pathway::Alkaline).unwrap();
            let mean = v.iter().sum::<f64>() / v.len() as f64;
            prop_assert!((a - mean).abs() <= 1e-12 * mean.max(1.0));
            use rand::{seq::SliceRandom, SeedableRng};
            v.shuffle(&mut rand::rngs::StdRng::seed_from_u64(seed));
            let rows2: Vec<StateResult> = v.iter().map(|&x| row("AA", Pathway::Alkaline, x, x / 2.0)).collect();
            let (b, _) = national_average(&rows2, Pathway::Alkaline).unwrap();
            prop_assert!((a - b).abs() <= 1e-12 * mean.max(1.0));
        }

        #[test]
        fn ranking_reverses_with_metric_sign(v in prop::collection::vec(0u8..10, 1..20)) {
            let codes: Vec<String> = (0..v.len()).map(|i| format!("{}{}", (b'A' + (i / 26) as u8) as char, (b'A' + (i % 26) as u8) as char)).collect();
            let rows: Vec<StateResult> = v.iter().zip(&codes).map(|(&x, c)| row(c, Pathway::Pem, x as f64, 0.0)).collect();
            let neg: Vec<StateResult> = rows.iter().map(|r| StateResult { lcoh: -r.lcoh, ..r.clone() }).collect();
            let up: Vec<f64> = rank_states(&rows, Metric::Lcoh, Pathway::Pem).iter().map(|r| r.lcoh).collect();
            let mut down: Vec<f64> = rank_states(&neg, Metric::Lcoh, Pathway::Pem).iter().map(|r| -r.lcoh).collect();
            down.reverse();
            prop_assert_eq!(up, down);
            let again = rank_states(&rows, Metric::Lcoh, Pathway::Pem);
            prop_assert_eq!(rank_states(&rows, Metric::Lcoh, Pathway::Pem), again);
        }
    }
}
