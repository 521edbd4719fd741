//! Checking survey records against the freeness floor `2δn/(n+1)`.

use serde::Serialize;

use super::{CountRecord, SurveyConfig, WorstPair};
use crate::error::Result;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FloorRow {
    #[serde(rename = "B")]
    pub bound: u64,
    pub min_pair_freeness: Option<f64>,
    /// `floor − min_pair_freeness`; positive when some S-pair sits below the floor.
    pub slack: Option<f64>,
    pub pairs_below_floor: u64,
    pub max_correction_budget: Option<f64>,
    pub worst_pair: Option<WorstPair>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FloorReport {
    pub floor: f64,
    pub tolerance: f64,
    pub rows: Vec<FloorRow>,
    /// Rows whose minimum falls below `floor − tolerance`.
    pub violations: Vec<FloorRow>,
    /// Whether the shell budgets decrease from the first to the last bound.
    pub budget_decreasing: bool,
    pub passed: bool,
}

/// Compares every record's minimum pair freeness with `2δn/(n+1) − tolerance`.
pub fn freeness_floor_check(
    records: &[CountRecord],
    cfg: &SurveyConfig,
    tolerance: f64,
) -> Result<FloorReport> {
    let params = cfg.validate()?;
    let floor = params.freeness_floor(cfg.n);
    let rows: Vec<FloorRow> = records
        .iter()
        .map(|r| FloorRow {
            bound: r.bound,
            min_pair_freeness: r.min_pair_freeness,
            slack: r.min_pair_freeness.map(|m| floor - m),
            pairs_below_floor: r.pairs_below_floor,
            max_correction_budget: r.max_correction_budget,
            worst_pair: r.worst_pair.clone(),
        })
        .collect();
    let violations: Vec<FloorRow> = rows
        .iter()
        .filter(|r| r.min_pair_freeness.is_some_and(|m| m < floor - tolerance))
        .cloned()
        .collect();
    let budgets: Vec<f64> = rows.iter().filter_map(|r| r.max_correction_budget).collect();
    let budget_decreasing = match (budgets.first(), budgets.last()) {
        (Some(a), Some(b)) => budgets.len() < 2 || b < a,
        _ => true,
    };
    Ok(FloorReport {
        floor,
        tolerance,
        passed: violations.is_empty(),
        rows,
        violations,
        budget_decreasing,
    })
}
