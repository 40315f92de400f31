//! `results.csv` rows and the `summary.json` that aggregates them.
//!
//! Column order is fixed:
//! `scenario_id, method, t_sens_min_s, t_sens_mean_s, t_sens_max_s, rounds,
//! collected, objective, wall_clock_s, energy_j, feasible`.

use std::fs;
use std::path::Path;

use edgeplan_core::cost_model::{evaluate_plan, AllocationPlan, DeviceProfile, SystemBudget};
use edgeplan_core::surrogate::{objective, SurrogateParams};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{CliError, Result};

pub const RESULTS_FILE: &str = "results.csv";
pub const SUMMARY_FILE: &str = "summary.json";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub scenario_id: String,
    pub method: String,
    pub t_sens_min_s: f64,
    pub t_sens_mean_s: f64,
    pub t_sens_max_s: f64,
    pub rounds: u64,
    /// Whole samples collected (floored per device).
    pub collected: u64,
    /// Surrogate objective at the plan's integer round count.
    pub objective: f64,
    pub wall_clock_s: f64,
    pub energy_j: f64,
    pub feasible: bool,
}

impl ResultRow {
    /// Build a row from a plan, re-evaluating it against the budgets.
    pub fn from_plan(
        scenario_id: &str,
        method: &str,
        plan: &AllocationPlan,
        profiles: &[DeviceProfile],
        budget: &SystemBudget,
        sp: &SurrogateParams,
    ) -> Result<Self> {
        let report = evaluate_plan(plan, profiles, budget)?;
        let t = &plan.t_sens_s;
        let collected = plan
            .collected_continuous(profiles)
            .min(budget.m_total as f64);
        Ok(Self {
            scenario_id: scenario_id.to_string(),
            method: method.to_string(),
            t_sens_min_s: t.iter().cloned().fold(f64::INFINITY, f64::min),
            t_sens_mean_s: t.iter().sum::<f64>() / t.len() as f64,
            t_sens_max_s: t.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
            rounds: plan.rounds,
            collected: report.collected,
            // `+ 0.0` turns the −0 of a zero-round plan into 0.
            objective: objective(plan.rounds, collected, budget.m_total, sp)? + 0.0,
            wall_clock_s: report.wall_clock_s,
            energy_j: report.total_energy_j,
            feasible: report.feasible,
        })
    }
}

/// Column sums of `results.csv`, accumulated in row order.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Totals {
    pub rows: usize,
    pub rounds: u64,
    pub collected: u64,
    pub objective: f64,
    pub wall_clock_s: f64,
    pub energy_j: f64,
    pub feasible: usize,
}

impl Totals {
    pub fn of(rows: &[ResultRow]) -> Self {
        rows.iter().fold(Self::default(), |mut acc, r| {
            acc.rows += 1;
            acc.rounds += r.rounds;
            acc.collected += r.collected;
            acc.objective += r.objective;
            acc.wall_clock_s += r.wall_clock_s;
            acc.energy_j += r.energy_j;
            acc.feasible += usize::from(r.feasible);
            acc
        })
    }
}

fn create_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|source| CliError::Write {
        path: dir.to_path_buf(),
        source,
    })
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).map_err(|source| CliError::Write {
        path: path.to_path_buf(),
        source,
    })
}

/// Serialize any record type to CSV bytes with a header row.
pub fn csv_bytes<T: Serialize>(records: &[T], header: &[&str]) -> Result<Vec<u8>> {
    let mut w = csv::WriterBuilder::new()
        .has_headers(!records.is_empty())
        .from_writer(Vec::new());
    if records.is_empty() {
        w.write_record(header)?;
    }
    for r in records {
        w.serialize(r)?;
    }
    w.into_inner()
        .map_err(|e| CliError::Csv(e.into_error().into()))
}

pub const RESULT_COLUMNS: [&str; 11] = [
    "scenario_id",
    "method",
    "t_sens_min_s",
    "t_sens_mean_s",
    "t_sens_max_s",
    "rounds",
    "collected",
    "objective",
    "wall_clock_s",
    "energy_j",
    "feasible",
];

/// Write `results.csv` and `summary.json` (plus any extra files) into `dir`.
pub fn write_outputs(
    dir: &Path,
    command: &str,
    rows: &[ResultRow],
    details: Value,
    extra_files: &[(&str, Vec<u8>)],
) -> Result<()> {
    create_dir(dir)?;
    write_file(&dir.join(RESULTS_FILE), &csv_bytes(rows, &RESULT_COLUMNS)?)?;
    for (name, bytes) in extra_files {
        write_file(&dir.join(name), bytes)?;
    }
    let summary = json!({
        "command": command,
        "totals": Totals::of(rows),
        "details": details,
    });
    let mut text = serde_json::to_string_pretty(&summary)?;
    text.push('\n');
    write_file(&dir.join(SUMMARY_FILE), text.as_bytes())
}
