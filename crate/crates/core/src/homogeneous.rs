//! Allocation for a fleet of identical devices.
//!
//! All devices share one sensing time `t`. For fixed `t` the objective is
//! linear in the round count with a negative slope, so the best round count
//! is the largest one that the time or energy budget allows. What remains is
//! a one-dimensional search over `t ∈ (0, M_total/(K·f_s)]`.

use rayon::prelude::*;
use serde::Serialize;

use crate::cost_model::{
    comm_time_and_energy_per_round, samples_continuous, sensing_energy, DeviceProfile, SystemBudget,
};
use crate::error::{invalid, Error, Result};
use crate::surrogate::{log_term, objective, SurrogateParams};

pub const DEFAULT_GRID_POINTS: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BindingConstraint {
    Time,
    Energy,
    DataCap,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HomogeneousSolution {
    pub t_sens_s: f64,
    pub rounds_continuous: f64,
    /// floor(rounds_continuous); authoritative for plan evaluation.
    pub rounds: u64,
    /// Objective at the continuous round count.
    pub objective_value: f64,
    /// Objective at the floored round count.
    pub objective_floored: f64,
    pub collected: f64,
    pub binding_constraint: BindingConstraint,
    pub grid_resolution: f64,
}

/// Largest real round count the time budget admits: (T − t)/(t·f_s·C/f_c + t_comm).
pub fn max_rounds_time(t_sens_s: f64, profile: &DeviceProfile, budget: &SystemBudget) -> f64 {
    let (t_comm, _) = comm_time_and_energy_per_round(profile);
    let per_round = t_sens_s * profile.comp_time_per_sensing_second() + t_comm;
    ((budget.t_total_s - t_sens_s) / per_round).max(0.0)
}

/// Largest real round count the per-device energy share admits:
/// (E/K − E_sens(t))/(t·f_s·κ·C·f_c² + E_comm).
pub fn max_rounds_energy(t_sens_s: f64, profile: &DeviceProfile, budget: &SystemBudget) -> f64 {
    let (_, e_comm) = comm_time_and_energy_per_round(profile);
    let share = budget.e_total_j / budget.num_devices as f64;
    let per_round = t_sens_s * profile.comp_energy_per_sensing_second() + e_comm;
    ((share - sensing_energy(t_sens_s, profile)) / per_round).max(0.0)
}

#[derive(Debug, Clone, Copy)]
struct Candidate {
    index: usize,
    objective: f64,
    rounds: f64,
    binding: BindingConstraint,
}

/// Evaluate the grid point `t`; `None` when it cannot host a useful round.
fn evaluate_point(
    index: usize,
    t: f64,
    profile: &DeviceProfile,
    budget: &SystemBudget,
    sp: &SurrogateParams,
) -> Option<Candidate> {
    let by_time = max_rounds_time(t, profile, budget);
    let by_energy = max_rounds_energy(t, profile, budget);
    let (rounds, binding) = if by_time <= by_energy {
        (by_time, BindingConstraint::Time)
    } else {
        (by_energy, BindingConstraint::Energy)
    };
    if rounds < 1.0 {
        return None;
    }
    let collected = budget.num_devices as f64 * samples_continuous(t, profile);
    let collected = collected.min(budget.m_total as f64);
    let lt = log_term(collected, budget.m_total, sp).ok()?;
    if lt >= 0.0 {
        return None;
    }
    Some(Candidate {
        index,
        objective: rounds * lt,
        rounds,
        binding,
    })
}

fn better(a: Candidate, b: Candidate) -> Candidate {
    // Lower objective wins; ties go to the smaller sensing time.
    if a.objective < b.objective || (a.objective == b.objective && a.index < b.index) {
        a
    } else {
        b
    }
}

/// Grid search over the common sensing time.
pub fn solve_homogeneous(
    profile: &DeviceProfile,
    budget: &SystemBudget,
    sp: &SurrogateParams,
    grid_points: usize,
) -> Result<HomogeneousSolution> {
    if grid_points < 2 {
        return Err(invalid("grid_points", "need at least 2 grid points"));
    }
    profile.validate()?;
    budget.validate()?;
    sp.validate()?;

    let t_cap = budget.m_total as f64 / (budget.num_devices as f64 * profile.sample_rate_hz);
    let step = t_cap / grid_points as f64;
    let grid_t = |j: usize| {
        if j == grid_points {
            t_cap
        } else {
            step * j as f64
        }
    };

    let best = (1..grid_points + 1)
        .into_par_iter()
        .with_min_len(4096)
        .filter_map(|j| evaluate_point(j, grid_t(j), profile, budget, sp))
        .reduce_with(better)
        .ok_or(Error::Infeasible)?;

    let t_sens_s = grid_t(best.index);
    let collected = (budget.num_devices as f64 * samples_continuous(t_sens_s, profile))
        .min(budget.m_total as f64);
    let rounds = best.rounds.floor() as u64;
    let binding_constraint = if best.index == grid_points {
        BindingConstraint::DataCap
    } else {
        best.binding
    };
    Ok(HomogeneousSolution {
        t_sens_s,
        rounds_continuous: best.rounds,
        rounds,
        objective_value: best.objective,
        objective_floored: objective(rounds, collected, budget.m_total, sp)?,
        collected,
        binding_constraint,
        grid_resolution: step,
    })
}
