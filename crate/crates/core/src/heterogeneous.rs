//! Alternating optimization for fleets of dissimilar devices.
//!
//! The joint problem over (sensing times, rounds) is split into two blocks:
//!
//! 1. For fixed sensing times the objective is linear in the round count, so
//!    the best count is the largest one the time and energy budgets allow.
//! 2. For a fixed round count the log term only depends on the total number
//!    of collected samples, so the best sensing times maximize `Σ f_s,k·t_k`.
//!    The `max_k` terms of the time budget are replaced by two auxiliary
//!    upper bounds `u ≥ t_k` and `v ≥ per-round time of k`, which turns the
//!    block into a linear program solved by [`crate::lp`].
//!
//! Each block is solved exactly, so the objective never increases. Every
//! round count is a fixed point of the alternation once the sensing block
//! has used up the slack, so the loop is started from a ladder of data
//! fractions and the winner is polished by stepping the round count while
//! the objective keeps improving.

use serde::{Deserialize, Serialize};

use crate::cost_model::{
    comm_time_and_energy_per_round, samples_continuous, sensing_energy, AllocationPlan,
    DeviceProfile, SystemBudget,
};
use crate::error::{invalid, Error, Result};
use crate::lp::{solve_lp, LinearProgram, LpStatus};
use crate::surrogate::{log_term, SurrogateParams};

/// Relative margin kept off the time and energy budgets by the sensing block,
/// so that flooring the round bound recovers the round count exactly.
const BUDGET_MARGIN: f64 = 1e-10;
const MAX_POLISH_MOVES: usize = 100_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AoConfig {
    /// Relative objective change that ends the alternation.
    pub epsilon: f64,
    pub max_iters: usize,
    /// Data fraction of the primary starting point.
    pub init_fraction: f64,
    /// Extra starting points at fractions j/restarts, j = 1..=restarts.
    pub restarts: usize,
}

impl Default for AoConfig {
    fn default() -> Self {
        Self {
            epsilon: 1e-4,
            max_iters: 100,
            init_fraction: 0.15,
            restarts: 16,
        }
    }
}

impl AoConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return Err(invalid("epsilon", "must be > 0"));
        }
        if self.max_iters == 0 {
            return Err(invalid("max_iters", "must be >= 1"));
        }
        if !(self.init_fraction > 0.0 && self.init_fraction <= 1.0) {
            return Err(invalid("init_fraction", "must lie in (0, 1]"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum AoStatus {
    Converged,
    MaxIters,
    Infeasible,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AoIterate {
    pub objective: f64,
    pub rounds: u64,
    pub collected_samples: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AoTrace {
    /// Starting point followed by one entry per alternation and per accepted polish move.
    pub iterations: Vec<AoIterate>,
    pub status: AoStatus,
    /// Alternation steps taken before stopping (polish moves excluded).
    pub alternations: usize,
    pub start_fraction: f64,
    pub polish_moves: usize,
}

impl AoTrace {
    pub fn objectives(&self) -> impl Iterator<Item = f64> + '_ {
        self.iterations.iter().map(|it| it.objective)
    }

    pub fn is_monotone(&self, tol: f64) -> bool {
        self.iterations
            .windows(2)
            .all(|w| w[1].objective <= w[0].objective + tol)
    }
}

fn check_dims(t_sens: &[f64], profiles: &[DeviceProfile]) -> Result<()> {
    if t_sens.len() != profiles.len() {
        return Err(Error::DimensionMismatch {
            what: "sensing times vs device profiles",
            expected: profiles.len(),
            got: t_sens.len(),
        });
    }
    Ok(())
}

fn collected(t_sens: &[f64], profiles: &[DeviceProfile], budget: &SystemBudget) -> f64 {
    let total: f64 = t_sens
        .iter()
        .zip(profiles)
        .map(|(&t, p)| samples_continuous(t, p))
        .sum();
    total.min(budget.m_total as f64)
}

/// Real-valued round limits `(by_time, by_energy)` for fixed sensing times.
pub fn round_limits(
    t_sens: &[f64],
    profiles: &[DeviceProfile],
    budget: &SystemBudget,
) -> Result<(f64, f64)> {
    check_dims(t_sens, profiles)?;
    let mut max_sense = 0.0f64;
    let mut max_round = 0.0f64;
    let mut sense_energy = 0.0;
    let mut round_energy = 0.0;
    for (&t, p) in t_sens.iter().zip(profiles) {
        let (t_comm, e_comm) = comm_time_and_energy_per_round(p);
        max_sense = max_sense.max(t);
        max_round = max_round.max(t * p.comp_time_per_sensing_second() + t_comm);
        sense_energy += sensing_energy(t, p);
        round_energy += t * p.comp_energy_per_sensing_second() + e_comm;
    }
    let by_time = ((budget.t_total_s - max_sense) / max_round).max(0.0);
    let by_energy = ((budget.e_total_j - sense_energy) / round_energy).max(0.0);
    Ok((by_time, by_energy))
}

/// Largest whole round count that fits both budgets for fixed sensing times.
pub fn max_rounds_given_tsens(
    t_sens: &[f64],
    profiles: &[DeviceProfile],
    budget: &SystemBudget,
) -> Result<u64> {
    let (by_time, by_energy) = round_limits(t_sens, profiles, budget)?;
    Ok(by_time.min(by_energy).floor() as u64)
}

/// Sensing times that maximize the collected samples for a fixed round count.
///
/// Variables are `(t_1..t_K, u, v)`; `u` bounds every sensing time and `v`
/// every per-round compute-plus-upload time, so `u + I·v ≤ T` stands in for
/// the max-of-devices time budget. Sensing energy enters linearly (η_k·t_k + ζ_k).
pub fn best_tsens_given_rounds(
    rounds: u64,
    profiles: &[DeviceProfile],
    budget: &SystemBudget,
) -> Result<Vec<f64>> {
    let k = profiles.len();
    let n = k + 2;
    let (u, v) = (k, k + 1);
    let i = rounds as f64;

    let objective: Vec<f64> = profiles
        .iter()
        .map(|p| p.sample_rate_hz)
        .chain([0.0, 0.0])
        .collect();
    let mut lp = LinearProgram::maximize(objective);

    let mut energy_row = vec![0.0; n];
    let mut fixed_energy = 0.0;
    for (idx, p) in profiles.iter().enumerate() {
        let (t_comm, e_comm) = comm_time_and_energy_per_round(p);

        let mut row = vec![0.0; n];
        row[idx] = 1.0;
        row[u] = -1.0;
        lp = lp.with_le(row, 0.0);

        let mut row = vec![0.0; n];
        row[idx] = p.comp_time_per_sensing_second();
        row[v] = -1.0;
        lp = lp.with_le(row, -t_comm);

        energy_row[idx] = p.sense_eff + i * p.comp_energy_per_sensing_second();
        fixed_energy += p.sense_offset_j + i * e_comm;
    }

    let mut time_row = vec![0.0; n];
    time_row[u] = 1.0;
    time_row[v] = i;
    lp = lp.with_le(time_row, budget.t_total_s * (1.0 - BUDGET_MARGIN));
    lp = lp.with_le(
        energy_row,
        budget.e_total_j * (1.0 - BUDGET_MARGIN) - fixed_energy,
    );

    let cap_row: Vec<f64> = profiles
        .iter()
        .map(|p| p.sample_rate_hz)
        .chain([0.0, 0.0])
        .collect();
    lp = lp.with_le(cap_row, budget.m_total as f64);

    let sol = solve_lp(&lp)?;
    match sol.status {
        LpStatus::Optimal => {
            let mut x = sol.x.expect("optimal LP carries a point");
            x.truncate(k);
            x.iter_mut().for_each(|t| *t = t.max(0.0));
            Ok(x)
        }
        LpStatus::Infeasible => Err(Error::RoundsInfeasible { rounds }),
        LpStatus::Unbounded => unreachable!("the data cap bounds the sensing LP"),
    }
}

fn true_energy(t_sens: &[f64], rounds: u64, profiles: &[DeviceProfile]) -> f64 {
    t_sens
        .iter()
        .zip(profiles)
        .map(|(&t, p)| {
            let (_, e_comm) = comm_time_and_energy_per_round(p);
            sensing_energy(t, p) + rounds as f64 * (t * p.comp_energy_per_sensing_second() + e_comm)
        })
        .sum()
}

/// Shrink all sensing times by a common factor until the nonlinear sensing
/// energy fits the budget. No-op for linear sensing.
fn enforce_true_energy(
    t_sens: &mut [f64],
    rounds: u64,
    profiles: &[DeviceProfile],
    budget: &SystemBudget,
) {
    if profiles.iter().all(|p| p.sense_exp == 1.0) {
        return;
    }
    let cap = budget.e_total_j * (1.0 - BUDGET_MARGIN);
    if true_energy(t_sens, rounds, profiles) <= cap {
        return;
    }
    let base = t_sens.to_vec();
    let scaled = |s: f64| base.iter().map(|t| t * s).collect::<Vec<_>>();
    let (mut lo, mut hi) = (0.0, 1.0);
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if true_energy(&scaled(mid), rounds, profiles) <= cap {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    t_sens.copy_from_slice(&scaled(lo));
}

struct Problem<'a> {
    profiles: &'a [DeviceProfile],
    budget: &'a SystemBudget,
    sp: &'a SurrogateParams,
}

#[derive(Clone)]
struct Point {
    t_sens: Vec<f64>,
    rounds: u64,
    collected: f64,
    objective: f64,
    valid: bool,
}

impl Problem<'_> {
    fn point(&self, t_sens: Vec<f64>, rounds: u64) -> Result<Point> {
        let collected = collected(&t_sens, self.profiles, self.budget);
        let lt = log_term(collected, self.budget.m_total, self.sp)?;
        Ok(Point {
            t_sens,
            rounds,
            collected,
            objective: rounds as f64 * lt,
            valid: rounds >= 1 && lt < 0.0,
        })
    }

    fn sensing_block(&self, rounds: u64) -> Result<Option<Vec<f64>>> {
        match best_tsens_given_rounds(rounds, self.profiles, self.budget) {
            Ok(mut t) => {
                enforce_true_energy(&mut t, rounds, self.profiles, self.budget);
                Ok(Some(t))
            }
            Err(Error::RoundsInfeasible { .. }) => Ok(None),
            Err(e) => Err(e),
        }
    }

    fn run_from(&self, fraction: f64, cfg: &AoConfig) -> Result<Option<(Point, AoTrace)>> {
        let total_rate: f64 = self.profiles.iter().map(|p| p.sample_rate_hz).sum();
        let mut common = fraction * self.budget.m_total as f64 / total_rate;
        let mut t = vec![common; self.profiles.len()];
        let mut halvings = 0;
        let mut rounds = loop {
            let r = max_rounds_given_tsens(&t, self.profiles, self.budget)?;
            if r >= 1 {
                break r;
            }
            if halvings == 64 {
                return Ok(None);
            }
            halvings += 1;
            common *= 0.5;
            t.iter_mut().for_each(|x| *x = common);
        };

        let mut current = self.point(t, rounds)?;
        let mut best = current.valid.then(|| current.clone());
        let mut iterations = vec![iterate_of(&current)];
        let mut status = AoStatus::MaxIters;
        let mut alternations = 0;

        for _ in 0..cfg.max_iters {
            alternations += 1;
            // Round block: the objective is linear in the round count.
            let lt = log_term(current.collected, self.budget.m_total, self.sp)?;
            rounds = if lt < 0.0 {
                max_rounds_given_tsens(&current.t_sens, self.profiles, self.budget)?
            } else {
                0
            };
            // Sensing block; keep the incumbent if the solve did not improve it.
            let mut t = current.t_sens.clone();
            if let Some(candidate) = self.sensing_block(rounds)? {
                if collected(&candidate, self.profiles, self.budget) >= current.collected {
                    t = candidate;
                }
            }
            let previous = current.objective;
            current = self.point(t, rounds)?;
            iterations.push(iterate_of(&current));
            if current.valid
                && best
                    .as_ref()
                    .is_none_or(|b| current.objective < b.objective)
            {
                best = Some(current.clone());
            }
            let converged = if previous == 0.0 {
                current.objective == 0.0
            } else {
                ((current.objective - previous) / previous).abs() <= cfg.epsilon
            };
            if converged {
                status = AoStatus::Converged;
                break;
            }
        }

        Ok(best.map(|b| {
            (
                b,
                AoTrace {
                    iterations,
                    status,
                    alternations,
                    start_fraction: fraction,
                    polish_moves: 0,
                },
            )
        }))
    }

    /// Step the round count up or down while the objective improves.
    fn polish(&self, mut best: Point, trace: &mut AoTrace) -> Result<Point> {
        for direction in [1i64, -1] {
            loop {
                if trace.polish_moves >= MAX_POLISH_MOVES {
                    return Ok(best);
                }
                let next = best.rounds as i64 + direction;
                if next < 1 {
                    break;
                }
                let Some(t) = self.sensing_block(next as u64)? else {
                    break;
                };
                let cand = self.point(t, next as u64)?;
                if !(cand.valid && cand.objective < best.objective) {
                    break;
                }
                trace.iterations.push(iterate_of(&cand));
                trace.polish_moves += 1;
                best = cand;
            }
        }
        Ok(best)
    }
}

fn iterate_of(p: &Point) -> AoIterate {
    AoIterate {
        objective: p.objective,
        rounds: p.rounds,
        collected_samples: p.collected,
    }
}

/// Alternating optimization over rounds and per-device sensing times.
///
/// Returns the best plan seen and the trace of the starting point that
/// produced it (followed by any polish moves).
pub fn solve_heterogeneous(
    profiles: &[DeviceProfile],
    budget: &SystemBudget,
    sp: &SurrogateParams,
    cfg: &AoConfig,
) -> Result<(AllocationPlan, AoTrace)> {
    if profiles.is_empty() {
        return Err(invalid("profiles", "need at least one device"));
    }
    if budget.num_devices != profiles.len() {
        return Err(Error::DimensionMismatch {
            what: "budget device count vs device profiles",
            expected: budget.num_devices,
            got: profiles.len(),
        });
    }
    for p in profiles {
        p.validate()?;
    }
    budget.validate()?;
    sp.validate()?;
    cfg.validate()?;

    let problem = Problem {
        profiles,
        budget,
        sp,
    };
    let fractions = std::iter::once(cfg.init_fraction)
        .chain((1..=cfg.restarts).map(|j| j as f64 / cfg.restarts as f64));

    let mut winner: Option<(Point, AoTrace)> = None;
    for fraction in fractions {
        if let Some((point, trace)) = problem.run_from(fraction, cfg)? {
            if winner
                .as_ref()
                .is_none_or(|(w, _)| point.objective < w.objective)
            {
                winner = Some((point, trace));
            }
        }
    }
    let (best, mut trace) = winner.ok_or(Error::Infeasible)?;
    let best = problem.polish(best, &mut trace)?;

    Ok((
        AllocationPlan {
            t_sens_s: best.t_sens,
            rounds: best.rounds,
        },
        trace,
    ))
}
