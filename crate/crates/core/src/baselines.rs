//! Reference allocators the optimizers are compared against.
//!
//! - EAS: sensing time proportional to a composite efficiency factor Φ_k,
//!   scaled so the fleet collects the whole environment.
//! - GSS: every device senses until the whole environment is collected.
//! - PSS: every device senses until a fixed fraction is collected.
//! - URS: GSS sensing with a fixed, budget-ignoring round count.
//!
//! EAS, GSS and PSS take the largest round count the budgets still allow.

use serde::Serialize;

use crate::cost_model::{link_rate, AllocationPlan, DeviceProfile, SystemBudget};
use crate::error::{invalid, Error, Result};
use crate::heterogeneous::max_rounds_given_tsens;

pub const PSS_DEFAULT_FRACTION: f64 = 0.15;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum BaselineKind {
    Eas,
    Gss,
    Pss { fraction: f64 },
    Urs { round_cap: u64 },
}

impl BaselineKind {
    pub fn pss() -> Self {
        Self::Pss {
            fraction: PSS_DEFAULT_FRACTION,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Eas => "eas",
            Self::Gss => "gss",
            Self::Pss { .. } => "pss",
            Self::Urs { .. } => "urs",
        }
    }

    fn validate(&self) -> Result<()> {
        match *self {
            Self::Pss { fraction } if !(fraction > 0.0 && fraction <= 1.0) => {
                Err(invalid("fraction", "PSS fraction must lie in (0, 1]"))
            }
            Self::Urs { round_cap: 0 } => Err(invalid("round_cap", "must be >= 1")),
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BaselinePlan {
    pub kind: BaselineKind,
    pub plan: AllocationPlan,
    /// Sensing alone already exceeds the time or energy budget.
    pub over_budget: bool,
}

/// Φ_k = f_s·f_c·r / (C·(η + ζ + κ + p))
pub fn efficiency_factor(profile: &DeviceProfile) -> f64 {
    let numerator = profile.sample_rate_hz * profile.cpu_hz * link_rate(profile);
    let denominator = profile.cycles_per_sample
        * (profile.sense_eff + profile.sense_offset_j + profile.switch_cap + profile.tx_power_w);
    numerator / denominator
}

fn total_rate(profiles: &[DeviceProfile]) -> Result<f64> {
    let sum: f64 = profiles.iter().map(|p| p.sample_rate_hz).sum();
    if sum.is_nan() || sum <= 0.0 {
        return Err(invalid(
            "sample_rate_hz",
            "fleet sampling rate must be positive",
        ));
    }
    Ok(sum)
}

pub fn allocate(
    kind: BaselineKind,
    profiles: &[DeviceProfile],
    budget: &SystemBudget,
) -> Result<BaselinePlan> {
    kind.validate()?;
    if profiles.len() != budget.num_devices {
        return Err(Error::DimensionMismatch {
            what: "budget device count vs device profiles",
            expected: budget.num_devices,
            got: profiles.len(),
        });
    }
    let m_total = budget.m_total as f64;
    let fleet_rate = total_rate(profiles)?;

    let t_sens_s: Vec<f64> = match kind {
        BaselineKind::Eas => {
            let phi: Vec<f64> = profiles.iter().map(efficiency_factor).collect();
            let phi_max = phi.iter().cloned().fold(f64::MIN, f64::max);
            let weights: Vec<f64> = phi.iter().map(|f| f / phi_max).collect();
            let weighted_rate: f64 = weights
                .iter()
                .zip(profiles)
                .map(|(w, p)| w * p.sample_rate_hz)
                .sum();
            let t_max = m_total / weighted_rate;
            weights.iter().map(|w| t_max * w).collect()
        }
        BaselineKind::Gss | BaselineKind::Urs { .. } => vec![m_total / fleet_rate; profiles.len()],
        BaselineKind::Pss { fraction } => vec![fraction * m_total / fleet_rate; profiles.len()],
    };

    let max_sense = t_sens_s.iter().cloned().fold(0.0, f64::max);
    let sense_energy: f64 = t_sens_s
        .iter()
        .zip(profiles)
        .map(|(&t, p)| crate::cost_model::sensing_energy(t, p))
        .sum();
    let over_budget = max_sense > budget.t_total_s || sense_energy > budget.e_total_j;

    let rounds = match kind {
        BaselineKind::Urs { round_cap } => round_cap,
        _ => max_rounds_given_tsens(&t_sens_s, profiles, budget)?,
    };
    Ok(BaselinePlan {
        kind,
        plan: AllocationPlan { t_sens_s, rounds },
        over_budget,
    })
}
