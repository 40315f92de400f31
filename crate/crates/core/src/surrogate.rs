//! Convergence bound of partial-data gradient descent and the log-surrogate
//! objective that the allocators minimize.
//!
//! With a fraction `ratio = (M_total − |B|)/M_total` of the environment left
//! uncollected, each round contracts the optimality gap by
//! `Ψ = (1 − μ/L) + 4·ratio²·β₂` up to an additive floor driven by β₁.
//! The allocators minimize `I·ln(α + β·ratio²)`, i.e. `ln Ψᴵ` with
//! `α = 1 − μ/L` and `β = 4β₂`.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Curvature and gradient-envelope constants of the learning objective.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceParams {
    pub mu: f64,
    pub lip: f64,
    pub beta1: f64,
    pub beta2: f64,
    /// F(x₀) − F(x*)
    pub init_gap: f64,
}

impl ConvergenceParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.mu > 0.0 && self.mu.is_finite()) {
            return Err(invalid("mu", "must be > 0"));
        }
        if !(self.lip >= self.mu && self.lip.is_finite()) {
            return Err(invalid("lip", "must be >= mu"));
        }
        if !(self.beta1 >= 0.0 && self.beta1.is_finite()) {
            return Err(invalid("beta1", "must be >= 0"));
        }
        if !(self.beta2 >= 0.0 && self.beta2.is_finite()) {
            return Err(invalid("beta2", "must be >= 0"));
        }
        if !(self.init_gap >= 0.0 && self.init_gap.is_finite()) {
            return Err(invalid("init_gap", "must be >= 0"));
        }
        Ok(())
    }
}

/// Weights of the log-surrogate `I·ln(α + β·ratio²)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SurrogateParams {
    pub alpha: f64,
    pub beta: f64,
}

impl Default for SurrogateParams {
    fn default() -> Self {
        Self {
            alpha: 0.5,
            beta: 0.5,
        }
    }
}

impl SurrogateParams {
    pub fn new(alpha: f64, beta: f64) -> Self {
        Self { alpha, beta }
    }

    /// α = 1 − μ/L, β = 4β₂.
    pub fn from_convergence(params: &ConvergenceParams) -> Self {
        Self {
            alpha: 1.0 - params.mu / params.lip,
            beta: 4.0 * params.beta2,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return Err(invalid("alpha", format!("must be > 0, got {}", self.alpha)));
        }
        if !(self.beta >= 0.0 && self.beta.is_finite()) {
            return Err(invalid("beta", format!("must be >= 0, got {}", self.beta)));
        }
        Ok(())
    }
}

/// A value that is only a meaningful bound when the contraction factor is below one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Flagged {
    pub value: f64,
    pub non_contractive: bool,
}

/// Fraction of the environment's samples that were not collected.
pub fn missing_ratio(collected: f64, m_total: u64) -> Result<f64> {
    let m = m_total as f64;
    if collected > m {
        return Err(Error::CollectedExceedsTotal { collected, m_total });
    }
    if collected.is_nan() || collected < 0.0 {
        return Err(invalid(
            "collected",
            format!("must be >= 0, got {collected}"),
        ));
    }
    Ok((m - collected) / m)
}

/// Ψ(B) = (1 − μ/L) + 4·ratio²·β₂
pub fn contraction_factor(
    collected: f64,
    m_total: u64,
    params: &ConvergenceParams,
) -> Result<Flagged> {
    let ratio = missing_ratio(collected, m_total)?;
    let value = (1.0 - params.mu / params.lip) + 4.0 * ratio * ratio * params.beta2;
    Ok(Flagged {
        value,
        non_contractive: value >= 1.0,
    })
}

/// Σ_{j<I} Ψʲ, with the Ψ = 1 limit handled.
fn geometric_sum(psi: f64, rounds: u64) -> f64 {
    let n = rounds as f64;
    if (1.0 - psi).abs() < 1e-12 {
        n
    } else {
        (1.0 - psi.powf(n)) / (1.0 - psi)
    }
}

/// Ψᴵ·gap₀ + 2·ratio²·(β₁/L)·Σ_{j<I} Ψʲ
pub fn convergence_bound(
    rounds: u64,
    collected: f64,
    m_total: u64,
    params: &ConvergenceParams,
) -> Result<Flagged> {
    let ratio = missing_ratio(collected, m_total)?;
    let psi = contraction_factor(collected, m_total, params)?;
    let floor_term = 2.0 * ratio * ratio * params.beta1 / params.lip;
    let value = psi.value.powf(rounds as f64) * params.init_gap
        + floor_term * geometric_sum(psi.value, rounds);
    Ok(Flagged {
        value,
        non_contractive: psi.non_contractive,
    })
}

/// ln(α + β·ratio²). Non-negative values mean extra rounds cannot help.
pub fn log_term(collected: f64, m_total: u64, sp: &SurrogateParams) -> Result<f64> {
    let ratio = missing_ratio(collected, m_total)?;
    Ok((sp.alpha + sp.beta * ratio * ratio).ln())
}

/// I·ln(α + β·ratio²); lower is better.
pub fn objective(rounds: u64, collected: f64, m_total: u64, sp: &SurrogateParams) -> Result<f64> {
    Ok(rounds as f64 * log_term(collected, m_total, sp)?)
}

/// [`objective`] with a real-valued round count.
pub fn objective_continuous(
    rounds: f64,
    collected: f64,
    m_total: u64,
    sp: &SurrogateParams,
) -> Result<f64> {
    Ok(rounds * log_term(collected, m_total, sp)?)
}
