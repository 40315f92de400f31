//! Time and energy accounting for sensing, local computation and uplink.
//!
//! Every quantity here is a pure function of a [`DeviceProfile`] and the
//! decision variables (sensing time, round count). Sample counts are kept
//! continuous for the optimizers and floored when a concrete plan is
//! evaluated.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Physical constants of one edge device.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DeviceProfile {
    /// Samples acquired per second of sensing.
    pub sample_rate_hz: f64,
    /// Sensing energy coefficient (J/s^δ).
    pub sense_eff: f64,
    /// Sensing energy exponent δ, at least 1.
    pub sense_exp: f64,
    /// Fixed sensing energy offset, e.g. boot cost (J).
    pub sense_offset_j: f64,
    /// CPU cycles needed per sample per round.
    pub cycles_per_sample: f64,
    /// CPU frequency (cycles/s).
    pub cpu_hz: f64,
    /// Effective switched capacitance κ.
    pub switch_cap: f64,
    pub bandwidth_hz: f64,
    pub tx_power_w: f64,
    /// Average large-scale path gain (linear).
    pub path_gain: f64,
    /// Deterministic small-scale channel factor (linear).
    pub channel_quality: f64,
    /// Noise power spectral density (W/Hz).
    pub noise_psd: f64,
    /// Bits uploaded per round.
    pub payload_bits: f64,
    /// Distance to the server; only used by [`path_gain_from_distance`].
    pub distance_m: Option<f64>,
}

impl Default for DeviceProfile {
    fn default() -> Self {
        Self {
            sample_rate_hz: 10.0,
            sense_eff: 0.5,
            sense_exp: 1.0,
            sense_offset_j: 0.1,
            cycles_per_sample: 50.0,
            cpu_hz: 200.0,
            switch_cap: 1e-11,
            bandwidth_hz: 2000.0,
            tx_power_w: 0.5,
            path_gain: 1.0,
            channel_quality: 1.0,
            noise_psd: 4e-11,
            payload_bits: 21880.0,
            distance_m: Some(50.0),
        }
    }
}

impl DeviceProfile {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("sample_rate_hz", self.sample_rate_hz),
            ("sense_eff", self.sense_eff),
            ("cycles_per_sample", self.cycles_per_sample),
            ("cpu_hz", self.cpu_hz),
            ("switch_cap", self.switch_cap),
            ("bandwidth_hz", self.bandwidth_hz),
            ("tx_power_w", self.tx_power_w),
            ("path_gain", self.path_gain),
            ("channel_quality", self.channel_quality),
            ("noise_psd", self.noise_psd),
            ("payload_bits", self.payload_bits),
        ];
        for (field, value) in positive {
            if !(value.is_finite() && value > 0.0) {
                return Err(invalid(
                    field,
                    format!("must be finite and > 0, got {value}"),
                ));
            }
        }
        if !(self.sense_exp.is_finite() && self.sense_exp >= 1.0) {
            return Err(invalid(
                "sense_exp",
                format!("must be finite and >= 1, got {}", self.sense_exp),
            ));
        }
        if !(self.sense_offset_j.is_finite() && self.sense_offset_j >= 0.0) {
            return Err(invalid(
                "sense_offset_j",
                format!("must be finite and >= 0, got {}", self.sense_offset_j),
            ));
        }
        if let Some(d) = self.distance_m {
            if !(d.is_finite() && d > 0.0) {
                return Err(invalid(
                    "distance_m",
                    format!("must be finite and > 0, got {d}"),
                ));
            }
        }
        Ok(())
    }

    /// Per-round computation time per second of sensing.
    pub fn comp_time_per_sensing_second(&self) -> f64 {
        self.sample_rate_hz * self.cycles_per_sample / self.cpu_hz
    }

    /// Per-round computation energy per second of sensing.
    pub fn comp_energy_per_sensing_second(&self) -> f64 {
        self.sample_rate_hz * self.switch_cap * self.cycles_per_sample * self.cpu_hz * self.cpu_hz
    }
}

/// Fleet-wide limits.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SystemBudget {
    pub t_total_s: f64,
    pub e_total_j: f64,
    /// Samples available in the environment.
    pub m_total: u64,
    pub num_devices: usize,
}

impl Default for SystemBudget {
    fn default() -> Self {
        Self {
            t_total_s: 5000.0,
            e_total_j: 12000.0,
            m_total: 20000,
            num_devices: 20,
        }
    }
}

impl SystemBudget {
    pub fn validate(&self) -> Result<()> {
        if !(self.t_total_s.is_finite() && self.t_total_s > 0.0) {
            return Err(invalid(
                "t_total_s",
                format!("must be > 0, got {}", self.t_total_s),
            ));
        }
        if !(self.e_total_j.is_finite() && self.e_total_j > 0.0) {
            return Err(invalid(
                "e_total_j",
                format!("must be > 0, got {}", self.e_total_j),
            ));
        }
        if self.m_total == 0 {
            return Err(invalid("m_total", "must be a positive integer"));
        }
        if self.num_devices == 0 {
            return Err(invalid("num_devices", "must be a positive integer"));
        }
        Ok(())
    }
}

/// Decision variables: one sensing time per device and the round count.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AllocationPlan {
    pub t_sens_s: Vec<f64>,
    pub rounds: u64,
}

impl AllocationPlan {
    pub fn uniform(t_sens_s: f64, num_devices: usize, rounds: u64) -> Self {
        Self {
            t_sens_s: vec![t_sens_s; num_devices],
            rounds,
        }
    }

    /// Continuous sample count Σₖ t_k·f_s,k.
    pub fn collected_continuous(&self, profiles: &[DeviceProfile]) -> f64 {
        self.t_sens_s
            .iter()
            .zip(profiles)
            .map(|(&t, p)| samples_continuous(t, p))
            .sum()
    }
}

/// Per-device line items of a [`CostReport`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DeviceCost {
    pub samples: u64,
    pub sense_time_s: f64,
    pub sense_energy_j: f64,
    pub comp_time_per_round_s: f64,
    pub comp_energy_per_round_j: f64,
    pub comm_time_per_round_s: f64,
    pub comm_energy_per_round_j: f64,
}

impl DeviceCost {
    /// Energy this device spends over the whole plan.
    pub fn total_energy_j(&self, rounds: u64) -> f64 {
        self.sense_energy_j
            + rounds as f64 * (self.comp_energy_per_round_j + self.comm_energy_per_round_j)
    }

    /// Busy time of this device alone: sensing plus its own rounds.
    pub fn busy_time_s(&self, rounds: u64) -> f64 {
        self.sense_time_s
            + rounds as f64 * (self.comp_time_per_round_s + self.comm_time_per_round_s)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CostReport {
    pub devices: Vec<DeviceCost>,
    pub rounds: u64,
    pub collected: u64,
    /// maxₖ t_sens,k + I·maxₖ(t_comp,k + t_comm,k)
    pub wall_clock_s: f64,
    pub total_energy_j: f64,
    pub time_slack_s: f64,
    pub energy_slack_j: f64,
    pub within_data_cap: bool,
    pub feasible: bool,
}

/// Samples gathered in `t_sens_s` seconds, floored to whole samples.
pub fn samples_collected(t_sens_s: f64, profile: &DeviceProfile) -> u64 {
    samples_continuous(t_sens_s, profile).floor().max(0.0) as u64
}

pub fn samples_continuous(t_sens_s: f64, profile: &DeviceProfile) -> f64 {
    t_sens_s * profile.sample_rate_hz
}

/// η·t^δ + ζ
pub fn sensing_energy(t_sens_s: f64, profile: &DeviceProfile) -> f64 {
    let t = t_sens_s.max(0.0);
    let variable = if t == 0.0 {
        0.0
    } else if profile.sense_exp == 1.0 {
        profile.sense_eff * t
    } else {
        profile.sense_eff * t.powf(profile.sense_exp)
    };
    variable + profile.sense_offset_j
}

pub fn comp_time_per_round(samples: f64, profile: &DeviceProfile) -> f64 {
    profile.cycles_per_sample * samples / profile.cpu_hz
}

pub fn comp_energy_per_round(samples: f64, profile: &DeviceProfile) -> f64 {
    profile.switch_cap * profile.cycles_per_sample * samples * profile.cpu_hz * profile.cpu_hz
}

/// Shannon rate b·log₂(1 + p·ḡ·θ / (N₀·b)) in bit/s.
pub fn link_rate(profile: &DeviceProfile) -> f64 {
    let snr = profile.tx_power_w * profile.path_gain * profile.channel_quality
        / (profile.noise_psd * profile.bandwidth_hz);
    profile.bandwidth_hz * snr.ln_1p() / std::f64::consts::LN_2
}

/// Upload time and energy for one round.
pub fn comm_time_and_energy_per_round(profile: &DeviceProfile) -> (f64, f64) {
    let t = profile.payload_bits / link_rate(profile);
    (t, t * profile.tx_power_w)
}

/// Linear path gain for the 40 + 30·log₁₀(distance) dB path-loss model.
pub fn path_gain_from_distance(distance_m: f64) -> f64 {
    let loss_db = 40.0 + 30.0 * distance_m.log10();
    10f64.powf(-loss_db / 10.0)
}

/// Evaluate a plan against the budgets. Samples are floored per device.
pub fn evaluate_plan(
    plan: &AllocationPlan,
    profiles: &[DeviceProfile],
    budget: &SystemBudget,
) -> Result<CostReport> {
    if plan.t_sens_s.len() != profiles.len() {
        return Err(Error::DimensionMismatch {
            what: "plan sensing times vs device profiles",
            expected: profiles.len(),
            got: plan.t_sens_s.len(),
        });
    }
    if budget.num_devices != profiles.len() {
        return Err(Error::DimensionMismatch {
            what: "budget device count vs device profiles",
            expected: budget.num_devices,
            got: profiles.len(),
        });
    }
    if plan.t_sens_s.iter().any(|t| !t.is_finite() || *t < 0.0) {
        return Err(invalid("t_sens_s", "sensing times must be finite and >= 0"));
    }

    let devices: Vec<DeviceCost> = plan
        .t_sens_s
        .iter()
        .zip(profiles)
        .map(|(&t, p)| {
            let samples = samples_collected(t, p);
            let (comm_t, comm_e) = comm_time_and_energy_per_round(p);
            DeviceCost {
                samples,
                sense_time_s: t,
                sense_energy_j: sensing_energy(t, p),
                comp_time_per_round_s: comp_time_per_round(samples as f64, p),
                comp_energy_per_round_j: comp_energy_per_round(samples as f64, p),
                comm_time_per_round_s: comm_t,
                comm_energy_per_round_j: comm_e,
            }
        })
        .collect();

    let rounds = plan.rounds;
    let max_sense = devices.iter().map(|d| d.sense_time_s).fold(0.0, f64::max);
    let max_round = devices
        .iter()
        .map(|d| d.comp_time_per_round_s + d.comm_time_per_round_s)
        .fold(0.0, f64::max);
    let wall_clock_s = max_sense + rounds as f64 * max_round;
    let total_energy_j: f64 = devices.iter().map(|d| d.total_energy_j(rounds)).sum();
    let collected: u64 = devices.iter().map(|d| d.samples).sum();

    let time_slack_s = budget.t_total_s - wall_clock_s;
    let energy_slack_j = budget.e_total_j - total_energy_j;
    Ok(CostReport {
        devices,
        rounds,
        collected,
        wall_clock_s,
        total_energy_j,
        time_slack_s,
        energy_slack_j,
        within_data_cap: collected <= budget.m_total,
        feasible: time_slack_s >= 0.0 && energy_slack_j >= 0.0,
    })
}
