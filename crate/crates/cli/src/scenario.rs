//! Scenario files and fleet generation.
//!
//! A scenario is a TOML document; every table and key is optional and falls
//! back to the reference constants in [`DeviceProfile::default`] and
//! [`SystemBudget::default`].
//!
//! ```toml
//! id = "example"
//! grid_points = 100000
//!
//! [budget]
//! t_total_s = 5000.0
//! e_total_j = 12000.0
//! m_total = 20000
//! num_devices = 20
//!
//! [device]
//! sample_rate_hz = 10.0
//! payload_bits = 21880.0
//!
//! [heterogeneity]
//! mode = "gaussian"   # or "homogeneous"
//! std_scale = 0.5
//! seed = 1
//! ```

use std::fs;
use std::path::Path;

use edgeplan_core::cost_model::{path_gain_from_distance, DeviceProfile, SystemBudget};
use edgeplan_core::heterogeneous::AoConfig;
use edgeplan_core::homogeneous::DEFAULT_GRID_POINTS;
use edgeplan_core::surrogate::SurrogateParams;
use edgeplan_core::Error as CoreError;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

/// Gaussian draws are clamped to this multiple of the template value.
pub const CLAMP_FLOOR: f64 = 1e-3;

pub const BUNDLED: [(&str, &str); 3] = [
    (
        "homogeneous_v",
        include_str!("../../../scenarios/homogeneous_v.toml"),
    ),
    (
        "heterogeneous_v",
        include_str!("../../../scenarios/heterogeneous_v.toml"),
    ),
    (
        "table2_calibrated",
        include_str!("../../../scenarios/table2_calibrated.toml"),
    ),
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum HeterogeneityMode {
    #[default]
    Homogeneous,
    Gaussian,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Heterogeneity {
    pub mode: HeterogeneityMode,
    /// Per-field standard deviation as a multiple of the template value.
    pub std_scale: f64,
    pub seed: u64,
}

impl Default for Heterogeneity {
    fn default() -> Self {
        Self {
            mode: HeterogeneityMode::Homogeneous,
            std_scale: 0.5,
            seed: 0,
        }
    }
}

/// Settings of the synthetic descent experiments.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimSettings {
    pub dim: usize,
    pub samples: usize,
    pub ridge: f64,
    /// Problem instances per data fraction.
    pub seeds: usize,
    pub base_seed: u64,
    pub rounds: u64,
    /// Devices the collected set is dealt to.
    pub devices: usize,
    pub data_fraction_ladder: Vec<f64>,
}

impl Default for SimSettings {
    fn default() -> Self {
        Self {
            dim: 5,
            samples: 200,
            ridge: 0.1,
            seeds: 50,
            base_seed: 0,
            rounds: 50,
            devices: 4,
            data_fraction_ladder: vec![0.25, 0.5, 0.75, 1.0],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Scenario {
    pub id: String,
    pub grid_points: usize,
    /// Replace every device's path gain with the distance-based path-loss value.
    pub path_loss_from_distance: bool,
    pub budget: SystemBudget,
    pub device: DeviceProfile,
    pub heterogeneity: Heterogeneity,
    pub surrogate: SurrogateParams,
    pub ao: AoConfig,
    pub sim: SimSettings,
}

impl Default for Scenario {
    fn default() -> Self {
        Self {
            id: "default".into(),
            grid_points: DEFAULT_GRID_POINTS,
            path_loss_from_distance: false,
            budget: SystemBudget::default(),
            device: DeviceProfile::default(),
            heterogeneity: Heterogeneity::default(),
            surrogate: SurrogateParams::default(),
            ao: AoConfig::default(),
            sim: SimSettings::default(),
        }
    }
}

fn field_error(origin: &str, err: CoreError) -> CliError {
    match err {
        CoreError::InvalidParameter { field, reason } => CliError::Field {
            path: origin.to_string(),
            field: field.to_string(),
            reason,
        },
        other => CliError::Core(other),
    }
}

fn check(origin: &str, ok: bool, field: &str, reason: &str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(CliError::Field {
            path: origin.to_string(),
            field: field.to_string(),
            reason: reason.to_string(),
        })
    }
}

impl Scenario {
    pub fn validate(&self, origin: &str) -> Result<()> {
        self.budget.validate().map_err(|e| field_error(origin, e))?;
        self.device.validate().map_err(|e| field_error(origin, e))?;
        self.surrogate
            .validate()
            .map_err(|e| field_error(origin, e))?;
        self.ao.validate().map_err(|e| field_error(origin, e))?;
        check(origin, self.grid_points >= 2, "grid_points", "must be >= 2")?;
        let h = &self.heterogeneity;
        check(
            origin,
            h.std_scale.is_finite() && h.std_scale >= 0.0,
            "heterogeneity.std_scale",
            "must be finite and >= 0",
        )?;
        check(
            origin,
            !self.path_loss_from_distance || self.device.distance_m.is_some(),
            "device.distance_m",
            "required when path_loss_from_distance is set",
        )?;
        let s = &self.sim;
        check(origin, s.dim >= 1, "sim.dim", "must be >= 1")?;
        check(origin, s.samples >= 1, "sim.samples", "must be >= 1")?;
        check(
            origin,
            s.ridge.is_finite() && s.ridge > 0.0,
            "sim.ridge",
            "must be > 0",
        )?;
        check(origin, s.devices >= 1, "sim.devices", "must be >= 1")?;
        check(
            origin,
            s.data_fraction_ladder.iter().all(|f| *f > 0.0 && *f <= 1.0),
            "sim.data_fraction_ladder",
            "fractions must lie in (0, 1]",
        )?;
        Ok(())
    }

    /// Device template with the path-loss option applied.
    pub fn template(&self) -> DeviceProfile {
        let mut p = self.device.clone();
        if self.path_loss_from_distance {
            if let Some(d) = p.distance_m {
                p.path_gain = path_gain_from_distance(d);
            }
        }
        p
    }
}

/// Parse and validate scenario text. `origin` names the source in error messages.
pub fn parse_scenario(text: &str, origin: &str) -> Result<Scenario> {
    let scenario: Scenario = toml::from_str(text).map_err(|e| CliError::Parse {
        path: origin.to_string(),
        message: e.to_string().trim_end().to_string(),
    })?;
    scenario.validate(origin)?;
    Ok(scenario)
}

pub fn load_scenario(path: &Path) -> Result<Scenario> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Read {
        path: path.to_path_buf(),
        source,
    })?;
    parse_scenario(&text, &path.display().to_string())
}

pub fn bundled_scenario(name: &str) -> Result<Scenario> {
    let (_, text) = BUNDLED
        .iter()
        .find(|(n, _)| *n == name)
        .ok_or_else(|| CliError::Usage(format!("no bundled scenario named `{name}`")))?;
    parse_scenario(text, &format!("bundled:{name}"))
}

fn perturbed_fields(p: &mut DeviceProfile) -> [&mut f64; 10] {
    [
        &mut p.sample_rate_hz,
        &mut p.sense_eff,
        &mut p.sense_offset_j,
        &mut p.cycles_per_sample,
        &mut p.cpu_hz,
        &mut p.switch_cap,
        &mut p.bandwidth_hz,
        &mut p.tx_power_w,
        &mut p.path_gain,
        &mut p.channel_quality,
    ]
}

/// Device profiles for the scenario's fleet.
///
/// Gaussian mode draws every perturbed field independently around the
/// template value; the exponent, noise density, payload and distance are
/// shared by all devices.
pub fn generate_fleet(scenario: &Scenario) -> Vec<DeviceProfile> {
    let template = scenario.template();
    let k = scenario.budget.num_devices;
    let h = &scenario.heterogeneity;
    if h.mode == HeterogeneityMode::Homogeneous || h.std_scale == 0.0 {
        return vec![template; k];
    }
    let mut rng = ChaCha8Rng::seed_from_u64(h.seed);
    (0..k)
        .map(|_| {
            let mut p = template.clone();
            for value in perturbed_fields(&mut p) {
                let mean = *value;
                if mean == 0.0 {
                    continue;
                }
                let normal = Normal::new(mean, h.std_scale * mean.abs()).expect("finite std");
                *value = normal.sample(&mut rng).max(CLAMP_FLOOR * mean);
            }
            p
        })
        .collect()
}
