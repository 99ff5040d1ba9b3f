use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::HarnessError;
use crate::curriculum::CurriculumKind;
use crate::engagement::EngagementConfig;
use crate::ppo::TrainConfig;

/// Everything needed to reproduce a multi-method, multi-seed run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub methods: Vec<CurriculumKind>,
    pub seeds: Vec<u64>,
    pub output_dir: PathBuf,
    /// Single worker thread throughout; byte-identical outputs per seed.
    pub deterministic: bool,
    pub train: TrainConfig,
    /// Initial-condition intervals for azimuth and distance are overridden
    /// by the curriculum stage.
    pub engagement: EngagementConfig<f64>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            methods: CurriculumKind::ALL.to_vec(),
            seeds: vec![0, 1, 2, 3, 4],
            output_dir: PathBuf::from("runs"),
            deterministic: false,
            train: TrainConfig::default(),
            engagement: EngagementConfig::default(),
        }
    }
}

/// The default configuration, annotated.
pub const DEFAULT_CONFIG_TOML: &str = r#"# Curricula to train: angle, distance, hybrid, none.
methods = ["angle", "distance", "hybrid", "none"]
# One independent training run per seed and method.
seeds = [0, 1, 2, 3, 4]
output_dir = "runs"
# Force a single worker thread (bit-reproducible outputs).
deterministic = false

[train]
iterations = 40
cycles_per_iteration = 20
# Episodes simulated concurrently during collection (results depend on it).
workers = 4
# Check that every return equals its episode's terminal reward.
check_return_identity = true

[train.ppo]
# Minimum transitions per side per cycle, and the minibatch size.
batch_size = 1024
epochs = 8
clip_ratio = 0.2
entropy_coefficient = 0.01
max_grad_norm = 0.5
actor_learning_rate = 0.002
critic_learning_rate = 0.001
normalize_advantages = true
gamma = 1.0

[train.gate]
# Self-play evaluation episodes after each iteration.
eval_episodes = 50
# Advance when at least this fraction ends in a win or a loss.
decisive_threshold = 0.6

[engagement]
max_sim_time = 200.0
# Overridden per curriculum stage.
azimuth_range = [-3.141592653589793, 3.141592653589793]
distance_range = [50000.0, 150000.0]
altitude_range = [3000.0, 10000.0]
speed_range = [250.0, 400.0]
radar_azimuth_limit = 1.0471975511965979
radar_range = 80000.0

[engagement.physics]
g = 9.81
dt_physics = 0.02
dt_decision = 0.2

[engagement.missile]
hit_radius = 12.0
max_flight_time = 120.0
midcourse_azimuth_limit = 1.0471975511965979
terminal_azimuth_limit = 1.5707963267948966
seeker_activation_range = 20000.0
nav_constant = 4.0
boost_duration = 6.0
boost_accel = 200.0
drag_coefficient = 2.5e-5
max_lateral_accel = 300.0
"#;

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self, String> {
        toml::from_str(text).map_err(|e| e.to_string())
    }

    pub fn load(path: &Path) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
        Self::from_toml_str(&text).map_err(|message| HarnessError::Parse { path: path.to_path_buf(), message })
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string_pretty(self).expect("config is serialisable")
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.methods.is_empty() {
            return Err(HarnessError::Config("at least one method is required".into()));
        }
        if self.seeds.is_empty() {
            return Err(HarnessError::Config("at least one seed is required".into()));
        }
        let mut seeds = self.seeds.clone();
        seeds.sort_unstable();
        seeds.dedup();
        if seeds.len() != self.seeds.len() {
            return Err(HarnessError::Config("seeds must be distinct".into()));
        }
        self.train.validate().map_err(|e| HarnessError::Config(e.to_string()))?;
        self.engagement.validate().map_err(|e| HarnessError::Config(e.to_string()))?;
        Ok(())
    }
}
