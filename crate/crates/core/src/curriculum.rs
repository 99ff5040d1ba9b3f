//! Initial-condition curricula and the stage-transfer gate.
//!
//! Each curriculum is a sequence of ten stages that widen the sampling region
//! for the initial engagement geometry until it covers the full task: target
//! azimuth anywhere in [−π, π] and initial separation in [50 km, 150 km].
//! The angle curriculum widens the azimuth interval by π/10 per side each
//! stage, the distance curriculum extends the far end of the separation
//! interval by 10 km per stage, and the hybrid curriculum does both at once.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::engagement::Outcome;

pub const STAGE_COUNT: usize = 10;
pub const MIN_DISTANCE: f64 = 50_000.0;
pub const MAX_DISTANCE: f64 = 150_000.0;
const DISTANCE_INCREMENT: f64 = 10_000.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CurriculumError {
    #[error("stage {index} out of range for {kind} (has {count} stages)")]
    StageOutOfRange { kind: CurriculumKind, index: usize, count: usize },
    #[error("unknown curriculum '{0}' (expected angle, distance, hybrid or none)")]
    UnknownKind(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CurriculumKind {
    Angle,
    Distance,
    Hybrid,
    None,
}

impl CurriculumKind {
    pub const ALL: [CurriculumKind; 4] =
        [CurriculumKind::Angle, CurriculumKind::Distance, CurriculumKind::Hybrid, CurriculumKind::None];

    pub fn stage_count(self) -> usize {
        match self {
            CurriculumKind::None => 1,
            _ => STAGE_COUNT,
        }
    }

    pub fn last_stage(self) -> usize {
        self.stage_count() - 1
    }

    /// Two-letter method label used in result files (AC, DC, HC, NC).
    pub fn method_label(self) -> &'static str {
        match self {
            CurriculumKind::Angle => "AC",
            CurriculumKind::Distance => "DC",
            CurriculumKind::Hybrid => "HC",
            CurriculumKind::None => "NC",
        }
    }

    pub fn from_method_label(label: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.method_label() == label)
    }
}

impl fmt::Display for CurriculumKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            CurriculumKind::Angle => "angle",
            CurriculumKind::Distance => "distance",
            CurriculumKind::Hybrid => "hybrid",
            CurriculumKind::None => "none",
        };
        f.write_str(name)
    }
}

impl FromStr for CurriculumKind {
    type Err = CurriculumError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "angle" | "ac" => Ok(CurriculumKind::Angle),
            "distance" | "dc" => Ok(CurriculumKind::Distance),
            "hybrid" | "hc" => Ok(CurriculumKind::Hybrid),
            "none" | "nc" => Ok(CurriculumKind::None),
            _ => Err(CurriculumError::UnknownKind(s.to_string())),
        }
    }
}

/// Sampling region for initial conditions at one stage.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurriculumStage {
    pub index: usize,
    /// Initial azimuth is drawn from [−half_width, half_width].
    pub azimuth_half_width: f64,
    /// Initial separation is drawn from this interval, metres.
    pub distance_interval: (f64, f64),
}

impl CurriculumStage {
    pub fn azimuth_range(&self) -> (f64, f64) {
        (-self.azimuth_half_width, self.azimuth_half_width)
    }

    /// True when every initial condition of `self` can also be drawn at `other`.
    pub fn is_subset_of(&self, other: &CurriculumStage) -> bool {
        self.azimuth_half_width <= other.azimuth_half_width
            && self.distance_interval.0 >= other.distance_interval.0
            && self.distance_interval.1 <= other.distance_interval.1
    }

    pub fn is_full_task(&self) -> bool {
        self.azimuth_half_width == PI && self.distance_interval == (MIN_DISTANCE, MAX_DISTANCE)
    }
}

fn angle_half_width(index: usize) -> f64 {
    // (index + 1)·π/10, with the last stage pinned to exactly π.
    if index + 1 == STAGE_COUNT {
        PI
    } else {
        (index + 1) as f64 * PI / 10.0
    }
}

fn distance_upper(index: usize) -> f64 {
    MIN_DISTANCE + DISTANCE_INCREMENT * (index + 1) as f64
}

pub fn stage(kind: CurriculumKind, index: usize) -> Result<CurriculumStage, CurriculumError> {
    let count = kind.stage_count();
    if index >= count {
        return Err(CurriculumError::StageOutOfRange { kind, index, count });
    }
    let (azimuth_half_width, upper) = match kind {
        CurriculumKind::Angle => (angle_half_width(index), MAX_DISTANCE),
        CurriculumKind::Distance => (PI, distance_upper(index)),
        CurriculumKind::Hybrid => (angle_half_width(index), distance_upper(index)),
        CurriculumKind::None => (PI, MAX_DISTANCE),
    };
    Ok(CurriculumStage { index, azimuth_half_width, distance_interval: (MIN_DISTANCE, upper) })
}

/// Mastery test applied after each training iteration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TransferGate {
    pub eval_episodes: usize,
    /// Minimum fraction of evaluation episodes that must end in a win or loss.
    pub decisive_threshold: f64,
}

impl Default for TransferGate {
    fn default() -> Self {
        Self { eval_episodes: 50, decisive_threshold: 0.6 }
    }
}

impl TransferGate {
    pub fn should_advance(&self, kind: CurriculumKind, current: usize, eval_results: &[Outcome]) -> bool {
        if current >= kind.last_stage() || eval_results.is_empty() {
            return false;
        }
        let decisive = eval_results.iter().filter(|o| o.is_decisive()).count();
        decisive as f64 / eval_results.len() as f64 >= self.decisive_threshold
    }
}

/// Stage pointer for one training run. Never moves backwards.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CurriculumProgress {
    pub kind: CurriculumKind,
    pub index: usize,
}

impl CurriculumProgress {
    pub fn new(kind: CurriculumKind) -> Self {
        Self { kind, index: 0 }
    }

    pub fn current(&self) -> CurriculumStage {
        stage(self.kind, self.index).expect("progress index stays in range")
    }

    /// Applies the gate; returns whether the stage advanced.
    pub fn update(&mut self, gate: &TransferGate, eval_results: &[Outcome]) -> bool {
        let advance = gate.should_advance(self.kind, self.index, eval_results);
        if advance {
            self.index += 1;
        }
        advance
    }
}
