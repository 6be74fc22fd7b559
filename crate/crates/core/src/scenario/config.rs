//! TOML configuration: one struct per scenario, every key explicit.
//!
//! A user file is deep-merged over the scenario's defaults before
//! deserialization, so partial files are fine and the merged result (echoed
//! into the manifest) carries every number the run used. Unknown keys at any
//! level are rejected.

use serde::{Deserialize, Serialize};

use crate::circuit::DriveTarget;
use crate::evolution::{ChirpTarget, StepMethod};

use super::{Model, ScenarioKind};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    pub t_start_us: f64,
    pub t_end_us: f64,
    pub samples: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StepperSection {
    pub method: StepMethod,
    pub tolerance: f64,
    pub max_refinements: usize,
}

impl StepperSection {
    fn midpoint() -> Self {
        Self {
            method: StepMethod::Midpoint,
            tolerance: 1e-7,
            max_refinements: 12,
        }
    }

    fn magnus() -> Self {
        Self {
            method: StepMethod::CommutatorFree4,
            ..Self::midpoint()
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FrameKind {
    Lab,
    Rotating,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModeKind {
    Calibrated,
    Naive,
}

/// Transmon pair, integration frame and drive conventions.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CircuitSection {
    pub omega0_ghz: f64,
    pub kappa_mhz: f64,
    pub g_mhz: f64,
    pub frame: FrameKind,
    /// Rotating-frame frequency; ignored in the lab frame.
    pub frame_mhz: f64,
    pub drive_target: DriveTarget,
    /// Common tone factor of the naive mode.
    pub naive_scale: f64,
}

impl Default for CircuitSection {
    fn default() -> Self {
        Self {
            omega0_ghz: 5.0,
            kappa_mhz: -300.0,
            g_mhz: 100.0,
            frame: FrameKind::Rotating,
            frame_mhz: 5000.0,
            drive_target: DriveTarget::First,
            naive_scale: std::f64::consts::SQRT_2,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MassListSection {
    pub momentum_mhz: [f64; 3],
    pub masses_mhz: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FreeDiracScanConfig {
    pub scenario: ScenarioKind,
    pub model: Model,
    pub seed: u64,
    pub dirac: MassListSection,
    pub grid: GridSection,
    /// Used only with `model = "circuit9"` (calibrated drive).
    pub circuit: CircuitSection,
    pub stepper: StepperSection,
}

impl Default for FreeDiracScanConfig {
    fn default() -> Self {
        Self {
            scenario: ScenarioKind::FreeDiracScan,
            model: Model::Ideal4,
            seed: 0,
            dirac: MassListSection {
                momentum_mhz: [20.0, 0.0, 0.0],
                masses_mhz: vec![0.0, 5.0, 10.0, 15.0, 20.0],
            },
            grid: GridSection {
                t_start_us: 0.0,
                t_end_us: 0.2,
                samples: 401,
            },
            circuit: CircuitSection::default(),
            stepper: StepperSection::magnus(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TextureSection {
    pub energy_mhz: f64,
    pub n_polar: usize,
    pub n_azimuthal: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpinTextureConfig {
    pub scenario: ScenarioKind,
    pub model: Model,
    pub seed: u64,
    pub texture: TextureSection,
}

impl Default for SpinTextureConfig {
    fn default() -> Self {
        Self {
            scenario: ScenarioKind::SpinTexture,
            model: Model::Ideal4,
            seed: 0,
            texture: TextureSection {
                energy_mhz: 20.0,
                n_polar: 9,
                n_azimuthal: 16,
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChirpSection {
    pub target: ChirpTarget,
    pub start_mhz: f64,
    pub end_mhz: f64,
    pub rate_mhz_per_us: f64,
}

impl Default for ChirpSection {
    fn default() -> Self {
        Self {
            target: ChirpTarget::Px,
            start_mhz: -50.0,
            end_mhz: 50.0,
            rate_mhz_per_us: 100.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrajectorySection {
    pub masses_mhz: Vec<f64>,
    /// Labels `"0"`..`"3"`, `"+01"`, `"-01"`, `"+23"`, `"-23"`.
    pub initial_states: Vec<String>,
    pub samples: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MassScanSection {
    pub mass_start_mhz: f64,
    pub mass_end_mhz: f64,
    pub mass_step_mhz: f64,
}

impl MassScanSection {
    pub fn masses(&self) -> Vec<f64> {
        let n = ((self.mass_end_mhz - self.mass_start_mhz) / self.mass_step_mhz + 1e-9).floor() as usize;
        (0..=n)
            .map(|k| self.mass_start_mhz + k as f64 * self.mass_step_mhz)
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairProductionConfig {
    pub scenario: ScenarioKind,
    pub model: Model,
    pub seed: u64,
    pub chirp: ChirpSection,
    pub trajectories: TrajectorySection,
    pub scan: MassScanSection,
    pub stepper: StepperSection,
}

impl Default for PairProductionConfig {
    fn default() -> Self {
        Self {
            scenario: ScenarioKind::PairProduction,
            model: Model::Ideal4,
            seed: 0,
            chirp: ChirpSection::default(),
            trajectories: TrajectorySection {
                masses_mhz: vec![1.0, 10.0, 40.0],
                initial_states: vec!["+01".into(), "-01".into(), "0".into()],
                samples: 201,
            },
            scan: MassScanSection {
                mass_start_mhz: 0.0,
                mass_end_mhz: 20.0,
                mass_step_mhz: 0.5,
            },
            stepper: StepperSection::midpoint(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CalibrationSection {
    pub start_mhz: f64,
    pub end_mhz: f64,
    pub rates_mhz_per_us: Vec<f64>,
    pub masses_mhz: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SchwingerScanConfig {
    pub scenario: ScenarioKind,
    pub model: Model,
    pub seed: u64,
    pub calibration: CalibrationSection,
    pub stepper: StepperSection,
}

impl Default for SchwingerScanConfig {
    fn default() -> Self {
        Self {
            scenario: ScenarioKind::SchwingerScan,
            model: Model::Ideal4,
            seed: 0,
            calibration: CalibrationSection {
                start_mhz: -50.0,
                end_mhz: 50.0,
                rates_mhz_per_us: vec![50.0, 100.0, 200.0],
                masses_mhz: vec![0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 4.0, 5.0, 6.0],
            },
            stepper: StepperSection::midpoint(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiracPointSection {
    pub mass_mhz: f64,
    pub momentum_mhz: [f64; 3],
    /// Diamond level the run starts in (0..=3).
    pub initial_level: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CircuitValidationConfig {
    pub scenario: ScenarioKind,
    pub model: Model,
    pub seed: u64,
    pub dirac: DiracPointSection,
    pub grid: GridSection,
    pub circuit: CircuitSection,
    pub modes: Vec<ModeKind>,
    /// Also integrate in the other frame and report the population difference.
    pub frame_check: bool,
    pub stepper: StepperSection,
}

impl Default for CircuitValidationConfig {
    fn default() -> Self {
        Self {
            scenario: ScenarioKind::CircuitValidation,
            model: Model::Circuit9,
            seed: 0,
            dirac: DiracPointSection {
                mass_mhz: 2.0,
                momentum_mhz: [2.0, 0.0, 0.0],
                initial_level: 0,
            },
            grid: GridSection {
                t_start_us: 0.0,
                t_end_us: 0.5,
                samples: 201,
            },
            circuit: CircuitSection::default(),
            modes: vec![ModeKind::Calibrated, ModeKind::Naive],
            frame_check: true,
            stepper: StepperSection::magnus(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BellSection {
    pub draws: usize,
    pub mass_max_mhz: f64,
    pub px_max_mhz: f64,
    pub tolerance: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BellCheckConfig {
    pub scenario: ScenarioKind,
    pub model: Model,
    pub seed: u64,
    pub bell: BellSection,
}

impl Default for BellCheckConfig {
    fn default() -> Self {
        Self {
            scenario: ScenarioKind::BellCheck,
            model: Model::Ideal4,
            seed: 20_160_701,
            bell: BellSection {
                draws: 100,
                mass_max_mhz: 40.0,
                px_max_mhz: 40.0,
                tolerance: 1e-10,
            },
        }
    }
}

/// A fully resolved scenario configuration.
#[derive(Clone, Debug, PartialEq)]
pub enum ScenarioConfig {
    FreeDiracScan(FreeDiracScanConfig),
    SpinTexture(SpinTextureConfig),
    PairProduction(PairProductionConfig),
    SchwingerScan(SchwingerScanConfig),
    CircuitValidation(CircuitValidationConfig),
    BellCheck(BellCheckConfig),
}
