use std::path::Path;

use fsd_core::balanced::DiagramSpec;
use fsd_core::model::{Branch, FoilParams, MomentumChart, SourceSpec};
use fsd_core::scattering::{LegChart, PortraitGrid};
use fsd_core::integrators::IntegratorConfig;
use fsd_core::unbalanced::Window;
use serde::{Deserialize, Serialize};

use crate::failure::Failure;

/// One JSON document; each subcommand reads the shared blocks and its own.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub params: FoilParams,
    #[serde(default = "default_source")]
    pub source: SourceSpec,
    /// Overrides the subcommand's default integrator.
    #[serde(default)]
    pub integrator: Option<IntegratorConfig>,
    #[serde(default)]
    pub simulate: Option<SimulateSpec>,
    #[serde(default)]
    pub force_check: Option<ForceCheckSpec>,
    #[serde(default)]
    pub bifurcation: Option<DiagramSpec>,
    #[serde(default)]
    pub potential: Option<PotentialSpec>,
    #[serde(default)]
    pub hill: Option<HillSpec>,
    #[serde(default)]
    pub scatter: Option<ScatterSpec>,
}

fn default_source() -> SourceSpec {
    SourceSpec::fixed(1.0)
}

/// Foil pose and momenta; the source starts at `source.position`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialState {
    pub x_c: f64,
    pub y_c: f64,
    pub theta: f64,
    pub momenta: [f64; 3],
    pub chart: MomentumChart,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateSpec {
    pub initial: InitialState,
    pub t_end: f64,
    /// Output spacing in time.
    pub sample_dt: f64,
    #[serde(default)]
    pub escape_radius: Option<f64>,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ForceCheckSpec {
    pub n_samples: usize,
    #[serde(default = "default_force_tolerance")]
    pub tolerance: f64,
}

fn default_force_tolerance() -> f64 {
    1e-8
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PotentialSpec {
    pub k: f64,
    pub window: Window,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HillSpec {
    pub h: f64,
    pub k: f64,
    pub window: Window,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScatterSpec {
    pub r_max: f64,
    pub h: f64,
    pub k: f64,
    pub branch: Branch,
    pub grid: PortraitGrid,
    pub n_iter: usize,
    #[serde(default)]
    pub max_flight_time: Option<f64>,
    #[serde(default)]
    pub chart: LegChart,
    #[serde(default)]
    pub allow_unsafe_level: bool,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, Failure> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Failure::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))
    }

    /// Parses and checks everything that does not depend on the subcommand.
    pub fn parse(text: &str) -> Result<Self, String> {
        let cfg: RunConfig = serde_json::from_str(text).map_err(|e| e.to_string())?;
        if let Some(integrator) = &cfg.integrator {
            integrator.validate().map_err(|e| e.to_string())?;
        }
        Ok(cfg)
    }

    pub fn block<'a, T>(&self, block: &'a Option<T>, name: &str) -> Result<&'a T, Failure> {
        block
            .as_ref()
            .ok_or_else(|| Failure::Config(format!("the configuration has no `{name}` block")))
    }

    /// Intensity of a fixed source of constant strength, which the reduced analyses assume.
    pub fn fixed_q(&self) -> Result<f64, Failure> {
        if self.source.mobile || !self.source.intensity.is_constant() {
            return Err(Failure::Config(
                "this analysis needs a fixed source of constant intensity".into(),
            ));
        }
        Ok(self.source.q(0.0))
    }

    pub fn integrator_or(&self, fallback: IntegratorConfig) -> IntegratorConfig {
        self.integrator.clone().unwrap_or(fallback)
    }
}
