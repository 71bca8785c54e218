//! JSON experiment configuration and its mapping onto the channel and
//! probe types. Unknown keys are hard errors.

use std::f64::consts::PI;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::channels::{
    ChannelPipeline, DepolarizerSpec, DiattenuatorSpec, Order, RetarderSpec, Stage,
};
use crate::error::{Error, Result};
use crate::hilbert::{make_coherent, make_noon, FockBasis, RotationAxis, TwoModeState};
use crate::polarization::{builtin_king, MajoranaConstellation};
use crate::c;

fn default_theta() -> f64 {
    PI / 10.0
}

fn default_cutoff() -> usize {
    12
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub probe: ProbeConfig,
    pub photon_grid: Vec<f64>,
    pub pipeline: PipelineConfig,
    #[serde(default = "default_theta")]
    pub theta: f64,
    #[serde(default = "default_cutoff")]
    pub cutoff: usize,
    #[serde(default)]
    pub outputs: OutputsConfig,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum ProbeConfig {
    Noon,
    Coherent,
    King {
        /// Optional constellation file; without it the built-in King with
        /// `n` points is used at each grid value.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        file: Option<String>,
    },
}

impl ProbeConfig {
    pub fn label(&self) -> &'static str {
        match self {
            ProbeConfig::Noon => "noon",
            ProbeConfig::Coherent => "coherent",
            ProbeConfig::King { .. } => "king",
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfig {
    pub order: OrderConfig,
    pub retarder: RetarderConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub diattenuator: Option<DiattenuatorConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub depolarizer: Option<DepolarizerConfig>,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum OrderConfig {
    Forward,
    Reverse,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RetarderConfig {
    pub theta: f64,
    pub axis: AxisConfig,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AxisConfig {
    #[serde(rename = "Theta")]
    pub theta: f64,
    #[serde(rename = "Phi")]
    pub phi: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiattenuatorConfig {
    pub q: f64,
    pub r: f64,
    #[serde(default)]
    pub beta: f64,
    #[serde(default)]
    pub gamma: f64,
}

/// How convex-rotation depolarization treats the six axis orderings.
#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq, Eq, Default)]
#[serde(rename_all = "lowercase")]
pub enum ConvexAverage {
    /// Average the six output states (a CPTP mixture).
    #[default]
    States,
    /// Report the mean of the six per-ordering QFI values.
    Qfi,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum DepolarizerConfig {
    Convex {
        eta_min: f64,
        eta_max: f64,
        n_r: usize,
        sigma_r: f64,
        #[serde(default)]
        average: ConvexAverage,
    },
    Isotropic {
        nu_t: f64,
    },
    Anisotropic {
        nu_t: f64,
        #[serde(default)]
        nu0_t: f64,
    },
}

impl DepolarizerConfig {
    pub fn to_spec(&self) -> DepolarizerSpec {
        match *self {
            DepolarizerConfig::Convex {
                eta_min,
                eta_max,
                n_r,
                sigma_r,
                average,
            } => DepolarizerSpec::ConvexRotations {
                eta_min,
                eta_max,
                n_r,
                sigma_r,
                permutation_average: average == ConvexAverage::States,
            },
            DepolarizerConfig::Isotropic { nu_t } => DepolarizerSpec::IsotropicLindblad { nu_t },
            DepolarizerConfig::Anisotropic { nu_t, nu0_t } => {
                DepolarizerSpec::AnisotropicLindblad { nu_t, nu0_t }
            }
        }
    }

    /// Short tag and strength for the CSV columns.
    pub fn tag(&self) -> (String, f64) {
        match *self {
            DepolarizerConfig::Convex { sigma_r, .. } => ("convex".into(), sigma_r),
            DepolarizerConfig::Isotropic { nu_t } => ("isotropic".into(), nu_t),
            DepolarizerConfig::Anisotropic { nu_t, .. } => ("anisotropic".into(), nu_t),
        }
    }

    pub fn qfi_averaged(&self) -> bool {
        matches!(
            self,
            DepolarizerConfig::Convex {
                average: ConvexAverage::Qfi,
                ..
            }
        )
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct OutputsConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub csv: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub plot: Option<String>,
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig =
            serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.photon_grid.is_empty() {
            return Err(Error::Config("photon_grid must be nonempty".into()));
        }
        if self.photon_grid.iter().any(|&n| !(n > 0.0) || !n.is_finite()) {
            return Err(Error::Config(
                "photon_grid entries must be positive and finite".into(),
            ));
        }
        if !self.theta.is_finite() {
            return Err(Error::Config("theta must be finite".into()));
        }
        if self.cutoff < 2 {
            return Err(Error::Config("cutoff must be at least 2".into()));
        }
        self.pipeline()?.validate()?;
        if let ProbeConfig::King { file: Some(path) } = &self.probe {
            MajoranaConstellation::load(Path::new(path))?;
        }
        Ok(())
    }

    pub fn basis(&self) -> Result<FockBasis> {
        FockBasis::new(self.cutoff)
    }

    pub fn axis(&self) -> RotationAxis {
        RotationAxis::new(self.pipeline.retarder.axis.theta, self.pipeline.retarder.axis.phi)
    }

    /// Build the channel pipeline from the config (retarder angle as listed;
    /// sweeps override it with the top-level `theta`).
    pub fn pipeline(&self) -> Result<ChannelPipeline> {
        let retarder = RetarderSpec {
            theta: self.pipeline.retarder.theta,
            axis: self.axis(),
        };
        let diattenuator = self.pipeline.diattenuator.as_ref().map(|d| DiattenuatorSpec {
            q: d.q,
            r: d.r,
            beta: d.beta,
            gamma: d.gamma,
        });
        let depolarizer = self.pipeline.depolarizer.as_ref().map(|d| d.to_spec());
        let mut stages = Vec::new();
        match self.pipeline.order {
            OrderConfig::Forward => {
                if let Some(d) = diattenuator {
                    stages.push(Stage::Diattenuator(d));
                }
                stages.push(Stage::Retarder(retarder));
                if let Some(d) = depolarizer {
                    stages.push(Stage::Depolarizer(d));
                }
            }
            OrderConfig::Reverse => {
                if let Some(d) = depolarizer {
                    stages.push(Stage::Depolarizer(d));
                }
                stages.push(Stage::Retarder(retarder));
                if let Some(d) = diattenuator {
                    stages.push(Stage::Diattenuator(d));
                }
            }
        }
        let order = match self.pipeline.order {
            OrderConfig::Forward => Order::Forward,
            OrderConfig::Reverse => Order::Reverse,
        };
        ChannelPipeline::new(order, stages)
    }

    pub fn order_label(&self) -> &'static str {
        match self.pipeline.order {
            OrderConfig::Forward => "forward",
            OrderConfig::Reverse => "reverse",
        }
    }

    /// Probe state for one grid value of the mean photon number. NOON and
    /// King probes require integer grid values.
    pub fn probe_state(&self, n_mean: f64) -> Result<TwoModeState> {
        let basis = self.basis()?;
        match &self.probe {
            ProbeConfig::Noon => {
                let n = integer_grid_value(n_mean)?;
                make_noon(basis, n)
            }
            ProbeConfig::Coherent => make_coherent(basis, c(n_mean.sqrt(), 0.0)),
            ProbeConfig::King { file } => {
                let n = integer_grid_value(n_mean)?;
                match file {
                    Some(path) => {
                        let cons = MajoranaConstellation::load(Path::new(path))?;
                        if cons.len() != n {
                            return Err(Error::Capacity(format!(
                                "King file has {} points, grid asks for {n}",
                                cons.len()
                            )));
                        }
                        crate::hilbert::make_king(basis, &cons)
                    }
                    None => builtin_king(n)?.to_state(basis),
                }
            }
        }
    }
}

fn integer_grid_value(n_mean: f64) -> Result<usize> {
    let rounded = n_mean.round();
    if (n_mean - rounded).abs() > 1e-9 || rounded < 1.0 {
        return Err(Error::Capacity(format!(
            "probe needs an integer photon number, got {n_mean}"
        )));
    }
    Ok(rounded as usize)
}
