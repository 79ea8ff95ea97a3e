//! Experiment configuration, read from a TOML document.
//!
//! ```toml
//! seed = 7
//! horizon = 500
//! trials = 100
//!
//! [system]
//! catalog = "affine_contraction"
//! alpha = 0.5
//!
//! [defects]
//! mode = "constant"        # delta omitted: derived from the solver's law
//!
//! [solver]
//! kind = "contracting"
//! start_radius_fraction = 0.5
//!
//! [verify]
//! epsilon = 0.4
//! ```

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use shadowkit::{DefectProfile, Sampling};

use crate::CliError;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub seed: u64,
    pub horizon: usize,
    #[serde(default = "one")]
    pub trials: usize,
    #[serde(default)]
    pub format: Format,
    pub system: SystemConfig,
    #[serde(default)]
    pub defects: DefectsConfig,
    pub solver: SolverConfig,
    #[serde(default)]
    pub verify: VerifyConfig,
    /// Parameter grid for `sweep`: key -> values. Keys override the
    /// parameter of the same name (see [`ExperimentConfig::set_param`]).
    #[serde(default)]
    pub sweep: BTreeMap<String, Vec<f64>>,
}

fn one() -> usize {
    1
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemConfig {
    /// One of `affine_contraction`, `linear_contraction`,
    /// `scalar_contraction`, `scalar_expansion`, `affine_expansion`,
    /// `sierpinski`, `bernoulli_prepend`, `hyperbolic`, `power`,
    /// `shifted_power`.
    pub catalog: String,
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub dim: Option<usize>,
    /// Bernoulli word depth.
    pub depth: Option<u32>,
    /// Bernoulli symbols applied in turn (cyclic).
    pub symbols: Option<Vec<u8>>,
    /// Hyperbolic blocks as `[stable, unstable]` scalar pairs.
    pub blocks: Option<Vec<[f64; 2]>>,
    /// Explicit step schedule (indices into the catalog, cyclic).
    pub schedule: Option<Vec<usize>>,
    /// Draw a random schedule of this length per trial instead.
    pub random_schedule: Option<usize>,
    /// Fixed anchor point; sampled per trial when absent.
    pub start: Option<Vec<f64>>,
    #[serde(default = "unit")]
    pub start_scale: f64,
}

fn unit() -> f64 {
    1.0
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DefectsConfig {
    /// `zero`, `constant`, `harmonic`, `exponential` or `window`.
    pub mode: String,
    /// Constant bound; derived from `verify.epsilon` when absent.
    pub delta: Option<f64>,
    pub scale: Option<f64>,
    pub l: Option<f64>,
    pub theta: Option<f64>,
    pub magnitude: Option<f64>,
    pub until: Option<usize>,
    #[serde(default)]
    pub sampling: Sampling,
}

impl Default for DefectsConfig {
    fn default() -> Self {
        DefectsConfig {
            mode: "zero".into(),
            delta: None,
            scale: None,
            l: None,
            theta: None,
            magnitude: None,
            until: None,
            sampling: Sampling::Uniform,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolverKind {
    Contracting,
    Expanding,
    H,
    Gluing,
    Hyperbolic,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverConfig {
    pub kind: SolverKind,
    #[serde(default = "default_tol")]
    pub tol: f64,
    /// Contracting start drawn at distance `fraction * epsilon` times a
    /// uniform variate from `x_0`; `x_0` itself when absent.
    pub start_radius_fraction: Option<f64>,
    #[serde(default = "default_stages")]
    pub stages: usize,
    /// Classification delta for gluing.
    pub delta: Option<f64>,
}

fn default_tol() -> f64 {
    shadowkit::solvers::DEFAULT_TOL
}

fn default_stages() -> usize {
    20
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyConfig {
    pub epsilon: Option<f64>,
    /// Tail window; the final quarter when absent and `tail_tol` is set.
    pub tail_window: Option<usize>,
    pub tail_tol: Option<f64>,
    /// Check errors against the exponential bound implied by an
    /// exponential defect profile.
    #[serde(default)]
    pub exponential: bool,
    /// Slack for entrywise bound comparisons.
    #[serde(default = "default_slack")]
    pub slack: f64,
}

fn default_slack() -> f64 {
    1e-9
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig { epsilon: None, tail_window: None, tail_tol: None, exponential: false, slack: default_slack() }
    }
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        let cfg: ExperimentConfig = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.trials == 0 {
            return Err(CliError::Config("trials must be >= 1".into()));
        }
        if let Some(f) = self.solver.start_radius_fraction {
            if !(0.0..=1.0).contains(&f) || self.verify.epsilon.is_none() {
                return Err(CliError::Config("start_radius_fraction needs verify.epsilon and a value in [0,1]".into()));
            }
        }
        if self.verify.tail_window == Some(0) {
            return Err(CliError::Config("tail_window must be positive".into()));
        }
        for key in self.sweep.keys() {
            if !SWEEP_KEYS.contains(&key.as_str()) {
                return Err(CliError::Config(format!("unknown sweep key {key:?}; expected one of {SWEEP_KEYS:?}")));
            }
        }
        Ok(())
    }

    /// Defect profile, deriving a constant `delta` from the solver's law
    /// when not given: `(1-alpha) eps / 2` for contracting solvers and
    /// `(beta-1) eps` for expanding ones.
    pub fn defect_profile(&self) -> Result<DefectProfile, CliError> {
        let d = &self.defects;
        let need = |v: Option<f64>, name: &str| {
            v.ok_or_else(|| CliError::Config(format!("defects mode {:?} needs {name}", d.mode)))
        };
        Ok(match d.mode.as_str() {
            "zero" => DefectProfile::Zero,
            "constant" => DefectProfile::Constant { delta: d.delta.map_or_else(|| self.law_delta(), Ok)? },
            "harmonic" => DefectProfile::Harmonic { scale: need(d.scale, "scale")? },
            "exponential" => DefectProfile::Exponential { l: need(d.l, "l")?, theta: need(d.theta, "theta")? },
            "window" => DefectProfile::Window {
                magnitude: need(d.magnitude, "magnitude")?,
                until: d.until.ok_or_else(|| CliError::Config("defects mode \"window\" needs until".into()))?,
            },
            other => return Err(CliError::Config(format!("unknown defects mode {other:?}"))),
        })
    }

    fn law_delta(&self) -> Result<f64, CliError> {
        let eps = self
            .verify
            .epsilon
            .ok_or_else(|| CliError::Config("constant defects need delta or verify.epsilon".into()))?;
        match self.solver.kind {
            SolverKind::Contracting => {
                let a = self.system.alpha.ok_or_else(|| CliError::Config("deriving delta needs system.alpha".into()))?;
                Ok((1.0 - a) * eps / 2.0)
            }
            SolverKind::Expanding | SolverKind::H | SolverKind::Gluing => {
                let b = self.system.beta.ok_or_else(|| CliError::Config("deriving delta needs system.beta".into()))?;
                Ok((b - 1.0) * eps)
            }
            SolverKind::Hyperbolic => Err(CliError::Config("hyperbolic runs need an explicit delta".into())),
        }
    }

    /// Overrides one named parameter.
    pub fn set_param(&mut self, key: &str, value: f64) -> Result<(), CliError> {
        let as_count = |v: f64| {
            if v >= 0.0 && v.fract() == 0.0 {
                Ok(v as usize)
            } else {
                Err(CliError::Config(format!("{key} must be a nonnegative integer, got {v}")))
            }
        };
        match key {
            "alpha" => self.system.alpha = Some(value),
            "beta" => self.system.beta = Some(value),
            "epsilon" => self.verify.epsilon = Some(value),
            "delta" => self.defects.delta = Some(value),
            "l" => self.defects.l = Some(value),
            "theta" => self.defects.theta = Some(value),
            "scale" => self.defects.scale = Some(value),
            "horizon" => self.horizon = as_count(value)?,
            "trials" => self.trials = as_count(value)?,
            _ => return Err(CliError::Config(format!("unknown parameter {key:?}"))),
        }
        Ok(())
    }
}

pub const SWEEP_KEYS: &[&str] = &["alpha", "beta", "epsilon", "delta", "l", "theta", "scale", "horizon", "trials"];
