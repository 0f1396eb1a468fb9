use std::path::Path;

use nonkahler::bundles::SolverSettings;
use nonkahler::surface::{Params, SigmaFault};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Radii {
    pub rho0: f64,
    pub rho1: f64,
    pub rho2: f64,
}

impl Default for Radii {
    fn default() -> Self {
        let p = Params::default();
        Self {
            rho0: p.rho0(),
            rho1: p.rho1(),
            rho2: p.rho2(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    pub holomorphy: f64,
    pub roundtrip: f64,
    pub rank_tol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            holomorphy: nonkahler::atlas::DEFAULT_HOLOMORPHY_TOL,
            roundtrip: nonkahler::atlas::DEFAULT_ROUNDTRIP_TOL,
            rank_tol: nonkahler::bundles::DEFAULT_RANK_TOL,
        }
    }
}

/// One run's full configuration. Every field has a default, so `{}` is a
/// valid config file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub params: Radii,
    pub tolerances: Tolerances,
    pub truncation: usize,
    pub samples: usize,
    pub seed: u64,
    /// Test hook: evaluate a deliberately wrong `sigma`.
    pub inject_sigma_fault: SigmaFault,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            params: Radii::default(),
            tolerances: Tolerances::default(),
            truncation: nonkahler::bundles::DEFAULT_TRUNCATION,
            samples: nonkahler::bundles::DEFAULT_SAMPLES,
            seed: 42,
            inject_sigma_fault: SigmaFault::None,
        }
    }
}

/// Command-line values that take precedence over the file.
#[derive(Debug, Clone, Copy, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub rho0: Option<f64>,
    pub rho1: Option<f64>,
    pub rho2: Option<f64>,
    pub sigma_fault: Option<SigmaFault>,
}

impl Config {
    pub fn load(path: Option<&Path>, overrides: Overrides) -> Result<Self, CliError> {
        let mut config = match path {
            Some(path) => {
                let text = std::fs::read_to_string(path).map_err(|e| CliError::Io {
                    path: path.display().to_string(),
                    reason: e.to_string(),
                })?;
                serde_json::from_str(&text).map_err(|e| CliError::InvalidConfig(e.to_string()))?
            }
            None => Config::default(),
        };
        config.apply(overrides);
        config.validate()?;
        Ok(config)
    }

    pub fn apply(&mut self, overrides: Overrides) {
        if let Some(seed) = overrides.seed {
            self.seed = seed;
        }
        if let Some(v) = overrides.rho0 {
            self.params.rho0 = v;
        }
        if let Some(v) = overrides.rho1 {
            self.params.rho1 = v;
        }
        if let Some(v) = overrides.rho2 {
            self.params.rho2 = v;
        }
        if let Some(fault) = overrides.sigma_fault {
            self.inject_sigma_fault = fault;
        }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        self.surface_params()?;
        let t = &self.tolerances;
        if ![t.holomorphy, t.roundtrip, t.rank_tol].iter().all(|&x| x > 0.0 && x.is_finite()) {
            return Err(CliError::InvalidConfig("tolerances must be positive".into()));
        }
        if self.truncation < 8 {
            return Err(CliError::InvalidConfig("truncation must be at least 8".into()));
        }
        if self.samples < 4 * self.truncation {
            return Err(CliError::InvalidConfig(format!(
                "samples must be at least 4 * truncation = {}",
                4 * self.truncation
            )));
        }
        self.solver_settings().validate_for(&self.surface_params()?).map_err(|e| CliError::InvalidConfig(e.to_string()))
    }

    pub fn surface_params(&self) -> Result<Params, CliError> {
        Params::new(self.params.rho0, self.params.rho1, self.params.rho2).map_err(|e| CliError::InvalidConfig(e.to_string()))
    }

    pub fn solver_settings(&self) -> SolverSettings {
        let params = Params::new(self.params.rho0, self.params.rho1, self.params.rho2).unwrap_or_default();
        SolverSettings {
            truncation: self.truncation,
            samples: self.samples,
            rank_tol: self.tolerances.rank_tol,
            ..SolverSettings::for_params(&params)
        }
    }
}
