//! JSON run-configuration file.
//!
//! Every field is optional; absent fields keep the built-in defaults
//! (the stock quadrotor inertia, k_theta = 1000, k_omega = 100,
//! dt = 1e-4 s, t_final = 5 s, log_every = 10). Unknown fields are
//! rejected so typos fail loudly.

use std::path::Path;

use serde::Deserialize;

use attikit::dynamics::InertiaMatrix;
use attikit::experiments::SimConfig;
use attikit::quat::Mat3;
use attikit::Gains;

use crate::CliError;

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    /// Principal inertia, kg·m²; mutually exclusive with `inertia_full`.
    pub inertia_diag_kgm2: Option<[f64; 3]>,
    /// Full 3x3 inertia matrix, kg·m², row-major.
    pub inertia_full: Option<[[f64; 3]; 3]>,
    pub k_theta: Option<f64>,
    pub k_omega: Option<f64>,
    pub dt_s: Option<f64>,
    pub t_final_s: Option<f64>,
    pub log_every: Option<usize>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::usage(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::usage(format!("invalid config {}: {e}", path.display())))
    }

    /// Overlay this file's settings onto a prepared config.
    pub fn apply(&self, config: &mut SimConfig) -> Result<(), CliError> {
        if self.inertia_diag_kgm2.is_some() && self.inertia_full.is_some() {
            return Err(CliError::usage(
                "config sets both inertia_diag_kgm2 and inertia_full",
            ));
        }
        if let Some([jx, jy, jz]) = self.inertia_diag_kgm2 {
            config.inertia = InertiaMatrix::from_diagonal(jx, jy, jz)
                .map_err(|e| CliError::usage(format!("config inertia: {e}")))?;
        }
        if let Some(rows) = self.inertia_full {
            config.inertia = InertiaMatrix::from_matrix(Mat3::new(rows))
                .map_err(|e| CliError::usage(format!("config inertia: {e}")))?;
        }
        if self.k_theta.is_some() || self.k_omega.is_some() {
            let k_theta = self.k_theta.unwrap_or(config.gains.k_theta());
            let k_omega = self.k_omega.unwrap_or(config.gains.k_omega());
            config.gains = Gains::new(k_theta, k_omega)
                .map_err(|e| CliError::usage(format!("config gains: {e}")))?;
        }
        if let Some(dt) = self.dt_s {
            config.dt = dt;
        }
        if let Some(t_final) = self.t_final_s {
            config.t_final = t_final;
        }
        if let Some(log_every) = self.log_every {
            config.log_every = log_every;
        }
        config
            .validate()
            .map_err(|e| CliError::usage(format!("config invalid: {e}")))
    }
}
