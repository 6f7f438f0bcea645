//! Run configuration shared by the CLI and the suites.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gamma::GammaConfig;
use crate::linalg::Tolerance;
use crate::tetra::BatteryConfig;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", default, deny_unknown_fields)]
pub struct RunConfig {
    pub atol: f64,
    pub rtol: f64,
    /// Eigenvalues of `I - P*P` below this are treated as zero. `None` picks
    /// `1e-10 (1 + ‖P‖²)` per input.
    pub clamp_tol: Option<f64>,
    /// Membership and battery tolerance (`--tol`).
    pub tol: f64,
    pub circle_grid: usize,
    pub disc_grid: usize,
    pub theta_grid: usize,
    pub max_deg: usize,
    pub n_polys: usize,
    pub sup_samples: usize,
    pub seed: u64,
    pub depth: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            atol: 1e-10,
            rtol: 1e-8,
            clamp_tol: None,
            tol: crate::domains::MEMBERSHIP_TOL,
            circle_grid: crate::gamma::CIRCLE_GRID,
            disc_grid: crate::domains::DISC_GRID,
            theta_grid: crate::gamma::SWEEP_THETA_GRID,
            max_deg: 4,
            n_polys: 64,
            sup_samples: 10_000,
            seed: 0,
            depth: crate::dilation::DEFAULT_DEPTH,
        }
    }
}

impl RunConfig {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let cfg: RunConfig = serde_json::from_str(&text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let floats = [("atol", self.atol), ("rtol", self.rtol), ("tol", self.tol)];
        for (name, v) in floats.into_iter().chain(self.clamp_tol.map(|c| ("clampTol", c))) {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidConfig(format!("{name} must be positive, got {v}")));
            }
        }
        let counts = [
            ("circleGrid", self.circle_grid),
            ("discGrid", self.disc_grid.saturating_sub(1)),
            ("thetaGrid", self.theta_grid),
            ("maxDeg", self.max_deg),
            ("nPolys", self.n_polys),
            ("supSamples", self.sup_samples),
            ("depth", self.depth),
        ];
        for (name, v) in counts {
            if v == 0 {
                return Err(Error::InvalidConfig(format!("{name} too small")));
            }
        }
        Ok(())
    }

    pub fn tolerance(&self) -> Tolerance {
        Tolerance {
            atol: self.atol,
            rtol: self.rtol,
        }
    }

    pub fn battery(&self) -> BatteryConfig {
        BatteryConfig {
            max_deg: self.max_deg,
            n_polys: self.n_polys,
            sup_samples: self.sup_samples,
            seed: self.seed,
            tol: self.tol,
        }
    }

    pub fn gamma(&self) -> GammaConfig {
        GammaConfig {
            circle_grid: self.circle_grid,
            tol: self.tol,
        }
    }

    pub fn grids(&self) -> crate::domains::Grids {
        crate::domains::Grids {
            circle: self.circle_grid,
            disc: self.disc_grid,
        }
    }

    pub fn clamp_for(&self, p: &crate::linalg::CMatrix) -> f64 {
        self.clamp_tol.unwrap_or_else(|| crate::linalg::default_clamp_tol(p))
    }
}
