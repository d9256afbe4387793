//! Splitting engines for the constrained distortion problem, the clipping
//! baseline, and convergence/KKT diagnostics.
//!
//! All engines start from `X = Z = x0` with a zero dual and return the
//! PAPR-feasible iterate `Z`.

pub(crate) mod diagnostics;
mod engines;
mod icf;
mod problem;

use serde::{Deserialize, Serialize};

use crate::channel::MitigationWeights;
use crate::error::{Error, Result};
use crate::numerics::ComplexMatrix;
use crate::prox::{AclrSetSpec, PaprSetSpec};
use crate::waveform::ResourceGrid;

pub use diagnostics::{kkt_check, residuals, write_trace_csv, KktReport};
pub use engines::{badmm_run, dys_run, topadmm_run};
pub use icf::{icf_clip_level, icf_run};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Engine {
    Topadmm,
    Badmm,
    Dys,
    Icf,
}

impl Engine {
    pub fn name(self) -> &'static str {
        match self {
            Engine::Topadmm => "topadmm",
            Engine::Badmm => "badmm",
            Engine::Dys => "dys",
            Engine::Icf => "icf",
        }
    }
}

impl std::str::FromStr for Engine {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "topadmm" | "top-admm" => Ok(Engine::Topadmm),
            "badmm" => Ok(Engine::Badmm),
            "dys" => Ok(Engine::Dys),
            "icf" => Ok(Engine::Icf),
            other => Err(Error::Config(format!(
                "unknown engine '{other}' (expected topadmm, badmm, dys or icf)"
            ))),
        }
    }
}

/// Whether the constraint radii follow the iterates or stay at their
/// initial values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SetMode {
    /// Radii recomputed every iteration.
    P3,
    /// Radii frozen from `x0`.
    P4,
}

/// Which iterate feeds the per-iteration radii in `P3` mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RadiusSource {
    /// PAPR radius from `Z`, ACLR radius from `X`.
    Split,
    /// Both radii from `X`.
    Xbar,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    pub engine: Engine,
    pub mode: SetMode,
    pub radius_source: RadiusSource,
    /// Gradient step of TOP-ADMM and DYS.
    pub tau: f64,
    /// BADMM coupling penalty.
    pub rho: f64,
    pub badmm_rho_x: f64,
    pub badmm_rho_z: f64,
    /// BADMM dual step.
    pub badmm_tau: f64,
    pub dys_mu: f64,
    pub max_iters: usize,
    pub gamma_par_db: f64,
    pub psi_aclr_db: f64,
    pub zeta: f64,
    pub stop_tol: f64,
    pub early_stop: bool,
    /// Metric snapshot cadence in iterations; 0 disables snapshots.
    pub snapshot_every: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            engine: Engine::Topadmm,
            mode: SetMode::P3,
            radius_source: RadiusSource::Split,
            tau: 1.945,
            rho: 0.01,
            badmm_rho_x: 1.0,
            badmm_rho_z: 1.0,
            badmm_tau: 0.01,
            dys_mu: 1.0,
            max_iters: 1000,
            gamma_par_db: 4.0,
            psi_aclr_db: -50.0,
            zeta: 0.0,
            stop_tol: 1e-4,
            early_stop: true,
            snapshot_every: 0,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = |v: f64, name: &str| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::Config(format!("{name} must be > 0, got {v}")))
            }
        };
        if self.max_iters == 0 {
            return Err(Error::Config("max_iters must be >= 1".into()));
        }
        if !self.gamma_par_db.is_finite() || !self.psi_aclr_db.is_finite() {
            return Err(Error::Config("PAPR and ACLR targets must be finite".into()));
        }
        if !(self.zeta >= 0.0) {
            return Err(Error::Config(format!("zeta must be >= 0, got {}", self.zeta)));
        }
        positive(self.stop_tol, "stop_tol")?;
        match self.engine {
            Engine::Topadmm => positive(self.tau, "tau")?,
            Engine::Dys => {
                positive(self.tau, "tau")?;
                positive(self.dys_mu, "dys_mu")?;
            }
            Engine::Badmm => {
                positive(self.rho, "rho")?;
                positive(self.badmm_rho_x, "badmm_rho_x")?;
                positive(self.badmm_rho_z, "badmm_rho_z")?;
                positive(self.badmm_tau, "badmm_tau")?;
            }
            Engine::Icf => {}
        }
        Ok(())
    }
}

/// Metric values recorded at selected iterations.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Snapshot {
    pub iter: usize,
    pub papr_db_max: f64,
    pub txevm_wb: f64,
    pub predevm_wb: f64,
    pub estevm_wb: f64,
    pub aclr_db_max: f64,
}

/// Per-iteration residuals. For DYS `dual` holds the fixed-point residual
/// `||L(i+1) - L(i)||`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ResidualTrace {
    pub primal: Vec<f64>,
    pub dual: Vec<f64>,
    pub snapshots: Vec<Snapshot>,
}

impl ResidualTrace {
    pub fn len(&self) -> usize {
        self.primal.len()
    }

    pub fn is_empty(&self) -> bool {
        self.primal.is_empty()
    }

    pub fn last(&self) -> Option<(f64, f64)> {
        Some((*self.primal.last()?, *self.dual.last()?))
    }
}

/// Iterates of a run. `lambda` is the engine's own dual variable: the scaled
/// dual for TOP-ADMM, the unscaled multiplier for BADMM and the governing
/// sequence for DYS.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverState {
    pub xbar: ResourceGrid,
    pub zbar: ResourceGrid,
    pub lambda: ResourceGrid,
    pub iter: usize,
    pub residuals: ResidualTrace,
}

#[derive(Debug, Clone)]
pub struct SolveOutput {
    /// Final `Z` (for ICF, the filtered grid).
    pub solution: ResourceGrid,
    pub state: SolverState,
    pub papr_spec: PaprSetSpec,
    pub aclr_spec: AclrSetSpec,
    pub warnings: Vec<String>,
    pub stopped_early: bool,
}

/// Called with `(iteration, Z)` every `snapshot_every` iterations.
pub type Observer<'a> = dyn FnMut(usize, &ComplexMatrix) -> Option<Snapshot> + 'a;

/// Runs the engine selected in `cfg`.
pub fn solve(
    x0: &ResourceGrid,
    q: &MitigationWeights,
    cfg: &SolverConfig,
    observer: Option<&mut Observer<'_>>,
) -> Result<SolveOutput> {
    match cfg.engine {
        Engine::Topadmm => engines::run(engines::Kind::Topadmm, x0, q, cfg, observer),
        Engine::Badmm => engines::run(engines::Kind::Badmm, x0, q, cfg, observer),
        Engine::Dys => engines::run(engines::Kind::Dys, x0, q, cfg, observer),
        Engine::Icf => icf::run_traced(x0, cfg, observer),
    }
}
