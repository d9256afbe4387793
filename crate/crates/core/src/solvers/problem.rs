use std::sync::Arc;

use super::{RadiusSource, SetMode, SolverConfig};
use crate::channel::MitigationWeights;
use crate::error::{Error, Result};
use crate::numerics::{ComplexMatrix, UnitaryFft, C64};
use crate::prox::{
    aclr_radii, grad_h_into, papr_radii, proj_aclr_in_place, proj_papr_in_place, AclrSetSpec,
    PaprSetSpec,
};
use crate::waveform::{ResourceGrid, SubcarrierLayout};

/// Iterates beyond this multiple of `||x0||` abort the run.
pub(crate) const DIVERGENCE_FACTOR: f64 = 1e6;

/// Shared pieces of every engine: anchor, weights, sets and scratch space.
pub(crate) struct Problem<'a> {
    pub x0: &'a ResourceGrid,
    pub q: &'a MitigationWeights,
    pub cfg: &'a SolverConfig,
    pub layout: Arc<SubcarrierLayout>,
    pub x0_norm: f64,
    pub papr: PaprSetSpec,
    pub aclr: AclrSetSpec,
    fft: UnitaryFft,
    buf: Vec<C64>,
    gamma: Vec<f64>,
    psi: Vec<f64>,
}

impl<'a> Problem<'a> {
    pub fn new(x0: &'a ResourceGrid, q: &'a MitigationWeights, cfg: &'a SolverConfig) -> Result<Self> {
        cfg.validate()?;
        if q.n_active() != x0.layout().n_active() || q.n_tx() != x0.n_tx() {
            return Err(Error::Sizing(format!(
                "weights for {} antennas on {} subcarriers do not fit a grid with {} antennas and {} active bins",
                q.n_tx(),
                q.n_active(),
                x0.n_tx(),
                x0.layout().n_active()
            )));
        }
        if !x0.data().is_finite() {
            return Err(Error::Validation("initial grid has non-finite entries".into()));
        }
        let gamma = vec![cfg.gamma_par_db; x0.n_tx()];
        let psi = vec![cfg.psi_aclr_db; x0.n_tx()];
        let layout = x0.layout().clone();
        Ok(Self {
            x0,
            q,
            cfg,
            x0_norm: x0.data().frobenius_norm(),
            papr: papr_radii(x0.data(), &gamma)?,
            aclr: aclr_radii(x0.data(), &layout, &psi)?,
            fft: UnitaryFft::new(x0.total_bins())?,
            buf: vec![C64::default(); x0.total_bins()],
            layout,
            gamma,
            psi,
        })
    }

    /// Recomputes radii from the current iterates in P3 mode; no-op in P4.
    pub fn refresh_radii(&mut self, xbar: &ComplexMatrix, zbar: &ComplexMatrix) -> Result<()> {
        if self.cfg.mode == SetMode::P4 {
            return Ok(());
        }
        let papr_ref = match self.cfg.radius_source {
            RadiusSource::Split => zbar,
            RadiusSource::Xbar => xbar,
        };
        self.papr = papr_radii(papr_ref, &self.gamma)?;
        self.aclr = aclr_radii(xbar, &self.layout, &self.psi)?;
        Ok(())
    }

    pub fn proj_u(&self, m: &mut ComplexMatrix) {
        proj_aclr_in_place(m, &self.layout, &self.aclr.radius);
    }

    pub fn proj_p(&mut self, m: &mut ComplexMatrix) {
        proj_papr_in_place(m, &self.papr.radius, &self.fft, &mut self.buf);
    }

    pub fn grad(&self, at: &ComplexMatrix, out: &mut ComplexMatrix) {
        grad_h_into(at, self.x0.data(), &self.layout, self.q, self.cfg.zeta, out);
    }

    pub fn zeros(&self) -> ComplexMatrix {
        ComplexMatrix::zeros(self.x0.n_tx(), self.x0.total_bins())
    }

    pub fn grid(&self, m: ComplexMatrix) -> ResourceGrid {
        ResourceGrid::new(self.layout.clone(), m).expect("iterates keep the grid shape")
    }

    pub fn check_divergence(&self, iter: usize, primal: f64, dual: f64) -> Result<()> {
        let limit = DIVERGENCE_FACTOR * self.x0_norm.max(f64::MIN_POSITIVE);
        let worst = primal.max(dual);
        if !worst.is_finite() || worst > limit {
            return Err(Error::Divergence {
                iter,
                residual: worst,
                limit,
            });
        }
        Ok(())
    }

    pub fn converged(&self, primal: f64, dual: f64) -> bool {
        let tol = self.cfg.stop_tol * self.x0_norm;
        self.cfg.early_stop && primal < tol && dual < tol
    }
}

/// `||a - b||_F` over raw slices.
pub(crate) fn dist(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    a.as_slice()
        .iter()
        .zip(b.as_slice())
        .map(|(x, y)| (x - y).norm_sqr())
        .sum::<f64>()
        .sqrt()
}
