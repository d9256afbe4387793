use std::path::Path;

use serde::{Deserialize, Serialize};

use super::problem::dist;
use super::{Engine, ResidualTrace, SetMode, SolverConfig, SolverState, RadiusSource};
use crate::channel::MitigationWeights;
use crate::error::{Error, Result};
use crate::numerics::ComplexMatrix;
use crate::prox::{
    aclr_radii, grad_h_into, papr_radii, proj_aclr_in_place, proj_papr_in_place,
};
use crate::numerics::{UnitaryFft, C64};
use crate::waveform::{aclr_db, papr_db, to_time, ResourceGrid};

/// `(||X - Z||, ||X - X_prev||)` between two states.
pub fn residuals(prev: &SolverState, cur: &SolverState) -> (f64, f64) {
    (
        dist(cur.xbar.data(), cur.zbar.data()),
        dist(cur.xbar.data(), prev.xbar.data()),
    )
}

/// First-order optimality diagnostics of a finished run, all normalised by
/// `||x0||`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KktReport {
    pub primal_gap: f64,
    /// `||X - P_U(X - G)||` for the engine's multiplier estimate `G`.
    pub stationarity_aclr: f64,
    /// `||Z - P_P(Z - grad h(Z) + G)||`.
    pub stationarity_papr: f64,
    /// PAPR of `Z` minus the target, per antenna (dB).
    pub papr_slack_db: Vec<f64>,
    /// ACLR of `X` minus the target, per antenna (dB).
    pub aclr_slack_db: Vec<f64>,
}

/// Multiplier of the ACLR block implied by each engine's dual variable.
fn multiplier(state: &SolverState, g: &ComplexMatrix, cfg: &SolverConfig) -> ComplexMatrix {
    let lam = state.lambda.data();
    match cfg.engine {
        Engine::Topadmm => lam.scale_real(1.0 / cfg.tau),
        Engine::Badmm => g.add(lam).expect("same shape").scale_real(0.5),
        Engine::Dys => state.xbar.data().sub(lam).expect("same shape").scale_real(1.0 / cfg.tau),
        Engine::Icf => ComplexMatrix::zeros(lam.rows(), lam.cols()),
    }
}

pub fn kkt_check(
    state: &SolverState,
    x0: &ResourceGrid,
    q: &MitigationWeights,
    cfg: &SolverConfig,
) -> Result<KktReport> {
    let n = x0.n_tx();
    let layout = x0.layout();
    let norm = x0.data().frobenius_norm();
    if norm == 0.0 {
        return Err(Error::UndefinedMetric {
            metric: "kkt",
            index: 0,
        });
    }
    let gamma = vec![cfg.gamma_par_db; n];
    let psi = vec![cfg.psi_aclr_db; n];
    let (papr_ref, aclr_ref) = match cfg.mode {
        SetMode::P4 => (x0.data(), x0.data()),
        SetMode::P3 => match cfg.radius_source {
            RadiusSource::Split => (state.zbar.data(), state.xbar.data()),
            RadiusSource::Xbar => (state.xbar.data(), state.xbar.data()),
        },
    };
    let papr = papr_radii(papr_ref, &gamma)?;
    let aclr = aclr_radii(aclr_ref, layout, &psi)?;

    let mut gx = ComplexMatrix::zeros(n, x0.total_bins());
    grad_h_into(state.xbar.data(), x0.data(), layout, q, cfg.zeta, &mut gx);
    let mut gz = ComplexMatrix::zeros(n, x0.total_bins());
    grad_h_into(state.zbar.data(), x0.data(), layout, q, cfg.zeta, &mut gz);
    let m = multiplier(state, &gx, cfg);

    let mut pu = state.xbar.data().sub(&m)?;
    proj_aclr_in_place(&mut pu, layout, &aclr.radius);
    let stationarity_aclr = dist(&pu, state.xbar.data()) / norm;

    let mut pp = state.zbar.data().sub(&gz)?.add(&m)?;
    let fft = UnitaryFft::new(x0.total_bins())?;
    let mut buf = vec![C64::default(); x0.total_bins()];
    proj_papr_in_place(&mut pp, &papr.radius, &fft, &mut buf);
    let stationarity_papr = dist(&pp, state.zbar.data()) / norm;

    let tz = to_time(&state.zbar)?;
    let papr_slack_db = (0..n)
        .map(|j| Ok(papr_db(&tz, j)? - cfg.gamma_par_db))
        .collect::<Result<Vec<_>>>()?;
    let aclr_slack_db = (0..n)
        .map(|j| Ok(aclr_db(&state.xbar, j)? - cfg.psi_aclr_db))
        .collect::<Result<Vec<_>>>()?;
    Ok(KktReport {
        primal_gap: dist(state.xbar.data(), state.zbar.data()) / norm,
        stationarity_aclr,
        stationarity_papr,
        papr_slack_db,
        aclr_slack_db,
    })
}

/// `iter,primal,dual,papr_db_max,txevm_wb,predevm_wb,estevm_wb,aclr_db_max`;
/// metric columns are empty on iterations without a snapshot.
pub fn write_trace_csv(path: &Path, trace: &ResidualTrace) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| Error::io(path, e.into()))?;
    write_trace_rows(&mut w, None, trace).map_err(|e| Error::io(path, e.into()))?;
    w.flush().map_err(|e| Error::io(path, e))
}

pub(crate) const TRACE_HEADER: [&str; 8] = [
    "iter",
    "primal",
    "dual",
    "papr_db_max",
    "txevm_wb",
    "predevm_wb",
    "estevm_wb",
    "aclr_db_max",
];

/// Writes trace rows, optionally prefixed by a drop index column.
pub(crate) fn write_trace_rows<W: std::io::Write>(
    w: &mut csv::Writer<W>,
    drop: Option<usize>,
    trace: &ResidualTrace,
) -> std::result::Result<(), csv::Error> {
    let mut snaps = trace.snapshots.iter().peekable();
    if drop.is_none() {
        w.write_record(TRACE_HEADER)?;
    }
    for (i, (p, d)) in trace.primal.iter().zip(&trace.dual).enumerate() {
        let iter = i + 1;
        let mut rec: Vec<String> = Vec::with_capacity(9);
        if let Some(dr) = drop {
            rec.push(dr.to_string());
        }
        rec.push(iter.to_string());
        rec.push(format!("{p:e}"));
        rec.push(format!("{d:e}"));
        match snaps.peek() {
            Some(s) if s.iter == iter => {
                for v in [s.papr_db_max, s.txevm_wb, s.predevm_wb, s.estevm_wb, s.aclr_db_max] {
                    rec.push(format!("{v}"));
                }
                snaps.next();
            }
            _ => rec.extend(std::iter::repeat_n(String::new(), 5)),
        }
        w.write_record(&rec)?;
    }
    Ok(())
}
