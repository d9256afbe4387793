use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{Precoder, SymbolGrid};
use crate::channel::ChannelRealization;
use crate::error::{Error, Result};
use crate::numerics::{hermitian_eigen, solve, ComplexMatrix, C64};
use crate::waveform::ResourceGrid;

/// Relative eigenvalue floor below which the effective channel counts as
/// rank deficient.
const RANK_TOLERANCE: f64 = 1e-12;

/// Zero-forcing estimates plus the subcarriers where ZF was undefined.
#[derive(Debug, Clone, PartialEq)]
pub struct Equalized {
    pub estimates: SymbolGrid,
    /// Active-set positions whose effective channel is rank deficient; their
    /// estimates are zero and they are excluded from EVM.
    pub rank_deficient: Vec<usize>,
}

/// Noiseless reception through the true channel followed by ZF on the
/// effective channel `H[k] W[k]`.
pub fn equalize(h_true: &ChannelRealization, w: &Precoder, xbar: &ResourceGrid) -> Result<Equalized> {
    let active = xbar.layout().active();
    if h_true.n_active() != active.len()
        || w.n_active() != active.len()
        || h_true.n_tx() != xbar.n_tx()
        || w.n_tx() != xbar.n_tx()
    {
        return Err(Error::Sizing(
            "channel, precoder and grid disagree on antennas or subcarriers".into(),
        ));
    }
    let n_layers = w.n_layers();
    let cols = active
        .par_iter()
        .enumerate()
        .map(|(i, &k)| {
            let h = h_true.matrix(i);
            let h_eff = h.matmul(w.matrix(i))?;
            let gram = h_eff.adjoint().matmul(&h_eff)?;
            let (vals, _) = hermitian_eigen(&gram)?;
            let top = vals.last().copied().unwrap_or(0.0);
            if top <= 0.0 || vals[0] <= RANK_TOLERANCE * top {
                return Ok(None);
            }
            let y = h.matvec(&xbar.data().column(k))?;
            let rhs = ComplexMatrix::from_vec(y.len(), 1, y)?;
            let z = h_eff.adjoint().matmul(&rhs)?;
            Ok(Some(solve(&gram, &z)?.into_vec()))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut est = ComplexMatrix::zeros(n_layers, active.len());
    let mut rank_deficient = Vec::new();
    for (i, c) in cols.into_iter().enumerate() {
        match c {
            Some(v) => est.set_column(i, &v),
            None => rank_deficient.push(i),
        }
    }
    Ok(Equalized {
        estimates: SymbolGrid::new(est, 0),
        rank_deficient,
    })
}

/// Estimated received EVM per layer and subcarrier with RMS aggregates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimatedEvm {
    /// `per_layer[l][i] = |s_hat - s| / |s|`; NaN where excluded.
    pub per_layer: Vec<Vec<f64>>,
    pub wideband_per_layer: Vec<f64>,
    pub wideband: f64,
    /// Entries left out of the aggregates (zero reference or flagged subcarrier).
    pub excluded: usize,
}

impl EstimatedEvm {
    /// Per-subcarrier value aggregated over layers (RMS over included layers).
    pub fn per_subcarrier(&self) -> Vec<f64> {
        let n = self.per_layer.first().map_or(0, Vec::len);
        (0..n)
            .map(|i| {
                let vals: Vec<f64> = self
                    .per_layer
                    .iter()
                    .map(|l| l[i])
                    .filter(|v| v.is_finite())
                    .collect();
                if vals.is_empty() {
                    f64::NAN
                } else {
                    (vals.iter().map(|v| v * v).sum::<f64>() / vals.len() as f64).sqrt()
                }
            })
            .collect()
    }
}

/// `|s_hat - s| / |s|` entrywise; wideband values are
/// `sqrt(sum |s_hat - s|^2 / sum |s|^2)` over included entries.
pub fn estimated_evm(s_hat: &SymbolGrid, s: &SymbolGrid, skip: &[usize]) -> Result<EstimatedEvm> {
    if s_hat.data().shape() != s.data().shape() {
        return Err(Error::Sizing("estimate and reference symbol grids differ in shape".into()));
    }
    let mut excluded = 0;
    let mut num_all = 0.0;
    let mut den_all = 0.0;
    let mut per_layer = Vec::with_capacity(s.n_layers());
    let mut wideband_per_layer = Vec::with_capacity(s.n_layers());
    for l in 0..s.n_layers() {
        let (a, b) = (s_hat.data().row(l), s.data().row(l));
        let mut row = Vec::with_capacity(s.n_active());
        let (mut num, mut den) = (0.0, 0.0);
        for i in 0..s.n_active() {
            let ref_p = b[i].norm_sqr();
            if ref_p == 0.0 || skip.contains(&i) {
                excluded += 1;
                row.push(f64::NAN);
                continue;
            }
            let e = (a[i] - b[i]).norm_sqr();
            row.push((e / ref_p).sqrt());
            num += e;
            den += ref_p;
        }
        wideband_per_layer.push(if den > 0.0 { (num / den).sqrt() } else { f64::NAN });
        num_all += num;
        den_all += den;
        per_layer.push(row);
    }
    if den_all == 0.0 {
        return Err(Error::UndefinedMetric {
            metric: "estimated_evm",
            index: 0,
        });
    }
    Ok(EstimatedEvm {
        per_layer,
        wideband_per_layer,
        wideband: (num_all / den_all).sqrt(),
        excluded,
    })
}

/// Constellation scatter: `layer,k,re_hat,im_hat,re_ref,im_ref`.
pub fn write_scatter_csv(path: &Path, s_hat: &SymbolGrid, s: &SymbolGrid) -> Result<()> {
    if s_hat.data().shape() != s.data().shape() {
        return Err(Error::Sizing("estimate and reference symbol grids differ in shape".into()));
    }
    let mut w = csv::Writer::from_path(path).map_err(|e| Error::io(path, e.into()))?;
    let io = |e: csv::Error| Error::io(path, e.into());
    w.write_record(["layer", "k", "re_hat", "im_hat", "re_ref", "im_ref"])
        .map_err(io)?;
    for l in 0..s.n_layers() {
        for i in 0..s.n_active() {
            let (a, b): (C64, C64) = (s_hat.data()[(l, i)], s.data()[(l, i)]);
            w.serialize((l, i, a.re, a.im, b.re, b.im)).map_err(io)?;
        }
    }
    w.flush().map_err(|e| Error::io(path, e))
}
