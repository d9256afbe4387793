use serde::{Deserialize, Serialize};

use super::{ResourceGrid, TimeSignal};
use crate::channel::ChannelRealization;
use crate::error::{Error, Result};
use crate::numerics::{linear_to_db, C64};

/// Floor applied to ACLR and spectra so logarithms stay finite.
pub const DB_FLOOR: f64 = -200.0;

/// Percentile at which instantaneous PAPR is reported.
pub const IPAPR_PERCENTILE: f64 = 99.99;

/// Peak and mean power of one antenna's samples.
fn peak_and_mean(samples: &[C64]) -> (f64, f64) {
    let mut peak = 0.0_f64;
    let mut total = 0.0;
    for z in samples {
        let p = z.norm_sqr();
        peak = peak.max(p);
        total += p;
    }
    (peak, total / samples.len() as f64)
}

/// PAPR of a sample vector in dB: peak power over mean power.
pub fn papr_db_of(samples: &[C64]) -> Result<f64> {
    let (peak, mean) = peak_and_mean(samples);
    if mean == 0.0 {
        return Err(Error::UndefinedMetric {
            metric: "papr",
            index: 0,
        });
    }
    Ok(linear_to_db(peak / mean))
}

pub fn papr_db(sig: &TimeSignal, antenna: usize) -> Result<f64> {
    sig.check_antenna(antenna)?;
    papr_db_of(&sig.antenna(antenna)).map_err(|_| Error::UndefinedMetric {
        metric: "papr",
        index: antenna,
    })
}

/// Per-sample instantaneous power over mean power, in dB.
pub fn ipapr_samples(sig: &TimeSignal, antenna: usize) -> Result<Vec<f64>> {
    sig.check_antenna(antenna)?;
    let samples = sig.antenna(antenna);
    let (_, mean) = peak_and_mean(&samples);
    if mean == 0.0 {
        return Err(Error::UndefinedMetric {
            metric: "ipapr",
            index: antenna,
        });
    }
    Ok(samples
        .iter()
        .map(|z| linear_to_db(z.norm_sqr() / mean))
        .collect())
}

/// Empirical quantile by sorting, `p` in percent; nearest-rank definition.
pub fn percentile(values: &[f64], p: f64) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::Parameter("percentile of an empty sequence".into()));
    }
    if !(0.0..=100.0).contains(&p) {
        return Err(Error::Parameter(format!("percentile {p} outside [0, 100]")));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    // the epsilon keeps exact ranks like 99.99% of 10^4 from rounding up
    let rank = ((p / 100.0) * sorted.len() as f64 - 1e-9).ceil() as usize;
    Ok(sorted[rank.clamp(1, sorted.len()) - 1])
}

/// Per-subcarrier EVM over the active set plus the energy-weighted wideband value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvmProfile {
    pub per_subcarrier: Vec<f64>,
    pub wideband: f64,
}

impl EvmProfile {
    fn from_parts(num_sqr: &[f64], den_sqr: &[f64]) -> Self {
        let per_subcarrier = num_sqr
            .iter()
            .zip(den_sqr)
            .map(|(n, d)| (n / d).sqrt())
            .collect();
        let wideband = (num_sqr.iter().sum::<f64>() / den_sqr.iter().sum::<f64>()).sqrt();
        Self {
            per_subcarrier,
            wideband,
        }
    }
}

fn check_pair(xbar: &ResourceGrid, x: &ResourceGrid) -> Result<()> {
    if xbar.data().shape() != x.data().shape() || !xbar.same_layout(x) {
        return Err(Error::Sizing(
            "EVM needs grids of identical shape and active set".into(),
        ));
    }
    Ok(())
}

/// Unequalised transmit EVM, `||xbar[:,k] - x[:,k]|| / ||x[:,k]||` for active `k`.
pub fn tx_evm(xbar: &ResourceGrid, x: &ResourceGrid) -> Result<EvmProfile> {
    check_pair(xbar, x)?;
    let n_active = x.layout().n_active();
    let mut num = vec![0.0; n_active];
    let mut den = vec![0.0; n_active];
    for j in 0..x.n_tx() {
        let a = xbar.data().row(j);
        let b = x.data().row(j);
        for (i, &k) in x.layout().active().iter().enumerate() {
            num[i] += (a[k] - b[k]).norm_sqr();
            den[i] += b[k].norm_sqr();
        }
    }
    if let Some(i) = den.iter().position(|d| *d == 0.0) {
        return Err(Error::UndefinedMetric {
            metric: "tx_evm",
            index: i,
        });
    }
    Ok(EvmProfile::from_parts(&num, &den))
}

/// EVM seen through the channel before equalisation:
/// `||H[k] (xbar - x)[:,k]|| / ||H[k] x[:,k]||`.
pub fn predicted_evm(
    h: &ChannelRealization,
    xbar: &ResourceGrid,
    x: &ResourceGrid,
) -> Result<EvmProfile> {
    check_pair(xbar, x)?;
    let active = x.layout().active();
    if h.n_active() != active.len() || h.n_tx() != x.n_tx() {
        return Err(Error::Sizing(format!(
            "channel {}x{} over {} subcarriers does not match grid with {} antennas and {} active bins",
            h.n_rx(),
            h.n_tx(),
            h.n_active(),
            x.n_tx(),
            active.len()
        )));
    }
    let mut num = Vec::with_capacity(active.len());
    let mut den = Vec::with_capacity(active.len());
    for (i, &k) in active.iter().enumerate() {
        let xk = x.data().column(k);
        let dk: Vec<C64> = xbar
            .data()
            .column(k)
            .iter()
            .zip(&xk)
            .map(|(a, b)| a - b)
            .collect();
        let hk = h.matrix(i);
        let n: f64 = hk.matvec(&dk)?.iter().map(|z| z.norm_sqr()).sum();
        let d: f64 = hk.matvec(&xk)?.iter().map(|z| z.norm_sqr()).sum();
        if d == 0.0 {
            return Err(Error::UndefinedMetric {
                metric: "predicted_evm",
                index: i,
            });
        }
        num.push(n);
        den.push(d);
    }
    Ok(EvmProfile::from_parts(&num, &den))
}

/// Guard-to-active energy ratio of one antenna, in dB, floored at -200 dB.
pub fn aclr_db(grid: &ResourceGrid, antenna: usize) -> Result<f64> {
    if antenna >= grid.n_tx() {
        return Err(Error::Parameter(format!(
            "antenna {antenna} out of range for {} antennas",
            grid.n_tx()
        )));
    }
    let active = grid.active_energy(antenna);
    if active == 0.0 {
        return Err(Error::UndefinedMetric {
            metric: "aclr",
            index: antenna,
        });
    }
    let guard = grid.guard_energy(antenna);
    if guard == 0.0 {
        return Ok(DB_FLOOR);
    }
    Ok(linear_to_db(guard / active).max(DB_FLOOR))
}
