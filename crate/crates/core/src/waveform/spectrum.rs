use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::metrics::DB_FLOOR;
use super::TimeSignal;
use crate::error::{Error, Result};
use crate::numerics::{linear_to_db, ComplexMatrix, UnitaryFft, C64};

/// Averaged periodogram over non-overlapping segments, in dB per bin.
///
/// Bins are in FFT order. Linear values sum to the mean sample power of the
/// antenna, so a flat spectrum sits at `mean_power / segment_len`.
pub fn psd(sig: &TimeSignal, segment_len: usize, antenna: usize) -> Result<Vec<f64>> {
    sig.check_antenna(antenna)?;
    if segment_len > sig.len() {
        return Err(Error::Sizing(format!(
            "segment of {segment_len} samples exceeds the {}-sample signal",
            sig.len()
        )));
    }
    let fft = UnitaryFft::new(segment_len)?;
    let samples = sig.antenna(antenna);
    let n_segments = samples.len() / segment_len;
    let mut acc = vec![0.0; segment_len];
    let mut buf = vec![C64::default(); segment_len];
    for seg in samples.chunks_exact(segment_len).take(n_segments) {
        buf.copy_from_slice(seg);
        fft.forward(&mut buf);
        for (a, z) in acc.iter_mut().zip(&buf) {
            *a += z.norm_sqr();
        }
    }
    let norm = 1.0 / (n_segments * segment_len) as f64;
    Ok(acc
        .into_iter()
        .map(|p| {
            let lin = p * norm;
            if lin > 0.0 {
                linear_to_db(lin).max(DB_FLOOR)
            } else {
                DB_FLOOR
            }
        })
        .collect())
}

/// Tapers both symbol edges with half-cosine ramps of `rolloff_samples`.
///
/// The leading ramp starts at exactly zero; samples outside the ramps are
/// untouched. Applied to every antenna.
pub fn raised_cosine_window(sig: &TimeSignal, rolloff_samples: usize) -> Result<TimeSignal> {
    let n = sig.len();
    if rolloff_samples * 4 >= n && rolloff_samples > 0 {
        return Err(Error::Parameter(format!(
            "rolloff of {rolloff_samples} samples must be below a quarter of {n}"
        )));
    }
    let mut out: ComplexMatrix = sig.samples().clone();
    for i in 0..rolloff_samples {
        let w = 0.5 * (1.0 - (PI * i as f64 / rolloff_samples as f64).cos());
        for j in 0..sig.n_tx() {
            out[(i, j)] *= w;
            out[(n - 1 - i, j)] *= w;
        }
    }
    Ok(TimeSignal::new(out))
}

/// Default windowing edge: 10% of a cyclic prefix of `cp_len` samples.
pub fn default_rolloff(cp_len: usize) -> usize {
    cp_len / 10
}

/// Threshold resolution of [`ccdf`], in dB.
pub const CCDF_STEP_DB: f64 = 0.01;

/// Empirical complementary CDF, `P(value > threshold)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CcdfCurve {
    pub thresholds_db: Vec<f64>,
    pub exceed_prob: Vec<f64>,
}

impl CcdfCurve {
    /// Smallest threshold whose exceedance probability is at most `prob`.
    pub fn threshold_at(&self, prob: f64) -> f64 {
        self.thresholds_db
            .iter()
            .zip(&self.exceed_prob)
            .find(|(_, p)| **p <= prob)
            .map(|(t, _)| *t)
            .unwrap_or_else(|| *self.thresholds_db.last().expect("nonempty curve"))
    }
}

/// CCDF over a uniform 0.01 dB sweep from one step below the minimum up to
/// the maximum value.
pub fn ccdf(values_db: &[f64]) -> Result<CcdfCurve> {
    if values_db.is_empty() {
        return Err(Error::Parameter("ccdf of an empty sequence".into()));
    }
    if values_db.iter().any(|v| !v.is_finite()) {
        return Err(Error::Parameter("ccdf input contains non-finite values".into()));
    }
    let mut sorted = values_db.to_vec();
    sorted.sort_by(f64::total_cmp);
    let lo = sorted[0] - CCDF_STEP_DB;
    let hi = *sorted.last().unwrap();
    let steps = ((hi - lo) / CCDF_STEP_DB).ceil() as usize;
    let n = sorted.len() as f64;
    let mut thresholds_db = Vec::with_capacity(steps + 1);
    let mut exceed_prob = Vec::with_capacity(steps + 1);
    for i in 0..=steps {
        let t = lo + i as f64 * CCDF_STEP_DB;
        let at_or_below = sorted.partition_point(|v| *v <= t);
        thresholds_db.push(t);
        exceed_prob.push((sorted.len() - at_or_below) as f64 / n);
    }
    Ok(CcdfCurve {
        thresholds_db,
        exceed_prob,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{complex_gaussian, RngStream};
    use crate::waveform::percentile;

    #[test]
    fn psd_single_tone_dominates() {
        let n = 4096;
        let tone: Vec<C64> = (0..n)
            .map(|i| C64::from_polar(1.0, 2.0 * PI * 37.0 * i as f64 / 256.0))
            .collect();
        let p = psd(&TimeSignal::from_antenna(tone), 256, 0).unwrap();
        let mut sorted = p.clone();
        sorted.sort_by(f64::total_cmp);
        let median = sorted[sorted.len() / 2];
        assert!(p[37] - median >= 40.0);
        let total: f64 = p.iter().map(|d| 10f64.powf(d / 10.0)).sum();
        assert!((total - 1.0).abs() < 0.01);
    }

    #[test]
    fn psd_white_noise_is_flat() {
        let seg = 16;
        let mut rng = RngStream::new(77, 0);
        let x = complex_gaussian(&mut rng, seg * 10_000, 2.0).unwrap();
        let p = psd(&TimeSignal::from_antenna(x), seg, 0).unwrap();
        let max = p.iter().cloned().fold(f64::MIN, f64::max);
        let min = p.iter().cloned().fold(f64::MAX, f64::min);
        assert!(max - min < 3.0);
        let total: f64 = p.iter().map(|d| 10f64.powf(d / 10.0)).sum();
        assert!((total - 2.0).abs() / 2.0 < 0.01);
    }

    #[test]
    fn psd_zero_and_sizing() {
        let z = TimeSignal::from_antenna(vec![C64::default(); 64]);
        assert!(psd(&z, 16, 0).unwrap().iter().all(|v| *v == DB_FLOOR));
        assert!(matches!(psd(&z, 128, 0), Err(Error::Sizing(_))));
        assert!(matches!(psd(&z, 24, 0), Err(Error::Sizing(_))));
    }

    #[test]
    fn window_endpoints_and_interior() {
        let x: Vec<C64> = (0..64).map(|i| C64::new(1.0 + i as f64, 0.5)).collect();
        let sig = TimeSignal::from_antenna(x.clone());
        assert_eq!(raised_cosine_window(&sig, 0).unwrap(), sig);
        let w = raised_cosine_window(&sig, 8).unwrap().antenna(0);
        assert_eq!(w[0], C64::default());
        assert_eq!(w[63], C64::default());
        for i in 8..56 {
            assert_eq!(w[i], x[i]);
        }
        assert!(w[4].norm() < x[4].norm());
        assert!(matches!(
            raised_cosine_window(&sig, 16),
            Err(Error::Parameter(_))
        ));
        assert_eq!(default_rolloff(72), 7);
    }

    #[test]
    fn ccdf_constant_input() {
        let c = ccdf(&[3.0; 10]).unwrap();
        for (t, p) in c.thresholds_db.iter().zip(&c.exceed_prob) {
            if *t < 3.0 {
                assert_eq!(*p, 1.0);
            } else {
                assert_eq!(*p, 0.0);
            }
        }
        assert!(c.exceed_prob.contains(&1.0) && c.exceed_prob.contains(&0.0));
        assert!(ccdf(&[]).is_err());
    }

    #[test]
    fn ccdf_monotone_and_quantile() {
        let mut rng = RngStream::new(8, 2);
        let v: Vec<f64> = (0..50_000).map(|_| rng.standard_normal() * 2.0).collect();
        let c = ccdf(&v).unwrap();
        assert!(c.exceed_prob.windows(2).all(|w| w[1] <= w[0]));
        assert!(c.exceed_prob[0] <= 1.0 && *c.exceed_prob.last().unwrap() >= 0.0);
        let q = percentile(&v, 99.99).unwrap();
        let t = c.threshold_at(1e-4);
        assert!((t - q).abs() <= CCDF_STEP_DB + 1e-12, "{t} vs {q}");
    }
}
