use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::{ChannelMetadata, ChannelRealization};
use crate::error::{Error, Result};
use crate::numerics::{complex_gaussian, ComplexMatrix, RngStream, C64};

pub const DEFAULT_SUBCARRIER_SPACING_HZ: f64 = 15e3;

/// Decay of the exponential profile from first to last tap.
const PROFILE_SPAN_DB: f64 = 20.0;

/// Tapped delay line with an optional Ricean tap.
///
/// Powers are normalised to sum to one (0 dB) on construction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TdlProfile {
    pub name: String,
    pub tap_delays_s: Vec<f64>,
    pub tap_powers_db: Vec<f64>,
    pub los_tap: Option<usize>,
    /// Linear Ricean K-factor of `los_tap`; infinity means a pure LOS tap.
    pub k_factor: f64,
    /// Departure/arrival angles that fix the LOS phase across antennas.
    pub los_aod_rad: f64,
    pub los_aoa_rad: f64,
    pub subcarrier_spacing_hz: f64,
}

impl TdlProfile {
    pub fn new(
        name: impl Into<String>,
        tap_delays_s: Vec<f64>,
        tap_powers_db: Vec<f64>,
        los_tap: Option<usize>,
        k_factor: f64,
    ) -> Result<Self> {
        if tap_delays_s.is_empty() || tap_delays_s.len() != tap_powers_db.len() {
            return Err(Error::Parameter(
                "profile needs matching, nonempty delay and power lists".into(),
            ));
        }
        if tap_delays_s[0] < 0.0 || tap_delays_s.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Parameter(
                "tap delays must be nonnegative and increasing".into(),
            ));
        }
        if tap_powers_db.iter().any(|p| !p.is_finite()) {
            return Err(Error::Parameter("tap powers must be finite".into()));
        }
        if let Some(l) = los_tap {
            if l >= tap_delays_s.len() {
                return Err(Error::Parameter(format!("LOS tap {l} out of range")));
            }
        }
        if !(k_factor >= 0.0) {
            return Err(Error::Parameter(format!("K-factor must be >= 0, got {k_factor}")));
        }
        let total: f64 = tap_powers_db.iter().map(|p| 10f64.powf(p / 10.0)).sum();
        let offset = 10.0 * total.log10();
        Ok(Self {
            name: name.into(),
            tap_delays_s,
            tap_powers_db: tap_powers_db.iter().map(|p| p - offset).collect(),
            los_tap,
            k_factor,
            los_aod_rad: 0.3,
            los_aoa_rad: 0.5,
            subcarrier_spacing_hz: DEFAULT_SUBCARRIER_SPACING_HZ,
        })
    }

    /// Exponentially decaying profile with equally spaced taps, rescaled so
    /// the RMS delay spread is exactly `delay_spread_s`. A zero spread or a
    /// single tap gives a flat channel.
    pub fn exponential(n_taps: usize, delay_spread_s: f64) -> Result<Self> {
        if n_taps == 0 {
            return Err(Error::Parameter("profile needs at least one tap".into()));
        }
        if !(delay_spread_s >= 0.0) {
            return Err(Error::Parameter(format!(
                "delay spread must be >= 0, got {delay_spread_s}"
            )));
        }
        if n_taps == 1 || delay_spread_s == 0.0 {
            return Self::new("exp-flat", vec![0.0], vec![0.0], None, 0.0);
        }
        let step_db = PROFILE_SPAN_DB / (n_taps - 1) as f64;
        let powers: Vec<f64> = (0..n_taps).map(|i| -step_db * i as f64).collect();
        let unit = Self::new("exp", (0..n_taps).map(|i| i as f64).collect(), powers, None, 0.0)?;
        let scale = delay_spread_s / unit.rms_delay_spread();
        Ok(Self {
            tap_delays_s: unit.tap_delays_s.iter().map(|d| d * scale).collect(),
            ..unit
        })
    }

    /// Turns the first tap Ricean with the given linear K-factor.
    pub fn with_los(mut self, k_factor: f64) -> Result<Self> {
        if !(k_factor >= 0.0) {
            return Err(Error::Parameter(format!("K-factor must be >= 0, got {k_factor}")));
        }
        self.los_tap = Some(0);
        self.k_factor = k_factor;
        self.name = format!("{}-los", self.name);
        Ok(self)
    }

    pub fn linear_powers(&self) -> Vec<f64> {
        self.tap_powers_db.iter().map(|p| 10f64.powf(p / 10.0)).collect()
    }

    pub fn rms_delay_spread(&self) -> f64 {
        let p = self.linear_powers();
        let mean: f64 = p.iter().zip(&self.tap_delays_s).map(|(p, d)| p * d).sum();
        let second: f64 = p.iter().zip(&self.tap_delays_s).map(|(p, d)| p * d * d).sum();
        (second - mean * mean).max(0.0).sqrt()
    }
}

/// Draws tap gains and evaluates the frequency response on `n_active`
/// subcarriers centred on DC.
pub fn generate_channel(
    profile: &TdlProfile,
    n_tx: usize,
    n_rx: usize,
    n_active: usize,
    rng: &mut RngStream,
) -> Result<ChannelRealization> {
    if n_tx == 0 || n_rx == 0 || n_active == 0 {
        return Err(Error::Sizing(format!(
            "cannot build a {n_rx}x{n_tx} channel on {n_active} subcarriers"
        )));
    }
    let powers = profile.linear_powers();
    let n = n_rx * n_tx;
    let mut taps = Vec::with_capacity(powers.len());
    for (l, p) in powers.iter().enumerate() {
        let scatter = complex_gaussian(rng, n, 1.0)?;
        let gains: Vec<C64> = if profile.los_tap == Some(l) {
            let kf = profile.k_factor;
            let (w_los, w_nlos) = if kf.is_infinite() {
                (1.0, 0.0)
            } else {
                ((kf / (kf + 1.0)).sqrt(), (1.0 / (kf + 1.0)).sqrt())
            };
            (0..n)
                .map(|e| {
                    let (r, t) = (e / n_tx, e % n_tx);
                    let phase = PI
                        * (t as f64 * profile.los_aod_rad.sin()
                            - r as f64 * profile.los_aoa_rad.sin());
                    (C64::from_polar(w_los, phase) + scatter[e] * w_nlos) * p.sqrt()
                })
                .collect()
        } else {
            scatter.iter().map(|g| g * p.sqrt()).collect()
        };
        taps.push(gains);
    }
    let half = (n_active / 2) as f64;
    let matrices = (0..n_active)
        .map(|i| {
            let f = (i as f64 - half) * profile.subcarrier_spacing_hz;
            let rot: Vec<C64> = profile
                .tap_delays_s
                .iter()
                .map(|d| C64::from_polar(1.0, -2.0 * PI * f * d))
                .collect();
            let data = (0..n)
                .map(|e| taps.iter().zip(&rot).map(|(g, r)| g[e] * r).sum())
                .collect();
            ComplexMatrix::from_vec(n_rx, n_tx, data)
        })
        .collect::<Result<Vec<_>>>()?;
    ChannelRealization::new(
        matrices,
        ChannelMetadata {
            profile: profile.name.clone(),
            delay_spread_s: profile.rms_delay_spread(),
            k_factor: if profile.los_tap.is_some() { profile.k_factor } else { 0.0 },
            seed: rng.seed(),
            stream_id: rng.stream_id(),
        },
    )
}
