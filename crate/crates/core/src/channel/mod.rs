//! Tapped-delay-line fading channels, spatial correlation, CSI impairments
//! and the EVM-mitigation weights derived from estimated channels.

mod estimation;
mod spatial;
mod tdl;
mod weights;

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::ComplexMatrix;

pub use estimation::{add_estimation_error, error_variance_from_snr_db, prg_average};
pub use spatial::{apply_spatial_correlation, exp_correlation_matrix};
pub use tdl::{generate_channel, TdlProfile, DEFAULT_SUBCARRIER_SPACING_HZ};
pub use weights::{build_q, MitigationWeights};

/// Provenance of a realization, carried along through every transform.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelMetadata {
    pub profile: String,
    pub delay_spread_s: f64,
    pub k_factor: f64,
    pub seed: u64,
    pub stream_id: u64,
}

impl Default for ChannelMetadata {
    fn default() -> Self {
        Self {
            profile: "custom".into(),
            delay_spread_s: 0.0,
            k_factor: 0.0,
            seed: 0,
            stream_id: 0,
        }
    }
}

/// One `n_rx x n_tx` matrix per active subcarrier, in active-set order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ChannelDump", into = "ChannelDump")]
pub struct ChannelRealization {
    n_rx: usize,
    n_tx: usize,
    matrices: Vec<ComplexMatrix>,
    metadata: ChannelMetadata,
}

impl ChannelRealization {
    pub fn new(matrices: Vec<ComplexMatrix>, metadata: ChannelMetadata) -> Result<Self> {
        let first = matrices
            .first()
            .ok_or_else(|| Error::Sizing("channel needs at least one subcarrier".into()))?;
        let (n_rx, n_tx) = first.shape();
        if n_rx == 0 || n_tx == 0 {
            return Err(Error::Sizing("channel matrices must be nonempty".into()));
        }
        for (i, m) in matrices.iter().enumerate() {
            if m.shape() != (n_rx, n_tx) {
                return Err(Error::Sizing(format!(
                    "subcarrier {i} has shape {:?}, expected ({n_rx}, {n_tx})",
                    m.shape()
                )));
            }
            if !m.is_finite() {
                return Err(Error::Validation(format!(
                    "subcarrier {i} has non-finite entries"
                )));
            }
        }
        Ok(Self {
            n_rx,
            n_tx,
            matrices,
            metadata,
        })
    }

    /// The same matrix on every subcarrier.
    pub fn flat(h: ComplexMatrix, n_active: usize) -> Result<Self> {
        Self::new(vec![h; n_active], ChannelMetadata::default())
    }

    pub fn n_rx(&self) -> usize {
        self.n_rx
    }

    pub fn n_tx(&self) -> usize {
        self.n_tx
    }

    pub fn n_active(&self) -> usize {
        self.matrices.len()
    }

    pub fn matrix(&self, i: usize) -> &ComplexMatrix {
        &self.matrices[i]
    }

    pub fn matrices(&self) -> &[ComplexMatrix] {
        &self.matrices
    }

    pub fn metadata(&self) -> &ChannelMetadata {
        &self.metadata
    }

    /// Applies `f` to every subcarrier matrix, keeping the metadata.
    pub(crate) fn try_map(
        &self,
        mut f: impl FnMut(usize, &ComplexMatrix) -> Result<ComplexMatrix>,
    ) -> Result<Self> {
        let matrices = self
            .matrices
            .iter()
            .enumerate()
            .map(|(i, m)| f(i, m))
            .collect::<Result<Vec<_>>>()?;
        Self::new(matrices, self.metadata.clone())
    }

    /// Mean squared magnitude over all entries and subcarriers.
    pub fn mean_entry_power(&self) -> f64 {
        let total: f64 = self.matrices.iter().map(|m| m.frobenius_norm_sqr()).sum();
        total / (self.matrices.len() * self.n_rx * self.n_tx) as f64
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Validation(e.to_string()))
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Validation(format!("bad channel dump: {e}")))
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()?).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let s = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&s)
    }
}

/// On-disk form: subcarriers keyed by their position in the active set.
#[derive(Serialize, Deserialize)]
struct ChannelDump {
    n_rx: usize,
    n_tx: usize,
    metadata: ChannelMetadata,
    subcarriers: Vec<SubcarrierEntry>,
}

#[derive(Serialize, Deserialize)]
struct SubcarrierEntry {
    k: usize,
    h: ComplexMatrix,
}

impl From<ChannelRealization> for ChannelDump {
    fn from(c: ChannelRealization) -> Self {
        Self {
            n_rx: c.n_rx,
            n_tx: c.n_tx,
            metadata: c.metadata,
            subcarriers: c
                .matrices
                .into_iter()
                .enumerate()
                .map(|(k, h)| SubcarrierEntry { k, h })
                .collect(),
        }
    }
}

impl TryFrom<ChannelDump> for ChannelRealization {
    type Error = Error;

    fn try_from(mut d: ChannelDump) -> Result<Self> {
        d.subcarriers.sort_by_key(|e| e.k);
        for (i, e) in d.subcarriers.iter().enumerate() {
            if e.k != i {
                return Err(Error::Validation(format!("subcarrier {i} missing from dump")));
            }
        }
        let c = Self::new(
            d.subcarriers.into_iter().map(|e| e.h).collect(),
            d.metadata,
        )?;
        if (c.n_rx, c.n_tx) != (d.n_rx, d.n_tx) {
            return Err(Error::Validation("dump header disagrees with matrices".into()));
        }
        Ok(c)
    }
}
