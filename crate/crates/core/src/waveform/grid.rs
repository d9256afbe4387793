use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{ComplexMatrix, UnitaryFft, C64};

/// Split of the `total_bins` IDFT inputs into active (data) and guard bins.
///
/// `active` is ordered by logical frequency, lowest first; `guard` is the
/// complement in ascending bin order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubcarrierLayout {
    total_bins: usize,
    active: Vec<usize>,
    guard: Vec<usize>,
    is_active: Vec<bool>,
}

impl SubcarrierLayout {
    /// DC-centred allocation: `n_active` consecutive subcarriers straddling DC
    /// (logical indices `-floor(n/2) ..= n - floor(n/2) - 1`, wrapped into FFT
    /// bin order).
    pub fn centered(total_bins: usize, n_active: usize) -> Result<Self> {
        if n_active == 0 || n_active > total_bins {
            return Err(Error::Sizing(format!(
                "cannot place {n_active} active subcarriers in {total_bins} bins"
            )));
        }
        let half = (n_active / 2) as isize;
        let n = total_bins as isize;
        let active = (0..n_active as isize)
            .map(|i| (i - half).rem_euclid(n) as usize)
            .collect();
        Self::from_active(total_bins, active)
    }

    /// Arbitrary active set, kept in the given order.
    pub fn from_active(total_bins: usize, active: Vec<usize>) -> Result<Self> {
        if total_bins == 0 || active.is_empty() {
            return Err(Error::Sizing("layout needs at least one active bin".into()));
        }
        let mut is_active = vec![false; total_bins];
        for &k in &active {
            if k >= total_bins {
                return Err(Error::Sizing(format!("active bin {k} outside {total_bins} bins")));
            }
            if is_active[k] {
                return Err(Error::Sizing(format!("active bin {k} listed twice")));
            }
            is_active[k] = true;
        }
        let guard = (0..total_bins).filter(|&k| !is_active[k]).collect();
        Ok(Self {
            total_bins,
            active,
            guard,
            is_active,
        })
    }

    pub fn total_bins(&self) -> usize {
        self.total_bins
    }

    pub fn n_active(&self) -> usize {
        self.active.len()
    }

    pub fn active(&self) -> &[usize] {
        &self.active
    }

    pub fn guard(&self) -> &[usize] {
        &self.guard
    }

    pub fn is_active(&self, bin: usize) -> bool {
        self.is_active[bin]
    }
}

/// Frequency-domain transmit matrix: one row per antenna, one column per bin.
#[derive(Debug, Clone, PartialEq)]
pub struct ResourceGrid {
    layout: Arc<SubcarrierLayout>,
    data: ComplexMatrix,
}

impl ResourceGrid {
    pub fn new(layout: Arc<SubcarrierLayout>, data: ComplexMatrix) -> Result<Self> {
        if data.cols() != layout.total_bins() || data.rows() == 0 {
            return Err(Error::Sizing(format!(
                "grid data {}x{} does not match a layout of {} bins",
                data.rows(),
                data.cols(),
                layout.total_bins()
            )));
        }
        Ok(Self { layout, data })
    }

    pub fn zeros(layout: Arc<SubcarrierLayout>, n_tx: usize) -> Self {
        let bins = layout.total_bins();
        Self {
            layout,
            data: ComplexMatrix::zeros(n_tx, bins),
        }
    }

    pub fn n_tx(&self) -> usize {
        self.data.rows()
    }

    pub fn total_bins(&self) -> usize {
        self.layout.total_bins()
    }

    pub fn layout(&self) -> &Arc<SubcarrierLayout> {
        &self.layout
    }

    pub fn data(&self) -> &ComplexMatrix {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut ComplexMatrix {
        &mut self.data
    }

    pub fn into_data(self) -> ComplexMatrix {
        self.data
    }

    /// Same layout, new data.
    pub fn with_data(&self, data: ComplexMatrix) -> Result<Self> {
        Self::new(self.layout.clone(), data)
    }

    pub fn same_layout(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.layout, &other.layout) || self.layout == other.layout
    }

    /// Energy of antenna `j` over active bins.
    pub fn active_energy(&self, j: usize) -> f64 {
        let row = self.data.row(j);
        self.layout.active().iter().map(|&k| row[k].norm_sqr()).sum()
    }

    /// Energy of antenna `j` over guard bins.
    pub fn guard_energy(&self, j: usize) -> f64 {
        let row = self.data.row(j);
        self.layout.guard().iter().map(|&k| row[k].norm_sqr()).sum()
    }
}

/// Time-domain samples, `total_bins x n_tx` (one column per antenna).
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSignal {
    samples: ComplexMatrix,
}

impl TimeSignal {
    pub fn new(samples: ComplexMatrix) -> Self {
        Self { samples }
    }

    /// Single-antenna signal from a sample vector.
    pub fn from_antenna(samples: Vec<C64>) -> Self {
        let n = samples.len();
        Self {
            samples: ComplexMatrix::from_vec(n, 1, samples).expect("column vector shape"),
        }
    }

    pub fn n_tx(&self) -> usize {
        self.samples.cols()
    }

    pub fn len(&self) -> usize {
        self.samples.rows()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.rows() == 0
    }

    pub fn samples(&self) -> &ComplexMatrix {
        &self.samples
    }

    pub fn antenna(&self, j: usize) -> Vec<C64> {
        self.samples.column(j)
    }

    pub(crate) fn check_antenna(&self, j: usize) -> Result<()> {
        if j >= self.n_tx() {
            return Err(Error::Parameter(format!(
                "antenna {j} out of range for {} antennas",
                self.n_tx()
            )));
        }
        Ok(())
    }
}

/// Per-antenna unitary IDFT: `T = F^H X^T`.
pub fn to_time(grid: &ResourceGrid) -> Result<TimeSignal> {
    let fft = UnitaryFft::new(grid.total_bins())?;
    let n = grid.total_bins();
    let mut samples = ComplexMatrix::zeros(n, grid.n_tx());
    let mut buf = vec![C64::default(); n];
    for j in 0..grid.n_tx() {
        buf.copy_from_slice(grid.data().row(j));
        fft.inverse(&mut buf);
        samples.set_column(j, &buf);
    }
    Ok(TimeSignal { samples })
}

/// Inverse of [`to_time`] onto the given layout.
pub fn to_frequency(sig: &TimeSignal, layout: Arc<SubcarrierLayout>) -> Result<ResourceGrid> {
    if sig.len() != layout.total_bins() {
        return Err(Error::Sizing(format!(
            "signal of {} samples does not match {} bins",
            sig.len(),
            layout.total_bins()
        )));
    }
    let fft = UnitaryFft::new(sig.len())?;
    let mut data = ComplexMatrix::zeros(sig.n_tx(), sig.len());
    for j in 0..sig.n_tx() {
        let row = data.row_mut(j);
        row.copy_from_slice(&sig.antenna(j));
        fft.forward(row);
    }
    ResourceGrid::new(layout, data)
}
