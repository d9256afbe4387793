use crate::error::{Error, Result};
use crate::numerics::{ComplexMatrix, RngStream, C64};

/// Layer-by-subcarrier symbol matrix (`n_layers x n_active`).
#[derive(Debug, Clone, PartialEq)]
pub struct SymbolGrid {
    data: ComplexMatrix,
    bits_per_symbol: u32,
}

impl SymbolGrid {
    pub fn new(data: ComplexMatrix, bits_per_symbol: u32) -> Self {
        Self {
            data,
            bits_per_symbol,
        }
    }

    pub fn n_layers(&self) -> usize {
        self.data.rows()
    }

    pub fn n_active(&self) -> usize {
        self.data.cols()
    }

    pub fn bits_per_symbol(&self) -> u32 {
        self.bits_per_symbol
    }

    pub fn data(&self) -> &ComplexMatrix {
        &self.data
    }

    /// Symbol vector of subcarrier `i` across layers.
    pub fn column(&self, i: usize) -> Vec<C64> {
        self.data.column(i)
    }
}

fn check_bits(bits_per_symbol: u32) -> Result<()> {
    match bits_per_symbol {
        2 | 4 | 6 | 8 => Ok(()),
        b => Err(Error::Parameter(format!(
            "unsupported QAM order: {b} bits per symbol (expected 2, 4, 6 or 8)"
        ))),
    }
}

fn gray_decode(mut g: u32) -> u32 {
    let mut b = g;
    while g > 0 {
        g >>= 1;
        b ^= g;
    }
    b
}

/// Maps a `bits_per_symbol`-bit label to a unit-energy square-QAM point.
/// The upper half of the bits selects the in-phase level, the lower half the
/// quadrature level, both Gray coded.
pub fn qam_map(label: u32, bits_per_symbol: u32) -> Result<C64> {
    check_bits(bits_per_symbol)?;
    let half = bits_per_symbol / 2;
    let m = 1u32 << half;
    let mask = m - 1;
    let level = |g: u32| 2.0 * gray_decode(g & mask) as f64 - (m - 1) as f64;
    let points = (1u64 << bits_per_symbol) as f64;
    let norm = (2.0 * (points - 1.0) / 3.0).sqrt();
    Ok(C64::new(level(label >> half), level(label)) / norm)
}

/// All points, indexed by label.
pub fn qam_constellation(bits_per_symbol: u32) -> Result<Vec<C64>> {
    check_bits(bits_per_symbol)?;
    (0..1u32 << bits_per_symbol)
        .map(|l| qam_map(l, bits_per_symbol))
        .collect()
}

/// Uniformly random symbols, one draw per (layer, subcarrier) in row order.
pub fn generate_symbols(
    n_layers: usize,
    n_active: usize,
    bits_per_symbol: u32,
    rng: &mut RngStream,
) -> Result<SymbolGrid> {
    let table = qam_constellation(bits_per_symbol)?;
    if n_layers == 0 || n_active == 0 {
        return Err(Error::Sizing("symbol grid needs layers and subcarriers".into()));
    }
    let data = (0..n_layers * n_active)
        .map(|_| table[rng.below(table.len() as u32) as usize])
        .collect();
    Ok(SymbolGrid::new(
        ComplexMatrix::from_vec(n_layers, n_active, data)?,
        bits_per_symbol,
    ))
}
