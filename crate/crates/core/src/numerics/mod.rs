//! Complex dense linear algebra, unitary FFTs and seeded random streams.

mod fft;
mod linalg;
mod matrix;
mod rng;

pub use fft::{fft_unitary, Direction, UnitaryFft};
pub use linalg::{hermitian_eigen, hermitian_sqrt, inverse, lambda_max_psd, solve, PSD_TOLERANCE};
pub use matrix::ComplexMatrix;
pub use rng::{complex_gaussian, RngStream};

pub type C64 = num_complex::Complex64;

/// Converts a dB power ratio to linear scale.
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(lin: f64) -> f64 {
    10.0 * lin.log10()
}
