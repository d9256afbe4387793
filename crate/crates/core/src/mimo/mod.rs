//! QAM symbols, RZF precoding, zero-forcing reception and estimated EVM.

mod precoding;
mod qam;
mod receiver;

pub use precoding::{precode, rzf_precoder, Precoder, DEFAULT_RZF_ALPHA};
pub use qam::{generate_symbols, qam_constellation, qam_map, SymbolGrid};
pub use receiver::{equalize, estimated_evm, write_scatter_csv, Equalized, EstimatedEvm};
