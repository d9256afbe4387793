//! OFDM grids, time/frequency transforms and figures of merit.

mod grid;
mod metrics;
mod spectrum;

pub use grid::{to_frequency, to_time, ResourceGrid, SubcarrierLayout, TimeSignal};
pub use metrics::{
    aclr_db, ipapr_samples, papr_db, papr_db_of, percentile, predicted_evm, tx_evm, EvmProfile,
    DB_FLOOR, IPAPR_PERCENTILE,
};
pub use spectrum::{
    ccdf, default_rolloff, psd, raised_cosine_window, CcdfCurve, CCDF_STEP_DB,
};
