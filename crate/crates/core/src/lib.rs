//! OFDM baseband model and peak-to-average power ratio (PAPR) reduction.
//!
//! [`signal`] holds the symbol types and the oversampled transforms,
//! [`metrics`] the PAPR and CCDF estimators. Each reduction technique lives
//! in its own module:
//!
//! * [`clipping`]: envelope clipping and (iterative) out-of-band filtering
//! * [`slm`]: selected mapping
//! * [`pts`]: partial transmit sequences, exhaustive and greedy search
//! * [`tr`]: tone reservation, iterative solver plus an exact LP reference
//! * [`sap`]: metric-based simple amplitude predistortion
//! * [`ops`]: orthogonal pilot sequences with blind detection

pub mod clipping;
pub mod error;
pub mod metrics;
pub mod ops;
pub mod pts;
pub mod qpsk;
pub mod sap;
pub mod signal;
pub mod slm;
pub mod tr;

pub use error::{Error, Result};
pub use metrics::{ccdf_analytic, ccdf_estimate, papr, Aux, CcdfCurve, PaprReport, Technique};
pub use num_complex::Complex64;
pub use qpsk::{qpsk_demap, qpsk_map};
pub use signal::{dft, idft, FreqSymbols, TimeSignal};
