//! Optimum pilot overhead and pilot power for pilot-assisted transmission
//! over time-selective Rayleigh fading.
//!
//! The crate evaluates the spectral efficiency achieved with MMSE channel
//! estimation from periodic pilots, maximizes it numerically over the pilot
//! overhead and pilot power boost, and provides the small-Doppler closed-form
//! expansions of those optima.
//!
//! ```
//! use pilot_overhead::{optimize_overhead, overhead_expansion, FadingModel, SnrLinear, SpectralShape};
//!
//! let model = FadingModel::continuous(0.001, SpectralShape::ClarkeJakes)?;
//! let snr = SnrLinear::from_db(10.0)?;
//! let exact = optimize_overhead(&model, snr, false)?;
//! let approx = overhead_expansion(&SpectralShape::ClarkeJakes, snr, 0.001)?;
//! assert!((approx.value / exact.alpha_star - 1.0).abs() < 0.1);
//! # Ok::<(), pilot_overhead::Error>(())
//! ```

pub mod efficiency;
pub mod error;
pub mod estimation;
pub mod expansions;
pub mod mimo;
mod optim;
mod quad;
pub mod special;
pub mod spectra;

pub use efficiency::{
    optimize_overhead, optimize_overhead_with, penalty, pilot_se, OverheadSolution,
};
pub use error::{Error, Result};
pub use estimation::{mmse, mmse_clarke_jakes_closed, snr_eff, FadingModel, PowerAllocation};
pub use expansions::{overhead_expansion, ClampInterval, ExpansionResult};
pub use mimo::{capacity_mimo, AntennaConfig};
pub use special::{capacity_csi, CapacityCurve, ScalarRayleigh, SnrLinear};
pub use spectra::{DopplerSpec, SpectralShape, TabulatedShape};
