//! Worst-case capacity of training-based block-fading SIMO links.
//!
//! A block of `T` symbols spends `T_τ` pilots on an MMSE channel estimate and
//! the remaining `T − T_τ` on data, every symbol at power `P`. The crate
//! computes the estimator statistics ([`estimation`]), the resulting capacity
//! ([`capacity`]), the best integer `T_τ` ([`optimizer`]), and Monte Carlo
//! cross-checks of the statistics and of equal-power optimality
//! ([`montecarlo`]).
//!
//! ```
//! use pilotcap::{reference, optimizer, LinkBudget};
//!
//! let channel = reference::two_antenna();
//! let curve = optimizer::sweep(&channel, &LinkBudget::new(100.0, 100).unwrap()).unwrap();
//! assert_eq!(curve.argmax_t_tau, 4);
//! ```

pub mod capacity;
pub mod cli;
pub mod error;
pub mod estimation;
pub mod io;
pub mod linalg;
pub mod montecarlo;
pub mod optimizer;
pub mod reference;

pub use capacity::{capacity, CapacityValue, InputSpectrum};
pub use error::{Error, ErrorClass, Result};
pub use estimation::{ChannelStats, EstimatorStats, LinkBudget, TrainingObservation, TrainingPlan};
pub use linalg::{Matrix, SymMatrix};
pub use montecarlo::{SimConfig, SimReport, SimRng};
pub use optimizer::{CapacityCurve, CurvePoint};
