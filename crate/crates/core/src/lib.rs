//! Inverse measure-theoretic entropy of non-invertible maps.
//!
//! The crate has five layers:
//!
//! * [`numerics`]: fixed-size matrices, eigenvalues, slope fits and seeded streams.
//! * [`systems`]: toral endomorphisms, expanding circle maps, one-sided shifts,
//!   fat baker maps and Tsujii skew products behind the [`Endomorphism`] trait.
//! * [`prehistory`]: backward trajectories and Bowen-ball membership.
//! * [`estimators`]: Monte-Carlo estimates of forward, inverse and folding
//!   entropy, Lyapunov spectra and pointwise dimension.
//! * [`exact`]: closed forms used as oracles and as a fast path.
//!
//! The crate is `no_std` (it needs `alloc`). Parallel work goes through the
//! [`Executor`] trait so that a std front end can plug in a thread pool.
#![cfg_attr(not(test), no_std)]
#![forbid(unsafe_code)]

extern crate alloc;

mod error;
pub mod estimators;
pub mod exact;
pub mod numerics;
pub mod prehistory;
pub mod systems;

pub use error::{Error, Result};
pub use estimators::{EstimatorConfig, Executor, Sequential};
pub use numerics::{RngStream, SquareMatrix};
pub use prehistory::{BowenQuery, Direction, Prehistory};
pub use systems::{Endomorphism, ReferenceMeasure, System, SystemSpec};
