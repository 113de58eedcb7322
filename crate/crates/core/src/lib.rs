//! Spectral-efficiency bounds for pilot-assisted block-fading channels.
//!
//! Closed forms are built on the scaled exponential integral in [`specfun`];
//! every expectation also has a seeded Monte Carlo estimator in [`mc`] that
//! serves both as the computation path for multi-antenna capacity and as an
//! independent check of the scalar closed forms.

pub mod cli;
pub mod error;
pub mod mc;
pub mod mimo;
pub mod siso;
pub mod specfun;
pub mod sweeps;
pub mod table;
pub mod units;
pub mod validate;

pub use error::{Error, Result};
pub use mc::{Estimate, McConfig};
pub use mimo::MimoParams;
pub use siso::SisoParams;
pub use units::{PowerOffset, SnrValue, DB_PER_UNIT};
