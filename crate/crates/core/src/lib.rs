//! Numerics for reference-frame alignment under U(1) and cyclic
//! superselection: G-asymmetry, covariant-measurement mutual information,
//! alignment rates and their superadditivity for cyclic groups.
//!
//! The probability, entropy, DFT and pipeline code is generic over
//! [`Real`] (`f32` or `f64`); the `*F64` aliases below are what the CLI and
//! most callers use.

pub mod cyclic;
pub mod dft;
pub mod error;
pub mod io;
pub mod povm;
pub mod prob;
pub mod sampling;
pub mod scalar;
pub mod u1;

pub use error::{Error, Result};
pub use scalar::Real;

pub use cyclic::{Rate, ZmRatePoint};
pub use dft::{dft_profile, SpectralProfile};
pub use prob::{
    entropy_deficit, relative_entropy_diag, shannon_entropy, validate_state, CopyDistribution, DeviationVector,
    GroupSpec, StandardState,
};

pub type StandardStateF64 = prob::StandardState<f64>;
pub type CopyDistributionF64 = prob::CopyDistribution<f64>;
pub type DeviationVectorF64 = prob::DeviationVector<f64>;
pub type SpectralProfileF64 = dft::SpectralProfile<f64>;
pub type ZmRatePointF64 = cyclic::ZmRatePoint<f64>;
pub type U1RatePointF64 = u1::U1RatePoint<f64>;
pub type CompositionResultF64 = cyclic::CompositionResult<f64>;
pub type StandardStateF32 = prob::StandardState<f32>;
