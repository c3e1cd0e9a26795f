//! Deformed ultrametrics on `Q_p^d`, matrix dilations, the p-adic wavelet bases
//! they generate, the spectral theory of the associated pseudodifferential
//! operators, and the digit-reversing map to real self-affine tiles.
//!
//! Wavelet values live in cyclotomic fields and norms are stored as rational
//! exponents, so the basis and spectral identities are checked exactly.

pub mod dilation;
pub mod error;
pub mod metric;
pub mod monna;
pub mod padic;
pub mod spectral;
pub mod suite;
pub mod wavelet;

pub use error::{Error, Result};
pub use padic::{
    character, Cyclotomic, NormExponent, PadicMatrix, PadicScalar, PadicVector, RatMatrix, Rational,
    UnitRootExponent,
};
pub use metric::{Ball, DeformedMetric};
pub use monna::{DigitSystem, RealPointSet};
pub use wavelet::{LocallyConstantFunction, Scaled, WaveletIndex, WaveletSystem};
