//! Exact finite-precision p-adic arithmetic and the exact value types built on it.

pub mod character;
pub mod cyclotomic;
pub mod linalg;
pub mod rational;
pub mod ratmat;
pub mod scalar;

pub use character::{character, character_of_rational, NormExponent, UnitRootExponent};
pub use cyclotomic::Cyclotomic;
pub use linalg::{PadicMatrix, PadicVector};
pub use rational::Rational;
pub use ratmat::RatMatrix;
pub use scalar::{PadicScalar, DEFAULT_PRECISION};
