//! Volume-fraction bounds for a two-phase conducting body from three sets of
//! boundary measurements, by the translation method.
//!
//! The crate is organised bottom-up:
//!
//! * [`tensor`]: 3×3 / 9×9 algebra, translation tensors, two-phase averages.
//! * [`pde`]: voxel finite-element forward solver and boundary quadratures.
//! * [`measure`]: response matrices, normalization, the `M` tensor.
//! * [`bounds`]: upper and lower bounds on the inclusion volume fraction.
//!
//! All numerical code is generic over [`Real`]; the aliases below fix the
//! common `f64` and `f32` instantiations.

pub mod bounds;
mod error;
mod linalg;
pub mod measure;
pub mod pde;
mod scalar;
pub mod tensor;

pub use error::{Error, Result};
pub use scalar::Real;

pub type Matrix3d = tensor::Matrix3<f64>;
pub type Matrix3f = tensor::Matrix3<f32>;
pub type Tensor4d = tensor::Tensor4<f64>;
pub type Tensor4f = tensor::Tensor4<f32>;
pub type PhaseAverageD = tensor::PhaseAverage<f64>;
pub type ConductivityFieldD = pde::ConductivityField<f64>;
pub type PotentialSetD = pde::PotentialSet<f64>;
