//! Distances from Zygmund functions and measures to `I(BMO)` and Sobolev
//! subspaces, computed on finite dyadic trees.
//!
//! The core objects are generic over the scalar: `f32`, `f64` and the exact
//! rational [`Exact`] all work for the tree algebra, and the floating types
//! also get the functionals that need square roots and logarithms.

pub mod approximation;
pub mod dyadic;
pub mod error;
pub mod function;
pub mod functionals;
pub mod generate;
pub mod io;
pub mod martingale;
pub mod measures;
pub mod scalar;
pub mod verification;

pub use dyadic::{CarlesonBox, ConeRegion, DyadicInterval, Filtration, RealInterval};
pub use error::{Error, Result};
pub use function::SampledFunction;
pub use functionals::DistanceProfile;
pub use martingale::{DyadicMartingale, JumpField};
pub use measures::{DyadicCube, GridMeasure};
pub use scalar::{Exact, Real, Scalar};

pub type Function = SampledFunction<f64>;
pub type ExactFunction = SampledFunction<Exact>;
pub type Martingale = DyadicMartingale<f64>;
pub type ExactMartingale = DyadicMartingale<Exact>;
pub type Measure = GridMeasure<f64>;
pub type ExactMeasure = GridMeasure<Exact>;
