//! Convolutions of orbital measures on compact simple Lie algebras and their
//! Lie groups, studied numerically.
//!
//! A conjugation-invariant probability measure on the algebra is determined by
//! the law of the radial part of its samples, i.e. the dominant-chamber
//! representative of the Cartan projection.  This crate samples sums of random
//! adjoint orbits (and products of random conjugacy classes on the group
//! side), estimates the radial density on a chamber grid, converts it to a
//! density with respect to Lebesgue measure through the Weyl integration
//! weight, and classifies the result as singular or absolutely continuous with
//! an `L^2` estimate attached.  The wrapping map transfers algebra-side
//! densities to the group torus and is checked against direct group-side
//! sampling.  For `su(2)` every quantity has a closed form via the sphere
//! projection argument, which serves as the exact oracle for everything else.
//!
//! All chamber and torus computations are generic over the floating scalar
//! (`f32` or `f64`); the `su(2)` oracle computes in exact rational arithmetic.
//! Concrete `f64` aliases are exported at the crate root.

pub mod density;
pub mod dichotomy;
pub mod error;
pub mod io;
pub mod linalg;
pub mod matrixgroups;
pub mod rootsys;
pub mod scalar;
pub mod su2oracle;
pub mod weylconst;
pub mod wrapping;

pub use error::Error;
pub use scalar::Real;

// TEMP /// `f64` specializations; the generic types live in their modules.
// TEMP pub type RootSystem64 = rootsys::RootSystem<f64>;
// TEMP pub type CartanPoint64 = rootsys::CartanPoint<f64>;
// TEMP pub type OrbitConfig64 = matrixgroups::OrbitConfig<f64>;
// TEMP pub type RadialSampleBatch64 = matrixgroups::RadialSampleBatch<f64>;
// TEMP pub type DensityEstimate64 = density::DensityEstimate<f64>;
// TEMP pub type DichotomyVerdict64 = dichotomy::DichotomyVerdict<f64>;
// TEMP pub type FoldedDensity64 = wrapping::FoldedDensity<f64>;

// TEMP /// `f32` variants, mainly useful for storage-bound experiments.
// TEMP pub type RootSystem32 = rootsys::RootSystem<f32>;
// TEMP pub type CartanPoint32 = rootsys::CartanPoint<f32>;
