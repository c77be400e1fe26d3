//! Numerical checks for stable solutions of semilinear elliptic equations and
//! minimal cones: level-set geometry and calibrations, the minimal-surface
//! foliation ODE, Hardy spectra, Allen-Cahn layer and saddle solutions,
//! Gelfand branches, and the isoperimetric calibration.
//!
//! Kernels are generic over [`Real`]; the aliases at the crate root fix the
//! scalar to `f64`.

// Parameter guards are written as `!(x > 0)` so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod allen_cahn;
pub mod checkpoint;
pub mod cone;
pub mod error;
pub mod foliation;
pub mod gelfand;
pub mod hardy;
pub mod isoperimetric;
pub mod numerics;

pub use error::{Error, Result};
pub use numerics::{lit, Real};

pub type LevelSetFieldF64 = cone::LevelSetField<f64>;
pub type RadialConeProfileF64 = cone::RadialConeProfile<f64>;
pub type SaddleFieldF64 = allen_cahn::SaddleField<f64>;
pub type RadialProfileF64 = gelfand::RadialProfile<f64>;
pub type BranchF64 = gelfand::Branch<f64>;
pub type NeumannSolutionF64 = isoperimetric::NeumannSolution<f64>;
pub type PlanarDomainF64 = isoperimetric::PlanarDomain<f64>;
pub type GridCheckpointF64 = checkpoint::GridCheckpoint<f64>;
pub type Mesh1DF64 = numerics::Mesh1D<f64>;
pub type LeafTrajectoryF64 = foliation::LeafTrajectory<f64>;
