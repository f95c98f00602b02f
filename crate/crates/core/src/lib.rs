//! Pseudospectral quadrature solver for the incompressible Navier-Stokes
//! equations on the rotating unit sphere.
//!
//! The velocity field is expanded in the orthonormal divergence-free vector
//! spherical harmonics Z_{L,m} = lambda_L^{-1/2} Curl Y_{L,m}; the weak-form
//! Galerkin system is closed with a Gauss-Legendre x rectangle quadrature
//! rule chosen so that every Galerkin integral (including the quadratic
//! nonlinearity) is evaluated exactly, and the resulting stiff ODE system is
//! integrated with adaptive variable-order NDF formulas.
//!
//! Start with the runnable examples (`cargo run --release --example ...`):
//! each major capability has one. The `sphereflow` binary drives full
//! simulations from a config file.

pub mod basis;
pub mod config;
pub mod diagnostics;
pub mod error;
pub mod experiments;
pub mod grid;
pub mod ndf;
pub mod operators;
pub mod runner;
pub mod snapshot;
pub mod special;
pub mod transform;

pub use basis::{CovariantVector, ModeIndex};
pub use error::{Error, Result};
pub use grid::{GridScalarField, GridVectorField, ModeCoeffs, QuadratureGrid};
pub use operators::PhysicsParams;
pub use transform::SphereTransform;

pub(crate) type Complex = num_complex::Complex64;
