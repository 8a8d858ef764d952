//! Numerical scattering theory at desk scale.
//!
//! The crate is split by physical setting:
//!
//! * [`numerics`] holds grids, quadrature, special functions, potentials and the
//!   small dense/iterative linear-algebra kernels the solvers share.
//! * [`stationary`] solves two-body scattering at fixed energy (d = 3): phase
//!   shifts by two independent routes, amplitudes, S-matrix, Born series, cross
//!   sections and limiting-absorption diagnostics.
//! * [`timedep`] runs wavepacket experiments on a periodic 1D arena: free and
//!   interacting propagation, Cook integrals, Møller-operator estimates, the
//!   scattering map and long-range modified evolutions.
//! * [`threebody`] covers Jacobi kinematics, separable-pair Faddeev equations,
//!   bound states, Efimov counting and the spectator-dependent channel built
//!   from Airy functions.
//!
//! Units: ħ = 1 everywhere; two-body operators use 2m = 1 so that H₀ = −Δ and
//! k = √λ. Three-body operators carry their reduced masses explicitly.

pub mod error;
pub mod numerics;
pub mod stationary;
pub mod threebody;
pub mod timedep;

pub use error::{Error, ErrorClass, Result};
pub use num_complex::Complex64;
