//! Shared numerical building blocks.

pub mod energy;
pub mod fit;
pub mod grid;
pub mod linalg;
pub mod ode;
pub mod potential;
pub mod roots;
pub mod special;

pub use energy::{ComplexEnergy, Side};
pub use grid::{GridScheme, MomentumGrid, QuadratureGrid, RadialGrid};
pub use potential::{preset, Envelope, Potential, Shape};
