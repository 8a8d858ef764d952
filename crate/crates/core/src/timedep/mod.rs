//! Time-dependent scattering on a periodic 1D arena.
//!
//! The free flow is the exact Fourier multiplier e^{−iξ²t}; the full flow is
//! split-operator. Odd packets in the same arena carry the ℓ = 0 radial
//! problem, which ties these experiments to the stationary phase shifts.

pub mod arena;
pub mod cook;
pub mod moller;
pub mod phase;
pub mod propagate;
pub mod smooth;

pub use arena::{Arena, Wavepacket};
pub use cook::{cook_integral, CookOptions, CookTrace};
pub use moller::{asymptotic, moller_estimate, scattering_map, MollerTrace, ScatteringMap};
pub use phase::{eikonal_residual, modified_phase, EikonalField, ModifiedPhase, Region, MODIFIED_PHASES};
pub use propagate::{
    propagate_free, propagate_full, propagation_scheme, EvolutionConfig, PropagationScheme, PROPAGATION_SCHEMES,
};
pub use smooth::{bound_states, smoothness_integral, BoundStates, SmoothnessStatus, SmoothnessTrace};
