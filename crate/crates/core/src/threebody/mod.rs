//! Three-body systems with separable pair interactions.

pub mod channel;
pub mod discrete;
pub mod efimov;
pub mod faddeev;
pub mod jacobi;
pub mod scan;
pub mod separation;
pub mod separable;

pub use faddeev::{FaddeevOperator, FaddeevProblem, Reduction};
pub use jacobi::{JacobiSystem, Transition, PAIRS, PAIR_LABELS};
pub use separable::{
    critical_strength, dense_pair_spectrum, form_factor, hvz_bottom, pair_spectrum, tune_strength, FormFactor,
    PairBound, PairSpectrum, SeparablePotential, FORM_FACTORS,
};
