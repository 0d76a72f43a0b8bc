pub mod bounds;
pub mod error;
pub mod extremal;
pub mod gamma_core;
pub mod gamma_mix;
pub mod majorization;
pub mod quad;
pub mod rng;
pub mod stats;
pub mod trace_estimator;
pub mod verify;

pub use error::{Error, Result};
pub use gamma_core::GammaParams;
pub use gamma_mix::{trace_estimator_law, GammaMix, GammaTerm, GeneralGammaSum};
pub use majorization::{MajorizationChain, OrderKind, Spectrum, StepForm};
