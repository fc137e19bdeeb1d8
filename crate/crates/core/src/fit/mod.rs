//! Parameter extraction from transmission maps.
//!
//! - [`fit_bare_cavity`]: Lorentzian fit of a single uncoupled trace.
//! - [`initial_guess`]: seeds a [`System`](crate::System) from map structure.
//! - [`fit_hybrid`]: damped least squares of the full coupled-mode model in dB.

pub mod bare;
pub mod guess;
pub mod hybrid;
pub mod lm;
pub mod noise;
pub mod peaks;

pub use bare::{fit_bare_cavity, BareCavityFit};
pub use guess::{initial_guess, GuessOptions, InitialGuess};
pub use hybrid::{
    default_free_parameters, fit_hybrid, residual_norm, select_magnon_model, FitConfig, FitReport, FittedParameter,
    ModelSelection,
};
pub use lm::Termination;
pub use noise::add_db_noise;
