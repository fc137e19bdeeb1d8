//! Cavity magnon-polariton spectra.
//!
//! A microwave cavity mode coupled to one or more collective spin modes
//! (ferromagnetic resonance, magnetostatic modes) of a ferrimagnetic sample:
//!
//! - [`spectrum`]: polariton branches from the one-excitation mode matrix,
//!   avoided-crossing gaps.
//! - [`transmission`]: input–output S21 with the magnon self-energy, 2-D
//!   field × frequency maps, damping sweeps.
//! - [`physics`]: single-spin coupling, spin count, cooperativity, photon
//!   numbers, regime checks.
//! - [`fit`]: recovering model parameters from measured or synthetic maps.
//! - [`io`]: long-format CSV and TOML run configuration.
//!
//! The model, spectrum, transmission and physics layers are generic over
//! [`Scalar`] (`f32`/`f64`); fitting and file I/O work in `f64`. The aliases
//! below name the `f64` instantiations.

// `!(x > 0)` also rejects NaN, which is the point
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod eigen;
pub mod error;
pub mod fit;
pub mod io;
pub mod model;
pub mod physics;
pub mod scalar;
pub mod spectrum;
pub mod transmission;

pub use error::{Error, Result};
pub use model::{
    units, validate_system, CavityMode, HybridSystem, MagnonMode, PhysicalConstants, SpectrumData, SpectrumMap,
    SweepGrid, Violation,
};
pub use scalar::Scalar;

pub type Complex = num_complex::Complex<f64>;
pub type Cavity = CavityMode<f64>;
pub type Magnon = MagnonMode<f64>;
pub type System = HybridSystem<f64>;
pub type Grid = SweepGrid<f64>;
pub type Map = SpectrumMap<f64>;
pub type Constants = PhysicalConstants<f64>;
pub type Branches = spectrum::BranchDiagram<f64>;
pub type Response = transmission::ComplexResponse<f64>;
pub type Regime = physics::RegimeReport<f64>;
pub type Budget = physics::CouplingBudget<f64>;
