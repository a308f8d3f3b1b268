//! Numerical toolkit for two-dimensional magnetic Schrödinger operators
//! `H = (-i∇ + A)² + V` on polar grids.
//!
//! The covariant gradient is `∇_A = ∇ + iA`. Under `A → A + ∇χ` wave
//! functions transform as `ψ → e^{-iχ} ψ`.

pub mod certify;
pub mod eigensolve;
pub mod error;
pub mod field;
pub mod forms;
pub mod hardy;
pub mod identities;
pub mod linalg;
pub mod mesh;
pub mod potential;
pub mod scalar;

pub use error::{Error, Result};
pub use scalar::{Real, C};

pub type PolarGrid64 = mesh::PolarGrid<f64>;
pub type GridFunction64 = mesh::GridFunction<f64>;
pub type RadialFieldProfile64 = field::RadialFieldProfile<f64>;
pub type AngularFluxDensity64 = field::AngularFluxDensity<f64>;
pub type VectorPotentialField64 = field::VectorPotentialField<f64>;
pub type PotentialModel64 = potential::PotentialModel<f64>;
pub type HermitianForm64 = forms::HermitianForm<f64>;
pub type WeightMass64 = forms::WeightMass<f64>;
pub type SolverOptions64 = eigensolve::SolverOptions<f64>;
pub type SpectralResult64 = eigensolve::SpectralResult<f64>;
pub type ManufacturedEigenpair64 = identities::ManufacturedEigenpair<f64>;
