//! Parabolic frequency along self-shrinking mean curvature flows.
//!
//! Solutions of the heat equation on M_t = √(−t)M are carried as coefficients
//! in the eigenbasis of the unit-scale drift Laplacian, where the Gaussian
//! measure is time-invariant and the evolution is diagonal. On top of that sit
//! the frequency functionals I, D, U and a set of verifiers that turn each
//! monotonicity, Harnack and eigenvalue inequality into signed margins.

pub mod background;
pub mod error;
pub mod evolution;
pub mod field;
pub mod frequency;
pub mod geometry;
pub mod modes;
pub mod poly;
pub mod quadrature;
pub mod special;
pub mod verify;

pub use background::{Background, Eigenvalue, Mode, ModeLabel};
pub use error::{Error, Result};
pub use evolution::{
    coefficient_rate, evolve_exact, evolve_forced, forcing_bound_margin, Coupling, CProfile, Forcing, Method,
    StepperOptions, Trajectory,
};
pub use field::{CoefficientField, TimeGrid};
pub use frequency::{FrequencyRow, FrequencyTrace};
pub use geometry::{geometry_at, pointwise_supported, GeometryData};
pub use modes::{evaluate_mode, exact_integral, ModeBasis};
pub use quadrature::{quadrature, QuadratureRule};
pub use verify::{Verdict, VerificationReport};
