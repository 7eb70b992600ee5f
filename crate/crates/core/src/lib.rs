//! Unitary Dyson Brownian motion: particle, matrix and PDE channels plus the
//! diagnostics that compare them.

pub mod circle;
pub mod diagnostics;
pub mod error;
pub mod matrix;
pub mod noise;
pub mod particles;
pub mod primitive;
pub mod spectral;

pub use circle::{
    cdf_distance, empirical_cdf, lift_configuration, wrap_angle, Angle, EmpiricalCdf, FourierCoefficients,
    LiftedConfiguration, PeriodicDensity, PseudoCDF,
};
pub use diagnostics::{BoundCheck, BoundReport, ReportOptions};
pub use error::{DysonError, Result};
pub use matrix::{HermitianMatrix, UnitaryMatrix};
pub use noise::NoiseStream;
pub use particles::{ParticleTrajectory, SDEParameters};
pub use primitive::PrimitiveState;
pub use spectral::SpectralWorkspace;
