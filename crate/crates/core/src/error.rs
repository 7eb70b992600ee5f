use thiserror::Error;

/// Errors raised by the simulation channels.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum DysonError {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("collision: angles {first} and {second} coincide modulo 2π")]
    Collision { first: f64, second: f64 },

    #[error("near-collision: minimum circular gap {min_gap:e} is below {threshold:e}")]
    NearCollision { min_gap: f64, threshold: f64 },

    #[error("stiffness: step rejected after {halvings} halvings (minimum gap {min_gap:e})")]
    Stiffness { halvings: u32, min_gap: f64 },

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error(
        "positivity loss at t = {time}: minimum density {min_value:e} < -1e-6 \
         (increase the viscosity or refine the grid)"
    )]
    PositivityLoss { time: f64, min_value: f64 },

    #[error("CFL condition violated: dt = {dt:e} exceeds the stable bound, retry with dt <= {suggested_dt:e}")]
    Cfl { dt: f64, suggested_dt: f64 },
}

pub type Result<T> = std::result::Result<T, DysonError>;
