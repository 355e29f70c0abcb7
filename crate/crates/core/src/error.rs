use thiserror::Error;

use crate::quadrature::QuadError;

/// Errors raised by the measure library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid {family} parameters: {constraint}")]
    InvalidParameter {
        family: &'static str,
        constraint: String,
    },

    #[error("domain error: {0}")]
    Domain(String),

    #[error(transparent)]
    Quadrature(#[from] QuadError),

    #[error("finite-difference stencil failed at {x}: {reason}")]
    Stencil { x: f64, reason: String },

    #[error("hazard inversion infeasible at t = {t}: {reason}")]
    InversionInfeasible { t: f64, reason: String },

    #[error("hazard grid spacing {gap} exceeds the declared maximum {max}")]
    Resolution { gap: f64, max: f64 },

    #[error("degenerate transform: derivative vanishes at x = {x}")]
    TransformDegenerate { x: f64 },

    #[error("invalid transform: {0}")]
    InvalidTransform(String),

    #[error("invalid specification: {0}")]
    Spec(String),
}

impl Error {
    pub(crate) fn invalid(family: &'static str, constraint: impl Into<String>) -> Self {
        Error::InvalidParameter {
            family,
            constraint: constraint.into(),
        }
    }

    /// True for errors caused by bad user input rather than numerical failure.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::InvalidParameter { .. }
                | Error::Spec(_)
                | Error::InvalidTransform(_)
                | Error::Domain(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
