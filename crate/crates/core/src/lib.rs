//! Extropy, weighted extropy and their residual, past and bivariate versions
//! for lifetime distributions, computed by adaptive quadrature and checked
//! against closed forms.

pub mod bivariate;
pub mod claims;
pub mod distributions;
pub mod error;
pub mod measures;
pub mod montecarlo;
pub mod quadrature;
pub mod report;
pub mod special;
pub mod transforms;

pub use distributions::{make_distribution, parse_distribution, DistSpec, Univariate, UnivariateDistribution};
pub use error::{Error, Result};
pub use measures::{MeasureId, MeasureOptions, MeasureValue, Method, MethodChoice};
pub use report::{ClaimReport, Verdict};
