//! Gamma and beta functions.
//!
//! Thin wrappers over `statrs` plus the three-argument beta function used by
//! the bivariate beta family.

pub use statrs::function::beta::beta_reg;
pub use statrs::function::gamma::{gamma_lr, gamma_ur};

/// Natural log of the gamma function for positive arguments.
pub fn log_gamma(x: f64) -> f64 {
    statrs::function::gamma::ln_gamma(x)
}

pub fn gamma(x: f64) -> f64 {
    statrs::function::gamma::gamma(x)
}

/// Complete beta function B(a, b).
pub fn beta2(a: f64, b: f64) -> f64 {
    ln_beta2(a, b).exp()
}

pub fn ln_beta2(a: f64, b: f64) -> f64 {
    log_gamma(a) + log_gamma(b) - log_gamma(a + b)
}

/// Bivariate complete beta function B(a, b, c) = Γ(a)Γ(b)Γ(c)/Γ(a+b+c).
pub fn beta3(a: f64, b: f64, c: f64) -> f64 {
    ln_beta3(a, b, c).exp()
}

pub fn ln_beta3(a: f64, b: f64, c: f64) -> f64 {
    log_gamma(a) + log_gamma(b) + log_gamma(c) - log_gamma(a + b + c)
}
