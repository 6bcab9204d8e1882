//! Numerical special functions used by the closed-form densities.
//!
//! Everything here is a pure function of its arguments.

mod beta_inc;
mod erf;
mod gamma;
mod kummer;
mod quadrature;

pub use beta_inc::reg_incomplete_beta;
pub use erf::{erf, erfc, normal_cdf};
pub use gamma::{
    beta_function, incomplete_gamma_pair, ln_beta, log_gamma, reg_incomplete_gamma_lower,
    reg_incomplete_gamma_upper,
};
pub use kummer::{kummer_u, kummer_u_at_zero, ln_gamma_times_u, ln_kummer_u};
pub use quadrature::{integrate, integrate_exp, Estimate, LogEstimate, QuadratureConfig};

pub(crate) use gamma::ln_gamma_pos;
