//! Scalar special functions: complex log-gamma, the regularized Gauss
//! hypergeometric function on the negative axis, and the Meixner and
//! Krawtchouk families.

mod gamma;
mod hyp2f1;
mod orthopoly;

pub use gamma::{ln_abs_gamma, ln_factorial, ln_gamma_signed, log_gamma, pochhammer, recip_gamma};
pub use hyp2f1::{hyp2f1_reg, hyp2f1_reg_direct, hyp2f1_reg_scaled, Scaled, CANCELLATION_LIMIT, MAX_TERMS};
pub use orthopoly::{
    krawtchouk, krawtchouk_tilde, krawtchouk_weight, ln_meixner_weight, meixner, meixner_tilde, meixner_weight,
    KrawtchoukParams, MeixnerParams,
};

pub(crate) use hyp2f1::regularized_series_raw;
