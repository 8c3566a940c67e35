//! Exact coefficient arithmetic: rationals, Laurent polynomials in `t`, the
//! fraction field Q(t) with `q = t^L`, and univariate polynomials over it.

mod laurent;
mod poly;
mod rat;
mod scalar;

pub use laurent::Laurent;
pub use poly::UPoly;
pub use rat::Rat;
pub use scalar::{QField, Scalar};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ExactError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("evaluation point is a pole")]
    Pole,
    #[error("exponent {exponent} is not a multiple of 1/{l}")]
    ExponentNotRepresentable { exponent: String, l: u32 },
    #[error("scalar parse error: {0}")]
    Parse(String),
}
