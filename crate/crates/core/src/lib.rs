//! Verification and testing toolkit for three characterizations of the
//! exponential law built on the median of a sample of three:
//!
//! * `X₁/3 + X₂/2 =ᵈ X₍₂;₃₎`
//! * `X₀ + X₍₂;₃₎ =ᵈ X₍₃;₃₎`
//! * `X₍₂;₃₎ + X₄/4 =ᵈ X₍₃;₄₎`
//!
//! [`identities`] checks the closing combinatorial identities exactly,
//! [`maclaurin`] the derivative conditions at the origin, [`equidist`] the
//! density equalities by quadrature and Monte Carlo, and [`gof`] turns each
//! identity into a scale-free test of exponentiality.

// `!(x > 0.0)` style guards deliberately reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod data;
pub mod equidist;
pub mod error;
pub mod gof;
pub mod identities;
pub mod maclaurin;
pub mod model;
pub mod orderstats;
pub mod quadrature;
pub mod stats;
pub mod streams;
pub mod vstat;

pub use error::{Error, Result};
pub use model::{parse_model, DensityModel, Model};
