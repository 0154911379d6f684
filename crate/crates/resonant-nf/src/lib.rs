//! Formal power series engine for resonant normal forms of
//! area-preserving maps near an elliptic fixed point.

pub mod basis;
pub mod bigfloat;
pub mod birkhoff;
pub mod cli;
pub mod error;
pub mod family;
pub mod homological;
pub mod interp;
pub mod json;
pub mod lie;
pub mod pipeline;
pub mod polar;
pub mod rand_gen;
pub mod unique_nf;
pub mod scalar;
pub mod series;

pub use error::{NfError, Result};
pub use scalar::{Scalar, ScalarMode, DEFAULT_PREC};
pub use series::{FormalSeries, Grading, ResonanceContext, TRUNC_NONE};
