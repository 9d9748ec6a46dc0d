//! Clock-and-shift unitaries, their canonical forms, and completely positive
//! certificates between the operator systems they generate.

pub mod algebra;
pub mod canonical;
pub mod choi;
pub mod error;
pub mod feasibility;
pub mod json;
pub mod linalg;
pub mod tolerance;
pub mod weyl;

pub use error::{Error, Result};
pub use linalg::CMatrix;
pub use num_complex::Complex64;
