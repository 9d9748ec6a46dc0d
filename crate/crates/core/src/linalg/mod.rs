//! Self-contained dense complex linear algebra.

mod eig;
mod matrix;
mod qr;
pub mod random;

pub use eig::{hermitian_eig, min_eigenvalue, operator_norm, psd_project, psd_project_with_eig, HermitianEig};
pub use matrix::{kron, kron_all, CMatrix, ONE, ZERO};
pub use qr::{column_space_basis, extend_orthonormal, pivot_columns, projector, qr_decompose, qr_orthonormalize};
pub use random::haar_unitary;
