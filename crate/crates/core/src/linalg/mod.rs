//! Exact rational linear algebra used as independent oracles.

mod charpoly;
mod dense;
mod eigen;
mod nullspace;
mod poly;
mod structured;

pub use charpoly::{char_poly, determinant};
pub use dense::RationalMatrix;
pub use eigen::{factor_check, EigenMultiset};
pub use nullspace::{null_space_vector, rank};
pub use poly::Polynomial;
pub use structured::{block_matrix, blockm_charpoly_check, kn, kn_inverse};
