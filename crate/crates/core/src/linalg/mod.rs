//! Dense linear algebra: storage, SVD, operators and norms.

pub mod io;
pub mod linear_map;
pub mod matrix;
pub mod norms;
pub mod svd;

pub use linear_map::{sigma_max_stacked, LinearMap, StackedRow};
pub use matrix::{DenseMatrix, DenseVector};
pub use norms::{norm_factor_i, norm_factor_j, schatten_norm, slice_norm, vec_norm, NormIndex};
pub use svd::{svd_full, svd_truncated, SvdResult};
