//! Dense linear-algebra kernel shared by every other module.

mod matrix;
mod svd;
mod threshold;

pub use matrix::{argmax_abs, count_nonzero, dot, norm1, norm2, norm_inf, DenseMatrix};
pub use svd::{full_svd, SvdResult};
pub use threshold::{l1_constrained_unit_vector, l1_project, soft_threshold, L1Projection};
pub(crate) use threshold::one_sparse;
