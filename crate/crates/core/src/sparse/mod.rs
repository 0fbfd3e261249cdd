//! Sparse correspondence analysis: penalized rank-1 decompositions chained by
//! projected deflation.

mod constraint;
mod model;
mod pmd;
mod search;

pub use constraint::{Budget, SparsityConstraint};
pub use model::{
    column_sparse_coordinates, coordinates_from_weights, fit_sparse_ca, sparse_contributions, ColumnScale,
    GramReport, SparseCaModel, SparseCaOptions, SparseContributions, Variant,
};
pub use pmd::{
    deflate, deflation_residual, pmd_objective_trace, pmd_rank1, pmd_rank1_with, ppmd_deflate, PmdOptions,
    SparseFactor,
};
pub(crate) use pmd::{leading_right_vector, pmd_budget};
pub use search::{budget_grid, nnz_target_search, NnzSearch, NNZ_GRID_STEP};
