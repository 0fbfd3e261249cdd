//! Selection of sparsity parameters: fit measure, index of sparsity, BIC,
//! imputation cross-validation and grid searches.

mod criteria;
mod cv;
mod grid;
mod paths;
mod variance;

pub use criteria::{
    bic_criterion, degrees_of_freedom, is_criterion, is_index, leading_fit, sigma2_hat, Criterion, IsOrientation,
};
pub use cv::{cv_error, CvOptions};
pub use grid::{
    configured_threads, default_absolute_grid, default_column_grid, default_coupled_grid, grid_search, grid_search_1d,
    grid_search_2d, tune_sequential, GridParam, GridSpec, TuningCell, TuningGrid, TuningResult, TuningSetup,
    THREADS_ENV,
};
pub use paths::{weight_paths, WeightPath};
pub use variance::{explained_variance, projection_fit, ProjectionFit};
