//! Correspondence analysis (CA) of contingency tables and its sparse variants.
//!
//! Standard CA is computed as the SVD of the standardized residual matrix
//! `Z = D_r^{-1/2} (P - r c') D_c^{-1/2}`. Sparse CA replaces that SVD by a
//! sequence of L1-penalized rank-1 decompositions, each followed by a
//! projected deflation `(I - uu') Z (I - vv')`, so that the row and/or column
//! weights of every dimension contain exact zeros.
//!
//! The crate is organised as:
//!
//! * [`numerics`]: dense matrices, one-sided Jacobi SVD, soft-thresholding.
//! * [`ca`]: contingency tables and standard CA.
//! * [`sparse`]: rank-1 penalized decomposition, projected deflation and
//!   doubly/column sparse CA models.
//! * [`tuning`]: explained variance, IS / BIC / cross-validation criteria and
//!   grid searches over the sparsity budgets.
//! * [`analysis`]: Ward clustering of coordinates and typicality z-scores.
//! * [`io`] and [`plot`]: CSV ingestion/serialization and SVG rendering.

pub mod analysis;
pub mod ca;
mod error;
pub mod io;
pub mod numerics;
pub mod plot;
pub mod sparse;
pub mod tuning;

pub use crate::analysis::{cut_tree, typicality_zscores, ward_cluster, Dendrogram, TypicalityTable, WardVariant};
pub use crate::ca::{fit_ca, total_inertia, CaModel, ContingencyTable, ContributionTable};
pub use crate::error::{Axis, Error, Result};
pub use crate::io::{read_contingency_csv, write_contingency_csv, write_tables_csv, FittedModel};
pub use crate::numerics::{full_svd, DenseMatrix, SvdResult};
pub use crate::plot::{render_svg, LabelFilter, PlotInput, PlotKind, PlotSpec};
pub use crate::sparse::{
    fit_sparse_ca, pmd_rank1, ppmd_deflate, ColumnScale, SparseCaModel, SparseCaOptions, SparseFactor, SparsityConstraint,
    Variant,
};
pub use crate::tuning::{Criterion, TuningResult};
