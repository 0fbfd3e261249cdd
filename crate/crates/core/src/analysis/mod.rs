//! Interpretation of fitted coordinates: Ward clustering and typicality of
//! categories within clusters.

mod typicality;
mod ward;

pub use typicality::{aggregate_by_cluster, typicality_z, typicality_zscores, ClusterTypicality, TypicalityTable};
pub use ward::{cut_tree, ward_cluster, Dendrogram, Merge, WardVariant};
