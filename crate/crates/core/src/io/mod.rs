//! Reading tables and corpora, writing result tables.

mod dtm;
mod output;
mod table_csv;

pub use dtm::{build_dtm, dtm_from_reader, read_stoplist, DtmOptions};
pub use output::{
    format_sig, write_clusters_csv, write_paths_csv, write_tables_csv, write_tuning_grid_csv, write_typicality_csv,
    FittedModel,
};
pub use table_csv::{format_contingency_csv, parse_contingency_csv, read_contingency_csv, write_contingency_csv};
