use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "sparse-ca", version, about = "Correspondence analysis and sparse correspondence analysis")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Standard correspondence analysis: tables and a symmetric map.
    Ca(CaArgs),
    /// Sparse correspondence analysis.
    Sca(ScaArgs),
    /// Grid search of the sparsity parameter.
    Tune(TuneArgs),
    /// Rank-1 weights along a parameter grid.
    Paths(PathsArgs),
    /// Ward clustering of row coordinates with typical column categories.
    Cluster(ClusterArgs),
    /// Documents x tokens table from token counts.
    Dtm(DtmArgs),
}

#[derive(Debug, Args)]
pub struct Input {
    /// Contingency table CSV: header of column labels, then a label and counts per row.
    pub table: PathBuf,
    /// Drop all-zero rows and columns instead of failing.
    #[arg(long)]
    pub drop_empty: bool,
    /// Output directory.
    #[arg(long, short, default_value = ".")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct CaArgs {
    #[command(flatten)]
    pub input: Input,
    /// Retained dimensions (at most the table's rank).
    #[arg(long, default_value_t = 2)]
    pub dims: usize,
    #[arg(long)]
    pub no_plot: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum VariantArg {
    Doubly,
    Column,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ColScaleArg {
    Barycentric,
    Rescaled,
}

/// Per-dimension sparsity settings; a single value applies to every dimension.
#[derive(Debug, Args, Default)]
pub struct Sparsity {
    /// Coupled parameter per dimension, in (max(1/sqrt(I), 1/sqrt(J)), 1].
    #[arg(long, value_delimiter = ',', conflicts_with_all = ["sumabsu", "sumabsv", "nnz"])]
    pub sumabs: Option<Vec<f64>>,
    /// Row L1 budget per dimension, in [1, sqrt(I)].
    #[arg(long, value_delimiter = ',', conflicts_with = "nnz")]
    pub sumabsu: Option<Vec<f64>>,
    /// Column L1 budget per dimension, in [1, sqrt(J)].
    #[arg(long, value_delimiter = ',', conflicts_with = "nnz")]
    pub sumabsv: Option<Vec<f64>>,
    /// Target number of nonzero column weights per dimension.
    #[arg(long, value_delimiter = ',')]
    pub nnz: Option<Vec<usize>>,
}

impl Sparsity {
    pub fn is_set(&self) -> bool {
        self.sumabs.is_some() || self.sumabsu.is_some() || self.sumabsv.is_some() || self.nnz.is_some()
    }
}

#[derive(Debug, Args)]
pub struct ScaArgs {
    #[command(flatten)]
    pub input: Input,
    #[arg(long, value_enum, default_value_t = VariantArg::Doubly)]
    pub variant: VariantArg,
    #[command(flatten)]
    pub sparsity: Sparsity,
    /// Number of dimensions; defaults to the length of the per-dimension lists.
    #[arg(long)]
    pub dims: Option<usize>,
    /// Column display of the column-sparse variant.
    #[arg(long, value_enum, default_value_t = ColScaleArg::Rescaled)]
    pub col_scale: ColScaleArg,
    /// Leave categories with zero weight on both plotted dimensions off the map.
    #[arg(long)]
    pub nonzero_only: bool,
    #[arg(long)]
    pub no_plot: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CriterionArg {
    Is,
    IsPrinted,
    Bic,
    Cv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ParamArg {
    /// One `sumabs` scaling both budgets.
    Coupled,
    /// The column budget `sumabsv`, rows unpenalized.
    Budget,
}

#[derive(Debug, Args)]
pub struct TuneArgs {
    #[command(flatten)]
    pub input: Input,
    #[arg(long, value_enum, default_value_t = CriterionArg::Is)]
    pub criterion: CriterionArg,
    #[arg(long, value_enum, default_value_t = VariantArg::Doubly)]
    pub variant: VariantArg,
    /// One-parameter grid; without values a default grid is used.
    #[arg(long, value_delimiter = ',', num_args = 0.., conflicts_with = "grid_2d")]
    pub grid_1d: Option<Vec<f64>>,
    /// Meaning of the one-parameter grid; defaults to coupled (doubly) or budget (column).
    #[arg(long, value_enum)]
    pub param: Option<ParamArg>,
    /// Full factorial grid over sumabsu x sumabsv.
    #[arg(long)]
    pub grid_2d: bool,
    /// Row budgets of the 2-D grid; default 1 to sqrt(I) by --grid-step.
    #[arg(long, value_delimiter = ',', requires = "grid_2d")]
    pub grid_u: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',', requires = "grid_2d")]
    pub grid_v: Option<Vec<f64>>,
    #[arg(long, default_value_t = 0.05, requires = "grid_2d")]
    pub grid_step: f64,
    /// Dimensions tuned in sequence, each on the matrix deflated by the previous optima.
    #[arg(long, default_value_t = 1)]
    pub dims: usize,
    /// Seed of the cross-validation holdouts.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 10)]
    pub folds: usize,
    #[arg(long, default_value_t = 1)]
    pub repeats: usize,
    #[arg(long)]
    pub no_plot: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SideArg {
    Rows,
    Cols,
}

#[derive(Debug, Args)]
pub struct PathsArgs {
    #[command(flatten)]
    pub input: Input,
    #[arg(long, value_enum, default_value_t = VariantArg::Doubly)]
    pub variant: VariantArg,
    /// Parameter values; defaults as for `tune --grid-1d`.
    #[arg(long, value_delimiter = ',')]
    pub grid: Option<Vec<f64>>,
    #[arg(long, value_enum)]
    pub param: Option<ParamArg>,
    /// Weights drawn in the plot.
    #[arg(long, value_enum, default_value_t = SideArg::Cols)]
    pub side: SideArg,
    #[arg(long)]
    pub no_plot: bool,
}

#[derive(Debug, Args)]
pub struct ClusterArgs {
    #[command(flatten)]
    pub input: Input,
    /// Number of clusters.
    #[arg(long)]
    pub k: usize,
    /// Typical column categories reported per cluster.
    #[arg(long, default_value_t = 10)]
    pub top_words: usize,
    /// Coordinate dimensions used for clustering.
    #[arg(long, default_value_t = 2)]
    pub dims: usize,
    /// Cluster sparse CA coordinates instead of standard CA ones.
    #[command(flatten)]
    pub sparsity: Sparsity,
    #[arg(long, value_enum, default_value_t = VariantArg::Doubly)]
    pub variant: VariantArg,
    /// Use unsquared distances in the Ward update.
    #[arg(long)]
    pub ward_d: bool,
    #[arg(long)]
    pub no_plot: bool,
}

#[derive(Debug, Args)]
pub struct DtmArgs {
    /// CSV of doc_id,token,count with a header.
    pub token_counts: PathBuf,
    /// One token per line; matched verbatim.
    #[arg(long)]
    pub stoplist: Option<PathBuf>,
    /// Keep tokens whose corpus count is strictly greater.
    #[arg(long, default_value_t = 1)]
    pub min_count: u64,
    #[arg(long)]
    pub max_vocab: Option<usize>,
    /// Output contingency CSV.
    #[arg(long, short)]
    pub out: PathBuf,
}
