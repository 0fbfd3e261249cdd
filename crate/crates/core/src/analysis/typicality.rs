use crate::error::{Error, Result};
use crate::numerics::DenseMatrix;

/// `(k_ij - k_i k_j / k) / sqrt(k_i k_j / k * (1 - k_j / k))`
pub fn typicality_z(k_ij: f64, k_i: f64, k_j: f64, k: f64) -> f64 {
    let expected = k_i * k_j / k;
    (k_ij - expected) / (expected * (1.0 - k_j / k)).sqrt()
}

/// Most typical categories of one cluster.
#[derive(Debug, Clone)]
pub struct ClusterTypicality {
    pub label: String,
    /// Cluster total `k_i`.
    pub size: f64,
    /// `(category, z)` by decreasing `z`.
    pub top: Vec<(String, f64)>,
}

#[derive(Debug, Clone)]
pub struct TypicalityTable {
    pub cluster_labels: Vec<String>,
    pub category_labels: Vec<String>,
    /// Clusters x categories; NaN for excluded rows or columns.
    pub z: DenseMatrix,
    pub cluster_totals: Vec<f64>,
    pub category_totals: Vec<f64>,
    pub total: f64,
    /// Clusters with a positive total, in input order.
    pub clusters: Vec<ClusterTypicality>,
    pub warnings: Vec<String>,
}

/// Standardized over-representation of each category within each cluster.
///
/// `k` holds cluster x category counts. Clusters or categories with a zero
/// total (and categories holding the whole total) are excluded with a
/// warning.
pub fn typicality_zscores(
    k: &DenseMatrix,
    cluster_labels: &[String],
    category_labels: &[String],
    top_m: usize,
) -> Result<TypicalityTable> {
    if cluster_labels.len() != k.rows() || category_labels.len() != k.cols() {
        return Err(Error::invalid("label counts do not match the count matrix"));
    }
    if top_m == 0 {
        return Err(Error::invalid("top_m must be positive"));
    }
    if k.as_slice().iter().any(|&x| x < 0.0) {
        return Err(Error::invalid("typicality counts must be nonnegative"));
    }
    let ki = k.row_sums();
    let kj = k.col_sums();
    let total: f64 = ki.iter().sum();
    if !(total > 0.0) {
        return Err(Error::invalid("count matrix is empty"));
    }
    let mut warnings = Vec::new();
    for (l, &s) in cluster_labels.iter().zip(&ki) {
        if s == 0.0 {
            warnings.push(format!("cluster '{l}' has no counts and is excluded"));
        }
    }
    for (l, &s) in category_labels.iter().zip(&kj) {
        if s == 0.0 {
            warnings.push(format!("category '{l}' has no counts and is excluded"));
        } else if s == total {
            warnings.push(format!("category '{l}' holds every count and is excluded"));
        }
    }
    let valid_col = |j: usize| kj[j] > 0.0 && kj[j] < total;
    let z = DenseMatrix::from_fn(k.rows(), k.cols(), |i, j| {
        if ki[i] > 0.0 && valid_col(j) {
            typicality_z(k[(i, j)], ki[i], kj[j], total)
        } else {
            f64::NAN
        }
    });
    let clusters = (0..k.rows())
        .filter(|&i| ki[i] > 0.0)
        .map(|i| {
            let mut ranked: Vec<(usize, f64)> = (0..k.cols()).filter(|&j| valid_col(j)).map(|j| (j, z[(i, j)])).collect();
            // stable: equal scores keep category order
            ranked.sort_by(|a, b| b.1.total_cmp(&a.1));
            ClusterTypicality {
                label: cluster_labels[i].clone(),
                size: ki[i],
                top: ranked.into_iter().take(top_m).map(|(j, s)| (category_labels[j].clone(), s)).collect(),
            }
        })
        .collect();
    Ok(TypicalityTable {
        cluster_labels: cluster_labels.to_vec(),
        category_labels: category_labels.to_vec(),
        z,
        cluster_totals: ki,
        category_totals: kj,
        total,
        clusters,
        warnings,
    })
}

/// Sums the rows of `counts` by cluster (`assignment[i]` in `0..n_clusters`).
pub fn aggregate_by_cluster(counts: &DenseMatrix, assignment: &[usize], n_clusters: usize) -> Result<DenseMatrix> {
    if assignment.len() != counts.rows() {
        return Err(Error::invalid(format!("{} assignments for {} rows", assignment.len(), counts.rows())));
    }
    if let Some(&c) = assignment.iter().find(|&&c| c >= n_clusters) {
        return Err(Error::invalid(format!("cluster index {c} out of range")));
    }
    let mut data = vec![0.0; n_clusters * counts.cols()];
    for (i, &c) in assignment.iter().enumerate() {
        for (j, x) in counts.row(i).iter().enumerate() {
            data[c * counts.cols() + j] += x;
        }
    }
    DenseMatrix::new(n_clusters, counts.cols(), data)
}
