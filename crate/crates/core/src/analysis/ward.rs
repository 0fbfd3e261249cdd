use crate::error::{Error, Result};
use crate::numerics::DenseMatrix;

/// Lance–Williams form of Ward's criterion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum WardVariant {
    /// Update applied to squared Euclidean distances; heights are reported on
    /// the distance scale.
    #[default]
    D2,
    /// Update applied to the unsquared distances.
    D,
}

/// One agglomeration step. Leaves are nodes `0..n`, the cluster formed by
/// merge `s` is node `n + s`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Merge {
    pub left: usize,
    pub right: usize,
    pub height: f64,
    /// Leaves under the new node.
    pub size: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dendrogram {
    pub labels: Vec<String>,
    pub merges: Vec<Merge>,
}

impl Dendrogram {
    pub fn n_leaves(&self) -> usize {
        self.labels.len()
    }

    /// Leaves in drawing order (left subtree first).
    pub fn leaf_order(&self) -> Vec<usize> {
        let n = self.n_leaves();
        if self.merges.is_empty() {
            return (0..n).collect();
        }
        let mut out = Vec::with_capacity(n);
        let mut stack = vec![n + self.merges.len() - 1];
        while let Some(node) = stack.pop() {
            if node < n {
                out.push(node);
            } else {
                let m = &self.merges[node - n];
                stack.push(m.right);
                stack.push(m.left);
            }
        }
        out
    }
}

/// Agglomerative Ward clustering of the rows of `coords`.
///
/// Among equal merge costs the pair that comes first in input order wins.
pub fn ward_cluster(coords: &DenseMatrix, labels: &[String], variant: WardVariant) -> Result<Dendrogram> {
    let n = coords.rows();
    if labels.len() != n {
        return Err(Error::invalid(format!("{} labels for {n} points", labels.len())));
    }
    if n == 0 || coords.cols() == 0 {
        return Err(Error::invalid("no points to cluster"));
    }
    // Dissimilarities on which the update runs.
    let mut d = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..i {
            let sq: f64 = coords.row(i).iter().zip(coords.row(j)).map(|(a, b)| (a - b) * (a - b)).sum();
            let v = match variant {
                WardVariant::D2 => sq,
                WardVariant::D => sq.sqrt(),
            };
            d[i][j] = v;
            d[j][i] = v;
        }
    }
    // slot -> (node id, size); slots are reused by the merged cluster
    let mut node: Vec<usize> = (0..n).collect();
    let mut size: Vec<usize> = vec![1; n];
    let mut active: Vec<bool> = vec![true; n];
    let mut merges = Vec::with_capacity(n.saturating_sub(1));

    for step in 0..n.saturating_sub(1) {
        let mut best: Option<(usize, usize, f64)> = None;
        for i in 0..n {
            if !active[i] {
                continue;
            }
            for j in (i + 1)..n {
                if active[j] && best.is_none_or(|(_, _, b)| d[i][j] < b) {
                    best = Some((i, j, d[i][j]));
                }
            }
        }
        let (i, j, dij) = best.expect("at least two active clusters");
        let (ni, nj) = (size[i] as f64, size[j] as f64);
        for k in 0..n {
            if !active[k] || k == i || k == j {
                continue;
            }
            let nk = size[k] as f64;
            let v = ((ni + nk) * d[k][i] + (nj + nk) * d[k][j] - nk * dij) / (ni + nj + nk);
            d[k][i] = v;
            d[i][k] = v;
        }
        let height = match variant {
            WardVariant::D2 => dij.max(0.0).sqrt(),
            WardVariant::D => dij,
        };
        let (a, b) = (node[i].min(node[j]), node[i].max(node[j]));
        merges.push(Merge { left: a, right: b, height, size: size[i] + size[j] });
        node[i] = n + step;
        size[i] += size[j];
        active[j] = false;
    }
    Ok(Dendrogram { labels: labels.to_vec(), merges })
}

/// Cluster index per leaf after undoing the `k - 1` last merges. Clusters
/// are numbered `0..k` by first appearance in input order.
pub fn cut_tree(d: &Dendrogram, k: usize) -> Result<Vec<usize>> {
    let n = d.n_leaves();
    if k == 0 || k > n {
        return Err(Error::invalid(format!("cluster count must be in 1..={n}, got {k}")));
    }
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    // representative leaf of each internal node
    let mut rep: Vec<usize> = (0..n).collect();
    for m in &d.merges[..n - k] {
        let (a, b) = (find(&mut parent, rep[m.left]), find(&mut parent, rep[m.right]));
        parent[b] = a;
        rep.push(a);
    }
    let mut ids = vec![usize::MAX; n];
    let mut next = 0;
    let mut out = vec![0; n];
    for leaf in 0..n {
        let root = find(&mut parent, leaf);
        if ids[root] == usize::MAX {
            ids[root] = next;
            next += 1;
        }
        out[leaf] = ids[root];
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn labels(n: usize) -> Vec<String> {
        (0..n).map(|i| format!("p{i}")).collect()
    }

    fn random_points(n: usize, seed: u64) -> DenseMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        DenseMatrix::from_fn(n, 2, |_, _| rng.gen_range(-1.0..1.0))
    }

    /// Exhaustive Ward agglomeration from cluster centroids: merge the pair
    /// with the smallest increase of within-cluster sum of squares.
    fn centroid_oracle(x: &DenseMatrix) -> Vec<f64> {
        let mut clusters: Vec<Vec<usize>> = (0..x.rows()).map(|i| vec![i]).collect();
        let centroid = |c: &[usize]| -> Vec<f64> {
            (0..x.cols()).map(|d| c.iter().map(|&i| x[(i, d)]).sum::<f64>() / c.len() as f64).collect()
        };
        let mut heights = Vec::new();
        while clusters.len() > 1 {
            let mut best = (0, 0, f64::INFINITY);
            for a in 0..clusters.len() {
                for b in (a + 1)..clusters.len() {
                    let (ca, cb) = (centroid(&clusters[a]), centroid(&clusters[b]));
                    let (na, nb) = (clusters[a].len() as f64, clusters[b].len() as f64);
                    let dist2: f64 = ca.iter().zip(&cb).map(|(p, q)| (p - q) * (p - q)).sum();
                    let cost = na * nb / (na + nb) * dist2;
                    if cost < best.2 {
                        best = (a, b, cost);
                    }
                }
            }
            let moved = clusters.remove(best.1);
            clusters[best.0].extend(moved);
            heights.push((2.0 * best.2).sqrt());
        }
        heights
    }

    #[test]
    fn heights_match_exhaustive_oracle() {
        for seed in 0..50 {
            let x = random_points(10, seed);
            let d = ward_cluster(&x, &labels(10), WardVariant::D2).unwrap();
            let oracle = centroid_oracle(&x);
            assert_eq!(d.merges.len(), 9);
            for (m, h) in d.merges.iter().zip(&oracle) {
                assert!((m.height - h).abs() < 1e-10, "seed {seed}");
            }
        }
    }

    #[test]
    fn heights_are_monotone_and_decompose_total_variance() {
        let x = random_points(15, 7);
        let d = ward_cluster(&x, &labels(15), WardVariant::D2).unwrap();
        for w in d.merges.windows(2) {
            assert!(w[1].height >= w[0].height - 1e-12);
        }
        let mean: Vec<f64> = (0..2).map(|c| x.column(c).iter().sum::<f64>() / 15.0).collect();
        let tss: f64 = (0..15).map(|i| (0..2).map(|c| (x[(i, c)] - mean[c]).powi(2)).sum::<f64>()).sum();
        let sum: f64 = d.merges.iter().map(|m| m.height * m.height / 2.0).sum();
        assert!((sum - tss).abs() < 1e-10);
        assert_eq!(d.merges.last().unwrap().size, 15);
    }

    #[test]
    fn separated_clouds_split_at_the_top() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let x = DenseMatrix::from_fn(12, 2, |i, _| if i < 5 { 10.0 } else { -10.0 } + rng.gen_range(-0.5..0.5));
        let d = ward_cluster(&x, &labels(12), WardVariant::D2).unwrap();
        let cut = cut_tree(&d, 2).unwrap();
        assert!(cut[..5].iter().all(|&c| c == 0));
        assert!(cut[5..].iter().all(|&c| c == 1));
    }

    #[test]
    fn collinear_tie_takes_first_pair() {
        let x = DenseMatrix::from_rows(&[vec![0.0], vec![1.0], vec![2.0]]).unwrap();
        let d = ward_cluster(&x, &labels(3), WardVariant::D2).unwrap();
        assert_eq!((d.merges[0].left, d.merges[0].right), (0, 1));
        assert!((d.merges[0].height - 1.0).abs() < 1e-15);
        assert_eq!((d.merges[1].left, d.merges[1].right), (2, 3));
    }

    #[test]
    fn ward_d_uses_unsquared_update() {
        let x = DenseMatrix::from_rows(&[vec![0.0], vec![1.0], vec![3.0]]).unwrap();
        let d = ward_cluster(&x, &labels(3), WardVariant::D).unwrap();
        // d(2, {0,1}) = ((1+1) 3 + (1+1) 2 - 1 * 1) / 3 = 3
        assert!((d.merges[1].height - 3.0).abs() < 1e-15);
        let d2 = ward_cluster(&x, &labels(3), WardVariant::D2).unwrap();
        // ((2) 9 + (2) 4 - 1) / 3 = 25/3
        assert!((d2.merges[1].height - (25.0f64 / 3.0).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn duplicates_merge_at_zero() {
        let x = DenseMatrix::from_rows(&[vec![1.0, 1.0], vec![1.0, 1.0], vec![4.0, 5.0]]).unwrap();
        let d = ward_cluster(&x, &labels(3), WardVariant::D2).unwrap();
        assert_eq!(d.merges[0].height, 0.0);
    }

    #[test]
    fn cut_extremes() {
        let x = random_points(8, 9);
        let d = ward_cluster(&x, &labels(8), WardVariant::D2).unwrap();
        assert!(cut_tree(&d, 1).unwrap().iter().all(|&c| c == 0));
        assert_eq!(cut_tree(&d, 8).unwrap(), (0..8).collect::<Vec<_>>());
        assert!(cut_tree(&d, 0).is_err() && cut_tree(&d, 9).is_err());
        assert_eq!(d.leaf_order().len(), 8);
    }

    /// Two leaves share a cluster iff the first merge joining them lies below
    /// the cut threshold.
    #[test]
    fn cut_matches_height_threshold() {
        let x = random_points(10, 11);
        let d = ward_cluster(&x, &labels(10), WardVariant::D2).unwrap();
        for k in 1..=10 {
            let cut = cut_tree(&d, k).unwrap();
            let kept = 10 - k;
            // leaves under each node
            let mut members: Vec<Vec<usize>> = (0..10).map(|i| vec![i]).collect();
            let mut joined_at = vec![vec![usize::MAX; 10]; 10];
            for (s, m) in d.merges.iter().enumerate() {
                let (l, r) = (members[m.left].clone(), members[m.right].clone());
                for &a in &l {
                    for &b in &r {
                        joined_at[a][b] = s;
                        joined_at[b][a] = s;
                    }
                }
                members.push([l, r].concat());
            }
            for a in 0..10 {
                for b in 0..10 {
                    if a != b {
                        assert_eq!(cut[a] == cut[b], joined_at[a][b] < kept, "k={k}");
                    }
                }
            }
        }
    }

    proptest! {
        #[test]
        fn cuts_refine(seed in 0u64..1000, n in 2usize..15) {
            let x = random_points(n, seed);
            let d = ward_cluster(&x, &labels(n), WardVariant::D2).unwrap();
            for k in 2..=n {
                let fine = cut_tree(&d, k).unwrap();
                let coarse = cut_tree(&d, k - 1).unwrap();
                prop_assert_eq!(fine.iter().max().copied(), Some(k - 1));
                for a in 0..n {
                    for b in 0..n {
                        if fine[a] == fine[b] {
                            prop_assert_eq!(coarse[a], coarse[b]);
                        }
                    }
                }
            }
        }
    }
}
