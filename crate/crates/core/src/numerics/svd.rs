use super::matrix::{argmax_abs, dot, DenseMatrix};
use crate::error::Result;

const MAX_SWEEPS: usize = 80;

/// Thin singular value decomposition `X = U diag(σ) V'`.
///
/// `u` is `m x k` and `v` is `n x k` with `k = min(m, n)`. Singular values are
/// sorted in nonincreasing order. Each pair is oriented so that the entry of
/// largest magnitude in the right vector is positive.
#[derive(Debug, Clone)]
pub struct SvdResult {
    pub singular_values: Vec<f64>,
    pub u: DenseMatrix,
    pub v: DenseMatrix,
}

impl SvdResult {
    pub fn rank(&self) -> usize {
        self.singular_values.len()
    }

    pub fn left(&self, k: usize) -> Vec<f64> {
        self.u.column(k)
    }

    pub fn right(&self, k: usize) -> Vec<f64> {
        self.v.column(k)
    }

    /// `U diag(σ) V'` rebuilt from the factors.
    pub fn reconstruct(&self) -> DenseMatrix {
        let mut out = DenseMatrix::zeros(self.u.rows(), self.v.rows());
        for (k, &s) in self.singular_values.iter().enumerate() {
            out.add_outer(s, &self.u.column(k), &self.v.column(k));
        }
        out
    }
}

/// Full (thin) SVD by one-sided Jacobi rotations.
///
/// The rotations are applied to the columns of the taller orientation of the
/// input, which keeps small singular values accurate to high relative
/// precision. Rank-deficient inputs get exact zero trailing singular values
/// and left vectors completed to an orthonormal set.
pub fn full_svd(m: &DenseMatrix) -> Result<SvdResult> {
    // DenseMatrix only holds finite values, but keep the contract explicit.
    if let Some(pos) = m.as_slice().iter().position(|x| !x.is_finite()) {
        return Err(crate::Error::NonFinite { row: pos / m.cols(), col: pos % m.cols() });
    }
    if m.rows() >= m.cols() {
        let (s, u, v) = jacobi_tall(m);
        Ok(finish(s, u, v, false))
    } else {
        let (s, u, v) = jacobi_tall(&m.transpose());
        Ok(finish(s, u, v, true))
    }
}

/// Returns singular values, left vectors and right vectors as column lists
/// (unsorted, unoriented) for `a` with `rows >= cols`.
fn jacobi_tall(a: &DenseMatrix) -> (Vec<f64>, Vec<Vec<f64>>, Vec<Vec<f64>>) {
    let (m, n) = a.shape();
    let mut cols: Vec<Vec<f64>> = (0..n).map(|j| a.column(j)).collect();
    let mut v: Vec<Vec<f64>> = (0..n)
        .map(|j| {
            let mut e = vec![0.0; n];
            e[j] = 1.0;
            e
        })
        .collect();
    let tol = f64::EPSILON * (m as f64).sqrt();

    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let alpha = dot(&cols[p], &cols[p]);
                let beta = dot(&cols[q], &cols[q]);
                let gamma = dot(&cols[p], &cols[q]);
                if gamma == 0.0 || gamma.abs() <= tol * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                let (lo, hi) = cols.split_at_mut(q);
                rotate(&mut lo[p], &mut hi[0], c, s);
                let (lo, hi) = v.split_at_mut(q);
                rotate(&mut lo[p], &mut hi[0], c, s);
            }
        }
        if !rotated {
            break;
        }
    }

    let sigma: Vec<f64> = cols.iter().map(|c| dot(c, c).sqrt()).collect();
    (sigma, cols, v)
}

#[inline]
fn rotate(x: &mut [f64], y: &mut [f64], c: f64, s: f64) {
    for (a, b) in x.iter_mut().zip(y.iter_mut()) {
        let (xa, yb) = (*a, *b);
        *a = c * xa - s * yb;
        *b = s * xa + c * yb;
    }
}

/// Sorts, normalizes, completes and orients the raw Jacobi output.
/// `u_raw[k]` is `sigma[k] * u_k` and `v` holds unit vectors of the rotated
/// factorization; `transposed` swaps the two sides at the end.
fn finish(sigma: Vec<f64>, u_raw: Vec<Vec<f64>>, v: Vec<Vec<f64>>, transposed: bool) -> SvdResult {
    let k = sigma.len();
    let m = u_raw.first().map_or(0, Vec::len);
    let n = v.first().map_or(0, Vec::len);
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| sigma[b].total_cmp(&sigma[a]).then(a.cmp(&b)));

    let smax = sigma.iter().cloned().fold(0.0, f64::max);
    let cutoff = smax * f64::EPSILON * (m.max(n) as f64);

    let mut values = Vec::with_capacity(k);
    let mut left: Vec<Option<Vec<f64>>> = Vec::with_capacity(k);
    let mut right = Vec::with_capacity(k);
    for &idx in &order {
        let s = sigma[idx];
        if s > cutoff && s > 0.0 {
            values.push(s);
            left.push(Some(u_raw[idx].iter().map(|x| x / s).collect()));
        } else {
            values.push(0.0);
            left.push(None);
        }
        right.push(v[idx].clone());
    }

    // Complete missing left vectors against the accepted ones, taking the
    // canonical vector with the largest residual each time.
    let mut accepted: Vec<Vec<f64>> = left.iter().flatten().cloned().collect();
    let left: Vec<Vec<f64>> = left
        .into_iter()
        .map(|col| match col {
            Some(c) => c,
            None => {
                let residual = |i: usize| {
                    let mut e = vec![0.0; m];
                    e[i] = 1.0;
                    for _ in 0..2 {
                        for b in &accepted {
                            let proj = dot(&e, b);
                            for (x, y) in e.iter_mut().zip(b) {
                                *x -= proj * y;
                            }
                        }
                    }
                    e
                };
                let mut best = residual(0);
                let mut best_norm = dot(&best, &best);
                for i in 1..m {
                    let e = residual(i);
                    let nrm = dot(&e, &e);
                    if nrm > best_norm {
                        best = e;
                        best_norm = nrm;
                    }
                }
                assert!(best_norm > 0.0, "unable to complete orthonormal basis");
                let norm = best_norm.sqrt();
                best.iter_mut().for_each(|x| *x /= norm);
                accepted.push(best.clone());
                best
            }
        })
        .collect();

    let (left, right) = if transposed { (right, left) } else { (left, right) };
    let mut u = DenseMatrix::from_columns(&left);
    let mut vm = DenseMatrix::from_columns(&right);
    for j in 0..k {
        let vj = vm.column(j);
        if vj[argmax_abs(&vj)] < 0.0 {
            let flipped: Vec<f64> = vj.iter().map(|x| -x).collect();
            vm.set_column(j, &flipped);
            let uj: Vec<f64> = u.column(j).iter().map(|x| -x).collect();
            u.set_column(j, &uj);
        }
    }
    SvdResult { singular_values: values, u, v: vm }
}
