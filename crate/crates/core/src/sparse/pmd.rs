use super::constraint::{Budget, SparsityConstraint};
use super::search::{nnz_target_search, NnzSearch};
use crate::error::{Axis, Error, Result};
use crate::numerics::{argmax_abs, count_nonzero, dot, full_svd, l1_project, norm2, norm_inf, one_sparse, DenseMatrix};

/// Unit-norm tolerance accepted by [`ppmd_deflate`].
const UNIT_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy)]
pub struct PmdOptions {
    pub max_iter: usize,
    /// Stop once the L-infinity change of `v` drops below this.
    pub tol: f64,
}

impl Default for PmdOptions {
    fn default() -> Self {
        PmdOptions { max_iter: 200, tol: 1e-7 }
    }
}

/// One pseudo-singular triplet `(u, v, alpha)`.
#[derive(Debug, Clone)]
pub struct SparseFactor {
    pub u: Vec<f64>,
    pub v: Vec<f64>,
    /// `u' Z v` on the matrix the factor is reported against.
    pub alpha: f64,
    /// `alpha^2`
    pub lambda: f64,
    pub nnz_u: usize,
    pub nnz_v: usize,
    pub constraint: SparsityConstraint,
    /// Budgets actually applied (after resolving coupled or nonzero targets).
    pub budget: Budget,
    pub iterations: usize,
    /// False when the iteration limit was hit; the best iterate is returned.
    pub converged: bool,
}

/// Rank-1 penalized matrix decomposition of `z` under `constraint`.
///
/// Alternates `u <- argmax u'Zv` and `v <- argmax u'Zv` over unit vectors
/// within the L1 budgets, starting from the leading right singular vector.
pub fn pmd_rank1(z: &DenseMatrix, constraint: &SparsityConstraint) -> Result<SparseFactor> {
    pmd_rank1_with(z, constraint, &PmdOptions::default())
}

pub fn pmd_rank1_with(z: &DenseMatrix, constraint: &SparsityConstraint, opts: &PmdOptions) -> Result<SparseFactor> {
    let (budget, _) = resolve_budget(z, constraint, opts)?;
    let mut f = pmd_budget(z, budget, opts, None, None)?;
    f.constraint = *constraint;
    Ok(f)
}

/// Budgets for `constraint` on `z`, running the grid search for nonzero targets.
pub(crate) fn resolve_budget(
    z: &DenseMatrix,
    constraint: &SparsityConstraint,
    opts: &PmdOptions,
) -> Result<(Budget, Option<NnzSearch>)> {
    match *constraint {
        SparsityConstraint::NonzeroTarget { count, axis } => {
            let found = nnz_target_search(z, count, axis, None, opts)?;
            let budget = match axis {
                Axis::Rows => Budget { sumabsu: Some(found.sumabs), sumabsv: None },
                Axis::Cols => Budget { sumabsu: None, sumabsv: Some(found.sumabs) },
            };
            Ok((budget, Some(found)))
        }
        _ => Ok((constraint.budget(z.rows(), z.cols())?, None)),
    }
}

/// Objective `u'Zv` recorded after every half-step (u-update, then v-update).
pub fn pmd_objective_trace(z: &DenseMatrix, budget: Budget, opts: &PmdOptions) -> Result<Vec<f64>> {
    let mut trace = Vec::new();
    pmd_budget(z, budget, opts, None, Some(&mut trace))?;
    Ok(trace)
}

/// Leading right singular vector, the warm start for the alternating updates.
pub(crate) fn leading_right_vector(z: &DenseMatrix) -> Result<Vec<f64>> {
    let svd = full_svd(z)?;
    if svd.singular_values[0] == 0.0 {
        return Err(Error::Degenerate("cannot decompose an all-zero matrix".into()));
    }
    Ok(svd.right(0))
}

pub(crate) fn pmd_budget(
    z: &DenseMatrix,
    budget: Budget,
    opts: &PmdOptions,
    init: Option<&[f64]>,
    mut trace: Option<&mut Vec<f64>>,
) -> Result<SparseFactor> {
    let budget = budget.validated(z.rows(), z.cols())?;
    let mut v = match init {
        Some(v0) => v0.to_vec(),
        None => leading_right_vector(z)?,
    };
    let mut u = update(&z.mul_vec(&v), budget.sumabsu)?;
    if let Some(t) = trace.as_deref_mut() {
        t.push(z.bilinear(&u, &v));
    }

    let mut best = (f64::NEG_INFINITY, u.clone(), v.clone());
    let mut converged = false;
    let mut iterations = 0;
    for it in 1..=opts.max_iter {
        iterations = it;
        if it > 1 {
            u = update(&z.mul_vec(&v), budget.sumabsu)?;
            if let Some(t) = trace.as_deref_mut() {
                t.push(z.bilinear(&u, &v));
            }
        }
        let v_new = update(&z.tr_mul_vec(&u), budget.sumabsv)?;
        let change = v_new.iter().zip(&v).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        v = v_new;
        let objective = z.bilinear(&u, &v);
        if let Some(t) = trace.as_deref_mut() {
            t.push(objective);
        }
        if objective > best.0 {
            best = (objective, u.clone(), v.clone());
        }
        if change < opts.tol {
            converged = true;
            break;
        }
    }
    let (mut u, mut v) = if converged { (u, v) } else { (best.1, best.2) };

    if v[argmax_abs(&v)] < 0.0 {
        u.iter_mut().for_each(|x| *x = -*x);
        v.iter_mut().for_each(|x| *x = -*x);
    }
    let alpha = z.bilinear(&u, &v);
    Ok(SparseFactor {
        nnz_u: count_nonzero(&u),
        nnz_v: count_nonzero(&v),
        u,
        v,
        alpha,
        lambda: alpha * alpha,
        constraint: match (budget.sumabsu, budget.sumabsv) {
            (Some(su), Some(sv)) => SparsityConstraint::Absolute { sumabsu: su, sumabsv: sv },
            (None, Some(sv)) => SparsityConstraint::UnpenalizedRows { sumabsv: sv },
            (su, None) => SparsityConstraint::Absolute {
                sumabsu: su.unwrap_or((z.rows() as f64).sqrt()),
                sumabsv: (z.cols() as f64).sqrt(),
            },
        },
        budget,
        iterations,
        converged,
    })
}

/// Best unit response to `x` within an optional L1 budget. An all-zero
/// thresholded vector falls back to the 1-sparse solution.
fn update(x: &[f64], budget: Option<f64>) -> Result<Vec<f64>> {
    let n = norm2(x);
    if n == 0.0 {
        return Err(Error::Degenerate("alternating update received a zero vector".into()));
    }
    match budget {
        None => Ok(x.iter().map(|v| v / n).collect()),
        Some(c) => {
            let w = l1_project(x, c)?.vector;
            if w.iter().all(|&v| v == 0.0) {
                Ok(one_sparse(x).vector)
            } else {
                Ok(w)
            }
        }
    }
}

/// Projected deflation `(I - uu') Z (I - vv')`.
pub fn ppmd_deflate(z: &DenseMatrix, f: &SparseFactor) -> Result<DenseMatrix> {
    deflate(z, &f.u, &f.v)
}

pub fn deflate(z: &DenseMatrix, u: &[f64], v: &[f64]) -> Result<DenseMatrix> {
    if u.len() != z.rows() || v.len() != z.cols() {
        return Err(Error::invalid("deflation vectors do not match the matrix shape"));
    }
    for (name, w) in [("u", u), ("v", v)] {
        let n = norm2(w);
        if (n - 1.0).abs() > UNIT_TOL {
            return Err(Error::invalid(format!("deflation requires a unit {name}, got norm {n}")));
        }
    }
    // Z (I - vv')
    let zv = z.mul_vec(v);
    let mut y = z.clone();
    y.add_outer(-1.0, &zv, v);
    // (I - uu') Y
    let uy = y.tr_mul_vec(u);
    y.add_outer(-1.0, u, &uy);
    Ok(y)
}

/// `(||Z'v||_inf, ||u'Z'||_inf)` for a deflated matrix.
pub fn deflation_residual(deflated: &DenseMatrix, u: &[f64], v: &[f64]) -> (f64, f64) {
    (norm_inf(&deflated.mul_vec(v)), norm_inf(&deflated.tr_mul_vec(u)))
}

impl SparseFactor {
    /// Whether `v` is proportional to `other` (up to `tol` after normalization).
    pub fn v_proportional_to(&self, other: &[f64], tol: f64) -> bool {
        proportional(&self.v, other, tol)
    }
}

pub(crate) fn proportional(a: &[f64], b: &[f64], tol: f64) -> bool {
    let (na, nb) = (norm2(a), norm2(b));
    if na == 0.0 || nb == 0.0 {
        return na == nb;
    }
    let cos = dot(a, b) / (na * nb);
    1.0 - cos.abs() < tol
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::norm1;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random(m: usize, n: usize, seed: u64) -> DenseMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        DenseMatrix::from_fn(m, n, |_, _| rng.gen_range(-1.0..1.0))
    }

    #[test]
    fn inactive_budgets_reproduce_leading_triplet() {
        for seed in 0..10 {
            let z = random(8 + seed as usize, 5, seed);
            let svd = full_svd(&z).unwrap();
            let (i, j) = z.shape();
            let f = pmd_rank1(
                &z,
                &SparsityConstraint::Absolute { sumabsu: (i as f64).sqrt(), sumabsv: (j as f64).sqrt() },
            )
            .unwrap();
            assert!((f.alpha - svd.singular_values[0]).abs() < 1e-8);
            let s = dot(&f.v, &svd.right(0)).signum();
            for (a, b) in f.v.iter().zip(svd.right(0)) {
                assert!((a - s * b).abs() < 1e-8);
            }
            for (a, b) in f.u.iter().zip(svd.left(0)) {
                assert!((a - s * b).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn factor_respects_budgets_and_orientation() {
        let z = random(10, 12, 3);
        let f = pmd_rank1(&z, &SparsityConstraint::Absolute { sumabsu: 1.5, sumabsv: 2.0 }).unwrap();
        assert!((norm2(&f.u) - 1.0).abs() < 1e-12);
        assert!((norm2(&f.v) - 1.0).abs() < 1e-12);
        assert!(norm1(&f.u) <= 1.5 + 1e-8);
        assert!(norm1(&f.v) <= 2.0 + 1e-8);
        assert!(f.alpha >= 0.0);
        assert!(f.v[argmax_abs(&f.v)] > 0.0);
        assert!(f.nnz_u < 10 && f.nnz_v < 12);
        assert!(f.converged);
    }

    #[test]
    fn unit_budget_gives_one_sparse_factor() {
        let z = random(6, 7, 8);
        let f = pmd_rank1(&z, &SparsityConstraint::Absolute { sumabsu: 1.0, sumabsv: 1.0 }).unwrap();
        assert_eq!((f.nnz_u, f.nnz_v), (1, 1));
    }

    #[test]
    fn unpenalized_rows_are_dense() {
        let z = random(6, 9, 21);
        let f = pmd_rank1(&z, &SparsityConstraint::UnpenalizedRows { sumabsv: 1.3 }).unwrap();
        assert_eq!(f.nnz_u, 6);
        assert!(f.nnz_v < 9);
        assert_eq!(f.budget.sumabsu, None);
    }

    #[test]
    fn objective_is_monotone_per_half_step() {
        for seed in 0..20 {
            let z = random(7, 6, 100 + seed);
            let budget = Budget { sumabsu: Some(1.4), sumabsv: Some(1.7) };
            let trace = pmd_objective_trace(&z, budget, &PmdOptions::default()).unwrap();
            // the warm start v0 is not within the v budget, so the first
            // comparison starts from the first feasible pair
            for w in trace[1..].windows(2) {
                assert!(w[1] >= w[0] - 1e-12, "seed {seed}: {trace:?}");
            }
        }
    }

    /// Random feasible pairs: any unit u (row budget inactive) and unit v with a
    /// small random support, kept only when inside the L1 ball.
    #[test]
    fn alpha_dominates_random_feasible_pairs() {
        let z = random(6, 5, 77);
        let (su, sv) = ((6.0f64).sqrt(), 1.5);
        let f = pmd_rank1(&z, &SparsityConstraint::Absolute { sumabsu: su, sumabsv: sv }).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut checked = 0;
        while checked < 10_000 {
            let mut v: Vec<f64> = (0..5).map(|_| rng.gen_range(-1.0..1.0)).collect();
            // random support of size 1..=3 keeps a useful fraction feasible
            let keep = rng.gen_range(1..=3);
            for x in v.iter_mut().skip(keep) {
                *x = 0.0;
            }
            let perm_seed = rng.gen_range(0..5);
            v.rotate_right(perm_seed);
            let n = norm2(&v);
            if n == 0.0 {
                continue;
            }
            v.iter_mut().for_each(|x| *x /= n);
            if norm1(&v) > sv {
                continue;
            }
            let mut u: Vec<f64> = (0..6).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let nu = norm2(&u);
            u.iter_mut().for_each(|x| *x /= nu);
            assert!(z.bilinear(&u, &v) <= f.alpha + 1e-9);
            checked += 1;
        }
    }

    #[test]
    fn deflation_annihilates_extracted_directions() {
        let z = random(9, 7, 4);
        let f = pmd_rank1(&z, &SparsityConstraint::Absolute { sumabsu: 1.8, sumabsv: 1.6 }).unwrap();
        let d = ppmd_deflate(&z, &f).unwrap();
        let (rv, ru) = deflation_residual(&d, &f.u, &f.v);
        assert!(rv <= 1e-12 && ru <= 1e-12, "{rv} {ru}");

        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut u: Vec<f64> = (0..9).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let mut v: Vec<f64> = (0..7).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let (nu, nv) = (norm2(&u), norm2(&v));
        u.iter_mut().for_each(|x| *x /= nu);
        v.iter_mut().for_each(|x| *x /= nv);
        let d = deflate(&z, &u, &v).unwrap();
        let (rv, ru) = deflation_residual(&d, &u, &v);
        assert!(rv <= 1e-12 && ru <= 1e-12);
    }

    #[test]
    fn deflating_an_exact_pair_removes_it() {
        let z = random(6, 4, 9);
        let svd = full_svd(&z).unwrap();
        let (u, v) = (svd.left(0), svd.right(0));
        let d = deflate(&z, &u, &v).unwrap();
        let mut expected = z.clone();
        expected.add_outer(-svd.singular_values[0], &u, &v);
        assert!(d.sub(&expected).max_abs() < 1e-12);
        let after = full_svd(&d).unwrap();
        for k in 1..4 {
            assert!((after.singular_values[k - 1] - svd.singular_values[k]).abs() < 1e-12);
        }
        assert!(after.singular_values[3] < 1e-12);
    }

    #[test]
    fn deflation_rejects_non_unit_vectors() {
        let z = random(3, 3, 2);
        assert!(deflate(&z, &[1.0, 1.0, 0.0], &[1.0, 0.0, 0.0]).is_err());
    }

    #[test]
    fn zero_matrix_is_degenerate() {
        let z = DenseMatrix::zeros(3, 3);
        assert!(matches!(
            pmd_rank1(&z, &SparsityConstraint::Coupled { sumabs: 0.8 }),
            Err(Error::Degenerate(_))
        ));
    }
}
