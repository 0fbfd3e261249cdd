use super::matrix::{argmax_abs, norm1, norm2};
use crate::error::{Error, Result};

const MAX_BISECTIONS: usize = 60;
const L1_GAP: f64 = 1e-8;
/// Slack accepted on the budget bounds `1 <= c <= sqrt(len)`.
const BOUND_SLACK: f64 = 1e-12;

/// `sign(x_i) * max(|x_i| - delta, 0)` componentwise.
pub fn soft_threshold(x: &[f64], delta: f64) -> Result<Vec<f64>> {
    if !(delta >= 0.0) {
        return Err(Error::invalid(format!("soft-threshold delta must be nonnegative, got {delta}")));
    }
    Ok(soft(x, delta))
}

#[inline]
fn soft(x: &[f64], delta: f64) -> Vec<f64> {
    x.iter()
        .map(|&v| {
            let m = v.abs() - delta;
            if m > 0.0 {
                m.copysign(v)
            } else {
                0.0
            }
        })
        .collect()
}

/// L1/L2 ratio of `S(x, delta)`, or `None` when everything was shrunk to zero.
fn ratio(x: &[f64], delta: f64) -> Option<f64> {
    let s = soft(x, delta);
    let l2 = norm2(&s);
    (l2 > 0.0).then(|| norm1(&s) / l2)
}

/// Outcome of the L1 budget search.
#[derive(Debug, Clone, PartialEq)]
pub struct L1Projection {
    /// Unit vector `S(x, delta) / ||S(x, delta)||_2`.
    pub vector: Vec<f64>,
    /// Threshold that was applied. `None` when the 1-sparse fallback was used
    /// (tied maxima that no threshold can separate).
    pub delta: Option<f64>,
}

/// Maximizer of `w'x` over unit vectors with `||w||_1 <= c`.
///
/// The threshold is the smallest `delta` whose normalized soft-thresholded
/// vector meets the budget, located by bisection (stops once the L1 gap is
/// below 1e-8 or after 60 halvings, always returning the feasible endpoint).
pub fn l1_project(x: &[f64], c: f64) -> Result<L1Projection> {
    let n = x.len();
    if n == 0 {
        return Err(Error::invalid("empty vector"));
    }
    let upper = (n as f64).sqrt();
    if !(c >= 1.0 - BOUND_SLACK && c <= upper + BOUND_SLACK) {
        return Err(Error::invalid(format!("L1 budget {c} outside [1, sqrt({n})]")));
    }
    let l2 = norm2(x);
    if l2 == 0.0 {
        return Err(Error::Degenerate("cannot normalize an all-zero vector".into()));
    }
    if norm1(x) / l2 <= c {
        return Ok(L1Projection { vector: x.iter().map(|v| v / l2).collect(), delta: Some(0.0) });
    }

    // Largest magnitude strictly below the maximum: at that threshold only the
    // maximal entries survive.
    let top = x.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let second = x.iter().map(|v| v.abs()).filter(|&a| a < top).fold(f64::NEG_INFINITY, f64::max);
    let ties = x.iter().filter(|v| v.abs() == top).count();
    if second == f64::NEG_INFINITY || (ties as f64).sqrt() > c + BOUND_SLACK {
        return Ok(one_sparse(x));
    }

    let mut lo = 0.0;
    let mut hi = second.max(0.0);
    for _ in 0..MAX_BISECTIONS {
        let gap = c - ratio(x, hi).unwrap_or(1.0);
        if gap <= L1_GAP {
            break;
        }
        let mid = 0.5 * (lo + hi);
        match ratio(x, mid) {
            Some(r) if r <= c => hi = mid,
            _ => lo = mid,
        }
    }
    let delta = exact_root(x, c, hi).unwrap_or(hi);
    let s = soft(x, delta);
    let l2 = norm2(&s);
    Ok(L1Projection { vector: s.iter().map(|v| v / l2).collect(), delta: Some(delta) })
}

/// Solves `||S(x,d)||_1 = c ||S(x,d)||_2` in closed form on the support that
/// survives at the bracketing threshold `hi`, so the budget binds exactly.
/// Returns `None` if the root leaves that support's interval or is infeasible.
fn exact_root(x: &[f64], c: f64, hi: f64) -> Option<f64> {
    let (mut m, mut s1, mut s2) = (0.0, 0.0, 0.0);
    let mut inside_min = f64::INFINITY;
    let mut outside_max: f64 = 0.0;
    for a in x.iter().map(|v| v.abs()) {
        if a > hi {
            m += 1.0;
            s1 += a;
            s2 += a * a;
            inside_min = inside_min.min(a);
        } else {
            outside_max = outside_max.max(a);
        }
    }
    let c2 = c * c;
    if m == 0.0 || (m - c2).abs() < 1e-12 {
        return None;
    }
    // m (m - c^2) d^2 - 2 s1 (m - c^2) d + (s1^2 - c^2 s2) = 0
    let mean = s1 / m;
    let disc = mean * mean - (s1 * s1 - c2 * s2) / (m * (m - c2));
    if disc < 0.0 {
        return None;
    }
    let root = disc.sqrt();
    [mean - root, mean + root]
        .into_iter()
        .filter(|&d| d >= outside_max && d < inside_min && d <= hi)
        .find(|&d| ratio(x, d).is_some_and(|r| r <= c + 1e-12))
}

/// Unit vector maximizing `w'x` subject to `||w||_1 <= c`.
pub fn l1_constrained_unit_vector(x: &[f64], c: f64) -> Result<Vec<f64>> {
    l1_project(x, c).map(|p| p.vector)
}

/// `sign(x_k) e_k` at the lowest index of maximal magnitude.
pub(crate) fn one_sparse(x: &[f64]) -> L1Projection {
    let k = argmax_abs(x);
    let mut w = vec![0.0; x.len()];
    w[k] = if x[k] < 0.0 { -1.0 } else { 1.0 };
    L1Projection { vector: w, delta: None }
}
