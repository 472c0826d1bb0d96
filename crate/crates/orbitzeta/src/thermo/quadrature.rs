//! Composite Gauss–Legendre quadrature with a node-doubling error check.

use thiserror::Error;

use crate::fit::pairwise_sum;

#[derive(Debug, Error)]
pub enum QuadratureError {
    #[error("quadrature failed to converge: error {achieved:.3e} > tolerance {wanted:.3e}")]
    NonConvergent { achieved: f64, wanted: f64 },
    #[error("integrand returned a non-finite value at t = {0}")]
    NonFinite(f64),
}

/// Nodes and weights of the n-point Gauss–Legendre rule on [−1, 1].
///
/// Roots of the Legendre polynomial by Newton iteration from the Chebyshev
/// initial guess; weights from the derivative. Deterministic: the iteration
/// runs a fixed point-wise convergence test with no environment dependence.
pub fn gauss_legendre_nodes(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "need at least one node");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for k in 0..n {
        let mut x = (std::f64::consts::PI * (k as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let step = p / d;
            x -= step;
            if step.abs() <= 1e-15 * (1.0 + x.abs()) {
                let (_, d2) = legendre_with_derivative(n, x);
                dp = d2;
                break;
            }
        }
        nodes[k] = x;
        weights[k] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    // Newton from the Chebyshev guess already lands in descending order;
    // flip to ascending for readability.
    nodes.reverse();
    weights.reverse();
    (nodes, weights)
}

/// Legendre polynomial P_n and its derivative at x, by the three-term
/// recurrence.
fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p_prev = 1.0;
    let mut p = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for m in 2..=n {
        let m = m as f64;
        let next = ((2.0 * m - 1.0) * x * p - (m - 1.0) * p_prev) / m;
        p_prev = p;
        p = next;
    }
    let d = (n as f64) * (x * p - p_prev) / (x * x - 1.0);
    (p, d)
}

/// ∫_a^b f, splitting [a, b] into segments of length ≤ 1 and applying the
/// given rule on each. Summation order is fixed, so results are
/// bit-reproducible.
fn composite<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    nodes: &[f64],
    weights: &[f64],
) -> Result<f64, QuadratureError> {
    let segments = ((b - a).abs().ceil() as usize).max(1);
    let width = (b - a) / segments as f64;
    let mut terms = Vec::with_capacity(segments * nodes.len());
    for seg in 0..segments {
        let lo = a + seg as f64 * width;
        let mid = lo + 0.5 * width;
        let half = 0.5 * width;
        for (x, w) in nodes.iter().zip(weights) {
            let t = mid + half * x;
            let v = f(t);
            if !v.is_finite() {
                return Err(QuadratureError::NonFinite(t));
            }
            terms.push(w * half * v);
        }
    }
    Ok(pairwise_sum(&terms))
}

/// ∫_a^b f with `nodes_per_unit` Gauss–Legendre nodes per unit length,
/// validated by doubling the node count: the difference between the two
/// rules must fall inside `rel_tol` (relative to the finer value, with an
/// absolute floor of 1). Returns the finer value.
pub fn integrate<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    nodes_per_unit: usize,
    rel_tol: f64,
) -> Result<f64, QuadratureError> {
    let n = nodes_per_unit.max(2);
    let (x1, w1) = gauss_legendre_nodes(n);
    let (x2, w2) = gauss_legendre_nodes(2 * n);
    let coarse = composite(&f, a, b, &x1, &w1)?;
    let fine = composite(&f, a, b, &x2, &w2)?;
    let err = (fine - coarse).abs();
    let allowed = rel_tol * fine.abs().max(1.0);
    if err > allowed {
        return Err(QuadratureError::NonConvergent { achieved: err, wanted: allowed });
    }
    Ok(fine)
}
