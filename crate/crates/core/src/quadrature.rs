//! Quadrature rules shared by the integral oracles.

use std::num::NonZeroUsize;

use gauss_quad::legendre::GaussLegendre;

/// Gauss–Legendre nodes and weights mapped to `[a, b]`.
pub fn gauss_legendre(points: usize, a: f64, b: f64) -> Vec<(f64, f64)> {
    let rule = GaussLegendre::new(NonZeroUsize::new(points.max(1)).expect("nonzero"));
    let half = 0.5 * (b - a);
    let mid = 0.5 * (b + a);
    rule.as_node_weight_pairs().iter().map(|&(x, w)| (mid + half * x, half * w)).collect()
}

/// Tensor-product rule on a box given per-axis rules.
pub fn tensor(axes: &[Vec<(f64, f64)>]) -> Vec<(Vec<f64>, f64)> {
    let mut out: Vec<(Vec<f64>, f64)> = vec![(Vec::new(), 1.0)];
    for axis in axes {
        out = out
            .into_iter()
            .flat_map(|(x, w)| {
                axis.iter().map(move |&(y, v)| {
                    let mut p = x.clone();
                    p.push(y);
                    (p, w * v)
                })
            })
            .collect();
    }
    out
}

/// Rank-1 Kronecker lattice `frac(i·α + shift)` with `α_j = frac(j·φ_d)`-style
/// generalized golden ratios.
pub fn kronecker_points(count: usize, dim: usize, shift: &[f64]) -> Vec<Vec<f64>> {
    // φ_d solves x^{d+1} = x + 1
    let mut phi = 2.0_f64;
    for _ in 0..64 {
        phi = (1.0 + phi).powf(1.0 / (dim as f64 + 1.0));
    }
    let alpha: Vec<f64> = (1..=dim).map(|j| (1.0 / phi.powi(j as i32)).fract()).collect();
    (0..count)
        .map(|i| (0..dim).map(|j| (shift[j] + (i as f64 + 1.0) * alpha[j]).fract()).collect())
        .collect()
}
