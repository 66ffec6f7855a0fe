//! Lower bounds on `‖f‖_∞` by sampling and local polishing.
//!
//! Level `j` samples `q` on the dyadic grid with `2^j` points per axis and
//! `p` on `2^{j+1}+1` points per axis of `[−R, R]`, together with the lifted
//! Gaussian centers of every term. Grids at level `j` contain those of all
//! lower levels and the reported value is a running maximum, so the estimate
//! never decreases as the budget grows.

use rayon::prelude::*;

use super::Observable;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SupNormBudget {
    /// Finest dyadic level, at least 1.
    pub level: u32,
    /// Coordinate-descent sweeps per polished candidate.
    pub polish_sweeps: usize,
    /// Number of best grid points polished at each level.
    pub polish_starts: usize,
}

impl Default for SupNormBudget {
    fn default() -> Self {
        Self { level: 4, polish_sweeps: 200, polish_starts: 4 }
    }
}

fn grid(points: usize, lo: f64, hi: f64, closed: bool) -> Vec<f64> {
    if closed {
        if points == 1 {
            return vec![0.5 * (lo + hi)];
        }
        (0..points).map(|i| lo + (hi - lo) * i as f64 / (points - 1) as f64).collect()
    } else {
        (0..points).map(|i| lo + (hi - lo) * i as f64 / points as f64).collect()
    }
}

fn cartesian(axis: &[f64], n: usize) -> Vec<Vec<f64>> {
    let mut out = vec![Vec::with_capacity(n)];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                axis.iter().map(move |&x| {
                    let mut v = prefix.clone();
                    v.push(x);
                    v
                })
            })
            .collect();
    }
    out
}

fn modulus(f: &Observable, x: &[f64]) -> f64 {
    let n = f.dim();
    let q: Vec<f64> = x[..n].iter().map(|v| v.rem_euclid(1.0)).collect();
    f.eval(&q, &x[n..]).norm()
}

fn polish(f: &Observable, start: Vec<f64>, step_q: f64, step_p: f64, sweeps: usize) -> f64 {
    let n = f.dim();
    let mut x = start;
    let mut best = modulus(f, &x);
    let mut steps: Vec<f64> = (0..2 * n).map(|i| if i < n { step_q } else { step_p }).collect();
    for _ in 0..sweeps {
        let mut improved = false;
        for i in 0..2 * n {
            for sign in [1.0, -1.0] {
                let mut y = x.clone();
                y[i] += sign * steps[i];
                let v = modulus(f, &y);
                if v > best {
                    best = v;
                    x = y;
                    improved = true;
                    break;
                }
            }
        }
        if !improved {
            for s in &mut steps {
                *s *= 0.5;
            }
            if steps.iter().all(|&s| s < 1e-10) {
                break;
            }
        }
    }
    best
}

/// Lower bound on `sup_{q,p} |f(q,p)|` with momenta sampled in `[−R, R]ⁿ`.
pub fn sup_norm_estimate(f: &Observable, budget: SupNormBudget, radius: f64) -> f64 {
    if f.is_zero() {
        return 0.0;
    }
    let n = f.dim();
    let mut centers: Vec<Vec<f64>> = vec![vec![0.0; n]];
    for g in f.generators() {
        for t in g.h.terms() {
            if t.dim() > 0 {
                centers.push(g.h.subspace().lift(t.center()));
            }
        }
    }
    let mut best = 0.0_f64;
    for level in 1..=budget.level.max(1) {
        let qpts = 1usize << level;
        let ppts = (1usize << (level + 1)) + 1;
        let qs = cartesian(&grid(qpts, 0.0, 1.0, false), n);
        let mut ps = cartesian(&grid(ppts, -radius, radius, true), n);
        ps.extend(centers.iter().cloned());
        let mut scored: Vec<(f64, Vec<f64>)> = qs
            .par_iter()
            .flat_map_iter(|q| {
                ps.iter().map(move |p| {
                    let v = f.eval(q, p).norm();
                    let mut x = q.clone();
                    x.extend_from_slice(p);
                    (v, x)
                })
            })
            .collect();
        scored.sort_by(|a, b| b.0.total_cmp(&a.0).then_with(|| a.1.partial_cmp(&b.1).unwrap_or(std::cmp::Ordering::Equal)));
        scored.truncate(budget.polish_starts.max(1));
        let step_q = 1.0 / qpts as f64;
        let step_p = 2.0 * radius / (ppts - 1) as f64;
        let polished = scored
            .into_par_iter()
            .map(|(v, x)| v.max(polish(f, x, step_q, step_p, budget.polish_sweeps)))
            .reduce(|| 0.0, f64::max);
        best = best.max(polished);
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::IntVector;
    use crate::symbols::{isotropic_gaussian, Subspace};

    #[test]
    fn unit_has_norm_one() {
        let v = sup_norm_estimate(&Observable::one(1), SupNormBudget::default(), 4.0);
        assert_eq!(v, 1.0);
    }

    #[test]
    fn shifted_gaussian_peak_found() {
        let h = isotropic_gaussian(Subspace::full(1), 3.0, vec![1.2345]).unwrap();
        let f = Observable::single(IntVector::new(vec![2]).unwrap(), h).unwrap();
        let v = sup_norm_estimate(&f, SupNormBudget::default(), 4.0);
        assert!((v - 1.0).abs() < 1e-12);
    }

    #[test]
    fn sine_example_reaches_one() {
        let f = Observable::sine(1, 0.3);
        let v = sup_norm_estimate(&f, SupNormBudget::default(), 3.0);
        assert!(v <= 1.0 + 1e-14 && v > 1.0 - 1e-9, "{v}");
    }

    #[test]
    fn monotone_in_budget() {
        let l = Subspace::span(2, &[vec![1.0, 2.0]]).unwrap();
        let f = Observable::single(IntVector::new(vec![1, 0]).unwrap(), isotropic_gaussian(l, 0.4, vec![0.5]).unwrap())
            .unwrap()
            .add(&Observable::sine(2, 0.7))
            .unwrap();
        let mut prev = 0.0;
        for level in 1..=4 {
            let v = sup_norm_estimate(&f, SupNormBudget { level, polish_sweeps: 50, polish_starts: 2 }, 3.0);
            assert!(v >= prev);
            prev = v;
        }
    }
}
