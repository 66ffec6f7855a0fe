//! Sparse multivariate polynomials with complex coefficients.

use std::collections::BTreeMap;

use num_complex::Complex64;

pub type MultiIndex = Vec<u32>;

#[derive(Debug, Clone, PartialEq)]
pub struct Poly {
    nvars: usize,
    terms: BTreeMap<MultiIndex, Complex64>,
}

impl Poly {
    pub fn zero(nvars: usize) -> Self {
        Self { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: Complex64) -> Self {
        let mut p = Self::zero(nvars);
        if c != Complex64::new(0.0, 0.0) {
            p.terms.insert(vec![0; nvars], c);
        }
        p
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, Complex64::new(1.0, 0.0))
    }

    /// Linear form `Σ coeffs_i u_i`.
    pub fn linear(coeffs: &[Complex64]) -> Self {
        let n = coeffs.len();
        let mut p = Self::zero(n);
        for (i, &c) in coeffs.iter().enumerate() {
            let mut idx = vec![0; n];
            idx[i] = 1;
            p.add_monomial(idx, c);
        }
        p
    }

    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (MultiIndex, Complex64)>) -> Self {
        let mut p = Self::zero(nvars);
        for (idx, c) in terms {
            assert_eq!(idx.len(), nvars, "multi-index length");
            p.add_monomial(idx, c);
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &Complex64)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|k| k.iter().sum()).max().unwrap_or(0)
    }

    fn add_monomial(&mut self, idx: MultiIndex, c: Complex64) {
        let e = self.terms.entry(idx).or_insert(Complex64::new(0.0, 0.0));
        *e += c;
        if *e == Complex64::new(0.0, 0.0) {
            // exact cancellation only
            let key: Vec<_> = self
                .terms
                .iter()
                .filter(|(_, v)| **v == Complex64::new(0.0, 0.0))
                .map(|(k, _)| k.clone())
                .collect();
            for k in key {
                self.terms.remove(&k);
            }
        }
    }

    pub fn eval(&self, u: &[f64]) -> Complex64 {
        debug_assert_eq!(u.len(), self.nvars);
        let mut acc = Complex64::new(0.0, 0.0);
        for (idx, c) in &self.terms {
            let mut m = 1.0;
            for (x, &e) in u.iter().zip(idx) {
                m *= x.powi(e as i32);
            }
            acc += c * m;
        }
        acc
    }

    pub fn add(&self, other: &Poly) -> Poly {
        assert_eq!(self.nvars, other.nvars);
        let mut out = self.clone();
        for (idx, &c) in &other.terms {
            out.add_monomial(idx.clone(), c);
        }
        out
    }

    pub fn scale(&self, s: Complex64) -> Poly {
        if s == Complex64::new(0.0, 0.0) {
            return Poly::zero(self.nvars);
        }
        Poly { nvars: self.nvars, terms: self.terms.iter().map(|(k, &c)| (k.clone(), c * s)).collect() }
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        assert_eq!(self.nvars, other.nvars);
        let mut out = Poly::zero(self.nvars);
        for (i1, c1) in &self.terms {
            for (i2, c2) in &other.terms {
                let idx = i1.iter().zip(i2).map(|(a, b)| a + b).collect();
                out.add_monomial(idx, c1 * c2);
            }
        }
        out
    }

    pub fn conj(&self) -> Poly {
        Poly { nvars: self.nvars, terms: self.terms.iter().map(|(k, c)| (k.clone(), c.conj())).collect() }
    }

    /// Directional derivative `Σ_i w_i ∂/∂u_i`.
    pub fn derivative(&self, w: &[f64]) -> Poly {
        let mut out = Poly::zero(self.nvars);
        for (idx, &c) in &self.terms {
            for (i, &wi) in w.iter().enumerate() {
                if idx[i] == 0 || wi == 0.0 {
                    continue;
                }
                let mut d = idx.clone();
                d[i] -= 1;
                out.add_monomial(d, c * (wi * idx[i] as f64));
            }
        }
        out
    }

    /// `u ↦ p(C u)`.
    pub fn scale_vars(&self, c: f64) -> Poly {
        Poly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(k, &v)| (k.clone(), v * c.powi(k.iter().sum::<u32>() as i32)))
                .collect(),
        }
    }

    /// Substitutes `u_old = A·u_new`; `a` has one row per old variable, each
    /// of length `new_nvars`.
    pub fn substitute(&self, a: &[Vec<f64>], new_nvars: usize) -> Poly {
        assert_eq!(a.len(), self.nvars);
        let linear: Vec<Poly> = a
            .iter()
            .map(|row| Poly::linear(&row.iter().map(|&x| Complex64::new(x, 0.0)).collect::<Vec<_>>()))
            .map(|p| if p.nvars == new_nvars { p } else { Poly::zero(new_nvars) })
            .collect();
        let mut out = Poly::zero(new_nvars);
        for (idx, &c) in &self.terms {
            let mut m = Poly::constant(new_nvars, c);
            for (j, &e) in idx.iter().enumerate() {
                for _ in 0..e {
                    m = m.mul(&linear[j]);
                }
            }
            out = out.add(&m);
        }
        out
    }

    /// Re-embeds a polynomial in zero variables (a constant) into `nvars`.
    pub fn lift_constant(&self, nvars: usize) -> Poly {
        assert_eq!(self.nvars, 0);
        let c = self.terms.get(&vec![]).copied().unwrap_or_default();
        Poly::constant(nvars, c)
    }

    /// `Σ |c_α|` grouped by total degree.
    pub fn abs_coeffs_by_degree(&self) -> BTreeMap<u32, f64> {
        let mut out = BTreeMap::new();
        for (idx, c) in &self.terms {
            *out.entry(idx.iter().sum()).or_insert(0.0) += c.norm();
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn product_and_eval_agree() {
        let p = Poly::from_terms(2, [(vec![1, 0], c(1.0, 0.0)), (vec![0, 2], c(0.0, 2.0))]);
        let q = Poly::from_terms(2, [(vec![0, 0], c(3.0, -1.0)), (vec![1, 1], c(1.5, 0.0))]);
        let u = [0.7, -1.3];
        let lhs = p.mul(&q).eval(&u);
        let rhs = p.eval(&u) * q.eval(&u);
        assert!((lhs - rhs).norm() < 1e-13);
    }

    #[test]
    fn derivative_matches_finite_difference() {
        let p = Poly::from_terms(2, [(vec![3, 1], c(1.0, 0.5)), (vec![0, 2], c(-2.0, 0.0))]);
        let w = [0.3, -0.8];
        let u = [0.4, 1.1];
        let h = 1e-5;
        let fwd = p.eval(&[u[0] + h * w[0], u[1] + h * w[1]]);
        let bwd = p.eval(&[u[0] - h * w[0], u[1] - h * w[1]]);
        let fd = (fwd - bwd) / (2.0 * h);
        assert!((p.derivative(&w).eval(&u) - fd).norm() < 1e-8);
    }

    #[test]
    fn substitution_composes() {
        let p = Poly::from_terms(2, [(vec![2, 1], c(1.0, 0.0)), (vec![0, 1], c(0.0, 1.0))]);
        let a = vec![vec![1.0, 2.0, 0.0], vec![0.5, 0.0, -1.0]];
        let s = p.substitute(&a, 3);
        let x = [0.2, -0.4, 0.9];
        let ax = [x[0] + 2.0 * x[1], 0.5 * x[0] - x[2]];
        assert!((s.eval(&x) - p.eval(&ax)).norm() < 1e-13);
    }

    #[test]
    fn cancellation_drops_monomial() {
        let p = Poly::from_terms(1, [(vec![1], c(1.0, 0.0))]);
        assert!(p.add(&p.scale(c(-1.0, 0.0))).is_zero());
    }
}
