//! Momentum factors `h(p) = e^{iξ·p} Σ_t c_t P_t(u) exp(−(u−z_t)ᵀQ_t(u−z_t) + i b_t·u)`
//! with `u = Bᵀp` the coordinates of `P_U p`.

use std::cmp::Ordering;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use super::poly::Poly;
use super::subspace::{round_key, Subspace};
use crate::error::{Error, Result};

/// Smallest admissible eigenvalue of a Gaussian form.
pub const MIN_EIGENVALUE: f64 = 1e-12;
/// Tolerance on `P_U ξ = 0`, relative to `max(1, |ξ|)`.
pub const XI_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct SymbolTerm {
    coeff: Complex64,
    poly: Poly,
    quad: Vec<Vec<f64>>,
    center: Vec<f64>,
    phase: Vec<f64>,
}

fn min_eigenvalue(q: &[Vec<f64>]) -> f64 {
    let d = q.len();
    if d == 0 {
        return f64::INFINITY;
    }
    let m = DMatrix::from_fn(d, d, |i, j| q[i][j]);
    SymmetricEigen::new(m).eigenvalues.iter().copied().fold(f64::INFINITY, f64::min)
}

impl SymbolTerm {
    /// Validates shapes, symmetry and positive definiteness of `quad`.
    pub fn new(coeff: Complex64, poly: Poly, quad: Vec<Vec<f64>>, center: Vec<f64>, phase: Vec<f64>) -> Result<Self> {
        let d = poly.nvars();
        if quad.len() != d || quad.iter().any(|r| r.len() != d) {
            return Err(Error::InvalidSymbol(format!("Q must be {d}x{d}")));
        }
        if center.len() != d {
            return Err(Error::DimensionMismatch { expected: d, got: center.len() });
        }
        if phase.len() != d {
            return Err(Error::DimensionMismatch { expected: d, got: phase.len() });
        }
        if !coeff.re.is_finite() || !coeff.im.is_finite() {
            return Err(Error::InvalidSymbol("non-finite coefficient".into()));
        }
        let scale = quad.iter().flatten().fold(1.0_f64, |a, b| a.max(b.abs()));
        for i in 0..d {
            for j in 0..i {
                if (quad[i][j] - quad[j][i]).abs() > 1e-12 * scale {
                    return Err(Error::InvalidSymbol("Q not symmetric".into()));
                }
            }
        }
        if d > 0 {
            let lam = min_eigenvalue(&quad);
            if !(lam >= MIN_EIGENVALUE) {
                return Err(Error::InvalidSymbol(format!("Q not positive definite (min eigenvalue {lam:e})")));
            }
        }
        Ok(Self { coeff, poly, quad, center, phase })
    }

    /// A bare constant, the only admissible term when `dim U = 0`.
    pub fn constant(c: Complex64) -> Self {
        Self { coeff: c, poly: Poly::one(0), quad: vec![], center: vec![], phase: vec![] }
    }

    /// `c · exp(−(u−z)ᵀQ(u−z) + i b·u)` with trivial polynomial.
    pub fn gaussian(c: Complex64, quad: Vec<Vec<f64>>, center: Vec<f64>, phase: Vec<f64>) -> Result<Self> {
        let d = quad.len();
        Self::new(c, Poly::one(d), quad, center, phase)
    }

    pub fn coeff(&self) -> Complex64 {
        self.coeff
    }
    pub fn poly(&self) -> &Poly {
        &self.poly
    }
    pub fn quad(&self) -> &[Vec<f64>] {
        &self.quad
    }
    pub fn center(&self) -> &[f64] {
        &self.center
    }
    pub fn phase(&self) -> &[f64] {
        &self.phase
    }
    pub fn dim(&self) -> usize {
        self.poly.nvars()
    }

    pub fn eval_coords(&self, u: &[f64]) -> Complex64 {
        let d = self.dim();
        if d == 0 {
            return self.coeff * self.poly.eval(&[]);
        }
        let mut form = 0.0;
        let mut ph = 0.0;
        for i in 0..d {
            let di = u[i] - self.center[i];
            let mut row = 0.0;
            for j in 0..d {
                row += self.quad[i][j] * (u[j] - self.center[j]);
            }
            form += di * row;
            ph += self.phase[i] * u[i];
        }
        self.coeff * self.poly.eval(u) * Complex64::from_polar((-form).exp(), ph)
    }

    /// Certified upper bound on `sup_u |term(u)|`.
    pub fn sup_upper_bound(&self) -> f64 {
        let c = self.coeff.norm();
        if self.dim() == 0 {
            return c * self.poly.eval(&[]).norm();
        }
        let lam = min_eigenvalue(&self.quad).max(MIN_EIGENVALUE);
        let rho = self.center.iter().map(|x| x * x).sum::<f64>().sqrt();
        let mut total = 0.0;
        for (deg, s) in self.poly.abs_coeffs_by_degree() {
            let m = deg as f64;
            let inner = rho.powi(deg as i32);
            let rstar = 0.5 * (rho + (rho * rho + 2.0 * m / lam).sqrt());
            let outer = rstar.powi(deg as i32) * (-lam * (rstar - rho).powi(2)).exp();
            total += s * inner.max(outer);
        }
        c * total
    }

    fn with_poly(&self, poly: Poly) -> Self {
        Self { poly, ..self.clone() }
    }

    fn key(&self) -> Vec<i64> {
        self.quad
            .iter()
            .flatten()
            .chain(&self.center)
            .chain(&self.phase)
            .map(|&x| round_key(x))
            .collect()
    }
}

/// A term rewritten in new coordinates before its Gaussian is re-centered:
/// `coeff · P(u) · exp(−uᵀMu + r·u + s0 + i b·u)`.
struct Pulled {
    coeff: Complex64,
    poly: Poly,
    m: Vec<Vec<f64>>,
    r: Vec<f64>,
    s0: f64,
    phase: Vec<f64>,
}

/// Substitutes `u_old = A u_new`; `a` has `d_old` rows of length `d_new`.
fn pull(term: &SymbolTerm, a: &[Vec<f64>], d_new: usize) -> Pulled {
    let d_old = term.dim();
    let q = &term.quad;
    let c = &term.center;
    let mut m = vec![vec![0.0; d_new]; d_new];
    let mut r = vec![0.0; d_new];
    let mut phase = vec![0.0; d_new];
    let mut qc = vec![0.0; d_old];
    for s in 0..d_old {
        for t in 0..d_old {
            qc[s] += q[s][t] * c[t];
        }
    }
    let s0 = -(0..d_old).map(|s| c[s] * qc[s]).sum::<f64>();
    for i in 0..d_new {
        for j in 0..d_new {
            let mut acc = 0.0;
            for s in 0..d_old {
                for t in 0..d_old {
                    acc += a[s][i] * q[s][t] * a[t][j];
                }
            }
            m[i][j] = acc;
        }
        r[i] = 2.0 * (0..d_old).map(|s| a[s][i] * qc[s]).sum::<f64>();
        phase[i] = (0..d_old).map(|s| a[s][i] * term.phase[s]).sum();
    }
    Pulled { coeff: term.coeff, poly: term.poly.substitute(a, d_new), m, r, s0, phase }
}

fn combine(a: Pulled, b: Pulled) -> Pulled {
    let d = a.r.len();
    let mut m = a.m;
    for i in 0..d {
        for j in 0..d {
            m[i][j] += b.m[i][j];
        }
    }
    Pulled {
        coeff: a.coeff * b.coeff,
        poly: a.poly.mul(&b.poly),
        m,
        r: a.r.iter().zip(&b.r).map(|(x, y)| x + y).collect(),
        s0: a.s0 + b.s0,
        phase: a.phase.iter().zip(&b.phase).map(|(x, y)| x + y).collect(),
    }
}

/// Completes the square and validates the result.
fn finish(mut p: Pulled, extra_phase: &[f64]) -> Result<SymbolTerm> {
    let d = p.r.len();
    for (b, e) in p.phase.iter_mut().zip(extra_phase) {
        *b += e;
    }
    if d == 0 {
        let coeff = p.coeff * p.s0.exp();
        return Ok(SymbolTerm { coeff, poly: p.poly, quad: vec![], center: vec![], phase: vec![] });
    }
    for i in 0..d {
        for j in 0..i {
            let avg = 0.5 * (p.m[i][j] + p.m[j][i]);
            p.m[i][j] = avg;
            p.m[j][i] = avg;
        }
    }
    let mm = DMatrix::from_fn(d, d, |i, j| p.m[i][j]);
    let chol = mm
        .clone()
        .cholesky()
        .ok_or_else(|| Error::InvalidSymbol("combined Gaussian form is not positive definite".into()))?;
    let r = DVector::from_column_slice(&p.r);
    let center = chol.solve(&r) * 0.5;
    let shift = center.dot(&(&mm * &center));
    let coeff = p.coeff * (p.s0 + shift).exp();
    SymbolTerm::new(coeff, p.poly, p.m, center.iter().copied().collect(), p.phase)
}

#[derive(Debug, Clone, PartialEq)]
pub struct MomentumSymbol {
    subspace: Subspace,
    xi: Vec<f64>,
    terms: Vec<SymbolTerm>,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

impl MomentumSymbol {
    pub fn new(subspace: Subspace, xi: Vec<f64>, terms: Vec<SymbolTerm>) -> Result<Self> {
        let n = subspace.ambient();
        if xi.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: xi.len() });
        }
        let xnorm = dot(&xi, &xi).sqrt();
        let inside = subspace.coords(&xi);
        let leak = dot(&inside, &inside).sqrt();
        if leak > XI_TOL * xnorm.max(1.0) {
            return Err(Error::InvalidSymbol(format!("xi has component {leak:e} inside U")));
        }
        for t in &terms {
            if t.dim() != subspace.dim() {
                return Err(Error::DimensionMismatch { expected: subspace.dim(), got: t.dim() });
            }
        }
        Ok(Self { subspace, xi, terms })
    }

    pub fn constant(n: usize, c: Complex64) -> Self {
        Self { subspace: Subspace::zero(n), xi: vec![0.0; n], terms: vec![SymbolTerm::constant(c)] }
    }

    /// `p ↦ e^{iξ·p}` with `U = {0}`.
    pub fn plane_wave(xi: Vec<f64>) -> Self {
        let n = xi.len();
        Self { subspace: Subspace::zero(n), xi, terms: vec![SymbolTerm::constant(Complex64::new(1.0, 0.0))] }
    }

    pub fn subspace(&self) -> &Subspace {
        &self.subspace
    }
    pub fn xi(&self) -> &[f64] {
        &self.xi
    }
    pub fn terms(&self) -> &[SymbolTerm] {
        &self.terms
    }
    pub fn ambient(&self) -> usize {
        self.subspace.ambient()
    }

    pub fn eval(&self, p: &[f64]) -> Complex64 {
        let u = self.subspace.coords(p);
        let g: Complex64 = self.terms.iter().map(|t| t.eval_coords(&u)).sum();
        g * Complex64::from_polar(1.0, dot(&self.xi, p))
    }

    pub fn sup_upper_bound(&self) -> f64 {
        self.terms.iter().map(SymbolTerm::sup_upper_bound).sum()
    }

    pub fn scaled(&self, s: Complex64) -> Self {
        let terms = self.terms.iter().map(|t| SymbolTerm { coeff: t.coeff * s, ..t.clone() }).collect();
        Self { terms, ..self.clone() }
    }

    pub fn conj(&self) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|t| SymbolTerm {
                coeff: t.coeff.conj(),
                poly: t.poly.conj(),
                quad: t.quad.clone(),
                center: t.center.clone(),
                phase: t.phase.iter().map(|b| -b).collect(),
            })
            .collect();
        Self { subspace: self.subspace.clone(), xi: self.xi.iter().map(|x| -x).collect(), terms }
    }

    /// Pointwise product; the support becomes `U₁ + U₂`.
    pub fn multiply(&self, other: &Self) -> Result<Self> {
        let n = self.ambient();
        if other.ambient() != n {
            return Err(Error::DimensionMismatch { expected: n, got: other.ambient() });
        }
        let u = self.subspace.sum(&other.subspace)?;
        let d = u.dim();
        let s: Vec<f64> = self.xi.iter().zip(&other.xi).map(|(a, b)| a + b).collect();
        let beta = u.coords(&s);
        let xi = u.project_perp(&s);
        let a1 = self.subspace.transition_from(&u);
        let a2 = other.subspace.transition_from(&u);
        let mut terms = Vec::with_capacity(self.terms.len() * other.terms.len());
        for t1 in &self.terms {
            for t2 in &other.terms {
                let p = combine(pull(t1, &a1, d), pull(t2, &a2, d));
                let t = finish(p, &beta)?;
                if !t.poly.is_zero() && t.coeff != Complex64::new(0.0, 0.0) {
                    terms.push(t);
                }
            }
        }
        Ok(Self { subspace: u, xi, terms })
    }

    /// Directional derivative `∇_v h`.
    pub fn derivative(&self, v: &[f64]) -> Self {
        let w = self.subspace.coords(v);
        let xv = dot(&self.xi, v);
        let d = w.len();
        let terms = self
            .terms
            .iter()
            .filter_map(|t| {
                let mut qw = vec![0.0; d];
                for i in 0..d {
                    for j in 0..d {
                        qw[i] += t.quad[i][j] * w[j];
                    }
                }
                let scalar = Complex64::new(2.0 * dot(&qw, &t.center), xv + dot(&t.phase, &w));
                let lin: Vec<Complex64> = qw.iter().map(|x| Complex64::new(-2.0 * x, 0.0)).collect();
                let poly = t
                    .poly
                    .scale(scalar)
                    .add(&t.poly.derivative(&w))
                    .add(&t.poly.mul(&Poly::linear(&lin)));
                (!poly.is_zero()).then(|| t.with_poly(poly))
            })
            .collect();
        Self { subspace: self.subspace.clone(), xi: self.xi.clone(), terms }
    }

    /// `p ↦ h(Cp)`.
    pub fn scale_momentum(&self, c: f64) -> Result<Self> {
        if c == 0.0 || !c.is_finite() {
            return Err(Error::InvalidArgument(format!("momentum scale must be finite and nonzero, got {c}")));
        }
        let terms = self
            .terms
            .iter()
            .map(|t| SymbolTerm {
                coeff: t.coeff,
                poly: t.poly.scale_vars(c),
                quad: t.quad.iter().map(|r| r.iter().map(|x| x * c * c).collect()).collect(),
                center: t.center.iter().map(|x| x / c).collect(),
                phase: t.phase.iter().map(|x| x * c).collect(),
            })
            .collect();
        Ok(Self { subspace: self.subspace.clone(), xi: self.xi.iter().map(|x| x * c).collect(), terms })
    }

    /// `p ↦ e^{iδ·p} h(p)`: the part of δ orthogonal to U moves ξ, the rest
    /// moves every `b`.
    pub fn phase_twist(&self, delta: &[f64]) -> Self {
        let perp = self.subspace.project_perp(delta);
        let inside = self.subspace.coords(delta);
        let terms = self
            .terms
            .iter()
            .map(|t| SymbolTerm {
                phase: t.phase.iter().zip(&inside).map(|(b, e)| b + e).collect(),
                ..t.clone()
            })
            .collect();
        Self {
            subspace: self.subspace.clone(),
            xi: self.xi.iter().zip(&perp).map(|(a, b)| a + b).collect(),
            terms,
        }
    }

    /// `(p, p') ↦ h(p)` on `R^{n+m}`.
    pub fn embed(&self, m: usize) -> Self {
        let mut xi = self.xi.clone();
        xi.resize(self.ambient() + m, 0.0);
        Self { subspace: self.subspace.embed(m), xi, terms: self.terms.clone() }
    }

    pub(crate) fn merge_key(&self) -> (Vec<i64>, Vec<i64>) {
        (self.subspace.fingerprint(), self.xi.iter().map(|&x| round_key(x)).collect())
    }

    /// Appends the terms of `other`, re-expressed in this symbol's basis.
    /// Callers guarantee equal merge keys.
    pub(crate) fn absorb(&mut self, other: &Self) -> Result<()> {
        let a = other.subspace.transition_from(&self.subspace);
        let d = self.subspace.dim();
        let zero = vec![0.0; d];
        for t in &other.terms {
            self.terms.push(finish(pull(t, &a, d), &zero)?);
        }
        Ok(())
    }

    /// Merges terms with equal Gaussian data and sorts them.
    pub(crate) fn canonicalize_terms(&mut self) {
        let mut keyed: Vec<(Vec<i64>, SymbolTerm)> = Vec::new();
        for t in self.terms.drain(..) {
            if t.poly.is_zero() || t.coeff == Complex64::new(0.0, 0.0) {
                continue;
            }
            let key = t.key();
            if let Some((_, kept)) = keyed.iter_mut().find(|(k, _)| *k == key) {
                let ratio = t.coeff / kept.coeff;
                kept.poly = kept.poly.add(&t.poly.scale(ratio));
            } else {
                keyed.push((key, t));
            }
        }
        keyed.retain(|(_, t)| !t.poly.is_zero());
        keyed.sort_by(|a, b| a.0.cmp(&b.0).then_with(|| cmp_poly(&a.1.poly, &b.1.poly)));
        self.terms = keyed.into_iter().map(|(_, t)| t).collect();
    }
}

fn cmp_poly(a: &Poly, b: &Poly) -> Ordering {
    let ka: Vec<_> = a.terms().map(|(k, c)| (k.clone(), round_key(c.re), round_key(c.im))).collect();
    let kb: Vec<_> = b.terms().map(|(k, c)| (k.clone(), round_key(c.re), round_key(c.im))).collect();
    ka.cmp(&kb)
}

/// `exp(−a|u−z|²)` on `U`.
pub fn isotropic_gaussian(subspace: Subspace, a: f64, center: Vec<f64>) -> Result<MomentumSymbol> {
    let d = subspace.dim();
    let n = subspace.ambient();
    let quad = (0..d).map(|i| (0..d).map(|j| if i == j { a } else { 0.0 }).collect()).collect();
    let t = SymbolTerm::gaussian(Complex64::new(1.0, 0.0), quad, center, vec![0.0; d])?;
    MomentumSymbol::new(subspace, vec![0.0; n], vec![t])
}
