//! Shift-diagonal operators on truncated Fourier lattices `ℓ²(Λ_N)`,
//! `Λ_N = {−N,…,N}ⁿ`.
//!
//! A term `(k, d)` acts by `(Aφ)(l) = d(l−k) φ(l−k)`. Sources outside the
//! window contribute nothing and targets outside it are dropped, so every
//! operator here is the compression of an operator on `ℓ²(Zⁿ)`.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::{IntMatrix, IntVector};

/// Largest window the dense norm path accepts.
pub const DENSE_LIMIT: usize = 4096;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct FourierWindow {
    pub n: usize,
    #[serde(rename = "N")]
    pub big_n: usize,
}

impl FourierWindow {
    pub fn new(n: usize, big_n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("window dimension must be at least 1".into()));
        }
        let side = 2 * big_n + 1;
        side.checked_pow(n as u32)
            .filter(|&s| s <= 1 << 28)
            .ok_or_else(|| Error::InvalidArgument(format!("window (n={n}, N={big_n}) too large")))?;
        Ok(Self { n, big_n })
    }

    pub fn side(&self) -> usize {
        2 * self.big_n + 1
    }

    pub fn size(&self) -> usize {
        self.side().pow(self.n as u32)
    }

    pub fn contains(&self, l: &[i64]) -> bool {
        let b = self.big_n as i64;
        l.iter().all(|&x| -b <= x && x <= b)
    }

    pub fn index(&self, l: &[i64]) -> Option<usize> {
        if l.len() != self.n || !self.contains(l) {
            return None;
        }
        let side = self.side();
        let mut idx = 0;
        for &x in l {
            idx = idx * side + (x + self.big_n as i64) as usize;
        }
        Some(idx)
    }

    pub fn point(&self, mut idx: usize) -> Vec<i64> {
        let side = self.side();
        let mut l = vec![0; self.n];
        for slot in l.iter_mut().rev() {
            *slot = (idx % side) as i64 - self.big_n as i64;
            idx /= side;
        }
        l
    }

    /// Index of `point(idx) + k`, if it stays inside the window.
    pub fn shifted(&self, idx: usize, k: &[i64]) -> Option<usize> {
        let side = self.side();
        let b = self.big_n as i64;
        let mut rem = idx;
        let mut out = 0usize;
        let mut mult = 1usize;
        for i in (0..self.n).rev() {
            let x = (rem % side) as i64 - b + k[i];
            rem /= side;
            if x < -b || x > b {
                return None;
            }
            out += (x + b) as usize * mult;
            mult *= side;
        }
        Some(out)
    }

    /// `|l_i| ≤ N − margin` for every coordinate.
    pub fn in_interior(&self, l: &[i64], margin: usize) -> bool {
        let lim = self.big_n as i64 - margin as i64;
        l.iter().all(|&x| x.abs() <= lim)
    }

    pub fn interior_indices(&self, margin: usize) -> Vec<usize> {
        (0..self.size()).filter(|&i| self.in_interior(&self.point(i), margin)).collect()
    }

    pub fn points(&self) -> impl Iterator<Item = Vec<i64>> + '_ {
        (0..self.size()).map(|i| self.point(i))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ShiftTerm {
    pub k: IntVector,
    /// Diagonal indexed by source position in the window.
    pub diag: Vec<Complex64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LatticeOperator {
    window: FourierWindow,
    terms: Vec<ShiftTerm>,
}

fn max_abs_shift(k: &IntVector) -> i64 {
    k.as_slice().iter().map(|x| x.abs()).max().unwrap_or(0)
}

impl LatticeOperator {
    pub fn zero(window: FourierWindow) -> Self {
        Self { window, terms: Vec::new() }
    }

    pub fn identity(window: FourierWindow) -> Self {
        Self {
            window,
            terms: vec![ShiftTerm { k: IntVector::zeros(window.n), diag: vec![Complex64::new(1.0, 0.0); window.size()] }],
        }
    }

    pub fn new(window: FourierWindow, terms: Vec<ShiftTerm>) -> Result<Self> {
        let reach = 2 * window.big_n as i64;
        for t in &terms {
            if t.k.dim() != window.n {
                return Err(Error::DimensionMismatch { expected: window.n, got: t.k.dim() });
            }
            if max_abs_shift(&t.k) > reach {
                return Err(Error::ShiftOutsideWindow { shift: t.k.as_slice().to_vec(), reach });
            }
            if t.diag.len() != window.size() {
                return Err(Error::DimensionMismatch { expected: window.size(), got: t.diag.len() });
            }
        }
        Ok(Self { window, terms })
    }

    /// One term whose diagonal is `d(l)` evaluated at every source `l`.
    pub fn from_fn(window: FourierWindow, k: IntVector, d: impl Fn(&[i64]) -> Complex64) -> Result<Self> {
        let diag = window.points().map(|l| d(&l)).collect();
        Self::new(window, vec![ShiftTerm { k, diag }])
    }

    /// Diagonal unitary or multiplication operator `ψ_l ↦ d(l) ψ_l`.
    pub fn diagonal(window: FourierWindow, d: impl Fn(&[i64]) -> Complex64) -> Self {
        Self::from_fn(window, IntVector::zeros(window.n), d).expect("zero shift fits")
    }

    pub fn window(&self) -> FourierWindow {
        self.window
    }

    pub fn terms(&self) -> &[ShiftTerm] {
        &self.terms
    }

    /// Largest `max_i |k_i|` over terms.
    pub fn reach(&self) -> usize {
        self.terms.iter().map(|t| max_abs_shift(&t.k) as usize).max().unwrap_or(0)
    }

    fn same_window(&self, other: &Self) -> Result<()> {
        if self.window != other.window {
            return Err(Error::WindowMismatch {
                n_a: self.window.n,
                big_n_a: self.window.big_n,
                n_b: other.window.n,
                big_n_b: other.window.big_n,
            });
        }
        Ok(())
    }

    pub fn apply(&self, phi: &[Complex64]) -> Result<Vec<Complex64>> {
        if phi.len() != self.window.size() {
            return Err(Error::DimensionMismatch { expected: self.window.size(), got: phi.len() });
        }
        Ok(self.apply_unchecked(phi))
    }

    fn apply_unchecked(&self, phi: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![ZERO; phi.len()];
        for t in &self.terms {
            let k = t.k.as_slice();
            for (m, (&d, &x)) in t.diag.iter().zip(phi).enumerate() {
                if d == ZERO || x == ZERO {
                    continue;
                }
                if let Some(l) = self.window.shifted(m, k) {
                    out[l] += d * x;
                }
            }
        }
        out
    }

    fn apply_adjoint_unchecked(&self, psi: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![ZERO; psi.len()];
        for t in &self.terms {
            let k = t.k.as_slice();
            for (m, &d) in t.diag.iter().enumerate() {
                if d == ZERO {
                    continue;
                }
                if let Some(l) = self.window.shifted(m, k) {
                    out[m] += d.conj() * psi[l];
                }
            }
        }
        out
    }

    /// Sums terms that share a shift; terms are ordered by shift.
    pub fn merged(&self) -> Self {
        let mut by_k: BTreeMap<Vec<i64>, Vec<Complex64>> = BTreeMap::new();
        for t in &self.terms {
            let e = by_k.entry(t.k.as_slice().to_vec()).or_insert_with(|| vec![ZERO; self.window.size()]);
            for (a, b) in e.iter_mut().zip(&t.diag) {
                *a += b;
            }
        }
        let terms = by_k
            .into_iter()
            .map(|(k, diag)| ShiftTerm { k: IntVector::new(k).expect("nonempty"), diag })
            .collect();
        Self { window: self.window, terms }
    }

    /// Zeroes entries whose target leaves the window; the operator is unchanged.
    pub fn pruned(&self) -> Self {
        let w = self.window;
        let terms = self
            .terms
            .iter()
            .map(|t| ShiftTerm {
                k: t.k.clone(),
                diag: t
                    .diag
                    .iter()
                    .enumerate()
                    .map(|(m, &d)| if w.shifted(m, t.k.as_slice()).is_some() { d } else { ZERO })
                    .collect(),
            })
            .collect();
        Self { window: w, terms }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_window(other)?;
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        Ok(Self { window: self.window, terms }.merged())
    }

    pub fn scale(&self, s: Complex64) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|t| ShiftTerm { k: t.k.clone(), diag: t.diag.iter().map(|d| d * s).collect() })
            .collect();
        Self { window: self.window, terms }
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    /// `(k₁,d₁)(k₂,d₂) → (k₁+k₂, m ↦ d₁(m+k₂) d₂(m))`; entries whose middle
    /// index leaves the window are zero, so this is the exact product of the
    /// compressed matrices.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        self.same_window(other)?;
        let w = self.window;
        let reach = 2 * w.big_n as i64;
        let mut terms = Vec::with_capacity(self.terms.len() * other.terms.len());
        for t1 in &self.terms {
            for t2 in &other.terms {
                let k: Vec<i64> = t1.k.as_slice().iter().zip(t2.k.as_slice()).map(|(a, b)| a + b).collect();
                if k.iter().any(|x| x.abs() > reach) {
                    // no source and target can both lie in the window
                    continue;
                }
                let k2 = t2.k.as_slice();
                let diag = (0..w.size())
                    .map(|m| match w.shifted(m, k2) {
                        Some(mid) => t1.diag[mid] * t2.diag[m],
                        None => ZERO,
                    })
                    .collect();
                terms.push(ShiftTerm { k: IntVector::new(k)?, diag });
            }
        }
        Ok(Self { window: w, terms }.merged())
    }

    /// `(k, d) → (−k, m ↦ conj d(m−k))`, the conjugate transpose of the
    /// compressed matrix.
    pub fn adjoint(&self) -> Self {
        let w = self.window;
        let terms = self
            .terms
            .iter()
            .map(|t| {
                let neg: Vec<i64> = t.k.as_slice().iter().map(|x| -x).collect();
                let diag = (0..w.size())
                    .map(|m| match w.shifted(m, &neg) {
                        Some(src) => t.diag[src].conj(),
                        None => ZERO,
                    })
                    .collect();
                ShiftTerm { k: IntVector::new(neg).expect("nonempty"), diag }
            })
            .collect();
        Self { window: w, terms }
    }

    /// `D_u A D_u⁻¹` for a unimodular diagonal `u`: `d'(m) = u(m+k) d(m) conj u(m)`.
    pub fn conjugate_by_phase(&self, u: impl Fn(&[i64]) -> Complex64) -> Self {
        let w = self.window;
        let terms = self
            .terms
            .iter()
            .map(|t| {
                let k = t.k.as_slice();
                let diag = t
                    .diag
                    .iter()
                    .enumerate()
                    .map(|(m, &d)| {
                        let src = w.point(m);
                        let dst: Vec<i64> = src.iter().zip(k).map(|(a, b)| a + b).collect();
                        u(&dst) * d * u(&src).conj()
                    })
                    .collect();
                ShiftTerm { k: t.k.clone(), diag }
            })
            .collect();
        Self { window: w, terms }
    }

    pub fn dense(&self) -> DMatrix<Complex64> {
        let size = self.window.size();
        let mut m = DMatrix::from_element(size, size, ZERO);
        for t in &self.terms {
            let k = t.k.as_slice();
            for (src, &d) in t.diag.iter().enumerate() {
                if let Some(dst) = self.window.shifted(src, k) {
                    m[(dst, src)] += d;
                }
            }
        }
        m
    }

    /// `A ⊗ Id` on the window of dimension `n + m` with the same `N`.
    pub fn tensor_with_identity(&self, m: usize) -> Result<Self> {
        let w = FourierWindow::new(self.window.n + m, self.window.big_n)?;
        let n = self.window.n;
        let terms = self
            .terms
            .iter()
            .map(|t| {
                let mut k = t.k.as_slice().to_vec();
                k.resize(n + m, 0);
                let diag = w
                    .points()
                    .map(|l| t.diag[self.window.index(&l[..n]).expect("prefix inside")])
                    .collect();
                ShiftTerm { k: IntVector::new(k).expect("nonempty"), diag }
            })
            .collect();
        Ok(Self { window: w, terms })
    }

    /// `P A P†` where `P ψ_l = ψ_{Sᵀl}`; every window point must map into
    /// `target`. Entries whose original target left the window stay zero.
    pub fn relabel(&self, s: &IntMatrix, target: FourierWindow) -> Result<Self> {
        let map = relabel_map(self.window, s, target)?;
        let st = s.transpose();
        let terms = self
            .terms
            .iter()
            .map(|t| {
                let k2 = st.mul_vec(&t.k)?;
                if max_abs_shift(&k2) > 2 * target.big_n as i64 {
                    return Err(Error::ShiftOutsideWindow { shift: k2.as_slice().to_vec(), reach: 2 * target.big_n as i64 });
                }
                let mut diag = vec![ZERO; target.size()];
                for (m, &d) in t.diag.iter().enumerate() {
                    if self.window.shifted(m, t.k.as_slice()).is_some() {
                        diag[map[m]] = d;
                    }
                }
                Ok(ShiftTerm { k: k2, diag })
            })
            .collect::<Result<_>>()?;
        Ok(Self { window: target, terms })
    }
}

fn relabel_map(source: FourierWindow, s: &IntMatrix, target: FourierWindow) -> Result<Vec<usize>> {
    if !s.is_unimodular() {
        return Err(crate::lattice::LatticeError::NotUnimodular { det: s.det()? }.into());
    }
    if s.rows() != source.n || target.n != source.n {
        return Err(Error::DimensionMismatch { expected: source.n, got: s.rows() });
    }
    let st = s.transpose();
    source
        .points()
        .map(|l| {
            let img = st.mul_vec(&IntVector::new(l)?)?;
            target
                .index(img.as_slice())
                .ok_or_else(|| Error::ShiftOutsideWindow { shift: img.as_slice().to_vec(), reach: target.big_n as i64 })
        })
        .collect()
}

/// `φ'(Sᵀl) = φ(l)`, zero elsewhere in `target`.
pub fn relabel_vector(phi: &[Complex64], source: FourierWindow, s: &IntMatrix, target: FourierWindow) -> Result<Vec<Complex64>> {
    if phi.len() != source.size() {
        return Err(Error::DimensionMismatch { expected: source.size(), got: phi.len() });
    }
    let map = relabel_map(source, s, target)?;
    let mut out = vec![ZERO; target.size()];
    for (i, &x) in phi.iter().enumerate() {
        out[map[i]] = x;
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NormMethod {
    /// Single-shift closed form, else dense up to [`DENSE_LIMIT`], else power.
    Auto,
    Dense,
    Power { tol: f64, max_iter: usize, seed: u64 },
}

impl NormMethod {
    pub fn power() -> Self {
        NormMethod::Power { tol: 1e-8, max_iter: 10_000, seed: 0x5eed }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NormEstimate {
    pub value: f64,
    pub method: &'static str,
    pub converged: bool,
    pub iterations: usize,
}

/// `‖A‖` on the whole window.
pub fn operator_norm(a: &LatticeOperator, method: NormMethod) -> Result<NormEstimate> {
    restricted_norm(a, 0, method)
}

/// Largest singular value of `A` restricted to vectors supported in the
/// interior with the given margin.
pub fn restricted_norm(a: &LatticeOperator, margin: usize, method: NormMethod) -> Result<NormEstimate> {
    let w = a.window();
    if margin > w.big_n {
        return Err(Error::InvalidArgument(format!("margin {margin} exceeds N={}", w.big_n)));
    }
    let a = a.merged();
    let cols = w.interior_indices(margin);
    match method {
        NormMethod::Auto => {
            if a.terms.len() <= 1 {
                return Ok(single_shift_norm(&a, &cols));
            }
            if w.size() <= DENSE_LIMIT {
                dense_norm(&a, &cols)
            } else {
                power_norm(&a, &cols, 1e-8, 10_000, 0x5eed)
            }
        }
        NormMethod::Dense => {
            if w.size() > DENSE_LIMIT {
                return Err(Error::WindowTooLarge { size: w.size(), limit: DENSE_LIMIT });
            }
            dense_norm(&a, &cols)
        }
        NormMethod::Power { tol, max_iter, seed } => power_norm(&a, &cols, tol, max_iter, seed),
    }
}

/// A single shift is a partial isometry times a diagonal, so its norm is the
/// largest live diagonal entry.
fn single_shift_norm(a: &LatticeOperator, cols: &[usize]) -> NormEstimate {
    let value = match a.terms.first() {
        None => 0.0,
        Some(t) => cols
            .iter()
            .filter(|&&m| a.window.shifted(m, t.k.as_slice()).is_some())
            .map(|&m| t.diag[m].norm())
            .fold(0.0, f64::max),
    };
    NormEstimate { value, method: "single-shift", converged: true, iterations: 0 }
}

/// Largest singular value of the columns of `m` indexed by `interior(margin)`.
pub fn dense_restricted_norm(m: &DMatrix<Complex64>, window: FourierWindow, margin: usize) -> Result<f64> {
    if m.nrows() != window.size() || m.ncols() != window.size() {
        return Err(Error::DimensionMismatch { expected: window.size(), got: m.nrows() });
    }
    if margin > window.big_n {
        return Err(Error::InvalidArgument(format!("margin {margin} exceeds N={}", window.big_n)));
    }
    let cols = window.interior_indices(margin);
    if cols.is_empty() {
        return Ok(0.0);
    }
    let sub = DMatrix::from_fn(m.nrows(), cols.len(), |i, j| m[(i, cols[j])]);
    Ok(sub.singular_values().iter().copied().fold(0.0, f64::max))
}

fn dense_norm(a: &LatticeOperator, cols: &[usize]) -> Result<NormEstimate> {
    if cols.is_empty() || a.terms.is_empty() {
        return Ok(NormEstimate { value: 0.0, method: "dense", converged: true, iterations: 0 });
    }
    let full = a.dense();
    let m = DMatrix::from_fn(full.nrows(), cols.len(), |i, j| full[(i, cols[j])]);
    let value = m.singular_values().iter().copied().fold(0.0, f64::max);
    Ok(NormEstimate { value, method: "dense", converged: true, iterations: 0 })
}

fn power_norm(a: &LatticeOperator, cols: &[usize], tol: f64, max_iter: usize, seed: u64) -> Result<NormEstimate> {
    let size = a.window.size();
    if cols.is_empty() || a.terms.is_empty() {
        return Ok(NormEstimate { value: 0.0, method: "power", converged: true, iterations: 0 });
    }
    let mut mask = vec![false; size];
    for &c in cols {
        mask[c] = true;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut v: Vec<Complex64> = (0..size)
        .map(|i| if mask[i] { Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) } else { ZERO })
        .collect();
    let normalize = |v: &mut Vec<Complex64>| {
        let n = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        if n > 0.0 {
            for x in v.iter_mut() {
                *x /= n;
            }
        }
        n
    };
    normalize(&mut v);
    let mut lambda = 0.0;
    for it in 1..=max_iter {
        let av = a.apply_unchecked(&v);
        let mut w = a.apply_adjoint_unchecked(&av);
        for (x, &keep) in w.iter_mut().zip(&mask) {
            if !keep {
                *x = ZERO;
            }
        }
        let next = normalize(&mut w);
        if next == 0.0 {
            return Ok(NormEstimate { value: 0.0, method: "power", converged: true, iterations: it });
        }
        let done = (next - lambda).abs() <= tol * next;
        lambda = next;
        v = w;
        if done {
            return Ok(NormEstimate { value: lambda.sqrt(), method: "power", converged: true, iterations: it });
        }
    }
    Ok(NormEstimate { value: lambda.sqrt(), method: "power", converged: false, iterations: max_iter })
}

/// `Σ_k f(k) S_per^k` on `ℓ²(Z_Kⁿ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodicShiftOp {
    n: usize,
    modulus: usize,
    coeffs: Vec<Complex64>,
}

impl PeriodicShiftOp {
    pub fn new(n: usize, modulus: usize, coeffs: Vec<Complex64>) -> Result<Self> {
        if modulus == 0 || n == 0 {
            return Err(Error::InvalidArgument("modulus and dimension must be at least 1".into()));
        }
        let size = modulus.pow(n as u32);
        if coeffs.len() > size {
            return Err(Error::DimensionMismatch { expected: size, got: coeffs.len() });
        }
        let mut coeffs = coeffs;
        coeffs.resize(size, ZERO);
        Ok(Self { n, modulus, coeffs })
    }

    pub fn from_map(n: usize, modulus: usize, entries: &BTreeMap<Vec<i64>, Complex64>) -> Result<Self> {
        let mut op = Self::new(n, modulus, vec![])?;
        for (k, &c) in entries {
            let idx = op.index(k);
            op.coeffs[idx] += c;
        }
        Ok(op)
    }

    fn index(&self, k: &[i64]) -> usize {
        let m = self.modulus as i64;
        k.iter().fold(0usize, |acc, &x| acc * self.modulus + x.rem_euclid(m) as usize)
    }

    fn class(&self, mut idx: usize) -> Vec<usize> {
        let mut out = vec![0; self.n];
        for slot in out.iter_mut().rev() {
            *slot = idx % self.modulus;
            idx /= self.modulus;
        }
        out
    }

    pub fn size(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn dense(&self) -> DMatrix<Complex64> {
        let size = self.size();
        let mut m = DMatrix::from_element(size, size, ZERO);
        for (ki, &f) in self.coeffs.iter().enumerate() {
            if f == ZERO {
                continue;
            }
            let k = self.class(ki);
            for src in 0..size {
                let s = self.class(src);
                let dst: Vec<i64> = s.iter().zip(&k).map(|(a, b)| (a + b) as i64).collect();
                m[(self.index(&dst), src)] += f;
            }
        }
        m
    }
}

/// `max_l |Σ_k f(k) e^{2πi k·l/K}|`.
pub fn periodic_norm_dft(p: &PeriodicShiftOp) -> f64 {
    let kk = p.modulus as f64;
    let classes: Vec<Vec<usize>> = (0..p.size()).map(|i| p.class(i)).collect();
    classes
        .iter()
        .map(|l| {
            p.coeffs
                .iter()
                .zip(&classes)
                .map(|(&f, k)| {
                    let dot: usize = k.iter().zip(l).map(|(a, b)| a * b).sum::<usize>() % p.modulus;
                    f * Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * dot as f64 / kk)
                })
                .sum::<Complex64>()
                .norm()
        })
        .fold(0.0, f64::max)
}

/// Largest singular value of the dense `Kⁿ × Kⁿ` matrix.
pub fn periodic_norm_dense(p: &PeriodicShiftOp) -> f64 {
    p.dense().singular_values().iter().copied().fold(0.0, f64::max)
}

/// CSV table of one diagonal: index columns `l1..ln`, then `re,im`.
pub fn diagonal_csv(window: FourierWindow, diag: &[Complex64]) -> String {
    let mut s = String::new();
    let idx: Vec<String> = (1..=window.n).map(|i| format!("l{i}")).collect();
    s.push_str(&idx.join(","));
    s.push_str(",re,im\n");
    for (m, d) in diag.iter().enumerate() {
        let l = window.point(m);
        for x in &l {
            s.push_str(&format!("{x},"));
        }
        s.push_str(&format!("{:.16e},{:.16e}\n", d.re, d.im));
    }
    s
}

/// `{n, N, terms: [{k, diag_ref}]}` with caller-chosen references.
pub fn manifest_json(op: &LatticeOperator, diag_refs: &[String]) -> serde_json::Value {
    let terms: Vec<serde_json::Value> = op
        .terms()
        .iter()
        .zip(diag_refs)
        .map(|(t, r)| serde_json::json!({ "k": t.k.as_slice(), "diag_ref": r }))
        .collect();
    serde_json::json!({ "n": op.window().n, "N": op.window().big_n, "terms": terms })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn window_index_roundtrip() {
        let w = FourierWindow::new(2, 3).unwrap();
        for i in 0..w.size() {
            assert_eq!(w.index(&w.point(i)), Some(i));
        }
        assert_eq!(w.index(&[4, 0]), None);
        let i = w.index(&[1, -2]).unwrap();
        assert_eq!(w.shifted(i, &[-1, 2]), w.index(&[0, 0]));
        assert_eq!(w.shifted(i, &[3, 0]), None);
    }

    #[test]
    fn single_shift_moves_delta() {
        let w = FourierWindow::new(1, 4).unwrap();
        let a = LatticeOperator::from_fn(w, IntVector::new(vec![2]).unwrap(), |l| c(l[0] as f64 + 5.0, 0.0)).unwrap();
        let mut delta = vec![ZERO; w.size()];
        delta[w.index(&[0]).unwrap()] = c(1.0, 0.0);
        let out = a.apply(&delta).unwrap();
        assert_eq!(out[w.index(&[2]).unwrap()], c(5.0, 0.0));
        assert_eq!(out.iter().filter(|x| **x != ZERO).count(), 1);
    }

    #[test]
    fn periodic_two_point() {
        let p = PeriodicShiftOp::new(1, 2, vec![c(1.0, 0.0), c(1.0, 0.0)]).unwrap();
        assert!((periodic_norm_dft(&p) - 2.0).abs() < 1e-15);
        assert!((periodic_norm_dense(&p) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn zero_operator_norm() {
        let w = FourierWindow::new(1, 3).unwrap();
        let z = LatticeOperator::zero(w);
        assert_eq!(operator_norm(&z, NormMethod::Dense).unwrap().value, 0.0);
        assert_eq!(operator_norm(&z, NormMethod::Auto).unwrap().value, 0.0);
    }

    #[test]
    fn relabel_rejects_overflowing_target() {
        let w = FourierWindow::new(2, 2).unwrap();
        let s = IntMatrix::from_rows(&[vec![1, 1], vec![0, 1]]).unwrap();
        let phi = vec![c(1.0, 0.0); w.size()];
        assert!(relabel_vector(&phi, w, &s, w).is_err());
        let big = FourierWindow::new(2, 4).unwrap();
        assert!(relabel_vector(&phi, w, &s, big).is_ok());
    }

    #[test]
    fn csv_has_header_and_rows() {
        let w = FourierWindow::new(1, 1).unwrap();
        let s = diagonal_csv(w, &[c(1.0, 0.0), c(0.0, 1.0), ZERO]);
        let lines: Vec<&str> = s.lines().collect();
        assert_eq!(lines[0], "l1,re,im");
        assert_eq!(lines.len(), 4);
        assert!(lines[1].starts_with("-1,"));
    }
}
