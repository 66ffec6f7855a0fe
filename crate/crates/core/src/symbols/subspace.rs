use crate::error::{Error, Result};

/// Rank tolerance when orthonormalizing spanning sets.
pub const RANK_TOL: f64 = 1e-10;
/// Orthonormality tolerance for supplied bases.
pub const ORTHO_TOL: f64 = 1e-12;

/// A linear subspace `U ⊂ Rⁿ` stored by an orthonormal basis.
#[derive(Debug, Clone, PartialEq)]
pub struct Subspace {
    n: usize,
    basis: Vec<Vec<f64>>,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

impl Subspace {
    pub fn zero(n: usize) -> Self {
        Self { n, basis: Vec::new() }
    }

    pub fn full(n: usize) -> Self {
        let basis = (0..n)
            .map(|i| {
                let mut e = vec![0.0; n];
                e[i] = 1.0;
                e
            })
            .collect();
        Self { n, basis }
    }

    /// Accepts a basis that is already orthonormal; nothing is rewritten.
    pub fn from_orthonormal(n: usize, basis: Vec<Vec<f64>>) -> Result<Self> {
        if basis.len() > n {
            return Err(Error::InvalidSymbol(format!("{} basis vectors in R^{n}", basis.len())));
        }
        for b in &basis {
            if b.len() != n {
                return Err(Error::DimensionMismatch { expected: n, got: b.len() });
            }
        }
        for i in 0..basis.len() {
            for j in 0..=i {
                let target = if i == j { 1.0 } else { 0.0 };
                let g = dot(&basis[i], &basis[j]);
                if (g - target).abs() > ORTHO_TOL {
                    return Err(Error::InvalidSymbol(format!(
                        "basis not orthonormal: <b{i},b{j}> = {g}"
                    )));
                }
            }
        }
        Ok(Self { n, basis })
    }

    /// Orthonormal basis of the span, by two-pass modified Gram-Schmidt.
    /// Vectors whose residual falls below [`RANK_TOL`] are dropped.
    pub fn span(n: usize, vectors: &[Vec<f64>]) -> Result<Self> {
        let mut basis: Vec<Vec<f64>> = Vec::new();
        for v in vectors {
            if v.len() != n {
                return Err(Error::DimensionMismatch { expected: n, got: v.len() });
            }
            let norm0 = dot(v, v).sqrt();
            if norm0 <= RANK_TOL {
                continue;
            }
            let mut w: Vec<f64> = v.iter().map(|x| x / norm0).collect();
            for _ in 0..2 {
                for b in &basis {
                    let c = dot(&w, b);
                    for (wi, bi) in w.iter_mut().zip(b) {
                        *wi -= c * bi;
                    }
                }
            }
            let r = dot(&w, &w).sqrt();
            if r <= RANK_TOL {
                continue;
            }
            for wi in &mut w {
                *wi /= r;
            }
            basis.push(w);
        }
        Ok(Self { n, basis })
    }

    /// `U₁ + U₂`.
    pub fn sum(&self, other: &Subspace) -> Result<Subspace> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: other.n });
        }
        let all: Vec<Vec<f64>> = self.basis.iter().chain(&other.basis).cloned().collect();
        Subspace::span(self.n, &all)
    }

    pub fn ambient(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Vec<f64>] {
        &self.basis
    }

    /// `u = Bᵀp`.
    pub fn coords(&self, p: &[f64]) -> Vec<f64> {
        self.basis.iter().map(|b| dot(b, p)).collect()
    }

    /// `B u`.
    pub fn lift(&self, u: &[f64]) -> Vec<f64> {
        let mut p = vec![0.0; self.n];
        for (b, &ui) in self.basis.iter().zip(u) {
            for (pi, bi) in p.iter_mut().zip(b) {
                *pi += ui * bi;
            }
        }
        p
    }

    pub fn project(&self, p: &[f64]) -> Vec<f64> {
        self.lift(&self.coords(p))
    }

    pub fn project_perp(&self, p: &[f64]) -> Vec<f64> {
        let pu = self.project(p);
        p.iter().zip(&pu).map(|(a, b)| a - b).collect()
    }

    /// Matrix `A = Bᵀ B_other` (one row per own basis vector), so that the
    /// coordinates relative to `self` of a point of `other` are `A u_other`.
    pub fn transition_from(&self, other: &Subspace) -> Vec<Vec<f64>> {
        self.basis
            .iter()
            .map(|b| other.basis.iter().map(|c| dot(b, c)).collect())
            .collect()
    }

    /// Projector `P_U` rounded to 1e-12, used as an ordering and merge key.
    pub fn fingerprint(&self) -> Vec<i64> {
        let mut out = Vec::with_capacity(self.n * self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                let v: f64 = self.basis.iter().map(|b| b[i] * b[j]).sum();
                out.push(round_key(v));
            }
        }
        out
    }

    /// `U ⊕ {0}` inside `R^{n+m}`.
    pub fn embed(&self, m: usize) -> Subspace {
        let basis = self
            .basis
            .iter()
            .map(|b| {
                let mut e = b.clone();
                e.resize(self.n + m, 0.0);
                e
            })
            .collect();
        Subspace { n: self.n + m, basis }
    }
}

pub(crate) fn round_key(v: f64) -> i64 {
    let r = (v * 1e12).round();
    if r == 0.0 {
        0
    } else {
        r as i64
    }
}
