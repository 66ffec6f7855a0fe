//! Classical observables on `Tⁿ × Rⁿ`: finite sums of generators
//! `e_k ⊗ h` where `h` is a [`MomentumSymbol`].

pub mod json;
pub mod momentum;
pub mod poly;
pub mod subspace;
pub mod supnorm;

use std::f64::consts::PI;

use num_complex::Complex64;

pub use momentum::{isotropic_gaussian, MomentumSymbol, SymbolTerm};
pub use poly::Poly;
pub use subspace::Subspace;
pub use supnorm::{sup_norm_estimate, SupNormBudget};

use crate::error::{Error, Result};
use crate::lattice::IntVector;

#[derive(Debug, Clone, PartialEq)]
pub struct Generator {
    pub k: IntVector,
    pub h: MomentumSymbol,
}

impl Generator {
    pub fn new(k: IntVector, h: MomentumSymbol) -> Result<Self> {
        if k.dim() != h.ambient() {
            return Err(Error::DimensionMismatch { expected: h.ambient(), got: k.dim() });
        }
        Ok(Self { k, h })
    }

    pub fn eval(&self, q: &[f64], p: &[f64]) -> Complex64 {
        let kq: f64 = self.k.as_slice().iter().zip(q).map(|(&k, &x)| k as f64 * x).sum();
        Complex64::from_polar(1.0, 2.0 * PI * kq) * self.h.eval(p)
    }

    fn k_f64(&self) -> Vec<f64> {
        self.k.as_slice().iter().map(|&x| x as f64).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Observable {
    n: usize,
    generators: Vec<Generator>,
}

impl Observable {
    pub fn zero(n: usize) -> Self {
        Self { n, generators: Vec::new() }
    }

    /// `e_0 ⊗ 1`.
    pub fn one(n: usize) -> Self {
        Self::single(IntVector::zeros(n), MomentumSymbol::constant(n, Complex64::new(1.0, 0.0)))
            .expect("consistent dimensions")
    }

    pub fn single(k: IntVector, h: MomentumSymbol) -> Result<Self> {
        let n = h.ambient();
        Ok(Self { n, generators: vec![Generator::new(k, h)?] })
    }

    pub fn from_generators(n: usize, generators: Vec<Generator>) -> Result<Self> {
        for g in &generators {
            if g.h.ambient() != n {
                return Err(Error::DimensionMismatch { expected: n, got: g.h.ambient() });
            }
        }
        Ok(Self { n, generators })
    }

    /// `e_0 ⊗ sin(p₁/ħ₀)` built from two plane waves.
    pub fn sine(n: usize, hbar0: f64) -> Self {
        let mut xi = vec![0.0; n];
        xi[0] = 1.0 / hbar0;
        let minus: Vec<f64> = xi.iter().map(|x| -x).collect();
        let half = Complex64::new(0.0, -0.5);
        let gens = vec![
            Generator { k: IntVector::zeros(n), h: MomentumSymbol::plane_wave(xi).scaled(half) },
            Generator { k: IntVector::zeros(n), h: MomentumSymbol::plane_wave(minus).scaled(-half) },
        ];
        Self { n, generators: gens }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn generators(&self) -> &[Generator] {
        &self.generators
    }

    pub fn is_zero(&self) -> bool {
        self.generators.is_empty()
    }

    /// Largest `max_i |k_i|` over generators.
    pub fn max_shift(&self) -> i64 {
        self.generators
            .iter()
            .flat_map(|g| g.k.as_slice().iter().map(|x| x.abs()))
            .max()
            .unwrap_or(0)
    }

    fn check_dim(&self, other: &Self) -> Result<()> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: other.n });
        }
        Ok(())
    }

    pub fn eval(&self, q: &[f64], p: &[f64]) -> Complex64 {
        self.generators.iter().map(|g| g.eval(q, p)).sum()
    }

    /// Certified upper bound `Σ_j sup|h_j|`.
    pub fn sup_upper_bound(&self) -> f64 {
        self.generators.iter().map(|g| g.h.sup_upper_bound()).sum()
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        let mut generators = self.generators.clone();
        generators.extend(other.generators.iter().cloned());
        Ok(Self { n: self.n, generators })
    }

    pub fn scale(&self, s: Complex64) -> Self {
        let generators =
            self.generators.iter().map(|g| Generator { k: g.k.clone(), h: g.h.scaled(s) }).collect();
        Self { n: self.n, generators }
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    pub fn multiply(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        let mut generators = Vec::with_capacity(self.generators.len() * other.generators.len());
        for g1 in &self.generators {
            for g2 in &other.generators {
                generators.push(Generator { k: add_k(&g1.k, &g2.k)?, h: g1.h.multiply(&g2.h)? });
            }
        }
        Ok(Self { n: self.n, generators })
    }

    pub fn conjugate(&self) -> Self {
        let generators = self
            .generators
            .iter()
            .map(|g| Generator {
                k: IntVector::new(g.k.as_slice().iter().map(|x| -x).collect()).expect("nonempty"),
                h: g.h.conj(),
            })
            .collect();
        Self { n: self.n, generators }
    }

    /// `{f, g} = Σ_l ∂_{p_l} f ∂_{q_l} g − ∂_{q_l} f ∂_{p_l} g`, generator-wise
    /// `2πi e_{k₁+k₂} ⊗ ((∇_{k₂} h₁) h₂ − h₁ ∇_{k₁} h₂)`.
    pub fn poisson_bracket(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        let two_pi_i = Complex64::new(0.0, 2.0 * PI);
        let mut generators = Vec::new();
        for g1 in &self.generators {
            for g2 in &other.generators {
                let k = add_k(&g1.k, &g2.k)?;
                let left = g1.h.derivative(&g2.k_f64()).multiply(&g2.h)?;
                let right = g1.h.multiply(&g2.h.derivative(&g1.k_f64()))?;
                generators.push(Generator { k: k.clone(), h: left.scaled(two_pi_i) });
                generators.push(Generator { k, h: right.scaled(-two_pi_i) });
            }
        }
        Ok(Self { n: self.n, generators })
    }

    /// `(q, p) ↦ f(q, Cp)`.
    pub fn scale_momentum(&self, c: f64) -> Result<Self> {
        let generators = self
            .generators
            .iter()
            .map(|g| Ok(Generator { k: g.k.clone(), h: g.h.scale_momentum(c)? }))
            .collect::<Result<_>>()?;
        Ok(Self { n: self.n, generators })
    }

    /// `(q, p) ↦ f(q − x, p)`.
    pub fn translate_config(&self, x: &[f64]) -> Result<Self> {
        if x.len() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: x.len() });
        }
        let generators = self
            .generators
            .iter()
            .map(|g| {
                let kx: f64 = g.k.as_slice().iter().zip(x).map(|(&k, &xi)| k as f64 * xi).sum();
                Generator { k: g.k.clone(), h: g.h.scaled(Complex64::from_polar(1.0, -2.0 * PI * kx)) }
            })
            .collect();
        Ok(Self { n: self.n, generators })
    }

    /// `(q, p) ↦ f(q + t p, p)`, the pullback along the free flow.
    pub fn free_flow_pullback(&self, t: f64) -> Self {
        let generators = self
            .generators
            .iter()
            .map(|g| {
                let delta: Vec<f64> = g.k_f64().iter().map(|k| 2.0 * PI * t * k).collect();
                Generator { k: g.k.clone(), h: g.h.phase_twist(&delta) }
            })
            .collect();
        Self { n: self.n, generators }
    }

    /// `f ⊗ 1` on `T^{n+m} × R^{n+m}`.
    pub fn tensor_with_ones(&self, m: usize) -> Self {
        let generators = self
            .generators
            .iter()
            .map(|g| {
                let mut k = g.k.as_slice().to_vec();
                k.resize(self.n + m, 0);
                Generator { k: IntVector::new(k).expect("nonempty"), h: g.h.embed(m) }
            })
            .collect();
        Self { n: self.n + m, generators }
    }

    /// Merges generators whose `(k, P_U, ξ)` agree after rounding to 1e-12,
    /// merges equal Gaussian data inside each, drops empty generators and
    /// sorts by `k` then the subspace fingerprint.
    pub fn canonicalize(&self) -> Result<Self> {
        type Key = (Vec<i64>, Vec<i64>, Vec<i64>);
        let mut groups: Vec<(Key, Generator)> = Vec::new();
        for g in &self.generators {
            let (fp, xk) = g.h.merge_key();
            let key = (g.k.as_slice().to_vec(), fp, xk);
            if let Some((_, kept)) = groups.iter_mut().find(|(k, _)| *k == key) {
                kept.h.absorb(&g.h)?;
            } else {
                groups.push((key, g.clone()));
            }
        }
        for (_, g) in &mut groups {
            g.h.canonicalize_terms();
        }
        groups.retain(|(_, g)| !g.h.terms().is_empty());
        groups.sort_by(|a, b| a.0.cmp(&b.0));
        Ok(Self { n: self.n, generators: groups.into_iter().map(|(_, g)| g).collect() })
    }
}

fn add_k(a: &IntVector, b: &IntVector) -> Result<IntVector> {
    let v = a
        .as_slice()
        .iter()
        .zip(b.as_slice())
        .map(|(x, y)| x.checked_add(*y).ok_or(crate::lattice::LatticeError::Overflow("k1 + k2")))
        .collect::<std::result::Result<Vec<_>, _>>()?;
    Ok(IntVector::new(v)?)
}
