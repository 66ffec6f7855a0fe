#![allow(dead_code)]

use cylq_core::lattice::IntVector;
use cylq_core::symbols::{Generator, MomentumSymbol, Observable, Poly, Subspace, SymbolTerm};
use num_complex::Complex64;
use rand::Rng;

pub struct Shape {
    pub n: usize,
    pub max_d: usize,
    pub max_k: i64,
    pub generators: usize,
    pub max_degree: u32,
}

impl Shape {
    pub fn new(n: usize) -> Self {
        Self { n, max_d: n.min(2), max_k: 2, generators: 2, max_degree: 2 }
    }
}

pub fn random_vec<R: Rng>(rng: &mut R, n: usize, r: f64) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(-r..r)).collect()
}

pub fn random_complex<R: Rng>(rng: &mut R) -> Complex64 {
    Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

pub fn random_subspace<R: Rng>(rng: &mut R, n: usize, d: usize) -> Subspace {
    loop {
        let vs: Vec<Vec<f64>> = (0..d).map(|_| random_vec(rng, n, 1.0)).collect();
        let s = Subspace::span(n, &vs).unwrap();
        if s.dim() == d {
            return s;
        }
    }
}

pub fn random_term<R: Rng>(rng: &mut R, d: usize, max_degree: u32) -> SymbolTerm {
    if d == 0 {
        return SymbolTerm::constant(random_complex(rng));
    }
    let l: Vec<Vec<f64>> = (0..d).map(|_| random_vec(rng, d, 0.8)).collect();
    let quad: Vec<Vec<f64>> = (0..d)
        .map(|i| {
            (0..d)
                .map(|j| (0..d).map(|s| l[i][s] * l[j][s]).sum::<f64>() + if i == j { 0.3 } else { 0.0 })
                .collect()
        })
        .collect();
    let monomials = rng.gen_range(1..=3);
    let entries: Vec<(Vec<u32>, Complex64)> = (0..monomials)
        .map(|_| ((0..d).map(|_| rng.gen_range(0..=max_degree)).collect(), random_complex(rng)))
        .collect();
    let poly = Poly::from_terms(d, entries);
    let poly = if poly.is_zero() { Poly::one(d) } else { poly };
    SymbolTerm::new(random_complex(rng), poly, quad, random_vec(rng, d, 1.0), random_vec(rng, d, 1.0)).unwrap()
}

pub fn random_symbol<R: Rng>(rng: &mut R, n: usize, d: usize, max_degree: u32) -> MomentumSymbol {
    let sub = random_subspace(rng, n, d);
    let xi = sub.project_perp(&random_vec(rng, n, 2.0));
    let terms = (0..rng.gen_range(1..=2)).map(|_| random_term(rng, d, max_degree)).collect();
    MomentumSymbol::new(sub, xi, terms).unwrap()
}

pub fn random_k<R: Rng>(rng: &mut R, n: usize, max_k: i64) -> IntVector {
    IntVector::new((0..n).map(|_| rng.gen_range(-max_k..=max_k)).collect()).unwrap()
}

pub fn random_observable<R: Rng>(rng: &mut R, shape: &Shape) -> Observable {
    let gens = (0..shape.generators)
        .map(|_| {
            let d = rng.gen_range(0..=shape.max_d);
            Generator::new(random_k(rng, shape.n, shape.max_k), random_symbol(rng, shape.n, d, shape.max_degree)).unwrap()
        })
        .collect();
    Observable::from_generators(shape.n, gens).unwrap()
}

pub fn random_point<R: Rng>(rng: &mut R, n: usize, pr: f64) -> (Vec<f64>, Vec<f64>) {
    ((0..n).map(|_| rng.gen::<f64>()).collect(), random_vec(rng, n, pr))
}
