//! Seeded random inputs for the experiments.

use cylq_core::lattice::IntVector;
use cylq_core::operators::{FourierWindow, LatticeOperator, ShiftTerm};
use cylq_core::symbols::{Generator, MomentumSymbol, Observable, Poly, Subspace, SymbolTerm};
use num_complex::Complex64;
use rand::Rng;

pub fn vec<R: Rng>(rng: &mut R, n: usize, r: f64) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(-r..r)).collect()
}

pub fn complex<R: Rng>(rng: &mut R) -> Complex64 {
    Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

pub fn subspace<R: Rng>(rng: &mut R, n: usize, d: usize) -> Subspace {
    loop {
        let vs: Vec<Vec<f64>> = (0..d).map(|_| vec(rng, n, 1.0)).collect();
        if let Ok(s) = Subspace::span(n, &vs) {
            if s.dim() == d {
                return s;
            }
        }
    }
}

fn term<R: Rng>(rng: &mut R, d: usize) -> SymbolTerm {
    if d == 0 {
        return SymbolTerm::constant(complex(rng));
    }
    let l: Vec<Vec<f64>> = (0..d).map(|_| vec(rng, d, 0.8)).collect();
    let quad = (0..d)
        .map(|i| (0..d).map(|j| (0..d).map(|s| l[i][s] * l[j][s]).sum::<f64>() + if i == j { 0.3 } else { 0.0 }).collect())
        .collect();
    let entries: Vec<(Vec<u32>, Complex64)> =
        (0..rng.gen_range(1..=3)).map(|_| ((0..d).map(|_| rng.gen_range(0..=2)).collect(), complex(rng))).collect();
    let poly = Poly::from_terms(d, entries);
    let poly = if poly.is_zero() { Poly::one(d) } else { poly };
    SymbolTerm::new(complex(rng), poly, quad, vec(rng, d, 1.0), vec(rng, d, 1.0)).expect("positive definite by construction")
}

pub fn symbol<R: Rng>(rng: &mut R, n: usize, d: usize) -> MomentumSymbol {
    let sub = subspace(rng, n, d);
    let xi = sub.project_perp(&vec(rng, n, 2.0));
    let terms = (0..rng.gen_range(1..=2)).map(|_| term(rng, d)).collect();
    MomentumSymbol::new(sub, xi, terms).expect("valid by construction")
}

pub fn shift<R: Rng>(rng: &mut R, n: usize, max_k: i64) -> IntVector {
    IntVector::new((0..n).map(|_| rng.gen_range(-max_k..=max_k)).collect()).expect("nonempty")
}

pub fn generator<R: Rng>(rng: &mut R, n: usize, d: usize) -> Generator {
    Generator::new(shift(rng, n, 2), symbol(rng, n, d)).expect("matching dimensions")
}

pub fn observable<R: Rng>(rng: &mut R, n: usize) -> Observable {
    let gens = (0..2).map(|_| {
        let d = rng.gen_range(0..=n.min(2));
        generator(rng, n, d)
    });
    Observable::from_generators(n, gens.collect()).expect("matching dimensions")
}

pub fn operator<R: Rng>(rng: &mut R, w: FourierWindow, terms: usize, max_k: i64) -> LatticeOperator {
    let terms =
        (0..terms).map(|_| ShiftTerm { k: shift(rng, w.n, max_k), diag: (0..w.size()).map(|_| complex(rng)).collect() });
    LatticeOperator::new(w, terms.collect()).expect("shifts within reach")
}
