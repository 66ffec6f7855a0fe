mod common;

use std::f64::consts::PI;

use common::{random_complex, random_observable, Shape};
use cylq_core::classical_dynamics::TrigPotential;
use cylq_core::lattice::IntVector;
use cylq_core::operators::{dense_restricted_norm, restricted_norm, FourierWindow, LatticeOperator, NormMethod, ShiftTerm};
use cylq_core::quadrature::gauss_legendre;
use cylq_core::quantizer::{weyl_quantize, PlanckParam};
use cylq_core::quantum_dynamics::{
    dyson_partial_sum, dyson_term, dyson_with_residual, exact_interaction_propagator, free_conjugation_symbolic,
    free_propagator, heisenberg_evolution_check, heisenberg_free, DysonQuadrature,
};
use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn hb(h: f64) -> PlanckParam {
    PlanckParam::new(h).unwrap()
}

fn iv(k: &[i64]) -> IntVector {
    IntVector::new(k.to_vec()).unwrap()
}

fn random_op<R: Rng>(rng: &mut R, w: FourierWindow, terms: usize, max_k: i64) -> LatticeOperator {
    let terms = (0..terms)
        .map(|_| ShiftTerm {
            k: common::random_k(rng, w.n, max_k),
            diag: (0..w.size()).map(|_| random_complex(rng)).collect(),
        })
        .collect();
    LatticeOperator::new(w, terms).unwrap()
}

fn tau_dense(a: &LatticeOperator, hbar: PlanckParam, t: f64) -> DMatrix<Complex64> {
    let w = a.window();
    free_propagator(w, hbar, -t).dense() * a.dense() * free_propagator(w, hbar, t).dense()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn free_covariance_square(seed in any::<u64>(), n in 1usize..=2) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = random_observable(&mut rng, &Shape::new(n));
        let t = rng.gen_range(-1.0..1.0);
        let h = hb(rng.gen_range(0.05..1.0));
        let w = FourierWindow::new(n, if n == 1 { 12 } else { 5 }).unwrap();
        let lhs = weyl_quantize(&free_conjugation_symbolic(&f, t), h, w).unwrap().dense();
        let rhs = tau_dense(&weyl_quantize(&f, h, w).unwrap(), h, t);
        let v = dense_restricted_norm(&(lhs - rhs), w, f.max_shift() as usize).unwrap();
        prop_assert!(v <= 1e-12 * (1.0 + f.sup_upper_bound()), "{}", v);
    }

    #[test]
    fn heisenberg_free_matches_dense(seed in any::<u64>(), n in 1usize..=2) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let w = FourierWindow::new(n, 4).unwrap();
        let a = random_op(&mut rng, w, 3, 2);
        let (h, t) = (hb(rng.gen_range(0.1..1.0)), rng.gen_range(-1.0..1.0));
        let diff = heisenberg_free(&a, h, t).dense() - tau_dense(&a, h, t);
        prop_assert!(diff.iter().map(|x| x.norm()).fold(0.0, f64::max) <= 1e-12);
        for (x, y) in heisenberg_free(&a, h, t).terms().iter().zip(a.terms()) {
            prop_assert_eq!(&x.k, &y.k);
            for (p, q) in x.diag.iter().zip(&y.diag) {
                prop_assert!((p.norm() - q.norm()).abs() <= 1e-15);
            }
        }
    }
}

#[test]
fn free_propagator_basics() {
    let w = FourierWindow::new(2, 3).unwrap();
    assert_eq!(free_propagator(w, hb(0.7), 0.0), LatticeOperator::identity(w));
    let u = free_propagator(w, hb(0.7), 2.3);
    assert!(u.terms()[0].diag.iter().all(|d| (d.norm() - 1.0).abs() < 1e-15));
    assert_eq!(u.terms()[0].diag[w.index(&[0, 0]).unwrap()], Complex64::new(1.0, 0.0));
    let a = random_op(&mut ChaCha8Rng::seed_from_u64(1), w, 2, 1);
    assert_eq!(heisenberg_free(&a, hb(0.7), 0.0), a);
    let d = LatticeOperator::diagonal(w, |l| Complex64::new(l[0] as f64, 1.0));
    assert_eq!(heisenberg_free(&d, hb(0.7), 1.3), d);
}

#[test]
fn dyson_first_order_closed_form() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let w = FourierWindow::new(2, 6).unwrap();
    let quad = DysonQuadrature::default();
    let mut checked = 0;
    while checked < 100 {
        let k: Vec<i64> = (0..2).map(|_| rng.gen_range(-2..=2)).collect();
        let h = rng.gen_range(0.05..1.5);
        let t = rng.gen_range(-1.0..1.0);
        let (op, _) = dyson_term(&[iv(&k)], t, hb(h), w, quad).unwrap();
        let a: Vec<i64> = (0..2).map(|_| rng.gen_range(-4..=4)).collect();
        let moved: Vec<i64> = a.iter().zip(&k).map(|(x, y)| x + y).collect();
        if !w.contains(&moved) {
            continue;
        }
        let c = (moved.iter().map(|x| x * x).sum::<i64>() - a.iter().map(|x| x * x).sum::<i64>()) as f64;
        let want = if c == 0.0 {
            Complex64::new(t, 0.0)
        } else {
            let om = 2.0 * PI * PI * h * c;
            (Complex64::from_polar(1.0, om * t) - 1.0) / Complex64::new(0.0, om)
        };
        let got = op.terms()[0].diag[w.index(&a).unwrap()];
        assert!((got - want).norm() <= 1e-10, "{got} {want}");
        checked += 1;
    }
    let (op, _) = dyson_term(&[iv(&[0, 0])], 0.4, hb(1.0), w, quad).unwrap();
    assert!(op.terms()[0].diag.iter().all(|d| (d - Complex64::new(0.4, 0.0)).norm() < 1e-14));
}

#[test]
fn dyson_second_order_against_tensor_rule() {
    let w = FourierWindow::new(1, 6).unwrap();
    let (h, t) = (0.3, 0.7);
    let ks = [iv(&[1]), iv(&[-2])];
    let (op, _) = dyson_term(&ks, t, hb(h), w, DysonQuadrature::default()).unwrap();
    let rule = gauss_legendre(200, 0.0, 1.0);
    for a in -3i64..=3 {
        // a₂ = a, a₁ = a + k₂; t₂ = t₁·s on the triangle.
        let c2 = ((a - 2) * (a - 2) - a * a) as f64;
        let c1 = ((a - 2 + 1) * (a - 2 + 1) - (a - 2) * (a - 2)) as f64;
        let om = 2.0 * PI * PI * h;
        let mut want = Complex64::new(0.0, 0.0);
        for &(x, wx) in &rule {
            for &(y, wy) in &rule {
                let t1 = t * x;
                let t2 = t1 * y;
                want += Complex64::from_polar(wx * wy * t * t1, om * (c1 * t1 + c2 * t2));
            }
        }
        let got = op.terms()[0].diag[w.index(&[a]).unwrap()];
        assert!((got - want).norm() <= 1e-8, "a={a}: {got} {want}");
    }
}

#[test]
fn quasi_monte_carlo_cross_validates() {
    let w = FourierWindow::new(1, 4).unwrap();
    let ks = [iv(&[1]), iv(&[1]), iv(&[-1]), iv(&[0]), iv(&[-1])];
    let (gl, gl_err) = dyson_term(&ks, 0.5, hb(0.1), w, DysonQuadrature::default()).unwrap();
    let qmc = DysonQuadrature::QuasiMonteCarlo { points: 20_000, shifts: 8, seed: 3 };
    let (mc, mc_err) = dyson_term(&ks, 0.5, hb(0.1), w, qmc).unwrap();
    assert!(gl_err < 1e-12);
    let d = gl.sub(&mc).unwrap();
    let worst = d.terms().iter().flat_map(|t| t.diag.iter()).map(|x| x.norm()).fold(0.0, f64::max);
    let scale = 0.5f64.powi(5) / 120.0;
    assert!(worst <= 10.0 * mc_err.max(1e-6 * scale), "{worst} vs {mc_err}");
}

#[test]
fn dyson_trivial_cases() {
    let w = FourierWindow::new(1, 5).unwrap();
    let (op, rep) = dyson_partial_sum(&TrigPotential::zero(1), 0.5, hb(1.0), w, 4, DysonQuadrature::default()).unwrap();
    assert_eq!(op.merged(), LatticeOperator::identity(w).merged());
    assert_eq!(rep.remainder_bound, 0.0);
    let v = TrigPotential::cosine(vec![1], 1.0).unwrap();
    let (op, rep) = dyson_partial_sum(&v, 0.5, hb(1.0), w, 0, DysonQuadrature::default()).unwrap();
    assert_eq!(op.merged(), LatticeOperator::identity(w).merged());
    assert!((rep.remainder_bound - (0.5f64.exp() - 1.0)).abs() < 1e-15);
    let wide = TrigPotential::cosine(vec![1], 1.0)
        .unwrap()
        .add(&TrigPotential::cosine(vec![2], 1.0).unwrap())
        .unwrap()
        .add(&TrigPotential::cosine(vec![3], 1.0).unwrap())
        .unwrap();
    assert!(dyson_partial_sum(&wide, 0.5, hb(1.0), w, 7, DysonQuadrature::default()).is_err());
}

#[test]
fn dyson_converges_to_exact_propagator() {
    let v = TrigPotential::cosine(vec![1], 1.0).unwrap();
    let w = FourierWindow::new(1, 24).unwrap();
    let (_, rep) = dyson_with_residual(&v, 0.5, hb(1.0), w, 8, DysonQuadrature::default()).unwrap();
    let r = rep.residual.unwrap();
    assert!(r <= rep.remainder_bound + rep.quadrature_error, "{rep:?}");
    assert!(r <= 1e-4);
    for m in [1, 2, 4, 6] {
        let (_, rep) = dyson_with_residual(&v, 0.5, hb(1.0), FourierWindow::new(1, 12).unwrap(), m, DysonQuadrature::default()).unwrap();
        assert!(rep.residual.unwrap() <= rep.remainder_bound + rep.quadrature_error, "{rep:?}");
    }
}

#[test]
fn exact_propagator_properties() {
    let w = FourierWindow::new(2, 3).unwrap();
    let id = DMatrix::<Complex64>::identity(w.size(), w.size());
    let v = TrigPotential::cosine(vec![1, 0], 0.8).unwrap().add(&TrigPotential::cosine(vec![1, -1], 0.3).unwrap()).unwrap();
    let m = |x: DMatrix<Complex64>| x.iter().map(|z| z.norm()).fold(0.0, f64::max);
    assert!(m(exact_interaction_propagator(&TrigPotential::zero(2), 0.7, hb(0.5), w).unwrap() - &id) <= 1e-12);
    assert!(m(exact_interaction_propagator(&v, 0.0, hb(0.5), w).unwrap() - &id) <= 1e-12);
    let u = exact_interaction_propagator(&v, 0.7, hb(0.5), w).unwrap();
    assert!(m(u.adjoint() * &u - &id) <= 1e-12);
}

#[test]
fn heisenberg_identity_holds() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let w = FourierWindow::new(1, 12).unwrap();
    let v = TrigPotential::cosine(vec![1], 1.0).unwrap();
    for t in [0.0, 0.25, 0.5] {
        let a = random_op(&mut rng, w, 3, 2);
        let rep = heisenberg_evolution_check(&a, &v, t, hb(1.0), w).unwrap();
        assert!(rep.value <= 1e-10, "{rep:?}");
    }
    let a = random_op(&mut rng, w, 2, 1);
    let rep = heisenberg_evolution_check(&a, &TrigPotential::zero(1), 0.4, hb(0.6), w).unwrap();
    assert!(rep.value <= 1e-12);
    let _ = restricted_norm(&a, 0, NormMethod::Auto).unwrap();
}
