mod common;

use std::f64::consts::PI;

use common::*;
use cylq_core::lattice::IntVector;
use cylq_core::symbols::{sup_norm_estimate, MomentumSymbol, Observable, SupNormBudget};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Five-point central difference of `f` along coordinate `i` of `(q, p)`.
fn partial(f: &Observable, q: &[f64], p: &[f64], i: usize, h: f64) -> Complex64 {
    let n = q.len();
    let at = |s: f64| {
        let (mut qq, mut pp) = (q.to_vec(), p.to_vec());
        if i < n {
            qq[i] += s;
        } else {
            pp[i - n] += s;
        }
        f.eval(&qq, &pp)
    };
    (at(-2.0 * h) - at(-h) * 8.0 + at(h) * 8.0 - at(2.0 * h)) / (12.0 * h)
}

fn fd_bracket(f: &Observable, g: &Observable, q: &[f64], p: &[f64]) -> Complex64 {
    let n = q.len();
    let h = 1e-4;
    (0..n)
        .map(|l| {
            partial(f, q, p, n + l, h) * partial(g, q, p, l, h) - partial(f, q, p, l, h) * partial(g, q, p, n + l, h)
        })
        .sum()
}

fn small_shape(n: usize) -> Shape {
    Shape { n, max_d: n.min(2), max_k: 1, generators: 2, max_degree: 1 }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn product_is_pointwise(seed in any::<u64>(), n in 1usize..=2) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = random_observable(&mut rng, &Shape::new(n));
        let g = random_observable(&mut rng, &Shape::new(n));
        let fg = f.multiply(&g).unwrap();
        for _ in 0..500 {
            let (q, p) = random_point(&mut rng, n, 2.5);
            let want = f.eval(&q, &p) * g.eval(&q, &p);
            let err = (fg.eval(&q, &p) - want).norm();
            prop_assert!(err <= 1e-11 * want.norm().max(1.0), "err {err}");
        }
    }

    #[test]
    fn conjugation_is_involutive_and_antilinear(seed in any::<u64>(), n in 1usize..=2) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = random_observable(&mut rng, &Shape::new(n));
        let g = random_observable(&mut rng, &Shape::new(n));
        let a = random_complex(&mut rng);
        let lhs = f.scale(a).add(&g).unwrap().conjugate();
        let ff = f.conjugate().conjugate();
        for _ in 0..50 {
            let (q, p) = random_point(&mut rng, n, 2.5);
            prop_assert!((f.conjugate().eval(&q, &p) - f.eval(&q, &p).conj()).norm() <= 1e-13);
            prop_assert!((ff.eval(&q, &p) - f.eval(&q, &p)).norm() <= 1e-15);
            let rhs = f.eval(&q, &p).conj() * a.conj() + g.eval(&q, &p).conj();
            prop_assert!((lhs.eval(&q, &p) - rhs).norm() <= 1e-13);
        }
    }

    #[test]
    fn bracket_matches_finite_differences(seed in any::<u64>(), n in 1usize..=2) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = random_observable(&mut rng, &small_shape(n));
        let g = random_observable(&mut rng, &small_shape(n));
        let b = f.poisson_bracket(&g).unwrap();
        for _ in 0..10 {
            let (q, p) = random_point(&mut rng, n, 2.0);
            let err = (b.eval(&q, &p) - fd_bracket(&f, &g, &q, &p)).norm();
            prop_assert!(err <= 1e-6, "err {err}");
        }
    }

    #[test]
    fn bracket_antisymmetric_and_leibniz(seed in any::<u64>(), n in 1usize..=2) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = random_observable(&mut rng, &small_shape(n));
        let g = random_observable(&mut rng, &small_shape(n));
        let h = random_observable(&mut rng, &small_shape(n));
        let fg = f.poisson_bracket(&g).unwrap();
        let gf = g.poisson_bracket(&f).unwrap();
        let lhs = f.poisson_bracket(&g.multiply(&h).unwrap()).unwrap();
        let fh = f.poisson_bracket(&h).unwrap();
        for _ in 0..50 {
            let (q, p) = random_point(&mut rng, n, 2.0);
            let a = fg.eval(&q, &p);
            prop_assert!((a + gf.eval(&q, &p)).norm() <= 1e-10 * a.norm().max(1.0));
            let rhs = a * h.eval(&q, &p) + g.eval(&q, &p) * fh.eval(&q, &p);
            let l = lhs.eval(&q, &p);
            prop_assert!((l - rhs).norm() <= 1e-10 * l.norm().max(1.0), "{l} vs {rhs}");
        }
    }

    #[test]
    fn free_pullback_is_a_group(seed in any::<u64>(), n in 1usize..=2, s in -2.0f64..2.0, t in -2.0f64..2.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = random_observable(&mut rng, &Shape::new(n));
        let two = f.free_flow_pullback(s).free_flow_pullback(t);
        let one = f.free_flow_pullback(s + t);
        for _ in 0..50 {
            let (q, p) = random_point(&mut rng, n, 2.5);
            prop_assert!((two.eval(&q, &p) - one.eval(&q, &p)).norm() <= 1e-11);
            let moved: Vec<f64> = q.iter().zip(&p).map(|(a, b)| (a + (s + t) * b).rem_euclid(1.0)).collect();
            prop_assert!((one.eval(&q, &p) - f.eval(&moved, &p)).norm() <= 1e-10);
        }
    }

    #[test]
    fn evaluation_bounded_by_term_sups(seed in any::<u64>(), n in 1usize..=2) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = random_observable(&mut rng, &Shape::new(n));
        let bound = f.sup_upper_bound();
        for _ in 0..200 {
            let (q, p) = random_point(&mut rng, n, 4.0);
            prop_assert!(f.eval(&q, &p).norm() <= bound * (1.0 + 1e-12));
        }
    }

    #[test]
    fn momentum_scaling_composes(seed in any::<u64>(), n in 1usize..=2, c in 0.2f64..3.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = random_observable(&mut rng, &Shape::new(n));
        let g = f.scale_momentum(c).unwrap();
        let back = g.scale_momentum(1.0 / c).unwrap();
        for _ in 0..50 {
            let (q, p) = random_point(&mut rng, n, 2.0);
            let cp: Vec<f64> = p.iter().map(|x| c * x).collect();
            prop_assert!((g.eval(&q, &p) - f.eval(&q, &cp)).norm() <= 1e-11);
            prop_assert!((back.eval(&q, &p) - f.eval(&q, &p)).norm() <= 1e-11);
        }
    }

    #[test]
    fn translation_shifts_position(seed in any::<u64>(), n in 1usize..=2) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = random_observable(&mut rng, &Shape::new(n));
        let (x, _) = random_point(&mut rng, n, 1.0);
        let g = f.translate_config(&x).unwrap();
        for _ in 0..50 {
            let (q, p) = random_point(&mut rng, n, 2.0);
            let qx: Vec<f64> = q.iter().zip(&x).map(|(a, b)| (a - b).rem_euclid(1.0)).collect();
            prop_assert!((g.eval(&q, &p) - f.eval(&qx, &p)).norm() <= 1e-12);
        }
    }

    #[test]
    fn json_roundtrip_bit_stable(seed in any::<u64>(), n in 1usize..=2) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = random_observable(&mut rng, &Shape::new(n)).canonicalize().unwrap();
        let s = f.to_json_string();
        let back = Observable::from_json_str(&s).unwrap().canonicalize().unwrap();
        prop_assert_eq!(s, back.to_json_string());
    }

    #[test]
    fn canonicalization_preserves_values(seed in any::<u64>(), n in 1usize..=2) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = random_observable(&mut rng, &Shape::new(n));
        let g = f.add(&f.scale(Complex64::new(0.5, -1.0))).unwrap();
        let c = g.canonicalize().unwrap();
        prop_assert!(c.generators().len() <= f.generators().len());
        for _ in 0..50 {
            let (q, p) = random_point(&mut rng, n, 2.0);
            prop_assert!((c.eval(&q, &p) - g.eval(&q, &p)).norm() <= 1e-11);
        }
    }
}

#[test]
fn unit_is_neutral_for_product() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let f = random_observable(&mut rng, &Shape::new(2));
    let g = f.multiply(&Observable::one(2)).unwrap().canonicalize().unwrap();
    let f = f.canonicalize().unwrap();
    assert_eq!(g.generators().len(), f.generators().len());
    for (a, b) in g.generators().iter().zip(f.generators()) {
        assert_eq!(a.k, b.k);
        assert_eq!(a.h.subspace().fingerprint(), b.h.subspace().fingerprint());
        assert_eq!(a.h.terms().len(), b.h.terms().len());
    }
    for _ in 0..100 {
        let (q, p) = random_point(&mut rng, 2, 3.0);
        assert!((g.eval(&q, &p) - f.eval(&q, &p)).norm() < 1e-13);
    }
}

#[test]
fn conjugate_of_real_combination_is_itself() {
    let h = MomentumSymbol::plane_wave(vec![0.7]);
    let f = Observable::single(IntVector::new(vec![1]).unwrap(), h.clone()).unwrap();
    let real = f.add(&f.conjugate()).unwrap();
    let a = real.canonicalize().unwrap();
    let b = real.conjugate().canonicalize().unwrap();
    assert_eq!(a, b);
    let single = f.conjugate();
    assert_eq!(single.generators()[0].k.as_slice(), &[-1]);
    assert_eq!(single.generators()[0].h.xi(), &[-0.7]);
}

#[test]
fn bracket_with_plane_wave_matches_closed_form() {
    let k = IntVector::new(vec![2, -1]).unwrap();
    let wave = Observable::single(IntVector::zeros(2), MomentumSymbol::plane_wave(vec![1.0, 0.0])).unwrap();
    let harmonic = Observable::single(k, MomentumSymbol::constant(2, Complex64::new(1.0, 0.0))).unwrap();
    let b = wave.poisson_bracket(&harmonic).unwrap();
    let (q, p) = ([0.3, 0.1], [0.4, -1.0]);
    // 2πi · k₁ · i · e^{2πi k·q} e^{ip₁}
    let phase = Complex64::from_polar(1.0, 2.0 * PI * (2.0 * q[0] - q[1]) + p[0]);
    let want = Complex64::new(0.0, 2.0 * PI) * Complex64::new(0.0, 2.0) * phase;
    assert!((b.eval(&q, &p) - want).norm() < 1e-12);
    assert!((b.eval(&q, &p) - fd_bracket(&wave, &harmonic, &q, &p)).norm() < 1e-6);
}

#[test]
fn bilinearity_of_bracket() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let f1 = random_observable(&mut rng, &small_shape(2));
    let f2 = random_observable(&mut rng, &small_shape(2));
    let g = random_observable(&mut rng, &small_shape(2));
    let lhs = f1.add(&f2).unwrap().poisson_bracket(&g).unwrap();
    let rhs = f1.poisson_bracket(&g).unwrap().add(&f2.poisson_bracket(&g).unwrap()).unwrap();
    for _ in 0..20 {
        let (q, p) = random_point(&mut rng, 2, 2.0);
        assert!((lhs.eval(&q, &p) - rhs.eval(&q, &p)).norm() < 1e-12);
    }
}

#[test]
fn sup_estimate_of_unit_gaussian_generator() {
    let h = cylq_core::symbols::isotropic_gaussian(cylq_core::symbols::Subspace::full(1), 1.0, vec![0.0]).unwrap();
    let f = Observable::single(IntVector::new(vec![1]).unwrap(), h).unwrap();
    let v = sup_norm_estimate(&f, SupNormBudget::default(), 4.0);
    assert!((v - 1.0).abs() < 1e-12);
}
