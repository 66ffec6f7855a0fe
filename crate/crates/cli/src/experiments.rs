//! Registered experiments. Each produces one row per grid point or case,
//! every row carrying its own pass/fail verdict.

use std::f64::consts::PI;

use cylq_core::classical_dynamics::{
    fejer_smooth, flow, gronwall_check, mode_removal_sweep, power_decay, rescale_flow_check, sup_grad_gap, CoeffRule,
    FlowConfig, PhasePoint, TrigPotential,
};
use cylq_core::lattice::{
    direction_period, extend_to_unimodular, is_primitive, random_unimodular, IntVector, RationalDirection,
};
use cylq_core::operators::{
    dense_restricted_norm, periodic_norm_dense, periodic_norm_dft, restricted_norm, FourierWindow, NormMethod,
    PeriodicShiftOp,
};
use cylq_core::quantizer::{
    check_equivariance, check_planck_rescale, check_star, dirac_defect, loglog_slope, rank_one_approx, rieffel_curve,
    sample_point, strong_continuity_curve, tensor_embed_check, von_neumann_defect, weyl_integral_oracle, weyl_quantize,
    PlanckParam, QuadSpec, WindowSchedule,
};
use cylq_core::quantum_dynamics::{
    dyson_term, dyson_with_residual, free_conjugation_symbolic, free_propagator, heisenberg_evolution_check,
    DysonQuadrature,
};
use cylq_core::symbols::{isotropic_gaussian, MomentumSymbol, Observable, Subspace, SupNormBudget};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::CliError;
use crate::sampling;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Relation {
    /// `value ≤ bound`.
    Le,
    /// `value ≥ bound`.
    Ge,
    /// Recorded data with no verdict of its own.
    Record,
}

impl Relation {
    pub fn symbol(self) -> &'static str {
        match self {
            Relation::Le => "<=",
            Relation::Ge => ">=",
            Relation::Record => "record",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResultRow {
    pub experiment: String,
    pub case: String,
    pub param: f64,
    pub value: f64,
    pub relation: Relation,
    pub bound: f64,
    pub pass: bool,
}

impl ResultRow {
    fn new(experiment: &str, case: impl Into<String>, param: f64, value: f64, relation: Relation, bound: f64) -> Self {
        let pass = match relation {
            Relation::Le => value <= bound,
            Relation::Ge => value >= bound,
            Relation::Record => true,
        };
        Self { experiment: experiment.to_string(), case: case.into(), param, value, relation, bound, pass }
    }

    /// How far the row is from failing; above 1 means failed.
    pub fn severity(&self) -> f64 {
        match self.relation {
            Relation::Le if self.bound > 0.0 => self.value / self.bound,
            Relation::Le => {
                if self.value <= self.bound {
                    0.0
                } else {
                    f64::INFINITY
                }
            }
            Relation::Ge if self.value > 0.0 => self.bound / self.value,
            Relation::Ge => f64::INFINITY,
            Relation::Record => 0.0,
        }
    }
}

/// Optional overrides read from a run configuration.
#[derive(Debug, Clone, Default)]
pub struct Params {
    pub seed: u64,
    pub observable: Option<Observable>,
    pub potential: Option<TrigPotential>,
    pub hbar_grid: Option<Vec<f64>>,
    pub schedule: Option<ScheduleSpec>,
    pub tolerance: Option<f64>,
}

#[derive(Debug, Clone, Copy)]
pub struct ScheduleSpec {
    pub margin: usize,
    pub min_n: usize,
    pub max_n: usize,
}

pub struct Experiment {
    pub name: &'static str,
    pub anchor: &'static str,
    pub run: fn(&Params) -> Result<Vec<ResultRow>, CliError>,
}

pub const REGISTRY: &[Experiment] = &[
    Experiment { name: "formula", anchor: "explicit formula Q(e_k⊗h)ψ_l = h(πħ(k+2l))ψ_{k+l}", run: formula },
    Experiment { name: "oracle", anchor: "oscillatory integral over U×U with prefactor (2πħ)^{-dim U}", run: oracle },
    Experiment { name: "periodic_norm", anchor: "norm of Σ f(k) S_per^k equals max of its discrete Fourier transform", run: periodic_norm },
    Experiment { name: "counterexample", anchor: "sin(p₁/ħ₀): ‖Q_ħ₀‖ = 0 but ‖Q_ħN‖ = 1", run: counterexample },
    Experiment { name: "rieffel", anchor: "Rieffel condition lim ‖Q_ħ(f)‖ = ‖f‖_∞", run: rieffel },
    Experiment { name: "vonneumann_dirac", anchor: "von Neumann and Dirac conditions at rate O(ħ)", run: vonneumann_dirac },
    Experiment { name: "structure", anchor: "involution, equivariance, ħ-rescaling, tensor embedding, rank-one", run: structure },
    Experiment { name: "free_covariance", anchor: "Q_ħ ∘ (Φ⁰_t)* = τ⁰_t ∘ Q_ħ", run: free_covariance },
    Experiment { name: "dyson", anchor: "Dyson series with remainder Σ_{m>M} (|t|‖V‖_∞/ħ)^m/m!", run: dyson },
    Experiment { name: "heisenberg", anchor: "e^{itH/ħ} A e^{-itH/ħ} = W* τ⁰_t(A) W", run: heisenberg },
    Experiment { name: "classical", anchor: "Verlet order, rescaling t ↦ t²V, Gronwall bound, mode removal", run: classical },
    Experiment { name: "fejer", anchor: "Fejér smoothing ∇V_m → ∇V uniformly", run: fejer },
    Experiment { name: "lattice", anchor: "primitive sets extend to Z-bases; period of t ↦ [tv]", run: lattice },
    Experiment { name: "strongcont", anchor: "ħ ↦ Q_ħ(f) strongly continuous", run: strongcont },
];

pub fn find(name: &str) -> Option<&'static Experiment> {
    REGISTRY.iter().find(|e| e.name == name)
}

fn hb(h: f64) -> Result<PlanckParam, CliError> {
    Ok(PlanckParam::new(h)?)
}

fn dyadic(lo: i32, hi: i32) -> Vec<f64> {
    (lo..=hi).map(|j| 2f64.powi(-j)).collect()
}

fn gaussian_generator(k: i64) -> Observable {
    let h = isotropic_gaussian(Subspace::full(1), 1.0, vec![0.0]).expect("valid Gaussian");
    Observable::single(IntVector::new(vec![k]).expect("nonempty"), h).expect("matching dimensions")
}

fn formula(p: &Params) -> Result<Vec<ResultRow>, CliError> {
    const NAME: &str = "formula";
    let tol = p.tolerance.unwrap_or(1e-13);
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let mut rows = Vec::new();
    for i in 0..50 {
        let n = 1 + i % 2;
        let d = (i / 2) % 3;
        let d = d.min(n);
        let g = sampling::generator(&mut rng, n, d);
        let h = rng.gen_range(0.05..1.0);
        let w = FourierWindow::new(n, if n == 1 { 8 } else { 4 })?;
        let f = Observable::from_generators(n, vec![g.clone()])?;
        let q = weyl_quantize(&f, hb(h)?, w)?;
        let mut worst: f64 = 0.0;
        for (l, d) in w.points().zip(&q.terms()[0].diag) {
            let expect = g.h.eval(&sample_point(h, g.k.as_slice(), &l));
            worst = worst.max((d - expect).norm());
        }
        rows.push(ResultRow::new(NAME, format!("generator {i} n={n} d={d}"), h, worst, Relation::Le, tol));
    }
    Ok(rows)
}

fn oracle(p: &Params) -> Result<Vec<ResultRow>, CliError> {
    const NAME: &str = "oracle";
    let tol = p.tolerance.unwrap_or(1e-6);
    let h = p.hbar_grid.as_ref().and_then(|g| g.first().copied()).unwrap_or(0.5);
    let f = match &p.observable {
        Some(f) => f.clone(),
        None => gaussian_generator(1),
    };
    let w = FourierWindow::new(f.dim(), 4)?;
    let mut rows = Vec::new();
    for (gi, gen) in f.generators().iter().enumerate() {
        let single = Observable::single(gen.k.clone(), gen.h.clone())?;
        let q = weyl_quantize(&single, hb(h)?, w)?;
        for l in w.points().filter(|l| l.iter().all(|x| x.abs() <= 2)) {
            let lv = IntVector::new(l.clone())?;
            let quad = QuadSpec::auto(&gen.h, &gen.k, h, 96, tol * 1e-2);
            let got = weyl_integral_oracle(gen, hb(h)?, &lv, w, quad)?;
            let mut e = vec![Complex64::new(0.0, 0.0); w.size()];
            e[w.index(&l).expect("in window")] = Complex64::new(1.0, 0.0);
            let direct = q.apply(&e)?;
            let diff = got.coeffs.iter().zip(&direct).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
            rows.push(ResultRow::new(NAME, format!("generator {gi} l={l:?}"), h, diff, Relation::Le, tol));
        }
    }
    Ok(rows)
}

fn periodic_norm(p: &Params) -> Result<Vec<ResultRow>, CliError> {
    const NAME: &str = "periodic_norm";
    let tol = p.tolerance.unwrap_or(1e-9);
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let mut rows = Vec::new();
    for k in [3usize, 5, 8] {
        for n in [1usize, 2] {
            let mut worst: f64 = 0.0;
            for _ in 0..50 {
                let coeffs = (0..k.pow(n as u32)).map(|_| sampling::complex(&mut rng)).collect();
                let op = PeriodicShiftOp::new(n, k, coeffs)?;
                worst = worst.max((periodic_norm_dft(&op) - periodic_norm_dense(&op)).abs());
            }
            rows.push(ResultRow::new(NAME, format!("K={k} n={n}"), k as f64, worst, Relation::Le, tol));
        }
    }
    Ok(rows)
}

fn counterexample(p: &Params) -> Result<Vec<ResultRow>, CliError> {
    const NAME: &str = "counterexample";
    let tol = p.tolerance.unwrap_or(1e-12);
    let hbar0 = p.hbar_grid.as_ref().and_then(|g| g.first().copied()).unwrap_or(0.3);
    let f = Observable::sine(2, hbar0);
    let mut rows = Vec::new();
    for big_n in [1usize, 2, 4] {
        let w = FourierWindow::new(2, big_n)?;
        let q0 = weyl_quantize(&f, hb(hbar0)?, w)?;
        let n0 = restricted_norm(&q0, 0, NormMethod::Auto)?.value;
        rows.push(ResultRow::new(NAME, format!("norm at hbar0, N={big_n}"), hbar0, n0, Relation::Le, tol));
        let hn = hbar0 * (1.0 + 1.0 / (4.0 * big_n as f64));
        let q1 = weyl_quantize(&f, hb(hn)?, w)?;
        let n1 = restricted_norm(&q1, 0, NormMethod::Auto)?.value;
        rows.push(ResultRow::new(NAME, format!("norm at hbar_N, N={big_n}"), hn, n1, Relation::Ge, 1.0 - tol));
        let mut e = vec![Complex64::new(0.0, 0.0); w.size()];
        e[w.index(&[big_n as i64, 0]).expect("in window")] = Complex64::new(1.0, 0.0);
        let img = q1.apply(&e)?;
        let witness = img.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        rows.push(ResultRow::new(NAME, format!("witness psi_(N,0), N={big_n}"), hn, witness, Relation::Ge, 1.0 - tol));
    }
    Ok(rows)
}

fn schedule_for(p: &Params, f: &Observable, margin: usize, min_n: usize) -> WindowSchedule {
    let s = p.schedule.unwrap_or(ScheduleSpec { margin, min_n, max_n: 20_000 });
    WindowSchedule::for_observable(f, s.margin, s.min_n, s.max_n)
}

fn rieffel(p: &Params) -> Result<Vec<ResultRow>, CliError> {
    const NAME: &str = "rieffel";
    let tol = p.tolerance.unwrap_or(0.05);
    let f = p.observable.clone().unwrap_or_else(|| gaussian_generator(1));
    let grid = p.hbar_grid.clone().unwrap_or_else(|| dyadic(2, 10));
    let sched = schedule_for(p, &f, 2, 4);
    let curve = rieffel_curve(&f, &grid, &sched, SupNormBudget::default())?;
    let mut rows = Vec::new();
    for (i, r) in curve.iter().enumerate() {
        // Monotone from the third grid point on (ħ = 2^{-4} on the default grid).
        if i >= 3 {
            let prev = curve[i - 1].gap;
            rows.push(ResultRow::new(NAME, format!("gap N={} nonincreasing", r.window_n), r.hbar, r.gap, Relation::Le, prev));
        } else {
            rows.push(ResultRow::new(NAME, format!("gap N={}", r.window_n), r.hbar, r.gap, Relation::Record, 0.0));
        }
    }
    if let Some(last) = curve.last() {
        rows.push(ResultRow::new(NAME, "final gap", last.hbar, last.gap, Relation::Le, tol));
    }
    Ok(rows)
}

fn vonneumann_dirac(p: &Params) -> Result<Vec<ResultRow>, CliError> {
    const NAME: &str = "vonneumann_dirac";
    let tol = p.tolerance.unwrap_or(0.9);
    let f = gaussian_generator(1);
    let g = Observable::single(IntVector::new(vec![-1])?, MomentumSymbol::plane_wave(vec![0.5]))?;
    let grid = p.hbar_grid.clone().unwrap_or_else(|| dyadic(2, 8));
    let sched = schedule_for(p, &f, 4, 8);
    let mut rows = Vec::new();
    let (mut vn, mut di) = (Vec::new(), Vec::new());
    for &h in &grid {
        let w = sched.window(1, h)?;
        let a = von_neumann_defect(&f, &g, hb(h)?, w)?;
        let b = dirac_defect(&f, &g, hb(h)?, w)?;
        rows.push(ResultRow::new(NAME, format!("von Neumann defect N={}", w.big_n), h, a.value, Relation::Record, 0.0));
        rows.push(ResultRow::new(NAME, format!("Dirac defect N={}", w.big_n), h, b.value, Relation::Record, 0.0));
        vn.push((h, a.value));
        di.push((h, b.value));
    }
    rows.push(ResultRow::new(NAME, "von Neumann log-log slope", 0.0, loglog_slope(&vn), Relation::Ge, tol));
    rows.push(ResultRow::new(NAME, "Dirac log-log slope", 0.0, loglog_slope(&di), Relation::Ge, tol));
    Ok(rows)
}

fn structure(p: &Params) -> Result<Vec<ResultRow>, CliError> {
    const NAME: &str = "structure";
    let tol = p.tolerance.unwrap_or(1e-10);
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let f = p.observable.clone().unwrap_or_else(|| sampling::observable(&mut rng, 1));
    let n = f.dim();
    let w = FourierWindow::new(n, if n == 1 { 16 } else { 6 })?;
    let h = 0.3;
    let mut rows = Vec::new();
    rows.push(ResultRow::new(NAME, "star", h, check_star(&f, hb(h)?, w)?.value, Relation::Le, tol));
    for i in 0..3 {
        let x: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..1.0)).collect();
        let v = check_equivariance(&f, &x, hb(h)?, w)?.value;
        rows.push(ResultRow::new(NAME, format!("equivariance x{i}={x:?}"), h, v, Relation::Le, tol));
    }
    for (a, b) in [(0.3, 0.6), (0.5, 0.2), (0.25, 0.37)] {
        let v = check_planck_rescale(&f, hb(a)?, hb(b)?, w)?.value;
        rows.push(ResultRow::new(NAME, format!("rescale hbar'={b}"), a, v, Relation::Le, tol));
    }
    let f1 = if n == 1 { f.clone() } else { sampling::observable(&mut rng, 1) };
    let v = tensor_embed_check(&f1, 1, hb(h)?, FourierWindow::new(1, 6)?)?.value;
    rows.push(ResultRow::new(NAME, "tensor n=m=1", h, v, Relation::Le, tol));
    let w1 = FourierWindow::new(1, 8)?;
    for (a, b) in [(0i64, 0i64), (1, 0)] {
        let (_, rep) = rank_one_approx(&IntVector::new(vec![a])?, &IntVector::new(vec![b])?, hb(1.0)?, w1, 1e-8)?;
        rows.push(ResultRow::new(NAME, format!("rank-one a={a} b={b} tol=1e-8"), 1.0, rep.value, Relation::Le, tol));
    }
    Ok(rows)
}

fn free_covariance(p: &Params) -> Result<Vec<ResultRow>, CliError> {
    const NAME: &str = "free_covariance";
    let tol = p.tolerance.unwrap_or(1e-12);
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let mut rows = Vec::new();
    for i in 0..20 {
        let n = 1 + i % 2;
        let f = sampling::observable(&mut rng, n);
        let t = rng.gen_range(-1.0..1.0);
        let h = rng.gen_range(0.05..1.0);
        let w = FourierWindow::new(n, if n == 1 { 12 } else { 5 })?;
        let lhs = weyl_quantize(&free_conjugation_symbolic(&f, t), hb(h)?, w)?.dense();
        let q = weyl_quantize(&f, hb(h)?, w)?.dense();
        let rhs = free_propagator(w, hb(h)?, -t).dense() * q * free_propagator(w, hb(h)?, t).dense();
        let v = dense_restricted_norm(&(lhs - rhs), w, f.max_shift() as usize)?;
        rows.push(ResultRow::new(NAME, format!("case {i} n={n} t={t:.4}"), h, v, Relation::Le, tol));
    }
    Ok(rows)
}

fn dyson(p: &Params) -> Result<Vec<ResultRow>, CliError> {
    const NAME: &str = "dyson";
    let tol = p.tolerance.unwrap_or(1e-4);
    let v = match &p.potential {
        Some(v) => v.clone(),
        None => TrigPotential::cosine(vec![1], 1.0)?,
    };
    let h = p.hbar_grid.as_ref().and_then(|g| g.first().copied()).unwrap_or(1.0);
    let w = FourierWindow::new(v.dim(), 24)?;
    let (_, rep) = dyson_with_residual(&v, 0.5, hb(h)?, w, 8, DysonQuadrature::default())?;
    let r = rep.residual.unwrap_or(f64::INFINITY);
    let mut rows = vec![
        ResultRow::new(NAME, "residual vs remainder bound", h, r, Relation::Le, rep.remainder_bound),
        ResultRow::new(NAME, "residual absolute", h, r, Relation::Le, tol),
        ResultRow::new(NAME, "quadrature error estimate", h, rep.quadrature_error, Relation::Record, 0.0),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let w1 = FourierWindow::new(1, 8)?;
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let k = rng.gen_range(-3i64..=3);
        let a = rng.gen_range(-5i64..=5);
        let hh = rng.gen_range(0.05..1.5);
        let t = rng.gen_range(-1.0..1.0);
        let (op, _) = dyson_term(&[IntVector::new(vec![k])?], t, hb(hh)?, w1, DysonQuadrature::default())?;
        let c = ((a + k) * (a + k) - a * a) as f64;
        let want = if c == 0.0 {
            Complex64::new(t, 0.0)
        } else {
            let om = 2.0 * PI * PI * hh * c;
            (Complex64::from_polar(1.0, om * t) - 1.0) / Complex64::new(0.0, om)
        };
        worst = worst.max((op.terms()[0].diag[w1.index(&[a]).expect("in window")] - want).norm());
    }
    rows.push(ResultRow::new(NAME, "first order closed form", 1.0, worst, Relation::Le, 1e-10));
    Ok(rows)
}

fn heisenberg(p: &Params) -> Result<Vec<ResultRow>, CliError> {
    const NAME: &str = "heisenberg";
    let tol = p.tolerance.unwrap_or(1e-10);
    let v = match &p.potential {
        Some(v) => v.clone(),
        None => TrigPotential::cosine(vec![1], 1.0)?,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let w = FourierWindow::new(v.dim(), if v.dim() == 1 { 12 } else { 4 })?;
    let mut rows = Vec::new();
    for t in [0.25, 0.5] {
        let a = sampling::operator(&mut rng, w, 3, 2);
        let rep = heisenberg_evolution_check(&a, &v, t, hb(1.0)?, w)?;
        rows.push(ResultRow::new(NAME, format!("t={t}"), 1.0, rep.value, Relation::Le, tol));
    }
    Ok(rows)
}

fn classical(p: &Params) -> Result<Vec<ResultRow>, CliError> {
    const NAME: &str = "classical";
    let cfg = |steps| FlowConfig::new(steps);
    let mut rows = Vec::new();

    let pend = TrigPotential::cosine(vec![1], 1.0)?;
    let x = PhasePoint::new(vec![0.1], vec![0.3])?;
    let at = |s: usize| flow(&x, &pend, 1.0, &cfg(s)?);
    let (a, b, c) = (at(100)?, at(200)?, at(400)?);
    let ratio = a.distance(&b) / b.distance(&c);
    rows.push(ResultRow::new(NAME, "Richardson ratio lower", 100.0, ratio, Relation::Ge, 3.6));
    rows.push(ResultRow::new(NAME, "Richardson ratio upper", 100.0, ratio, Relation::Le, 4.4));

    let d = rescale_flow_check(&PhasePoint::new(vec![0.2], vec![0.7])?, &pend, 0.5, &cfg(10_000)?)?;
    rows.push(ResultRow::new(NAME, "rescaling lemma t=0.5", 10_000.0, d, Relation::Le, 1e-6));

    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let base = TrigPotential::cosine(vec![1, 0], 0.6)?
        .add(&TrigPotential::cosine(vec![1, 1], 0.4)?)?
        .add(&TrigPotential::cosine(vec![0, 2], 0.3)?)?;
    let mut worst_gap: f64 = f64::NEG_INFINITY;
    for _ in 0..100 {
        let point = |rng: &mut ChaCha8Rng| {
            PhasePoint::new((0..2).map(|_| rng.gen_range(0.0..1.0)).collect(), sampling::vec(rng, 2, 2.0))
        };
        let (x0, y0) = (point(&mut rng)?, point(&mut rng)?);
        let ks = [vec![1, 0], vec![1, 1], vec![0, 2]];
        let k = &ks[rng.gen_range(0..3)];
        let w = base.sub(&base.mode(k))?;
        let t = rng.gen_range(0.0..=1.0);
        let rep = gronwall_check(&x0, &y0, &base, &w, t, &cfg(1000)?)?;
        worst_gap = worst_gap.max(rep.lhs - rep.rhs);
    }
    rows.push(ResultRow::new(NAME, "Gronwall max(lhs - rhs) over 100 tuples", 1000.0, worst_gap, Relation::Le, 1e-6));

    let v = TrigPotential::cosine(vec![1, 0], 1.0)?.add(&TrigPotential::cosine(vec![1, 1], 1.0)?)?;
    let s_grid: Vec<f64> = (1..=32).map(|i| 10.0 * i as f64).collect();
    let sweep = mode_removal_sweep(&[0.1, 0.2], &v, &[1, 0], &s_grid, &cfg(200_000)?)?;
    let first = sweep[0].gap_times_s;
    for r in &sweep {
        rows.push(ResultRow::new(NAME, "mode removal gap*|k.p0|", r.s, r.gap_times_s, Relation::Le, 2.0 * first));
    }
    Ok(rows)
}

fn fejer(p: &Params) -> Result<Vec<ResultRow>, CliError> {
    const NAME: &str = "fejer";
    let tol = p.tolerance.unwrap_or(1e-2);
    let rule = power_decay(4.0);
    let r = CoeffRule { n: 1, cutoff: 12, rule: &rule };
    let v = r.potential()?;
    let orders = [4usize, 8, 16, 32];
    let mut rows = Vec::new();
    let mut prev = f64::INFINITY;
    for &m in &orders {
        let gap = sup_grad_gap(&fejer_smooth(&r, m)?, &v, 4096)?;
        rows.push(ResultRow::new(NAME, "sup grad gap strictly decreasing", m as f64, gap, Relation::Le, prev));
        if gap == prev {
            rows.last_mut().expect("pushed").pass = false;
        }
        prev = gap;
    }
    rows.push(ResultRow::new(NAME, "sup grad gap at m=32", 32.0, prev, Relation::Le, tol));
    Ok(rows)
}

fn lattice(p: &Params) -> Result<Vec<ResultRow>, CliError> {
    const NAME: &str = "lattice";
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let mut bad_det = 0.0;
    let mut bad_columns = 0.0;
    for _ in 0..100 {
        let n = rng.gen_range(2..=5);
        let l = rng.gen_range(0..=n);
        let u = random_unimodular(n, 30, &mut rng)?;
        let vs: Vec<IntVector> = (0..l).map(|j| u.column(j)).collect();
        if !is_primitive(&vs)? {
            bad_det += 1.0;
            continue;
        }
        let b = extend_to_unimodular(n, &vs)?;
        if b.det()?.abs() != 1 {
            bad_det += 1.0;
        }
        if (0..l).any(|j| b.column(j) != vs[j]) {
            bad_columns += 1.0;
        }
    }
    let mut bad_period = 0.0;
    for _ in 0..100 {
        let n = rng.gen_range(1..=3);
        let num: Vec<i64> = loop {
            let v: Vec<i64> = (0..n).map(|_| rng.gen_range(-12..=12)).collect();
            if v.iter().any(|&x| x != 0) {
                break v;
            }
        };
        let den = rng.gen_range(1..=6);
        let dir = RationalDirection::new(IntVector::new(num.clone())?, den)?;
        let t = direction_period(&dir)?;
        let integral = |pn: i64, pd: i64| num.iter().all(|&x| (pn * x) % (pd * den) == 0);
        let ok_t = integral(*t.numer(), *t.denom());
        // every candidate p/q < T with q up to den·max|num| must fail
        let qmax = den * num.iter().map(|x| x.abs()).max().unwrap_or(1);
        let mut smaller = false;
        for q in 1..=qmax {
            let mut pn = 1;
            while pn * t.denom() < q * t.numer() {
                smaller |= integral(pn, q);
                pn += 1;
            }
        }
        if !ok_t || smaller {
            bad_period += 1.0;
        }
    }
    Ok(vec![
        ResultRow::new(NAME, "extensions with |det| != 1", 100.0, bad_det, Relation::Le, 0.0),
        ResultRow::new(NAME, "extensions not keeping inputs", 100.0, bad_columns, Relation::Le, 0.0),
        ResultRow::new(NAME, "periods failing divisor scan", 100.0, bad_period, Relation::Le, 0.0),
    ])
}

fn strongcont(p: &Params) -> Result<Vec<ResultRow>, CliError> {
    const NAME: &str = "strongcont";
    let tol = p.tolerance.unwrap_or(1e-12);
    let hbar0 = 0.3;
    let w = FourierWindow::new(1, 6)?;
    let sine = Observable::sine(1, hbar0);
    let mut e0 = vec![Complex64::new(0.0, 0.0); w.size()];
    e0[w.index(&[0]).expect("in window")] = Complex64::new(1.0, 0.0);
    let grid: Vec<f64> = (0..8).map(|i| hbar0 * (1.0 + 0.25 * 0.5f64.powi(i))).collect();
    let mut rows = Vec::new();
    for (h, v) in strong_continuity_curve(&sine, &e0, hb(hbar0)?, &grid, w)? {
        rows.push(ResultRow::new(NAME, "sine on psi_0", h, v, Relation::Le, tol));
    }
    let f = p.observable.clone().unwrap_or_else(|| gaussian_generator(1));
    let wf = FourierWindow::new(f.dim(), 6)?;
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let psi: Vec<Complex64> = (0..wf.size()).map(|_| sampling::complex(&mut rng)).collect();
    let curve = strong_continuity_curve(&f, &psi, hb(hbar0)?, &grid, wf)?;
    for pair in curve.windows(2) {
        rows.push(ResultRow::new(NAME, "random psi nonincreasing", pair[1].0, pair[1].1, Relation::Le, pair[0].1));
    }
    Ok(rows)
}
