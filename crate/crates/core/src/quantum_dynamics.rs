//! Quantum time evolution on truncated Fourier windows: the free propagator,
//! Heisenberg conjugation, the Dyson expansion of the interaction picture
//! propagator and its exact counterpart from the truncated Hamiltonian.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::time::Instant;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::classical_dynamics::TrigPotential;
use crate::error::{Error, Result};
use crate::lattice::IntVector;
use crate::operators::{dense_restricted_norm, FourierWindow, LatticeOperator, ShiftTerm};
use crate::quadrature::{gauss_legendre, kronecker_points};
use crate::quantizer::{DefectReport, PlanckParam};
use crate::symbols::Observable;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Largest number of mode words a partial sum may enumerate.
pub const WORD_LIMIT: f64 = 1e5;

fn norm_sq(a: &[i64]) -> i64 {
    a.iter().map(|x| x * x).sum()
}

/// `e^{−itH₀/ħ}` with `H₀ψ_a = 2π²ħ²‖a‖²ψ_a`.
pub fn free_propagator(window: FourierWindow, hbar: PlanckParam, t: f64) -> LatticeOperator {
    let h = hbar.get();
    LatticeOperator::diagonal(window, |a| Complex64::from_polar(1.0, -2.0 * PI * PI * t * h * norm_sq(a) as f64))
}

/// The classical free flow pulled back to observables; quantizes to the
/// free Heisenberg evolution.
pub fn free_conjugation_symbolic(f: &Observable, t: f64) -> Observable {
    f.free_flow_pullback(t)
}

/// `e^{itH₀/ħ} A e^{−itH₀/ħ}`: each diagonal entry at source `a` picks up
/// `e^{2π²itħ(‖a+k‖²−‖a‖²)}`.
pub fn heisenberg_free(a: &LatticeOperator, hbar: PlanckParam, t: f64) -> LatticeOperator {
    let w = a.window();
    let h = hbar.get();
    let terms = a
        .terms()
        .iter()
        .map(|term| {
            let k = term.k.as_slice();
            let diag = w
                .points()
                .zip(&term.diag)
                .map(|(l, d)| {
                    let moved: Vec<i64> = l.iter().zip(k).map(|(x, y)| x + y).collect();
                    let c = (norm_sq(&moved) - norm_sq(&l)) as f64;
                    d * Complex64::from_polar(1.0, 2.0 * PI * PI * t * h * c)
                })
                .collect();
            ShiftTerm { k: term.k.clone(), diag }
        })
        .collect();
    LatticeOperator::new(w, terms).expect("same shifts")
}

/// `H = H₀ + M(V)` compressed to a window.
#[derive(Debug, Clone)]
pub struct TruncatedHamiltonian {
    window: FourierWindow,
    hbar: PlanckParam,
    potential: TrigPotential,
    matrix: DMatrix<Complex64>,
}

impl TruncatedHamiltonian {
    pub fn new(v: &TrigPotential, hbar: PlanckParam, window: FourierWindow) -> Result<Self> {
        if v.dim() != window.n {
            return Err(Error::DimensionMismatch { expected: window.n, got: v.dim() });
        }
        let op = hamiltonian_operator(v, hbar, window)?;
        Ok(Self { window, hbar, potential: v.clone(), matrix: op.dense() })
    }

    pub fn window(&self) -> FourierWindow {
        self.window
    }

    pub fn hbar(&self) -> PlanckParam {
        self.hbar
    }

    pub fn potential(&self) -> &TrigPotential {
        &self.potential
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    /// `e^{−itH/ħ}` from a Hermitian eigendecomposition.
    pub fn propagator(&self, t: f64) -> DMatrix<Complex64> {
        let eig = nalgebra::SymmetricEigen::new(self.matrix.clone());
        let h = self.hbar.get();
        let phases = DMatrix::from_diagonal(&eig.eigenvalues.map(|l| Complex64::from_polar(1.0, -t * l / h)));
        &eig.eigenvectors * phases * eig.eigenvectors.adjoint()
    }
}

fn hamiltonian_operator(v: &TrigPotential, hbar: PlanckParam, window: FourierWindow) -> Result<LatticeOperator> {
    let h = hbar.get();
    let reach = 2 * window.big_n as i64;
    let kinetic = LatticeOperator::diagonal(window, |a| Complex64::new(2.0 * PI * PI * h * h * norm_sq(a) as f64, 0.0));
    let mut terms = kinetic.terms().to_vec();
    for (k, a) in v.coeffs() {
        if k.iter().any(|x| x.abs() > reach) {
            return Err(Error::ShiftOutsideWindow { shift: k.clone(), reach });
        }
        terms.push(ShiftTerm { k: IntVector::new(k.clone())?, diag: vec![*a; window.size()] });
    }
    Ok(LatticeOperator::new(window, terms)?.merged())
}

/// `W = e^{itH₀/ħ} e^{−itH/ħ}` on the window.
pub fn exact_interaction_propagator(
    v: &TrigPotential,
    t: f64,
    hbar: PlanckParam,
    window: FourierWindow,
) -> Result<DMatrix<Complex64>> {
    let ham = TruncatedHamiltonian::new(v, hbar, window)?;
    let u0_back = free_propagator(window, hbar, -t);
    let free: Vec<Complex64> = u0_back.terms()[0].diag.clone();
    let mut w = ham.propagator(t);
    for (i, mut row) in w.row_iter_mut().enumerate() {
        row *= free[i];
    }
    Ok(w)
}

/// Quadrature for the time-ordered simplex integrals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "scheme", rename_all = "snake_case")]
pub enum DysonQuadrature {
    /// Iterated Gauss–Legendre: the innermost integral is tabulated at the
    /// nodes of a composite rule and each outer integral is a cumulative
    /// Gauss–Legendre integral of the previous table. Panels are sized so the
    /// phase changes by at most `max_phase` radians across one panel.
    GaussLegendre { nodes: usize, max_phase: f64 },
    /// Randomly shifted Kronecker points in the cube, mapped to the ordered
    /// simplex by sorting coordinates.
    QuasiMonteCarlo { points: usize, shifts: usize, seed: u64 },
}

impl Default for DysonQuadrature {
    fn default() -> Self {
        Self::GaussLegendre { nodes: 32, max_phase: 8.0 }
    }
}

/// Cumulative composite Gauss–Legendre rule on `[0, t]`.
struct CumulativeRule {
    nodes: usize,
    panels: usize,
    /// Absolute node positions, panel-major.
    points: Vec<f64>,
    /// `∫_{start}^{x_i} ℓ_j`, scaled to the panel.
    partial: Vec<f64>,
    weights: Vec<f64>,
}

fn legendre_all(deg: usize, x: f64) -> Vec<f64> {
    let mut p = vec![1.0, x];
    for n in 1..deg {
        let next = ((2 * n + 1) as f64 * x * p[n] - n as f64 * p[n - 1]) / (n + 1) as f64;
        p.push(next);
    }
    p.truncate(deg + 1);
    p
}

impl CumulativeRule {
    fn new(nodes: usize, panels: usize, t: f64) -> Self {
        let reference = gauss_legendre(nodes, -1.0, 1.0);
        let half = 0.5 * t / panels as f64;
        let leg: Vec<Vec<f64>> = reference.iter().map(|&(x, _)| legendre_all(nodes, x)).collect();
        // ∫_{-1}^{x} P_n = (P_{n+1}(x) − P_{n−1}(x)) / (2n+1), and x + 1 for n = 0.
        let integrals: Vec<Vec<f64>> = reference
            .iter()
            .zip(&leg)
            .map(|(&(x, _), p)| {
                (0..nodes).map(|n| if n == 0 { x + 1.0 } else { (p[n + 1] - p[n - 1]) / (2 * n + 1) as f64 }).collect()
            })
            .collect();
        let mut partial = vec![0.0; nodes * nodes];
        for i in 0..nodes {
            for j in 0..nodes {
                let (_, wj) = reference[j];
                let s: f64 = (0..nodes).map(|n| (n as f64 + 0.5) * leg[j][n] * integrals[i][n]).sum();
                partial[i * nodes + j] = half * wj * s;
            }
        }
        let weights = reference.iter().map(|&(_, w)| half * w).collect();
        let points = (0..panels)
            .flat_map(|p| {
                let mid = (2 * p + 1) as f64 * half;
                reference.iter().map(move |&(x, _)| mid + half * x)
            })
            .collect();
        Self { nodes, panels, points, partial, weights }
    }

    /// Tabulates `s ↦ ∫_0^s g` at the nodes; returns the table and `∫_0^t g`.
    fn integrate(&self, g: &[Complex64]) -> (Vec<Complex64>, Complex64) {
        let p = self.nodes;
        let mut out = vec![ZERO; g.len()];
        let mut carry = ZERO;
        for panel in 0..self.panels {
            let gs = &g[panel * p..(panel + 1) * p];
            for i in 0..p {
                let row = &self.partial[i * p..(i + 1) * p];
                out[panel * p + i] = carry + row.iter().zip(gs).map(|(s, x)| x * *s).sum::<Complex64>();
            }
            carry += self.weights.iter().zip(gs).map(|(w, x)| x * *w).sum::<Complex64>();
        }
        (out, carry)
    }
}

fn panels_for(total_phase: f64, max_phase: f64) -> usize {
    ((total_phase / max_phase).ceil() as usize).max(1)
}

/// Frequency `2π²ħ(‖a+k‖² − ‖a‖²)` of `τ_s(M(e_k))` at source `a`.
fn omega(hbar: f64, a: &[i64], k: &[i64]) -> f64 {
    let moved: Vec<i64> = a.iter().zip(k).map(|(x, y)| x + y).collect();
    2.0 * PI * PI * hbar * (norm_sq(&moved) - norm_sq(a)) as f64
}

/// `∫_{0<t_m<…<t_1<t} Π_j e^{iω_j t_j} dt` with `omegas[j]` the frequency of `t_{j+1}`.
fn simplex_integral_gl(omegas: &[f64], t: f64, nodes: usize, max_phase: f64) -> Complex64 {
    if omegas.is_empty() {
        return ONE;
    }
    let total: f64 = omegas.iter().map(|w| w.abs()).sum::<f64>() * t.abs();
    let rule = CumulativeRule::new(nodes, panels_for(total, max_phase), t);
    let mut table = vec![ONE; rule.points.len()];
    let mut last = ZERO;
    for w in omegas.iter().rev() {
        let g: Vec<Complex64> = rule.points.iter().zip(&table).map(|(&s, f)| f * Complex64::from_polar(1.0, w * s)).collect();
        let (tab, end) = rule.integrate(&g);
        table = tab;
        last = end;
    }
    last
}

fn factorial(m: usize) -> f64 {
    (1..=m).map(|x| x as f64).product()
}

/// Mean and standard error of the randomly shifted lattice rule.
fn simplex_integral_qmc(omegas: &[f64], t: f64, points: usize, shifts: usize, seed: u64) -> (Complex64, f64) {
    let m = omegas.len();
    if m == 0 {
        return (ONE, 0.0);
    }
    let volume = t.powi(m as i32) / factorial(m);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let estimates: Vec<Complex64> = (0..shifts.max(2))
        .map(|_| {
            let shift: Vec<f64> = (0..m).map(|_| rng.gen()).collect();
            let pts = kronecker_points(points, m, &shift);
            let sum: Complex64 = pts
                .iter()
                .map(|u| {
                    let mut s = u.clone();
                    s.sort_by(|a, b| b.total_cmp(a));
                    let phase: f64 = s.iter().zip(omegas).map(|(x, w)| w * x * t).sum();
                    Complex64::from_polar(1.0, phase)
                })
                .sum();
            sum * volume / points as f64
        })
        .collect();
    let r = estimates.len() as f64;
    let mean = estimates.iter().sum::<Complex64>() / r;
    let var = estimates.iter().map(|e| (e - mean).norm_sqr()).sum::<f64>() / (r - 1.0);
    (mean, (var / r).sqrt())
}

/// `∫_{0<t_m<…<t_1<t} τ_{t_1}(M(e_{k_1}))⋯τ_{t_m}(M(e_{k_m})) dt` as a single
/// shift term, together with an estimate of the quadrature error.
pub fn dyson_term(
    k_list: &[IntVector],
    t: f64,
    hbar: PlanckParam,
    window: FourierWindow,
    quad: DysonQuadrature,
) -> Result<(LatticeOperator, f64)> {
    let n = window.n;
    let mut total = vec![0i64; n];
    for k in k_list {
        if k.dim() != n {
            return Err(Error::DimensionMismatch { expected: n, got: k.dim() });
        }
        for (s, x) in total.iter_mut().zip(k.as_slice()) {
            *s += x;
        }
    }
    let reach = 2 * window.big_n as i64;
    let span: i64 = k_list.iter().map(|k| k.as_slice().iter().map(|x| x.abs()).max().unwrap_or(0)).sum();
    if span > reach {
        return Err(Error::ShiftOutsideWindow { shift: total, reach });
    }
    let h = hbar.get();
    let results: Vec<(Complex64, f64)> = window
        .points()
        .collect::<Vec<_>>()
        .par_iter()
        .map(|a| {
            // Later shifts act first: the last word entry is applied to a.
            let mut cur = a.clone();
            let mut omegas = vec![0.0; k_list.len()];
            for (j, k) in k_list.iter().enumerate().rev() {
                omegas[j] = omega(h, &cur, k.as_slice());
                for (c, x) in cur.iter_mut().zip(k.as_slice()) {
                    *c += x;
                }
                if !window.contains(&cur) {
                    return (ZERO, 0.0);
                }
            }
            match quad {
                DysonQuadrature::GaussLegendre { nodes, max_phase } => {
                    let fine = simplex_integral_gl(&omegas, t, nodes, max_phase);
                    let coarse = simplex_integral_gl(&omegas, t, (3 * nodes / 4).max(1), max_phase);
                    (fine, (fine - coarse).norm())
                }
                DysonQuadrature::QuasiMonteCarlo { points, shifts, seed } => {
                    simplex_integral_qmc(&omegas, t, points, shifts, seed)
                }
            }
        })
        .collect();
    let err = results.iter().map(|r| r.1).fold(0.0, f64::max);
    let diag = results.into_iter().map(|r| r.0).collect();
    Ok((LatticeOperator::new(window, vec![ShiftTerm { k: IntVector::new(total)?, diag }])?, err))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PropagatorReport {
    pub t: f64,
    pub hbar: f64,
    #[serde(rename = "M")]
    pub order: usize,
    pub quadrature: DysonQuadrature,
    /// Interior distance to the exact propagator, once compared.
    pub residual: Option<f64>,
    /// `Σ_{m>M} (|t| ‖V‖_∞ / ħ)^m / m!` with `‖V‖_∞ ≤ Σ|a_k|`.
    pub remainder_bound: f64,
    pub quadrature_error: f64,
    pub words: usize,
    pub wall_time_s: f64,
}

/// `Σ_{m>M} x^m / m!` summed until the terms no longer change the total.
pub fn exp_tail(x: f64, order: usize) -> f64 {
    let mut term = 1.0;
    for m in 1..=order {
        term *= x / m as f64;
    }
    let mut sum = 0.0;
    let mut m = order;
    loop {
        m += 1;
        term *= x / m as f64;
        if sum + term == sum || m > order + 10_000 {
            break;
        }
        sum += term;
    }
    sum
}

/// Accumulates all words of length `≤ order` sharing suffix tables.
#[allow(clippy::too_many_arguments)]
fn dyson_tree(
    modes: &[(Vec<i64>, Complex64)],
    window: FourierWindow,
    rule: &CumulativeRule,
    h: f64,
    order: usize,
    cur: &[i64],
    table: &[Complex64],
    weight: Complex64,
    shift: &mut Vec<i64>,
    out: &mut BTreeMap<Vec<i64>, Complex64>,
) {
    for (k, a) in modes {
        let next: Vec<i64> = cur.iter().zip(k).map(|(x, y)| x + y).collect();
        if !window.contains(&next) {
            continue;
        }
        let w = omega(h, cur, k);
        let g: Vec<Complex64> = rule.points.iter().zip(table).map(|(&s, f)| f * Complex64::from_polar(1.0, w * s)).collect();
        let (tab, end) = rule.integrate(&g);
        // (iħ)^{-1} a_k per order.
        let wt = weight * a * Complex64::new(0.0, -1.0 / h);
        for (s, x) in shift.iter_mut().zip(k) {
            *s += x;
        }
        *out.entry(shift.clone()).or_default() += wt * end;
        if order > 1 {
            dyson_tree(modes, window, rule, h, order - 1, &next, &tab, wt, shift, out);
        }
        for (s, x) in shift.iter_mut().zip(k) {
            *s -= x;
        }
    }
}

/// `W_M = Σ_{m≤M} (iħ)^{−m} Σ_words a_{k_1}⋯a_{k_m} dyson_term(k_1, …, k_m)`.
pub fn dyson_partial_sum(
    v: &TrigPotential,
    t: f64,
    hbar: PlanckParam,
    window: FourierWindow,
    order: usize,
    quad: DysonQuadrature,
) -> Result<(LatticeOperator, PropagatorReport)> {
    let start = Instant::now();
    if v.dim() != window.n {
        return Err(Error::DimensionMismatch { expected: window.n, got: v.dim() });
    }
    let support = v.coeffs().len();
    if (support as f64).powi(order as i32) > WORD_LIMIT {
        return Err(Error::Infeasible(format!(
            "{support}^{order} mode words exceed the limit of {WORD_LIMIT}"
        )));
    }
    let words: usize = (1..=order).map(|m| support.pow(m as u32)).sum();
    let h = hbar.get();
    let remainder_bound = exp_tail(t.abs() * v.sup_bound() / h, order);
    let modes: Vec<(Vec<i64>, Complex64)> = v.coeffs().iter().map(|(k, a)| (k.clone(), *a)).collect();
    let points: Vec<Vec<i64>> = window.points().collect();

    let (op, quad_error) = match quad {
        DysonQuadrature::GaussLegendre { nodes, max_phase } => {
            let run = |nodes: usize| -> Result<LatticeOperator> {
                let per_source: Vec<BTreeMap<Vec<i64>, Complex64>> = points
                    .par_iter()
                    .map(|a| {
                        let mut out = BTreeMap::new();
                        out.insert(vec![0; window.n], ONE);
                        if order == 0 || modes.is_empty() {
                            return out;
                        }
                        let total = order as f64 * max_frequency(h, a, &modes, order) * t.abs();
                        let rule = CumulativeRule::new(nodes, panels_for(total, max_phase), t);
                        let table = vec![ONE; rule.points.len()];
                        let mut shift = vec![0; window.n];
                        dyson_tree(&modes, window, &rule, h, order, a, &table, ONE, &mut shift, &mut out);
                        out
                    })
                    .collect();
                assemble(window, &per_source)
            };
            let fine = run(nodes)?;
            let coarse = run((3 * nodes / 4).max(1))?;
            let err = diff_bound(&fine, &coarse)?;
            (fine, err)
        }
        DysonQuadrature::QuasiMonteCarlo { .. } => {
            let mut total = LatticeOperator::identity(window);
            let mut err = 0.0;
            for m in 1..=order {
                for word in words_of(&modes, m) {
                    let ks: Vec<IntVector> = word.iter().map(|&i| IntVector::new(modes[i].0.clone())).collect::<std::result::Result<_, _>>()?;
                    let coeff: Complex64 = word.iter().map(|&i| modes[i].1).product::<Complex64>()
                        * Complex64::new(0.0, -1.0 / h).powi(m as i32);
                    let (term, e) = dyson_term(&ks, t, hbar, window, quad)?;
                    err += coeff.norm() * e;
                    total = total.add(&term.scale(coeff))?;
                }
            }
            (total.merged(), err)
        }
    };
    let report = PropagatorReport {
        t,
        hbar: h,
        order,
        quadrature: quad,
        residual: None,
        remainder_bound,
        quadrature_error: quad_error,
        words,
        wall_time_s: start.elapsed().as_secs_f64(),
    };
    Ok((op, report))
}

fn words_of(modes: &[(Vec<i64>, Complex64)], m: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..m {
        out = out.into_iter().flat_map(|w| (0..modes.len()).map(move |i| [w.clone(), vec![i]].concat())).collect();
    }
    out
}

/// Largest single-step frequency reachable from `a` within `order` steps.
fn max_frequency(h: f64, a: &[i64], modes: &[(Vec<i64>, Complex64)], order: usize) -> f64 {
    let kmax = modes.iter().map(|(k, _)| (norm_sq(k) as f64).sqrt()).fold(0.0, f64::max);
    let radius = (norm_sq(a) as f64).sqrt() + order as f64 * kmax;
    2.0 * PI * PI * h * (2.0 * radius * kmax + kmax * kmax)
}

fn assemble(window: FourierWindow, per_source: &[BTreeMap<Vec<i64>, Complex64>]) -> Result<LatticeOperator> {
    let mut shifts: BTreeMap<Vec<i64>, Vec<Complex64>> = BTreeMap::new();
    for (src, map) in per_source.iter().enumerate() {
        for (k, v) in map {
            shifts.entry(k.clone()).or_insert_with(|| vec![ZERO; window.size()])[src] += v;
        }
    }
    let terms = shifts
        .into_iter()
        .map(|(k, diag)| Ok(ShiftTerm { k: IntVector::new(k)?, diag }))
        .collect::<Result<Vec<_>>>()?;
    LatticeOperator::new(window, terms)
}

/// `Σ_shifts max |d_fine − d_coarse|`, an upper bound on the operator norm
/// of the difference.
fn diff_bound(a: &LatticeOperator, b: &LatticeOperator) -> Result<f64> {
    Ok(a.sub(b)?.merged().terms().iter().map(|t| t.diag.iter().map(|d| d.norm()).fold(0.0, f64::max)).sum())
}

/// Interior distance between a Dyson partial sum and the exact propagator.
pub fn dyson_residual(partial: &LatticeOperator, exact: &DMatrix<Complex64>, margin: usize) -> Result<f64> {
    let diff = partial.dense() - exact;
    dense_restricted_norm(&diff, partial.window(), margin)
}

/// Partial sum, exact propagator and their interior distance with margin
/// `M·max|k| + 1`.
pub fn dyson_with_residual(
    v: &TrigPotential,
    t: f64,
    hbar: PlanckParam,
    window: FourierWindow,
    order: usize,
    quad: DysonQuadrature,
) -> Result<(LatticeOperator, PropagatorReport)> {
    let start = Instant::now();
    let (op, mut report) = dyson_partial_sum(v, t, hbar, window, order, quad)?;
    let exact = exact_interaction_propagator(v, t, hbar, window)?;
    let kmax = v.coeffs().keys().map(|k| k.iter().map(|x| x.unsigned_abs()).max().unwrap_or(0)).max().unwrap_or(0);
    let margin = ((order as u64 * kmax + 1) as usize).min(window.big_n);
    report.residual = Some(dyson_residual(&op, &exact, margin)?);
    report.wall_time_s = start.elapsed().as_secs_f64();
    Ok((op, report))
}

/// `‖e^{itH/ħ} A e^{−itH/ħ} − W* τ⁰_t(A) W‖` on the interior of reach `A`.
pub fn heisenberg_evolution_check(
    a: &LatticeOperator,
    v: &TrigPotential,
    t: f64,
    hbar: PlanckParam,
    window: FourierWindow,
) -> Result<DefectReport> {
    if a.window() != window {
        return Err(Error::WindowMismatch {
            n_a: a.window().n,
            big_n_a: a.window().big_n,
            n_b: window.n,
            big_n_b: window.big_n,
        });
    }
    let ham = TruncatedHamiltonian::new(v, hbar, window)?;
    let u = ham.propagator(t);
    let dense_a = a.dense();
    let lhs = u.adjoint() * &dense_a * &u;
    let w = exact_interaction_propagator(v, t, hbar, window)?;
    let rhs = w.adjoint() * heisenberg_free(a, hbar, t).dense() * &w;
    let margin = a.reach().min(window.big_n);
    let value = dense_restricted_norm(&(lhs - rhs), window, margin)?;
    Ok(DefectReport { hbar: hbar.get(), value, norm_method: "dense".into(), window_n: window.big_n, margin })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cumulative_rule_integrates_polynomials() {
        let rule = CumulativeRule::new(8, 3, 1.5);
        let g: Vec<Complex64> = rule.points.iter().map(|&s| Complex64::new(s * s, 0.0)).collect();
        let (tab, end) = rule.integrate(&g);
        assert!((end.re - 1.5f64.powi(3) / 3.0).abs() < 1e-14);
        for (s, f) in rule.points.iter().zip(&tab) {
            assert!((f.re - s.powi(3) / 3.0).abs() < 1e-14);
        }
    }

    #[test]
    fn single_step_closed_form() {
        let w = 37.0;
        let t = 0.8;
        let got = simplex_integral_gl(&[w], t, 32, 8.0);
        let want = (Complex64::from_polar(1.0, w * t) - 1.0) / Complex64::new(0.0, w);
        assert!((got - want).norm() < 1e-13);
    }

    #[test]
    fn exp_tail_values() {
        assert!((exp_tail(1.0, 0) - (1f64.exp() - 1.0)).abs() < 1e-15);
        assert_eq!(exp_tail(0.0, 3), 0.0);
    }

    #[test]
    fn free_propagator_entry() {
        let w = FourierWindow::new(2, 2).unwrap();
        let u = free_propagator(w, PlanckParam::new(1.0).unwrap(), 1.0);
        let d = u.terms()[0].diag[w.index(&[1, 0]).unwrap()];
        assert!((d - Complex64::from_polar(1.0, -2.0 * PI * PI)).norm() < 1e-15);
    }
}
