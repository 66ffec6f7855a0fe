//! Weyl quantization `Q_ħ(e_k ⊗ h) ψ_l = h(πħ(k+2l)) ψ_{k+l}` and checks of
//! its structural properties on truncated windows.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::IntVector;
use crate::operators::{restricted_norm, FourierWindow, LatticeOperator, NormMethod, ShiftTerm};
use crate::quadrature::{gauss_legendre, tensor};
use crate::symbols::{sup_norm_estimate, Generator, MomentumSymbol, Observable, SupNormBudget, SymbolTerm};

#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
pub struct PlanckParam(f64);

impl PlanckParam {
    pub fn new(hbar: f64) -> Result<Self> {
        if !(hbar > 0.0 && hbar.is_finite()) {
            return Err(Error::InvalidArgument(format!("hbar must be positive, got {hbar}")));
        }
        Ok(Self(hbar))
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DefectReport {
    pub hbar: f64,
    pub value: f64,
    pub norm_method: String,
    #[serde(rename = "N")]
    pub window_n: usize,
    pub margin: usize,
}

fn report(hbar: f64, window: FourierWindow, margin: usize, op: &LatticeOperator) -> Result<DefectReport> {
    let est = restricted_norm(op, margin, NormMethod::Auto)?;
    Ok(DefectReport { hbar, value: est.value, norm_method: est.method.to_string(), window_n: window.big_n, margin })
}

fn check_window(f: &Observable, window: FourierWindow) -> Result<()> {
    if f.dim() != window.n {
        return Err(Error::DimensionMismatch { expected: window.n, got: f.dim() });
    }
    Ok(())
}

/// The momentum point `πħ(k + 2l)`.
pub fn sample_point(hbar: f64, k: &[i64], l: &[i64]) -> Vec<f64> {
    k.iter().zip(l).map(|(&a, &b)| PI * hbar * (a + 2 * b) as f64).collect()
}

/// One shift term per generator with diagonal `h(πħ(k+2l))`.
pub fn weyl_quantize(f: &Observable, hbar: PlanckParam, window: FourierWindow) -> Result<LatticeOperator> {
    check_window(f, window)?;
    let reach = 2 * window.big_n as i64;
    let h = hbar.get();
    let points: Vec<Vec<i64>> = window.points().collect();
    let terms = f
        .generators()
        .iter()
        .map(|g| {
            let k = g.k.as_slice();
            if k.iter().any(|x| x.abs() > reach) {
                return Err(Error::ShiftOutsideWindow { shift: k.to_vec(), reach });
            }
            let diag = points.par_iter().map(|l| g.h.eval(&sample_point(h, k, l))).collect();
            Ok(ShiftTerm { k: g.k.clone(), diag })
        })
        .collect::<Result<Vec<_>>>()?;
    LatticeOperator::new(window, terms)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadSpec {
    /// Half-width of the box for the momentum variable of `g`.
    pub momentum_radius: f64,
    /// Half-width of the box for the position variable `y ∈ U`.
    pub position_radius: f64,
    /// Gauss–Legendre points per axis; the residual compares against a rule
    /// with half as many again, whose values are returned.
    pub points: usize,
    pub tol: f64,
}

impl QuadSpec {
    /// Boxes holding all but ~e^{-40} of each Gaussian and of its transform.
    pub fn auto(h: &MomentumSymbol, k: &IntVector, hbar: f64, points: usize, tol: f64) -> Self {
        let kf: Vec<f64> = k.as_slice().iter().map(|&x| x as f64).collect();
        let a = h.subspace().coords(&kf);
        let anorm = PI * hbar * a.iter().map(|x| x * x).sum::<f64>().sqrt();
        let mut pr: f64 = 1.0;
        let mut yr: f64 = 1e-3;
        for t in h.terms() {
            if t.dim() == 0 {
                continue;
            }
            let (lo, hi) = eig_range(t);
            let c = t.center().iter().map(|x| x * x).sum::<f64>().sqrt();
            let deg = t.poly().degree() as f64;
            let b = t.phase().iter().map(|x| x * x).sum::<f64>().sqrt();
            pr = pr.max(c + anorm + ((40.0 + deg) / lo).sqrt());
            yr = yr.max(hbar * b + 2.0 * hbar * ((40.0 + deg) * hi).sqrt());
        }
        Self { momentum_radius: pr, position_radius: yr, points, tol }
    }
}

fn eig_range(t: &SymbolTerm) -> (f64, f64) {
    let d = t.dim();
    let m = nalgebra::DMatrix::from_fn(d, d, |i, j| t.quad()[i][j]);
    let ev = nalgebra::SymmetricEigen::new(m).eigenvalues;
    (ev.iter().copied().fold(f64::INFINITY, f64::min), ev.iter().copied().fold(0.0, f64::max))
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleResult {
    /// Coefficients of `Q_ħ(gen) ψ_l` on the window, in window order.
    pub coeffs: Vec<Complex64>,
    /// Largest change between the two resolutions.
    pub residual: f64,
}

/// Evaluates the reduced oscillatory integral
/// `(2πħ)^{-d} e^{πiħk·ξ} e^{2πik·x} ∫_U ∫_U g(p + πħP_U k) e^{-iy·p/ħ} ψ_l[x+y+ħξ] dp dy`
/// by tensor Gauss–Legendre quadrature, samples it on a grid in `x` and
/// projects onto the Fourier basis of the window.
pub fn weyl_integral_oracle(
    gen: &Generator,
    hbar: PlanckParam,
    l: &IntVector,
    window: FourierWindow,
    quad: QuadSpec,
) -> Result<OracleResult> {
    let n = window.n;
    for got in [gen.h.ambient(), gen.k.dim(), l.dim()] {
        if got != n {
            return Err(Error::DimensionMismatch { expected: n, got });
        }
    }
    let d = gen.h.subspace().dim();
    if n > 2 || d > 2 {
        return Err(Error::InvalidArgument("oracle supports n <= 2 and dim U <= 2".into()));
    }
    let coarse = oracle_coeffs(gen, hbar.get(), l, window, quad, quad.points)?;
    if d == 0 {
        return Ok(OracleResult { coeffs: coarse, residual: 0.0 });
    }
    let fine = oracle_coeffs(gen, hbar.get(), l, window, quad, quad.points + quad.points / 2)?;
    let residual = fine.iter().zip(&coarse).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
    if residual > quad.tol {
        return Err(Error::Quadrature { residual, tol: quad.tol });
    }
    Ok(OracleResult { coeffs: fine, residual })
}

fn oracle_coeffs(
    gen: &Generator,
    hbar: f64,
    l: &IntVector,
    window: FourierWindow,
    quad: QuadSpec,
    points: usize,
) -> Result<Vec<Complex64>> {
    let n = window.n;
    let h = &gen.h;
    let sub = h.subspace();
    let d = sub.dim();
    let kf: Vec<f64> = gen.k.as_slice().iter().map(|&x| x as f64).collect();
    let lf: Vec<f64> = l.as_slice().iter().map(|&x| x as f64).collect();
    let xi = h.xi();
    let k_xi: f64 = kf.iter().zip(xi).map(|(a, b)| a * b).sum();
    let l_xi: f64 = lf.iter().zip(xi).map(|(a, b)| a * b).sum();
    let prefactor = Complex64::from_polar((2.0 * PI * hbar).powi(-(d as i32)), PI * hbar * k_xi);

    // ψ_l[x+y+ħξ] = e^{2πil·x} e^{2πil·y} e^{2πiħl·ξ}, so the double integral is x-independent.
    let integral: Complex64 = if d == 0 {
        h.terms().iter().map(|t| t.eval_coords(&[])).sum()
    } else {
        let a: Vec<f64> = sub.coords(&kf).iter().map(|x| PI * hbar * x).collect();
        let inner = tensor(&vec![gauss_legendre(points, -quad.momentum_radius, quad.momentum_radius); d]);
        let outer = tensor(&vec![gauss_legendre(points, -quad.position_radius, quad.position_radius); d]);
        let g_vals: Vec<Complex64> =
            inner.iter().map(|(v, w)| *w * h.terms().iter().map(|t| t.eval_coords(v)).sum::<Complex64>()).collect();
        let bl = sub.coords(&lf);
        outer
            .par_iter()
            .map(|(s, ws)| {
                let i_s: Complex64 = inner
                    .iter()
                    .zip(&g_vals)
                    .map(|((v, _), gv)| {
                        let arg: f64 = s.iter().zip(v).zip(&a).map(|((si, vi), ai)| si * (vi - ai)).sum();
                        gv * Complex64::from_polar(1.0, -arg / hbar)
                    })
                    .sum();
                let mode: f64 = 2.0 * PI * s.iter().zip(&bl).map(|(x, y)| x * y).sum::<f64>();
                i_s * Complex64::from_polar(*ws, mode)
            })
            .sum()
    };
    let constant = prefactor * integral * Complex64::from_polar(1.0, 2.0 * PI * hbar * l_xi);

    // Sample on a torus grid and project onto the window's Fourier modes.
    let reach: i64 = kf.iter().zip(&lf).map(|(a, b)| (a + b).abs() as i64).max().unwrap_or(0);
    let side = 2 * (window.side() + reach as usize);
    let total = side.pow(n as u32);
    let samples: Vec<(Vec<f64>, Complex64)> = (0..total)
        .map(|mut idx| {
            let mut x = vec![0.0; n];
            for slot in x.iter_mut().rev() {
                *slot = (idx % side) as f64 / side as f64;
                idx /= side;
            }
            let phase: f64 = x.iter().zip(kf.iter().zip(&lf)).map(|(xi, (k, l))| (k + l) * xi).sum();
            (x, constant * Complex64::from_polar(1.0, 2.0 * PI * phase))
        })
        .collect();
    let coeffs = window
        .points()
        .collect::<Vec<_>>()
        .par_iter()
        .map(|j| {
            samples
                .iter()
                .map(|(x, v)| {
                    let jx: f64 = j.iter().zip(x).map(|(&a, b)| a as f64 * b).sum();
                    v * Complex64::from_polar(1.0, -2.0 * PI * jx)
                })
                .sum::<Complex64>()
                / total as f64
        })
        .collect();
    Ok(coeffs)
}

/// `‖Q(f̄) − Q(f)*‖` on the interior.
pub fn check_star(f: &Observable, hbar: PlanckParam, window: FourierWindow) -> Result<DefectReport> {
    let a = weyl_quantize(&f.conjugate(), hbar, window)?;
    let b = weyl_quantize(f, hbar, window)?.adjoint();
    let margin = f.max_shift() as usize;
    report(hbar.get(), window, margin, &a.sub(&b)?)
}

/// `‖L[x] Q(f) L[−x] − Q(f(· − x, ·))‖` with `L[x] ψ_l = e^{−2πil·x} ψ_l`.
pub fn check_equivariance(f: &Observable, x: &[f64], hbar: PlanckParam, window: FourierWindow) -> Result<DefectReport> {
    let q = weyl_quantize(f, hbar, window)?;
    let rotated = q.conjugate_by_phase(|l| {
        let lx: f64 = l.iter().zip(x).map(|(&a, b)| a as f64 * b).sum();
        Complex64::from_polar(1.0, -2.0 * PI * lx)
    });
    let moved = weyl_quantize(&f.translate_config(x)?, hbar, window)?;
    report(hbar.get(), window, f.max_shift() as usize, &rotated.sub(&moved)?)
}

/// `‖Q_ħ(f) − Q_ħ'(f(·, (ħ/ħ')·))‖`.
pub fn check_planck_rescale(
    f: &Observable,
    hbar: PlanckParam,
    hbar2: PlanckParam,
    window: FourierWindow,
) -> Result<DefectReport> {
    let a = weyl_quantize(f, hbar, window)?;
    let b = weyl_quantize(&f.scale_momentum(hbar.get() / hbar2.get())?, hbar2, window)?;
    report(hbar.get(), window, f.max_shift() as usize, &a.sub(&b)?)
}

/// `e_{a−b} ⊗ g` with `g` a Gaussian at `πħ(a+b)` narrow enough that every
/// other lattice sample is at most `tol²` (so below `tol`), and the defect
/// against `|ψ_a⟩⟨ψ_b|`.
pub fn rank_one_approx(
    a: &IntVector,
    b: &IntVector,
    hbar: PlanckParam,
    window: FourierWindow,
    tol: f64,
) -> Result<(Observable, DefectReport)> {
    let n = window.n;
    if a.dim() != n || b.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, got: a.dim() });
    }
    if !window.contains(a.as_slice()) || !window.contains(b.as_slice()) {
        return Err(Error::InvalidArgument("a and b must lie in the window".into()));
    }
    if !(tol > 0.0 && tol < 1.0) {
        return Err(Error::Infeasible(format!("tolerance {tol} must lie in (0, 1)")));
    }
    let h = hbar.get();
    let spacing = 2.0 * PI * h;
    let width = -2.0 * tol.ln() / (spacing * spacing);
    if !width.is_finite() || width < crate::symbols::momentum::MIN_EIGENVALUE {
        return Err(Error::Infeasible(format!("required Gaussian form {width:e} is not representable")));
    }
    let k: Vec<i64> = a.as_slice().iter().zip(b.as_slice()).map(|(x, y)| x - y).collect();
    let center: Vec<f64> = a.as_slice().iter().zip(b.as_slice()).map(|(&x, &y)| PI * h * (x + y) as f64).collect();
    let g = crate::symbols::isotropic_gaussian(crate::symbols::Subspace::full(n), width, center)?;
    let f = Observable::single(IntVector::new(k.clone())?, g)?;
    let q = weyl_quantize(&f, hbar, window)?;
    let bi = window.index(b.as_slice()).expect("checked");
    let target = LatticeOperator::from_fn(window, IntVector::new(k)?, |l| {
        if window.index(l) == Some(bi) {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    })?;
    let rep = report(h, window, 0, &q.sub(&target)?)?;
    Ok((f, rep))
}

/// `‖Q(f ⊗ 1) − Q(f) ⊗ Id‖` on the product window.
pub fn tensor_embed_check(f: &Observable, m: usize, hbar: PlanckParam, window: FourierWindow) -> Result<DefectReport> {
    let big = FourierWindow::new(window.n + m, window.big_n)?;
    let lhs = weyl_quantize(&f.tensor_with_ones(m), hbar, big)?;
    let rhs = weyl_quantize(f, hbar, window)?.tensor_with_identity(m)?;
    report(hbar.get(), big, f.max_shift() as usize, &lhs.sub(&rhs)?)
}

/// `N(ħ) = ceil(R/(πħ)) + margin`, clamped below by `min_n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WindowSchedule {
    pub radius: f64,
    pub margin: usize,
    pub min_n: usize,
    pub max_n: usize,
}

impl WindowSchedule {
    /// Radius holding all but `1e-8` of every Gaussian's peak value.
    pub fn for_observable(f: &Observable, margin: usize, min_n: usize, max_n: usize) -> Self {
        let mut radius: f64 = 0.0;
        for g in f.generators() {
            for t in g.h.terms() {
                if t.dim() == 0 {
                    continue;
                }
                let (lo, _) = eig_range(t);
                let c = t.center().iter().map(|x| x * x).sum::<f64>().sqrt();
                let deg = t.poly().degree() as f64;
                radius = radius.max(c + ((1e8f64).ln() / lo).sqrt() + (deg / lo).sqrt());
            }
        }
        Self { radius, margin, min_n, max_n }
    }

    pub fn window(&self, n: usize, hbar: f64) -> Result<FourierWindow> {
        let raw = (self.radius / (PI * hbar)).ceil() as usize + self.margin;
        let big_n = raw.max(self.min_n);
        if big_n > self.max_n {
            return Err(Error::Infeasible(format!("window N={big_n} for hbar={hbar} exceeds cap {}", self.max_n)));
        }
        FourierWindow::new(n, big_n)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RieffelRow {
    pub hbar: f64,
    #[serde(rename = "N")]
    pub window_n: usize,
    pub norm: f64,
    pub sup_estimate: f64,
    pub gap: f64,
    pub method: String,
}

/// `(ħ, ‖Q_ħ(f)‖, ‖f‖_∞ estimate)` along a grid of Planck parameters.
pub fn rieffel_curve(
    f: &Observable,
    hbar_grid: &[f64],
    schedule: &WindowSchedule,
    budget: SupNormBudget,
) -> Result<Vec<RieffelRow>> {
    let sup = sup_norm_estimate(f, budget, schedule.radius.max(1.0));
    hbar_grid
        .iter()
        .map(|&h| {
            let hbar = PlanckParam::new(h)?;
            let w = schedule.window(f.dim(), h)?;
            let q = weyl_quantize(f, hbar, w)?;
            let est = restricted_norm(&q, 0, NormMethod::Auto)?;
            Ok(RieffelRow {
                hbar: h,
                window_n: w.big_n,
                norm: est.value,
                sup_estimate: sup,
                gap: (est.value - sup).abs(),
                method: est.method.to_string(),
            })
        })
        .collect()
}

/// `‖Q(f)Q(g) − Q(fg)‖` on vectors whose products never touch the boundary.
pub fn von_neumann_defect(f: &Observable, g: &Observable, hbar: PlanckParam, window: FourierWindow) -> Result<DefectReport> {
    let qf = weyl_quantize(f, hbar, window)?;
    let qg = weyl_quantize(g, hbar, window)?;
    let qfg = weyl_quantize(&f.multiply(g)?, hbar, window)?;
    let margin = (f.max_shift() + g.max_shift()) as usize;
    report(hbar.get(), window, margin, &qf.compose(&qg)?.sub(&qfg)?)
}

/// `‖(−iħ)^{-1}[Q(f), Q(g)] − Q({f, g})‖` on the interior.
pub fn dirac_defect(f: &Observable, g: &Observable, hbar: PlanckParam, window: FourierWindow) -> Result<DefectReport> {
    let qf = weyl_quantize(f, hbar, window)?;
    let qg = weyl_quantize(g, hbar, window)?;
    let comm = qf.compose(&qg)?.sub(&qg.compose(&qf)?)?;
    let scaled = comm.scale(Complex64::new(0.0, 1.0 / hbar.get()));
    let qb = weyl_quantize(&f.poisson_bracket(g)?, hbar, window)?;
    let margin = (f.max_shift() + g.max_shift()) as usize;
    report(hbar.get(), window, margin, &scaled.sub(&qb)?)
}

/// `(ħ, ‖Q_ħ(f)ψ − Q_{ħ₀}(f)ψ‖)` for a fixed vector `ψ`.
pub fn strong_continuity_curve(
    f: &Observable,
    psi: &[Complex64],
    hbar0: PlanckParam,
    hbar_grid: &[f64],
    window: FourierWindow,
) -> Result<Vec<(f64, f64)>> {
    let base = weyl_quantize(f, hbar0, window)?.apply(psi)?;
    hbar_grid
        .iter()
        .map(|&h| {
            let v = weyl_quantize(f, PlanckParam::new(h)?, window)?.apply(psi)?;
            let diff = v.iter().zip(&base).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt();
            Ok((h, diff))
        })
        .collect()
}

/// Least-squares slope of `log value` against `log ħ`.
pub fn loglog_slope(rows: &[(f64, f64)]) -> f64 {
    let pts: Vec<(f64, f64)> = rows.iter().filter(|(h, v)| *h > 0.0 && *v > 0.0).map(|(h, v)| (h.ln(), v.ln())).collect();
    let m = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxy: f64 = pts.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = pts.iter().map(|(x, _)| (x - mx).powi(2)).sum();
    sxy / sxx
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_quantizes_to_identity() {
        let w = FourierWindow::new(2, 3).unwrap();
        let q = weyl_quantize(&Observable::one(2), PlanckParam::new(0.3).unwrap(), w).unwrap();
        assert_eq!(q, LatticeOperator::identity(w));
    }

    #[test]
    fn rejects_bad_hbar() {
        assert!(PlanckParam::new(0.0).is_err());
        assert!(PlanckParam::new(f64::NAN).is_err());
    }

    #[test]
    fn shift_outside_window_rejected() {
        let f = Observable::single(IntVector::new(vec![9]).unwrap(), MomentumSymbol::constant(1, Complex64::new(1.0, 0.0))).unwrap();
        let w = FourierWindow::new(1, 4).unwrap();
        assert!(matches!(weyl_quantize(&f, PlanckParam::new(1.0).unwrap(), w), Err(Error::ShiftOutsideWindow { .. })));
    }

    #[test]
    fn oracle_matches_formula_for_gaussian() {
        let h = crate::symbols::isotropic_gaussian(crate::symbols::Subspace::full(1), 1.0, vec![0.0]).unwrap();
        let gen = Generator::new(IntVector::new(vec![1]).unwrap(), h.clone()).unwrap();
        let hbar = PlanckParam::new(0.5).unwrap();
        let w = FourierWindow::new(1, 3).unwrap();
        let l = IntVector::new(vec![0]).unwrap();
        let quad = QuadSpec::auto(&h, &gen.k, 0.5, 96, 1e-8);

        let res = weyl_integral_oracle(&gen, hbar, &l, w, quad).unwrap();
        for (j, c) in w.points().zip(&res.coeffs) {
            let expect = if j == vec![1] { h.eval(&[PI * 0.5]) } else { Complex64::new(0.0, 0.0) };
            assert!((c - expect).norm() < 1e-6, "{j:?} {c} {expect}");
        }
    }

    #[test]
    fn oracle_point_evaluation_for_phase() {
        let h = MomentumSymbol::plane_wave(vec![0.7, -0.2]);
        let gen = Generator::new(IntVector::new(vec![1, 1]).unwrap(), h.clone()).unwrap();
        let w = FourierWindow::new(2, 2).unwrap();
        let l = IntVector::new(vec![0, -1]).unwrap();
        let quad = QuadSpec { momentum_radius: 1.0, position_radius: 1.0, points: 8, tol: 1e-12 };
        let res = weyl_integral_oracle(&gen, PlanckParam::new(0.3).unwrap(), &l, w, quad).unwrap();
        let q = weyl_quantize(&Observable::single(gen.k.clone(), h).unwrap(), PlanckParam::new(0.3).unwrap(), w).unwrap();
        let mut e = vec![Complex64::new(0.0, 0.0); w.size()];
        e[w.index(&[0, -1]).unwrap()] = Complex64::new(1.0, 0.0);
        let direct = q.apply(&e).unwrap();
        for (a, b) in res.coeffs.iter().zip(&direct) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn rank_one_defect_is_squared_tolerance() {
        let w = FourierWindow::new(1, 8).unwrap();
        let a = IntVector::new(vec![1]).unwrap();
        let b = IntVector::new(vec![0]).unwrap();
        let (_, rep) = rank_one_approx(&a, &b, PlanckParam::new(1.0).unwrap(), w, 1e-8).unwrap();
        assert!((rep.value - 1e-16).abs() < 1e-20, "{}", rep.value);
        assert!(rank_one_approx(&a, &b, PlanckParam::new(1.0).unwrap(), w, 1.5).is_err());
    }

    #[test]
    fn sine_counterexample() {
        let hbar0 = 0.37;
        let f = Observable::sine(1, hbar0);
        let w = FourierWindow::new(1, 4).unwrap();
        let q0 = weyl_quantize(&f, PlanckParam::new(hbar0).unwrap(), w).unwrap();
        assert!(restricted_norm(&q0, 0, NormMethod::Auto).unwrap().value <= 1e-12);
        let hn = hbar0 * (1.0 + 1.0 / 16.0);
        let q1 = weyl_quantize(&f, PlanckParam::new(hn).unwrap(), w).unwrap();
        let idx = w.index(&[4]).unwrap();
        let d: Complex64 = q1.terms().iter().map(|t| t.diag[idx]).sum();
        assert!((d - Complex64::new(1.0, 0.0)).norm() < 1e-12, "{d}");
    }

    #[test]
    fn slope_of_power_law() {
        let rows: Vec<(f64, f64)> = (2..8).map(|j| {
            let h = 2f64.powi(-j);
            (h, 3.0 * h * h)
        }).collect();
        assert!((loglog_slope(&rows) - 2.0).abs() < 1e-12);
    }
}
