//! Hamiltonian flows of `H = p²/2 + V(q)` on `Tⁿ × Rⁿ` for trigonometric
//! potentials, integrated with velocity Verlet.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::symbols::Observable;

const HERMITIAN_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhasePoint {
    q: Vec<f64>,
    p: Vec<f64>,
}

impl PhasePoint {
    /// Reduces `q` to its representative in `[0, 1)ⁿ`.
    pub fn new(q: Vec<f64>, p: Vec<f64>) -> Result<Self> {
        if q.len() != p.len() || q.is_empty() {
            return Err(Error::DimensionMismatch { expected: q.len(), got: p.len() });
        }
        if q.iter().chain(&p).any(|x| !x.is_finite()) {
            return Err(Error::InvalidArgument("phase point must be finite".into()));
        }
        Ok(Self { q: q.into_iter().map(wrap).collect(), p })
    }

    pub fn q(&self) -> &[f64] {
        &self.q
    }

    pub fn p(&self) -> &[f64] {
        &self.p
    }

    pub fn dim(&self) -> usize {
        self.q.len()
    }

    /// Flat torus distance in `q` plus Euclidean distance in `p`.
    pub fn distance(&self, other: &Self) -> f64 {
        let dq: f64 = self
            .q
            .iter()
            .zip(&other.q)
            .map(|(a, b)| {
                let d = (a - b).abs();
                d.min(1.0 - d).powi(2)
            })
            .sum::<f64>()
            .sqrt();
        let dp: f64 = self.p.iter().zip(&other.p).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
        dq + dp
    }
}

fn wrap(x: f64) -> f64 {
    let r = x.rem_euclid(1.0);
    if r >= 1.0 {
        0.0
    } else {
        r
    }
}

/// `V = Σ a_k e_k` with `a_{−k} = conj(a_k)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TrigPotential {
    n: usize,
    coeffs: BTreeMap<Vec<i64>, Complex64>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModeJson {
    k: Vec<i64>,
    re: f64,
    im: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PotentialJson {
    n: usize,
    coeffs: Vec<ModeJson>,
}

impl TrigPotential {
    pub fn new(n: usize, coeffs: BTreeMap<Vec<i64>, Complex64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("dimension must be at least 1".into()));
        }
        let mut clean = BTreeMap::new();
        for (k, a) in coeffs {
            if k.len() != n {
                return Err(Error::DimensionMismatch { expected: n, got: k.len() });
            }
            if !(a.re.is_finite() && a.im.is_finite()) {
                return Err(Error::InvalidArgument(format!("coefficient of {k:?} is not finite")));
            }
            if a != Complex64::new(0.0, 0.0) {
                clean.insert(k, a);
            }
        }
        let scale = 1.0 + clean.values().map(|a| a.norm()).sum::<f64>();
        for (k, a) in &clean {
            let minus: Vec<i64> = k.iter().map(|x| -x).collect();
            let b = clean.get(&minus).copied().unwrap_or_default();
            if (b - a.conj()).norm() > HERMITIAN_TOL * scale {
                return Err(Error::InvalidArgument(format!("potential is not real: a_{k:?} = {a}, a_{minus:?} = {b}")));
            }
        }
        let v = Self { n, coeffs: clean };
        for i in 0..16 {
            let q: Vec<f64> = (0..n).map(|j| ((i * (2 * j + 3)) as f64 * 0.0625 + 0.03 * j as f64).fract()).collect();
            if v.eval_complex(&q).im.abs() > HERMITIAN_TOL * scale {
                return Err(Error::InvalidArgument("potential takes complex values".into()));
            }
        }
        Ok(v)
    }

    pub fn zero(n: usize) -> Self {
        Self { n, coeffs: BTreeMap::new() }
    }

    /// `amp · cos(2πk·q)`, i.e. `a_{±k} = amp/2`.
    pub fn cosine(k: Vec<i64>, amp: f64) -> Result<Self> {
        let n = k.len();
        if k.iter().all(|&x| x == 0) {
            let mut m = BTreeMap::new();
            m.insert(k, Complex64::new(amp, 0.0));
            return Self::new(n, m);
        }
        let mut m = BTreeMap::new();
        m.insert(k.iter().map(|x| -x).collect(), Complex64::new(amp / 2.0, 0.0));
        m.insert(k, Complex64::new(amp / 2.0, 0.0));
        Self::new(n, m)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn coeffs(&self) -> &BTreeMap<Vec<i64>, Complex64> {
        &self.coeffs
    }

    pub fn coeff(&self, k: &[i64]) -> Complex64 {
        self.coeffs.get(k).copied().unwrap_or_default()
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.combine(other, 1.0)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.combine(other, -1.0)
    }

    fn combine(&self, other: &Self, sign: f64) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: other.n });
        }
        let mut m = self.coeffs.clone();
        for (k, a) in &other.coeffs {
            *m.entry(k.clone()).or_default() += a * sign;
        }
        Self::new(self.n, m)
    }

    pub fn scale(&self, s: f64) -> Self {
        Self { n: self.n, coeffs: self.coeffs.iter().map(|(k, a)| (k.clone(), a * s)).collect() }
    }

    /// `V_k = a_k e_k + a_{−k} e_{−k}` (just `a_0 e_0` for `k = 0`).
    pub fn mode(&self, k: &[i64]) -> Self {
        let minus: Vec<i64> = k.iter().map(|x| -x).collect();
        let coeffs = self.coeffs.iter().filter(|(j, _)| **j == k || **j == minus).map(|(j, a)| (j.clone(), *a)).collect();
        Self { n: self.n, coeffs }
    }

    fn eval_complex(&self, q: &[f64]) -> Complex64 {
        self.coeffs
            .iter()
            .map(|(k, a)| {
                let kq: f64 = k.iter().zip(q).map(|(&k, x)| k as f64 * x).sum();
                a * Complex64::from_polar(1.0, 2.0 * PI * kq)
            })
            .sum()
    }

    /// `V(q)`; the imaginary rounding residue is dropped.
    pub fn eval(&self, q: &[f64]) -> f64 {
        self.eval_complex(q).re
    }

    /// `∇V(q) = Σ 2πik a_k e^{2πik·q}`, real part.
    pub fn grad(&self, q: &[f64]) -> Vec<f64> {
        let mut g = vec![0.0; self.n];
        for (k, a) in &self.coeffs {
            let kq: f64 = k.iter().zip(q).map(|(&k, x)| k as f64 * x).sum();
            let v = a * Complex64::from_polar(1.0, 2.0 * PI * kq) * Complex64::new(0.0, 2.0 * PI);
            for (gi, &ki) in g.iter_mut().zip(k) {
                *gi += ki as f64 * v.re;
            }
        }
        g
    }

    /// `Σ |a_k| ≥ ‖V‖_∞`.
    pub fn sup_bound(&self) -> f64 {
        self.coeffs.values().map(|a| a.norm()).sum()
    }

    /// `max(1, 4π² Σ |k|² |a_k|)`, a Lipschitz constant of `(q,p) ↦ (p, −∇V(q))`.
    pub fn lipschitz_bound(&self) -> f64 {
        let hess: f64 = self.coeffs.iter().map(|(k, a)| 4.0 * PI * PI * norm_sq(k) * a.norm()).sum();
        hess.max(1.0)
    }

    /// `Σ 2π|k| |a_k − b_k| ≥ sup ‖∇V − ∇W‖`.
    pub fn grad_gap_bound(&self, other: &Self) -> f64 {
        let mut keys: Vec<&Vec<i64>> = self.coeffs.keys().chain(other.coeffs.keys()).collect();
        keys.sort();
        keys.dedup();
        keys.into_iter().map(|k| 2.0 * PI * norm_sq(k).sqrt() * (self.coeff(k) - other.coeff(k)).norm()).sum()
    }

    pub fn to_json_string(&self) -> String {
        let j = PotentialJson {
            n: self.n,
            coeffs: self.coeffs.iter().map(|(k, a)| ModeJson { k: k.clone(), re: a.re, im: a.im }).collect(),
        };
        serde_json::to_string_pretty(&j).expect("serializable")
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let j: PotentialJson = serde_json::from_str(s)?;
        let mut m = BTreeMap::new();
        for c in j.coeffs {
            *m.entry(c.k).or_default() += Complex64::new(c.re, c.im);
        }
        Self::new(j.n, m)
    }
}

fn norm_sq(k: &[i64]) -> f64 {
    k.iter().map(|&x| (x * x) as f64).sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Integrator {
    Verlet,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FlowConfig {
    pub steps: usize,
    pub integrator: Integrator,
    /// Integrator tolerance added to contracts that assume exact flows.
    pub tolerance: f64,
    /// Optional threshold on `|k·p₀|` for mode-removal experiments.
    pub threshold: Option<f64>,
}

impl FlowConfig {
    pub fn new(steps: usize) -> Result<Self> {
        if steps == 0 {
            return Err(Error::InvalidArgument("step count must be at least 1".into()));
        }
        Ok(Self { steps, integrator: Integrator::Verlet, tolerance: 1e-6, threshold: None })
    }
}

/// `Φ_V^t(x₀)` by `cfg.steps` velocity-Verlet steps of size `t/steps`.
pub fn flow(x0: &PhasePoint, v: &TrigPotential, t: f64, cfg: &FlowConfig) -> Result<PhasePoint> {
    if x0.dim() != v.dim() {
        return Err(Error::DimensionMismatch { expected: v.dim(), got: x0.dim() });
    }
    if cfg.steps == 0 {
        return Err(Error::InvalidArgument("step count must be at least 1".into()));
    }
    let h = t / cfg.steps as f64;
    let mut q = x0.q.clone();
    let mut p = x0.p.clone();
    if v.coeffs.is_empty() {
        for (qi, pi) in q.iter_mut().zip(&p) {
            *qi += t * pi;
        }
        return PhasePoint::new(q, p);
    }
    let mut g = v.grad(&q);
    for _ in 0..cfg.steps {
        for ((qi, pi), gi) in q.iter_mut().zip(p.iter_mut()).zip(&g) {
            *pi -= 0.5 * h * gi;
            *qi += h * *pi;
        }
        g = v.grad(&q);
        for (pi, gi) in p.iter_mut().zip(&g) {
            *pi -= 0.5 * h * gi;
        }
    }
    PhasePoint::new(q, p)
}

pub fn energy(x: &PhasePoint, v: &TrigPotential) -> f64 {
    0.5 * x.p.iter().map(|p| p * p).sum::<f64>() + v.eval(&x.q)
}

/// `d(Φ_V^t(x₀), φ⁻¹ Φ^1_{t²V} φ(x₀))` with `φ(q, p) = (q, tp)`.
pub fn rescale_flow_check(x0: &PhasePoint, v: &TrigPotential, t: f64, cfg: &FlowConfig) -> Result<f64> {
    if t == 0.0 {
        return Err(Error::InvalidArgument("rescaling needs t != 0".into()));
    }
    let direct = flow(x0, v, t, cfg)?;
    let lifted = PhasePoint::new(x0.q.clone(), x0.p.iter().map(|p| t * p).collect())?;
    let moved = flow(&lifted, &v.scale(t * t), 1.0, cfg)?;
    let back = PhasePoint::new(moved.q.clone(), moved.p.iter().map(|p| p / t).collect())?;
    Ok(direct.distance(&back))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GronwallReport {
    pub lhs: f64,
    pub rhs: f64,
    pub lipschitz: f64,
    pub epsilon: f64,
}

impl GronwallReport {
    pub fn holds(&self, tolerance: f64) -> bool {
        self.lhs <= self.rhs + tolerance
    }
}

/// `d(Φ_V^t x₀, Φ_W^t y₀)` against `(d(x₀, y₀) + tε) e^{tc}`.
pub fn gronwall_check(
    x0: &PhasePoint,
    y0: &PhasePoint,
    v: &TrigPotential,
    w: &TrigPotential,
    t: f64,
    cfg: &FlowConfig,
) -> Result<GronwallReport> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::InvalidArgument(format!("t = {t} must lie in [0, 1]")));
    }
    let c = v.lipschitz_bound();
    let eps = v.grad_gap_bound(w);
    let lhs = flow(x0, v, t, cfg)?.distance(&flow(y0, w, t, cfg)?);
    let rhs = (x0.distance(y0) + t * eps) * (t * c).exp();
    Ok(GronwallReport { lhs, rhs, lipschitz: c, epsilon: eps })
}

/// `d(Φ_V(x₀), Φ_{V−V_k}(x₀))` for time-1 flows.
pub fn mode_removal_gap(x0: &PhasePoint, v: &TrigPotential, k: &[i64], cfg: &FlowConfig) -> Result<f64> {
    if k.len() != v.dim() {
        return Err(Error::DimensionMismatch { expected: v.dim(), got: k.len() });
    }
    if k.iter().all(|&x| x == 0) {
        return Err(Error::InvalidArgument("mode removal needs k != 0".into()));
    }
    let reduced = v.sub(&v.mode(k))?;
    Ok(flow(x0, v, 1.0, cfg)?.distance(&flow(x0, &reduced, 1.0, cfg)?))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModeRemovalRow {
    pub s: f64,
    pub gap: f64,
    pub gap_times_s: f64,
}

/// Gaps at `p₀ = s k/|k|²` (so `k·p₀ = s`) for each `s` in the grid.
pub fn mode_removal_sweep(
    q0: &[f64],
    v: &TrigPotential,
    k: &[i64],
    s_grid: &[f64],
    cfg: &FlowConfig,
) -> Result<Vec<ModeRemovalRow>> {
    let kk = norm_sq(k);
    s_grid
        .par_iter()
        .map(|&s| {
            if let Some(d) = cfg.threshold {
                if s.abs() <= d {
                    return Err(Error::InvalidArgument(format!("|k·p0| = {s} does not exceed threshold {d}")));
                }
            }
            let p0: Vec<f64> = k.iter().map(|&x| s * x as f64 / kk).collect();
            let gap = mode_removal_gap(&PhasePoint::new(q0.to_vec(), p0)?, v, k, cfg)?;
            Ok(ModeRemovalRow { s, gap, gap_times_s: gap * s.abs() })
        })
        .collect()
}

/// `Π_l max(0, 1 − |k_l|/m)`.
pub fn fejer_weight(k: &[i64], m: usize) -> f64 {
    k.iter().map(|&x| (1.0 - x.unsigned_abs() as f64 / m as f64).max(0.0)).product()
}

/// A coefficient rule `k ↦ a_k` with `a_k = 0` whenever some `|k_l| > cutoff`.
pub struct CoeffRule<'a> {
    pub n: usize,
    pub cutoff: usize,
    pub rule: &'a (dyn Fn(&[i64]) -> Complex64 + Sync),
}

impl CoeffRule<'_> {
    fn collect(&self, radius: usize) -> Result<TrigPotential> {
        let r = radius.min(self.cutoff) as i64;
        let side = (2 * r + 1) as usize;
        let mut m = BTreeMap::new();
        for mut idx in 0..side.pow(self.n as u32) {
            let mut k = vec![0i64; self.n];
            for slot in k.iter_mut().rev() {
                *slot = (idx % side) as i64 - r;
                idx /= side;
            }
            let a = (self.rule)(&k);
            m.insert(k, a);
        }
        TrigPotential::new(self.n, m)
    }

    /// The untruncated potential `Σ_{|k_l| ≤ cutoff} a_k e_k`.
    pub fn potential(&self) -> Result<TrigPotential> {
        self.collect(self.cutoff)
    }
}

/// `V_m = Σ a_k Π_l max(0, 1 − |k_l|/m) e_k`.
pub fn fejer_smooth(rule: &CoeffRule, m: usize) -> Result<TrigPotential> {
    if m == 0 {
        return Err(Error::InvalidArgument("Fejér order must be at least 1".into()));
    }
    let base = rule.collect(m.saturating_sub(1))?;
    let coeffs = base.coeffs.iter().map(|(k, a)| (k.clone(), a * fejer_weight(k, m))).collect();
    TrigPotential::new(rule.n, coeffs)
}

/// `a_k = (1 + |k|)^{−power}` for `|k_l| ≤ cutoff`.
pub fn power_decay(power: f64) -> impl Fn(&[i64]) -> Complex64 + Sync {
    move |k: &[i64]| Complex64::new((1.0 + norm_sq(k).sqrt()).powf(-power), 0.0)
}

/// `max_q ‖∇V(q) − ∇W(q)‖` over a uniform grid with `points` per axis.
pub fn sup_grad_gap(v: &TrigPotential, w: &TrigPotential, points: usize) -> Result<f64> {
    if v.dim() != w.dim() {
        return Err(Error::DimensionMismatch { expected: v.dim(), got: w.dim() });
    }
    let n = v.dim();
    let diff = v.sub(w)?;
    Ok((0..points.pow(n as u32))
        .into_par_iter()
        .map(|mut idx| {
            let mut q = vec![0.0; n];
            for slot in q.iter_mut().rev() {
                *slot = (idx % points) as f64 / points as f64;
                idx /= points;
            }
            diff.grad(&q).iter().map(|g| g * g).sum::<f64>().sqrt()
        })
        .reduce(|| 0.0, f64::max))
}

/// `f(Φ_V^t(x))` at each sample.
pub fn pullback_samples(
    f: &Observable,
    v: &TrigPotential,
    t: f64,
    cfg: &FlowConfig,
    samples: &[PhasePoint],
) -> Result<Vec<Complex64>> {
    if f.dim() != v.dim() {
        return Err(Error::DimensionMismatch { expected: v.dim(), got: f.dim() });
    }
    samples
        .par_iter()
        .map(|x| {
            let y = flow(x, v, t, cfg)?;
            Ok(f.eval(&y.q, &y.p))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(q: &[f64], p: &[f64]) -> PhasePoint {
        PhasePoint::new(q.to_vec(), p.to_vec()).unwrap()
    }

    #[test]
    fn cosine_values() {
        let v = TrigPotential::cosine(vec![1], 1.0).unwrap();
        assert!((v.eval(&[0.0]) - 1.0).abs() < 1e-15);
        assert!(v.grad(&[0.0])[0].abs() < 1e-15);
        assert!(v.eval(&[0.25]).abs() < 1e-15);
        assert!((v.grad(&[0.25])[0] + 2.0 * PI).abs() < 1e-13);
        assert_eq!(TrigPotential::zero(2).eval(&[0.3, 0.1]), 0.0);
    }

    #[test]
    fn rejects_non_hermitian() {
        let mut m = BTreeMap::new();
        m.insert(vec![1], Complex64::new(1.0, 0.0));
        assert!(TrigPotential::new(1, m).is_err());
    }

    #[test]
    fn free_flow_and_critical_point() {
        let x = pt(&[0.9], &[0.35]);
        let y = flow(&x, &TrigPotential::zero(1), 1.0, &FlowConfig::new(10).unwrap()).unwrap();
        assert!((y.q()[0] - (0.9f64 + 0.35).fract()).abs() < 1e-15);
        let v = TrigPotential::cosine(vec![1], 1.0).unwrap();
        let z = flow(&pt(&[0.0], &[0.0]), &v, 1.0, &FlowConfig::new(100).unwrap()).unwrap();
        assert_eq!(z, pt(&[0.0], &[0.0]));
    }

    #[test]
    fn torus_distance_wraps() {
        assert!((pt(&[0.95], &[0.0]).distance(&pt(&[0.05], &[0.0])) - 0.1).abs() < 1e-15);
    }

    #[test]
    fn fejer_weights() {
        assert_eq!(fejer_weight(&[1, 0], 4), 0.75);
        let rule = power_decay(4.0);
        let r = CoeffRule { n: 1, cutoff: 12, rule: &rule };
        let v1 = fejer_smooth(&r, 1).unwrap();
        assert_eq!(v1.coeffs().len(), 1);
        assert!(v1.coeffs().contains_key(&vec![0]));
    }

    #[test]
    fn json_round_trip() {
        let v = TrigPotential::cosine(vec![1, -2], 0.7).unwrap();
        assert_eq!(TrigPotential::from_json_str(&v.to_json_string()).unwrap(), v);
    }
}
