mod config;
mod error;
mod experiments;
mod output;
mod sampling;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use cylq_core::classical_dynamics::{
    energy, fejer_smooth, flow, mode_removal_sweep, power_decay, sup_grad_gap, CoeffRule, FlowConfig, PhasePoint,
};
use cylq_core::lattice::{direction_period, extend_to_unimodular, IntVector, RationalDirection};
use cylq_core::operators::{diagonal_csv, manifest_json, FourierWindow};
use cylq_core::quantizer::{
    check_equivariance, check_planck_rescale, check_star, dirac_defect, rank_one_approx, rieffel_curve,
    strong_continuity_curve, tensor_embed_check, von_neumann_defect, weyl_quantize, DefectReport, PlanckParam,
    WindowSchedule,
};
use cylq_core::quantum_dynamics::{dyson_partial_sum, dyson_with_residual, DysonQuadrature};
use cylq_core::symbols::{Observable, SupNormBudget};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::error::CliError;
use crate::output::{float, write_csv, write_json};

#[derive(Parser)]
#[command(name = "cylq", version, about = "Weyl quantization experiments on the cylinder T*T^n")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integer lattice utilities.
    Lattice {
        #[command(subcommand)]
        op: LatticeOp,
    },
    /// Quantize an observable on a window and write its shift-diagonal form.
    Quantize {
        #[arg(long)]
        observable: PathBuf,
        #[arg(long)]
        hbar: f64,
        #[arg(long)]
        window: usize,
        /// Manifest JSON; diagonals go to `<stem>.term<i>.csv` beside it.
        #[arg(long)]
        out: PathBuf,
    },
    /// Quantization conditions and structure identities as ħ curves.
    Check(CheckArgs),
    /// Velocity Verlet trajectory sampled at evenly spaced times.
    Flow {
        #[arg(long)]
        potential: PathBuf,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        q: Vec<f64>,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        p: Vec<f64>,
        #[arg(long, allow_hyphen_values = true)]
        t: f64,
        #[arg(long, default_value_t = 1000)]
        steps: usize,
        #[arg(long, default_value_t = 10)]
        samples: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Time-1 flow gap after removing the mode `k`, swept over `k·p₀`.
    Moderemoval {
        #[arg(long)]
        potential: PathBuf,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        k: Vec<i64>,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        q0: Vec<f64>,
        #[arg(long, value_delimiter = ',')]
        s_grid: Vec<f64>,
        #[arg(long, default_value_t = 200_000)]
        steps: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Gradient gap of Fejér means for `a_k = (1+|k|)^{-power}`.
    Fejer {
        #[arg(long, default_value_t = 1)]
        n: usize,
        #[arg(long, default_value_t = 4.0)]
        power: f64,
        #[arg(long, default_value_t = 12)]
        cutoff: usize,
        #[arg(long, value_delimiter = ',', default_value = "4,8,16,32")]
        orders: Vec<usize>,
        #[arg(long, default_value_t = 4096)]
        points: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Truncated Dyson series for the interaction propagator.
    Dyson {
        #[arg(long)]
        potential: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        t: f64,
        #[arg(long)]
        hbar: f64,
        #[arg(long)]
        window: usize,
        #[arg(long)]
        order: usize,
        #[arg(long, value_enum, default_value_t = Scheme::Gl)]
        scheme: Scheme,
        /// Skip the exact propagator and the residual.
        #[arg(long)]
        no_residual: bool,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run a configured experiment.
    Run { config: PathBuf },
    /// List registered experiments.
    List,
}

#[derive(Subcommand)]
enum LatticeOp {
    /// Complete a primitive set of integer vectors to a unimodular basis.
    Extend {
        #[arg(long)]
        n: usize,
        /// Vectors separated by `;`, entries by `,`.
        #[arg(long, allow_hyphen_values = true)]
        vectors: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Smallest T > 0 with T·v integral.
    Period {
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        numerator: Vec<i64>,
        #[arg(long, default_value_t = 1)]
        denominator: i64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Scheme {
    Gl,
    Qmc,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CheckKind {
    Star,
    Equivariance,
    Rescale,
    Tensor,
    Rankone,
    Rieffel,
    Vonneumann,
    Dirac,
    Strongcont,
}

#[derive(clap::Args)]
struct CheckArgs {
    #[arg(value_enum)]
    kind: CheckKind,
    #[arg(long)]
    observable: Option<PathBuf>,
    /// Second observable for the von Neumann and Dirac defects.
    #[arg(long)]
    other: Option<PathBuf>,
    #[arg(long, value_delimiter = ',', required = true)]
    hbar_grid: Vec<f64>,
    /// Fixed window size; otherwise chosen per ħ by the schedule.
    #[arg(long)]
    window: Option<usize>,
    #[arg(long, default_value_t = 2)]
    margin: usize,
    #[arg(long, default_value_t = 4)]
    min_n: usize,
    #[arg(long, default_value_t = 20_000)]
    max_n: usize,
    /// Translation for `equivariance`, second ħ for `rescale`, base ħ for `strongcont`.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    param: Vec<f64>,
    /// Embedding dimension for `tensor`.
    #[arg(long, default_value_t = 1)]
    m: usize,
    /// Lattice points for `rankone`.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    a: Vec<i64>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    b: Vec<i64>,
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

fn hb(h: f64) -> Result<PlanckParam, CliError> {
    Ok(PlanckParam::new(h)?)
}

fn int_vector(path: &str, v: Vec<i64>) -> Result<IntVector, CliError> {
    IntVector::new(v).map_err(|e| CliError::input(path, e.to_string()))
}

fn emit(out: Option<&Path>, value: &serde_json::Value) -> Result<(), CliError> {
    match out {
        Some(p) => write_json(p, value),
        None => {
            println!("{}", serde_json::to_string_pretty(value).map_err(cylq_core::Error::from)?);
            Ok(())
        }
    }
}

fn lattice(op: LatticeOp) -> Result<(), CliError> {
    match op {
        LatticeOp::Extend { n, vectors, out } => {
            let mut vs = Vec::new();
            for part in vectors.split(';').map(str::trim).filter(|s| !s.is_empty()) {
                let entries = part
                    .split(',')
                    .map(|x| x.trim().parse::<i64>())
                    .collect::<Result<Vec<_>, _>>()
                    .map_err(|e| CliError::input("--vectors", e.to_string()))?;
                vs.push(int_vector("--vectors", entries)?);
            }
            let b = extend_to_unimodular(n, &vs).map_err(|e| CliError::input("--vectors", e.to_string()))?;
            emit(out.as_deref(), &json!({ "n": n, "basis_rows": b.to_rows(), "det": b.det()? }))
        }
        LatticeOp::Period { numerator, denominator, out } => {
            let dir = RationalDirection::new(int_vector("--numerator", numerator)?, denominator)
                .map_err(|e| CliError::input("--numerator", e.to_string()))?;
            let t = direction_period(&dir)?;
            emit(out.as_deref(), &json!({ "numerator": t.numer(), "denominator": t.denom() }))
        }
    }
}

fn quantize(observable: &Path, hbar: f64, window: usize, out: &Path) -> Result<(), CliError> {
    let f = config::load_observable(observable)?;
    let w = FourierWindow::new(f.dim(), window)?;
    let op = weyl_quantize(&f, hb(hbar)?, w)?;
    let stem = out.file_stem().and_then(|s| s.to_str()).unwrap_or("operator").to_string();
    let dir = out.parent().unwrap_or(Path::new(""));
    let mut refs = Vec::new();
    for (i, t) in op.terms().iter().enumerate() {
        let name = format!("{stem}.term{i}.csv");
        output::write_atomic(&dir.join(&name), diagonal_csv(w, &t.diag).as_bytes())?;
        refs.push(name);
    }
    let mut manifest = manifest_json(&op, &refs);
    manifest["hbar"] = json!(hbar);
    write_json(out, &manifest)
}

fn defect_row(r: &DefectReport) -> Vec<String> {
    vec![float(r.hbar), float(r.value), r.window_n.to_string(), r.norm_method.clone()]
}

fn check(a: CheckArgs) -> Result<(), CliError> {
    if a.hbar_grid.is_empty() {
        return Err(CliError::input("--hbar-grid", "must be nonempty"));
    }
    let f = match &a.observable {
        Some(p) => config::load_observable(p)?,
        None if a.kind == CheckKind::Rankone => Observable::one(a.a.len().max(1)),
        None => return Err(CliError::input("--observable", "required for this check")),
    };
    let sched = WindowSchedule::for_observable(&f, a.margin, a.min_n, a.max_n);
    let window = |h: f64| -> Result<FourierWindow, CliError> {
        Ok(match a.window {
            Some(n) => FourierWindow::new(f.dim(), n)?,
            None => sched.window(f.dim(), h)?,
        })
    };
    let header = ["hbar", "value", "N", "method"];
    let mut rows = Vec::new();
    match a.kind {
        CheckKind::Rieffel => {
            let sched = match a.window {
                Some(n) => WindowSchedule { radius: 0.0, margin: n, min_n: n, max_n: n },
                None => sched,
            };
            let curve = rieffel_curve(&f, &a.hbar_grid, &sched, SupNormBudget::default())?;
            let recs = curve.iter().map(|r| {
                vec![float(r.hbar), float(r.gap), r.window_n.to_string(), r.method.clone(), float(r.norm), float(r.sup_estimate)]
            });
            return write_csv(&a.out, &["hbar", "value", "N", "method", "norm", "sup"], recs);
        }
        CheckKind::Strongcont => {
            let hbar0 = *a.param.first().ok_or_else(|| CliError::input("--param", "base ħ required"))?;
            let w = window(hbar0)?;
            let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
            let psi: Vec<Complex64> = (0..w.size()).map(|_| sampling::complex(&mut rng)).collect();
            for (h, v) in strong_continuity_curve(&f, &psi, hb(hbar0)?, &a.hbar_grid, w)? {
                rows.push(vec![float(h), float(v), w.big_n.to_string(), "vector".to_string()]);
            }
            return write_csv(&a.out, &header, rows);
        }
        _ => {}
    }
    for &h in &a.hbar_grid {
        let w = window(h)?;
        let rep = match a.kind {
            CheckKind::Star => check_star(&f, hb(h)?, w)?,
            CheckKind::Equivariance => check_equivariance(&f, &a.param, hb(h)?, w)?,
            CheckKind::Rescale => {
                let h2 = *a.param.first().ok_or_else(|| CliError::input("--param", "second ħ required"))?;
                check_planck_rescale(&f, hb(h)?, hb(h2)?, w)?
            }
            CheckKind::Tensor => tensor_embed_check(&f, a.m, hb(h)?, w)?,
            CheckKind::Rankone => {
                let (av, bv) = (int_vector("--a", a.a.clone())?, int_vector("--b", a.b.clone())?);
                let w = FourierWindow::new(av.dim(), a.window.unwrap_or(8))?;
                rank_one_approx(&av, &bv, hb(h)?, w, a.tol)?.1
            }
            CheckKind::Vonneumann | CheckKind::Dirac => {
                let g = config::load_observable(a.other.as_deref().ok_or_else(|| CliError::input("--other", "required"))?)?;
                if a.kind == CheckKind::Dirac {
                    dirac_defect(&f, &g, hb(h)?, w)?
                } else {
                    von_neumann_defect(&f, &g, hb(h)?, w)?
                }
            }
            CheckKind::Rieffel | CheckKind::Strongcont => unreachable!("handled above"),
        };
        rows.push(defect_row(&rep));
    }
    write_csv(&a.out, &header, rows)
}

fn run(path: &Path) -> Result<bool, CliError> {
    let cfg = config::load(path)?;
    let exp = experiments::find(&cfg.experiment).ok_or_else(|| CliError::UnknownExperiment(cfg.experiment.clone()))?;
    let rows = (exp.run)(&cfg.params)?;
    write_csv(&cfg.csv, &output::RESULT_HEADER, rows.iter().map(output::result_record))?;
    let summary = output::summary(exp.name, &rows);
    write_json(&cfg.summary, &summary)?;
    if !summary.pass {
        if let Some(r) = output::worst(&rows) {
            eprintln!(
                "{}: FAIL at `{}`: value {} {} {}",
                exp.name,
                r.case,
                float(r.value),
                r.relation.symbol(),
                float(r.bound)
            );
        }
    }
    Ok(summary.pass)
}

fn dispatch(cli: Cli) -> Result<bool, CliError> {
    match cli.command {
        Command::Lattice { op } => lattice(op)?,
        Command::Quantize { observable, hbar, window, out } => quantize(&observable, hbar, window, &out)?,
        Command::Check(a) => check(a)?,
        Command::Flow { potential, q, p, t, steps, samples, out } => {
            let v = config::load_potential(&potential)?;
            let x0 = PhasePoint::new(q, p).map_err(|e| CliError::input("--q/--p", e.to_string()))?;
            let cfg = FlowConfig::new(steps)?;
            let samples = samples.max(1);
            let mut header = vec!["t".to_string()];
            header.extend((0..x0.dim()).map(|i| format!("q{i}")));
            header.extend((0..x0.dim()).map(|i| format!("p{i}")));
            header.push("energy".into());
            let mut rows = Vec::new();
            for j in 0..=samples {
                let tj = t * j as f64 / samples as f64;
                let steps_j = (steps * j).div_ceil(samples).max(1);
                let x = flow(&x0, &v, tj, &FlowConfig { steps: steps_j, ..cfg })?;
                let mut r = vec![float(tj)];
                r.extend(x.q().iter().chain(x.p()).map(|&c| float(c)));
                r.push(float(energy(&x, &v)));
                rows.push(r);
            }
            let header: Vec<&str> = header.iter().map(String::as_str).collect();
            write_csv(&out, &header, rows)?;
        }
        Command::Moderemoval { potential, k, q0, s_grid, steps, out } => {
            let v = config::load_potential(&potential)?;
            let sweep = mode_removal_sweep(&q0, &v, &k, &s_grid, &FlowConfig::new(steps)?)?;
            let rows = sweep.iter().map(|r| vec![float(r.s), float(r.gap), float(r.gap_times_s)]);
            write_csv(&out, &["s", "gap", "gap_times_s"], rows)?;
        }
        Command::Fejer { n, power, cutoff, orders, points, out } => {
            let rule = power_decay(power);
            let r = CoeffRule { n, cutoff, rule: &rule };
            let v = r.potential()?;
            let mut rows = Vec::new();
            for m in orders {
                rows.push(vec![m.to_string(), float(sup_grad_gap(&fejer_smooth(&r, m)?, &v, points)?)]);
            }
            write_csv(&out, &["m", "sup_grad_gap"], rows)?;
        }
        Command::Dyson { potential, t, hbar, window, order, scheme, no_residual, out } => {
            let v = config::load_potential(&potential)?;
            let quad = match scheme {
                Scheme::Gl => DysonQuadrature::default(),
                Scheme::Qmc => DysonQuadrature::QuasiMonteCarlo { points: 4096, shifts: 8, seed: 0 },
            };
            let w = FourierWindow::new(v.dim(), window)?;
            let (_, report) = if no_residual {
                dyson_partial_sum(&v, t, hb(hbar)?, w, order, quad)?
            } else {
                dyson_with_residual(&v, t, hb(hbar)?, w, order, quad)?
            };
            write_json(&out, &report)?;
        }
        Command::Run { config } => return run(&config),
        Command::List => {
            for e in experiments::REGISTRY {
                println!("{:<18} {}", e.name, e.anchor);
            }
        }
    }
    Ok(true)
}

fn configure_threads() {
    if let Some(n) = std::env::var("CYLQ_THREADS").ok().and_then(|s| s.parse::<usize>().ok()).filter(|&n| n > 0) {
        // Fails only if a pool already exists, which cannot happen this early.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    configure_threads();
    match dispatch(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
