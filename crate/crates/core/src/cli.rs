//! The `epot` command line: evaluation, verification, convergence and
//! modulus studies driven by a run configuration.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, Mutex};

use clap::{Parser, Subcommand};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::{ConfigError, RunConfig, DEFAULT_CONFIG};
use crate::fundsol::{FundamentalSolution, Kind};
use crate::geometry::Location;
use crate::linalg;
use crate::potentials::{GradientKernel, PotentialField, Side};
use crate::schauder::{canonical_pairing_j, extension_pairing_e, integral_functional_i, Component, NegativeExponentDensity};
use crate::verify::{self, Bound, MaximalBoundExpectation, Rate, TransmissionDensity, TwoPointKernel, VerificationReport};

/// Exit status of a run whose checks all passed.
pub const EXIT_PASS: i32 = 0;
/// Exit status when at least one check failed; the report is still written.
pub const EXIT_FAIL: i32 = 1;
/// Exit status for configuration, input and construction errors.
pub const EXIT_ERROR: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "epot", version, about = "Volume and layer potentials of constant-coefficient elliptic operators")]
pub struct Cli {
    /// Run configuration (`section.key = value` lines); a Laplace-disk run when omitted
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory for the CSV report
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads
    #[arg(long, global = true, default_value_t = 1)]
    pub jobs: usize,
    /// Seed for sampled probe points
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Print build information and the default tolerances, then exit
    #[arg(long)]
    pub provenance: bool,
    #[command(subcommand)]
    pub command: Option<Command>,
}

#[derive(Subcommand, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    /// Evaluate potentials at the configured points
    Eval,
    /// Run the configured checks
    Verify,
    /// Quadrature convergence studies
    Converge,
    /// Modulus of continuity of second derivatives
    Modulus,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Eval => "eval",
            Command::Verify => "verify",
            Command::Converge => "converge",
            Command::Modulus => "modulus",
        }
    }
}

#[derive(Debug)]
enum Failure {
    Config(ConfigError),
    Run(String),
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Config(e) => write!(f, "{e}"),
            Failure::Run(m) => write!(f, "{m}"),
        }
    }
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::Config(e)
    }
}

impl From<crate::Error> for Failure {
    fn from(e: crate::Error) -> Self {
        Failure::Run(e.to_string())
    }
}

type Outcome<T> = std::result::Result<T, Failure>;

/// Build information and the default-tolerance table.
pub fn provenance() -> String {
    let mut s = String::new();
    s.push_str(&format!("epot {}\n", env!("CARGO_PKG_VERSION")));
    s.push_str(&format!("crate: {} {}\n", env!("CARGO_PKG_NAME"), env!("CARGO_PKG_VERSION")));
    s.push_str(&format!("profile: {}\n", if cfg!(debug_assertions) { "debug" } else { "release" }));
    s.push_str(&format!("target: {}-{}\n", std::env::consts::ARCH, std::env::consts::OS));
    s.push_str("default tolerances:\n");
    for (name, v) in verify::DEFAULT_TOLERANCES {
        s.push_str(&format!("  {name:<28} {v:e}\n"));
    }
    s
}

/// Parses `args` (program name first) and runs; returns the exit status.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { EXIT_PASS };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { write!(stderr, "{text}") } else { write!(stdout, "{text}") };
            return code;
        }
    };
    if cli.provenance {
        let _ = write!(stdout, "{}", provenance());
        return EXIT_PASS;
    }
    let Some(command) = cli.command else {
        let _ = writeln!(stderr, "error: a subcommand is required (eval, verify, converge, modulus)");
        return EXIT_ERROR;
    };
    match execute(&cli, command, stdout) {
        Ok(true) => EXIT_PASS,
        Ok(false) => EXIT_FAIL,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            EXIT_ERROR
        }
    }
}

fn load(cli: &Cli) -> Outcome<RunConfig> {
    match &cli.config {
        None => Ok(RunConfig::from_text(DEFAULT_CONFIG, Path::new("."))?),
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| ConfigError { line: None, message: format!("cannot read {}: {e}", path.display()) })?;
            let base = path.parent().unwrap_or(Path::new("."));
            Ok(RunConfig::from_text(&text, base)?)
        }
    }
}

fn execute(cli: &Cli, command: Command, stdout: &mut dyn Write) -> Outcome<bool> {
    let cfg = load(cli)?;
    let fs = cfg.fundamental_solution().map_err(ConfigError::from)?;
    let dir = cli.out.clone().or_else(|| cfg.output.clone()).unwrap_or_else(|| PathBuf::from("."));
    std::fs::create_dir_all(&dir).map_err(|e| Failure::Run(format!("cannot create {}: {e}", dir.display())))?;
    let path = dir.join(format!("{}.csv", command.name()));
    let io = |e: std::io::Error| Failure::Run(format!("cannot write {}: {e}", path.display()));
    if command == Command::Eval {
        let rows = eval_rows(&cfg, &fs)?;
        let file = std::fs::File::create(&path).map_err(io)?;
        let mut w = csv::Writer::from_writer(file);
        let csv_err = |e: csv::Error| Failure::Run(format!("cannot write {}: {e}", path.display()));
        w.write_record(EVAL_HEADER.split(',')).map_err(csv_err)?;
        for row in &rows {
            w.write_record(row).map_err(csv_err)?;
            writeln!(stdout, "{}", row.join(" ")).map_err(io)?;
        }
        w.flush().map_err(io)?;
        writeln!(stdout, "{} values written to {}", rows.len(), path.display()).map_err(io)?;
        return Ok(true);
    }
    let jobs = match command {
        Command::Verify => verify_jobs(&cfg)?,
        Command::Converge => converge_jobs(&cfg)?,
        Command::Modulus => vec![Job::Modulus],
        Command::Eval => unreachable!(),
    };
    let ctx = Context { cfg: &cfg, fs: &fs, seed: cli.seed };
    let reports = run_jobs(&ctx, &jobs, cli.jobs.max(1))?;
    let file = std::fs::File::create(&path).map_err(io)?;
    verify::write_reports(&reports, file).map_err(|e| Failure::Run(format!("cannot write {}: {e}", path.display())))?;
    let mut passed = 0;
    let mut total = 0;
    for r in &reports {
        writeln!(stdout, "{}", r.summary()).map_err(io)?;
        total += r.observed.iter().filter(|o| o.bound != Bound::None).count();
        passed += r.observed.iter().filter(|o| o.bound != Bound::None && o.pass).count();
    }
    writeln!(stdout, "{passed} of {total} checks passed; report written to {}", path.display()).map_err(io)?;
    Ok(reports.iter().all(|r| r.pass()))
}

/// Column order of the `eval` report.
pub const EVAL_HEADER: &str = "point,quantity,component,re,im";

fn fmt_point(x: &[f64]) -> String {
    x.iter().map(|v| format!("{v}")).collect::<Vec<_>>().join(" ")
}

fn eval_rows(cfg: &RunConfig, fs: &FundamentalSolution) -> Outcome<Vec<Vec<String>>> {
    let field = PotentialField::new(fs.clone(), cfg.domain.clone(), cfg.eval.n)?;
    let f = |y: &[f64]| cfg.density.at(y);
    let d = cfg.domain.dim();
    let mut rows = vec![];
    let mut push = |x: &[f64], q: &str, comp: String, v: Complex64| {
        rows.push(vec![fmt_point(x), q.to_string(), comp, format!("{:.12e}", v.re), format!("{:.12e}", v.im)]);
    };
    for x in &cfg.eval.points {
        for q in &cfg.eval.quantities {
            let fail = |e: crate::Error| Failure::Run(format!("{q} at ({}): {e}", fmt_point(x)));
            match q.as_str() {
                "potential" => push(x, q, "u".into(), field.volume_potential(&f, x).map_err(fail)?),
                "gradient" => {
                    for (j, g) in field.volume_potential_gradient(&f, x).map_err(fail)?.into_iter().enumerate() {
                        push(x, q, format!("d{}", j + 1), g);
                    }
                }
                "hessian" => {
                    let h = field.volume_potential_hessian(&f, x).map_err(fail)?;
                    for l in 0..d {
                        for j in 0..d {
                            push(x, q, format!("d{}{}", l + 1, j + 1), h[l][j]);
                        }
                    }
                }
                "single_layer" => {
                    let v = field.single_layer(&|y: &[f64], _: &[f64]| cfg.density.at(y), x).map_err(fail)?;
                    push(x, q, "v".into(), v);
                }
                other => return Err(Failure::Run(format!("unknown quantity {other}"))),
            }
        }
    }
    Ok(rows)
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Job {
    Check(&'static str),
    Converge(&'static str),
    Modulus,
}

fn verify_jobs(cfg: &RunConfig) -> Outcome<Vec<Job>> {
    let mut jobs = vec![];
    for name in &cfg.verify.checks {
        let check = crate::config::CHECKS.iter().find(|c| *c == name).copied().expect("validated at parse time");
        let needs_gradient = matches!(check, "derivative_recursion" | "integration_by_parts");
        if needs_gradient && cfg.density.gradient.is_none() {
            return Err(Failure::Config(ConfigError {
                line: None,
                message: format!("check {check} needs a density with a known gradient (a preset)"),
            }));
        }
        jobs.push(Job::Check(check));
    }
    Ok(jobs)
}

fn converge_jobs(cfg: &RunConfig) -> Outcome<Vec<Job>> {
    if cfg.converge.ns.len() < 2 || cfg.converge.ns.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Failure::Config(ConfigError { line: None, message: "converge.n must be an increasing list of two or more".into() }));
    }
    Ok(cfg
        .converge
        .targets
        .iter()
        .map(|t| Job::Converge(crate::config::CONVERGENCE_TARGETS.iter().find(|c| *c == t).copied().expect("validated")))
        .collect())
}

struct Context<'a> {
    cfg: &'a RunConfig,
    fs: &'a FundamentalSolution,
    seed: u64,
}

fn run_jobs(ctx: &Context<'_>, jobs: &[Job], threads: usize) -> Outcome<Vec<VerificationReport>> {
    let next = AtomicUsize::new(0);
    let results: Mutex<Vec<Option<Outcome<Vec<VerificationReport>>>>> = Mutex::new(jobs.iter().map(|_| None).collect());
    std::thread::scope(|s| {
        for _ in 0..threads.min(jobs.len()).max(1) {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::SeqCst);
                if i >= jobs.len() {
                    break;
                }
                let out = run_job(ctx, jobs[i]);
                results.lock().expect("result lock")[i] = Some(out);
            });
        }
    });
    let mut reports = vec![];
    for r in results.into_inner().expect("result lock") {
        reports.extend(r.expect("every job runs")?);
    }
    Ok(reports)
}

/// Interior points at least `margin` from the boundary, drawn from `seed`.
pub fn interior_points(domain: &crate::Domain, count: usize, margin: f64, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let c = domain.center().to_vec();
    let r = domain.bounding_radius() - linalg::norm(&linalg::to_vec3(&c));
    let mut out = vec![];
    let mut tries = 0;
    while out.len() < count && tries < 100_000 {
        tries += 1;
        let x: Vec<f64> = c.iter().map(|ci| ci + rng.gen_range(-r..r)).collect();
        if domain.locate(&x).ok() == Some(Location::Interior) && domain.project(&x).map(|p| p.distance >= margin).unwrap_or(false) {
            out.push(x);
        }
    }
    out
}

fn exterior_points(domain: &crate::Domain) -> Vec<Vec<f64>> {
    let c = domain.center();
    let r = 1.4 * domain.bounding_radius();
    let dirs: Vec<Vec<f64>> = if c.len() == 2 {
        vec![vec![0.8, 0.6], vec![-0.6, -0.8]]
    } else {
        vec![vec![0.48, 0.6, 0.64], vec![-0.6, 0.0, -0.8]]
    };
    dirs.iter().map(|u| c.iter().zip(u).map(|(ci, ui)| ci + r * ui).collect()).collect()
}

fn run_job(ctx: &Context<'_>, job: Job) -> Outcome<Vec<VerificationReport>> {
    match job {
        Job::Check(name) => run_check(ctx, name),
        Job::Converge(name) => run_convergence(ctx, name).map(|r| vec![r]),
        Job::Modulus => {
            let cfg = ctx.cfg;
            let field = PotentialField::new(ctx.fs.clone(), cfg.domain.clone(), cfg.modulus.n)?;
            let f = |y: &[f64]| cfg.density.at(y);
            let m = &cfg.modulus;
            let r = verify::modulus_experiment(
                &field,
                &f,
                &cfg.density.kinks,
                m.alpha,
                &m.scales,
                &m.points,
                m.tol,
                cfg.tolerance("modulus.ratio"),
            )?;
            Ok(vec![r])
        }
    }
}

fn zero() -> Component {
    Arc::new(|_: &[f64]| Complex64::new(0.0, 0.0))
}

fn run_check(ctx: &Context<'_>, name: &str) -> Outcome<Vec<VerificationReport>> {
    let cfg = ctx.cfg;
    let domain = &cfg.domain;
    let d = domain.dim();
    let extent = domain.bounding_radius() - linalg::norm(&linalg::to_vec3(domain.center()));
    let field = PotentialField::new(ctx.fs.clone(), domain.clone(), cfg.resolution(name))?;
    let f = |y: &[f64]| cfg.density.at(y);
    let phi = |y: &[f64]| cfg.density.at(y).re;
    let grad = |y: &[f64]| cfg.density.gradient.as_ref().expect("checked before scheduling")(y);
    let inner = interior_points(domain, 4, 0.25 * extent, ctx.seed);
    let outer = exterior_points(domain);
    let both: Vec<Vec<f64>> = inner.iter().chain(&outer).cloned().collect();
    let tol = |k: &str| cfg.tolerance(k);
    let offsets = [1e-2, 1e-3, 1e-4];
    let reports = match name {
        "pde_identity" => vec![verify::check_pde_identity(
            &field,
            &f,
            &both,
            cfg.verify.h,
            tol("pde_identity.interior"),
            tol("pde_identity.exterior"),
        )?],
        "transmission" => vec![verify::check_transmission(&field, TransmissionDensity::Volume(&f), 16, &offsets, tol("transmission"))?],
        "single_layer_transmission" => {
            let mu = |y: &[f64], _: &[f64]| cfg.density.at(y);
            vec![verify::check_transmission(
                &field,
                TransmissionDensity::SingleLayer(&mu),
                16,
                &offsets,
                tol("single_layer_transmission"),
            )?]
        }
        "derivative_recursion" => vec![verify::check_derivative_recursion(&field, phi, grad, &both, tol("derivative_recursion"))?],
        "integration_by_parts" => {
            let k = TwoPointKernel::gradient(ctx.fs, 0);
            let expected = (ctx.fs.kind() == Kind::Laplace).then(|| (1.0 / d as f64, tol("integration_by_parts.psi")));
            vec![verify::check_integration_by_parts(
                &k,
                domain,
                phi,
                grad,
                &inner[0],
                0,
                &verify::DEFAULT_EPSILONS,
                cfg.resolution(name),
                tol("integration_by_parts"),
                expected,
            )?]
        }
        "maximal_bound" => {
            let rhos = verify::DEFAULT_EPSILONS;
            let n = cfg.resolution(name);
            let even = move |z: &[f64]| {
                let r2 = linalg::norm(&linalg::to_vec3(z)).powi(2);
                (z[0] * z[0] - z[1] * z[1]) / r2.powf(1.0 + d as f64 / 2.0)
            };
            let growing = move |z: &[f64]| linalg::norm(&linalg::to_vec3(z)).powi(-(d as i32));
            let mut a = verify::check_maximal_bound(even, domain, &inner, &rhos, n, MaximalBoundExpectation::Bounded(tol("maximal_bound.variation")))?;
            a.param("kernel", "zero_mean");
            let rate = tol("maximal_bound.growth") * crate::fundsol::sphere_measure(d) * std::f64::consts::LN_10;
            let mut b = verify::check_maximal_bound(growing, domain, &inner, &rhos, n, MaximalBoundExpectation::Growing(rate))?;
            b.param("kernel", "nonzero_mean");
            vec![a, b]
        }
        "hessian" => vec![hessian_check(ctx, &field, &inner)?],
        "subtraction" => vec![subtraction_check(ctx, &field)?],
        "negative_exponent" => vec![negative_exponent_check(ctx, &field, &both)?],
        "pairings" => vec![pairings_check(ctx, cfg.resolution(name))?],
        other => return Err(Failure::Run(format!("unknown check {other}"))),
    };
    Ok(reports)
}

fn hessian_check(ctx: &Context<'_>, field: &PotentialField, xs: &[Vec<f64>]) -> Outcome<VerificationReport> {
    let cfg = ctx.cfg;
    let d = cfg.domain.dim();
    let f = |y: &[f64]| cfg.density.at(y);
    let op = ctx.fs.operator();
    let mut r = VerificationReport::new("hessian");
    r.param("kind", ctx.fs.kind().name()).param("domain", cfg.domain.kind_name()).param("N", field.resolution());
    let scale = xs.iter().map(|x| f(x).norm()).fold(f64::MIN_POSITIVE, f64::max);
    let (mut asym, mut residual) = (0.0f64, 0.0f64);
    for x in xs {
        let h = field.volume_potential_hessian(&f, x)?;
        let g = field.volume_potential_gradient(&f, x)?;
        let u = field.volume_potential(&f, x)?;
        let mut lu = op.a0() * u;
        for l in 0..d {
            lu += op.a1()[l] * g[l];
            for j in 0..d {
                lu += op.a2(l, j) * h[l][j];
                asym = asym.max((h[l][j] - h[j][l]).norm());
            }
        }
        residual = residual.max((lu - f(x)).norm() / scale);
    }
    r.observe("max_asymmetry", asym, Bound::AtMost(cfg.tolerance("hessian.symmetry")))
        .observe("operator_residual", residual, Bound::AtMost(cfg.tolerance("hessian")));
    Ok(r)
}

fn subtraction_check(ctx: &Context<'_>, field: &PotentialField) -> Outcome<VerificationReport> {
    let cfg = ctx.cfg;
    let d = cfg.domain.dim();
    let Some(radius) = cfg.domain.radius() else {
        return Err(Failure::Config(ConfigError { line: None, message: "check subtraction needs a ball domain".into() }));
    };
    let c = cfg.domain.center().to_vec();
    let k = GradientKernel::laplace(d, 0)?;
    let c0 = c[0];
    let psi = move |y: &[f64]| (y[0] - c0) * (y[0] - c0);
    let v = field.subtracted_integral_g(&k, &psi, 0, &c)?;
    let exact = if d == 2 { -0.125 } else { -2.0 / 15.0 } * radius * radius;
    let mut r = VerificationReport::new("subtraction");
    r.param("domain", cfg.domain.kind_name()).param("N", field.resolution());
    r.observe("value", v.re, Bound::None).observe("error", (v - exact).norm(), Bound::AtMost(cfg.tolerance("subtraction")));
    Ok(r)
}

fn negative_exponent_check(ctx: &Context<'_>, field: &PotentialField, xs: &[Vec<f64>]) -> Outcome<VerificationReport> {
    let cfg = ctx.cfg;
    let d = cfg.domain.dim();
    let c0 = cfg.domain.center()[0];
    let mut comps = vec![zero(); d + 1];
    comps[1] = Arc::new(move |y: &[f64]| Complex64::new(y[0] - c0, 0.0));
    let nd = NegativeExponentDensity::new(&cfg.domain, comps, 1.0)?;
    let one = |_: &[f64]| 1.0;
    let mut worst: f64 = 0.0;
    for x in xs {
        let a = field.volume_potential_negative(&nd, x)?;
        let b = field.volume_potential(&one, x)?;
        worst = worst.max((a - b).norm());
    }
    let mut r = VerificationReport::new("negative_exponent");
    r.param("domain", cfg.domain.kind_name()).param("N", field.resolution()).param("points", xs.len());
    r.observe("max_difference", worst, Bound::AtMost(cfg.tolerance("negative_exponent")));
    Ok(r)
}

fn pairings_check(ctx: &Context<'_>, n: usize) -> Outcome<VerificationReport> {
    let cfg = ctx.cfg;
    let domain = &cfg.domain;
    let d = domain.dim();
    let c0 = domain.center()[0];
    let mut comps = vec![zero(); d + 1];
    comps[1] = Arc::new(move |y: &[f64]| Complex64::new(y[0] - c0, 0.0));
    let derivative_form = NegativeExponentDensity::new(domain, comps, 1.0)?;
    let mut comps = vec![zero(); d + 1];
    comps[0] = Arc::new(|_: &[f64]| Complex64::new(1.0, 0.0));
    let classical = NegativeExponentDensity::new(domain, comps, 1.0)?;
    let i_gap = (integral_functional_i(domain, &derivative_form, n)? - integral_functional_i(domain, &classical, n)?).norm();
    let v = |y: &[f64]| (y[0] + 0.5 * y[1]).sin();
    let grad_v = |y: &[f64]| {
        let c = (y[0] + 0.5 * y[1]).cos();
        let mut g = vec![0.0; y.len()];
        g[0] = c;
        g[1] = 0.5 * c;
        g
    };
    let e = extension_pairing_e(domain, &derivative_form, v, grad_v, n)?;
    let j = canonical_pairing_j(domain, |_: &[f64]| 1.0, v, n);
    let scale = canonical_pairing_j(domain, |_: &[f64]| 1.0, |_: &[f64]| 1.0, n).norm();
    let mut r = VerificationReport::new("pairings");
    r.param("domain", domain.kind_name()).param("N", n);
    r.observe("functional_gap", i_gap / scale, Bound::AtMost(cfg.tolerance("pairings")))
        .observe("extension_minus_canonical", (e - j).norm() / scale, Bound::AtMost(cfg.tolerance("pairings")));
    Ok(r)
}

/// Closed-form `f = 1` potential of the Laplace operator on a ball.
fn ball_reference(ctx: &Context<'_>, x: &[f64]) -> Option<Complex64> {
    let cfg = ctx.cfg;
    if ctx.fs.kind() != Kind::Laplace || cfg.density.name != "one" {
        return None;
    }
    let radius = cfg.domain.radius()?;
    let c = cfg.domain.center();
    let r = x.iter().zip(c).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
    let v = match (cfg.domain.dim(), r < radius) {
        (2, true) => (r * r - radius * radius) / 4.0 + radius * radius / 2.0 * radius.ln(),
        (2, false) => radius * radius / 2.0 * r.ln(),
        (_, true) => (r * r - 3.0 * radius * radius) / 6.0,
        (_, false) => -radius.powi(3) / (3.0 * r),
    };
    Some(Complex64::new(v, 0.0))
}

fn run_convergence(ctx: &Context<'_>, target: &str) -> Outcome<VerificationReport> {
    let cfg = ctx.cfg;
    let domain = &cfg.domain;
    let base = PotentialField::new(ctx.fs.clone(), domain.clone(), cfg.converge.ns[0])?;
    let ns = &cfg.converge.ns;
    let spectral = Rate::Ratio(cfg.tolerance("convergence.ratio"));
    let floor = 1e-10;
    let r = match target {
        "volume_potential" => {
            let x = cfg.eval.points[0].clone();
            let f = |y: &[f64]| cfg.density.at(y);
            let reference = ball_reference(ctx, &x);
            let mut r = verify::convergence_study(target, |n| base.with_resolution(n)?.volume_potential(&f, &x), reference, ns, spectral, floor)?;
            r.param("x", fmt_point(&x)).param("reference", if reference.is_some() { "closed_form" } else { "refined" });
            r
        }
        "single_layer_on_surface" => {
            let (y, _, _) = domain.boundary_point([0.3, 0.7]);
            let y = y[..domain.dim()].to_vec();
            let mu = |z: &[f64], _: &[f64]| cfg.density.at(z);
            let mut r = verify::convergence_study(
                target,
                |n| base.with_resolution(n)?.single_layer(&mu, &y),
                None,
                ns,
                Rate::Order(cfg.tolerance("convergence.order")),
                floor,
            )?;
            r.param("x", fmt_point(&y)).param("reference", "refined");
            r
        }
        "boundary_kernel" => {
            let x = domain.center().to_vec();
            let k = GradientKernel::new(ctx.fs, 0)?;
            let mu = |z: &[f64], _: &[f64]| cfg.density.at(z);
            let side = if domain.locate(&x)? == Location::Interior { Side::Interior } else { Side::Exterior };
            let mut r = verify::convergence_study(
                target,
                |n| base.with_resolution(n)?.boundary_kernel(&k, &mu, &x, side),
                None,
                ns,
                spectral,
                floor,
            )?;
            r.param("x", fmt_point(&x)).param("reference", "refined");
            r
        }
        other => return Err(Failure::Run(format!("unknown convergence target {other}"))),
    };
    Ok(r)
}
