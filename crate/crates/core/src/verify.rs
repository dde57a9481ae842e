//! Executable checks of the potential-theoretic identities, each returning a
//! report of labelled observations against tolerances.

use std::fmt::Write as _;
use std::sync::Arc;
use std::time::Instant;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fundsol::FundamentalSolution;
use crate::geometry::{Domain, Location};
use crate::linalg;
use crate::potentials::{BoundaryDensity, Density, PotentialField};
use crate::schauder::{holder_seminorm, Modulus, NegativeExponentDensity};

/// Acceptance rule attached to an observed value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Bound {
    /// informational only
    None,
    AtMost(f64),
    AtLeast(f64),
}

impl Bound {
    fn accepts(&self, v: f64) -> bool {
        match *self {
            Bound::None => true,
            Bound::AtMost(t) => v <= t,
            Bound::AtLeast(t) => v >= t,
        }
    }

    fn csv(&self) -> String {
        match *self {
            Bound::None => String::new(),
            Bound::AtMost(t) => format!("{t:e}"),
            Bound::AtLeast(t) => format!(">={t:e}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Observation {
    pub label: String,
    pub value: f64,
    pub bound: Bound,
    pub pass: bool,
}

/// Outcome of one check.
#[derive(Debug, Clone)]
pub struct VerificationReport {
    pub name: String,
    pub parameters: Vec<(String, String)>,
    pub observed: Vec<Observation>,
    pub runtime: f64,
}

impl VerificationReport {
    pub fn new(name: &str) -> Self {
        Self { name: name.to_string(), parameters: vec![], observed: vec![], runtime: 0.0 }
    }

    pub fn param(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.parameters.push((key.to_string(), value.to_string()));
        self
    }

    /// Records `value`; non-finite values never pass a bound.
    pub fn observe(&mut self, label: impl Into<String>, value: f64, bound: Bound) -> &mut Self {
        let pass = bound.accepts(value) && (value.is_finite() || bound == Bound::None);
        self.observed.push(Observation { label: label.into(), value, bound, pass });
        self
    }

    pub fn pass(&self) -> bool {
        self.observed.iter().all(|o| o.pass)
    }

    /// Value of the first observation with this label.
    pub fn value(&self, label: &str) -> Option<f64> {
        self.observed.iter().find(|o| o.label == label).map(|o| o.value)
    }

    fn param_field(&self) -> String {
        self.parameters.iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>().join(";")
    }

    /// CSV header shared by all reports.
    pub const CSV_HEADER: &'static str = "check,param,label,value,tolerance,pass";

    /// Rows `check,param,label,value,tolerance,pass`, without header. Runtime
    /// is left out so that reruns produce identical bytes.
    pub fn write_csv<W: std::io::Write>(&self, w: &mut csv::Writer<W>) -> csv::Result<()> {
        let param = self.param_field();
        for o in &self.observed {
            w.write_record([
                self.name.as_str(),
                param.as_str(),
                o.label.as_str(),
                &format!("{:.12e}", o.value),
                &o.bound.csv(),
                if o.pass { "true" } else { "false" },
            ])?;
        }
        Ok(())
    }

    /// One line per report: name, verdict and the failing labels.
    pub fn summary(&self) -> String {
        let mut s = format!("{} {}", if self.pass() { "PASS" } else { "FAIL" }, self.name);
        let failing: Vec<&str> = self.observed.iter().filter(|o| !o.pass).map(|o| o.label.as_str()).collect();
        if !failing.is_empty() {
            let _ = write!(s, " (failing: {})", failing.join(", "));
        }
        s
    }
}

/// Writes reports as one CSV table with header.
pub fn write_reports<W: std::io::Write>(reports: &[VerificationReport], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(VerificationReport::CSV_HEADER.split(','))?;
    for r in reports {
        r.write_csv(&mut w)?;
    }
    w.flush()?;
    Ok(())
}

fn timed<F: FnOnce(&mut VerificationReport) -> Result<()>>(name: &str, f: F) -> Result<VerificationReport> {
    let start = Instant::now();
    let mut r = VerificationReport::new(name);
    f(&mut r)?;
    r.runtime = start.elapsed().as_secs_f64();
    Ok(r)
}

fn fmt_point(x: &[f64]) -> String {
    let parts: Vec<String> = x.iter().map(|v| format!("{v}")).collect();
    format!("({})", parts.join(" "))
}

/// Value at `0` of the polynomial through `(eps_k, v_k)` (Neville).
pub fn extrapolate_to_zero(eps: &[f64], values: &[Complex64]) -> Complex64 {
    let mut p = values.to_vec();
    let n = p.len();
    for m in 1..n {
        for i in 0..n - m {
            let (a, b) = (eps[i], eps[i + m]);
            p[i] = (p[i + 1] * a - p[i] * b) / (a - b);
        }
    }
    p[0]
}

fn sup_density<D: Density + ?Sized>(domain: &Domain, f: &D, extra: &[Vec<f64>]) -> f64 {
    let d = domain.dim();
    let q = domain.volume_rule(16);
    let mut s = q.nodes.iter().map(|y| f.at(&y[..d]).norm()).fold(0.0, f64::max);
    for x in extra {
        if domain.contains(x) {
            s = s.max(f.at(x).norm());
        }
    }
    s
}

/// FD residual of `P[a, D] P[f] = f` inside and `P[a, D] P[f] = 0` outside,
/// relative to `sup |f|`.
pub fn check_pde_identity<D: Density + ?Sized>(
    field: &PotentialField,
    f: &D,
    grid: &[Vec<f64>],
    h: f64,
    tol_interior: f64,
    tol_exterior: f64,
) -> Result<VerificationReport> {
    let domain = field.domain();
    for x in grid {
        if domain.project(x)?.distance < 5.0 * h {
            return Err(Error::NearBoundary(x.clone()));
        }
    }
    timed("pde_identity", |r| {
        r.param("kind", field.fundamental_solution().kind().name())
            .param("domain", domain.kind_name())
            .param("N", field.resolution())
            .param("h", h);
        let op = field.fundamental_solution().operator();
        let scale = sup_density(domain, f, grid).max(f64::MIN_POSITIVE);
        let (mut inner, mut outer) = (None::<f64>, None::<f64>);
        for x in grid {
            let inside = domain.locate(x)? == Location::Interior;
            let lu = op.apply_fd(|y: &[f64]| field.volume_potential(f, y).unwrap_or(Complex64::new(f64::NAN, 0.0)), x, h);
            let target = if inside { f.at(x) } else { Complex64::new(0.0, 0.0) };
            let res = (lu - target).norm() / scale;
            let slot = if inside { &mut inner } else { &mut outer };
            *slot = Some(slot.map_or(res, |m: f64| m.max(res)));
        }
        if let Some(v) = inner {
            r.observe("interior_residual", v, Bound::AtMost(tol_interior));
        }
        if let Some(v) = outer {
            r.observe("exterior_residual", v, Bound::AtMost(tol_exterior));
        }
        Ok(())
    })
}

/// Density whose potential is tested for continuity across the boundary.
pub enum TransmissionDensity<'a> {
    Volume(&'a dyn Density),
    Negative(&'a NegativeExponentDensity),
    SingleLayer(&'a dyn BoundaryDensity),
}

/// Largest gap between the one-sided limits on `samples` boundary points; each
/// limit is extrapolated from the normal offsets `offsets`.
pub fn check_transmission(
    field: &PotentialField,
    density: TransmissionDensity<'_>,
    samples: usize,
    offsets: &[f64],
    tol: f64,
) -> Result<VerificationReport> {
    let domain = field.domain();
    if offsets.len() < 2 {
        return Err(Error::InvalidArgument("at least two offsets are required".into()));
    }
    let name = match density {
        TransmissionDensity::Volume(_) => "transmission_volume",
        TransmissionDensity::Negative(_) => "transmission_negative",
        TransmissionDensity::SingleLayer(_) => "transmission_single_layer",
    };
    timed(name, |r| {
        r.param("kind", field.fundamental_solution().kind().name())
            .param("domain", domain.kind_name())
            .param("N", field.resolution())
            .param("samples", samples);
        let d = domain.dim();
        let eval = |x: &[f64]| -> Result<Complex64> {
            match density {
                TransmissionDensity::Volume(f) => field.volume_potential(f, x),
                TransmissionDensity::Negative(nd) => field.volume_potential_negative(nd, x),
                TransmissionDensity::SingleLayer(phi) => field.single_layer(phi, x),
            }
        };
        let params: Vec<[f64; 2]> = if d == 2 {
            (0..samples).map(|k| [2.0 * std::f64::consts::PI * (k as f64 + 0.25) / samples as f64, 0.0]).collect()
        } else {
            // golden-angle spiral on the sphere
            let ga = std::f64::consts::PI * (3.0 - 5f64.sqrt());
            (0..samples)
                .map(|k| {
                    let z = 1.0 - 2.0 * (k as f64 + 0.5) / samples as f64;
                    [z.acos(), ga * k as f64]
                })
                .collect()
        };
        let mut worst: f64 = 0.0;
        for p in params {
            let (y, nu, _) = domain.boundary_point(p);
            let mut inner = vec![];
            let mut outer = vec![];
            for &e in offsets {
                inner.push(eval(&linalg::axpy(&y, -e, &nu)[..d])?);
                outer.push(eval(&linalg::axpy(&y, e, &nu)[..d])?);
            }
            let gap = (extrapolate_to_zero(offsets, &inner) - extrapolate_to_zero(offsets, &outer)).norm();
            worst = worst.max(gap);
        }
        r.observe("max_jump", worst, Bound::AtMost(tol));
        Ok(())
    })
}

/// A kernel `K(x, y)` with its `y`-gradient and singularity order `s`
/// (`|K| <= c |x - y|^{-s}`).
/// Two-point kernel value `(x, y)`.
pub type PairFn = Arc<dyn Fn(&[f64], &[f64]) -> f64 + Send + Sync>;
/// Gradient in `y` of a two-point kernel.
pub type PairGradientFn = Arc<dyn Fn(&[f64], &[f64]) -> Vec<f64> + Send + Sync>;

#[derive(Clone)]
pub struct TwoPointKernel {
    pub name: String,
    pub dim: usize,
    pub order: f64,
    value: PairFn,
    grad_y: PairGradientFn,
}

impl TwoPointKernel {
    pub fn new(
        name: &str,
        dim: usize,
        order: f64,
        value: PairFn,
        grad_y: PairGradientFn,
    ) -> Self {
        Self { name: name.to_string(), dim, order, value, grad_y }
    }

    /// `S_a(x - y)`; order `n - 2` in 3D and any `s` in `(0, 1)` in 2D.
    pub fn fundamental(fs: &FundamentalSolution) -> Self {
        let n = fs.dim();
        let (a, b) = (fs.clone(), fs.clone());
        Self::new(
            &format!("S[{}]", fs.kind().name()),
            n,
            if n == 2 { 0.5 } else { 1.0 },
            Arc::new(move |x, y| a.value(&linalg::sub(&linalg::to_vec3(x), &linalg::to_vec3(y)))),
            Arc::new(move |x, y| {
                let g = b.gradient(&linalg::sub(&linalg::to_vec3(x), &linalg::to_vec3(y)));
                (0..n).map(|k| -g[k]).collect()
            }),
        )
    }

    /// `d_j S_a(x - y)`, order `n - 1`.
    pub fn gradient(fs: &FundamentalSolution, j: usize) -> Self {
        let n = fs.dim();
        let (a, b) = (fs.clone(), fs.clone());
        Self::new(
            &format!("dS[{}]/dx{}", fs.kind().name(), j + 1),
            n,
            (n - 1) as f64,
            Arc::new(move |x, y| a.gradient(&linalg::sub(&linalg::to_vec3(x), &linalg::to_vec3(y)))[j]),
            Arc::new(move |x, y| {
                let h = b.hessian(&linalg::sub(&linalg::to_vec3(x), &linalg::to_vec3(y)));
                (0..n).map(|k| -h[j][k]).collect()
            }),
        )
    }

    pub fn value(&self, x: &[f64], y: &[f64]) -> f64 {
        (self.value)(x, y)
    }

    pub fn grad_y(&self, x: &[f64], y: &[f64]) -> Vec<f64> {
        (self.grad_y)(x, y)
    }
}

/// Default radii for the excluded balls of the integration-by-parts check.
pub const DEFAULT_EPSILONS: [f64; 4] = [1e-1, 1e-2, 1e-3, 1e-4];

/// Default tolerances by name; runs may override any of them.
pub const DEFAULT_TOLERANCES: [(&str, f64); 17] = [
    ("pde_identity.interior", 1e-3),
    ("pde_identity.exterior", 1e-6),
    ("transmission", 1e-4),
    ("single_layer_transmission", 1e-8),
    ("derivative_recursion", 1e-5),
    ("integration_by_parts", 1e-4),
    ("integration_by_parts.psi", 1e-3),
    ("maximal_bound.variation", 0.1),
    // fraction of |S^{n-1}| ln 10 per decade of rho
    ("maximal_bound.growth", 0.9),
    ("hessian", 1e-5),
    ("hessian.symmetry", 1e-6),
    ("subtraction", 1e-6),
    ("negative_exponent", 1e-6),
    ("pairings", 1e-8),
    ("modulus.ratio", 5.0),
    ("convergence.order", 3.0),
    ("convergence.ratio", 10.0),
];

/// Default tolerance of a named check; panics on unknown names.
pub fn default_tolerance(name: &str) -> f64 {
    DEFAULT_TOLERANCES
        .iter()
        .find(|(k, _)| *k == name)
        .map(|(_, v)| *v)
        .unwrap_or_else(|| panic!("no default tolerance named {name}"))
}

/// `Psi_j(eps) = -int_{|y - x| = eps} K(x, y) (y - x)_j / eps dsigma_y`.
fn sphere_residue(k: &TwoPointKernel, x: &[f64], j: usize, eps: f64) -> Result<f64> {
    let ball = Domain::ball(x, eps)?;
    let q = ball.boundary_rule(if k.dim == 2 { 256 } else { 32 });
    let d = k.dim;
    Ok(-q
        .nodes
        .iter()
        .zip(&q.normals)
        .zip(&q.weights)
        .map(|((y, xi), w)| w * k.value(x, &y[..d]) * xi[j])
        .sum::<f64>())
}

/// Integration by parts on `Omega \ B(x, eps)` as `eps -> 0`:
/// `pv int d_{y_j} K phi = -int K d_j phi + int_{dOmega} K phi nu_j + phi(x) Psi_j`.
#[allow(clippy::too_many_arguments)]
pub fn check_integration_by_parts<P, G>(
    k: &TwoPointKernel,
    domain: &Domain,
    phi: P,
    grad_phi: G,
    x: &[f64],
    j: usize,
    epsilons: &[f64],
    n: usize,
    tol: f64,
    expected_psi: Option<(f64, f64)>,
) -> Result<VerificationReport>
where
    P: Fn(&[f64]) -> f64,
    G: Fn(&[f64]) -> Vec<f64>,
{
    let d = domain.dim();
    if k.dim != d {
        return Err(Error::DimensionMismatch { expected: d, got: k.dim });
    }
    if domain.locate(x)? != Location::Interior {
        return Err(Error::NotInterior(x.to_vec()));
    }
    if epsilons.len() < 2 {
        return Err(Error::InvalidArgument("at least two radii are required".into()));
    }
    timed("integration_by_parts", |r| {
        r.param("kernel", &k.name).param("x", fmt_point(x)).param("j", j + 1).param("N", n);
        let mut lhs = vec![];
        let mut psi = vec![];
        for &e in epsilons {
            let q = domain.polar_rule(x, n, e)?;
            let v: f64 = q.nodes.iter().zip(&q.weights).map(|(y, w)| w * k.grad_y(x, &y[..d])[j] * phi(&y[..d])).sum();
            lhs.push(Complex64::new(v, 0.0));
            psi.push(Complex64::new(sphere_residue(k, x, j, e)?, 0.0));
        }
        let lhs0 = extrapolate_to_zero(epsilons, &lhs).re;
        let psi0 = extrapolate_to_zero(epsilons, &psi).re;
        // the excluded-ball sequence must settle
        let steps: Vec<f64> = lhs.windows(2).map(|w| (w[1] - w[0]).norm()).collect();
        let settled = steps.last().copied().unwrap_or(0.0) <= steps[0].max(tol);
        let q = domain.polar_rule(x, n, 0.0)?;
        let volume: f64 = q.nodes.iter().zip(&q.weights).map(|(y, w)| w * k.value(x, &y[..d]) * grad_phi(&y[..d])[j]).sum();
        let b = domain.target_boundary_rule(x, if d == 2 { 2 * n } else { n })?;
        let boundary: f64 = b
            .nodes
            .iter()
            .zip(&b.normals)
            .zip(&b.weights)
            .map(|((y, nu), w)| w * k.value(x, &y[..d]) * phi(&y[..d]) * nu[j])
            .sum();
        let rhs = -volume + boundary + phi(x) * psi0;
        r.observe("lhs", lhs0, Bound::None)
            .observe("rhs", rhs, Bound::None)
            .observe("psi", psi0, Bound::None)
            .observe("converged", if settled { 1.0 } else { 0.0 }, Bound::AtLeast(1.0))
            .observe("lhs_minus_rhs", (lhs0 - rhs).abs(), Bound::AtMost(tol));
        if k.order < (d - 1) as f64 {
            r.observe("abs_psi", psi0.abs(), Bound::AtMost(tol));
        }
        if let Some((want, t)) = expected_psi {
            r.observe("psi_error", (psi0 - want).abs(), Bound::AtMost(t));
        }
        Ok(())
    })
}

/// How the truncated integrals of a degree `-n` kernel should behave as the
/// excluded radius shrinks.
#[derive(Debug, Clone, Copy)]
pub enum MaximalBoundExpectation {
    /// relative variation of the sup over the radii at most the given value
    Bounded(f64),
    /// growth of the sup per decade of radius at least the given value
    Growing(f64),
}

/// `sup_x |int_{Omega \ B(x, rho)} k(x - y) dy|` over a radius grid.
pub fn check_maximal_bound<K>(
    k: K,
    domain: &Domain,
    xs: &[Vec<f64>],
    rhos: &[f64],
    n: usize,
    expect: MaximalBoundExpectation,
) -> Result<VerificationReport>
where
    K: Fn(&[f64]) -> f64,
{
    let d = domain.dim();
    timed("maximal_bound", |r| {
        r.param("domain", domain.kind_name()).param("points", xs.len()).param("N", n);
        let mut sups = vec![];
        for &rho in rhos {
            let mut s: f64 = 0.0;
            for x in xs {
                let xv = linalg::to_vec3(x);
                let q = domain.polar_rule(x, n, rho)?;
                let v: f64 = q.nodes.iter().zip(&q.weights).map(|(y, w)| w * k(&linalg::sub(&xv, y)[..d])).sum();
                s = s.max(v.abs());
            }
            r.observe(format!("sup@rho={rho:e}"), s, Bound::None);
            sups.push(s);
        }
        match expect {
            MaximalBoundExpectation::Bounded(t) => {
                let hi = sups.iter().cloned().fold(0.0, f64::max);
                let lo = sups.iter().cloned().fold(f64::INFINITY, f64::min);
                // integrals cancelling to round-off are trivially bounded
                let variation = if hi > 1e-10 { (hi - lo) / hi } else { 0.0 };
                r.observe("relative_variation", variation, Bound::AtMost(t));
            }
            MaximalBoundExpectation::Growing(t) => {
                let mut growth = f64::INFINITY;
                for (w, s) in rhos.windows(2).zip(sups.windows(2)) {
                    let decades = (w[0] / w[1]).log10();
                    growth = growth.min((s[1] - s[0]) / decades);
                }
                r.observe("min_growth_per_decade", growth, Bound::AtLeast(t));
            }
        }
        Ok(())
    })
}

/// `max_{x, j} |d_j P[phi](x) - (P[d_j phi](x) - v[nu_j phi](x))|` over a grid.
pub fn check_derivative_recursion<P, G>(
    field: &PotentialField,
    phi: P,
    grad_phi: G,
    grid: &[Vec<f64>],
    tol: f64,
) -> Result<VerificationReport>
where
    P: Fn(&[f64]) -> f64,
    G: Fn(&[f64]) -> Vec<f64>,
{
    let domain = field.domain();
    timed("derivative_recursion", |r| {
        r.param("kind", field.fundamental_solution().kind().name())
            .param("domain", domain.kind_name())
            .param("N", field.resolution())
            .param("points", grid.len());
        let (mut inner, mut outer) = (None::<f64>, None::<f64>);
        for x in grid {
            let grad = field.volume_potential_gradient(&|y: &[f64]| phi(y), x)?;
            let mut worst: f64 = 0.0;
            for (j, gj) in grad.iter().enumerate() {
                let vol = field.volume_potential(&|y: &[f64]| grad_phi(y)[j], x)?;
                let layer = field.single_layer(&|y: &[f64], nu: &[f64]| nu[j] * phi(y), x)?;
                worst = worst.max((gj - (vol - layer)).norm());
            }
            let slot = if domain.locate(x)? == Location::Interior { &mut inner } else { &mut outer };
            *slot = Some(slot.map_or(worst, |m: f64| m.max(worst)));
        }
        if let Some(v) = inner {
            r.observe("interior_max_error", v, Bound::AtMost(tol));
        }
        if let Some(v) = outer {
            r.observe("exterior_max_error", v, Bound::AtMost(tol));
        }
        Ok(())
    })
}

/// Probe pairs for [`modulus_experiment`]: `x -+ (s/2) e` for each base point
/// `x`, each coordinate direction `e` and each scale `s`.
pub fn probe_pairs(base: &[Vec<f64>], scale: f64) -> Vec<(Vec<f64>, Vec<f64>)> {
    let mut out = vec![];
    for x in base {
        for k in 0..x.len() {
            let mut a = x.clone();
            let mut b = x.clone();
            a[k] -= 0.5 * scale;
            b[k] += 0.5 * scale;
            out.push((a, b));
        }
    }
    out
}

/// Tabulates, per pair-separation scale, the `omega_1` and Lipschitz
/// seminorms of each Hessian entry of `P[f]` over probe pairs about `base`.
/// Passes when, for `alpha = 1`, the `omega_1` seminorm of every entry that
/// varies stays within a factor `max_ratio` across scales. Hessians are
/// computed adaptively to `hessian_tol` with the declared kink lines (2D).
#[allow(clippy::too_many_arguments)]
pub fn modulus_experiment<D: Density + ?Sized>(
    field: &PotentialField,
    f: &D,
    kinks: &[([f64; 2], [f64; 2])],
    alpha: f64,
    scales: &[f64],
    base: &[Vec<f64>],
    hessian_tol: f64,
    max_ratio: f64,
) -> Result<VerificationReport> {
    let d = field.domain().dim();
    timed("modulus_experiment", |r| {
        r.param("kind", field.fundamental_solution().kind().name())
            .param("domain", field.domain().kind_name())
            .param("alpha", alpha)
            .param("points", base.len());
        let omega = Modulus::omega_theta(1.0)?;
        let lip = Modulus::power(1.0)?;
        let hess = |x: &[f64]| -> Result<Vec<Vec<Complex64>>> {
            if d == 2 {
                field.volume_potential_hessian_adaptive(f, x, kinks, hessian_tol)
            } else {
                field.volume_potential_hessian(f, x)
            }
        };
        let mut table = vec![vec![vec![0.0; scales.len()]; d]; d];
        let mut level: f64 = 0.0;
        for (si, &s) in scales.iter().enumerate() {
            let pairs = probe_pairs(base, s);
            let mut om = vec![vec![0.0f64; d]; d];
            let mut li = vec![vec![0.0f64; d]; d];
            for (a, b) in &pairs {
                let (ha, hb) = (hess(a)?, hess(b)?);
                for l in 0..d {
                    for j in 0..d {
                        level = level.max(ha[l][j].norm());
                        let pts = vec![a.clone(), b.clone()];
                        let vals = vec![ha[l][j], hb[l][j]];
                        om[l][j] = om[l][j].max(holder_seminorm(&pts, &vals, &omega)?);
                        li[l][j] = li[l][j].max(holder_seminorm(&pts, &vals, &lip)?);
                    }
                }
            }
            for l in 0..d {
                for j in 0..d {
                    r.observe(format!("omega1[{}{}]@{s:e}", l + 1, j + 1), om[l][j], Bound::None);
                    r.observe(format!("lipschitz[{}{}]@{s:e}", l + 1, j + 1), li[l][j], Bound::None);
                    table[l][j][si] = om[l][j];
                }
            }
        }
        // entries whose differences stay at the quadrature floor are constant
        let floor = 100.0 * hessian_tol.max(1e-12) * (1.0 + level);
        let mut worst: f64 = 1.0;
        for l in 0..d {
            for j in 0..d {
                let row = &table[l][j];
                let varies = scales.iter().zip(row).any(|(s, v)| v * omega.eval(*s) > floor);
                if varies {
                    let hi = row.iter().cloned().fold(0.0, f64::max);
                    let lo = row.iter().cloned().fold(f64::INFINITY, f64::min);
                    worst = worst.max(if lo > 0.0 { hi / lo } else { f64::INFINITY });
                }
            }
        }
        let bound = if (alpha - 1.0).abs() < 1e-12 { Bound::AtMost(max_ratio) } else { Bound::None };
        r.observe("omega1_max_over_min", worst, bound);
        Ok(())
    })
}

/// Convergence criterion for [`convergence_study`].
#[derive(Debug, Clone, Copy)]
pub enum Rate {
    /// algebraic order at least the given value
    Order(f64),
    /// error ratio per doubling of `N` at least the given value
    Ratio(f64),
}

/// Errors of `eval(N)` against `reference` (or `eval(4 N_max)`) and the
/// observed rate. Errors at round-off level (`floor`) count as converged.
pub fn convergence_study<F>(
    name: &str,
    mut eval: F,
    reference: Option<Complex64>,
    ns: &[usize],
    rate: Rate,
    floor: f64,
) -> Result<VerificationReport>
where
    F: FnMut(usize) -> Result<Complex64>,
{
    if ns.len() < 2 || ns.windows(2).any(|w| w[1] <= w[0]) || ns[0] < 4 {
        return Err(Error::InvalidArgument("N list must be increasing, start at 4 or more and have two entries".into()));
    }
    timed(&format!("convergence_{name}"), |r| {
        let list: Vec<String> = ns.iter().map(|n| n.to_string()).collect();
        r.param("N", list.join(" "));
        let reference = match reference {
            Some(v) => v,
            None => eval(4 * ns[ns.len() - 1])?,
        };
        let mut errors = vec![];
        for &n in ns {
            let e = (eval(n)? - reference).norm();
            r.observe(format!("error@N={n}"), e, Bound::None);
            errors.push(e);
        }
        let mut observed = f64::INFINITY;
        for (w, e) in ns.windows(2).zip(errors.windows(2)) {
            if e[1] <= floor {
                break;
            }
            let v = match rate {
                Rate::Order(_) => (e[0] / e[1]).ln() / (w[1] as f64 / w[0] as f64).ln(),
                Rate::Ratio(_) => (e[0] / e[1]).powf(2f64.ln() / (w[1] as f64 / w[0] as f64).ln()),
            };
            observed = observed.min(v);
        }
        let (label, bound) = match rate {
            Rate::Order(p) => ("observed_order", Bound::AtLeast(p)),
            Rate::Ratio(q) => ("ratio_per_doubling", Bound::AtLeast(q)),
        };
        // every error already at the floor: report the cap instead of infinity
        let observed = if observed.is_infinite() { 99.0 } else { observed };
        r.observe(label, observed, bound);
        Ok(())
    })
}
