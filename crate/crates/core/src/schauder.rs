//! Moduli of continuity, sampled Hölder seminorms and kernel-class norms, and
//! negative-exponent densities `f = f_0 + sum_j d_j f_j` with their pairings.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geometry::Domain;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// `omega_theta(r)`: `r^theta |ln r|` on `(0, r_theta]` with `r_theta = e^{-1/theta}`,
/// constant beyond and `0` at `r = 0`.
pub fn omega_theta_eval(theta: f64, r: f64) -> f64 {
    if r <= 0.0 {
        return 0.0;
    }
    let rt = (-1.0 / theta).exp();
    let r = r.min(rt);
    r.powf(theta) * r.ln().abs()
}

/// A modulus of continuity.
#[derive(Clone)]
pub enum Modulus {
    Power(f64),
    OmegaTheta(f64),
    Custom(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

impl fmt::Debug for Modulus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Modulus::Power(a) => write!(f, "Power({a})"),
            Modulus::OmegaTheta(t) => write!(f, "OmegaTheta({t})"),
            Modulus::Custom(_) => write!(f, "Custom"),
        }
    }
}

impl Modulus {
    /// `r^alpha`, `alpha` in `(0, 1]`.
    pub fn power(alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(Error::InvalidArgument(format!("power exponent must lie in (0, 1], got {alpha}")));
        }
        Ok(Modulus::Power(alpha))
    }

    /// `omega_theta`, `theta` in `(0, 1]`.
    pub fn omega_theta(theta: f64) -> Result<Self> {
        if !(theta > 0.0 && theta <= 1.0) {
            return Err(Error::InvalidArgument(format!("theta must lie in (0, 1], got {theta}")));
        }
        Ok(Modulus::OmegaTheta(theta))
    }

    pub fn custom<F: Fn(f64) -> f64 + Send + Sync + 'static>(f: F) -> Self {
        Modulus::Custom(Arc::new(f))
    }

    /// Parses `power:<alpha>` or `omega:<theta>`.
    pub fn parse(s: &str) -> Result<Self> {
        let (kind, value) = s
            .split_once(':')
            .ok_or_else(|| Error::InvalidArgument(format!("modulus must be kind:value, got {s:?}")))?;
        let v: f64 = value
            .trim()
            .parse()
            .map_err(|_| Error::InvalidArgument(format!("bad modulus parameter {value:?}")))?;
        match kind.trim() {
            "power" => Self::power(v),
            "omega" | "omega_theta" => Self::omega_theta(v),
            other => Err(Error::InvalidArgument(format!("unknown modulus kind {other:?}"))),
        }
    }

    pub fn eval(&self, r: f64) -> f64 {
        match self {
            Modulus::Power(a) => {
                if r <= 0.0 {
                    0.0
                } else {
                    r.powf(*a)
                }
            }
            Modulus::OmegaTheta(t) => omega_theta_eval(*t, r),
            Modulus::Custom(f) => f(r),
        }
    }

    /// Sampled check of `omega(0) = 0`, positivity, monotonicity and
    /// `omega(a t) <= a omega(t)` for `a` in `[1, 100]`, `t` in `[1e-8, 1]`.
    /// Returns one message per violated condition.
    pub fn check_conditions(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.eval(0.0) != 0.0 {
            out.push(format!("omega(0) = {} is not 0", self.eval(0.0)));
        }
        let ts: Vec<f64> = (0..=160).map(|k| 10f64.powf(-8.0 + 8.0 * k as f64 / 160.0)).collect();
        let mut prev = 0.0;
        for &t in &ts {
            let v = self.eval(t);
            if !(v > 0.0) {
                out.push(format!("omega({t:e}) = {v} is not positive"));
                break;
            }
            if v < prev * (1.0 - 1e-12) {
                out.push(format!("omega is decreasing near {t:e}"));
                break;
            }
            prev = v;
        }
        'outer: for &t in ts.iter().step_by(8) {
            for k in 0..=20 {
                let a = 10f64.powf(2.0 * k as f64 / 20.0);
                if self.eval(a * t) > a * self.eval(t) * (1.0 + 1e-12) {
                    out.push(format!("omega(a t) > a omega(t) at a = {a:.3}, t = {t:e}"));
                    break 'outer;
                }
            }
        }
        out
    }
}

fn distance(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt()
}

/// `max |f(x) - f(y)| / omega(|x - y|)` over distinct sample pairs.
pub fn holder_seminorm(points: &[Vec<f64>], values: &[Complex64], omega: &Modulus) -> Result<f64> {
    holder_seminorm_beyond(points, values, omega, 0.0)
}

/// As [`holder_seminorm`], restricted to pairs with `|x - y| >= a`.
pub fn holder_seminorm_beyond(points: &[Vec<f64>], values: &[Complex64], omega: &Modulus, a: f64) -> Result<f64> {
    if points.len() != values.len() {
        return Err(Error::InvalidArgument("points and values must have equal lengths".into()));
    }
    if points.len() < 2 {
        return Err(Error::InvalidArgument("at least two sample points are required".into()));
    }
    let mut best: f64 = 0.0;
    let mut distinct = false;
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            let d = distance(&points[i], &points[j]);
            let df = (values[i] - values[j]).norm();
            if d == 0.0 {
                if df != 0.0 {
                    return Err(Error::InconsistentSample(points[i].clone()));
                }
                continue;
            }
            distinct = true;
            if d >= a {
                best = best.max(df / omega.eval(d));
            }
        }
    }
    if !distinct {
        return Err(Error::InvalidArgument("at least two distinct sample points are required".into()));
    }
    Ok(best)
}

/// Constants `(c, c')` with `omega_theta(r) >= r^theta / c` and
/// `omega_theta(r) <= c' r^theta'` for `0 < r <= diameter`, so that
/// `|f|_{omega_theta} <= c |f|_{r^theta}` and `|f|_{r^theta'} <= c' |f|_{omega_theta}`
/// on sets of that diameter (`theta' < theta`).
pub fn embedding_constants(theta: f64, theta_prime: f64, diameter: f64) -> (f64, f64) {
    let mut c: f64 = 0.0;
    let mut cp: f64 = 0.0;
    let steps = 4000;
    let lo = (1e-300f64).ln();
    for k in 0..=steps {
        let r = (lo + (diameter.ln() - lo) * k as f64 / steps as f64).exp();
        let w = omega_theta_eval(theta, r);
        c = c.max(r.powf(theta) / w);
        cp = cp.max(w / r.powf(theta_prime));
    }
    // grid maxima are interior; a small margin covers the between-node excess
    (c * (1.0 + 1e-3), cp * (1.0 + 1e-3))
}

/// Sampled lower bound for the norm of the kernel class `K_{s1,s2,s3}`:
/// `sup |x - y|^{s1} |K(x, y)|` plus the sup over `x', x''` in `xs` and `y` in
/// `ys` with `|x' - y| >= 2 |x' - x''|` of
/// `|x' - y|^{s2} / |x' - x''|^{s3} |K(x', y) - K(x'', y)|`.
pub fn kernel_class_norm<K>(k: K, xs: &[Vec<f64>], ys: &[Vec<f64>], s1: f64, s2: f64, s3: f64) -> f64
where
    K: Fn(&[f64], &[f64]) -> Complex64,
{
    let kv: Vec<Vec<Option<Complex64>>> = xs
        .iter()
        .map(|x| ys.iter().map(|y| if distance(x, y) > 0.0 { Some(k(x, y)) } else { None }).collect())
        .collect();
    let mut first: f64 = 0.0;
    for (x, row) in xs.iter().zip(&kv) {
        for (y, v) in ys.iter().zip(row) {
            if let Some(v) = v {
                first = first.max(distance(x, y).powf(s1) * v.norm());
            }
        }
    }
    let mut second: f64 = 0.0;
    for (i, x1) in xs.iter().enumerate() {
        for (j, x2) in xs.iter().enumerate() {
            let d = distance(x1, x2);
            if i == j || d == 0.0 {
                continue;
            }
            for (m, y) in ys.iter().enumerate() {
                let r = distance(x1, y);
                if r < 2.0 * d {
                    continue;
                }
                if let (Some(a), Some(b)) = (kv[i][m], kv[j][m]) {
                    second = second.max(r.powf(s2) / d.powf(s3) * (a - b).norm());
                }
            }
        }
    }
    first + second
}

/// A component `f_j` of a negative-exponent density.
pub type Component = Arc<dyn Fn(&[f64]) -> Complex64 + Send + Sync>;

/// `f = f_0 + sum_j d_j f_j` with Hölder continuous components on the closure
/// of a domain.
#[derive(Clone)]
pub struct NegativeExponentDensity {
    components: Vec<Component>,
    alpha: f64,
    norm_bound: f64,
}

impl fmt::Debug for NegativeExponentDensity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("NegativeExponentDensity")
            .field("dim", &self.dim())
            .field("alpha", &self.alpha)
            .field("norm_bound", &self.norm_bound)
            .finish()
    }
}

/// Sample cloud for norm estimates: product nodes plus boundary nodes.
pub fn sample_cloud(domain: &Domain, n: usize) -> Vec<Vec<f64>> {
    let d = domain.dim();
    let mut pts: Vec<Vec<f64>> = domain.volume_rule(n).nodes.iter().map(|y| y[..d].to_vec()).collect();
    let nb = if d == 2 { 4 * n } else { n };
    pts.extend(domain.boundary_rule(nb).nodes.iter().map(|y| y[..d].to_vec()));
    pts
}

/// `sup |g| + |g|_alpha` over the sample cloud.
pub fn holder_norm(points: &[Vec<f64>], values: &[Complex64], alpha: f64) -> Result<f64> {
    let sup = values.iter().map(|v| v.norm()).fold(0.0, f64::max);
    Ok(sup + holder_seminorm(points, values, &Modulus::power(alpha)?)?)
}

impl NegativeExponentDensity {
    /// Builds the density and estimates `sum_j ||f_j||_{C^{0,alpha}}` on a
    /// sample cloud of the domain (resolution 12).
    pub fn new(domain: &Domain, components: Vec<Component>, alpha: f64) -> Result<Self> {
        if components.len() != domain.dim() + 1 {
            return Err(Error::DimensionMismatch { expected: domain.dim() + 1, got: components.len() });
        }
        let points = sample_cloud(domain, 12);
        let mut norm_bound = 0.0;
        for c in &components {
            let values: Vec<Complex64> = points.iter().map(|p| c(p)).collect();
            norm_bound += holder_norm(&points, &values, alpha)?;
        }
        Ok(Self { components, alpha, norm_bound })
    }

    /// Builds the density with a given norm bound.
    pub fn with_bound(components: Vec<Component>, alpha: f64, norm_bound: f64) -> Result<Self> {
        if components.len() < 3 || components.len() > 4 {
            return Err(Error::Dimension(components.len().saturating_sub(1)));
        }
        if !(norm_bound >= 0.0) {
            return Err(Error::InvalidArgument(format!("norm bound must be nonnegative, got {norm_bound}")));
        }
        Ok(Self { components, alpha, norm_bound })
    }

    /// The classical density `(f, 0, ..., 0)`.
    pub fn classical(domain: &Domain, f: Component, alpha: f64) -> Result<Self> {
        let mut c: Vec<Component> = vec![f];
        for _ in 0..domain.dim() {
            c.push(Arc::new(|_: &[f64]| ZERO));
        }
        Self::new(domain, c, alpha)
    }

    pub fn dim(&self) -> usize {
        self.components.len() - 1
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn norm_bound(&self) -> f64 {
        self.norm_bound
    }

    /// `f_j(y)`, `j = 0..=n`.
    pub fn component(&self, j: usize, y: &[f64]) -> Complex64 {
        (self.components[j])(y)
    }
}

fn boundary_resolution(domain: &Domain, n: usize) -> usize {
    if domain.dim() == 2 {
        4 * n
    } else {
        n
    }
}

fn check_dims(domain: &Domain, nd: &NegativeExponentDensity) -> Result<()> {
    if domain.dim() != nd.dim() {
        return Err(Error::DimensionMismatch { expected: domain.dim(), got: nd.dim() });
    }
    Ok(())
}

/// `I[f] = int_Omega f_0 + int_{dOmega} sum_j nu_j f_j dsigma`.
pub fn integral_functional_i(domain: &Domain, nd: &NegativeExponentDensity, n: usize) -> Result<Complex64> {
    extension_pairing_e(domain, nd, |_: &[f64]| Complex64::new(1.0, 0.0), |_: &[f64]| vec![ZERO; domain.dim()], n)
}

/// `E[f](v) = int_Omega f_0 v + int_{dOmega} sum_j nu_j f_j v dsigma - sum_j int_Omega f_j d_j v`.
pub fn extension_pairing_e<V, G, C>(domain: &Domain, nd: &NegativeExponentDensity, v: V, grad_v: G, n: usize) -> Result<Complex64>
where
    V: Fn(&[f64]) -> C,
    G: Fn(&[f64]) -> Vec<C>,
    C: Into<Complex64>,
{
    check_dims(domain, nd)?;
    let d = domain.dim();
    let mut acc = ZERO;
    let q = domain.volume_rule(n);
    for (y, w) in q.nodes.iter().zip(&q.weights) {
        let y = &y[..d];
        let f0 = nd.component(0, y);
        if f0 != ZERO {
            acc += f0 * v(y).into() * *w;
        }
        let mut grad: Option<Vec<Complex64>> = None;
        for j in 0..d {
            let fj = nd.component(j + 1, y);
            if fj != ZERO {
                let g = grad.get_or_insert_with(|| grad_v(y).into_iter().map(Into::into).collect());
                acc -= fj * g[j] * *w;
            }
        }
    }
    let b = domain.boundary_rule(boundary_resolution(domain, n));
    for ((y, nu), w) in b.nodes.iter().zip(&b.normals).zip(&b.weights) {
        let y = &y[..d];
        let mut s = ZERO;
        for j in 0..d {
            s += nd.component(j + 1, y) * nu[j];
        }
        if s != ZERO {
            acc += s * v(y).into() * *w;
        }
    }
    Ok(acc)
}

/// `J[f](v) = int_Omega f v`.
pub fn canonical_pairing_j<F, V, C1, C2>(domain: &Domain, f: F, v: V, n: usize) -> Complex64
where
    F: Fn(&[f64]) -> C1,
    V: Fn(&[f64]) -> C2,
    C1: Into<Complex64>,
    C2: Into<Complex64>,
{
    let d = domain.dim();
    let q = domain.volume_rule(n);
    q.nodes.iter().zip(&q.weights).map(|(y, w)| f(&y[..d]).into() * v(&y[..d]).into() * *w).sum()
}
