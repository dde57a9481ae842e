//! Volume and single layer potentials, their derivatives, the subtraction
//! operator `G_l`, the boundary operators `K[k, mu]` and the potential of a
//! negative-exponent density.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fundsol::FundamentalSolution;
use crate::geometry::{BoundaryQuadrature, Domain, Location, VolumeQuadrature};
use crate::linalg::{self, Vec3};
use crate::schauder::NegativeExponentDensity;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// A scalar density on (a neighbourhood of) the closure of the domain.
pub trait Density {
    fn at(&self, y: &[f64]) -> Complex64;
}

impl<F, C> Density for F
where
    F: Fn(&[f64]) -> C,
    C: Into<Complex64>,
{
    fn at(&self, y: &[f64]) -> Complex64 {
        self(y).into()
    }
}

/// A density on the boundary, evaluated with the outward normal at the point.
pub trait BoundaryDensity {
    fn at(&self, y: &[f64], nu: &[f64]) -> Complex64;
}

impl<F, C> BoundaryDensity for F
where
    F: Fn(&[f64], &[f64]) -> C,
    C: Into<Complex64>,
{
    fn at(&self, y: &[f64], nu: &[f64]) -> Complex64 {
        self(y, nu).into()
    }
}

/// The extension `E f`: identity on the closure of the domain, constant along
/// rays from the center outside it.
pub struct Extended<'a, D: ?Sized> {
    pub domain: &'a Domain,
    pub density: &'a D,
}

impl<D: Density + ?Sized> Density for Extended<'_, D> {
    fn at(&self, y: &[f64]) -> Complex64 {
        match self.domain.retract(y) {
            Ok(p) => self.density.at(&p[..y.len()]),
            Err(_) => self.density.at(y),
        }
    }
}

/// A kernel `k(z)` on `R^n \ {0}` with its gradient.
pub trait Kernel {
    fn dim(&self) -> usize;
    fn value(&self, z: &[f64]) -> f64;
    fn gradient(&self, z: &[f64], out: &mut [f64]);
}

/// The homogeneous part `k_{j,1}` of `d_j S_a` for a fundamental solution.
#[derive(Debug, Clone)]
pub struct GradientKernel {
    fs: FundamentalSolution,
    j: usize,
}

impl GradientKernel {
    pub fn new(fs: &FundamentalSolution, j: usize) -> Result<Self> {
        if j >= fs.dim() {
            return Err(Error::InvalidArgument(format!("component {j} out of range")));
        }
        Ok(Self { fs: fs.clone(), j })
    }

    /// `z_j / (s_n |z|^n)`, the Laplacian's `k_{j,1}`.
    pub fn laplace(n: usize, j: usize) -> Result<Self> {
        Self::new(&FundamentalSolution::laplace(n)?, j)
    }
}

impl Kernel for GradientKernel {
    fn dim(&self) -> usize {
        self.fs.dim()
    }

    fn value(&self, z: &[f64]) -> f64 {
        self.fs.homogeneous_gradient(&linalg::to_vec3(z))[self.j]
    }

    fn gradient(&self, z: &[f64], out: &mut [f64]) {
        let h = self.fs.homogeneous_hessian(&linalg::to_vec3(z));
        for (l, o) in out.iter_mut().enumerate() {
            *o = h[self.j][l];
        }
    }
}

/// Kernel gradient `(z, out)`.
pub type GradientFn = Box<dyn Fn(&[f64], &mut [f64]) + Send + Sync>;

/// A kernel given by a closure; the gradient is taken by central differences
/// scaled to `|z|` unless supplied.
pub struct ClosureKernel<F> {
    dim: usize,
    f: F,
    grad: Option<GradientFn>,
}

impl<F: Fn(&[f64]) -> f64> ClosureKernel<F> {
    pub fn new(dim: usize, f: F) -> Self {
        Self { dim, f, grad: None }
    }

    pub fn with_gradient(dim: usize, f: F, grad: GradientFn) -> Self {
        Self { dim, f, grad: Some(grad) }
    }
}

impl<F: Fn(&[f64]) -> f64> Kernel for ClosureKernel<F> {
    fn dim(&self) -> usize {
        self.dim
    }

    fn value(&self, z: &[f64]) -> f64 {
        (self.f)(z)
    }

    fn gradient(&self, z: &[f64], out: &mut [f64]) {
        if let Some(g) = &self.grad {
            return g(z, out);
        }
        let r = z.iter().map(|a| a * a).sum::<f64>().sqrt();
        let h = 1e-4 * r;
        let mut p = z.to_vec();
        for l in 0..self.dim {
            let mut d = 0.0;
            // fourth-order central difference
            for (s, c) in [(2.0, -1.0 / 12.0), (1.0, 2.0 / 3.0), (-1.0, -2.0 / 3.0), (-2.0, 1.0 / 12.0)] {
                p[l] = z[l] + s * h;
                d += c * (self.f)(&p);
            }
            p[l] = z[l];
            out[l] = d / h;
        }
    }
}

/// Checks by sampling that `k` is odd and positively homogeneous of `degree`.
pub fn check_odd_homogeneous<K: Kernel + ?Sized>(k: &K, degree: f64) -> Result<()> {
    let n = k.dim();
    let dirs: Vec<Vec<f64>> = (0..24)
        .map(|i| {
            let t = 0.7 + 2.0 * PI * i as f64 / 24.0;
            if n == 2 {
                vec![t.cos(), t.sin()]
            } else {
                let p = 0.3 + PI * (i as f64 + 0.5) / 24.0;
                vec![p.sin() * t.cos(), p.sin() * t.sin(), p.cos()]
            }
        })
        .collect();
    for d in &dirs {
        let v = k.value(d);
        let minus: Vec<f64> = d.iter().map(|a| -a).collect();
        let scale = v.abs().max(1e-300);
        if (k.value(&minus) + v).abs() > 1e-9 * scale.max(1.0) {
            return Err(Error::Kernel(format!("kernel is not odd at {d:?}")));
        }
        for t in [0.25, 3.0] {
            let p: Vec<f64> = d.iter().map(|a| a * t).collect();
            if (k.value(&p) - t.powf(degree) * v).abs() > 1e-9 * scale.max(1.0) * t.powf(degree).max(1.0) {
                return Err(Error::Kernel(format!("kernel is not homogeneous of degree {degree} at {d:?}")));
            }
        }
    }
    Ok(())
}

/// Which one-sided boundary operator to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Interior,
    Exterior,
}

/// Potentials of a fundamental solution over a domain at resolution `n`.
#[derive(Debug, Clone)]
pub struct PotentialField {
    fs: FundamentalSolution,
    domain: Domain,
    n: usize,
}

impl PotentialField {
    pub fn new(fs: FundamentalSolution, domain: Domain, n: usize) -> Result<Self> {
        if fs.dim() != domain.dim() {
            return Err(Error::DimensionMismatch { expected: domain.dim(), got: fs.dim() });
        }
        if n < 4 {
            return Err(Error::InvalidArgument(format!("resolution must be at least 4, got {n}")));
        }
        Ok(Self { fs, domain, n })
    }

    pub fn fundamental_solution(&self) -> &FundamentalSolution {
        &self.fs
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn resolution(&self) -> usize {
        self.n
    }

    pub fn with_resolution(&self, n: usize) -> Result<Self> {
        Self::new(self.fs.clone(), self.domain.clone(), n)
    }

    fn dim(&self) -> usize {
        self.domain.dim()
    }

    fn target(&self, x: &[f64]) -> Result<(Vec3, Location)> {
        let p = self.domain.project(x)?;
        Ok((linalg::to_vec3(x), p.location))
    }

    /// Polar rule about an off-boundary target.
    fn rule(&self, x: &[f64]) -> Result<(Vec3, Location, VolumeQuadrature)> {
        let (y, loc) = self.target(x)?;
        if loc == Location::Boundary {
            return Err(Error::NearBoundary(x.to_vec()));
        }
        Ok((y, loc, self.domain.polar_rule(x, self.n, 0.0)?))
    }

    fn boundary_rule(&self, x: &[f64]) -> Result<BoundaryQuadrature> {
        let nb = if self.dim() == 2 { 2 * self.n } else { self.n };
        self.domain.target_boundary_rule(x, nb)
    }

    /// `int_Omega S_a(x - y) f(y) dy` for `x` off the boundary band.
    pub fn volume_potential<D: Density + ?Sized>(&self, f: &D, x: &[f64]) -> Result<Complex64> {
        let (xv, _, q) = self.rule(x)?;
        let d = self.dim();
        let mut acc = ZERO;
        for (y, w) in q.nodes.iter().zip(&q.weights) {
            acc += f.at(&y[..d]) * (w * self.fs.value(&linalg::sub(&xv, y)));
        }
        Ok(acc)
    }

    /// `int_Omega grad S_a(x - y) f(y) dy`.
    pub fn volume_potential_gradient<D: Density + ?Sized>(&self, f: &D, x: &[f64]) -> Result<Vec<Complex64>> {
        let (xv, _, q) = self.rule(x)?;
        let d = self.dim();
        let mut acc = vec![ZERO; d];
        for (y, w) in q.nodes.iter().zip(&q.weights) {
            let fy = f.at(&y[..d]);
            if fy == ZERO {
                continue;
            }
            let g = self.fs.gradient(&linalg::sub(&xv, y));
            for j in 0..d {
                acc[j] += fy * (w * g[j]);
            }
        }
        Ok(acc)
    }

    /// `G_l[k, psi](x) = int_Omega d_l k(x - y) (psi(y) - psi(x)) dy`.
    pub fn subtracted_integral_g<K, D>(&self, k: &K, psi: &D, l: usize, x: &[f64]) -> Result<Complex64>
    where
        K: Kernel + ?Sized,
        D: Density + ?Sized,
    {
        let d = self.dim();
        if k.dim() != d {
            return Err(Error::DimensionMismatch { expected: d, got: k.dim() });
        }
        if l >= d {
            return Err(Error::InvalidArgument(format!("direction {l} out of range")));
        }
        self.check_in_bounding_ball(x)?;
        check_odd_homogeneous(k, 1.0 - d as f64)?;
        let (xv, _, q) = self.rule(x)?;
        let px = psi.at(x);
        let mut g = [0.0; 3];
        let mut acc = ZERO;
        for (y, w) in q.nodes.iter().zip(&q.weights) {
            let diff = psi.at(&y[..d]) - px;
            if diff == ZERO {
                continue;
            }
            let z = linalg::sub(&xv, y);
            k.gradient(&z[..d], &mut g[..d]);
            acc += diff * (w * g[l]);
        }
        Ok(acc)
    }

    fn check_in_bounding_ball(&self, x: &[f64]) -> Result<()> {
        let r = linalg::norm(&linalg::to_vec3(x));
        if r > self.domain.bounding_radius() {
            return Err(Error::InvalidArgument(format!(
                "point {x:?} is outside the bounding ball of radius {}",
                self.domain.bounding_radius()
            )));
        }
        Ok(())
    }

    /// `K[k, mu](x) = int_{dOmega} k(x - y) mu(y) dsigma_y` for `x` on the given
    /// side, off the boundary band.
    pub fn boundary_kernel<K, B>(&self, k: &K, mu: &B, x: &[f64], side: Side) -> Result<Complex64>
    where
        K: Kernel + ?Sized,
        B: BoundaryDensity + ?Sized,
    {
        let d = self.dim();
        if k.dim() != d {
            return Err(Error::DimensionMismatch { expected: d, got: k.dim() });
        }
        let (xv, loc) = self.target(x)?;
        match (loc, side) {
            (Location::Boundary, _) => return Err(Error::NearBoundary(x.to_vec())),
            (Location::Exterior, Side::Interior) => return Err(Error::NotInterior(x.to_vec())),
            (Location::Interior, Side::Exterior) => {
                return Err(Error::InvalidArgument(format!("point {x:?} is not exterior")))
            }
            _ => {}
        }
        let b = self.boundary_rule(x)?;
        let mut acc = ZERO;
        for ((y, nu), w) in b.nodes.iter().zip(&b.normals).zip(&b.weights) {
            let z = linalg::sub(&xv, y);
            acc += mu.at(&y[..d], &nu[..d]) * (w * k.value(&z[..d]));
        }
        Ok(acc)
    }

    /// Second derivatives `d_l d_j P[f](x)` at an interior point through
    /// `G_l[k_{j,1}, f](x) - f(x) K[k_{j,1}, nu_l](x) + int_Omega d_l k_{j,2}(x - y) f(y) dy`.
    pub fn volume_potential_hessian<D: Density + ?Sized>(&self, f: &D, x: &[f64]) -> Result<Vec<Vec<Complex64>>> {
        let (xv, loc) = self.target(x)?;
        match loc {
            Location::Boundary => return Err(Error::NearBoundary(x.to_vec())),
            Location::Exterior => return Err(Error::NotInterior(x.to_vec())),
            Location::Interior => {}
        }
        let d = self.dim();
        let q = self.domain.polar_rule(x, self.n, 0.0)?;
        let fx = f.at(x);
        let mut h = vec![vec![ZERO; d]; d];
        let remainder = self.fs.has_remainder();
        for (y, w) in q.nodes.iter().zip(&q.weights) {
            let fy = f.at(&y[..d]);
            let diff = fy - fx;
            let z = linalg::sub(&xv, y);
            let hom = self.fs.homogeneous_hessian(&z);
            let rem = if remainder { self.fs.remainder_hessian(&z) } else { [[0.0; 3]; 3] };
            for l in 0..d {
                for j in 0..d {
                    h[l][j] += diff * (w * hom[j][l]) + fy * (w * rem[j][l]);
                }
            }
        }
        if fx != ZERO {
            let kb = self.boundary_gradient_moments(&xv)?;
            for l in 0..d {
                for j in 0..d {
                    h[l][j] -= fx * kb[l][j];
                }
            }
        }
        Ok(h)
    }

    /// `K[k_{j,1}, nu_l](x)` for all `l, j`.
    fn boundary_gradient_moments(&self, x: &Vec3) -> Result<[[f64; 3]; 3]> {
        let d = self.dim();
        let b = self.boundary_rule(&x[..d])?;
        let mut kb = [[0.0; 3]; 3];
        for ((y, nu), w) in b.nodes.iter().zip(&b.normals).zip(&b.weights) {
            let k = self.fs.homogeneous_gradient(&linalg::sub(x, y));
            for l in 0..d {
                for j in 0..d {
                    kb[l][j] += w * k[j] * nu[l];
                }
            }
        }
        Ok(kb)
    }

    /// The Hessian of [`Self::volume_potential_hessian`] with the volume terms
    /// integrated adaptively to absolute tolerance `tol` (2D). `kinks` lists
    /// lines `(point, normal)` across which `f` has a derivative jump.
    pub fn volume_potential_hessian_adaptive<D: Density + ?Sized>(
        &self,
        f: &D,
        x: &[f64],
        kinks: &[([f64; 2], [f64; 2])],
        tol: f64,
    ) -> Result<Vec<Vec<Complex64>>> {
        let (xv, loc) = self.target(x)?;
        match loc {
            Location::Boundary => return Err(Error::NearBoundary(x.to_vec())),
            Location::Exterior => return Err(Error::NotInterior(x.to_vec())),
            Location::Interior => {}
        }
        let d = self.dim();
        let fx = f.at(x);
        let remainder = self.fs.has_remainder();
        let (v, _) = self.domain.adaptive_polar(x, 0.0, kinks, d * d, tol, |y| {
            let fy = f.at(y);
            let z = linalg::sub(&xv, &linalg::to_vec3(y));
            let hom = self.fs.homogeneous_hessian(&z);
            let rem = if remainder { self.fs.remainder_hessian(&z) } else { [[0.0; 3]; 3] };
            let mut out = Vec::with_capacity(d * d);
            for l in 0..d {
                for j in 0..d {
                    out.push((fy - fx) * hom[j][l] + fy * rem[j][l]);
                }
            }
            out
        })?;
        let kb = self.boundary_gradient_moments(&xv)?;
        Ok((0..d).map(|l| (0..d).map(|j| v[l * d + j] - fx * kb[l][j]).collect()).collect())
    }

    /// `v[phi](x) = int_{dOmega} S_a(x - y) phi(y) dsigma_y`, defined on all of
    /// `R^n`; on the boundary a graded rule handles the weak singularity.
    pub fn single_layer<B: BoundaryDensity + ?Sized>(&self, phi: &B, x: &[f64]) -> Result<Complex64> {
        let d = self.dim();
        if x.len() != d {
            return Err(Error::DimensionMismatch { expected: d, got: x.len() });
        }
        let xv = linalg::to_vec3(x);
        let b = self.boundary_rule(x)?;
        let mut acc = ZERO;
        for ((y, nu), w) in b.nodes.iter().zip(&b.normals).zip(&b.weights) {
            let z = linalg::sub(&xv, y);
            if linalg::dot(&z, &z) == 0.0 {
                continue;
            }
            acc += phi.at(&y[..d], &nu[..d]) * (w * self.fs.value(&z));
        }
        Ok(acc)
    }

    /// Potential of `f = f_0 + sum_j d_j f_j`:
    /// `P[f_0] + sum_j v[nu_j f_j] + sum_j d_j P[f_j]`.
    pub fn volume_potential_negative(&self, nd: &NegativeExponentDensity, x: &[f64]) -> Result<Complex64> {
        let d = self.dim();
        if nd.dim() != d {
            return Err(Error::DimensionMismatch { expected: d, got: nd.dim() });
        }
        let (xv, _, q) = self.rule(x)?;
        let b = self.boundary_rule(x)?;
        let mut acc = ZERO;
        for (y, w) in q.nodes.iter().zip(&q.weights) {
            let yy = &y[..d];
            let z = linalg::sub(&xv, y);
            let f0 = nd.component(0, yy);
            if f0 != ZERO {
                acc += f0 * (w * self.fs.value(&z));
            }
            let mut g: Option<Vec3> = None;
            for j in 0..d {
                let fj = nd.component(j + 1, yy);
                if fj != ZERO {
                    let gv = *g.get_or_insert_with(|| self.fs.gradient(&z));
                    acc += fj * (w * gv[j]);
                }
            }
        }
        for ((y, nu), w) in b.nodes.iter().zip(&b.normals).zip(&b.weights) {
            let z = linalg::sub(&xv, y);
            let s = self.fs.value(&z);
            for j in 0..d {
                let fj = nd.component(j + 1, &y[..d]);
                if fj != ZERO {
                    acc += fj * (w * nu[j] * s);
                }
            }
        }
        Ok(acc)
    }
}

/// `sum_i w_i v_i S_a(x - y_i)`: the field of a discretized functional with
/// compact support, for `x` outside the support hull (the smallest ball about
/// the node centroid containing all nodes) by at least `1e-6`.
pub fn exterior_field(
    fs: &FundamentalSolution,
    nodes: &[Vec<f64>],
    weights: &[f64],
    values: &[Complex64],
    x: &[f64],
) -> Result<Complex64> {
    let d = fs.dim();
    if nodes.len() != weights.len() || nodes.len() != values.len() {
        return Err(Error::InvalidArgument("nodes, weights and values must have equal lengths".into()));
    }
    if x.len() != d {
        return Err(Error::DimensionMismatch { expected: d, got: x.len() });
    }
    if nodes.is_empty() {
        return Ok(ZERO);
    }
    let mut c = [0.0; 3];
    for y in nodes {
        if y.len() != d {
            return Err(Error::DimensionMismatch { expected: d, got: y.len() });
        }
        for k in 0..d {
            c[k] += y[k] / nodes.len() as f64;
        }
    }
    let radius = nodes.iter().map(|y| linalg::norm(&linalg::sub(&linalg::to_vec3(y), &c))).fold(0.0, f64::max);
    let xv = linalg::to_vec3(x);
    if linalg::norm(&linalg::sub(&xv, &c)) < radius + 1e-6 {
        return Err(Error::InsideSupport(x.to_vec()));
    }
    let mut acc = ZERO;
    for ((y, w), v) in nodes.iter().zip(weights).zip(values) {
        acc += v * (w * fs.value(&linalg::sub(&xv, &linalg::to_vec3(y))));
    }
    Ok(acc)
}
