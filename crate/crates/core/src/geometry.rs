//! Smooth bounded domains (balls in 2D/3D, star-shaped planar domains) and the
//! quadrature rules used by the potentials.
//!
//! Two families of volume rules are provided:
//! * [`Domain::volume_rule`], a polar-mapped product rule about the domain
//!   center for smooth integrands;
//! * [`Domain::polar_rule`], a rule in polar coordinates centred at a target
//!   point `x`, built from the ray/domain intersection intervals. Its nodes
//!   cluster at `x`, the Jacobian `r^{n-1}` cancels weak singularities, and
//!   angular panels are graded toward the direction of the nearest boundary
//!   point and toward tangent rays, so targets close to the boundary (on either
//!   side) are resolved.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{self, Vec3};
use crate::quadrature::{adaptive_gk, composite, geometric_breaks, gl_interval, radial_rule};

/// Points closer than this to the boundary are classified as boundary points.
pub const BOUNDARY_BAND: f64 = 1e-9;

/// Radial function `theta -> rho(theta)` of a star-shaped planar domain.
#[derive(Clone)]
pub enum Profile {
    /// `rho(theta) = sum_k c_k cos(k theta)`
    CosineSeries(Vec<f64>),
    /// Ellipse with semi-axes `a` (along x1) and `b`, centred at the origin of the profile.
    Ellipse { a: f64, b: f64 },
    /// Arbitrary smooth positive 2 pi-periodic function; the derivative is
    /// taken by an eighth-order central difference.
    Custom(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

impl fmt::Debug for Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Profile::CosineSeries(c) => f.debug_tuple("CosineSeries").field(c).finish(),
            Profile::Ellipse { a, b } => f.debug_struct("Ellipse").field("a", a).field("b", b).finish(),
            Profile::Custom(_) => f.write_str("Custom(..)"),
        }
    }
}

impl Profile {
    pub fn value(&self, t: f64) -> f64 {
        match self {
            Profile::CosineSeries(c) => c.iter().enumerate().map(|(k, ck)| ck * (k as f64 * t).cos()).sum(),
            Profile::Ellipse { a, b } => {
                let (s, c) = t.sin_cos();
                a * b / (b * b * c * c + a * a * s * s).sqrt()
            }
            Profile::Custom(f) => f(t),
        }
    }

    pub fn derivative(&self, t: f64) -> f64 {
        match self {
            Profile::CosineSeries(c) => {
                c.iter().enumerate().map(|(k, ck)| -ck * k as f64 * (k as f64 * t).sin()).sum()
            }
            Profile::Ellipse { a, b } => {
                let (s, c) = t.sin_cos();
                let d = b * b * c * c + a * a * s * s;
                -a * b * (a * a - b * b) * s * c / (d * d.sqrt())
            }
            Profile::Custom(f) => {
                const C: [f64; 4] = [4.0 / 5.0, -1.0 / 5.0, 4.0 / 105.0, -1.0 / 280.0];
                let h = 1e-2;
                let mut d = 0.0;
                for (k, ck) in C.iter().enumerate() {
                    let s = (k + 1) as f64 * h;
                    d += ck * (f(t + s) - f(t - s));
                }
                d / h
            }
        }
    }
}

#[derive(Debug, Clone)]
enum Shape {
    Ball { radius: f64 },
    Star(Profile),
}

/// Where a point sits relative to the domain.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Location {
    Interior,
    Boundary,
    Exterior,
}

/// Nearest boundary point of a target.
#[derive(Debug, Clone, Copy)]
pub struct Projection {
    pub point: Vec3,
    pub distance: f64,
    /// Boundary parameter: angle `theta` in 2D, `(polar, azimuth)` of the
    /// direction from the center in 3D.
    pub param: [f64; 2],
    pub location: Location,
}

/// A bounded open set with smooth boundary.
#[derive(Debug, Clone)]
pub struct Domain {
    dim: usize,
    shape: Shape,
    center: Vec3,
    bounding_radius: f64,
}

/// Nodes on the boundary with positive weights and unit outward normals.
#[derive(Debug, Clone)]
pub struct BoundaryQuadrature {
    pub dim: usize,
    pub nodes: Vec<Vec3>,
    pub weights: Vec<f64>,
    pub normals: Vec<Vec3>,
}

/// Interior nodes with weights.
#[derive(Debug, Clone)]
pub struct VolumeQuadrature {
    pub dim: usize,
    pub nodes: Vec<Vec3>,
    pub weights: Vec<f64>,
}

impl VolumeQuadrature {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// `sum_i w_i f(y_i)`
    pub fn integrate<F: FnMut(&[f64]) -> f64>(&self, mut f: F) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(y, w)| w * f(&y[..self.dim])).sum()
    }
}

impl BoundaryQuadrature {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// `sum_i w_i f(y_i, nu_i)`
    pub fn integrate<F: FnMut(&[f64], &[f64]) -> f64>(&self, mut f: F) -> f64 {
        let d = self.dim;
        self.nodes
            .iter()
            .zip(&self.normals)
            .zip(&self.weights)
            .map(|((y, nu), w)| w * f(&y[..d], &nu[..d]))
            .sum()
    }
}

fn order_for(n: usize) -> usize {
    (n / 2).max(8)
}

impl Domain {
    /// Ball of radius `r` about `center`.
    pub fn ball(center: &[f64], r: f64) -> Result<Self> {
        let dim = center.len();
        crate::operators::check_dim(dim)?;
        if !(r > 0.0) || !r.is_finite() {
            return Err(Error::InvalidDomain(format!("radius must be positive, got {r}")));
        }
        let c = linalg::to_vec3(center);
        Ok(Self { dim, shape: Shape::Ball { radius: r }, center: c, bounding_radius: linalg::norm(&c) + r })
    }

    /// Planar domain `{center + r (cos t, sin t) : 0 <= r < rho(t)}`.
    pub fn star2d(center: &[f64], profile: Profile) -> Result<Self> {
        if center.len() != 2 {
            return Err(Error::DimensionMismatch { expected: 2, got: center.len() });
        }
        let samples = 1024;
        let mut rmax: f64 = 0.0;
        for k in 0..samples {
            let t = 2.0 * PI * k as f64 / samples as f64;
            let r = profile.value(t);
            if !(r > 0.0) || !r.is_finite() {
                return Err(Error::InvalidDomain(format!("radial function is not positive at theta = {t}: {r}")));
            }
            rmax = rmax.max(r);
        }
        let r0 = profile.value(0.0);
        let r1 = profile.value(2.0 * PI);
        if (r0 - r1).abs() > 1e-10 * r0 {
            return Err(Error::InvalidDomain("radial function is not 2 pi-periodic".into()));
        }
        let c = linalg::to_vec3(center);
        // sampled max plus a margin for what falls between samples
        let rmax = rmax * 1.01;
        Ok(Self { dim: 2, shape: Shape::Star(profile), center: c, bounding_radius: linalg::norm(&c) + rmax })
    }

    /// Ellipse with semi-axes `a` and `b` about `center`.
    pub fn ellipse(center: &[f64], a: f64, b: f64) -> Result<Self> {
        if !(a > 0.0 && b > 0.0) {
            return Err(Error::InvalidDomain(format!("semi-axes must be positive, got {a}, {b}")));
        }
        Self::star2d(center, Profile::Ellipse { a, b })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn center(&self) -> &[f64] {
        &self.center[..self.dim]
    }

    /// A radius `r` with the closure of the domain inside `B(0, r)`.
    pub fn bounding_radius(&self) -> f64 {
        self.bounding_radius
    }

    pub fn radius(&self) -> Option<f64> {
        match self.shape {
            Shape::Ball { radius } => Some(radius),
            Shape::Star(_) => None,
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match &self.shape {
            Shape::Ball { .. } => "ball",
            Shape::Star(Profile::Ellipse { .. }) => "ellipse",
            Shape::Star(_) => "star",
        }
    }

    /// Largest distance from the center to the boundary.
    fn max_extent(&self) -> f64 {
        match &self.shape {
            Shape::Ball { radius } => *radius,
            Shape::Star(_) => self.bounding_radius - linalg::norm(&self.center),
        }
    }

    fn check_point(&self, x: &[f64]) -> Result<Vec3> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: x.len() });
        }
        Ok(linalg::to_vec3(x))
    }

    /// Signed implicit function: negative inside, zero on the boundary.
    fn implicit(&self, y: &Vec3) -> f64 {
        let w = linalg::sub(y, &self.center);
        let r = linalg::norm(&w);
        match &self.shape {
            Shape::Ball { radius } => r - radius,
            Shape::Star(p) => r - p.value(w[1].atan2(w[0])),
        }
    }

    /// Boundary point, unit outward normal and surface element for a parameter.
    pub fn boundary_point(&self, param: [f64; 2]) -> (Vec3, Vec3, f64) {
        match (&self.shape, self.dim) {
            (Shape::Ball { radius }, 2) => {
                let (s, c) = param[0].sin_cos();
                let nu = [c, s, 0.0];
                (linalg::axpy(&self.center, *radius, &nu), nu, *radius)
            }
            (Shape::Ball { radius }, _) => {
                let (st, ct) = param[0].sin_cos();
                let (sp, cp) = param[1].sin_cos();
                let nu = [st * cp, st * sp, ct];
                (linalg::axpy(&self.center, *radius, &nu), nu, radius * radius)
            }
            (Shape::Star(p), _) => {
                let t = param[0];
                let (s, c) = t.sin_cos();
                let r = p.value(t);
                let dr = p.derivative(t);
                let tangent = [dr * c - r * s, dr * s + r * c, 0.0];
                let speed = linalg::norm(&tangent);
                let nu = [tangent[1] / speed, -tangent[0] / speed, 0.0];
                ([self.center[0] + r * c, self.center[1] + r * s, 0.0], nu, speed)
            }
        }
    }

    /// Nearest boundary point, distance, and interior/boundary/exterior classification.
    pub fn project(&self, x: &[f64]) -> Result<Projection> {
        let y = self.check_point(x)?;
        Ok(self.project_vec(&y))
    }

    pub(crate) fn project_vec(&self, y: &Vec3) -> Projection {
        let w = linalg::sub(y, &self.center);
        let rw = linalg::norm(&w);
        let (point, distance, param) = match &self.shape {
            Shape::Ball { radius } => {
                let dir = if rw > 0.0 { linalg::scale(&w, 1.0 / rw) } else { [1.0, 0.0, 0.0] };
                let param = if self.dim == 2 {
                    [dir[1].atan2(dir[0]), 0.0]
                } else {
                    [dir[2].clamp(-1.0, 1.0).acos(), dir[1].atan2(dir[0])]
                };
                (linalg::axpy(&self.center, *radius, &dir), (rw - radius).abs(), param)
            }
            Shape::Star(_) => {
                let t = self.nearest_parameter(y);
                let (p, _, _) = self.boundary_point([t, 0.0]);
                (p, linalg::norm(&linalg::sub(&p, y)), [t, 0.0])
            }
        };
        let location = if distance < BOUNDARY_BAND {
            Location::Boundary
        } else if self.implicit(y) < 0.0 {
            Location::Interior
        } else {
            Location::Exterior
        };
        Projection { point, distance, param, location }
    }

    fn nearest_parameter(&self, y: &Vec3) -> f64 {
        let dist2 = |t: f64| {
            let (p, _, _) = self.boundary_point([t, 0.0]);
            let d = linalg::sub(&p, y);
            linalg::dot(&d, &d)
        };
        let m = 2048;
        let h = 2.0 * PI / m as f64;
        let mut best = (f64::INFINITY, 0.0);
        for k in 0..m {
            let t = k as f64 * h;
            let d = dist2(t);
            if d < best.0 {
                best = (d, t);
            }
        }
        // golden-section refinement on the bracketing cell
        let (mut a, mut b) = (best.1 - h, best.1 + h);
        let g = 0.5 * (5f64.sqrt() - 1.0);
        let mut c = b - g * (b - a);
        let mut d = a + g * (b - a);
        let (mut fc, mut fd) = (dist2(c), dist2(d));
        for _ in 0..80 {
            if fc < fd {
                b = d;
                d = c;
                fd = fc;
                c = b - g * (b - a);
                fc = dist2(c);
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + g * (b - a);
                fd = dist2(d);
            }
        }
        (0.5 * (a + b)).rem_euclid(2.0 * PI)
    }

    pub fn locate(&self, x: &[f64]) -> Result<Location> {
        Ok(self.project(x)?.location)
    }

    /// Strict interior membership outside the boundary band.
    pub fn contains(&self, x: &[f64]) -> bool {
        self.locate(x).map(|l| l == Location::Interior).unwrap_or(false)
    }

    /// Identity on the closure; points outside are moved along the ray from the
    /// center to the boundary.
    pub fn retract(&self, x: &[f64]) -> Result<Vec3> {
        let y = self.check_point(x)?;
        if self.implicit(&y) <= 0.0 {
            return Ok(y);
        }
        let w = linalg::sub(&y, &self.center);
        let rw = linalg::norm(&w);
        let dir = linalg::scale(&w, 1.0 / rw);
        let r = match &self.shape {
            Shape::Ball { radius } => *radius,
            Shape::Star(p) => p.value(w[1].atan2(w[0])),
        };
        Ok(linalg::axpy(&self.center, r, &dir))
    }

    /// Trapezoidal rule in the angle (2D) or Gauss-Legendre in `cos(theta)` times
    /// trapezoidal in azimuth (3D).
    pub fn boundary_rule(&self, n: usize) -> BoundaryQuadrature {
        let n = n.max(4);
        let mut q = BoundaryQuadrature { dim: self.dim, nodes: vec![], weights: vec![], normals: vec![] };
        if self.dim == 2 {
            let h = 2.0 * PI / n as f64;
            for k in 0..n {
                let (p, nu, ds) = self.boundary_point([k as f64 * h, 0.0]);
                q.nodes.push(p);
                q.normals.push(nu);
                q.weights.push(h * ds);
            }
        } else {
            let m = 2 * n;
            let h = 2.0 * PI / m as f64;
            for (ct, wt) in gl_interval(n, -1.0, 1.0) {
                let theta = ct.acos();
                for k in 0..m {
                    let (p, nu, ds) = self.boundary_point([theta, k as f64 * h]);
                    q.nodes.push(p);
                    q.normals.push(nu);
                    q.weights.push(wt * h * ds);
                }
            }
        }
        q
    }

    /// Boundary rule adapted to a target `x`: the plain rule when `x` is far from
    /// the boundary, otherwise a rule graded toward the nearest boundary point.
    /// On the boundary (within the band) the 2D rule splits the parameter circle
    /// at the singular point into two halves, each mapped by `s = pi u^3`.
    pub fn target_boundary_rule(&self, x: &[f64], n: usize) -> Result<BoundaryQuadrature> {
        let y = self.check_point(x)?;
        let proj = self.project_vec(&y);
        let n = n.max(4);
        let scale = self.max_extent();
        let far = 30.0 * scale / n as f64;
        if proj.distance >= far {
            return Ok(self.boundary_rule(n));
        }
        let mut q = BoundaryQuadrature { dim: self.dim, nodes: vec![], weights: vec![], normals: vec![] };
        if self.dim == 2 {
            let t0 = proj.param[0];
            let offsets: Vec<(f64, f64)> = if proj.location == Location::Boundary {
                gl_interval(n, 0.0, 1.0).map(|(u, w)| (PI * u * u * u, 3.0 * PI * u * u * w)).collect()
            } else {
                let speed = self.boundary_point([t0, 0.0]).2;
                let breaks = geometric_breaks(0.0, PI, 0.5 * proj.distance / speed);
                composite(&breaks, 16)
            };
            for &(s, w) in &offsets {
                for t in [t0 + s, t0 - s] {
                    let (p, nu, ds) = self.boundary_point([t, 0.0]);
                    q.nodes.push(p);
                    q.normals.push(nu);
                    q.weights.push(w * ds);
                }
            }
        } else {
            let r = self.radius().expect("3D domains are balls");
            let w = linalg::sub(&y, &self.center);
            let pole = if linalg::norm(&w) > 0.0 { w } else { [0.0, 0.0, 1.0] };
            let f = linalg::frame(&pole, 3);
            let breaks = geometric_breaks(0.0, PI, (0.5 * proj.distance / r).max(1e-3 / n as f64));
            let polar = composite(&breaks, 16);
            let m = 2 * n;
            let h = 2.0 * PI / m as f64;
            for &(th, wt) in &polar {
                let (st, ct) = th.sin_cos();
                for k in 0..m {
                    let (sp, cp) = (k as f64 * h).sin_cos();
                    let mut nu = linalg::scale(&f[0], ct);
                    nu = linalg::axpy(&nu, st * cp, &f[1]);
                    nu = linalg::axpy(&nu, st * sp, &f[2]);
                    q.nodes.push(linalg::axpy(&self.center, r, &nu));
                    q.normals.push(nu);
                    q.weights.push(wt * h * st * r * r);
                }
            }
        }
        Ok(q)
    }

    /// Polar-mapped product rule about the center: `n` Gauss-Legendre radial
    /// nodes times `2n` trapezoidal angles in 2D; in 3D `n` radial, `n`
    /// Gauss-Legendre in `cos(theta)` and `2n` azimuthal nodes.
    pub fn volume_rule(&self, n: usize) -> VolumeQuadrature {
        let n = n.max(4);
        let mut q = VolumeQuadrature { dim: self.dim, nodes: vec![], weights: vec![] };
        let radial: Vec<(f64, f64)> = gl_interval(n, 0.0, 1.0).collect();
        let m = 2 * n;
        let h = 2.0 * PI / m as f64;
        if self.dim == 2 {
            for k in 0..m {
                let t = k as f64 * h;
                let (s, c) = t.sin_cos();
                let rho = match &self.shape {
                    Shape::Ball { radius } => *radius,
                    Shape::Star(p) => p.value(t),
                };
                for &(u, wu) in &radial {
                    let r = u * rho;
                    q.nodes.push([self.center[0] + r * c, self.center[1] + r * s, 0.0]);
                    q.weights.push(wu * h * u * rho * rho);
                }
            }
        } else {
            let r0 = self.radius().expect("3D domains are balls");
            for (ct, wt) in gl_interval(n, -1.0, 1.0) {
                let st = (1.0 - ct * ct).sqrt();
                for k in 0..m {
                    let (sp, cp) = (k as f64 * h).sin_cos();
                    let dir = [st * cp, st * sp, ct];
                    for &(u, wu) in &radial {
                        let r = u * r0;
                        q.nodes.push(linalg::axpy(&self.center, r, &dir));
                        q.weights.push(wu * wt * h * r * r * r0);
                    }
                }
            }
        }
        q
    }

    /// Polar rule about an interior point; rejects boundary and exterior points.
    pub fn singular_volume_rule(&self, x: &[f64], n: usize) -> Result<VolumeQuadrature> {
        let y = self.check_point(x)?;
        match self.project_vec(&y).location {
            Location::Interior => Ok(self.polar_rule_vec(&y, n, 0.0)),
            Location::Boundary => Err(Error::NearBoundary(x.to_vec())),
            Location::Exterior => Err(Error::NotInterior(x.to_vec())),
        }
    }

    /// Polar rule about any point off the boundary band, integrating over
    /// `Omega \ B(x, excluded)`.
    pub fn polar_rule(&self, x: &[f64], n: usize, excluded: f64) -> Result<VolumeQuadrature> {
        let y = self.check_point(x)?;
        if self.project_vec(&y).location == Location::Boundary {
            return Err(Error::NearBoundary(x.to_vec()));
        }
        Ok(self.polar_rule_vec(&y, n, excluded))
    }

    pub(crate) fn polar_rule_vec(&self, x: &Vec3, n: usize, excluded: f64) -> VolumeQuadrature {
        let order = order_for(n);
        let mut polar = self.polar_frame(x);
        if polar.view.is_some() {
            polar.refine(order);
        }
        let mut angular = Vec::new();
        for p in &polar.panels {
            angular.extend(p.rule(order));
        }
        let mut q = VolumeQuadrature { dim: self.dim, nodes: vec![], weights: vec![] };
        let mut push_ray = |dir: &Vec3, wdir: f64| {
            for (r1, r2) in polar.intervals(dir) {
                let a = r1.max(excluded);
                if r2 <= a {
                    continue;
                }
                for (r, wr) in radial_rule(a, r2, order) {
                    q.nodes.push(linalg::axpy(x, r, dir));
                    q.weights.push(wdir * wr * if self.dim == 2 { r } else { r * r });
                }
            }
        };
        if self.dim == 2 {
            for &(t, wt) in &angular {
                push_ray(&polar.direction(t, 0.0), wt);
            }
        } else {
            let m = 2 * order;
            let h = 2.0 * PI / m as f64;
            for &(t, wt) in &angular {
                let st = t.sin();
                for k in 0..m {
                    push_ray(&polar.direction(t, k as f64 * h), wt * h * st);
                }
            }
        }
        q
    }

    /// Angular panels and ray casting about `x`.
    fn polar_frame(&self, x: &Vec3) -> PolarFrame<'_> {
        let proj = self.project_vec(x);
        let scale = self.max_extent();
        let d = proj.distance;
        // rays nearly parallel to the boundary vary on the angular scale sqrt(d)
        let grazing = 0.5 * (d / scale).sqrt();
        let toward = linalg::sub(&proj.point, x);
        let pole = if linalg::norm(&toward) > 0.0 { toward } else { [1.0, 0.0, 0.0] };
        let frame = linalg::frame(&pole, self.dim);
        let interior = proj.location == Location::Interior;
        let half_pi = 0.5 * PI;
        let view = match self.shape {
            Shape::Star(_) => Some(self.star_view(x)),
            Shape::Ball { .. } => None,
        };

        let mut specials: Vec<(f64, Feature)> = match (&self.shape, interior, self.dim) {
            (Shape::Ball { .. }, true, 2) => vec![
                (-PI, Feature::Smooth),
                (-half_pi, Feature::Graded(grazing)),
                (half_pi, Feature::Graded(grazing)),
                (PI, Feature::Smooth),
            ],
            (Shape::Ball { .. }, true, _) => {
                vec![(0.0, Feature::Smooth), (half_pi, Feature::Graded(grazing)), (PI, Feature::Smooth)]
            }
            (Shape::Ball { radius }, false, dim) => {
                let dist_c = linalg::norm(&linalg::sub(x, &self.center));
                let tmax = (radius / dist_c).clamp(-1.0, 1.0).asin();
                if dim == 2 {
                    vec![(-tmax, Feature::Tangent(grazing)), (0.0, Feature::Smooth), (tmax, Feature::Tangent(grazing))]
                } else {
                    vec![(0.0, Feature::Smooth), (tmax, Feature::Tangent(grazing))]
                }
            }
            (Shape::Star(_), _, _) => {
                let mut v = vec![
                    (-PI, Feature::Smooth),
                    (-half_pi, Feature::Graded(grazing)),
                    (half_pi, Feature::Graded(grazing)),
                    (PI, Feature::Smooth),
                ];
                let base = frame[0][1].atan2(frame[0][0]);
                for t in view.as_ref().expect("star view").tangent_angles() {
                    let t = wrap(t - base);
                    v.retain(|(s, _)| (s - t).abs() > 1e-12 || s.abs() == PI);
                    v.push((t, Feature::Tangent(grazing)));
                }
                v
            }
        };
        specials.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut panels = Vec::new();
        for w in specials.windows(2) {
            let ((a, fa), (b, fb)) = (w[0], w[1]);
            if b - a < 1e-14 {
                continue;
            }
            let mid = 0.5 * (a + b);
            panels.extend(half_panel(a, mid, fa));
            let mut right = half_panel(b, mid, fb);
            right.reverse();
            panels.extend(right);
        }
        PolarFrame { domain: self, x: *x, frame, view, panels }
    }

    /// Adaptive Gauss-Kronrod integration of the vector-valued `g` (length `m`)
    /// over `Omega \ B(x, excluded)` in polar coordinates about `x` (2D).
    ///
    /// Suited to densities with kinks, where fixed rules lose their order.
    /// `kinks` lists lines `(point, normal)` across which `g` has a derivative
    /// jump. Their crossings become radial breakpoints, and the directions
    /// parallel to them or through their boundary intersections become angular
    /// breakpoints; a fixed-order error estimate can otherwise accept a panel
    /// whose kink sits where the embedded rules happen to agree. Returns the
    /// integral and the outer error estimate.
    pub fn adaptive_polar<G>(
        &self,
        x: &[f64],
        excluded: f64,
        kinks: &[([f64; 2], [f64; 2])],
        m: usize,
        tol: f64,
        mut g: G,
    ) -> Result<(Vec<Complex64>, f64)>
    where
        G: FnMut(&[f64]) -> Vec<Complex64>,
    {
        if self.dim != 2 {
            return Err(Error::InvalidArgument("adaptive polar integration is implemented in two dimensions".into()));
        }
        let y = self.check_point(x)?;
        if self.project_vec(&y).location == Location::Boundary {
            return Err(Error::NearBoundary(x.to_vec()));
        }
        let mut polar = self.polar_frame(&y);
        let base = polar.frame[0][1].atan2(polar.frame[0][0]);
        for (p, nu) in kinks {
            let mut dirs = vec![[-nu[1], nu[0]], [nu[1], -nu[0]]];
            let side = |t: f64| {
                let (b, _, _) = self.boundary_point([t, 0.0]);
                (b[0] - p[0]) * nu[0] + (b[1] - p[1]) * nu[1]
            };
            let m = 512;
            let h = 2.0 * PI / m as f64;
            for k in 0..m {
                let (mut a, mut b) = (k as f64 * h, (k + 1) as f64 * h);
                if (side(a) < 0.0) == (side(b) < 0.0) {
                    continue;
                }
                let neg = side(a) < 0.0;
                for _ in 0..60 {
                    let mid = 0.5 * (a + b);
                    if (side(mid) < 0.0) == neg {
                        a = mid;
                    } else {
                        b = mid;
                    }
                }
                let (q, _, _) = self.boundary_point([0.5 * (a + b), 0.0]);
                dirs.push([q[0] - y[0], q[1] - y[1]]);
            }
            for d in dirs {
                polar.split_at(wrap(d[1].atan2(d[0]) - base));
            }
        }
        let breaks: Vec<f64> = (0..=polar.panels.len()).map(|k| k as f64).collect();
        let inner_tol = 0.1 * tol / (2.0 * PI);
        let zero = vec![Complex64::new(0.0, 0.0); m];
        let outer = |s: f64| {
            let k = (s.floor() as usize).min(polar.panels.len() - 1);
            let (t, jac) = polar.panels[k].map(s - k as f64);
            let dir = polar.direction(t, 0.0);
            let mut acc = zero.clone();
            for (r1, r2) in polar.intervals(&dir) {
                let a = r1.max(excluded);
                if r2 <= a {
                    continue;
                }
                let mut rb = vec![a];
                if a == 0.0 {
                    let mut r = r2 / 1024.0;
                    while r < r2 {
                        rb.push(r);
                        r *= 2.0;
                    }
                } else {
                    let mut r = 2.0 * a;
                    while r < r2 {
                        rb.push(r);
                        r *= 2.0;
                    }
                }
                rb.push(r2);
                for (p, nu) in kinks {
                    let along = dir[0] * nu[0] + dir[1] * nu[1];
                    let rs = ((p[0] - y[0]) * nu[0] + (p[1] - y[1]) * nu[1]) / along;
                    if along != 0.0 && rs > a && rs < r2 {
                        rb.push(rs);
                    }
                }
                rb.sort_by(|u, v| u.total_cmp(v));
                rb.dedup();
                let (v, _) = adaptive_gk(
                    |r| {
                        let p = linalg::axpy(&y, r, &dir);
                        let mut v = g(&p[..2]);
                        for c in v.iter_mut() {
                            *c *= r;
                        }
                        v
                    },
                    &rb,
                    m,
                    inner_tol,
                    400,
                );
                for (c, vi) in acc.iter_mut().zip(v) {
                    *c += vi * jac;
                }
            }
            acc
        };
        Ok(adaptive_gk(outer, &breaks, m, tol, 2000))
    }
    /// Parameter intervals `[r1, r2]` with `x + r dir` inside the domain, `r >= 0`.
    pub(crate) fn ray_intervals(&self, x: &Vec3, dir: &Vec3) -> Vec<(f64, f64)> {
        match &self.shape {
            Shape::Ball { radius } => {
                let w = linalg::sub(x, &self.center);
                let b = linalg::dot(dir, &w);
                let c = linalg::dot(&w, &w) - radius * radius;
                let disc = b * b - c;
                if disc <= 0.0 {
                    return vec![];
                }
                let sq = disc.sqrt();
                let qv = -(b + if b >= 0.0 { sq } else { -sq });
                let (mut r1, mut r2) = (qv, c / qv);
                if r1 > r2 {
                    std::mem::swap(&mut r1, &mut r2);
                }
                if r2 <= 0.0 {
                    return vec![];
                }
                vec![(r1.max(0.0), r2)]
            }
            Shape::Star(_) => self.star_ray_intervals(x, dir),
        }
    }

    fn star_ray_intervals(&self, x: &Vec3, dir: &Vec3) -> Vec<(f64, f64)> {
        self.star_view(x).intervals(dir[1].atan2(dir[0]))
    }

    /// Boundary seen from `x`: the boundary parameter is sampled and the
    /// critical points of the viewing angle (tangent rays) are inserted, so the
    /// angle is monotone between consecutive samples.
    fn star_view(&self, x: &Vec3) -> StarView<'_> {
        let m = 1024;
        let h = 2.0 * PI / m as f64;
        let cross = |t: f64| {
            let (p, nu, _) = self.boundary_point([t, 0.0]);
            // tangent is (-nu_2, nu_1)
            let w = linalg::sub(&p, x);
            w[0] * nu[0] + w[1] * nu[1]
        };
        let mut ts = Vec::with_capacity(m + 8);
        let mut critical = vec![];
        let mut prev = cross(0.0);
        for k in 0..m {
            let t = k as f64 * h;
            ts.push(t);
            let cur = cross(t + h);
            if (prev < 0.0) != (cur < 0.0) {
                let (mut a, mut b) = (t, t + h);
                let neg = prev < 0.0;
                for _ in 0..60 {
                    let mid = 0.5 * (a + b);
                    if (cross(mid) < 0.0) == neg {
                        a = mid;
                    } else {
                        b = mid;
                    }
                }
                let tc = 0.5 * (a + b);
                ts.push(tc);
                critical.push(tc);
            }
            prev = cur;
        }
        ts.push(2.0 * PI);
        let angle = |t: f64| {
            let (p, _, _) = self.boundary_point([t, 0.0]);
            (p[1] - x[1]).atan2(p[0] - x[0])
        };
        let mut alpha = Vec::with_capacity(ts.len());
        let mut last = angle(ts[0]);
        alpha.push(last);
        for &t in &ts[1..] {
            let a = angle(t);
            last += wrap(a - last);
            alpha.push(last);
        }
        StarView { domain: self, x: *x, ts, alpha, critical }
    }
}

fn wrap(a: f64) -> f64 {
    (a + PI).rem_euclid(2.0 * PI) - PI
}

struct StarView<'a> {
    domain: &'a Domain,
    x: Vec3,
    ts: Vec<f64>,
    alpha: Vec<f64>,
    critical: Vec<f64>,
}

impl StarView<'_> {
    fn angle_at(&self, t: f64, near: f64) -> f64 {
        let (p, _, _) = self.domain.boundary_point([t, 0.0]);
        let a = (p[1] - self.x[1]).atan2(p[0] - self.x[0]);
        near + wrap(a - near)
    }

    /// Absolute angles of the rays from `x` tangent to the boundary.
    fn tangent_angles(&self) -> Vec<f64> {
        self.critical.iter().map(|&t| self.angle_at(t, 0.0)).collect()
    }

    /// Inside intervals along the ray at absolute angle `phi`.
    fn intervals(&self, phi: f64) -> Vec<(f64, f64)> {
        let two_pi = 2.0 * PI;
        let mut hits: Vec<(f64, bool)> = vec![];
        for i in 0..self.ts.len() - 1 {
            let (a0, a1) = (self.alpha[i], self.alpha[i + 1]);
            let (lo, hi) = (a0.min(a1), a0.max(a1));
            let mut k = ((lo - phi) / two_pi).ceil();
            while phi + k * two_pi <= hi {
                let target = phi + k * two_pi;
                k += 1.0;
                if target == a1 && i + 2 < self.ts.len() {
                    continue;
                }
                let (mut ta, mut tb) = (self.ts[i], self.ts[i + 1]);
                let increasing = a1 > a0;
                for _ in 0..60 {
                    let mid = 0.5 * (ta + tb);
                    let am = self.angle_at(mid, a0);
                    if (am < target) == increasing {
                        ta = mid;
                    } else {
                        tb = mid;
                    }
                }
                let t = 0.5 * (ta + tb);
                let (p, nu, _) = self.domain.boundary_point([t, 0.0]);
                let w = linalg::sub(&p, &self.x);
                let r = linalg::norm(&w);
                // entering when the ray runs against the outward normal
                hits.push((r, linalg::dot(&w, &nu) < 0.0));
            }
        }
        hits.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut out = vec![];
        let mut from = if self.domain.implicit(&self.x) < 0.0 { Some(0.0) } else { None };
        for (r, entering) in hits {
            match (from, entering) {
                (None, true) => from = Some(r),
                (Some(r0), false) => {
                    out.push((r0, r));
                    from = None;
                }
                _ => {}
            }
        }
        out
    }
}



#[derive(Debug, Clone, Copy)]
enum Feature {
    Smooth,
    /// analytic but varying on the given angular scale
    Graded(f64),
    /// square-root endpoint behaviour (ray tangent to the boundary), with
    /// the angular scale of the nearby structure
    Tangent(f64),
}

const MAX_ANGULAR_PANEL: f64 = PI / 8.0;

/// Angular panel; `sqrt_at` marks an endpoint with square-root behaviour.
#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    sqrt_at: Option<f64>,
}

impl Panel {
    /// Angle and Jacobian for a panel coordinate `u` in `[0, 1]`.
    fn map(&self, u: f64) -> (f64, f64) {
        match self.sqrt_at {
            // t = end + w u^2 turns sqrt(t - end) into a linear function of u
            Some(end) => {
                let w = if end == self.a { self.b - self.a } else { self.a - self.b };
                (end + w * u * u, 2.0 * w.abs() * u)
            }
            None => (self.a + (self.b - self.a) * u, self.b - self.a),
        }
    }

    fn rule(&self, order: usize) -> Vec<(f64, f64)> {
        gl_interval(order, 0.0, 1.0)
            .map(|(u, w)| {
                let (t, j) = self.map(u);
                (t, w * j)
            })
            .collect()
    }
}

fn plain_panels(breaks: &[f64]) -> Vec<Panel> {
    let mut out = vec![];
    for w in breaks.windows(2) {
        let (lo, hi) = (w[0].min(w[1]), w[0].max(w[1]));
        let k = ((hi - lo) / MAX_ANGULAR_PANEL).ceil().max(1.0) as usize;
        for i in 0..k {
            let a = lo + (hi - lo) * i as f64 / k as f64;
            let b = lo + (hi - lo) * (i + 1) as f64 / k as f64;
            out.push(Panel { a, b, sqrt_at: None });
        }
    }
    out
}

/// Panels on the half interval between the feature at `end` and `mid`,
/// ordered from `end` toward `mid`.
fn half_panel(end: f64, mid: f64, feature: Feature) -> Vec<Panel> {
    let mut out = match feature {
        Feature::Smooth => plain_panels(&[end, mid]),
        Feature::Graded(h) => {
            let b = geometric_breaks(end, mid, h);
            b.windows(2).flat_map(plain_panels).collect()
        }
        Feature::Tangent(h) => {
            let b = geometric_breaks(end, mid, h);
            let mut v = vec![Panel { a: end.min(b[1]), b: end.max(b[1]), sqrt_at: Some(end) }];
            v.extend(b[1..].windows(2).flat_map(plain_panels));
            v
        }
    };
    // panels inside each geometric level come out ascending; order the whole list from `end`
    if mid < end {
        out.sort_by(|p, q| q.a.total_cmp(&p.a));
    } else {
        out.sort_by(|p, q| p.a.total_cmp(&q.a));
    }
    out
}

struct PolarFrame<'a> {
    domain: &'a Domain,
    x: Vec3,
    frame: [Vec3; 3],
    view: Option<StarView<'a>>,
    panels: Vec<Panel>,
}

impl PolarFrame<'_> {
    /// Unit direction at polar angle `t` from the pole and azimuth `p` (3D).
    fn direction(&self, t: f64, p: f64) -> Vec3 {
        let (st, ct) = t.sin_cos();
        if self.domain.dim == 2 {
            linalg::axpy(&linalg::scale(&self.frame[0], ct), st, &self.frame[1])
        } else {
            let (sp, cp) = p.sin_cos();
            let mut dir = linalg::scale(&self.frame[0], ct);
            dir = linalg::axpy(&dir, st * cp, &self.frame[1]);
            linalg::axpy(&dir, st * sp, &self.frame[2])
        }
    }

    /// Makes `t` a panel endpoint.
    fn split_at(&mut self, t: f64) {
        let Some(k) = self.panels.iter().position(|p| p.a < t && t < p.b) else { return };
        let p = self.panels[k];
        let (left, right) = match p.sqrt_at {
            Some(end) if end == p.a => (Panel { b: t, ..p }, Panel { a: t, sqrt_at: None, ..p }),
            Some(_) => (Panel { b: t, sqrt_at: None, ..p }, Panel { a: t, ..p }),
            None => (Panel { b: t, ..p }, Panel { a: t, ..p }),
        };
        self.panels[k] = left;
        self.panels.insert(k + 1, right);
    }

    /// Bisects angular panels until the radial moments of the chord lengths
    /// agree with the two halves; rays grazing a concave arc beyond the first
    /// exit create near-singular angular behaviour inside an otherwise plain panel.
    fn refine(&mut self, order: usize) {
        let moments = |t: f64| -> [f64; 3] {
            let mut m = [0.0; 3];
            for (a, b) in self.intervals(&self.direction(t, 0.0)) {
                m[0] += b - a;
                m[1] += 0.5 * (b * b - a * a);
                m[2] += (b * b * b - a * a * a) / 3.0;
            }
            m
        };
        let integrate = |p: &Panel| -> [f64; 3] {
            let mut acc = [0.0; 3];
            for (t, w) in p.rule(order) {
                let m = moments(t);
                for k in 0..3 {
                    acc[k] += w * m[k];
                }
            }
            acc
        };
        let scale = self.domain.max_extent();
        let tol = 1e-14 * scale * scale;
        let mut out = Vec::with_capacity(self.panels.len());
        let mut stack: Vec<(Panel, [f64; 3], usize)> =
            self.panels.iter().rev().map(|p| (*p, integrate(p), 0)).collect();
        while let Some((p, whole, depth)) = stack.pop() {
            let mid = 0.5 * (p.a + p.b);
            let (left, right) = match p.sqrt_at {
                Some(end) if end == p.a => (Panel { b: mid, ..p }, Panel { a: mid, sqrt_at: None, ..p }),
                Some(_) => (Panel { b: mid, sqrt_at: None, ..p }, Panel { a: mid, ..p }),
                None => (Panel { b: mid, ..p }, Panel { a: mid, ..p }),
            };
            let (il, ir) = (integrate(&left), integrate(&right));
            let err = (0..3).map(|k| (il[k] + ir[k] - whole[k]).abs()).fold(0.0, f64::max);
            if err <= tol || depth >= 30 {
                out.push(p);
            } else {
                stack.push((right, ir, depth + 1));
                stack.push((left, il, depth + 1));
            }
        }
        self.panels = out;
    }

    fn intervals(&self, dir: &Vec3) -> Vec<(f64, f64)> {
        match &self.view {
            Some(v) => v.intervals(dir[1].atan2(dir[0])),
            None => self.domain.ray_intervals(&self.x, dir),
        }
    }
}
