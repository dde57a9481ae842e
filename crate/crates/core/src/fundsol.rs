//! Closed-form fundamental solutions and their derivatives.
//!
//! Three families are provided:
//! * the Laplacian, `S_n`;
//! * purely second-order operators `div(a2 grad)`, `S_n(T^{-1} x) / sqrt(det a2)`
//!   with `a2 = T T^t`;
//! * `Delta - kappa^2`, whose fundamental solution is `-K_0(kappa |x|) / (2 pi)`
//!   in the plane and `-exp(-kappa |x|) / (4 pi |x|)` in space.
//!
//! The gradient splits as `d_j S = k_{j,1} + k_{j,2}` where `k_{j,1}` is the
//! gradient of the principal-part fundamental solution (odd, homogeneous of
//! degree `-(n-1)`) and `k_{j,2}` is whatever is left.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::bessel;
use crate::error::{Error, Result};
use crate::linalg::{self, Mat3, Vec3};
use crate::operators::{check_dim, cholesky, OperatorCoefficients};

/// Surface measure of the unit sphere in `R^n`.
pub fn sphere_measure(n: usize) -> f64 {
    match n {
        2 => 2.0 * PI,
        3 => 4.0 * PI,
        _ => panic!("unsupported dimension {n}"),
    }
}

/// Fundamental solution of the Laplacian: `ln|x| / s_2` or `|x|^{2-n} / ((2-n) s_n)`.
pub fn laplace_sn(n: usize, x: &[f64]) -> Result<f64> {
    check_dim(n)?;
    if x.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: x.len() });
    }
    let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    if r == 0.0 {
        return Err(Error::SingularPoint);
    }
    Ok(laplace_radial(n, r))
}

fn laplace_radial(n: usize, r: f64) -> f64 {
    if n == 2 {
        r.ln() / (2.0 * PI)
    } else {
        -1.0 / (4.0 * PI * r)
    }
}

/// `S_n(T^{-1} x) / sqrt(det a2)` for the principal part of `op`.
pub fn principal_anisotropic(op: &OperatorCoefficients, x: &[f64]) -> Result<f64> {
    let n = op.dim();
    if x.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: x.len() });
    }
    let t = cholesky(op.a2_array(), n)?;
    let tinv = linalg::lower_triangular_inverse(&t, n);
    let y = linalg::mat_vec(&tinv, &linalg::to_vec3(x));
    let det_sqrt: f64 = (0..n).map(|i| t[i][i]).product();
    Ok(laplace_sn(n, &y[..n])? / det_sqrt)
}

/// Fundamental solution of `Delta - kappa^2`.
pub fn modified_helmholtz(n: usize, kappa: f64, x: &[f64]) -> Result<f64> {
    check_dim(n)?;
    if !(kappa > 0.0) {
        return Err(Error::InvalidArgument(format!("kappa must be positive, got {kappa}")));
    }
    if x.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: x.len() });
    }
    let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    if r == 0.0 {
        return Err(Error::SingularPoint);
    }
    Ok(helmholtz_radial(n, kappa, r)[0])
}

/// `[g(r), g'(r), g''(r)]` for the radial profile of the modified Helmholtz kernel.
fn helmholtz_radial(n: usize, kappa: f64, r: f64) -> [f64; 3] {
    let kr = kappa * r;
    if n == 2 {
        let k0 = bessel::k0(kr);
        let k1 = bessel::k1(kr);
        let g = -k0 / (2.0 * PI);
        let gp = kappa * k1 / (2.0 * PI);
        // g'' + g'/r = kappa^2 g
        let gpp = kappa * kappa * g - gp / r;
        [g, gp, gpp]
    } else {
        let e = (-kr).exp() / (4.0 * PI);
        let g = -e / r;
        let gp = e * (kr + 1.0) / (r * r);
        let gpp = -e * (kr * kr + 2.0 * kr + 2.0) / (r * r * r);
        [g, gp, gpp]
    }
}

/// Which closed form backs a [`FundamentalSolution`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Laplace,
    Principal,
    ModifiedHelmholtz,
}

impl Kind {
    pub fn name(&self) -> &'static str {
        match self {
            Kind::Laplace => "laplace",
            Kind::Principal => "principal",
            Kind::ModifiedHelmholtz => "modified-helmholtz",
        }
    }
}

impl std::str::FromStr for Kind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "laplace" => Ok(Kind::Laplace),
            "principal" | "anisotropic-principal" => Ok(Kind::Principal),
            "modified-helmholtz" => Ok(Kind::ModifiedHelmholtz),
            other => Err(Error::InvalidArgument(format!("unknown fundamental solution kind '{other}'"))),
        }
    }
}

/// An evaluable fundamental solution `S_a` with its first and second derivatives.
#[derive(Debug, Clone)]
pub struct FundamentalSolution {
    op: OperatorCoefficients,
    kind: Kind,
    dim: usize,
    kappa: f64,
    t: Mat3,
    tinv: Mat3,
    /// `a2^{-1}`
    b: Mat3,
    /// `1 / (s_n sqrt(det a2))`
    c_hom: f64,
    sqrt_det: f64,
}

impl FundamentalSolution {
    pub fn laplace(n: usize) -> Result<Self> {
        Self::build(OperatorCoefficients::laplacian(n)?, Kind::Laplace, 0.0)
    }

    pub fn modified_helmholtz(n: usize, kappa: f64) -> Result<Self> {
        if !(kappa > 0.0) {
            return Err(Error::InvalidArgument(format!("kappa must be positive, got {kappa}")));
        }
        Self::build(OperatorCoefficients::modified_helmholtz(n, kappa)?, Kind::ModifiedHelmholtz, kappa)
    }

    /// Fundamental solution of a purely second-order operator.
    pub fn principal(op: OperatorCoefficients) -> Result<Self> {
        if op.has_lower_order_terms() {
            return Err(Error::UnsupportedOperator(
                "anisotropic principal parts are only supported with a1 = 0 and a0 = 0".into(),
            ));
        }
        Self::build(op, Kind::Principal, 0.0)
    }

    /// Pick the closed form matching `op`.
    pub fn from_operator(op: OperatorCoefficients) -> Result<Self> {
        let n = op.dim();
        let identity = (0..n).all(|l| (0..n).all(|j| op.a2(l, j) == if l == j { 1.0 } else { 0.0 }));
        let no_drift = op.a1().iter().all(|c| *c == Complex64::new(0.0, 0.0));
        let a0 = op.a0();
        if !no_drift {
            return Err(Error::UnsupportedOperator("first-order terms have no closed form here".into()));
        }
        if a0 == Complex64::new(0.0, 0.0) {
            if identity {
                Self::build(op, Kind::Laplace, 0.0)
            } else {
                Self::build(op, Kind::Principal, 0.0)
            }
        } else if identity && a0.im == 0.0 && a0.re < 0.0 {
            let kappa = (-a0.re).sqrt();
            Self::build(op, Kind::ModifiedHelmholtz, kappa)
        } else {
            Err(Error::UnsupportedOperator(format!(
                "zeroth-order coefficient {a0} requires a2 = I and a0 = -kappa^2 < 0"
            )))
        }
    }

    /// Construct from a kind name and the operator; `kappa` is used only for
    /// the modified Helmholtz family.
    pub fn with_kind(kind: Kind, op: OperatorCoefficients, kappa: f64) -> Result<Self> {
        match kind {
            Kind::Laplace => Self::laplace(op.dim()),
            Kind::ModifiedHelmholtz => Self::modified_helmholtz(op.dim(), kappa),
            Kind::Principal => Self::principal(op),
        }
    }

    fn build(op: OperatorCoefficients, kind: Kind, kappa: f64) -> Result<Self> {
        let n = op.dim();
        let t = cholesky(op.a2_array(), n)?;
        let tinv = linalg::lower_triangular_inverse(&t, n);
        let b = linalg::gram_inverse(&tinv, n);
        let sqrt_det: f64 = (0..n).map(|i| t[i][i]).product();
        Ok(Self { op, kind, dim: n, kappa, t, tinv, b, c_hom: 1.0 / (sphere_measure(n) * sqrt_det), sqrt_det })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kind(&self) -> Kind {
        self.kind
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn operator(&self) -> &OperatorCoefficients {
        &self.op
    }

    /// The principal factor `T` with `T T^t = a2`.
    pub fn factor(&self) -> Vec<Vec<f64>> {
        (0..self.dim).map(|l| self.t[l][..self.dim].to_vec()).collect()
    }

    fn point(&self, x: &[f64]) -> Result<Vec3> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: x.len() });
        }
        let z = linalg::to_vec3(x);
        if linalg::dot(&z, &z) == 0.0 {
            return Err(Error::SingularPoint);
        }
        Ok(z)
    }

    pub fn eval(&self, x: &[f64]) -> Result<Complex64> {
        let z = self.point(x)?;
        Ok(Complex64::new(self.value(&z), 0.0))
    }

    pub fn grad(&self, x: &[f64]) -> Result<Vec<Complex64>> {
        let z = self.point(x)?;
        let g = self.gradient(&z);
        Ok(g[..self.dim].iter().map(|v| Complex64::new(*v, 0.0)).collect())
    }

    pub fn hess(&self, x: &[f64]) -> Result<Vec<Vec<Complex64>>> {
        let z = self.point(x)?;
        let h = self.hessian(&z);
        Ok((0..self.dim).map(|l| (0..self.dim).map(|j| Complex64::new(h[l][j], 0.0)).collect()).collect())
    }

    /// `(k_{j,1}(x), k_{j,2}(x))` with `k_{j,1} + k_{j,2} = d_j S_a(x)`.
    pub fn gradient_split(&self, j: usize, x: &[f64]) -> Result<(Complex64, Complex64)> {
        let z = self.point(x)?;
        if j >= self.dim {
            return Err(Error::InvalidArgument(format!("component {j} out of range")));
        }
        let k1 = self.homogeneous_gradient(&z)[j];
        let full = self.gradient(&z)[j];
        Ok((Complex64::new(k1, 0.0), Complex64::new(full - k1, 0.0)))
    }

    // Real-valued evaluators on padded points; callers guarantee z != 0.

    pub(crate) fn value(&self, z: &Vec3) -> f64 {
        match self.kind {
            Kind::Laplace => laplace_radial(self.dim, linalg::norm(z)),
            Kind::Principal => {
                let y = linalg::mat_vec(&self.tinv, z);
                laplace_radial(self.dim, linalg::norm(&y)) / self.sqrt_det
            }
            Kind::ModifiedHelmholtz => helmholtz_radial(self.dim, self.kappa, linalg::norm(z))[0],
        }
    }

    pub(crate) fn gradient(&self, z: &Vec3) -> Vec3 {
        match self.kind {
            Kind::Laplace | Kind::Principal => self.homogeneous_gradient(z),
            Kind::ModifiedHelmholtz => {
                let r = linalg::norm(z);
                let g = helmholtz_radial(self.dim, self.kappa, r);
                linalg::scale(z, g[1] / r)
            }
        }
    }

    pub(crate) fn hessian(&self, z: &Vec3) -> Mat3 {
        match self.kind {
            Kind::Laplace | Kind::Principal => self.homogeneous_hessian(z),
            Kind::ModifiedHelmholtz => {
                let r = linalg::norm(z);
                let g = helmholtz_radial(self.dim, self.kappa, r);
                let mut h = [[0.0; 3]; 3];
                let a = g[2] / (r * r) - g[1] / (r * r * r);
                for l in 0..self.dim {
                    for j in 0..self.dim {
                        h[l][j] = a * (z[l] * z[j]);
                    }
                    h[l][l] += g[1] / r;
                }
                h
            }
        }
    }

    fn quadratic_form(&self, z: &Vec3) -> (f64, Vec3) {
        let bz = linalg::mat_vec(&self.b, z);
        (linalg::dot(z, &bz), bz)
    }

    fn inverse_power(&self, q: f64) -> f64 {
        // q^{-n/2}
        if self.dim == 2 {
            1.0 / q
        } else {
            1.0 / (q * q.sqrt())
        }
    }

    /// `k_{.,1}(z) = |T^{-1} z|^{-n} a2^{-1} z / (s_n sqrt(det a2))`.
    pub(crate) fn homogeneous_gradient(&self, z: &Vec3) -> Vec3 {
        let (q, bz) = self.quadratic_form(z);
        linalg::scale(&bz, self.c_hom * self.inverse_power(q))
    }

    /// Jacobian of [`Self::homogeneous_gradient`], i.e. `d_l k_{j,1}`.
    pub(crate) fn homogeneous_hessian(&self, z: &Vec3) -> Mat3 {
        let (q, bz) = self.quadratic_form(z);
        let p = self.c_hom * self.inverse_power(q);
        let nf = self.dim as f64;
        let mut h = [[0.0; 3]; 3];
        for l in 0..self.dim {
            for j in 0..self.dim {
                h[l][j] = p * (self.b[l][j] - nf * (bz[l] * bz[j]) / q);
            }
        }
        h
    }

    /// `d_l k_{j,2}(z)`: the full Hessian minus the homogeneous part, from the
    /// radial profile of `S_a - S_Laplace` so no singular terms cancel.
    pub(crate) fn remainder_hessian(&self, z: &Vec3) -> Mat3 {
        let mut h = [[0.0; 3]; 3];
        if self.kind != Kind::ModifiedHelmholtz {
            return h;
        }
        let r = linalg::norm(z);
        let k = self.kappa;
        let s = k * r;
        // second radial derivative and first radial derivative over r
        let (d2, d1_over_r) = if self.dim == 2 {
            let m = bessel::k1_minus_inverse(s);
            let m_over_s = m / s;
            (k * k * (-bessel::k0(s) - m_over_s) / (2.0 * PI), k * k * m_over_s / (2.0 * PI))
        } else {
            let (_, dphi, ddphi) = screened_profile(s);
            let c = k * k * k / (4.0 * PI);
            (c * ddphi, c * dphi / s)
        };
        for l in 0..self.dim {
            for j in 0..self.dim {
                h[l][j] = (d2 - d1_over_r) * (z[l] * z[j]) / (r * r);
            }
            h[l][l] += d1_over_r;
        }
        h
    }

    pub(crate) fn has_remainder(&self) -> bool {
        self.kind == Kind::ModifiedHelmholtz
    }
}

/// `phi(s) = (1 - e^{-s}) / s` and its first two derivatives.
fn screened_profile(s: f64) -> (f64, f64, f64) {
    if s < 0.5 {
        let (mut p, mut dp, mut ddp) = (0.0, 0.0, 0.0);
        let mut fact = 1.0; // (k+1)!
        let mut pow = 1.0; // (-s)^k
        for k in 0..30 {
            let kf = k as f64;
            fact *= kf + 1.0;
            p += pow / fact;
            if k >= 1 {
                dp += -kf * (pow / -s) / fact;
            }
            if k >= 2 {
                ddp += kf * (kf - 1.0) * (pow / (s * s)) / fact;
            }
            pow *= -s;
        }
        (p, dp, ddp)
    } else {
        let e = (-s).exp();
        let one = -(-s).exp_m1();
        (one / s, e / s - one / (s * s), -e / s - 2.0 * e / (s * s) + 2.0 * one / (s * s * s))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn re(v: Result<Complex64>) -> f64 {
        v.unwrap().re
    }

    #[test]
    fn laplace_values() {
        assert_eq!(laplace_sn(2, &[1.0, 0.0]).unwrap(), 0.0);
        let e = std::f64::consts::E;
        assert!((laplace_sn(2, &[0.0, e]).unwrap() - 1.0 / (2.0 * PI)).abs() < 1e-15);
        assert!((laplace_sn(3, &[0.0, 1.0, 0.0]).unwrap() + 1.0 / (4.0 * PI)).abs() < 1e-15);
        assert_eq!(laplace_sn(2, &[0.0, 0.0]), Err(Error::SingularPoint));
    }

    #[test]
    fn anisotropic_values() {
        let lap = OperatorCoefficients::laplacian(2).unwrap();
        for x in [[0.3, 0.4], [-2.0, 1.0]] {
            assert!((principal_anisotropic(&lap, &x).unwrap() - laplace_sn(2, &x).unwrap()).abs() < 1e-16);
        }
        let op = OperatorCoefficients::principal(&[vec![4.0, 0.0], vec![0.0, 1.0]]).unwrap();
        assert_eq!(principal_anisotropic(&op, &[2.0, 0.0]).unwrap(), 0.0);
        assert_eq!(principal_anisotropic(&op, &[0.0, 0.0]), Err(Error::SingularPoint));
    }

    #[test]
    fn anisotropic_fd_residual() {
        let op = OperatorCoefficients::principal(&[vec![4.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let x = [0.3, 0.7];
        let s = principal_anisotropic(&op, &x).unwrap();
        let r = op.apply_fd(|y: &[f64]| principal_anisotropic(&op, y).unwrap(), &x, 1e-3);
        assert!(r.norm() <= 1e-6 * s.abs().max(1.0), "{r}");
    }

    #[test]
    fn helmholtz_values() {
        let x = [0.3, -0.4, 1.2];
        // -exp(-k r)/(4 pi r) = -1/(4 pi r) + k/(4 pi) + O(k^2 r)
        let lim = modified_helmholtz(3, 1e-6, &x).unwrap();
        let gap = lim - laplace_sn(3, &x).unwrap();
        assert!(gap.abs() < 1e-7);
        assert!((gap - 1e-6 / (4.0 * PI)).abs() < 1e-12);
        let e3 = modified_helmholtz(3, 1.0, &[1.0, 0.0, 0.0]).unwrap();
        assert!((e3 + (-1.0f64).exp() / (4.0 * PI)).abs() < 1e-15);
        // -K0(1) / (2 pi), K0(1) = 0.42102443824070833334
        let e2 = modified_helmholtz(2, 1.0, &[0.0, 1.0]).unwrap();
        assert!((e2 + 0.42102443824070833334 / (2.0 * PI)).abs() < 1e-14);
        assert!(modified_helmholtz(2, 0.0, &[1.0, 0.0]).is_err());
    }

    #[test]
    fn closed_forms_through_the_type() {
        let fs = FundamentalSolution::laplace(2).unwrap();
        for r in [1e-3, 0.1, 1.0, 10.0] {
            let v = re(fs.eval(&[r, 0.0]));
            assert!((v - r.ln() / (2.0 * PI)).abs() <= 1e-12 * v.abs().max(1e-300));
        }
        let mh = FundamentalSolution::modified_helmholtz(3, 2.0).unwrap();
        for r in [1e-3, 0.1, 1.0, 10.0] {
            let v = re(mh.eval(&[0.0, 0.0, r]));
            let want = -(-2.0 * r).exp() / (4.0 * PI * r);
            assert!((v - want).abs() <= 1e-12 * want.abs());
        }
    }

    #[test]
    fn gradients() {
        let fs = FundamentalSolution::laplace(2).unwrap();
        let g = fs.grad(&[1.0, 0.0]).unwrap();
        assert!((g[0].re - 1.0 / (2.0 * PI)).abs() < 1e-16 && g[1].re == 0.0);
        let mh = FundamentalSolution::modified_helmholtz(3, 1.0).unwrap();
        let g = mh.grad(&[1.0, 0.0, 0.0]).unwrap();
        let want = 2.0 * (-1.0f64).exp() / (4.0 * PI);
        assert!((g[0].re - want).abs() < 1e-16);
        assert_eq!(g[1].re, 0.0);
    }

    fn all_kinds() -> Vec<FundamentalSolution> {
        let a2 = OperatorCoefficients::principal(&[vec![2.0, 0.5], vec![0.5, 1.0]]).unwrap();
        let a3 = OperatorCoefficients::principal(&[
            vec![2.0, 0.3, 0.1],
            vec![0.3, 1.0, -0.2],
            vec![0.1, -0.2, 1.5],
        ])
        .unwrap();
        vec![
            FundamentalSolution::laplace(2).unwrap(),
            FundamentalSolution::laplace(3).unwrap(),
            FundamentalSolution::principal(a2).unwrap(),
            FundamentalSolution::principal(a3).unwrap(),
            FundamentalSolution::modified_helmholtz(2, 1.0).unwrap(),
            FundamentalSolution::modified_helmholtz(3, 1.5).unwrap(),
        ]
    }

    fn random_point(rng: &mut ChaCha8Rng, n: usize, rmin: f64, rmax: f64) -> Vec<f64> {
        loop {
            let v: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let r = v.iter().map(|a| a * a).sum::<f64>().sqrt();
            if r > 0.1 && r <= 1.0 {
                let target = rng.gen_range(rmin..rmax);
                return v.iter().map(|a| a / r * target).collect();
            }
        }
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for fs in all_kinds() {
            let n = fs.dim();
            for _ in 0..20 {
                let x = random_point(&mut rng, n, 0.1, 5.0);
                let r = x.iter().map(|a| a * a).sum::<f64>().sqrt();
                let h = 1e-5 * r;
                let g = fs.grad(&x).unwrap();
                let gn = g.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
                for j in 0..n {
                    let mut xp = x.clone();
                    let mut xm = x.clone();
                    xp[j] += h;
                    xm[j] -= h;
                    let d = (re(fs.eval(&xp)) - re(fs.eval(&xm))) / (2.0 * h);
                    assert!((d - g[j].re).abs() <= 1e-6 * gn, "{:?} at {x:?}", fs.kind());
                }
            }
        }
    }

    #[test]
    fn hessian_matches_finite_differences_of_gradient() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for fs in all_kinds() {
            let n = fs.dim();
            for _ in 0..10 {
                let x = random_point(&mut rng, n, 0.2, 3.0);
                let r = x.iter().map(|a| a * a).sum::<f64>().sqrt();
                let h = 1e-5 * r;
                let hs = fs.hess(&x).unwrap();
                let scale = hs.iter().flatten().map(|c| c.norm()).fold(0.0, f64::max);
                for l in 0..n {
                    let mut xp = x.clone();
                    let mut xm = x.clone();
                    xp[l] += h;
                    xm[l] -= h;
                    let gp = fs.grad(&xp).unwrap();
                    let gm = fs.grad(&xm).unwrap();
                    for j in 0..n {
                        let d = (gp[j].re - gm[j].re) / (2.0 * h);
                        assert!((d - hs[l][j].re).abs() <= 1e-6 * scale);
                        assert_eq!(hs[l][j], hs[j][l]);
                    }
                }
            }
        }
    }

    #[test]
    fn hessian_examples() {
        let fs = FundamentalSolution::laplace(2).unwrap();
        let h = fs.hess(&[1.0, 0.0]).unwrap();
        let c = 1.0 / (2.0 * PI);
        assert!((h[0][0].re + c).abs() < 1e-16 && (h[1][1].re - c).abs() < 1e-16 && h[0][1].re == 0.0);
        let h = fs.hess(&[0.5, 0.5]).unwrap();
        assert!((h[0][0] + h[1][1]).norm() < 1e-12);
        let mh = FundamentalSolution::modified_helmholtz(3, 1.0).unwrap();
        let x = [0.6, 0.0, 0.8];
        let h = mh.hess(&x).unwrap();
        let res = h[0][0].re + h[1][1].re + h[2][2].re - re(mh.eval(&x));
        assert!(res.abs() < 1e-10);
        let mh2 = FundamentalSolution::modified_helmholtz(2, 1.0).unwrap();
        let h = mh2.hess(&[0.6, 0.8]).unwrap();
        let res = h[0][0].re + h[1][1].re - re(mh2.eval(&[0.6, 0.8]));
        assert!(res.abs() < 1e-10);
    }

    #[test]
    fn operator_annihilates_off_origin() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for fs in all_kinds() {
            let n = fs.dim();
            let op = fs.operator().clone();
            for _ in 0..50 {
                let x = random_point(&mut rng, n, 0.2, 2.0);
                // Richardson-combined central differences, O(h^4)
                let h = 1e-2 * x.iter().map(|a| a * a).sum::<f64>().sqrt();
                let coarse = op.apply_fd(|y: &[f64]| re(fs.eval(y)), &x, h);
                let fine = op.apply_fd(|y: &[f64]| re(fs.eval(y)), &x, 0.5 * h);
                let r = (4.0 * fine - coarse) / 3.0;
                // largest term of the operator at x
                let hs = fs.hess(&x).unwrap();
                let mut largest = (op.a0() * fs.eval(&x).unwrap()).norm();
                for l in 0..n {
                    for j in 0..n {
                        largest = largest.max((op.a2(l, j) * hs[l][j].re).abs());
                    }
                }
                assert!(r.norm() <= 1e-6 * largest.max(1e-3), "{:?}: {r} vs {largest}", fs.kind());
            }
        }
    }

    #[test]
    fn laplace_rotation_invariance() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let fs = FundamentalSolution::laplace(3).unwrap();
        for _ in 0..20 {
            let x = random_point(&mut rng, 3, 0.2, 3.0);
            let axis = random_point(&mut rng, 3, 1.0, 1.0000001);
            let f = linalg::frame(&linalg::to_vec3(&axis), 3);
            let qx: Vec<f64> = (0..3).map(|i| f[i][0] * x[0] + f[i][1] * x[1] + f[i][2] * x[2]).collect();
            let a = re(fs.eval(&x));
            let b = re(fs.eval(&qx));
            assert!((a - b).abs() <= 1e-14 * a.abs().max(1.0));
        }
    }

    #[test]
    fn split_for_laplace_has_no_remainder() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in [2, 3] {
            let fs = FundamentalSolution::laplace(n).unwrap();
            for _ in 0..20 {
                let x = random_point(&mut rng, n, 0.01, 5.0);
                for j in 0..n {
                    let (_, k2) = fs.gradient_split(j, &x).unwrap();
                    assert_eq!(k2, Complex64::new(0.0, 0.0));
                }
            }
        }
    }

    #[test]
    fn split_symmetries_and_exact_sum() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for fs in all_kinds() {
            let n = fs.dim();
            for _ in 0..10 {
                let x = random_point(&mut rng, n, 0.05, 3.0);
                let neg: Vec<f64> = x.iter().map(|v| -v).collect();
                let dbl: Vec<f64> = x.iter().map(|v| 2.0 * v).collect();
                let g = fs.grad(&x).unwrap();
                for j in 0..n {
                    let (k1, k2) = fs.gradient_split(j, &x).unwrap();
                    assert!((k1 + k2 - g[j]).norm() <= f64::EPSILON * g[j].norm().max(k1.norm()));
                    assert_eq!(fs.gradient_split(j, &neg).unwrap().0, -k1);
                    let scaled = fs.gradient_split(j, &dbl).unwrap().0;
                    let factor = 2f64.powi(-(n as i32 - 1));
                    assert!((scaled - k1 * factor).norm() <= 4.0 * f64::EPSILON * k1.norm());
                }
            }
        }
    }

    #[test]
    fn helmholtz_remainder_is_milder() {
        let fs = FundamentalSolution::modified_helmholtz(3, 1.0).unwrap();
        let mut worst: f64 = 0.0;
        let mut values = vec![];
        for e in 1..=6 {
            let r = 10f64.powi(-e);
            let x = [r * 0.6, 0.0, r * 0.8];
            let mut m: f64 = 0.0;
            for j in 0..3 {
                m = m.max(fs.gradient_split(j, &x).unwrap().1.norm());
            }
            let w = r.powf(1.5) * m;
            values.push(w);
            worst = worst.max(w);
        }
        // |x|^{n-2+1/2} |k_{j,2}(x)| stays bounded (and in fact tends to zero)
        assert!(worst < 1.0, "{values:?}");
        assert!(values.windows(2).all(|w| w[1] <= w[0] * 1.01));
    }

    #[test]
    fn unsupported_operators() {
        let op = OperatorCoefficients::new(
            &[vec![1.0, 0.0], vec![0.0, 1.0]],
            &[Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
            Complex64::new(0.0, 0.0),
        )
        .unwrap();
        assert!(matches!(FundamentalSolution::principal(op.clone()), Err(Error::UnsupportedOperator(_))));
        assert!(matches!(FundamentalSolution::from_operator(op), Err(Error::UnsupportedOperator(_))));
        let mh = FundamentalSolution::from_operator(OperatorCoefficients::modified_helmholtz(2, 3.0).unwrap()).unwrap();
        assert_eq!(mh.kind(), Kind::ModifiedHelmholtz);
        assert!((mh.kappa() - 3.0).abs() < 1e-15);
    }

    #[test]
    fn remainder_hessian_matches_the_difference_and_stays_finite() {
        for n in [2, 3] {
            let fs = FundamentalSolution::modified_helmholtz(n, 1.3).unwrap();
            for r in [0.05, 0.3, 0.7, 1.5, 4.0] {
                let z = linalg::scale(&[0.6, -0.48, if n == 3 { 0.64 } else { 0.0 }], r / if n == 3 { 1.0 } else { 0.768 });
                let full = fs.hessian(&z);
                let hom = fs.homogeneous_hessian(&z);
                let rem = fs.remainder_hessian(&z);
                for l in 0..n {
                    for j in 0..n {
                        let want = full[l][j] - hom[l][j];
                        assert!((rem[l][j] - want).abs() < 1e-9 * (1.0 + hom[l][j].abs()), "n={n} r={r}");
                    }
                }
            }
            // singularity is only logarithmic (2D) or 1/r (3D)
            let z = [1e-9, 0.0, 0.0];
            let rem = fs.remainder_hessian(&z);
            assert!(rem[0][0].is_finite() && rem[0][0].abs() < 1e10);
            let z = [1e-7, 0.0, 0.0];
            let ratio = fs.remainder_hessian(&z)[1][1] / rem[1][1];
            if n == 3 {
                assert!((ratio - 1e-2).abs() < 1e-4);
            }
        }
    }
}
