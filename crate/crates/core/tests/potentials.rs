use std::sync::Arc;

use elliptic_potentials::potentials::{exterior_field, Density, PotentialField};
use elliptic_potentials::schauder::{Component, NegativeExponentDensity};
use elliptic_potentials::{Domain, FundamentalSolution, OperatorCoefficients};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn c(v: f64) -> Complex64 {
    Complex64::new(v, 0.0)
}

fn kinds(n: usize) -> Vec<FundamentalSolution> {
    let a2 = if n == 2 {
        vec![vec![2.0, 0.5], vec![0.5, 1.0]]
    } else {
        vec![vec![2.0, 0.3, 0.0], vec![0.3, 1.0, 0.2], vec![0.0, 0.2, 1.5]]
    };
    vec![
        FundamentalSolution::laplace(n).unwrap(),
        FundamentalSolution::principal(OperatorCoefficients::principal(&a2).unwrap()).unwrap(),
        FundamentalSolution::modified_helmholtz(n, 1.5).unwrap(),
    ]
}

#[test]
fn derivative_recursion_in_two_and_three_dimensions() {
    for n in [2, 3] {
        let domain = Domain::ball(&vec![0.0; n], 1.0).unwrap();
        let res = if n == 2 { 32 } else { 20 };
        let phi = |y: &[f64]| y[0] * y[0] + (y[1]).sin();
        let dphi = [|y: &[f64]| 2.0 * y[0], |y: &[f64]| y[1].cos()];
        for fs in kinds(n) {
            let p = PotentialField::new(fs.clone(), domain.clone(), res).unwrap();
            for x in [vec![0.2; n], { let mut v = vec![0.0; n]; v[0] = -0.6; v }] {
                let grad = p.volume_potential_gradient(&phi, &x).unwrap();
                for (j, dj) in dphi.iter().enumerate() {
                    let lhs = grad[j];
                    let rhs = p.volume_potential(dj, &x).unwrap()
                        - p.single_layer(&|y: &[f64], nu: &[f64]| nu[j] * phi(y), &x).unwrap();
                    assert!((lhs - rhs).norm() < 1e-5, "n={n} {:?} j={j}: {}", fs.kind(), (lhs - rhs).norm());
                }
            }
        }
    }
}

#[test]
fn potentials_are_linear_in_the_density() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let p = PotentialField::new(FundamentalSolution::laplace(2).unwrap(), Domain::ball(&[0.0, 0.0], 1.0).unwrap(), 24)
        .unwrap();
    for _ in 0..5 {
        let (a, b): (f64, f64) = (rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
        let (k1, k2): (f64, f64) = (rng.gen_range(0.5..3.0), rng.gen_range(0.5..3.0));
        let f = move |y: &[f64]| (k1 * y[0]).cos();
        let g = move |y: &[f64]| (k2 * y[1]).sin() + y[0];
        let h = move |y: &[f64]| a * f(y) + b * g(y);
        let x = [rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5)];
        let lhs = p.volume_potential(&h, &x).unwrap();
        let rhs = a * p.volume_potential(&f, &x).unwrap() + b * p.volume_potential(&g, &x).unwrap();
        assert!((lhs - rhs).norm() < 1e-13, "{}", (lhs - rhs).norm());
    }
}

#[test]
fn laplace_potentials_are_translation_invariant() {
    let shift = [0.7, -1.3];
    let fs = FundamentalSolution::laplace(2).unwrap();
    let p0 = PotentialField::new(fs.clone(), Domain::ball(&[0.0, 0.0], 1.0).unwrap(), 24).unwrap();
    let p1 = PotentialField::new(fs, Domain::ball(&shift, 1.0).unwrap(), 24).unwrap();
    let f = |y: &[f64]| y[0] * y[1] + 1.0;
    let g = |y: &[f64]| f(&[y[0] - shift[0], y[1] - shift[1]]);
    for x in [[0.3, 0.2], [1.5, -0.4]] {
        let v0 = p0.volume_potential(&f, &x).unwrap();
        let v1 = p1.volume_potential(&g, &[x[0] + shift[0], x[1] + shift[1]]).unwrap();
        assert!((v0 - v1).norm() < 1e-12, "{}", (v0 - v1).norm());
    }
}

#[test]
fn hessian_is_symmetric() {
    for fs in kinds(2) {
        let p = PotentialField::new(fs, Domain::ellipse(&[0.1, 0.0], 1.2, 0.8).unwrap(), 32).unwrap();
        let f = |y: &[f64]| (y[0] + 2.0 * y[1]).exp();
        let h = p.volume_potential_hessian(&f, &[0.3, -0.2]).unwrap();
        assert!((h[0][1] - h[1][0]).norm() < 1e-6);
    }
}

fn zero() -> Component {
    Arc::new(|_: &[f64]| c(0.0))
}

#[test]
fn negative_exponent_potential() {
    let disk = Domain::ball(&[0.0, 0.0], 1.0).unwrap();
    let p = PotentialField::new(FundamentalSolution::laplace(2).unwrap(), disk.clone(), 96).unwrap();
    let f0 = |y: &[f64]| 1.0 + y[0] * y[1];
    let classical = NegativeExponentDensity::new(&disk, vec![Arc::new(move |y: &[f64]| c(f0(y))), zero(), zero()], 1.0)
        .unwrap();
    for x in [[0.1, 0.2], [1.5, 0.5]] {
        let a = p.volume_potential_negative(&classical, &x).unwrap();
        let b = p.volume_potential(&f0, &x).unwrap();
        assert!((a - b).norm() < 1e-13);
    }
    let nd = NegativeExponentDensity::new(&disk, vec![zero(), Arc::new(|y: &[f64]| c(y[0])), zero()], 1.0).unwrap();
    assert!((p.volume_potential_negative(&nd, &[0.0, 0.0]).unwrap().re + 0.25).abs() < 1e-6);
    // compactly supported smooth f_1: no boundary term
    let bump = |y: &[f64]| {
        let s = (y[0] - 0.1).powi(2) + y[1] * y[1];
        if s < 0.25 { (-1.0 / (1.0 - 4.0 * s)).exp() } else { 0.0 }
    };
    let dbump = move |y: &[f64]| {
        let s = (y[0] - 0.1).powi(2) + y[1] * y[1];
        if s < 0.25 {
            let t = 1.0 - 4.0 * s;
            bump(y) * (-8.0 * (y[0] - 0.1)) / (t * t)
        } else {
            0.0
        }
    };
    let nd = NegativeExponentDensity::new(&disk, vec![zero(), Arc::new(move |y: &[f64]| c(bump(y))), zero()], 1.0)
        .unwrap();
    for x in [[0.0, 0.0], [0.3, -0.5]] {
        let a = p.volume_potential_negative(&nd, &x).unwrap();
        let b = p.volume_potential(&dbump, &x).unwrap();
        assert!((a - b).norm() < 1e-6, "{x:?}: {}", (a - b).norm());
    }
}

#[test]
fn exterior_gradient_matches_the_derivative_of_the_potential() {
    let p = PotentialField::new(
        FundamentalSolution::modified_helmholtz(2, 1.0).unwrap(),
        Domain::star2d(&[0.0, 0.0], elliptic_potentials::geometry::Profile::CosineSeries(vec![1.0, 0.0, 0.0, 0.2]))
            .unwrap(),
        64,
    )
    .unwrap();
    let f = |y: &[f64]| 1.0 + y[1];
    let x = [1.6, 0.4];
    let g = p.volume_potential_gradient(&f, &x).unwrap();
    let h = 1e-4;
    for j in 0..2 {
        let mut xp = x;
        let mut xm = x;
        xp[j] += h;
        xm[j] -= h;
        let d = (p.volume_potential(&f, &xp).unwrap() - p.volume_potential(&f, &xm).unwrap()) / (2.0 * h);
        assert!((d - g[j]).norm() < 1e-7, "{}", (d - g[j]).norm());
    }
}

#[test]
fn exterior_field_matches_the_volume_potential_in_three_dimensions() {
    let fs = FundamentalSolution::laplace(3).unwrap();
    let ball = Domain::ball(&[0.0, 0.0, 0.0], 1.0).unwrap();
    let q = ball.volume_rule(12);
    let nodes: Vec<Vec<f64>> = q.nodes.iter().map(|y| y[..3].to_vec()).collect();
    let f = |y: &[f64]| 1.0 + y[2];
    let values: Vec<Complex64> = nodes.iter().map(|y| c(f(y))).collect();
    let x = [0.0, 1.0, 2.0];
    let e = exterior_field(&fs, &nodes, &q.weights, &values, &x).unwrap();
    let p = PotentialField::new(fs, ball, 16).unwrap();
    assert!((e - p.volume_potential(&f, &x).unwrap()).norm() < 1e-10);
    let _ = f.at(&x);
}
