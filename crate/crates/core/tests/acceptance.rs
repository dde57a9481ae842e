//! Acceptance suite: one line per criterion, nonzero exit if any fails.

#![allow(clippy::needless_range_loop)]

use std::f64::consts::PI;
use std::panic::{self, AssertUnwindSafe};
use std::sync::Arc;
use std::time::Instant;

use elliptic_potentials::potentials::{GradientKernel, PotentialField};
use elliptic_potentials::schauder::{
    embedding_constants, holder_seminorm, holder_seminorm_beyond, integral_functional_i, Component, Modulus,
    NegativeExponentDensity,
};
use elliptic_potentials::verify::{
    check_derivative_recursion, check_integration_by_parts, check_maximal_bound, check_pde_identity,
    check_transmission, modulus_experiment, MaximalBoundExpectation, TransmissionDensity, TwoPointKernel,
    VerificationReport, DEFAULT_EPSILONS,
};
use elliptic_potentials::{Domain, FundamentalSolution};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

mod common;

/// Outcome of a criterion: pass flag and a one-line detail.
type Outcome = (bool, String);

fn c(v: f64) -> Complex64 {
    Complex64::new(v, 0.0)
}

fn disk() -> Domain {
    Domain::ball(&[0.0, 0.0], 1.0).unwrap()
}

fn ball() -> Domain {
    Domain::ball(&[0.0, 0.0, 0.0], 1.0).unwrap()
}

fn laplace(n: usize) -> FundamentalSolution {
    FundamentalSolution::laplace(n).unwrap()
}

fn field(fs: FundamentalSolution, domain: Domain, n: usize) -> PotentialField {
    PotentialField::new(fs, domain, n).unwrap()
}

fn reports(rs: &[VerificationReport]) -> Outcome {
    let pass = rs.iter().all(|r| r.pass());
    let detail: Vec<String> = rs
        .iter()
        .map(|r| {
            let bounded: Vec<String> = r
                .observed
                .iter()
                .filter(|o| o.bound != elliptic_potentials::verify::Bound::None)
                .map(|o| format!("{}={:.2e}", o.label, o.value))
                .collect();
            format!("{}[{}]", r.name, bounded.join(" "))
        })
        .collect();
    (pass, detail.join(" "))
}

fn zero() -> Component {
    Arc::new(|_: &[f64]| c(0.0))
}

fn bump(y: &[f64]) -> f64 {
    let s: f64 = y.iter().map(|a| a * a).sum();
    if s < 1.0 {
        (-1.0 / (1.0 - s)).exp()
    } else {
        0.0
    }
}

fn grid_2d(r: f64, m: usize) -> Vec<Vec<f64>> {
    (0..m)
        .map(|k| {
            let t = 0.3 + 2.0 * PI * k as f64 / m as f64;
            let rr = r * (0.4 + 0.6 * (k % 3) as f64 / 2.0);
            vec![rr * t.cos(), rr * t.sin()]
        })
        .collect()
}

fn grid_3d(r: f64, m: usize) -> Vec<Vec<f64>> {
    let ga = PI * (3.0 - 5f64.sqrt());
    (0..m)
        .map(|k| {
            let z = 1.0 - 2.0 * (k as f64 + 0.5) / m as f64;
            let s = (1.0 - z * z).sqrt();
            let rr = r * (0.4 + 0.6 * (k % 3) as f64 / 2.0);
            vec![rr * s * (ga * k as f64).cos(), rr * s * (ga * k as f64).sin(), rr * z]
        })
        .collect()
}

fn criterion_1() -> Outcome {
    let p = field(laplace(2), disk(), 64);
    let one = |_: &[f64]| 1.0;
    let mut worst: f64 = 0.0;
    let radii = [0.0, 0.2, 0.45, 0.7, 0.9, 0.999, 1.001, 1.2, 1.7, 2.5, 4.0];
    let mut count = 0;
    for (k, &r) in radii.iter().enumerate() {
        let angles: Vec<f64> = if r == 0.0 { vec![0.0] } else { vec![0.4 + k as f64, 2.9 - k as f64] };
        for t in angles {
            let x = [r * t.cos(), r * t.sin()];
            let exact = if r < 1.0 { 0.25 * (r * r - 1.0) } else { 0.5 * r.ln() };
            worst = worst.max((p.volume_potential(&one, &x).unwrap().re - exact).abs());
            count += 1;
        }
    }
    assert_eq!(count, 21);
    (worst <= 1e-6, format!("max error {worst:.2e} over 21 probes at N=64 (tol 1e-6)"))
}

fn criterion_2() -> Outcome {
    let p = field(laplace(3), ball(), 48);
    let v = p.volume_potential(&|_: &[f64]| 1.0, &[0.0, 0.0, 0.0]).unwrap().re;
    let err = (v + 0.5).abs();
    (err <= 1e-5, format!("u(0) = {v:.12} error {err:.2e} at N=48 (tol 1e-5)"))
}

fn criterion_3() -> Outcome {
    let h = 1e-2;
    let rs = vec![
        check_pde_identity(&field(laplace(2), disk(), 48), &bump, &grid_2d(0.8, 9), h, 1e-3, 1e-6).unwrap(),
        check_pde_identity(
            &field(FundamentalSolution::modified_helmholtz(2, 1.0).unwrap(), disk(), 48),
            &bump,
            &grid_2d(0.8, 9),
            h,
            1e-3,
            1e-6,
        )
        .unwrap(),
        check_pde_identity(
            &field(FundamentalSolution::modified_helmholtz(3, 1.0).unwrap(), ball(), 32),
            &bump,
            &grid_3d(0.7, 6),
            h,
            1e-3,
            1e-6,
        )
        .unwrap(),
    ];
    reports(&rs)
}

fn criterion_4() -> Outcome {
    let offsets = [1e-2, 1e-3, 1e-4];
    let p = field(laplace(2), disk(), 48);
    let f = |y: &[f64]| 1.0 + y[0] * y[1];
    let nd = NegativeExponentDensity::new(&disk(), vec![zero(), Arc::new(|y: &[f64]| c(y[0])), zero()], 1.0).unwrap();
    let rs = vec![
        check_transmission(&p, TransmissionDensity::Volume(&f), 32, &offsets, 1e-4).unwrap(),
        check_transmission(&p, TransmissionDensity::Negative(&nd), 32, &offsets, 1e-4).unwrap(),
    ];
    reports(&rs)
}

fn criterion_5() -> Outcome {
    let mut rs = vec![];
    let inner = grid_2d(0.85, 9);
    let outer: Vec<Vec<f64>> = (0..9)
        .map(|k| {
            let (r, t) = (1.2 + 0.15 * k as f64, 0.5 + 0.7 * k as f64);
            vec![r * t.cos(), r * t.sin()]
        })
        .collect();
    let p = field(laplace(2), disk(), 48);
    type Phi = (&'static str, fn(&[f64]) -> f64, fn(&[f64]) -> Vec<f64>);
    let phis: [Phi; 3] = [
        ("1", |_| 1.0, |_| vec![0.0, 0.0]),
        ("y1", |y| y[0], |_| vec![1.0, 0.0]),
        ("y1^2", |y| y[0] * y[0], |y| vec![2.0 * y[0], 0.0]),
    ];
    let mut grid = inner.clone();
    grid.extend(outer.iter().cloned());
    for (_, phi, grad) in phis {
        rs.push(check_derivative_recursion(&p, phi, grad, &grid, 1e-5).unwrap());
    }
    assert!(outer.iter().all(|x| !disk().contains(x)));
    reports(&rs)
}

fn criterion_6() -> Outcome {
    let mut rs = vec![];
    let phi = |y: &[f64]| 1.0 + y[0] * y[1] - 0.5 * y[0] * y[0];
    let grad2 = |y: &[f64]| vec![y[1] - y[0], y[0]];
    for j in 0..2 {
        let g = TwoPointKernel::gradient(&laplace(2), j);
        rs.push(
            check_integration_by_parts(&g, &disk(), phi, grad2, &[0.2, -0.1], j, &DEFAULT_EPSILONS, 48, 1e-4, Some((0.5, 1e-3)))
                .unwrap(),
        );
    }
    let grad3 = |y: &[f64]| vec![y[1] - y[0], y[0], 0.0];
    let g3 = TwoPointKernel::gradient(&laplace(3), 0);
    rs.push(
        check_integration_by_parts(&g3, &ball(), phi, grad3, &[0.1, 0.2, -0.1], 0, &DEFAULT_EPSILONS, 24, 1e-4, Some((1.0 / 3.0, 1e-3)))
            .unwrap(),
    );
    let s = TwoPointKernel::fundamental(&laplace(2));
    rs.push(check_integration_by_parts(&s, &disk(), phi, grad2, &[0.2, -0.1], 0, &DEFAULT_EPSILONS, 48, 1e-6, None).unwrap());
    reports(&rs)
}

fn criterion_7() -> Outcome {
    let rhos = [1e-1, 1e-2, 1e-3, 1e-4, 1e-5];
    let even = |z: &[f64]| (z[0] * z[0] - z[1] * z[1]) / (z[0] * z[0] + z[1] * z[1]).powi(2);
    let control = |z: &[f64]| 1.0 / (z[0] * z[0] + z[1] * z[1]);
    let xs = vec![vec![0.0, 0.0], vec![0.4, 0.2], vec![-0.7, 0.5]];
    let rs = vec![
        check_maximal_bound(even, &disk(), &xs, &rhos, 48, MaximalBoundExpectation::Bounded(0.1)).unwrap(),
        check_maximal_bound(
            control,
            &disk(),
            &[vec![0.4, 0.2]],
            &rhos,
            48,
            MaximalBoundExpectation::Growing(0.9 * 2.0 * PI * 10f64.ln()),
        )
        .unwrap(),
    ];
    reports(&rs)
}

fn criterion_8() -> Outcome {
    let p = field(laplace(2), disk(), 48);
    let mut err: f64 = 0.0;
    let mut asym: f64 = 0.0;
    for x in [[0.0, 0.0], [0.5, 0.1], [-0.3, 0.6], [0.1, -0.85], [-0.7, -0.2]] {
        let h = p.volume_potential_hessian(&|_: &[f64]| 1.0, &x).unwrap();
        for l in 0..2 {
            for j in 0..2 {
                let want = if l == j { 0.5 } else { 0.0 };
                err = err.max((h[l][j] - want).norm());
            }
        }
    }
    for x in [[0.2, 0.3], [-0.5, 0.4]] {
        let h = p.volume_potential_hessian(&|y: &[f64]| (y[0] - 2.0 * y[1]).cos() + y[0], &x).unwrap();
        asym = asym.max((h[0][1] - h[1][0]).norm());
    }
    (
        err <= 1e-5 && asym <= 1e-6,
        format!("max |H - I/2| {err:.2e} (tol 1e-5), max asymmetry {asym:.2e} (tol 1e-6)"),
    )
}

fn criterion_9() -> Outcome {
    let p = field(laplace(2), disk(), 64);
    let k = GradientKernel::laplace(2, 0).unwrap();
    let v = p.subtracted_integral_g(&k, &|y: &[f64]| y[0] * y[0], 0, &[0.0, 0.0]).unwrap();
    let err = (v.re + 0.125).abs() + v.im.abs();
    (err <= 1e-6, format!("G_1 = {:.12} error {err:.2e} (tol 1e-6)", v.re))
}

fn criterion_10() -> Outcome {
    let p = field(laplace(2), disk(), 32);
    let kink = [([0.0, 0.0], [1.0, 0.0])];
    let base = vec![vec![0.0, 0.1], vec![0.0, -0.4]];
    let scales = [1e-4, 1e-3, 1e-2, 1e-1];
    let r = modulus_experiment(&p, &|y: &[f64]| y[0].abs(), &kink, 1.0, &scales, &base, 1e-11, 5.0).unwrap();
    reports(&[r])
}

fn criterion_11() -> Outcome {
    let p = field(laplace(2), disk(), 48);
    let nd = NegativeExponentDensity::new(&disk(), vec![zero(), Arc::new(|y: &[f64]| c(y[0])), zero()], 1.0).unwrap();
    let one = NegativeExponentDensity::new(&disk(), vec![Arc::new(|_: &[f64]| c(1.0)), zero(), zero()], 1.0).unwrap();
    let mut err: f64 = 0.0;
    for x in [[0.0, 0.0], [0.3, 0.2], [-0.5, 0.1], [0.2, -0.7], [-0.6, -0.6]] {
        let a = p.volume_potential_negative(&nd, &x).unwrap();
        let b = p.volume_potential(&|_: &[f64]| 1.0, &x).unwrap();
        err = err.max((a - b).norm());
    }
    let gap = (integral_functional_i(&disk(), &nd, 32).unwrap() - integral_functional_i(&disk(), &one, 32).unwrap()).norm();
    (
        err <= 1e-6 && gap <= 1e-10,
        format!("max potential gap {err:.2e} (tol 1e-6), I representation gap {gap:.2e} (tol 1e-10)"),
    )
}

fn criterion_12() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let (c1, c2) = embedding_constants(1.0, 0.5, 2.0);
    let omega = Modulus::omega_theta(1.0).unwrap();
    let power = Modulus::power(1.0).unwrap();
    let power_half = Modulus::power(0.5).unwrap();
    let mut ok = true;
    let mut worst_tail: f64 = 0.0;
    for _ in 0..10 {
        let f = common::random_function(&mut rng);
        let pts = common::disk_samples(&mut rng, 250);
        let vals: Vec<Complex64> = pts.iter().map(|p| c(f(p))).collect();
        let sup = vals.iter().map(|v| v.norm()).fold(0.0, f64::max);
        for a in [1e-2, 1e-1, 0.5] {
            for m in [&omega, &power, &power_half] {
                let t = holder_seminorm_beyond(&pts, &vals, m, a).unwrap();
                worst_tail = worst_tail.max(t * m.eval(a) / (2.0 * sup));
            }
        }
        let s_om = holder_seminorm(&pts, &vals, &omega).unwrap();
        let s_1 = holder_seminorm(&pts, &vals, &power).unwrap();
        let s_half = holder_seminorm(&pts, &vals, &power_half).unwrap();
        ok &= s_om <= c1 * s_1 && s_half <= c2 * (s_om + sup);
    }
    ok &= worst_tail <= 1.0 + 1e-12;
    (ok, format!("tail ratio max {worst_tail:.3} (<= 1), embedding orderings {}", if ok { "hold" } else { "violated" }))
}

fn main() {
    type Criterion = (&'static str, fn() -> Outcome);
    let criteria: [Criterion; 12] = [
        ("closed-form disk volume potential", criterion_1),
        ("closed-form ball volume potential", criterion_2),
        ("PDE identity by finite differences", criterion_3),
        ("transmission across the boundary", criterion_4),
        ("derivative recursion", criterion_5),
        ("integration by parts and residues", criterion_6),
        ("maximal bound for degree -n kernels", criterion_7),
        ("Hessian through the subtraction split", criterion_8),
        ("subtraction operator golden value", criterion_9),
        ("omega_1 modulus of the Hessian", criterion_10),
        ("negative-exponent consistency", criterion_11),
        ("seminorm tail bound and embeddings", criterion_12),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let (pass, detail) = match panic::catch_unwind(AssertUnwindSafe(run)) {
            Ok(o) => o,
            Err(e) => {
                let msg = e
                    .downcast_ref::<String>()
                    .cloned()
                    .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                    .unwrap_or_default();
                (false, format!("panicked: {msg}"))
            }
        };
        if !pass {
            failed += 1;
        }
        println!(
            "criterion {:>2} {} {}: {} ({:.1} s)",
            i + 1,
            if pass { "PASS" } else { "FAIL" },
            name,
            detail,
            start.elapsed().as_secs_f64()
        );
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
