use elliptic_potentials::schauder::{embedding_constants, holder_seminorm, holder_seminorm_beyond, Modulus};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

mod common;
use common::{disk_samples, random_function};

#[test]
fn tail_bound_embedding_chain_and_monotonicity() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let (theta, theta_p) = (1.0, 0.5);
    let (c, cp) = embedding_constants(theta, theta_p, 2.0);
    let omega = Modulus::omega_theta(theta).unwrap();
    let power = Modulus::power(theta).unwrap();
    let power_p = Modulus::power(theta_p).unwrap();
    for _ in 0..10 {
        let f = random_function(&mut rng);
        let pts = disk_samples(&mut rng, 300);
        let vals: Vec<Complex64> = pts.iter().map(|p| Complex64::new(f(p), 0.0)).collect();
        let sup = vals.iter().map(|v| v.norm()).fold(0.0, f64::max);
        for a in [1e-2, 0.1, 0.5] {
            for m in [&omega, &power, &power_p] {
                let tail = holder_seminorm_beyond(&pts, &vals, m, a).unwrap();
                assert!(tail <= 2.0 * sup / m.eval(a) * (1.0 + 1e-12));
            }
        }
        let s_om = holder_seminorm(&pts, &vals, &omega).unwrap();
        let s_pow = holder_seminorm(&pts, &vals, &power).unwrap();
        let s_pow_p = holder_seminorm(&pts, &vals, &power_p).unwrap();
        assert!(s_om <= c * s_pow);
        assert!(s_pow_p <= cp * (s_om + sup));
        let sub = holder_seminorm(&pts[..150], &vals[..150], &omega).unwrap();
        assert!(sub <= s_om);
    }
}
