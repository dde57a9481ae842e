use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Random sums of `a |y . d - b|^beta + c sin(k y . e)` on the unit disk.
pub fn random_function(rng: &mut ChaCha8Rng) -> impl Fn(&[f64]) -> f64 {
    let terms: Vec<(f64, [f64; 2], f64, f64)> = (0..3)
        .map(|_| {
            let t: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
            (rng.gen_range(-1.0..1.0), [t.cos(), t.sin()], rng.gen_range(-0.5..0.5), rng.gen_range(0.5..1.0))
        })
        .collect();
    let (c, k): (f64, f64) = (rng.gen_range(-1.0..1.0), rng.gen_range(1.0..6.0));
    move |y: &[f64]| {
        let mut v = c * (k * (y[0] - y[1])).sin();
        for (a, d, b, beta) in &terms {
            v += a * (y[0] * d[0] + y[1] * d[1] - b).abs().powf(*beta);
        }
        v
    }
}

pub fn disk_samples(rng: &mut ChaCha8Rng, m: usize) -> Vec<Vec<f64>> {
    (0..m)
        .map(|_| loop {
            let p = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
            if p[0] * p[0] + p[1] * p[1] < 1.0 {
                break p.to_vec();
            }
        })
        .collect()
}
