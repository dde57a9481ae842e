//! One-dimensional rules: Gauss-Legendre, graded composites and an adaptive
//! Gauss-Kronrod integrator for vector-valued integrands.

use std::collections::{BinaryHeap, HashMap};
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;

/// Nodes and weights of a one-dimensional rule.
pub type Rule = Arc<(Vec<f64>, Vec<f64>)>;

/// Gauss-Legendre nodes and weights on `[-1, 1]`, cached by order.
pub fn gauss_legendre(n: usize) -> Rule {
    static CACHE: OnceLock<Mutex<HashMap<usize, Rule>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(r) = cache.lock().unwrap().get(&n) {
        return r.clone();
    }
    let rule = Arc::new(compute_gauss_legendre(n));
    cache.lock().unwrap().insert(n, rule.clone());
    rule
}

fn compute_gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        // Tricomi initial guess, refined by Newton on P_n
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(n, z);
        if d != 0.0 {
            dp = d;
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    if n % 2 == 1 {
        x[n / 2] = 0.0;
    }
    (x, w)
}

fn legendre(n: usize, z: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = z;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (z * p1 - p0) / (z * z - 1.0);
    (p1, d)
}

/// Nodes and weights of an `n`-point Gauss-Legendre rule mapped to `[a, b]`.
pub fn gl_interval(n: usize, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> {
    let rule = gauss_legendre(n);
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    (0..n).map(move |i| (mid + half * rule.0[i], half * rule.1[i]))
}

/// Breakpoints `a, a + (b-a)/2^K, ..., a + (b-a)/2, b` refined toward `a` until
/// the innermost panel is no wider than `h_min`.
pub fn geometric_breaks(a: f64, b: f64, h_min: f64) -> Vec<f64> {
    let len = b - a;
    let mut levels = 0;
    if h_min > 0.0 {
        let mut w = len.abs();
        while w > h_min && levels < 60 {
            w *= 0.5;
            levels += 1;
        }
    }
    let mut out = Vec::with_capacity(levels + 2);
    out.push(a);
    for k in (0..levels).rev() {
        out.push(a + len * 0.5f64.powi(k as i32 + 1));
    }
    out.push(b);
    out
}

/// Composite Gauss-Legendre rule over consecutive breakpoints.
pub fn composite(breaks: &[f64], order: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(order * breaks.len());
    for w in breaks.windows(2) {
        if w[1] > w[0] {
            out.extend(gl_interval(order, w[0], w[1]));
        }
    }
    out
}

/// Rule for `int_a^b g(r) dr` where `g` may be singular at `r = 0` and `0 <= a < b`.
///
/// * `a == 0`: dyadic panels with a cubic substitution on the innermost one,
///   for `r^{-s}` and `log r` endpoint behaviour of the polar integrands.
/// * `0 < a` small relative to `b - a`: dyadic panels from `a` resolve a
///   near-singularity at distance `a`.
/// * otherwise a single panel.
pub fn radial_rule(a: f64, b: f64, order: usize) -> Vec<(f64, f64)> {
    if !(b > a) {
        return Vec::new();
    }
    if a == 0.0 {
        // dyadic panels toward 0, the innermost one mapped by r = h t^3
        let h = b / 16.0;
        let mut out: Vec<(f64, f64)> =
            gl_interval(order, 0.0, 1.0).map(|(t, w)| (h * t * t * t, 3.0 * h * t * t * w)).collect();
        let mut r = h;
        while r < b {
            out.extend(gl_interval(order, r, 2.0 * r));
            r *= 2.0;
        }
        return out;
    }
    if a < 0.5 * (b - a) {
        let mut breaks = vec![a];
        let mut r = a;
        while 2.0 * r < b {
            r *= 2.0;
            breaks.push(r);
        }
        if b - r < 0.25 * r && breaks.len() > 1 {
            breaks.pop();
        }
        breaks.push(b);
        return composite(&breaks, order);
    }
    gl_interval(order, a, b).collect()
}

// Gauss-Kronrod 7/15 on [-1, 1]
const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

struct Segment {
    a: f64,
    b: f64,
    value: Vec<Complex64>,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn gk15<F>(f: &mut F, a: f64, b: f64, m: usize) -> (Vec<Complex64>, f64)
where
    F: FnMut(f64) -> Vec<Complex64>,
{
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let mut kron = vec![Complex64::new(0.0, 0.0); m];
    let mut gauss = vec![Complex64::new(0.0, 0.0); m];
    let fc = f(mid);
    for k in 0..m {
        kron[k] += WGK[7] * fc[k];
        gauss[k] += WG[3] * fc[k];
    }
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(mid - dx);
        let f2 = f(mid + dx);
        for k in 0..m {
            let s = f1[k] + f2[k];
            kron[k] += WGK[j] * s;
            if j % 2 == 1 {
                gauss[k] += WG[j / 2] * s;
            }
        }
    }
    let mut err: f64 = 0.0;
    for k in 0..m {
        kron[k] *= half;
        gauss[k] *= half;
        err = err.max((kron[k] - gauss[k]).norm());
    }
    (kron, err)
}

/// Globally adaptive Gauss-Kronrod (7/15) integration of a vector-valued
/// integrand of length `m` over the panels given by `breaks`.
///
/// Stops when the summed error estimate is below `abs_tol` or after
/// `max_segments` subdivisions; returns the value and the error estimate.
pub fn adaptive_gk<F>(mut f: F, breaks: &[f64], m: usize, abs_tol: f64, max_segments: usize) -> (Vec<Complex64>, f64)
where
    F: FnMut(f64) -> Vec<Complex64>,
{
    let mut heap = BinaryHeap::new();
    for w in breaks.windows(2) {
        if w[1] > w[0] {
            let (value, error) = gk15(&mut f, w[0], w[1], m);
            heap.push(Segment { a: w[0], b: w[1], value, error });
        }
    }
    let total_error = |h: &BinaryHeap<Segment>| h.iter().map(|s| s.error).sum::<f64>();
    let mut count = heap.len();
    while count < max_segments && total_error(&heap) > abs_tol {
        let Some(worst) = heap.pop() else { break };
        let mid = 0.5 * (worst.a + worst.b);
        if !(mid > worst.a && mid < worst.b) {
            heap.push(Segment { error: 0.0, ..worst });
            continue;
        }
        let (v1, e1) = gk15(&mut f, worst.a, mid, m);
        let (v2, e2) = gk15(&mut f, mid, worst.b, m);
        heap.push(Segment { a: worst.a, b: mid, value: v1, error: e1 });
        heap.push(Segment { a: mid, b: worst.b, value: v2, error: e2 });
        count += 1;
    }
    let err = total_error(&heap);
    let mut sum = vec![Complex64::new(0.0, 0.0); m];
    for s in heap.into_vec() {
        for k in 0..m {
            sum[k] += s.value[k];
        }
    }
    (sum, err)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_is_exact_for_polynomials() {
        for n in [1, 2, 5, 16, 33, 64] {
            let rule = gauss_legendre(n);
            let total: f64 = rule.1.iter().sum();
            assert!((total - 2.0).abs() < 1e-14, "n = {n}");
            // int x^{2n-2} = 2 / (2n - 1)
            let p = 2 * n - 2;
            let v: f64 = rule.0.iter().zip(&rule.1).map(|(x, w)| w * x.powi(p as i32)).sum();
            assert!((v - 2.0 / (p as f64 + 1.0)).abs() < 1e-13, "n = {n}");
        }
    }

    #[test]
    fn radial_rule_handles_endpoint_singularities() {
        // int_0^1 r ln r dr = -1/4
        let v: f64 = radial_rule(0.0, 1.0, 16).iter().map(|(r, w)| w * r * r.ln()).sum();
        assert!((v + 0.25).abs() < 1e-12);
        // int_a^1 dr / r = -ln a
        let a = 1e-6;
        let v: f64 = radial_rule(a, 1.0, 16).iter().map(|(r, w)| w / r).sum();
        assert!((v + a.ln()).abs() < 1e-12);
    }

    #[test]
    fn geometric_breaks_reach_the_requested_width() {
        let b = geometric_breaks(0.0, 1.0, 1e-3);
        assert_eq!(b[0], 0.0);
        assert_eq!(*b.last().unwrap(), 1.0);
        assert!(b[1] - b[0] <= 1e-3);
        assert!(b.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn adaptive_integrates_a_kink() {
        let (v, e) = adaptive_gk(|t| vec![Complex64::new((t - 0.3).abs(), 0.0)], &[0.0, 1.0], 1, 1e-13, 200);
        assert!((v[0].re - (0.045 + 0.245)).abs() < 1e-12, "{v:?} {e}");
    }
}
