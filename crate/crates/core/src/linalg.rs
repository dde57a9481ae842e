//! Fixed-size helpers for points in R^2 and R^3.
//!
//! Points are stored as `[f64; 3]` with unused trailing components set to zero;
//! the dimension travels alongside.

pub type Vec3 = [f64; 3];
pub type Mat3 = [[f64; 3]; 3];

pub fn to_vec3(x: &[f64]) -> Vec3 {
    let mut v = [0.0; 3];
    v[..x.len()].copy_from_slice(x);
    v
}

#[inline]
pub fn sub(a: &Vec3, b: &Vec3) -> Vec3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

#[inline]
pub fn add(a: &Vec3, b: &Vec3) -> Vec3 {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

#[inline]
pub fn scale(a: &Vec3, s: f64) -> Vec3 {
    [a[0] * s, a[1] * s, a[2] * s]
}

#[inline]
pub fn axpy(x: &Vec3, s: f64, d: &Vec3) -> Vec3 {
    [x[0] + s * d[0], x[1] + s * d[1], x[2] + s * d[2]]
}

#[inline]
pub fn dot(a: &Vec3, b: &Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

#[inline]
pub fn norm(a: &Vec3) -> f64 {
    dot(a, a).sqrt()
}

#[inline]
pub fn mat_vec(m: &Mat3, v: &Vec3) -> Vec3 {
    [
        m[0][0] * v[0] + m[0][1] * v[1] + m[0][2] * v[2],
        m[1][0] * v[0] + m[1][1] * v[1] + m[1][2] * v[2],
        m[2][0] * v[0] + m[2][1] * v[1] + m[2][2] * v[2],
    ]
}

/// Inverse of the leading `n x n` block of a lower-triangular matrix.
pub fn lower_triangular_inverse(t: &Mat3, n: usize) -> Mat3 {
    let mut inv = [[0.0; 3]; 3];
    for i in 0..n {
        inv[i][i] = 1.0 / t[i][i];
        for j in 0..i {
            let mut s = 0.0;
            for k in j..i {
                s += t[i][k] * inv[k][j];
            }
            inv[i][j] = -s / t[i][i];
        }
    }
    inv
}

/// `L^{-t} L^{-1}` for lower-triangular `L^{-1}`, i.e. `(L L^t)^{-1}`.
pub fn gram_inverse(linv: &Mat3, n: usize) -> Mat3 {
    let mut b = [[0.0; 3]; 3];
    for i in 0..n {
        for j in 0..n {
            let mut s = 0.0;
            for k in 0..n {
                s += linv[k][i] * linv[k][j];
            }
            b[i][j] = s;
        }
    }
    for i in 0..n {
        for j in (i + 1)..n {
            let s = 0.5 * (b[i][j] + b[j][i]);
            b[i][j] = s;
            b[j][i] = s;
        }
    }
    b
}

/// An orthonormal frame `(e0, e1, e2)` with `e0 = u / |u|`; in 2D only `e0, e1`.
pub fn frame(u: &Vec3, dim: usize) -> [Vec3; 3] {
    let e0 = scale(u, 1.0 / norm(u));
    if dim == 2 {
        return [e0, [-e0[1], e0[0], 0.0], [0.0; 3]];
    }
    let helper = if e0[0].abs() < 0.9 { [1.0, 0.0, 0.0] } else { [0.0, 1.0, 0.0] };
    let c = dot(&helper, &e0);
    let e1 = sub(&helper, &scale(&e0, c));
    let e1 = scale(&e1, 1.0 / norm(&e1));
    let e2 = [
        e0[1] * e1[2] - e0[2] * e1[1],
        e0[2] * e1[0] - e0[0] * e1[2],
        e0[0] * e1[1] - e0[1] * e1[0],
    ];
    [e0, e1, e2]
}
