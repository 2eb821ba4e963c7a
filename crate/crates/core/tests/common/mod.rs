//! Independent oracles for the integration tests.
//!
//! The Engel algebra is realized by 4x4 strictly upper triangular matrices
//! `X1 = E12 + E23`, `X2 = E34`, `X3 = E24`, `X4 = E14`. In this realization
//! `exp(x4 X4) exp(x3 X3) exp(x2 X2) exp(x1 X1)` has entries
//! `(1,2) = x1`, `(3,4) = x2`, `(2,4) = x3`, `(1,4) = x4`, so second-kind
//! coordinates are read off the matrix directly. Nothing here calls into
//! the library except for the plain `[f64; 4]` coordinate type.

#![allow(dead_code)]

pub type Mat = [[f64; 4]; 4];
pub type Coords = [f64; 4];

pub const I: Mat = [
    [1.0, 0.0, 0.0, 0.0],
    [0.0, 1.0, 0.0, 0.0],
    [0.0, 0.0, 1.0, 0.0],
    [0.0, 0.0, 0.0, 1.0],
];

pub fn matmul(a: &Mat, b: &Mat) -> Mat {
    let mut c = [[0.0; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            c[i][j] = (0..4).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    c
}

pub fn add(a: &Mat, b: &Mat, s: f64) -> Mat {
    let mut c = *a;
    for i in 0..4 {
        for j in 0..4 {
            c[i][j] += s * b[i][j];
        }
    }
    c
}

/// `a1 X1 + a2 X2 + a3 X3 + a4 X4`.
pub fn algebra(a: &Coords) -> Mat {
    let mut n = [[0.0; 4]; 4];
    n[0][1] = a[0];
    n[1][2] = a[0];
    n[2][3] = a[1];
    n[1][3] = a[2];
    n[0][3] = a[3];
    n
}

/// Inverse of [`algebra`] on its image.
pub fn algebra_coords(n: &Mat) -> Coords {
    [n[0][1], n[2][3], n[1][3], n[0][3]]
}

pub fn second_to_matrix(x: &Coords) -> Mat {
    let mut m = I;
    m[0][1] = x[0];
    m[1][2] = x[0];
    m[0][2] = 0.5 * x[0] * x[0];
    m[2][3] = x[1];
    m[1][3] = x[2];
    m[0][3] = x[3];
    m
}

pub fn matrix_to_second(m: &Mat) -> Coords {
    [m[0][1], m[2][3], m[1][3], m[0][3]]
}

/// Matrix logarithm of a unipotent matrix: `N - N²/2 + N³/3` with `N = M - I`.
pub fn log_unipotent(m: &Mat) -> Mat {
    let n = add(m, &I, -1.0);
    let n2 = matmul(&n, &n);
    let n3 = matmul(&n2, &n);
    add(&add(&n, &n2, -0.5), &n3, 1.0 / 3.0)
}

/// Solves `M' = M A(t)` from `M(0) = m0` over `[0, t1]` with classical RK4.
pub fn rk4_flow(m0: &Mat, a: impl Fn(f64) -> Mat, t0: f64, t1: f64, steps: usize) -> Mat {
    let h = (t1 - t0) / steps as f64;
    let mut m = *m0;
    for k in 0..steps {
        let t = t0 + k as f64 * h;
        let k1 = matmul(&m, &a(t));
        let k2 = matmul(&add(&m, &k1, 0.5 * h), &a(t + 0.5 * h));
        let k3 = matmul(&add(&m, &k2, 0.5 * h), &a(t + 0.5 * h));
        let k4 = matmul(&add(&m, &k3, h), &a(t + h));
        for i in 0..4 {
            for j in 0..4 {
                m[i][j] += h / 6.0 * (k1[i][j] + 2.0 * k2[i][j] + 2.0 * k3[i][j] + k4[i][j]);
            }
        }
    }
    m
}

/// `exp(A) exp(B)` by flowing along the constant fields `A` then `B`,
/// returned as first-kind coordinates via the matrix logarithm.
pub fn first_kind_product_by_flow(a: &Coords, b: &Coords, steps: usize) -> Coords {
    let (ma, mb) = (algebra(a), algebra(b));
    let ea = rk4_flow(&I, |_| ma, 0.0, 1.0, steps);
    let eab = rk4_flow(&ea, |_| mb, 0.0, 1.0, steps);
    algebra_coords(&log_unipotent(&eab))
}

/// Horizontal lift of `u(t)` from `start` by RK4 on the matrix ODE.
pub fn rk4_lift(u: impl Fn(f64) -> [f64; 2], start: &Coords, t0: f64, t1: f64, steps: usize) -> Coords {
    let m = rk4_flow(
        &second_to_matrix(start),
        |t| {
            let v = u(t);
            algebra(&[v[0], v[1], 0.0, 0.0])
        },
        t0,
        t1,
        steps,
    );
    matrix_to_second(&m)
}

/// Central difference Jacobian of `f: R^n -> R^m` at `x`.
pub fn fd_jacobian(f: impl Fn(&[f64]) -> Vec<f64>, x: &[f64], h: f64) -> Vec<Vec<f64>> {
    let m = f(x).len();
    let mut jac = vec![vec![0.0; x.len()]; m];
    for c in 0..x.len() {
        let (mut xp, mut xm) = (x.to_vec(), x.to_vec());
        xp[c] += h;
        xm[c] -= h;
        let (fp, fm) = (f(&xp), f(&xm));
        for r in 0..m {
            jac[r][c] = (fp[r] - fm[r]) / (2.0 * h);
        }
    }
    jac
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}
