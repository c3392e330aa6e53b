//! Fixed-size 3x3 real matrix helpers and a cyclic Jacobi eigensolver for
//! symmetric matrices.

pub type Mat3 = [[f64; 3]; 3];

pub const IDENTITY: Mat3 = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];

pub fn mat_mul(a: &Mat3, b: &Mat3) -> Mat3 {
    let mut out = [[0.0; 3]; 3];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, x) in row.iter_mut().enumerate() {
            *x = (0..3).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    out
}

pub fn mat_sub(a: &Mat3, b: &Mat3) -> Mat3 {
    let mut out = *a;
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] -= b[i][j];
        }
    }
    out
}

pub fn transpose(a: &Mat3) -> Mat3 {
    let mut out = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            out[j][i] = a[i][j];
        }
    }
    out
}

pub fn determinant(a: &Mat3) -> f64 {
    a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
        + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0])
}

/// Largest absolute entry.
pub fn max_abs(a: &Mat3) -> f64 {
    a.iter().flatten().fold(0.0, |m, x| m.max(x.abs()))
}

pub fn diag(d: [f64; 3]) -> Mat3 {
    [[d[0], 0.0, 0.0], [0.0, d[1], 0.0], [0.0, 0.0, d[2]]]
}

fn off_diagonal_norm(a: &Mat3) -> f64 {
    (a[0][1] * a[0][1] + a[0][2] * a[0][2] + a[1][2] * a[1][2]).sqrt()
}

/// Eigen-decomposition of a real symmetric 3x3 matrix by cyclic Jacobi
/// rotations.
///
/// Returns `(values, vectors)` where `vectors[k]` is the unit eigenvector of
/// `values[k]`. No ordering is imposed. Degenerate spectra are handled; the
/// returned vectors are always orthonormal.
pub fn symmetric_eigen(m: &Mat3) -> ([f64; 3], Mat3) {
    let mut a = *m;
    let mut v = IDENTITY;
    let scale = max_abs(m);
    if scale == 0.0 {
        return ([0.0; 3], IDENTITY);
    }
    for _sweep in 0..64 {
        if off_diagonal_norm(&a) <= f64::EPSILON * f64::EPSILON * scale {
            break;
        }
        for (p, q) in [(0, 1), (0, 2), (1, 2)] {
            let apq = a[p][q];
            if apq == 0.0 {
                continue;
            }
            let theta = (a[q][q] - a[p][p]) / (2.0 * apq);
            let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
            let c = 1.0 / (t * t + 1.0).sqrt();
            let s = t * c;
            let mut rot = IDENTITY;
            rot[p][p] = c;
            rot[q][q] = c;
            rot[p][q] = s;
            rot[q][p] = -s;
            a = mat_mul(&transpose(&rot), &mat_mul(&a, &rot));
            // the rotation zeroes this entry analytically
            a[p][q] = 0.0;
            a[q][p] = 0.0;
            v = mat_mul(&v, &rot);
        }
    }
    ([a[0][0], a[1][1], a[2][2]], transpose(&v))
}
