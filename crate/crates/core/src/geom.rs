//! Small fixed-size vector helpers over a generic scalar.

use crate::scalar::Real;

pub type Vec3<T> = [T; 3];

#[inline]
pub fn add<T: Real>(x: Vec3<T>, y: Vec3<T>) -> Vec3<T> {
    [x[0] + y[0], x[1] + y[1], x[2] + y[2]]
}

#[inline]
pub fn sub<T: Real>(x: Vec3<T>, y: Vec3<T>) -> Vec3<T> {
    [x[0] - y[0], x[1] - y[1], x[2] - y[2]]
}

#[inline]
pub fn scale<T: Real>(x: Vec3<T>, s: T) -> Vec3<T> {
    [x[0] * s, x[1] * s, x[2] * s]
}

#[inline]
pub fn dot<T: Real>(x: Vec3<T>, y: Vec3<T>) -> T {
    x[0] * y[0] + x[1] * y[1] + x[2] * y[2]
}

#[inline]
pub fn cross<T: Real>(x: Vec3<T>, y: Vec3<T>) -> Vec3<T> {
    [x[1] * y[2] - x[2] * y[1], x[2] * y[0] - x[0] * y[2], x[0] * y[1] - x[1] * y[0]]
}

#[inline]
pub fn norm<T: Real>(x: Vec3<T>) -> T {
    dot(x, x).sqrt()
}

pub fn normalize<T: Real>(x: Vec3<T>) -> Option<Vec3<T>> {
    let n = norm(x);
    if n > T::zero() && n.is_finite() {
        Some(scale(x, T::one() / n))
    } else {
        None
    }
}

#[inline]
pub fn det3<T: Real>(x: Vec3<T>, y: Vec3<T>, z: Vec3<T>) -> T {
    dot(x, cross(y, z))
}

pub fn zero<T: Real>() -> Vec3<T> {
    [T::zero(); 3]
}

/// Row-major 3×3 matrix.
pub type Mat3<T> = [[T; 3]; 3];

pub fn mat_vec<T: Real>(m: &Mat3<T>, x: Vec3<T>) -> Vec3<T> {
    [dot(m[0], x), dot(m[1], x), dot(m[2], x)]
}

/// Rotation about a unit axis by `angle` (Rodrigues).
pub fn rotation<T: Real>(axis: Vec3<T>, angle: T) -> Mat3<T> {
    let (s, c) = angle.sin_cos();
    let t = T::one() - c;
    let [x, y, z] = axis;
    [
        [t * x * x + c, t * x * y - s * z, t * x * z + s * y],
        [t * x * y + s * z, t * y * y + c, t * y * z - s * x],
        [t * x * z - s * y, t * y * z + s * x, t * z * z + c],
    ]
}

/// Eigen-decomposition of a symmetric 3×3 matrix by cyclic Jacobi sweeps.
/// Returns eigenvalues in descending order and the matching unit
/// eigenvectors as rows.
#[allow(clippy::needless_range_loop)]
pub fn symmetric_eigen<T: Real>(mut a: Mat3<T>) -> ([T; 3], Mat3<T>) {
    let mut v: Mat3<T> =
        [[T::one(), T::zero(), T::zero()], [T::zero(), T::one(), T::zero()], [T::zero(), T::zero(), T::one()]];
    for _ in 0..64 {
        let off = a[0][1] * a[0][1] + a[0][2] * a[0][2] + a[1][2] * a[1][2];
        if off <= T::epsilon() * T::epsilon() * (a[0][0] * a[0][0] + a[1][1] * a[1][1] + a[2][2] * a[2][2]) {
            break;
        }
        for (p, q) in [(0, 1), (0, 2), (1, 2)] {
            if a[p][q] == T::zero() {
                continue;
            }
            let theta = (a[q][q] - a[p][p]) / (T::lit(2.0) * a[p][q]);
            let sign = if theta >= T::zero() { T::one() } else { -T::one() };
            let t = sign / (theta.abs() + (theta * theta + T::one()).sqrt());
            let c = T::one() / (t * t + T::one()).sqrt();
            let s = t * c;
            for k in 0..3 {
                let (akp, akq) = (a[k][p], a[k][q]);
                a[k][p] = c * akp - s * akq;
                a[k][q] = s * akp + c * akq;
            }
            for k in 0..3 {
                let (apk, aqk) = (a[p][k], a[q][k]);
                a[p][k] = c * apk - s * aqk;
                a[q][k] = s * apk + c * aqk;
            }
            for row in v.iter_mut() {
                let (vp, vq) = (row[p], row[q]);
                row[p] = c * vp - s * vq;
                row[q] = s * vp + c * vq;
            }
        }
    }
    let mut order = [0usize, 1, 2];
    order.sort_by(|&i, &j| a[j][j].partial_cmp(&a[i][i]).unwrap_or(std::cmp::Ordering::Equal));
    let values = order.map(|i| a[i][i]);
    let vectors = order.map(|i| [v[0][i], v[1][i], v[2][i]]);
    (values, vectors)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn jacobi_recovers_eigenpairs() {
        let m = [[4.0, 1.0, 0.5], [1.0, 3.0, -0.2], [0.5, -0.2, 1.0]];
        let (vals, vecs) = symmetric_eigen::<f64>(m);
        assert!(vals[0] >= vals[1] && vals[1] >= vals[2]);
        for k in 0..3 {
            let mv = mat_vec(&m, vecs[k]);
            for i in 0..3 {
                assert!((mv[i] - vals[k] * vecs[k][i]).abs() < 1e-12);
            }
            assert!((norm(vecs[k]) - 1.0).abs() < 1e-12);
        }
        assert!((vals.iter().sum::<f64>() - 8.0).abs() < 1e-12);
    }

    #[test]
    fn rotation_is_orthonormal() {
        let r = rotation::<f64>(normalize([1.0, 2.0, -0.5]).unwrap(), 0.7);
        let x = [0.3, -1.0, 2.0];
        assert!((norm(mat_vec(&r, x)) - norm(x)).abs() < 1e-14);
        assert!((det3(r[0], r[1], r[2]) - 1.0).abs() < 1e-14);
    }
}
