//! Fixed-size complex linear algebra for three-dimensional Hilbert space.
//!
//! Inner products conjugate the first argument: `inner(u, v) = Σ conj(u_k) v_k`.

use num_complex::Complex64;

pub type CVec3 = [Complex64; 3];
pub type CMat3 = [[Complex64; 3]; 3];

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);

pub fn inner(u: &CVec3, v: &CVec3) -> Complex64 {
    u.iter().zip(v).map(|(a, b)| a.conj() * b).sum()
}

pub fn norm(v: &CVec3) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn column(m: &CMat3, c: usize) -> CVec3 {
    [m[0][c], m[1][c], m[2][c]]
}

pub fn identity() -> CMat3 {
    let mut m = [[ZERO; 3]; 3];
    for (k, row) in m.iter_mut().enumerate() {
        row[k] = ONE;
    }
    m
}

/// `U† U` for a matrix whose columns are basis vectors.
pub fn gram(u: &CMat3) -> CMat3 {
    let cols: [CVec3; 3] = std::array::from_fn(|c| column(u, c));
    std::array::from_fn(|r| std::array::from_fn(|c| inner(&cols[r], &cols[c])))
}

/// Largest entrywise modulus of `U† U − I`.
pub fn unitarity_defect(u: &CMat3) -> f64 {
    let g = gram(u);
    let id = identity();
    let mut worst = 0.0_f64;
    for r in 0..3 {
        for c in 0..3 {
            worst = worst.max((g[r][c] - id[r][c]).norm());
        }
    }
    worst
}

/// Orthonormalizes the columns of `m` by modified Gram–Schmidt.
///
/// Returns `None` when the columns are numerically dependent.
pub fn orthonormalize_columns(m: &CMat3) -> Option<CMat3> {
    let mut cols: [CVec3; 3] = std::array::from_fn(|c| column(m, c));
    for c in 0..3 {
        for p in 0..c {
            let proj = inner(&cols[p], &cols[c]);
            let prev = cols[p];
            for (x, q) in cols[c].iter_mut().zip(prev) {
                *x -= proj * q;
            }
        }
        let n = norm(&cols[c]);
        if n < 1e-12 {
            return None;
        }
        for x in cols[c].iter_mut() {
            *x /= n;
        }
    }
    Some(std::array::from_fn(|r| std::array::from_fn(|c| cols[c][r])))
}

/// Wraps an angle into `[0, 2π)`.
pub fn wrap_angle(theta: f64) -> f64 {
    let tau = std::f64::consts::TAU;
    let w = theta.rem_euclid(tau);
    if w >= tau {
        0.0
    } else {
        w
    }
}

/// Shortest distance between two angles on the circle.
pub fn angle_distance(a: f64, b: f64) -> f64 {
    let d = wrap_angle(a - b);
    d.min(std::f64::consts::TAU - d)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gram_schmidt_yields_unitary() {
        let m = [
            [Complex64::new(1.0, 0.2), Complex64::new(0.3, -1.0), Complex64::new(0.0, 0.5)],
            [Complex64::new(-0.4, 0.1), Complex64::new(2.0, 0.0), Complex64::new(1.0, 1.0)],
            [Complex64::new(0.7, 0.7), Complex64::new(0.1, 0.0), Complex64::new(-1.0, 0.3)],
        ];
        let u = orthonormalize_columns(&m).unwrap();
        assert!(unitarity_defect(&u) < 1e-14);
    }

    #[test]
    fn dependent_columns_rejected() {
        let m = [[ONE, ONE, ZERO], [ZERO, ZERO, ONE], [ZERO, ZERO, ZERO]];
        assert!(orthonormalize_columns(&m).is_none());
    }

    #[test]
    fn wrapping() {
        let tau = std::f64::consts::TAU;
        assert_eq!(wrap_angle(0.0), 0.0);
        assert!((wrap_angle(-0.5) - (tau - 0.5)).abs() < 1e-15);
        assert!(angle_distance(0.1, tau - 0.1) < 0.2 + 1e-15);
        assert!(wrap_angle(-1e-18) < tau);
    }
}
