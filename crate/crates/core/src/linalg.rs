//! Dense 3x3 complex linear algebra: determinant, pivoted elimination and
//! closed-form eigenvalues.

use num_traits::{Float, Zero};

use crate::C64;

pub type Mat3 = [[C64; 3]; 3];
pub type Vec3 = [C64; 3];

/// Pivots smaller than this fraction of the largest entry count as zero.
pub const SINGULAR_RTOL: f64 = 1e-14;

pub fn mat_vec(m: &Mat3, v: &Vec3) -> Vec3 {
    let mut out = [C64::zero(); 3];
    for (o, row) in out.iter_mut().zip(m) {
        *o = row[0] * v[0] + row[1] * v[1] + row[2] * v[2];
    }
    out
}

pub fn trace(m: &Mat3) -> C64 {
    m[0][0] + m[1][1] + m[2][2]
}

pub fn det(m: &Mat3) -> C64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

fn max_abs(m: &Mat3) -> f64 {
    m.iter()
        .flat_map(|row| row.iter())
        .fold(0.0, |acc: f64, z| acc.max(z.norm()))
}

/// Solves `m x = b` by Gaussian elimination with partial pivoting.
///
/// Returns `None` when a pivot falls below [`SINGULAR_RTOL`] times the
/// largest matrix entry.
pub fn solve(m: &Mat3, b: &Vec3) -> Option<Vec3> {
    let scale = max_abs(m);
    if !(scale.is_finite()) || scale == 0.0 {
        return None;
    }
    let mut a = *m;
    let mut x = *b;
    for col in 0..3 {
        let pivot = (col..3)
            .max_by(|&i, &j| a[i][col].norm().total_cmp(&a[j][col].norm()))
            .unwrap_or(col);
        if a[pivot][col].norm() <= SINGULAR_RTOL * scale {
            return None;
        }
        a.swap(col, pivot);
        x.swap(col, pivot);
        for row in col + 1..3 {
            let f = a[row][col] / a[col][col];
            let pivot_row = a[col];
            for (dst, src) in a[row].iter_mut().zip(pivot_row).skip(col) {
                *dst -= f * src;
            }
            let delta = f * x[col];
            x[row] -= delta;
        }
    }
    for col in (0..3).rev() {
        let mut acc = x[col];
        for k in col + 1..3 {
            acc -= a[col][k] * x[k];
        }
        x[col] = acc / a[col][col];
    }
    Some(x)
}

/// Coefficients `(c2, c1, c0)` of the monic characteristic polynomial
/// `l^3 + c2 l^2 + c1 l + c0`.
pub fn char_poly(m: &Mat3) -> (C64, C64, C64) {
    let c2 = -trace(m);
    let c1 = m[0][0] * m[1][1] - m[0][1] * m[1][0] + m[0][0] * m[2][2] - m[0][2] * m[2][0]
        + m[1][1] * m[2][2]
        - m[1][2] * m[2][1];
    let c0 = -det(m);
    (c2, c1, c0)
}

/// Eigenvalues of a 3x3 complex matrix from the characteristic cubic
/// (Cardano), each polished by a few Newton steps.
pub fn eigenvalues(m: &Mat3) -> [C64; 3] {
    let (c2, c1, c0) = char_poly(m);
    let shift = c2 / 3.0;
    let p = c1 - c2 * c2 / 3.0;
    let q = c2 * c2 * c2 * (2.0 / 27.0) - c2 * c1 / 3.0 + c0;

    let disc = (q * q / 4.0 + p * p * p / 27.0).sqrt();
    let plus = -q / 2.0 + disc;
    let minus = -q / 2.0 - disc;
    let u3 = if plus.norm() >= minus.norm() {
        plus
    } else {
        minus
    };

    let mut roots = [C64::zero(); 3];
    if u3.norm() == 0.0 {
        roots = [-shift; 3];
    } else {
        let u = u3.powf(1.0 / 3.0);
        let omega = C64::new(-0.5, 3.0.sqrt() / 2.0);
        let mut uk = u;
        for r in roots.iter_mut() {
            *r = uk - p / (uk * 3.0) - shift;
            uk *= omega;
        }
    }

    let poly = |l: C64| ((l + c2) * l + c1) * l + c0;
    let deriv = |l: C64| (l * 3.0 + c2 * 2.0) * l + c1;
    for r in roots.iter_mut() {
        for _ in 0..4 {
            let f = poly(*r);
            let df = deriv(*r);
            if f.norm() == 0.0 || df.norm() == 0.0 {
                break;
            }
            let next = *r - f / df;
            if poly(next).norm() < f.norm() {
                *r = next;
            } else {
                break;
            }
        }
    }
    roots
}
