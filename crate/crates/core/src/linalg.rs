//! Small dense linear algebra on row-major `Vec<f64>` matrices.

use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Solves `A x = b` for square `A` (row-major, `n × n`) by Gaussian
/// elimination with partial pivoting. Returns `None` when `A` is singular
/// to working precision.
pub fn solve(a: &[f64], b: &[f64]) -> Option<Vec<f64>> {
    let n = b.len();
    debug_assert_eq!(a.len(), n * n);
    let mut m = a.to_vec();
    let mut x = b.to_vec();
    let scale = m.iter().fold(0.0_f64, |s, v| s.max(v.abs()));
    if scale == 0.0 {
        return None;
    }
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| m[i * n + col].abs().total_cmp(&m[j * n + col].abs()))?;
        if m[pivot * n + col].abs() <= 1e-14 * scale {
            return None;
        }
        if pivot != col {
            for k in 0..n {
                m.swap(pivot * n + k, col * n + k);
            }
            x.swap(pivot, col);
        }
        let d = m[col * n + col];
        for row in col + 1..n {
            let f = m[row * n + col] / d;
            if f != 0.0 {
                for k in col..n {
                    m[row * n + k] -= f * m[col * n + k];
                }
                x[row] -= f * x[col];
            }
        }
    }
    for col in (0..n).rev() {
        let mut s = x[col];
        for k in col + 1..n {
            s -= m[col * n + k] * x[k];
        }
        x[col] = s / m[col * n + col];
    }
    Some(x)
}

/// Determinant of a square row-major matrix.
pub fn det(a: &[f64], n: usize) -> f64 {
    let mut m = a.to_vec();
    let mut sign = 1.0;
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| m[i * n + col].abs().total_cmp(&m[j * n + col].abs()))
            .unwrap_or(col);
        if m[pivot * n + col] == 0.0 {
            return 0.0;
        }
        if pivot != col {
            for k in 0..n {
                m.swap(pivot * n + k, col * n + k);
            }
            sign = -sign;
        }
        let d = m[col * n + col];
        for row in col + 1..n {
            let f = m[row * n + col] / d;
            for k in col..n {
                m[row * n + k] -= f * m[col * n + k];
            }
        }
    }
    sign * (0..n).map(|i| m[i * n + i]).product::<f64>()
}

/// Numerical rank of a set of row vectors of equal length.
pub fn rank(rows: &[&[f64]], tol: f64) -> usize {
    if rows.is_empty() {
        return 0;
    }
    let cols = rows[0].len();
    let mut m: Vec<Vec<f64>> = rows.iter().map(|r| r.to_vec()).collect();
    let mut r = 0;
    for col in 0..cols {
        if r == m.len() {
            break;
        }
        let pivot = (r..m.len())
            .max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs()))
            .unwrap();
        if m[pivot][col].abs() <= tol {
            continue;
        }
        m.swap(r, pivot);
        for i in r + 1..m.len() {
            let f = m[i][col] / m[r][col];
            for k in col..cols {
                let v = m[r][k];
                m[i][k] -= f * v;
            }
        }
        r += 1;
    }
    r
}

/// A vector orthogonal to `d − 1` rows in ℝᵈ, via signed cofactors.
///
/// The result is zero exactly when the rows are linearly dependent.
pub fn orthogonal_complement(rows: &[&[f64]]) -> Vec<f64> {
    let d = rows.len() + 1;
    let mut out = vec![0.0; d];
    let mut minor = Vec::with_capacity((d - 1) * (d - 1));
    for (j, slot) in out.iter_mut().enumerate() {
        minor.clear();
        for row in rows {
            minor.extend(row.iter().enumerate().filter(|(k, _)| *k != j).map(|(_, v)| *v));
        }
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        *slot = sign * det(&minor, d - 1);
    }
    out
}

/// Minimum-norm solution of the underdetermined system `J Δ = r`
/// (`J` is `m × k`, row-major, full row rank): `Δ = Jᵀ (J Jᵀ)⁻¹ r`.
pub fn min_norm_solve(j: &[f64], m: usize, k: usize, r: &[f64]) -> Option<Vec<f64>> {
    let mut jjt = vec![0.0; m * m];
    for a in 0..m {
        for b in 0..=a {
            let v = dot(&j[a * k..(a + 1) * k], &j[b * k..(b + 1) * k]);
            jjt[a * m + b] = v;
            jjt[b * m + a] = v;
        }
    }
    let y = solve(&jjt, r)?;
    let mut delta = vec![0.0; k];
    for a in 0..m {
        for (d, v) in delta.iter_mut().zip(&j[a * k..(a + 1) * k]) {
            *d += v * y[a];
        }
    }
    Some(delta)
}

/// Lazily yields every `k`-subset of `0..n` in lexicographic order.
pub fn combinations(n: usize, k: usize) -> impl Iterator<Item = Vec<usize>> {
    let mut current: Option<Vec<usize>> = if k <= n { Some((0..k).collect()) } else { None };
    core::iter::from_fn(move || {
        let out = current.clone()?;
        let next = {
            let c = current.as_mut().unwrap();
            let mut i = k;
            loop {
                if i == 0 {
                    break None;
                }
                i -= 1;
                if c[i] < n - k + i {
                    c[i] += 1;
                    for j in i + 1..k {
                        c[j] = c[j - 1] + 1;
                    }
                    break Some(());
                }
            }
        };
        if next.is_none() {
            current = None;
        }
        Some(out)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn solve_3x3() {
        let a = [2.0, 1.0, -1.0, -3.0, -1.0, 2.0, -2.0, 1.0, 2.0];
        let x = solve(&a, &[8.0, -11.0, -3.0]).unwrap();
        assert_relative_eq!(x[0], 2.0, epsilon = 1e-12);
        assert_relative_eq!(x[1], 3.0, epsilon = 1e-12);
        assert_relative_eq!(x[2], -1.0, epsilon = 1e-12);
        assert!(solve(&[1.0, 2.0, 2.0, 4.0], &[1.0, 1.0]).is_none());
    }

    #[test]
    fn determinant_and_rank() {
        assert_relative_eq!(det(&[1.0, 2.0, 3.0, 4.0], 2), -2.0);
        let r1 = [1.0, 0.0, 1.0];
        let r2 = [2.0, 0.0, 2.0];
        let r3 = [0.0, 1.0, 0.0];
        assert_eq!(rank(&[&r1, &r2, &r3], 1e-12), 2);
    }

    #[test]
    fn complement_is_cross_product_in_3d() {
        let c = orthogonal_complement(&[&[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0]]);
        assert_eq!(c, vec![0.0, 0.0, 1.0]);
        let a = [0.3, -1.0, 2.0, 0.5, 0.1];
        let b = [1.0, 1.0, 0.0, -0.2, 0.7];
        let c = [0.0, 2.0, 1.0, 1.0, -1.0];
        let e = [0.4, 0.0, 0.0, 3.0, 1.0];
        let v = orthogonal_complement(&[&a, &b, &c, &e]);
        for r in [&a, &b, &c, &e] {
            assert!(dot(r, &v).abs() < 1e-12);
        }
        assert!(norm(&v) > 0.0);
    }

    #[test]
    fn min_norm_hits_target() {
        let j = [1.0, 2.0, 0.0, 0.0, 1.0, 1.0];
        let d = min_norm_solve(&j, 2, 3, &[1.0, -1.0]).unwrap();
        assert_relative_eq!(dot(&j[..3], &d), 1.0, epsilon = 1e-12);
        assert_relative_eq!(dot(&j[3..], &d), -1.0, epsilon = 1e-12);
    }

    #[test]
    fn combinations_count() {
        assert_eq!(combinations(6, 3).count(), 20);
        assert_eq!(combinations(3, 0).count(), 1);
        assert_eq!(combinations(2, 3).count(), 0);
        let all: Vec<_> = combinations(4, 2).collect();
        assert_eq!(all[0], vec![0, 1]);
        assert_eq!(all[5], vec![2, 3]);
    }
}
