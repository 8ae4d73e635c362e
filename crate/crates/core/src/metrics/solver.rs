//! Augmented-Lagrangian / L-BFGS solver for the discretised horizontal
//! transcription problem.
//!
//! Unknowns are piecewise-constant controls `u_j = (a_j, b_j)` on `M` uniform
//! segments of `[0, 1]`. The objective is the energy `h Σ |u_j|²`; affine
//! conditions `C · γ(1) = e` on the endpoint are enforced by an augmented
//! Lagrangian, followed by Gauss–Newton projection onto the constraint set.

use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::linalg::{dot, min_norm_solve};

/// Endpoint constraint `C ξ = e` with unit rows.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Problem {
    pub n: usize,
    pub segments: usize,
    pub start: Vec<f64>,
    pub rows: Vec<Vec<f64>>,
    pub rhs: Vec<f64>,
}

impl Problem {
    fn vars(&self) -> usize {
        2 * self.n * self.segments
    }

    /// Endpoint of the path and its Jacobian (row-major, `(2n+1) × vars`).
    pub fn endpoint_jacobian(&self, u: &[f64], want_jac: bool) -> (Vec<f64>, Vec<f64>) {
        let n = self.n;
        let m = self.segments;
        let d = 2 * n + 1;
        let nv = self.vars();
        let h = 1.0 / m as f64;
        let mut state = self.start.clone();
        // States at the start of each segment, needed for the t-row.
        let mut starts = if want_jac { Vec::with_capacity(m * 2 * n) } else { Vec::new() };
        for j in 0..m {
            let c = &u[j * 2 * n..(j + 1) * 2 * n];
            if want_jac {
                starts.extend_from_slice(&state[..2 * n]);
            }
            let mut dt = 0.0;
            for i in 0..n {
                dt += c[i] * state[n + i] - c[n + i] * state[i];
            }
            state[2 * n] += 2.0 * h * dt;
            for k in 0..2 * n {
                state[k] += h * c[k];
            }
        }
        if !want_jac {
            return (state, Vec::new());
        }
        let mut jac = vec![0.0; d * nv];
        let mut suffix = vec![0.0; 2 * n];
        for j in (0..m).rev() {
            let c = &u[j * 2 * n..(j + 1) * 2 * n];
            let s = &starts[j * 2 * n..(j + 1) * 2 * n];
            for i in 0..n {
                let ai = j * 2 * n + i;
                let bi = j * 2 * n + n + i;
                jac[i * nv + ai] = h;
                jac[(n + i) * nv + bi] = h;
                jac[2 * n * nv + ai] = 2.0 * h * (s[n + i] - h * suffix[n + i]);
                jac[2 * n * nv + bi] = 2.0 * h * (-s[i] + h * suffix[i]);
            }
            for k in 0..2 * n {
                suffix[k] += c[k];
            }
        }
        (state, jac)
    }

    /// Constraint residual and, optionally, its Jacobian.
    pub fn constraints(&self, u: &[f64], want_jac: bool) -> (Vec<f64>, Vec<f64>) {
        let (end, jend) = self.endpoint_jacobian(u, want_jac);
        let nv = self.vars();
        let d = 2 * self.n + 1;
        let c: Vec<f64> = self
            .rows
            .iter()
            .zip(&self.rhs)
            .map(|(r, e)| dot(r, &end) - e)
            .collect();
        if !want_jac {
            return (c, Vec::new());
        }
        let mut jc = vec![0.0; self.rows.len() * nv];
        for (a, r) in self.rows.iter().enumerate() {
            for (k, rk) in r.iter().enumerate().take(d) {
                if *rk != 0.0 {
                    let src = &jend[k * nv..(k + 1) * nv];
                    for (dst, v) in jc[a * nv..(a + 1) * nv].iter_mut().zip(src) {
                        *dst += rk * v;
                    }
                }
            }
        }
        (c, jc)
    }

    fn energy(&self, u: &[f64]) -> f64 {
        dot(u, u) / self.segments as f64
    }

    /// Augmented-Lagrangian solve from `u0` followed by feasibility projection.
    pub fn solve(&self, u0: &[f64], tol: f64) -> Vec<f64> {
        let nv = self.vars();
        let m = self.rows.len();
        let h = 1.0 / self.segments as f64;
        let mut u = u0.to_vec();
        let mut lambda = vec![0.0; m];
        let mut mu = 10.0;
        let mut prev = f64::INFINITY;
        for _ in 0..30 {
            let lam = lambda.clone();
            let phi = |x: &[f64], g: &mut [f64]| -> f64 {
                let (c, jc) = self.constraints(x, true);
                let mut val = self.energy(x);
                for (gi, xi) in g.iter_mut().zip(x) {
                    *gi = 2.0 * h * xi;
                }
                for a in 0..m {
                    val += -lam[a] * c[a] + 0.5 * mu * c[a] * c[a];
                    let coef = -lam[a] + mu * c[a];
                    for (gi, ji) in g.iter_mut().zip(&jc[a * nv..(a + 1) * nv]) {
                        *gi += coef * ji;
                    }
                }
                val
            };
            u = lbfgs(phi, &u, 400);
            let (c, _) = self.constraints(&u, false);
            let cn = dot(&c, &c).sqrt();
            if cn <= 0.1 * tol {
                break;
            }
            for (l, ci) in lambda.iter_mut().zip(&c) {
                *l -= mu * ci;
            }
            if cn > 0.25 * prev {
                mu = (mu * 10.0).min(1e10);
            }
            prev = cn;
        }
        self.restore(&mut u, tol);
        u
    }

    /// Gauss–Newton minimum-norm steps onto `C γ(1) = e`.
    fn restore(&self, u: &mut [f64], tol: f64) {
        let nv = self.vars();
        let m = self.rows.len();
        for _ in 0..30 {
            let (c, jc) = self.constraints(u, true);
            let cn = dot(&c, &c).sqrt();
            if cn <= 1e-3 * tol || !cn.is_finite() {
                return;
            }
            let Some(step) = min_norm_solve(&jc, m, nv, &c) else {
                return;
            };
            let mut trial: Vec<f64> = u.iter().zip(&step).map(|(x, s)| x - s).collect();
            let mut t = 1.0;
            loop {
                let (ct, _) = self.constraints(&trial, false);
                if dot(&ct, &ct).sqrt() < cn || t < 1e-4 {
                    break;
                }
                t *= 0.5;
                trial = u.iter().zip(&step).map(|(x, s)| x - t * s).collect();
            }
            u.copy_from_slice(&trial);
        }
    }
}

/// Limited-memory BFGS with Armijo backtracking.
pub(crate) fn lbfgs<F>(mut f: F, x0: &[f64], max_iter: usize) -> Vec<f64>
where
    F: FnMut(&[f64], &mut [f64]) -> f64,
{
    const MEMORY: usize = 12;
    let nv = x0.len();
    let mut x = x0.to_vec();
    let mut g = vec![0.0; nv];
    let mut fx = f(&x, &mut g);
    let g0 = dot(&g, &g).sqrt().max(1.0);
    let mut hist: VecDeque<(Vec<f64>, Vec<f64>, f64)> = VecDeque::with_capacity(MEMORY);
    let mut gn = vec![0.0; nv];
    for _ in 0..max_iter {
        let gnorm = dot(&g, &g).sqrt();
        if gnorm <= 1e-11 * g0 || !fx.is_finite() {
            break;
        }
        // Two-loop recursion.
        let mut d: Vec<f64> = g.iter().map(|v| -v).collect();
        let mut alphas = Vec::with_capacity(hist.len());
        for (s, y, rho) in hist.iter().rev() {
            let a = rho * dot(s, &d);
            for (di, yi) in d.iter_mut().zip(y) {
                *di -= a * yi;
            }
            alphas.push(a);
        }
        let gamma = match hist.back() {
            Some((s, y, _)) => dot(s, y) / dot(y, y),
            None => 1.0 / gnorm,
        };
        d.iter_mut().for_each(|v| *v *= gamma);
        for ((s, y, rho), a) in hist.iter().zip(alphas.iter().rev()) {
            let b = rho * dot(y, &d);
            for (di, si) in d.iter_mut().zip(s) {
                *di += (a - b) * si;
            }
        }
        let mut slope = dot(&g, &d);
        if slope >= 0.0 {
            hist.clear();
            d = g.iter().map(|v| -v / gnorm).collect();
            slope = dot(&g, &d);
        }
        let mut step = 1.0;
        let mut xn = vec![0.0; nv];
        let mut fnew;
        loop {
            for k in 0..nv {
                xn[k] = x[k] + step * d[k];
            }
            fnew = f(&xn, &mut gn);
            if fnew <= fx + 1e-4 * step * slope || step < 1e-14 {
                break;
            }
            step *= 0.5;
        }
        if !(fnew < fx) {
            break;
        }
        let s: Vec<f64> = xn.iter().zip(&x).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = gn.iter().zip(&g).map(|(a, b)| a - b).collect();
        let sy = dot(&s, &y);
        let rel_drop = (fx - fnew) / fx.abs().max(1e-300);
        x.copy_from_slice(&xn);
        g.copy_from_slice(&gn);
        fx = fnew;
        if sy > 1e-14 * dot(&y, &y).sqrt() * dot(&s, &s).sqrt() {
            if hist.len() == MEMORY {
                hist.pop_front();
            }
            hist.push_back((s, y, 1.0 / sy));
        }
        if rel_drop < 1e-16 {
            break;
        }
    }
    x
}
