//! Tensor Gauss–Legendre and seeded Monte Carlo integration with error
//! estimates.
//!
//! Gauss rules report the difference against the same rule at half order;
//! Monte Carlo reports the standard error of the mean. Monte Carlo samples
//! are drawn in fixed chunks of [`MC_CHUNK`] points, chunk `c` using ChaCha8
//! stream `c` of the run seed, and chunk statistics are merged in chunk order,
//! so results do not depend on how chunks are scheduled.

use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::heis::AxisBox;
use crate::parallel::map_indexed;

/// Samples per Monte Carlo chunk.
pub const MC_CHUNK: usize = 4096;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuadratureError {
    #[error("non-finite integrand value at {location:?}")]
    NonFinite { location: Vec<f64> },
    #[error("invalid quadrature specification: {0}")]
    InvalidSpec(&'static str),
    #[error("integration region has zero volume or is unbounded")]
    DegenerateRegion,
}

/// An integral together with a nonnegative error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct IntegralValue {
    pub value: f64,
    pub error_estimate: f64,
}

impl IntegralValue {
    pub fn exact(value: f64) -> Self {
        IntegralValue {
            value,
            error_estimate: 0.0,
        }
    }
}

/// A one-dimensional rule on an interval.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum AxisRule {
    /// Gauss–Legendre with `order` nodes.
    Gauss { order: usize },
    /// Composite Gauss on `panels` equal panels, further split at `breaks`.
    Composite {
        order: usize,
        panels: usize,
        breaks: Vec<f64>,
    },
    /// Composite Gauss in `ln s` (interval must be positive), split at `breaks`.
    LogComposite {
        order: usize,
        panels: usize,
        breaks: Vec<f64>,
    },
}

impl AxisRule {
    fn order(&self) -> usize {
        match self {
            AxisRule::Gauss { order }
            | AxisRule::Composite { order, .. }
            | AxisRule::LogComposite { order, .. } => *order,
        }
    }

    fn with_order(&self, order: usize) -> AxisRule {
        let mut r = self.clone();
        match &mut r {
            AxisRule::Gauss { order: o }
            | AxisRule::Composite { order: o, .. }
            | AxisRule::LogComposite { order: o, .. } => *o = order,
        }
        r
    }

    /// Nodes and weights on `[lo, hi]`.
    pub fn nodes(&self, lo: f64, hi: f64) -> Result<(Vec<f64>, Vec<f64>), QuadratureError> {
        if !(lo.is_finite() && hi.is_finite() && hi > lo) {
            return Err(QuadratureError::DegenerateRegion);
        }
        let (x, w) = gauss_legendre(self.order());
        let mut nodes = Vec::new();
        let mut weights = Vec::new();
        let mut push_panel = |a: f64, b: f64, log: bool| {
            let (m, h) = (0.5 * (a + b), 0.5 * (b - a));
            for (xi, wi) in x.iter().zip(&w) {
                let s = m + h * xi;
                if log {
                    let t = s.exp();
                    nodes.push(t);
                    weights.push(h * wi * t);
                } else {
                    nodes.push(s);
                    weights.push(h * wi);
                }
            }
        };
        match self {
            AxisRule::Gauss { .. } => push_panel(lo, hi, false),
            AxisRule::Composite { panels, breaks, .. } => {
                for (a, b) in panel_edges(lo, hi, *panels, breaks) {
                    push_panel(a, b, false);
                }
            }
            AxisRule::LogComposite { panels, breaks, .. } => {
                if lo <= 0.0 {
                    return Err(QuadratureError::InvalidSpec(
                        "log-composite rule needs a positive interval",
                    ));
                }
                let lb: Vec<f64> = breaks.iter().filter(|b| **b > 0.0).map(|b| b.ln()).collect();
                for (a, b) in panel_edges(lo.ln(), hi.ln(), *panels, &lb) {
                    push_panel(a, b, true);
                }
            }
        }
        Ok((nodes, weights))
    }
}

fn panel_edges(lo: f64, hi: f64, panels: usize, breaks: &[f64]) -> Vec<(f64, f64)> {
    let panels = panels.max(1);
    let mut edges: Vec<f64> = (0..=panels)
        .map(|k| lo + (hi - lo) * k as f64 / panels as f64)
        .collect();
    edges.extend(breaks.iter().copied().filter(|b| *b > lo && *b < hi));
    edges.sort_by(f64::total_cmp);
    edges.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * (hi - lo));
    edges.windows(2).map(|w| (w[0], w[1])).collect()
}

/// Gauss–Legendre nodes and weights on `[−1, 1]`.
pub fn gauss_legendre(order: usize) -> (Vec<f64>, Vec<f64>) {
    let n = order.max(1);
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut z = (core::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            if n == 1 {
                p0 = 1.0;
            }
            dp = nf * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        if n == 1 {
            z = 0.0;
            dp = 1.0;
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

/// Integration method.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Rule {
    /// Tensor Gauss–Legendre with the same order on every axis.
    Gauss { order: usize },
    /// Tensor product of per-axis rules.
    Tensor(Vec<AxisRule>),
    /// Uniform Monte Carlo over the bounding box.
    MonteCarlo { samples: usize },
}

/// Method plus the seed for Monte Carlo streams.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct QuadratureSpec {
    pub rule: Rule,
    pub seed: u64,
}

impl QuadratureSpec {
    pub fn gauss(order: usize) -> Self {
        QuadratureSpec {
            rule: Rule::Gauss { order },
            seed: 0,
        }
    }

    pub fn monte_carlo(samples: usize, seed: u64) -> Self {
        QuadratureSpec {
            rule: Rule::MonteCarlo { samples },
            seed,
        }
    }

    pub fn validate(&self, dim: usize) -> Result<(), QuadratureError> {
        match &self.rule {
            Rule::Gauss { order } if *order < 2 => {
                Err(QuadratureError::InvalidSpec("Gauss order must be at least 2"))
            }
            Rule::Tensor(axes) if axes.len() != dim => {
                Err(QuadratureError::InvalidSpec("tensor rule needs one axis rule per dimension"))
            }
            Rule::Tensor(axes) if axes.iter().any(|a| a.order() < 2) => {
                Err(QuadratureError::InvalidSpec("Gauss order must be at least 2"))
            }
            Rule::MonteCarlo { samples } if *samples < 1000 => {
                Err(QuadratureError::InvalidSpec("Monte Carlo needs at least 1000 samples"))
            }
            _ => Ok(()),
        }
    }
}

/// Integration region: a box, optionally cut by half-space constraints
/// `⟨ξ, a⟩ ≥ b` (integrand treated as zero where any constraint fails).
#[derive(Debug, Clone, PartialEq)]
pub struct Region {
    pub bounds: AxisBox,
    pub constraints: Vec<(Vec<f64>, f64)>,
}

impl Region {
    pub fn boxed(bounds: AxisBox) -> Self {
        Region {
            bounds,
            constraints: Vec::new(),
        }
    }

    pub fn contains(&self, p: &[f64]) -> bool {
        self.constraints
            .iter()
            .all(|(a, b)| a.iter().zip(p).map(|(x, y)| x * y).sum::<f64>() >= *b)
    }
}

/// Integrates a scalar density over `region`.
pub fn integrate<F>(f: F, region: &Region, spec: &QuadratureSpec) -> Result<IntegralValue, QuadratureError>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    let out = integrate_many(|p, o: &mut [f64]| o[0] = f(p), 1, region, spec)?;
    Ok(out[0])
}

/// Integrates `k` densities sharing one set of evaluation points.
///
/// `f(ξ, out)` writes the `k` density values at ξ into `out`.
pub fn integrate_many<F>(
    f: F,
    k: usize,
    region: &Region,
    spec: &QuadratureSpec,
) -> Result<Vec<IntegralValue>, QuadratureError>
where
    F: Fn(&[f64], &mut [f64]) + Sync,
{
    let dim = region.bounds.dim();
    spec.validate(dim)?;
    if !region.bounds.is_bounded() || region.bounds.volume() <= 0.0 {
        return Err(QuadratureError::DegenerateRegion);
    }
    let masked = |p: &[f64], out: &mut [f64]| {
        if region.contains(p) {
            f(p, out);
        } else {
            out.iter_mut().for_each(|v| *v = 0.0);
        }
    };
    match &spec.rule {
        Rule::MonteCarlo { samples } => monte_carlo(&masked, k, &region.bounds, *samples, spec.seed),
        Rule::Gauss { order } => {
            let axes = vec![AxisRule::Gauss { order: *order }; dim];
            tensor_with_estimate(&masked, k, &region.bounds, &axes)
        }
        Rule::Tensor(axes) => tensor_with_estimate(&masked, k, &region.bounds, axes),
    }
}

fn tensor_with_estimate<F>(
    f: &F,
    k: usize,
    bounds: &AxisBox,
    axes: &[AxisRule],
) -> Result<Vec<IntegralValue>, QuadratureError>
where
    F: Fn(&[f64], &mut [f64]) + Sync,
{
    let full = tensor(f, k, bounds, axes)?;
    let half: Vec<AxisRule> = axes.iter().map(|a| a.with_order(a.order().div_ceil(2).max(1))).collect();
    let coarse = tensor(f, k, bounds, &half)?;
    Ok(full
        .iter()
        .zip(&coarse)
        .map(|(v, c)| IntegralValue {
            value: *v,
            error_estimate: (v - c).abs(),
        })
        .collect())
}

/// Plain tensor-product quadrature without an error estimate.
pub fn tensor<F>(f: &F, k: usize, bounds: &AxisBox, axes: &[AxisRule]) -> Result<Vec<f64>, QuadratureError>
where
    F: Fn(&[f64], &mut [f64]) + Sync,
{
    let dim = bounds.dim();
    let mut rules = Vec::with_capacity(dim);
    for (j, a) in axes.iter().enumerate() {
        rules.push(a.nodes(bounds.lo[j], bounds.hi[j])?);
    }
    let first = rules[0].0.len();
    let partials = map_indexed(first, |i0| -> Result<Vec<f64>, QuadratureError> {
        let mut acc = vec![0.0; k];
        let mut out = vec![0.0; k];
        let mut idx = vec![0usize; dim];
        let mut p = vec![0.0; dim];
        idx[0] = i0;
        p[0] = rules[0].0[i0];
        loop {
            let mut w = rules[0].1[i0];
            for j in 1..dim {
                p[j] = rules[j].0[idx[j]];
                w *= rules[j].1[idx[j]];
            }
            f(&p, &mut out);
            for (a, v) in acc.iter_mut().zip(&out) {
                if !v.is_finite() {
                    return Err(QuadratureError::NonFinite { location: p.clone() });
                }
                *a += w * v;
            }
            let mut j = dim - 1;
            loop {
                if j == 0 {
                    return Ok(acc);
                }
                idx[j] += 1;
                if idx[j] < rules[j].0.len() {
                    break;
                }
                idx[j] = 0;
                j -= 1;
            }
        }
    });
    let mut total = vec![0.0; k];
    for part in partials {
        for (t, v) in total.iter_mut().zip(part?) {
            *t += v;
        }
    }
    Ok(total)
}

#[derive(Clone)]
struct Moments {
    count: f64,
    mean: Vec<f64>,
    m2: Vec<f64>,
}

impl Moments {
    fn merge(&mut self, other: &Moments) {
        let n = self.count + other.count;
        if other.count == 0.0 {
            return;
        }
        for j in 0..self.mean.len() {
            let delta = other.mean[j] - self.mean[j];
            self.mean[j] += delta * other.count / n;
            self.m2[j] += other.m2[j] + delta * delta * self.count * other.count / n;
        }
        self.count = n;
    }
}

fn monte_carlo<F>(
    f: &F,
    k: usize,
    bounds: &AxisBox,
    samples: usize,
    seed: u64,
) -> Result<Vec<IntegralValue>, QuadratureError>
where
    F: Fn(&[f64], &mut [f64]) + Sync,
{
    let dim = bounds.dim();
    let chunks = samples.div_ceil(MC_CHUNK);
    let parts = map_indexed(chunks, |c| -> Result<Moments, QuadratureError> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(c as u64);
        let count = MC_CHUNK.min(samples - c * MC_CHUNK);
        let mut m = Moments {
            count: 0.0,
            mean: vec![0.0; k],
            m2: vec![0.0; k],
        };
        let mut p = vec![0.0; dim];
        let mut out = vec![0.0; k];
        for _ in 0..count {
            for (j, x) in p.iter_mut().enumerate() {
                *x = bounds.lo[j] + (bounds.hi[j] - bounds.lo[j]) * rng.gen::<f64>();
            }
            f(&p, &mut out);
            m.count += 1.0;
            for j in 0..k {
                let v = out[j];
                if !v.is_finite() {
                    return Err(QuadratureError::NonFinite { location: p.clone() });
                }
                let d = v - m.mean[j];
                m.mean[j] += d / m.count;
                m.m2[j] += d * (v - m.mean[j]);
            }
        }
        Ok(m)
    });
    let mut total = Moments {
        count: 0.0,
        mean: vec![0.0; k],
        m2: vec![0.0; k],
    };
    for part in parts {
        total.merge(&part?);
    }
    let vol = bounds.volume();
    let n = total.count;
    Ok((0..k)
        .map(|j| {
            let var = if n > 1.0 { total.m2[j] / (n - 1.0) } else { 0.0 };
            IntegralValue {
                value: vol * total.mean[j],
                error_estimate: vol * (var / n).sqrt(),
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn unit_box(d: usize) -> Region {
        Region::boxed(AxisBox::new(vec![0.0; d], vec![1.0; d]))
    }

    #[test]
    fn legendre_nodes_small_orders() {
        let (x, w) = gauss_legendre(2);
        assert_relative_eq!(x[1], 1.0 / 3f64.sqrt(), epsilon = 1e-15);
        assert_relative_eq!(w[0], 1.0, epsilon = 1e-15);
        let (x, w) = gauss_legendre(3);
        assert_relative_eq!(x[1], 0.0, epsilon = 1e-15);
        assert_relative_eq!(w[1], 8.0 / 9.0, epsilon = 1e-14);
        for n in [1, 5, 24, 40] {
            let (_, w) = gauss_legendre(n);
            assert_relative_eq!(w.iter().sum::<f64>(), 2.0, epsilon = 1e-13);
        }
    }

    #[test]
    fn constant_and_quadratic() {
        let one = integrate(|_| 1.0, &unit_box(3), &QuadratureSpec::gauss(4)).unwrap();
        assert_relative_eq!(one.value, 1.0, epsilon = 1e-12);
        let q = integrate(|p| p[0] * p[0], &unit_box(1), &QuadratureSpec::gauss(2)).unwrap();
        assert_relative_eq!(q.value, 1.0 / 3.0, epsilon = 1e-12);
    }

    #[test]
    fn exactness_degree() {
        for order in [2usize, 5, 12] {
            let deg = (2 * order - 1) as i32;
            let v = integrate(|p| p[0].powi(deg), &unit_box(1), &QuadratureSpec::gauss(order)).unwrap();
            assert_relative_eq!(v.value, 1.0 / (deg as f64 + 1.0), max_relative = 1e-12);
        }
    }

    #[test]
    fn log_composite_power() {
        let r = AxisRule::LogComposite {
            order: 10,
            panels: 20,
            breaks: vec![1e-3],
        };
        let (t, w) = r.nodes(1e-8, 1.0).unwrap();
        let v: f64 = t.iter().zip(&w).map(|(t, w)| w * t.powf(-0.5)).sum();
        assert_relative_eq!(v, 2.0 * (1.0 - 1e-4), max_relative = 1e-12);
    }

    #[test]
    fn monte_carlo_is_seeded_and_unbiased() {
        let spec = QuadratureSpec::monte_carlo(20_000, 9);
        let a = integrate(|p| p[0] + p[1], &unit_box(2), &spec).unwrap();
        let b = integrate(|p| p[0] + p[1], &unit_box(2), &spec).unwrap();
        assert_eq!(a, b);
        assert!((a.value - 1.0).abs() < 4.0 * a.error_estimate);
    }

    #[test]
    fn constraints_cut_region() {
        let mut region = unit_box(2);
        region.constraints.push((vec![-1.0, -1.0], -1.0));
        let v = integrate(|_| 1.0, &region, &QuadratureSpec::monte_carlo(40_000, 1)).unwrap();
        assert!((v.value - 0.5).abs() < 4.0 * v.error_estimate);
    }

    #[test]
    fn non_finite_aborts_with_location() {
        let err = integrate(|p| 1.0 / (p[0] - p[0]), &unit_box(1), &QuadratureSpec::gauss(3)).unwrap_err();
        assert!(matches!(err, QuadratureError::NonFinite { .. }));
    }

    #[test]
    fn invalid_specs_rejected() {
        assert!(integrate(|_| 1.0, &unit_box(1), &QuadratureSpec::gauss(1)).is_err());
        assert!(integrate(|_| 1.0, &unit_box(1), &QuadratureSpec::monte_carlo(10, 0)).is_err());
        let unbounded = Region::boxed(AxisBox::unbounded(2));
        assert_eq!(
            integrate(|_| 1.0, &unbounded, &QuadratureSpec::gauss(3)).unwrap_err(),
            QuadratureError::DegenerateRegion
        );
    }
}
