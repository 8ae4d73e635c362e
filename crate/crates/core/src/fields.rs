//! Concrete scalar fields: mollifier bumps, polynomials and separable
//! products `u(x, y, t) = w(t) φ(x, y)` built from 1D and horizontal profiles.

use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;
use rand::Rng;

use crate::heis::{AxisBox, Point, ScalarField};

/// Quintic smoothstep `S(r) = r³(10 − 15r + 6r²)` clamped to `[0, 1]`.
pub fn smoothstep(r: f64) -> f64 {
    if r <= 0.0 {
        0.0
    } else if r >= 1.0 {
        1.0
    } else {
        r * r * r * (10.0 + r * (-15.0 + 6.0 * r))
    }
}

pub fn smoothstep_derivative(r: f64) -> f64 {
    if r <= 0.0 || r >= 1.0 {
        0.0
    } else {
        30.0 * r * r * (1.0 - r) * (1.0 - r)
    }
}

/// `exp(−σ/(1 − s²))` and its derivative with respect to `s²`.
fn mollifier(s2: f64, sigma: f64) -> (f64, f64) {
    if s2 >= 1.0 {
        return (0.0, 0.0);
    }
    let q = 1.0 - s2;
    let v = (-sigma / q).exp();
    (v, -sigma * v / (q * q))
}

/// Applies Λ = [[0, I], [−I, 0]] to a horizontal vector `(v_x, v_y)`.
pub fn lambda_apply(v: &[f64]) -> Vec<f64> {
    let n = v.len() / 2;
    let mut out = Vec::with_capacity(2 * n);
    out.extend_from_slice(&v[n..]);
    out.extend(v[..n].iter().map(|c| -c));
    out
}

/// Mollifier bump `exp(−σ/(1 − s²))` with `s² = Σ ((ξ_j − c_j)/r_j)²`.
#[derive(Debug, Clone, PartialEq)]
pub struct Bump {
    center: Vec<f64>,
    radii: Vec<f64>,
    sigma: f64,
}

/// Builds a bump on ℍⁿ; `center` and `radii` have length 2n+1.
///
/// # Panics
/// If lengths disagree, are not of the form 2n+1, or a radius or the
/// smoothness is not positive.
pub fn make_bump(center: &[f64], radii: &[f64], smoothness: f64) -> Bump {
    assert_eq!(center.len(), radii.len());
    assert!(center.len() >= 3 && center.len() % 2 == 1);
    assert!(radii.iter().all(|r| *r > 0.0), "radii must be positive");
    assert!(smoothness > 0.0, "smoothness must be positive");
    Bump {
        center: center.to_vec(),
        radii: radii.to_vec(),
        sigma: smoothness,
    }
}

impl Bump {
    pub fn center(&self) -> &[f64] {
        &self.center
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    fn s2(&self, p: &[f64]) -> f64 {
        p.iter()
            .zip(self.center.iter().zip(&self.radii))
            .map(|(x, (c, r))| {
                let z = (x - c) / r;
                z * z
            })
            .sum()
    }
}

impl ScalarField for Bump {
    fn dim(&self) -> usize {
        (self.center.len() - 1) / 2
    }

    fn value(&self, p: &Point) -> f64 {
        mollifier(self.s2(p.coords()), self.sigma).0
    }

    fn gradient(&self, p: &Point) -> Option<Vec<f64>> {
        let (_, d) = mollifier(self.s2(p.coords()), self.sigma);
        Some(
            p.coords()
                .iter()
                .zip(self.center.iter().zip(&self.radii))
                .map(|(x, (c, r))| d * 2.0 * (x - c) / (r * r))
                .collect(),
        )
    }

    fn support(&self) -> AxisBox {
        AxisBox::centered(&self.center, &self.radii)
    }
}

/// A real polynomial in the flattened coordinates of ℍⁿ.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    vars: usize,
    terms: Vec<(f64, Vec<u32>)>,
}

impl Polynomial {
    pub fn zero(vars: usize) -> Self {
        Polynomial {
            vars,
            terms: Vec::new(),
        }
    }

    pub fn constant(vars: usize, c: f64) -> Self {
        Polynomial {
            vars,
            terms: vec![(c, vec![0; vars])],
        }
    }

    /// Single monomial `c · Π ξ_j^{e_j}`.
    pub fn monomial(c: f64, exponents: Vec<u32>) -> Self {
        Polynomial {
            vars: exponents.len(),
            terms: vec![(c, exponents)],
        }
    }

    /// Random polynomial of total degree ≤ `degree` with coefficients in `[−1, 1]`.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, vars: usize, degree: u32) -> Self {
        let mut p = Polynomial::zero(vars);
        let mut e = vec![0u32; vars];
        loop {
            if e.iter().sum::<u32>() <= degree {
                p.terms.push((rng.gen_range(-1.0..1.0), e.clone()));
            }
            let mut k = 0;
            loop {
                if k == vars {
                    return p;
                }
                e[k] += 1;
                if e[k] <= degree {
                    break;
                }
                e[k] = 0;
                k += 1;
            }
        }
    }

    pub fn vars(&self) -> usize {
        self.vars
    }

    pub fn eval(&self, p: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(c, e)| {
                c * e
                    .iter()
                    .zip(p)
                    .map(|(k, x)| x.powi(*k as i32))
                    .product::<f64>()
            })
            .sum()
    }

    pub fn derivative(&self, var: usize) -> Polynomial {
        let terms = self
            .terms
            .iter()
            .filter(|(_, e)| e[var] > 0)
            .map(|(c, e)| {
                let mut e = e.clone();
                let k = e[var];
                e[var] -= 1;
                (c * k as f64, e)
            })
            .collect();
        Polynomial {
            vars: self.vars,
            terms,
        }
    }

    /// Product with the coordinate `ξ_var`.
    pub fn mul_var(&self, var: usize) -> Polynomial {
        let terms = self
            .terms
            .iter()
            .map(|(c, e)| {
                let mut e = e.clone();
                e[var] += 1;
                (*c, e)
            })
            .collect();
        Polynomial {
            vars: self.vars,
            terms,
        }
    }

    pub fn scale(&self, s: f64) -> Polynomial {
        Polynomial {
            vars: self.vars,
            terms: self.terms.iter().map(|(c, e)| (c * s, e.clone())).collect(),
        }
    }

    pub fn add(&self, other: &Polynomial) -> Polynomial {
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        Polynomial {
            vars: self.vars,
            terms,
        }
    }

    /// `X_i` applied symbolically: `∂_{x_i} + 2 y_i ∂_t`.
    pub fn apply_x(&self, i: usize) -> Polynomial {
        let n = (self.vars - 1) / 2;
        self.derivative(i)
            .add(&self.derivative(2 * n).mul_var(n + i).scale(2.0))
    }

    /// `Y_i` applied symbolically: `∂_{y_i} − 2 x_i ∂_t`.
    pub fn apply_y(&self, i: usize) -> Polynomial {
        let n = (self.vars - 1) / 2;
        self.derivative(n + i)
            .add(&self.derivative(2 * n).mul_var(i).scale(-2.0))
    }
}

impl ScalarField for Polynomial {
    fn dim(&self) -> usize {
        (self.vars - 1) / 2
    }

    fn value(&self, p: &Point) -> f64 {
        self.eval(p.coords())
    }

    fn gradient(&self, p: &Point) -> Option<Vec<f64>> {
        Some(
            (0..self.vars)
                .map(|k| self.derivative(k).eval(p.coords()))
                .collect(),
        )
    }

    fn support(&self) -> AxisBox {
        AxisBox::unbounded(self.vars)
    }
}

/// Hides a field's analytic partials so that every derivative is taken by
/// finite differences.
#[derive(Debug, Clone)]
pub struct NumericOnly<F>(pub F);

impl<F: ScalarField> ScalarField for NumericOnly<F> {
    fn dim(&self) -> usize {
        self.0.dim()
    }
    fn value(&self, p: &Point) -> f64 {
        self.0.value(p)
    }
    fn support(&self) -> AxisBox {
        self.0.support()
    }
    fn evaluation_region(&self) -> Option<AxisBox> {
        self.0.evaluation_region()
    }
}

/// `c · u`.
#[derive(Debug, Clone)]
pub struct Scaled<F> {
    pub inner: F,
    pub factor: f64,
}

impl<F: ScalarField> ScalarField for Scaled<F> {
    fn dim(&self) -> usize {
        self.inner.dim()
    }
    fn value(&self, p: &Point) -> f64 {
        self.factor * self.inner.value(p)
    }
    fn gradient(&self, p: &Point) -> Option<Vec<f64>> {
        let mut g = self.inner.gradient(p)?;
        g.iter_mut().for_each(|v| *v *= self.factor);
        Some(g)
    }
    fn support(&self) -> AxisBox {
        self.inner.support()
    }
    fn evaluation_region(&self) -> Option<AxisBox> {
        self.inner.evaluation_region()
    }
}

/// A compactly supported function of one real variable.
pub trait Profile1D: Send + Sync {
    fn value(&self, s: f64) -> f64;
    fn derivative(&self, s: f64) -> f64;
    /// Closed interval outside which the profile vanishes.
    fn support(&self) -> (f64, f64);
    /// Points where the profile changes regime; useful as quadrature panel
    /// breaks.
    fn breakpoints(&self) -> Vec<f64> {
        Vec::new()
    }
}

/// One-dimensional mollifier `exp(−σ/(1 − ((s − c)/r)²))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bump1D {
    pub center: f64,
    pub radius: f64,
    pub sigma: f64,
}

impl Bump1D {
    pub fn new(center: f64, radius: f64) -> Self {
        assert!(radius > 0.0);
        Bump1D {
            center,
            radius,
            sigma: 1.0,
        }
    }
}

impl Profile1D for Bump1D {
    fn value(&self, s: f64) -> f64 {
        let z = (s - self.center) / self.radius;
        mollifier(z * z, self.sigma).0
    }

    fn derivative(&self, s: f64) -> f64 {
        let z = (s - self.center) / self.radius;
        mollifier(z * z, self.sigma).1 * 2.0 * z / self.radius
    }

    fn support(&self) -> (f64, f64) {
        (self.center - self.radius, self.center + self.radius)
    }
}

/// `s ↦ w(λ s)`.
#[derive(Debug, Clone, Copy)]
pub struct Dilated1D<W> {
    pub inner: W,
    pub lambda: f64,
}

impl<W: Profile1D> Profile1D for Dilated1D<W> {
    fn value(&self, s: f64) -> f64 {
        self.inner.value(self.lambda * s)
    }
    fn derivative(&self, s: f64) -> f64 {
        self.lambda * self.inner.derivative(self.lambda * s)
    }
    fn support(&self) -> (f64, f64) {
        let (a, b) = self.inner.support();
        (a / self.lambda, b / self.lambda)
    }
    fn breakpoints(&self) -> Vec<f64> {
        self.inner
            .breakpoints()
            .into_iter()
            .map(|b| b / self.lambda)
            .collect()
    }
}

/// Shape of the cutoff that localises a power profile to `[δ, T]`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum CutoffShape {
    /// Smoothstep rising on `[δ, 2δ]` and falling on `[T/2, T]`.
    Linear,
    /// Smoothstep in `ln s`, each band covering `band_fraction` of `ln(T/δ)`.
    Log { band_fraction: f64 },
}

/// `s^a · χ(s)` where χ is a smooth cutoff supported in `[δ, T]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerCutoff {
    pub exponent: f64,
    pub delta: f64,
    pub t_max: f64,
    pub shape: CutoffShape,
}

impl PowerCutoff {
    /// Rising and falling band edges `[δ, r, f, T]`.
    pub fn band_edges(&self) -> [f64; 4] {
        match self.shape {
            CutoffShape::Linear => [self.delta, 2.0 * self.delta, 0.5 * self.t_max, self.t_max],
            CutoffShape::Log { band_fraction } => {
                let band = band_fraction * (self.t_max / self.delta).ln();
                [
                    self.delta,
                    self.delta * band.exp(),
                    self.t_max * (-band).exp(),
                    self.t_max,
                ]
            }
        }
    }

    /// The cutoff χ and its derivative.
    pub fn cutoff(&self, s: f64) -> (f64, f64) {
        if s <= self.delta || s >= self.t_max {
            return (0.0, 0.0);
        }
        match self.shape {
            CutoffShape::Linear => {
                let (a, b) = (self.delta, 0.5 * self.t_max);
                let r = (s - a) / a;
                let f = (s - b) / b;
                let (up, dup) = (smoothstep(r), smoothstep_derivative(r) / a);
                let (down, ddown) = (1.0 - smoothstep(f), -smoothstep_derivative(f) / b);
                (up * down, dup * down + up * ddown)
            }
            CutoffShape::Log { band_fraction } => {
                let l0 = self.delta.ln();
                let l1 = self.t_max.ln();
                let band = band_fraction * (l1 - l0);
                let ls = s.ln();
                let r = (ls - l0) / band;
                let f = (ls - (l1 - band)) / band;
                let up = smoothstep(r);
                let down = 1.0 - smoothstep(f);
                let dup = smoothstep_derivative(r) / (band * s);
                let ddown = -smoothstep_derivative(f) / (band * s);
                (up * down, dup * down + up * ddown)
            }
        }
    }
}

impl Profile1D for PowerCutoff {
    fn value(&self, s: f64) -> f64 {
        let (c, _) = self.cutoff(s);
        if c == 0.0 {
            0.0
        } else {
            s.powf(self.exponent) * c
        }
    }

    fn derivative(&self, s: f64) -> f64 {
        let (c, dc) = self.cutoff(s);
        if c == 0.0 && dc == 0.0 {
            return 0.0;
        }
        let pw = s.powf(self.exponent);
        pw * (self.exponent * c / s + dc)
    }

    fn support(&self) -> (f64, f64) {
        (self.delta, self.t_max)
    }

    fn breakpoints(&self) -> Vec<f64> {
        self.band_edges().to_vec()
    }
}

/// A compactly supported function of the horizontal coordinates ξ′ ∈ ℝ²ⁿ.
pub trait ProfileXY: Send + Sync {
    /// The `n` of ℍⁿ.
    fn dim(&self) -> usize;
    fn value(&self, xy: &[f64]) -> f64;
    /// Writes `∇′φ(xy)` into `out` (length 2n).
    fn gradient(&self, xy: &[f64], out: &mut [f64]);
    fn support(&self) -> AxisBox;
}

/// Radial bump `φ_R(ξ′) = φ(ξ′/R)` with `φ(z) = exp(−1/(1 − |z|²))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialBump {
    pub n: usize,
    pub radius: f64,
}

/// The spread profile `φ_R = φ(·/R)` on ℝ²ⁿ.
pub fn spread_profile(n: usize, r: f64) -> RadialBump {
    assert!(r > 0.0);
    RadialBump { n, radius: r }
}

impl ProfileXY for RadialBump {
    fn dim(&self) -> usize {
        self.n
    }

    fn value(&self, xy: &[f64]) -> f64 {
        let s2: f64 = xy.iter().map(|v| v * v).sum::<f64>() / (self.radius * self.radius);
        mollifier(s2, 1.0).0
    }

    fn gradient(&self, xy: &[f64], out: &mut [f64]) {
        let r2 = self.radius * self.radius;
        let s2: f64 = xy.iter().map(|v| v * v).sum::<f64>() / r2;
        let d = mollifier(s2, 1.0).1;
        for (o, v) in out.iter_mut().zip(xy) {
            *o = d * 2.0 * v / r2;
        }
    }

    fn support(&self) -> AxisBox {
        AxisBox::centered(&vec![0.0; 2 * self.n], &vec![self.radius; 2 * self.n])
    }
}

/// `φ(ξ′) = Π_j f_j(ξ′_j)` over the 2n horizontal coordinates.
pub struct ProductXY {
    factors: Vec<alloc::boxed::Box<dyn Profile1D>>,
}

impl ProductXY {
    /// `factors` are ordered `(x_1, …, x_n, y_1, …, y_n)`.
    pub fn new(factors: Vec<alloc::boxed::Box<dyn Profile1D>>) -> Self {
        assert!(!factors.is_empty() && factors.len() % 2 == 0);
        ProductXY { factors }
    }

    pub fn factor(&self, j: usize) -> &dyn Profile1D {
        &*self.factors[j]
    }
}

impl ProfileXY for ProductXY {
    fn dim(&self) -> usize {
        self.factors.len() / 2
    }

    fn value(&self, xy: &[f64]) -> f64 {
        let mut v = 1.0;
        for (f, s) in self.factors.iter().zip(xy) {
            v *= f.value(*s);
            if v == 0.0 {
                break;
            }
        }
        v
    }

    fn gradient(&self, xy: &[f64], out: &mut [f64]) {
        let vals: Vec<f64> = self.factors.iter().zip(xy).map(|(f, s)| f.value(*s)).collect();
        for (j, o) in out.iter_mut().enumerate() {
            let others: f64 = vals
                .iter()
                .enumerate()
                .filter(|(k, _)| *k != j)
                .map(|(_, v)| v)
                .product();
            *o = if others == 0.0 {
                0.0
            } else {
                others * self.factors[j].derivative(xy[j])
            };
        }
    }

    fn support(&self) -> AxisBox {
        let (lo, hi) = self.factors.iter().map(|f| f.support()).unzip();
        AxisBox::new(lo, hi)
    }
}

/// The product field `u(ξ′, t) = w(t) φ(ξ′)`.
pub struct Separable<W, P> {
    pub w: W,
    pub phi: P,
}

/// Builds `u(x, y, t) = w(t) φ(x, y)`.
pub fn make_separable<W: Profile1D, P: ProfileXY>(w: W, phi: P) -> Separable<W, P> {
    Separable { w, phi }
}

impl<W: Profile1D, P: ProfileXY> ScalarField for Separable<W, P> {
    fn dim(&self) -> usize {
        self.phi.dim()
    }

    fn value(&self, p: &Point) -> f64 {
        let w = self.w.value(p.t());
        if w == 0.0 {
            0.0
        } else {
            w * self.phi.value(p.horizontal())
        }
    }

    fn gradient(&self, p: &Point) -> Option<Vec<f64>> {
        let n = self.phi.dim();
        let t = p.t();
        let mut g = vec![0.0; 2 * n + 1];
        let w = self.w.value(t);
        let dw = self.w.derivative(t);
        if w == 0.0 && dw == 0.0 {
            return Some(g);
        }
        self.phi.gradient(p.horizontal(), &mut g[..2 * n]);
        for v in &mut g[..2 * n] {
            *v *= w;
        }
        g[2 * n] = dw * self.phi.value(p.horizontal());
        Some(g)
    }

    fn support(&self) -> AxisBox {
        let mut b = self.phi.support();
        let (lo, hi) = self.w.support();
        b.lo.push(lo);
        b.hi.push(hi);
        b
    }
}
