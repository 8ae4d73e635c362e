//! Arithmetic and differential structure of the Heisenberg group ℍⁿ.
//!
//! Points are stored flattened as `(x_1, …, x_n, y_1, …, y_n, t)` in
//! ℝ^{2n+1}. The group law is
//!
//! ```text
//! ξ̂ ∘ ξ̃ = (x̂ + x̃, ŷ + ỹ, t̂ + t̃ + 2 Σ (x̃_i ŷ_i − x̂_i ỹ_i))
//! ```
//!
//! with inverse `ξ⁻¹ = −ξ`, and the left-invariant frame is
//! `X_i = ∂/∂x_i + 2y_i ∂/∂t`, `Y_i = ∂/∂y_i − 2x_i ∂/∂t`.

use alloc::boxed::Box;
use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;
use thiserror::Error;

/// Errors raised by group and differential operations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum HeisError {
    #[error("dimension mismatch: n={left} vs n={right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("coordinate vector of length {0} is not of the form 2n+1 with n >= 1")]
    InvalidLength(usize),
    #[error("non-finite coordinate at index {0}")]
    NonFinite(usize),
    #[error("dilation factor must be positive, got {0}")]
    NonPositiveDilation(f64),
    #[error("finite-difference stencil leaves the admissible evaluation region")]
    StencilOutOfRange,
    #[error("frame index {index} out of range for n={n}")]
    IndexOutOfRange { index: usize, n: usize },
}

/// An element ξ = (x, y, t) of ℍⁿ.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(try_from = "Vec<f64>", into = "Vec<f64>"))]
pub struct Point {
    coords: Vec<f64>,
}

impl TryFrom<Vec<f64>> for Point {
    type Error = HeisError;

    fn try_from(coords: Vec<f64>) -> Result<Self, HeisError> {
        Point::from_coords(coords)
    }
}

impl From<Point> for Vec<f64> {
    fn from(p: Point) -> Vec<f64> {
        p.coords
    }
}

impl Point {
    /// Builds a point from its `x`, `y` blocks and `t`.
    pub fn new(x: &[f64], y: &[f64], t: f64) -> Result<Self, HeisError> {
        if x.len() != y.len() {
            return Err(HeisError::DimensionMismatch {
                left: x.len(),
                right: y.len(),
            });
        }
        let mut coords = Vec::with_capacity(2 * x.len() + 1);
        coords.extend_from_slice(x);
        coords.extend_from_slice(y);
        coords.push(t);
        Self::from_coords(coords)
    }

    /// Builds a point from flattened coordinates `(x, y, t)`.
    pub fn from_coords(coords: Vec<f64>) -> Result<Self, HeisError> {
        let len = coords.len();
        if len < 3 || len % 2 == 0 {
            return Err(HeisError::InvalidLength(len));
        }
        if let Some(i) = coords.iter().position(|c| !c.is_finite()) {
            return Err(HeisError::NonFinite(i));
        }
        Ok(Point { coords })
    }

    /// Unchecked constructor for hot loops; `coords.len()` must be odd and ≥ 3.
    pub(crate) fn from_raw(coords: Vec<f64>) -> Self {
        debug_assert!(coords.len() >= 3 && coords.len() % 2 == 1);
        Point { coords }
    }

    /// The group identity `(0, 0, 0)` of ℍⁿ.
    pub fn identity(n: usize) -> Self {
        Point {
            coords: vec![0.0; 2 * n + 1],
        }
    }

    /// The `n` of ℍⁿ.
    pub fn dim(&self) -> usize {
        (self.coords.len() - 1) / 2
    }

    pub fn x(&self) -> &[f64] {
        &self.coords[..self.dim()]
    }

    pub fn y(&self) -> &[f64] {
        let n = self.dim();
        &self.coords[n..2 * n]
    }

    pub fn t(&self) -> f64 {
        self.coords[2 * self.dim()]
    }

    /// Horizontal part ξ′ = (x, y).
    pub fn horizontal(&self) -> &[f64] {
        &self.coords[..2 * self.dim()]
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn into_coords(self) -> Vec<f64> {
        self.coords
    }

    /// Group inverse, which is `−ξ`.
    pub fn inverse(&self) -> Point {
        Point {
            coords: self.coords.iter().map(|c| -c).collect(),
        }
    }

    /// Euclidean inner product with a vector of ℝ^{2n+1}.
    pub fn dot(&self, v: &[f64]) -> f64 {
        self.coords.iter().zip(v).map(|(a, b)| a * b).sum()
    }

    fn check_same_dim(&self, other: &Point) -> Result<(), HeisError> {
        if self.dim() != other.dim() {
            return Err(HeisError::DimensionMismatch {
                left: self.dim(),
                right: other.dim(),
            });
        }
        Ok(())
    }
}

/// The group law `p ∘ q`.
pub fn group_compose(p: &Point, q: &Point) -> Result<Point, HeisError> {
    p.check_same_dim(q)?;
    Ok(compose_unchecked(p.coords(), q.coords()))
}

pub(crate) fn compose_unchecked(p: &[f64], q: &[f64]) -> Point {
    let n = (p.len() - 1) / 2;
    let mut coords: Vec<f64> = p.iter().zip(q).map(|(a, b)| a + b).collect();
    let mut twist = 0.0;
    for i in 0..n {
        twist += q[i] * p[n + i] - p[i] * q[n + i];
    }
    coords[2 * n] += 2.0 * twist;
    Point::from_raw(coords)
}

/// Dilation `δ_λ(x, y, t) = (λx, λy, λ²t)`.
pub fn dilate(lambda: f64, p: &Point) -> Result<Point, HeisError> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(HeisError::NonPositiveDilation(lambda));
    }
    let n = p.dim();
    let mut coords: Vec<f64> = p.coords.iter().map(|c| lambda * c).collect();
    coords[2 * n] = lambda * lambda * p.t();
    Ok(Point::from_raw(coords))
}

/// Ambient representations of `X_1, …, X_n, Y_1, …, Y_n` at `p`.
pub fn frame_at(p: &Point) -> Vec<Vec<f64>> {
    let n = p.dim();
    (0..2 * n).map(|k| frame_vector(p, k)).collect()
}

/// Frame vector `k` at `p`: `X_{k+1}` for `k < n`, `Y_{k-n+1}` otherwise.
pub fn frame_vector(p: &Point, k: usize) -> Vec<f64> {
    let n = p.dim();
    let mut v = vec![0.0; 2 * n + 1];
    v[k] = 1.0;
    v[2 * n] = if k < n {
        2.0 * p.y()[k]
    } else {
        -2.0 * p.x()[k - n]
    };
    v
}

/// Pairings `(⟨X_i(p), ν⟩, ⟨Y_i(p), ν⟩)` of the frame with a covector ν.
///
/// Only the coordinates of `p` are read, so this also serves slices.
pub fn frame_pairings(coords: &[f64], normal: &[f64]) -> HorizontalVector {
    let n = (coords.len() - 1) / 2;
    let nt = normal[2 * n];
    let a = (0..n).map(|i| normal[i] + 2.0 * coords[n + i] * nt).collect();
    let b = (0..n).map(|i| normal[n + i] - 2.0 * coords[i] * nt).collect();
    HorizontalVector { a, b }
}

/// A vector in the horizontal space: `Σ a_i X_i + b_i Y_i`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct HorizontalVector {
    pub a: Vec<f64>,
    pub b: Vec<f64>,
}

impl HorizontalVector {
    pub fn zeros(n: usize) -> Self {
        HorizontalVector {
            a: vec![0.0; n],
            b: vec![0.0; n],
        }
    }

    pub fn dim(&self) -> usize {
        self.a.len()
    }

    /// Flattened `(a, b)` of length 2n.
    pub fn to_flat(&self) -> Vec<f64> {
        let mut v = self.a.clone();
        v.extend_from_slice(&self.b);
        v
    }

    pub fn norm_squared(&self) -> f64 {
        self.a.iter().chain(&self.b).map(|c| c * c).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_squared().sqrt()
    }

    pub fn components(&self) -> impl Iterator<Item = f64> + '_ {
        self.a.iter().chain(&self.b).copied()
    }

    /// Ambient vector `Σ a_i X_i(p) + b_i Y_i(p)`.
    pub fn at(&self, p: &Point) -> Vec<f64> {
        let n = p.dim();
        let mut v = self.to_flat();
        let mut vt = 0.0;
        for i in 0..n {
            vt += 2.0 * (self.a[i] * p.y()[i] - self.b[i] * p.x()[i]);
        }
        v.push(vt);
        v
    }
}

/// Axis-aligned box in ℝ^{2n+1}; bounds may be infinite.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct AxisBox {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl AxisBox {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Self {
        debug_assert_eq!(lo.len(), hi.len());
        AxisBox { lo, hi }
    }

    /// The whole space ℝ^{dim}.
    pub fn unbounded(dim: usize) -> Self {
        AxisBox {
            lo: vec![f64::NEG_INFINITY; dim],
            hi: vec![f64::INFINITY; dim],
        }
    }

    pub fn centered(center: &[f64], half_widths: &[f64]) -> Self {
        AxisBox {
            lo: center.iter().zip(half_widths).map(|(c, r)| c - r).collect(),
            hi: center.iter().zip(half_widths).map(|(c, r)| c + r).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn contains(&self, p: &[f64]) -> bool {
        p.iter()
            .zip(self.lo.iter().zip(&self.hi))
            .all(|(c, (l, h))| *l <= *c && *c <= *h)
    }

    pub fn is_bounded(&self) -> bool {
        self.lo.iter().chain(&self.hi).all(|c| c.is_finite())
    }

    pub fn volume(&self) -> f64 {
        self.lo.iter().zip(&self.hi).map(|(l, h)| h - l).product()
    }

    pub fn center(&self) -> Vec<f64> {
        self.lo.iter().zip(&self.hi).map(|(l, h)| 0.5 * (l + h)).collect()
    }

    /// `min_{ξ ∈ box} ⟨ξ, v⟩`, attained at a corner.
    pub fn min_linear(&self, v: &[f64]) -> f64 {
        v.iter()
            .zip(self.lo.iter().zip(&self.hi))
            .map(|(c, (l, h))| {
                if *c == 0.0 {
                    0.0
                } else {
                    (c * l).min(c * h)
                }
            })
            .sum()
    }
}

/// A scalar field on ℍⁿ with a declared compact (box) support.
///
/// Implementations must return exactly `0` outside [`ScalarField::support`].
/// When [`ScalarField::gradient`] returns the Euclidean gradient
/// `(∂u/∂x, ∂u/∂y, ∂u/∂t)`, it must agree with central differences.
pub trait ScalarField: Send + Sync {
    fn dim(&self) -> usize;

    fn value(&self, p: &Point) -> f64;

    /// Analytic Euclidean gradient, flattened like [`Point::coords`].
    fn gradient(&self, _p: &Point) -> Option<Vec<f64>> {
        None
    }

    fn support(&self) -> AxisBox;

    /// Region where the evaluator may be called; `None` means everywhere.
    fn evaluation_region(&self) -> Option<AxisBox> {
        None
    }
}

impl<F: ScalarField + ?Sized> ScalarField for &F {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn value(&self, p: &Point) -> f64 {
        (**self).value(p)
    }
    fn gradient(&self, p: &Point) -> Option<Vec<f64>> {
        (**self).gradient(p)
    }
    fn support(&self) -> AxisBox {
        (**self).support()
    }
    fn evaluation_region(&self) -> Option<AxisBox> {
        (**self).evaluation_region()
    }
}

impl<F: ScalarField + ?Sized> ScalarField for Box<F> {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn value(&self, p: &Point) -> f64 {
        (**self).value(p)
    }
    fn gradient(&self, p: &Point) -> Option<Vec<f64>> {
        (**self).gradient(p)
    }
    fn support(&self) -> AxisBox {
        (**self).support()
    }
    fn evaluation_region(&self) -> Option<AxisBox> {
        (**self).evaluation_region()
    }
}

/// One of the frame fields `X_i` or `Y_i` (zero-based index).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FrameField {
    X(usize),
    Y(usize),
}

impl FrameField {
    fn slot(self, n: usize) -> usize {
        match self {
            FrameField::X(i) => i,
            FrameField::Y(i) => n + i,
        }
    }

    fn index(self) -> usize {
        match self {
            FrameField::X(i) | FrameField::Y(i) => i,
        }
    }
}

fn fd_scale(p: &[f64]) -> f64 {
    p.iter().fold(1.0_f64, |m, c| m.max(c.abs()))
}

/// Step for first-order central differences, `cbrt(ε)·max(1, |ξ|_∞)`.
pub fn first_difference_step(p: &Point) -> f64 {
    f64::EPSILON.cbrt() * fd_scale(p.coords())
}

/// Step for nested (second-order) central differences, `ε^{1/4}·max(1, |ξ|_∞)`.
pub fn second_difference_step(p: &Point) -> f64 {
    f64::EPSILON.sqrt().sqrt() * fd_scale(p.coords())
}

fn shifted(p: &Point, dir: &[f64], h: f64) -> Point {
    Point::from_raw(p.coords.iter().zip(dir).map(|(c, d)| c + h * d).collect())
}

fn check_region<F: ScalarField + ?Sized>(u: &F, q: &Point) -> Result<(), HeisError> {
    match u.evaluation_region() {
        Some(region) if !region.contains(q.coords()) => Err(HeisError::StencilOutOfRange),
        _ => Ok(()),
    }
}

/// Central difference of `g` along the ambient direction `dir` at `p`.
fn directional_difference<G>(p: &Point, dir: &[f64], h: f64, mut g: G) -> Result<f64, HeisError>
where
    G: FnMut(&Point) -> Result<f64, HeisError>,
{
    let plus = g(&shifted(p, dir, h))?;
    let minus = g(&shifted(p, dir, -h))?;
    Ok((plus - minus) / (2.0 * h))
}

/// `(V u)(p)` for a frame field `V`, analytic when the field provides a gradient.
pub fn apply_frame<F: ScalarField + ?Sized>(
    u: &F,
    p: &Point,
    v: FrameField,
) -> Result<f64, HeisError> {
    let n = p.dim();
    if v.index() >= n {
        return Err(HeisError::IndexOutOfRange { index: v.index(), n });
    }
    if let Some(grad) = u.gradient(p) {
        return Ok(pair_gradient(&grad, p.coords(), v.slot(n)));
    }
    let dir = frame_vector(p, v.slot(n));
    let h = first_difference_step(p);
    directional_difference(p, &dir, h, |q| {
        check_region(u, q)?;
        Ok(u.value(q))
    })
}

fn pair_gradient(grad: &[f64], coords: &[f64], slot: usize) -> f64 {
    let n = (coords.len() - 1) / 2;
    let ut = grad[2 * n];
    if slot < n {
        grad[slot] + 2.0 * coords[n + slot] * ut
    } else {
        grad[slot] - 2.0 * coords[slot - n] * ut
    }
}

/// Horizontal gradient `∇_{ℍⁿ}u(p) = (X_1u, …, X_nu, Y_1u, …, Y_nu)`.
///
/// Uses analytic partials when available, otherwise central differences with
/// step [`first_difference_step`]; every stencil point must lie in the
/// field's evaluation region.
pub fn horizontal_gradient<F: ScalarField + ?Sized>(
    u: &F,
    p: &Point,
) -> Result<HorizontalVector, HeisError> {
    if u.dim() != p.dim() {
        return Err(HeisError::DimensionMismatch {
            left: u.dim(),
            right: p.dim(),
        });
    }
    if let Some(grad) = u.gradient(p) {
        return Ok(horizontal_from_gradient(&grad, p.coords()));
    }
    horizontal_gradient_numeric(u, p)
}

/// Finite-difference horizontal gradient, ignoring analytic partials.
pub fn horizontal_gradient_numeric<F: ScalarField + ?Sized>(
    u: &F,
    p: &Point,
) -> Result<HorizontalVector, HeisError> {
    let n = p.dim();
    let h = first_difference_step(p);
    let mut out = HorizontalVector::zeros(n);
    for k in 0..2 * n {
        let dir = frame_vector(p, k);
        let d = directional_difference(p, &dir, h, |q| {
            check_region(u, q)?;
            Ok(u.value(q))
        })?;
        if k < n {
            out.a[k] = d;
        } else {
            out.b[k - n] = d;
        }
    }
    Ok(out)
}

/// Converts a Euclidean gradient into the horizontal gradient at `coords`.
pub fn horizontal_from_gradient(grad: &[f64], coords: &[f64]) -> HorizontalVector {
    let n = (coords.len() - 1) / 2;
    let ut = grad[2 * n];
    HorizontalVector {
        a: (0..n).map(|i| grad[i] + 2.0 * coords[n + i] * ut).collect(),
        b: (0..n).map(|i| grad[n + i] - 2.0 * coords[i] * ut).collect(),
    }
}

/// `([V, W] u)(p) = V(W u)(p) − W(V u)(p)` by nested central differences.
///
/// With analytic partials the inner derivative is exact and the outer uses a
/// first-order step; otherwise both levels use [`second_difference_step`].
pub fn apply_bracket<F: ScalarField + ?Sized>(
    u: &F,
    p: &Point,
    v: FrameField,
    w: FrameField,
) -> Result<f64, HeisError> {
    let n = p.dim();
    for f in [v, w] {
        if f.index() >= n {
            return Err(HeisError::IndexOutOfRange { index: f.index(), n });
        }
    }
    let analytic = u.gradient(p).is_some();
    let outer_h = if analytic {
        first_difference_step(p)
    } else {
        second_difference_step(p)
    };
    let inner = |q: &Point, f: FrameField| -> Result<f64, HeisError> {
        if analytic {
            let grad = u.gradient(q).ok_or(HeisError::StencilOutOfRange)?;
            return Ok(pair_gradient(&grad, q.coords(), f.slot(n)));
        }
        let dir = frame_vector(q, f.slot(n));
        let h = second_difference_step(q);
        directional_difference(q, &dir, h, |r| {
            check_region(u, r)?;
            Ok(u.value(r))
        })
    };
    let v_dir = frame_vector(p, v.slot(n));
    let w_dir = frame_vector(p, w.slot(n));
    let vw = directional_difference(p, &v_dir, outer_h, |q| inner(q, w))?;
    let wv = directional_difference(p, &w_dir, outer_h, |q| inner(q, v))?;
    Ok(vw - wv)
}

/// `∂u/∂t` at `p`, analytic when possible.
pub fn partial_t<F: ScalarField + ?Sized>(u: &F, p: &Point) -> Result<f64, HeisError> {
    let n = p.dim();
    if let Some(grad) = u.gradient(p) {
        return Ok(grad[2 * n]);
    }
    let mut dir = vec![0.0; 2 * n + 1];
    dir[2 * n] = 1.0;
    directional_difference(p, &dir, first_difference_step(p), |q| {
        check_region(u, q)?;
        Ok(u.value(q))
    })
}

/// Residual `([X_i, Y_i] u)(p) + 4 ∂u/∂t(p)`, which vanishes for smooth `u`.
pub fn commutator_check<F: ScalarField + ?Sized>(
    u: &F,
    p: &Point,
    i: usize,
) -> Result<f64, HeisError> {
    let bracket = apply_bracket(u, p, FrameField::X(i), FrameField::Y(i))?;
    Ok(bracket + 4.0 * partial_t(u, p)?)
}

/// The field `ξ ↦ u(g ∘ ξ)`.
#[derive(Debug, Clone)]
pub struct Translated<F> {
    inner: F,
    g: Point,
}

impl<F: ScalarField> Translated<F> {
    pub fn inner(&self) -> &F {
        &self.inner
    }

    pub fn translation(&self) -> &Point {
        &self.g
    }
}

/// Left translation of a field: returns `ξ ↦ u(g ∘ ξ)`.
pub fn left_translate_field<F: ScalarField>(u: F, g: Point) -> Translated<F> {
    assert_eq!(u.dim(), g.dim(), "translation must live in the field's ℍⁿ");
    Translated { inner: u, g }
}

/// Bounding box of `h ∘ B` for a box `B`.
pub fn translate_box(h: &Point, b: &AxisBox) -> AxisBox {
    let n = h.dim();
    let mut lo: Vec<f64> = (0..2 * n).map(|j| b.lo[j] + h.coords[j]).collect();
    let mut hi: Vec<f64> = (0..2 * n).map(|j| b.hi[j] + h.coords[j]).collect();
    // t-component of h∘ζ: h_t + ζ_t + 2 Σ (ζ_x h_y − h_x ζ_y)
    let mut t_lo = h.t() + b.lo[2 * n];
    let mut t_hi = h.t() + b.hi[2 * n];
    for i in 0..n {
        for (coef, j) in [(2.0 * h.y()[i], i), (-2.0 * h.x()[i], n + i)] {
            if coef != 0.0 {
                let (a, c) = (coef * b.lo[j], coef * b.hi[j]);
                t_lo += a.min(c);
                t_hi += a.max(c);
            }
        }
    }
    lo.push(t_lo);
    hi.push(t_hi);
    AxisBox { lo, hi }
}

impl<F: ScalarField> ScalarField for Translated<F> {
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn value(&self, p: &Point) -> f64 {
        self.inner.value(&compose_unchecked(self.g.coords(), p.coords()))
    }

    fn gradient(&self, p: &Point) -> Option<Vec<f64>> {
        let q = compose_unchecked(self.g.coords(), p.coords());
        let gq = self.inner.gradient(&q)?;
        let n = p.dim();
        let ut = gq[2 * n];
        let mut out = gq;
        for i in 0..n {
            out[i] += 2.0 * self.g.y()[i] * ut;
            out[n + i] -= 2.0 * self.g.x()[i] * ut;
        }
        Some(out)
    }

    fn support(&self) -> AxisBox {
        translate_box(&self.g.inverse(), &self.inner.support())
    }

    fn evaluation_region(&self) -> Option<AxisBox> {
        self.inner
            .evaluation_region()
            .map(|r| translate_box(&self.g.inverse(), &r))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    struct CoordinateT;
    impl ScalarField for CoordinateT {
        fn dim(&self) -> usize {
            1
        }
        fn value(&self, p: &Point) -> f64 {
            p.t()
        }
        fn support(&self) -> AxisBox {
            AxisBox::unbounded(3)
        }
    }

    struct Xyt;
    impl ScalarField for Xyt {
        fn dim(&self) -> usize {
            1
        }
        fn value(&self, p: &Point) -> f64 {
            p.x()[0] * p.y()[0] * p.t()
        }
        fn support(&self) -> AxisBox {
            AxisBox::unbounded(3)
        }
    }

    fn pt(c: &[f64]) -> Point {
        Point::from_coords(c.to_vec()).unwrap()
    }

    #[test]
    fn compose_hand_example() {
        let p = group_compose(&pt(&[1.0, 0.0, 0.0]), &pt(&[0.0, 1.0, 0.0])).unwrap();
        assert_eq!(p.coords(), &[1.0, 1.0, -2.0]);
    }

    #[test]
    fn compose_rejects_mixed_dimensions() {
        let err = group_compose(&Point::identity(1), &Point::identity(2)).unwrap_err();
        assert_eq!(err, HeisError::DimensionMismatch { left: 1, right: 2 });
    }

    #[test]
    fn bad_lengths_and_values_rejected() {
        assert_eq!(
            Point::from_coords(vec![0.0; 4]).unwrap_err(),
            HeisError::InvalidLength(4)
        );
        assert_eq!(
            Point::from_coords(vec![0.0, f64::NAN, 0.0]).unwrap_err(),
            HeisError::NonFinite(1)
        );
    }

    #[test]
    fn dilation_examples() {
        let p = dilate(2.0, &pt(&[1.0, 1.0, 1.0])).unwrap();
        assert_eq!(p.coords(), &[2.0, 2.0, 4.0]);
        let q = pt(&[0.3, -1.2, 0.7]);
        assert_eq!(dilate(1.0, &q).unwrap(), q);
        assert!(matches!(
            dilate(0.0, &q),
            Err(HeisError::NonPositiveDilation(_))
        ));
        assert!(dilate(-1.0, &q).is_err());
    }

    #[test]
    fn frame_examples() {
        let p = pt(&[0.5, -1.5, 3.0]);
        let f = frame_at(&p);
        assert_eq!(f[0], vec![1.0, 0.0, -3.0]);
        assert_eq!(f[1], vec![0.0, 1.0, -1.0]);
        let f0 = frame_at(&Point::identity(1));
        assert_eq!(f0[0], vec![1.0, 0.0, 0.0]);
        assert_eq!(f0[1], vec![0.0, 1.0, 0.0]);
    }

    #[test]
    fn gradient_of_t() {
        let g = horizontal_gradient(&CoordinateT, &pt(&[1.0, 2.0, 0.0])).unwrap();
        assert_relative_eq!(g.a[0], 4.0, epsilon = 1e-8);
        assert_relative_eq!(g.b[0], -2.0, epsilon = 1e-8);
    }

    #[test]
    fn commutator_of_xyt() {
        let p = pt(&[1.0, 1.0, 1.0]);
        let bracket = apply_bracket(&Xyt, &p, FrameField::X(0), FrameField::Y(0)).unwrap();
        assert_relative_eq!(bracket, -4.0, epsilon = 1e-6);
        assert!(commutator_check(&Xyt, &p, 0).unwrap().abs() < 1e-6);
    }

    #[test]
    fn stencil_outside_region_is_reported() {
        struct Restricted;
        impl ScalarField for Restricted {
            fn dim(&self) -> usize {
                1
            }
            fn value(&self, p: &Point) -> f64 {
                p.t().sqrt()
            }
            fn support(&self) -> AxisBox {
                AxisBox::unbounded(3)
            }
            fn evaluation_region(&self) -> Option<AxisBox> {
                Some(AxisBox::new(
                    vec![f64::NEG_INFINITY, f64::NEG_INFINITY, 0.0],
                    vec![f64::INFINITY, f64::INFINITY, f64::INFINITY],
                ))
            }
        }
        // Y at (1, 0, 0) has t-component −2, so the stencil dips below t = 0.
        let err = horizontal_gradient(&Restricted, &pt(&[1.0, 0.0, 0.0])).unwrap_err();
        assert_eq!(err, HeisError::StencilOutOfRange);
        assert!(horizontal_gradient(&Restricted, &pt(&[0.0, 0.0, 1.0])).is_ok());
    }

    #[test]
    fn translated_box_contains_image() {
        let g = pt(&[0.4, -0.7, 1.1]);
        let b = AxisBox::new(vec![-1.0, -0.5, 0.0], vec![1.0, 0.5, 2.0]);
        let image = translate_box(&g, &b);
        for &x in &[-1.0, 0.3, 1.0] {
            for &y in &[-0.5, 0.1, 0.5] {
                for &t in &[0.0, 1.0, 2.0] {
                    let q = group_compose(&g, &pt(&[x, y, t])).unwrap();
                    assert!(image.contains(q.coords()));
                }
            }
        }
    }
}
