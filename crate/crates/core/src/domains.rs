//! Half-spaces and convex polytopes in ℍⁿ ≅ ℝ^{2n+1}, the nearest-facet
//! partition, characteristic points and Hardy weights.
//!
//! Domains use the inward-normal convention `Ω = {ξ : ⟨ξ, ν_k⟩ > d_k ∀k}`
//! with unit normals, so `⟨ξ, ν_k⟩ − d_k` is the Euclidean distance from ξ
//! to the hyperplane of facet `k`.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;
use rand::Rng;
use thiserror::Error;

use crate::heis::{frame_pairings, AxisBox, HeisError, Point};
use crate::linalg::{combinations, dot, norm, orthogonal_complement, rank, solve};
use crate::metrics::{cc_distance_to_set, AffineSet, SolverConfig};

/// Tolerance for unit normals.
pub const UNIT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DomainError {
    #[error("normal has norm {0}, expected 1")]
    NotUnit(f64),
    #[error("normal is zero")]
    ZeroNormal,
    #[error("dimension mismatch: expected {expected} coordinates, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("point lies outside the domain")]
    OutsideDomain,
    #[error("point lies on the boundary")]
    OnBoundary,
    #[error("facets {0} and {1} are duplicates")]
    DuplicateFacet(usize, usize),
    #[error("polytope needs at least one facet")]
    NoFacets,
    #[error("no interior point: {0}")]
    EmptyInterior(&'static str),
    #[error("operation needs a bounded polytope")]
    Unbounded,
    #[error("facets {0} and {1} have parallel normals and no interface")]
    ParallelFacets(usize, usize),
    #[error("facet index {0} out of range")]
    FacetIndex(usize),
    #[error("Hardy weights need p >= 2, got {0}")]
    InvalidExponent(f64),
    #[error("the weight identity needs n = 1 and a normal with nonzero t-component")]
    IdentityPrecondition,
    #[error(transparent)]
    Heis(#[from] HeisError),
}

/// `Π⁺_{ν,d} = {ξ : ⟨ξ, ν⟩ > d}` with unit inward normal ν.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct HalfSpace {
    normal: Vec<f64>,
    offset: f64,
}

impl HalfSpace {
    /// Requires `|ν| = 1` within [`UNIT_TOL`] and `ν ∈ ℝ^{2n+1}`.
    pub fn new(normal: Vec<f64>, offset: f64) -> Result<Self, DomainError> {
        check_dim(normal.len())?;
        let nn = norm(&normal);
        if (nn - 1.0).abs() > UNIT_TOL {
            return Err(DomainError::NotUnit(nn));
        }
        Ok(HalfSpace { normal, offset })
    }

    /// Rescales `(ν, d)` so that ν is a unit vector; also returns `|ν|`.
    pub fn normalized(normal: Vec<f64>, offset: f64) -> Result<(Self, f64), DomainError> {
        check_dim(normal.len())?;
        let nn = norm(&normal);
        if nn == 0.0 || !nn.is_finite() {
            return Err(DomainError::ZeroNormal);
        }
        let h = HalfSpace {
            normal: normal.iter().map(|v| v / nn).collect(),
            offset: offset / nn,
        };
        Ok((h, nn))
    }

    pub fn normal(&self) -> &[f64] {
        &self.normal
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    /// The `n` of ℍⁿ.
    pub fn dim(&self) -> usize {
        (self.normal.len() - 1) / 2
    }

    /// Signed distance `⟨ξ, ν⟩ − d`.
    pub fn signed_distance(&self, p: &[f64]) -> f64 {
        dot(p, &self.normal) - self.offset
    }

    pub fn contains(&self, p: &[f64]) -> bool {
        self.signed_distance(p) > 0.0
    }

    /// `ν_t`, the component along `t`.
    pub fn normal_t(&self) -> f64 {
        self.normal[self.normal.len() - 1]
    }

    /// Euclidean translate `Ω + v`.
    pub fn translated(&self, v: &[f64]) -> HalfSpace {
        HalfSpace {
            normal: self.normal.clone(),
            offset: self.offset + dot(&self.normal, v),
        }
    }
}

fn check_dim(len: usize) -> Result<(), DomainError> {
    if len < 3 || len % 2 == 0 {
        return Err(DomainError::Heis(HeisError::InvalidLength(len)));
    }
    Ok(())
}

/// Convex polyhedron `⋂_k Π⁺_{ν_k, d_k}` with a certified interior point.
#[derive(Debug, Clone, PartialEq)]
pub struct Polytope {
    facets: Vec<HalfSpace>,
    bounded: bool,
    interior: Vec<f64>,
    vertices: Vec<Vec<f64>>,
}

impl Polytope {
    /// Builds a polytope from its facets.
    ///
    /// For bounded polytopes the interior point defaults to the vertex
    /// centroid; unbounded ones need `interior` to be supplied.
    pub fn new(facets: Vec<HalfSpace>, interior: Option<Vec<f64>>) -> Result<Self, DomainError> {
        let first = facets.first().ok_or(DomainError::NoFacets)?;
        let d = first.normal.len();
        for f in &facets {
            if f.normal.len() != d {
                return Err(DomainError::DimensionMismatch {
                    expected: d,
                    got: f.normal.len(),
                });
            }
        }
        for (i, a) in facets.iter().enumerate() {
            for (j, b) in facets.iter().enumerate().skip(i + 1) {
                let same = a.normal.iter().zip(&b.normal).all(|(x, y)| (x - y).abs() <= 1e-12)
                    && (a.offset - b.offset).abs() <= 1e-12;
                if same {
                    return Err(DomainError::DuplicateFacet(i, j));
                }
            }
        }
        let bounded = is_bounded(&facets, d);
        let vertices = if bounded { enumerate_vertices(&facets, d) } else { Vec::new() };
        let interior = match interior {
            Some(p) => p,
            None if bounded && !vertices.is_empty() => {
                let mut c = vec![0.0; d];
                for v in &vertices {
                    for (ci, vi) in c.iter_mut().zip(v) {
                        *ci += vi / vertices.len() as f64;
                    }
                }
                c
            }
            None if bounded => return Err(DomainError::EmptyInterior("no vertices")),
            None => return Err(DomainError::EmptyInterior("unbounded polytope needs an interior point")),
        };
        if interior.len() != d {
            return Err(DomainError::DimensionMismatch {
                expected: d,
                got: interior.len(),
            });
        }
        let slack = facets
            .iter()
            .map(|f| f.signed_distance(&interior))
            .fold(f64::INFINITY, f64::min);
        if !(slack > 1e-12) {
            return Err(DomainError::EmptyInterior("interior point violates a facet"));
        }
        Ok(Polytope {
            facets,
            bounded,
            interior,
            vertices,
        })
    }

    /// The cube `(0, 1)^{2n+1}`; facets ordered `ξ_j > 0` then `ξ_j < 1`.
    pub fn unit_cube(n: usize) -> Self {
        let d = 2 * n + 1;
        let mut facets = Vec::with_capacity(2 * d);
        for j in 0..d {
            let mut v = vec![0.0; d];
            v[j] = 1.0;
            facets.push(HalfSpace { normal: v, offset: 0.0 });
        }
        for j in 0..d {
            let mut v = vec![0.0; d];
            v[j] = -1.0;
            facets.push(HalfSpace { normal: v, offset: -1.0 });
        }
        Polytope::new(facets, None).expect("cube is a valid polytope")
    }

    /// The simplex `{ξ_j > 0, Σ ξ_j < 1}`.
    pub fn simplex(n: usize) -> Self {
        let d = 2 * n + 1;
        let mut facets = Vec::with_capacity(d + 1);
        for j in 0..d {
            let mut v = vec![0.0; d];
            v[j] = 1.0;
            facets.push(HalfSpace { normal: v, offset: 0.0 });
        }
        let s = 1.0 / (d as f64).sqrt();
        facets.push(HalfSpace {
            normal: vec![-s; d],
            offset: -s,
        });
        Polytope::new(facets, None).expect("simplex is a valid polytope")
    }

    /// The slab `{lo < ⟨ξ, ν⟩ < hi}`.
    pub fn slab(normal: Vec<f64>, lo: f64, hi: f64) -> Result<Self, DomainError> {
        let (lower, nn) = HalfSpace::normalized(normal, lo)?;
        let upper = HalfSpace {
            normal: lower.normal.iter().map(|v| -v).collect(),
            offset: -hi / nn,
        };
        let mid: Vec<f64> = lower
            .normal
            .iter()
            .map(|v| v * 0.5 * (lo + hi) / nn)
            .collect();
        Polytope::new(vec![lower, upper], Some(mid))
    }

    /// Random bounded polytope with `facet_count` facets containing the
    /// Euclidean ball of radius `0.5` about `center`.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, center: &[f64], facet_count: usize) -> Self {
        let d = center.len();
        assert!(facet_count > d, "a bounded polytope needs more than d facets");
        loop {
            let facets: Vec<HalfSpace> = (0..facet_count)
                .map(|_| {
                    let v = loop {
                        let v: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect();
                        let nv = norm(&v);
                        if nv > 0.1 && nv <= 1.0 {
                            break v.iter().map(|x| x / nv).collect::<Vec<f64>>();
                        }
                    };
                    let r = rng.gen_range(0.5..1.5);
                    let offset = dot(&v, center) - r;
                    HalfSpace { normal: v, offset }
                })
                .collect();
            if !is_bounded(&facets, d) {
                continue;
            }
            if let Ok(p) = Polytope::new(facets, Some(center.to_vec())) {
                return p;
            }
        }
    }

    pub fn facets(&self) -> &[HalfSpace] {
        &self.facets
    }

    pub fn is_bounded(&self) -> bool {
        self.bounded
    }

    pub fn interior_point(&self) -> &[f64] {
        &self.interior
    }

    /// Vertices (bounded polytopes only).
    pub fn vertices(&self) -> &[Vec<f64>] {
        &self.vertices
    }

    /// Number of coordinates, `2n + 1`.
    pub fn ambient_dim(&self) -> usize {
        self.facets[0].normal.len()
    }

    pub fn dim(&self) -> usize {
        (self.ambient_dim() - 1) / 2
    }

    /// Smallest box containing the polytope.
    pub fn bounding_box(&self) -> Result<AxisBox, DomainError> {
        if !self.bounded {
            return Err(DomainError::Unbounded);
        }
        let d = self.ambient_dim();
        let mut lo = vec![f64::INFINITY; d];
        let mut hi = vec![f64::NEG_INFINITY; d];
        for v in &self.vertices {
            for j in 0..d {
                lo[j] = lo[j].min(v[j]);
                hi[j] = hi[j].max(v[j]);
            }
        }
        Ok(AxisBox::new(lo, hi))
    }

    pub fn contains(&self, p: &[f64]) -> bool {
        self.facets.iter().all(|f| f.contains(p))
    }

    /// Euclidean translate `Ω + v`.
    pub fn translated(&self, v: &[f64]) -> Polytope {
        Polytope {
            facets: self.facets.iter().map(|f| f.translated(v)).collect(),
            bounded: self.bounded,
            interior: self.interior.iter().zip(v).map(|(a, b)| a + b).collect(),
            vertices: self
                .vertices
                .iter()
                .map(|w| w.iter().zip(v).map(|(a, b)| a + b).collect())
                .collect(),
        }
    }
}

/// A polyhedron is bounded iff its recession cone `{r : ⟨r, ν_k⟩ ≥ 0 ∀k}`
/// is `{0}`: the normals must have full rank and no extreme ray may exist.
fn is_bounded(facets: &[HalfSpace], d: usize) -> bool {
    let rows: Vec<&[f64]> = facets.iter().map(|f| f.normal.as_slice()).collect();
    if rank(&rows, 1e-12) < d {
        return false;
    }
    for subset in combinations(facets.len(), d - 1) {
        let sub: Vec<&[f64]> = subset.iter().map(|&k| rows[k]).collect();
        let r = orthogonal_complement(&sub);
        let nr = norm(&r);
        if nr < 1e-12 {
            continue;
        }
        for sign in [1.0, -1.0] {
            if rows.iter().all(|v| sign * dot(v, &r) >= -1e-12 * nr) {
                return false;
            }
        }
    }
    true
}

fn enumerate_vertices(facets: &[HalfSpace], d: usize) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = Vec::new();
    for subset in combinations(facets.len(), d) {
        let a: Vec<f64> = subset.iter().flat_map(|&k| facets[k].normal.iter().copied()).collect();
        let b: Vec<f64> = subset.iter().map(|&k| facets[k].offset).collect();
        let Some(v) = solve(&a, &b) else { continue };
        let feasible = facets.iter().all(|f| f.signed_distance(&v) >= -1e-9);
        let fresh = out
            .iter()
            .all(|w| w.iter().zip(&v).any(|(x, y)| (x - y).abs() > 1e-9));
        if feasible && fresh {
            out.push(v);
        }
    }
    out
}

/// A half-space or polytope.
#[derive(Debug, Clone, PartialEq)]
pub enum Domain {
    HalfSpace(HalfSpace),
    Polytope(Polytope),
}

impl From<HalfSpace> for Domain {
    fn from(h: HalfSpace) -> Self {
        Domain::HalfSpace(h)
    }
}

impl From<Polytope> for Domain {
    fn from(p: Polytope) -> Self {
        Domain::Polytope(p)
    }
}

impl Domain {
    pub fn ambient_dim(&self) -> usize {
        match self {
            Domain::HalfSpace(h) => h.normal.len(),
            Domain::Polytope(p) => p.ambient_dim(),
        }
    }

    pub fn dim(&self) -> usize {
        (self.ambient_dim() - 1) / 2
    }

    pub fn facets(&self) -> &[HalfSpace] {
        match self {
            Domain::HalfSpace(h) => core::slice::from_ref(h),
            Domain::Polytope(p) => p.facets(),
        }
    }

    pub fn contains(&self, p: &[f64]) -> bool {
        self.facets().iter().all(|f| f.contains(p))
    }

    /// Euclidean translate `Ω + v`.
    pub fn translated(&self, v: &[f64]) -> Domain {
        match self {
            Domain::HalfSpace(h) => Domain::HalfSpace(h.translated(v)),
            Domain::Polytope(p) => Domain::Polytope(p.translated(v)),
        }
    }

    /// Short human-readable description.
    pub fn describe(&self) -> String {
        match self {
            Domain::HalfSpace(h) => format!("halfspace(nu={:?}, d={})", h.normal, h.offset),
            Domain::Polytope(p) => format!(
                "polytope({} facets, {})",
                p.facets.len(),
                if p.bounded { "bounded" } else { "unbounded" }
            ),
        }
    }

    fn check_point(&self, p: &Point) -> Result<(), DomainError> {
        if p.coords().len() != self.ambient_dim() {
            return Err(DomainError::DimensionMismatch {
                expected: self.ambient_dim(),
                got: p.coords().len(),
            });
        }
        Ok(())
    }
}

/// Index and distance of the nearest facet, lowest index on ties.
fn nearest(facets: &[HalfSpace], p: &[f64]) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for (k, f) in facets.iter().enumerate() {
        let dk = f.signed_distance(p);
        if dk < best.1 {
            best = (k, dk);
        }
    }
    best
}

/// `dist(ξ, ∂Ω)`: `⟨ξ, ν⟩ − d` for half-spaces, `min_k (⟨ξ, ν_k⟩ − d_k)` for
/// polytopes.
pub fn euclidean_boundary_distance(domain: &Domain, p: &Point) -> Result<f64, DomainError> {
    domain.check_point(p)?;
    let (_, dist) = nearest(domain.facets(), p.coords());
    if dist < 0.0 {
        return Err(DomainError::OutsideDomain);
    }
    Ok(dist)
}

/// Index of the facet realising `dist(ξ, ∂Ω)`, lowest index on ties.
pub fn nearest_facet(polytope: &Polytope, p: &Point) -> Result<usize, DomainError> {
    if p.coords().len() != polytope.ambient_dim() {
        return Err(DomainError::DimensionMismatch {
            expected: polytope.ambient_dim(),
            got: p.coords().len(),
        });
    }
    let (k, dist) = nearest(&polytope.facets, p.coords());
    if dist <= 0.0 {
        return Err(DomainError::OutsideDomain);
    }
    Ok(k)
}

/// Hyperplane `Γ_kl = {dist(·, F_k) = dist(·, F_l)}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Interface {
    /// `n_kl = (ν_k − ν_l)/|ν_k − ν_l|`, pointing from `Ω_k` into `Ω_l`.
    pub normal: Vec<f64>,
    /// `Γ_kl = {⟨ξ, n_kl⟩ = offset}`.
    pub offset: f64,
    /// `(ν_k − ν_l) · n_kl = √(2 − 2 cos α_kl)`.
    pub normal_gap: f64,
}

pub fn interface(polytope: &Polytope, k: usize, l: usize) -> Result<Interface, DomainError> {
    let nf = polytope.facets.len();
    for idx in [k, l] {
        if idx >= nf {
            return Err(DomainError::FacetIndex(idx));
        }
    }
    let (fk, fl) = (&polytope.facets[k], &polytope.facets[l]);
    let diff: Vec<f64> = fk.normal.iter().zip(&fl.normal).map(|(a, b)| a - b).collect();
    let nd = norm(&diff);
    if k == l || nd <= 1e-12 {
        return Err(DomainError::ParallelFacets(k, l));
    }
    let normal: Vec<f64> = diff.iter().map(|v| v / nd).collect();
    Ok(Interface {
        normal_gap: dot(&diff, &normal),
        offset: (fk.offset - fl.offset) / nd,
        normal,
    })
}

/// Cell `Ω_k` of the nearest-facet partition as half-space constraints
/// `⟨ξ, a⟩ ≥ b`: the facets of Ω plus `dist(ξ, F_k) ≤ dist(ξ, F_l)` for
/// every `l ≠ k`.
#[derive(Debug, Clone, PartialEq)]
pub struct PartitionCell {
    pub facet: usize,
    pub constraints: Vec<(Vec<f64>, f64)>,
}

impl PartitionCell {
    pub fn contains(&self, p: &[f64]) -> bool {
        self.constraints.iter().all(|(a, b)| dot(a, p) >= *b)
    }
}

pub fn partition_cell(polytope: &Polytope, k: usize) -> Result<PartitionCell, DomainError> {
    let fk = polytope.facets.get(k).ok_or(DomainError::FacetIndex(k))?;
    let mut constraints: Vec<(Vec<f64>, f64)> =
        polytope.facets.iter().map(|f| (f.normal.clone(), f.offset)).collect();
    for (l, fl) in polytope.facets.iter().enumerate() {
        if l != k {
            let a = fl.normal.iter().zip(&fk.normal).map(|(x, y)| x - y).collect();
            constraints.push((a, fl.offset - fk.offset));
        }
    }
    Ok(PartitionCell { facet: k, constraints })
}

/// Characteristic point `ξ⁰ = (ν_y/(2ν_t), −ν_x/(2ν_t), d/ν_t)`, or `None`
/// when `ν_t = 0`.
///
/// At ξ⁰ the frame is orthogonal to ν and `⟨ξ⁰, ν⟩ = d`.
pub fn characteristic_point(h: &HalfSpace) -> Option<Point> {
    let n = h.dim();
    let nt = h.normal_t();
    if nt == 0.0 {
        return None;
    }
    let x: Vec<f64> = (0..n).map(|i| h.normal[n + i] / (2.0 * nt)).collect();
    let y: Vec<f64> = (0..n).map(|i| -h.normal[i] / (2.0 * nt)).collect();
    Some(Point::new(&x, &y, h.offset / nt).expect("finite coordinates"))
}

/// How the frame pairings `⟨X_i, ν⟩`, `⟨Y_i, ν⟩` enter the weight numerator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum WeightAggregation {
    /// `Σ_i |⟨X_i, ν⟩|^p + |⟨Y_i, ν⟩|^p`.
    PerComponent,
    /// `(Σ_i ⟨X_i, ν⟩² + ⟨Y_i, ν⟩²)^{p/2}`; conjecture probe only.
    L2Conjecture,
}

impl WeightAggregation {
    pub fn label(self) -> &'static str {
        match self {
            WeightAggregation::PerComponent => "per-component",
            WeightAggregation::L2Conjecture => "l2-aggregated (conjecture)",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct WeightSpec {
    p: f64,
    aggregation: WeightAggregation,
}

impl WeightSpec {
    pub fn new(p: f64, aggregation: WeightAggregation) -> Result<Self, DomainError> {
        if !(p >= 2.0) || !p.is_finite() {
            return Err(DomainError::InvalidExponent(p));
        }
        Ok(WeightSpec { p, aggregation })
    }

    pub fn per_component(p: f64) -> Result<Self, DomainError> {
        WeightSpec::new(p, WeightAggregation::PerComponent)
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn aggregation(&self) -> WeightAggregation {
        self.aggregation
    }
}

/// Weight numerator at ξ for normal ν (no distance factor).
pub fn weight_numerator(normal: &[f64], coords: &[f64], spec: &WeightSpec) -> f64 {
    let pair = frame_pairings(coords, normal);
    match spec.aggregation {
        WeightAggregation::PerComponent => pair.components().map(|c| c.abs().powf(spec.p)).sum(),
        WeightAggregation::L2Conjecture => pair.norm_squared().powf(0.5 * spec.p),
    }
}

/// Hardy weight `numerator(ν(ξ), ξ) / dist(ξ, ∂Ω)^p` with ν(ξ) the normal of
/// the nearest facet.
pub fn hardy_weight(domain: &Domain, spec: &WeightSpec, p: &Point) -> Result<f64, DomainError> {
    domain.check_point(p)?;
    let facets = domain.facets();
    let (k, dist) = nearest(facets, p.coords());
    if dist < 0.0 {
        return Err(DomainError::OutsideDomain);
    }
    if dist == 0.0 {
        return Err(DomainError::OnBoundary);
    }
    let num = weight_numerator(&facets[k].normal, p.coords(), spec);
    Ok(num / dist.powf(spec.p))
}

/// Both sides of `(⟨X, ν⟩² + ⟨Y, ν⟩²)/4 = ν_t² δ_cc²(ξ, Ξ_ν)` in ℍ¹.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct WeightIdentity {
    pub lhs: f64,
    pub rhs: f64,
    /// `|lhs − rhs| / max(lhs, rhs)`, zero when both vanish.
    pub residual: f64,
    pub solver_converged: bool,
}

/// Checks the weight identity, with the right side from the distance solver
/// to `Ξ_ν`, the vertical line through the characteristic point.
pub fn weight_identity_check(
    h: &HalfSpace,
    p: &Point,
    cfg: &SolverConfig,
) -> Result<WeightIdentity, DomainError> {
    if h.dim() != 1 || p.dim() != 1 || h.normal_t() == 0.0 {
        return Err(DomainError::IdentityPrecondition);
    }
    let xi0 = characteristic_point(h).expect("ν_t ≠ 0");
    let lhs = frame_pairings(p.coords(), &h.normal).norm_squared() / 4.0;
    let cc = cc_distance_to_set(p, &AffineSet::vertical_line(xi0.horizontal()), cfg);
    let nt = h.normal_t();
    let rhs = nt * nt * cc.distance * cc.distance;
    let scale = lhs.max(rhs);
    let residual = if scale == 0.0 { 0.0 } else { (lhs - rhs).abs() / scale };
    Ok(WeightIdentity {
        lhs,
        rhs,
        residual,
        solver_converged: cc.converged,
    })
}
