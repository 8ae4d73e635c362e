//! Both sides of the geometric Hardy inequalities, their quotient, and the
//! algebraic lemmas used to establish them.
//!
//! For `u` compactly supported in Ω the inequalities read
//!
//! ```text
//! ∫ |∇_H u|^p ≥ ((p−1)/p)^p ∫ Σ_i (|⟨X_i, ν⟩|^p + |⟨Y_i, ν⟩|^p) / dist(ξ, ∂Ω)^p |u|^p
//! ```
//!
//! with ν the inward normal of the nearest facet.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::domains::{
    characteristic_point, interface, partition_cell, weight_numerator, Domain, DomainError, HalfSpace,
    Polytope, WeightAggregation, WeightSpec,
};
use crate::heis::{
    frame_pairings, horizontal_gradient, left_translate_field, AxisBox, HeisError, HorizontalVector, Point,
    ScalarField,
};
use crate::linalg::dot;
use crate::parallel::map_indexed;
use crate::quadrature::{integrate_many, IntegralValue, QuadratureError, QuadratureSpec, Region, Rule};

/// Minimum Euclidean gap between a test function's support box and ∂Ω.
pub const SUPPORT_MARGIN: f64 = 1e-3;

/// Monte Carlo samples per partition cell when the main rule is not Monte Carlo.
pub const DEFAULT_CELL_SAMPLES: usize = 200_000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum HardyError {
    #[error("exponent p = {0} is below 2")]
    InvalidExponent(f64),
    #[error("argument must be nonnegative")]
    NegativeInput,
    #[error("weights a_i must be positive")]
    NonPositiveWeight,
    #[error("x and a must have the same length")]
    LengthMismatch,
    #[error("support of u has no finite bounding box")]
    UnboundedSupport,
    #[error("support of u comes within {margin:e} of facet {facet} (need {SUPPORT_MARGIN:e})")]
    SupportMargin { facet: usize, margin: f64 },
    #[error("translation reduction needs a normal with nonzero t-component")]
    NoCharacteristicPoint,
    #[error(transparent)]
    Domain(#[from] DomainError),
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
    #[error(transparent)]
    Heis(#[from] HeisError),
}

/// `((p−1)/p)^p`.
pub fn sharp_constant(p: f64) -> Result<f64, HardyError> {
    check_p(p)?;
    Ok(((p - 1.0) / p).powf(p))
}

fn check_p(p: f64) -> Result<(), HardyError> {
    if !(p >= 2.0) || !p.is_finite() {
        return Err(HardyError::InvalidExponent(p));
    }
    Ok(())
}

/// `C(α, p) = −(p−1)(α + |α|^{p/(p−1)})`.
pub fn c_alpha(alpha: f64, p: f64) -> f64 {
    -(p - 1.0) * (alpha + alpha.abs().powf(p / (p - 1.0)))
}

/// Maximiser of `C(·, p)`: `α* = −((p−1)/p)^{p−1}` and `C(α*, p) = ((p−1)/p)^p`.
pub fn optimal_alpha(p: f64) -> Result<(f64, f64), HardyError> {
    check_p(p)?;
    let alpha = -((p - 1.0) / p).powf(p - 1.0);
    Ok((alpha, c_alpha(alpha, p)))
}

/// `|v|₂^p − Σ_i (|a_i|^p + |b_i|^p)`, nonnegative for `p ≥ 2`.
pub fn superadditivity_gap(v: &HorizontalVector, p: f64) -> Result<f64, HardyError> {
    check_p(p)?;
    let l2 = v.norm_squared().powf(0.5 * p);
    let per: f64 = v.components().map(|c| c.abs().powf(p)).sum();
    Ok(l2 - per)
}

/// Weighted Jensen bound `Σ c_i x_i^α ≥ (Σ x_i)^α` with
/// `c_i = a_i^{1−α} (Σ a_j)^{α−1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct JensenSplit {
    pub bound: f64,
    pub weights: Vec<f64>,
}

pub fn jensen_split(x: &[f64], a: &[f64], alpha: f64) -> Result<JensenSplit, HardyError> {
    if x.len() != a.len() {
        return Err(HardyError::LengthMismatch);
    }
    if a.iter().any(|v| !(*v > 0.0)) {
        return Err(HardyError::NonPositiveWeight);
    }
    if x.iter().any(|v| *v < 0.0) || !(alpha >= 1.0) {
        return Err(HardyError::NegativeInput);
    }
    let total: f64 = a.iter().sum();
    let weights: Vec<f64> = a
        .iter()
        .map(|ai| ai.powf(1.0 - alpha) * total.powf(alpha - 1.0))
        .collect();
    let bound = weights.iter().zip(x).map(|(c, xi)| c * xi.powf(alpha)).sum();
    Ok(JensenSplit { bound, weights })
}

/// `A^p − A^{p−1}B − B^{p−1}A + B^p = (A^{p−1} − B^{p−1})(A − B) ≥ 0`.
pub fn boundary_sign_terms(a: f64, b: f64, p: f64) -> Result<f64, HardyError> {
    check_p(p)?;
    if a < 0.0 || b < 0.0 {
        return Err(HardyError::NegativeInput);
    }
    Ok((a.powf(p - 1.0) - b.powf(p - 1.0)) * (a - b))
}

/// Both sides of one inequality for one test function.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct QuotientReport {
    /// `∫ |∇_H u|^p`.
    pub lhs: IntegralValue,
    /// `∫ weight · |u|^p`, without the constant.
    pub rhs_raw: IntegralValue,
    pub constant: f64,
    pub quotient: f64,
    /// `(σ_lhs + quotient · σ_rhs) / rhs`.
    pub quotient_error: f64,
    /// `quotient − constant`.
    pub margin: f64,
    pub p: f64,
    pub aggregation: WeightAggregation,
    pub domain: String,
    pub seed: u64,
    pub quad: QuadratureSpec,
}

impl QuotientReport {
    /// `margin ≥ −3σ`.
    pub fn holds(&self) -> bool {
        self.margin >= -3.0 * self.quotient_error
    }
}

/// Smallest Euclidean gap between the support box and each facet plane;
/// errors when below [`SUPPORT_MARGIN`].
pub fn check_support_margin(domain: &Domain, support: &AxisBox) -> Result<f64, HardyError> {
    if !support.is_bounded() {
        return Err(HardyError::UnboundedSupport);
    }
    let mut worst = f64::INFINITY;
    for (k, f) in domain.facets().iter().enumerate() {
        let m = support.min_linear(f.normal()) - f.offset();
        if m < SUPPORT_MARGIN {
            return Err(HardyError::SupportMargin { facet: k, margin: m });
        }
        worst = worst.min(m);
    }
    Ok(worst)
}

/// Evaluates `∫|∇_H u|^p` and `∫ weight |u|^p` over Ω.
///
/// Half-spaces integrate both densities over the support box with `quad`.
/// Polytopes integrate the left side the same way and the right side cell by
/// cell over the nearest-facet partition, where the facet normal is constant;
/// cells use `quad` when it is Monte Carlo and [`DEFAULT_CELL_SAMPLES`]
/// samples otherwise, each with its own stream derived from the seed.
pub fn evaluate_quotient<F: ScalarField + ?Sized>(
    u: &F,
    domain: &Domain,
    spec: &WeightSpec,
    quad: &QuadratureSpec,
) -> Result<QuotientReport, HardyError> {
    let support = u.support();
    check_support_margin(domain, &support)?;
    quotient_on_box(u, domain, spec, quad, &support, Path::Generic)
}

/// Dedicated `p = 2` evaluation with squared pairings and the squared
/// gradient norm, sharing no power evaluations with the generic path.
pub fn evaluate_quotient_l2<F: ScalarField + ?Sized>(
    u: &F,
    domain: &Domain,
    quad: &QuadratureSpec,
) -> Result<QuotientReport, HardyError> {
    let support = u.support();
    check_support_margin(domain, &support)?;
    let spec = WeightSpec::per_component(2.0)?;
    quotient_on_box(u, domain, &spec, quad, &support, Path::L2)
}

/// Quotient over the support box of `u`, requiring only that the box lie
/// strictly inside Ω. Used by sharpness runs, whose windows approach ∂Ω.
pub(crate) fn quotient_in_window<F: ScalarField + ?Sized>(
    u: &F,
    domain: &Domain,
    spec: &WeightSpec,
    quad: &QuadratureSpec,
    l2: bool,
) -> Result<QuotientReport, HardyError> {
    let support = u.support();
    if !support.is_bounded() {
        return Err(HardyError::UnboundedSupport);
    }
    for (k, f) in domain.facets().iter().enumerate() {
        let m = support.min_linear(f.normal()) - f.offset();
        if !(m > 0.0) {
            return Err(HardyError::SupportMargin { facet: k, margin: m });
        }
    }
    let path = if l2 { Path::L2 } else { Path::Generic };
    quotient_on_box(u, domain, spec, quad, &support, path)
}

#[derive(Clone, Copy, PartialEq)]
enum Path {
    Generic,
    L2,
}

fn gradient_power<F: ScalarField + ?Sized>(u: &F, p: &Point, exponent: f64, path: Path) -> f64 {
    match horizontal_gradient(u, p) {
        Ok(g) => match path {
            Path::L2 => g.components().map(|c| c * c).sum(),
            Path::Generic => g.norm().powf(exponent),
        },
        Err(_) => f64::NAN,
    }
}

fn weighted_power(u_val: f64, normal: &[f64], coords: &[f64], dist: f64, spec: &WeightSpec, path: Path) -> f64 {
    if u_val == 0.0 {
        return 0.0;
    }
    match path {
        Path::L2 => {
            let pair = frame_pairings(coords, normal);
            let num: f64 = pair.components().map(|c| c * c).sum();
            num / (dist * dist) * u_val * u_val
        }
        Path::Generic => {
            let p = spec.p();
            weight_numerator(normal, coords, spec) / dist.powf(p) * u_val.abs().powf(p)
        }
    }
}

fn cell_seed(seed: u64, k: usize) -> u64 {
    seed.wrapping_add(0x9e37_79b9_7f4a_7c15u64.wrapping_mul(k as u64 + 1))
}

fn quotient_on_box<F: ScalarField + ?Sized>(
    u: &F,
    domain: &Domain,
    spec: &WeightSpec,
    quad: &QuadratureSpec,
    region: &AxisBox,
    path: Path,
) -> Result<QuotientReport, HardyError> {
    let p = spec.p();
    let constant = sharp_constant(p)?;
    let (lhs, rhs) = match domain {
        Domain::HalfSpace(h) => {
            let out = integrate_many(
                |x, o: &mut [f64]| {
                    let pt = Point::from_raw(x.to_vec());
                    o[0] = gradient_power(u, &pt, p, path);
                    o[1] = weighted_power(u.value(&pt), h.normal(), x, h.signed_distance(x), spec, path);
                },
                2,
                &Region::boxed(region.clone()),
                quad,
            )?;
            (out[0], out[1])
        }
        Domain::Polytope(poly) => {
            let lhs = integrate_many(
                |x, o: &mut [f64]| o[0] = gradient_power(u, &Point::from_raw(x.to_vec()), p, path),
                1,
                &Region::boxed(region.clone()),
                quad,
            )?[0];
            (lhs, polytope_rhs(u, poly, spec, quad, region, path)?)
        }
    };
    let quotient = lhs.value / rhs.value;
    let quotient_error = (lhs.error_estimate + quotient.abs() * rhs.error_estimate) / rhs.value.abs();
    Ok(QuotientReport {
        lhs,
        rhs_raw: rhs,
        constant,
        quotient,
        quotient_error,
        margin: quotient - constant,
        p,
        aggregation: spec.aggregation(),
        domain: domain.describe(),
        seed: quad.seed,
        quad: quad.clone(),
    })
}

fn polytope_rhs<F: ScalarField + ?Sized>(
    u: &F,
    poly: &Polytope,
    spec: &WeightSpec,
    quad: &QuadratureSpec,
    region: &AxisBox,
    path: Path,
) -> Result<IntegralValue, HardyError> {
    let samples = match quad.rule {
        Rule::MonteCarlo { samples } => samples,
        _ => DEFAULT_CELL_SAMPLES,
    };
    let mut total = IntegralValue::exact(0.0);
    for k in 0..poly.facets().len() {
        let cell = partition_cell(poly, k)?;
        let facet = &poly.facets()[k];
        let cell_quad = QuadratureSpec::monte_carlo(samples, cell_seed(quad.seed, k));
        let r = Region {
            bounds: region.clone(),
            constraints: cell.constraints,
        };
        let v = integrate_many(
            |x, o: &mut [f64]| {
                let pt = Point::from_raw(x.to_vec());
                o[0] = weighted_power(u.value(&pt), facet.normal(), x, facet.signed_distance(x), spec, path);
            },
            1,
            &r,
            &cell_quad,
        )?[0];
        total.value += v.value;
        total.error_estimate += v.error_estimate;
    }
    Ok(total)
}

/// Outcome of [`verify_translation_reduction`].
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TranslationReduction {
    /// `p = 2` quotient of `u` on `Π⁺_{ν,d}`.
    pub direct: QuotientReport,
    /// `p = 2` quotient of `v = u(ξ⁰ ∘ ·)` on `{sgn(ν_t) t > 0}`.
    pub reduced: QuotientReport,
    /// Relative difference of the two quotients.
    pub residual: f64,
}

/// Compares the `p = 2` quotient on `Π⁺_{ν,d}` with the quotient of the
/// left translate `v(ζ) = u(ξ⁰ ∘ ζ)` on `{sgn(ν_t) t > 0}`, whose weight is
/// `4|ζ′|²/ζ_t²`.
pub fn verify_translation_reduction<F: ScalarField>(
    h: &HalfSpace,
    u: &F,
    quad: &QuadratureSpec,
) -> Result<TranslationReduction, HardyError> {
    let xi0 = characteristic_point(h).ok_or(HardyError::NoCharacteristicPoint)?;
    let domain = Domain::HalfSpace(h.clone());
    let direct = evaluate_quotient_l2(u, &domain, quad)?;
    let margin = check_support_margin(&domain, &u.support())?;
    let nt = h.normal_t();
    let dim = h.normal().len();
    let mut e_t = vec![0.0; dim];
    e_t[dim - 1] = nt.signum();
    let reduced_domain = Domain::HalfSpace(HalfSpace::new(e_t, 0.0)?);
    let v = left_translate_field(u, xi0);
    // On supp v, ν_t ζ_t = dist(ξ⁰ ∘ ζ) ≥ margin, so clipping the t-range of
    // the bounding box loses nothing.
    let mut region = v.support();
    let floor = margin / nt.abs();
    if nt > 0.0 {
        region.lo[dim - 1] = region.lo[dim - 1].max(floor);
    } else {
        region.hi[dim - 1] = region.hi[dim - 1].min(-floor);
    }
    check_support_margin(&reduced_domain, &region)?;
    let spec = WeightSpec::per_component(2.0)?;
    let reduced = quotient_on_box(&v, &reduced_domain, &spec, quad, &region, Path::L2)?;
    let residual = (direct.quotient - reduced.quotient).abs() / direct.quotient.abs();
    Ok(TranslationReduction {
        direct,
        reduced,
        residual,
    })
}

/// Sign audit of one interface `Γ_kl`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct InterfaceAudit {
    pub k: usize,
    pub l: usize,
    /// `√(2 − 2 cos α_kl)`.
    pub normal_gap: f64,
    pub samples: usize,
    /// Samples where the `p = 2` integrand or the `Lᵖ` bracket is negative.
    pub negative: usize,
    pub min_l2_integrand: f64,
    pub min_bracket: f64,
    /// Largest mismatch between the two assemblies of the `p = 2` integrand.
    pub max_consistency_error: f64,
    /// Samples where `A^p − A^{p−1}B − B^{p−1}A + B^{p−1}` is negative.
    pub unfactored_variant_negative: usize,
}

/// Per-interface sign report for a bounded polytope.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct AuditReport {
    pub p: f64,
    pub interfaces: Vec<InterfaceAudit>,
    pub total_samples: usize,
    pub negative_samples: usize,
    pub note: String,
}

const AUDIT_NOTE: &str = "Lp bracket evaluated as A^p - A^(p-1) B - B^(p-1) A + B^p = \
(A^(p-1) - B^(p-1))(A - B); the variant whose last term is B^(p-1) does not factor this way \
and is counted separately";

/// Runs [`polytope_interface_audit`] with the per-interface count raised
/// until at least `min_total` points are collected overall.
pub fn polytope_interface_audit_total(
    poly: &Polytope,
    p: f64,
    min_total: usize,
    seed: u64,
) -> Result<AuditReport, HardyError> {
    let pilot = polytope_interface_audit(poly, p, 1, seed)?;
    let mut per = min_total.div_ceil(pilot.interfaces.len().max(1));
    loop {
        let report = polytope_interface_audit(poly, p, per, seed)?;
        if report.total_samples >= min_total || report.total_samples == 0 || per >= 64 * min_total {
            return Ok(report);
        }
        per *= min_total.div_ceil(report.total_samples).max(2);
    }
}

/// Samples points of each interface `Γ_kl ∩ Ω` on which `F_k` and `F_l` are
/// both nearest facets, and checks the sign of the boundary integrands.
///
/// Pairs that yield no such point within the attempt budget are treated as
/// non-adjacent and omitted.
pub fn polytope_interface_audit(
    poly: &Polytope,
    p: f64,
    samples_per_interface: usize,
    seed: u64,
) -> Result<AuditReport, HardyError> {
    check_p(p)?;
    let bbox = poly.bounding_box()?;
    let nf = poly.facets().len();
    let pairs: Vec<(usize, usize)> = (0..nf)
        .flat_map(|k| (k + 1..nf).map(move |l| (k, l)))
        .collect();
    let audits = map_indexed(pairs.len(), |idx| -> Result<Option<InterfaceAudit>, HardyError> {
        let (k, l) = pairs[idx];
        let iface = match interface(poly, k, l) {
            Ok(i) => i,
            Err(DomainError::ParallelFacets(..)) => return Ok(None),
            Err(e) => return Err(e.into()),
        };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(idx as u64);
        let (fk, fl) = (&poly.facets()[k], &poly.facets()[l]);
        let diff: Vec<f64> = fk.normal().iter().zip(fl.normal()).map(|(a, b)| a - b).collect();
        let mut audit = InterfaceAudit {
            k,
            l,
            normal_gap: iface.normal_gap,
            samples: 0,
            negative: 0,
            min_l2_integrand: f64::INFINITY,
            min_bracket: f64::INFINITY,
            max_consistency_error: 0.0,
            unfactored_variant_negative: 0,
        };
        let budget = 200 * samples_per_interface.max(1) + 20_000;
        let mut x = vec![0.0; bbox.dim()];
        for _ in 0..budget {
            if audit.samples == samples_per_interface {
                break;
            }
            for (j, xj) in x.iter_mut().enumerate() {
                *xj = rng.gen_range(bbox.lo[j]..=bbox.hi[j]);
            }
            let s = dot(&x, &iface.normal) - iface.offset;
            for (xj, nj) in x.iter_mut().zip(&iface.normal) {
                *xj -= s * nj;
            }
            let dk = fk.signed_distance(&x);
            if dk <= 0.0 {
                continue;
            }
            let tol = 1e-9 * (1.0 + dk);
            if poly.facets().iter().any(|f| f.signed_distance(&x) < dk - tol) {
                continue;
            }
            audit.samples += 1;
            let pn = frame_pairings(&x, &iface.normal);
            let cos = dot(fk.normal(), fl.normal());
            let l2 = (1.0 - cos).max(0.0).sqrt() * pn.norm_squared();
            let pd = frame_pairings(&x, &diff);
            let assembled = 0.5 * pd.components().zip(pn.components()).map(|(a, b)| a * b).sum::<f64>();
            let err = (l2 / 2f64.sqrt() - assembled).abs();
            audit.max_consistency_error = audit.max_consistency_error.max(err);
            let pk = frame_pairings(&x, fk.normal());
            let pl = frame_pairings(&x, fl.normal());
            let mut bracket = 0.0;
            let mut scale: f64 = 0.0;
            let mut variant_negative = false;
            for (a, b) in pk.components().zip(pl.components()) {
                let (aa, ab) = (a.abs(), b.abs());
                let term = aa.powf(p) - a.signum() * aa.powf(p - 1.0) * b + ab.powf(p)
                    - b.signum() * ab.powf(p - 1.0) * a;
                bracket += term;
                scale = scale.max(aa.powf(p)).max(ab.powf(p));
                if a * b > 0.0 {
                    let variant = aa.powf(p) - aa.powf(p - 1.0) * ab - ab.powf(p - 1.0) * aa + ab.powf(p - 1.0);
                    if variant < -1e-12 {
                        variant_negative = true;
                    }
                }
            }
            if variant_negative {
                audit.unfactored_variant_negative += 1;
            }
            audit.min_l2_integrand = audit.min_l2_integrand.min(l2);
            audit.min_bracket = audit.min_bracket.min(bracket);
            if l2 < 0.0 || bracket < -1e-12 * scale.max(1.0) {
                audit.negative += 1;
            }
        }
        Ok(if audit.samples > 0 { Some(audit) } else { None })
    });
    let mut interfaces = Vec::new();
    for a in audits {
        if let Some(a) = a? {
            interfaces.push(a);
        }
    }
    let total_samples = interfaces.iter().map(|a| a.samples).sum();
    let negative_samples = interfaces.iter().map(|a| a.negative).sum();
    Ok(AuditReport {
        p,
        interfaces,
        total_samples,
        negative_samples,
        note: String::from(AUDIT_NOTE),
    })
}

/// Default rule: Gauss order 24 per axis for n = 1, 10⁶ Monte Carlo samples
/// otherwise.
pub fn default_quadrature(n: usize, seed: u64) -> QuadratureSpec {
    if n == 1 {
        QuadratureSpec { rule: Rule::Gauss { order: 24 }, seed }
    } else {
        QuadratureSpec::monte_carlo(1_000_000, seed)
    }
}

/// Short label of a quadrature spec.
pub fn describe_quadrature(q: &QuadratureSpec) -> String {
    match &q.rule {
        Rule::Gauss { order } => format!("gauss(order={order})"),
        Rule::Tensor(axes) => format!("tensor({} axes)", axes.len()),
        Rule::MonteCarlo { samples } => format!("monte-carlo(samples={samples}, seed={})", q.seed),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{make_bump, Scaled};
    use approx::assert_relative_eq;

    #[test]
    fn constants() {
        assert_eq!(sharp_constant(2.0).unwrap(), 0.25);
        assert_relative_eq!(sharp_constant(3.0).unwrap(), 8.0 / 27.0, epsilon = 1e-15);
        assert!(sharp_constant(1.5).is_err());
        let mut prev = 0.25;
        for k in 1..200 {
            let c = sharp_constant(2.0 + k as f64 * 0.5).unwrap();
            assert!(c > prev && c < (-1.0f64).exp());
            prev = c;
        }
        assert!(((-1.0f64).exp() - prev) < 2e-3);
    }

    #[test]
    fn alpha_examples() {
        let (a, c) = optimal_alpha(2.0).unwrap();
        assert_eq!(a, -0.5);
        assert_eq!(c, 0.25);
        assert_eq!(c_alpha(-0.5, 2.0), 0.25);
        assert_eq!(c_alpha(0.0, 3.0), 0.0);
    }

    #[test]
    fn lemma_examples() {
        let v = HorizontalVector { a: vec![1.0], b: vec![1.0] };
        assert_relative_eq!(superadditivity_gap(&v, 4.0).unwrap(), 2.0, epsilon = 1e-14);
        assert_relative_eq!(superadditivity_gap(&v, 2.0).unwrap(), 0.0, epsilon = 1e-15);
        let j = jensen_split(&[1.0, 2.0, 3.0], &[1.0, 5.0, 2.0], 1.0).unwrap();
        assert_eq!(j.bound, 6.0);
        assert!(j.weights.iter().all(|c| *c == 1.0));
        let j = jensen_split(&[1.0, 1.0, 1.0], &[2.0, 2.0, 2.0], 2.0).unwrap();
        assert_relative_eq!(j.bound, 9.0, epsilon = 1e-14);
        assert!(jensen_split(&[1.0], &[0.0], 2.0).is_err());
        assert_eq!(boundary_sign_terms(2.0, 2.0, 3.0).unwrap(), 0.0);
        assert_eq!(boundary_sign_terms(2.0, 1.0, 2.0).unwrap(), 1.0);
        assert!(boundary_sign_terms(-1.0, 1.0, 2.0).is_err());
    }

    #[test]
    fn halfspace_bump_respects_inequality() {
        let dom: Domain = HalfSpace::new(vec![0.0, 0.0, 1.0], 0.0).unwrap().into();
        let u = make_bump(&[0.0, 0.0, 1.0], &[1.0, 1.0, 0.5], 1.0);
        let spec = WeightSpec::per_component(2.0).unwrap();
        let r = evaluate_quotient(&u, &dom, &spec, &QuadratureSpec::gauss(24)).unwrap();
        assert!(r.holds());
        assert!(r.margin > 0.0);
        let l2 = evaluate_quotient_l2(&u, &dom, &QuadratureSpec::gauss(24)).unwrap();
        assert!((l2.quotient - r.quotient).abs() <= 1e-10 * r.quotient);
        let scaled = Scaled { inner: u, factor: -3.5 };
        let s = evaluate_quotient(&scaled, &dom, &spec, &QuadratureSpec::gauss(24)).unwrap();
        assert!((s.quotient - r.quotient).abs() <= 1e-12 * r.quotient);
    }

    #[test]
    fn support_margin_enforced() {
        let dom: Domain = HalfSpace::new(vec![0.0, 0.0, 1.0], 0.0).unwrap().into();
        let u = make_bump(&[0.0, 0.0, 0.5], &[1.0, 1.0, 0.5], 1.0);
        let spec = WeightSpec::per_component(2.0).unwrap();
        assert!(matches!(
            evaluate_quotient(&u, &dom, &spec, &QuadratureSpec::gauss(8)),
            Err(HardyError::SupportMargin { facet: 0, .. })
        ));
    }

    #[test]
    fn translation_reduction_identity_case() {
        let h = HalfSpace::new(vec![0.0, 0.0, 1.0], 0.0).unwrap();
        let u = make_bump(&[0.2, 0.1, 1.0], &[0.8, 0.8, 0.5], 1.0);
        let r = verify_translation_reduction(&h, &u, &QuadratureSpec::gauss(16)).unwrap();
        assert_eq!(r.residual, 0.0);
    }

    #[test]
    fn cube_audit_has_no_negative_samples() {
        let cube = Polytope::unit_cube(1);
        let a = polytope_interface_audit(&cube, 3.0, 100, 1).unwrap();
        assert_eq!(a.interfaces.len(), 12);
        assert_eq!(a.negative_samples, 0);
        assert!(a.interfaces.iter().all(|i| i.max_consistency_error < 1e-12));
        let right = a.interfaces.iter().find(|i| i.k == 0 && i.l == 1).unwrap();
        assert_relative_eq!(right.normal_gap, 2f64.sqrt(), epsilon = 1e-15);
    }
}
