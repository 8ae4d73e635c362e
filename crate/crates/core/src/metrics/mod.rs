//! Distances on ℍⁿ: the Kaplan gauge and distance, horizontal paths, and a
//! direct-transcription estimator of the Carnot–Carathéodory distance.
//!
//! [`cc_distance`] returns the length of an admissible horizontal path, so
//! every reported distance is an upper bound on the true one.

mod solver;

use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::heis::{compose_unchecked, AxisBox, HeisError, HorizontalVector, Point};
use crate::linalg::{dot, min_norm_solve, norm, rank};
use crate::parallel::map_indexed;
use solver::Problem;

/// Kaplan gauge `ρ(ξ) = ((|x|² + |y|²)² + 4t²)^{1/4}`.
pub fn kaplan_gauge(p: &Point) -> f64 {
    let r2: f64 = p.horizontal().iter().map(|v| v * v).sum();
    let t = p.t();
    (r2 * r2 + 4.0 * t * t).sqrt().sqrt()
}

/// Kaplan distance `δ_K(p, q) = ρ(q⁻¹ ∘ p)`.
pub fn kaplan_distance(p: &Point, q: &Point) -> Result<f64, HeisError> {
    let d = crate::heis::group_compose(&q.inverse(), p)?;
    Ok(kaplan_gauge(&d))
}

/// Horizontal path with piecewise-constant controls on `M` equal segments
/// of `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct HorizontalPath {
    pub start: Point,
    pub controls: Vec<HorizontalVector>,
}

impl HorizontalPath {
    pub fn new(start: Point, controls: Vec<HorizontalVector>) -> Self {
        assert!(!controls.is_empty(), "a path needs at least one segment");
        assert!(controls.iter().all(|c| c.dim() == start.dim()));
        HorizontalPath { start, controls }
    }

    pub fn segments(&self) -> usize {
        self.controls.len()
    }

    fn from_flat(start: Point, u: &[f64]) -> Self {
        let n = start.dim();
        let controls = u
            .chunks(2 * n)
            .map(|c| HorizontalVector {
                a: c[..n].to_vec(),
                b: c[n..].to_vec(),
            })
            .collect();
        HorizontalPath { start, controls }
    }

    /// States at the segment boundaries `τ = 0, 1/M, …, 1`.
    pub fn vertices(&self) -> Vec<Point> {
        let n = self.start.dim();
        let h = 1.0 / self.segments() as f64;
        let mut state = self.start.coords().to_vec();
        let mut out = Vec::with_capacity(self.segments() + 1);
        out.push(self.start.clone());
        for c in &self.controls {
            let mut dt = 0.0;
            for i in 0..n {
                dt += c.a[i] * state[n + i] - c.b[i] * state[i];
            }
            state[2 * n] += 2.0 * h * dt;
            for i in 0..n {
                state[i] += h * c.a[i];
                state[n + i] += h * c.b[i];
            }
            out.push(Point::from_raw(state.clone()));
        }
        out
    }

    /// The path traversed backwards from its endpoint.
    pub fn reversed(&self) -> HorizontalPath {
        let end = integrate_path(self);
        let controls = self
            .controls
            .iter()
            .rev()
            .map(|c| HorizontalVector {
                a: c.a.iter().map(|v| -v).collect(),
                b: c.b.iter().map(|v| -v).collect(),
            })
            .collect();
        HorizontalPath { start: end, controls }
    }
}

/// `Σ_j |u_j| / M`, the exact length of the piecewise-constant-control path.
pub fn path_length(path: &HorizontalPath) -> f64 {
    let m = path.segments() as f64;
    path.controls.iter().map(|c| c.norm()).sum::<f64>() / m
}

/// Endpoint of the path, integrated exactly segment by segment.
///
/// Within a segment `x`, `y` move linearly and `dt/dτ = 2⟨a, y⟩ − 2⟨b, x⟩`
/// is constant, because the quadratic contributions `⟨a, b⟩τ − ⟨b, a⟩τ`
/// cancel.
pub fn integrate_path(path: &HorizontalPath) -> Point {
    path.vertices().pop().expect("paths are non-empty")
}

/// Settings for [`cc_distance`] and [`cc_distance_to_set`].
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct SolverConfig {
    /// Initial segment count `M`.
    pub segments: usize,
    /// Allowed endpoint constraint violation.
    pub endpoint_tol: f64,
    /// Mesh doubling stops once the length changes by less than this.
    pub gap_tol: f64,
    pub multistarts: usize,
    pub seed: u64,
    /// Upper limit on `M` during refinement.
    pub max_segments: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            segments: 16,
            endpoint_tol: 1e-6,
            gap_tol: 1e-3,
            multistarts: 8,
            seed: 0,
            max_segments: 512,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<(), &'static str> {
        if self.segments == 0 {
            return Err("segments must be at least 1");
        }
        if !(self.endpoint_tol > 0.0) {
            return Err("endpoint_tol must be positive");
        }
        if !(self.gap_tol > 0.0) {
            return Err("gap_tol must be positive");
        }
        if self.multistarts == 0 {
            return Err("multistarts must be at least 1");
        }
        if self.max_segments < self.segments {
            return Err("max_segments must be at least segments");
        }
        Ok(())
    }
}

/// Outcome of a distance solve.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CCResult {
    /// Length of `path`; infinite when the target set is empty.
    pub distance: f64,
    pub path: HorizontalPath,
    pub converged: bool,
    /// Length decrease under the last mesh doubling.
    pub refinement_gap: f64,
    /// Euclidean norm of the endpoint constraint violation.
    pub endpoint_residual: f64,
}

/// Affine subset `{ξ : C ξ = e}` of ℝ^{2n+1}, rows normalised to unit length.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineSet {
    dim: usize,
    rows: Vec<Vec<f64>>,
    rhs: Vec<f64>,
}

impl AffineSet {
    /// `{ξ : C ξ = e}`. Zero rows are dropped when `e` is zero there and make
    /// the set empty otherwise.
    pub fn new(dim: usize, rows: Vec<Vec<f64>>, rhs: Vec<f64>) -> Self {
        assert_eq!(rows.len(), rhs.len());
        let mut out = AffineSet {
            dim,
            rows: Vec::new(),
            rhs: Vec::new(),
        };
        for (r, e) in rows.into_iter().zip(rhs) {
            assert_eq!(r.len(), dim);
            let nr = norm(&r);
            if nr == 0.0 {
                out.rows.push(r);
                out.rhs.push(e);
            } else {
                out.rows.push(r.iter().map(|v| v / nr).collect());
                out.rhs.push(e / nr);
            }
        }
        out
    }

    /// The single point `q`.
    pub fn point(q: &Point) -> Self {
        let d = q.coords().len();
        let rows = (0..d)
            .map(|k| {
                let mut r = vec![0.0; d];
                r[k] = 1.0;
                r
            })
            .collect();
        AffineSet::new(d, rows, q.coords().to_vec())
    }

    /// The hyperplane `⟨ξ, ν⟩ = d`.
    pub fn hyperplane(normal: &[f64], offset: f64) -> Self {
        AffineSet::new(normal.len(), vec![normal.to_vec()], vec![offset])
    }

    /// The vertical line `{(x₀, y₀, t) : t ∈ ℝ}`.
    pub fn vertical_line(horizontal: &[f64]) -> Self {
        let d = horizontal.len() + 1;
        let rows = (0..d - 1)
            .map(|k| {
                let mut r = vec![0.0; d];
                r[k] = 1.0;
                r
            })
            .collect();
        AffineSet::new(d, rows, horizontal.to_vec())
    }

    /// The horizontal plane `p + span{X_i(p), Y_i(p)}`.
    pub fn horizontal_plane(p: &Point) -> Self {
        let n = p.dim();
        let mut row = vec![0.0; 2 * n + 1];
        for i in 0..n {
            row[i] = -2.0 * p.y()[i];
            row[n + i] = 2.0 * p.x()[i];
        }
        row[2 * n] = 1.0;
        let rhs = dot(&row, p.coords());
        AffineSet::new(2 * n + 1, vec![row], vec![rhs])
    }

    /// Reduced boundary set `{⟨ξ, ν⟩ = d} ∩ (p + span{X_i(p), Y_i(p)})`.
    pub fn reduced_boundary(p: &Point, normal: &[f64], offset: f64) -> Self {
        AffineSet::hyperplane(normal, offset).intersect(&AffineSet::horizontal_plane(p))
    }

    pub fn intersect(&self, other: &AffineSet) -> AffineSet {
        assert_eq!(self.dim, other.dim);
        let mut rows = self.rows.clone();
        rows.extend(other.rows.iter().cloned());
        let mut rhs = self.rhs.clone();
        rhs.extend(other.rhs.iter().copied());
        AffineSet::new(self.dim, rows, rhs)
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn rhs(&self) -> &[f64] {
        &self.rhs
    }

    /// True when the defining equations are inconsistent.
    pub fn is_empty(&self) -> bool {
        if self.rows.is_empty() {
            return false;
        }
        let tol = 1e-12;
        let plain: Vec<&[f64]> = self.rows.iter().map(|r| r.as_slice()).collect();
        let augmented: Vec<Vec<f64>> = self
            .rows
            .iter()
            .zip(&self.rhs)
            .map(|(r, e)| {
                let mut a = r.clone();
                a.push(*e);
                a
            })
            .collect();
        let aug: Vec<&[f64]> = augmented.iter().map(|r| r.as_slice()).collect();
        rank(&plain, tol) < rank(&aug, tol)
    }

    /// Norm of the residual `C ξ − e`.
    pub fn residual(&self, p: &[f64]) -> f64 {
        self.rows
            .iter()
            .zip(&self.rhs)
            .map(|(r, e)| {
                let v = dot(r, p) - e;
                v * v
            })
            .sum::<f64>()
            .sqrt()
    }

    /// Drops linearly dependent rows (the set must be non-empty).
    fn independent(&self) -> AffineSet {
        let mut out = AffineSet {
            dim: self.dim,
            rows: Vec::new(),
            rhs: Vec::new(),
        };
        for (r, e) in self.rows.iter().zip(&self.rhs) {
            let mut trial: Vec<&[f64]> = out.rows.iter().map(|v| v.as_slice()).collect();
            trial.push(r);
            if rank(&trial, 1e-10) == trial.len() {
                out.rows.push(r.clone());
                out.rhs.push(*e);
            }
        }
        out
    }
}

/// Estimates `δ_cc(p, q)` by minimizing over horizontal paths from `p` to `q`.
pub fn cc_distance(p: &Point, q: &Point, cfg: &SolverConfig) -> Result<CCResult, HeisError> {
    if p.dim() != q.dim() {
        return Err(HeisError::DimensionMismatch {
            left: p.dim(),
            right: q.dim(),
        });
    }
    Ok(solve_to_set(p, &AffineSet::point(q), Some(q), cfg))
}

/// Estimates `inf { δ_cc(p, ξ) : ξ ∈ S }` for an affine set `S`, jointly over
/// controls and the target point.
pub fn cc_distance_to_set(p: &Point, set: &AffineSet, cfg: &SolverConfig) -> CCResult {
    assert_eq!(set.dim, p.coords().len(), "set must live in the same ℍⁿ");
    if set.is_empty() {
        let n = p.dim();
        return CCResult {
            distance: f64::INFINITY,
            path: HorizontalPath::new(p.clone(), vec![HorizontalVector::zeros(n)]),
            converged: true,
            refinement_gap: 0.0,
            endpoint_residual: f64::INFINITY,
        };
    }
    solve_to_set(p, set, None, cfg)
}

/// Reduced distance from `p` to the plane `⟨ξ, ν⟩ = d`, through boundary
/// points in the horizontal plane at `p`.
pub fn reduced_distance(p: &Point, normal: &[f64], offset: f64, cfg: &SolverConfig) -> CCResult {
    cc_distance_to_set(p, &AffineSet::reduced_boundary(p, normal, offset), cfg)
}

struct Candidate {
    controls: Vec<f64>,
    length: f64,
    residual: f64,
}

fn length_of(u: &[f64], n: usize) -> f64 {
    let m = u.len() / (2 * n);
    u.chunks(2 * n).map(norm).sum::<f64>() / m as f64
}

/// Straight control towards a guess for the nearest target point.
fn straight_control(p: &Point, set: &AffineSet, target: Option<&Point>) -> Vec<f64> {
    let n = p.dim();
    if let Some(q) = target {
        return q.horizontal().iter().zip(p.horizontal()).map(|(a, b)| a - b).collect();
    }
    let m = set.rows.len();
    let r: Vec<f64> = set
        .rows
        .iter()
        .zip(&set.rhs)
        .map(|(row, e)| e - dot(row, p.coords()))
        .collect();
    // Points reachable by a straight control v stay in the horizontal plane:
    // ξ = p + (v, 2(⟨v_x, p_y⟩ − ⟨v_y, p_x⟩)).
    let mut ch = vec![0.0; m * 2 * n];
    for (a, row) in set.rows.iter().enumerate() {
        for i in 0..n {
            ch[a * 2 * n + i] = row[i] + 2.0 * p.y()[i] * row[2 * n];
            ch[a * 2 * n + n + i] = row[n + i] - 2.0 * p.x()[i] * row[2 * n];
        }
    }
    if let Some(v) = min_norm_solve(&ch, m, 2 * n, &r) {
        let ok = (0..m).all(|a| (dot(&ch[a * 2 * n..(a + 1) * 2 * n], &v) - r[a]).abs() < 1e-9);
        if ok {
            return v;
        }
    }
    let d = 2 * n + 1;
    let flat: Vec<f64> = set.rows.iter().flatten().copied().collect();
    match min_norm_solve(&flat, m, d, &r) {
        Some(delta) => delta[..2 * n].to_vec(),
        None => vec![0.0; 2 * n],
    }
}

fn initial_guesses(p: &Point, set: &AffineSet, target: Option<&Point>, cfg: &SolverConfig) -> Vec<Vec<f64>> {
    let n = p.dim();
    let m = cfg.segments;
    let straight = straight_control(p, set, target);
    let base: Vec<f64> = (0..m).flat_map(|_| straight.iter().copied()).collect();
    let probe = Problem {
        n,
        segments: m,
        start: p.coords().to_vec(),
        rows: set.rows.clone(),
        rhs: set.rhs.clone(),
    };
    let (c, _) = probe.constraints(&base, false);
    let miss = norm(&c);
    (0..cfg.multistarts)
        .map(|s| {
            let mut u = base.clone();
            if s == 0 && norm(&straight) > 1e-12 {
                return u;
            }
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            rng.set_stream(s as u64);
            let i = rng.gen_range(0..n);
            let freq = rng.gen_range(1..=2) as f64;
            let phase = rng.gen_range(0.0..core::f64::consts::TAU);
            let sign = if rng.gen::<bool>() { 1.0 } else { -1.0 };
            let amp = (core::f64::consts::PI * miss).sqrt() * rng.gen_range(0.5..1.5)
                + 0.1 * rng.gen::<f64>();
            for j in 0..m {
                let tau = (j as f64 + 0.5) / m as f64;
                let ang = core::f64::consts::TAU * freq * tau + phase;
                u[j * 2 * n + i] += amp * ang.cos();
                u[j * 2 * n + n + i] += sign * amp * ang.sin();
            }
            u
        })
        .collect()
}

/// Scale `s` such that the target lies at gauge distance about 1 in the
/// chart `ζ = δ_s(p⁻¹ ∘ ξ)`.
fn normalizing_scale(p: &Point, set: &AffineSet) -> f64 {
    let d = p.coords().len();
    let m = set.rows.len();
    let r: Vec<f64> = set
        .rows
        .iter()
        .zip(&set.rhs)
        .map(|(row, e)| e - dot(row, p.coords()))
        .collect();
    let flat: Vec<f64> = set.rows.iter().flatten().copied().collect();
    let Some(delta) = min_norm_solve(&flat, m, d, &r) else {
        return 1.0;
    };
    let nearest: Vec<f64> = p.coords().iter().zip(&delta).map(|(a, b)| a + b).collect();
    let rho = kaplan_gauge(&compose_unchecked(p.inverse().coords(), &nearest));
    if rho > 0.0 && rho.is_finite() {
        1.0 / rho
    } else {
        1.0
    }
}

/// The set `S` written in the chart `ζ = δ_s(p⁻¹ ∘ ξ)`, i.e. `ξ = p ∘ δ_{1/s} ζ`.
fn chart_set(p: &Point, s: f64, set: &AffineSet) -> AffineSet {
    let n = p.dim();
    let d = 2 * n + 1;
    let mut lt = vec![0.0; 2 * n];
    for i in 0..n {
        lt[i] = 2.0 * p.y()[i];
        lt[n + i] = -2.0 * p.x()[i];
    }
    let rows = set
        .rows
        .iter()
        .map(|row| {
            let mut out = vec![0.0; d];
            for j in 0..2 * n {
                out[j] = (row[j] + row[2 * n] * lt[j]) / s;
            }
            out[2 * n] = row[2 * n] / (s * s);
            out
        })
        .collect();
    let rhs = set
        .rows
        .iter()
        .zip(&set.rhs)
        .map(|(row, e)| e - dot(row, p.coords()))
        .collect();
    AffineSet::new(d, rows, rhs)
}

fn solve_to_set(p: &Point, set: &AffineSet, target: Option<&Point>, cfg: &SolverConfig) -> CCResult {
    let n = p.dim();
    let set = set.independent();
    let zero_res = set.residual(p.coords());
    let finish = |u: Vec<f64>, residual: f64, converged: bool, gap: f64| {
        let path = HorizontalPath::from_flat(p.clone(), &u);
        CCResult {
            distance: path_length(&path),
            path,
            converged,
            refinement_gap: gap,
            endpoint_residual: residual,
        }
    };
    if zero_res <= cfg.endpoint_tol {
        return finish(vec![0.0; 2 * n], zero_res, true, 0.0);
    }
    // Solve from the origin of a translated and dilated chart; left
    // translation keeps controls and δ_s scales them by s.
    let s = normalizing_scale(p, &set);
    let chart = chart_set(p, s, &set);
    let chart_target = target.map(|q| {
        let rel = compose_unchecked(p.inverse().coords(), q.coords());
        crate::heis::dilate(s, &rel).expect("scale is positive")
    });
    let origin = Point::identity(n);
    let problem = |segments: usize| Problem {
        n,
        segments,
        start: origin.coords().to_vec(),
        rows: chart.rows.clone(),
        rhs: chart.rhs.clone(),
    };
    let inner_tol = cfg.endpoint_tol * s.min(s * s).min(1.0);
    let original = |u: Vec<f64>| -> Candidate {
        let controls: Vec<f64> = u.iter().map(|v| v / s).collect();
        let end = Problem {
            n,
            segments: controls.len() / (2 * n),
            start: p.coords().to_vec(),
            rows: Vec::new(),
            rhs: Vec::new(),
        }
        .endpoint_jacobian(&controls, false)
        .0;
        Candidate {
            length: length_of(&controls, n),
            residual: set.residual(&end),
            controls,
        }
    };
    let guesses = initial_guesses(&origin, &chart, chart_target.as_ref(), cfg);
    let base = problem(cfg.segments);
    let runs = map_indexed(guesses.len(), |k| original(base.solve(&guesses[k], inner_tol)));
    let feasible = |c: &Candidate| c.residual <= cfg.endpoint_tol && c.length.is_finite();
    let mut best = select_best(runs, cfg.endpoint_tol);
    if !feasible(&best) {
        return finish(best.controls, best.residual, false, f64::INFINITY);
    }
    let mut segments = cfg.segments;
    let mut gap = f64::INFINITY;
    let mut converged = false;
    while 2 * segments <= cfg.max_segments {
        let doubled: Vec<f64> = best
            .controls
            .chunks(2 * n)
            .flat_map(|c| c.iter().chain(c.iter()).map(|v| v * s))
            .collect();
        let cand = original(problem(2 * segments).solve(&doubled, inner_tol));
        if !feasible(&cand) {
            break;
        }
        gap = best.length - cand.length;
        if cand.length <= best.length + 1e-9 {
            best = cand;
            segments *= 2;
        }
        if gap.abs() < cfg.gap_tol {
            converged = true;
            break;
        }
        if gap < 0.0 {
            break;
        }
    }
    finish(best.controls, best.residual, converged, gap)
}

fn select_best(runs: Vec<Candidate>, tol: f64) -> Candidate {
    let mut best: Option<Candidate> = None;
    for c in runs {
        let better = match &best {
            None => true,
            Some(b) => {
                let (cf, bf) = (c.residual <= tol, b.residual <= tol);
                match (cf, bf) {
                    (true, false) => true,
                    (false, true) => false,
                    (true, true) => c.length < b.length,
                    (false, false) => c.residual < b.residual,
                }
            }
        };
        if better {
            best = Some(c);
        }
    }
    best.expect("at least one start")
}

/// Extremes of `δ_cc / δ_K` over random pairs.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BilipschitzReport {
    pub min_ratio: f64,
    pub max_ratio: f64,
    /// Pairs contributing to the extremes.
    pub used: usize,
    /// Pairs whose solve did not converge.
    pub non_converged: usize,
    /// Coincident pairs, skipped as `0/0`.
    pub degenerate: usize,
}

/// Samples `samples` pairs uniformly in `region` and records the range of
/// `δ_cc / δ_K`.
pub fn bilipschitz_scan(samples: usize, region: &AxisBox, cfg: &SolverConfig) -> BilipschitzReport {
    assert!(samples >= 1);
    assert!(region.is_bounded() && region.dim() >= 3 && region.dim() % 2 == 1);
    let dim = region.dim();
    let ratios = map_indexed(samples, |k| {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x9e37_79b9_7f4a_7c15);
        rng.set_stream(k as u64);
        let mut draw = || -> Point {
            Point::from_raw(
                (0..dim)
                    .map(|j| rng.gen_range(region.lo[j]..=region.hi[j]))
                    .collect(),
            )
        };
        let (p, q) = (draw(), draw());
        pair_ratio(&p, &q, cfg)
    });
    let mut report = BilipschitzReport {
        min_ratio: f64::INFINITY,
        max_ratio: 0.0,
        used: 0,
        non_converged: 0,
        degenerate: 0,
    };
    for r in ratios {
        match r {
            PairRatio::Degenerate => report.degenerate += 1,
            PairRatio::NonConverged => report.non_converged += 1,
            PairRatio::Ratio(v) => {
                report.used += 1;
                report.min_ratio = report.min_ratio.min(v);
                report.max_ratio = report.max_ratio.max(v);
            }
        }
    }
    report
}

enum PairRatio {
    Degenerate,
    NonConverged,
    Ratio(f64),
}

fn pair_ratio(p: &Point, q: &Point, cfg: &SolverConfig) -> PairRatio {
    let dk = kaplan_gauge(&compose_unchecked(q.inverse().coords(), p.coords()));
    if dk == 0.0 {
        return PairRatio::Degenerate;
    }
    match cc_distance(p, q, cfg) {
        Ok(r) if r.converged => PairRatio::Ratio(r.distance / dk),
        _ => PairRatio::NonConverged,
    }
}
