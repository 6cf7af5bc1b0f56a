//! Conformal reference frames: skies projected along null geodesics onto a
//! 3-manifold `M`, with regularity ranks and the fiberwise normal projection.
//!
//! The sky bundle is trivialized by the coordinate-aligned orthonormal
//! tetrad, so a sky parameter `ξ` names the same tetrad direction at every
//! event. Derivatives "along the family" hold `ξ` fixed in that
//! trivialization.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::metric::{MetricError, MetricKind, MetricSpec, NullGeodesicState};
use crate::minkowski::xi_record;
use crate::scalar::{c, cross3, dot3, norm3, scale3, sub3, Real};
use crate::sky::{celestial_transform, SizeField, SkySample};
use crate::spinor::{CoSpinor, FourVector};

/// Sky-parameter step of the Jacobian.
pub const JACOBIAN_STEP: f64 = 1e-5;
/// Singular values below this (times the frame scale) count as zero.
pub const RANK_THRESHOLD: f64 = 1e-7;
/// Event step of the family derivative (times the frame scale).
pub const EVENT_STEP: f64 = 1e-4;
/// Accuracy of the target-surface crossing in chart time.
pub const EPS_TARGET: f64 = 1e-12;
/// Default affine step of the numerical tracer.
pub const DEFAULT_STEP: f64 = 1e-3;

const MAX_STEPS: usize = 50_000_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FrameError {
    #[error("null geodesic leaves the domain without meeting the target")]
    NoIntersection,
    #[error("integrator failure: {0}")]
    IntegratorFailure(MetricError),
    #[error("image tangent plane is degenerate (rank {0})")]
    DegenerateTangentPlane(u8),
    #[error("event lies before the target surface")]
    EventBeforeTarget,
    #[error("unsupported frame: {0}")]
    Unsupported(String),
    #[error("every sample failed: {0}")]
    AllSamplesFailed(Box<FrameError>),
}

impl FrameError {
    pub fn name(&self) -> &'static str {
        match self {
            Self::NoIntersection => "NoIntersection",
            Self::IntegratorFailure(_) => "IntegratorFailure",
            Self::DegenerateTangentPlane(_) => "DegenerateTangentPlane",
            Self::EventBeforeTarget => "EventBeforeTarget",
            Self::Unsupported(_) => "Unsupported",
            Self::AllSamplesFailed(_) => "AllSamplesFailed",
        }
    }
}

fn integrator(e: MetricError) -> FrameError {
    match e {
        MetricError::OutOfDomain(_) | MetricError::DivergentIntegral => FrameError::NoIntersection,
        other => FrameError::IntegratorFailure(other),
    }
}

/// Target 3-manifold of a geodesic frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Target<T = f64> {
    /// The Cauchy surface `t = t0`.
    Cauchy(T),
    /// The big-bang boundary `η = 0` of a flat FLRW metric.
    Singularity,
}

impl<T: Real> Target<T> {
    pub fn label(&self) -> String {
        match self {
            Self::Cauchy(t0) => format!("cauchy:{t0}"),
            Self::Singularity => "singularity".into(),
        }
    }
}

/// How null geodesics are traced to the target.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Tracer<T = f64> {
    /// Straight lines in the conformal chart (Minkowski and flat FLRW only).
    ClosedForm,
    /// RK4 in the affine parameter with a fixed step.
    Numerical { step: T },
}

#[derive(Debug, Clone, PartialEq)]
pub struct FrameSpec<T = f64> {
    pub metric: MetricSpec<T>,
    pub target: Target<T>,
    pub tracer: Tracer<T>,
}

/// `j(x, ξ)` in chart coordinates of `M`, with the arrival affine parameter
/// (`v⁰ = 1` at `x`) when the frame traces geodesics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChartPoint<T = f64> {
    pub coords: [T; 3],
    pub lambda: Option<T>,
}

/// A conformal reference frame `(Ω, M, j)` given through a chart of `M`.
pub trait ConformalFrame<T: Real>: Sync {
    fn metric(&self) -> &MetricSpec<T>;

    /// `j(x, ξ)`. Frames without a global chart of `M` use the chart
    /// centred on the sky point `anchor`.
    fn chart_point(&self, x: &FourVector<T>, xi: &CoSpinor<T>, anchor: &CoSpinor<T>)
        -> Result<ChartPoint<T>, FrameError>;

    /// Fixed transversal used to read off normal coefficients, given the
    /// image-plane normal `n`.
    fn transversal(&self, n: &[T; 3]) -> [T; 3];

    fn target_label(&self) -> String;

    fn scale(&self, x: &FourVector<T>) -> T {
        x.scale().max(T::one())
    }

    /// Closed-form `(centre, radius)` of the region bounded by the sky image
    /// of `x`, when the frame has one.
    fn analytic_region(&self, _x: &FourVector<T>) -> Option<Result<([T; 3], T), FrameError>> {
        None
    }

    /// The size field whose graph is the sky image of `x`, for graph frames.
    fn graph_field(&self, _x: &FourVector<T>) -> Option<SizeField<T>> {
        None
    }
}

/// Geodesic projection onto a Cauchy surface or the FLRW singularity.
#[derive(Debug, Clone, PartialEq)]
pub struct GeodesicFrame<T = f64> {
    spec: FrameSpec<T>,
}

impl<T: Real> GeodesicFrame<T> {
    pub fn new(spec: FrameSpec<T>) -> Result<Self, FrameError> {
        let custom = matches!(spec.metric.kind(), MetricKind::CustomDiagonal(_));
        if let Tracer::Numerical { step } = spec.tracer {
            if !(step > T::zero()) || !step.is_finite() {
                return Err(FrameError::IntegratorFailure(MetricError::InvalidStep));
            }
        }
        if custom && spec.tracer == Tracer::ClosedForm {
            return Err(FrameError::Unsupported("closed-form tracing needs Minkowski or flat FLRW".into()));
        }
        let d = spec.metric.domain();
        match spec.target {
            Target::Cauchy(t0) => {
                if !(t0 >= d.t_min && t0 <= d.t_max) {
                    return Err(FrameError::Unsupported(format!("Cauchy surface t = {t0} outside the domain")));
                }
            }
            Target::Singularity => {
                if !matches!(spec.metric.kind(), MetricKind::FlrwFlat(_)) {
                    return Err(FrameError::Unsupported("singularity target needs a flat FLRW metric".into()));
                }
                spec.metric.conformal_time(d.t_min).map_err(integrator)?;
            }
        }
        Ok(Self { spec })
    }

    /// Minkowski space projected onto `t = t0` with the closed-form tracer.
    pub fn minkowski_cauchy(t0: T) -> Self {
        Self::new(FrameSpec { metric: MetricSpec::minkowski(), target: Target::Cauchy(t0), tracer: Tracer::ClosedForm })
            .expect("Minkowski Cauchy frame is valid")
    }

    pub fn spec(&self) -> &FrameSpec<T> {
        &self.spec
    }

    fn t_stop(&self) -> T {
        match self.spec.target {
            Target::Cauchy(t0) => t0,
            Target::Singularity => self.spec.metric.domain().t_min,
        }
    }

    fn trace_numerical(&self, x: &FourVector<T>, xi: &CoSpinor<T>, step: T) -> Result<ChartPoint<T>, FrameError> {
        let m = &self.spec.metric;
        let t_stop = self.t_stop();
        let tol_t = T::tol(EPS_TARGET) * t_stop.abs().max(T::one());
        let v = m.null_direction(x, xi).map_err(integrator)?;
        let mut cur = NullGeodesicState { x: *x, v, lambda: T::zero() };
        let mut steps = 0usize;
        while cur.x.t() - t_stop > tol_t {
            match m.rk4_step(&cur, -step) {
                Ok(next) if next.x.t() >= t_stop => cur = next,
                Ok(_) | Err(MetricError::OutOfDomain(_)) => {
                    cur = self.bisect_crossing(&cur, step, t_stop, tol_t)?;
                    break;
                }
                Err(e) => return Err(FrameError::IntegratorFailure(e)),
            }
            steps += 1;
            if steps > MAX_STEPS {
                return Err(FrameError::NoIntersection);
            }
        }
        let s = cur.x.spatial();
        match self.spec.target {
            Target::Cauchy(_) => Ok(ChartPoint { coords: s, lambda: Some(cur.lambda) }),
            Target::Singularity => {
                // finish the last stretch to η = 0 in the conformal chart
                let sf = m.scale_factor().expect("validated FLRW");
                let t = cur.x.t();
                let eta = m.conformal_time(t).map_err(integrator)?;
                let back = [-cur.v.0[1], -cur.v.0[2], -cur.v.0[3]];
                let len = norm3(&back);
                let coords = std::array::from_fn(|k| s[k] + eta * back[k] / len);
                let energy = sf.value(t) * cur.v.t();
                let rest = m.affine_interval(T::zero(), t).map_err(integrator)? / energy;
                Ok(ChartPoint { coords, lambda: Some(cur.lambda - rest) })
            }
        }
    }

    /// Partial step from `cur` landing on `t = t_stop`.
    fn bisect_crossing(
        &self,
        cur: &NullGeodesicState<T>,
        step: T,
        t_stop: T,
        tol_t: T,
    ) -> Result<NullGeodesicState<T>, FrameError> {
        let m = &self.spec.metric;
        let (mut lo, mut hi) = (T::zero(), step);
        let mut best = *cur;
        for _ in 0..200 {
            let mid = T::lit(0.5) * (lo + hi);
            match m.rk4_step(cur, -mid) {
                Ok(s) if s.x.t() >= t_stop => {
                    lo = mid;
                    best = s;
                }
                Ok(_) | Err(MetricError::OutOfDomain(_)) => hi = mid,
                Err(e) => return Err(FrameError::IntegratorFailure(e)),
            }
            if best.x.t() - t_stop <= tol_t || hi - lo <= T::epsilon() * step {
                break;
            }
        }
        if best.x.t() - t_stop > tol_t * T::lit(1e3) {
            // the ray left the spatial domain before reaching the target
            return Err(FrameError::NoIntersection);
        }
        Ok(best)
    }
}

impl<T: Real> ConformalFrame<T> for GeodesicFrame<T> {
    fn metric(&self) -> &MetricSpec<T> {
        &self.spec.metric
    }

    fn chart_point(&self, x: &FourVector<T>, xi: &CoSpinor<T>, _anchor: &CoSpinor<T>) -> Result<ChartPoint<T>, FrameError> {
        let m = &self.spec.metric;
        if !m.domain().contains(x) {
            return Err(FrameError::IntegratorFailure(MetricError::OutOfDomain(x.to_f64())));
        }
        let t_stop = self.t_stop();
        if x.t() < t_stop {
            return Err(FrameError::EventBeforeTarget);
        }
        match self.spec.tracer {
            Tracer::ClosedForm => {
                let t_target = match self.spec.target {
                    Target::Cauchy(t0) => t0,
                    Target::Singularity => T::zero(),
                };
                let (coords, lambda) = m.trace_closed_form(x, xi, t_target).map_err(integrator)?;
                Ok(ChartPoint { coords, lambda: Some(lambda) })
            }
            Tracer::Numerical { step } => self.trace_numerical(x, xi, step),
        }
    }

    fn transversal(&self, n: &[T; 3]) -> [T; 3] {
        scale3(n, T::one() / norm3(n))
    }

    fn target_label(&self) -> String {
        self.spec.target.label()
    }

    fn analytic_region(&self, x: &FourVector<T>) -> Option<Result<([T; 3], T), FrameError>> {
        let m = &self.spec.metric;
        if matches!(m.kind(), MetricKind::CustomDiagonal(_)) {
            return None;
        }
        if x.t() < self.t_stop() {
            return Some(Err(FrameError::EventBeforeTarget));
        }
        let radius = match self.spec.target {
            Target::Cauchy(t0) => m.conformal_interval(t0, x.t()),
            Target::Singularity => m.conformal_time(x.t()),
        };
        Some(radius.map(|r| (x.spatial(), r)).map_err(integrator))
    }
}

/// The Minkowski graph frame: `M` is the bundle of sizes, charted near a
/// sky point `anchor` by two tangent coordinates of the Hopf direction and
/// the height `s(x)(ξ)` at the unit representative.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphFrame<T = f64> {
    metric: MetricSpec<T>,
}

impl<T: Real> Default for GraphFrame<T> {
    fn default() -> Self {
        Self { metric: MetricSpec::minkowski() }
    }
}

impl<T: Real> GraphFrame<T> {
    pub fn new() -> Self {
        Self::default()
    }
}

/// Orthonormal basis of the tangent plane of S² at `n`.
pub(crate) fn tangent_basis<T: Real>(n: &[T; 3]) -> ([T; 3], [T; 3]) {
    let reference = if n[2].abs() < T::lit(0.9) { [T::zero(), T::zero(), T::one()] } else { [T::one(), T::zero(), T::zero()] };
    let e1 = cross3(&reference, n);
    let e1 = scale3(&e1, T::one() / norm3(&e1));
    let e2 = cross3(n, &e1);
    (e1, e2)
}

impl<T: Real> ConformalFrame<T> for GraphFrame<T> {
    fn metric(&self) -> &MetricSpec<T> {
        &self.metric
    }

    fn chart_point(&self, x: &FourVector<T>, xi: &CoSpinor<T>, anchor: &CoSpinor<T>) -> Result<ChartPoint<T>, FrameError> {
        let n = xi.direction();
        let (e1, e2) = tangent_basis(&anchor.direction());
        let height = celestial_transform(x).eval(&xi.normalized()).expect("polynomial field");
        Ok(ChartPoint { coords: [dot3(&n, &e1), dot3(&n, &e2), height], lambda: None })
    }

    fn transversal(&self, _n: &[T; 3]) -> [T; 3] {
        [T::zero(), T::zero(), T::one()]
    }

    fn target_label(&self) -> String {
        "graph".into()
    }

    fn graph_field(&self, x: &FourVector<T>) -> Option<SizeField<T>> {
        Some(celestial_transform(x))
    }
}

/// Contact value `θ = s(δx)(ξ)` of a horizontal tangent `δx` (coordinate
/// components) at the unit representative of `ξ`.
pub fn theta<T: Real>(m: &MetricSpec<T>, x: &FourVector<T>, xi: &CoSpinor<T>, dx: &FourVector<T>) -> Result<T, FrameError> {
    let e = m.to_tetrad(x, dx).map_err(integrator)?;
    Ok(celestial_transform(&e).eval(&xi.normalized()).expect("polynomial field"))
}

/// Sky point moved by `ε·w·companion(ξ)`, renormalized.
pub(crate) fn sky_shift<T: Real>(xi: &CoSpinor<T>, w: crate::scalar::C<T>, eps: T) -> CoSpinor<T> {
    let u = xi.normalized();
    let comp = u.companion();
    CoSpinor([u.0[0] + comp.0[0] * w * eps, u.0[1] + comp.0[1] * w * eps]).normalized()
}

/// Columns `∂j/∂(Re w)` and `∂j/∂(Im w)` of the sky Jacobian at `(x, ξ)`.
pub fn jacobian<T: Real, F: ConformalFrame<T> + ?Sized>(
    f: &F,
    x: &FourVector<T>,
    xi: &CoSpinor<T>,
) -> Result<[[T; 3]; 2], FrameError> {
    let eps = T::lit(JACOBIAN_STEP);
    let mut cols = [[T::zero(); 3]; 2];
    for (k, w) in [c(T::one(), T::zero()), c(T::zero(), T::one())].into_iter().enumerate() {
        let p = f.chart_point(x, &sky_shift(xi, w, eps), xi)?.coords;
        let q = f.chart_point(x, &sky_shift(xi, w, -eps), xi)?.coords;
        cols[k] = scale3(&sub3(&p, &q), T::one() / (eps + eps));
    }
    Ok(cols)
}

/// Singular values of a 3×2 matrix, largest first.
pub fn singular_values<T: Real>(cols: &[[T; 3]; 2]) -> (T, T) {
    let a = dot3(&cols[0], &cols[0]);
    let b = dot3(&cols[0], &cols[1]);
    let d = dot3(&cols[1], &cols[1]);
    let tr = a + d;
    let disc = ((a - d) * (a - d) + T::lit(4.0) * b * b).sqrt();
    let hi = T::lit(0.5) * (tr + disc);
    // product of eigenvalues is the Gram determinant, i.e. |J1 × J2|²
    let det = dot3(&cross3(&cols[0], &cols[1]), &cross3(&cols[0], &cols[1]));
    let lo = if hi > T::zero() { det / hi } else { T::zero() };
    (hi.max(T::zero()).sqrt(), lo.max(T::zero()).sqrt())
}

pub fn numerical_rank<T: Real>(cols: &[[T; 3]; 2], scale: T) -> u8 {
    let (s1, s2) = singular_values(cols);
    let thr = T::lit(RANK_THRESHOLD) * scale;
    (s1 > thr) as u8 + (s2 > thr) as u8
}

/// Result of [`project_event`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Projection<T = f64> {
    pub m_point: [T; 3],
    pub rank: u8,
    pub lambda: Option<T>,
}

pub fn project_event<T: Real, F: ConformalFrame<T> + ?Sized>(
    f: &F,
    x: &FourVector<T>,
    xi: &CoSpinor<T>,
) -> Result<Projection<T>, FrameError> {
    let p = f.chart_point(x, xi, xi)?;
    let rank = numerical_rank(&jacobian(f, x, xi)?, f.scale(x));
    Ok(Projection { m_point: p.coords, rank, lambda: p.lambda })
}

#[derive(Debug, Clone, PartialEq)]
pub enum SampleStatus {
    Ok,
    Failed(FrameError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ImageSample<T = f64> {
    pub projection: Option<Projection<T>>,
    pub status: SampleStatus,
}

/// Projected sky of one event.
#[derive(Debug, Clone, PartialEq)]
pub struct SkyImage<T = f64> {
    pub event: FourVector<T>,
    pub target: String,
    pub sample: SkySample<T>,
    pub samples: Vec<ImageSample<T>>,
}

impl<T: Real> SkyImage<T> {
    /// Samples of rank 2 (the regular part `Ωx`).
    pub fn regular_mask(&self) -> Vec<bool> {
        self.samples.iter().map(|s| matches!(s.projection, Some(p) if p.rank == 2)).collect()
    }

    pub fn regular_fraction(&self) -> f64 {
        let mask = self.regular_mask();
        mask.iter().filter(|b| **b).count() as f64 / mask.len() as f64
    }

    pub fn success_count(&self) -> usize {
        self.samples.iter().filter(|s| s.status == SampleStatus::Ok).count()
    }

    /// `(sky point, M-point)` of every successful sample.
    pub fn points(&self) -> Vec<(CoSpinor<T>, [T; 3])> {
        self.sample
            .points()
            .iter()
            .zip(&self.samples)
            .filter_map(|(xi, s)| s.projection.map(|p| (*xi, p.m_point)))
            .collect()
    }

    pub fn to_record(&self) -> SkyImageRecord {
        SkyImageRecord {
            event: self.event.to_f64(),
            target: self.target.clone(),
            samples: self
                .sample
                .points()
                .iter()
                .zip(&self.samples)
                .map(|(xi, s)| SampleRecord {
                    xi: xi_record(xi),
                    m_point: s.projection.map(|p| p.m_point.map(Real::as_f64)),
                    rank: s.projection.map(|p| p.rank),
                    lambda: s.projection.and_then(|p| p.lambda.map(Real::as_f64)),
                    status: match &s.status {
                        SampleStatus::Ok => "ok".into(),
                        SampleStatus::Failed(e) => e.name().into(),
                    },
                })
                .collect(),
        }
    }

    /// `x,y,z` rows of the successful M-points.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("x,y,z\n");
        for (_, p) in self.points() {
            out.push_str(&format!("{},{},{}\n", p[0], p[1], p[2]));
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SkyImageRecord {
    pub event: [f64; 4],
    pub target: String,
    pub samples: Vec<SampleRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleRecord {
    pub xi: [f64; 4],
    pub m_point: Option<[f64; 3]>,
    pub rank: Option<u8>,
    pub lambda: Option<f64>,
    pub status: String,
}

/// Projects every sample; per-sample failures are recorded, and only a
/// sky with no successful sample is an error.
pub fn sky_image<T: Real, F: ConformalFrame<T> + ?Sized>(
    f: &F,
    x: &FourVector<T>,
    sample: &SkySample<T>,
) -> Result<SkyImage<T>, FrameError> {
    let samples: Vec<ImageSample<T>> = sample
        .points()
        .par_iter()
        .map(|xi| match project_event(f, x, xi) {
            Ok(p) => ImageSample { projection: Some(p), status: SampleStatus::Ok },
            Err(e) => ImageSample { projection: None, status: SampleStatus::Failed(e) },
        })
        .collect();
    if samples.iter().all(|s| s.projection.is_none()) {
        let first = match &samples[0].status {
            SampleStatus::Failed(e) => e.clone(),
            SampleStatus::Ok => unreachable!(),
        };
        return Err(FrameError::AllSamplesFailed(Box::new(first)));
    }
    Ok(SkyImage { event: *x, target: f.target_label(), sample: sample.clone(), samples })
}

/// Image plane at `(x, ξ)` together with the co-oriented transversal used
/// to read normal coefficients.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalFrame<T = f64> {
    pub normal: [T; 3],
    pub transversal: [T; 3],
}

impl<T: Real> NormalFrame<T> {
    /// `c` in `w = J α + c·t`: the class of `w` modulo the image plane.
    pub fn coefficient(&self, w: &[T; 3]) -> T {
        dot3(w, &self.normal) / dot3(&self.transversal, &self.normal)
    }
}

/// Unit future timelike vector `e0` at `x` (coordinate components).
pub fn future_unit<T: Real>(m: &MetricSpec<T>, x: &FourVector<T>) -> Result<FourVector<T>, FrameError> {
    let g = m.diag(x).map_err(integrator)?;
    Ok(FourVector::new(T::one() / g[0].sqrt(), T::zero(), T::zero(), T::zero()))
}

pub fn normal_frame<T: Real, F: ConformalFrame<T> + ?Sized>(
    f: &F,
    x: &FourVector<T>,
    xi: &CoSpinor<T>,
) -> Result<NormalFrame<T>, FrameError> {
    let cols = jacobian(f, x, xi)?;
    let rank = numerical_rank(&cols, f.scale(x));
    if rank < 2 {
        return Err(FrameError::DegenerateTangentPlane(rank));
    }
    let n = cross3(&cols[0], &cols[1]);
    let n = scale3(&n, T::one() / norm3(&n));
    let mut frame = NormalFrame { normal: n, transversal: f.transversal(&n) };
    // co-orientation: the future side is positive
    let e0 = future_unit(f.metric(), x)?;
    let h = T::lit(EVENT_STEP) * f.scale(x);
    let base = f.chart_point(x, xi, xi)?.coords;
    let (moved, sign) = match f.chart_point(&(*x + e0 * h), xi, xi) {
        Ok(p) => (p.coords, T::one()),
        Err(_) => (f.chart_point(&(*x - e0 * h), xi, xi)?.coords, -T::one()),
    };
    if frame.coefficient(&sub3(&moved, &base)) * sign < T::zero() {
        frame.transversal = scale3(&frame.transversal, -T::one());
    }
    Ok(frame)
}

/// Normal coefficient of a tangent vector `w` of `M` at `j(x, ξ)`.
pub fn normal_project<T: Real, F: ConformalFrame<T> + ?Sized>(
    f: &F,
    x: &FourVector<T>,
    xi: &CoSpinor<T>,
    w: &[T; 3],
) -> Result<T, FrameError> {
    Ok(normal_frame(f, x, xi)?.coefficient(w))
}

/// Local trivialization of the sky bundle used to hold the sky parameter
/// fixed while the event moves.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Trivialization<T = f64> {
    /// The coordinate tetrad.
    Tetrad,
    /// The tetrad rotated about `axis` by the angle `rate · y` at event `y`.
    Rotating { axis: [T; 3], rate: [T; 4] },
}

fn rotate<T: Real>(v: &[T; 3], axis: &[T; 3], angle: T) -> [T; 3] {
    let k = scale3(axis, T::one() / norm3(axis));
    let (s, cth) = angle.sin_cos();
    let kxv = cross3(&k, v);
    let kv = dot3(&k, v);
    std::array::from_fn(|i| v[i] * cth + kxv[i] * s + k[i] * kv * (T::one() - cth))
}

impl<T: Real> Trivialization<T> {
    /// Sky point at `y` carrying the same parameter as `xi` at `x`.
    pub fn transport(&self, xi: &CoSpinor<T>, x: &FourVector<T>, y: &FourVector<T>) -> CoSpinor<T> {
        match self {
            Self::Tetrad => *xi,
            Self::Rotating { axis, rate } => {
                let d = *y - *x;
                let angle = (0..4).fold(T::zero(), |a, k| a + rate[k] * d.0[k]);
                CoSpinor::from_direction(&rotate(&xi.direction(), axis, angle))
            }
        }
    }
}

/// Central difference of `j` along `dir` (coordinate components) at fixed
/// sky parameter.
pub fn image_velocity<T: Real, F: ConformalFrame<T> + ?Sized>(
    f: &F,
    x: &FourVector<T>,
    xi: &CoSpinor<T>,
    dir: &FourVector<T>,
    h: T,
    triv: &Trivialization<T>,
) -> Result<[T; 3], FrameError> {
    let xp = *x + *dir * h;
    let xm = *x - *dir * h;
    let p = f.chart_point(&xp, &triv.transport(xi, x, &xp), xi)?.coords;
    let q = f.chart_point(&xm, &triv.transport(xi, x, &xm), xi)?.coords;
    Ok(scale3(&sub3(&p, &q), T::one() / (h + h)))
}

/// Derivative of the sky-image family along `dir`, as a normal coefficient.
pub fn sky_image_derivative<T: Real, F: ConformalFrame<T> + ?Sized>(
    f: &F,
    x: &FourVector<T>,
    xi: &CoSpinor<T>,
    dir: &FourVector<T>,
    h: T,
) -> Result<T, FrameError> {
    sky_image_derivative_with(f, x, xi, dir, h, &Trivialization::Tetrad)
}

pub fn sky_image_derivative_with<T: Real, F: ConformalFrame<T> + ?Sized>(
    f: &F,
    x: &FourVector<T>,
    xi: &CoSpinor<T>,
    dir: &FourVector<T>,
    h: T,
    triv: &Trivialization<T>,
) -> Result<T, FrameError> {
    let nf = normal_frame(f, x, xi)?;
    Ok(nf.coefficient(&image_velocity(f, x, xi, dir, h, triv)?))
}

/// Default event step for [`sky_image_derivative`] at `x`.
pub fn default_event_step<T: Real, F: ConformalFrame<T> + ?Sized>(f: &F, x: &FourVector<T>) -> T {
    T::lit(EVENT_STEP) * f.scale(x)
}
