//! Diagonal Lorentzian metrics, Christoffel symbols, null-geodesic
//! integration, and the conformal chart of flat FLRW cosmologies.
//!
//! Signature is `(+,-,-,-)` and `∂/∂t` is future-directed. Sky points are
//! mapped to null directions through the orthonormal tetrad aligned with
//! the coordinate axes: the sky point with Hopf image `n` is the null
//! vector with tetrad components `(1, -n)` (light arriving from `n`).

use thiserror::Error;

use crate::expr::Expr;
use crate::quad::tanh_sinh;
use crate::scalar::Real;
use crate::sky::SkySample;
use crate::spinor::{CoSpinor, FourVector};

/// Null-constraint tolerance for geodesic states (relative to `g00 v0²`).
pub const EPS_GEO: f64 = 1e-8;
/// Constraint defect beyond which renormalization is refused.
pub const EPS_CONSTRAINT_LOST: f64 = 1e-4;
/// Relative accuracy asked of the conformal-time quadrature.
pub const EPS_QUAD: f64 = 1e-12;
/// Relative step of the central-difference metric derivatives.
pub const FD_METRIC_STEP: f64 = 1e-5;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MetricError {
    #[error("point {0:?} is outside the chart domain")]
    OutOfDomain([f64; 4]),
    #[error("metric does not have signature (+,-,-,-) at {0:?}")]
    BadSignature([f64; 4]),
    #[error("scale factor is not positive at t = {0}")]
    NonPositiveScale(f64),
    #[error("conformal-time integral diverges at t = 0")]
    DivergentIntegral,
    #[error("null constraint lost (relative defect {0:e})")]
    ConstraintLost(f64),
    #[error("state is not null (relative defect {0:e})")]
    NotNull(f64),
    #[error("state is not future-directed")]
    PastDirected,
    #[error("integrator step must be positive and finite")]
    InvalidStep,
    #[error("operation needs a flat FLRW or Minkowski metric")]
    NotFlrw,
    #[error("bad domain: {0}")]
    BadDomain(String),
}

/// Scale factor `a(t)` of a flat FLRW metric.
#[derive(Debug, Clone, PartialEq)]
pub enum ScaleFactor<T = f64> {
    /// `a(t) = t^p`.
    PowerLaw(T),
    /// `a(t)` given by an expression in `t`.
    Expr(Expr),
}

impl<T: Real> ScaleFactor<T> {
    pub fn value(&self, t: T) -> T {
        match self {
            Self::PowerLaw(p) => t.powf(*p),
            Self::Expr(e) => e.eval(&[t, T::zero(), T::zero(), T::zero()]),
        }
    }

    pub fn derivative(&self, t: T) -> T {
        match self {
            Self::PowerLaw(p) => *p * t.powf(*p - T::one()),
            Self::Expr(_) => {
                let h = T::lit(FD_METRIC_STEP) * t.abs().max(T::one());
                (self.value(t + h) - self.value(t - h)) / (h + h)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum MetricKind<T = f64> {
    Minkowski,
    FlrwFlat(ScaleFactor<T>),
    /// `g = diag(g00, g11, g22, g33)` given by expressions of the chart point.
    CustomDiagonal(Box<[Expr; 4]>),
}

/// Chart domain: `t_min ≤ t ≤ t_max` and, when set, `|x^i| ≤ half_width`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Domain<T = f64> {
    pub t_min: T,
    pub t_max: T,
    pub half_width: Option<T>,
}

impl<T: Real> Domain<T> {
    pub fn new(t_min: T, t_max: T, half_width: Option<T>) -> Self {
        Self { t_min, t_max, half_width }
    }

    pub fn unbounded() -> Self {
        Self { t_min: T::neg_infinity(), t_max: T::infinity(), half_width: None }
    }

    pub fn contains(&self, x: &FourVector<T>) -> bool {
        let t = x.t();
        if !(t >= self.t_min && t <= self.t_max) {
            return false;
        }
        match self.half_width {
            Some(w) => x.spatial().iter().all(|c| c.abs() <= w),
            None => x.spatial().iter().all(|c| c.is_finite()),
        }
    }
}

/// A diagonal Lorentzian metric on a coordinate chart.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricSpec<T = f64> {
    kind: MetricKind<T>,
    domain: Domain<T>,
}

/// `Γ^k_{ij}` stored as `gamma[k][i][j]`.
pub type Christoffel<T> = [[[T; 4]; 4]; 4];

impl<T: Real> MetricSpec<T> {
    /// Builds a metric and spot-checks its signature on a grid over the domain.
    pub fn new(kind: MetricKind<T>, domain: Domain<T>) -> Result<Self, MetricError> {
        if !(domain.t_min < domain.t_max) {
            return Err(MetricError::BadDomain("t_min must be below t_max".into()));
        }
        if matches!(kind, MetricKind::FlrwFlat(_)) && domain.t_min <= T::zero() {
            return Err(MetricError::BadDomain("FLRW domain needs t_min > 0".into()));
        }
        let spec = Self { kind, domain };
        spec.check_signature()?;
        Ok(spec)
    }

    pub fn minkowski() -> Self {
        Self { kind: MetricKind::Minkowski, domain: Domain::unbounded() }
    }

    /// Flat FLRW with `a(t) = t^p` on `t ∈ [t_min, t_max]`.
    pub fn flrw_power_law(p: T, t_min: T, t_max: T) -> Result<Self, MetricError> {
        Self::new(MetricKind::FlrwFlat(ScaleFactor::PowerLaw(p)), Domain::new(t_min, t_max, None))
    }

    pub fn kind(&self) -> &MetricKind<T> {
        &self.kind
    }

    pub fn domain(&self) -> &Domain<T> {
        &self.domain
    }

    pub fn scale_factor(&self) -> Option<&ScaleFactor<T>> {
        match &self.kind {
            MetricKind::FlrwFlat(a) => Some(a),
            _ => None,
        }
    }

    fn check_signature(&self) -> Result<(), MetricError> {
        let d = &self.domain;
        let t_lo = if d.t_min.is_finite() { d.t_min } else { -T::lit(10.0) };
        let t_hi = if d.t_max.is_finite() { d.t_max } else { T::lit(10.0) };
        let w = d.half_width.unwrap_or(T::one());
        let grid = [T::zero(), T::lit(0.25), T::lit(0.5), T::lit(0.75), T::one()];
        for ft in grid {
            let t = t_lo + (t_hi - t_lo) * ft;
            if let MetricKind::FlrwFlat(a) = &self.kind {
                let v = a.value(t);
                if !(v > T::zero()) || !v.is_finite() {
                    return Err(MetricError::NonPositiveScale(t.as_f64()));
                }
            }
            for fs in [-T::one(), T::zero(), T::one()] {
                for axis in 0..3 {
                    let mut x = FourVector::new(t, T::zero(), T::zero(), T::zero());
                    x.0[axis + 1] = w * fs;
                    let g = self.diag_unchecked(&x);
                    let ok = g[0] > T::zero() && g[1] < T::zero() && g[2] < T::zero() && g[3] < T::zero();
                    if !ok || g.iter().any(|v| !v.is_finite()) {
                        return Err(MetricError::BadSignature(x.to_f64()));
                    }
                }
            }
        }
        Ok(())
    }

    fn check_domain(&self, x: &FourVector<T>) -> Result<(), MetricError> {
        if self.domain.contains(x) {
            Ok(())
        } else {
            Err(MetricError::OutOfDomain(x.to_f64()))
        }
    }

    /// RK4 stage points may stray just outside the domain; they only need
    /// a metric of the right signature.
    fn check_stage(&self, x: &FourVector<T>) -> Result<(), MetricError> {
        let g = self.diag_unchecked(x);
        let ok = g.iter().all(|v| v.is_finite())
            && g[0] > T::zero()
            && g[1] < T::zero()
            && g[2] < T::zero()
            && g[3] < T::zero();
        if ok {
            Ok(())
        } else {
            Err(MetricError::OutOfDomain(x.to_f64()))
        }
    }

    fn diag_unchecked(&self, x: &FourVector<T>) -> [T; 4] {
        match &self.kind {
            MetricKind::Minkowski => [T::one(), -T::one(), -T::one(), -T::one()],
            MetricKind::FlrwFlat(a) => {
                let a = a.value(x.t());
                [T::one(), -a * a, -a * a, -a * a]
            }
            MetricKind::CustomDiagonal(exprs) => std::array::from_fn(|k| exprs[k].eval(&x.0)),
        }
    }

    /// Diagonal metric coefficients `g_kk` at `x`.
    pub fn diag(&self, x: &FourVector<T>) -> Result<[T; 4], MetricError> {
        self.check_domain(x)?;
        Ok(self.diag_unchecked(x))
    }

    /// `(g_kk, ∂_m g_kk)` with the derivative stored as `d[m][k]`.
    fn diag_and_derivatives(&self, x: &FourVector<T>) -> ([T; 4], [[T; 4]; 4]) {
        let g = self.diag_unchecked(x);
        let mut d = [[T::zero(); 4]; 4];
        match &self.kind {
            MetricKind::Minkowski => {}
            MetricKind::FlrwFlat(sf) => {
                let a = sf.value(x.t());
                let da = sf.derivative(x.t());
                let dg = -(a + a) * da;
                d[0][1] = dg;
                d[0][2] = dg;
                d[0][3] = dg;
            }
            MetricKind::CustomDiagonal(exprs) => {
                for m in 0..4 {
                    let h = T::lit(FD_METRIC_STEP) * x.0[m].abs().max(T::one());
                    for k in 0..4 {
                        if !exprs[k].uses(m) {
                            continue;
                        }
                        let mut xp = x.0;
                        let mut xm = x.0;
                        xp[m] = xp[m] + h;
                        xm[m] = xm[m] - h;
                        d[m][k] = (exprs[k].eval(&xp) - exprs[k].eval(&xm)) / (h + h);
                    }
                }
            }
        }
        (g, d)
    }

    /// Christoffel symbols of the Levi-Civita connection at `x`.
    pub fn christoffel(&self, x: &FourVector<T>) -> Result<Christoffel<T>, MetricError> {
        self.check_domain(x)?;
        Ok(self.christoffel_unchecked(x))
    }

    fn christoffel_unchecked(&self, x: &FourVector<T>) -> Christoffel<T> {
        let (g, d) = self.diag_and_derivatives(x);
        let half = T::lit(0.5);
        let mut gamma = [[[T::zero(); 4]; 4]; 4];
        for k in 0..4 {
            let inv = half / g[k];
            for i in 0..4 {
                for j in i..4 {
                    // ∂_i g_kj + ∂_j g_ki - ∂_k g_ij for diagonal g
                    let mut s = T::zero();
                    if j == k {
                        s = s + d[i][k];
                    }
                    if i == k {
                        s = s + d[j][k];
                    }
                    if i == j {
                        s = s - d[k][i];
                    }
                    let v = inv * s;
                    gamma[k][i][j] = v;
                    gamma[k][j][i] = v;
                }
            }
        }
        gamma
    }

    /// `g(v, v)` at `x`.
    pub fn norm(&self, x: &FourVector<T>, v: &FourVector<T>) -> Result<T, MetricError> {
        let g = self.diag(x)?;
        Ok((0..4).fold(T::zero(), |acc, k| acc + g[k] * v.0[k] * v.0[k]))
    }

    /// Coordinate components of a tangent vector converted to the
    /// orthonormal tetrad at `x`.
    pub fn to_tetrad(&self, x: &FourVector<T>, w: &FourVector<T>) -> Result<FourVector<T>, MetricError> {
        let g = self.diag(x)?;
        Ok(FourVector(std::array::from_fn(|k| w.0[k] * g[k].abs().sqrt())))
    }

    /// Inverse of [`to_tetrad`](Self::to_tetrad).
    pub fn from_tetrad(&self, x: &FourVector<T>, w: &FourVector<T>) -> Result<FourVector<T>, MetricError> {
        let g = self.diag(x)?;
        Ok(FourVector(std::array::from_fn(|k| w.0[k] / g[k].abs().sqrt())))
    }

    /// Future null direction of the sky point `Pξ` at `x`, normalized to unit
    /// coordinate-time component.
    pub fn null_direction(&self, x: &FourVector<T>, xi: &CoSpinor<T>) -> Result<FourVector<T>, MetricError> {
        let g = self.diag(x)?;
        let n = xi.direction();
        let g00 = g[0];
        Ok(FourVector::new(
            T::one(),
            -n[0] * (g00 / -g[1]).sqrt(),
            -n[1] * (g00 / -g[2]).sqrt(),
            -n[2] * (g00 / -g[3]).sqrt(),
        ))
    }

    /// Sky point (unit representative) of a future null vector at `x`.
    pub fn sky_point_of(&self, x: &FourVector<T>, v: &FourVector<T>) -> Result<CoSpinor<T>, MetricError> {
        let e = self.to_tetrad(x, v)?;
        Ok(CoSpinor::from_direction(&[-e.0[1], -e.0[2], -e.0[3]]))
    }

    /// Conformal time `η(t) = ∫_0^t dt'/a(t')` of a flat FLRW metric; equal
    /// to `t` for Minkowski.
    pub fn conformal_time(&self, t: T) -> Result<T, MetricError> {
        match &self.kind {
            MetricKind::Minkowski => Ok(t),
            MetricKind::FlrwFlat(sf) => {
                if !(t > T::zero()) {
                    return Err(MetricError::OutOfDomain([t.as_f64(), 0.0, 0.0, 0.0]));
                }
                match sf {
                    ScaleFactor::PowerLaw(p) => {
                        if *p >= T::one() {
                            return Err(MetricError::DivergentIntegral);
                        }
                        let q = T::one() - *p;
                        Ok(t.powf(q) / q)
                    }
                    ScaleFactor::Expr(_) => {
                        // local power-law exponent of a(t) near 0
                        let eps = t * T::lit(1e-8);
                        let (a1, a2) = (sf.value(eps), sf.value(eps + eps));
                        if !(a1 > T::zero()) || !(a2 > T::zero()) {
                            return Err(MetricError::NonPositiveScale(eps.as_f64()));
                        }
                        let local_p = (a2 / a1).ln() / T::LN_2();
                        if local_p >= T::one() - T::lit(1e-3) {
                            return Err(MetricError::DivergentIntegral);
                        }
                        let r = tanh_sinh(|s| T::one() / sf.value(s), T::zero(), t, T::tol(EPS_QUAD));
                        if !r.converged || !r.value.is_finite() {
                            return Err(MetricError::DivergentIntegral);
                        }
                        Ok(r.value)
                    }
                }
            }
            MetricKind::CustomDiagonal(_) => Err(MetricError::NotFlrw),
        }
    }

    /// `η(t1) - η(t0) = ∫_{t0}^{t1} dt/a` for `0 < t0`.
    pub fn conformal_interval(&self, t0: T, t1: T) -> Result<T, MetricError> {
        match &self.kind {
            MetricKind::Minkowski => Ok(t1 - t0),
            MetricKind::FlrwFlat(sf) => {
                if t0 == T::zero() {
                    return self.conformal_time(t1);
                }
                if !(t0 > T::zero() && t1 > T::zero()) {
                    return Err(MetricError::OutOfDomain([t0.as_f64(), 0.0, 0.0, 0.0]));
                }
                match sf {
                    ScaleFactor::PowerLaw(p) => {
                        let q = T::one() - *p;
                        if q.abs() < T::tol(1e-12) {
                            Ok((t1 / t0).ln())
                        } else {
                            Ok((t1.powf(q) - t0.powf(q)) / q)
                        }
                    }
                    ScaleFactor::Expr(_) => {
                        let r = tanh_sinh(|s| T::one() / sf.value(s), t0, t1, T::tol(EPS_QUAD));
                        Ok(r.value)
                    }
                }
            }
            MetricKind::CustomDiagonal(_) => Err(MetricError::NotFlrw),
        }
    }

    /// `∫_{t0}^{t1} a(t) dt`, the affine length (times `a·dt/dλ`) of a null
    /// ray between the two times.
    pub fn affine_interval(&self, t0: T, t1: T) -> Result<T, MetricError> {
        match &self.kind {
            MetricKind::Minkowski => Ok(t1 - t0),
            MetricKind::FlrwFlat(ScaleFactor::PowerLaw(p)) => {
                let q = *p + T::one();
                Ok((t1.powf(q) - t0.powf(q)) / q)
            }
            MetricKind::FlrwFlat(sf @ ScaleFactor::Expr(_)) => {
                Ok(tanh_sinh(|s| sf.value(s), t0, t1, T::tol(EPS_QUAD)).value)
            }
            MetricKind::CustomDiagonal(_) => Err(MetricError::NotFlrw),
        }
    }

    /// Closed-form past-directed null ray from `x` in the conformal chart,
    /// stopped at time `t_target ≤ x⁰`. Returns the comoving arrival point
    /// and the affine parameter there (with `v⁰ = 1` at `x`).
    pub fn trace_closed_form(
        &self,
        x: &FourVector<T>,
        xi: &CoSpinor<T>,
        t_target: T,
    ) -> Result<([T; 3], T), MetricError> {
        let n = xi.direction();
        let dt = x.t() - t_target;
        let (reach, lambda) = match &self.kind {
            MetricKind::Minkowski => (dt, -dt),
            MetricKind::FlrwFlat(sf) => {
                let eta = self.conformal_interval(t_target, x.t())?;
                let a_x = sf.value(x.t());
                (eta, -self.affine_interval(t_target, x.t())? / a_x)
            }
            MetricKind::CustomDiagonal(_) => return Err(MetricError::NotFlrw),
        };
        let s = x.spatial();
        Ok(([s[0] + reach * n[0], s[1] + reach * n[1], s[2] + reach * n[2]], lambda))
    }
}

/// Point of a null geodesic: chart position, velocity and affine parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NullGeodesicState<T = f64> {
    pub x: FourVector<T>,
    pub v: FourVector<T>,
    pub lambda: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory<T = f64> {
    pub states: Vec<NullGeodesicState<T>>,
    /// Integration stopped early because the next step left the domain.
    pub hit_boundary: bool,
}

impl<T: Real> Trajectory<T> {
    pub fn last(&self) -> &NullGeodesicState<T> {
        self.states.last().expect("trajectory holds the initial state")
    }
}

impl<T: Real> MetricSpec<T> {
    /// Relative null defect `g(v,v) / (g00 v0²)`.
    pub fn null_defect(&self, x: &FourVector<T>, v: &FourVector<T>) -> Result<T, MetricError> {
        let g = self.diag(x)?;
        let n = (0..4).fold(T::zero(), |acc, k| acc + g[k] * v.0[k] * v.0[k]);
        Ok(n / (g[0] * v.0[0] * v.0[0]))
    }

    pub fn validate_state(&self, s: &NullGeodesicState<T>) -> Result<(), MetricError> {
        let defect = self.null_defect(&s.x, &s.v)?;
        if !(s.v.t() > T::zero()) {
            return Err(MetricError::PastDirected);
        }
        if defect.abs() > T::tol(EPS_GEO) || !defect.is_finite() {
            return Err(MetricError::NotNull(defect.as_f64()));
        }
        Ok(())
    }

    fn accel(&self, x: &FourVector<T>, v: &FourVector<T>) -> FourVector<T> {
        let gamma = self.christoffel_unchecked(x);
        FourVector(std::array::from_fn(|k| {
            let mut s = T::zero();
            for i in 0..4 {
                for j in 0..4 {
                    s = s + gamma[k][i][j] * v.0[i] * v.0[j];
                }
            }
            -s
        }))
    }

    /// One classical RK4 step of length `h` (negative to go back in λ)
    /// followed by null renormalization of `v⁰`.
    pub fn rk4_step(&self, s: &NullGeodesicState<T>, h: T) -> Result<NullGeodesicState<T>, MetricError> {
        let half = T::lit(0.5);
        let sixth = T::one() / T::lit(6.0);
        let (x, v) = (s.x, s.v);
        self.check_domain(&x)?;
        let k1x = v;
        let k1v = self.accel(&x, &v);
        let x2 = x + k1x * (h * half);
        self.check_stage(&x2)?;
        let k2x = v + k1v * (h * half);
        let k2v = self.accel(&x2, &k2x);
        let x3 = x + k2x * (h * half);
        self.check_stage(&x3)?;
        let k3x = v + k2v * (h * half);
        let k3v = self.accel(&x3, &k3x);
        let x4 = x + k3x * h;
        self.check_stage(&x4)?;
        let k4x = v + k3v * h;
        let k4v = self.accel(&x4, &k4x);
        let two = T::lit(2.0);
        let nx = x + (k1x + k2x * two + k3x * two + k4x) * (h * sixth);
        let nv = v + (k1v + k2v * two + k3v * two + k4v) * (h * sixth);
        self.check_domain(&nx)?;
        let nv = self.renormalize(&nx, &nv)?;
        Ok(NullGeodesicState { x: nx, v: nv, lambda: s.lambda + h })
    }

    /// Rescales `v⁰` so that `g(v, v) = 0`.
    fn renormalize(&self, x: &FourVector<T>, v: &FourVector<T>) -> Result<FourVector<T>, MetricError> {
        let g = self.diag_unchecked(x);
        let defect = (0..4).fold(T::zero(), |acc, k| acc + g[k] * v.0[k] * v.0[k]) / (g[0] * v.0[0] * v.0[0]);
        if !(defect.abs() <= T::lit(EPS_CONSTRAINT_LOST)) || !(v.t() > T::zero()) {
            return Err(MetricError::ConstraintLost(defect.as_f64()));
        }
        let spatial = (1..4).fold(T::zero(), |acc, k| acc - g[k] * v.0[k] * v.0[k]);
        let mut out = *v;
        out.0[0] = (spatial / g[0]).sqrt();
        Ok(out)
    }
}

/// Integrates a null geodesic from `s0` to affine parameter `lambda_end`
/// (either direction) with a fixed step. Stops early with
/// `hit_boundary = true` when the next step would leave the domain.
pub fn integrate_null_geodesic<T: Real>(
    m: &MetricSpec<T>,
    s0: &NullGeodesicState<T>,
    lambda_end: T,
    step: T,
) -> Result<Trajectory<T>, MetricError> {
    if !(step > T::zero()) || !step.is_finite() {
        return Err(MetricError::InvalidStep);
    }
    m.validate_state(s0)?;
    let dir = if lambda_end >= s0.lambda { T::one() } else { -T::one() };
    let mut states = vec![*s0];
    let mut cur = *s0;
    loop {
        let remaining = (lambda_end - cur.lambda) * dir;
        if remaining <= step * T::lit(1e-12) {
            break;
        }
        let h = remaining.min(step) * dir;
        match m.rk4_step(&cur, h) {
            Ok(next) => {
                cur = next;
                states.push(cur);
            }
            Err(MetricError::OutOfDomain(_)) => return Ok(Trajectory { states, hit_boundary: true }),
            Err(e) => return Err(e),
        }
    }
    Ok(Trajectory { states, hit_boundary: false })
}

/// One future null direction per sky sample at `x`.
pub fn future_null_directions<T: Real>(
    m: &MetricSpec<T>,
    x: &FourVector<T>,
    sample: &SkySample<T>,
) -> Result<Vec<FourVector<T>>, MetricError> {
    sample.points().iter().map(|xi| m.null_direction(x, xi)).collect()
}
