//! Numerical checks of the frame identities: contact annihilation, kernel
//! equality of `θ` and the normal projection, the flow-of-time equation,
//! and `τ ∘ incidence = s`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::frame::{
    image_velocity, normal_frame, sky_shift, theta, ConformalFrame, FrameError, Trivialization, JACOBIAN_STEP,
};
use crate::metric::{integrate_null_geodesic, MetricKind, NullGeodesicState};
use crate::scalar::{c, scale3, sub3, Real};
use crate::sky::{celestial_transform, SkySample};
use crate::spinor::{CoSpinor, FourVector};
use crate::twistor::{contraction, incidence, matched_celestial, ConjCoSpinor};

/// Values of `|s|` below this (relative to the direction's size) are skipped
/// by the flow-of-time check.
pub const EPS_FLOW_SKIP: f64 = 1e-8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum VerifyError {
    #[error(transparent)]
    Frame(#[from] FrameError),
    #[error("no regular sample with a usable direction")]
    AllSamplesDegenerate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub name: String,
    pub residuals: Vec<f64>,
    pub max_residual: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub probes: usize,
    /// Auxiliary per-probe values (the empirical flow factor, ratios).
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub profile: Vec<f64>,
}

impl VerificationReport {
    pub fn new(name: impl Into<String>, residuals: Vec<f64>, tolerance: f64) -> Self {
        let max_residual = residuals.iter().fold(0.0f64, |m, r| if r.is_nan() { f64::INFINITY } else { m.max(*r) });
        Self {
            name: name.into(),
            probes: residuals.len(),
            pass: max_residual <= tolerance,
            residuals,
            max_residual,
            tolerance,
            profile: Vec::new(),
        }
    }

    pub fn with_profile(mut self, profile: Vec<f64>) -> Self {
        self.profile = profile;
        self
    }

    /// Combines reports into one whose residuals are each normalized by the
    /// part's tolerance, passing iff every part passes.
    pub fn merge(name: impl Into<String>, parts: &[VerificationReport]) -> Self {
        let residuals = parts.iter().flat_map(|p| p.residuals.iter().map(move |r| r / p.tolerance)).collect();
        let mut out = Self::new(name, residuals, 1.0);
        out.pass = parts.iter().all(|p| p.pass);
        out
    }
}

/// `θ` on the geodesic flow at `(x, ξ)`, on the two vertical directions,
/// and on the lifted flow along the null geodesic of `ξ` traced back over
/// the affine span `span` with step `step`. Residuals are relative to the
/// tetrad energy `v⁰`; the null defect of every state is reported as well.
pub fn check_contact_annihilation<T: Real, F: ConformalFrame<T> + ?Sized>(
    f: &F,
    x: &FourVector<T>,
    xi: &CoSpinor<T>,
    span: T,
    step: T,
    tol: f64,
) -> Result<VerificationReport, VerifyError> {
    let m = f.metric();
    let map = |e| VerifyError::Frame(FrameError::IntegratorFailure(e));
    let flow_residual = |y: &FourVector<T>, v: &FourVector<T>, lift: &CoSpinor<T>| -> Result<f64, VerifyError> {
        let e = m.to_tetrad(y, v).map_err(map)?;
        let th = theta(m, y, lift, v)?;
        Ok((th / e.t()).abs().as_f64())
    };
    let v = m.null_direction(x, xi).map_err(map)?;
    let mut residuals = vec![flow_residual(x, &v, xi)?];
    // vertical probes: dx = 0
    for _ in 0..2 {
        residuals.push(theta(m, x, xi, &FourVector::zero())?.abs().as_f64());
    }
    if span > T::zero() {
        // tetrad directions are parallel along FLRW and Minkowski geodesics
        let transported = !matches!(m.kind(), MetricKind::CustomDiagonal(_));
        let tr = integrate_null_geodesic(m, &NullGeodesicState { x: *x, v, lambda: T::zero() }, -span, step).map_err(map)?;
        for s in tr.states.iter().skip(1) {
            let lift = if transported { *xi } else { m.sky_point_of(&s.x, &s.v).map_err(map)? };
            residuals.push(flow_residual(&s.x, &s.v, &lift)?);
            residuals.push(m.null_defect(&s.x, &s.v).map_err(map)?.abs().as_f64());
        }
    }
    Ok(VerificationReport::new("contact", residuals, tol))
}

/// `θ` and the normal projection `P` evaluated on the six probes (four
/// coordinate horizontals, two verticals) at `(x, ξ)`.
pub fn theorem1_functionals<T: Real, F: ConformalFrame<T> + ?Sized>(
    f: &F,
    x: &FourVector<T>,
    xi: &CoSpinor<T>,
    h: T,
) -> Result<([T; 6], [T; 6]), VerifyError> {
    let m = f.metric();
    let nf = normal_frame(f, x, xi)?;
    let mut th = [T::zero(); 6];
    let mut p = [T::zero(); 6];
    for mu in 0..4 {
        let mut e = FourVector::zero();
        e.0[mu] = T::one();
        th[mu] = theta(m, x, xi, &e)?;
        p[mu] = nf.coefficient(&image_velocity(f, x, xi, &e, h, &Trivialization::Tetrad)?);
    }
    let eps = T::lit(JACOBIAN_STEP);
    let r = T::FRAC_1_SQRT_2();
    for (k, w) in [c(r, r), c(r, -r)].into_iter().enumerate() {
        let a = f.chart_point(x, &sky_shift(xi, w, eps), xi)?.coords;
        let b = f.chart_point(x, &sky_shift(xi, w, -eps), xi)?.coords;
        th[4 + k] = theta(m, x, xi, &FourVector::zero())?;
        p[4 + k] = nf.coefficient(&scale3(&sub3(&a, &b), T::one() / (eps + eps)));
    }
    Ok((th, p))
}

/// Kernel equality with co-orientation: the unit vectors `θ/|θ|` and
/// `P/|P|` in R⁶ must agree. Residuals are their componentwise differences
/// (a sign flip on any significant probe shows up as a large residual).
/// The profile holds the ratio `|P|/|θ|`.
pub fn check_theorem1<T: Real, F: ConformalFrame<T> + ?Sized>(
    f: &F,
    x: &FourVector<T>,
    xi: &CoSpinor<T>,
    h: T,
    tol: f64,
) -> Result<VerificationReport, VerifyError> {
    let (th, p) = theorem1_functionals(f, x, xi, h)?;
    let norm = |v: &[T; 6]| v.iter().fold(T::zero(), |a, b| a + *b * *b).sqrt();
    let (nt, np) = (norm(&th), norm(&p));
    let residuals = (0..6).map(|k| (p[k] / np - th[k] / nt).abs().as_f64()).collect();
    Ok(VerificationReport::new("theorem1", residuals, tol).with_profile(vec![(np / nt).as_f64()]))
}

/// Flow-of-time check over a sky sample and a set of directions. At each
/// regular sky point the factor `a` is fitted by least squares to
/// `dS(dir) = a · s(dir)(ξ)` (or fixed to `expected`); residuals are
/// `|dS − a s| / (|a| max|s|)` per direction, plus `|a − expected|/|expected|`
/// when an expected value is given. The profile holds `a` per sky point.
pub fn check_flow_of_time<T: Real, F: ConformalFrame<T> + ?Sized>(
    f: &F,
    x: &FourVector<T>,
    directions: &[FourVector<T>],
    sample: &SkySample<T>,
    h: T,
    expected: Option<T>,
    tol: f64,
) -> Result<VerificationReport, VerifyError> {
    let m = f.metric();
    let mut residuals = Vec::new();
    let mut profile = Vec::new();
    for xi in sample.points() {
        let nf = match normal_frame(f, x, xi) {
            Ok(nf) => nf,
            Err(FrameError::DegenerateTangentPlane(_)) => continue,
            Err(e) => return Err(e.into()),
        };
        let mut pairs = Vec::new();
        for dir in directions {
            let s = theta(m, x, xi, dir)?;
            let size = m.to_tetrad(x, dir).map_err(FrameError::IntegratorFailure)?.scale();
            if s.abs() < T::lit(EPS_FLOW_SKIP) * size {
                continue;
            }
            let d = nf.coefficient(&image_velocity(f, x, xi, dir, h, &Trivialization::Tetrad)?);
            pairs.push((s, d));
        }
        if pairs.is_empty() {
            continue;
        }
        let fit = pairs.iter().fold(T::zero(), |a, (s, d)| a + *s * *d) / pairs.iter().fold(T::zero(), |a, (s, _)| a + *s * *s);
        let a = expected.unwrap_or(fit);
        let s_max = pairs.iter().fold(T::zero(), |acc, (s, _)| acc.max(s.abs()));
        for (s, d) in &pairs {
            residuals.push(((*d - a * *s).abs() / (a.abs() * s_max)).as_f64());
        }
        if let Some(e) = expected {
            residuals.push(((fit - e) / e).abs().as_f64());
        }
        profile.push(fit.as_f64());
    }
    if profile.is_empty() {
        return Err(VerifyError::AllSamplesDegenerate);
    }
    Ok(VerificationReport::new("flow", residuals, tol).with_profile(profile))
}

/// `|τ(incidence(x, π)) − s(x)(π̄)|` relative to `|x| |π|²`, per `π`.
pub fn check_tau_incidence<T: Real>(x: &FourVector<T>, pis: &[ConjCoSpinor<T>], tol: f64) -> VerificationReport {
    let residuals = pis
        .iter()
        .map(|pi| {
            let z = match incidence(x, pi) {
                Ok(z) => z,
                Err(_) => return f64::INFINITY,
            };
            let tau = contraction(&z).expect("nonzero π").value;
            let s = matched_celestial(x, pi);
            let scale = x.scale().max(T::min_positive_value()) * pi.norm_sqr();
            let diff = (tau - c(s, T::zero())).norm();
            (diff / scale).as_f64()
        })
        .collect();
    VerificationReport::new("twistor", residuals, tol)
}

/// `s(v)(ξ)` at the unit representative, for reporting.
pub fn celestial_value<T: Real>(v: &FourVector<T>, xi: &CoSpinor<T>) -> T {
    celestial_transform(v).eval(&xi.normalized()).expect("polynomial field")
}
