//! The Poincaré-invariant conformal reference frame of Minkowski space.
//!
//! `M` is the total space of the signed bundle of sizes, trivialized as
//! `sky × R`: the sky image of an event `x` is the graph of its celestial
//! transform, and the preimage of a point `(Pξ, χ)` is the null hyperplane
//! `ξ x ξ† = χ(ξ)`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::Real;
use crate::sky::{celestial_transform, dominates, SkySample};
use crate::spinor::{CoSpinor, FourVector};

/// Membership tolerance for null hyperplanes (relative).
pub const EPS_HYPERPLANE: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MinkowskiError {
    #[error("sky representative is zero")]
    ZeroSpinor,
}

/// Sky image of an event in the graph frame: heights over a sky sample.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphSkyImage<T = f64> {
    pub event: FourVector<T>,
    pub sample: SkySample<T>,
    pub heights: Vec<T>,
}

/// `{ξ_A x^{AA'} ξ̄_{A'} = χ}` for a fixed sky point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NullHyperplane<T = f64> {
    pub xi: CoSpinor<T>,
    pub chi: T,
}

/// Outcome of [`causal_compare`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CausalRelation {
    Equal,
    YPastOfX,
    XPastOfY,
    Spacelike,
}

impl CausalRelation {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Equal => "equal",
            Self::YPastOfX => "y_past_of_x",
            Self::XPastOfY => "x_past_of_y",
            Self::Spacelike => "spacelike",
        }
    }

    pub(crate) fn from_flags(y_before_x: bool, x_before_y: bool) -> Self {
        match (y_before_x, x_before_y) {
            (true, true) => Self::Equal,
            (true, false) => Self::YPastOfX,
            (false, true) => Self::XPastOfY,
            (false, false) => Self::Spacelike,
        }
    }
}

pub fn sky_image_minkowski<T: Real>(x: &FourVector<T>, sample: &SkySample<T>) -> GraphSkyImage<T> {
    let heights = celestial_transform(x).sample_values(sample).expect("polynomial field");
    GraphSkyImage { event: *x, sample: sample.clone(), heights }
}

/// The null hyperplane through `x` with constant null direction `Pξ`.
pub fn hyperplane_through<T: Real>(
    x: &FourVector<T>,
    xi: &CoSpinor<T>,
) -> Result<NullHyperplane<T>, MinkowskiError> {
    if xi.is_zero() {
        return Err(MinkowskiError::ZeroSpinor);
    }
    let chi = celestial_transform(x).eval(xi).expect("polynomial field");
    Ok(NullHyperplane { xi: *xi, chi })
}

pub fn hyperplane_contains<T: Real>(h: &NullHyperplane<T>, y: &FourVector<T>) -> bool {
    let value = celestial_transform(y).eval(&h.xi).expect("polynomial field");
    let scale = y.scale().max(h.chi.abs()).max(T::one()) * h.xi.norm_sqr();
    (value - h.chi).abs() <= T::tol(EPS_HYPERPLANE) * scale
}

/// Classifies the causal relation between `x` and `y` through the pointwise
/// order of their celestial transforms. The light-cone boundary counts as
/// causal.
pub fn causal_compare<T: Real>(x: &FourVector<T>, y: &FourVector<T>) -> CausalRelation {
    let sx = celestial_transform(x);
    let sy = celestial_transform(y);
    let y_before_x = dominates(&sx, &sy).expect("polynomial fields");
    let x_before_y = dominates(&sy, &sx).expect("polynomial fields");
    CausalRelation::from_flags(y_before_x, x_before_y)
}

/// JSON record: `{event: [4], samples: [{xi: [re0, im0, re1, im1], height}]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphSkyImageRecord {
    pub event: [f64; 4],
    pub samples: Vec<GraphSampleRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphSampleRecord {
    pub xi: [f64; 4],
    pub height: f64,
}

pub(crate) fn xi_record<T: Real>(xi: &CoSpinor<T>) -> [f64; 4] {
    [xi.0[0].re.as_f64(), xi.0[0].im.as_f64(), xi.0[1].re.as_f64(), xi.0[1].im.as_f64()]
}

impl<T: Real> GraphSkyImage<T> {
    pub fn to_record(&self) -> GraphSkyImageRecord {
        GraphSkyImageRecord {
            event: self.event.to_f64(),
            samples: self
                .sample
                .points()
                .iter()
                .zip(&self.heights)
                .map(|(xi, h)| GraphSampleRecord { xi: xi_record(xi), height: h.as_f64() })
                .collect(),
        }
    }
}
