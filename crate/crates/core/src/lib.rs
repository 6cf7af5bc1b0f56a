//! Sky bundles, the celestial transform, twistor incidence and conformal
//! reference frames for Lorentzian space-times.
//!
//! Everything numeric is generic over [`Real`] (`f32` or `f64`); the
//! `*F64` / `*F32` aliases below fix the scalar.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod causality;
pub mod expr;
pub mod frame;
pub mod mesh;
pub mod metric;
pub mod minkowski;
pub mod quad;
pub mod scalar;
pub mod sky;
pub mod spinor;
pub mod twistor;
pub mod verify;

pub use scalar::{Real, C};
pub use spinor::{
    factor_null, inverse_pauli, lorentz_act, minkowski_dot, minkowski_norm, pauli_transform, sl2_act, CoSpinor,
    FourVector, HermitianPair, Sl2Element, Spinor, SpinorError,
};
pub use sky::{
    celestial_transform, dominates, eval_homogeneous, mobius, sample_sky, SizeField, SkyError, SkySample, SkyScheme,
};
pub use minkowski::{causal_compare, hyperplane_contains, hyperplane_through, sky_image_minkowski, CausalRelation};
pub use twistor::{contact_form_nfin, contraction, incidence, ConjCoSpinor, Twistor, TwistorError, TwistorTangent};
pub use expr::{Expr, ExprError};
pub use frame::{
    project_event, sky_image, sky_image_derivative, ConformalFrame, FrameError, FrameSpec, GeodesicFrame, GraphFrame,
    SkyImage, Target, Tracer,
};
pub use causality::{Causality, CausalityError, Classification, Region};
pub use verify::{VerificationReport, VerifyError};
pub use metric::{
    integrate_null_geodesic, Domain, MetricError, MetricKind, MetricSpec, NullGeodesicState, ScaleFactor, Trajectory,
};

pub type FourVectorF64 = FourVector<f64>;
pub type FourVectorF32 = FourVector<f32>;
pub type HermitianPairF64 = HermitianPair<f64>;
pub type HermitianPairF32 = HermitianPair<f32>;
pub type SpinorF64 = Spinor<f64>;
pub type SpinorF32 = Spinor<f32>;
pub type CoSpinorF64 = CoSpinor<f64>;
pub type CoSpinorF32 = CoSpinor<f32>;
pub type Sl2ElementF64 = Sl2Element<f64>;
pub type Sl2ElementF32 = Sl2Element<f32>;
pub type SkySampleF64 = SkySample<f64>;
pub type SkySampleF32 = SkySample<f32>;
pub type TwistorF64 = Twistor<f64>;
pub type TwistorF32 = Twistor<f32>;
pub type MetricSpecF64 = MetricSpec<f64>;
pub type MetricSpecF32 = MetricSpec<f32>;
pub type GeodesicFrameF64 = GeodesicFrame<f64>;
pub type GeodesicFrameF32 = GeodesicFrame<f32>;
pub type GraphFrameF64 = GraphFrame<f64>;
pub type GraphFrameF32 = GraphFrame<f32>;
