//! Causal relation read off conformal reference frames: the region bounded
//! by the sky image of `x` (its causal past in `M`), containment queries,
//! and disjointness tests on finite unions of regions.
//!
//! Experimental: regions are analytic balls or triangulated sample clouds,
//! so only finite unions of such sets are representable.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::frame::{sky_image, ConformalFrame, FrameError};
use crate::mesh::{sphere_triangulation, TriMesh};
use crate::minkowski::CausalRelation;
use crate::scalar::{norm3, sub3, Real};
use crate::sky::{dominates, SkySample};
use crate::spinor::FourVector;

/// Absolute slack of closed containment and disjointness tests.
pub const EPS_CONTAIN: f64 = 1e-9;
/// Fraction of samples that must project for a region to be built.
pub const MIN_SUCCESS: f64 = 0.9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CausalityError {
    #[error("only {ok} of {total} sky samples projected")]
    InsufficientSamples { ok: usize, total: usize },
    #[error("sky image does not triangulate to a closed surface")]
    OpenMesh,
    #[error("frame has no region representation: {0}")]
    Unsupported(String),
    #[error(transparent)]
    Frame(#[from] FrameError),
}

impl CausalityError {
    pub fn name(&self) -> &'static str {
        match self {
            Self::InsufficientSamples { .. } => "InsufficientSamples",
            Self::OpenMesh => "OpenMesh",
            Self::Unsupported(_) => "Unsupported",
            Self::Frame(e) => e.name(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Region<T = f64> {
    Ball { center: [T; 3], radius: T },
    Mesh(TriMesh<T>),
}

impl<T: Real> Region<T> {
    /// Closed containment of a point, with slack [`EPS_CONTAIN`].
    pub fn contains(&self, p: &[T; 3]) -> bool {
        let tol = T::lit(EPS_CONTAIN);
        match self {
            Self::Ball { center, radius } => norm3(&sub3(p, center)) <= *radius + tol,
            Self::Mesh(m) => m.contains(p, tol),
        }
    }

    pub fn to_record(&self) -> RegionRecord {
        match self {
            Self::Ball { center, radius } => {
                RegionRecord::Ball { center: center.map(Real::as_f64), radius: radius.as_f64() }
            }
            Self::Mesh(m) => RegionRecord::Mesh {
                vertices: m.vertices.iter().map(|v| v.map(Real::as_f64)).collect(),
                triangles: m.triangles.clone(),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RegionRecord {
    Ball { center: [f64; 3], radius: f64 },
    Mesh { vertices: Vec<[f64; 3]>, triangles: Vec<[usize; 3]> },
}

/// Whether two closed regions are disjoint.
pub fn regions_disjoint<T: Real>(a: &Region<T>, b: &Region<T>) -> bool {
    let tol = T::lit(EPS_CONTAIN);
    match (a, b) {
        (Region::Ball { center: c1, radius: r1 }, Region::Ball { center: c2, radius: r2 }) => {
            norm3(&sub3(c1, c2)) > *r1 + *r2 + tol
        }
        (Region::Ball { center, radius }, Region::Mesh(m)) | (Region::Mesh(m), Region::Ball { center, radius }) => {
            !(m.contains(center, tol) || m.distance(center) <= *radius + tol)
        }
        (Region::Mesh(p), Region::Mesh(q)) => meshes_disjoint(p, q, tol),
    }
}

fn meshes_disjoint<T: Real>(p: &TriMesh<T>, q: &TriMesh<T>, tol: T) -> bool {
    let (plo, phi) = p.aabb();
    let (qlo, qhi) = q.aabb();
    if (0..3).any(|k| phi[k] + tol < qlo[k] || qhi[k] + tol < plo[k]) {
        return true;
    }
    if p.vertices.iter().any(|v| q.contains(v, tol)) || q.vertices.iter().any(|v| p.contains(v, tol)) {
        return false;
    }
    let crosses = |a: &TriMesh<T>, b: &TriMesh<T>| a.edges().iter().any(|&(i, j)| b.segment_hits(&a.vertices[i], &a.vertices[j]));
    !(crosses(p, q) || crosses(q, p))
}

/// A finite union of closed regions; the empty union is the bottom element.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ClosedSetUnion<T = f64> {
    pub regions: Vec<Region<T>>,
}

impl<T: Real> ClosedSetUnion<T> {
    pub fn empty() -> Self {
        Self { regions: Vec::new() }
    }

    pub fn from_regions(regions: Vec<Region<T>>) -> Self {
        Self { regions }
    }

    pub fn is_empty(&self) -> bool {
        self.regions.is_empty()
    }
}

pub fn join<T: Real>(a: &ClosedSetUnion<T>, b: &ClosedSetUnion<T>) -> ClosedSetUnion<T> {
    let mut regions = a.regions.clone();
    regions.extend(b.regions.iter().cloned());
    ClosedSetUnion { regions }
}

/// `B ∩ K = ∅`: membership of `B` in the basic open set of `K`.
pub fn locale_disjoint<T: Real>(b: &ClosedSetUnion<T>, k: &Region<T>) -> bool {
    b.regions.iter().all(|r| regions_disjoint(r, k))
}

/// Witness data of a causal classification.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Classification {
    pub relation: CausalRelation,
    /// `r_x - (|c_x - c_y| + r_y)` for balls, or the fraction of `y`'s image
    /// inside the region of `x` for meshes.
    pub margin_y_in_x: f64,
    pub margin_x_in_y: f64,
    pub radius_x: Option<f64>,
    pub radius_y: Option<f64>,
}

/// Sky direction and image point of one sample.
type DirPoint<T> = ([T; 3], [T; 3]);

/// Causal queries through a frame, using a fixed sky sample for images.
pub struct Causality<'a, T: Real, F: ConformalFrame<T> + ?Sized> {
    frame: &'a F,
    sample: SkySample<T>,
    force_mesh: bool,
}

impl<'a, T: Real, F: ConformalFrame<T> + ?Sized> Causality<'a, T, F> {
    pub fn new(frame: &'a F, sample: SkySample<T>) -> Self {
        Self { frame, sample, force_mesh: false }
    }

    /// Builds meshes even where an analytic ball is available.
    pub fn with_mesh(mut self) -> Self {
        self.force_mesh = true;
        self
    }

    fn analytic(&self, x: &FourVector<T>) -> Option<Result<([T; 3], T), CausalityError>> {
        if self.force_mesh {
            return None;
        }
        self.frame.analytic_region(x).map(|r| r.map_err(CausalityError::from))
    }

    /// Successful image points of `x`, checked against [`MIN_SUCCESS`].
    fn image_points(&self, x: &FourVector<T>) -> Result<Vec<DirPoint<T>>, CausalityError> {
        let img = sky_image(self.frame, x, &self.sample)?;
        let pts: Vec<_> = img.points().into_iter().map(|(xi, p)| (xi.direction(), p)).collect();
        if (pts.len() as f64) < MIN_SUCCESS * self.sample.len() as f64 {
            return Err(CausalityError::InsufficientSamples { ok: pts.len(), total: self.sample.len() });
        }
        Ok(pts)
    }

    /// The region bounded by the sky image of `x`.
    pub fn region_of(&self, x: &FourVector<T>) -> Result<Region<T>, CausalityError> {
        if self.frame.graph_field(x).is_some() {
            return Err(CausalityError::Unsupported("graph frames compare size fields directly".into()));
        }
        if let Some(ball) = self.analytic(x) {
            let (center, radius) = ball?;
            return Ok(Region::Ball { center, radius });
        }
        let pts = self.image_points(x)?;
        let dirs: Vec<[T; 3]> = pts.iter().map(|(d, _)| *d).collect();
        let tris = sphere_triangulation(&dirs).ok_or(CausalityError::OpenMesh)?;
        let mesh = TriMesh::new(pts.into_iter().map(|(_, p)| p).collect(), tris);
        if !mesh.is_closed() {
            return Err(CausalityError::OpenMesh);
        }
        Ok(Region::Mesh(mesh))
    }

    /// Whether `y` lies in the causal past of `x` (closed convention).
    pub fn in_causal_past(&self, y: &FourVector<T>, x: &FourVector<T>) -> Result<bool, CausalityError> {
        Ok(self.witness(y, x)?.0)
    }

    /// `(y ≤ x, margin, radius_x, radius_y)`.
    fn witness(&self, y: &FourVector<T>, x: &FourVector<T>) -> Result<(bool, f64, Option<f64>, Option<f64>), CausalityError> {
        if let (Some(fx), Some(fy)) = (self.frame.graph_field(x), self.frame.graph_field(y)) {
            // y's graph on the negative side of x's
            let inside = dominates(&fx, &fy).expect("polynomial fields");
            let diff = *fx.coefficients().expect("polynomial") - *fy.coefficients().expect("polynomial");
            return Ok((inside, diff.eigenvalues().0.as_f64(), None, None));
        }
        if let (Some(bx), Some(by)) = (self.analytic(x), self.analytic(y)) {
            let ((cx, rx), (cy, ry)) = (bx?, by?);
            let margin = rx - (norm3(&sub3(&cx, &cy)) + ry);
            let inside = margin >= -T::lit(EPS_CONTAIN);
            return Ok((inside, margin.as_f64(), Some(rx.as_f64()), Some(ry.as_f64())));
        }
        let region = self.region_of(x)?;
        let pts = self.image_points(y)?;
        let inside: Vec<bool> = pts.par_iter().map(|(_, p)| region.contains(p)).collect();
        let count = inside.iter().filter(|b| **b).count();
        let radius_x = match region {
            Region::Ball { radius, .. } => Some(radius.as_f64()),
            Region::Mesh(_) => None,
        };
        Ok((count == pts.len(), count as f64 / pts.len() as f64, radius_x, None))
    }

    pub fn classify(&self, x: &FourVector<T>, y: &FourVector<T>) -> Result<Classification, CausalityError> {
        let (y_in_x, margin_y_in_x, radius_x, radius_y) = self.witness(y, x)?;
        let (x_in_y, margin_x_in_y, _, _) = self.witness(x, y)?;
        Ok(Classification {
            relation: CausalRelation::from_flags(y_in_x, x_in_y),
            margin_y_in_x,
            margin_x_in_y,
            radius_x,
            radius_y,
        })
    }
}
