//! The sky as the Riemann sphere, homogeneous line bundles over it, and the
//! celestial transform of 4-vectors into (1,1)-homogeneous size fields.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use thiserror::Error;

use crate::scalar::{c, Real, C};
use crate::spinor::{pauli_transform, CoSpinor, FourVector, HermitianPair, Spinor};

/// Normalization tolerance for sky sample representatives.
pub const EPS_UNIT: f64 = 1e-12;
/// Smallest eigenvalue accepted as non-negative by [`dominates`].
pub const EPS_PSD: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SkyError {
    #[error("unsupported homogeneity signature ({k},{l}) for the given coefficients")]
    UnsupportedSignature { k: i32, l: i32 },
    #[error("sky sample needs at least 4 points, got {0}")]
    BadCount(usize),
    #[error("size field has no coefficient matrix")]
    NonPolynomial,
    #[error("sky representative {0} is zero or not unit-normalized")]
    BadRepresentative(usize),
}

/// Sampling scheme for [`sample_sky`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SkyScheme {
    Fibonacci,
    Random { seed: u64 },
}

/// A finite set of unit-normalized sky representatives.
#[derive(Debug, Clone, PartialEq)]
pub struct SkySample<T = f64> {
    points: Vec<CoSpinor<T>>,
}

impl<T: Real> SkySample<T> {
    pub fn new(points: Vec<CoSpinor<T>>) -> Result<Self, SkyError> {
        for (i, p) in points.iter().enumerate() {
            if (p.norm_sqr() - T::one()).abs() > T::tol(EPS_UNIT) {
                return Err(SkyError::BadRepresentative(i));
            }
        }
        Ok(Self { points })
    }

    pub fn points(&self) -> &[CoSpinor<T>] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Unit vectors on S² (Hopf images) of the sample.
    pub fn directions(&self) -> Vec<[T; 3]> {
        self.points.iter().map(CoSpinor::direction).collect()
    }
}

/// Samples `n` sky points.
///
/// The Fibonacci scheme places the Hopf images on a golden-angle spiral and
/// is quasi-uniform on S²; the random scheme is uniform and reproducible from
/// its seed.
pub fn sample_sky<T: Real>(n: usize, scheme: SkyScheme) -> Result<SkySample<T>, SkyError> {
    if n < 4 {
        return Err(SkyError::BadCount(n));
    }
    let points = match scheme {
        SkyScheme::Fibonacci => {
            let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
            (0..n)
                .map(|i| {
                    let z = 1.0 - (2.0 * i as f64 + 1.0) / n as f64;
                    let r = (1.0 - z * z).max(0.0).sqrt();
                    let phi = golden * i as f64;
                    CoSpinor::from_direction(&[r * phi.cos(), r * phi.sin(), z].map(T::lit))
                })
                .collect()
        }
        SkyScheme::Random { seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..n)
                .map(|_| loop {
                    let g: [f64; 4] = std::array::from_fn(|_| StandardNormal.sample(&mut rng));
                    let len = g.iter().map(|v| v * v).sum::<f64>().sqrt();
                    if len > 1e-9 {
                        let g = g.map(|v| v / len);
                        break CoSpinor::new(c(T::lit(g[0]), T::lit(g[1])), c(T::lit(g[2]), T::lit(g[3])))
                            .normalized();
                    }
                })
                .collect()
        }
    };
    SkySample::new(points)
}

/// Bidegree `(k, l)` of a homogeneous line bundle `O(k,l)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HomogeneitySignature {
    pub k: i32,
    pub l: i32,
}

impl HomogeneitySignature {
    pub const fn new(k: i32, l: i32) -> Self {
        Self { k, l }
    }
}

/// Coefficients of a polynomial section.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SectionCoeffs<T = f64> {
    /// `ω ∈ C²` as a linear functional `ξ ↦ ξ_A ω^A`.
    Spinor(Spinor<T>),
    /// `ξ ↦ ξ_A H^{AA'} ξ̄_{A'}`.
    Hermitian(HermitianPair<T>),
    /// Product of two spinor sections; `(ξα)(ξβ)` for (2,0) or
    /// `(ξα)·conj(ξβ)` for (1,1).
    SpinorPair(Spinor<T>, Spinor<T>),
}

/// Evaluates a polynomial section of `O(k,l)` at the representative `ξ`.
pub fn eval_homogeneous<T: Real>(
    coeffs: &SectionCoeffs<T>,
    sig: HomogeneitySignature,
    xi: &CoSpinor<T>,
) -> Result<C<T>, SkyError> {
    match (sig.k, sig.l, coeffs) {
        (1, 0, SectionCoeffs::Spinor(w)) => Ok(xi.pair(w)),
        (0, 1, SectionCoeffs::Spinor(w)) => Ok(xi.pair(w).conj()),
        (1, 1, SectionCoeffs::Hermitian(h)) => Ok(xi.contract(h)),
        (1, 1, SectionCoeffs::SpinorPair(a, b)) => Ok(xi.pair(a) * xi.pair(b).conj()),
        (2, 0, SectionCoeffs::SpinorPair(a, b)) => Ok(xi.pair(a) * xi.pair(b)),
        _ => Err(SkyError::UnsupportedSignature { k: sig.k, l: sig.l }),
    }
}

/// `ζ ζ̄` for a value of `O(1,0)`.
pub fn modulus_squared<T: Real>(zeta: C<T>) -> T {
    zeta.norm_sqr()
}

/// A real (1,1)-homogeneous function on the dual spinor space: a section
/// of the signed bundle of sizes.
#[derive(Debug, Clone, PartialEq)]
pub enum SizeField<T = f64> {
    /// `ξ ↦ ξ H ξ†`.
    Polynomial(HermitianPair<T>),
    /// Values at the unit representatives of a sample.
    Sampled { sample: SkySample<T>, values: Vec<T> },
}

impl<T: Real> SizeField<T> {
    pub fn coefficients(&self) -> Result<&HermitianPair<T>, SkyError> {
        match self {
            Self::Polynomial(h) => Ok(h),
            Self::Sampled { .. } => Err(SkyError::NonPolynomial),
        }
    }

    /// Value at an arbitrary representative (polynomial fields only).
    pub fn eval(&self, xi: &CoSpinor<T>) -> Result<T, SkyError> {
        Ok(xi.contract(self.coefficients()?).re)
    }

    /// Complex value before discarding the imaginary part, for audits.
    pub fn eval_complex(&self, xi: &CoSpinor<T>) -> Result<C<T>, SkyError> {
        Ok(xi.contract(self.coefficients()?))
    }

    /// Values over a sample, using unit representatives.
    pub fn sample_values(&self, sample: &SkySample<T>) -> Result<Vec<T>, SkyError> {
        match self {
            Self::Polynomial(h) => Ok(sample.points().iter().map(|p| p.contract(h).re).collect()),
            Self::Sampled { sample: own, values } if own == sample => Ok(values.clone()),
            Self::Sampled { .. } => Err(SkyError::NonPolynomial),
        }
    }
}

/// Celestial transform: `v ↦ (ξ ↦ ξ_A v^{AA'} ξ̄_{A'})`.
pub fn celestial_transform<T: Real>(v: &FourVector<T>) -> SizeField<T> {
    SizeField::Polynomial(pauli_transform(v))
}

/// Pointwise order on polynomial size fields: `a ≥ b` everywhere on the sky.
pub fn dominates<T: Real>(a: &SizeField<T>, b: &SizeField<T>) -> Result<bool, SkyError> {
    let diff = *a.coefficients()? - *b.coefficients()?;
    let scale = a.coefficients()?.max_abs().max(b.coefficients()?.max_abs()).max(T::one());
    let (lo, _) = diff.eigenvalues();
    Ok(lo >= -T::tol(EPS_PSD) * scale)
}

/// The sky point `Pξ` transported by `ξ ↦ ξ C`; convenience for Möbius checks.
pub fn mobius<T: Real>(xi: &CoSpinor<T>, cm: &crate::spinor::Sl2Element<T>) -> CoSpinor<T> {
    xi.right_mul(cm)
}
