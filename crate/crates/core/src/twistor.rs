//! Twistors `(ω, π)`, the incidence relation `ω = i x π`, the null-twistor
//! constraint, the twistor contraction, and the contact form on the affine
//! part of null twistor space.
//!
//! `π` lives on the conjugate sky. The sky point matched with `Pπ` is
//! `Pξ` with `ξ = π̄` componentwise; with that identification the
//! contraction of an incident twistor equals the celestial transform.

use thiserror::Error;

use crate::scalar::{c, cr, two, Real, C};
use crate::sky::{celestial_transform, SizeField};
use crate::spinor::{pauli_transform, CoSpinor, FourVector, Spinor};

/// Tolerance used by the null-twistor tests (relative to `|π||ω|`).
pub const EPS_TWISTOR: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TwistorError {
    #[error("π component is zero")]
    ZeroPi,
    #[error("twistor is not null (constraint value {0:e})")]
    NotNull(f64),
}

/// Element `π_{L'}` of the dual of the conjugate spinor space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConjCoSpinor<T = f64>(pub [C<T>; 2]);

impl<T: Real> ConjCoSpinor<T> {
    pub fn new(a: C<T>, b: C<T>) -> Self {
        Self([a, b])
    }

    pub fn norm_sqr(&self) -> T {
        self.0[0].norm_sqr() + self.0[1].norm_sqr()
    }

    pub fn is_zero(&self) -> bool {
        self.norm_sqr() == T::zero()
    }

    pub fn scaled(&self, s: C<T>) -> Self {
        Self([self.0[0] * s, self.0[1] * s])
    }

    /// The sky representative `ξ = π̄`.
    pub fn sky_point(&self) -> CoSpinor<T> {
        CoSpinor::new(self.0[0].conj(), self.0[1].conj())
    }

    pub fn from_sky_point(xi: &CoSpinor<T>) -> Self {
        Self([xi.0[0].conj(), xi.0[1].conj()])
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Twistor<T = f64> {
    pub omega: Spinor<T>,
    pub pi: ConjCoSpinor<T>,
}

/// Tangent vector `(dω, dπ)` at a twistor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwistorTangent<T = f64> {
    pub d_omega: Spinor<T>,
    pub d_pi: ConjCoSpinor<T>,
}

/// Value of the twistor contraction: base point and complex size at the
/// representative `π`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Contraction<T = f64> {
    pub sky_point: CoSpinor<T>,
    pub value: C<T>,
}

/// `Σ conj(a_k) b_k`.
fn hdot<T: Real>(a: &[C<T>; 2], b: &[C<T>; 2]) -> C<T> {
    a[0].conj() * b[0] + a[1].conj() * b[1]
}

impl<T: Real> Twistor<T> {
    pub fn new(omega: Spinor<T>, pi: ConjCoSpinor<T>) -> Self {
        Self { omega, pi }
    }

    /// `π̄_L ω^L + π_{L'} ω̄^{L'} = 2 Re(π̄·ω)`.
    pub fn constraint(&self) -> T {
        two::<T>() * hdot(&self.pi.0, &self.omega.0).re
    }

    fn scale(&self) -> T {
        (self.pi.norm_sqr() * self.omega.norm_sqr()).sqrt().max(self.pi.norm_sqr())
    }

    pub fn scaled(&self, s: C<T>) -> Self {
        Self { omega: self.omega.scaled(s), pi: self.pi.scaled(s) }
    }
}

/// Incidence relation `ω^L = i x^{LL'} π_{L'}`.
pub fn incidence<T: Real>(x: &FourVector<T>, pi: &ConjCoSpinor<T>) -> Result<Twistor<T>, TwistorError> {
    if pi.is_zero() {
        return Err(TwistorError::ZeroPi);
    }
    let h = pauli_transform(x);
    let i = c(T::zero(), T::one());
    let omega = Spinor::new(
        i * (h.get(0, 0) * pi.0[0] + h.get(0, 1) * pi.0[1]),
        i * (h.get(1, 0) * pi.0[0] + h.get(1, 1) * pi.0[1]),
    );
    Ok(Twistor { omega, pi: *pi })
}

pub fn is_null<T: Real>(z: &Twistor<T>, tol: T) -> bool {
    z.constraint().abs() <= tol * z.scale()
}

/// Twistor contraction `P(π, ω) ↦ (Pπ, -i π̄_L ω^L)`.
pub fn contraction<T: Real>(z: &Twistor<T>) -> Result<Contraction<T>, TwistorError> {
    if z.pi.is_zero() {
        return Err(TwistorError::ZeroPi);
    }
    let value = c(T::zero(), -T::one()) * hdot(&z.pi.0, &z.omega.0);
    Ok(Contraction { sky_point: z.pi.sky_point(), value })
}

/// `-i (π̄_L dω^L + ω̄^{L'} dπ_{L'})` on the affine null twistor space.
pub fn contact_form_nfin<T: Real>(z: &Twistor<T>, dz: &TwistorTangent<T>) -> Result<C<T>, TwistorError> {
    if z.pi.is_zero() {
        return Err(TwistorError::ZeroPi);
    }
    if !is_null(z, T::tol(1e-10)) {
        return Err(TwistorError::NotNull(z.constraint().as_f64()));
    }
    let s = hdot(&z.pi.0, &dz.d_omega.0) + hdot(&z.omega.0, &dz.d_pi.0);
    Ok(c(T::zero(), -T::one()) * s)
}

/// Removes the component of `dz` that violates the linearized null
/// constraint, leaving a tangent vector of the null hypersurface.
pub fn project_tangent<T: Real>(z: &Twistor<T>, dz: &TwistorTangent<T>) -> TwistorTangent<T> {
    // d(constraint) = 2 Re(<π, dω> + <ω, dπ>), gradient (π, ω) in the real
    // inner product Re <a, b>
    let g_norm = z.pi.norm_sqr() + z.omega.norm_sqr();
    if g_norm == T::zero() {
        return *dz;
    }
    let along = (hdot(&z.pi.0, &dz.d_omega.0) + hdot(&z.omega.0, &dz.d_pi.0)).re / g_norm;
    let k = cr(along);
    TwistorTangent {
        d_omega: Spinor::new(dz.d_omega.0[0] - z.pi.0[0] * k, dz.d_omega.0[1] - z.pi.0[1] * k),
        d_pi: ConjCoSpinor::new(dz.d_pi.0[0] - z.omega.0[0] * k, dz.d_pi.0[1] - z.omega.0[1] * k),
    }
}

/// Celestial transform of `x` at the sky point matched with `π`.
pub fn matched_celestial<T: Real>(x: &FourVector<T>, pi: &ConjCoSpinor<T>) -> T {
    let s: SizeField<T> = celestial_transform(x);
    s.eval(&pi.sky_point()).expect("polynomial field")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::minkowski::{hyperplane_contains, hyperplane_through};
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn fv(a: [f64; 4]) -> FourVector<f64> {
        FourVector(a)
    }

    fn rc(rng: &mut impl Rng) -> C<f64> {
        c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    }

    #[test]
    fn incidence_examples() {
        let pi = ConjCoSpinor::new(c(0.3, -0.2), c(1.0, 0.5));
        assert_eq!(incidence(&fv([0.0; 4]), &pi).unwrap().omega, Spinor::zero());
        let z = incidence(&fv([1.0, 0.0, 0.0, 0.0]), &ConjCoSpinor::new(cr(1.0), cr(0.0))).unwrap();
        assert_eq!(z.omega, Spinor::new(c(0.0, 0.5), cr(0.0)));
        let x = fv([0.4, -1.0, 2.0, 0.1]);
        let lam = c(0.7, -1.3);
        let a = incidence(&x, &pi).unwrap();
        let b = incidence(&x, &pi.scaled(lam)).unwrap();
        assert!((b.omega.0[0] - a.omega.0[0] * lam).norm() < 1e-14);
        assert!((b.omega.0[1] - a.omega.0[1] * lam).norm() < 1e-14);
        assert_eq!(incidence(&x, &ConjCoSpinor::new(cr(0.0), cr(0.0))), Err(TwistorError::ZeroPi));
    }

    #[test]
    fn is_null_examples() {
        let z = incidence(&fv([0.4, -1.0, 2.0, 0.1]), &ConjCoSpinor::new(c(0.3, -0.2), c(1.0, 0.5))).unwrap();
        assert!(is_null(&z, 1e-12));
        let z = Twistor::new(Spinor::new(cr(1.0), cr(0.0)), ConjCoSpinor::new(cr(1.0), cr(0.0)));
        assert_eq!(z.constraint(), 2.0);
        assert!(!is_null(&z, 1e-12));
        let z = Twistor::new(Spinor::zero(), ConjCoSpinor::new(c(0.1, 3.0), c(-2.0, 0.0)));
        assert!(is_null(&z, 0.0));
    }

    #[test]
    fn contraction_examples() {
        let pi = ConjCoSpinor::new(cr(1.0), cr(0.0));
        let z = incidence(&fv([1.0, 0.0, 0.0, 0.0]), &pi).unwrap();
        let k = contraction(&z).unwrap();
        assert_abs_diff_eq!(k.value.re, 0.5);
        assert_abs_diff_eq!(k.value.im, 0.0);
        assert_eq!(k.sky_point, CoSpinor::real(1.0, 0.0));

        let z0 = Twistor::new(Spinor::zero(), ConjCoSpinor::new(c(0.2, 0.1), cr(1.0)));
        assert_eq!(contraction(&z0).unwrap().value, cr(0.0));

        let z = incidence(&fv([0.3, 0.2, -0.5, 1.0]), &ConjCoSpinor::new(c(0.2, 0.1), c(-0.4, 0.9))).unwrap();
        let z2 = z.scaled(cr(2.0));
        let (v1, v2) = (contraction(&z).unwrap().value, contraction(&z2).unwrap().value);
        assert!((v2 - v1 * 4.0).norm() < 1e-14);
        // same projective sky point
        let (p1, p2) = (contraction(&z).unwrap().sky_point.direction(), contraction(&z2).unwrap().sky_point.direction());
        for k in 0..3 {
            assert_abs_diff_eq!(p1[k], p2[k], epsilon = 1e-14);
        }
        let zero = Twistor::new(Spinor::zero(), ConjCoSpinor::new(cr(0.0), cr(0.0)));
        assert_eq!(contraction(&zero), Err(TwistorError::ZeroPi));
    }

    #[test]
    fn contraction_is_real_exactly_on_null_twistors() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..200 {
            let z = Twistor::new(Spinor::new(rc(&mut rng), rc(&mut rng)), ConjCoSpinor::new(rc(&mut rng), rc(&mut rng)));
            let v = contraction(&z).unwrap().value;
            // imaginary part is minus half the constraint
            assert_abs_diff_eq!(v.im, -0.5 * z.constraint(), epsilon = 1e-14);
        }
    }

    #[test]
    fn contact_form_examples() {
        let x = fv([0.2, 0.5, -0.1, 0.7]);
        let xi = fv([1.3, 0.2, 0.4, -0.6]);
        let pi = ConjCoSpinor::new(c(0.6, 0.2), c(-0.1, 0.5));
        let z = incidence(&x, &pi).unwrap();
        // d/dt incidence(x + t ξ, π)
        let d_omega = incidence(&xi, &pi).unwrap().omega;
        let dz = TwistorTangent { d_omega, d_pi: ConjCoSpinor::new(cr(0.0), cr(0.0)) };
        let v = contact_form_nfin(&z, &dz).unwrap();
        assert_abs_diff_eq!(v.re, matched_celestial(&xi, &pi), epsilon = 1e-14);
        assert_abs_diff_eq!(v.im, 0.0, epsilon = 1e-14);

        let zero = TwistorTangent { d_omega: Spinor::zero(), d_pi: ConjCoSpinor::new(cr(0.0), cr(0.0)) };
        assert_eq!(contact_form_nfin(&z, &zero).unwrap(), cr(0.0));

        let z0 = Twistor::new(Spinor::zero(), pi);
        let dz = TwistorTangent { d_omega: Spinor::new(c(0.3, 0.1), c(0.2, -0.4)), d_pi: ConjCoSpinor::new(c(5.0, 1.0), c(-2.0, 3.0)) };
        let v = contact_form_nfin(&z0, &dz).unwrap();
        let reduced = c(0.0, -1.0) * hdot(&pi.0, &dz.d_omega.0);
        assert!((v - reduced).norm() < 1e-15);

        let bad = Twistor::new(Spinor::new(cr(1.0), cr(0.0)), ConjCoSpinor::new(cr(1.0), cr(0.0)));
        assert!(matches!(contact_form_nfin(&bad, &dz), Err(TwistorError::NotNull(_))));
    }

    #[test]
    fn contact_form_is_real_on_projected_tangents() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..100 {
            let x = fv(std::array::from_fn(|_| rng.random_range(-2.0..2.0)));
            let z = incidence(&x, &ConjCoSpinor::new(rc(&mut rng), rc(&mut rng))).unwrap();
            let raw = TwistorTangent {
                d_omega: Spinor::new(rc(&mut rng), rc(&mut rng)),
                d_pi: ConjCoSpinor::new(rc(&mut rng), rc(&mut rng)),
            };
            let dz = project_tangent(&z, &raw);
            let v = contact_form_nfin(&z, &dz).unwrap();
            assert!(v.im.abs() < 1e-13, "{v}");
        }
    }

    #[test]
    fn contraction_fibers_are_null_hyperplanes() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let pi = ConjCoSpinor::new(c(0.5, -0.5), c(0.1, 0.7));
        let x1 = fv([0.3, 1.0, -0.2, 0.4]);
        let plane = hyperplane_through(&x1, &pi.sky_point()).unwrap();
        let null = crate::spinor::inverse_pauli(&pi.sky_point().annihilated().outer()).unwrap();
        for _ in 0..20 {
            let x2 = x1 + null * rng.random_range(-3.0..3.0);
            let k1 = contraction(&incidence(&x1, &pi).unwrap()).unwrap().value;
            let k2 = contraction(&incidence(&x2, &pi).unwrap()).unwrap().value;
            assert!((k1 - k2).norm() < 1e-12);
            assert!(hyperplane_contains(&plane, &x2));
        }
    }

    #[test]
    fn contact_form_annihilates_incidence_lines_along_matched_null_direction() {
        let pi = ConjCoSpinor::new(c(0.2, 0.9), c(-0.6, 0.3));
        let v = crate::spinor::inverse_pauli(&pi.sky_point().annihilated().outer()).unwrap();
        assert!(crate::spinor::minkowski_norm::<f64>(&v).abs() < 1e-14);
        let z = incidence(&fv([0.1, 0.2, 0.3, 0.4]), &pi).unwrap();
        let dz = TwistorTangent { d_omega: incidence(&v, &pi).unwrap().omega, d_pi: ConjCoSpinor::new(cr(0.0), cr(0.0)) };
        assert!(contact_form_nfin(&z, &dz).unwrap().norm() < 1e-12);
    }
}
