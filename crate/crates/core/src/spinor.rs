//! Algebraic spinor correspondence between 4-vectors and Hermitian 2×2 matrices.
//!
//! Conventions: signature `(+,-,-,-)`, `c = 1`, and the Pauli transform
//!
//! ```text
//! x^{AA'} = PAULI_FACTOR * [[x0 + x3, x1 + i x2], [x1 - i x2, x0 - x3]]
//! ```
//!
//! with `PAULI_FACTOR = 1/2`, so that `4 det(x^{AA'}) = η(x, x)`.

use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::{c, cr, half, two, Real, C};

/// Real factor in front of the Pauli transform.
pub const PAULI_FACTOR: f64 = 0.5;

/// Hermiticity tolerance (relative to the largest entry).
pub const EPS_HERM: f64 = 1e-12;
/// Null-cone tolerance (relative to the squared largest component).
pub const EPS_NULL: f64 = 1e-10;
/// Unimodularity tolerance for SL(2,C) elements.
pub const EPS_DET: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpinorError {
    #[error("matrix is not Hermitian (defect {defect:e})")]
    NonHermitian { defect: f64 },
    #[error("vector is not null (η = {norm:e})")]
    NotNull { norm: f64 },
    #[error("null vector is past-directed")]
    NotFutureDirected,
    #[error("matrix is not unimodular (det = {re:e} + {im:e}i)")]
    NotUnimodular { re: f64, im: f64 },
}

/// Space-time vector with components `(x0, x1, x2, x3)`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FourVector<T = f64>(pub [T; 4]);

impl<T: Real> FourVector<T> {
    pub fn new(x0: T, x1: T, x2: T, x3: T) -> Self {
        Self([x0, x1, x2, x3])
    }

    pub fn zero() -> Self {
        Self([T::zero(); 4])
    }

    pub fn from_f64(v: [f64; 4]) -> Self {
        Self(v.map(T::lit))
    }

    #[inline]
    pub fn t(&self) -> T {
        self.0[0]
    }

    pub fn spatial(&self) -> [T; 3] {
        [self.0[1], self.0[2], self.0[3]]
    }

    /// Largest absolute component.
    pub fn scale(&self) -> T {
        self.0.iter().fold(T::zero(), |m, v| m.max(v.abs()))
    }

    pub fn scaled(&self, s: T) -> Self {
        Self(self.0.map(|v| v * s))
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|v| v.is_finite())
    }

    pub fn to_f64(&self) -> [f64; 4] {
        self.0.map(Real::as_f64)
    }
}

impl<T: Real> Add for FourVector<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self(std::array::from_fn(|i| self.0[i] + o.0[i]))
    }
}

impl<T: Real> Sub for FourVector<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self(std::array::from_fn(|i| self.0[i] - o.0[i]))
    }
}

impl<T: Real> Neg for FourVector<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Self(self.0.map(|v| -v))
    }
}

impl<T: Real> Mul<T> for FourVector<T> {
    type Output = Self;
    fn mul(self, s: T) -> Self {
        self.scaled(s)
    }
}

/// A 2×2 complex matrix `h^{AA'}`, Hermitian when built through the checked
/// constructors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HermitianPair<T = f64> {
    m: [[C<T>; 2]; 2],
}

impl<T: Real> HermitianPair<T> {
    /// Validates Hermiticity within [`EPS_HERM`] relative to the largest entry.
    pub fn new(m: [[C<T>; 2]; 2]) -> Result<Self, SpinorError> {
        let h = Self { m };
        let defect = h.hermiticity_defect();
        let scale = h.max_abs().max(T::one());
        if defect > T::tol(EPS_HERM) * scale || !defect.is_finite() {
            return Err(SpinorError::NonHermitian { defect: defect.as_f64() });
        }
        Ok(h)
    }

    /// Builds from the real diagonal and the upper off-diagonal entry.
    pub fn from_parts(d0: T, d1: T, off: C<T>) -> Self {
        Self { m: [[cr(d0), off], [off.conj(), cr(d1)]] }
    }

    pub fn zero() -> Self {
        Self::from_parts(T::zero(), T::zero(), cr(T::zero()))
    }

    pub fn identity() -> Self {
        Self::from_parts(T::one(), T::one(), cr(T::zero()))
    }

    pub fn entries(&self) -> &[[C<T>; 2]; 2] {
        &self.m
    }

    #[inline]
    pub fn get(&self, a: usize, b: usize) -> C<T> {
        self.m[a][b]
    }

    pub fn det(&self) -> C<T> {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }

    pub fn trace(&self) -> C<T> {
        self.m[0][0] + self.m[1][1]
    }

    pub fn max_abs(&self) -> T {
        self.m.iter().flatten().fold(T::zero(), |a, z| a.max(z.norm()))
    }

    fn hermiticity_defect(&self) -> T {
        let off = (self.m[0][1] - self.m[1][0].conj()).norm();
        off.max(self.m[0][0].im.abs()).max(self.m[1][1].im.abs())
    }

    /// Eigenvalues `(min, max)` of the Hermitian matrix.
    pub fn eigenvalues(&self) -> (T, T) {
        let a = self.m[0][0].re;
        let d = self.m[1][1].re;
        let mean = half::<T>() * (a + d);
        let hd = half::<T>() * (a - d);
        let r = (hd * hd + self.m[0][1].norm_sqr()).sqrt();
        (mean - r, mean + r)
    }

    pub fn scaled(&self, s: T) -> Self {
        Self { m: self.m.map(|row| row.map(|z| z * s)) }
    }
}

impl<T: Real> Add for HermitianPair<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self { m: std::array::from_fn(|a| std::array::from_fn(|b| self.m[a][b] + o.m[a][b])) }
    }
}

impl<T: Real> Sub for HermitianPair<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self { m: std::array::from_fn(|a| std::array::from_fn(|b| self.m[a][b] - o.m[a][b])) }
    }
}

/// Element `ψ^A` of the spinor space `C²` (a column vector).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Spinor<T = f64>(pub [C<T>; 2]);

impl<T: Real> Spinor<T> {
    pub fn new(a: C<T>, b: C<T>) -> Self {
        Self([a, b])
    }

    pub fn zero() -> Self {
        Self([cr(T::zero()); 2])
    }

    pub fn norm_sqr(&self) -> T {
        self.0[0].norm_sqr() + self.0[1].norm_sqr()
    }

    pub fn scaled(&self, s: C<T>) -> Self {
        Self([self.0[0] * s, self.0[1] * s])
    }

    /// The Hermitian matrix `ψ ψ†`.
    pub fn outer(&self) -> HermitianPair<T> {
        HermitianPair::from_parts(
            self.0[0].norm_sqr(),
            self.0[1].norm_sqr(),
            self.0[0] * self.0[1].conj(),
        )
    }
}

/// Element `ξ_A` of the dual spinor space (a row vector). Its projective
/// class is a point of the sky.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoSpinor<T = f64>(pub [C<T>; 2]);

impl<T: Real> CoSpinor<T> {
    pub fn new(a: C<T>, b: C<T>) -> Self {
        Self([a, b])
    }

    pub fn real(a: T, b: T) -> Self {
        Self([cr(a), cr(b)])
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

    /// Unit-norm representative of the same sky point (phase unchanged).
    pub fn normalized(&self) -> Self {
        let n = self.norm_sqr().sqrt();
        Self([self.0[0] / n, self.0[1] / n])
    }

    /// Componentwise conjugate, the representative on the conjugate sky.
    pub fn conj(&self) -> Self {
        Self([self.0[0].conj(), self.0[1].conj()])
    }

    /// The pairing `ξ_A ψ^A`.
    pub fn pair(&self, psi: &Spinor<T>) -> C<T> {
        self.0[0] * psi.0[0] + self.0[1] * psi.0[1]
    }

    /// `ξ_A h^{AA'} ξ̄_{A'}`; real for Hermitian `h`.
    pub fn contract(&self, h: &HermitianPair<T>) -> C<T> {
        let mut acc = cr(T::zero());
        for a in 0..2 {
            for b in 0..2 {
                acc = acc + self.0[a] * h.get(a, b) * self.0[b].conj();
            }
        }
        acc
    }

    /// Spinor annihilated by this co-spinor: `ξ_A ψ^A = 0`.
    pub fn annihilated(&self) -> Spinor<T> {
        Spinor([self.0[1], -self.0[0]])
    }

    /// Hermitian-orthogonal companion `(-ξ̄₁, ξ̄₀)`; `ξ + ε·companion` moves
    /// the projective point for every `ε ≠ 0`.
    pub fn companion(&self) -> Self {
        Self([-self.0[1].conj(), self.0[0].conj()])
    }

    /// Right action of a 2×2 matrix: `ξ ↦ ξ C`.
    pub fn right_mul(&self, m: &Sl2Element<T>) -> Self {
        let a = m.0;
        Self([
            self.0[0] * a[0][0] + self.0[1] * a[1][0],
            self.0[0] * a[0][1] + self.0[1] * a[1][1],
        ])
    }

    /// Unit vector on S² under the Hopf map:
    /// `(2 Re ξ̄₀ξ₁, 2 Im ξ̄₀ξ₁, |ξ₀|² − |ξ₁|²) / |ξ|²`.
    ///
    /// This is the direction an observer looks along when seeing the sky
    /// point `Pξ`; light from it propagates along `-n`.
    pub fn direction(&self) -> [T; 3] {
        let n = self.norm_sqr();
        let p = self.0[0].conj() * self.0[1];
        [
            two::<T>() * p.re / n,
            two::<T>() * p.im / n,
            (self.0[0].norm_sqr() - self.0[1].norm_sqr()) / n,
        ]
    }

    /// Unit representative whose Hopf image is the unit vector `n`.
    pub fn from_direction(n: &[T; 3]) -> Self {
        let len = (n[0] * n[0] + n[1] * n[1] + n[2] * n[2]).sqrt();
        let (nx, ny, nz) = (n[0] / len, n[1] / len, n[2] / len);
        // cos(θ/2), sin(θ/2) from cos θ without losing precision near the poles
        let cos_half = (half::<T>() * (T::one() + nz)).max(T::zero()).sqrt();
        let sin_half = (half::<T>() * (T::one() - nz)).max(T::zero()).sqrt();
        let rho = (nx * nx + ny * ny).sqrt();
        let phase = if rho > T::zero() { c(nx / rho, ny / rho) } else { cr(T::one()) };
        Self([cr(cos_half), phase * sin_half])
    }
}

/// Element of SL(2,C).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sl2Element<T = f64>(pub [[C<T>; 2]; 2]);

impl<T: Real> Sl2Element<T> {
    pub fn new(m: [[C<T>; 2]; 2]) -> Result<Self, SpinorError> {
        let e = Self(m);
        let det = e.det();
        let size = m.iter().flatten().fold(T::zero(), |a, z| a.max(z.norm()));
        let scale = (size * size).max(T::one());
        if (det - cr(T::one())).norm() > T::tol(EPS_DET) * scale {
            return Err(SpinorError::NotUnimodular { re: det.re.as_f64(), im: det.im.as_f64() });
        }
        Ok(e)
    }

    pub fn identity() -> Self {
        Self([[cr(T::one()), cr(T::zero())], [cr(T::zero()), cr(T::one())]])
    }

    pub fn det(&self) -> C<T> {
        self.0[0][0] * self.0[1][1] - self.0[0][1] * self.0[1][0]
    }

    pub fn inverse(&self) -> Self {
        let [[a, b], [cc, d]] = self.0;
        Self([[d, -b], [-cc, a]])
    }
}

/// Pauli transform of a 4-vector.
pub fn pauli_transform<T: Real>(v: &FourVector<T>) -> HermitianPair<T> {
    let k = T::lit(PAULI_FACTOR);
    let [x0, x1, x2, x3] = v.0;
    HermitianPair::from_parts(k * (x0 + x3), k * (x0 - x3), c(k * x1, k * x2))
}

/// Inverse of [`pauli_transform`].
pub fn inverse_pauli<T: Real>(h: &HermitianPair<T>) -> Result<FourVector<T>, SpinorError> {
    let h = HermitianPair::new(*h.entries())?;
    let inv = T::one() / T::lit(PAULI_FACTOR);
    let a = h.get(0, 0).re;
    let d = h.get(1, 1).re;
    let off = h.get(0, 1);
    let hk = half::<T>() * inv;
    Ok(FourVector::new(hk * (a + d), inv * off.re, inv * off.im, hk * (a - d)))
}

/// Minkowski quadratic form `η(v, v)`.
pub fn minkowski_norm<T: Real>(v: &FourVector<T>) -> T {
    let [x0, x1, x2, x3] = v.0;
    x0 * x0 - x1 * x1 - x2 * x2 - x3 * x3
}

/// Minkowski bilinear form `η(u, v)`.
pub fn minkowski_dot<T: Real>(u: &FourVector<T>, v: &FourVector<T>) -> T {
    u.0[0] * v.0[0] - u.0[1] * v.0[1] - u.0[2] * v.0[2] - u.0[3] * v.0[3]
}

/// Factors a future null vector as `pauli(v) = ψ ψ†`.
///
/// The phase is fixed so that the first nonzero component of `ψ` is real
/// and positive. The zero vector factors as the zero spinor.
pub fn factor_null<T: Real>(v: &FourVector<T>) -> Result<Spinor<T>, SpinorError> {
    let scale = v.scale();
    let norm = minkowski_norm(v);
    if norm.abs() > T::tol(EPS_NULL) * scale * scale || !norm.is_finite() {
        return Err(SpinorError::NotNull { norm: norm.as_f64() });
    }
    if v.t() < T::zero() {
        return Err(SpinorError::NotFutureDirected);
    }
    if scale == T::zero() {
        return Ok(Spinor::zero());
    }
    let h = pauli_transform(v);
    let h00 = h.get(0, 0).re.max(T::zero());
    let h11 = h.get(1, 1).re.max(T::zero());
    if h00 >= h11 {
        let a = h00.sqrt();
        Ok(Spinor::new(cr(a), h.get(1, 0) / a))
    } else {
        let b = h11.sqrt();
        let first = h.get(0, 1) / b;
        let r = first.norm();
        if r > T::tol(EPS_NULL) * scale {
            // rotate the overall phase so the first component is real positive
            let phase = first.conj() / r;
            Ok(Spinor::new(first * phase, cr(b) * phase))
        } else {
            Ok(Spinor::new(cr(T::zero()), cr(b)))
        }
    }
}

/// `C h C†`.
pub fn sl2_act<T: Real>(cm: &Sl2Element<T>, h: &HermitianPair<T>) -> HermitianPair<T> {
    let m = cm.0;
    let hm = h.entries();
    let mut ch = [[cr(T::zero()); 2]; 2];
    for a in 0..2 {
        for b in 0..2 {
            ch[a][b] = m[a][0] * hm[0][b] + m[a][1] * hm[1][b];
        }
    }
    let mut out = [[cr(T::zero()); 2]; 2];
    for a in 0..2 {
        for b in 0..2 {
            out[a][b] = ch[a][0] * m[b][0].conj() + ch[a][1] * m[b][1].conj();
        }
    }
    // symmetrize away round-off so the result stays Hermitian
    let off = (out[0][1] + out[1][0].conj()) * half::<T>();
    HermitianPair::from_parts(out[0][0].re, out[1][1].re, off)
}

/// Lorentz transformation of a 4-vector induced by `C ∈ SL(2,C)`.
pub fn lorentz_act<T: Real>(cm: &Sl2Element<T>, v: &FourVector<T>) -> FourVector<T> {
    inverse_pauli(&sl2_act(cm, &pauli_transform(v))).expect("sl2_act output is Hermitian")
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn fv(a: [f64; 4]) -> FourVector<f64> {
        FourVector(a)
    }

    fn assert_herm_eq(a: &HermitianPair<f64>, b: [[(f64, f64); 2]; 2]) {
        for i in 0..2 {
            for j in 0..2 {
                assert_abs_diff_eq!(a.get(i, j).re, b[i][j].0, epsilon = 1e-15);
                assert_abs_diff_eq!(a.get(i, j).im, b[i][j].1, epsilon = 1e-15);
            }
        }
    }

    #[test]
    fn pauli_examples() {
        assert_herm_eq(
            &pauli_transform(&fv([1.0, 0.0, 0.0, 0.0])),
            [[(0.5, 0.0), (0.0, 0.0)], [(0.0, 0.0), (0.5, 0.0)]],
        );
        assert_eq!(pauli_transform(&fv([0.0; 4])), HermitianPair::zero());
        assert_herm_eq(
            &pauli_transform(&fv([1.0, 0.0, 0.0, 1.0])),
            [[(1.0, 0.0), (0.0, 0.0)], [(0.0, 0.0), (0.0, 0.0)]],
        );
    }

    #[test]
    fn inverse_pauli_examples() {
        let h = HermitianPair::identity().scaled(0.5);
        assert_eq!(inverse_pauli(&h).unwrap(), fv([1.0, 0.0, 0.0, 0.0]));
        let h = HermitianPair::from_parts(1.0, 0.0, cr(0.0));
        assert_eq!(inverse_pauli(&h).unwrap(), fv([1.0, 0.0, 0.0, 1.0]));
        let h = HermitianPair::from_parts(0.0, 0.0, cr(0.5));
        assert_eq!(inverse_pauli(&h).unwrap(), fv([0.0, 1.0, 0.0, 0.0]));
    }

    #[test]
    fn inverse_pauli_rejects_non_hermitian() {
        let bad = [[cr(1.0), c(0.0, 1.0)], [c(0.0, 1.0), cr(0.0)]];
        assert!(matches!(HermitianPair::new(bad), Err(SpinorError::NonHermitian { .. })));
        let diag_imag = [[c(1.0, 0.5), cr(0.0)], [cr(0.0), cr(1.0)]];
        assert!(HermitianPair::new(diag_imag).is_err());
    }

    #[test]
    fn norm_examples() {
        assert_eq!(minkowski_norm(&fv([1.0, 0.0, 0.0, 0.0])), 1.0);
        assert_eq!(minkowski_norm(&fv([1.0, 0.0, 0.0, 1.0])), 0.0);
        assert_eq!(minkowski_norm(&fv([0.0, 2.0, 0.0, 0.0])), -4.0);
    }

    #[test]
    fn factor_null_examples() {
        let psi = factor_null(&fv([1.0, 0.0, 0.0, 1.0])).unwrap();
        assert_eq!(psi, Spinor::new(cr(1.0), cr(0.0)));
        assert_eq!(factor_null(&fv([0.0; 4])).unwrap(), Spinor::zero());
        let psi = factor_null(&fv([1.0, 1.0, 0.0, 0.0])).unwrap();
        let r = 0.5f64.sqrt();
        assert_abs_diff_eq!(psi.0[0].re, r, epsilon = 1e-15);
        assert_abs_diff_eq!(psi.0[1].re, r, epsilon = 1e-15);
        assert_abs_diff_eq!(psi.0[1].im, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn factor_null_phase_convention_when_second_component_dominates() {
        // direction mostly along -z, with some x/y
        let v = fv([1.0, 0.3, -0.4, -(1.0f64 - 0.25).sqrt()]);
        let psi = factor_null(&v).unwrap();
        assert!(psi.0[0].im.abs() < 1e-15 && psi.0[0].re > 0.0);
        let h = psi.outer();
        let p = pauli_transform(&v);
        assert!((h - p).max_abs() < 1e-12);
    }

    #[test]
    fn factor_null_errors() {
        assert!(matches!(factor_null(&fv([1.0, 0.0, 0.0, 0.0])), Err(SpinorError::NotNull { .. })));
        assert_eq!(factor_null(&fv([-1.0, 0.0, 0.0, 1.0])), Err(SpinorError::NotFutureDirected));
    }

    #[test]
    fn sl2_examples() {
        let h = pauli_transform(&fv([0.3, -1.0, 2.0, 0.7]));
        assert_eq!(sl2_act(&Sl2Element::identity(), &h), h);

        let s = 2f64.sqrt();
        let boost = Sl2Element::new([[cr(s), cr(0.0)], [cr(0.0), cr(1.0 / s)]]).unwrap();
        let out = sl2_act(&boost, &pauli_transform(&fv([1.0, 0.0, 0.0, 1.0])));
        let expect = pauli_transform(&fv([2.0, 0.0, 0.0, 2.0]));
        assert!((out - expect).max_abs() < 1e-15);
    }

    #[test]
    fn sl2_rejects_non_unimodular() {
        let m = [[cr(2.0), cr(0.0)], [cr(0.0), cr(1.0)]];
        assert!(matches!(Sl2Element::new(m), Err(SpinorError::NotUnimodular { .. })));
    }

    pub(crate) fn random_sl2(rng: &mut impl Rng) -> Sl2Element<f64> {
        loop {
            let mut z = || c(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
            let (a, b, cc) = (z(), z(), z());
            if a.norm() < 0.2 {
                continue;
            }
            let d = (cr(1.0) + b * cc) / a;
            return Sl2Element::new([[a, b], [cc, d]]).unwrap();
        }
    }

    #[test]
    fn sl2_preserves_determinant_on_random_pairs() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let cm = random_sl2(&mut rng);
            let v = fv(std::array::from_fn(|_| rng.random_range(-3.0..3.0)));
            let h = pauli_transform(&v);
            let out = sl2_act(&cm, &h);
            let scale = out.max_abs().max(h.max_abs()).powi(2).max(1.0);
            assert!((out.det() - h.det()).norm() <= 1e-10 * scale);
        }
    }

    #[test]
    fn lorentz_action_is_orthochronous() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..100 {
            let cm = random_sl2(&mut rng);
            let n: [f64; 3] = std::array::from_fn(|_| rng.random_range(-1.0..1.0));
            let len = (n[0] * n[0] + n[1] * n[1] + n[2] * n[2]).sqrt();
            let v = fv([1.0, n[0] / len, n[1] / len, n[2] / len]);
            let w = lorentz_act(&cm, &v);
            assert!(w.t() > 0.0);
        }
    }

    #[test]
    fn hopf_direction_round_trip() {
        for n in [[0.0, 0.0, 1.0], [0.0, 0.0, -1.0], [0.6, 0.0, 0.8], [-0.36, 0.48, -0.8]] {
            let xi = CoSpinor::<f64>::from_direction(&n);
            let back = xi.direction();
            for k in 0..3 {
                assert_abs_diff_eq!(back[k], n[k], epsilon = 1e-15);
            }
        }
        assert_eq!(CoSpinor::<f64>::real(1.0, 0.0).direction(), [0.0, 0.0, 1.0]);
    }

    #[test]
    fn works_in_single_precision() {
        let v = FourVector::<f32>::new(1.0, 0.6, 0.0, 0.8);
        let psi = factor_null(&v).unwrap();
        let diff = psi.outer() - pauli_transform(&v);
        assert!(diff.max_abs() < 1e-6);
        let back = inverse_pauli(&pauli_transform(&v)).unwrap();
        assert!((back - v).scale() < 1e-6);
    }
}
