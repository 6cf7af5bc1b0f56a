//! Double-exponential (tanh-sinh) quadrature on a finite interval.
//!
//! Abscissae are generated as offsets from the nearer endpoint, so
//! integrable endpoint singularities such as `t^(-2/3)` at `t = 0` are
//! resolved down to the smallest positive scalar.

use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult<T> {
    pub value: T,
    pub error_estimate: T,
    pub converged: bool,
}

/// Integrates `f` over `[a, b]` to relative accuracy `rel_tol`.
pub fn tanh_sinh<T: Real>(f: impl Fn(T) -> T, a: T, b: T, rel_tol: T) -> QuadResult<T> {
    if a == b {
        return QuadResult { value: T::zero(), error_estimate: T::zero(), converged: true };
    }
    if b < a {
        let r = tanh_sinh(f, b, a, rel_tol);
        return QuadResult { value: -r.value, ..r };
    }
    let half_width = T::lit(0.5) * (b - a);
    let mid = a + half_width;
    let pi_2 = T::FRAC_PI_2();
    let u_max = T::lit(6.5);

    // contribution of abscissa u ≥ 0 (both mirrored points for u > 0)
    let term = |u: T| -> Option<T> {
        let s = pi_2 * u.sinh();
        let e2s = (s + s).exp();
        if !e2s.is_finite() {
            return None;
        }
        let delta = (half_width + half_width) / (T::one() + e2s);
        if delta <= T::zero() {
            return None;
        }
        let cosh_s = s.cosh();
        let w = half_width * pi_2 * u.cosh() / (cosh_s * cosh_s);
        if u == T::zero() {
            return Some(w * f(mid));
        }
        let left = f(a + delta);
        let right = f(b - delta);
        let v = w * (left + right);
        v.is_finite().then_some(v)
    };

    let mut h = T::lit(0.5);
    let mut estimate = {
        let mut sum = term(T::zero()).unwrap_or(T::zero());
        let mut k = 1usize;
        loop {
            let u = h * T::count(k);
            if u > u_max {
                break;
            }
            match term(u) {
                Some(v) => sum = sum + v,
                None => break,
            }
            k += 1;
        }
        sum * h
    };
    let mut err = T::infinity();
    for _ in 0..10 {
        // refine: add odd multiples of h/2
        let h2 = h * T::lit(0.5);
        let mut extra = T::zero();
        let mut k = 1usize;
        loop {
            let u = h2 * T::count(k);
            if u > u_max {
                break;
            }
            match term(u) {
                Some(v) => extra = extra + v,
                None => break,
            }
            k += 2;
        }
        let next = T::lit(0.5) * estimate + extra * h2;
        err = (next - estimate).abs();
        estimate = next;
        h = h2;
        if err <= rel_tol * estimate.abs() {
            return QuadResult { value: estimate, error_estimate: err, converged: true };
        }
    }
    QuadResult { value: estimate, error_estimate: err, converged: false }
}
