//! Modified Bessel function of order zero and the first-order Marcum Q function.

use crate::error::{Error, Result};
use crate::scalar::Real;

// Below this argument the power series is used; above it the asymptotic
// expansion, whose smallest term (about e^{-2x}) is then far below epsilon.
const SERIES_LIMIT: f64 = 30.0;

/// Power series sum_k (x^2/4)^k / (k!)^2. All terms are positive.
fn i0_series<T: Real>(x: T) -> T {
    let q = x * x / T::lit(4.0);
    let mut term = T::one();
    let mut sum = T::one();
    let mut k = T::zero();
    loop {
        k = k + T::one();
        term = term * q / (k * k);
        sum = sum + term;
        if term <= sum * T::epsilon() * T::lit(0.25) {
            return sum;
        }
    }
}

/// sqrt(2 pi x) e^{-x} I0(x) by the large-argument expansion
/// 1 + 1/(8x) + 9/(2!(8x)^2) + 225/(3!(8x)^3) + ...
fn i0_asymptotic_scaled<T: Real>(x: T) -> T {
    let mut term = T::one();
    let mut sum = T::one();
    let mut m = T::zero();
    loop {
        m = m + T::one();
        let odd = T::lit(2.0) * m - T::one();
        let next = term * odd * odd / (T::lit(8.0) * m * x);
        if next.abs() >= term.abs() {
            return sum;
        }
        term = next;
        sum = sum + term;
        if term.abs() <= sum * T::epsilon() * T::lit(0.25) {
            return sum;
        }
    }
}

/// Exponentially scaled Bessel function `e^{-|x|} I0(x)`; never overflows.
pub fn bessel_i0e<T: Real>(x: T) -> T {
    let x = x.abs();
    if x <= T::lit(SERIES_LIMIT) {
        i0_series(x) * (-x).exp()
    } else {
        i0_asymptotic_scaled(x) / (T::TAU() * x).sqrt()
    }
}

/// Modified Bessel function of the first kind, order zero.
///
/// Fails when the result is not representable in `T`; use [`bessel_i0e`]
/// for large arguments.
pub fn bessel_i0<T: Real>(x: T) -> Result<T> {
    let ax = x.abs();
    let value = if ax <= T::lit(SERIES_LIMIT) {
        i0_series(ax)
    } else {
        // Split e^x to delay overflow of the factor itself.
        let half = (ax / T::lit(2.0)).exp();
        i0_asymptotic_scaled(ax) / (T::TAU() * ax).sqrt() * half * half
    };
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::InvalidParameter {
            name: "x",
            value: x.to_f64_lossy(),
            reason: "I0(x) overflows; use the scaled form",
        })
    }
}

/// `sum_{k>=1} rho^k I_k(x) / I_0(x)`.
///
/// The ratios `I_k / I_{k-1}` come from the backward continued fraction
/// `r_k = 1 / (2k/x + r_{k+1})`, and the sum is accumulated in nested form
/// `rho r_1 (1 + rho r_2 (1 + ...))` in the same backward sweep.
fn bessel_ratio_sum<T: Real>(x: T, rho: T) -> T {
    if x == T::zero() || rho == T::zero() {
        return T::zero();
    }
    let terms = 40 + (10.0 * x.to_f64_lossy().sqrt()).ceil() as usize;
    let two_over_x = T::lit(2.0) / x;
    let mut ratio = T::zero();
    for k in (terms + 1..=terms + 20).rev() {
        ratio = T::one() / (T::from_usize(k).unwrap() * two_over_x + ratio);
    }
    let mut acc = T::zero();
    for k in (1..=terms).rev() {
        ratio = T::one() / (T::from_usize(k).unwrap() * two_over_x + ratio);
        acc = rho * ratio * (T::one() + acc);
    }
    acc
}

/// First-order Marcum Q function `Q1(a, b)`: the probability that a Rician
/// envelope with unit-variance components and noncentrality `a` exceeds `b`.
///
/// Uses the Neumann series in `(a/b)^k I_k(ab)` when `b >= a` and its
/// complement in `(b/a)^k I_k(ab)` otherwise, so neither branch cancels.
/// Negative `a` is folded by symmetry; `b <= 0` gives one.
pub fn marcum_q1<T: Real>(a: T, b: T) -> T {
    let a = a.abs();
    if b <= T::zero() {
        return T::one();
    }
    if a == T::zero() {
        return (-b * b / T::lit(2.0)).exp();
    }
    // e^{-(a^2+b^2)/2} I0(ab), kept finite through the scaled Bessel form.
    let d = a - b;
    let prefactor = (-d * d / T::lit(2.0)).exp() * bessel_i0e(a * b);
    let q = if b >= a {
        prefactor * (T::one() + bessel_ratio_sum(a * b, a / b))
    } else {
        T::one() - prefactor * bessel_ratio_sum(a * b, b / a)
    };
    q.max(T::zero()).min(T::one())
}
