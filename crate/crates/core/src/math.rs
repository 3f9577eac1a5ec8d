//! Floating-point helpers for `no_std`: thin wrappers over `libm` plus
//! compensated summation.

use crate::Complex64;
use core::f64::consts::PI;

pub use libm::{cos, exp, expm1, fabs, floor, lgamma, log, log1p, pow, sin, sqrt, tan};

pub const TAU: f64 = 2.0 * PI;

/// `e^{iφ}`.
#[inline]
pub fn cis(phi: f64) -> Complex64 {
    let (s, c) = libm::sincos(phi);
    Complex64::new(c, s)
}

/// `e^{2πiθ}` with the argument reduced modulo one first, which keeps the
/// phase accurate for large `θ`.
#[inline]
pub fn cis_turns(theta: f64) -> Complex64 {
    let r = theta - libm::floor(theta);
    cis(TAU * r)
}

#[inline]
pub fn abs(z: Complex64) -> f64 {
    libm::hypot(z.re, z.im)
}

#[inline]
pub fn powi(x: f64, n: i32) -> f64 {
    libm::pow(x, n as f64)
}

/// Fractional part in `[0, 1)`.
#[inline]
pub fn frac(x: f64) -> f64 {
    let r = x - libm::floor(x);
    if r >= 1.0 {
        0.0
    } else {
        r
    }
}

/// Neumaier compensated sum.
#[derive(Clone, Copy, Debug, Default)]
pub struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if libm::fabs(self.sum) >= libm::fabs(x) {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

impl core::iter::FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = CompensatedSum::new();
        for x in iter {
            s.add(x);
        }
        s
    }
}

/// Integer square root: the largest `r` with `r² ≤ n`.
pub fn isqrt(n: u64) -> u64 {
    if n < 2 {
        return n;
    }
    let mut r = libm::sqrt(n as f64) as u64;
    while r.checked_mul(r).map_or(true, |sq| sq > n) {
        r -= 1;
    }
    while (r + 1).checked_mul(r + 1).is_some_and(|sq| sq <= n) {
        r += 1;
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn isqrt_exact_on_squares_and_neighbours() {
        for r in [0u64, 1, 2, 3, 10, 4095, 65_535, 4_294_967_295] {
            let sq = r * r;
            assert_eq!(isqrt(sq), r);
            if sq > 0 {
                assert_eq!(isqrt(sq - 1), r - 1);
            }
        }
        assert_eq!(isqrt(u64::MAX), 4_294_967_295);
    }

    #[test]
    fn compensated_sum_recovers_small_terms() {
        let mut s = CompensatedSum::new();
        s.add(1.0);
        for _ in 0..10 {
            s.add(1e-16);
        }
        s.add(-1.0);
        assert!((s.value() - 1e-15).abs() < 1e-20);
    }

    #[test]
    fn cis_turns_reduces_argument() {
        let z = cis_turns(1e9 + 0.25);
        assert!((z.re).abs() < 1e-6 && (z.im - 1.0).abs() < 1e-9);
    }
}
