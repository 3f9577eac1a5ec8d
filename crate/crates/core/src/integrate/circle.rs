//! `∫₀¹ |Σ_k c_k e^{2πikθ}| dθ` for one-variable polynomials by panel
//! quadrature. `|P|` is smooth except at zeros of `P`, so breakpoints are put
//! at every numerically located local minimum of `|P|²`.

use crate::math::{abs, cis_turns, frac};
use crate::quad::{self, Quadrature};
use crate::{Complex64, Error, Result};
use alloc::vec::Vec;

const TOL: f64 = 1e-12;

/// `P(θ)` by powers of `e^{2πiθ}` from the lowest exponent.
fn eval(ks: &[i64], cs: &[Complex64], theta: f64) -> Complex64 {
    let w = cis_turns(theta);
    let lo = ks[0];
    let mut p = cis_turns(frac(lo as f64 * theta));
    let mut k = lo;
    let mut acc = Complex64::new(0.0, 0.0);
    for (&kk, &c) in ks.iter().zip(cs) {
        while k < kk {
            p *= w;
            k += 1;
        }
        acc += c * p;
    }
    acc
}

/// Golden-section minimization of `f` on `[a, b]`.
fn golden_min<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64) -> f64 {
    let g = 0.5 * (crate::math::sqrt(5.0) - 1.0);
    let mut x1 = b - g * (b - a);
    let mut x2 = a + g * (b - a);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..80 {
        if b - a < 1e-15 {
            break;
        }
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - g * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + g * (b - a);
            f2 = f(x2);
        }
    }
    0.5 * (a + b)
}

/// The circle average of `|Σ c_k e^{2πikθ}|`; `ks` strictly increasing.
pub fn l1_circle(ks: &[i64], cs: &[Complex64]) -> Result<Quadrature> {
    if ks.len() != cs.len() || ks.is_empty() {
        return Err(Error::param("one coefficient per frequency, at least one term"));
    }
    if ks.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::param("frequencies must be strictly increasing"));
    }
    let nonzero = cs.iter().filter(|c| c.norm_sqr() > 0.0).count();
    if nonzero <= 1 {
        let v = cs.iter().map(|&c| abs(c)).sum();
        return Ok(Quadrature { value: v, abs_err: 0.0, evals: 0 });
    }
    let span = (ks[ks.len() - 1] - ks[0]) as usize;
    let grid = (16 * (span + 1)).max(64);
    let h = 1.0 / grid as f64;
    let sq = |t: f64| eval(ks, cs, t).norm_sqr();
    let vals: Vec<f64> = (0..grid).map(|i| sq(i as f64 * h)).collect();
    let mut pts: Vec<f64> = Vec::new();
    for i in 0..grid {
        let (prev, next) = (vals[(i + grid - 1) % grid], vals[(i + 1) % grid]);
        if vals[i] <= prev && vals[i] < next {
            let t = golden_min(sq, (i as f64 - 1.0) * h, (i as f64 + 1.0) * h);
            pts.push(frac(t));
        }
    }
    pts.push(0.0);
    pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    pts.dedup_by(|a, b| *a - *b < 1e-14);
    pts.push(1.0);
    let mut f = |t: f64| abs(eval(ks, cs, t));
    let q = quad::adaptive_breakpoints(&mut f, &pts, TOL, 60);
    Ok(q)
}
