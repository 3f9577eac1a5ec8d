//! Dirichlet kernels and their Lebesgue constants.
//!
//! `D_m(t) = Σ_{k=-m}^{m} e^{-ikt}` and `D_m^+(t) = Σ_{k=0}^{m} e^{-ikt}`;
//! `L_m` and `L_m^+` are their normalized `L¹` norms over `[0, 2π]`.

use crate::math::{cis, fabs, sin, CompensatedSum};
use crate::quad::{self, Quadrature};
use crate::{Complex64, Error, Result};
use core::f64::consts::PI;

/// Absolute accuracy promised by [`lebesgue_constant`].
pub const ACCURACY: f64 = 1e-10;

// per-panel tolerance, in units of the final normalized value
const PANEL_TOL: f64 = 1e-12;
// below this |sin(t/2)| the closed forms are replaced by the explicit sums
const SINGULAR: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum KernelKind {
    Symmetric,
    Analytic,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct KernelSpec {
    pub m: u64,
    pub kind: KernelKind,
}

impl KernelSpec {
    pub fn symmetric(m: u64) -> Self {
        KernelSpec { m, kind: KernelKind::Symmetric }
    }

    pub fn analytic(m: u64) -> Self {
        KernelSpec { m, kind: KernelKind::Analytic }
    }
}

/// `D_m(t)` (real, returned with zero imaginary part) or `D_m^+(t)`.
pub fn kernel_eval(spec: KernelSpec, t: f64) -> Complex64 {
    let m = spec.m as f64;
    let s = sin(0.5 * t);
    match spec.kind {
        KernelKind::Symmetric => {
            if fabs(s) < SINGULAR {
                let v: CompensatedSum = (1..=spec.m).map(|k| 2.0 * crate::math::cos(k as f64 * t)).collect();
                Complex64::new(1.0 + v.value(), 0.0)
            } else {
                Complex64::new(sin((m + 0.5) * t) / s, 0.0)
            }
        }
        KernelKind::Analytic => {
            if fabs(s) < SINGULAR {
                let mut acc = Complex64::new(0.0, 0.0);
                for k in 0..=spec.m {
                    acc += cis(-(k as f64) * t);
                }
                acc
            } else {
                cis(-0.5 * m * t) * (sin(0.5 * (m + 1.0) * t) / s)
            }
        }
    }
}

/// `L_m` or `L_m^+` with its error estimate; fails when the estimate
/// exceeds [`ACCURACY`].
pub fn lebesgue_constant(spec: KernelSpec) -> Result<Quadrature> {
    let q = match spec.kind {
        KernelKind::Symmetric => symmetric_l1(spec.m),
        KernelKind::Analytic => analytic_l1(spec.m),
    };
    if !(q.abs_err <= ACCURACY) || !q.value.is_finite() {
        return Err(Error::Accuracy { achieved: q.abs_err, target: ACCURACY });
    }
    Ok(q)
}

/// `L_m = (1/2π)∫|D_m|`.
pub fn lebesgue_l(m: u64) -> Result<f64> {
    lebesgue_constant(KernelSpec::symmetric(m)).map(|q| q.value)
}

/// `L_m^+ = (1/2π)∫|D_m^+|`.
pub fn lebesgue_lplus(m: u64) -> Result<f64> {
    lebesgue_constant(KernelSpec::analytic(m)).map(|q| q.value)
}

/// `L_m` through the substitution `t = 2π(k + u)/N`, `N = 2m + 1`, on each
/// arc between consecutive zeros of `sin(Nt/2)` in `[0, π]`:
///
/// `L_m = (2/N) Σ_k ∫ sin(πu) / sin(π(k + u)/N) du`,
///
/// with `u ∈ [0, 1]` for `k < m` and `u ∈ [0, ½]` for the last arc.
fn symmetric_l1(m: u64) -> Quadrature {
    if m == 0 {
        return Quadrature { value: 1.0, abs_err: 0.0, evals: 0 };
    }
    let n = (2 * m + 1) as f64;
    let scale = 2.0 / n;
    let tol = PANEL_TOL / scale;
    let rule = quad::unit_rule();
    let mut numer = [0.0; 15];
    for i in 0..15 {
        numer[i] = sin(PI * rule.x[i]);
    }
    let f = |k: f64, u: f64| {
        let d = sin(PI * (k + u) / n);
        if k == 0.0 && u < 1e-6 {
            // sin(πu)/sin(πu/N) → N
            let a = PI * u;
            n * (1.0 - a * a / 6.0) / (1.0 - a * a / (6.0 * n * n))
        } else {
            sin(PI * u) / d
        }
    };
    let mut total = CompensatedSum::new();
    let mut err = 0.0;
    let mut evals = 0;
    let mut fv = [0.0; 15];
    for k in 0..m {
        let kf = k as f64;
        for i in 0..15 {
            fv[i] = numer[i] / sin(PI * (kf + rule.x[i]) / n);
        }
        let (v, e) = quad::gk15_values(&rule, &fv, 1.0);
        evals += 15;
        if e <= tol {
            total.add(v);
            err += e;
        } else {
            let q = quad::adaptive(&mut |u| f(kf, u), 0.0, 1.0, tol, 40);
            total.add(q.value);
            err += q.abs_err;
            evals += q.evals;
        }
    }
    let q = quad::adaptive(&mut |u| f(m as f64, u), 0.0, 0.5, tol, 40);
    total.add(q.value);
    err += q.abs_err;
    evals += q.evals;
    Quadrature { value: scale * total.value(), abs_err: scale * err, evals }
}

/// `L_m^+` directly in `t` over the full period, panels between the zeros
/// `t_k = 2πk/(m + 1)` of `sin((m + 1)t/2)`. Inside panel `k` the numerator is
/// taken as `|sin((m + 1)s/2)|` with `s = t − t_k`, which avoids reducing a
/// large argument.
fn analytic_l1(m: u64) -> Quadrature {
    if m == 0 {
        return Quadrature { value: 1.0, abs_err: 0.0, evals: 0 };
    }
    let mp1 = (m + 1) as f64;
    let width = 2.0 * PI / mp1;
    let scale = 1.0 / (2.0 * PI);
    let tol = PANEL_TOL / scale;
    let spec = KernelSpec::analytic(m);
    let mut total = CompensatedSum::new();
    let mut err = 0.0;
    let mut evals = 0;
    for k in 0..=m {
        let tk = k as f64 * width;
        let mut f = |s: f64| {
            let t = tk + s;
            let d = sin(0.5 * t);
            if fabs(d) < SINGULAR {
                crate::math::abs(kernel_eval(spec, t))
            } else {
                fabs(sin(0.5 * mp1 * s) / d)
            }
        };
        let q = quad::adaptive(&mut f, 0.0, width, tol, 40);
        total.add(q.value);
        err += q.abs_err;
        evals += q.evals;
    }
    Quadrature { value: scale * total.value(), abs_err: scale * err, evals }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::{log, tan};

    /// Closed-form oracle `L_m = 1/N + (2/π) Σ_{k=1}^m tan(kπ/N)/k`, `N = 2m+1`.
    fn fejer(m: u64) -> f64 {
        let n = (2 * m + 1) as f64;
        1.0 / n + (2.0 / PI) * (1..=m).map(|k| tan(k as f64 * PI / n) / k as f64).sum::<f64>()
    }

    #[test]
    fn kernel_values() {
        assert_eq!(kernel_eval(KernelSpec::symmetric(0), 0.7).re, 1.0);
        assert!((kernel_eval(KernelSpec::symmetric(0), 0.7).re - 1.0).abs() < 1e-15);
        assert!((kernel_eval(KernelSpec::symmetric(2), 0.0).re - 5.0).abs() < 1e-15);
        assert!(crate::math::abs(kernel_eval(KernelSpec::analytic(1), PI)) < 1e-15);
        let t = 0.3;
        let direct: Complex64 = (0..=4).map(|k| cis(-(k as f64) * t)).sum();
        assert!(crate::math::abs(kernel_eval(KernelSpec::analytic(4), t) - direct) < 1e-13);
    }

    #[test]
    fn small_constants() {
        assert_eq!(lebesgue_l(0).unwrap(), 1.0);
        assert_eq!(lebesgue_lplus(0).unwrap(), 1.0);
        assert!((lebesgue_l(1).unwrap() - 1.435_991_124_176_917_4).abs() < 1e-12);
        assert!((lebesgue_lplus(1).unwrap() - 4.0 / PI).abs() < 1e-12);
    }

    #[test]
    fn symmetric_matches_closed_form() {
        for m in [1u64, 2, 3, 7, 50, 333, 2000] {
            let q = lebesgue_constant(KernelSpec::symmetric(m)).unwrap();
            assert!((q.value - fejer(m)).abs() < 1e-11, "m={m}: {} vs {}", q.value, fejer(m));
        }
    }

    #[test]
    fn doubled_analytic_equals_symmetric() {
        for m in [1u64, 2, 5, 17, 100] {
            let a = lebesgue_lplus(2 * m).unwrap();
            let b = lebesgue_l(m).unwrap();
            assert!((a - b).abs() < 1e-11, "m={m}");
        }
    }

    #[test]
    fn standard_bounds() {
        for m in [1u64, 10, 100, 1000] {
            let l = lebesgue_l(m).unwrap();
            assert!(4.0 / (PI * PI) * log((m + 1) as f64) < l && l < 3.0 + log(m as f64));
        }
    }
}
