//! Closed forms, two-sided brackets and asymptotic reference curves.

use crate::kernels::KernelSpec;
use crate::math::{exp, expm1, lgamma, log, log1p, powi, sqrt};
use crate::quad::{self, Quadrature};
use crate::{Backend, Error, Result, Sequential};
use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::PI;

/// `4/π²`, the slope of `L_m` against `log m`.
pub const LOZINSKI_SLOPE: f64 = 4.0 / (PI * PI);

// neglected remainder of the Bessel tail
const BESSEL_TAIL_TOL: f64 = 1e-11;
const BESSEL_PANEL_TOL: f64 = 1e-13;
const BESSEL_MAX_CUT: f64 = 1e9;

/// `λ(ℓ₂ⁿ(ℂ)) = (√π/2)·n!/Γ(n + ½)`.
pub fn proj_l2_complex(n: u64) -> Result<f64> {
    positive(n)?;
    let nf = n as f64;
    Ok(0.5 * sqrt(PI) * exp(lgamma(nf + 1.0) - lgamma(nf + 0.5)))
}

/// `λ(ℓ₂ⁿ(ℝ)) = (2/√π)·Γ((n+2)/2)/Γ((n+1)/2)`.
pub fn proj_l2_real(n: u64) -> Result<f64> {
    positive(n)?;
    let nf = n as f64;
    Ok(2.0 / sqrt(PI) * exp(lgamma(0.5 * (nf + 2.0)) - lgamma(0.5 * (nf + 1.0))))
}

/// `λ(ℓ₁ⁿ(ℝ))`: `λ(ℓ₂ⁿ(ℝ))` for odd `n`, `λ(ℓ₂ⁿ⁻¹(ℝ))` for even `n`.
pub fn proj_l1_real(n: u64) -> Result<f64> {
    positive(n)?;
    proj_l2_real(if n % 2 == 0 { n - 1 } else { n })
}

/// `λ(ℓ₁ⁿ(ℂ)) = ∫₀^∞ (1 − J₀(t)ⁿ)/t² dt`.
pub fn proj_l1_complex(n: u64) -> Result<f64> {
    proj_l1_complex_quad(n).map(|q| q.value)
}

/// `J₀(t) − 1` by its ascending series, for `|t| ≤ 1`.
fn j0m1_series(t: f64) -> f64 {
    let q = 0.25 * t * t;
    let mut term = 1.0;
    let mut sum = 0.0;
    for k in 1..=12 {
        term *= -q / (k * k) as f64;
        sum += term;
    }
    sum
}

/// The Bessel integral with its error estimate: adaptive panels on
/// `[0, T]` (geometric near the origin, width π beyond 8), the exact
/// `∫_T^∞ dt/t² = 1/T`, and `T` chosen so that the bound
/// `|∫_T^∞ J₀ⁿ/t²| ≤ (2/π)^{n/2} T^{-(n/2+1)}/(n/2+1)`
/// from `|J₀(t)| ≤ √(2/(πt))` is below `1e-11`.
pub fn proj_l1_complex_quad(n: u64) -> Result<Quadrature> {
    positive(n)?;
    if n == 1 {
        // one-dimensional spaces are 1-complemented
        return Ok(Quadrature { value: 1.0, abs_err: 0.0, evals: 0 });
    }
    let nf = n as f64;
    let half = 0.5 * nf;
    let tail = |t: f64| exp(half * log(2.0 / PI) - (half + 1.0) * log(t)) / (half + 1.0);
    let mut cut = 8.0;
    while tail(cut) > BESSEL_TAIL_TOL {
        cut *= 1.25;
        if cut > BESSEL_MAX_CUT {
            return Err(Error::Accuracy { achieved: tail(cut), target: BESSEL_TAIL_TOL });
        }
    }
    let mut f = |t: f64| {
        let one_minus = if t <= 1.0 {
            -expm1(nf * log1p(j0m1_series(t)))
        } else {
            1.0 - powi(libm::j0(t), n.min(i32::MAX as u64) as i32)
        };
        one_minus / (t * t)
    };
    let mut pts: Vec<f64> = Vec::new();
    pts.push(0.0);
    let mut s = (2.0 / sqrt(nf)).min(1.0);
    while s < 8.0 {
        pts.push(s);
        s *= 2.0;
    }
    let mut t = 8.0;
    while t < cut {
        pts.push(t);
        t += PI;
    }
    pts.push(t);
    let mut total = crate::math::CompensatedSum::new();
    let mut err = 0.0;
    let mut evals = 0;
    for w in pts.windows(2) {
        let q = quad::adaptive(&mut f, w[0], w[1], BESSEL_PANEL_TOL, 40);
        total.add(q.value);
        err += q.abs_err;
        evals += q.evals;
    }
    total.add(1.0 / t);
    Ok(Quadrature { value: total.value(), abs_err: err + tail(t), evals })
}

/// `λ(X) ≤ √n` for every `n`-dimensional `X`.
pub fn kadets_snobar(n: u64) -> f64 {
    sqrt(n as f64)
}

/// `√n·(1 − n⁻²·(1/5)^{2n+11})`.
///
/// For `n ≥ 6` the correction is below one ulp of `√n` and the returned value
/// rounds to `√n`; [`lewis_gap`] gives the difference itself.
pub fn lewis_bound(n: u64) -> Result<f64> {
    if n < 2 {
        return Err(Error::param("the Lewis bound needs n ≥ 2"));
    }
    Ok(kadets_snobar(n) - lewis_gap(n)?)
}

/// `√n − lewis_bound(n) = n^{-3/2}·5^{-(2n+11)}`, computed in log space.
pub fn lewis_gap(n: u64) -> Result<f64> {
    if n < 2 {
        return Err(Error::param("the Lewis bound needs n ≥ 2"));
    }
    let nf = n as f64;
    Ok(exp(-1.5 * log(nf) - (2.0 * nf + 11.0) * log(5.0)))
}

/// A two-sided enclosure with the name of the result it comes from.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Bracket {
    pub lo: f64,
    pub hi: f64,
    pub source: &'static str,
}

impl Bracket {
    pub fn new(lo: f64, hi: f64, source: &'static str) -> Result<Self> {
        if !(0.0 <= lo && lo <= hi) {
            return Err(Error::param(format!("invalid bracket [{lo}, {hi}]")));
        }
        Ok(Bracket { lo, hi, source })
    }

    /// `lo − slack ≤ v ≤ hi + slack`.
    pub fn contains(&self, v: f64, slack: f64) -> bool {
        self.lo - slack <= v && v <= self.hi + slack
    }

    /// The tighter of two brackets; `None` if they are disjoint.
    pub fn intersect(&self, other: &Bracket) -> Option<Bracket> {
        let lo = self.lo.max(other.lo);
        let hi = self.hi.min(other.hi);
        if lo > hi {
            return None;
        }
        let source = if self.hi - self.lo <= other.hi - other.lo { self.source } else { other.source };
        Some(Bracket { lo, hi, source })
    }
}

/// `[√N/C₂, √N]` for `N` characters forming a `Λ(2)` set with constant `C₂`.
pub fn lambda2_bracket(n: u64, c2: f64) -> Result<Bracket> {
    positive(n)?;
    if !(c2 >= 1.0) || !c2.is_finite() {
        return Err(Error::param(format!("a Λ(2) constant is at least 1, got {c2}")));
    }
    let hi = sqrt(n as f64);
    Bracket::new(hi / c2, hi, "lambda2")
}

/// `∏ L_{d_j}` for the box `∏[-d_j, d_j]`, or `∏ L⁺_{d_j}` for `∏[0, d_j]`.
pub fn proj_box_exact(d: &[u64], analytic: bool) -> Result<f64> {
    proj_box_exact_with(d, analytic, &Sequential)
}

pub fn proj_box_exact_with<B: Backend>(d: &[u64], analytic: bool, backend: &B) -> Result<f64> {
    let mut prod = 1.0;
    for &dj in d {
        let spec = if analytic { KernelSpec::analytic(dj) } else { KernelSpec::symmetric(dj) };
        prod *= if dj == 0 { 1.0 } else { backend.lebesgue(spec)? };
    }
    Ok(prod)
}

/// The asymptotic reference curves used by the experiments.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Curve {
    /// `(4/π²) log(x + 1)`.
    Lozinski,
    /// `√x / (log log x)^{1/4}`.
    Harper,
    /// `(√π/2) √x`.
    Logp,
    /// `(x / log x)·(log log x)^{m−1}/(m−1)!`.
    Landau { m: u32 },
    /// `x^{(n−1)/2}`.
    Babenko { n: u32 },
    /// `(4/π²)ⁿ logⁿ x`.
    LimitFormula { n: u32 },
}

impl Curve {
    pub fn name(&self) -> &'static str {
        match self {
            Curve::Lozinski => "lozinski",
            Curve::Harper => "harper",
            Curve::Logp => "logp",
            Curve::Landau { .. } => "landau",
            Curve::Babenko { .. } => "babenko",
            Curve::LimitFormula { .. } => "limit_formula",
        }
    }

    /// Parses a curve name; `param` is `m` for landau and `n` for babenko /
    /// limit_formula.
    pub fn parse(name: &str, param: Option<u32>) -> Result<Self> {
        let need = |p: Option<u32>| p.ok_or_else(|| Error::param(format!("curve {name} needs a parameter")));
        Ok(match name {
            "lozinski" => Curve::Lozinski,
            "harper" => Curve::Harper,
            "logp" => Curve::Logp,
            "landau" => Curve::Landau { m: need(param)? },
            "babenko" => Curve::Babenko { n: need(param)? },
            "limit_formula" | "limit-formula" => Curve::LimitFormula { n: need(param)? },
            _ => return Err(Error::param(format!("unknown curve `{name}`"))),
        })
    }
}

/// Evaluates a reference curve at `x`.
pub fn reference_curve(curve: Curve, x: f64) -> Result<f64> {
    let domain = |ok: bool| {
        if ok {
            Ok(())
        } else {
            Err(Error::param(format!("x = {x} is outside the domain of the {} curve", curve.name())))
        }
    };
    match curve {
        Curve::Lozinski => {
            domain(x >= 0.0)?;
            Ok(LOZINSKI_SLOPE * log(x + 1.0))
        }
        Curve::Harper => {
            domain(x > core::f64::consts::E)?;
            Ok(sqrt(x) / libm::pow(log(log(x)), 0.25))
        }
        Curve::Logp => {
            domain(x >= 0.0)?;
            Ok(0.5 * sqrt(PI) * sqrt(x))
        }
        Curve::Landau { m } => {
            domain(m >= 1 && if m == 1 { x > 1.0 } else { x > core::f64::consts::E })?;
            let ll = if m == 1 { 1.0 } else { powi(log(log(x)), m as i32 - 1) };
            Ok(x / log(x) * ll / exp(lgamma(m as f64)))
        }
        Curve::Babenko { n } => {
            domain(n >= 1 && x >= 0.0)?;
            Ok(libm::pow(x, 0.5 * (n as f64 - 1.0)))
        }
        Curve::LimitFormula { n } => {
            domain(x >= 1.0)?;
            Ok(powi(LOZINSKI_SLOPE, n as i32) * powi(log(x), n as i32))
        }
    }
}

fn positive(n: u64) -> Result<()> {
    if n == 0 {
        Err(Error::param("dimension must be at least 1"))
    } else {
        Ok(())
    }
}
