//! Spaces `H_∞^J(ω)` of Dirichlet polynomials `Σ_{n∈J} a_n e^{-ω_n s}` and
//! their projection constants.
//!
//! For the frequencies with known arithmetic structure the space is
//! isometric to a space of trigonometric polynomials on a finite torus, via
//! the Bohr transform: `ω = (n)` lifts to `𝕋` with `n ↦ n`, `ω = (log n)`
//! lifts to `𝕋^{π(max J)}` with `n = 𝔭^α ↦ α`, and `ℚ`-independent
//! frequencies lift to the standard basis of `𝕋^{|J|}`. Other frequencies
//! are handled by time averages along the real line.

use crate::constants::{self, Bracket};
use crate::indexsets::{Family, IndexSet, MultiIndex};
use crate::integrate::{self, ErgodicEstimate, IntegralEstimate, McConfig, Method, TrigPolynomial};
use crate::kernels::KernelSpec;
use crate::math::{abs, log, sqrt};
use crate::{Backend, Complex64, Error, Result};
use alloc::format;
use alloc::vec::Vec;

/// Horizon of the time average when none is given.
pub const DEFAULT_HORIZON: f64 = 1e4;
/// Relative standard error the sampling engines aim for by default.
pub const DEFAULT_REL_STDERR: f64 = 0.005;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FrequencyKind {
    /// `ω_n = n`, `n ≥ 0`.
    Natural,
    /// `ω_n = log n`, `n ≥ 1`.
    LogIntegers,
    /// `ω_n = log 𝔭_n`, `n ≥ 1`.
    LogPrimes,
    /// Explicit values declared linearly independent over `ℚ`.
    QIndependent,
    /// Explicit values without declared structure.
    Explicit,
}

/// A frequency `ω = (ω_n)`. Explicit values are indexed from `n = 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct Frequency {
    kind: FrequencyKind,
    values: Vec<f64>,
    b2: bool,
}

impl Frequency {
    pub fn natural() -> Self {
        Frequency { kind: FrequencyKind::Natural, values: Vec::new(), b2: false }
    }

    pub fn log_integers() -> Self {
        Frequency { kind: FrequencyKind::LogIntegers, values: Vec::new(), b2: false }
    }

    pub fn log_primes() -> Self {
        Frequency { kind: FrequencyKind::LogPrimes, values: Vec::new(), b2: false }
    }

    pub fn q_independent(values: Vec<f64>) -> Result<Self> {
        check_values(&values)?;
        Ok(Frequency { kind: FrequencyKind::QIndependent, values, b2: false })
    }

    pub fn explicit(values: Vec<f64>) -> Result<Self> {
        check_values(&values)?;
        Ok(Frequency { kind: FrequencyKind::Explicit, values, b2: false })
    }

    /// Declares the characters `h_{ω_n}` a `B₂` set (not verified).
    pub fn with_b2(mut self, b2: bool) -> Self {
        self.b2 = b2;
        self
    }

    pub fn kind(&self) -> FrequencyKind {
        self.kind
    }

    pub fn is_b2(&self) -> bool {
        self.b2
    }

    pub fn explicit_values(&self) -> &[f64] {
        &self.values
    }

    pub fn label(&self) -> &'static str {
        match self.kind {
            FrequencyKind::Natural => "natural",
            FrequencyKind::LogIntegers => "logn",
            FrequencyKind::LogPrimes => "logp",
            FrequencyKind::QIndependent => "qindep",
            FrequencyKind::Explicit => "explicit",
        }
    }

    fn first_index(&self) -> u64 {
        if self.kind == FrequencyKind::Natural {
            0
        } else {
            1
        }
    }

    /// `ω_n` for each `n` in `support`.
    pub fn values_at<B: Backend>(&self, support: &[u64], backend: &B) -> Result<Vec<f64>> {
        match self.kind {
            FrequencyKind::Natural => Ok(support.iter().map(|&n| n as f64).collect()),
            FrequencyKind::LogIntegers => Ok(support.iter().map(|&n| log(n as f64)).collect()),
            FrequencyKind::LogPrimes => {
                let k = support.iter().copied().max().unwrap_or(1);
                let sieve = backend.sieve(nth_prime_bound(k));
                support.iter().map(|&n| sieve.nth_prime(n as usize).map(|p| log(p as f64))).collect()
            }
            FrequencyKind::QIndependent | FrequencyKind::Explicit => support
                .iter()
                .map(|&n| {
                    self.values.get(n as usize - 1).copied().ok_or_else(|| {
                        Error::Input(format!("no frequency value for n = {n} ({} values given)", self.values.len()))
                    })
                })
                .collect(),
        }
    }
}

fn check_values(values: &[f64]) -> Result<()> {
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::Input("non-finite frequency value".into()));
    }
    if values.iter().any(|&v| v < 0.0) {
        return Err(Error::Input("frequencies must be non-negative".into()));
    }
    if values.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Input("frequencies must be strictly increasing".into()));
    }
    Ok(())
}

/// An upper bound for the `k`-th prime (Rosser).
fn nth_prime_bound(k: u64) -> u64 {
    if k < 6 {
        return 13;
    }
    let kf = k as f64;
    (kf * (log(kf) + log(log(kf)))) as u64 + 1
}

/// `H_∞^J(ω)`: a frequency, a finite support and optional coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct DirichletSpace {
    frequency: Frequency,
    support: Vec<u64>,
    coefficients: Option<Vec<Complex64>>,
}

impl DirichletSpace {
    /// The support is sorted; duplicates and indices the frequency does not
    /// define are rejected.
    pub fn new(frequency: Frequency, mut support: Vec<u64>) -> Result<Self> {
        if support.is_empty() {
            return Err(Error::param("the support must be non-empty"));
        }
        support.sort_unstable();
        if support.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Input("duplicate index in the support".into()));
        }
        if support[0] < frequency.first_index() {
            return Err(Error::Input(format!("{} frequencies are indexed from n = 1", frequency.label())));
        }
        if matches!(frequency.kind, FrequencyKind::QIndependent | FrequencyKind::Explicit)
            && support[support.len() - 1] > frequency.values.len() as u64
        {
            return Err(Error::Input(format!(
                "support reaches n = {} but only {} frequency values are given",
                support[support.len() - 1],
                frequency.values.len()
            )));
        }
        Ok(DirichletSpace { frequency, support, coefficients: None })
    }

    /// Attaches coefficients aligned with the sorted support.
    pub fn with_coefficients(mut self, coefficients: Vec<Complex64>) -> Result<Self> {
        if coefficients.len() != self.support.len() {
            return Err(Error::Dimension { expected: self.support.len(), got: coefficients.len() });
        }
        if coefficients.iter().all(|c| c.norm_sqr() == 0.0) {
            return Err(Error::param("at least one coefficient must be nonzero"));
        }
        self.coefficients = Some(coefficients);
        Ok(self)
    }

    pub fn frequency(&self) -> &Frequency {
        &self.frequency
    }

    pub fn support(&self) -> &[u64] {
        &self.support
    }

    pub fn coefficients(&self) -> Option<&[Complex64]> {
        self.coefficients.as_deref()
    }

    pub fn len(&self) -> usize {
        self.support.len()
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }

    /// Coefficients, all ones when none are attached.
    pub fn coefficient_vector(&self) -> Vec<Complex64> {
        self.coefficients.clone().unwrap_or_else(|| alloc::vec![Complex64::new(1.0, 0.0); self.support.len()])
    }

    fn all_ones(&self) -> bool {
        self.coefficients.as_ref().is_none_or(|c| c.iter().all(|&z| z == Complex64::new(1.0, 0.0)))
    }

    pub fn frequency_values(&self) -> Result<Vec<f64>> {
        self.frequency.values_at(&self.support, &crate::Sequential)
    }

    pub fn frequency_values_with<B: Backend>(&self, backend: &B) -> Result<Vec<f64>> {
        self.frequency.values_at(&self.support, backend)
    }

    /// `J = {a, a+1, …, b}`.
    pub fn contiguous(&self) -> Option<(u64, u64)> {
        let (a, b) = (self.support[0], self.support[self.support.len() - 1]);
        (b - a + 1 == self.support.len() as u64).then_some((a, b))
    }

    /// `(‖c‖₂, max|c|)`.
    fn coefficient_norms(&self) -> (f64, f64) {
        let c = self.coefficient_vector();
        (sqrt(c.iter().map(|z| z.norm_sqr()).sum()), c.iter().map(|&z| abs(z)).fold(0.0, f64::max))
    }
}

/// The lifted index set of a space with structured frequency.
pub fn bohr_transform(space: &DirichletSpace) -> Result<IndexSet> {
    bohr_transform_with(space, &crate::Sequential)
}

pub fn bohr_transform_with<B: Backend>(space: &DirichletSpace, backend: &B) -> Result<IndexSet> {
    let j = &space.support;
    match space.frequency.kind {
        FrequencyKind::Natural => IndexSet::from_integers(j.iter().map(|&n| n as i64)),
        FrequencyKind::LogIntegers => {
            let x = j[j.len() - 1];
            let sieve = backend.sieve(x.max(2));
            let dim = sieve.prime_pi(x)?;
            let elems = j.iter().map(|&n| sieve.bohr_lift(n, dim)).collect::<Result<Vec<_>>>()?;
            let family = if space.contiguous() == Some((1, x)) { Family::DeltaX { x } } else { Family::Custom };
            IndexSet::new(dim, elems, family)
        }
        FrequencyKind::LogPrimes | FrequencyKind::QIndependent => {
            let n = j.len();
            IndexSet::custom(n, (0..n).map(|i| MultiIndex::unit(n, i)).collect())
        }
        FrequencyKind::Explicit => Err(Error::Unsupported(
            "explicit frequencies without declared structure have no Bohr lift; use the ergodic engine".into(),
        )),
    }
}

/// Which evaluation produced a projection constant.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Route {
    /// One-variable quadrature: `L⁺` for contiguous sets, panel quadrature otherwise.
    ExactKernel,
    /// `∏ L⁺` over a box-shaped lift.
    ExactProduct,
    /// `λ(ℓ₁ⁿ(ℂ))` for `ℚ`-independent frequencies.
    ClosedFormL1,
    Mc,
    Qmc,
    Ergodic,
}

impl Route {
    pub fn label(self) -> &'static str {
        match self {
            Route::ExactKernel => "exact_kernel",
            Route::ExactProduct => "exact_product",
            Route::ClosedFormL1 => "closed_form_l1",
            Route::Mc => "mc",
            Route::Qmc => "qmc",
            Route::Ergodic => "ergodic",
        }
    }

    pub fn parse(s: &str) -> Result<Option<Self>> {
        Ok(Some(match s {
            "auto" => return Ok(None),
            "exact_kernel" | "exact-kernel" | "kernel" => Route::ExactKernel,
            "exact_product" | "exact-product" | "product" => Route::ExactProduct,
            "closed_form_l1" | "closed-form" | "closed_form" => Route::ClosedFormL1,
            "mc" => Route::Mc,
            "qmc" => Route::Qmc,
            "ergodic" => Route::Ergodic,
            _ => return Err(Error::param(format!("unknown method `{s}`"))),
        }))
    }
}

/// Settings for [`projection_constant`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProjectionOptions {
    /// `None` routes automatically.
    pub route: Option<Route>,
    /// Sampling budget; without a stderr target [`DEFAULT_REL_STDERR`] applies.
    pub budget: McConfig,
    pub horizon: f64,
    pub nodes: usize,
}

impl Default for ProjectionOptions {
    fn default() -> Self {
        ProjectionOptions { route: None, budget: McConfig::default(), horizon: DEFAULT_HORIZON, nodes: 2 }
    }
}

impl From<McConfig> for ProjectionOptions {
    fn from(budget: McConfig) -> Self {
        ProjectionOptions { budget, ..Self::default() }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProjectionConstantResult {
    pub estimate: IntegralEstimate,
    pub bracket: Option<Bracket>,
    pub method: Route,
    pub torus_dim: usize,
    /// The sampling budget ran out before the stderr target was met.
    pub warning: bool,
    pub ergodic: Option<ErgodicEstimate>,
}

impl ProjectionConstantResult {
    /// Whether the value respects its bracket within `k` standard errors.
    pub fn within_bracket(&self, k: f64) -> bool {
        self.bracket.is_none_or(|b| b.contains(self.estimate.value, k * self.estimate.stderr))
    }
}

/// `λ(H_∞^J(ω))`, or `∫|Σ a_n h_{ω_n}|` when coefficients are attached.
pub fn projection_constant<B: Backend>(
    space: &DirichletSpace,
    opts: &ProjectionOptions,
    backend: &B,
) -> Result<ProjectionConstantResult> {
    let mut budget = opts.budget;
    if budget.target_rel_stderr.is_none() {
        budget.target_rel_stderr = Some(DEFAULT_REL_STDERR);
    }
    let lift = match space.frequency.kind {
        FrequencyKind::Explicit => None,
        _ => Some(bohr_transform_with(space, backend)?),
    };
    let bracket = brackets(space, lift.as_ref())?;
    let route = match opts.route {
        Some(r) => r,
        None => auto_route(space, lift.as_ref()),
    };
    let torus_dim = lift.as_ref().map_or(0, |l| l.dim());
    let need_lift = || {
        lift.clone().ok_or_else(|| Error::Unsupported(format!("method {} needs a Bohr lift", route.label())))
    };
    let mut ergodic = None;
    let estimate = match route {
        Route::ExactKernel => {
            if space.frequency.kind != FrequencyKind::Natural {
                return Err(Error::Unsupported("the kernel route applies to the natural frequency".into()));
            }
            match space.contiguous() {
                Some((a, b)) if space.all_ones() => {
                    let v = backend.lebesgue(KernelSpec::analytic(b - a))?;
                    quadrature_estimate(v, crate::kernels::ACCURACY, 0)
                }
                _ => {
                    let ks: Vec<i64> = space.support.iter().map(|&n| n as i64).collect();
                    let q = integrate::l1_circle(&ks, &space.coefficient_vector())?;
                    quadrature_estimate(q.value, q.abs_err, q.evals)
                }
            }
        }
        Route::ExactProduct => {
            let l = need_lift()?;
            let ranges = l
                .as_box()
                .filter(|_| space.all_ones())
                .ok_or_else(|| Error::Unsupported("the lift is not a box with unit coefficients".into()))?;
            let d: Vec<u64> = ranges.iter().map(|&(lo, hi)| (hi - lo) as u64).collect();
            let v = constants::proj_box_exact_with(&d, true, backend)?;
            quadrature_estimate(v, crate::kernels::ACCURACY * d.len().max(1) as f64 * v, 0)
        }
        Route::ClosedFormL1 => {
            if !matches!(space.frequency.kind, FrequencyKind::LogPrimes | FrequencyKind::QIndependent)
                || !space.all_ones()
            {
                return Err(Error::Unsupported(
                    "the closed form applies to ℚ-independent frequencies with unit coefficients".into(),
                ));
            }
            if space.len() == 1 {
                IntegralEstimate::exact(1.0)
            } else {
                let q = constants::proj_l1_complex_quad(space.len() as u64)?;
                quadrature_estimate(q.value, q.abs_err, q.evals)
            }
        }
        Route::Mc | Route::Qmc => {
            let l = need_lift()?;
            let p = TrigPolynomial::with_coefficients(l, space.coefficient_vector())?;
            budget.engine = if route == Route::Mc { integrate::Engine::Mc } else { integrate::Engine::Qmc };
            if p.len() == 1 || p.dim() == 0 {
                IntegralEstimate::exact(p.coefficient_l1())
            } else {
                integrate::l1_norm_with(&p, &budget, backend)?
            }
        }
        Route::Ergodic => {
            let freqs = space.frequency_values_with(backend)?;
            let e = integrate::time_average(&freqs, &space.coefficient_vector(), opts.horizon, opts.nodes)?;
            ergodic = Some(e);
            e.estimate
        }
    };
    let warning = matches!(estimate.method, Method::Mc | Method::Qmc)
        && estimate.stderr > budget.target_rel_stderr.unwrap_or(DEFAULT_REL_STDERR) * estimate.value;
    Ok(ProjectionConstantResult { estimate, bracket, method: route, torus_dim, warning, ergodic })
}

fn quadrature_estimate(value: f64, err: f64, evals: usize) -> IntegralEstimate {
    IntegralEstimate { value, stderr: err, samples: evals as u64, method: Method::Quadrature, seed: 0 }
}

fn auto_route(space: &DirichletSpace, lift: Option<&IndexSet>) -> Route {
    match (space.frequency.kind, lift) {
        (FrequencyKind::Natural, _) => Route::ExactKernel,
        (FrequencyKind::LogPrimes | FrequencyKind::QIndependent, _) if space.all_ones() => Route::ClosedFormL1,
        (FrequencyKind::Explicit, _) | (_, None) => Route::Ergodic,
        (_, Some(l)) => {
            if space.all_ones() && l.as_box().is_some() {
                Route::ExactProduct
            } else {
                Route::Qmc
            }
        }
    }
}

/// Intersection of the brackets that apply:
///
/// * always `[max|c|, ‖c‖₂]` (a Fourier coefficient is bounded by the `L¹`
///   norm; Cauchy–Schwarz and orthonormality),
/// * for lifts of order at most `m`, `[‖c‖₂/√(2^m), ‖c‖₂]`,
/// * for frequencies declared `B₂`, `[‖c‖₂/√2, ‖c‖₂]`.
///
/// With unit coefficients `‖c‖₂ = √N` and `m = Ω(J) = max_{n∈J} Ω(n)` for
/// `ω = (log n)`.
pub fn brackets(space: &DirichletSpace, lift: Option<&IndexSet>) -> Result<Option<Bracket>> {
    let (l2, linf) = space.coefficient_norms();
    let mut b = Bracket::new(linf, l2, "cauchy-schwarz")?;
    if let Some(l) = lift {
        let m = l.max_order();
        if l.is_analytic() && m < 2048 {
            let lo = l2 / sqrt(libm::pow(2.0, m as f64));
            let w = Bracket::new(lo, l2, "lambda1-omega")?;
            b = b.intersect(&w).unwrap_or(b);
        }
    }
    if space.frequency.b2 {
        let w = Bracket::new(l2 / sqrt(2.0), l2, "b2")?;
        b = b.intersect(&w).unwrap_or(b);
    }
    Ok(Some(b))
}

/// `∫|Σ_{n≤x} n^{-it}|`, the projection constant of ordinary Dirichlet
/// polynomials of length `x`, with its normalizations.
#[derive(Clone, Debug, PartialEq)]
pub struct HarperResult {
    pub x: u64,
    pub result: ProjectionConstantResult,
    /// `value / √x`.
    pub ratio_sqrt: f64,
    /// `value / (√x/(log log x)^{1/4})`, defined for `x > e`.
    pub ratio_harper: Option<f64>,
}

/// The integral over `Δ(x)`, sampled on `𝕋^{π(x)}` (or exact for `x ≤ 2`).
pub fn harper_integral<B: Backend>(x: u64, budget: &McConfig, backend: &B) -> Result<HarperResult> {
    if x < 2 {
        return Err(Error::param("harper_integral needs x ≥ 2"));
    }
    let space = DirichletSpace::new(Frequency::log_integers(), (1..=x).collect())?;
    let opts = ProjectionOptions { route: None, budget: *budget, ..ProjectionOptions::default() };
    let result = projection_constant(&space, &opts, backend)?;
    let v = result.estimate.value;
    let ratio_harper = constants::reference_curve(constants::Curve::Harper, x as f64).ok().map(|r| v / r);
    Ok(HarperResult { x, ratio_sqrt: v / sqrt(x as f64), ratio_harper, result })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Sequential;
    use core::f64::consts::PI;

    fn dense(s: &IndexSet) -> Vec<Vec<i64>> {
        s.iter().map(|a| a.to_dense()).collect()
    }

    #[test]
    fn transforms() {
        let s = DirichletSpace::new(Frequency::log_integers(), alloc::vec![1, 2, 3, 4]).unwrap();
        let l = bohr_transform(&s).unwrap();
        assert_eq!(l.dim(), 2);
        assert_eq!(dense(&l), [[0, 0], [0, 1], [1, 0], [2, 0]]);
        let s = DirichletSpace::new(Frequency::natural(), alloc::vec![0, 1, 2]).unwrap();
        assert_eq!(dense(&bohr_transform(&s).unwrap()), [[0], [1], [2]]);
        let s = DirichletSpace::new(Frequency::log_primes(), alloc::vec![1, 4, 9]).unwrap();
        let l = bohr_transform(&s).unwrap();
        assert_eq!(l.dim(), 3);
        assert_eq!(l.len(), 3);
        let s = DirichletSpace::new(Frequency::explicit(alloc::vec![0.5, 1.7]).unwrap(), alloc::vec![1, 2]).unwrap();
        assert!(matches!(bohr_transform(&s), Err(Error::Unsupported(_))));
    }

    #[test]
    fn rejects_bad_frequencies() {
        assert!(matches!(Frequency::explicit(alloc::vec![1.0, f64::NAN]), Err(Error::Input(_))));
        assert!(Frequency::explicit(alloc::vec![2.0, 1.0]).is_err());
        assert!(DirichletSpace::new(Frequency::log_integers(), alloc::vec![0, 1]).is_err());
    }

    #[test]
    fn routes() {
        let opts = ProjectionOptions::from(McConfig::qmc(64_000, 1));
        let s = DirichletSpace::new(Frequency::natural(), (0..=4).collect()).unwrap();
        let r = projection_constant(&s, &opts, &Sequential).unwrap();
        assert_eq!(r.method, Route::ExactKernel);
        assert!((r.estimate.value - crate::kernels::lebesgue_lplus(4).unwrap()).abs() < 1e-12);

        let s = DirichletSpace::new(Frequency::log_primes(), alloc::vec![1, 2]).unwrap();
        let r = projection_constant(&s, &opts, &Sequential).unwrap();
        assert_eq!(r.method, Route::ClosedFormL1);
        assert!((r.estimate.value - 4.0 / PI).abs() < 1e-9);

        let s = DirichletSpace::new(Frequency::log_integers(), alloc::vec![1, 2, 3, 4, 6, 9, 12, 18, 36]).unwrap();
        let r = projection_constant(&s, &opts, &Sequential).unwrap();
        assert_eq!(r.method, Route::ExactProduct);
        let l2 = crate::kernels::lebesgue_lplus(2).unwrap();
        assert!((r.estimate.value - l2 * l2).abs() < 1e-10);

        let s = DirichletSpace::new(Frequency::log_integers(), (1..=16).collect()).unwrap();
        let r = projection_constant(&s, &opts, &Sequential).unwrap();
        assert_eq!(r.method, Route::Qmc);
        let b = r.bracket.unwrap();
        assert!((b.lo - 1.0).abs() < 1e-12 && (b.hi - 4.0).abs() < 1e-12);
        assert!(r.within_bracket(3.0));
    }

    #[test]
    fn explicit_goes_ergodic() {
        let f = Frequency::explicit(alloc::vec![0.0, 1.0]).unwrap();
        let s = DirichletSpace::new(f, alloc::vec![1, 2]).unwrap();
        let r = projection_constant(&s, &ProjectionOptions::default(), &Sequential).unwrap();
        assert_eq!(r.method, Route::Ergodic);
        assert!((r.estimate.value - 4.0 / PI).abs() < 1e-2);
    }

    #[test]
    fn harper_small() {
        let cfg = McConfig::qmc(64_000, 3);
        let h = harper_integral(2, &cfg, &Sequential).unwrap();
        assert!((h.result.estimate.value - 4.0 / PI).abs() < 1e-9);
        let h = harper_integral(4, &cfg, &Sequential).unwrap();
        let v = h.result.estimate.value;
        assert!((1.0..=2.0).contains(&v));
    }
}
