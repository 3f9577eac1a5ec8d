//! Haar integrals of `|P|` over `𝕋ⁿ` and time averages along the real line.
//!
//! Torus integrals are estimated blockwise: plain Monte Carlo draws each
//! block from its own ChaCha stream, the lattice engine applies one random
//! shift per block to a common rank-1 lattice. Either way blocks are
//! independent and identically distributed, the estimate is the mean of the
//! block means and the standard error is their standard deviation over
//! `√blocks`. Blocks are reduced in index order, so results do not depend on
//! how a [`Backend`] schedules them.

mod circle;
mod ergodic;
mod evaluator;
pub mod lattice;

pub use circle::l1_circle;
pub use ergodic::{ergodic_l1, time_average, ErgodicEstimate};
pub use evaluator::{Evaluator, Workspace};

use crate::indexsets::{IndexSet, MultiIndex};
use crate::math::{abs, cis_turns, pow, sqrt};
use crate::{Backend, Complex64, Error, Result, Sequential};
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// A trigonometric polynomial `Σ_{α∈E} c_α z^α` on `𝕋ⁿ`.
#[derive(Clone, Debug, PartialEq)]
pub struct TrigPolynomial {
    support: IndexSet,
    coefficients: Vec<Complex64>,
}

impl TrigPolynomial {
    /// All coefficients one: the character sum `Σ_{α∈E} z^α`.
    pub fn all_ones(support: IndexSet) -> Result<Self> {
        if support.is_empty() {
            return Err(Error::param("empty support"));
        }
        let coefficients = vec![Complex64::new(1.0, 0.0); support.len()];
        Ok(TrigPolynomial { support, coefficients })
    }

    /// Coefficients aligned with `support.elements()`.
    pub fn with_coefficients(support: IndexSet, coefficients: Vec<Complex64>) -> Result<Self> {
        if coefficients.len() != support.len() {
            return Err(Error::Dimension { expected: support.len(), got: coefficients.len() });
        }
        if coefficients.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::Input("non-finite coefficient".into()));
        }
        if coefficients.iter().all(|c| c.norm_sqr() == 0.0) {
            return Err(Error::param("a polynomial needs at least one nonzero coefficient"));
        }
        Ok(TrigPolynomial { support, coefficients })
    }

    /// From `(α, c_α)` pairs; the support becomes a custom set.
    pub fn from_terms(dim: usize, terms: Vec<(MultiIndex, Complex64)>) -> Result<Self> {
        let mut terms = terms;
        terms.sort_by(|a, b| a.0.cmp(&b.0));
        let (elems, coefs): (Vec<_>, Vec<_>) = terms.into_iter().unzip();
        Self::with_coefficients(IndexSet::custom(dim, elems)?, coefs)
    }

    /// `Σ_k c_k z^k` on `𝕋`.
    pub fn univariate(ks: &[i64], coefficients: &[Complex64]) -> Result<Self> {
        if ks.len() != coefficients.len() {
            return Err(Error::Dimension { expected: ks.len(), got: coefficients.len() });
        }
        let terms = ks.iter().zip(coefficients).map(|(&k, &c)| (MultiIndex::from_dense(&[k]), c)).collect();
        Self::from_terms(1, terms)
    }

    pub fn support(&self) -> &IndexSet {
        &self.support
    }

    pub fn coefficients(&self) -> &[Complex64] {
        &self.coefficients
    }

    pub fn coefficient(&self, alpha: &MultiIndex) -> Complex64 {
        self.support.position(alpha).map_or(Complex64::new(0.0, 0.0), |i| self.coefficients[i])
    }

    pub fn dim(&self) -> usize {
        self.support.dim()
    }

    pub fn len(&self) -> usize {
        self.support.len()
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }

    /// `Σ|c_α|`.
    pub fn coefficient_l1(&self) -> f64 {
        self.coefficients.iter().map(|&c| abs(c)).sum()
    }

    /// `P(θ) = Σ c_α e^{2πi⟨α,θ⟩}` term by term.
    pub fn eval(&self, theta: &[f64]) -> Result<Complex64> {
        if theta.len() != self.dim() {
            return Err(Error::Dimension { expected: self.dim(), got: theta.len() });
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for (alpha, &c) in self.support.iter().zip(&self.coefficients) {
            let phase: f64 = alpha.nonzero().map(|(j, e)| e as f64 * theta[j]).sum();
            acc += c * cis_turns(phase);
        }
        Ok(acc)
    }

    pub fn evaluator(&self) -> Evaluator {
        Evaluator::new(self)
    }

    /// The (frequency, coefficient) lists of a one-variable polynomial.
    pub fn univariate_terms(&self) -> Result<(Vec<i64>, Vec<Complex64>)> {
        if self.dim() != 1 {
            return Err(Error::Dimension { expected: 1, got: self.dim() });
        }
        let ks = self.support.iter().map(|a| a.get(0)).collect();
        Ok((ks, self.coefficients.clone()))
    }
}

/// `|P(θ)|`.
pub fn eval_abs_sum(p: &TrigPolynomial, theta: &[f64]) -> Result<f64> {
    p.eval(theta).map(abs)
}

/// `‖P‖₂ = (Σ|c_α|²)^{1/2}` by orthonormality of the characters.
pub fn l2_norm_exact(p: &TrigPolynomial) -> f64 {
    sqrt(p.coefficients.iter().map(|c| c.norm_sqr()).sum())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Engine {
    /// Independent uniform points.
    Mc,
    /// Randomly shifted rank-1 lattice.
    Qmc,
}

/// How an [`IntegralEstimate`] was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Method {
    Mc,
    Qmc,
    Quadrature,
    Exact,
}

impl Method {
    pub fn label(self) -> &'static str {
        match self {
            Method::Mc => "mc",
            Method::Qmc => "qmc",
            Method::Quadrature => "quadrature",
            Method::Exact => "exact",
        }
    }
}

/// Sampling budget and reproducibility settings.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct McConfig {
    pub samples: u64,
    pub seed: u64,
    pub blocks: u32,
    pub engine: Engine,
    /// Use `|P|²` (known mean `Σ|c|²`) as a control variate; block 0 is the
    /// pilot that fixes the regression coefficient and is not averaged.
    pub control_variate: bool,
    /// Stop early once `stderr ≤ target · value`.
    pub target_rel_stderr: Option<f64>,
}

impl Default for McConfig {
    fn default() -> Self {
        McConfig {
            samples: 1_000_000,
            seed: 0x5eed,
            blocks: 32,
            engine: Engine::Qmc,
            control_variate: false,
            target_rel_stderr: None,
        }
    }
}

impl McConfig {
    pub fn mc(samples: u64, seed: u64) -> Self {
        McConfig { samples, seed, engine: Engine::Mc, ..Self::default() }
    }

    pub fn qmc(samples: u64, seed: u64) -> Self {
        McConfig { samples, seed, engine: Engine::Qmc, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.blocks == 0 || self.samples < self.blocks as u64 {
            return Err(Error::param(format!(
                "need samples ≥ blocks ≥ 1 (samples {}, blocks {})",
                self.samples, self.blocks
            )));
        }
        if self.engine == Engine::Qmc && self.samples / (self.blocks as u64) < 2 {
            return Err(Error::param("the lattice engine needs at least 2 points per block"));
        }
        if self.control_variate && self.blocks < 3 {
            return Err(Error::param("the control variate needs at least 3 blocks"));
        }
        if let Some(t) = self.target_rel_stderr {
            if !(t > 0.0) {
                return Err(Error::param("the relative stderr target must be positive"));
            }
        }
        Ok(())
    }

    fn method(&self) -> Method {
        match self.engine {
            Engine::Mc => Method::Mc,
            Engine::Qmc => Method::Qmc,
        }
    }
}

/// An integral value with its standard error and provenance.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IntegralEstimate {
    pub value: f64,
    pub stderr: f64,
    pub samples: u64,
    pub method: Method,
    pub seed: u64,
}

impl IntegralEstimate {
    pub fn exact(value: f64) -> Self {
        IntegralEstimate { value, stderr: 0.0, samples: 0, method: Method::Exact, seed: 0 }
    }

    /// Whether `target` lies within `k` standard errors plus `abs` slack.
    pub fn agrees_with(&self, target: f64, k: f64, abs_slack: f64) -> bool {
        crate::math::fabs(self.value - target) <= k * self.stderr + abs_slack
    }
}

/// Sufficient statistics of one block for `f = |P|^p` and `g = |P|²`.
#[derive(Clone, Copy, Debug, Default)]
struct BlockStat {
    n: u64,
    sf: f64,
    sg: f64,
    sff: f64,
    sfg: f64,
    sgg: f64,
}

impl BlockStat {
    fn push(&mut self, f: f64, g: f64) {
        self.n += 1;
        self.sf += f;
        self.sg += g;
        self.sff += f * f;
        self.sfg += f * g;
        self.sgg += g * g;
    }

    fn mean_f(&self) -> f64 {
        self.sf / self.n as f64
    }

    fn mean_g(&self) -> f64 {
        self.sg / self.n as f64
    }
}

fn stream(seed: u64, block: u32) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(block as u64);
    rng
}

/// Runs block `b` of the configured engine, accumulating `(|P|^p, |P|²)`.
fn run_block(
    ev: &Evaluator,
    cfg: &McConfig,
    rule: Option<&lattice::LatticeRule>,
    b: u32,
    exponent: f64,
) -> BlockStat {
    let dim = ev.dim();
    let mut ws = ev.workspace();
    let mut rng = stream(cfg.seed, b);
    let mut theta = vec![0.0; dim];
    let mut st = BlockStat::default();
    let transform = |z: Complex64| {
        let g = z.norm_sqr();
        let f = if exponent == 1.0 {
            sqrt(g)
        } else if exponent == 2.0 {
            g
        } else {
            pow(g, 0.5 * exponent)
        };
        (f, g)
    };
    match rule {
        None => {
            let per = cfg.samples / cfg.blocks as u64;
            let n = per + u64::from((b as u64) < cfg.samples % cfg.blocks as u64);
            for _ in 0..n {
                for t in theta.iter_mut() {
                    *t = rng.random::<f64>();
                }
                let (f, g) = transform(ev.eval(&theta, &mut ws));
                st.push(f, g);
            }
        }
        Some(rule) => {
            let shift: Vec<f64> = (0..dim).map(|_| rng.random::<f64>()).collect();
            let mut pts = rule.shifted(&shift);
            while pts.next_into(&mut theta) {
                let (f, g) = transform(ev.eval(&theta, &mut ws));
                st.push(f, g);
            }
        }
    }
    st
}

/// Blockwise estimate of `∫|P|^exponent`.
fn moment<B: Backend>(p: &TrigPolynomial, exponent: f64, cfg: &McConfig, backend: &B) -> Result<IntegralEstimate> {
    cfg.validate()?;
    let ev = p.evaluator();
    if p.dim() == 0 {
        let v = pow(abs(p.coefficients.iter().sum()), exponent);
        return Ok(IntegralEstimate { value: v, stderr: 0.0, samples: 0, method: Method::Exact, seed: cfg.seed });
    }
    let rule = match cfg.engine {
        Engine::Mc => None,
        Engine::Qmc => Some(backend.lattice((cfg.samples / cfg.blocks as u64) as usize, p.dim())),
    };
    let rule_ref = rule.as_deref();
    let mu_g = p.coefficients.iter().map(|c| c.norm_sqr()).sum::<f64>();
    let total_blocks = cfg.blocks as usize;
    let chunk = match cfg.target_rel_stderr {
        Some(_) => total_blocks.div_ceil(8).max(2),
        None => total_blocks,
    };
    let mut stats: Vec<BlockStat> = Vec::with_capacity(total_blocks);
    let mut beta = 0.0;
    loop {
        let start = stats.len();
        let end = (start + chunk).min(total_blocks);
        let ev_ref = &ev;
        let new = backend.map_indexed(end - start, |i| run_block(ev_ref, cfg, rule_ref, (start + i) as u32, exponent));
        stats.extend(new);
        if cfg.control_variate && start == 0 {
            let s = &stats[0];
            let n = s.n as f64;
            let cov = s.sfg / n - s.mean_f() * s.mean_g();
            let var = s.sgg / n - s.mean_g() * s.mean_g();
            beta = if var > 0.0 { cov / var } else { 0.0 };
        }
        let est = combine(&stats, cfg, beta, mu_g);
        let done = stats.len() == total_blocks
            || cfg
                .target_rel_stderr
                .is_some_and(|t| stats.len() >= 2 * chunk && est.0 > 0.0 && est.1 <= t * est.0);
        if done {
            let samples = stats.iter().map(|s| s.n).sum();
            return Ok(IntegralEstimate { value: est.0, stderr: est.1, samples, method: cfg.method(), seed: cfg.seed });
        }
    }
}

/// `(value, stderr)` from block statistics.
fn combine(stats: &[BlockStat], cfg: &McConfig, beta: f64, mu_g: f64) -> (f64, f64) {
    let used: &[BlockStat] = if cfg.control_variate { &stats[1.min(stats.len() - 1)..] } else { stats };
    let adj = |s: &BlockStat| {
        if cfg.control_variate {
            s.mean_f() - beta * (s.mean_g() - mu_g)
        } else {
            s.mean_f()
        }
    };
    let k = used.len() as f64;
    let mean = used.iter().map(adj).sum::<f64>() / k;
    let stderr = if used.len() >= 2 {
        let var = used.iter().map(|s| (adj(s) - mean) * (adj(s) - mean)).sum::<f64>() / (k - 1.0);
        sqrt(var / k)
    } else {
        let s = &used[0];
        let n = s.n as f64;
        let var = (s.sff / n - s.mean_f() * s.mean_f()).max(0.0);
        sqrt(var / n)
    };
    (mean, stderr)
}

/// `∫_{𝕋ⁿ} |P| dz` by Monte Carlo or randomly shifted lattice rule.
pub fn l1_norm(p: &TrigPolynomial, cfg: &McConfig) -> Result<IntegralEstimate> {
    l1_norm_with(p, cfg, &Sequential)
}

pub fn l1_norm_with<B: Backend>(p: &TrigPolynomial, cfg: &McConfig, backend: &B) -> Result<IntegralEstimate> {
    moment(p, 1.0, cfg, backend)
}

/// `(∫|P|^q)^{1/q}`, the standard error carried through the `1/q` power by
/// the delta method.
pub fn lp_norm(p: &TrigPolynomial, q: f64, cfg: &McConfig) -> Result<IntegralEstimate> {
    lp_norm_with(p, q, cfg, &Sequential)
}

pub fn lp_norm_with<B: Backend>(p: &TrigPolynomial, q: f64, cfg: &McConfig, backend: &B) -> Result<IntegralEstimate> {
    if !(q >= 1.0) || !q.is_finite() {
        return Err(Error::param(format!("p-norm exponent must be ≥ 1, got {q}")));
    }
    let m = moment(p, q, cfg, backend)?;
    let value = pow(m.value, 1.0 / q);
    let stderr = if m.value > 0.0 { value / (q * m.value) * m.stderr } else { 0.0 };
    Ok(IntegralEstimate { value, stderr, ..m })
}

/// `∫_𝕋 |P|` for a one-variable polynomial by panel quadrature.
pub fn l1_norm_circle(p: &TrigPolynomial) -> Result<IntegralEstimate> {
    let (ks, cs) = p.univariate_terms()?;
    let q = l1_circle(&ks, &cs)?;
    Ok(IntegralEstimate { value: q.value, stderr: q.abs_err, samples: q.evals as u64, method: Method::Quadrature, seed: 0 })
}
