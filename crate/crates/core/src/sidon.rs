//! Certified bounds for Sidon constants of finite character sets.
//!
//! `Sid(E)` is the best `c` with `Σ|c_α| ≤ c·‖P‖_∞` for every `P` supported on
//! `E`. Any polynomial gives the lower bound `Σ|c_α| / ‖P‖_∞`, provided the sup
//! norm is bounded from above rigorously; Cauchy–Schwarz gives `Sid(E) ≤ √|E|`.

use crate::indexsets::{IndexSet, MultiIndex};
use crate::integrate::TrigPolynomial;
use crate::math::{abs, sqrt, TAU};
use crate::{Backend, Complex64, Error, Result, Sequential};
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

/// Highest dimension the grid certificate accepts.
pub const MAX_GRID_DIM: usize = 4;
// total grid points for automatically sized grids
const FINE_POINTS: f64 = 4e6;
const COARSE_POINTS: f64 = 1e5;
const FINALISTS: usize = 4;

/// A lower bound for `Sid(E)` with the polynomial and sup certificate that
/// prove it, and the upper bound.
#[derive(Clone, Debug, PartialEq)]
pub struct SidonEstimate {
    pub lower: f64,
    pub upper: f64,
    pub witness: TrigPolynomial,
    pub sup_certificate: f64,
    pub grid: usize,
}

/// Search settings for [`sidon_bounds`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SidonBudget {
    /// Number of random candidates; 0 skips the search.
    pub candidates: usize,
    /// Grid points per axis for certification; 0 sizes it automatically.
    pub grid: usize,
    pub seed: u64,
}

impl Default for SidonBudget {
    fn default() -> Self {
        SidonBudget { candidates: 64, grid: 0, seed: 0x51d0 }
    }
}

/// Smallest grid accepted by [`sup_norm_certified`].
pub fn min_grid(p: &TrigPolynomial) -> usize {
    4 * (1 + p.support().max_order() as usize)
}

/// Center `c` and radius `R = max ‖α − c‖₂`; `|P|` is unchanged when `P` is
/// multiplied by `e^{-2πi⟨c,θ⟩}`.
fn centered_radius(p: &TrigPolynomial) -> f64 {
    let ranges = p.support().ranges();
    let center: Vec<f64> = ranges.iter().map(|&(lo, hi)| 0.5 * (lo as f64 + hi as f64)).collect();
    p.support()
        .iter()
        .map(|a| {
            let mut s = 0.0;
            for (j, c) in center.iter().enumerate() {
                let d = a.get(j) as f64 - c;
                s += d * d;
            }
            sqrt(s)
        })
        .fold(0.0, f64::max)
}

/// `max |P|` over the grid `{0, 1/G, …, (G−1)/G}^n`.
fn grid_max<B: Backend>(p: &TrigPolynomial, grid: usize, backend: &B) -> f64 {
    let n = p.dim();
    let ev = p.evaluator();
    let rows = if n == 0 { 1 } else { grid.pow(n as u32 - 1) };
    let maxima = backend.map_indexed(rows, |r| {
        let mut ws = ev.workspace();
        let mut theta = vec![0.0; n];
        let mut idx = r;
        for t in theta.iter_mut().take(n.saturating_sub(1)) {
            *t = (idx % grid) as f64 / grid as f64;
            idx /= grid;
        }
        let mut m: f64 = 0.0;
        let steps = if n == 0 { 1 } else { grid };
        for i in 0..steps {
            if n > 0 {
                theta[n - 1] = i as f64 / grid as f64;
            }
            m = m.max(abs(ev.eval(&theta, &mut ws)));
        }
        m
    });
    maxima.into_iter().fold(0.0, f64::max)
}

/// An upper bound for `‖P‖_∞` from the grid maximum `M_G`.
///
/// Two certificates are computed and the smaller returned, with
/// `h = √n/(2G)` the half diagonal of a grid cell (in turns) and `R` the
/// centered radius of the support:
///
/// * Lipschitz: `M_G + h·2π·Σ|c_α|·‖α − c‖₂`;
/// * Bernstein: along the segment from a maximizer to its nearest grid node,
///   `|P|²` is an exponential sum of type `2R·2π`, so its second derivative is
///   at most `(4πR)²‖P‖²_∞`, which gives `‖P‖_∞ ≤ M_G / √(1 − 2(2πRh)²)`
///   whenever the root is real.
pub fn sup_norm_certified(p: &TrigPolynomial, grid: usize) -> Result<f64> {
    sup_norm_certified_with(p, grid, &Sequential)
}

pub fn sup_norm_certified_with<B: Backend>(p: &TrigPolynomial, grid: usize, backend: &B) -> Result<f64> {
    let n = p.dim();
    if n > MAX_GRID_DIM {
        return Err(Error::param(format!("grid certificates are limited to dimension {MAX_GRID_DIM}, got {n}")));
    }
    if grid < min_grid(p) {
        return Err(Error::param(format!("grid {grid} is below 4·(1 + degree) = {}", min_grid(p))));
    }
    let nonzero = p.coefficients().iter().filter(|c| c.norm_sqr() > 0.0).count();
    if nonzero == 1 {
        return Ok(p.coefficient_l1());
    }
    let m = grid_max(p, grid, backend);
    let h = sqrt(n as f64) / (2.0 * grid as f64);
    let ranges = p.support().ranges();
    let center: Vec<f64> = ranges.iter().map(|&(lo, hi)| 0.5 * (lo as f64 + hi as f64)).collect();
    let mut lip = 0.0;
    for (a, &c) in p.support().iter().zip(p.coefficients()) {
        let mut s = 0.0;
        for (j, cj) in center.iter().enumerate() {
            let d = a.get(j) as f64 - cj;
            s += d * d;
        }
        lip += abs(c) * sqrt(s);
    }
    let lipschitz = m + h * TAU * lip;
    let r = centered_radius(p);
    let q = 2.0 * (TAU * r * h) * (TAU * r * h);
    let bernstein = if q < 1.0 { m / sqrt(1.0 - q) } else { f64::INFINITY };
    Ok(lipschitz.min(bernstein))
}

/// The Rudin–Shapiro polynomial `P_k` of degree `2^k − 1`:
/// `P_{k+1} = P_k + z^{2^k} Q_k`, `Q_{k+1} = P_k − z^{2^k} Q_k`.
pub fn shapiro_polynomial(k: u32) -> TrigPolynomial {
    let (p, _) = shapiro_coefficients(k);
    let ks: Vec<i64> = (0..p.len() as i64).collect();
    let cs: Vec<Complex64> = p.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    TrigPolynomial::univariate(&ks, &cs).expect("Shapiro polynomials have unit coefficients")
}

fn shapiro_coefficients(k: u32) -> (Vec<f64>, Vec<f64>) {
    let mut p = vec![1.0];
    let mut q = vec![1.0];
    for _ in 0..k {
        let mut np = p.clone();
        np.extend_from_slice(&q);
        let mut nq = p.clone();
        nq.extend(q.iter().map(|v| -v));
        p = np;
        q = nq;
    }
    (p, q)
}

/// Grid size giving a Bernstein factor `1/√(1 − q)` with `q ≤ 0.005`, capped
/// by a total point budget.
fn auto_grid(p: &TrigPolynomial, points: f64) -> usize {
    let n = p.dim().max(1);
    let r = centered_radius(p);
    let want = libm::ceil(core::f64::consts::PI * sqrt(n as f64) * r * 20.0) as usize;
    let cap = libm::floor(libm::pow(points, 1.0 / n as f64)) as usize;
    want.min(cap).max(min_grid(p))
}

/// Whether the elements are distinct signed standard basis vectors, in which
/// case the characters are independent and `Σ|c| = ‖P‖_∞` for all `P`.
fn independent_units(set: &IndexSet) -> bool {
    let mut seen = vec![false; set.dim()];
    for a in set {
        if a.nnz() != 1 {
            return false;
        }
        let (j, e) = a.nonzero().next().unwrap();
        if e.unsigned_abs() != 1 || seen[j] {
            return false;
        }
        seen[j] = true;
    }
    true
}

fn trivial_estimate(set: &IndexSet, upper: f64) -> Result<SidonEstimate> {
    let first = set.elements()[0].clone();
    let witness = TrigPolynomial::from_terms(set.dim(), vec![(first, Complex64::new(1.0, 0.0))])?;
    Ok(SidonEstimate { lower: 1.0, upper, witness, sup_certificate: 1.0, grid: 0 })
}

/// `1 ≤ lower ≤ Sid(E) ≤ upper`.
///
/// `upper` is `√|E|`, or 1 for independent characters. `lower` is the best
/// certified ratio among random complex Gaussian coefficients (half the
/// budget), random signs (a quarter) and perturbed Rudin–Shapiro sign
/// sequences (a quarter); for one-variable sets `{a, …, a + 2^k − 1}` the
/// shifted Shapiro polynomial itself is also tried. Candidates are screened
/// on a coarse grid and the finalists certified on a fine one.
pub fn sidon_bounds<B: Backend>(set: &IndexSet, budget: &SidonBudget, backend: &B) -> Result<SidonEstimate> {
    if set.is_empty() {
        return Err(Error::param("empty character set"));
    }
    let upper = if independent_units(set) { 1.0 } else { sqrt(set.len() as f64) };
    if set.len() == 1 || budget.candidates == 0 && shapiro_shift(set).is_none() || set.dim() > MAX_GRID_DIM {
        return trivial_estimate(set, upper);
    }
    let n_gauss = budget.candidates / 2;
    let n_sign = budget.candidates / 4;
    let n_shapiro = budget.candidates - n_gauss - n_sign;
    let len = set.len();
    let k_cover = (usize::BITS - (len - 1).leading_zeros()).max(1);
    let (shp, shq) = shapiro_coefficients(k_cover);
    let seed = budget.seed;
    let candidates: Vec<Vec<Complex64>> = backend.map_indexed(budget.candidates, |i| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(i as u64);
        if i < n_gauss {
            (0..len)
                .map(|_| {
                    let re: f64 = StandardNormal.sample(&mut rng);
                    let im: f64 = StandardNormal.sample(&mut rng);
                    Complex64::new(re, im)
                })
                .collect()
        } else if i < n_gauss + n_sign {
            (0..len).map(|_| Complex64::new(if rng.random::<bool>() { 1.0 } else { -1.0 }, 0.0)).collect()
        } else {
            let base = if (i - n_gauss - n_sign) % 2 == 0 { &shp } else { &shq };
            let eps = 0.3 * (i - n_gauss - n_sign) as f64 / n_shapiro.max(1) as f64;
            (0..len)
                .map(|j| {
                    let g: f64 = StandardNormal.sample(&mut rng);
                    Complex64::from_polar(base[j], eps * g)
                })
                .collect()
        }
    });
    let polys: Vec<TrigPolynomial> = candidates
        .into_iter()
        .filter_map(|c| TrigPolynomial::with_coefficients(set.clone(), c).ok())
        .collect();
    let coarse = polys.first().map_or(0, |p| auto_grid(p, COARSE_POINTS).max(min_grid(p)));
    let mut scored: Vec<(f64, usize)> = polys
        .iter()
        .enumerate()
        .map(|(i, p)| (p.coefficient_l1() / grid_max(p, coarse, &Sequential), i))
        .collect();
    // stable: ties keep the earlier candidate
    scored.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap_or(core::cmp::Ordering::Equal));
    let mut finalists: Vec<TrigPolynomial> = scored.iter().take(FINALISTS).map(|&(_, i)| polys[i].clone()).collect();
    if let Some(shift) = shapiro_shift(set) {
        finalists.insert(0, shifted_shapiro(set, shift)?);
    }
    let mut best: Option<SidonEstimate> = None;
    for w in finalists {
        let grid = if budget.grid > 0 { budget.grid.max(min_grid(&w)) } else { auto_grid(&w, FINE_POINTS) };
        let cert = sup_norm_certified_with(&w, grid, backend)?;
        let lower = w.coefficient_l1() / cert;
        if best.as_ref().is_none_or(|b| lower > b.lower) {
            best = Some(SidonEstimate { lower, upper, witness: w, sup_certificate: cert, grid });
        }
    }
    match best {
        Some(b) if b.lower >= 1.0 => Ok(SidonEstimate { lower: b.lower.min(upper), ..b }),
        _ => trivial_estimate(set, upper),
    }
}

/// `a` when the set is `{a, …, a + 2^k − 1}` in one variable.
fn shapiro_shift(set: &IndexSet) -> Option<i64> {
    if set.dim() != 1 || !set.len().is_power_of_two() {
        return None;
    }
    let a = set.elements()[0].get(0);
    let b = set.elements()[set.len() - 1].get(0);
    (b - a + 1 == set.len() as i64).then_some(a)
}

fn shifted_shapiro(set: &IndexSet, shift: i64) -> Result<TrigPolynomial> {
    let k = set.len().trailing_zeros();
    let (p, _) = shapiro_coefficients(k);
    let terms = p
        .iter()
        .enumerate()
        .map(|(j, &v)| (MultiIndex::from_dense(&[shift + j as i64]), Complex64::new(v, 0.0)))
        .collect();
    TrigPolynomial::from_terms(1, terms)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_has_exact_certificate() {
        let p = TrigPolynomial::univariate(&[0], &[Complex64::new(1.0, 0.0)]).unwrap();
        assert_eq!(sup_norm_certified(&p, 4).unwrap(), 1.0);
    }

    #[test]
    fn one_plus_z() {
        let p = TrigPolynomial::univariate(&[0, 1], &[Complex64::new(1.0, 0.0); 2]).unwrap();
        let c = sup_norm_certified(&p, 64).unwrap();
        assert!((2.0..=2.01).contains(&c), "{c}");
        assert!(sup_norm_certified(&p, 8).is_ok());
        assert!(sup_norm_certified(&p, 7).is_err());
    }

    #[test]
    fn shapiro_structure() {
        assert_eq!(shapiro_polynomial(0).coefficients(), &[Complex64::new(1.0, 0.0)]);
        assert_eq!(shapiro_polynomial(1).coefficients(), &[Complex64::new(1.0, 0.0); 2]);
        let p = shapiro_polynomial(4);
        assert_eq!(p.len(), 16);
        let c = sup_norm_certified(&p, 2048).unwrap();
        assert!(c <= sqrt(32.0) * 1.01, "{c}");
    }

    #[test]
    fn independent_sets_have_unit_constant() {
        let set = IndexSet::custom(3, (0..3).map(|j| MultiIndex::unit(3, j)).collect()).unwrap();
        let e = sidon_bounds(&set, &SidonBudget { candidates: 8, ..Default::default() }, &Sequential).unwrap();
        assert_eq!(e.upper, 1.0);
        assert!(e.lower <= 1.0 + 1e-6 && e.lower >= 1.0);
    }

    #[test]
    fn singleton() {
        let set = IndexSet::from_integers([5]).unwrap();
        let e = sidon_bounds(&set, &SidonBudget::default(), &Sequential).unwrap();
        assert_eq!((e.lower, e.upper), (1.0, 1.0));
    }

    #[test]
    fn shapiro_witness_for_contiguous_sets() {
        let set = IndexSet::from_integers(1..=16).unwrap();
        let e = sidon_bounds(&set, &SidonBudget { candidates: 8, ..Default::default() }, &Sequential).unwrap();
        assert!(e.lower / sqrt(15.0) >= 0.70, "{}", e.lower);
        assert!(e.lower <= e.upper);
        let again = e.witness.coefficient_l1() / sup_norm_certified(&e.witness, e.grid).unwrap();
        assert_eq!(again, e.lower);
    }
}
