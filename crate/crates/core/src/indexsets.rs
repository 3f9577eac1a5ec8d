//! Multi-indices, index-set families and their cardinalities.
//!
//! A character `z^α` of the torus `𝕋ⁿ` is identified with its exponent
//! `α ∈ ℤⁿ`. The families here are
//!
//! * `Λ_p(m, n)` / `Λ_p(≤m, n)`: `α ∈ ℕ₀ⁿ` with `‖α‖_p = m` (resp. `≤ m`),
//! * `J_p(m, n)` / `J_p(≤m, n)`: the same over `ℤⁿ`,
//! * boxes `I_d = ∏[-d_j, d_j]` and analytic boxes `∏[0, d_j]`,
//! * spheres `J_2(≤m, n)`, the lattice points of the closed radius-`m` ball,
//! * `Δ(x)`, `Δ(N₁(m, x))` and `Δ(N_∞(≤m, n))`: Bohr lifts of integer sets.
//!
//! Elements are kept in lexicographic order of their entries.

use crate::numtheory::{pow_product, Sieve};
use crate::{Error, Result};
use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

/// Default cap on the number of elements a generator may produce.
pub const DEFAULT_CAP: u128 = 100_000_000;

/// An exponent vector `α ∈ ℤⁿ`, stored sparsely.
///
/// Lifts of integers live in dimension `π(x)` but have at most `log₂ x`
/// nonzero entries, so only the nonzero coordinates are kept.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct MultiIndex {
    dim: usize,
    nz: Vec<(u32, i64)>,
}

impl MultiIndex {
    pub fn zero(dim: usize) -> Self {
        MultiIndex { dim, nz: Vec::new() }
    }

    /// The standard basis vector `e_j` (0-based `j`).
    pub fn unit(dim: usize, j: usize) -> Self {
        assert!(j < dim, "coordinate {j} outside dimension {dim}");
        MultiIndex { dim, nz: vec![(j as u32, 1)] }
    }

    pub fn from_dense(entries: &[i64]) -> Self {
        let nz = entries
            .iter()
            .enumerate()
            .filter(|(_, &e)| e != 0)
            .map(|(j, &e)| (j as u32, e))
            .collect();
        MultiIndex { dim: entries.len(), nz }
    }

    /// Builds from `(coordinate, exponent)` pairs; zeros are dropped and
    /// repeated coordinates added up.
    ///
    /// # Panics
    /// If a coordinate is outside `0..dim`.
    pub fn from_sparse(dim: usize, mut pairs: Vec<(u32, i64)>) -> Self {
        pairs.sort_unstable_by_key(|&(j, _)| j);
        let mut nz: Vec<(u32, i64)> = Vec::with_capacity(pairs.len());
        for (j, e) in pairs {
            assert!((j as usize) < dim, "coordinate {j} outside dimension {dim}");
            match nz.last_mut() {
                Some((k, f)) if *k == j => *f += e,
                _ => nz.push((j, e)),
            }
        }
        nz.retain(|&(_, e)| e != 0);
        MultiIndex { dim, nz }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, j: usize) -> i64 {
        match self.nz.binary_search_by_key(&(j as u32), |&(k, _)| k) {
            Ok(i) => self.nz[i].1,
            Err(_) => 0,
        }
    }

    /// Nonzero entries as `(coordinate, exponent)`, ascending in coordinate.
    pub fn nonzero(&self) -> impl Iterator<Item = (usize, i64)> + '_ {
        self.nz.iter().map(|&(j, e)| (j as usize, e))
    }

    pub fn nnz(&self) -> usize {
        self.nz.len()
    }

    pub fn to_dense(&self) -> Vec<i64> {
        let mut v = vec![0; self.dim];
        for &(j, e) in &self.nz {
            v[j as usize] = e;
        }
        v
    }

    /// `|α| = Σ|α_j|`.
    pub fn order(&self) -> u64 {
        self.nz.iter().map(|&(_, e)| e.unsigned_abs()).sum()
    }

    /// `‖α‖₂²`.
    pub fn norm2_sq(&self) -> u128 {
        self.nz.iter().map(|&(_, e)| (e as i128 * e as i128) as u128).sum()
    }

    /// `‖α‖_∞`.
    pub fn norm_inf(&self) -> u64 {
        self.nz.iter().map(|&(_, e)| e.unsigned_abs()).max().unwrap_or(0)
    }

    /// All entries non-negative.
    pub fn is_analytic(&self) -> bool {
        self.nz.iter().all(|&(_, e)| e > 0)
    }

    /// The same exponents viewed in a larger dimension.
    pub fn embed(&self, dim: usize) -> Result<Self> {
        match self.nz.last() {
            Some(&(j, _)) if j as usize >= dim => Err(Error::Dimension { expected: j as usize + 1, got: dim }),
            _ => Ok(MultiIndex { dim, nz: self.nz.clone() }),
        }
    }
}

impl Ord for MultiIndex {
    /// Lexicographic on the dense entries; ties broken by dimension.
    fn cmp(&self, other: &Self) -> Ordering {
        let (mut a, mut b) = (self.nz.iter().peekable(), other.nz.iter().peekable());
        loop {
            match (a.peek(), b.peek()) {
                (None, None) => return self.dim.cmp(&other.dim),
                (Some(&&(_, x)), None) => return x.cmp(&0),
                (None, Some(&&(_, y))) => return 0.cmp(&y),
                (Some(&&(j, x)), Some(&&(k, y))) => {
                    let ord = match j.cmp(&k) {
                        Ordering::Less => x.cmp(&0),
                        Ordering::Greater => 0.cmp(&y),
                        Ordering::Equal => x.cmp(&y),
                    };
                    if ord != Ordering::Equal {
                        return ord;
                    }
                    // equal here implies j == k (nonzero entries never equal 0)
                    a.next();
                    b.next();
                }
            }
        }
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.dim <= 16 {
            write!(f, "{:?}", self.to_dense())
        } else {
            write!(f, "<dim {}> {:?}", self.dim, self.nz)
        }
    }
}

/// The exponent `p` of the norm in `Λ_p`, `J_p`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PNorm {
    One,
    Two,
    Inf,
}

impl PNorm {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "1" => Ok(PNorm::One),
            "2" => Ok(PNorm::Two),
            "inf" | "∞" => Ok(PNorm::Inf),
            _ => Err(Error::param(format!("unsupported p = {s}; expected 1, 2 or inf"))),
        }
    }

    fn label(self) -> &'static str {
        match self {
            PNorm::One => "1",
            PNorm::Two => "2",
            PNorm::Inf => "inf",
        }
    }

    /// Per-coordinate cost and total budget so that `‖α‖_p ≤ m` reads
    /// `Σ cost(α_j) ≤ budget` (or `max cost ≤ budget` for `p = ∞`).
    fn cost(self, v: i64) -> u128 {
        let a = v.unsigned_abs() as u128;
        match self {
            PNorm::One | PNorm::Inf => a,
            PNorm::Two => a * a,
        }
    }

    fn budget(self, m: u64) -> u128 {
        self.cost(m as i64)
    }
}

/// Generating family of an [`IndexSet`].
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Family {
    /// `Λ_p(m, n)`: `α ∈ ℕ₀ⁿ`, `‖α‖_p = m`.
    LambdaExact { p: PNorm, m: u64, n: usize },
    /// `Λ_p(≤m, n)`.
    LambdaLe { p: PNorm, m: u64, n: usize },
    /// `J_p(m, n)`: `α ∈ ℤⁿ`, `‖α‖_p = m`.
    JExact { p: PNorm, m: u64, n: usize },
    /// `J_p(≤m, n)`.
    JLe { p: PNorm, m: u64, n: usize },
    /// `∏[-d_j, d_j]`, or `∏[0, d_j]` when `analytic`.
    Box { d: Vec<u64>, analytic: bool },
    /// `J_2(≤m, n)`, lattice points in the closed ball of radius `m`.
    Sphere { m: u64, n: usize },
    /// `Δ(x)`: lifts of `1..=x` in dimension `π(x)`.
    DeltaX { x: u64 },
    /// Lifts of `N₁(m, x) = {n ≤ x : Ω(n) = m}` in dimension `π(x)`.
    N1Lift { m: u32, x: u64 },
    /// Lifts of `N_∞(≤m, n) = {𝔭^α : α ∈ ℕ₀ⁿ, ‖α‖_∞ ≤ m}`.
    NinfLift { m: u64, n: usize },
    Custom,
}

impl Family {
    pub fn tag(&self) -> &'static str {
        match self {
            Family::LambdaExact { .. } => "lambda_exact",
            Family::LambdaLe { .. } => "lambda_le",
            Family::JExact { .. } => "j_exact",
            Family::JLe { .. } => "j_le",
            Family::Box { .. } => "box",
            Family::Sphere { .. } => "sphere",
            Family::DeltaX { .. } => "delta_x",
            Family::N1Lift { .. } => "n1_lift",
            Family::NinfLift { .. } => "ninf_lift",
            Family::Custom => "custom",
        }
    }

    /// Parameters as a whitespace-free `key=value,...` string.
    pub fn params(&self) -> String {
        match self {
            Family::LambdaExact { p, m, n }
            | Family::LambdaLe { p, m, n }
            | Family::JExact { p, m, n }
            | Family::JLe { p, m, n } => format!("p={},m={m},n={n}", p.label()),
            Family::Box { d, analytic } => {
                let d: Vec<String> = d.iter().map(|v| v.to_string()).collect();
                format!("d={},analytic={}", d.join(":"), analytic)
            }
            Family::Sphere { m, n } => format!("m={m},n={n}"),
            Family::DeltaX { x } => format!("x={x}"),
            Family::N1Lift { m, x } => format!("m={m},x={x}"),
            Family::NinfLift { m, n } => format!("m={m},n={n}"),
            Family::Custom => String::new(),
        }
    }

    /// Inverse of [`Family::tag`] / [`Family::params`].
    pub fn parse(tag: &str, params: &str) -> Result<Self> {
        let mut kv: BTreeMap<&str, &str> = BTreeMap::new();
        for item in params.split(',').filter(|s| !s.is_empty()) {
            let (k, v) = item
                .split_once('=')
                .ok_or_else(|| Error::Input(format!("malformed parameter `{item}`")))?;
            kv.insert(k, v);
        }
        let get = |k: &str| -> Result<&str> {
            kv.get(k).copied().ok_or_else(|| Error::Input(format!("family {tag} needs parameter `{k}`")))
        };
        let int = |k: &str| -> Result<u64> {
            get(k)?.parse().map_err(|_| Error::Input(format!("parameter `{k}` is not a non-negative integer")))
        };
        let pmn = || -> Result<(PNorm, u64, usize)> { Ok((PNorm::parse(get("p")?)?, int("m")?, int("n")? as usize)) };
        Ok(match tag {
            "lambda_exact" => {
                let (p, m, n) = pmn()?;
                Family::LambdaExact { p, m, n }
            }
            "lambda_le" => {
                let (p, m, n) = pmn()?;
                Family::LambdaLe { p, m, n }
            }
            "j_exact" => {
                let (p, m, n) = pmn()?;
                Family::JExact { p, m, n }
            }
            "j_le" => {
                let (p, m, n) = pmn()?;
                Family::JLe { p, m, n }
            }
            "box" => {
                let d = get("d")?;
                let d = if d.is_empty() {
                    Vec::new()
                } else {
                    d.split(':')
                        .map(|v| v.parse().map_err(|_| Error::Input(format!("bad box extent `{v}`"))))
                        .collect::<Result<Vec<u64>>>()?
                };
                let analytic = kv.get("analytic").is_some_and(|v| *v == "true");
                Family::Box { d, analytic }
            }
            "sphere" => Family::Sphere { m: int("m")?, n: int("n")? as usize },
            "delta_x" => Family::DeltaX { x: int("x")? },
            "n1_lift" => Family::N1Lift { m: int("m")? as u32, x: int("x")? },
            "ninf_lift" => Family::NinfLift { m: int("m")?, n: int("n")? as usize },
            "custom" => Family::Custom,
            _ => return Err(Error::Input(format!("unknown family `{tag}`"))),
        })
    }

    /// Membership predicate of the family.
    pub fn admits(&self, alpha: &MultiIndex, sieve: &Sieve) -> Result<bool> {
        let ball = |p: PNorm, m: u64, n: usize, exact: bool, analytic: bool| {
            if alpha.dim() != n || (analytic && !alpha.is_analytic()) {
                return false;
            }
            let norm = match p {
                PNorm::One => alpha.order() as u128,
                PNorm::Two => alpha.norm2_sq(),
                PNorm::Inf => alpha.norm_inf() as u128,
            };
            if exact {
                norm == p.budget(m)
            } else {
                norm <= p.budget(m)
            }
        };
        Ok(match self {
            Family::LambdaExact { p, m, n } => ball(*p, *m, *n, true, true),
            Family::LambdaLe { p, m, n } => ball(*p, *m, *n, false, true),
            Family::JExact { p, m, n } => ball(*p, *m, *n, true, false),
            Family::JLe { p, m, n } => ball(*p, *m, *n, false, false),
            Family::Sphere { m, n } => ball(PNorm::Two, *m, *n, false, false),
            Family::NinfLift { m, n } => ball(PNorm::Inf, *m, *n, false, true),
            Family::Box { d, analytic } => {
                alpha.dim() == d.len()
                    && (!analytic || alpha.is_analytic())
                    && alpha.nonzero().all(|(j, e)| e.unsigned_abs() <= d[j])
            }
            Family::DeltaX { x } => {
                alpha.dim() == sieve.prime_pi(*x)? && alpha.is_analytic() && fits_below(alpha, *x, sieve)?
            }
            Family::N1Lift { m, x } => {
                alpha.dim() == sieve.prime_pi(*x)?
                    && alpha.is_analytic()
                    && alpha.order() == *m as u64
                    && fits_below(alpha, *x, sieve)?
            }
            Family::Custom => true,
        })
    }
}

fn fits_below(alpha: &MultiIndex, x: u64, sieve: &Sieve) -> Result<bool> {
    match pow_product(alpha, sieve) {
        Ok(v) => Ok(v <= x),
        Err(Error::Overflow(_)) => Ok(false),
        Err(e) => Err(e),
    }
}

/// A finite, duplicate-free set of multi-indices of one dimension, sorted
/// lexicographically.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IndexSet {
    dim: usize,
    elements: Vec<MultiIndex>,
    family: Family,
}

impl IndexSet {
    /// Validates dimensions, sorts, and rejects duplicates.
    pub fn new(dim: usize, mut elements: Vec<MultiIndex>, family: Family) -> Result<Self> {
        if let Some(bad) = elements.iter().find(|a| a.dim() != dim) {
            return Err(Error::Dimension { expected: dim, got: bad.dim() });
        }
        elements.sort();
        if let Some(w) = elements.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::Input(format!("duplicate element {:?}", w[0])));
        }
        Ok(IndexSet { dim, elements, family })
    }

    pub fn custom(dim: usize, elements: Vec<MultiIndex>) -> Result<Self> {
        Self::new(dim, elements, Family::Custom)
    }

    /// A one-dimensional set of frequencies `k`.
    pub fn from_integers(ks: impl IntoIterator<Item = i64>) -> Result<Self> {
        Self::custom(1, ks.into_iter().map(|k| MultiIndex::from_dense(&[k])).collect())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[MultiIndex] {
        &self.elements
    }

    pub fn iter(&self) -> core::slice::Iter<'_, MultiIndex> {
        self.elements.iter()
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn contains(&self, alpha: &MultiIndex) -> bool {
        self.position(alpha).is_some()
    }

    pub fn position(&self, alpha: &MultiIndex) -> Option<usize> {
        self.elements.binary_search(alpha).ok()
    }

    pub fn is_analytic(&self) -> bool {
        self.elements.iter().all(MultiIndex::is_analytic)
    }

    /// Largest `|α|` over the set.
    pub fn max_order(&self) -> u64 {
        self.elements.iter().map(MultiIndex::order).max().unwrap_or(0)
    }

    /// Per-coordinate `(min, max)` of the entries.
    pub fn ranges(&self) -> Vec<(i64, i64)> {
        let mut r = vec![(i64::MAX, i64::MIN); self.dim];
        for a in &self.elements {
            let dense = a.to_dense();
            for (j, e) in dense.into_iter().enumerate() {
                r[j].0 = r[j].0.min(e);
                r[j].1 = r[j].1.max(e);
            }
        }
        r
    }

    /// If the set is a full product `∏[lo_j, hi_j]`, its ranges.
    pub fn as_box(&self) -> Option<Vec<(i64, i64)>> {
        if self.elements.is_empty() {
            return None;
        }
        let r = self.ranges();
        let mut prod: u128 = 1;
        for &(lo, hi) in &r {
            prod = prod.checked_mul((hi - lo + 1) as u128)?;
        }
        // distinct elements inside the product: equal counts means equal sets
        (prod == self.elements.len() as u128).then_some(r)
    }
}

impl<'a> IntoIterator for &'a IndexSet {
    type Item = &'a MultiIndex;
    type IntoIter = core::slice::Iter<'a, MultiIndex>;
    fn into_iter(self) -> Self::IntoIter {
        self.elements.iter()
    }
}

/// Generator options: the cardinality cap and an optional shared sieve.
#[derive(Clone, Copy, Debug)]
pub struct GenerateOptions<'a> {
    pub cap: u128,
    pub sieve: Option<&'a Sieve>,
}

impl Default for GenerateOptions<'_> {
    fn default() -> Self {
        GenerateOptions { cap: DEFAULT_CAP, sieve: None }
    }
}

/// Enumerates a family with the default cap.
pub fn generate(family: &Family) -> Result<IndexSet> {
    generate_with(family, &GenerateOptions::default())
}

pub fn generate_with(family: &Family, opts: &GenerateOptions<'_>) -> Result<IndexSet> {
    let predicted = predict_cardinality(family)?;
    if let Some(c) = predicted {
        if c > opts.cap {
            return Err(Error::CapExceeded { predicted: c, cap: opts.cap });
        }
    }
    let need = match family {
        Family::DeltaX { x } | Family::N1Lift { x, .. } => *x,
        _ => 1,
    };
    let owned;
    let sieve: &Sieve = match opts.sieve {
        Some(s) if s.limit() >= need => s,
        _ => {
            owned = Sieve::new(need);
            &owned
        }
    };
    match family {
        Family::LambdaExact { p, m, n } => ball(*p, *m, *n, true, true, family),
        Family::LambdaLe { p, m, n } => ball(*p, *m, *n, false, true, family),
        Family::JExact { p, m, n } => ball(*p, *m, *n, true, false, family),
        Family::JLe { p, m, n } => ball(*p, *m, *n, false, false, family),
        Family::Sphere { m, n } => ball(PNorm::Two, *m, *n, false, false, family),
        Family::Box { d, analytic } => {
            let ranges: Vec<(i64, i64)> =
                d.iter().map(|&dj| (if *analytic { 0 } else { -(dj as i64) }, dj as i64)).collect();
            let elements = product(&ranges);
            IndexSet::new(d.len(), elements, family.clone())
        }
        Family::NinfLift { m, n } => {
            let elements = product(&vec![(0, *m as i64); *n]);
            IndexSet::new(*n, elements, family.clone())
        }
        Family::DeltaX { x } => {
            if *x == 0 {
                return Err(Error::param("Δ(x) needs x ≥ 1"));
            }
            let s = sieve;
            let dim = s.prime_pi(*x)?;
            let elements = (1..=*x).map(|k| s.bohr_lift(k, dim)).collect::<Result<Vec<_>>>()?;
            IndexSet::new(dim, elements, family.clone())
        }
        Family::N1Lift { m, x } => {
            let s = sieve;
            let dim = s.prime_pi(*x)?;
            let elements = s
                .n1_numbers(*m, *x)?
                .into_iter()
                .map(|k| s.bohr_lift(k, dim))
                .collect::<Result<Vec<_>>>()?;
            if opts.cap < elements.len() as u128 {
                return Err(Error::CapExceeded { predicted: elements.len() as u128, cap: opts.cap });
            }
            IndexSet::new(dim, elements, family.clone())
        }
        Family::Custom => Err(Error::param("custom sets are built from explicit elements, not generated")),
    }
}

/// Predicted number of elements, `None` where only enumeration can tell.
pub fn predict_cardinality(family: &Family) -> Result<Option<u128>> {
    Ok(match family {
        Family::LambdaExact { p, m, n } => Some(count_exact(*p, *m, *n, true)),
        Family::LambdaLe { p, m, n } => Some(count_le(*p, *m, *n, true)),
        Family::JExact { p, m, n } => Some(count_exact(*p, *m, *n, false)),
        Family::JLe { p, m, n } => Some(count_le(*p, *m, *n, false)),
        Family::Sphere { m, n } => Some(count_le(PNorm::Two, *m, *n, false)),
        Family::Box { d, analytic } => Some(
            d.iter()
                .map(|&dj| if *analytic { dj as u128 + 1 } else { 2 * dj as u128 + 1 })
                .fold(1u128, |a, b| a.saturating_mul(b)),
        ),
        Family::NinfLift { m, n } => Some(sat_pow(*m as u128 + 1, *n)),
        Family::DeltaX { x } => Some(*x as u128),
        Family::N1Lift { .. } | Family::Custom => None,
    })
}

fn sat_pow(b: u128, e: usize) -> u128 {
    (0..e).fold(1u128, |a, _| a.saturating_mul(b))
}

/// `|{α : ‖α‖_p ≤ m}|` in `ℕ₀ⁿ` (analytic) or `ℤⁿ`, saturating.
pub fn count_le(p: PNorm, m: u64, n: usize, analytic: bool) -> u128 {
    if p == PNorm::Inf {
        let side = if analytic { m as u128 + 1 } else { 2 * m as u128 + 1 };
        return sat_pow(side, n);
    }
    let mut memo = BTreeMap::new();
    count_rec(p, analytic, n, p.budget(m), &mut memo)
}

fn count_exact(p: PNorm, m: u64, n: usize, analytic: bool) -> u128 {
    let le = count_le(p, m, n, analytic);
    if m == 0 {
        return le;
    }
    let below = match p {
        PNorm::One | PNorm::Inf => count_le(p, m - 1, n, analytic),
        PNorm::Two => {
            let mut memo = BTreeMap::new();
            count_rec(p, analytic, n, p.budget(m) - 1, &mut memo)
        }
    };
    le.saturating_sub(below)
}

/// Points with `Σ cost(α_j) ≤ budget`, memoized on `(coords, budget)`.
fn count_rec(p: PNorm, analytic: bool, n: usize, budget: u128, memo: &mut BTreeMap<(usize, u128), u128>) -> u128 {
    if n == 0 {
        return 1;
    }
    let reach = match p {
        PNorm::Two => crate::math::isqrt(budget.min(u64::MAX as u128) as u64) as u128,
        _ => budget,
    };
    if n == 1 {
        return if analytic { reach + 1 } else { 2 * reach + 1 };
    }
    if let Some(&c) = memo.get(&(n, budget)) {
        return c;
    }
    let mut total = count_rec(p, analytic, n - 1, budget, memo);
    for v in 1..=reach {
        let c = count_rec(p, analytic, n - 1, budget - p.cost(v as i64), memo);
        total = total.saturating_add(if analytic { c } else { c.saturating_mul(2) });
    }
    memo.insert((n, budget), total);
    total
}

fn ball(p: PNorm, m: u64, n: usize, exact: bool, analytic: bool, family: &Family) -> Result<IndexSet> {
    let m_i = i64::try_from(m).map_err(|_| Error::Overflow("ball radius"))?;
    let mut out = Vec::new();
    let mut cur = vec![0i64; n];
    fn rec(
        j: usize,
        remaining: u128,
        hit: bool,
        cur: &mut Vec<i64>,
        out: &mut Vec<MultiIndex>,
        cfg: (PNorm, i64, bool, bool),
    ) {
        let (p, m, exact, analytic) = cfg;
        let n = cur.len();
        if j == n {
            let ok = !exact
                || match p {
                    PNorm::Inf => hit,
                    _ => remaining == 0,
                };
            if ok {
                out.push(MultiIndex::from_dense(cur));
            }
            return;
        }
        let after = (n - j - 1) as u128;
        let lo = if analytic { 0 } else { -m };
        for v in lo..=m {
            let c = p.cost(v);
            let (next, hit_next) = match p {
                PNorm::Inf => (remaining, hit || c == remaining),
                _ => {
                    if c > remaining {
                        continue;
                    }
                    (remaining - c, false)
                }
            };
            if exact {
                let feasible = match p {
                    PNorm::Inf => hit_next || after > 0,
                    _ => next <= after * p.cost(m),
                };
                if !feasible {
                    continue;
                }
            }
            cur[j] = v;
            rec(j + 1, next, hit_next, cur, out, cfg);
        }
        cur[j] = 0;
    }
    rec(0, p.budget(m), m == 0, &mut cur, &mut out, (p, m_i, exact, analytic));
    IndexSet::new(n, out, family.clone())
}

/// All points of `∏[lo_j, hi_j]` in lexicographic order.
fn product(ranges: &[(i64, i64)]) -> Vec<MultiIndex> {
    let mut out = Vec::new();
    if ranges.iter().any(|&(lo, hi)| lo > hi) {
        return out;
    }
    let mut cur: Vec<i64> = ranges.iter().map(|r| r.0).collect();
    loop {
        out.push(MultiIndex::from_dense(&cur));
        let mut j = ranges.len();
        loop {
            if j == 0 {
                return out;
            }
            j -= 1;
            if cur[j] < ranges[j].1 {
                cur[j] += 1;
                break;
            }
            cur[j] = ranges[j].0;
        }
    }
}

/// `|Λ₁(m, n)| = binom(n + m − 1, m)` exactly.
pub fn cardinality_lambda1(m: u64, n: u64) -> Result<u128> {
    if n == 0 {
        return Err(Error::param("cardinality_lambda1 needs n ≥ 1"));
    }
    binomial(n + m - 1, m)
}

/// `binom(a, b)` in `u128`, or an overflow error.
pub fn binomial(a: u64, b: u64) -> Result<u128> {
    if b > a {
        return Ok(0);
    }
    let b = b.min(a - b) as u128;
    let a = a as u128;
    let mut r: u128 = 1;
    for i in 1..=b {
        // r = binom(a - b + i, i) after this step; the division is exact
        let g = gcd(r, i);
        let (r1, i1) = (r / g, i / g);
        let f = (a - b + i) / i1;
        r = r1.checked_mul(f).ok_or(Error::Overflow("binomial coefficient"))?;
    }
    Ok(r)
}

fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// `|J_2(≤m, n)|`, the lattice points in the closed ball of radius `m`.
pub fn lattice_count(m: u64, n: usize) -> Result<u128> {
    lattice_count_capped(m, n, DEFAULT_CAP.saturating_mul(1_000_000))
}

pub fn lattice_count_capped(m: u64, n: usize, cap: u128) -> Result<u128> {
    if n == 0 {
        return Err(Error::param("lattice_count needs n ≥ 1"));
    }
    // the memo holds at most n·(m² + 1) entries
    let table = (n as u128).saturating_mul((m as u128).saturating_mul(m as u128) + 1);
    if table > cap {
        return Err(Error::CapExceeded { predicted: table, cap });
    }
    let c = count_le(PNorm::Two, m, n, false);
    if c == u128::MAX {
        return Err(Error::Overflow("lattice point count"));
    }
    Ok(c)
}

/// `N_∞(≤m, n) = {𝔭^α : α ∈ ℕ₀ⁿ, ‖α‖_∞ ≤ m}`, ascending.
pub fn ninf_numbers(m: u64, n: usize, sieve: &Sieve) -> Result<Vec<u64>> {
    let mut out = vec![1u64];
    for j in 1..=n {
        let p = sieve.nth_prime(j)?;
        let mut next = Vec::with_capacity(out.len() * (m as usize + 1));
        for &v in &out {
            let mut w = v;
            next.push(w);
            for _ in 0..m {
                w = w.checked_mul(p).ok_or(Error::Overflow("N_∞ element"))?;
                next.push(w);
            }
        }
        out = next;
    }
    out.sort_unstable();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dense(s: &IndexSet) -> Vec<Vec<i64>> {
        s.iter().map(|a| a.to_dense()).collect()
    }

    #[test]
    fn lambda_exact_small() {
        let s = generate(&Family::LambdaExact { p: PNorm::One, m: 2, n: 2 }).unwrap();
        assert_eq!(dense(&s), [[0, 2], [1, 1], [2, 0]]);
    }

    #[test]
    fn delta_x_four() {
        let s = generate(&Family::DeltaX { x: 4 }).unwrap();
        assert_eq!(s.dim(), 2);
        assert_eq!(dense(&s), [[0, 0], [0, 1], [1, 0], [2, 0]]);
    }

    #[test]
    fn sphere_and_box() {
        let s = generate(&Family::Sphere { m: 1, n: 3 }).unwrap();
        assert_eq!(s.len(), 7);
        let b = generate(&Family::Box { d: vec![1, 1], analytic: false }).unwrap();
        assert_eq!(b.len(), 9);
        assert!(b.contains(&MultiIndex::from_dense(&[-1, 1])));
        assert_eq!(b.as_box(), Some(vec![(-1, 1), (-1, 1)]));
    }

    #[test]
    fn n1_lift_thirty() {
        let s = generate(&Family::N1Lift { m: 2, x: 30 }).unwrap();
        assert_eq!(s.len(), 10);
        assert_eq!(s.dim(), 10);
    }

    #[test]
    fn cardinality_examples() {
        assert_eq!(cardinality_lambda1(2, 2).unwrap(), 3);
        assert_eq!(cardinality_lambda1(0, 5).unwrap(), 1);
        assert_eq!(cardinality_lambda1(5, 5).unwrap(), 126);
        assert_eq!(generate(&Family::LambdaExact { p: PNorm::One, m: 5, n: 5 }).unwrap().len(), 126);
        assert!(matches!(cardinality_lambda1(200, 200), Err(Error::Overflow(_))));
        assert_eq!(binomial(130, 65).unwrap(), 95_067_625_827_960_698_145_584_333_020_095_113_100);
    }

    #[test]
    fn lattice_count_examples() {
        assert_eq!(lattice_count(0, 3).unwrap(), 1);
        assert_eq!(lattice_count(1, 3).unwrap(), 7);
        let mut brute = 0u128;
        for a in -50i64..=50 {
            for b in -50i64..=50 {
                for c in -50i64..=50 {
                    if a * a + b * b + c * c <= 2500 {
                        brute += 1;
                    }
                }
            }
        }
        assert_eq!(lattice_count(50, 3).unwrap(), brute);
    }

    #[test]
    fn predictions_match_enumeration() {
        for p in [PNorm::One, PNorm::Two, PNorm::Inf] {
            for m in 0..4 {
                for n in 1..4 {
                    for f in [
                        Family::LambdaExact { p, m, n },
                        Family::LambdaLe { p, m, n },
                        Family::JExact { p, m, n },
                        Family::JLe { p, m, n },
                    ] {
                        let s = generate(&f).unwrap();
                        assert_eq!(Some(s.len() as u128), predict_cardinality(&f).unwrap(), "{f:?}");
                        let sieve = Sieve::new(10);
                        assert!(s.iter().all(|a| f.admits(a, &sieve).unwrap()), "{f:?}");
                    }
                }
            }
        }
    }

    #[test]
    fn cap_is_enforced() {
        let f = Family::JLe { p: PNorm::Inf, m: 10, n: 10 };
        let opts = GenerateOptions { cap: 1000, sieve: None };
        assert!(matches!(generate_with(&f, &opts), Err(Error::CapExceeded { .. })));
    }

    #[test]
    fn ninf_numbers_small() {
        let s = Sieve::new(100);
        assert_eq!(ninf_numbers(2, 2, &s).unwrap(), [1, 2, 3, 4, 6, 9, 12, 18, 36]);
    }

    #[test]
    fn family_round_trip() {
        for f in [
            Family::LambdaExact { p: PNorm::Inf, m: 3, n: 2 },
            Family::Box { d: vec![2, 1], analytic: true },
            Family::DeltaX { x: 16 },
            Family::N1Lift { m: 2, x: 30 },
            Family::Custom,
        ] {
            assert_eq!(Family::parse(f.tag(), &f.params()).unwrap(), f);
        }
    }

    #[test]
    fn sparse_order_is_dense_lex() {
        let a = MultiIndex::from_dense(&[0, -1, 2]);
        let b = MultiIndex::from_dense(&[0, 0, 0]);
        let c = MultiIndex::from_dense(&[0, 0, 1]);
        let d = MultiIndex::from_dense(&[1, -5, 0]);
        let mut v = vec![d.clone(), c.clone(), b.clone(), a.clone()];
        v.sort();
        assert_eq!(v, [a, b, c, d]);
    }
}
