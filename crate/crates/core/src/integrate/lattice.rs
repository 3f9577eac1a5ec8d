//! Korobov rank-1 lattice rules `x_i = {i·z/N}`, `z = (1, a, a², …) mod N`.
//!
//! `N` is taken prime so that every `z_j` is a unit and every one-dimensional
//! projection is the full grid `{0, 1/N, …, (N−1)/N}`. The multiplier `a` is
//! picked from a fixed candidate list by the weighted `P₂` criterion.

use crate::math::frac;
use alloc::vec::Vec;
use core::f64::consts::PI;

// dimensions entering the figure of merit, with weights 1/j²
const MERIT_DIMS: usize = 12;
const MAX_CANDIDATES: usize = 64;
const MERIT_BUDGET: usize = 20_000_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LatticeRule {
    points: u64,
    z: Vec<u64>,
}

impl LatticeRule {
    /// A rule with the largest prime `N ≤ max_points` (at least 2) nodes.
    pub fn korobov(max_points: usize, dim: usize) -> Self {
        let n = largest_prime_at_most(max_points.max(2) as u64);
        let a = choose_multiplier(n, dim);
        LatticeRule { points: n, z: korobov_vector(n, a, dim) }
    }

    /// A rule with an explicit generating vector.
    pub fn with_generator(points: u64, z: Vec<u64>) -> Self {
        assert!(points >= 1);
        LatticeRule { points, z: z.into_iter().map(|v| v % points).collect() }
    }

    pub fn points(&self) -> u64 {
        self.points
    }

    pub fn dim(&self) -> usize {
        self.z.len()
    }

    pub fn generator(&self) -> &[u64] {
        &self.z
    }

    /// Walks the shifted points `{i·z/N + shift}` in order of `i`.
    pub fn shifted<'a>(&'a self, shift: &'a [f64]) -> ShiftedPoints<'a> {
        assert_eq!(shift.len(), self.z.len());
        ShiftedPoints { rule: self, shift, pos: alloc::vec![0; self.z.len()], remaining: self.points }
    }
}

/// Iterator state over a shifted lattice; fills caller-provided buffers.
pub struct ShiftedPoints<'a> {
    rule: &'a LatticeRule,
    shift: &'a [f64],
    pos: Vec<u64>,
    remaining: u64,
}

impl ShiftedPoints<'_> {
    /// Writes the next point into `out`; `false` once exhausted.
    pub fn next_into(&mut self, out: &mut [f64]) -> bool {
        if self.remaining == 0 {
            return false;
        }
        self.remaining -= 1;
        let n = self.rule.points;
        let inv = 1.0 / n as f64;
        for j in 0..self.pos.len() {
            out[j] = frac(self.pos[j] as f64 * inv + self.shift[j]);
            let p = self.pos[j] + self.rule.z[j];
            self.pos[j] = if p >= n { p - n } else { p };
        }
        true
    }
}

pub fn largest_prime_at_most(n: u64) -> u64 {
    let mut c = n.max(2);
    while !is_prime(c) {
        c -= 1;
    }
    c
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

fn mulmod(a: u64, b: u64, n: u64) -> u64 {
    ((a as u128 * b as u128) % n as u128) as u64
}

fn korobov_vector(n: u64, a: u64, dim: usize) -> Vec<u64> {
    let mut z = Vec::with_capacity(dim);
    let mut v = 1 % n;
    for _ in 0..dim {
        z.push(v);
        v = mulmod(v, a, n);
    }
    z
}

/// Multiplicative order of `a` mod `n`, capped at `cap`.
fn order_capped(a: u64, n: u64, cap: usize) -> usize {
    let mut v = a % n;
    for k in 1..cap {
        if v == 1 {
            return k;
        }
        v = mulmod(v, a, n);
    }
    cap
}

/// Weighted `P₂` figure of merit (smaller is better).
fn p2_merit(n: u64, z: &[u64]) -> f64 {
    let c = 2.0 * PI * PI;
    let mut total = 0.0;
    for i in 0..n {
        let mut prod = 1.0;
        for (j, &zj) in z.iter().enumerate() {
            let x = mulmod(i, zj, n) as f64 / n as f64;
            let b2 = x * x - x + 1.0 / 6.0;
            prod *= 1.0 + c * b2 / ((j + 1) * (j + 1)) as f64;
        }
        total += prod;
    }
    total / n as f64 - 1.0
}

fn choose_multiplier(n: u64, dim: usize) -> u64 {
    if dim <= 1 {
        return 1;
    }
    if n <= 3 {
        return n - 1;
    }
    let d_merit = dim.min(MERIT_DIMS);
    let budget = (MERIT_BUDGET / (n as usize * d_merit).max(1)).clamp(4, MAX_CANDIDATES);
    let phi = 0.5 * (1.0 + crate::math::sqrt(5.0));
    let mut cands: Vec<u64> = (1..=MAX_CANDIDATES)
        .map(|c| 2 + (frac(c as f64 * phi) * (n - 3) as f64) as u64)
        .collect();
    cands.sort_unstable();
    cands.dedup();
    // full multiplicative order first, so no coordinate repeats another
    let need = dim.min(n as usize - 1);
    let orders: Vec<usize> = cands.iter().map(|&a| order_capped(a, n, need)).collect();
    let top = *orders.iter().max().unwrap();
    let mut best = (f64::INFINITY, 1);
    for (&a, _) in cands.iter().zip(&orders).filter(|(_, &o)| o == top).take(budget) {
        let merit = p2_merit(n, &korobov_vector(n, a, d_merit));
        if merit < best.0 {
            best = (merit, a);
        }
    }
    best.1
}
