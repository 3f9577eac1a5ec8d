//! Fast repeated evaluation of `Σ_α c_α e^{2πi⟨α,θ⟩}` at many points.
//!
//! Elements are grouped by their prefix (every coordinate but the last).
//! Prefix monomials form a tree in which each node differs from its parent
//! by one step `±e_j`, so every node costs a single complex multiplication.
//! Within a prefix, maximal runs of consecutive last-coordinate exponents
//! with a common coefficient are summed as geometric series.

use super::TrigPolynomial;
use crate::math::{abs, cis_turns};
use crate::Complex64;
use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

// below this |1 − w| a run is summed term by term
const GEOMETRIC_GUARD: f64 = 1e-3;

#[derive(Clone, Copy, Debug)]
struct Node {
    parent: u32,
    slot: u32,
    forward: bool,
}

#[derive(Clone, Copy, Debug)]
struct Run {
    node: u32,
    lo: i64,
    hi: i64,
    coef: Complex64,
}

/// A polynomial compiled for repeated evaluation.
#[derive(Clone, Debug)]
pub struct Evaluator {
    dim: usize,
    coords: Vec<usize>,
    nodes: Vec<Node>,
    runs: Vec<Run>,
    last_lo: i64,
    last_hi: i64,
    geometric: bool,
    constant: Complex64,
}

/// Scratch buffers for [`Evaluator::eval`]; one per thread.
#[derive(Clone, Debug, Default)]
pub struct Workspace {
    z: Vec<Complex64>,
    vals: Vec<Complex64>,
    pow: Vec<Complex64>,
}

impl Evaluator {
    pub fn new(p: &TrigPolynomial) -> Self {
        let dim = p.dim();
        let zero = Complex64::new(0.0, 0.0);
        if dim == 0 {
            let constant = p.coefficients().iter().fold(zero, |a, &c| a + c);
            return Evaluator {
                dim,
                coords: Vec::new(),
                nodes: Vec::new(),
                runs: Vec::new(),
                last_lo: 0,
                last_hi: 0,
                geometric: false,
                constant,
            };
        }
        let last = dim - 1;
        let mut ids: BTreeMap<Vec<(u32, i64)>, u32> = BTreeMap::new();
        let mut slots: BTreeMap<usize, u32> = BTreeMap::new();
        let mut coords = Vec::new();
        let mut nodes = vec![Node { parent: 0, slot: 0, forward: true }];
        ids.insert(Vec::new(), 0);

        fn node_of(
            prefix: &[(u32, i64)],
            ids: &mut BTreeMap<Vec<(u32, i64)>, u32>,
            slots: &mut BTreeMap<usize, u32>,
            coords: &mut Vec<usize>,
            nodes: &mut Vec<Node>,
        ) -> u32 {
            if let Some(&id) = ids.get(prefix) {
                return id;
            }
            let (j, e) = *prefix.last().expect("root is registered");
            let mut parent = prefix.to_vec();
            let step = if e > 0 { -1 } else { 1 };
            if e + step == 0 {
                parent.pop();
            } else {
                parent.last_mut().unwrap().1 = e + step;
            }
            let pid = node_of(&parent, ids, slots, coords, nodes);
            let slot = *slots.entry(j as usize).or_insert_with(|| {
                coords.push(j as usize);
                (coords.len() - 1) as u32
            });
            nodes.push(Node { parent: pid, slot, forward: e > 0 });
            let id = (nodes.len() - 1) as u32;
            ids.insert(prefix.to_vec(), id);
            id
        }

        let mut runs: Vec<Run> = Vec::new();
        let (mut lo, mut hi) = (i64::MAX, i64::MIN);
        for (alpha, &c) in p.support().iter().zip(p.coefficients()) {
            if c == zero {
                continue;
            }
            let mut prefix: Vec<(u32, i64)> = alpha.nonzero().map(|(j, e)| (j as u32, e)).collect();
            let e_last = match prefix.last() {
                Some(&(j, e)) if j as usize == last => {
                    prefix.pop();
                    e
                }
                _ => 0,
            };
            lo = lo.min(e_last);
            hi = hi.max(e_last);
            let id = node_of(&prefix, &mut ids, &mut slots, &mut coords, &mut nodes);
            match runs.last_mut() {
                Some(r) if r.node == id && r.hi + 1 == e_last && r.coef == c => r.hi = e_last,
                _ => runs.push(Run { node: id, lo: e_last, hi: e_last, coef: c }),
            }
        }
        if runs.is_empty() {
            lo = 0;
            hi = 0;
        }
        let geometric = runs.iter().any(|r| r.hi > r.lo);
        Evaluator { dim, coords, nodes, runs, last_lo: lo, last_hi: hi, geometric, constant: zero }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of prefix nodes (including the root).
    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn run_count(&self) -> usize {
        self.runs.len()
    }

    pub fn workspace(&self) -> Workspace {
        Workspace {
            z: vec![Complex64::new(0.0, 0.0); self.coords.len()],
            vals: vec![Complex64::new(1.0, 0.0); self.nodes.len()],
            pow: vec![Complex64::new(0.0, 0.0); (self.last_hi - self.last_lo + 2) as usize],
        }
    }

    /// `P(θ)` for `θ ∈ [0,1)^dim` (only the first `dim` entries are read).
    pub fn eval(&self, theta: &[f64], ws: &mut Workspace) -> Complex64 {
        if self.dim == 0 {
            return self.constant;
        }
        debug_assert!(theta.len() >= self.dim);
        for (s, &j) in self.coords.iter().enumerate() {
            ws.z[s] = cis_turns(theta[j]);
        }
        for i in 1..self.nodes.len() {
            let n = self.nodes[i];
            let z = ws.z[n.slot as usize];
            let step = if n.forward { z } else { z.conj() };
            ws.vals[i] = ws.vals[n.parent as usize] * step;
        }
        let t = theta[self.dim - 1];
        let w = cis_turns(t);
        ws.pow[0] = cis_turns(crate::math::frac(self.last_lo as f64 * t));
        for k in 1..ws.pow.len() {
            ws.pow[k] = ws.pow[k - 1] * w;
        }
        let one = Complex64::new(1.0, 0.0);
        let inv = if self.geometric && abs(one - w) >= GEOMETRIC_GUARD { Some(one / (one - w)) } else { None };
        let mut acc = Complex64::new(0.0, 0.0);
        for r in &self.runs {
            let a = (r.lo - self.last_lo) as usize;
            let s = if r.hi == r.lo {
                ws.pow[a]
            } else {
                let b = (r.hi - self.last_lo) as usize;
                match inv {
                    Some(inv) => (ws.pow[a] - ws.pow[b + 1]) * inv,
                    None => ws.pow[a..=b].iter().fold(Complex64::new(0.0, 0.0), |x, &y| x + y),
                }
            };
            acc += ws.vals[r.node as usize] * (r.coef * s);
        }
        acc
    }
}
