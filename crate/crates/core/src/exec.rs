use crate::kernels::{self, KernelSpec};
use crate::integrate::lattice::LatticeRule;
use crate::numtheory::Sieve;
use crate::Result;
use alloc::sync::Arc;
use alloc::vec::Vec;

/// Execution and caching hooks used by the heavier routines.
///
/// Every method has a self-contained default, so [`Sequential`] is a complete
/// backend. Implementations must return `map_indexed` results in index order;
/// all reductions in this crate are performed over that order, which is what
/// makes estimates independent of the degree of parallelism.
pub trait Backend: Sync {
    fn map_indexed<T, F>(&self, n: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send;

    /// A sieve covering at least `limit`.
    fn sieve(&self, limit: u64) -> Arc<Sieve> {
        Arc::new(Sieve::new(limit))
    }

    /// Lebesgue constant of a Dirichlet kernel.
    fn lebesgue(&self, spec: KernelSpec) -> Result<f64> {
        kernels::lebesgue_constant(spec).map(|q| q.value)
    }

    /// Rank-1 lattice rule with `points` nodes in `dim` dimensions.
    fn lattice(&self, points: usize, dim: usize) -> Arc<LatticeRule> {
        Arc::new(LatticeRule::korobov(points, dim))
    }
}

/// Single-threaded backend without caches.
#[derive(Clone, Copy, Debug, Default)]
pub struct Sequential;

impl Backend for Sequential {
    fn map_indexed<T, F>(&self, n: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        (0..n).map(f).collect()
    }
}
