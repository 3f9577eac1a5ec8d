//! A parallel [`Backend`] with shared caches.

use projconst_core::integrate::lattice::LatticeRule;
use projconst_core::kernels::{self, KernelKind, KernelSpec};
use projconst_core::numtheory::Sieve;
use projconst_core::{Backend, Result};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex, RwLock};

/// Environment variable naming the directory for persisted caches.
pub const CACHE_DIR_VAR: &str = "HAAR_CACHE_DIR";

const KERNEL_FILE: &str = "lebesgue.json";
const LATTICE_FILE: &str = "lattices.json";
const MIN_SIEVE: u64 = 1 << 16;

/// Rayon-backed execution with a shared sieve, memoized Lebesgue constants and
/// lattice rules.
///
/// `map_indexed` keeps index order, so results are identical for every
/// thread count. When a cache directory is set, the kernel and lattice memos
/// are loaded from it on construction and written back by [`Runtime::flush`]
/// (also called on drop).
pub struct Runtime {
    pool: Option<rayon::ThreadPool>,
    jobs: usize,
    sieve: RwLock<Option<Arc<Sieve>>>,
    kernels: RwLock<HashMap<KernelSpec, f64>>,
    lattices: Mutex<HashMap<(usize, usize), Arc<LatticeRule>>>,
    cache_dir: Option<PathBuf>,
    dirty: Mutex<bool>,
}

#[derive(Serialize, Deserialize)]
struct KernelEntry {
    m: u64,
    analytic: bool,
    /// IEEE bits, so the memo round-trips exactly.
    bits: u64,
}

#[derive(Serialize, Deserialize)]
struct LatticeEntry {
    max_points: usize,
    dim: usize,
    points: u64,
    z: Vec<u64>,
}

impl Runtime {
    /// `jobs = None` uses rayon's default thread count; `Some(1)` runs on the
    /// calling thread.
    pub fn new(jobs: Option<usize>) -> std::io::Result<Self> {
        let jobs = jobs.unwrap_or_else(rayon::current_num_threads).max(1);
        let pool = if jobs > 1 {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(jobs)
                .build()
                .map_err(std::io::Error::other)?;
            Some(pool)
        } else {
            None
        };
        Ok(Runtime {
            pool,
            jobs,
            sieve: RwLock::new(None),
            kernels: RwLock::new(HashMap::new()),
            lattices: Mutex::new(HashMap::new()),
            cache_dir: None,
            dirty: Mutex::new(false),
        })
    }

    /// Like [`Runtime::new`], with caches under `$HAAR_CACHE_DIR` when set.
    pub fn from_env(jobs: Option<usize>) -> std::io::Result<Self> {
        let rt = Runtime::new(jobs)?;
        match std::env::var_os(CACHE_DIR_VAR) {
            Some(dir) if !dir.is_empty() => rt.with_cache_dir(dir),
            _ => Ok(rt),
        }
    }

    pub fn with_cache_dir(mut self, dir: impl Into<PathBuf>) -> std::io::Result<Self> {
        let dir = dir.into();
        fs::create_dir_all(&dir)?;
        self.load(&dir)?;
        self.cache_dir = Some(dir);
        Ok(self)
    }

    pub fn jobs(&self) -> usize {
        self.jobs
    }

    pub fn cache_dir(&self) -> Option<&Path> {
        self.cache_dir.as_deref()
    }

    fn load(&mut self, dir: &Path) -> std::io::Result<()> {
        if let Some(entries) = read_json::<Vec<KernelEntry>>(&dir.join(KERNEL_FILE))? {
            let map = self.kernels.get_mut().unwrap();
            for e in entries {
                let kind = if e.analytic { KernelKind::Analytic } else { KernelKind::Symmetric };
                map.insert(KernelSpec { m: e.m, kind }, f64::from_bits(e.bits));
            }
        }
        if let Some(entries) = read_json::<Vec<LatticeEntry>>(&dir.join(LATTICE_FILE))? {
            let map = self.lattices.get_mut().unwrap();
            for e in entries {
                if e.z.len() == e.dim {
                    map.insert((e.max_points, e.dim), Arc::new(LatticeRule::with_generator(e.points, e.z)));
                }
            }
        }
        Ok(())
    }

    /// Writes the memo tables to the cache directory, if any.
    pub fn flush(&self) -> std::io::Result<()> {
        let Some(dir) = &self.cache_dir else { return Ok(()) };
        let mut dirty = self.dirty.lock().unwrap();
        if !*dirty {
            return Ok(());
        }
        let mut kernels: Vec<KernelEntry> = self
            .kernels
            .read()
            .unwrap()
            .iter()
            .map(|(s, v)| KernelEntry { m: s.m, analytic: s.kind == KernelKind::Analytic, bits: v.to_bits() })
            .collect();
        kernels.sort_by_key(|e| (e.analytic, e.m));
        let mut lattices: Vec<LatticeEntry> = self
            .lattices
            .lock()
            .unwrap()
            .iter()
            .map(|(&(max_points, dim), r)| LatticeEntry {
                max_points,
                dim,
                points: r.points(),
                z: r.generator().to_vec(),
            })
            .collect();
        lattices.sort_by_key(|e| (e.max_points, e.dim));
        write_json(&dir.join(KERNEL_FILE), &kernels)?;
        write_json(&dir.join(LATTICE_FILE), &lattices)?;
        *dirty = false;
        Ok(())
    }

    fn touch(&self) {
        if self.cache_dir.is_some() {
            *self.dirty.lock().unwrap() = true;
        }
    }
}

impl Drop for Runtime {
    fn drop(&mut self) {
        let _ = self.flush();
    }
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> std::io::Result<Option<T>> {
    match fs::read(path) {
        // a corrupt cache is ignored and rebuilt
        Ok(bytes) => Ok(serde_json::from_slice(&bytes).ok()),
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(None),
        Err(e) => Err(e),
    }
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> std::io::Result<()> {
    let tmp = path.with_extension("json.tmp");
    fs::write(&tmp, serde_json::to_vec(value)?)?;
    fs::rename(tmp, path)
}

impl Backend for Runtime {
    fn map_indexed<T, F>(&self, n: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        match &self.pool {
            Some(pool) if n > 1 => pool.install(|| (0..n).into_par_iter().map(f).collect()),
            _ => (0..n).map(f).collect(),
        }
    }

    fn sieve(&self, limit: u64) -> Arc<Sieve> {
        if let Some(s) = self.sieve.read().unwrap().as_ref() {
            if s.limit() >= limit {
                return s.clone();
            }
        }
        let mut slot = self.sieve.write().unwrap();
        if let Some(s) = slot.as_ref() {
            if s.limit() >= limit {
                return s.clone();
            }
        }
        let old = slot.as_ref().map_or(0, |s| s.limit());
        let s = Arc::new(Sieve::new(limit.max(MIN_SIEVE).max(old.saturating_mul(2))));
        *slot = Some(s.clone());
        s
    }

    fn lebesgue(&self, spec: KernelSpec) -> Result<f64> {
        if let Some(&v) = self.kernels.read().unwrap().get(&spec) {
            return Ok(v);
        }
        let v = kernels::lebesgue_constant(spec)?.value;
        // concurrent misses compute the same value; last writer wins
        self.kernels.write().unwrap().insert(spec, v);
        self.touch();
        Ok(v)
    }

    fn lattice(&self, points: usize, dim: usize) -> Arc<LatticeRule> {
        if let Some(r) = self.lattices.lock().unwrap().get(&(points, dim)) {
            return r.clone();
        }
        let r = Arc::new(LatticeRule::korobov(points, dim));
        self.lattices.lock().unwrap().insert((points, dim), r.clone());
        self.touch();
        r
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_is_kept() {
        let rt = Runtime::new(Some(3)).unwrap();
        let v = rt.map_indexed(1000, |i| i * i);
        assert!(v.iter().enumerate().all(|(i, &x)| x == i * i));
    }

    #[test]
    fn sieve_grows() {
        let rt = Runtime::new(Some(1)).unwrap();
        let a = rt.sieve(100);
        assert!(a.limit() >= 100);
        let b = rt.sieve(10);
        assert!(Arc::ptr_eq(&a, &b));
        let c = rt.sieve(a.limit() + 1);
        assert!(c.limit() > a.limit());
    }

    #[test]
    fn caches_persist() {
        let dir = tempfile::tempdir().unwrap();
        {
            let rt = Runtime::new(Some(1)).unwrap().with_cache_dir(dir.path()).unwrap();
            rt.lebesgue(KernelSpec::symmetric(7)).unwrap();
            rt.lattice(1000, 3);
        }
        let rt = Runtime::new(Some(1)).unwrap().with_cache_dir(dir.path()).unwrap();
        assert_eq!(rt.kernels.read().unwrap().len(), 1);
        let v = rt.lebesgue(KernelSpec::symmetric(7)).unwrap();
        assert_eq!(v.to_bits(), kernels::lebesgue_l(7).unwrap().to_bits());
        let r = rt.lattice(1000, 3);
        assert_eq!(r.generator(), LatticeRule::korobov(1000, 3).generator());
    }
}
