//! Primes, factorization and the Bohr lift `n = 𝔭^α ↦ α`.
//!
//! Everything here is exact integer arithmetic.

use crate::indexsets::MultiIndex;
use crate::{Error, Result};
use alloc::vec;
use alloc::vec::Vec;

/// Default smallest-prime-factor table bound.
pub const DEFAULT_SIEVE_LIMIT: u64 = 10_000_000;

/// Smallest-prime-factor table up to an inclusive limit, with the primes in
/// that range. Factorization above the limit falls back to trial division.
#[derive(Clone, Debug)]
pub struct Sieve {
    spf: Vec<u32>,
    primes: Vec<u32>,
}

impl Sieve {
    /// Linear sieve over `0..=limit`.
    ///
    /// # Panics
    /// If `limit` does not fit the `u32` table entries.
    pub fn new(limit: u64) -> Self {
        assert!(limit < u32::MAX as u64, "sieve limit {limit} exceeds the u32 table range");
        let limit = limit.max(1) as usize;
        let mut spf = vec![0u32; limit + 1];
        let mut primes = Vec::new();
        for i in 2..=limit {
            if spf[i] == 0 {
                spf[i] = i as u32;
                primes.push(i as u32);
            }
            let si = spf[i];
            for &p in &primes {
                let ip = i * p as usize;
                if p > si || ip > limit {
                    break;
                }
                spf[ip] = p;
            }
        }
        Sieve { spf, primes }
    }

    pub fn limit(&self) -> u64 {
        (self.spf.len() - 1) as u64
    }

    /// All primes up to the sieve limit.
    pub fn primes(&self) -> &[u32] {
        &self.primes
    }

    /// The primes `≤ x`, ascending. Requires `x ≤ limit`.
    pub fn primes_up_to(&self, x: u64) -> Result<&[u32]> {
        self.check(x)?;
        Ok(&self.primes[..self.prime_pi_unchecked(x)])
    }

    /// `π(x)`. Requires `x ≤ limit`.
    pub fn prime_pi(&self, x: u64) -> Result<usize> {
        self.check(x)?;
        Ok(self.prime_pi_unchecked(x))
    }

    fn prime_pi_unchecked(&self, x: u64) -> usize {
        self.primes.partition_point(|&p| (p as u64) <= x)
    }

    /// The `k`-th prime, 1-based.
    pub fn nth_prime(&self, k: usize) -> Result<u64> {
        if k == 0 {
            return Err(Error::param("primes are indexed from 1"));
        }
        self.primes
            .get(k - 1)
            .map(|&p| p as u64)
            .ok_or_else(|| Error::param(alloc::format!("prime #{k} lies beyond the sieve limit {}", self.limit())))
    }

    /// 1-based position of the prime `p` in the prime sequence.
    pub fn prime_index(&self, p: u64) -> Result<usize> {
        self.check(p)?;
        match self.primes.binary_search(&(p as u32)) {
            Ok(i) => Ok(i + 1),
            Err(_) => Err(Error::param(alloc::format!("{p} is not prime"))),
        }
    }

    fn check(&self, x: u64) -> Result<()> {
        if x > self.limit() {
            Err(Error::param(alloc::format!("{x} exceeds the sieve limit {}", self.limit())))
        } else {
            Ok(())
        }
    }

    /// Prime factorization as ascending `(p, e)` pairs; empty for `n = 1`.
    pub fn factor(&self, mut n: u64) -> Vec<(u64, u32)> {
        let mut out: Vec<(u64, u32)> = Vec::new();
        let push = |p: u64, out: &mut Vec<(u64, u32)>| match out.last_mut() {
            Some((q, e)) if *q == p => *e += 1,
            _ => out.push((p, 1)),
        };
        if n > self.limit() {
            for &p in &self.primes {
                let p = p as u64;
                if p * p > n {
                    break;
                }
                while n % p == 0 {
                    push(p, &mut out);
                    n /= p;
                }
                if n <= self.limit() {
                    break;
                }
            }
            if n > self.limit() {
                // primes beyond the table: odd trial divisors
                let mut d = self.limit() | 1;
                while d.checked_mul(d).is_some_and(|sq| sq <= n) {
                    while n % d == 0 {
                        push(d, &mut out);
                        n /= d;
                    }
                    d += 2;
                }
                if n > self.limit() {
                    push(n, &mut out);
                    n = 1;
                }
            }
        }
        while n > 1 {
            let p = self.spf[n as usize] as u64;
            push(p, &mut out);
            n /= p;
        }
        out
    }

    /// Full factorization record of `n ≥ 1` with exponents over the first
    /// `π(largest prime factor)` primes.
    pub fn factorization(&self, n: u64) -> Result<Factorization> {
        if n == 0 {
            return Err(Error::param("factorization needs n ≥ 1"));
        }
        let dim = match self.factor(n).last() {
            Some(&(p, _)) => self.prime_index(p)?,
            None => 0,
        };
        Ok(Factorization { n, exponents: self.bohr_lift(n, dim)? })
    }

    /// The exponent vector `α` with `𝔭^α = n`, padded to `dim` coordinates.
    pub fn bohr_lift(&self, n: u64, dim: usize) -> Result<MultiIndex> {
        if n == 0 {
            return Err(Error::param("the Bohr lift is defined for n ≥ 1"));
        }
        let mut nz = Vec::new();
        for (p, e) in self.factor(n) {
            let j = self.prime_index(p)?;
            if j > dim {
                return Err(Error::Dimension { expected: j, got: dim });
            }
            nz.push(((j - 1) as u32, e as i64));
        }
        Ok(MultiIndex::from_sparse(dim, nz))
    }

    /// `Ω(n)`, prime divisors with multiplicity; `Ω(1) = 0`.
    pub fn big_omega(&self, n: u64) -> u32 {
        self.factor(n).iter().map(|&(_, e)| e).sum()
    }

    /// `Ω(k)` for `k = 0..=x` (with `Ω(0) = Ω(1) = 0`). Requires `x ≤ limit`.
    pub fn big_omega_table(&self, x: u64) -> Result<Vec<u8>> {
        self.check(x)?;
        let x = x as usize;
        let mut om = vec![0u8; x + 1];
        for k in 2..=x {
            om[k] = om[k / self.spf[k] as usize] + 1;
        }
        Ok(om)
    }

    /// All `n ∈ [1, x]` with `Ω(n) = m`, ascending.
    pub fn n1_numbers(&self, m: u32, x: u64) -> Result<Vec<u64>> {
        let om = self.big_omega_table(x)?;
        Ok((1..=x).filter(|&k| om[k as usize] as u32 == m).collect())
    }
}

/// `n` together with its Bohr lift.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Factorization {
    pub n: u64,
    pub exponents: MultiIndex,
}

impl Factorization {
    /// `∏ 𝔭_j^{α_j}`, checked.
    pub fn reconstruct(&self, sieve: &Sieve) -> Result<u64> {
        pow_product(&self.exponents, sieve)
    }
}

/// `𝔭^α` for a non-negative multi-index, with overflow detection.
pub fn pow_product(alpha: &MultiIndex, sieve: &Sieve) -> Result<u64> {
    let mut acc: u64 = 1;
    for (j, e) in alpha.nonzero() {
        if e < 0 {
            return Err(Error::param("negative exponent in a Bohr lift"));
        }
        let p = sieve.nth_prime(j + 1)?;
        for _ in 0..e {
            acc = acc.checked_mul(p).ok_or(Error::Overflow("𝔭^α"))?;
        }
    }
    Ok(acc)
}

/// The primes `≤ x`.
pub fn primes_up_to(x: u64) -> Vec<u64> {
    let s = Sieve::new(x);
    s.primes().iter().map(|&p| p as u64).filter(|&p| p <= x).collect()
}

/// `π(x)`.
pub fn prime_pi(x: u64) -> usize {
    Sieve::new(x).primes().len()
}

/// Bohr lift of `n` into `dim` coordinates.
pub fn bohr_lift(n: u64, dim: usize) -> Result<MultiIndex> {
    Sieve::new(n.max(2)).bohr_lift(n, dim)
}

/// `Ω(n)`.
pub fn big_omega(n: u64) -> u32 {
    let s = Sieve::new(crate::math::isqrt(n).max(2));
    s.big_omega(n)
}

/// The integers in `[1, x]` with exactly `m` prime factors counted with multiplicity.
pub fn n1_numbers(m: u32, x: u64) -> Result<Vec<u64>> {
    Sieve::new(x).n1_numbers(m, x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trial_is_prime(n: u64) -> bool {
        n >= 2 && (2..n).take_while(|d| d * d <= n).all(|d| n % d != 0)
    }

    #[test]
    fn small_prime_lists() {
        assert!(primes_up_to(1).is_empty());
        assert_eq!(primes_up_to(10), [2, 3, 5, 7]);
        let oracle: Vec<u64> = (2..=100).filter(|&n| trial_is_prime(n)).collect();
        assert_eq!(primes_up_to(100), oracle);
        assert_eq!(oracle.len(), 25);
    }

    #[test]
    fn prime_pi_values() {
        assert_eq!(prime_pi(1), 0);
        assert_eq!(prime_pi(10), 4);
        assert_eq!(prime_pi(1_000_000), 78_498);
    }

    #[test]
    fn bohr_lift_examples() {
        assert_eq!(bohr_lift(1, 3).unwrap().to_dense(), [0, 0, 0]);
        assert_eq!(bohr_lift(12, 2).unwrap().to_dense(), [2, 1]);
        assert_eq!(bohr_lift(9750, 6).unwrap().to_dense(), [1, 1, 3, 0, 0, 1]);
        assert_eq!(bohr_lift(9750, 5), Err(Error::Dimension { expected: 6, got: 5 }));
    }

    #[test]
    fn omega_examples() {
        assert_eq!(big_omega(1), 0);
        assert_eq!(big_omega(12), 3);
        assert_eq!(big_omega(1024), 10);
    }

    #[test]
    fn n1_examples() {
        assert_eq!(n1_numbers(1, 10).unwrap(), [2, 3, 5, 7]);
        let oracle: Vec<u64> = (1..=30).filter(|&n| big_omega(n) == 2).collect();
        assert_eq!(n1_numbers(2, 30).unwrap(), oracle);
        assert_eq!(oracle, [4, 6, 9, 10, 14, 15, 21, 22, 25, 26]);
    }

    #[test]
    fn n1_semiprimes_to_a_million() {
        // sieve-of-Ω oracle: count through the multiplicative recurrence directly
        let s = Sieve::new(1_000_000);
        let mut count = 0usize;
        for n in 2..=1_000_000u64 {
            let f = s.factor(n);
            if f.iter().map(|&(_, e)| e).sum::<u32>() == 2 {
                count += 1;
            }
        }
        assert_eq!(count, 210_035);
        assert_eq!(s.n1_numbers(2, 1_000_000).unwrap().len(), count);
    }

    #[test]
    fn factor_above_table_uses_trial_division() {
        let s = Sieve::new(100);
        assert_eq!(s.factor(101 * 103), [(101, 1), (103, 1)]);
        assert_eq!(s.factor(2 * 2 * 97 * 1009), [(2, 2), (97, 1), (1009, 1)]);
        assert_eq!(s.factor(1_000_003), [(1_000_003, 1)]);
    }

    #[test]
    fn factorization_round_trip() {
        let s = Sieve::new(1000);
        let f = s.factorization(720).unwrap();
        assert_eq!(f.exponents.to_dense(), [4, 2, 1]);
        assert_eq!(f.reconstruct(&s).unwrap(), 720);
        assert_eq!(s.factorization(1).unwrap().exponents.dim(), 0);
    }
}
