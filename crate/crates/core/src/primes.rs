//! Prime tables and the classical prime sums and products built on them.
//!
//! A [`PrimeTable`] is a linear sieve that records the least prime factor of
//! every integer up to its limit, so any `m <= limit` factors in `O(Ω(m))`
//! steps. Tables are immutable once built and can be shared freely between
//! threads.

use crate::error::{domain, range, Result};

/// Largest sieve limit accepted by [`PrimeTable::new`] (about 400 MB of
/// least-prime-factor storage).
pub const MAX_SIEVE_LIMIT: u64 = 100_000_000;

/// Euler's constant γ.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

#[derive(Debug, Clone)]
pub struct PrimeTable {
    limit: u64,
    primes: Vec<u64>,
    lpf: Vec<u32>,
}

impl PrimeTable {
    /// Sieves all primes up to `limit` together with the least prime factor
    /// of every `2 <= m <= limit`.
    pub fn new(limit: u64) -> Result<Self> {
        if limit < 2 {
            return domain(format!("sieve limit must be at least 2, got {limit}"));
        }
        if limit > MAX_SIEVE_LIMIT {
            return domain(format!(
                "sieve limit {limit} exceeds the supported maximum {MAX_SIEVE_LIMIT}"
            ));
        }
        let size = limit as usize + 1;
        let mut lpf = vec![0u32; size];
        let mut primes: Vec<u64> = Vec::new();
        for i in 2..size {
            if lpf[i] == 0 {
                lpf[i] = i as u32;
                primes.push(i as u64);
            }
            let li = lpf[i] as u64;
            for &p in &primes {
                if p > li {
                    break;
                }
                let m = i as u64 * p;
                if m > limit {
                    break;
                }
                lpf[m as usize] = p as u32;
            }
        }
        Ok(Self { limit, primes, lpf })
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    /// All primes `<= limit`, ascending.
    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    /// Least prime factor of `m`, for `2 <= m <= limit`.
    pub fn lpf(&self, m: u64) -> Option<u64> {
        if (2..=self.limit).contains(&m) {
            Some(self.lpf[m as usize] as u64)
        } else {
            None
        }
    }

    pub fn is_prime(&self, m: u64) -> Option<bool> {
        if m < 2 {
            return Some(false);
        }
        self.lpf(m).map(|p| p == m)
    }

    /// The `i`-th prime, 1-indexed (`nth_prime(1) == 2`).
    pub fn nth_prime(&self, i: usize) -> Result<u64> {
        if i == 0 {
            return domain("prime index is 1-based");
        }
        match self.primes.get(i - 1) {
            Some(&p) => Ok(p),
            None => range(format!(
                "prime #{i} is beyond the table (only {} primes up to {})",
                self.primes.len(),
                self.limit
            )),
        }
    }

    /// Number of primes `<= x`.
    pub fn prime_count(&self, x: u64) -> usize {
        self.primes.partition_point(|&p| p <= x)
    }

    /// All primes strictly below `x`, ascending.
    pub fn primes_below(&self, x: f64) -> Result<&[u64]> {
        self.check_x(x)?;
        let k = self.primes.partition_point(|&p| (p as f64) < x);
        Ok(&self.primes[..k])
    }

    /// All primes `<= x`, ascending.
    pub fn primes_up_to(&self, x: f64) -> Result<&[u64]> {
        self.check_x(x)?;
        let k = self.primes.partition_point(|&p| (p as f64) <= x);
        Ok(&self.primes[..k])
    }

    /// Smallest table prime `>= m`, if any.
    pub fn next_prime_at_least(&self, m: u64) -> Option<u64> {
        let k = self.primes.partition_point(|&p| p < m);
        self.primes.get(k).copied()
    }

    /// Mertens' product `∏_{p<=x} (1 - 1/p)^{-1}`, accumulated as a sum of
    /// logarithms.
    pub fn mertens_product(&self, x: f64) -> Result<f64> {
        if !(x >= 2.0) {
            return domain(format!("Mertens product needs x >= 2, got {x}"));
        }
        let log_sum: f64 = self
            .primes_up_to(x)?
            .iter()
            .map(|&p| -(-1.0 / p as f64).ln_1p())
            .sum();
        Ok(log_sum.exp())
    }

    /// Chebyshev's `ϑ(x) = Σ_{p<=x} log p`.
    pub fn chebyshev_theta(&self, x: f64) -> Result<f64> {
        Ok(self.primes_up_to(x)?.iter().map(|&p| (p as f64).ln()).sum())
    }

    fn check_x(&self, x: f64) -> Result<()> {
        if x.is_nan() {
            return domain("x is NaN");
        }
        if x > self.limit as f64 {
            return range(format!("x = {x} exceeds the sieve limit {}", self.limit));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn is_prime_naive(m: u64) -> bool {
        m >= 2 && (2..).take_while(|d| d * d <= m).all(|d| m % d != 0)
    }

    #[test]
    fn small_tables() {
        assert_eq!(PrimeTable::new(10).unwrap().primes(), &[2, 3, 5, 7]);
        assert_eq!(PrimeTable::new(2).unwrap().primes(), &[2]);
        assert!(matches!(PrimeTable::new(1), Err(crate::Error::Domain(_))));
    }

    #[test]
    fn matches_primality_scan() {
        let t = PrimeTable::new(10_000).unwrap();
        let naive: Vec<u64> = (2..=10_000).filter(|&m| is_prime_naive(m)).collect();
        assert_eq!(naive.len(), 1229);
        assert_eq!(t.primes(), naive.as_slice());
        for m in 2..=10_000u64 {
            let p = t.lpf(m).unwrap();
            assert_eq!(m % p, 0);
            assert!(is_prime_naive(p));
            assert_eq!(p, (2..=m).find(|d| m % d == 0).unwrap());
        }
    }

    #[test]
    fn nth_prime_and_rosser_schoenfeld() {
        let t = PrimeTable::new(100_000).unwrap();
        assert_eq!(t.nth_prime(1).unwrap(), 2);
        assert_eq!(t.nth_prime(6).unwrap(), 13);
        assert_eq!(t.nth_prime(25).unwrap(), 97);
        assert!(matches!(t.nth_prime(10_000), Err(crate::Error::Range(_))));

        let lo6 = 6.0 * 6f64.ln();
        let hi6 = 6.0 * (6f64.ln() + 6f64.ln().ln());
        assert!((lo6 - 10.75).abs() < 0.01 && (hi6 - 14.25).abs() < 0.01);

        for (idx, &p) in t.primes().iter().enumerate() {
            let i = (idx + 1) as f64;
            assert!(p as f64 >= (i * i.ln()).max(2.0), "lower bound at i={i}");
            if idx + 1 >= 6 {
                assert!(
                    p as f64 <= i * (i.ln() + i.ln().ln()),
                    "upper bound at i={i}"
                );
            }
        }
    }

    #[test]
    fn primes_below_strict() {
        let t = PrimeTable::new(100).unwrap();
        assert_eq!(t.primes_below(1f64.exp()).unwrap(), &[2]);
        assert_eq!(t.primes_below(2f64.exp()).unwrap(), &[2, 3, 5, 7]);
        assert!(t.primes_below(2.0).unwrap().is_empty());
        assert_eq!(t.primes_below(7.0).unwrap(), &[2, 3, 5]);
        assert!(matches!(t.primes_below(101.0), Err(crate::Error::Range(_))));
    }

    #[test]
    fn mertens_and_theta() {
        let t = PrimeTable::new(1_000_000).unwrap();
        assert!((t.mertens_product(2.0).unwrap() - 2.0).abs() < 1e-15);
        assert!((t.mertens_product(10.0).unwrap() - 4.375).abs() < 1e-12);
        let eg = EULER_GAMMA.exp();
        let m = t.mertens_product(1e6).unwrap() / (eg * 1e6f64.ln());
        assert!((0.9..=1.1).contains(&m));
        let mut x = 100.0;
        while x <= 1e6 {
            let r = t.mertens_product(x).unwrap() / (eg * f64::ln(x));
            assert!((0.8..=1.2).contains(&r), "x={x} r={r}");
            x *= 1.37;
        }

        assert!((t.chebyshev_theta(2.0).unwrap() - 2f64.ln()).abs() < 1e-15);
        assert!((t.chebyshev_theta(10.0).unwrap() - 210f64.ln()).abs() < 1e-12);
        let th = t.chebyshev_theta(1e5).unwrap() / 1e5;
        assert!((0.9..=1.1).contains(&th));
        assert!(t.mertens_product(1.5).is_err());
    }
}
