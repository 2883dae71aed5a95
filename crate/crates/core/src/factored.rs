//! Integers held as prime factorizations, guarded iterated logarithms, and
//! divisor sums driven by exponent tuples.
//!
//! Divisors are never materialized as integers. A divisor
//! `d = p_1^{μ_1} ⋯ p_r^{μ_r}` of `n` is seen through `log d`, `Ω(d)` and
//! `1/d`, all computed incrementally from the tuple `(μ_1, …, μ_r)`, which
//! keeps every sum usable for `n` far outside the native integer range.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::arith::sigma_u;
use crate::error::{domain, Error, Result};
use crate::primes::PrimeTable;

/// `e^e`, below which the guarded `log log` equals 1.
pub const E_POW_E: f64 = 15.154_262_241_479_262;

/// Default number of divisor tuples a single enumeration may visit.
pub const DEFAULT_BUDGET: u64 = 1 << 22;

/// `log log x` with the convention that it equals 1 on `[0, e^e]`.
pub fn guarded_loglog(x: f64) -> Result<f64> {
    if !(x >= 0.0) {
        return domain(format!("guarded log log needs x >= 0, got {x}"));
    }
    Ok(if x <= E_POW_E { 1.0 } else { x.ln().ln() })
}

/// `log log log x` with the convention that it equals 1 on `[0, e^{e^e}]`.
pub fn guarded_logloglog(x: f64) -> Result<f64> {
    if !(x >= 0.0) {
        return domain(format!("guarded log log log needs x >= 0, got {x}"));
    }
    if x == 0.0 {
        return Ok(1.0);
    }
    Ok(logloglog_from_log(x.ln()))
}

/// Guarded `log log x` evaluated from `log x`; valid for any `x > 0`,
/// including values that overflow `f64`.
pub fn loglog_from_log(log_x: f64) -> f64 {
    if log_x <= std::f64::consts::E {
        1.0
    } else {
        log_x.ln()
    }
}

/// Guarded `log log log x` evaluated from `log x`.
pub fn logloglog_from_log(log_x: f64) -> f64 {
    if log_x <= E_POW_E {
        1.0
    } else {
        log_x.ln().ln()
    }
}

/// A positive integer `n = p_1^{a_1} ⋯ p_r^{a_r}` with `p_1 < … < p_r`.
/// The empty factorization is `n = 1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct FactoredInteger {
    factors: Vec<(u64, u32)>,
}

impl FactoredInteger {
    /// Builds a factorization, checking that primes are strictly increasing
    /// and exponents positive. Primality of the bases is the caller's
    /// responsibility (use [`FactoredInteger::factorize`] when unsure).
    pub fn new(factors: Vec<(u64, u32)>) -> Result<Self> {
        for w in factors.windows(2) {
            if w[0].0 >= w[1].0 {
                return domain("prime bases must be strictly increasing");
            }
        }
        if let Some(&(p, a)) = factors.iter().find(|&&(p, a)| p < 2 || a == 0) {
            return domain(format!("invalid factor {p}^{a}"));
        }
        Ok(Self { factors })
    }

    pub fn one() -> Self {
        Self::default()
    }

    /// Factors `n` with the table: directly through the least-prime-factor
    /// array when `n <= limit`, otherwise by trial division over the table's
    /// primes (complete whenever `n <= limit²`).
    pub fn factorize(table: &PrimeTable, n: u64) -> Result<Self> {
        if n == 0 {
            return domain("cannot factor 0");
        }
        let mut factors: Vec<(u64, u32)> = Vec::new();
        let mut push = |p: u64| match factors.last_mut() {
            Some((q, a)) if *q == p => *a += 1,
            _ => factors.push((p, 1)),
        };
        let mut m = n;
        if m > table.limit() {
            for &p in table.primes() {
                if p.saturating_mul(p) > m {
                    break;
                }
                while m % p == 0 {
                    m /= p;
                    push(p);
                }
                if m <= table.limit() {
                    break;
                }
            }
        }
        if m > table.limit() {
            // Every table prime p with p² <= m has been divided out.
            if factors_exhausted(table, m) {
                push(m);
                m = 1;
            } else {
                return Err(Error::Capability {
                    n,
                    limit: table.limit(),
                    residual: m,
                });
            }
        }
        while m > 1 {
            let p = table.lpf(m).expect("m within table");
            m /= p;
            push(p);
        }
        Ok(Self { factors })
    }

    /// `(p_i, a_i)` pairs in increasing order of `p_i`.
    pub fn factors(&self) -> &[(u64, u32)] {
        &self.factors
    }

    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.factors.iter().map(|&(p, _)| p)
    }

    pub fn is_one(&self) -> bool {
        self.factors.is_empty()
    }

    /// `ω(n)`, the number of distinct prime factors.
    pub fn omega(&self) -> usize {
        self.factors.len()
    }

    /// `Ω(n)`, prime factors counted with multiplicity.
    pub fn big_omega(&self) -> u64 {
        self.factors.iter().map(|&(_, a)| a as u64).sum()
    }

    /// `log n`.
    pub fn log_of(&self) -> f64 {
        self.factors
            .iter()
            .map(|&(p, a)| a as f64 * (p as f64).ln())
            .sum()
    }

    /// Smallest prime divisor `P⁻(n)`; undefined for `n = 1`.
    pub fn smallest_prime(&self) -> Result<u64> {
        match self.factors.first() {
            Some(&(p, _)) => Ok(p),
            None => domain("smallest prime divisor of 1 is undefined"),
        }
    }

    /// `τ(n) = ∏ (a_i + 1)`, with overflow reported as an error.
    pub fn divisor_count(&self) -> Result<u64> {
        self.factors.iter().try_fold(1u64, |acc, &(_, a)| {
            acc.checked_mul(a as u64 + 1)
                .ok_or_else(|| Error::Overflow(format!("divisor count of {self}")))
        })
    }

    /// `n` as a native integer, if it fits.
    pub fn to_u64(&self) -> Option<u64> {
        self.factors.iter().try_fold(1u64, |acc, &(p, a)| {
            p.checked_pow(a).and_then(|q| acc.checked_mul(q))
        })
    }

    /// Product with another factorization.
    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Vec::with_capacity(self.factors.len() + other.factors.len());
        let (mut i, mut j) = (0, 0);
        while i < self.factors.len() || j < other.factors.len() {
            match (self.factors.get(i), other.factors.get(j)) {
                (Some(&(p, a)), Some(&(q, b))) if p == q => {
                    out.push((p, a + b));
                    i += 1;
                    j += 1;
                }
                (Some(&(p, a)), Some(&(q, _))) if p < q => {
                    out.push((p, a));
                    i += 1;
                }
                (Some(&(p, a)), None) => {
                    out.push((p, a));
                    i += 1;
                }
                (_, Some(&(q, b))) => {
                    out.push((q, b));
                    j += 1;
                }
                (None, None) => unreachable!(),
            }
        }
        Self { factors: out }
    }
}

fn factors_exhausted(table: &PrimeTable, m: u64) -> bool {
    // m has no prime factor <= limit; it is prime iff m < (limit+1)².
    let bound = table.limit() as u128 + 1;
    (m as u128) < bound * bound
}

impl fmt::Display for FactoredInteger {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return write!(f, "1");
        }
        for (i, &(p, a)) in self.factors.iter().enumerate() {
            if i > 0 {
                write!(f, "*")?;
            }
            if a == 1 {
                write!(f, "{p}")?;
            } else {
                write!(f, "{p}^{a}")?;
            }
        }
        Ok(())
    }
}

impl FromStr for FactoredInteger {
    type Err = Error;

    /// Parses the `Display` form, e.g. `2^2*3*7^3`, or `1`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "1" {
            return Ok(Self::one());
        }
        let mut factors = Vec::new();
        for part in s.split('*') {
            let (p, a) = match part.split_once('^') {
                Some((p, a)) => (p, a),
                None => (part, "1"),
            };
            let p: u64 = p
                .trim()
                .parse()
                .map_err(|_| Error::Domain(format!("bad prime '{p}'")))?;
            let a: u32 = a
                .trim()
                .parse()
                .map_err(|_| Error::Domain(format!("bad exponent '{a}'")))?;
            factors.push((p, a));
        }
        Self::new(factors)
    }
}

/// A rigorous enclosure `[value, value + tail_bound]` of a non-negative sum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ApproxValue {
    pub value: f64,
    pub tail_bound: f64,
}

impl ApproxValue {
    pub fn exact(value: f64) -> Self {
        Self {
            value,
            tail_bound: 0.0,
        }
    }

    pub fn is_exact(&self) -> bool {
        self.tail_bound == 0.0
    }

    pub fn lower(&self) -> f64 {
        self.value
    }

    pub fn upper(&self) -> f64 {
        self.value + self.tail_bound
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lower() <= x && x <= self.upper()
    }
}

/// One divisor `d | n` as seen by an enumeration callback.
#[derive(Debug, Clone, Copy)]
pub struct DivisorView<'a> {
    /// Exponent tuple `(μ_1, …, μ_r)` aligned with `n.factors()`.
    pub exponents: &'a [u32],
    pub log_d: f64,
    /// `Ω(d) = Σ μ_i`.
    pub big_omega: u32,
    pub inv_d: f64,
}

/// Per-prime tables shared by the exhaustive and truncated enumerations, so
/// both produce bit-identical terms for the same tuple.
struct PowerTables {
    logs: Vec<f64>,
    inv_pows: Vec<Vec<f64>>,
}

impl PowerTables {
    fn new(n: &FactoredInteger) -> Self {
        let logs = n.factors.iter().map(|&(p, _)| (p as f64).ln()).collect();
        let inv_pows = n
            .factors
            .iter()
            .map(|&(p, a)| (0..=a as i32).map(|k| (p as f64).powi(-k)).collect())
            .collect();
        Self { logs, inv_pows }
    }

    #[inline]
    fn step(&self, i: usize, mu: u32, log_parent: f64, inv_parent: f64) -> (f64, f64) {
        (
            log_parent + mu as f64 * self.logs[i],
            inv_parent * self.inv_pows[i][mu as usize],
        )
    }
}

/// Visits every divisor of `n` in lexicographic order of the exponent tuple
/// (`μ_r` varies fastest). Returns the number of tuples visited.
pub fn for_each_divisor<F>(n: &FactoredInteger, budget: u64, mut visit: F) -> Result<u64>
where
    F: FnMut(&DivisorView<'_>),
{
    let count = match n.divisor_count() {
        Ok(c) if c <= budget => c,
        Ok(c) => {
            return Err(Error::BudgetExceeded {
                count: c.to_string(),
                budget,
            })
        }
        Err(_) => {
            return Err(Error::BudgetExceeded {
                count: ">= 2^64".into(),
                budget,
            })
        }
    };
    let r = n.factors.len();
    let tables = PowerTables::new(n);
    let bounds: Vec<u32> = n.factors.iter().map(|&(_, a)| a).collect();
    let mut mu = vec![0u32; r];
    // prefix[i] = (log, inv, Ω) of the divisor built from μ_1..μ_i.
    let mut pre_log = vec![0.0f64; r + 1];
    let mut pre_inv = vec![1.0f64; r + 1];
    let mut pre_om = vec![0u32; r + 1];
    let mut visited = 0u64;
    loop {
        visit(&DivisorView {
            exponents: &mu,
            log_d: pre_log[r],
            big_omega: pre_om[r],
            inv_d: pre_inv[r],
        });
        visited += 1;
        // Odometer increment from the last digit.
        let mut i = r;
        loop {
            if i == 0 {
                debug_assert_eq!(visited, count);
                return Ok(visited);
            }
            i -= 1;
            if mu[i] < bounds[i] {
                mu[i] += 1;
                break;
            }
            mu[i] = 0;
        }
        for k in i..r {
            let (l, v) = tables.step(k, mu[k], pre_log[k], pre_inv[k]);
            pre_log[k + 1] = l;
            pre_inv[k + 1] = v;
            pre_om[k + 1] = pre_om[k] + mu[k];
        }
    }
}

/// `Σ_{d|n} weight(log d, Ω(d), 1/d)`, summed in the fixed order of
/// [`for_each_divisor`].
pub fn fold_divisors<W>(n: &FactoredInteger, budget: u64, weight: W) -> Result<f64>
where
    W: Fn(f64, u32, f64) -> f64,
{
    let mut acc = 0.0;
    for_each_divisor(n, budget, |d| acc += weight(d.log_d, d.big_omega, d.inv_d))?;
    Ok(acc)
}

/// The weights `w(d) = (log d)^a (log log d)^b / d`, `a, b ∈ {0, 1}`, for
/// which truncated evaluation carries a tail bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WeightFamily {
    log_power: u8,
    loglog_power: u8,
}

impl WeightFamily {
    pub fn new(log_power: u8, loglog_power: u8) -> Result<Self> {
        if log_power > 1 || loglog_power > 1 {
            return domain(format!(
                "unsupported weight family (log d)^{log_power} (log log d)^{loglog_power} / d"
            ));
        }
        Ok(Self {
            log_power,
            loglog_power,
        })
    }

    /// `(log d)(log log d)/d`, the summand of Ψ.
    pub const PSI: Self = Self {
        log_power: 1,
        loglog_power: 1,
    };
    /// `(log d)/d`, the summand of Φ.
    pub const PHI: Self = Self {
        log_power: 1,
        loglog_power: 0,
    };
    /// `1/d`.
    pub const INV: Self = Self {
        log_power: 0,
        loglog_power: 0,
    };

    #[inline]
    pub fn eval(&self, log_d: f64, inv_d: f64) -> f64 {
        let mut w = inv_d;
        if self.log_power == 1 {
            if log_d == 0.0 {
                return 0.0;
            }
            w *= log_d;
        }
        if self.loglog_power == 1 {
            w *= loglog_from_log(log_d);
        }
        w
    }

    /// Upper bound for `(log d)^a (log log d)^b` over all `d | n`.
    fn sup_factor(&self, log_n: f64) -> f64 {
        // max(1, log n) · loglog n dominates every member of the family.
        log_n.max(1.0) * loglog_from_log(log_n)
    }
}

/// How the omitted part of a truncated divisor sum is bounded.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum TailPolicy {
    /// `sup_{d|n} w(d)·d` times the omitted reciprocal mass
    /// `σ_{-1}(n) − Σ_{d<=cap} 1/d`.
    #[default]
    Crude,
    /// `sup_{d|n} w(d)·d` times `cap^{-δ} σ_{δ-1}(n)` (Rankin's trick).
    Rankin { delta: f64 },
    /// The omitted mass of `(log d)^a / d` exactly, as the closed form
    /// (`Φ(n)` or `σ_{-1}(n)`) minus the partial sum, times the sup of the
    /// `(log log d)^b` factor. Never larger than [`TailPolicy::Crude`].
    ExactMass,
}

/// Sums `family` over the divisors `d <= cap` of `n` by depth-first search
/// over exponent tuples, and bounds the omitted divisors' contribution.
pub fn fold_divisors_truncated(
    n: &FactoredInteger,
    cap: u64,
    family: WeightFamily,
    policy: TailPolicy,
) -> Result<ApproxValue> {
    if cap < 1 {
        return domain("truncation cap must be at least 1");
    }
    if let TailPolicy::Rankin { delta } = policy {
        if !(delta > 0.0) {
            return domain(format!("Rankin exponent must be positive, got {delta}"));
        }
    }
    let tables = PowerTables::new(n);
    let primes: Vec<u64> = n.primes().collect();
    let bounds: Vec<u32> = n.factors.iter().map(|&(_, a)| a).collect();

    struct Acc {
        value: f64,
        inv_mass: f64,
        log_mass: f64,
        leaves: u64,
    }
    let mut acc = Acc {
        value: 0.0,
        inv_mass: 0.0,
        log_mass: 0.0,
        leaves: 0,
    };

    #[allow(clippy::too_many_arguments)]
    fn dfs(
        i: usize,
        d: u128,
        log_d: f64,
        inv_d: f64,
        cap: u128,
        primes: &[u64],
        bounds: &[u32],
        tables: &PowerTables,
        family: WeightFamily,
        acc: &mut Acc,
    ) {
        if i == primes.len() {
            acc.value += family.eval(log_d, inv_d);
            acc.inv_mass += inv_d;
            acc.log_mass += log_d * inv_d;
            acc.leaves += 1;
            return;
        }
        let p = primes[i] as u128;
        let mut dd = d;
        for mu in 0..=bounds[i] {
            if mu > 0 {
                dd *= p;
                if dd > cap {
                    break;
                }
            }
            let (l, v) = tables.step(i, mu, log_d, inv_d);
            dfs(i + 1, dd, l, v, cap, primes, bounds, tables, family, acc);
        }
    }
    dfs(
        0,
        1,
        0.0,
        1.0,
        cap as u128,
        &primes,
        &bounds,
        &tables,
        family,
        &mut acc,
    );

    let complete = n.divisor_count().map(|c| c == acc.leaves).unwrap_or(false);
    if complete {
        return Ok(ApproxValue::exact(acc.value));
    }
    let log_n = n.log_of();
    let sup = family.sup_factor(log_n);
    let sigma = sigma_u(n, -1.0);
    // Rounding allowance for a partial sum of `leaves` positive terms against
    // a closed form built from `r` factors.
    let slack = (acc.leaves as f64 + 4.0 * primes.len() as f64 + 16.0) * f64::EPSILON;
    let tail = match policy {
        TailPolicy::Crude => sup * ((sigma - acc.inv_mass).max(0.0) + slack * sigma),
        TailPolicy::Rankin { delta } => sup * (cap as f64).powf(-delta) * sigma_u(n, delta - 1.0),
        TailPolicy::ExactMass => {
            let (total, partial) = if family.log_power == 1 {
                (crate::arith::phi_closed(n), acc.log_mass)
            } else {
                (sigma, acc.inv_mass)
            };
            let loglog = if family.loglog_power == 1 {
                loglog_from_log(log_n)
            } else {
                1.0
            };
            loglog * ((total - partial).max(0.0) + slack * total)
        }
    };
    Ok(ApproxValue {
        value: acc.value,
        tail_bound: tail,
    })
}
