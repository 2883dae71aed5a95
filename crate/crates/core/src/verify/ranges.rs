//! Identities and inequalities checked integer by integer over `1..=max_n`,
//! plus the convexity inequality on exponent vectors.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{LemmaCheckReport, Observation, Tracker, REL_SLACK};
use crate::arith::{
    davenport_w, jordan, jordan_exact, moebius, phi1_closed, phi1_enum, phi2_enum, phi_closed,
    phi_enum, phi_eta_enum, psi_enum, sigma_u,
};
use crate::error::{domain, Result};
use crate::factored::{for_each_divisor, loglog_from_log, logloglog_from_log, FactoredInteger};
use crate::primes::PrimeTable;

const CHUNK: u64 = 2048;

/// Runs `visit` on every `n` in `lo..=hi` (in parallel chunks) and merges the
/// per-chunk trackers in increasing `n` order.
fn scan<F>(
    table: &PrimeTable,
    lo: u64,
    hi: u64,
    ids: &[&str],
    grid: &str,
    visit: F,
) -> Result<Vec<LemmaCheckReport>>
where
    F: Fn(u64, &FactoredInteger, &mut [Tracker]) -> Result<()> + Sync,
{
    if hi > table.limit() {
        return domain(format!(
            "range end {hi} exceeds the prime table limit {}",
            table.limit()
        ));
    }
    let fresh = || {
        ids.iter()
            .map(|id| Tracker::new(*id, grid))
            .collect::<Vec<_>>()
    };
    let chunks: Vec<(u64, u64)> = if hi < lo {
        Vec::new()
    } else {
        (0..=(hi - lo) / CHUNK)
            .map(|k| (lo + k * CHUNK, (lo + (k + 1) * CHUNK - 1).min(hi)))
            .collect()
    };
    let parts: Vec<Vec<Tracker>> = chunks
        .par_iter()
        .map(|&(a, b)| {
            let mut trackers = fresh();
            for n in a..=b {
                let f = FactoredInteger::factorize(table, n)?;
                visit(n, &f, &mut trackers)?;
            }
            Ok(trackers)
        })
        .collect::<Result<_>>()?;
    let mut out = fresh();
    for part in parts {
        for (acc, t) in out.iter_mut().zip(part) {
            acc.merge(t);
        }
    }
    Ok(out.into_iter().map(Tracker::finish).collect())
}

fn inverse_sum(p: u64, a: u32) -> f64 {
    let p = p as f64;
    (0..=a as i32).map(|k| p.powi(-k)).sum()
}

fn mertens_factor(n: &FactoredInteger) -> f64 {
    n.primes().map(|p| 1.0 / (1.0 - 1.0 / p as f64)).product()
}

fn loglog_p(p: u64) -> f64 {
    loglog_from_log((p as f64).ln())
}

/// `closed.phi`: closed-form Φ against divisor enumeration for `n <= max_phi`;
/// `closed.phi1`: closed-form Φ₁ against the tuple sum for `n <= max_phi1`.
/// Margin `1e-10·|enumerated| − |closed − enumerated|`.
pub fn check_closed_forms(
    table: &PrimeTable,
    max_phi: u64,
    max_phi1: u64,
    budget: u64,
) -> Result<Vec<LemmaCheckReport>> {
    const REL: f64 = 1e-10;
    let mut out = scan(
        table,
        1,
        max_phi,
        &["closed.phi"],
        &format!("n <= {max_phi}, rel {REL:e}"),
        |n, f, t| {
            let e = phi_enum(f, budget)?;
            t[0].record(REL * e.abs() - (phi_closed(f) - e).abs(), || {
                format!("n={n}")
            });
            Ok(())
        },
    )?;
    out.extend(scan(
        table,
        1,
        max_phi1,
        &["closed.phi1"],
        &format!("n <= {max_phi1}, rel {REL:e}"),
        |n, f, t| {
            let e = phi1_enum(f, budget)?;
            t[0].record(REL * e.abs() - (phi1_closed(f) - e).abs(), || {
                format!("n={n}")
            });
            Ok(())
        },
    )?);
    Ok(out)
}

/// `Ψ(n) <= Φ₁(n) + Φ₂(n) + 1e-12` for `n <= max_n`.
pub fn check_convexdec(table: &PrimeTable, max_n: u64, budget: u64) -> Result<LemmaCheckReport> {
    let grid = format!("n <= {max_n}, abs 1e-12");
    let r = scan(table, 1, max_n, &["convexdec"], &grid, |n, f, t| {
        let lhs = psi_enum(f, budget)?;
        let rhs = phi1_closed(f) + phi2_enum(f, budget)?;
        t[0].record(rhs - lhs + 1e-12, || format!("n={n}"));
        Ok(())
    })?;
    Ok(r.into_iter().next().expect("one tracker"))
}

/// `Φ(n) <= ∏_{p|n} (1 − 1/p)^{-1} Σ_{p|n} log p/(p − 1)` for `n <= max_n`.
pub fn check_tezm(table: &PrimeTable, max_n: u64) -> Result<LemmaCheckReport> {
    let grid = format!("n <= {max_n}, rel {REL_SLACK:e}");
    let r = scan(table, 1, max_n, &["tEZm"], &grid, |n, f, t| {
        let rhs = mertens_factor(f)
            * f.primes()
                .map(|p| (p as f64).ln() / (p as f64 - 1.0))
                .sum::<f64>();
        t[0].record(rhs - phi_closed(f) + REL_SLACK * rhs, || format!("n={n}"));
        Ok(())
    })?;
    Ok(r.into_iter().next().expect("one tracker"))
}

/// `Φ₁(n) <= ∏ (1 − 1/p)^{-1} Σ (log p)(log log p)/(p − 1)` for `n <= max_n`.
pub fn check_phi1maj(table: &PrimeTable, max_n: u64) -> Result<LemmaCheckReport> {
    let grid = format!("n <= {max_n}, rel {REL_SLACK:e}");
    let r = scan(table, 1, max_n, &["phi1maj"], &grid, |n, f, t| {
        let rhs = mertens_factor(f)
            * f.primes()
                .map(|p| (p as f64).ln() * loglog_p(p) / (p as f64 - 1.0))
                .sum::<f64>();
        t[0].record(rhs - phi1_closed(f) + REL_SLACK * rhs, || format!("n={n}"));
        Ok(())
    })?;
    Ok(r.into_iter().next().expect("one tracker"))
}

/// `(1 − 1/P⁻(n)) ∏(1 + 1/p) <= Φ₁(n)/Σ (log p)(log log p)/p <= 2 ∏(1 − 1/p)^{-1}`
/// for `2 <= n <= max_n`, as two reports (`phi1est.lower`, `phi1est.upper`).
pub fn check_phi1_sandwich(table: &PrimeTable, max_n: u64) -> Result<Vec<LemmaCheckReport>> {
    let grid = format!("2 <= n <= {max_n}, rel {REL_SLACK:e}");
    scan(
        table,
        2,
        max_n,
        &["phi1est.lower", "phi1est.upper"],
        &grid,
        |n, f, t| {
            let denom: f64 = f
                .primes()
                .map(|p| (p as f64).ln() * loglog_p(p) / p as f64)
                .sum();
            if denom <= 0.0 {
                return Ok(());
            }
            let ratio = phi1_closed(f) / denom;
            let smallest = f.smallest_prime()? as f64;
            let lower =
                (1.0 - 1.0 / smallest) * f.primes().map(|p| 1.0 + 1.0 / p as f64).product::<f64>();
            let upper = 2.0 * mertens_factor(f);
            t[0].record(ratio - lower + REL_SLACK * lower, || format!("n={n}"));
            t[1].record(upper - ratio + REL_SLACK * upper, || format!("n={n}"));
            Ok(())
        },
    )
}

/// The lower bound
/// `Φ₂(n) >= (log 2) (P⁻/(P⁻+1)) ∏(1 + 1/p) Σ log p/p` for `n <= max_n` with
/// at least two distinct prime factors, exactly as stated.
///
/// This bound does not hold in general (already `Φ₂(6) ≈ 0.207` against a
/// right side of about `0.659`); the report records how often it fails.
pub fn check_phi2_min(table: &PrimeTable, max_n: u64, budget: u64) -> Result<LemmaCheckReport> {
    let grid = format!("n <= {max_n}, omega >= 2, rel {REL_SLACK:e}");
    let r = scan(table, 1, max_n, &["Phi2min"], &grid, |n, f, t| {
        if f.omega() < 2 {
            return Ok(());
        }
        let p_min = f.smallest_prime()? as f64;
        let rhs = std::f64::consts::LN_2
            * (p_min / (p_min + 1.0))
            * f.primes().map(|p| 1.0 + 1.0 / p as f64).product::<f64>()
            * davenport_w(f);
        let lhs = phi2_enum(f, budget)?;
        t[0].record(lhs - rhs + REL_SLACK * rhs, || format!("n={n}"));
        Ok(())
    })?;
    Ok(r.into_iter().next().expect("one tracker"))
}

/// The lower bound that the single-prime-step argument does give:
/// `Φ₂(n) >= (log 2) Σ_j (log p_j/p_j)(∏_{i≠j} σ_{-1}(p_i^{α_i}) − 1)`.
pub fn check_phi2_min_corrected(
    table: &PrimeTable,
    max_n: u64,
    budget: u64,
) -> Result<LemmaCheckReport> {
    let grid = format!("n <= {max_n}, omega >= 2, rel {REL_SLACK:e}");
    let r = scan(table, 1, max_n, &["Phi2min.corrected"], &grid, |n, f, t| {
        if f.omega() < 2 {
            return Ok(());
        }
        let sums: Vec<f64> = f
            .factors()
            .iter()
            .map(|&(p, a)| inverse_sum(p, a))
            .collect();
        let total: f64 = sums.iter().product();
        let rhs = std::f64::consts::LN_2
            * f.factors()
                .iter()
                .zip(&sums)
                .map(|(&(p, _), s)| (p as f64).ln() / p as f64 * (total / s - 1.0))
                .sum::<f64>();
        let lhs = phi2_enum(f, budget)?;
        t[0].record(lhs - rhs + REL_SLACK * rhs, || format!("n={n}"));
        Ok(())
    })?;
    Ok(r.into_iter().next().expect("one tracker"))
}

/// All divisors of `f` as factorizations, in enumeration order.
fn divisor_factorizations(f: &FactoredInteger, budget: u64) -> Result<Vec<FactoredInteger>> {
    let mut out = Vec::new();
    for_each_divisor(f, budget, |d| {
        let factors = f
            .factors()
            .iter()
            .zip(d.exponents)
            .filter(|(_, &m)| m > 0)
            .map(|(&(p, _), &m)| (p, m))
            .collect();
        out.push(FactoredInteger::new(factors).expect("divisor of a valid factorization"));
    })?;
    Ok(out)
}

/// For `n <= max_n`:
/// * `jordan.exact.1`, `jordan.exact.2`: `Σ_{d|n} J_k(d) = n^k` in integers
///   (margin `0` or `−1`);
/// * `jordan.real.0.7`: the same for `ε = 0.7` to `1e-9` relative;
/// * `moebius.sum`: `Σ_{d|n} μ(d) = [n = 1]` exactly.
pub fn check_jordan_moebius(
    table: &PrimeTable,
    max_n: u64,
    budget: u64,
) -> Result<Vec<LemmaCheckReport>> {
    let grid = format!("n <= {max_n}");
    scan(
        table,
        1,
        max_n,
        &[
            "jordan.exact.1",
            "jordan.exact.2",
            "jordan.real.0.7",
            "moebius.sum",
        ],
        &grid,
        |n, f, t| {
            let divs = divisor_factorizations(f, budget)?;
            for (slot, k) in [(0usize, 1u32), (1, 2)] {
                let mut acc = 0u128;
                for d in &divs {
                    acc += jordan_exact(d, k)?;
                }
                let want = (n as u128).pow(k);
                t[slot].record(if acc == want { 0.0 } else { -1.0 }, || format!("n={n}"));
            }
            let mut acc = 0.0;
            for d in &divs {
                acc += jordan(d, 0.7)?;
            }
            let want = (n as f64).powf(0.7);
            t[2].record(1e-9 * want - (acc - want).abs(), || format!("n={n}"));
            let mu: i64 = divs.iter().map(|d| moebius(d) as i64).sum();
            t[3].record(if mu == i64::from(n == 1) { 0.0 } else { -1.0 }, || {
                format!("n={n}")
            });
            Ok(())
        },
    )
}

/// `σ_u(mn) = σ_u(m) σ_u(n)` to `1e-12` relative for `pairs` seeded random
/// coprime pairs `m, n <= max_n` and `u ∈ {−1, −1/2, 1/2, 1, 2}`.
pub fn check_sigma_multiplicative(
    table: &PrimeTable,
    max_n: u64,
    pairs: usize,
    seed: u64,
) -> Result<LemmaCheckReport> {
    if max_n < 2 || max_n > table.limit() {
        return domain(format!("max_n = {max_n} must lie in 2..={}", table.limit()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut t = Tracker::new(
        "sigma.multiplicative",
        format!("{pairs} coprime pairs <= {max_n}, seed {seed}, rel 1e-12"),
    );
    let mut done = 0;
    while done < pairs {
        let m = rng.gen_range(1..=max_n);
        let n = rng.gen_range(1..=max_n);
        if num_integer::gcd(m, n) != 1 {
            continue;
        }
        let fm = FactoredInteger::factorize(table, m)?;
        let fn_ = FactoredInteger::factorize(table, n)?;
        let fmn = fm.mul(&fn_);
        for u in [-1.0, -0.5, 0.5, 1.0, 2.0] {
            let whole = sigma_u(&fmn, u);
            let split = sigma_u(&fm, u) * sigma_u(&fn_, u);
            t.record(1e-12 * whole.abs() - (whole - split).abs(), || {
                format!("m={m} n={n} u={u}")
            });
        }
        done += 1;
    }
    Ok(t.finish())
}

/// Right side minus left side of
/// `X log X <= Σ μ_i log p_i log log p_i + X log Σ μ_i`, `X = Σ μ_i log p_i`,
/// with bare logarithms and `0 log 0 = 0`.
fn convexity_gap(primes: &[u64], mu: &[u32]) -> f64 {
    let x: f64 = primes
        .iter()
        .zip(mu)
        .map(|(&p, &m)| m as f64 * (p as f64).ln())
        .sum();
    let total: u32 = mu.iter().sum();
    if total == 0 {
        return 0.0;
    }
    let lhs = x * x.ln();
    let rhs: f64 = primes
        .iter()
        .zip(mu)
        .map(|(&p, &m)| {
            let l = (p as f64).ln();
            m as f64 * l * l.ln()
        })
        .sum::<f64>()
        + x * (total as f64).ln();
    rhs - lhs
}

/// Absolute tolerance of the convexity inequality (equality holds when all
/// mass sits on one prime).
const CONVEXITY_TOL: f64 = 1e-10;

/// The convexity inequality for a single exponent vector.
pub fn check_convexity_lemma(primes: &[u64], mu: &[u32]) -> Result<LemmaCheckReport> {
    if primes.len() != mu.len() {
        return domain("primes and exponents differ in length");
    }
    if primes.iter().any(|&p| p < 2) {
        return domain("primes must be at least 2");
    }
    let mut t = Tracker::new("lconvexe", format!("single vector, abs {CONVEXITY_TOL:e}"));
    t.record(convexity_gap(primes, mu) + CONVEXITY_TOL, || {
        format!("{mu:?}")
    });
    Ok(t.finish())
}

const FIRST_TEN_PRIMES: [u64; 10] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29];

/// The convexity inequality over the first ten primes: `trials` seeded random
/// vectors with `μ_i ∈ 0..=5`, then the zero vector, every single-prime
/// vector, and the constant vectors 1 and 5.
pub fn check_convexity_random(trials: usize, seed: u64) -> LemmaCheckReport {
    let mut t = Tracker::new(
        "lconvexe",
        format!("{trials} random vectors (seed {seed}) + boundary, abs {CONVEXITY_TOL:e}"),
    );
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut vectors: Vec<[u32; 10]> = (0..trials)
        .map(|_| std::array::from_fn(|_| rng.gen_range(0..=5)))
        .collect();
    vectors.push([0; 10]);
    for i in 0..10 {
        for m in 1..=5 {
            let mut v = [0; 10];
            v[i] = m;
            vectors.push(v);
        }
    }
    vectors.push([1; 10]);
    vectors.push([5; 10]);
    for v in &vectors {
        t.record(convexity_gap(&FIRST_TEN_PRIMES, v) + CONVEXITY_TOL, || {
            format!("{v:?}")
        });
    }
    t.finish()
}

/// Largest `Φ_η(n) / ((log log n)^η σ_{-1}(n))` over `ns`, each of which must
/// satisfy `Σ_{p|n} 1/(p − 1) < 2^{1−η}`.
pub fn check_phi_eta_conditional(
    ns: &[FactoredInteger],
    eta: f64,
    budget: u64,
) -> Result<Observation> {
    if !(eta > 1.0) {
        return domain(format!("eta must exceed 1, got {eta}"));
    }
    let limit = 2f64.powf(1.0 - eta);
    let mut best = f64::NEG_INFINITY;
    let mut at = None;
    for n in ns {
        let spread: f64 = n.primes().map(|p| 1.0 / (p as f64 - 1.0)).sum();
        if !(spread < limit) {
            return domain(format!(
                "{n}: Σ 1/(p-1) = {spread:.6} is not below 2^(1-eta) = {limit:.6}"
            ));
        }
        let value = phi_eta_enum(n, eta, budget)?;
        let norm = loglog_from_log(n.log_of()).powf(eta) * sigma_u(n, -1.0);
        let ratio = value / norm;
        if ratio > best {
            best = ratio;
            at = Some(n.to_string());
        }
    }
    Ok(Observation {
        id: format!("phi_eta.conditional.{eta}"),
        description: format!(
            "max Phi_eta(n)/((loglog n)^eta sigma_-1(n)) over {} integers with sum 1/(p-1) < 2^(1-eta)",
            ns.len()
        ),
        value: if ns.is_empty() { 0.0 } else { best },
        at,
    })
}

/// Largest `Φ₂(n) / ((log log log ω) (log ω) w(n))` over `n <= max_n` with
/// `ω(n) >= 2`, restricted to odd `n` when `odd_only`.
pub fn phi2_growth_observation(
    table: &PrimeTable,
    max_n: u64,
    odd_only: bool,
    budget: u64,
) -> Result<Observation> {
    if max_n > table.limit() {
        return domain(format!(
            "max_n = {max_n} exceeds the prime table limit {}",
            table.limit()
        ));
    }
    let chunks: Vec<(u64, u64)> = (0..=max_n / CHUNK)
        .map(|k| (k * CHUNK, ((k + 1) * CHUNK - 1).min(max_n)))
        .collect();
    let parts: Vec<(f64, u64)> = chunks
        .par_iter()
        .map(|&(a, b)| {
            let mut best = (f64::NEG_INFINITY, 0);
            for n in a.max(2)..=b {
                if odd_only && n % 2 == 0 {
                    continue;
                }
                let f = FactoredInteger::factorize(table, n)?;
                if f.omega() < 2 {
                    continue;
                }
                let lw = (f.omega() as f64).ln();
                let ratio =
                    phi2_enum(&f, budget)? / (logloglog_from_log(lw) * lw * davenport_w(&f));
                if ratio > best.0 {
                    best = (ratio, n);
                }
            }
            Ok(best)
        })
        .collect::<Result<_>>()?;
    let mut best = (f64::NEG_INFINITY, 0);
    for p in parts {
        if p.0 > best.0 {
            best = p;
        }
    }
    let tag = if odd_only { "odd" } else { "all" };
    Ok(Observation {
        id: format!("phi2.growth.{tag}"),
        description: format!(
            "max Phi2(n)/(logloglog(omega) log(omega) w(n)) over {tag} n <= {max_n} with omega >= 2"
        ),
        value: if best.1 == 0 { 0.0 } else { best.0 },
        at: (best.1 != 0).then(|| best.1.to_string()),
    })
}
