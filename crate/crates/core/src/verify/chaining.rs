//! The prime/exponent data of the recursive bound for Φ₂ and the one-prime
//! series inequalities it is assembled from.

use super::{sum_decaying_series, LemmaCheckReport, Tracker, REL_SLACK};
use crate::error::{domain, Error, Result};

const SERIES_TOL: f64 = 1e-12;

/// Partial exponent sums always sampled in addition to the ones a context
/// can realise.
const EXTRA_PARTIAL_SUMS: [u64; 5] = [10, 25, 50, 100, 1000];

fn is_prime_u64(m: u64) -> bool {
    m >= 2 && (2u64..).take_while(|d| d * d <= m).all(|d| m % d != 0)
}

/// Primes `p_1, …, p_r` (all odd) with exponents `α_1, …, α_r`, together
/// with the coefficients of the recursive bound.
///
/// Indices `s` are 1-based to match the recursion; `p_r` is the last prime
/// in the given order, which need not be increasing.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainingContext {
    primes: Vec<u64>,
    exponents: Vec<u32>,
}

impl ChainingContext {
    pub fn new(primes: Vec<u64>, exponents: Vec<u32>) -> Result<Self> {
        if primes.is_empty() || primes.len() != exponents.len() {
            return domain(format!(
                "need matching non-empty prime and exponent lists, got {} and {}",
                primes.len(),
                exponents.len()
            ));
        }
        for (i, &p) in primes.iter().enumerate() {
            if p < 3 || !is_prime_u64(p) {
                return domain(format!("{p} is not an odd prime"));
            }
            if primes[..i].contains(&p) {
                return domain(format!("prime {p} repeated"));
            }
        }
        if exponents.contains(&0) {
            return domain("exponents must be at least 1");
        }
        Ok(Self { primes, exponents })
    }

    pub fn len(&self) -> usize {
        self.primes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.primes.is_empty()
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    pub fn exponents(&self) -> &[u32] {
        &self.exponents
    }

    fn p(&self, s: usize) -> f64 {
        self.primes[s - 1] as f64
    }

    /// `[c₀, c₁, c₂, c₃, c₄]`, all built from the last prime `p_r`.
    pub fn coefficients(&self) -> [f64; 5] {
        let p = self.p(self.len());
        let l = p.ln();
        [
            l / p,
            1.0,
            2.0 / p,
            (3.0 + 3.0 / l + 1.0 / (l * l)) / (p * p),
            (1.0 + 1.0 / (3.0 * l)) / (p * p * p * l),
        ]
    }

    /// `c = c₁ + c₂ + c₃`.
    pub fn c_sum(&self) -> f64 {
        let c = self.coefficients();
        c[1] + c[2] + c[3]
    }

    /// `b_s = (1/p_s)(1 + 1/log p_s)`.
    pub fn b(&self, s: usize) -> f64 {
        let p = self.p(s);
        (1.0 + 1.0 / p.ln()) / p
    }

    /// `β_s = 1/(2 p_s (log p_s)²)`.
    pub fn beta(&self, s: usize) -> f64 {
        let p = self.p(s);
        1.0 / (2.0 * p * p.ln().powi(2))
    }

    /// `Π_s = ∏_{ℓ<=s} (1 − p_ℓ^{−α_ℓ−1})/(1 − p_ℓ^{−1})`, with `Π_0 = 1`.
    pub fn pi(&self, s: usize) -> f64 {
        (1..=s)
            .map(|l| {
                let p = self.p(l);
                let a = self.exponents[l - 1] as i32;
                (1.0 - p.powi(-a - 1)) / (1.0 - 1.0 / p)
            })
            .product()
    }

    /// Visits every tuple `(μ_1, …, μ_s)` with its weight `∏ p_i^{−μ_i}` and
    /// `Σ μ_i`.
    fn for_each_tuple<F: FnMut(f64, u64)>(
        &self,
        s: usize,
        budget: u64,
        mut visit: F,
    ) -> Result<()> {
        if s == 0 || s > self.len() {
            return domain(format!("prefix length {s} outside 1..={}", self.len()));
        }
        let count = self.exponents[..s]
            .iter()
            .try_fold(1u64, |acc, &a| acc.checked_mul(a as u64 + 1));
        match count {
            Some(c) if c <= budget => {}
            Some(c) => {
                return Err(Error::BudgetExceeded {
                    count: c.to_string(),
                    budget,
                })
            }
            None => {
                return Err(Error::BudgetExceeded {
                    count: ">= 2^64".into(),
                    budget,
                })
            }
        }
        let inv: Vec<f64> = self.primes[..s].iter().map(|&p| 1.0 / p as f64).collect();
        let mut mu = vec![0u32; s];
        let mut weight = vec![1.0f64; s + 1];
        let mut total = vec![0u64; s + 1];
        loop {
            visit(weight[s], total[s]);
            let mut i = s;
            loop {
                if i == 0 {
                    return Ok(());
                }
                i -= 1;
                if mu[i] < self.exponents[i] {
                    mu[i] += 1;
                    break;
                }
                mu[i] = 0;
            }
            for k in i..s {
                weight[k + 1] = weight[k] * inv[k].powi(mu[k] as i32);
                total[k + 1] = total[k] + mu[k] as u64;
            }
        }
    }

    /// `Φ_s(h) = Σ_{μ_1..μ_s} p_μ(s) log(Σ μ_i + h)` by direct enumeration.
    pub fn phi_s(&self, s: usize, h: u32, budget: u64) -> Result<f64> {
        if h == 0 {
            return domain("h must be at least 1");
        }
        let mut acc = 0.0;
        self.for_each_tuple(s, budget, |w, total| {
            acc += w * ((total + h as u64) as f64).ln()
        })?;
        Ok(acc)
    }

    /// `Π_s` summed tuple by tuple.
    pub fn pi_enum(&self, s: usize, budget: u64) -> Result<f64> {
        let mut acc = 0.0;
        self.for_each_tuple(s, budget, |w, _| acc += w)?;
        Ok(acc)
    }
}

/// Fixed set of contexts used by the lemma suite: squarefree and powerful
/// shapes, small and large primes, and one non-increasing prime order.
pub fn default_contexts() -> Vec<ChainingContext> {
    let raw: &[(&[u64], &[u32])] = &[
        (&[3, 5], &[2, 2]),
        (&[3, 5, 7], &[1, 1, 1]),
        (&[3, 31], &[3, 1]),
        (&[3, 5, 7, 11], &[3, 2, 2, 1]),
        (&[5, 7, 11, 13, 17], &[2, 2, 1, 1, 1]),
        (&[3, 5, 7, 11, 13, 17, 19, 23], &[1, 1, 1, 1, 1, 1, 1, 1]),
        (&[3, 5, 7, 11, 13], &[6, 4, 3, 2, 2]),
        (&[101, 103, 107], &[4, 4, 4]),
        (&[7, 3, 5], &[1, 5, 2]),
        (&[1009, 3], &[2, 8]),
        (&[3], &[10]),
    ];
    raw.iter()
        .map(|(p, a)| ChainingContext::new(p.to_vec(), a.to_vec()).expect("valid context"))
        .collect()
}

fn partial_sums(ctx: &ChainingContext, s: usize) -> Vec<u64> {
    let others: u64 = ctx
        .exponents
        .iter()
        .enumerate()
        .filter(|&(i, _)| i + 1 != s)
        .map(|(_, &a)| a as u64)
        .sum();
    let mut v: Vec<u64> = (0..=others).chain(EXTRA_PARTIAL_SUMS).collect();
    v.sort_unstable();
    v.dedup();
    v
}

/// The one-prime series bounds, for every prime of every context taken in
/// turn as the summed prime and every partial exponent sum `S` the other
/// primes can produce (plus a few larger values):
///
/// * `E3a.first`: `Σ_{μ>=0} log(S+μ+h)/p^μ <= log(S+h) + b·log(S+h+1) + 1/((S+3) p log²p)`
/// * `E3a.second`: the same series `<= (1 + (1 + 1/log p + 1/(3 log²p))/p)·log(S+h+2)`
/// * `E2.i.first` (`S >= 1`): `Σ_μ μ log p log(S+μ)/p^μ` against its four-term bound
/// * `E2.i.five` (`S >= 1`): the same series `<= 5 (log p/p) log(S+3)`
/// * `E2.ii` (`S = 0`): `Σ_μ μ log p log μ/p^μ <= 18 log p/p`
///
/// All series run to infinity, which dominates any finite exponent.
pub fn check_e3a_and_e2(contexts: &[ChainingContext], hs: &[u32]) -> Result<Vec<LemmaCheckReport>> {
    if hs.contains(&0) {
        return domain("h must be at least 1");
    }
    let grid = format!(
        "{} contexts, h in {hs:?}, tail<{SERIES_TOL:e}",
        contexts.len()
    );
    let mut first = Tracker::new("E3a.first", grid.clone());
    let mut second = Tracker::new("E3a.second", grid.clone());
    let mut e2_first = Tracker::new("E2.i.first", grid.clone());
    let mut e2_five = Tracker::new("E2.i.five", grid.clone());
    let mut e2_ii = Tracker::new("E2.ii", grid);
    for ctx in contexts {
        for s in 1..=ctx.len() {
            let p = ctx.p(s);
            let lp = p.ln();
            for big_s in partial_sums(ctx, s) {
                let sf = big_s as f64;
                for &h in hs {
                    let hf = h as f64;
                    let (sum, tail) = sum_decaying_series(
                        |mu| (sf + mu as f64 + hf).ln() * p.powi(-(mu as i32)),
                        0,
                        SERIES_TOL,
                    )?;
                    let lhs = sum + tail;
                    let rhs1 = (sf + hf).ln()
                        + ctx.b(s) * (sf + hf + 1.0).ln()
                        + 1.0 / ((sf + 3.0) * lp * lp * p);
                    let rhs2 =
                        (1.0 + (1.0 + 1.0 / lp + 1.0 / (3.0 * lp * lp)) / p) * (sf + hf + 2.0).ln();
                    let label = || format!("p={p} S={big_s} h={h}");
                    first.record(rhs1 - lhs, label);
                    second.record(rhs2 - lhs, label);
                }
                let (sum, tail) = sum_decaying_series(
                    |mu| {
                        if mu == 0 {
                            0.0
                        } else {
                            let m = mu as f64;
                            m * lp * (sf + m).ln() * p.powi(-(mu as i32))
                        }
                    },
                    0,
                    SERIES_TOL,
                )?;
                let lhs = sum + tail;
                let label = || format!("p={p} S={big_s}");
                if big_s >= 1 {
                    let rhs = lp / p * (sf + 1.0).ln()
                        + 2.0 * lp / (p * p) * (sf + 2.0).ln()
                        + (3.0 * lp + 3.0 + 1.0 / lp) / (p * p * p) * (sf + 3.0).ln()
                        + (1.0 + 1.0 / ((sf + 3.0) * lp)) / (p * p * p * lp);
                    e2_first.record(rhs - lhs, label);
                    e2_five.record(5.0 * lp / p * (sf + 3.0).ln() - lhs, label);
                } else {
                    e2_ii.record(18.0 * lp / p - lhs, label);
                }
            }
        }
    }
    Ok(vec![
        first.finish(),
        second.finish(),
        e2_first.finish(),
        e2_five.finish(),
        e2_ii.finish(),
    ])
}

/// `Φ_s(h) <= Φ_{s−1}(h) + b_s Φ_{s−1}(h+1) + β_s Π_{s−1}` (`E3.recurrence`)
/// and `Φ_s(h) <= Φ_s(h+1)` (`E3.monotone_h`), both by direct enumeration.
///
/// Any `2 <= s <= r` is accepted: the inequality only involves the first `s`
/// primes.
pub fn check_e3_recurrence(
    ctx: &ChainingContext,
    s: usize,
    h: u32,
    budget: u64,
) -> Result<Vec<LemmaCheckReport>> {
    if s < 2 || s > ctx.len() {
        return domain(format!("s = {s} outside 2..={}", ctx.len()));
    }
    if h == 0 {
        return domain("h must be at least 1");
    }
    let grid = format!("primes {:?} exponents {:?}", ctx.primes, ctx.exponents);
    let label = || format!("primes {:?} s={s} h={h}", ctx.primes);
    let cur = ctx.phi_s(s, h, budget)?;
    let next = ctx.phi_s(s, h + 1, budget)?;
    let prev = ctx.phi_s(s - 1, h, budget)?;
    let prev_next = ctx.phi_s(s - 1, h + 1, budget)?;
    let rhs = prev + ctx.b(s) * prev_next + ctx.beta(s) * ctx.pi(s - 1);
    let mut rec = Tracker::new("E3.recurrence", grid.clone());
    rec.record(rhs - cur + REL_SLACK * rhs, label);
    let mut mono = Tracker::new("E3.monotone_h", grid);
    mono.record(next - cur, label);
    Ok(vec![rec.finish(), mono.finish()])
}

/// `Π_s` is non-decreasing in `s` (`chaining.pi_monotone`) and its product
/// form matches the tuple sum to `1e-12` relative (`chaining.pi_product`).
pub fn check_pi_monotone(ctx: &ChainingContext, budget: u64) -> Result<Vec<LemmaCheckReport>> {
    let grid = format!("primes {:?} exponents {:?}", ctx.primes, ctx.exponents);
    let mut mono = Tracker::new("chaining.pi_monotone", grid.clone());
    let mut prod = Tracker::new("chaining.pi_product", grid);
    for s in 1..=ctx.len() {
        let (a, b) = (ctx.pi(s - 1), ctx.pi(s));
        mono.record(b - a, || format!("s={s}"));
        let e = ctx.pi_enum(s, budget)?;
        prod.record(REL_SLACK * e - (b - e).abs(), || format!("s={s}"));
    }
    Ok(vec![mono.finish(), prod.finish()])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::factored::DEFAULT_BUDGET;

    #[test]
    fn validation() {
        assert!(ChainingContext::new(vec![2, 3], vec![1, 1]).is_err());
        assert!(ChainingContext::new(vec![9], vec![1]).is_err());
        assert!(ChainingContext::new(vec![3, 3], vec![1, 1]).is_err());
        assert!(ChainingContext::new(vec![3], vec![0]).is_err());
        assert!(ChainingContext::new(vec![3, 5], vec![1]).is_err());
        assert!(ChainingContext::new(vec![], vec![]).is_err());
    }

    #[test]
    fn coefficients_positive() {
        for ctx in default_contexts() {
            assert!(ctx.coefficients().iter().all(|&c| c > 0.0));
            assert!(ctx.c_sum() > 1.0);
            for s in 1..=ctx.len() {
                assert!(ctx.b(s) > 0.0 && ctx.beta(s) > 0.0 && ctx.pi(s) >= 1.0);
            }
        }
        let ctx = ChainingContext::new(vec![3], vec![1]).unwrap();
        let l = 3f64.ln();
        let c = ctx.coefficients();
        assert!((c[0] - l / 3.0).abs() < 1e-15);
        assert!((c[2] - 2.0 / 3.0).abs() < 1e-15);
        assert!((c[3] - (3.0 + 3.0 / l + 1.0 / (l * l)) / 9.0).abs() < 1e-15);
        assert!((c[4] - (1.0 + 1.0 / (3.0 * l)) / (27.0 * l)).abs() < 1e-15);
        // Π_1 = 1 + 1/3.
        assert!((ctx.pi(1) - 4.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn phi_s_by_hand() {
        // primes (3, 5), α = (1, 1), h = 1: tuples (0,0) (0,1) (1,0) (1,1).
        let ctx = ChainingContext::new(vec![3, 5], vec![1, 1]).unwrap();
        let want = 0.0 + 2f64.ln() / 5.0 + 2f64.ln() / 3.0 + 3f64.ln() / 15.0;
        assert!((ctx.phi_s(2, 1, 100).unwrap() - want).abs() < 1e-15);
        assert!((ctx.phi_s(1, 1, 100).unwrap() - 2f64.ln() / 3.0).abs() < 1e-15);
        assert!(matches!(
            ctx.phi_s(2, 1, 3),
            Err(Error::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn e3_recurrence_examples() {
        let cases: [(&[u64], &[u32], usize, u32); 3] = [
            (&[3, 5], &[2, 2], 2, 1),
            (&[3, 5, 7], &[1, 1, 1], 3, 2),
            (&[3, 31], &[3, 1], 2, 3),
        ];
        for (p, a, s, h) in cases {
            let ctx = ChainingContext::new(p.to_vec(), a.to_vec()).unwrap();
            for r in check_e3_recurrence(&ctx, s, h, DEFAULT_BUDGET).unwrap() {
                assert!(r.passed(), "{r:?}");
            }
        }
        let ctx = ChainingContext::new(vec![3, 5], vec![1, 1]).unwrap();
        assert!(check_e3_recurrence(&ctx, 1, 1, 100).is_err());
        assert!(check_e3_recurrence(&ctx, 3, 1, 100).is_err());
    }

    #[test]
    fn e3a_e2_examples() {
        // p = 3 with S = 1: the "5" bound; p = 101 with S = 0: the "18" bound;
        // p = 3, S = 10, h = 3: second display.
        let ctx = ChainingContext::new(vec![3, 101], vec![1, 10]).unwrap();
        for r in check_e3a_and_e2(&[ctx], &[1, 2, 3]).unwrap() {
            assert!(r.passed(), "{r:?}");
        }
        let p = 3f64;
        let trunc80: f64 = (1..=80)
            .map(|m| m as f64 * p.ln() * (1.0 + m as f64).ln() / p.powi(m))
            .sum();
        assert!(trunc80 <= 5.0 * p.ln() / p * 4f64.ln());
        let q = 101f64;
        let s0: f64 = (1..=80)
            .map(|m| m as f64 * q.ln() * (m as f64).ln() / q.powi(m))
            .sum();
        assert!(s0 <= 18.0 * q.ln() / q);
        let lp = p.ln();
        let series: f64 = (0..200)
            .map(|m| (10.0 + m as f64 + 3.0).ln() / p.powi(m))
            .sum();
        assert!(series <= (1.0 + (1.0 + 1.0 / lp + 1.0 / (3.0 * lp * lp)) / p) * 15f64.ln());
    }

    #[test]
    fn default_contexts_pass() {
        for r in check_e3a_and_e2(&default_contexts(), &[1, 2, 3]).unwrap() {
            assert!(r.passed(), "{r:?}");
        }
        for ctx in default_contexts() {
            for r in check_pi_monotone(&ctx, DEFAULT_BUDGET).unwrap() {
                assert!(r.passed(), "{r:?}");
            }
            for s in 2..=ctx.len() {
                for h in 1..=3 {
                    for r in check_e3_recurrence(&ctx, s, h, DEFAULT_BUDGET).unwrap() {
                        assert!(r.passed(), "{r:?}");
                    }
                }
            }
        }
    }
}
