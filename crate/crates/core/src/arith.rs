//! Arithmetic functions on factored integers.
//!
//! | name | definition |
//! |------|------------|
//! | Φ    | `Σ_{d|n} log d / d` |
//! | Ψ    | `Σ_{d|n} (log d)(log log d) / d` |
//! | Φ₁   | `Σ_{μ} (Σ_i μ_i log p_i · log log p_i) / p^μ` |
//! | Φ₂   | `Σ_{d|n} (log d) log Ω(d) / d` |
//! | Φ_η  | `Σ_{d|n} (log d)^η / d` |
//! | w    | `Σ_{p|n} log p / p` |
//!
//! Iterated logarithms are the guarded ones of [`crate::factored`]. `log Ω(d)`
//! is a plain logarithm (zero when `Ω(d) <= 1`).

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::factored::{
    fold_divisors, fold_divisors_truncated, for_each_divisor, loglog_from_log, logloglog_from_log,
    ApproxValue, FactoredInteger, TailPolicy, WeightFamily,
};

#[inline]
fn psi_term(log_d: f64, inv_d: f64) -> f64 {
    WeightFamily::PSI.eval(log_d, inv_d)
}

/// `σ_{-1}(p^a) = Σ_{μ=0}^{a} p^{-μ}` for each prime power of `n`.
fn local_inverse_sums(n: &FactoredInteger) -> Vec<f64> {
    n.factors()
        .iter()
        .map(|&(p, a)| geometric_sum(p as f64, -1.0, a))
        .collect()
}

/// `Σ_{μ=0}^{a} p^{uμ}`.
fn geometric_sum(p: f64, u: f64, a: u32) -> f64 {
    if u == 0.0 {
        return a as f64 + 1.0;
    }
    let x = p.powf(u);
    if x == 1.0 {
        return a as f64 + 1.0;
    }
    if x < 1.0 {
        // (1 - x^{a+1}) / (1 - x), both factors positive.
        -(x.ln() * (a as f64 + 1.0)).exp_m1() / (1.0 - x)
    } else {
        ((x.ln() * (a as f64 + 1.0)).exp_m1()) / (x - 1.0)
    }
}

/// `Σ_i (∏_{j≠i} s_j) · t_i`, using prefix and suffix products.
fn leave_one_out_sum(s: &[f64], t: &[f64]) -> f64 {
    let r = s.len();
    let mut suffix = vec![1.0; r + 1];
    for i in (0..r).rev() {
        suffix[i] = suffix[i + 1] * s[i];
    }
    let mut prefix = 1.0;
    let mut acc = 0.0;
    for i in 0..r {
        acc += prefix * suffix[i + 1] * t[i];
        prefix *= s[i];
    }
    acc
}

/// Φ(n) by divisor enumeration.
pub fn phi_enum(n: &FactoredInteger, budget: u64) -> Result<f64> {
    fold_divisors(n, budget, |l, _, v| l * v)
}

/// Φ(n) from `Σ_i [Σ_{ν=1}^{α_i} ν log p_i / p_i^ν] σ_{-1}(n p_i^{-α_i})`.
pub fn phi_closed(n: &FactoredInteger) -> f64 {
    let s = local_inverse_sums(n);
    let t: Vec<f64> = n
        .factors()
        .iter()
        .map(|&(p, a)| {
            let lp = (p as f64).ln();
            (1..=a)
                .map(|nu| nu as f64 * lp * (p as f64).powi(-(nu as i32)))
                .sum()
        })
        .collect();
    leave_one_out_sum(&s, &t)
}

/// Ψ(n) by divisor enumeration.
pub fn psi_enum(n: &FactoredInteger, budget: u64) -> Result<f64> {
    fold_divisors(n, budget, |l, _, v| psi_term(l, v))
}

/// Ψ(n) summed over divisors `d <= cap`, with a bound on the rest.
pub fn psi_truncated(n: &FactoredInteger, cap: u64) -> Result<ApproxValue> {
    psi_truncated_with(n, cap, TailPolicy::Crude)
}

pub fn psi_truncated_with(
    n: &FactoredInteger,
    cap: u64,
    policy: TailPolicy,
) -> Result<ApproxValue> {
    fold_divisors_truncated(n, cap, WeightFamily::PSI, policy)
}

/// Φ₁(n) in closed form: the tuple sum is linear in μ, so it factorizes as
/// `Σ_i ∏_{j≠i} σ_{-1}(p_j^{α_j}) · Σ_{μ=0}^{α_i} μ (log p_i)(log log p_i) / p_i^μ`.
pub fn phi1_closed(n: &FactoredInteger) -> f64 {
    let s = local_inverse_sums(n);
    let t: Vec<f64> = n
        .factors()
        .iter()
        .map(|&(p, a)| {
            let lp = (p as f64).ln();
            let weight = lp * loglog_from_log(lp);
            (1..=a)
                .map(|mu| mu as f64 * weight * (p as f64).powi(-(mu as i32)))
                .sum()
        })
        .collect();
    leave_one_out_sum(&s, &t)
}

/// Φ₁(n) by direct enumeration of exponent tuples.
pub fn phi1_enum(n: &FactoredInteger, budget: u64) -> Result<f64> {
    let weights: Vec<f64> = n
        .primes()
        .map(|p| {
            let lp = (p as f64).ln();
            lp * loglog_from_log(lp)
        })
        .collect();
    let mut acc = 0.0;
    for_each_divisor(n, budget, |d| {
        let num: f64 = d
            .exponents
            .iter()
            .zip(&weights)
            .map(|(&m, &w)| m as f64 * w)
            .sum();
        acc += num * d.inv_d;
    })?;
    Ok(acc)
}

/// Φ₂(n) by divisor enumeration.
pub fn phi2_enum(n: &FactoredInteger, budget: u64) -> Result<f64> {
    fold_divisors(n, budget, |l, om, v| {
        if om <= 1 {
            0.0
        } else {
            l * (om as f64).ln() * v
        }
    })
}

/// Φ_η(n) by divisor enumeration, `η > 1`.
pub fn phi_eta_enum(n: &FactoredInteger, eta: f64, budget: u64) -> Result<f64> {
    if !(eta > 1.0) {
        return domain(format!("Φ_η needs η > 1, got {eta}"));
    }
    phi_eta_unchecked(n, eta, budget)
}

fn phi_eta_unchecked(n: &FactoredInteger, eta: f64, budget: u64) -> Result<f64> {
    fold_divisors(
        n,
        budget,
        |l, _, v| if l == 0.0 { 0.0 } else { l.powf(eta) * v },
    )
}

/// Davenport's `w(n) = Σ_{p|n} log p / p`.
pub fn davenport_w(n: &FactoredInteger) -> f64 {
    n.primes().map(|p| (p as f64).ln() / p as f64).sum()
}

/// `σ_u(n) = Σ_{d|n} d^u`, as a product of geometric sums.
pub fn sigma_u(n: &FactoredInteger, u: f64) -> f64 {
    n.factors()
        .iter()
        .map(|&(p, a)| geometric_sum(p as f64, u, a))
        .product()
}

/// Möbius function.
pub fn moebius(n: &FactoredInteger) -> i8 {
    if n.factors().iter().any(|&(_, a)| a >= 2) {
        0
    } else if n.omega() % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Jordan's totient `J_ε(n) = Σ_{d|n} d^ε μ(n/d) = ∏ p^{εα}(1 - p^{-ε})`.
pub fn jordan(n: &FactoredInteger, eps: f64) -> Result<f64> {
    if !(eps > 0.0) {
        return domain(format!("Jordan totient needs ε > 0, got {eps}"));
    }
    Ok(n.factors()
        .iter()
        .map(|&(p, a)| {
            let p = p as f64;
            p.powf(eps * a as f64) * -(-eps * p.ln()).exp_m1()
        })
        .product())
}

/// `J_k(n)` for integer `k >= 1` in exact integer arithmetic.
pub fn jordan_exact(n: &FactoredInteger, k: u32) -> Result<u128> {
    if k == 0 {
        return domain("Jordan totient needs ε > 0");
    }
    let overflow = || Error::Overflow(format!("J_{k}({n})"));
    n.factors().iter().try_fold(1u128, |acc, &(p, a)| {
        let pk = (p as u128).checked_pow(k).ok_or_else(overflow)?;
        let head = pk.checked_pow(a - 1).ok_or_else(overflow)?;
        acc.checked_mul(head * (pk - 1)).ok_or_else(overflow)
    })
}

/// Statistics that can be evaluated, searched and tabulated.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum StatKind {
    Phi,
    Psi,
    Phi1,
    Phi2,
    PhiEta(f64),
    DavenportW,
    Sigma(f64),
    /// Φ / (log log n)².
    EzRatio,
    /// Ψ / ((log log n)² log log log n).
    PsiRatio,
    /// Φ₁ / ((log log n)² log log log n).
    Phi1Ratio,
    /// w / log log n.
    WRatio,
    /// Φ_η / (log log n)^{1+η}.
    PhiEtaRatio(f64),
}

impl StatKind {
    pub fn is_ratio(&self) -> bool {
        matches!(
            self,
            Self::EzRatio | Self::PsiRatio | Self::Phi1Ratio | Self::WRatio | Self::PhiEtaRatio(_)
        )
    }

    /// The normalizer, as a function of `log n`; 1 for raw statistics.
    pub fn normalizer(&self, log_n: f64) -> f64 {
        let ll = loglog_from_log(log_n);
        let lll = logloglog_from_log(log_n);
        match *self {
            Self::EzRatio => ll * ll,
            Self::PsiRatio | Self::Phi1Ratio => ll * ll * lll,
            Self::WRatio => ll,
            Self::PhiEtaRatio(eta) => ll.powf(1.0 + eta),
            _ => 1.0,
        }
    }

    fn validate(self) -> Result<Self> {
        match self {
            Self::PhiEta(eta) | Self::PhiEtaRatio(eta) if !(eta > 1.0) => {
                domain(format!("η must exceed 1, got {eta}"))
            }
            Self::Sigma(u) if !u.is_finite() => domain("σ_u needs a finite u"),
            other => Ok(other),
        }
    }
}

impl fmt::Display for StatKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Phi => write!(f, "phi"),
            Self::Psi => write!(f, "psi"),
            Self::Phi1 => write!(f, "phi1"),
            Self::Phi2 => write!(f, "phi2"),
            Self::PhiEta(e) => write!(f, "phi_eta:{e}"),
            Self::DavenportW => write!(f, "w"),
            Self::Sigma(u) => write!(f, "sigma:{u}"),
            Self::EzRatio => write!(f, "ez_ratio"),
            Self::PsiRatio => write!(f, "psi_ratio"),
            Self::Phi1Ratio => write!(f, "phi1_ratio"),
            Self::WRatio => write!(f, "w_ratio"),
            Self::PhiEtaRatio(e) => write!(f, "phi_eta_ratio:{e}"),
        }
    }
}

impl FromStr for StatKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (name, arg) = match s.split_once(':') {
            Some((a, b)) => (a, Some(b)),
            None => (s, None),
        };
        let param = |what: &str| -> Result<f64> {
            arg.ok_or_else(|| {
                Error::Domain(format!("'{name}' needs a parameter, e.g. {name}:{what}"))
            })?
            .parse::<f64>()
            .map_err(|_| Error::Domain(format!("bad parameter in '{s}'")))
        };
        let kind = match name {
            "phi" => Self::Phi,
            "psi" => Self::Psi,
            "phi1" => Self::Phi1,
            "phi2" => Self::Phi2,
            "phi_eta" => Self::PhiEta(param("1.5")?),
            "w" | "davenport_w" => Self::DavenportW,
            "sigma" => Self::Sigma(param("-1")?),
            "ez_ratio" => Self::EzRatio,
            "psi_ratio" => Self::PsiRatio,
            "phi1_ratio" => Self::Phi1Ratio,
            "w_ratio" => Self::WRatio,
            "phi_eta_ratio" => Self::PhiEtaRatio(param("1.5")?),
            _ => return domain(format!("unknown statistic '{s}'")),
        };
        if arg.is_some() && !matches!(name, "phi_eta" | "sigma" | "phi_eta_ratio") {
            return domain(format!("statistic '{name}' takes no parameter"));
        }
        kind.validate()
    }
}

impl From<StatKind> for String {
    fn from(k: StatKind) -> String {
        k.to_string()
    }
}

impl TryFrom<String> for StatKind {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

/// How a statistic is evaluated when exact enumeration is too expensive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalOptions {
    pub budget: u64,
    /// Divisor cap for the truncated Ψ fallback; `None` makes an exceeded
    /// budget an error.
    pub truncate_cap: Option<u64>,
    pub tail: TailPolicy,
}

impl Default for EvalOptions {
    fn default() -> Self {
        Self {
            budget: crate::factored::DEFAULT_BUDGET,
            truncate_cap: None,
            tail: TailPolicy::Crude,
        }
    }
}

/// A statistic's value (possibly an enclosure) and its normalizer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StatValue {
    pub value: ApproxValue,
    pub normalizer: f64,
}

impl StatValue {
    pub fn ratio_lower(&self) -> f64 {
        self.value.lower() / self.normalizer
    }

    pub fn ratio_upper(&self) -> f64 {
        self.value.upper() / self.normalizer
    }
}

/// Evaluates `stat` at `n`, preferring closed forms, then enumeration, then
/// (Ψ only) truncated enclosure.
pub fn evaluate(n: &FactoredInteger, stat: StatKind, opts: &EvalOptions) -> Result<StatValue> {
    let stat = stat.validate()?;
    if stat.is_ratio() && n.is_one() {
        return domain("normalized ratios need n >= 2");
    }
    let exact = |v: f64| Ok::<_, Error>(ApproxValue::exact(v));
    let value = match stat {
        StatKind::Phi | StatKind::EzRatio => exact(phi_closed(n))?,
        StatKind::Phi1 | StatKind::Phi1Ratio => exact(phi1_closed(n))?,
        StatKind::DavenportW | StatKind::WRatio => exact(davenport_w(n))?,
        StatKind::Sigma(u) => exact(sigma_u(n, u))?,
        StatKind::Phi2 => exact(phi2_enum(n, opts.budget)?)?,
        StatKind::PhiEta(eta) | StatKind::PhiEtaRatio(eta) => {
            exact(phi_eta_unchecked(n, eta, opts.budget)?)?
        }
        StatKind::Psi | StatKind::PsiRatio => match psi_enum(n, opts.budget) {
            Ok(v) => ApproxValue::exact(v),
            Err(Error::BudgetExceeded { .. }) if opts.truncate_cap.is_some() => {
                fold_divisors_truncated(
                    n,
                    opts.truncate_cap.unwrap(),
                    WeightFamily::PSI,
                    opts.tail,
                )?
            }
            Err(e) => return Err(e),
        },
    };
    Ok(StatValue {
        value,
        normalizer: stat.normalizer(n.log_of()),
    })
}

/// `stat(n)` divided by its normalizer, evaluated exactly.
pub fn normalized_ratio(n: &FactoredInteger, stat: StatKind, budget: u64) -> Result<f64> {
    let opts = EvalOptions {
        budget,
        ..Default::default()
    };
    Ok(evaluate(n, stat, &opts)?.ratio_lower())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::factored::DEFAULT_BUDGET as B;
    use crate::primes::PrimeTable;

    fn f(s: &str) -> FactoredInteger {
        s.parse().unwrap()
    }

    fn fac(t: &PrimeTable, n: u64) -> FactoredInteger {
        FactoredInteger::factorize(t, n).unwrap()
    }

    fn divisors(n: u64) -> Vec<u64> {
        (1..=n).filter(|d| n % d == 0).collect()
    }

    fn big_omega_naive(mut d: u64) -> u32 {
        let mut k = 0;
        let mut p = 2;
        while d > 1 {
            while d % p == 0 {
                d /= p;
                k += 1;
            }
            p += 1;
        }
        k
    }

    fn gll(x: f64) -> f64 {
        if x <= std::f64::consts::E.exp() {
            1.0
        } else {
            x.ln().ln()
        }
    }

    #[test]
    fn phi_examples() {
        assert_eq!(phi_enum(&FactoredInteger::one(), B).unwrap(), 0.0);
        assert_eq!(phi_closed(&FactoredInteger::one()), 0.0);
        let half_log2 = 2f64.ln() / 2.0;
        assert!((phi_enum(&f("2"), B).unwrap() - half_log2).abs() < 1e-15);
        assert!((phi_closed(&f("2")) - half_log2).abs() < 1e-15);
        assert!((half_log2 - 0.346574).abs() < 1e-6);

        let oracle12: f64 = divisors(12)
            .iter()
            .map(|&d| (d as f64).ln() / d as f64)
            .sum();
        assert!((phi_enum(&f("2^2*3"), B).unwrap() - oracle12).abs() < 1e-14);

        let n = f("2^2*3^2*5^2*7^2");
        let oracle: f64 = divisors(44100)
            .iter()
            .map(|&d| (d as f64).ln() / d as f64)
            .sum();
        assert!((phi_closed(&n) - oracle).abs() / oracle < 1e-12);
        assert!((phi_enum(&n, B).unwrap() - oracle).abs() / oracle < 1e-12);
    }

    #[test]
    fn psi_against_trial_division() {
        let t = PrimeTable::new(1000).unwrap();
        for n in [1u64, 2, 6, 12, 720_720] {
            let oracle: f64 = divisors(n)
                .iter()
                .map(|&d| {
                    let x = d as f64;
                    if d == 1 {
                        0.0
                    } else {
                        x.ln() * gll(x) / x
                    }
                })
                .sum();
            let got = psi_enum(&fac(&t, n), B).unwrap();
            assert!((got - oracle).abs() <= 1e-12 * oracle.max(1.0), "n={n}");
        }
        assert!((psi_enum(&f("2"), B).unwrap() - 0.346574).abs() < 1e-6);
    }

    #[test]
    fn psi_truncated_examples() {
        let six = f("2*3");
        let a = psi_truncated(&six, 6).unwrap();
        assert!(a.is_exact());
        let b = psi_truncated(&six, 2).unwrap();
        assert!((b.value - 2f64.ln() / 2.0).abs() < 1e-15);
        assert!((b.tail_bound - 6f64.ln() * 0.5).abs() < 1e-12);
    }

    #[test]
    fn phi1_examples() {
        assert_eq!(phi1_closed(&FactoredInteger::one()), 0.0);
        assert!((phi1_closed(&f("2")) - 2f64.ln() / 2.0).abs() < 1e-15);
        let t = PrimeTable::new(10_000).unwrap();
        for n in (2..10_000u64).step_by(37) {
            let n = fac(&t, n);
            let a = phi1_closed(&n);
            let b = phi1_enum(&n, B).unwrap();
            assert!((a - b).abs() <= 1e-10 * b.abs().max(1e-300), "{n}");
        }
    }

    #[test]
    fn phi2_examples() {
        assert_eq!(phi2_enum(&f("97"), B).unwrap(), 0.0);
        let four = phi2_enum(&f("2^2"), B).unwrap();
        assert!((four - 4f64.ln() * 2f64.ln() / 4.0).abs() < 1e-15);
        assert!((four - 0.240227).abs() < 1e-6);
        let six = phi2_enum(&f("2*3"), B).unwrap();
        assert!((six - 6f64.ln() * 2f64.ln() / 6.0).abs() < 1e-15);
        assert!((six - 0.20699).abs() < 1e-5);

        let t = PrimeTable::new(1000).unwrap();
        for n in [360u64, 720, 997, 1024] {
            let oracle: f64 = divisors(n)
                .iter()
                .map(|&d| {
                    let om = big_omega_naive(d);
                    if om <= 1 {
                        0.0
                    } else {
                        (d as f64).ln() * (om as f64).ln() / d as f64
                    }
                })
                .sum();
            assert!((phi2_enum(&fac(&t, n), B).unwrap() - oracle).abs() < 1e-12);
        }
    }

    #[test]
    fn phi_eta_examples() {
        assert_eq!(phi_eta_enum(&FactoredInteger::one(), 2.0, B).unwrap(), 0.0);
        let v = phi_eta_enum(&f("2"), 2.0, B).unwrap();
        assert!((v - 0.240227).abs() < 1e-6);
        let near = phi_eta_enum(&f("2^2*3"), 1.0 + 1e-8, B).unwrap();
        assert!((near - phi_enum(&f("2^2*3"), B).unwrap()).abs() < 1e-6);
        assert!(phi_eta_enum(&f("2"), 1.0, B).is_err());
    }

    #[test]
    fn davenport_examples() {
        assert_eq!(davenport_w(&FactoredInteger::one()), 0.0);
        let w210 = davenport_w(&f("2*3*5*7"));
        let direct: f64 = [2f64, 3.0, 5.0, 7.0].iter().map(|p| p.ln() / p).sum();
        assert!((w210 - direct).abs() < 1e-15);
        assert!((w210 - 1.3127).abs() < 1e-4);
        assert_eq!(davenport_w(&f("2^3")), davenport_w(&f("2")));
    }

    #[test]
    fn sigma_moebius_jordan() {
        assert!((sigma_u(&f("2*3"), -1.0) - 2.0).abs() < 1e-15);
        assert_eq!(sigma_u(&f("2^2*3"), 0.0), 6.0);
        assert!((sigma_u(&f("2*3"), 1.0) - 12.0).abs() < 1e-12);

        assert_eq!(moebius(&FactoredInteger::one()), 1);
        assert_eq!(moebius(&f("2^2")), 0);
        assert_eq!(moebius(&f("2*3")), 1);
        assert_eq!(moebius(&f("2*3*5")), -1);

        assert!((jordan(&f("2*3"), 1.0).unwrap() - 2.0).abs() < 1e-12);
        assert_eq!(jordan(&FactoredInteger::one(), 0.7).unwrap(), 1.0);
        assert!((jordan(&f("2^2"), 2.0).unwrap() - 12.0).abs() < 1e-12);
        assert_eq!(jordan_exact(&f("2*3"), 1).unwrap(), 2);
        assert_eq!(jordan_exact(&f("2^2"), 2).unwrap(), 12);
        assert!(jordan(&f("2"), 0.0).is_err());
    }

    #[test]
    fn ratios() {
        let two = f("2");
        let r = normalized_ratio(&two, StatKind::PsiRatio, B).unwrap();
        assert!((r - 0.346574).abs() < 1e-6);
        let r = normalized_ratio(&two, StatKind::EzRatio, B).unwrap();
        assert!((r - 0.346574).abs() < 1e-6);
        assert!(normalized_ratio(&FactoredInteger::one(), StatKind::EzRatio, B).is_err());

        // w_ratio(210·p) for primes p > 7 against a directly computed table;
        // the ratio decreases along the table.
        let t = PrimeTable::new(1000).unwrap();
        let base = f("2*3*5*7");
        let mut prev = f64::INFINITY;
        for &p in t.primes().iter().skip(4).take(40) {
            let n = base.mul(&f(&p.to_string()));
            let w: f64 = [2u64, 3, 5, 7, p]
                .iter()
                .map(|&q| (q as f64).ln() / q as f64)
                .sum();
            let direct = w / ((210 * p) as f64).ln().ln();
            let r = normalized_ratio(&n, StatKind::WRatio, B).unwrap();
            assert!((r - direct).abs() < 1e-14);
            assert!(r < prev, "w_ratio should decrease at p={p}");
            prev = r;
        }
    }

    #[test]
    fn stat_kind_parsing() {
        for s in [
            "phi",
            "psi_ratio",
            "phi_eta:1.5",
            "sigma:-1",
            "w_ratio",
            "phi_eta_ratio:2",
        ] {
            let k: StatKind = s.parse().unwrap();
            assert_eq!(k.to_string(), s);
        }
        assert!("phi_eta:1".parse::<StatKind>().is_err());
        assert!("bogus".parse::<StatKind>().is_err());
        assert!("phi:3".parse::<StatKind>().is_err());
        let json = serde_json::to_string(&StatKind::PhiEta(1.5)).unwrap();
        assert_eq!(json, "\"phi_eta:1.5\"");
    }

    #[test]
    fn evaluate_falls_back_to_enclosure() {
        let n = f("2^3*3^3*5^3*7^3");
        let opts = EvalOptions {
            budget: 10,
            truncate_cap: Some(1000),
            tail: TailPolicy::Crude,
        };
        let v = evaluate(&n, StatKind::Psi, &opts).unwrap();
        let exact = psi_enum(&n, B).unwrap();
        assert!(!v.value.is_exact());
        assert!(v.value.contains(exact));
        let strict = EvalOptions {
            budget: 10,
            ..Default::default()
        };
        assert!(matches!(
            evaluate(&n, StatKind::Psi, &strict),
            Err(Error::BudgetExceeded { .. })
        ));
    }
}
