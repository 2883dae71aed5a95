//! Named groups of checks run by `ezsum verify`.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::analytic::{
    check_e1, check_hh, check_phivar, check_phivar_quadrature, E1Grid, HhGrid, PhivarClause,
    PhivarGrid,
};
use super::chaining::{check_e3_recurrence, check_e3a_and_e2, check_pi_monotone, default_contexts};
use super::ranges::{
    check_closed_forms, check_convexdec, check_convexity_random, check_jordan_moebius,
    check_phi1_sandwich, check_phi1maj, check_phi2_min, check_phi2_min_corrected,
    check_phi_eta_conditional, check_sigma_multiplicative, check_tezm, phi2_growth_observation,
};
use super::{LemmaCheckReport, Observation, Tracker};
use crate::error::{domain, Error, Result};
use crate::extremal::davenport_distant_check;
use crate::factored::FactoredInteger;
use crate::gcd_forms::{
    check_cs_majorant, check_identity_f, empirical_sharpness, quadratic_form, CoefficientDist,
    CoefficientSet, GeneratorSpec,
};
use crate::primes::PrimeTable;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Identities,
    Lemmas,
    Gcd,
    All,
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Suite::Identities => "identities",
            Suite::Lemmas => "lemmas",
            Suite::Gcd => "gcd",
            Suite::All => "all",
        })
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "identities" => Ok(Suite::Identities),
            "lemmas" => Ok(Suite::Lemmas),
            "gcd" => Ok(Suite::Gcd),
            "all" => Ok(Suite::All),
            _ => domain(format!(
                "unknown suite {s:?} (identities, lemmas, gcd, all)"
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteConfig {
    /// Upper end of the integer ranges.
    pub max_n: u64,
    /// Seed for every random grid (convexity vectors, coprime pairs,
    /// coefficient sets).
    pub seed: u64,
    /// Number of random coefficient sets in the GCD suite.
    pub trials: usize,
    pub budget: u64,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            max_n: 100_000,
            seed: 7,
            trials: 200,
            budget: crate::DEFAULT_BUDGET,
        }
    }
}

impl SuiteConfig {
    /// Sieve limit a [`PrimeTable`] needs for [`run_suite`].
    pub fn table_limit(&self) -> u64 {
        self.max_n.max(IDENTITY_CAP)
    }
}

/// Cap for the quadratic-cost identity checks.
const IDENTITY_CAP: u64 = 10_000;
const CONVEXITY_TRIALS: usize = 10_000;
const SIGMA_PAIRS: usize = 200;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: String,
    pub checks: Vec<LemmaCheckReport>,
    pub observations: Vec<Observation>,
}

impl SuiteReport {
    pub fn violations(&self) -> u64 {
        self.checks.iter().map(|c| c.violations).sum()
    }

    pub fn passed(&self) -> bool {
        self.violations() == 0
    }

    pub fn check(&self, id: &str) -> Option<&LemmaCheckReport> {
        self.checks.iter().find(|c| c.lemma_id == id)
    }
}

/// Runs `suite`. The table must reach [`SuiteConfig::table_limit`].
pub fn run_suite(table: &PrimeTable, suite: Suite, cfg: &SuiteConfig) -> Result<SuiteReport> {
    if table.limit() < cfg.table_limit() {
        return domain(format!(
            "prime table limit {} is below the {} the suite needs",
            table.limit(),
            cfg.table_limit()
        ));
    }
    let mut report = SuiteReport {
        suite: suite.to_string(),
        checks: Vec::new(),
        observations: Vec::new(),
    };
    if matches!(suite, Suite::Identities | Suite::All) {
        identities(table, cfg, &mut report)?;
    }
    if matches!(suite, Suite::Lemmas | Suite::All) {
        lemmas(table, cfg, &mut report)?;
    }
    if matches!(suite, Suite::Gcd | Suite::All) {
        gcd(table, cfg, &mut report)?;
    }
    Ok(report)
}

fn identities(table: &PrimeTable, cfg: &SuiteConfig, out: &mut SuiteReport) -> Result<()> {
    let small = cfg.max_n.min(IDENTITY_CAP);
    out.checks
        .extend(check_closed_forms(table, cfg.max_n, small, cfg.budget)?);
    out.checks
        .push(check_convexdec(table, cfg.max_n, cfg.budget)?);
    out.checks
        .extend(check_jordan_moebius(table, small, cfg.budget)?);
    out.checks.push(check_sigma_multiplicative(
        table,
        cfg.max_n.max(2),
        SIGMA_PAIRS,
        cfg.seed,
    )?);
    Ok(())
}

/// Merges reports that share a `lemma_id`, keeping first-seen order.
fn merge_by_id(reports: impl IntoIterator<Item = LemmaCheckReport>) -> Vec<LemmaCheckReport> {
    let mut out: Vec<LemmaCheckReport> = Vec::new();
    for r in reports {
        match out.iter_mut().find(|o| o.lemma_id == r.lemma_id) {
            Some(o) => o.absorb(r),
            None => out.push(r),
        }
    }
    out
}

/// Integers used for the conditional Φ_η bound: products of primes from a
/// window, and single primes and prime squares.
fn phi_eta_family(table: &PrimeTable) -> Result<Vec<FactoredInteger>> {
    let window = |lo: u64, hi: u64| -> Result<FactoredInteger> {
        let f = table
            .primes()
            .iter()
            .filter(|&&p| (lo..=hi).contains(&p))
            .map(|&p| (p, 1))
            .collect();
        FactoredInteger::new(f)
    };
    let mut out = vec![window(100, 200)?, window(200, 260)?, window(1000, 1100)?];
    for p in [5u64, 11, 101, 1009, 9973] {
        out.push(FactoredInteger::new(vec![(p, 1)])?);
        out.push(FactoredInteger::new(vec![(p, 2)])?);
    }
    Ok(out)
}

fn lemmas(table: &PrimeTable, cfg: &SuiteConfig, out: &mut SuiteReport) -> Result<()> {
    for clause in PhivarClause::ALL {
        out.checks
            .push(check_phivar(clause, &PhivarGrid::default_for(clause))?);
    }
    out.checks.push(check_phivar_quadrature(
        &PhivarGrid::default_for(PhivarClause::WeightedTail),
        &PhivarGrid::default_for(PhivarClause::PlainTail),
    )?);
    out.checks.push(check_e1(&E1Grid::default())?);
    let contexts = default_contexts();
    out.checks.extend(check_e3a_and_e2(&contexts, &[1, 2, 3])?);
    let mut chained = Vec::new();
    for ctx in &contexts {
        for s in 2..=ctx.len() {
            for h in 1..=3 {
                chained.extend(check_e3_recurrence(ctx, s, h, cfg.budget)?);
            }
        }
        chained.extend(check_pi_monotone(ctx, cfg.budget)?);
    }
    out.checks.extend(merge_by_id(chained));
    out.checks
        .push(check_convexity_random(CONVEXITY_TRIALS, cfg.seed));
    out.checks.push(check_hh(&HhGrid::default())?);
    out.checks.push(check_tezm(table, cfg.max_n)?);
    out.checks.push(check_phi1maj(table, cfg.max_n)?);
    out.checks.extend(check_phi1_sandwich(table, cfg.max_n)?);
    out.checks
        .push(check_phi2_min(table, cfg.max_n, cfg.budget)?);
    out.checks
        .push(check_phi2_min_corrected(table, cfg.max_n, cfg.budget)?);

    let family = phi_eta_family(table)?;
    for eta in [1.5, 2.0] {
        out.observations
            .push(check_phi_eta_conditional(&family, eta, cfg.budget)?);
    }
    out.observations
        .push(phi2_growth_observation(table, cfg.max_n, true, cfg.budget)?);
    out.observations.push(phi2_growth_observation(
        table, cfg.max_n, false, cfg.budget,
    )?);
    let distant = davenport_distant_check(table, 2, 8)?;
    out.observations.push(Observation {
        id: "davenport.distant.min_safe_start".into(),
        description: format!(
            "smallest p_start from which every distant sequence (r <= 8) satisfies w(n) <= logloglog n; {}",
            distant.check.grid
        ),
        value: distant.min_safe_start.map_or(f64::NAN, |p| p as f64),
        at: None,
    });
    Ok(())
}

fn gcd(table: &PrimeTable, cfg: &SuiteConfig, out: &mut SuiteReport) -> Result<()> {
    let top = cfg.max_n.min(IDENTITY_CAP);
    let mut identity = Tracker::new(
        "identity_f",
        format!("nu <= {top}, s in {{0.6, 1}}, gap < 1e-9"),
    );
    for s in [0.6, 1.0] {
        let parts: Vec<Tracker> = (1..=top)
            .collect::<Vec<_>>()
            .par_chunks(512)
            .map(|chunk| {
                let mut t = Tracker::new("identity_f", "");
                for &nu in chunk {
                    let f = FactoredInteger::factorize(table, nu)?;
                    let gap = check_identity_f(&f, s, cfg.budget)?;
                    t.record(1e-9 - gap, || format!("nu={nu} s={s}"));
                }
                Ok(t)
            })
            .collect::<Result<_>>()?;
        for p in parts {
            identity.merge(p);
        }
    }
    out.checks.push(identity.finish());

    // Random supports: sizes 1..=100 inside [2, 10^4], coefficient law
    // alternating between signs and uniform.
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut sets = Vec::with_capacity(cfg.trials);
    for i in 0..cfg.trials {
        let size = rng.gen_range(1..=100);
        let dist = if i % 2 == 0 {
            CoefficientDist::Signs
        } else {
            CoefficientDist::Uniform
        };
        sets.push(
            GeneratorSpec::Random {
                size,
                k_max: IDENTITY_CAP,
                dist,
            }
            .generate(&mut rng)?,
        );
    }
    let grid = format!(
        "{} seeded sets (seed {}), |K| <= 100 in [2, 1e4], s in {{0.6, 1}}, rel 1e-9",
        cfg.trials, cfg.seed
    );
    let results: Vec<Vec<(f64, f64, f64)>> = sets
        .par_iter()
        .map(|cs| {
            [0.6, 1.0]
                .iter()
                .map(|&s| {
                    let m = check_cs_majorant(table, cs, s, 1.5, cfg.budget)?;
                    Ok((s, m.margin + 1e-9 * m.rhs.abs(), m.restricted_margin))
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    let mut cs_t = Tracker::new("cs_majorant", grid);
    let mut restricted_failures = 0u64;
    for (i, rows) in results.iter().enumerate() {
        for &(s, margin, restricted) in rows {
            cs_t.record(margin, || format!("set {i} s={s}"));
            if restricted < 0.0 {
                restricted_failures += 1;
            }
        }
    }
    out.checks.push(cs_t.finish());
    out.observations.push(Observation {
        id: "cs_majorant.restricted".into(),
        description: "cases where the product of the two u >= 2 factors alone falls below the form"
            .into(),
        value: restricted_failures as f64,
        at: None,
    });

    // Distinct prime supports at s = 1 have a closed form.
    let primes: Vec<u64> = table.primes_up_to(IDENTITY_CAP as f64)?.to_vec();
    let mut prime_t = Tracker::new(
        "form.distinct_primes",
        format!("{} seeded prime supports, s = 1, rel 1e-12", cfg.trials),
    );
    for i in 0..cfg.trials {
        let size = rng.gen_range(1..=50);
        let picks = rand::seq::index::sample(&mut rng, primes.len(), size);
        let entries: Vec<(u64, f64)> = picks
            .into_iter()
            .map(|j| (primes[j], rng.gen_range(-1.0..=1.0)))
            .collect();
        let cs = CoefficientSet::new(entries)?;
        let q = quadratic_form(&cs, 1.0)?;
        let e = cs.entries();
        let sq: f64 = e.iter().map(|x| x.1 * x.1).sum();
        let lin: f64 = e.iter().map(|x| x.1 / x.0 as f64).sum();
        let diag: f64 = e
            .iter()
            .map(|x| x.1 * x.1 / (x.0 as f64 * x.0 as f64))
            .sum();
        let want = sq + lin * lin - diag;
        prime_t.record(1e-12 * want.abs().max(1.0) - (q - want).abs(), || {
            format!("set {i}")
        });
    }
    out.checks.push(prime_t.finish());

    let spec = GeneratorSpec::Random {
        size: 100,
        k_max: IDENTITY_CAP,
        dist: CoefficientDist::Signs,
    };
    for s in [0.6, 1.0] {
        let r = empirical_sharpness(table, &spec, cfg.trials, s, 1.5, cfg.seed, cfg.budget)?;
        out.observations.push(Observation {
            id: format!("sharpness.s{s}"),
            description: format!(
                "max quadratic form / sum c^2 rhs_weight over {} random sign sets, eta 1.5; guarded proof constant {:.6}",
                cfg.trials, r.proof_constant
            ),
            value: r.max_ratio.unwrap_or(0.0),
            at: r.argmax_k_summary,
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_suites() {
        for s in ["identities", "lemmas", "gcd", "all"] {
            assert_eq!(s.parse::<Suite>().unwrap().to_string(), s);
        }
        assert!("nope".parse::<Suite>().is_err());
    }

    #[test]
    fn small_identities_and_gcd() {
        let table = PrimeTable::new(10_000).unwrap();
        let cfg = SuiteConfig {
            max_n: 2000,
            seed: 3,
            trials: 6,
            ..Default::default()
        };
        let r = run_suite(&table, Suite::Identities, &cfg).unwrap();
        assert!(r.passed(), "{r:?}");
        let g = run_suite(&table, Suite::Gcd, &cfg).unwrap();
        assert!(g.passed(), "{g:?}");
        assert_eq!(
            g.checks
                .iter()
                .filter(|c| c.lemma_id == "identity_f")
                .count(),
            1
        );
        let again = run_suite(&table, Suite::Gcd, &cfg).unwrap();
        assert_eq!(
            serde_json::to_string(&g).unwrap(),
            serde_json::to_string(&again).unwrap()
        );
    }

    #[test]
    fn table_too_small() {
        let table = PrimeTable::new(1000).unwrap();
        assert!(run_suite(&table, Suite::Identities, &SuiteConfig::default()).is_err());
    }
}
