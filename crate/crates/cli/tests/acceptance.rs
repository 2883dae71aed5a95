//! Acceptance criteria, one line each. Exits non-zero if any criterion fails.

use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ezsum::arith::psi_enum;
use ezsum::extremal::{build_nj, champion_search, trend_report, write_champions_jsonl};
use ezsum::factored::fold_divisors_truncated;
use ezsum::gcd_forms::{check_identity_f, empirical_sharpness, CoefficientDist, GeneratorSpec};
use ezsum::primes::EULER_GAMMA;
use ezsum::verify::{
    check_closed_forms, check_convexdec, check_convexity_random, check_jordan_moebius, run_suite,
    LemmaCheckReport, Suite, SuiteConfig,
};
use ezsum::{
    EvalOptions, FactoredInteger, PrimeTable, StatKind, TailPolicy, WeightFamily, DEFAULT_BUDGET,
};

struct Outcome {
    pass: bool,
    detail: String,
}

fn summarize(reports: &[LemmaCheckReport]) -> String {
    reports
        .iter()
        .map(|r| {
            if r.passed() {
                format!("{} ok ({} pts)", r.lemma_id, r.points)
            } else {
                format!(
                    "{} {} violations, worst {:e} at {}",
                    r.lemma_id,
                    r.violations,
                    r.worst_margin,
                    r.worst_point.as_deref().unwrap_or("?")
                )
            }
        })
        .collect::<Vec<_>>()
        .join("; ")
}

fn timed(limit: Duration, reports: Vec<LemmaCheckReport>, start: Instant) -> Outcome {
    let took = start.elapsed();
    let pass = reports.iter().all(LemmaCheckReport::passed) && took < limit;
    Outcome {
        pass,
        detail: format!("{} [{:.1}s]", summarize(&reports), took.as_secs_f64()),
    }
}

fn closed_forms(table: &PrimeTable) -> Outcome {
    let start = Instant::now();
    let r = check_closed_forms(table, 100_000, 10_000, DEFAULT_BUDGET).unwrap();
    timed(Duration::from_secs(60), r, start)
}

fn decomposition(table: &PrimeTable) -> Outcome {
    let start = Instant::now();
    let r = check_convexdec(table, 100_000, DEFAULT_BUDGET).unwrap();
    timed(Duration::MAX, vec![r], start)
}

fn convexity() -> Outcome {
    let start = Instant::now();
    let r = check_convexity_random(10_000, 7);
    timed(Duration::MAX, vec![r], start)
}

fn moebius_jordan(table: &PrimeTable) -> Outcome {
    let start = Instant::now();
    let mut reports = check_jordan_moebius(table, 10_000, DEFAULT_BUDGET).unwrap();
    reports.retain(|r| r.lemma_id.starts_with("jordan"));
    let mut worst = 0.0f64;
    let mut at = None;
    let mut bad = 0u64;
    for s in [0.6, 1.0] {
        for nu in 1..=10_000u64 {
            let f = FactoredInteger::factorize(table, nu).unwrap();
            let gap = check_identity_f(&f, s, DEFAULT_BUDGET).unwrap();
            if !(gap < 1e-9) {
                bad += 1;
            }
            if !(gap <= worst) {
                worst = gap;
                at = Some(format!("nu={nu} s={s}"));
            }
        }
    }
    let mut o = timed(Duration::MAX, reports, start);
    o.pass &= bad == 0;
    o.detail = format!(
        "identity (f): {bad} of 20000 at or above 1e-9, largest gap {worst:e}{}; {}",
        at.map(|a| format!(" at {a}")).unwrap_or_default(),
        o.detail
    );
    o
}

fn lemma_suite(table: &PrimeTable) -> Outcome {
    let start = Instant::now();
    let cfg = SuiteConfig::default();
    let report = run_suite(table, Suite::Lemmas, &cfg).unwrap();
    let failing: Vec<LemmaCheckReport> = report
        .checks
        .iter()
        .filter(|c| !c.passed())
        .cloned()
        .collect();
    let quad = report
        .check("phivar.quadrature")
        .expect("quadrature report");
    Outcome {
        pass: failing.is_empty(),
        detail: format!(
            "{} checks, {} failing{}{}; quadrature self-consistency worst deviation {:e} [{:.1}s]",
            report.checks.len(),
            failing.len(),
            if failing.is_empty() { "" } else { ": " },
            summarize(&failing),
            1e-10 - quad.worst_margin,
            start.elapsed().as_secs_f64()
        ),
    }
}

fn enclosures(table: &PrimeTable) -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut misses = Vec::new();
    let mut cases = 0;
    for _ in 0..100 {
        let n = rng.gen_range(2..=10_000_000u64);
        let f = FactoredInteger::factorize(table, n).unwrap();
        let exact = psi_enum(&f, DEFAULT_BUDGET).unwrap();
        for cap in [10, 1000, n] {
            for policy in [TailPolicy::Crude, TailPolicy::ExactMass] {
                let a = fold_divisors_truncated(&f, cap, WeightFamily::PSI, policy).unwrap();
                cases += 1;
                if !a.contains(exact) {
                    misses.push(format!("n={n} cap={cap} {policy:?}"));
                }
            }
        }
    }
    let n4 = build_nj(table, 4).unwrap();
    let width = |policy| {
        let a = fold_divisors_truncated(&n4, 10_000_000, WeightFamily::PSI, policy).unwrap();
        (a.tail_bound / a.lower(), a)
    };
    let (crude_rel, _) = width(TailPolicy::Crude);
    let (mass_rel, mass) = width(TailPolicy::ExactMass);
    Outcome {
        pass: misses.is_empty() && mass_rel < 0.1,
        detail: format!(
            "{cases} enclosures, {} miss exact{}; n_4 cap 1e7: [{:.6}, {:.6}], width {:.2}% of lower end \
             (exact-mass tail; crude tail {:.2}%) [{:.1}s]",
            misses.len(),
            if misses.is_empty() { String::new() } else { format!(" ({})", misses.join(", ")) },
            mass.lower(),
            mass.upper(),
            100.0 * mass_rel,
            100.0 * crude_rel,
            start.elapsed().as_secs_f64()
        ),
    }
}

fn limsup_trend(table: &PrimeTable) -> Outcome {
    let start = Instant::now();
    let opts = EvalOptions::default();
    let rows = trend_report(table, 1..=4, StatKind::EzRatio, &opts).unwrap();
    let increasing = rows.windows(2).all(|w| w[1].ratio > w[0].ratio);
    let ez = champion_search(table, 1_000_000, StatKind::EzRatio, &opts).unwrap();
    let best = ez.records.last().expect("at least one record");
    let floor = 0.6 * EULER_GAMMA.exp();
    let psi = champion_search(table, 1_000_000, StatKind::PsiRatio, &opts).unwrap();
    let psi_monotone = !psi.records.is_empty()
        && psi
            .records
            .windows(2)
            .all(|w| w[1].ratio > w[0].ratio && w[1].n > w[0].n);
    let took = start.elapsed();
    let ratios: Vec<String> = rows.iter().map(|r| format!("{:.6}", r.ratio)).collect();
    Outcome {
        pass: increasing && best.ratio > floor && psi_monotone && took < Duration::from_secs(300),
        detail: format!(
            "ez_ratio(n_1..n_4) = [{}] {}; ez champion n={} ratio {:.6} vs floor {:.6}; \
             psi_ratio champions {} ({}) [{:.1}s]",
            ratios.join(", "),
            if increasing {
                "increasing"
            } else {
                "NOT increasing"
            },
            best.factorization,
            best.ratio,
            floor,
            psi.records.len(),
            if psi_monotone {
                "monotone"
            } else {
                "NOT monotone"
            },
            took.as_secs_f64()
        ),
    }
}

fn cs_majorant(table: &PrimeTable) -> Outcome {
    let start = Instant::now();
    let cfg = SuiteConfig::default();
    let report = run_suite(table, Suite::Gcd, &cfg).unwrap();
    let cs = report
        .check("cs_majorant")
        .expect("cs_majorant report")
        .clone();
    let spec = GeneratorSpec::Random {
        size: 100,
        k_max: 10_000,
        dist: CoefficientDist::Signs,
    };
    let runs: Vec<_> = (0..2)
        .map(|_| empirical_sharpness(table, &spec, 100, 1.0, 1.5, 1, DEFAULT_BUDGET).unwrap())
        .collect();
    let ratio = runs[0].max_ratio;
    let finite = ratio.is_some_and(f64::is_finite);
    let same = runs[0].max_ratio.map(f64::to_bits) == runs[1].max_ratio.map(f64::to_bits)
        && runs[0] == runs[1];
    let mut o = timed(Duration::MAX, vec![cs], start);
    o.pass &= finite && same;
    o.detail = format!(
        "{}; sharpness max ratio {:?} {}, {}",
        o.detail,
        ratio,
        if finite { "finite" } else { "NOT finite" },
        if same {
            "bit-identical on rerun"
        } else {
            "DIFFERS on rerun"
        }
    );
    o
}

fn run_cli(args: &[&str], threads: &str) -> i32 {
    let status = Command::new(env!("CARGO_BIN_EXE_ezsum"))
        .args(args)
        .env("EZSUM_THREADS", threads)
        .stdout(std::process::Stdio::null())
        .status()
        .expect("run ezsum");
    status.code().unwrap_or(-1)
}

fn determinism(table: &PrimeTable) -> Outcome {
    let start = Instant::now();
    let dir = tempfile::tempdir().unwrap();
    let path = |name: &str| dir.path().join(name).to_string_lossy().into_owned();
    let (a, b) = (path("a.json"), path("b.json"));
    let codes = [
        run_cli(
            &["verify", "--suite", "all", "--seed", "7", "--out", &a],
            "2",
        ),
        run_cli(
            &["verify", "--suite", "all", "--seed", "7", "--out", &b],
            "5",
        ),
    ];
    let read = |p: &str| std::fs::read(Path::new(p)).unwrap_or_default();
    let reports_same = !read(&a).is_empty() && read(&a) == read(&b);

    let mut outputs = Vec::new();
    for threads in ["1", "4", "4"] {
        let p = path(&format!("champions_{}.jsonl", outputs.len()));
        run_cli(
            &[
                "champions",
                "--n-max",
                "100000",
                "--stat",
                "psi_ratio",
                "--out",
                &p,
            ],
            threads,
        );
        outputs.push(read(&p));
    }
    let ez_outputs: Vec<Vec<u8>> = [1usize, 3]
        .iter()
        .map(|&t| {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(t)
                .build()
                .unwrap();
            let s = pool
                .install(|| {
                    champion_search(table, 100_000, StatKind::EzRatio, &EvalOptions::default())
                })
                .unwrap();
            let mut buf = Vec::new();
            write_champions_jsonl(&s.records, &mut buf).unwrap();
            buf
        })
        .collect();
    let champions_same = !outputs[0].is_empty()
        && outputs.iter().all(|o| *o == outputs[0])
        && ez_outputs[0] == ez_outputs[1];
    Outcome {
        pass: reports_same && champions_same,
        detail: format!(
            "verify --suite all --seed 7 twice (exit codes {:?}): reports {}; champion JSONL at n_max 1e5 \
             over 1/4/4 threads: {} [{:.1}s]",
            codes,
            if reports_same { "byte-identical" } else { "DIFFER" },
            if champions_same { "byte-identical" } else { "DIFFER" },
            start.elapsed().as_secs_f64()
        ),
    }
}

fn main() {
    let table = PrimeTable::new(10_000_000).unwrap();
    let criteria: [(&str, &dyn Fn() -> Outcome); 9] = [
        ("closed forms vs enumeration", &|| closed_forms(&table)),
        ("decomposition inequality", &|| decomposition(&table)),
        ("convexity lemma", &convexity),
        ("Mobius identity and Jordan inversion", &|| {
            moebius_jordan(&table)
        }),
        ("explicit-constant lemma suite", &|| lemma_suite(&table)),
        ("enclosure soundness", &|| enclosures(&table)),
        ("limsup trend evidence", &|| limsup_trend(&table)),
        ("Cauchy-Schwarz majorant", &|| cs_majorant(&table)),
        ("determinism", &|| determinism(&table)),
    ];
    let mut passed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let o = check();
        passed += o.pass as usize;
        println!(
            "criterion {} {:<38} {}  {}",
            i + 1,
            name,
            if o.pass { "PASS" } else { "FAIL" },
            o.detail
        );
    }
    println!("acceptance: {passed}/{} criteria pass", criteria.len());
    if passed != criteria.len() {
        std::process::exit(1);
    }
}
