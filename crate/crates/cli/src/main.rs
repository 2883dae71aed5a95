//! `ezsum`: evaluate divisor sums, search for record ratios, run the
//! verification suites and the GCD-form experiments.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::ops::RangeInclusive;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use ezsum::extremal::{
    build_nj, champion_search, trend_report, write_champions_jsonl, write_trend_csv,
};
use ezsum::gcd_forms::{empirical_sharpness, CoefficientDist, GeneratorSpec};
use ezsum::verify::{run_suite, Suite, SuiteConfig};
use ezsum::{
    evaluate, EvalOptions, FactoredInteger, PrimeTable, StatKind, TailPolicy, DEFAULT_BUDGET,
};

#[derive(Parser)]
#[command(name = "ezsum", version, about = "Divisor sums of Erdős–Zaremba type")]
struct Cli {
    /// Worker threads (default: one per core).
    #[arg(long, global = true, env = "EZSUM_THREADS")]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate one statistic at one integer.
    Eval(EvalArgs),
    /// Stream record values of a statistic over 2..=n_max as JSONL.
    Champions(ChampionArgs),
    /// Run a verification suite; exit 1 on any violation.
    Verify(VerifyArgs),
    /// Tabulate a statistic along n_j = ∏_{p<e^j} p^j as CSV.
    Extremal(ExtremalArgs),
    /// Empirical sharpness of the GCD quadratic-form bound.
    Gcdform(GcdArgs),
}

#[derive(Args, Clone)]
struct Truncation {
    /// Enumeration budget (divisor tuples).
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    budget: u64,
    /// Divisor cap for the truncated Ψ enclosure, used past the budget.
    #[arg(long)]
    cap: Option<u64>,
    /// Tail bound for truncated sums: crude or mass.
    #[arg(long, value_parser = ["crude", "mass"], default_value = "crude")]
    tail: String,
    /// Use the Rankin tail bound with this exponent instead.
    #[arg(long, value_name = "DELTA", conflicts_with = "tail")]
    rankin: Option<f64>,
}

impl Truncation {
    fn options(&self) -> Result<EvalOptions> {
        let tail = match self.rankin {
            None if self.tail == "mass" => TailPolicy::ExactMass,
            None => TailPolicy::Crude,
            Some(d) if d > 0.0 && d.is_finite() => TailPolicy::Rankin { delta: d },
            Some(d) => bail!("--rankin needs a positive exponent, got {d}"),
        };
        Ok(EvalOptions {
            budget: self.budget,
            truncate_cap: self.cap,
            tail,
        })
    }
}

#[derive(Args)]
struct EvalArgs {
    /// An integer, a factorization such as 2^2*3, or nj:<j>.
    #[arg(long)]
    n: String,
    #[arg(long, value_parser = parse_stat)]
    stat: StatKind,
    #[command(flatten)]
    trunc: Truncation,
    /// Print JSON instead of text.
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct ChampionArgs {
    #[arg(long)]
    n_max: u64,
    #[arg(long, value_parser = parse_stat)]
    stat: StatKind,
    #[arg(long, default_value = "champions.jsonl")]
    out: PathBuf,
    #[command(flatten)]
    trunc: Truncation,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, value_parser = parse_suite)]
    suite: Suite,
    /// Upper end of the integer ranges.
    #[arg(long = "max", default_value_t = SuiteConfig::default().max_n)]
    max_n: u64,
    #[arg(long, default_value_t = SuiteConfig::default().seed)]
    seed: u64,
    /// Random coefficient sets in the GCD suite.
    #[arg(long, default_value_t = SuiteConfig::default().trials)]
    trials: usize,
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    budget: u64,
    /// JSON report path.
    #[arg(long, default_value = "verify_report.json")]
    out: PathBuf,
}

#[derive(Args)]
struct ExtremalArgs {
    /// Range of j, e.g. 1..4.
    #[arg(long, value_parser = parse_j_range)]
    j: RangeInclusive<u32>,
    #[arg(long, value_parser = parse_stat, default_value = "ez_ratio")]
    stat: StatKind,
    /// CSV path; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    trunc: Truncation,
}

#[derive(Args)]
struct GcdArgs {
    #[arg(long)]
    s: f64,
    #[arg(long, default_value_t = 1.5)]
    eta: f64,
    #[arg(long, default_value_t = 100)]
    trials: usize,
    #[arg(long, default_value_t = 10_000)]
    kmax: u64,
    #[arg(long, default_value_t = 100)]
    size: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Coefficient distribution: signs, uniform or ones.
    #[arg(long, value_parser = parse_dist, default_value = "signs")]
    dist: CoefficientDist,
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    budget: u64,
    /// JSON path; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_stat(s: &str) -> std::result::Result<StatKind, String> {
    s.parse().map_err(|e: ezsum::Error| e.to_string())
}

fn parse_suite(s: &str) -> std::result::Result<Suite, String> {
    s.parse().map_err(|e: ezsum::Error| e.to_string())
}

fn parse_dist(s: &str) -> std::result::Result<CoefficientDist, String> {
    match s {
        "signs" => Ok(CoefficientDist::Signs),
        "uniform" => Ok(CoefficientDist::Uniform),
        "ones" => Ok(CoefficientDist::Ones),
        _ => Err(format!("unknown distribution '{s}' (signs, uniform, ones)")),
    }
}

fn parse_j_range(s: &str) -> std::result::Result<RangeInclusive<u32>, String> {
    let (a, b) = s
        .split_once("..")
        .ok_or_else(|| format!("expected a..b, got '{s}'"))?;
    let b = b.strip_prefix('=').unwrap_or(b);
    let a: u32 = a.parse().map_err(|_| format!("bad range start in '{s}'"))?;
    let b: u32 = b.parse().map_err(|_| format!("bad range end in '{s}'"))?;
    if a == 0 || a > b {
        return Err(format!("need 1 <= a <= b, got '{s}'"));
    }
    Ok(a..=b)
}

/// Resolves `--n` together with a prime table big enough for it.
fn resolve_n(spec: &str) -> Result<(FactoredInteger, PrimeTable)> {
    if let Some(j) = spec.strip_prefix("nj:") {
        let j: u32 = j.parse().with_context(|| format!("bad j in '{spec}'"))?;
        let table = PrimeTable::new((j as f64).exp().ceil() as u64 + 1)?;
        return Ok((build_nj(&table, j)?, table));
    }
    if let Ok(n) = spec.parse::<u64>() {
        if n == 0 {
            bail!("n must be positive");
        }
        let table = PrimeTable::new(((n as f64).sqrt() as u64 + 2).max(100))?;
        return Ok((FactoredInteger::factorize(&table, n)?, table));
    }
    let n: FactoredInteger = spec
        .parse()
        .with_context(|| format!("cannot read n from '{spec}'"))?;
    let largest = n.primes().max().unwrap_or(2);
    let table = PrimeTable::new(largest.max(100))?;
    if n.primes().any(|p| table.is_prime(p) != Some(true)) {
        bail!("'{spec}' has a base that is not prime");
    }
    Ok((n, table))
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    let f = File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
    Ok(BufWriter::new(f))
}

fn cmd_eval(args: EvalArgs) -> Result<ExitCode> {
    let (n, _table) = resolve_n(&args.n)?;
    let mut opts = args.trunc.options()?;
    if matches!(args.stat, StatKind::Psi | StatKind::PsiRatio) && opts.truncate_cap.is_none() {
        opts.truncate_cap = Some(10_000_000);
    }
    let v = evaluate(&n, args.stat, &opts)?;
    let enclosure = !v.value.is_exact() || matches!(args.stat, StatKind::Psi | StatKind::PsiRatio);
    if args.json {
        let out = serde_json::json!({
            "n": n.to_u64(),
            "factorization": n.to_string(),
            "log_n": n.log_of(),
            "stat": args.stat,
            "value": [v.value.lower(), v.value.upper()],
            "normalizer": v.normalizer,
            "ratio": [v.ratio_lower(), v.ratio_upper()],
        });
        println!("{}", serde_json::to_string_pretty(&out)?);
        return Ok(ExitCode::SUCCESS);
    }
    println!("n           {n}");
    println!("stat        {}", args.stat);
    if enclosure {
        println!("value       [{}, {}]", v.value.lower(), v.value.upper());
    } else {
        println!("value       {}", v.value.lower());
    }
    println!("normalizer  {}", v.normalizer);
    if enclosure {
        println!("ratio       [{}, {}]", v.ratio_lower(), v.ratio_upper());
    } else {
        println!("ratio       {}", v.ratio_lower());
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_champions(args: ChampionArgs) -> Result<ExitCode> {
    let table = PrimeTable::new(args.n_max.max(2))?;
    let opts = args.trunc.options()?;
    let search = champion_search(&table, args.n_max, args.stat, &opts)?;
    let mut w = create(&args.out)?;
    write_champions_jsonl(&search.records, &mut w)
        .and_then(|_| w.flush())
        .with_context(|| format!("cannot write {}", args.out.display()))?;
    match search.records.last() {
        Some(r) => println!(
            "{} records up to {} for {}; last n={} ratio={}; {} undecided; written to {}",
            search.records.len(),
            args.n_max,
            args.stat,
            r.factorization,
            r.ratio,
            search.undecided.len(),
            args.out.display()
        ),
        None => println!(
            "no records up to {}; written to {}",
            args.n_max,
            args.out.display()
        ),
    }
    for u in &search.undecided {
        println!(
            "undecided n={} ratio in [{}, {}] vs record {}",
            u.n, u.lower, u.upper, u.incumbent
        );
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_verify(args: VerifyArgs) -> Result<ExitCode> {
    let cfg = SuiteConfig {
        max_n: args.max_n,
        seed: args.seed,
        trials: args.trials,
        budget: args.budget,
    };
    let table = PrimeTable::new(cfg.table_limit())?;
    let report = run_suite(&table, args.suite, &cfg)?;
    let mut w = create(&args.out)?;
    serde_json::to_writer_pretty(&mut w, &report)?;
    writeln!(w)?;
    w.flush()
        .with_context(|| format!("cannot write {}", args.out.display()))?;
    for c in &report.checks {
        if c.passed() {
            println!(
                "ok    {:<24} {:>10} points  worst margin {:e}",
                c.lemma_id, c.points, c.worst_margin
            );
        } else {
            println!(
                "FAIL  {:<24} {:>10} points  {} violations  worst margin {:e} at {}",
                c.lemma_id,
                c.points,
                c.violations,
                c.worst_margin,
                c.worst_point.as_deref().unwrap_or("?")
            );
        }
    }
    for o in &report.observations {
        println!("note  {:<24} {}  ({})", o.id, o.value, o.description);
    }
    println!("report written to {}", args.out.display());
    Ok(if report.passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn cmd_extremal(args: ExtremalArgs) -> Result<ExitCode> {
    let top = *args.j.end();
    let table = PrimeTable::new(((top as f64).exp().ceil() as u64 + 1).max(100))?;
    let rows = trend_report(&table, args.j, args.stat, &args.trunc.options()?)?;
    match &args.out {
        Some(path) => {
            let mut w = create(path)?;
            write_trend_csv(&rows, &mut w)
                .and_then(|_| w.flush())
                .with_context(|| format!("cannot write {}", path.display()))?;
        }
        None => write_trend_csv(&rows, io::stdout().lock())?,
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_gcdform(args: GcdArgs) -> Result<ExitCode> {
    let table = PrimeTable::new(args.kmax.max(100))?;
    let spec = GeneratorSpec::Random {
        size: args.size,
        k_max: args.kmax,
        dist: args.dist,
    };
    let report = empirical_sharpness(
        &table,
        &spec,
        args.trials,
        args.s,
        args.eta,
        args.seed,
        args.budget,
    )?;
    let text = serde_json::to_string_pretty(&report)?;
    match &args.out {
        Some(path) => {
            std::fs::write(path, format!("{text}\n"))
                .with_context(|| format!("cannot write {}", path.display()))?;
        }
        None => println!("{text}"),
    }
    Ok(ExitCode::SUCCESS)
}

fn run(cli: Cli) -> Result<ExitCode> {
    if let Some(t) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()?;
    }
    match cli.command {
        Command::Eval(a) => cmd_eval(a),
        Command::Champions(a) => cmd_champions(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Extremal(a) => cmd_extremal(a),
        Command::Gcdform(a) => cmd_gcdform(a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
