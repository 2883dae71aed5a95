//! Extremal integers and record-value searches.
//!
//! `n_j = ∏_{p<e^j} p^j` drives the growth of the normalized divisor sums;
//! [`trend_report`] tabulates their ratios without ever forming `n_j` as an
//! integer. [`champion_search`] scans a range for record ratios, and
//! [`davenport_distant_check`] looks at squarefree numbers whose prime
//! factors grow faster than the product of the previous ones.

use std::io::{self, Write};
use std::ops::RangeInclusive;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{davenport_w, evaluate, EvalOptions, StatKind};
use crate::error::{domain, range, Result};
use crate::factored::{logloglog_from_log, FactoredInteger};
use crate::primes::PrimeTable;
use crate::verify::{LemmaCheckReport, Tracker};

/// `n_j = ∏_{p<e^j} p^j`.
pub fn build_nj(table: &PrimeTable, j: u32) -> Result<FactoredInteger> {
    if j == 0 {
        return domain("n_j needs j >= 1");
    }
    let bound = (j as f64).exp();
    if bound > table.limit() as f64 {
        return range(format!(
            "n_{j} needs primes below e^{j} = {bound:.1}, beyond the table limit {}",
            table.limit()
        ));
    }
    let factors = table.primes_below(bound)?.iter().map(|&p| (p, j)).collect();
    FactoredInteger::new(factors)
}

/// Greedy squarefree sequence starting at `p_start`: each next prime is the
/// smallest table prime that is at least the product so far and larger than
/// the previous prime. Returns the primes in order.
pub fn distant_primes(table: &PrimeTable, p_start: u64, r: usize) -> Result<Vec<u64>> {
    if table.is_prime(p_start) != Some(true) {
        return domain(format!("{p_start} is not a prime inside the table"));
    }
    if r == 0 {
        return domain("a distant sequence needs r >= 1");
    }
    let mut primes = vec![p_start];
    let mut product = p_start as u128;
    while primes.len() < r {
        let last = *primes.last().expect("non-empty");
        let want = product.max(last as u128 + 1);
        let next = u64::try_from(want)
            .ok()
            .and_then(|w| table.next_prime_at_least(w))
            .ok_or_else(|| {
                crate::Error::Range(format!(
                    "table up to {} exhausted after {} primes of the sequence from {p_start}",
                    table.limit(),
                    primes.len()
                ))
            })?;
        primes.push(next);
        product *= next as u128;
    }
    Ok(primes)
}

/// The product of [`distant_primes`].
pub fn build_distant_sequence(
    table: &PrimeTable,
    p_start: u64,
    r: usize,
) -> Result<FactoredInteger> {
    let primes = distant_primes(table, p_start, r)?;
    FactoredInteger::new(primes.into_iter().map(|p| (p, 1)).collect())
}

/// One row of a trend table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrendRow {
    pub j: u32,
    pub log_n: f64,
    /// Lower end of the ratio enclosure.
    pub ratio: f64,
    /// Width of the ratio enclosure; 0 when the value is exact.
    pub width: f64,
}

/// Normalized `stat` along `n_j` for `j` in `js`. Statistics that would
/// exceed the enumeration budget fall back to truncation when `opts` allows
/// it.
pub fn trend_report(
    table: &PrimeTable,
    js: RangeInclusive<u32>,
    stat: StatKind,
    opts: &EvalOptions,
) -> Result<Vec<TrendRow>> {
    js.map(|j| {
        let n = build_nj(table, j)?;
        let v = evaluate(&n, stat, opts)?;
        Ok(TrendRow {
            j,
            log_n: n.log_of(),
            ratio: v.ratio_lower(),
            width: v.value.tail_bound / v.normalizer,
        })
    })
    .collect()
}

pub fn write_trend_csv<W: Write>(rows: &[TrendRow], mut out: W) -> io::Result<()> {
    writeln!(out, "j,log_n,ratio,width")?;
    for r in rows {
        writeln!(out, "{},{},{},{}", r.j, r.log_n, r.ratio, r.width)?;
    }
    Ok(())
}

/// A new record in a champion search.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChampionRecord {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<u64>,
    pub factorization: String,
    pub stat: StatKind,
    /// The statistic (lower end of its enclosure).
    pub value: f64,
    pub normalizer: f64,
    pub ratio: f64,
    /// Position in the record stream, from 0.
    pub index: u64,
}

/// An `n` whose ratio enclosure straddles the incumbent record, so it may or
/// may not be a true record.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Undecided {
    pub n: u64,
    pub lower: f64,
    pub upper: f64,
    pub incumbent: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ChampionSearch {
    pub records: Vec<ChampionRecord>,
    pub undecided: Vec<Undecided>,
}

/// Width of the independent ranges scanned by [`champion_search`]. Fixed, so
/// results do not depend on the thread count.
const SEARCH_CHUNK: u64 = 8192;

struct ChunkResult {
    /// `(n, value lower end, normalizer, ratio lower end)` of each chunk-local
    /// prefix maximum.
    records: Vec<(u64, f64, f64, f64)>,
    /// Enclosures whose upper end beats the chunk-local incumbent, with that
    /// incumbent.
    open: Vec<(u64, f64, f64, f64)>,
}

/// Scans `n = 2..=n_max` in increasing order and emits a record whenever the
/// (lower end of the) normalized ratio strictly exceeds every earlier one.
///
/// Ranges are evaluated in parallel; a sequential merge keeps exactly the
/// chunk records that beat the global incumbent, so the output is identical
/// to a sequential scan for any thread count.
pub fn champion_search(
    table: &PrimeTable,
    n_max: u64,
    stat: StatKind,
    opts: &EvalOptions,
) -> Result<ChampionSearch> {
    if n_max > table.limit() {
        return domain(format!(
            "n_max = {n_max} exceeds the prime table limit {}",
            table.limit()
        ));
    }
    if n_max < 2 {
        return Ok(ChampionSearch::default());
    }
    let chunks: Vec<(u64, u64)> = (0..=(n_max - 2) / SEARCH_CHUNK)
        .map(|k| {
            (
                2 + k * SEARCH_CHUNK,
                (2 + (k + 1) * SEARCH_CHUNK - 1).min(n_max),
            )
        })
        .collect();
    let parts: Vec<ChunkResult> = chunks
        .par_iter()
        .map(|&(a, b)| {
            let mut best = f64::NEG_INFINITY;
            let mut res = ChunkResult {
                records: Vec::new(),
                open: Vec::new(),
            };
            for n in a..=b {
                let f = FactoredInteger::factorize(table, n)?;
                let v = evaluate(&f, stat, opts)?;
                let (lo, hi) = (v.ratio_lower(), v.ratio_upper());
                if hi > lo && hi > best {
                    res.open.push((n, lo, hi, best));
                }
                if lo > best {
                    best = lo;
                    res.records.push((n, v.value.lower(), v.normalizer, lo));
                }
            }
            Ok(res)
        })
        .collect::<Result<_>>()?;

    let mut out = ChampionSearch::default();
    let mut incumbent = f64::NEG_INFINITY;
    for part in parts {
        let before = incumbent;
        // Undecided points need the exact incumbent at their position: the
        // larger of the global value entering the chunk and the chunk-local
        // prefix maximum.
        for &(n, lo, hi, local) in &part.open {
            let inc = before.max(local);
            if lo <= inc && inc < hi {
                out.undecided.push(Undecided {
                    n,
                    lower: lo,
                    upper: hi,
                    incumbent: inc,
                });
            }
        }
        for (n, value, normalizer, ratio) in part.records {
            if ratio > incumbent {
                incumbent = ratio;
                let f = FactoredInteger::factorize(table, n)?;
                out.records.push(ChampionRecord {
                    n: Some(n),
                    factorization: f.to_string(),
                    stat,
                    value,
                    normalizer,
                    ratio,
                    index: out.records.len() as u64,
                });
            }
        }
    }
    Ok(out)
}

/// One JSON object per line.
pub fn write_champions_jsonl<W: Write>(records: &[ChampionRecord], mut out: W) -> io::Result<()> {
    for r in records {
        serde_json::to_writer(&mut out, r)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

/// Largest start prime scanned by [`davenport_distant_check`].
pub const DISTANT_START_MAX: u64 = 97;

#[derive(Debug, Clone, PartialEq)]
pub struct DistantReport {
    /// `w(n) <= log log log n` (guarded) over every prefix of every scanned
    /// sequence.
    pub check: LemmaCheckReport,
    /// Smallest scanned start prime from which no sequence violates the
    /// inequality.
    pub min_safe_start: Option<u64>,
    /// Starts whose sequence was cut short by the prime table.
    pub truncated_starts: Vec<u64>,
}

/// Scans distant sequences from every prime start in
/// `[p_start_min, 97]`, each up to `r_max` primes (or as far as the table
/// reaches), and checks `w(n) <= guarded log log log n` on every prefix.
pub fn davenport_distant_check(
    table: &PrimeTable,
    p_start_min: u64,
    r_max: usize,
) -> Result<DistantReport> {
    if r_max == 0 {
        return domain("r_max must be at least 1");
    }
    let starts: Vec<u64> = table
        .primes()
        .iter()
        .copied()
        .filter(|&p| p >= p_start_min && p <= DISTANT_START_MAX)
        .collect();
    let mut t = Tracker::new(
        "davenport.distant",
        format!(
            "starts {p_start_min}..={DISTANT_START_MAX}, r <= {r_max}, table {}",
            table.limit()
        ),
    );
    let mut truncated = Vec::new();
    let mut violating = Vec::new();
    for &start in &starts {
        let mut r = r_max;
        let primes = loop {
            match distant_primes(table, start, r) {
                Ok(p) => break p,
                Err(crate::Error::Range(_)) if r > 1 => r -= 1,
                Err(e) => return Err(e),
            }
        };
        if primes.len() < r_max {
            truncated.push(start);
        }
        let mut bad = false;
        for k in 1..=primes.len() {
            let n = FactoredInteger::new(primes[..k].iter().map(|&p| (p, 1)).collect())?;
            let margin = logloglog_from_log(n.log_of()) - davenport_w(&n);
            bad |= margin < 0.0;
            t.record(margin, || format!("{n}"));
        }
        if bad {
            violating.push(start);
        }
    }
    let min_safe_start = match violating.last() {
        None => starts.first().copied(),
        Some(&v) => starts.iter().copied().find(|&p| p > v),
    };
    Ok(DistantReport {
        check: t.finish(),
        min_safe_start,
        truncated_starts: truncated,
    })
}
