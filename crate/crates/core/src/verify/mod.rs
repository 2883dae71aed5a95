//! Numeric checks of the explicit-constant inequalities behind the upper
//! bounds for Φ₂, Ψ and their relatives.
//!
//! Every check walks a deterministic grid and folds the margins
//! `allowance − error` into a [`LemmaCheckReport`]. A point counts as a
//! violation exactly when its margin is negative, so `violations == 0` if and
//! only if `worst_margin >= 0`. Where rounding can make an exact identity or
//! an equality case look negative, the documented slack is folded into the
//! margin itself.

mod analytic;
mod chaining;
mod ranges;
mod suite;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use analytic::{
    check_e1, check_hh, check_phivar, check_phivar_quadrature, h_theta, hh_log_margin, E1Grid,
    HhGrid, HhPoint, PhivarClause, PhivarGrid,
};
pub use chaining::{
    check_e3_recurrence, check_e3a_and_e2, check_pi_monotone, default_contexts, ChainingContext,
};
pub use ranges::{
    check_closed_forms, check_convexdec, check_convexity_lemma, check_convexity_random,
    check_jordan_moebius, check_phi1_sandwich, check_phi1maj, check_phi2_min,
    check_phi2_min_corrected, check_phi_eta_conditional, check_sigma_multiplicative, check_tezm,
    phi2_growth_observation,
};
pub use suite::{run_suite, Suite, SuiteConfig, SuiteReport};

/// Outcome of one inequality checked over a grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LemmaCheckReport {
    pub lemma_id: String,
    pub grid: String,
    pub points: u64,
    pub violations: u64,
    /// Smallest margin seen; `0` for an empty grid.
    pub worst_margin: f64,
    /// Grid point attaining `worst_margin`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub worst_point: Option<String>,
}

impl LemmaCheckReport {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }

    /// Folds another report on the same inequality into this one. Ties on the
    /// worst margin keep the earlier point.
    pub fn absorb(&mut self, other: LemmaCheckReport) {
        if other.points == 0 {
            return;
        }
        if self.points == 0 || other.worst_margin < self.worst_margin {
            self.worst_margin = other.worst_margin;
            self.worst_point = other.worst_point;
        }
        self.points += other.points;
        self.violations += other.violations;
    }
}

/// An empirical quantity recorded without a pass/fail threshold.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Observation {
    pub id: String,
    pub description: String,
    pub value: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub at: Option<String>,
}

/// Accumulates margins into a [`LemmaCheckReport`].
#[derive(Debug, Clone)]
pub(crate) struct Tracker {
    id: String,
    grid: String,
    points: u64,
    violations: u64,
    worst: f64,
    worst_point: Option<String>,
}

impl Tracker {
    pub(crate) fn new(id: impl Into<String>, grid: impl Into<String>) -> Self {
        Self {
            id: id.into(),
            grid: grid.into(),
            points: 0,
            violations: 0,
            worst: f64::INFINITY,
            worst_point: None,
        }
    }

    /// Records one margin; the point label is only built when it becomes the
    /// new worst case.
    pub(crate) fn record<F: FnOnce() -> String>(&mut self, margin: f64, point: F) {
        // NaN is a failed evaluation, not a pass.
        let margin = if margin.is_nan() {
            f64::MIN
        } else if margin == 0.0 {
            0.0
        } else {
            margin
        };
        self.points += 1;
        if margin < 0.0 {
            self.violations += 1;
        }
        if margin < self.worst {
            self.worst = margin;
            self.worst_point = Some(point());
        }
    }

    pub(crate) fn merge(&mut self, other: Tracker) {
        if other.points == 0 {
            return;
        }
        if other.worst < self.worst {
            self.worst = other.worst;
            self.worst_point = other.worst_point;
        }
        self.points += other.points;
        self.violations += other.violations;
    }

    pub(crate) fn finish(self) -> LemmaCheckReport {
        LemmaCheckReport {
            lemma_id: self.id,
            grid: self.grid,
            points: self.points,
            violations: self.violations,
            worst_margin: if self.points == 0 { 0.0 } else { self.worst },
            worst_point: self.worst_point,
        }
    }
}

/// Largest number of terms [`sum_decaying_series`] will add.
const MAX_SERIES_TERMS: u32 = 100_000;

/// `Σ_{μ>=start} term(μ)` for non-negative terms whose successive ratio
/// `term(μ+1)/term(μ)` is non-increasing once the terms are positive.
///
/// Summation stops at the first `μ` with ratio at most `1/2` and
/// `2·term(μ+1) < tol`; the geometric comparison then bounds the rest by
/// `2·term(μ+1)`. Returns `(partial sum, tail bound)`.
pub(crate) fn sum_decaying_series<F: Fn(u32) -> f64>(
    term: F,
    start: u32,
    tol: f64,
) -> Result<(f64, f64)> {
    let mut acc = 0.0;
    let mut mu = start;
    let mut current = term(mu);
    while mu < start + MAX_SERIES_TERMS {
        acc += current;
        let next = term(mu + 1);
        if !(current >= 0.0 && next >= 0.0) {
            return Err(Error::Domain(format!(
                "series term at {mu} is negative or NaN"
            )));
        }
        if current > 0.0 && next <= 0.5 * current && 2.0 * next < tol {
            return Ok((acc, 2.0 * next));
        }
        mu += 1;
        current = next;
    }
    Err(Error::Domain(format!(
        "series did not reach its tail tolerance {tol} within {MAX_SERIES_TERMS} terms"
    )))
}

/// Relative slack for floating evaluations of inequalities that can be
/// tight up to rounding.
pub(crate) const REL_SLACK: f64 = 1e-12;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tracker_invariant() {
        let mut t = Tracker::new("x", "g");
        t.record(0.5, || "a".into());
        t.record(0.0, || "b".into());
        let r = t.clone().finish();
        assert_eq!((r.points, r.violations), (2, 0));
        assert_eq!(r.worst_margin, 0.0);
        assert_eq!(r.worst_point.as_deref(), Some("b"));
        t.record(-1e-3, || "c".into());
        t.record(f64::NAN, || "d".into());
        let r = t.finish();
        assert_eq!(r.violations, 2);
        assert!(r.worst_margin < 0.0);
        assert_eq!(r.worst_point.as_deref(), Some("d"));
    }

    #[test]
    fn empty_report() {
        let r = Tracker::new("x", "g").finish();
        assert!(r.passed());
        assert_eq!(r.worst_margin, 0.0);
    }

    #[test]
    fn absorb_keeps_minimum() {
        let mut a = Tracker::new("x", "g");
        a.record(1.0, || "a".into());
        let mut b = Tracker::new("x", "g");
        b.record(-2.0, || "b".into());
        let mut ra = a.finish();
        ra.absorb(b.finish());
        assert_eq!(ra.points, 2);
        assert_eq!(ra.violations, 1);
        assert_eq!(ra.worst_point.as_deref(), Some("b"));
    }

    #[test]
    fn geometric_series() {
        let (s, tail) = sum_decaying_series(|k| 0.5f64.powi(k as i32), 0, 1e-12).unwrap();
        assert!(tail < 1e-12);
        assert!((s + tail - 2.0).abs() < 1e-12 && s <= 2.0);
        // Σ k x^k = x/(1-x)^2
        let x = (-1.0f64).exp();
        let (s, tail) = sum_decaying_series(|k| k as f64 * x.powi(k as i32), 0, 1e-13).unwrap();
        let exact = x / (1.0 - x).powi(2);
        assert!(s <= exact + 1e-15 && exact <= s + tail + 1e-15);
    }

    #[test]
    fn slow_series_rejected() {
        assert!(sum_decaying_series(|k| 1.0 / (k as f64 + 1.0).powi(2), 0, 1e-12).is_err());
    }
}
