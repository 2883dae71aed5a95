//! Real-variable inequalities: monotonicity and integral bounds for
//! `x log(A+x) e^{-αx}`, the weighted series bound in `(A, α)`, and the
//! `(θ, H, h)` inequality used for products of distant primes.

use std::f64::consts::LN_2;

use super::{sum_decaying_series, LemmaCheckReport, Tracker};
use crate::error::{domain, Result};
use crate::quad::{integrate_to_infinity, Quadrature};

/// Quadrature tolerance, relative to the bound being checked.
const QUAD_TOL: f64 = 1e-12;
/// Required agreement between a quadrature and its refinement.
const QUAD_CONSISTENCY: f64 = 1e-10;
/// Tail tolerance for infinite series.
const SERIES_TOL: f64 = 1e-12;

/// The four clauses checked by [`check_phivar`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PhivarClause {
    /// `x log(A+x) e^{-αx}` is non-increasing on `[3, ∞)` for `α >= log 2`.
    Phi1Monotone,
    /// `log(A+x) e^{-αx}` is non-increasing on `[1, ∞)` for `α >= 1`.
    Phi2Monotone,
    /// `α∫_m^∞ x log(A+x) e^{-αx} dx` against its four-term bound, `α >= log 2`.
    WeightedTail,
    /// `∫_1^∞ log(A+x) e^{-αx} dx` against its two-term bound, `α >= 1`.
    PlainTail,
}

impl PhivarClause {
    pub const ALL: [PhivarClause; 4] = [
        PhivarClause::Phi1Monotone,
        PhivarClause::Phi2Monotone,
        PhivarClause::WeightedTail,
        PhivarClause::PlainTail,
    ];

    pub fn id(self) -> &'static str {
        match self {
            PhivarClause::Phi1Monotone => "phivar.i.phi1",
            PhivarClause::Phi2Monotone => "phivar.i.phi2",
            PhivarClause::WeightedTail => "phivar.ii",
            PhivarClause::PlainTail => "phivar.iii",
        }
    }

    fn min_alpha(self) -> f64 {
        match self {
            PhivarClause::Phi1Monotone | PhivarClause::WeightedTail => LN_2,
            PhivarClause::Phi2Monotone | PhivarClause::PlainTail => 1.0,
        }
    }

    fn min_x(self) -> f64 {
        match self {
            PhivarClause::Phi1Monotone => 3.0,
            _ => 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhivarGrid {
    pub a: Vec<f64>,
    pub alpha: Vec<f64>,
    /// Sample abscissae for the monotonicity clauses.
    pub x: Vec<f64>,
    /// Lower limits for the weighted tail.
    pub m: Vec<u32>,
}

impl PhivarGrid {
    /// Deterministic default grid for one clause. Hypothesis boundaries
    /// (`A = 1`, minimal `α`, smallest `x` or `m`) are always included.
    pub fn default_for(clause: PhivarClause) -> Self {
        let a = vec![1.0, 1.5, 2.0, 3.0, 5.0, 10.0, 100.0, 1000.0];
        let alpha = match clause {
            PhivarClause::Phi1Monotone | PhivarClause::WeightedTail => {
                vec![LN_2, 0.75, 1.0, 1.25, 1.5, 2.0, 3.0, 5.0, 10.0]
            }
            _ => vec![1.0, 1.1, 1.25, 1.5, 2.0, 3.0, 5.0, 10.0],
        };
        let x0 = clause.min_x();
        let mut x: Vec<f64> = (0..=156).map(|k| x0 + 0.25 * k as f64).collect();
        x.extend([50.0, 75.0, 100.0]);
        Self {
            a,
            alpha,
            x,
            m: (1..=8).collect(),
        }
    }

    fn validate(&self, clause: PhivarClause) -> Result<()> {
        if let Some(a) = self.a.iter().find(|&&a| !(a >= 1.0 && a.is_finite())) {
            return domain(format!("{}: A = {a} violates A >= 1", clause.id()));
        }
        let lo = clause.min_alpha();
        if let Some(al) = self.alpha.iter().find(|&&al| !(al >= lo && al.is_finite())) {
            return domain(format!(
                "{}: alpha = {al} violates alpha >= {lo}",
                clause.id()
            ));
        }
        match clause {
            PhivarClause::Phi1Monotone | PhivarClause::Phi2Monotone => {
                let x0 = clause.min_x();
                if let Some(x) = self.x.iter().find(|&&x| !(x >= x0 && x.is_finite())) {
                    return domain(format!("{}: x = {x} lies outside [{x0}, inf)", clause.id()));
                }
            }
            PhivarClause::WeightedTail => {
                if self.m.contains(&0) {
                    return domain(format!("{}: m must be at least 1", clause.id()));
                }
            }
            PhivarClause::PlainTail => {}
        }
        Ok(())
    }
}

fn phi1(a: f64, alpha: f64, x: f64) -> f64 {
    x * (a + x).ln() * (-alpha * x).exp()
}

fn phi2(a: f64, alpha: f64, x: f64) -> f64 {
    (a + x).ln() * (-alpha * x).exp()
}

fn weighted_tail(a: f64, alpha: f64, m: u32, tol: f64) -> Quadrature {
    let q = integrate_to_infinity(
        |x| x * (a + x).ln() * (-alpha * x).exp(),
        m as f64,
        tol / alpha,
    );
    Quadrature {
        value: alpha * q.value,
        error_estimate: alpha * q.error_estimate,
        ..q
    }
}

fn weighted_tail_bound(a: f64, alpha: f64, m: u32) -> f64 {
    let m = m as f64;
    let e = (-alpha * m).exp();
    let l = (a + m).ln();
    e / (alpha * alpha * (a + m)) + e / alpha + l * e / alpha + m * l * e
}

fn plain_tail(a: f64, alpha: f64, tol: f64) -> Quadrature {
    integrate_to_infinity(|x| (a + x).ln() * (-alpha * x).exp(), 1.0, tol)
}

fn plain_tail_bound(a: f64, alpha: f64) -> f64 {
    let e = (-alpha).exp();
    (a + 1.0).ln() * e / alpha + e / (alpha * alpha * (a + 1.0))
}

/// Checks one clause of the `x log(A+x) e^{-αx}` lemma over `grid`.
///
/// Monotonicity clauses compare consecutive sorted samples. Integral clauses
/// compare the quadrature value plus its error estimate with the closed-form
/// bound.
pub fn check_phivar(clause: PhivarClause, grid: &PhivarGrid) -> Result<LemmaCheckReport> {
    grid.validate(clause)?;
    let desc = match clause {
        PhivarClause::Phi1Monotone | PhivarClause::Phi2Monotone => format!(
            "|A|={} |alpha|={} |x|={} consecutive pairs",
            grid.a.len(),
            grid.alpha.len(),
            grid.x.len()
        ),
        PhivarClause::WeightedTail => format!(
            "|A|={} |alpha|={} m in {:?}",
            grid.a.len(),
            grid.alpha.len(),
            grid.m
        ),
        PhivarClause::PlainTail => format!("|A|={} |alpha|={}", grid.a.len(), grid.alpha.len()),
    };
    let mut t = Tracker::new(clause.id(), desc);
    let mut xs = grid.x.clone();
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    for &a in &grid.a {
        for &alpha in &grid.alpha {
            match clause {
                PhivarClause::Phi1Monotone | PhivarClause::Phi2Monotone => {
                    let f = if clause == PhivarClause::Phi1Monotone {
                        phi1
                    } else {
                        phi2
                    };
                    for w in xs.windows(2) {
                        let (y1, y2) = (f(a, alpha, w[0]), f(a, alpha, w[1]));
                        let margin = y1 - y2 + 4.0 * f64::EPSILON * y1.abs();
                        t.record(margin, || {
                            format!("A={a} alpha={alpha} x1={} x2={}", w[0], w[1])
                        });
                    }
                }
                PhivarClause::WeightedTail => {
                    for &m in &grid.m {
                        let bound = weighted_tail_bound(a, alpha, m);
                        let q = weighted_tail(a, alpha, m, QUAD_TOL * bound);
                        let margin = bound - (q.value + q.error_estimate);
                        t.record(margin, || format!("A={a} alpha={alpha} m={m}"));
                    }
                }
                PhivarClause::PlainTail => {
                    let bound = plain_tail_bound(a, alpha);
                    let q = plain_tail(a, alpha, QUAD_TOL * bound);
                    let margin = bound - (q.value + q.error_estimate);
                    t.record(margin, || format!("A={a} alpha={alpha}"));
                }
            }
        }
    }
    Ok(t.finish())
}

/// Self-consistency of the integrals used by [`check_phivar`]: each one is
/// recomputed with a 100× tighter tolerance, and the margin is
/// `1e-10 − max(|difference|, refined error estimate)`.
pub fn check_phivar_quadrature(
    weighted: &PhivarGrid,
    plain: &PhivarGrid,
) -> Result<LemmaCheckReport> {
    weighted.validate(PhivarClause::WeightedTail)?;
    plain.validate(PhivarClause::PlainTail)?;
    let mut t = Tracker::new(
        "phivar.quadrature",
        format!(
            "tol {QUAD_TOL:e} vs {:e}, limit {QUAD_CONSISTENCY:e}",
            QUAD_TOL / 100.0
        ),
    );
    for &a in &weighted.a {
        for &alpha in &weighted.alpha {
            for &m in &weighted.m {
                let q1 = weighted_tail(a, alpha, m, QUAD_TOL);
                let q2 = weighted_tail(a, alpha, m, QUAD_TOL / 100.0);
                let dev = (q1.value - q2.value).abs().max(q2.error_estimate);
                t.record(QUAD_CONSISTENCY - dev, || {
                    format!("weighted A={a} alpha={alpha} m={m}")
                });
            }
        }
    }
    for &a in &plain.a {
        for &alpha in &plain.alpha {
            let q1 = plain_tail(a, alpha, QUAD_TOL);
            let q2 = plain_tail(a, alpha, QUAD_TOL / 100.0);
            let dev = (q1.value - q2.value).abs().max(q2.error_estimate);
            t.record(QUAD_CONSISTENCY - dev, || {
                format!("plain A={a} alpha={alpha}")
            });
        }
    }
    Ok(t.finish())
}

#[derive(Debug, Clone, PartialEq)]
pub struct E1Grid {
    pub a: Vec<f64>,
    pub alpha: Vec<f64>,
}

impl Default for E1Grid {
    fn default() -> Self {
        Self {
            a: vec![1.0, 1.5, 2.0, 3.0, 5.0, 10.0, 100.0, 1000.0],
            alpha: vec![
                1.0,
                1.1,
                1.25,
                3f64.ln(),
                1.5,
                2.0,
                5f64.ln(),
                3.0,
                5.0,
                10.0,
                20.0,
            ],
        }
    }
}

/// Third term of the bound; the first two are the `μ = 1, 2` terms of the
/// series itself.
fn e1_bound_rest(a: f64, alpha: f64) -> f64 {
    let l3 = (a + 3.0).ln();
    (3.0 * alpha * l3 + 3.0 * l3 + l3 / alpha + 1.0 / alpha + 1.0 / (alpha * alpha * (a + 3.0)))
        * (-3.0 * alpha).exp()
}

/// `Σ_{μ>=0} αμ log(A+μ) e^{-αμ}` against its explicit three-term bound, for
/// `A >= 1`, `α >= 1`. The `μ <= 2` terms appear verbatim on both sides and
/// cancel, so the margin compares `Σ_{μ>=3}` with the last term of the bound.
/// That sum runs until its tail is below `1e-12` relative to the bound, and
/// the tail bound is charged to the left side.
pub fn check_e1(grid: &E1Grid) -> Result<LemmaCheckReport> {
    if let Some(a) = grid.a.iter().find(|&&a| !(a >= 1.0 && a.is_finite())) {
        return domain(format!("E1: A = {a} violates A >= 1"));
    }
    if let Some(al) = grid
        .alpha
        .iter()
        .find(|&&al| !(al >= 1.0 && al.is_finite()))
    {
        return domain(format!("E1: alpha = {al} violates alpha >= 1"));
    }
    let mut t = Tracker::new(
        "E1",
        format!(
            "|A|={} |alpha|={} rel tail<{SERIES_TOL:e}",
            grid.a.len(),
            grid.alpha.len()
        ),
    );
    for &a in &grid.a {
        for &alpha in &grid.alpha {
            let rest = e1_bound_rest(a, alpha);
            let (sum, tail) = sum_decaying_series(
                |mu| {
                    let m = mu as f64;
                    alpha * m * (a + m).ln() * (-alpha * m).exp()
                },
                3,
                SERIES_TOL * rest,
            )?;
            t.record(rest - (sum + tail), || format!("A={a} alpha={alpha}"));
        }
    }
    Ok(t.finish())
}

/// Smallest admissible `H` for a given `θ`: `e^{θ/((1−θ) log 2)}`.
fn hh_min_big_h(theta: f64) -> f64 {
    (theta / ((1.0 - theta) * LN_2)).exp()
}

/// Largest `h` scanned by [`h_theta`].
const H_THETA_SCAN: u64 = 2_000;

/// Smallest integer `h₀ >= 1` such that `h log h <= θ (log 2) e^h` holds for
/// every integer `h` in `[h₀, 2000]`. Past the scan the right side wins by
/// hundreds of orders of magnitude.
pub fn h_theta(theta: f64) -> Result<u64> {
    if !(theta > 0.0 && theta < 1.0) {
        return domain(format!("theta = {theta} must lie in (0, 1)"));
    }
    let log_c = (theta * LN_2).ln();
    let mut last_fail = 0;
    for h in 2..=H_THETA_SCAN {
        let hf = h as f64;
        // log(h log h) <= log(θ log 2) + h
        if hf.ln() + hf.ln().ln() > log_c + hf {
            last_fail = h;
        }
    }
    Ok(last_fail + 1)
}

/// `log h` subtracted from `log(e^h log(log(H+h)/log H))`: non-negative
/// exactly when `h <= e^h log(log(H+h)/log H)`. Computed in log space so
/// large `h` cannot overflow.
pub fn hh_log_margin(big_h: f64, h: f64) -> Result<f64> {
    if !(big_h > 1.0 && h > 0.0 && big_h.is_finite() && h.is_finite()) {
        return domain(format!("need H > 1 and h > 0, got H={big_h}, h={h}"));
    }
    let inner = (h / big_h).ln_1p() / big_h.ln();
    Ok(h + inner.ln_1p().ln() - h.ln())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HhPoint {
    pub theta: f64,
    pub big_h: f64,
    pub h: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HhGrid {
    pub points: Vec<HhPoint>,
}

impl Default for HhGrid {
    fn default() -> Self {
        let mut points = Vec::new();
        for theta in [0.1, 0.25, 0.5, 0.75, 0.9] {
            let h_lo = hh_min_big_h(theta);
            let h0 = (h_theta(theta).expect("theta in range") as f64).max(h_lo.ceil());
            for h in [
                h0,
                h0 + 1.0,
                h0 + 2.0,
                h0 + 5.0,
                2.0 * h0,
                10.0 * h0,
                100.0 * h0,
            ] {
                let mut hs = vec![h_lo, (h_lo * h).sqrt(), h];
                if h - 1.0 >= h_lo {
                    hs.push(h - 1.0);
                }
                for big_h in hs {
                    points.push(HhPoint { theta, big_h, h });
                }
            }
        }
        Self { points }
    }
}

/// `h <= e^h log(log(H+h)/log H)` for `e^{θ/((1−θ) log 2)} <= H <= h` and
/// `h >= h_θ`. Margins are reported in log space (see [`hh_log_margin`]).
pub fn check_hh(grid: &HhGrid) -> Result<LemmaCheckReport> {
    let mut t = Tracker::new(
        "hH",
        format!(
            "{} points (theta, H, h), log-space margin",
            grid.points.len()
        ),
    );
    for p in &grid.points {
        let h_min = h_theta(p.theta)? as f64;
        let big_h_min = hh_min_big_h(p.theta);
        if p.big_h < big_h_min * (1.0 - 1e-15) || p.big_h > p.h || p.h < h_min {
            return domain(format!(
                "hH point theta={} H={} h={} violates H >= {big_h_min:.6}, H <= h, h >= {h_min}",
                p.theta, p.big_h, p.h
            ));
        }
        let margin = hh_log_margin(p.big_h, p.h)?;
        t.record(margin, || {
            format!("theta={} H={} h={}", p.theta, p.big_h, p.h)
        });
    }
    Ok(t.finish())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::integrate;

    #[test]
    fn plain_tail_example() {
        // A = 1, α = 1: ∫_1^∞ log(1+x) e^{-x} dx against (log 2)/e + 1/(2e).
        let q = plain_tail(1.0, 1.0, 1e-13);
        // Independent route: finite interval plus a crude exponential tail.
        let finite = integrate(|x| (1.0 + x).ln() * (-x).exp(), 1.0, 60.0, 1e-13).value;
        assert!((q.value - finite).abs() < 1e-10);
        let e = (-1f64).exp();
        assert!(q.value <= LN_2 * e + e / 2.0);
    }

    #[test]
    fn phi1_example() {
        assert!(phi1(1.0, LN_2, 4.0) <= phi1(1.0, LN_2, 3.0));
    }

    #[test]
    fn weighted_tail_example() {
        let q = weighted_tail(1.0, 2.0, 3, 1e-13);
        let finite =
            2.0 * integrate(|x| x * (1.0 + x).ln() * (-2.0 * x).exp(), 3.0, 40.0, 1e-14).value;
        assert!((q.value - finite).abs() < 1e-10);
        assert!(q.value <= weighted_tail_bound(1.0, 2.0, 3));
    }

    #[test]
    fn default_phivar_grids_pass() {
        for clause in PhivarClause::ALL {
            let r = check_phivar(clause, &PhivarGrid::default_for(clause)).unwrap();
            assert!(r.passed(), "{r:?}");
            assert!(r.points > 0);
        }
        let q = check_phivar_quadrature(
            &PhivarGrid::default_for(PhivarClause::WeightedTail),
            &PhivarGrid::default_for(PhivarClause::PlainTail),
        )
        .unwrap();
        assert!(q.passed(), "{q:?}");
    }

    #[test]
    fn phivar_hypotheses_enforced() {
        let mut g = PhivarGrid::default_for(PhivarClause::PlainTail);
        g.alpha.push(0.9);
        assert!(check_phivar(PhivarClause::PlainTail, &g).is_err());
        let mut g = PhivarGrid::default_for(PhivarClause::Phi1Monotone);
        g.x.push(2.5);
        assert!(check_phivar(PhivarClause::Phi1Monotone, &g).is_err());
        let mut g = PhivarGrid::default_for(PhivarClause::WeightedTail);
        g.a.push(0.5);
        assert!(check_phivar(PhivarClause::WeightedTail, &g).is_err());
    }

    #[test]
    fn e1_examples() {
        for (a, alpha) in [(1.0, 1.0), (5.0, 2.0), (1.0, 10.0)] {
            let r = check_e1(&E1Grid {
                a: vec![a],
                alpha: vec![alpha],
            })
            .unwrap();
            assert!(r.passed(), "{r:?}");
        }
        // Partial sums up to 60 terms agree with the convergent sum.
        let direct: f64 = (0..=60)
            .map(|m| m as f64 * (1.0 + m as f64).ln() * (-(m as f64)).exp())
            .sum();
        let (s, tail) = sum_decaying_series(
            |mu| mu as f64 * (1.0 + mu as f64).ln() * (-(mu as f64)).exp(),
            0,
            1e-12,
        )
        .unwrap();
        assert!((direct - s).abs() <= tail + 1e-12);
        let r = check_e1(&E1Grid::default()).unwrap();
        assert!(r.passed(), "{r:?}");
        assert!(check_e1(&E1Grid {
            a: vec![1.0],
            alpha: vec![0.9]
        })
        .is_err());
    }

    #[test]
    fn h_theta_scan() {
        // θ = 0.1: h log h exceeds 0.1 log 2 e^h at h = 2, 3, 4 and never after.
        assert_eq!(h_theta(0.1).unwrap(), 5);
        assert_eq!(h_theta(0.5).unwrap(), 1);
        assert!(h_theta(1.0).is_err());
    }

    #[test]
    fn hh_examples() {
        // θ = 1/2, H = h = 6.
        let p = HhPoint {
            theta: 0.5,
            big_h: 6.0,
            h: 6.0,
        };
        assert!(check_hh(&HhGrid { points: vec![p] }).unwrap().passed());
        // H = 4 lies below e^{1/log 2} ≈ 4.23, so the point is outside the
        // hypotheses for θ = 1/2 even though the inequality itself holds.
        let p = HhPoint {
            theta: 0.5,
            big_h: 4.0,
            h: 10.0,
        };
        assert!(check_hh(&HhGrid { points: vec![p] }).is_err());
        assert!(hh_log_margin(4.0, 10.0).unwrap() > 0.0);
        // Direct evaluation agrees with the log-space margin.
        let (bh, h) = (6.0f64, 6.0f64);
        let direct = h.exp() * ((bh + h).ln() / bh.ln()).ln() - h;
        assert!(direct > 0.0 && hh_log_margin(bh, h).unwrap() > 0.0);
        // Boundary H = h is the tightest point for fixed h.
        let at_h = hh_log_margin(30.0, 30.0).unwrap();
        assert!(at_h < hh_log_margin(10.0, 30.0).unwrap());
        let r = check_hh(&HhGrid::default()).unwrap();
        assert!(r.passed(), "{r:?}");
    }
}
