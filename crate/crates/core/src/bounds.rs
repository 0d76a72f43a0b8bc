//! Tail bounds for the Gaussian trace estimator: the classical exponential
//! bounds, the exact tails of the worst-case laws, sample-size planning and
//! side-by-side comparison tables.
//!
//! Bounds above 1 are returned as computed; callers decide how to display
//! them (see [`CompareRow::vacuous`]).

use crate::error::{invalid, Error, Result};
use crate::extremal::{
    abs_estimator_regions, extremal_abs_law, extremal_rel_law, rel_estimator_regions, AbsFamily, Family,
    RelFamily,
};
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;

fn check(m: usize, eps: f64) -> Result<()> {
    if m == 0 {
        return Err(invalid("number of probe vectors must be at least 1"));
    }
    if !(eps > 0.0) || eps.is_nan() {
        return Err(invalid(format!("epsilon must be positive, got {eps}")));
    }
    Ok(())
}

/// `2 exp(-m eps^2 / (4 phi^2 + 4 eps lam2))`, bounding
/// `Pr(|tr_m(A) - tr(A)| >= eps)` for symmetric `A` with 2-norm `lam2` and
/// Frobenius norm `phi`.
pub fn ck_abs_bound(lam2: f64, phi: f64, m: usize, eps: f64) -> Result<f64> {
    check(m, eps)?;
    Ok(2.0 * (-(m as f64) * eps * eps / (4.0 * phi * phi + 4.0 * eps * lam2)).exp())
}

/// `2 exp(-m eps^2 mu / (4 (1 + eps)))`, bounding
/// `Pr(|tr_m(A) - tr(A)| >= eps tr(A))` for SPSD `A` with effective rank `mu`.
pub fn ck_rel_bound(mu: f64, m: usize, eps: f64) -> Result<f64> {
    check(m, eps)?;
    Ok(2.0 * (-(m as f64) * eps * eps * mu / (4.0 * (1.0 + eps))).exp())
}

/// `Pr(|X - 1| >= eps)` for `X ~ Gamma(m mu/2, m mu/2)`.
pub fn extremal_rel_tail(mu: f64, m: usize, eps: f64) -> Result<f64> {
    check(m, eps)?;
    let g = extremal_rel_law(&RelFamily::new(mu)?, m)?;
    let lower = if eps >= 1.0 { 0.0 } else { g.cdf(1.0 - eps) };
    Ok(lower + g.sf(1.0 + eps))
}

/// `2 Pr(X - E[X] >= eps)` for `X ~ Gamma(m rho/2, m/(2 lam))`.
pub fn extremal_abs_tail(f: &AbsFamily, m: usize, eps: f64) -> Result<f64> {
    check(m, eps)?;
    let (_, g) = extremal_abs_law(f, m, 1)?;
    Ok(2.0 * g.sf(g.mean() + eps))
}

/// Whether the exact worst-case tail at a given `eps` is backed by a theorem.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RegionStatus {
    /// Both tails lie in the proved dominance region.
    Proved,
    /// Only the conjectured region covers `eps`.
    Conjectured,
    /// Not even the conjectured region covers `eps`.
    Unsupported,
}

impl RegionStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            RegionStatus::Proved => "proved",
            RegionStatus::Conjectured => "conjectured",
            RegionStatus::Unsupported => "unsupported",
        }
    }
}

/// A single `(m, eps)` evaluation point for one family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundQuery {
    pub m: usize,
    pub epsilon: f64,
    pub family: Family,
}

impl BoundQuery {
    pub fn new(m: usize, epsilon: f64, family: Family) -> Result<Self> {
        check(m, epsilon)?;
        Ok(BoundQuery { m, epsilon, family })
    }

    pub fn ck_bound(&self) -> Result<f64> {
        match &self.family {
            Family::Relative(f) => ck_rel_bound(f.mu(), self.m, self.epsilon),
            Family::Absolute(f) => ck_abs_bound(f.lam(), f.phi(), self.m, self.epsilon),
        }
    }

    pub fn exact_tail(&self) -> Result<f64> {
        match &self.family {
            Family::Relative(f) => extremal_rel_tail(f.mu(), self.m, self.epsilon),
            Family::Absolute(f) => extremal_abs_tail(f, self.m, self.epsilon),
        }
    }

    /// Region status of `eps` for the worst-case law at this `m`. The
    /// absolute family has no proved edge (its dominance threshold is known
    /// to exist but not its value), so it is never `Proved`.
    pub fn region_status(&self) -> Result<RegionStatus> {
        let eps = self.epsilon;
        let status = match &self.family {
            Family::Relative(f) => {
                let r = rel_estimator_regions(f, self.m)?;
                let covers = |reg: &crate::extremal::TailRegion| {
                    reg.contains(1.0 + eps) && (eps >= 1.0 || reg.contains(1.0 - eps))
                };
                if covers(&r.proved) {
                    RegionStatus::Proved
                } else if covers(&r.conjectured) {
                    RegionStatus::Conjectured
                } else {
                    RegionStatus::Unsupported
                }
            }
            Family::Absolute(f) => {
                if abs_estimator_regions(f, self.m)?.conjectured.contains(eps) {
                    RegionStatus::Conjectured
                } else {
                    RegionStatus::Unsupported
                }
            }
        };
        Ok(status)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Ck,
    Extremal,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleSize {
    pub m: usize,
    pub method: Method,
    pub bound_at_m: f64,
    pub region_status: RegionStatus,
    /// Caveat attached to extremal answers.
    pub note: Option<String>,
}

const MAX_M: usize = 1 << 40;

/// Smallest `m` whose bound (CK) or exact worst-case tail (extremal) at
/// `epsilon` is at most `delta`.
///
/// The CK bound is inverted in closed form and then nudged so that
/// `bound(m) <= delta < bound(m - 1)` holds in floating point. The extremal
/// tail is inverted by doubling and integer bisection. Extremal answers are
/// refused with [`Error::RegionRefusal`] when `epsilon` lies outside the
/// proved region at the returned `m`, unless `force` is set.
pub fn sample_size(family: &Family, epsilon: f64, delta: f64, method: Method, force: bool) -> Result<SampleSize> {
    check(1, epsilon)?;
    if !(delta > 0.0 && delta < 1.0) {
        return Err(invalid(format!("delta must lie in (0, 1), got {delta}")));
    }
    let bound = |m: usize| -> Result<f64> {
        let q = BoundQuery::new(m, epsilon, *family)?;
        match method {
            Method::Ck => q.ck_bound(),
            Method::Extremal => q.exact_tail(),
        }
    };
    let m = match method {
        Method::Ck => {
            let ln = (2.0 / delta).ln();
            let guess = match family {
                Family::Relative(f) => 4.0 * (1.0 + epsilon) * ln / (epsilon * epsilon * f.mu()),
                Family::Absolute(f) => {
                    4.0 * (f.phi() * f.phi() + epsilon * f.lam()) * ln / (epsilon * epsilon)
                }
            };
            let mut m = (guess.ceil() as usize).clamp(1, MAX_M);
            while m > 1 && bound(m - 1)? <= delta {
                m -= 1;
            }
            while bound(m)? > delta {
                m += 1;
            }
            m
        }
        Method::Extremal => {
            let mut hi = 1usize;
            while bound(hi)? > delta {
                if hi >= MAX_M {
                    return Err(Error::Numerical(format!("no m up to {MAX_M} reaches delta = {delta}")));
                }
                hi *= 2;
            }
            let mut lo = hi / 2;
            // Invariant: bound(hi) <= delta and (lo == 0 or bound(lo) > delta).
            while hi - lo > 1 {
                let mid = lo + (hi - lo) / 2;
                if bound(mid)? <= delta {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            hi
        }
    };
    let query = BoundQuery::new(m, epsilon, *family)?;
    let region_status = query.region_status()?;
    let note = match method {
        Method::Ck => None,
        Method::Extremal => {
            if region_status != RegionStatus::Proved && !force {
                return Err(Error::RegionRefusal(format!(
                    "epsilon = {epsilon} at m = {m} is outside the proved tail region ({}); \
                     the worst-case law is not known to be extremal there",
                    region_status.as_str()
                )));
            }
            Some(format!("valid in the proved tail region only; status at m = {m}: {}", region_status.as_str()))
        }
    };
    Ok(SampleSize { m, method, bound_at_m: bound(m)?, region_status, note })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CompareRow {
    pub epsilon: f64,
    pub ck_bound: f64,
    pub exact_tail: f64,
    /// `ck_bound / exact_tail`; infinite when the exact tail underflows.
    pub ratio: f64,
    pub region_status: RegionStatus,
}

impl CompareRow {
    pub fn vacuous(&self) -> bool {
        self.ck_bound >= 1.0
    }
}

/// Grid size used by reports when none is given.
pub const DEFAULT_GRID_POINTS: usize = 40;

/// `points` log-spaced values from `1e-3` to six standard deviations of the
/// worst-case estimator error.
pub fn default_epsilon_grid(family: &Family, m: usize, points: usize) -> Result<Vec<f64>> {
    check(m, 1.0)?;
    let sd = match family {
        Family::Relative(f) => (2.0 / (m as f64 * f.mu())).sqrt(),
        Family::Absolute(f) => f.phi() * (2.0 / m as f64).sqrt(),
    };
    let (lo, hi) = (1e-3f64, (6.0 * sd).max(2e-3));
    Ok(log_grid(lo, hi, points))
}

pub(crate) fn log_grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let (a, b) = (lo.ln(), hi.ln());
            (0..points)
                .map(|i| {
                    if i == 0 {
                        lo
                    } else if i + 1 == points {
                        hi
                    } else {
                        (a + (b - a) * i as f64 / (points - 1) as f64).exp()
                    }
                })
                .collect()
        }
    }
}

/// One row per `eps` in `grid`, in grid order.
pub fn compare_report(family: &Family, m: usize, grid: &[f64]) -> Result<Vec<CompareRow>> {
    grid.iter()
        .map(|&epsilon| {
            let q = BoundQuery::new(m, epsilon, *family)?;
            let (ck_bound, exact_tail) = (q.ck_bound()?, q.exact_tail()?);
            Ok(CompareRow {
                epsilon,
                ck_bound,
                exact_tail,
                ratio: ck_bound / exact_tail,
                region_status: q.region_status()?,
            })
        })
        .collect()
}

pub const CSV_HEADER: &str = "epsilon,ck_bound,exact_tail,ratio,region_status";

/// CSV with header [`CSV_HEADER`]; floats in shortest round-trip form.
pub fn rows_to_csv(rows: &[CompareRow]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(
            out,
            "{:?},{:?},{:?},{:?},{}",
            r.epsilon,
            r.ck_bound,
            r.exact_tail,
            r.ratio,
            r.region_status.as_str()
        );
    }
    out
}
