//! Numerical checks of the dominance theorems on concrete interpolation
//! paths.
//!
//! A path joins two weight vectors `mu` and `lam` that differ in two
//! coordinates `j` (whose weight or square grows) and `k`. Along the path
//! `Y(t) = sum_i nu_i(t) X_i` with `X_i ~ Gamma(alpha, beta)`; the proofs
//! differentiate `F_{Y(t)}(x)` in `t` and express the derivative through the
//! density of `Y(t) + nu_j psi + nu_k psi'` with independent
//! `psi, psi' ~ Gamma(1, beta)`. The relative kind interpolates weights
//! linearly, the absolute kind interpolates squares and works with the
//! centered variable `Y(t) - (alpha/beta) sum_i nu_i(t)`.
//!
//! Everything here checks finitely many points: a passing report is evidence,
//! not a proof.

use crate::bounds::RegionStatus;
use crate::error::{invalid, precondition, Error, Result};
use crate::extremal::{
    abs_floor_witness, abs_min_dim, abs_tail_region, random_abs_member, random_rel_member, rel_floor_witnesses,
    rel_tail_region, AbsFamily, RelFamily,
};
use crate::gamma_mix::{GammaMix, GeneralGammaSum};
use crate::majorization::{classical_step, frobenius_step, MajorizationChain, OrderKind};
use crate::rng::CounterRng;
use rand::Rng;
use serde::{Deserialize, Serialize};

/// Slack allowed in every dominance and monotonicity verdict.
pub const SLACK: f64 = 1e-9;

/// Default number of Chebyshev points in `t`.
pub const DEFAULT_T_POINTS: usize = 33;

/// Default number of `x` points per tail.
pub const DEFAULT_X_POINTS: usize = 64;

/// Default inflection scan resolution, in grid cells per standard deviation.
pub const DEFAULT_CELLS_PER_SD: f64 = 50.0;

/// Half-width of the inflection scan window, in standard deviations.
const SCAN_SDS: f64 = 12.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PathKind {
    Relative,
    Absolute,
}

impl PathKind {
    fn order(self) -> OrderKind {
        match self {
            PathKind::Relative => OrderKind::Classical,
            PathKind::Absolute => OrderKind::Frobenius,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

impl Verdict {
    fn from_margin(worst: f64) -> Self {
        if worst >= -SLACK {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }
}

/// `t_i = (1 - cos(pi i / (n - 1))) / 2`, with exact endpoints 0 and 1.
pub fn chebyshev_grid(n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![0.0],
        _ => (0..n)
            .map(|i| {
                if i == 0 {
                    0.0
                } else if i == n - 1 {
                    1.0
                } else {
                    0.5 * (1.0 - (std::f64::consts::PI * i as f64 / (n - 1) as f64).cos())
                }
            })
            .collect(),
    }
}

/// Interpolation between two positional weight vectors differing at `j`
/// and `k`.
///
/// Vectors are kept in coordinate order, not sorted, because the step
/// coordinates are positions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DominancePath {
    mu: Vec<f64>,
    lam: Vec<f64>,
    j: usize,
    k: usize,
    kind: PathKind,
    t_grid: Vec<f64>,
    shape: f64,
    rate: f64,
}

impl DominancePath {
    /// Validates a path. Identical endpoints are accepted (a constant path);
    /// otherwise the step must have the ordering pattern of `kind`.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        mu: Vec<f64>,
        lam: Vec<f64>,
        j: usize,
        k: usize,
        kind: PathKind,
        t_grid: Vec<f64>,
        shape: f64,
        rate: f64,
    ) -> Result<Self> {
        let n = mu.len().max(lam.len());
        let (mut mu, mut lam) = (mu, lam);
        mu.resize(n, 0.0);
        lam.resize(n, 0.0);
        if mu.iter().chain(&lam).any(|v| !v.is_finite()) {
            return Err(invalid("path weights must be finite"));
        }
        if j == k || j >= n || k >= n {
            return Err(invalid(format!("need distinct indices below {n}, got j = {j}, k = {k}")));
        }
        if (0..n).any(|i| i != j && i != k && mu[i] != lam[i]) {
            return Err(invalid("endpoints may differ only at j and k"));
        }
        crate::gamma_core::GammaParams::new(shape, rate)?;
        if t_grid.len() < 2
            || t_grid[0] != 0.0
            || *t_grid.last().expect("non-empty") != 1.0
            || t_grid.windows(2).any(|w| !(w[0] < w[1]))
        {
            return Err(invalid("t grid must increase strictly from 0 to 1"));
        }
        if mu != lam {
            let (mj, mk, lj, lk) = (mu[j], mu[k], lam[j], lam[k]);
            let ok = match kind {
                PathKind::Relative => 0.0 <= lk && lk < mk && mk <= mj && mj < lj,
                PathKind::Absolute => {
                    let gain = lj * lj - mj * mj;
                    let loss = mk * mk - lk * lk;
                    let scale = lj * lj + mk * mk;
                    gain > 0.0
                        && (gain - loss).abs() <= 1e-12 * scale
                        && frobenius_step(&mu, &lam).is_some_and(|(_, p)| p.j == j && p.k == k)
                }
            };
            if !ok {
                return Err(precondition(format!(
                    "step at (j, k) = ({j}, {k}) does not have the {kind:?} ordering pattern"
                )));
            }
        }
        Ok(DominancePath { mu, lam, j, k, kind, t_grid, shape, rate })
    }

    /// Path for one chain step `prev -> next` (`prev` plays `mu`), with the
    /// default Chebyshev `t` grid.
    pub fn from_step(prev: &[f64], next: &[f64], kind: PathKind, shape: f64, rate: f64) -> Result<Self> {
        Self::from_step_with_grid(prev, next, kind, shape, rate, chebyshev_grid(DEFAULT_T_POINTS))
    }

    pub fn from_step_with_grid(
        prev: &[f64],
        next: &[f64],
        kind: PathKind,
        shape: f64,
        rate: f64,
        t_grid: Vec<f64>,
    ) -> Result<Self> {
        if prev.len() != next.len() || prev.len() < 2 {
            return Err(invalid("step vectors must have equal length of at least 2"));
        }
        let (j, k) = if prev == next {
            (0, 1)
        } else {
            let pair = match kind {
                PathKind::Relative => classical_step(prev, next),
                PathKind::Absolute => frobenius_step(prev, next).map(|(_, p)| p),
            };
            let p = pair.ok_or_else(|| precondition(format!("not a {kind:?} chain step")))?;
            (p.j, p.k)
        };
        Self::new(prev.to_vec(), next.to_vec(), j, k, kind, t_grid, shape, rate)
    }

    pub fn mu(&self) -> &[f64] {
        &self.mu
    }

    pub fn lam(&self) -> &[f64] {
        &self.lam
    }

    pub fn indices(&self) -> (usize, usize) {
        (self.j, self.k)
    }

    pub fn kind(&self) -> PathKind {
        self.kind
    }

    pub fn t_grid(&self) -> &[f64] {
        &self.t_grid
    }

    pub fn shape(&self) -> f64 {
        self.shape
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }

    pub fn is_constant(&self) -> bool {
        self.mu == self.lam
    }

    /// Law of `sum_i w_i X_i` for one endpoint or interpolated vector.
    fn mix(&self, w: &[f64]) -> Result<GammaMix> {
        GammaMix::new(w.to_vec(), self.shape, self.rate)
    }

    /// Amount subtracted to center the absolute kind, `(alpha/beta) sum w_i`;
    /// zero for the relative kind.
    fn offset(&self, w: &[f64]) -> f64 {
        match self.kind {
            PathKind::Relative => 0.0,
            PathKind::Absolute => self.shape / self.rate * w.iter().sum::<f64>(),
        }
    }
}

/// `nu(t)`: `t lam + (1 - t) mu` (relative) or
/// `sgn(lam_i + mu_i) sqrt(t lam_i^2 + (1 - t) mu_i^2)` (absolute).
/// Returns the endpoints themselves at `t = 0` and `t = 1`.
pub fn interpolate(path: &DominancePath, t: f64) -> Result<Vec<f64>> {
    if !(0.0..=1.0).contains(&t) {
        return Err(invalid(format!("t must lie in [0, 1], got {t}")));
    }
    if t == 0.0 {
        return Ok(path.mu.clone());
    }
    if t == 1.0 {
        return Ok(path.lam.clone());
    }
    let mut v = path.mu.clone();
    for i in [path.j, path.k] {
        let (m, l) = (path.mu[i], path.lam[i]);
        if m == l {
            continue;
        }
        v[i] = match path.kind {
            PathKind::Relative => t * l + (1.0 - t) * m,
            PathKind::Absolute => {
                let r = (t * l * l + (1.0 - t) * m * m).sqrt();
                if l + m < 0.0 {
                    -r
                } else {
                    r
                }
            }
        };
    }
    Ok(v)
}

/// `Y(t) + nu_j(t) psi + nu_k(t) psi'`, uncentered.
pub fn perturbed_sum(path: &DominancePath, t: f64) -> Result<GeneralGammaSum> {
    let nu = interpolate(path, t)?;
    let (a, b) = (nu[path.j], nu[path.k]);
    if a == 0.0 && b == 0.0 {
        return Err(Error::Degenerate);
    }
    let mut g = path.mix(&nu)?.to_general();
    for w in [a, b] {
        if w != 0.0 {
            g = g.with_term(w, 1.0, path.rate)?;
        }
    }
    Ok(g)
}

/// Density (or derivative) of the perturbed variable at `x`; for the
/// absolute kind `x` is measured from `(alpha/beta) sum_i nu_i(t)`.
pub fn perturbed_density(path: &DominancePath, t: f64, x: f64, order: u8) -> Result<f64> {
    let g = perturbed_sum(path, t)?;
    let shift = path.offset(&interpolate(path, t)?);
    g.pdf(x + shift, order)
}

/// The mode of a Gamma sum, by bisection on the sign of the density slope.
///
/// Relies on unimodality: the slope is positive left of the mode and
/// negative right of it, so no bracket evaluation is needed.
pub fn mode_of(q: &GeneralGammaSum) -> Result<f64> {
    if q.is_degenerate() {
        return Err(Error::Degenerate);
    }
    let (mean, sd) = (q.mean(), q.variance().sqrt());
    let has_pos = q.terms().iter().any(|t| t.weight > 0.0);
    let has_neg = q.terms().iter().any(|t| t.weight < 0.0);
    let mut lo = if has_neg { mean - 40.0 * sd } else { 0.0 };
    let mut hi = if has_pos { mean + 40.0 * sd } else { 0.0 };
    let mut scan = q.density_scanner(1)?;
    while hi - lo > 1e-11 * (lo.abs() + hi.abs() + sd) {
        let mut mid = 0.5 * (lo + hi);
        if mid == 0.0 {
            mid = 1e-13 * sd;
        }
        if scan.eval(mid)? > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Outermost sign changes of the density curvature of `q`, reported
/// relative to `offset`.
///
/// The curvature is sampled on a grid of `sd / cells_per_sd` from
/// `mean +- 12 sd` inward, stopping at the first sign change on each side,
/// and the bracket is bisected. Points where the curvature is zero (outside
/// the support) or undefined (the origin for small shapes) carry no sign.
pub fn outer_inflections(q: &GeneralGammaSum, offset: f64, cells_per_sd: f64) -> Result<(f64, f64)> {
    if !(cells_per_sd.is_finite() && cells_per_sd >= 1.0) {
        return Err(invalid(format!("need at least one cell per standard deviation, got {cells_per_sd}")));
    }
    if q.is_degenerate() {
        return Err(Error::Degenerate);
    }
    let (mean, sd) = (q.mean(), q.variance().sqrt());
    let mut scan = q.density_scanner(2)?;
    let mut sign_at = |x: f64| -> Result<f64> {
        match scan.eval(x) {
            Ok(v) => Ok(if v > 0.0 {
                1.0
            } else if v < 0.0 {
                -1.0
            } else {
                0.0
            }),
            Err(Error::InsufficientShape { .. }) if x == 0.0 => Ok(0.0),
            Err(e) => Err(e),
        }
    };
    let h = sd / cells_per_sd;
    let cells = (2.0 * SCAN_SDS * cells_per_sd).round() as usize;
    let mut edges = [0.0; 2];
    for (side, dir) in [(0usize, 1.0f64), (1, -1.0)] {
        // Side 0 walks up from the left end, side 1 down from the right end.
        let start = mean - dir * SCAN_SDS * sd;
        let mut last: Option<(f64, f64)> = None;
        let mut found = None;
        for i in 0..=cells {
            let x = start + dir * i as f64 * h;
            let s = sign_at(x)?;
            if s == 0.0 {
                continue;
            }
            if let Some((px, ps)) = last {
                if ps != s {
                    found = Some((px, x, ps));
                    break;
                }
            }
            last = Some((x, s));
        }
        let Some((mut outer, mut inner, outer_sign)) = found else {
            return Err(Error::NoSignChange(format!(
                "{} tail of a sum with mean {mean} and sd {sd}",
                if side == 0 { "lower" } else { "upper" }
            )));
        };
        while (inner - outer).abs() > 1e-10 * (sd + outer.abs()) {
            let mid = 0.5 * (outer + inner);
            let s = sign_at(mid)?;
            if s == outer_sign || s == 0.0 {
                outer = mid;
            } else {
                inner = mid;
            }
        }
        edges[side] = 0.5 * (outer + inner) - offset;
    }
    Ok((edges[0], edges[1]))
}

/// Outer inflection points of the perturbed density at one `t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InflectionExtent {
    pub t: f64,
    pub lower: f64,
    pub upper: f64,
}

impl InflectionExtent {
    pub fn extent(&self) -> f64 {
        self.lower.abs().max(self.upper.abs())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InflectionSup {
    pub sup: f64,
    pub cells_per_sd: f64,
    pub extents: Vec<InflectionExtent>,
}

/// Largest `|x|` at which the centered perturbed density of an absolute path
/// changes curvature, over the path's `t` grid.
pub fn inflection_sup(path: &DominancePath) -> Result<InflectionSup> {
    inflection_sup_with(path, DEFAULT_CELLS_PER_SD)
}

/// [`inflection_sup`] with a custom scan resolution.
pub fn inflection_sup_with(path: &DominancePath, cells_per_sd: f64) -> Result<InflectionSup> {
    if path.kind != PathKind::Absolute {
        return Err(precondition("inflection suprema are defined for absolute paths"));
    }
    let mut extents = Vec::with_capacity(path.t_grid.len());
    for &t in &path.t_grid {
        let q = perturbed_sum(path, t)?;
        let (lower, upper) = outer_inflections(&q, path.offset(&interpolate(path, t)?), cells_per_sd)?;
        extents.push(InflectionExtent { t, lower, upper });
    }
    let sup = extents.iter().map(InflectionExtent::extent).fold(0.0, f64::max);
    Ok(InflectionSup { sup, cells_per_sd, extents })
}

/// The union `x <= lower` or `x >= upper`, centered for absolute paths.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DominanceRegion {
    pub lower: f64,
    pub upper: f64,
    pub status: RegionStatus,
    /// Inflection supremum that certifies an absolute region.
    pub certified_by: Option<f64>,
}

impl DominanceRegion {
    /// `x <= 1 - 1/alpha` or `x >= 1 + 1/(2 alpha)`.
    pub fn relative_proved(alpha: f64) -> Self {
        DominanceRegion {
            lower: 1.0 - 1.0 / alpha,
            upper: 1.0 + 0.5 / alpha,
            status: RegionStatus::Proved,
            certified_by: None,
        }
    }

    /// `|x| > sup`, beyond every inflection point of the path.
    pub fn absolute_proved(sup: &InflectionSup) -> Self {
        DominanceRegion { lower: -sup.sup, upper: sup.sup, status: RegionStatus::Proved, certified_by: Some(sup.sup) }
    }

    pub fn custom(lower: f64, upper: f64, status: RegionStatus) -> Self {
        DominanceRegion { lower, upper, status, certified_by: None }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridPoint {
    pub x: f64,
    pub f_mu: f64,
    pub f_lam: f64,
    /// Amount by which the claimed inequality holds (negative when violated).
    pub margin: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DominanceReport {
    pub claim: String,
    pub kind: PathKind,
    pub region: DominanceRegion,
    pub grid: Vec<GridPoint>,
    pub worst_margin: f64,
    pub verdict: Verdict,
    /// Status of the region the check ran on.
    pub provenance: RegionStatus,
}

fn claim_text(kind: PathKind) -> &'static str {
    match kind {
        PathKind::Relative => "F_mu(x) >= F_lam(x) for x >= upper and F_mu(x) <= F_lam(x) for x <= lower",
        PathKind::Absolute => "F_mu(x) >= F_lam(x) for centered x >= upper or x <= lower",
    }
}

/// `points` abscissas on each side of the region: distances from the edge
/// spaced geometrically from `1e-4` of the span to the span, where the span
/// reaches 12 standard deviations past the mean of the wider endpoint. The
/// relative region is closed, so its edges themselves come first.
fn region_grid(region: &DominanceRegion, kind: PathKind, center: f64, sd: f64, points: usize) -> Vec<f64> {
    let far = SCAN_SDS * sd;
    let closed = kind == PathKind::Relative;
    let spacing = |span: f64| -> Vec<f64> {
        let n = if closed { points.saturating_sub(1) } else { points };
        let mut d: Vec<f64> = if closed { vec![0.0] } else { Vec::new() };
        d.extend(crate::bounds::log_grid(1e-4 * span, span, n));
        d.truncate(points);
        d
    };
    let span_low = (region.lower - (center - far)).max(sd);
    let span_high = ((center + far) - region.upper).max(sd);
    let mut xs: Vec<f64> = spacing(span_low).iter().rev().map(|d| region.lower - d).collect();
    xs.extend(spacing(span_high).iter().map(|d| region.upper + d));
    xs
}

/// `F(x + offset)` at every `x`.
fn cdf_profile(q: &GammaMix, offset: f64, xs: &[f64]) -> Result<Vec<f64>> {
    let g = q.to_general();
    xs.iter().map(|&x| g.cdf(x + offset)).collect()
}

fn check_members(path: &DominancePath) -> Result<()> {
    let (qm, ql) = (path.mix(&path.mu)?, path.mix(&path.lam)?);
    let ok = match path.kind {
        PathKind::Relative => {
            crate::extremal::in_qrel(&qm, path.shape) && crate::extremal::in_qrel(&ql, path.shape)
        }
        PathKind::Absolute => {
            let lam = qm.scale().max(ql.scale());
            let phi = qm.variance().sqrt();
            AbsFamily::new(lam, phi.max(lam))
                .is_ok_and(|f| crate::extremal::in_qabs(&qm, &f) && crate::extremal::in_qabs(&ql, &f))
        }
    };
    if ok {
        Ok(())
    } else {
        Err(precondition("path endpoints are not members of the tested family"))
    }
}

fn check_region(path: &DominancePath, region: &DominanceRegion) -> Result<()> {
    if !(region.lower < region.upper) {
        return Err(invalid("region needs lower < upper"));
    }
    if region.status != RegionStatus::Proved {
        return Ok(());
    }
    let inside = match path.kind {
        PathKind::Relative => {
            let proved = DominanceRegion::relative_proved(path.shape);
            region.upper < proved.upper - 1e-12 || region.lower > proved.lower + 1e-12
        }
        PathKind::Absolute => match region.certified_by {
            Some(sup) => region.upper < sup || region.lower > -sup,
            None => true,
        },
    };
    if inside {
        return Err(precondition("region overlaps the non-tail zone but is marked proved"));
    }
    Ok(())
}

fn margins(kind: PathKind, region: &DominanceRegion, xs: &[f64], fm: &[f64], fl: &[f64]) -> Vec<GridPoint> {
    xs.iter()
        .zip(fm.iter().zip(fl))
        .map(|(&x, (&f_mu, &f_lam))| {
            let margin = match kind {
                PathKind::Relative if x <= region.lower => f_lam - f_mu,
                _ => f_mu - f_lam,
            };
            GridPoint { x, f_mu, f_lam, margin }
        })
        .collect()
}

fn report(kind: PathKind, region: DominanceRegion, grid: Vec<GridPoint>) -> DominanceReport {
    let worst_margin = grid.iter().map(|p| p.margin).fold(f64::INFINITY, f64::min);
    let worst_margin = if grid.is_empty() { 0.0 } else { worst_margin };
    DominanceReport {
        claim: claim_text(kind).to_string(),
        kind,
        region,
        grid,
        worst_margin,
        verdict: Verdict::from_margin(worst_margin),
        provenance: region.status,
    }
}

/// Evaluates both endpoint CDFs on `x_points` abscissas per side of
/// `region` and checks the claimed inequality.
pub fn dominance_check(path: &DominancePath, region: &DominanceRegion, x_points: usize) -> Result<DominanceReport> {
    check_members(path)?;
    check_region(path, region)?;
    let (qm, ql) = (path.mix(&path.mu)?, path.mix(&path.lam)?);
    let center = qm.mean() - path.offset(&path.mu);
    let sd = qm.variance().sqrt().max(ql.variance().sqrt());
    let xs = region_grid(region, path.kind, center, sd, x_points);
    if path.is_constant() {
        let f = cdf_profile(&qm, path.offset(&path.mu), &xs)?;
        return Ok(report(path.kind, *region, margins(path.kind, region, &xs, &f, &f)));
    }
    let fm = cdf_profile(&qm, path.offset(&path.mu), &xs)?;
    let fl = cdf_profile(&ql, path.offset(&path.lam), &xs)?;
    Ok(report(path.kind, *region, margins(path.kind, region, &xs, &fm, &fl)))
}

/// Options for [`chain_dominance`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChainCheckOptions {
    pub t_points: usize,
    pub x_points: usize,
    pub cells_per_sd: f64,
}

impl Default for ChainCheckOptions {
    fn default() -> Self {
        ChainCheckOptions { t_points: DEFAULT_T_POINTS, x_points: DEFAULT_X_POINTS, cells_per_sd: DEFAULT_CELLS_PER_SD }
    }
}

/// One report per step of the chain, on its proved region. Relative steps
/// share one region, so each chain vector's CDF profile is computed once.
pub fn chain_dominance(
    chain: &MajorizationChain,
    kind: PathKind,
    shape: f64,
    rate: f64,
    options: &ChainCheckOptions,
) -> Result<Vec<DominanceReport>> {
    if chain.kind() != kind.order() {
        return Err(precondition(format!("a {:?} chain cannot drive a {kind:?} path", chain.kind())));
    }
    let grid = chebyshev_grid(options.t_points);
    let paths: Vec<DominancePath> = chain
        .pairs()
        .map(|(prev, next)| DominancePath::from_step_with_grid(prev, next, kind, shape, rate, grid.clone()))
        .collect::<Result<_>>()?;
    match kind {
        PathKind::Absolute => paths
            .iter()
            .map(|p| {
                let sup = inflection_sup_with(p, options.cells_per_sd)?;
                dominance_check(p, &DominanceRegion::absolute_proved(&sup), options.x_points)
            })
            .collect(),
        PathKind::Relative => {
            let region = DominanceRegion::relative_proved(shape);
            for p in &paths {
                check_members(p)?;
            }
            let mixes: Vec<GammaMix> =
                chain.steps().iter().map(|s| GammaMix::new(s.clone(), shape, rate)).collect::<Result<_>>()?;
            let sd = mixes.iter().map(|q| q.variance().sqrt()).fold(0.0, f64::max);
            let center = mixes.first().map_or(0.0, GammaMix::mean);
            let xs = region_grid(&region, kind, center, sd, options.x_points);
            let profiles: Vec<Vec<f64>> = mixes.iter().map(|q| cdf_profile(q, 0.0, &xs)).collect::<Result<_>>()?;
            Ok(profiles
                .windows(2)
                .map(|w| report(kind, region, margins(kind, &region, &xs, &w[0], &w[1])))
                .collect())
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Nonincreasing,
    Nondecreasing,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonotonicityReport {
    pub kind: PathKind,
    pub x: f64,
    pub direction: Direction,
    pub t: Vec<f64>,
    pub cdf: Vec<f64>,
    /// Largest step against the expected direction (zero when monotone).
    pub worst_violation: f64,
    pub verdict: Verdict,
}

/// `F_{Y(t)}(x)` over the `t` grid, checked against the direction the
/// derivative-sign analysis gives: for relative paths nonincreasing at or
/// above the mean and nondecreasing below it, for absolute paths (centered)
/// nonincreasing on both sides.
pub fn monotonicity_check(path: &DominancePath, x: f64) -> Result<MonotonicityReport> {
    if !x.is_finite() {
        return Err(invalid("x must be finite"));
    }
    let direction = match path.kind {
        PathKind::Relative if x < path.mix(&path.mu)?.mean() => Direction::Nondecreasing,
        _ => Direction::Nonincreasing,
    };
    let cdf: Vec<f64> = path
        .t_grid
        .iter()
        .map(|&t| {
            let nu = interpolate(path, t)?;
            path.mix(&nu)?.cdf(x + path.offset(&nu))
        })
        .collect::<Result<_>>()?;
    let worst_violation = cdf
        .windows(2)
        .map(|w| match direction {
            Direction::Nonincreasing => w[1] - w[0],
            Direction::Nondecreasing => w[0] - w[1],
        })
        .fold(0.0, f64::max);
    Ok(MonotonicityReport {
        kind: path.kind,
        x,
        direction,
        t: path.t_grid.clone(),
        cdf,
        worst_violation,
        verdict: Verdict::from_margin(-worst_violation),
    })
}

/// Parameters of a conjecture probe, in Gamma-mixture units: the relative
/// family has unit mean and scale at most `1/mu`; the absolute family has
/// scale at most `lam` and standard deviation `phi`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum ProbeFamily {
    Relative { mu: f64 },
    Absolute { lam: f64, phi: f64 },
}

/// A closed-form member checked against the value it must attain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WitnessRow {
    pub name: String,
    pub weights: Vec<f64>,
    pub value: f64,
    pub expected: f64,
    pub matches: bool,
}

/// One sampled member and the statistic of its perturbed density.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeSample {
    pub trial: usize,
    pub weights: Vec<f64>,
    pub j: usize,
    pub k: usize,
    pub value: f64,
}

/// Empirical maximum of perturbed-density modes (relative) or inflection
/// extents (absolute) against the conjectured ceiling. Report only.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeReport {
    pub family: ProbeFamily,
    pub alpha: f64,
    pub beta: f64,
    pub trials: usize,
    pub seed: u64,
    pub statistic: String,
    pub conjectured_bound: f64,
    pub pessimistic_floor: Option<f64>,
    pub proved_bound: Option<f64>,
    pub empirical_max: f64,
    pub argmax: Option<ProbeSample>,
    pub counterexample: Option<ProbeSample>,
    pub witnesses: Vec<WitnessRow>,
    pub note: String,
}

const WITNESS_TOL: f64 = 1e-6;

fn witness(name: &str, weights: &[f64], value: f64, expected: f64) -> WitnessRow {
    WitnessRow {
        name: name.to_string(),
        weights: weights.to_vec(),
        value,
        expected,
        matches: (value - expected).abs() <= WITNESS_TOL,
    }
}

fn perturb(weights: &[f64], j: usize, k: usize, alpha: f64, beta: f64) -> Result<GeneralGammaSum> {
    let mut g = GammaMix::new(weights.to_vec(), alpha, beta)?.to_general();
    for w in [weights[j], weights[k]] {
        if w != 0.0 {
            g = g.with_term(w, 1.0, beta)?;
        }
    }
    Ok(g)
}

/// Samples `trials` random members with random index pairs from a stream
/// seeded by `seed` and records the largest mode (relative) or outer
/// inflection extent (absolute) of the perturbed densities, along with the
/// closed-form witnesses of the pessimistic floor. Never fails on a
/// counterexample; it is reported instead.
pub fn conjecture_probe(family: ProbeFamily, alpha: f64, trials: usize, seed: u64) -> Result<ProbeReport> {
    if trials == 0 {
        return Err(invalid("a probe needs at least one trial"));
    }
    let beta = alpha;
    let mut rng = CounterRng::new(seed, 0);
    let mut samples = Vec::with_capacity(trials);
    let report = match family {
        ProbeFamily::Relative { mu } => {
            let regions = rel_tail_region(mu, alpha)?;
            let members = RelFamily::new(mu / alpha)?;
            let dim = crate::extremal::rel_min_dim(&members).max(2);
            for trial in 0..trials {
                let n = dim + rng.random_range(0..=6);
                let s = random_rel_member(&members, n, &mut rng)?;
                // Mixture weights with unit mean: w = s * beta / alpha.
                let w: Vec<f64> = s.iter().map(|v| v * beta / alpha).collect();
                let (j, k) = distinct_pair(n, &mut rng);
                let value = mode_of(&perturb(&w, j, k, alpha, beta)?)?;
                samples.push(ProbeSample { trial, weights: w, j, k, value });
            }
            let mut witnesses = Vec::new();
            if mu > alpha {
                let (upper, lower) = rel_floor_witnesses(mu, alpha, beta)?;
                let d = 1.0 / (alpha * upper.r as f64);
                witnesses.push(witness("upper floor", upper.q.weights(), mode_of(&upper.perturbed()?)?, 1.0 + d));
                witnesses.push(witness("lower floor", lower.q.weights(), mode_of(&lower.perturbed()?)?, 1.0 - d));
            } else {
                let w = [beta / (2.0 * alpha); 2];
                let value = mode_of(&perturb(&w, 0, 1, alpha, beta)?)?;
                witnesses.push(witness("proved upper edge", &w, value, 1.0 + 0.5 / alpha));
            }
            ProbeReport {
                family,
                alpha,
                beta,
                trials,
                seed,
                statistic: "mode of the perturbed density".into(),
                conjectured_bound: regions.conjectured.upper_edge().expect("upper edge"),
                pessimistic_floor: regions.floor.and_then(|r| r.upper_edge()),
                proved_bound: regions.proved.upper_edge(),
                empirical_max: f64::NAN,
                argmax: None,
                counterexample: None,
                witnesses,
                note: String::new(),
            }
        }
        ProbeFamily::Absolute { lam, phi } => {
            let f = AbsFamily::new(lam, phi)?;
            let regions = abs_tail_region(&f, alpha)?;
            let members = AbsFamily::new(lam, phi / alpha.sqrt())?;
            let dim = abs_min_dim(&members).max(2);
            for trial in 0..trials {
                let n = dim + rng.random_range(0..=4);
                let s = random_abs_member(&members, n, &mut rng)?;
                let w: Vec<f64> = s.iter().map(|v| v * beta).collect();
                let (j, k) = distinct_pair(n, &mut rng);
                let q = perturb(&w, j, k, alpha, beta)?;
                let offset = alpha / beta * w.iter().sum::<f64>();
                let (lo, hi) = outer_inflections(&q, offset, DEFAULT_CELLS_PER_SD)?;
                samples.push(ProbeSample { trial, weights: w, j, k, value: lo.abs().max(hi.abs()) });
            }
            let wit = abs_floor_witness(&f, alpha, beta)?;
            let offset = alpha / beta * wit.q.weights().iter().sum::<f64>();
            let (_, hi) = outer_inflections(&wit.perturbed()?, offset, DEFAULT_CELLS_PER_SD)?;
            let floor = regions.floor.upper_edge().expect("upper edge");
            ProbeReport {
                family,
                alpha,
                beta,
                trials,
                seed,
                statistic: "outer inflection extent of the centered perturbed density".into(),
                conjectured_bound: regions.conjectured.upper_edge().expect("upper edge"),
                pessimistic_floor: Some(floor),
                proved_bound: None,
                empirical_max: f64::NAN,
                argmax: None,
                counterexample: None,
                witnesses: vec![witness("upper floor", wit.q.weights(), hi, floor)],
                note: String::new(),
            }
        }
    };
    Ok(finish_probe(report, samples))
}

fn finish_probe(mut report: ProbeReport, samples: Vec<ProbeSample>) -> ProbeReport {
    let best = samples.iter().max_by(|a, b| a.value.total_cmp(&b.value)).cloned();
    report.empirical_max = best.as_ref().map_or(f64::NAN, |s| s.value);
    report.counterexample = best.clone().filter(|s| s.value > report.conjectured_bound + SLACK);
    report.argmax = best;
    report.note = format!(
        "{} sampled members; the conjectured bound is reported, not asserted{}",
        report.trials,
        if report.counterexample.is_some() { "; a sample exceeds it" } else { "" }
    );
    report
}

fn distinct_pair<R: Rng + ?Sized>(n: usize, rng: &mut R) -> (usize, usize) {
    let j = rng.random_range(0..n);
    let mut k = rng.random_range(0..n - 1);
    if k >= j {
        k += 1;
    }
    (j, k)
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::gamma_core::GammaParams;
    use crate::gamma_mix::GammaTerm;
    use crate::majorization::chain_classical;

    fn rel_path(mu: &[f64], lam: &[f64]) -> DominancePath {
        DominancePath::from_step(mu, lam, PathKind::Relative, 1.0, 1.0).unwrap()
    }

    fn abs_path(mu: &[f64], lam: &[f64], grid: Vec<f64>) -> DominancePath {
        DominancePath::from_step_with_grid(mu, lam, PathKind::Absolute, 1.0, 1.0, grid).unwrap()
    }

    fn gamma_sum(terms: &[(f64, f64, f64)]) -> GeneralGammaSum {
        GeneralGammaSum::new(terms.iter().map(|&(weight, shape, rate)| GammaTerm { weight, shape, rate }).collect())
            .unwrap()
    }

    #[test]
    fn chebyshev_grid_shape() {
        let g = chebyshev_grid(33);
        assert_eq!((g[0], g[32]), (0.0, 1.0));
        assert!(g.windows(2).all(|w| w[0] < w[1]));
        assert!((g[16] - 0.5).abs() < 1e-15);
        for i in 0..33 {
            assert!((g[i] + g[32 - i] - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn path_validation() {
        let grid = chebyshev_grid(5);
        let new = |mu: &[f64], lam: &[f64], j, k, kind| {
            DominancePath::new(mu.to_vec(), lam.to_vec(), j, k, kind, grid.clone(), 1.0, 1.0)
        };
        assert!(new(&[0.5, 0.5], &[1.0, 0.0], 0, 1, PathKind::Relative).is_ok());
        // Wrong roles of j and k.
        assert!(new(&[0.5, 0.5], &[1.0, 0.0], 1, 0, PathKind::Relative).is_err());
        assert!(new(&[0.5, 0.5], &[1.0, 0.0], 0, 0, PathKind::Relative).is_err());
        // A third coordinate changes.
        assert!(new(&[0.5, 0.5, 0.2], &[1.0, 0.0, 0.1], 0, 1, PathKind::Relative).is_err());
        let r2 = 2f64.sqrt();
        assert!(new(&[1.0, -1.0], &[r2, 0.0], 0, 1, PathKind::Absolute).is_ok());
        // Squares not conserved.
        assert!(new(&[1.0, -1.0], &[1.5, 0.0], 0, 1, PathKind::Absolute).is_err());
        // Identical endpoints are a constant path.
        assert!(new(&[0.3, 0.7], &[0.3, 0.7], 0, 1, PathKind::Relative).unwrap().is_constant());
        let bad_grid = DominancePath::new(vec![0.5, 0.5], vec![1.0, 0.0], 0, 1, PathKind::Relative, vec![0.0, 0.5], 1.0, 1.0);
        assert!(bad_grid.is_err());
    }

    #[test]
    fn interpolation_examples() {
        let p = rel_path(&[0.5, 0.5], &[1.0, 0.0]);
        assert_eq!(interpolate(&p, 0.5).unwrap(), vec![0.75, 0.25]);
        let r2 = 2f64.sqrt();
        let p = abs_path(&[1.0, -1.0], &[r2, 0.0], chebyshev_grid(9));
        let v = interpolate(&p, 0.5).unwrap();
        assert!((v[0] - 1.5f64.sqrt()).abs() < 1e-15 && (v[1] + 0.5f64.sqrt()).abs() < 1e-15);
        assert_eq!(interpolate(&p, 0.0).unwrap(), vec![1.0, -1.0]);
        assert_eq!(interpolate(&p, 1.0).unwrap(), vec![r2, 0.0]);
        assert!(interpolate(&p, 1.5).is_err());
    }

    #[test]
    fn interpolation_conserves_its_functional() {
        let p = rel_path(&[0.4, 0.35, 0.25], &[0.4, 0.5, 0.1]);
        let r = abs_path(&[0.9, 0.2, -0.8], &[1.1, 0.2, -(0.81 + 0.64 - 1.21f64).sqrt()], chebyshev_grid(33));
        for &t in &chebyshev_grid(33) {
            let v = interpolate(&p, t).unwrap();
            assert!((v.iter().sum::<f64>() - 1.0).abs() < 1e-14);
            let v = interpolate(&r, t).unwrap();
            let sq: f64 = v.iter().map(|x| x * x).sum();
            assert!((sq - (0.81 + 0.04 + 0.64)).abs() < 1e-14);
        }
    }

    #[test]
    fn perturbed_density_examples() {
        // Constant path (1, 1) with both coordinates perturbed: X_1 + X_2 + psi + psi'
        // is Gamma(4, 1), whose mode is 3.
        let p = rel_path(&[1.0, 1.0], &[1.0, 1.0]);
        let g = GammaParams::new(4.0, 1.0).unwrap();
        assert!((perturbed_density(&p, 0.5, 3.0, 0).unwrap() - g.pdf(3.0).unwrap()).abs() < 1e-7);

        // X_1 - X_2 + psi - psi' is symmetric and unimodal, so concave at 0.
        let p = abs_path(&[1.0, -1.0], &[1.0, -1.0], chebyshev_grid(3));
        assert!(perturbed_density(&p, 0.3, 0.0, 2).unwrap() < 0.0);

        // A genuine relative step: the slope vanishes at the numeric mode.
        let p = rel_path(&[0.5, 0.3, 0.2], &[0.6, 0.3, 0.1]);
        let t = 0.4;
        let mode = mode_of(&perturbed_sum(&p, t).unwrap()).unwrap();
        assert!(perturbed_density(&p, t, mode, 1).unwrap().abs() < 1e-6);
        assert_eq!(perturbed_sum(&rel_path(&[0.5, 0.5, 0.0], &[0.5, 0.5, 0.0]), 0.5).map(|_| ()), Ok(()));
    }

    #[test]
    fn degenerate_perturbation_is_rejected() {
        let p = DominancePath::new(vec![1.0, 0.0, 0.0], vec![1.0, 0.0, 0.0], 1, 2, PathKind::Relative, vec![0.0, 1.0], 1.0, 1.0)
            .unwrap();
        assert_eq!(perturbed_sum(&p, 0.5), Err(Error::Degenerate));
    }

    #[test]
    fn mode_examples() {
        assert!((mode_of(&gamma_sum(&[(1.0, 2.0, 1.0)])).unwrap() - 1.0).abs() < 1e-8);
        assert!(mode_of(&gamma_sum(&[(1.0, 1.0, 1.0), (-1.0, 1.0, 1.0)])).unwrap().abs() < 1e-8);
        let (upper, _) = rel_floor_witnesses(2.5, 1.0, 1.0).unwrap();
        assert!((mode_of(&upper.perturbed().unwrap()).unwrap() - (1.0 + 1.0 / 3.0)).abs() < 1e-7);
        // Shape below one: the mode sits at the origin.
        assert!(mode_of(&gamma_sum(&[(1.0, 0.5, 1.0), (0.5, 0.3, 1.0)])).unwrap() < 1e-8);
        assert_eq!(mode_of(&gamma_sum(&[(0.0, 1.0, 1.0)])), Err(Error::Degenerate));
    }

    #[test]
    fn mode_matches_single_gamma() {
        for (a, b, w) in [(3.5, 2.0, 1.0), (10.0, 0.5, 0.3), (1.5, 1.0, -2.0)] {
            let g = GammaParams::new(a, b).unwrap();
            let expected = w * g.mode();
            // Split the Gamma into two equal halves to avoid the closed form.
            let q = gamma_sum(&[(w, a / 2.0, b), (w * (1.0 + 1e-9), a / 2.0, b)]);
            assert!((mode_of(&q).unwrap() - expected).abs() < 1e-6 * (1.0 + expected.abs()), "{a} {b} {w}");
        }
    }

    #[test]
    fn outer_inflections_of_collapsed_witness() {
        // Gamma(3, 1) centered by 1: upper inflection 2 + sqrt 2 - 1.
        let q = gamma_sum(&[(1.0, 1.0, 1.0), (1.0, 1.0, 1.0), (1.0, 1.0, 1.0)]);
        let (_, hi) = outer_inflections(&q, 1.0, DEFAULT_CELLS_PER_SD).unwrap();
        assert!((hi - (1.0 + 2f64.sqrt())).abs() < 1e-6);
    }

    #[test]
    fn inflection_sup_matches_gamma_inflections_on_collapse() {
        // Constant path (w, w): 2 X (shape 1 each) + 2 psi = Gamma(4, 1/w).
        let w = 0.7;
        let p = abs_path(&[w, w], &[w, w], vec![0.0, 1.0]);
        let s = inflection_sup(&p).unwrap();
        let g = GammaParams::new(4.0, 1.0 / w).unwrap();
        let (lo, hi) = g.inflection_points();
        let offset = 2.0 * w;
        let expected = (hi.unwrap() - offset).abs().max((lo.unwrap() - offset).abs());
        assert!((s.sup - expected).abs() < 1e-6, "{} vs {expected}", s.sup);
    }

    #[test]
    fn inflection_sup_symmetric_and_monotone_in_grid() {
        let p = abs_path(&[1.0, -1.0], &[1.0, -1.0], vec![0.0, 1.0]);
        let e = inflection_sup(&p).unwrap().extents[0];
        assert!((e.upper + e.lower).abs() < 1e-6);

        let r2 = 2f64.sqrt();
        let coarse = inflection_sup(&abs_path(&[1.0, -1.0], &[r2, 0.0], vec![0.0, 1.0])).unwrap();
        let fine = inflection_sup(&abs_path(&[1.0, -1.0], &[r2, 0.0], vec![0.0, 0.5, 1.0])).unwrap();
        assert!(fine.sup >= coarse.sup - 1e-7);
        assert!(inflection_sup(&rel_path(&[0.5, 0.5], &[1.0, 0.0])).is_err());
    }

    #[test]
    fn relative_dominance_example() {
        let p = rel_path(&[0.5, 0.5], &[1.0, 0.0]);
        let fm = GammaMix::new(vec![0.5, 0.5], 1.0, 1.0).unwrap().cdf(2.0).unwrap();
        let fl = GammaMix::new(vec![1.0, 0.0], 1.0, 1.0).unwrap().cdf(2.0).unwrap();
        assert!((fm - (1.0 - 5.0 * (-4f64).exp())).abs() < 1e-12);
        assert!((fl - (1.0 - (-2f64).exp())).abs() < 1e-12);
        let r = dominance_check(&p, &DominanceRegion::relative_proved(1.0), DEFAULT_X_POINTS).unwrap();
        assert_eq!(r.verdict, Verdict::Pass);
        assert_eq!(r.grid.len(), 2 * DEFAULT_X_POINTS);
        assert_eq!(r.provenance, RegionStatus::Proved);
        assert!(r.grid.iter().any(|g| g.x == 1.5));
    }

    #[test]
    fn identical_endpoints_pass_with_zero_margin() {
        let p = rel_path(&[0.6, 0.4], &[0.6, 0.4]);
        let r = dominance_check(&p, &DominanceRegion::relative_proved(1.0), 16).unwrap();
        assert_eq!((r.verdict, r.worst_margin), (Verdict::Pass, 0.0));
    }

    #[test]
    fn proved_region_may_not_reach_inside() {
        let p = rel_path(&[0.5, 0.5], &[1.0, 0.0]);
        let inside = DominanceRegion::custom(0.0, 1.2, RegionStatus::Proved);
        assert!(matches!(dominance_check(&p, &inside, 8), Err(Error::Precondition(_))));
        let report = dominance_check(&p, &DominanceRegion::custom(0.0, 1.2, RegionStatus::Conjectured), 8).unwrap();
        assert_eq!(report.provenance, RegionStatus::Conjectured);
        // Not a member of the unit-mean family.
        let q = DominancePath::from_step(&[1.0, 1.0], &[2.0, 0.0], PathKind::Relative, 1.0, 1.0).unwrap();
        assert!(dominance_check(&q, &DominanceRegion::relative_proved(1.0), 8).is_err());
    }

    #[test]
    fn near_center_dominance_can_fail() {
        // Inside the non-tail zone the inequality flips somewhere, so the
        // check is able to report a failure.
        let p = rel_path(&[0.5, 0.5], &[1.0, 0.0]);
        let r = dominance_check(&p, &DominanceRegion::custom(0.2, 0.3, RegionStatus::Unsupported), 32).unwrap();
        assert_eq!(r.verdict, Verdict::Fail);
    }

    #[test]
    fn absolute_dominance_beyond_inflections() {
        let r2 = 2f64.sqrt();
        let p = abs_path(&[1.0, -1.0], &[r2, 0.0], chebyshev_grid(9));
        let sup = inflection_sup(&p).unwrap();
        let r = dominance_check(&p, &DominanceRegion::absolute_proved(&sup), 32).unwrap();
        assert_eq!(r.verdict, Verdict::Pass, "worst {}", r.worst_margin);
        assert!(r.grid.iter().all(|g| g.x.abs() > sup.sup));
    }

    #[test]
    fn chain_reports_reuse_profiles() {
        let (mu, lam) = (vec![0.3, 0.3, 0.2, 0.2], vec![0.5, 0.3, 0.2, 0.0]);
        let chain = chain_classical(&mu, &lam).unwrap();
        let reports = chain_dominance(&chain, PathKind::Relative, 2.0, 2.0, &ChainCheckOptions::default()).unwrap();
        assert_eq!(reports.len(), chain.len() - 1);
        for (r, (prev, next)) in reports.iter().zip(chain.pairs()) {
            let single =
                dominance_check(&DominancePath::from_step(prev, next, PathKind::Relative, 2.0, 2.0).unwrap(), &r.region, 64)
                    .unwrap();
            assert_eq!(single.grid, r.grid);
            assert_eq!(r.verdict, Verdict::Pass);
        }
        assert!(chain_dominance(&chain, PathKind::Absolute, 2.0, 2.0, &ChainCheckOptions::default()).is_err());
    }

    #[test]
    fn monotonicity_examples() {
        let p = rel_path(&[0.5, 0.3, 0.2], &[0.6, 0.3, 0.1]);
        let sd = GammaMix::new(p.mu().to_vec(), 1.0, 1.0).unwrap().variance().sqrt();
        let r = monotonicity_check(&p, 1.0 + 10.0 * sd).unwrap();
        assert_eq!((r.direction, r.verdict), (Direction::Nonincreasing, Verdict::Pass));
        let r = monotonicity_check(&p, 0.01).unwrap();
        assert_eq!((r.direction, r.verdict), (Direction::Nondecreasing, Verdict::Pass));

        let c = rel_path(&[0.6, 0.4], &[0.6, 0.4]);
        let r = monotonicity_check(&c, 1.3).unwrap();
        assert!(r.cdf.iter().all(|&v| v == r.cdf[0]));

        let r2 = 2f64.sqrt();
        let a = abs_path(&[1.0, -1.0], &[r2, 0.0], chebyshev_grid(9));
        for x in [-(10.0 * r2), 10.0 * r2] {
            let r = monotonicity_check(&a, x).unwrap();
            assert_eq!((r.direction, r.verdict), (Direction::Nonincreasing, Verdict::Pass), "x = {x}: {:?}", r.cdf);
        }
    }

    #[test]
    fn probe_witnesses_reach_the_floors() {
        let r = conjecture_probe(ProbeFamily::Relative { mu: 2.5 }, 1.0, 3, 11).unwrap();
        assert!(r.witnesses.iter().all(|w| w.matches), "{:?}", r.witnesses);
        assert_eq!(r.pessimistic_floor, Some(1.0 + 1.0 / 3.0));
        assert!(r.empirical_max.is_finite());

        let r = conjecture_probe(ProbeFamily::Relative { mu: 1.0 }, 1.0, 2, 11).unwrap();
        assert!(r.witnesses[0].matches && (r.witnesses[0].expected - 1.5).abs() < 1e-15);

        let r = conjecture_probe(ProbeFamily::Absolute { lam: 1.0, phi: 2f64.sqrt() }, 1.0, 2, 11).unwrap();
        let expected = 2f64.sqrt() * (1.0 + 3f64.sqrt()) / 2f64.sqrt();
        assert!((r.witnesses[0].expected - expected).abs() < 1e-12 && r.witnesses[0].matches, "{:?}", r.witnesses);
        assert!(conjecture_probe(ProbeFamily::Relative { mu: 2.0 }, 1.0, 0, 1).is_err());
    }

    #[test]
    fn reports_serialize() {
        let p = rel_path(&[0.5, 0.5], &[1.0, 0.0]);
        let r = dominance_check(&p, &DominanceRegion::relative_proved(1.0), 4).unwrap();
        let json = serde_json::to_value(&r).unwrap();
        for key in ["claim", "region", "grid", "verdict", "provenance", "worst_margin"] {
            assert!(json.get(key).is_some(), "{key}");
        }
        assert_eq!(json["verdict"], "pass");
        assert_eq!(json["provenance"], "proved");
    }
}
