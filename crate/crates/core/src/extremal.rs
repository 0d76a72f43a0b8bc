//! Worst-case spectra, family membership and tail-region formulas.
//!
//! Two matrix families are modelled. The relative family holds SPSD matrices
//! with unit trace and effective rank at least `mu`; the absolute family holds
//! symmetric matrices with 2-norm at most `lam` and Frobenius norm `phi`. Their
//! Gamma-mixture counterparts are checked by [`in_qrel`] and [`in_qabs`].
//!
//! Tail edges carry an [`EdgeStatus`] so that proved regions, pessimistic
//! floors (the true edge lies at or beyond them) and conjectured edges are
//! never mixed up.

use crate::error::{invalid, precondition, Error, Result};
use crate::gamma_core::GammaParams;
use crate::gamma_mix::{GammaMix, GeneralGammaSum};
use crate::majorization::{soften_classical, soften_frobenius, Spectrum};
use rand::Rng;
use serde::{Deserialize, Serialize};

const MEMBER_TOL: f64 = 1e-12;

/// Unit-trace SPSD matrices with effective rank at least `mu`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RelFamily {
    mu: f64,
}

impl RelFamily {
    pub fn new(mu: f64) -> Result<Self> {
        if !(mu.is_finite() && mu >= 1.0) {
            return Err(invalid(format!("effective rank bound must be >= 1, got {mu}")));
        }
        Ok(RelFamily { mu })
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }
}

/// Symmetric matrices with 2-norm at most `lam` and Frobenius norm `phi`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AbsFamily {
    lam: f64,
    phi: f64,
}

impl AbsFamily {
    pub fn new(lam: f64, phi: f64) -> Result<Self> {
        if !(lam.is_finite() && phi.is_finite() && lam > 0.0 && lam <= phi) {
            return Err(invalid(format!("need 0 < lam <= phi, got lam = {lam}, phi = {phi}")));
        }
        Ok(AbsFamily { lam, phi })
    }

    pub fn lam(&self) -> f64 {
        self.lam
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    /// Stable rank `phi^2 / lam^2` of the worst-case member.
    pub fn rho(&self) -> f64 {
        (self.phi / self.lam).powi(2)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum Family {
    Relative(RelFamily),
    Absolute(AbsFamily),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EdgeStatus {
    /// Dominance holds for every family member beyond this edge.
    Proved,
    /// A family member exists whose tail region starts at this point, so the
    /// true edge is at least this far out.
    PessimisticFloor,
    /// Conjectured value, never asserted.
    Conjectured,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub value: f64,
    pub status: EdgeStatus,
}

/// The set `x <= lower` union `x >= upper`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailRegion {
    pub lower: Option<Edge>,
    pub upper: Option<Edge>,
}

impl TailRegion {
    fn new(lower: Option<f64>, upper: Option<f64>, status: EdgeStatus) -> Self {
        if let (Some(l), Some(u)) = (lower, upper) {
            debug_assert!(l < u);
        }
        TailRegion {
            lower: lower.map(|value| Edge { value, status }),
            upper: upper.map(|value| Edge { value, status }),
        }
    }

    pub fn lower_edge(&self) -> Option<f64> {
        self.lower.map(|e| e.value)
    }

    pub fn upper_edge(&self) -> Option<f64> {
        self.upper.map(|e| e.value)
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lower.is_some_and(|e| x <= e.value) || self.upper.is_some_and(|e| x >= e.value)
    }
}

/// Candidate tail regions for the relative family at a given shape.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RelTailRegions {
    pub proved: TailRegion,
    /// Absent when `mu == alpha`, where the floor construction needs two
    /// distinct coordinates and does not apply.
    pub floor: Option<TailRegion>,
    pub conjectured: TailRegion,
}

/// Candidate symmetric tail regions (`|x| >= edge`) for the centered
/// absolute family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AbsTailRegions {
    /// Number of equal weights in the floor witness.
    pub r: u64,
    pub floor: TailRegion,
    pub conjectured: TailRegion,
}

/// `(1/mu) * (1, ..., 1, mu - floor(mu))` with `floor(mu)` ones.
pub fn worst_rel_spectrum(f: &RelFamily) -> Spectrum {
    let mu = snap(f.mu);
    let whole = mu.floor();
    let mut v = vec![1.0 / mu; whole as usize];
    let frac = mu - whole;
    if frac > 0.0 {
        v.push(frac / mu);
    }
    Spectrum::new(v).expect("finite")
}

/// `lam * (1, ..., 1, sqrt(rho - floor(rho)))` with `floor(rho)` ones.
pub fn worst_abs_spectrum(f: &AbsFamily) -> Spectrum {
    let rho = snap(f.rho());
    let whole = rho.floor();
    let mut v = vec![f.lam; whole as usize];
    let frac = rho - whole;
    if frac > 0.0 {
        v.push(f.lam * frac.sqrt());
    }
    Spectrum::new(v).expect("finite")
}

fn max_abs(s: &[f64]) -> f64 {
    s.iter().fold(0.0f64, |m, v| m.max(v.abs()))
}

/// `sum(s) / max(s)` for a nonnegative, nonzero spectrum.
pub fn effective_rank(s: &[f64]) -> Result<f64> {
    if s.iter().any(|&v| v < 0.0 || !v.is_finite()) {
        return Err(invalid("effective rank needs finite nonnegative entries"));
    }
    let max = max_abs(s);
    if max == 0.0 {
        return Err(Error::Degenerate);
    }
    Ok(s.iter().sum::<f64>() / max)
}

/// `sum(s^2) / max(s^2)`; sign-invariant.
pub fn stable_rank(s: &[f64]) -> Result<f64> {
    if s.iter().any(|v| !v.is_finite()) {
        return Err(invalid("stable rank needs finite entries"));
    }
    let max = max_abs(s);
    if max == 0.0 {
        return Err(Error::Degenerate);
    }
    Ok(s.iter().map(|v| (v / max).powi(2)).sum())
}

fn check_m(m: usize) -> Result<()> {
    if m == 0 {
        return Err(invalid("number of probe vectors must be at least 1"));
    }
    Ok(())
}

/// Law of the worst-case relative estimator: `Gamma(m mu / 2, m mu / 2)`.
pub fn extremal_rel_law(f: &RelFamily, m: usize) -> Result<GammaParams> {
    check_m(m)?;
    let a = m as f64 * f.mu / 2.0;
    GammaParams::new(a, a)
}

/// Law of `sign * X` with `X ~ Gamma(m rho / 2, m / (2 lam))`, the worst-case
/// absolute estimator (upper tail for `+1`, lower tail for `-1`).
pub fn extremal_abs_law(f: &AbsFamily, m: usize, sign: i8) -> Result<(f64, GammaParams)> {
    check_m(m)?;
    let sign = match sign {
        1 => 1.0,
        -1 => -1.0,
        _ => return Err(invalid("sign must be +1 or -1")),
    };
    let half = m as f64 / 2.0;
    Ok((sign, GammaParams::new(half * f.rho(), half / f.lam)?))
}

/// Membership in the relative Gamma-mixture family: nonnegative weights,
/// unit mean and scale at most `1/mu`.
pub fn in_qrel(q: &GammaMix, mu: f64) -> bool {
    q.weights().iter().all(|&w| w >= 0.0)
        && q.scale() <= 1.0 / mu + MEMBER_TOL
        && (q.mean() - 1.0).abs() <= MEMBER_TOL
}

/// Membership in the absolute Gamma-mixture family: scale at most `lam` and
/// variance `phi^2`.
pub fn in_qabs(q: &GammaMix, f: &AbsFamily) -> bool {
    let var = f.phi * f.phi;
    q.scale() <= f.lam + MEMBER_TOL && (q.variance() - var).abs() <= MEMBER_TOL * var
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha.is_finite() && alpha > 0.0) {
        return Err(invalid(format!("shape must be positive, got {alpha}")));
    }
    Ok(())
}

/// Rounds values within `1e-12` (relative) of an integer, so ratios like
/// `(sqrt 2)^2` count as whole numbers.
fn snap(x: f64) -> f64 {
    let r = x.round();
    if (x - r).abs() <= 1e-12 * r.max(1.0) {
        r
    } else {
        x
    }
}

fn ceil_ratio(x: f64) -> f64 {
    snap(x).ceil()
}

/// Tail regions of the relative Gamma-mixture family with shape `alpha` and
/// scale bound `1/mu`.
///
/// The proved edges `1 - 1/alpha` and `1 + 1/(2 alpha)` hold for every
/// `mu >= alpha`. For `mu > alpha` the floor `1 -+ 1/(alpha ceil(mu/alpha))`
/// is attained by an explicit member, so no valid edge lies inside it. The
/// conjectured edges are `1 -+ 1/mu`.
pub fn rel_tail_region(mu: f64, alpha: f64) -> Result<RelTailRegions> {
    check_alpha(alpha)?;
    if !(mu.is_finite() && mu >= alpha) {
        return Err(precondition(format!("need mu >= alpha, got mu = {mu}, alpha = {alpha}")));
    }
    let proved = TailRegion::new(Some(1.0 - 1.0 / alpha), Some(1.0 + 0.5 / alpha), EdgeStatus::Proved);
    let floor = (mu > alpha).then(|| {
        let d = 1.0 / (alpha * ceil_ratio(mu / alpha));
        TailRegion::new(Some(1.0 - d), Some(1.0 + d), EdgeStatus::PessimisticFloor)
    });
    let conjectured = TailRegion::new(Some(1.0 - 1.0 / mu), Some(1.0 + 1.0 / mu), EdgeStatus::Conjectured);
    Ok(RelTailRegions { proved, floor, conjectured })
}

/// Tail regions of the centered absolute Gamma-mixture family with shape
/// `alpha`, scale bound `lam` and standard deviation `phi`.
///
/// Floor `phi (1 + sqrt(r alpha + 1)) / sqrt(r alpha)` with
/// `r = ceil(phi^2 / (lam^2 alpha))`; conjectured edge `lam + sqrt(phi^2 + lam^2)`.
pub fn abs_tail_region(f: &AbsFamily, alpha: f64) -> Result<AbsTailRegions> {
    abs_regions(f.lam, f.phi, alpha)
}

fn abs_regions(lam: f64, phi: f64, alpha: f64) -> Result<AbsTailRegions> {
    check_alpha(alpha)?;
    if !(lam > 0.0 && lam <= phi / alpha.sqrt() * (1.0 + MEMBER_TOL)) {
        return Err(precondition(format!(
            "need 0 < lam <= phi / sqrt(alpha), got lam = {lam}, phi = {phi}, alpha = {alpha}"
        )));
    }
    let r = ceil_ratio(snap(phi * phi / (lam * lam)) / alpha).max(1.0);
    let ra = r * alpha;
    let floor_edge = phi * (1.0 + (ra + 1.0).sqrt()) / ra.sqrt();
    let conj_edge = lam + (phi * phi + lam * lam).sqrt();
    Ok(AbsTailRegions {
        r: r as u64,
        floor: TailRegion::new(Some(-floor_edge), Some(floor_edge), EdgeStatus::PessimisticFloor),
        conjectured: TailRegion::new(Some(-conj_edge), Some(conj_edge), EdgeStatus::Conjectured),
    })
}

/// Tail regions for `tr_m(A) / tr(A)` over the relative family with `m`
/// probe vectors (shape and rate `m/2`, scale bound `2/(m mu)`).
pub fn rel_estimator_regions(f: &RelFamily, m: usize) -> Result<RelTailRegions> {
    check_m(m)?;
    let half = m as f64 / 2.0;
    rel_tail_region(half * f.mu, half)
}

/// Symmetric tail regions for the error `tr_m(A) - tr(A)` over the absolute
/// family with `m` probe vectors (scale bound `2 lam/m`, standard deviation
/// `phi sqrt(2/m)`).
pub fn abs_estimator_regions(f: &AbsFamily, m: usize) -> Result<AbsTailRegions> {
    check_m(m)?;
    let m = m as f64;
    abs_regions(2.0 * f.lam / m, f.phi * (2.0 / m).sqrt(), m / 2.0)
}

/// A conjectured matrix-level tail threshold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailEpsilon {
    pub value: f64,
    pub status: EdgeStatus,
    /// Standard deviation of the worst-case estimator (`sqrt(2/(m mu))`
    /// relative, `phi sqrt(2/m)` absolute).
    pub std_dev: f64,
    /// `value / std_dev`. Tends to 1 for the absolute family as `m` grows and
    /// behaves like `sqrt(2/(m mu))` for the relative one.
    pub ratio_to_std_dev: f64,
}

/// Conjectured `eps_rel = 2/(m mu)` or `eps_abs = 2 lam/m + sqrt((2/m) phi^2 + (2 lam/m)^2)`.
pub fn matrix_tail_epsilons(m: usize, f: &Family) -> Result<TailEpsilon> {
    check_m(m)?;
    let m = m as f64;
    let (value, std_dev) = match f {
        Family::Relative(r) => (2.0 / (m * r.mu), (2.0 / (m * r.mu)).sqrt()),
        Family::Absolute(a) => {
            let s = 2.0 * a.lam / m;
            let var = 2.0 / m * a.phi * a.phi;
            (s + (var + s * s).sqrt(), var.sqrt())
        }
    };
    Ok(TailEpsilon { value, status: EdgeStatus::Conjectured, std_dev, ratio_to_std_dev: value / std_dev })
}

/// A family member together with the two perturbation weights whose
/// perturbed density attains a floor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FloorWitness {
    pub q: GammaMix,
    pub nu: (f64, f64),
    /// Number of equal weights in `q`.
    pub r: u64,
}

impl FloorWitness {
    /// `q + nu.0 psi + nu.1 psi'` with `psi, psi' ~ Gamma(1, beta)`; zero
    /// perturbation weights are left out.
    pub fn perturbed(&self) -> Result<GeneralGammaSum> {
        let mut g = self.q.to_general();
        for w in [self.nu.0, self.nu.1] {
            if w != 0.0 {
                g = g.with_term(w, 1.0, self.q.rate())?;
            }
        }
        Ok(g)
    }

    pub fn collapsed(&self) -> Result<GammaParams> {
        let w = self.q.weights()[0];
        let extra = [self.nu.0, self.nu.1].iter().filter(|&&v| v != 0.0).count() as f64;
        GammaParams::new(self.q.shape() * self.r as f64 + extra, self.q.rate() / w)
    }
}

/// Relative-family members whose perturbed modes sit at `1 + 1/(alpha r)`
/// (upper) and `1 - 1/(alpha r)` (lower), `r = ceil(mu/alpha)`.
pub fn rel_floor_witnesses(mu: f64, alpha: f64, beta: f64) -> Result<(FloorWitness, FloorWitness)> {
    check_alpha(alpha)?;
    if !(mu.is_finite() && mu > alpha) {
        return Err(precondition(format!("floor witness needs mu > alpha, got mu = {mu}, alpha = {alpha}")));
    }
    let r = ceil_ratio(mu / alpha);
    let w = beta / (alpha * r);
    let q = GammaMix::new(vec![w; r as usize], alpha, beta)?;
    let upper = FloorWitness { q: q.clone(), nu: (w, w), r: r as u64 };
    let lower = FloorWitness { q, nu: (0.0, 0.0), r: r as u64 };
    Ok((upper, lower))
}

/// Absolute-family member whose centered perturbed density has its outer
/// inflection point at the floor of [`abs_tail_region`].
pub fn abs_floor_witness(f: &AbsFamily, alpha: f64, beta: f64) -> Result<FloorWitness> {
    let region = abs_tail_region(f, alpha)?;
    let ra = region.r as f64 * alpha;
    let w = beta * f.phi / ra.sqrt();
    let q = GammaMix::new(vec![w; region.r as usize], alpha, beta)?;
    Ok(FloorWitness { q, nu: (w, w), r: region.r })
}

/// Smallest dimension that can hold a member of the relative family.
pub fn rel_min_dim(f: &RelFamily) -> usize {
    ceil_ratio(f.mu) as usize
}

/// Smallest dimension that can hold a member of the absolute family.
pub fn abs_min_dim(f: &AbsFamily) -> usize {
    ceil_ratio(f.rho()) as usize
}

/// Random member of the relative family in dimension `n`: a skewed Dirichlet
/// draw pulled toward the flat spectrum just far enough to satisfy the
/// 2-norm bound.
pub fn random_rel_member<R: Rng + ?Sized>(f: &RelFamily, n: usize, rng: &mut R) -> Result<Spectrum> {
    if n < rel_min_dim(f) {
        return Err(precondition(format!("dimension {n} too small for mu = {}", f.mu)));
    }
    let power = 1.0 + 3.0 * rng.random::<f64>();
    let mut d: Vec<f64> = (0..n).map(|_| (-(1.0 - rng.random::<f64>()).ln()).powf(power)).collect();
    let total: f64 = d.iter().sum();
    d.iter_mut().for_each(|v| *v /= total);
    let cap = 1.0 / f.mu;
    let flat = 1.0 / n as f64;
    // Smallest theta with (1 - theta) d_i + theta / n <= cap for all i.
    let theta = d
        .iter()
        .filter(|&&v| v > cap)
        .map(|&v| (v - cap) / (v - flat))
        .fold(0.0f64, f64::max)
        .min(1.0);
    let mut v: Vec<f64> = d.iter().map(|&v| ((1.0 - theta) * v + theta * flat).min(cap)).collect();
    // Restore the unit trace lost to the clamp above (at most a few ulps).
    let total: f64 = v.iter().sum();
    v.iter_mut().for_each(|x| *x /= total);
    Spectrum::new(v)
}

/// Random member of the absolute family in dimension `n`: a random direction
/// pulled toward a flat signed vector until the 2-norm bound holds.
pub fn random_abs_member<R: Rng + ?Sized>(f: &AbsFamily, n: usize, rng: &mut R) -> Result<Spectrum> {
    if n < abs_min_dim(f) {
        return Err(precondition(format!("dimension {n} too small for rho = {}", f.rho())));
    }
    let g: Vec<f64> = (0..n)
        .map(|_| {
            let u: f64 = rng.random();
            let v: f64 = rng.random();
            (-2.0 * (1.0 - u).ln()).sqrt() * (std::f64::consts::TAU * v).cos()
        })
        .collect();
    let flat: Vec<f64> = g.iter().map(|&v| if v < 0.0 { -1.0 } else { 1.0 }).collect();
    let blend = |theta: f64| -> Vec<f64> {
        let v: Vec<f64> = g.iter().zip(&flat).map(|(a, b)| (1.0 - theta) * a + theta * b).collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        v.iter().map(|x| x * f.phi / norm).collect()
    };
    let fits = |v: &[f64]| max_abs(v) <= f.lam;
    let mut v = blend(0.0);
    if !fits(&v) {
        let (mut lo, mut hi) = (0.0, 1.0);
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if fits(&blend(mid)) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        v = blend(hi);
        // The flat end can overshoot by an ulp when n == rho exactly.
        v.iter_mut().for_each(|x| *x = x.clamp(-f.lam, f.lam));
    }
    Spectrum::new(v)
}

/// Random pair `(mu, lam)` of relative-family members with `mu ≼ lam`, both
/// of length `n`. About a third of the pairs use the worst-case spectrum as
/// `lam`.
pub fn random_rel_pair<R: Rng + ?Sized>(f: &RelFamily, n: usize, rng: &mut R) -> Result<(Spectrum, Spectrum)> {
    let member = random_rel_member(f, n, rng)?;
    if rng.random::<f64>() < 1.0 / 3.0 {
        return Ok((member, worst_rel_spectrum(f).padded(n)));
    }
    let mut mu = member.to_vec();
    let moves = rng.random_range(1..=2 * n);
    soften_classical(&mut mu, moves, rng);
    Ok((Spectrum::new(mu)?, member))
}

/// Random pair `(mu, lam)` of absolute-family members with `mu ≼_F lam`, both
/// of length `n`. About a third of the pairs involve the worst-case spectrum
/// or its negation.
pub fn random_abs_pair<R: Rng + ?Sized>(f: &AbsFamily, n: usize, rng: &mut R) -> Result<(Spectrum, Spectrum)> {
    let member = random_abs_member(f, n, rng)?;
    let u: f64 = rng.random();
    if u < 1.0 / 6.0 {
        return Ok((member, worst_abs_spectrum(f).padded(n)));
    }
    if u < 1.0 / 3.0 {
        let neg: Vec<f64> = worst_abs_spectrum(f).iter().map(|v| -v).collect();
        return Ok((Spectrum::new(neg)?.padded(n), member));
    }
    let mut mu = member.to_vec();
    let moves = rng.random_range(1..=2 * n);
    soften_frobenius(&mut mu, moves, f.lam, rng);
    Ok((Spectrum::new(mu)?, member))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gamma_mix::trace_estimator_law;
    use crate::majorization::{f_majorizes, majorizes};
    use crate::rng::CounterRng;
    use approx::assert_relative_eq;

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
    }

    #[test]
    fn family_constructors_validate() {
        assert!(RelFamily::new(0.5).is_err());
        assert!(RelFamily::new(1.0).is_ok());
        assert!(AbsFamily::new(2.0, 1.0).is_err());
        assert!(AbsFamily::new(0.0, 1.0).is_err());
        assert!(AbsFamily::new(1.0, 1.0).is_ok());
    }

    #[test]
    fn worst_spectra_examples() {
        let w = worst_rel_spectrum(&RelFamily::new(2.5).unwrap());
        assert!(close(&w, &[0.4, 0.4, 0.2], 1e-15));
        let w = worst_rel_spectrum(&RelFamily::new(3.0).unwrap());
        assert!(close(&w, &[1.0 / 3.0; 3], 1e-15));
        assert_eq!(worst_rel_spectrum(&RelFamily::new(1.0).unwrap()).entries(), &[1.0]);

        let w = worst_abs_spectrum(&AbsFamily::new(1.0, 2f64.sqrt()).unwrap());
        assert!(close(&w, &[1.0, 1.0], 1e-15));
        let w = worst_abs_spectrum(&AbsFamily::new(1.0, 2.5f64.sqrt()).unwrap());
        assert!(close(&w, &[1.0, 1.0, 0.5f64.sqrt()], 1e-15));
        assert_eq!(worst_abs_spectrum(&AbsFamily::new(1.0, 1.0).unwrap()).entries(), &[1.0]);
    }

    #[test]
    fn rank_examples() {
        assert_relative_eq!(effective_rank(&[0.4, 0.4, 0.2]).unwrap(), 2.5, epsilon = 1e-15);
        assert_relative_eq!(effective_rank(&[0.3; 7]).unwrap(), 7.0, epsilon = 1e-14);
        assert_eq!(effective_rank(&[1.0, 0.0, 0.0]).unwrap(), 1.0);
        assert!(effective_rank(&[1.0, -0.5]).is_err());
        assert!(matches!(effective_rank(&[0.0, 0.0]), Err(Error::Degenerate)));

        assert_relative_eq!(stable_rank(&[1.0, 1.0, 0.5f64.sqrt()]).unwrap(), 2.5, epsilon = 1e-15);
        assert_eq!(stable_rank(&[1.0, -1.0]).unwrap(), 2.0);
        assert_eq!(stable_rank(&[3.0]).unwrap(), 1.0);
        assert!(matches!(stable_rank(&[0.0]), Err(Error::Degenerate)));
    }

    #[test]
    fn summary_statistics_of_worst_spectra() {
        for mu in [1.0, 1.3, 2.5, 3.0, 7.77, 10.0] {
            let f = RelFamily::new(mu).unwrap();
            assert_relative_eq!(effective_rank(&worst_rel_spectrum(&f)).unwrap(), mu, max_relative = 1e-12);
        }
        for (lam, phi) in [(1.0, 1.0), (1.0, 2f64.sqrt()), (0.5, 2.0), (0.3, 1.7)] {
            let f = AbsFamily::new(lam, phi).unwrap();
            assert_relative_eq!(stable_rank(&worst_abs_spectrum(&f)).unwrap(), f.rho(), max_relative = 1e-12);
        }
    }

    #[test]
    fn extremal_law_examples() {
        let g = extremal_rel_law(&RelFamily::new(1.0).unwrap(), 2).unwrap();
        assert_eq!((g.shape(), g.rate()), (1.0, 1.0));
        let g = extremal_rel_law(&RelFamily::new(10.0).unwrap(), 100).unwrap();
        assert_eq!((g.shape(), g.rate()), (500.0, 500.0));
        let g = extremal_rel_law(&RelFamily::new(2.5).unwrap(), 4).unwrap();
        assert_eq!((g.shape(), g.rate()), (5.0, 5.0));

        let (s, g) = extremal_abs_law(&AbsFamily::new(1.0, 1.0).unwrap(), 2, 1).unwrap();
        assert_eq!((s, g.shape(), g.rate()), (1.0, 1.0, 1.0));
        let (s, g) = extremal_abs_law(&AbsFamily::new(1.0, 2f64.sqrt()).unwrap(), 10, 1).unwrap();
        assert_eq!(s, 1.0);
        assert_relative_eq!(g.shape(), 10.0, epsilon = 1e-13);
        assert_eq!(g.rate(), 5.0);
        assert_relative_eq!(g.variance(), 0.4, epsilon = 1e-13);
        assert!(extremal_abs_law(&AbsFamily::new(1.0, 1.0).unwrap(), 2, 0).is_err());
        assert!(extremal_rel_law(&RelFamily::new(1.0).unwrap(), 0).is_err());
    }

    #[test]
    fn membership_examples() {
        let q = |w: Vec<f64>| GammaMix::new(w, 1.0, 1.0).unwrap();
        assert!(in_qrel(&q(vec![0.4, 0.4, 0.2]), 2.5));
        assert!(!in_qrel(&q(vec![1.0]), 2.0));
        assert!(in_qrel(&q(vec![0.5, 0.5]), 2.0));

        let f = AbsFamily::new(1.0, 2f64.sqrt()).unwrap();
        assert!(in_qabs(&q(vec![1.0, -1.0]), &f));
        assert!(!in_qabs(&q(vec![2.0]), &AbsFamily::new(1.0, 2.0).unwrap()));
        assert!(in_qabs(&q(vec![1.0, 1.0]), &f));
    }

    #[test]
    fn membership_nests_in_mu() {
        let q = GammaMix::new(vec![0.25; 4], 1.0, 1.0).unwrap();
        assert!(in_qrel(&q, 4.0));
        for mu in [1.0, 2.0, 3.5, 4.0] {
            assert!(in_qrel(&q, mu));
        }
        assert!(!in_qrel(&q, 4.5));
    }

    #[test]
    fn rel_region_examples() {
        let r = rel_tail_region(2.5, 1.0).unwrap();
        let floor = r.floor.unwrap();
        assert_relative_eq!(floor.upper_edge().unwrap(), 1.0 + 1.0 / 3.0, epsilon = 1e-15);
        assert_eq!(floor.upper.unwrap().status, EdgeStatus::PessimisticFloor);

        let r = rel_tail_region(1.0, 1.0).unwrap();
        assert_eq!((r.proved.lower_edge(), r.proved.upper_edge()), (Some(0.0), Some(1.5)));
        assert_eq!(r.proved.lower.unwrap().status, EdgeStatus::Proved);
        assert!(r.floor.is_none());

        let r = rel_tail_region(4.0, 1.0).unwrap();
        assert_eq!((r.conjectured.lower_edge(), r.conjectured.upper_edge()), (Some(0.75), Some(1.25)));
        assert_eq!(r.conjectured.upper.unwrap().status, EdgeStatus::Conjectured);

        assert!(rel_tail_region(0.5, 1.0).is_err());
        assert!(r.proved.contains(1.5) && r.proved.contains(0.0) && !r.proved.contains(1.0));
    }

    #[test]
    fn rel_floor_lies_inside_proved_region() {
        // The floor cannot exceed the proved safe edge.
        for alpha in [0.5, 1.0, 2.0, 4.0] {
            for mu in [1.01, 2.5, 5.0, 10.0, 33.3] {
                if mu <= alpha {
                    continue;
                }
                let r = rel_tail_region(mu, alpha).unwrap();
                let floor = r.floor.unwrap();
                assert!(floor.upper_edge().unwrap() <= r.proved.upper_edge().unwrap() + 1e-15);
                assert!(floor.lower_edge().unwrap() >= r.proved.lower_edge().unwrap() - 1e-15);
            }
        }
    }

    #[test]
    fn abs_region_examples() {
        let f = AbsFamily::new(1.0, 1.0).unwrap();
        let r = abs_tail_region(&f, 1.0).unwrap();
        assert_relative_eq!(r.floor.upper_edge().unwrap(), 1.0 + 2f64.sqrt(), epsilon = 1e-14);
        assert_relative_eq!(r.floor.lower_edge().unwrap(), -(1.0 + 2f64.sqrt()), epsilon = 1e-14);
        assert_relative_eq!(r.conjectured.upper_edge().unwrap(), 1.0 + 2f64.sqrt(), epsilon = 1e-14);

        let f = AbsFamily::new(1.0, 2f64.sqrt()).unwrap();
        let r = abs_tail_region(&f, 1.0).unwrap();
        assert_eq!(r.r, 2);
        assert_relative_eq!(r.floor.upper_edge().unwrap(), 1.0 + 3f64.sqrt(), epsilon = 1e-14);

        assert!(abs_tail_region(&AbsFamily::new(1.0, 1.0).unwrap(), 4.0).is_err());
    }

    #[test]
    fn abs_floor_never_exceeds_conjecture() {
        for alpha in [0.5, 1.0, 3.0, 8.0] {
            for (lam, phi) in [(0.1, 1.0), (0.3, 1.7), (0.5, 2.0), (1.0, 3.0), (0.2, 0.9)] {
                let f = AbsFamily::new(lam, phi).unwrap();
                let Ok(r) = abs_tail_region(&f, alpha) else { continue };
                assert!(r.floor.upper_edge().unwrap() <= r.conjectured.upper_edge().unwrap() + 1e-12);
            }
        }
    }

    #[test]
    fn estimator_regions_match_matrix_epsilons() {
        let f = RelFamily::new(10.0).unwrap();
        let r = rel_estimator_regions(&f, 100).unwrap();
        assert_relative_eq!(r.proved.upper_edge().unwrap(), 1.01, epsilon = 1e-15);
        assert_relative_eq!(r.proved.lower_edge().unwrap(), 0.98, epsilon = 1e-15);
        assert_relative_eq!(r.conjectured.upper_edge().unwrap(), 1.002, epsilon = 1e-15);
        for m in [1, 2, 7, 200] {
            for (lam, phi) in [(1.0, 1.0), (0.5, 2.0)] {
                let f = AbsFamily::new(lam, phi).unwrap();
                let r = abs_estimator_regions(&f, m).unwrap();
                let e = matrix_tail_epsilons(m, &Family::Absolute(f)).unwrap();
                assert_relative_eq!(r.conjectured.upper_edge().unwrap(), e.value, max_relative = 1e-14);
            }
        }
    }

    #[test]
    fn matrix_epsilon_examples() {
        let e = matrix_tail_epsilons(100, &Family::Relative(RelFamily::new(10.0).unwrap())).unwrap();
        assert_relative_eq!(e.value, 0.002, epsilon = 1e-16);
        assert_eq!(e.status, EdgeStatus::Conjectured);
        let abs = Family::Absolute(AbsFamily::new(1.0, 1.0).unwrap());
        let e = matrix_tail_epsilons(2, &abs).unwrap();
        assert_relative_eq!(e.value, 1.0 + 2f64.sqrt(), epsilon = 1e-14);
        let e = matrix_tail_epsilons(200, &abs).unwrap();
        assert_relative_eq!(e.value, 0.01 + 0.0101f64.sqrt(), epsilon = 1e-14);
        assert!((e.ratio_to_std_dev - 1.0).abs() < 0.11);
        let far = matrix_tail_epsilons(2_000_000, &abs).unwrap();
        assert!((far.ratio_to_std_dev - 1.0).abs() < 0.002);
    }

    #[test]
    fn rel_witness_collapses_to_floor_mode() {
        for (alpha, mu) in [(1.0, 2.5), (2.0, 5.0), (1.0, 1.01), (0.5, 3.2)] {
            let beta = 1.7;
            let (upper, lower) = rel_floor_witnesses(mu, alpha, beta).unwrap();
            assert!(in_qrel(&upper.q, mu));
            let r = (mu / alpha).ceil();
            let g = upper.collapsed().unwrap();
            assert_relative_eq!(g.mode(), 1.0 + 1.0 / (alpha * r), max_relative = 1e-14);
            let g = lower.collapsed().unwrap();
            assert_relative_eq!(g.mode(), 1.0 - 1.0 / (alpha * r), max_relative = 1e-14);
            assert_eq!(upper.perturbed().unwrap().terms().len(), r as usize + 2);
        }
        assert!(rel_floor_witnesses(1.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn abs_witness_is_member_with_floor_inflection() {
        for (lam, phi, alpha) in [(1.0, 1.0, 1.0), (1.0, 2f64.sqrt(), 1.0), (0.5, 2.0, 1.0), (0.5, 2.0, 4.0)] {
            let f = AbsFamily::new(lam, phi).unwrap();
            let w = abs_floor_witness(&f, alpha, 2.0).unwrap();
            assert!(in_qabs(&w.q, &f));
            let g = w.collapsed().unwrap();
            let (_, hi) = g.inflection_points();
            let edge = abs_tail_region(&f, alpha).unwrap().floor.upper_edge().unwrap();
            assert_relative_eq!(hi.unwrap() - w.q.mean(), edge, max_relative = 1e-12);
        }
    }

    #[test]
    fn integer_mu_estimator_law_is_extremal_law() {
        for mu in [1.0, 2.0, 5.0] {
            for m in [2, 4, 10] {
                let f = RelFamily::new(mu).unwrap();
                let law = trace_estimator_law(&worst_rel_spectrum(&f), m).unwrap();
                let g = extremal_rel_law(&f, m).unwrap();
                let single = GammaMix::new(vec![1.0], g.shape(), g.rate()).unwrap();
                for u in [-10.0, -1.0, -0.1, 0.1, 1.0, 10.0] {
                    assert!((law.cf(u) - single.cf(u)).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn worst_rel_spectrum_is_maximal() {
        let mut rng = CounterRng::new(101, 0);
        for mu in [1.0, 1.5, 2.5, 4.0, 10.0] {
            let f = RelFamily::new(mu).unwrap();
            let worst = worst_rel_spectrum(&f);
            for i in 0..20 {
                let n = rel_min_dim(&f) + i % 6;
                let s = random_rel_member(&f, n, &mut rng).unwrap();
                assert!((s.iter().sum::<f64>() - 1.0).abs() < 1e-12);
                assert!(s[0] <= 1.0 / mu + 1e-15, "{s:?}");
                assert!(majorizes(&s, &worst).unwrap(), "{s:?}");
            }
        }
    }

    #[test]
    fn worst_abs_spectrum_is_maximal_and_negation_minimal() {
        let mut rng = CounterRng::new(102, 0);
        for (lam, phi) in [(1.0, 1.0), (1.0, 2f64.sqrt()), (0.5, 2.0), (0.3, 1.0)] {
            let f = AbsFamily::new(lam, phi).unwrap();
            let worst = worst_abs_spectrum(&f);
            let neg: Vec<f64> = worst.iter().map(|v| -v).collect();
            for i in 0..25 {
                let n = abs_min_dim(&f) + i % 5;
                let s = random_abs_member(&f, n, &mut rng).unwrap();
                assert!((s.frobenius_sq() - phi * phi).abs() < 1e-12 * phi * phi);
                assert!(max_abs(&s) <= lam);
                assert!(f_majorizes(&s, &worst), "{s:?}");
                assert!(f_majorizes(&neg, &s), "{s:?}");
            }
        }
    }

    #[test]
    fn random_pairs_are_ordered_members() {
        let mut rng = CounterRng::new(103, 0);
        let f = RelFamily::new(2.5).unwrap();
        for _ in 0..50 {
            let (mu, lam) = random_rel_pair(&f, 5, &mut rng).unwrap();
            assert_eq!(mu.len(), lam.len());
            assert!(majorizes(&mu, &lam).unwrap());
            for s in [&mu, &lam] {
                assert!(in_qrel(&trace_estimator_law(s, 2).unwrap(), 2.5));
            }
        }
        let f = AbsFamily::new(0.5, 2.0).unwrap();
        for _ in 0..50 {
            let (mu, lam) = random_abs_pair(&f, 18, &mut rng).unwrap();
            assert_eq!(mu.len(), lam.len());
            assert!(f_majorizes(&mu, &lam));
            for s in [&mu, &lam] {
                assert!(max_abs(s) <= 0.5 + 1e-15);
                assert!((s.frobenius_sq() - 4.0).abs() < 1e-12);
            }
        }
    }
}
