//! Majorization orders on eigenvalue vectors and two-coordinate chains.
//!
//! Vectors of different lengths are compared after padding the shorter one
//! with zeros. Prefix-sum comparisons use a tolerance of `1e-12` relative to
//! the totals involved.

use crate::error::{invalid, precondition, Error, Result};
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::ops::Deref;

const REL_TOL: f64 = 1e-12;

/// Eigenvalues of a symmetric matrix, stored sorted in descending order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Spectrum(Vec<f64>);

impl Spectrum {
    pub fn new(mut entries: Vec<f64>) -> Result<Self> {
        if entries.iter().any(|v| !v.is_finite()) {
            return Err(invalid("spectrum entries must be finite"));
        }
        entries.sort_by(|a, b| b.total_cmp(a));
        Ok(Spectrum(entries))
    }

    pub fn entries(&self) -> &[f64] {
        &self.0
    }

    /// Entries followed by zeros up to length `n`, re-sorted.
    pub fn padded(&self, n: usize) -> Spectrum {
        let mut v = self.0.clone();
        v.resize(n.max(v.len()), 0.0);
        Spectrum::new(v).expect("finite")
    }

    pub fn frobenius_sq(&self) -> f64 {
        self.0.iter().map(|v| v * v).sum()
    }
}

impl Deref for Spectrum {
    type Target = [f64];
    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl TryFrom<Vec<f64>> for Spectrum {
    type Error = Error;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        Spectrum::new(v)
    }
}

impl From<Spectrum> for Vec<f64> {
    fn from(s: Spectrum) -> Vec<f64> {
        s.0
    }
}

fn sorted_desc(v: &[f64], n: usize) -> Vec<f64> {
    let mut out = v.to_vec();
    out.resize(n.max(v.len()), 0.0);
    out.sort_by(|a, b| b.total_cmp(a));
    out
}

fn prefix_sums(v: &[f64]) -> Vec<f64> {
    v.iter()
        .scan(0.0, |acc, &x| {
            *acc += x;
            Some(*acc)
        })
        .collect()
}

fn check_nonnegative(v: &[f64], name: &str) -> Result<()> {
    if v.iter().any(|&x| x < 0.0 || !x.is_finite()) {
        return Err(invalid(format!("{name} must be finite and nonnegative")));
    }
    Ok(())
}

fn tolerance(a: &[f64], b: &[f64]) -> f64 {
    let scale = a.iter().chain(b).map(|x| x.abs()).sum::<f64>();
    REL_TOL * scale.max(f64::MIN_POSITIVE)
}

/// Prefix-sum dominance on already-sorted, equal-length nonnegative vectors.
fn weak_unchecked(mu: &[f64], lam: &[f64], tol: f64) -> bool {
    let n = mu.len().max(lam.len());
    let pm = prefix_sums(&sorted_desc(mu, n));
    let pl = prefix_sums(&sorted_desc(lam, n));
    pm.iter().zip(&pl).all(|(a, b)| *a <= *b + tol)
}

/// `mu ≼ lam`: prefix sums of `lam` dominate and the totals agree.
pub fn majorizes(mu: &[f64], lam: &[f64]) -> Result<bool> {
    check_nonnegative(mu, "mu")?;
    check_nonnegative(lam, "lam")?;
    let tol = tolerance(mu, lam);
    let total = (mu.iter().sum::<f64>() - lam.iter().sum::<f64>()).abs();
    Ok(total <= tol && weak_unchecked(mu, lam, tol))
}

/// `mu ≼_w lam`: prefix sums of `lam` dominate those of `mu`.
pub fn weakly_majorizes(mu: &[f64], lam: &[f64]) -> Result<bool> {
    check_nonnegative(mu, "mu")?;
    check_nonnegative(lam, "lam")?;
    Ok(weak_unchecked(mu, lam, tolerance(mu, lam)))
}

/// Zero-based position `j` in sorted order such that the prefix inequality is
/// strict for every prefix length `j + 1, ..., n`; `None` when the last prefix
/// is tight (no slack).
pub fn leading_slack_index(mu: &[f64], lam: &[f64]) -> Result<Option<usize>> {
    if !weakly_majorizes(mu, lam)? {
        return Err(precondition("leading slack index needs mu ≼_w lam"));
    }
    Ok(slack_index_unchecked(mu, lam, tolerance(mu, lam)))
}

fn slack_index_unchecked(mu: &[f64], lam: &[f64], tol: f64) -> Option<usize> {
    let n = mu.len().max(lam.len());
    let pm = prefix_sums(&sorted_desc(mu, n));
    let pl = prefix_sums(&sorted_desc(lam, n));
    let mut j = None;
    for l in (0..n).rev() {
        if pl[l] - pm[l] > tol {
            j = Some(l);
        } else {
            break;
        }
    }
    j
}

/// Elementwise `(min(s, 0), max(s, 0))`.
pub fn pos_neg_split(s: &[f64]) -> (Vec<f64>, Vec<f64>) {
    (s.iter().map(|&v| v.min(0.0)).collect(), s.iter().map(|&v| v.max(0.0)).collect())
}

fn squares(v: &[f64]) -> Vec<f64> {
    v.iter().map(|x| x * x).collect()
}

/// `mu ≼_F lam`: positive parts of `lam` are more skewed, negative parts more
/// clustered, and the sums of squares agree.
pub fn f_majorizes(mu: &[f64], lam: &[f64]) -> bool {
    if mu.iter().chain(lam).any(|v| !v.is_finite()) {
        return false;
    }
    let (mu_neg, mu_pos) = pos_neg_split(mu);
    let (lam_neg, lam_pos) = pos_neg_split(lam);
    let (mp, mn, lp, ln) = (squares(&mu_pos), squares(&mu_neg), squares(&lam_pos), squares(&lam_neg));
    let total_l: f64 = lam.iter().map(|v| v * v).sum();
    let total_m: f64 = mu.iter().map(|v| v * v).sum();
    let tol = REL_TOL * total_l.max(total_m).max(f64::MIN_POSITIVE);
    (total_l - total_m).abs() <= tol && weak_unchecked(&mp, &lp, tol) && weak_unchecked(&ln, &mn, tol)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OrderKind {
    Classical,
    Frobenius,
}

/// Sign pattern of a single `≼_F` step on its two moved coordinates, with
/// `prev` in the role of `mu` and `next` in the role of `lam`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StepForm {
    /// `mu_k < lam_k <= 0 <= mu_j < lam_j`.
    SlackElimination,
    /// `0 <= lam_k < mu_k <= mu_j < lam_j`.
    Positive,
    /// `mu_k < lam_k <= lam_j < mu_j <= 0`.
    Negative,
}

/// The coordinates moved by one chain step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepPair {
    /// Coordinate whose square grows.
    pub j: usize,
    /// Coordinate whose square shrinks.
    pub k: usize,
}

/// Sequence `mu = eta_0, eta_1, ..., eta_r = lam` of equal-length coordinate
/// vectors, consecutive ones differing in two coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MajorizationChain {
    steps: Vec<Vec<f64>>,
    kind: OrderKind,
}

impl MajorizationChain {
    pub fn steps(&self) -> &[Vec<f64>] {
        &self.steps
    }

    pub fn kind(&self) -> OrderKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Consecutive `(prev, next)` pairs.
    pub fn pairs(&self) -> impl Iterator<Item = (&[f64], &[f64])> {
        self.steps.windows(2).map(|w| (w[0].as_slice(), w[1].as_slice()))
    }

    /// Checks every chain invariant against the original inputs.
    pub fn validate(&self, mu: &[f64], lam: &[f64]) -> Result<()> {
        let fail = |msg: String| Err(Error::Precondition(msg));
        let Some(first) = self.steps.first() else {
            return fail("empty chain".into());
        };
        let n = first.len();
        if self.steps.iter().any(|s| s.len() != n) {
            return fail("steps have different lengths".into());
        }
        let scale: f64 = match self.kind {
            OrderKind::Classical => first.iter().sum(),
            OrderKind::Frobenius => first.iter().map(|v| v * v).sum(),
        };
        let tol = 1e-10 * scale.max(f64::MIN_POSITIVE).sqrt().max(scale);
        let same_multiset = |a: &[f64], b: &[f64]| {
            let m = a.len().max(b.len());
            sorted_desc(a, m).iter().zip(sorted_desc(b, m)).all(|(x, y)| (x - y).abs() <= tol)
        };
        if !same_multiset(first, mu) {
            return fail(format!("first step {first:?} does not match {mu:?}"));
        }
        let last = self.steps.last().expect("non-empty");
        if !same_multiset(last, lam) {
            return fail(format!("last step {last:?} does not match {lam:?}"));
        }
        for (i, (prev, next)) in self.pairs().enumerate() {
            let changed = prev.iter().zip(next).filter(|(a, b)| (*a - *b).abs() > tol).count();
            if changed > 2 {
                return fail(format!("step {i} changes {changed} coordinates"));
            }
            match self.kind {
                OrderKind::Classical => {
                    let (sp, sn): (f64, f64) = (prev.iter().sum(), next.iter().sum());
                    if (sp - sn).abs() > REL_TOL * scale.max(f64::MIN_POSITIVE) * 10.0 {
                        return fail(format!("step {i} changes the sum"));
                    }
                    if !majorizes(prev, next)? {
                        return fail(format!("step {i} violates ≼"));
                    }
                    if changed > 0 && classical_step(prev, next).is_none() {
                        return fail(format!("step {i} is not a two-coordinate transfer"));
                    }
                }
                OrderKind::Frobenius => {
                    let sq = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>();
                    if (sq(prev) - sq(next)).abs() > REL_TOL * scale.max(f64::MIN_POSITIVE) * 10.0 {
                        return fail(format!("step {i} changes the sum of squares"));
                    }
                    if !f_majorizes(prev, next) {
                        return fail(format!("step {i} violates ≼_F"));
                    }
                    if changed > 0 && frobenius_step(prev, next).is_none() {
                        return fail(format!("step {i} matches none of the three step forms"));
                    }
                }
            }
        }
        Ok(())
    }
}

fn changed_pair(prev: &[f64], next: &[f64]) -> Option<(usize, usize)> {
    let diff: Vec<usize> = (0..prev.len()).filter(|&i| prev[i] != next[i]).collect();
    match diff.as_slice() {
        [a, b] => Some((*a, *b)),
        _ => None,
    }
}

/// Identifies a classical step `0 <= lam_k < mu_k <= mu_j < lam_j`.
pub fn classical_step(prev: &[f64], next: &[f64]) -> Option<StepPair> {
    if prev.len() != next.len() {
        return None;
    }
    let (a, b) = changed_pair(prev, next)?;
    let (j, k) = if next[a] > prev[a] { (a, b) } else { (b, a) };
    let ok = 0.0 <= next[k] && next[k] < prev[k] && prev[k] <= prev[j] && prev[j] < next[j];
    ok.then_some(StepPair { j, k })
}

/// Identifies which of the three `≼_F` step forms a step takes.
pub fn frobenius_step(prev: &[f64], next: &[f64]) -> Option<(StepForm, StepPair)> {
    if prev.len() != next.len() {
        return None;
    }
    let (a, b) = changed_pair(prev, next)?;
    for (j, k) in [(a, b), (b, a)] {
        let (mj, mk, lj, lk) = (prev[j], prev[k], next[j], next[k]);
        if mk < lk && lk <= 0.0 && 0.0 <= mj && mj < lj {
            return Some((StepForm::SlackElimination, StepPair { j, k }));
        }
        if 0.0 <= lk && lk < mk && mk <= mj && mj < lj {
            return Some((StepForm::Positive, StepPair { j, k }));
        }
        if mk < lk && lk <= lj && lj < mj && mj <= 0.0 {
            return Some((StepForm::Negative, StepPair { j, k }));
        }
    }
    None
}

/// One transfer inside a sorted vector: positions with values before and
/// after.
#[derive(Debug, Clone, Copy)]
struct Transfer {
    gain: usize,
    lose: usize,
    gain_before: f64,
    gain_after: f64,
    lose_before: f64,
    lose_after: f64,
}

impl Transfer {
    /// The same move walked backwards: `lose` regains what `gain` received.
    fn reversed(self) -> Transfer {
        Transfer {
            gain: self.lose,
            lose: self.gain,
            gain_before: self.lose_after,
            gain_after: self.lose_before,
            lose_before: self.gain_after,
            lose_after: self.gain_before,
        }
    }
}

/// Walks from `upper` (sorted descending, the majorizing vector) down to
/// `lower` by two-position transfers; every intermediate vector stays sorted
/// and majorizes the next. Returns the transfers in that order.
fn descend_transfers(upper: &[f64], lower: &[f64], tol: f64) -> Result<Vec<Transfer>> {
    let n = upper.len();
    let mut cur = upper.to_vec();
    let mut out = Vec::new();
    for _ in 0..=n {
        let Some(j) = (0..n).rev().find(|&i| cur[i] - lower[i] > tol) else {
            return Ok(out);
        };
        let Some(k) = (j + 1..n).find(|&i| lower[i] - cur[i] > tol) else {
            return Err(Error::Numerical("majorization chain lost its target".into()));
        };
        let (j_before, k_before) = (cur[j], cur[k]);
        let over = cur[j] - lower[j];
        let under = lower[k] - cur[k];
        if over <= under {
            cur[j] = lower[j];
            cur[k] = if over == under { lower[k] } else { cur[k] + over };
        } else {
            cur[k] = lower[k];
            cur[j] -= under;
        }
        // Moving down the chain, j loses and k gains.
        out.push(Transfer {
            gain: k,
            lose: j,
            gain_before: k_before,
            gain_after: cur[k],
            lose_before: j_before,
            lose_after: cur[j],
        });
    }
    Err(Error::Numerical("majorization chain did not terminate".into()))
}

/// Transfers leading upward from `lower` to `upper`.
fn ascend_transfers(lower: &[f64], upper: &[f64], tol: f64) -> Result<Vec<Transfer>> {
    let mut t = descend_transfers(upper, lower, tol)?;
    t.reverse();
    Ok(t.into_iter().map(Transfer::reversed).collect())
}

/// Chain `mu ≼ eta_1 ≼ ... ≼ lam` of sorted vectors, each step moving mass
/// from a smaller coordinate to a larger one. At most `n - 1` steps.
pub fn chain_classical(mu: &[f64], lam: &[f64]) -> Result<MajorizationChain> {
    if !majorizes(mu, lam)? {
        return Err(precondition("classical chain needs mu ≼ lam"));
    }
    let n = mu.len().max(lam.len());
    let x = sorted_desc(mu, n);
    let y = sorted_desc(lam, n);
    let tol = 1e-14 * tolerance(&x, &y) / REL_TOL;
    let mut cur = x;
    let mut steps = vec![cur.clone()];
    for t in ascend_transfers(&cur.clone(), &y, tol)? {
        cur[t.gain] = t.gain_after;
        cur[t.lose] = t.lose_after;
        steps.push(cur.clone());
    }
    Ok(MajorizationChain { steps, kind: OrderKind::Classical })
}

/// Chain `mu ≼_F eta_1 ≼_F ... ≼_F lam` on padded coordinate vectors.
///
/// Slack-elimination moves come first: a nonnegative coordinate grows while a
/// negative one shrinks toward zero until the positive and negative squared
/// parts are each majorized with equal totals. Then classical chains run on
/// the positive squares and on the negative squares. Zeros are appended when a
/// move needs a coordinate that does not exist yet.
///
/// The shrinking coordinate is always the smallest negative, which only
/// lowers the last negative prefix sums. Each slack-elimination move zeroes a
/// negative coordinate or advances the leading positive slack index, and each
/// within-sign chain needs at most `n - 1` moves, so a chain on padded length
/// `n` has at most `4n` steps. In random testing the chains never exceeded
/// `2n - 3` steps; the tests hold them to `2n + 2`.
pub fn chain_frobenius(mu: &[f64], lam: &[f64]) -> Result<MajorizationChain> {
    if !f_majorizes(mu, lam) {
        return Err(precondition("Frobenius chain needs mu ≼_F lam"));
    }
    let mut n = mu.len().max(lam.len());
    let mut cur = mu.to_vec();
    cur.resize(n, 0.0);
    let total: f64 = lam.iter().map(|v| v * v).sum();
    let tol = 1e-14 * total.max(f64::MIN_POSITIVE);
    let mut steps = vec![cur.clone()];
    let (lam_neg, lam_pos) = pos_neg_split(lam);
    let target_pos = squares(&lam_pos);
    let target_neg = squares(&lam_neg);

    let limit = 8 * n + 16;
    let mut moves = 0;
    loop {
        let (cur_neg, cur_pos) = pos_neg_split(&cur);
        let p = sorted_desc(&squares(&cur_pos), n);
        let q = sorted_desc(&squares(&cur_neg), n);
        let lp = sorted_desc(&target_pos, n);
        let lq = sorted_desc(&target_neg, n);
        let slack = lp.iter().sum::<f64>() - p.iter().sum::<f64>();
        if slack <= tol {
            break;
        }
        moves += 1;
        if moves > limit {
            return Err(Error::Numerical("slack elimination did not terminate".into()));
        }
        let Some(jp) = slack_index_unchecked(&p, &lp, tol) else {
            return Err(Error::Numerical("no positive slack index".into()));
        };
        let (pp, plp) = (prefix_sums(&p), prefix_sums(&lp));
        let mut cap = (jp..n).map(|l| plp[l] - pp[l]).fold(f64::INFINITY, f64::min);
        if jp > 0 {
            cap = cap.min(p[jp - 1] - p[jp]);
        }
        // Shrink the smallest negative square. Only prefix sums from its
        // position on drop, and the negative slack equals the positive one,
        // so the cap above already keeps lam's negatives majorized.
        let Some(ne) = (0..n).rev().find(|&i| q[i] > 0.0) else {
            return Err(Error::Numerical("slack left but no negative coordinate".into()));
        };
        let (pq, plq) = (prefix_sums(&q), prefix_sums(&lq));
        cap = cap.min((ne..n).map(|l| pq[l] - plq[l]).fold(f64::INFINITY, f64::min));
        cap = cap.min(q[ne]);
        if !(cap > 0.0) {
            return Err(Error::Numerical("slack elimination stalled".into()));
        }

        let mut negatives: Vec<usize> = (0..cur.len()).filter(|&i| cur[i] < 0.0).collect();
        negatives.sort_by(|&a, &b| cur[b].abs().total_cmp(&cur[a].abs()).then(a.cmp(&b)));
        let shrink = negatives[ne];
        let grow = if p[jp] > 0.0 {
            let mut nonneg: Vec<usize> = (0..cur.len()).filter(|&i| cur[i] > 0.0).collect();
            nonneg.sort_by(|&a, &b| cur[b].total_cmp(&cur[a]).then(a.cmp(&b)));
            nonneg[jp]
        } else if let Some(z) = (0..cur.len()).find(|&i| cur[i] == 0.0) {
            z
        } else {
            cur.push(0.0);
            n += 1;
            cur.len() - 1
        };
        let shrink_sq = cur[shrink] * cur[shrink];
        cur[grow] = (cur[grow] * cur[grow] + cap).sqrt();
        cur[shrink] = if cap >= shrink_sq - tol { 0.0 } else { -(shrink_sq - cap).sqrt() };
        steps.push(cur.clone());
    }

    // Positive squares: classical chain from the current ones up to lam's.
    let (cur_neg, cur_pos) = pos_neg_split(&cur);
    let x = sorted_desc(&squares(&cur_pos), n);
    let y = sorted_desc(&target_pos, n);
    let mut positives: Vec<usize> = (0..cur.len()).filter(|&i| cur[i] > 0.0).collect();
    positives.sort_by(|&a, &b| cur[b].total_cmp(&cur[a]).then(a.cmp(&b)));
    for t in ascend_transfers(&x, &y, tol)? {
        for (pos, value) in [(t.gain, t.gain_after), (t.lose, t.lose_after)] {
            let Some(&coord) = positives.get(pos) else {
                return Err(Error::Numerical("positive chain touched a missing coordinate".into()));
            };
            cur[coord] = value.max(0.0).sqrt();
        }
        steps.push(cur.clone());
    }

    // Negative squares: walk from the current (more spread) ones down to lam's.
    let x = sorted_desc(&squares(&cur_neg), n);
    let y = sorted_desc(&target_neg, n);
    let mut slots: Vec<usize> = (0..cur.len()).filter(|&i| cur[i] < 0.0).collect();
    slots.sort_by(|&a, &b| cur[b].abs().total_cmp(&cur[a].abs()).then(a.cmp(&b)));
    slots.extend((0..cur.len()).filter(|&i| cur[i] == 0.0));
    let transfers = descend_transfers(&x, &y, tol)?;
    for t in transfers {
        for (pos, value) in [(t.gain, t.gain_after), (t.lose, t.lose_after)] {
            while slots.len() <= pos {
                cur.push(0.0);
                slots.push(cur.len() - 1);
            }
            cur[slots[pos]] = -value.max(0.0).sqrt();
        }
        steps.push(cur.clone());
    }

    let width = cur.len();
    for s in &mut steps {
        s.resize(width, 0.0);
    }
    Ok(MajorizationChain { steps, kind: OrderKind::Frobenius })
}

/// Random pair `(mu, lam)` of nonnegative vectors with `mu ≼ lam`: `lam` has
/// i.i.d. exponential entries and `mu` comes from random averaging transfers.
pub fn random_classical_pair<R: Rng + ?Sized>(n: usize, rng: &mut R) -> (Vec<f64>, Vec<f64>) {
    let lam: Vec<f64> = (0..n).map(|_| -(1.0 - rng.random::<f64>()).ln()).collect();
    let mut mu = lam.clone();
    let moves = rng.random_range(0..=2 * n);
    soften_classical(&mut mu, moves, rng);
    (mu, lam)
}

/// Applies `moves` random averaging transfers; the result is majorized by the
/// input and no entry exceeds the input's maximum.
pub(crate) fn soften_classical<R: Rng + ?Sized>(v: &mut [f64], moves: usize, rng: &mut R) {
    let n = v.len();
    if n < 2 {
        return;
    }
    for _ in 0..moves {
        let (a, b) = (rng.random_range(0..n), rng.random_range(0..n));
        if a == b {
            continue;
        }
        let t = rng.random::<f64>() * 0.5;
        let (va, vb) = (v[a], v[b]);
        v[a] = (1.0 - t) * va + t * vb;
        v[b] = t * va + (1.0 - t) * vb;
    }
}

/// Random signed pair `(mu, lam)` with `mu ≼_F lam`, built by applying random
/// reversed step moves of all three forms to a random `lam`.
pub fn random_frobenius_pair<R: Rng + ?Sized>(n: usize, rng: &mut R) -> (Vec<f64>, Vec<f64>) {
    let lam: Vec<f64> = (0..n)
        .map(|_| {
            let v: f64 = rng.random::<f64>() * 2.0 - 1.0;
            if rng.random::<f64>() < 0.15 {
                0.0
            } else {
                v
            }
        })
        .collect();
    let mut mu = lam.clone();
    let moves = rng.random_range(0..=2 * n);
    soften_frobenius(&mut mu, moves, f64::INFINITY, rng);
    (mu, lam)
}

/// Applies `moves` random reversed `≼_F` step moves, never letting a
/// magnitude exceed `cap` (pass infinity for no cap). The result is
/// `≼_F`-below the input.
pub(crate) fn soften_frobenius<R: Rng + ?Sized>(v: &mut [f64], moves: usize, cap: f64, rng: &mut R) {
    let n = v.len();
    if n < 2 {
        return;
    }
    let cap_sq = cap * cap;
    for _ in 0..moves {
        let (a, b) = (rng.random_range(0..n), rng.random_range(0..n));
        if a == b {
            continue;
        }
        let frac: f64 = rng.random();
        let (sa, sb) = (v[a] * v[a], v[b] * v[b]);
        if v[a] > 0.0 && v[b] <= 0.0 {
            // A positive coordinate hands squared mass to a nonpositive one.
            let d = (frac * sa).min((cap_sq - sb).max(0.0));
            v[a] = (sa - d).sqrt();
            v[b] = -(sb + d).sqrt();
        } else if v[a] >= 0.0 && v[b] >= 0.0 {
            // Even out two nonnegative squares.
            let (hi, lo, shi, slo) = if sa >= sb { (a, b, sa, sb) } else { (b, a, sb, sa) };
            let d = frac * 0.5 * (shi - slo);
            v[hi] = (shi - d).sqrt();
            v[lo] = (slo + d).sqrt();
        } else if v[a] <= 0.0 && v[b] <= 0.0 {
            // Spread two nonpositive squares apart.
            let (outer, inner, so, si) = if sa >= sb { (a, b, sa, sb) } else { (b, a, sb, sa) };
            let d = (frac * si).min((cap_sq - so).max(0.0));
            v[outer] = -(so + d).sqrt();
            v[inner] = -(si - d).sqrt();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::CounterRng;

    #[test]
    fn majorizes_examples() {
        assert!(majorizes(&[0.5, 0.5], &[1.0, 0.0]).unwrap());
        assert!(majorizes(&[0.6, 0.4], &[0.7, 0.3]).unwrap());
        assert!(!majorizes(&[0.5, 0.5], &[0.6, 0.5]).unwrap());
        assert!(majorizes(&[-1.0], &[1.0]).is_err());
    }

    #[test]
    fn weak_majorization_examples() {
        assert!(weakly_majorizes(&[0.5, 0.5], &[0.6, 0.5]).unwrap());
        assert!(weakly_majorizes(&[1.0], &[1.0]).unwrap());
        assert!(!weakly_majorizes(&[2.0, 0.0], &[1.0, 1.0]).unwrap());
    }

    #[test]
    fn slack_index_examples() {
        assert_eq!(leading_slack_index(&[1.0, 1.0], &[2.0, 1.0]).unwrap(), Some(0));
        assert_eq!(leading_slack_index(&[2.0, 0.0], &[2.0, 1.0]).unwrap(), Some(1));
        assert_eq!(leading_slack_index(&[1.0, 0.0], &[1.0, 0.0]).unwrap(), None);
        assert!(leading_slack_index(&[2.0, 0.0], &[1.0, 1.0]).is_err());
    }

    #[test]
    fn f_majorization_examples() {
        let r2 = 2f64.sqrt();
        assert!(f_majorizes(&[1.0, -1.0], &[1.0, 1.0]));
        assert!(f_majorizes(&[1.0, -1.0], &[r2, 0.0]));
        assert!(!f_majorizes(&[1.0, 1.0], &[1.0, -1.0]));
    }

    #[test]
    fn split_examples() {
        assert_eq!(pos_neg_split(&[1.0, -2.0, 0.0]), (vec![0.0, -2.0, 0.0], vec![1.0, 0.0, 0.0]));
        assert_eq!(pos_neg_split(&[3.0, 1.0]), (vec![0.0, 0.0], vec![3.0, 1.0]));
        assert_eq!(pos_neg_split(&[-1.0]), (vec![-1.0], vec![0.0]));
    }

    #[test]
    fn spectrum_is_sorted_and_finite() {
        let s = Spectrum::new(vec![1.0, 3.0, -2.0]).unwrap();
        assert_eq!(s.entries(), &[3.0, 1.0, -2.0]);
        assert_eq!(s.padded(5).entries(), &[3.0, 1.0, 0.0, 0.0, -2.0]);
        assert!(Spectrum::new(vec![f64::NAN]).is_err());
    }

    #[test]
    fn classical_chain_examples() {
        let c = chain_classical(&[0.5, 0.5], &[1.0, 0.0]).unwrap();
        assert_eq!(c.steps(), &[vec![0.5, 0.5], vec![1.0, 0.0]]);
        let c = chain_classical(&[0.3, 0.7], &[0.7, 0.3]).unwrap();
        assert_eq!(c.len(), 1);
        let c = chain_classical(&[2.0, 2.0, 2.0], &[4.0, 1.0, 1.0]).unwrap();
        assert_eq!(c.steps(), &[vec![2.0, 2.0, 2.0], vec![3.0, 2.0, 1.0], vec![4.0, 1.0, 1.0]]);
        c.validate(&[2.0, 2.0, 2.0], &[4.0, 1.0, 1.0]).unwrap();
        assert!(chain_classical(&[1.0, 0.0], &[0.5, 0.5]).is_err());
    }

    #[test]
    fn frobenius_chain_examples() {
        let c = chain_frobenius(&[-2.0, -2.0], &[2.0, 2.0]).unwrap();
        assert_eq!(c.steps(), &[vec![-2.0, -2.0, 0.0], vec![-2.0, 0.0, 2.0], vec![0.0, 2.0, 2.0]]);
        c.validate(&[-2.0, -2.0], &[2.0, 2.0]).unwrap();
        let c = chain_frobenius(&[1.0, -1.0, 0.5], &[1.0, -1.0, 0.5]).unwrap();
        assert_eq!(c.len(), 1);
        let r2 = 2f64.sqrt();
        let c = chain_frobenius(&[1.0, -1.0], &[r2, 0.0]).unwrap();
        assert_eq!(c.len(), 2);
        let (prev, next) = c.pairs().next().unwrap();
        assert_eq!(frobenius_step(prev, next).unwrap().0, StepForm::SlackElimination);
        c.validate(&[1.0, -1.0], &[r2, 0.0]).unwrap();
        assert!(chain_frobenius(&[1.0, 1.0], &[1.0, -1.0]).is_err());
    }

    #[test]
    fn negative_phase_reuses_zeros() {
        let r2 = 2f64.sqrt();
        let (mu, lam) = (vec![-r2, 1.0, 1.0], vec![-1.0, -1.0, r2]);
        assert!(f_majorizes(&mu, &lam));
        let c = chain_frobenius(&mu, &lam).unwrap();
        c.validate(&mu, &lam).unwrap();
    }

    #[test]
    fn random_pairs_satisfy_their_orders_and_chains_validate() {
        for seed in 0..300u64 {
            let mut rng = CounterRng::new(77, seed);
            let n = 1 + (seed % 7) as usize;
            let (mu, lam) = random_classical_pair(n, &mut rng);
            assert!(majorizes(&mu, &lam).unwrap(), "{mu:?} {lam:?}");
            let c = chain_classical(&mu, &lam).unwrap();
            c.validate(&mu, &lam).unwrap();
            assert!(c.len() <= n.max(1));

            let (mu, lam) = random_frobenius_pair(n, &mut rng);
            assert!(f_majorizes(&mu, &lam), "{mu:?} {lam:?}");
            let c = chain_frobenius(&mu, &lam).unwrap();
            c.validate(&mu, &lam).unwrap_or_else(|e| panic!("{e}: {mu:?} -> {lam:?}\n{:?}", c.steps()));
            let width = c.steps()[0].len();
            assert!(c.len() - 1 <= 2 * width + 2, "{} steps for width {width}", c.len() - 1);
        }
    }

    #[test]
    fn nearly_flat_signed_vector_to_positive_one() {
        // Many almost equal negatives: levelling them one pair at a time
        // would need quadratically many moves.
        let mu = [
            0.49238366801092903, 0.4917558046272376, 0.4878058385435974, 0.4829702969591791, 0.47490127392315695,
            -0.47393458540950545, -0.4751218522653891, -0.4773030418520196, -0.480952636405271,
            -0.4821716844665782, -0.4821726806654107, -0.48507005033070605, -0.48686291847731045,
            -0.48827909935475855, -0.49172309208427134, -0.49191821447145356, -0.4999999999999999,
        ];
        let mut lam = vec![0.5; 16];
        lam.push(0.0);
        let c = chain_frobenius(&mu, &lam).unwrap();
        c.validate(&mu, &lam).unwrap();
        assert!(c.len() - 1 <= 2 * 17 + 2, "{} steps", c.len() - 1);
    }
}
