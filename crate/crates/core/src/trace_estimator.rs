//! Monte Carlo Gaussian trace estimator.
//!
//! The estimator `(1/m) sum_j z_j^T A z_j` has a law that depends only on the
//! eigenvalues of `A`, so the primary path works on a spectrum:
//! `(1/m) sum_j sum_i s_i g_ij^2` with standard normal `g`. A dense-matrix
//! path exists to check that claim.
//!
//! Replicate `r` of a run draws from `CounterRng::new(seed, r)`, so results
//! do not depend on how replicates are spread over threads.

use crate::error::{invalid, precondition, Result};
use crate::majorization::Spectrum;
use crate::rng::CounterRng;
use crate::stats::mean_variance;
use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimatorRun {
    pub spectrum: Spectrum,
    pub m: usize,
    pub reps: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ErrorMode {
    Absolute,
    Relative,
}

fn check_m(m: usize) -> Result<()> {
    if m == 0 {
        return Err(invalid("number of probe vectors must be at least 1"));
    }
    Ok(())
}

/// One estimate from an arbitrary stream of standard normal draws, consumed
/// probe by probe.
pub(crate) fn estimate_from_draws<F: FnMut() -> f64>(s: &[f64], m: usize, mut gaussian: F) -> f64 {
    let mut total = 0.0;
    for _ in 0..m {
        for &v in s {
            let g = gaussian();
            total += v * g * g;
        }
    }
    total / m as f64
}

/// One realization of the estimator for spectrum `s`, replicate `index`.
pub fn estimate_trace_indexed(s: &[f64], m: usize, seed: u64, index: u64) -> Result<f64> {
    check_m(m)?;
    let mut rng = CounterRng::new(seed, index);
    Ok(estimate_from_draws(s, m, || rng.next_normal()))
}

/// One realization of the estimator for spectrum `s` (replicate 0).
pub fn estimate_trace(s: &[f64], m: usize, seed: u64) -> Result<f64> {
    estimate_trace_indexed(s, m, seed, 0)
}

impl EstimatorRun {
    pub fn new(spectrum: Spectrum, m: usize, reps: usize, seed: u64) -> Result<Self> {
        check_m(m)?;
        Ok(EstimatorRun { spectrum, m, reps, seed })
    }

    pub fn trace(&self) -> f64 {
        self.spectrum.iter().sum()
    }

    /// All `reps` estimates, in replicate order.
    pub fn estimates(&self) -> Vec<f64> {
        let s = self.spectrum.entries();
        (0..self.reps as u64)
            .into_par_iter()
            .map(|r| {
                let mut rng = CounterRng::new(self.seed, r);
                estimate_from_draws(s, self.m, || rng.next_normal())
            })
            .collect()
    }
}

/// Empirical frequency of large errors with a 95% binomial half-width.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailFrequency {
    pub hits: usize,
    pub reps: usize,
    pub frequency: f64,
    pub half_width_95: f64,
}

impl TailFrequency {
    /// Binomial standard error `sqrt(p (1 - p) / n)` at probability `p`.
    pub fn std_error_at(&self, p: f64) -> f64 {
        (p * (1.0 - p) / self.reps as f64).sqrt()
    }
}

/// Fraction of `estimates` with `|x - trace| >= eps` (absolute) or
/// `>= eps |trace|` (relative).
pub fn tail_frequency(estimates: &[f64], trace: f64, eps: f64, mode: ErrorMode) -> Result<TailFrequency> {
    if estimates.is_empty() {
        return Err(precondition("tail frequency needs at least one estimate"));
    }
    if !(eps >= 0.0) {
        return Err(invalid(format!("epsilon must be nonnegative, got {eps}")));
    }
    let threshold = match mode {
        ErrorMode::Absolute => eps,
        ErrorMode::Relative => {
            if trace == 0.0 {
                return Err(precondition("relative error needs a nonzero trace"));
            }
            eps * trace.abs()
        }
    };
    let hits = estimates.iter().filter(|&&x| (x - trace).abs() >= threshold).count();
    let reps = estimates.len();
    let p = hits as f64 / reps as f64;
    Ok(TailFrequency { hits, reps, frequency: p, half_width_95: 1.96 * (p * (1.0 - p) / reps as f64).sqrt() })
}

/// Runs the estimator and reports its empirical tail frequency at `eps`.
pub fn empirical_tail(run: &EstimatorRun, eps: f64, mode: ErrorMode) -> Result<TailFrequency> {
    if run.reps == 0 {
        return Err(precondition("empirical tail needs reps >= 1"));
    }
    if mode == ErrorMode::Relative && run.trace() == 0.0 {
        return Err(precondition("relative error needs a nonzero trace"));
    }
    tail_frequency(&run.estimates(), run.trace(), eps, mode)
}

/// Mean and sample variance of a run; `None` statistics when `reps < 2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub reps: usize,
    pub trace: f64,
    pub mean: Option<f64>,
    pub variance: Option<f64>,
    /// `(2/m) sum s_i^2`.
    pub exact_variance: f64,
}

pub fn summarize(run: &EstimatorRun, estimates: &[f64]) -> RunSummary {
    let stats = mean_variance(estimates);
    RunSummary {
        reps: estimates.len(),
        trace: run.trace(),
        mean: stats.map(|s| s.0).or_else(|| estimates.first().copied()),
        variance: stats.map(|s| s.1),
        exact_variance: 2.0 / run.m as f64 * run.spectrum.frobenius_sq(),
    }
}

/// `(1/m) sum_j z_j^T A z_j` on a dense symmetric matrix.
pub fn dense_estimate(a: &DMatrix<f64>, m: usize, seed: u64) -> Result<f64> {
    dense_estimate_indexed(a, m, seed, 0)
}

/// Replicate `index` of [`dense_estimate`].
pub fn dense_estimate_indexed(a: &DMatrix<f64>, m: usize, seed: u64, index: u64) -> Result<f64> {
    check_m(m)?;
    if !a.is_square() {
        return Err(invalid("matrix must be square"));
    }
    let scale = a.amax().max(1.0);
    if (a - a.transpose()).amax() > 1e-10 * scale {
        return Err(invalid("matrix must be symmetric within 1e-10"));
    }
    let n = a.nrows();
    let mut rng = CounterRng::new(seed, index);
    let mut total = 0.0;
    for _ in 0..m {
        let z = DVector::from_fn(n, |_, _| rng.next_normal());
        total += z.dot(&(a * &z));
    }
    Ok(total / m as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_spectrum_estimates_zero() {
        assert_eq!(estimate_trace(&[0.0, 0.0, 0.0], 5, 1).unwrap(), 0.0);
        assert_eq!(dense_estimate(&DMatrix::zeros(3, 3), 5, 1).unwrap(), 0.0);
    }

    #[test]
    fn injected_gaussians_give_exact_values() {
        assert_eq!(estimate_from_draws(&[1.0], 1, || 2.0), 4.0);
        let mut draws = [1.0, 2.0, 3.0, -1.0].into_iter();
        // Probe 1: 3*1 + 2*4, probe 2: 3*9 + 2*1.
        assert_eq!(estimate_from_draws(&[3.0, 2.0], 2, || draws.next().unwrap()), 20.0);
    }

    #[test]
    fn estimates_are_deterministic() {
        let s = Spectrum::new(vec![3.0, -1.0, 2.0]).unwrap();
        let run = EstimatorRun::new(s.clone(), 4, 100, 9).unwrap();
        assert_eq!(run.estimates(), run.estimates());
        assert_eq!(run.estimates()[17], estimate_trace_indexed(&s, 4, 9, 17).unwrap());
        assert_ne!(run.estimates(), EstimatorRun::new(s, 4, 100, 10).unwrap().estimates());
    }

    #[test]
    fn tail_frequency_edge_cases() {
        let run = EstimatorRun::new(Spectrum::new(vec![1.0, 2.0]).unwrap(), 3, 500, 4).unwrap();
        assert_eq!(empirical_tail(&run, 0.0, ErrorMode::Absolute).unwrap().frequency, 1.0);
        let huge = empirical_tail(&run, 1e6, ErrorMode::Relative).unwrap();
        assert_eq!((huge.frequency, huge.half_width_95), (0.0, 0.0));

        let zero_trace = EstimatorRun::new(Spectrum::new(vec![1.0, -1.0]).unwrap(), 3, 10, 4).unwrap();
        assert!(empirical_tail(&zero_trace, 0.1, ErrorMode::Relative).is_err());
        assert!(empirical_tail(&zero_trace, 0.1, ErrorMode::Absolute).is_ok());
        let empty = EstimatorRun::new(Spectrum::new(vec![1.0]).unwrap(), 3, 0, 4).unwrap();
        assert!(empirical_tail(&empty, 0.1, ErrorMode::Absolute).is_err());
    }

    #[test]
    fn rejects_asymmetric_matrices() {
        let a = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 0.0, 1.0]);
        assert!(dense_estimate(&a, 2, 0).is_err());
        assert!(estimate_trace(&[1.0], 0, 0).is_err());
    }

    #[test]
    fn summary_of_short_runs() {
        let run = EstimatorRun::new(Spectrum::new(vec![1.0]).unwrap(), 2, 0, 0).unwrap();
        let s = summarize(&run, &[]);
        assert_eq!((s.mean, s.variance), (None, None));
        assert_eq!(s.exact_variance, 1.0);
    }
}
