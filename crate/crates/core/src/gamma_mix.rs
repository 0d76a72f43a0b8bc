//! Weighted sums of independent Gamma variables.
//!
//! `GammaMix` is `sum_i w_i X_i` with i.i.d. `X_i ~ Gamma(alpha, beta)`;
//! `GeneralGammaSum` lets every term carry its own shape and rate.
//!
//! Distribution functions and density derivatives are obtained by inverting
//! the moment generating function `M(s) = prod_i (1 - s c_i)^(-a_i)`, with
//! `c_i = w_i / beta_i`, along a contour through the real axis at a point `c`
//! near the saddle point of `K(s) - s x`. The contour is the parabola
//! `s(y) = c + iy + sign(x) kappa y^2`, which only meets the real axis at `c`
//! and therefore never crosses a branch point or the pole of `1/s`. Along it
//! the integrand decays like `exp(-|x| kappa y^2)`, so a single exp-sinh
//! quadrature reaches full double precision in both tails.

use crate::error::{invalid, precondition, Error, Result};
use crate::gamma_core::GammaParams;
use crate::quad::{adaptive_gk, exp_sinh_with_rule, ExpSinhRule};
use crate::rng::CounterRng;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// One term `weight * Gamma(shape, rate)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GammaTerm {
    pub weight: f64,
    pub shape: f64,
    pub rate: f64,
}

/// Linear combination of independent Gamma variables with per-term parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneralGammaSum {
    terms: Vec<GammaTerm>,
}

/// `sum_i weights[i] * X_i` with i.i.d. `X_i ~ Gamma(shape, rate)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GammaMix {
    weights: Vec<f64>,
    shape: f64,
    rate: f64,
}

impl GammaMix {
    pub fn new(weights: Vec<f64>, shape: f64, rate: f64) -> Result<Self> {
        if weights.is_empty() {
            return Err(invalid("weight vector must be non-empty"));
        }
        if weights.iter().any(|w| !w.is_finite()) {
            return Err(invalid("weights must be finite"));
        }
        GammaParams::new(shape, rate)?;
        Ok(GammaMix { weights, shape, rate })
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn shape(&self) -> f64 {
        self.shape
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }

    pub fn to_general(&self) -> GeneralGammaSum {
        GeneralGammaSum {
            terms: self
                .weights
                .iter()
                .map(|&weight| GammaTerm { weight, shape: self.shape, rate: self.rate })
                .collect(),
        }
    }

    pub fn mean(&self) -> f64 {
        self.weights.iter().sum::<f64>() * self.shape / self.rate
    }

    pub fn variance(&self) -> f64 {
        self.weights.iter().map(|w| w * w).sum::<f64>() * self.shape / (self.rate * self.rate)
    }

    /// `max_i |w_i| / beta`.
    pub fn scale(&self) -> f64 {
        self.weights.iter().fold(0.0f64, |m, w| m.max(w.abs())) / self.rate
    }

    /// `alpha * sum_i w_i / max_i w_i` for nonnegative weights.
    pub fn effective_shape(&self) -> Result<f64> {
        if self.weights.iter().any(|&w| w < 0.0) {
            return Err(precondition("effective shape needs nonnegative weights"));
        }
        let max = self.weights.iter().fold(0.0f64, |m, &w| m.max(w));
        if max == 0.0 {
            return Err(Error::Degenerate);
        }
        Ok(self.shape * self.weights.iter().sum::<f64>() / max)
    }

    /// Same law written with every weight repeated `t` times at shape `alpha / t`.
    pub fn divide(&self, t: usize) -> Result<GammaMix> {
        if t == 0 {
            return Err(invalid("division count must be at least 1"));
        }
        let weights = self.weights.iter().flat_map(|&w| std::iter::repeat_n(w, t)).collect();
        GammaMix::new(weights, self.shape / t as f64, self.rate)
    }

    pub fn cf(&self, u: f64) -> Complex64 {
        self.to_general().cf(u)
    }

    pub fn cdf(&self, x: f64) -> Result<f64> {
        self.to_general().cdf(x)
    }

    pub fn sf(&self, x: f64) -> Result<f64> {
        self.to_general().sf(x)
    }

    pub fn cdf_sf(&self, x: f64) -> Result<(f64, f64)> {
        self.to_general().cdf_sf(x)
    }

    pub fn pdf(&self, x: f64, order: u8) -> Result<f64> {
        self.to_general().pdf(x, order)
    }

    pub fn sample(&self, n: usize, seed: u64) -> Vec<f64> {
        self.to_general().sample(n, seed)
    }
}

/// Exact law of the Gaussian trace estimator with `m` probe vectors for a
/// symmetric matrix with the given eigenvalues.
pub fn trace_estimator_law(eigenvalues: &[f64], m: usize) -> Result<GammaMix> {
    if m == 0 {
        return Err(invalid("number of probe vectors must be at least 1"));
    }
    let half = m as f64 / 2.0;
    GammaMix::new(eigenvalues.to_vec(), half, half)
}

impl GeneralGammaSum {
    pub fn new(terms: Vec<GammaTerm>) -> Result<Self> {
        if terms.is_empty() {
            return Err(invalid("a Gamma sum needs at least one term"));
        }
        for t in &terms {
            if !t.weight.is_finite() {
                return Err(invalid("weights must be finite"));
            }
            GammaParams::new(t.shape, t.rate)?;
        }
        Ok(GeneralGammaSum { terms })
    }

    pub fn terms(&self) -> &[GammaTerm] {
        &self.terms
    }

    /// Appends `weight * Gamma(shape, rate)`.
    pub fn with_term(mut self, weight: f64, shape: f64, rate: f64) -> Result<Self> {
        if !weight.is_finite() {
            return Err(invalid("weights must be finite"));
        }
        GammaParams::new(shape, rate)?;
        self.terms.push(GammaTerm { weight, shape, rate });
        Ok(self)
    }

    /// True when every weight is zero.
    pub fn is_degenerate(&self) -> bool {
        self.terms.iter().all(|t| t.weight == 0.0)
    }

    pub fn mean(&self) -> f64 {
        self.terms.iter().map(|t| t.weight * t.shape / t.rate).sum()
    }

    pub fn variance(&self) -> f64 {
        self.terms.iter().map(|t| t.weight * t.weight * t.shape / (t.rate * t.rate)).sum()
    }

    /// `max_i |w_i| / beta_i`.
    pub fn scale(&self) -> f64 {
        self.terms.iter().fold(0.0f64, |m, t| m.max(t.weight.abs() / t.rate))
    }

    /// Sum of the shapes of the nonzero terms.
    pub fn total_shape(&self) -> f64 {
        self.terms.iter().filter(|t| t.weight != 0.0).map(|t| t.shape).sum()
    }

    /// Characteristic function `E[exp(iuQ)]`.
    pub fn cf(&self, u: f64) -> Complex64 {
        let s = Complex64::new(0.0, u);
        let log: Complex64 = self
            .terms
            .iter()
            .filter(|t| t.weight != 0.0)
            .map(|t| -t.shape * ln_one_minus(s * (t.weight / t.rate)))
            .sum();
        log.exp()
    }

    pub fn cdf(&self, x: f64) -> Result<f64> {
        Ok(self.cdf_sf(x)?.0)
    }

    pub fn sf(&self, x: f64) -> Result<f64> {
        Ok(self.cdf_sf(x)?.1)
    }

    /// `(P(Q <= x), P(Q > x))`, each computed directly so that the smaller of
    /// the two keeps its relative accuracy.
    pub fn cdf_sf(&self, x: f64) -> Result<(f64, f64)> {
        Kernel::new(self, true)?.cdf_sf(x)
    }

    /// `order`-th derivative (0, 1 or 2) of the density.
    pub fn pdf(&self, x: f64, order: u8) -> Result<f64> {
        Kernel::new(self, true)?.pdf(x, order)
    }

    /// `n` draws; draw `i` depends only on `(seed, i)`.
    pub fn sample(&self, n: usize, seed: u64) -> Vec<f64> {
        let params: Vec<(f64, GammaParams)> = self
            .terms
            .iter()
            .map(|t| (t.weight, GammaParams::new(t.shape, t.rate).expect("validated")))
            .collect();
        (0..n as u64)
            .map(|i| {
                let mut rng = CounterRng::new(seed, i);
                params.iter().map(|(w, p)| w * p.draw(&mut rng)).sum()
            })
            .collect()
    }

    /// Distribution function by Gil-Pelaez inversion along the real frequency
    /// axis. Slower and less accurate (about 1e-9) than [`Self::cdf`]; kept as
    /// an independent cross-check.
    pub fn gil_pelaez_cdf(&self, x: f64) -> Result<f64> {
        if self.is_degenerate() {
            return Err(Error::Degenerate);
        }
        let total = self.total_shape();
        let log_abs_cf = |u: f64| -> f64 {
            self.terms
                .iter()
                .filter(|t| t.weight != 0.0)
                .map(|t| -0.5 * t.shape * (u * t.weight / t.rate).powi(2).ln_1p())
                .sum()
        };
        // Truncate where the neglected tail integral of |cf(u)|/u is below 1e-11.
        let limit = (1e-11 * total).ln();
        let mut upper = 1.0 / self.scale();
        while log_abs_cf(upper) > limit {
            upper *= 2.0;
        }
        let integrand = |u: f64| -> f64 {
            if u == 0.0 {
                return self.mean() - x;
            }
            (self.cf(u) * Complex64::new(0.0, -u * x).exp()).im / u
        };
        // Split into pieces of a few oscillation periods each.
        let period = 2.0 * PI / (x.abs() + self.variance().sqrt()).max(1e-300);
        let pieces = ((upper / period).ceil() as usize).clamp(1, 200_000);
        let width = upper / pieces as f64;
        let mut total_integral = 0.0;
        for p in 0..pieces {
            let lo = p as f64 * width;
            total_integral += adaptive_gk(integrand, lo, lo + width, 1e-14, 1e-12, 200).value;
        }
        Ok((0.5 - total_integral / PI).clamp(0.0, 1.0))
    }
}

impl From<&GammaMix> for GeneralGammaSum {
    fn from(q: &GammaMix) -> Self {
        q.to_general()
    }
}

/// `ln(1 - z)` on the principal branch, accurate for small `|z|`.
fn ln_one_minus(z: Complex64) -> Complex64 {
    let re = 0.5 * (-2.0 * z.re + z.norm_sqr()).ln_1p();
    let im = (-z.im).atan2(1.0 - z.re);
    Complex64::new(re, im)
}

#[derive(Debug, Clone, Copy)]
enum Target {
    /// Tail probability; integrand carries the pole `1/s`.
    Tail,
    /// Density derivative of the given order; integrand carries `(-s)^k`.
    Density(u8),
}

impl Target {
    fn weight(self, s: Complex64) -> Complex64 {
        match self {
            Target::Tail => 1.0 / s,
            Target::Density(0) => Complex64::new(1.0, 0.0),
            Target::Density(1) => -s,
            Target::Density(_) => s * s,
        }
    }
}

/// Cumulant generating function of a Gamma sum, prepared for inversion.
#[derive(Debug, Clone)]
pub(crate) struct Kernel {
    /// `(c_i, a_i)` with `c_i = w_i / beta_i != 0`, equal `c` merged.
    terms: Vec<(f64, f64)>,
    mean: f64,
    sd: f64,
    total_shape: f64,
    /// Right edge of the strip of convergence, `1 / max c_i` (infinite when no
    /// weight is positive).
    upper: f64,
    /// Left edge, `-1 / max |c_i|` over negative `c_i`.
    lower: f64,
    /// The sum is `sign * Gamma` when all `c_i` coincide.
    single: Option<(GammaParams, f64)>,
}

impl Kernel {
    pub(crate) fn new(q: &GeneralGammaSum, closed_form: bool) -> Result<Self> {
        let mut terms: Vec<(f64, f64)> = q
            .terms
            .iter()
            .filter(|t| t.weight != 0.0)
            .map(|t| (t.weight / t.rate, t.shape))
            .collect();
        if terms.is_empty() {
            return Err(Error::Degenerate);
        }
        terms.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut merged: Vec<(f64, f64)> = Vec::with_capacity(terms.len());
        for (c, a) in terms {
            match merged.last_mut() {
                Some(last) if last.0 == c => last.1 += a,
                _ => merged.push((c, a)),
            }
        }
        let mean = merged.iter().map(|(c, a)| a * c).sum();
        let var: f64 = merged.iter().map(|(c, a)| a * c * c).sum();
        let total_shape = merged.iter().map(|t| t.1).sum();
        let max_c = merged.last().expect("non-empty").0;
        let min_c = merged[0].0;
        let upper = if max_c > 0.0 { 1.0 / max_c } else { f64::INFINITY };
        let lower = if min_c < 0.0 { 1.0 / min_c } else { f64::NEG_INFINITY };
        let single = if closed_form && (max_c - min_c).abs() <= 1e-14 * max_c.abs().max(min_c.abs()) {
            let c = merged[0].0;
            Some((GammaParams::new(total_shape, 1.0 / c.abs())?, c.signum()))
        } else {
            None
        };
        Ok(Kernel { terms: merged, mean, sd: var.sqrt(), total_shape, upper, lower, single })
    }

    fn has_negative(&self) -> bool {
        self.lower.is_finite()
    }

    fn has_positive(&self) -> bool {
        self.upper.is_finite()
    }

    fn k(&self, s: Complex64) -> Complex64 {
        self.terms.iter().map(|&(c, a)| -a * ln_one_minus(s * c)).sum()
    }

    fn k_real(&self, s: f64) -> f64 {
        self.terms.iter().map(|&(c, a)| -a * (-s * c).ln_1p()).sum()
    }

    fn k1(&self, s: f64) -> f64 {
        self.terms.iter().map(|&(c, a)| a * c / (1.0 - s * c)).sum()
    }

    fn k2(&self, s: f64) -> f64 {
        self.terms
            .iter()
            .map(|&(c, a)| {
                let r = c / (1.0 - s * c);
                a * r * r
            })
            .sum()
    }

    fn k3(&self, s: f64) -> f64 {
        self.terms
            .iter()
            .map(|&(c, a)| {
                let r = c / (1.0 - s * c);
                2.0 * a * r * r * r
            })
            .sum()
    }

    /// Solves `K'(s) = x` inside the strip.
    fn saddle(&self, x: f64) -> f64 {
        let step = 1.0 / self.sd;
        let (mut lo, mut hi) = if x >= self.mean { (0.0, self.upper) } else { (self.lower, 0.0) };
        if hi.is_infinite() {
            hi = step;
            while self.k1(hi) < x {
                lo = hi;
                hi *= 2.0;
            }
        }
        if lo.is_infinite() {
            lo = -step;
            while self.k1(lo) > x {
                hi = lo;
                lo *= 2.0;
            }
        }
        let mut s = if x >= self.mean { lo } else { hi };
        for _ in 0..200 {
            let g = self.k1(s) - x;
            if g.abs() <= 1e-12 * self.sd {
                break;
            }
            if g < 0.0 {
                lo = s;
            } else {
                hi = s;
            }
            let newton = s - g / self.k2(s);
            s = if newton > lo && newton < hi { newton } else { 0.5 * (lo + hi) };
            if hi - lo <= 1e-15 * (lo.abs() + hi.abs()) {
                break;
            }
        }
        s
    }

    /// `(1/pi) * integral_0^inf Im[exp(K(s) - s x) h(s) s'(y)] dy` along the
    /// parabola through `c`.
    fn contour(&self, x: f64, c: f64, target: Target) -> Result<f64> {
        Ok(self.contour_with_rule(x, c, target)?.0)
    }

    /// [`Self::contour`] plus the parabola bend and the final quadrature rule.
    /// Bend `kappa` of the parabola through `c` and the width of the
    /// integrand in `y`.
    fn contour_shape(&self, x: f64, c: f64, target: Target) -> (f64, f64) {
        let bend = if x > 0.0 { 1.0 } else if x < 0.0 { -1.0 } else { 0.0 };
        let pole = matches!(target, Target::Tail);
        let mut nearest = f64::INFINITY;
        if bend > 0.0 {
            nearest = nearest.min(self.upper - c);
            if pole && c < 0.0 {
                nearest = nearest.min(-c);
            }
        } else if bend < 0.0 {
            nearest = nearest.min(c - self.lower);
            if pole && c > 0.0 {
                nearest = nearest.min(c);
            }
        }
        let curvature = self.k2(c);
        let width = 1.0 / curvature.sqrt();
        // Match the bend of the steepest-descent path, K'''/(6 K''), when it
        // points the same way as the decay of exp(-s x); keep a small bend
        // otherwise so that the far contour still decays.
        let descent = self.k3(c) / (6.0 * curvature);
        let follow = if descent * bend > 0.0 { descent.abs() } else { 0.0 };
        (bend * follow.max(0.01 / width).min(1.0 / nearest), width)
    }

    fn contour_with_rule(&self, x: f64, c: f64, target: Target) -> Result<(f64, f64, ExpSinhRule)> {
        let (kappa, width) = self.contour_shape(x, c, target);
        let curvature = 1.0 / (width * width);
        let reference = self.k_real(c) - c * x;
        let magnitude = match target {
            Target::Tail => 1.0 / c.abs(),
            Target::Density(k) => c.abs().powi(k as i32) + curvature.powf(k as f64 / 2.0),
        };
        let integrand = |y: f64| -> f64 {
            let s = Complex64::new(c + kappa * y * y, y);
            let ds = Complex64::new(2.0 * kappa * y, 1.0);
            let e = (self.k(s) - s * x - reference).exp();
            (e * target.weight(s) * ds).im
        };
        let abs_tol = 1e-16 * magnitude * width;
        let (r, rule) = exp_sinh_with_rule(integrand, width, abs_tol, 1e-13);
        if !r.converged && r.error > 1e-9 * (magnitude * width).max(r.value.abs()) {
            return Err(Error::Numerical(format!(
                "inversion integral did not converge at x = {x} (estimate {}, error {})",
                r.value, r.error
            )));
        }
        Ok((r.value * reference.exp() / PI, kappa, rule))
    }

    pub(crate) fn cdf_sf(&self, x: f64) -> Result<(f64, f64)> {
        if x.is_nan() {
            return Err(invalid("x must not be NaN"));
        }
        if let Some((g, sign)) = self.single {
            return Ok(if sign > 0.0 { (g.cdf(x), g.sf(x)) } else { (g.sf(-x), g.cdf(-x)) });
        }
        if !self.has_negative() && x <= 0.0 {
            return Ok((0.0, 1.0));
        }
        if !self.has_positive() && x >= 0.0 {
            return Ok((1.0, 0.0));
        }
        if x.is_infinite() {
            return Ok(if x > 0.0 { (1.0, 0.0) } else { (0.0, 1.0) });
        }
        let s_hat = self.saddle(x);
        if x > self.mean {
            let floor = (1.0 / self.sd).min(0.5 * self.upper);
            let sf = self.contour(x, s_hat.max(floor), Target::Tail)?.clamp(0.0, 1.0);
            Ok((1.0 - sf, sf))
        } else {
            let floor = (1.0 / self.sd).min(-0.5 * self.lower);
            let cdf = (-self.contour(x, s_hat.min(-floor), Target::Tail)?).clamp(0.0, 1.0);
            Ok((cdf, 1.0 - cdf))
        }
    }

    pub(crate) fn pdf(&self, x: f64, order: u8) -> Result<f64> {
        if order > 2 {
            return Err(invalid(format!("derivative order {order} not supported")));
        }
        if x.is_nan() {
            return Err(invalid("x must not be NaN"));
        }
        if let Some((g, sign)) = self.single {
            return if sign > 0.0 {
                g.pdf_derivative(x, order)
            } else {
                Ok(g.pdf_derivative(-x, order)? * if order % 2 == 1 { -1.0 } else { 1.0 })
            };
        }
        if (!self.has_negative() && x < 0.0) || (!self.has_positive() && x > 0.0) || x.is_infinite() {
            return Ok(0.0);
        }
        if x == 0.0 {
            if self.total_shape <= order as f64 + 1.0 {
                return Err(Error::InsufficientShape { total: self.total_shape, order });
            }
            if !self.has_negative() || !self.has_positive() {
                return Ok(0.0);
            }
        }
        let c = self.saddle(x);
        self.contour(x, c, Target::Density(order))
    }
}

/// Evaluates one density derivative of a fixed Gamma sum at many nearby
/// points.
///
/// The contour nodes and cumulant values chosen for one point are reused at
/// neighbouring points, where only `exp(-s x)` changes; on an evenly spaced
/// scan that factor is advanced by one multiplication per node. Every reuse
/// is checked against the half-density sub-grid and against truncation at
/// the window ends. When a check fails the nodes are rebuilt around the new
/// point, first on the previous grid and then, if that grid is not accurate
/// there, by a fresh adaptive evaluation.
#[derive(Debug, Clone)]
pub struct DensityScanner {
    kernel: Kernel,
    order: u8,
    block: Option<Block>,
    rule: Option<ExpSinhRule>,
}

#[derive(Debug, Clone)]
struct Block {
    center: f64,
    radius: f64,
    c: f64,
    k_c: f64,
    /// `s - c` per node.
    ds: Vec<Complex64>,
    /// `K(s) - K(c)` per node.
    dk: Vec<Complex64>,
    /// Quadrature weight times `h(s) s'(y)` per node.
    fac: Vec<Complex64>,
    /// `exp(dk - ds x)` at `x = at`.
    current: Vec<Complex64>,
    at: f64,
    last_step: f64,
    /// `exp(-ds d)` for a repeated step `d`.
    step: Option<(f64, Vec<Complex64>)>,
}

impl Block {
    fn new(kernel: &Kernel, target: Target, x: f64, c: f64, kappa: f64, rule: &ExpSinhRule) -> Self {
        let k_c = kernel.k_real(c);
        let (mut ds, mut dk, mut fac) = (Vec::new(), Vec::new(), Vec::new());
        for (y, w) in rule.nodes() {
            let s = Complex64::new(c + kappa * y * y, y);
            let sd = Complex64::new(2.0 * kappa * y, 1.0);
            ds.push(s - c);
            dk.push(kernel.k(s) - k_c);
            fac.push(w * target.weight(s) * sd);
        }
        Block {
            center: x,
            radius: kernel.k2(c).sqrt(),
            c,
            k_c,
            ds,
            dk,
            fac,
            current: Vec::new(),
            at: f64::NAN,
            last_step: f64::NAN,
            step: None,
        }
    }

    fn covers(&self, x: f64) -> bool {
        self.center.signum() == x.signum() && (x - self.center).abs() <= self.radius
    }

    fn advance(&mut self, x: f64) {
        let d = x - self.at;
        let same = |a: f64| (d - a).abs() <= 1e-12 * a.abs();
        match &self.step {
            Some((a, factors)) if same(*a) && !self.current.is_empty() => {
                self.current.iter_mut().zip(factors).for_each(|(v, f)| *v *= f);
            }
            _ => {
                self.current = self.dk.iter().zip(&self.ds).map(|(dk, ds)| (dk - ds * x).exp()).collect();
                if same(self.last_step) {
                    self.step = Some((d, self.ds.iter().map(|ds| (-ds * d).exp()).collect()));
                }
            }
        }
        self.last_step = d;
        self.at = x;
    }

    fn eval(&mut self, x: f64) -> Option<f64> {
        self.advance(x);
        let n = self.fac.len();
        let (mut all, mut even, mut l1, mut ends) = (0.0, 0.0, 0.0, 0.0f64);
        for (i, (e, f)) in self.current.iter().zip(&self.fac).enumerate() {
            let v = (e * f).im;
            all += v;
            l1 += v.abs();
            if i % 2 == 0 {
                even += v;
            }
            if i < 2 || i + 2 >= n {
                ends = ends.max(v.abs());
            }
        }
        if !(l1 > 0.0) || (all - 2.0 * even).abs() > 1e-9 * l1 || ends > 1e-15 * l1 {
            return None;
        }
        Some(all * (self.k_c - self.c * x).exp() / PI)
    }
}

impl DensityScanner {
    pub fn new(q: &GeneralGammaSum, order: u8) -> Result<Self> {
        if order > 2 {
            return Err(invalid(format!("derivative order {order} not supported")));
        }
        Ok(DensityScanner { kernel: Kernel::new(q, true)?, order, block: None, rule: None })
    }

    pub fn mean(&self) -> f64 {
        self.kernel.mean
    }

    pub fn std_dev(&self) -> f64 {
        self.kernel.sd
    }

    /// Same value as `GeneralGammaSum::pdf` at this order, to quadrature
    /// accuracy.
    pub fn eval(&mut self, x: f64) -> Result<f64> {
        let k = &self.kernel;
        let direct = k.single.is_some()
            || x == 0.0
            || !x.is_finite()
            || (!k.has_negative() && x < 0.0)
            || (!k.has_positive() && x > 0.0);
        if direct {
            return k.pdf(x, self.order);
        }
        if let Some(b) = self.block.as_mut().filter(|b| b.covers(x)) {
            if let Some(v) = b.eval(x) {
                return Ok(v);
            }
        }
        let target = Target::Density(self.order);
        let c = k.saddle(x);
        if let Some(prev) = &self.rule {
            let (kappa, width) = k.contour_shape(x, c, target);
            let rule = ExpSinhRule { scale: width, ..*prev };
            let mut b = Block::new(k, target, x, c, kappa, &rule);
            if let Some(v) = b.eval(x) {
                self.block = Some(b);
                return Ok(v);
            }
        }
        let (value, kappa, rule) = k.contour_with_rule(x, c, target)?;
        self.block = Some(Block::new(k, target, x, c, kappa, &rule));
        self.rule = Some(rule);
        Ok(value)
    }
}

impl GeneralGammaSum {
    /// Evaluator for the `order`-th density derivative at many points.
    pub fn density_scanner(&self, order: u8) -> Result<DensityScanner> {
        DensityScanner::new(self, order)
    }
}
