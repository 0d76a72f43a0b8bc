//! Numerical integration: adaptive Gauss-Kronrod on finite intervals and
//! exp-sinh (double exponential) quadrature on the half line.

use std::f64::consts::FRAC_PI_2;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub error: f64,
    /// Sum of absolute contributions; a measure of cancellation in `value`.
    pub l1: f64,
    pub converged: bool,
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> (f64, f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    let mut l1 = fc.abs() * WGK[7];
    for i in 0..7 {
        let dx = half * XGK[i];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        kronrod += WGK[i] * (f1 + f2);
        l1 += WGK[i] * (f1.abs() + f2.abs());
        if i % 2 == 1 {
            gauss += WG[i / 2] * (f1 + f2);
        }
    }
    (kronrod * half, ((kronrod - gauss) * half).abs(), l1 * half.abs())
}

/// Globally adaptive Gauss-Kronrod (7/15) integration of `f` over `[a, b]`.
pub fn adaptive_gk<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
    max_intervals: usize,
) -> QuadResult {
    let (v, e, l) = gk15(&mut f, a, b);
    let mut parts = vec![(a, b, v, e, l)];
    let mut value = v;
    let mut error = e;
    while error > abs_tol.max(rel_tol * value.abs()) && parts.len() < max_intervals {
        let (idx, _) = parts
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.total_cmp(&y.1 .3))
            .expect("non-empty");
        let (lo, hi, _, _, _) = parts.swap_remove(idx);
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let (v1, e1, l1) = gk15(&mut f, lo, mid);
        let (v2, e2, l2) = gk15(&mut f, mid, hi);
        parts.push((lo, mid, v1, e1, l1));
        parts.push((mid, hi, v2, e2, l2));
        value = parts.iter().map(|p| p.2).sum();
        error = parts.iter().map(|p| p.3).sum();
    }
    QuadResult {
        value,
        error,
        l1: parts.iter().map(|p| p.4).sum(),
        converged: error <= abs_tol.max(rel_tol * value.abs()),
    }
}

/// Exp-sinh quadrature of `f` over `[0, inf)`, with nodes
/// `y = scale * exp(pi/2 * sinh(tau))`.
///
/// `f` must be finite on `(0, inf)` and decay at infinity at least like
/// `y^(-1-eps)`. Converges geometrically in the number of halvings for
/// integrands analytic near the positive axis.
pub fn exp_sinh<F: FnMut(f64) -> f64>(f: F, scale: f64, abs_tol: f64, rel_tol: f64) -> QuadResult {
    exp_sinh_with_rule(f, scale, abs_tol, rel_tol).0
}

/// The trapezoid grid in `tau` on which [`exp_sinh`] stopped.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpSinhRule {
    pub scale: f64,
    pub tau_lo: f64,
    pub h: f64,
    /// Number of intervals; nodes are `tau_lo + i h` for `i = 0..=count`.
    pub count: usize,
}

impl ExpSinhRule {
    /// `(y, weight)` pairs such that `sum weight * f(y)` approximates the
    /// integral.
    pub fn nodes(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        (0..=self.count).filter_map(move |i| {
            let tau = self.tau_lo + i as f64 * self.h;
            let y = self.scale * (FRAC_PI_2 * tau.sinh()).exp();
            (y.is_finite() && y > 0.0).then(|| (y, self.h * FRAC_PI_2 * tau.cosh() * y))
        })
    }
}

/// [`exp_sinh`] that also returns its final grid, so the same nodes can be
/// reused for nearby integrands.
pub fn exp_sinh_with_rule<F: FnMut(f64) -> f64>(
    mut f: F,
    scale: f64,
    abs_tol: f64,
    rel_tol: f64,
) -> (QuadResult, ExpSinhRule) {
    const MAX_LEVEL: u32 = 9;
    const NEGLIGIBLE: f64 = 1e-20;

    let mut term = |tau: f64| -> f64 {
        let y = scale * (FRAC_PI_2 * tau.sinh()).exp();
        if !(y.is_finite() && y > 0.0) {
            return 0.0;
        }
        let v = f(y);
        if v == 0.0 {
            return 0.0;
        }
        v * FRAC_PI_2 * tau.cosh() * y
    };

    // Locate the window of tau outside which terms are negligible.
    let probe = 0.25;
    let mut max_abs: f64 = 0.0;
    let mut samples = Vec::new();
    let mut k = 0i32;
    loop {
        let tau = k as f64 * probe;
        let v = term(tau);
        max_abs = max_abs.max(v.abs());
        samples.push((tau, v));
        let y = scale * (FRAC_PI_2 * tau.sinh()).exp();
        if tau > 6.5 || !y.is_finite() {
            break;
        }
        if k > 4 && v.abs() <= NEGLIGIBLE * max_abs && samples[samples.len() - 2].1.abs() <= NEGLIGIBLE * max_abs {
            break;
        }
        k += 1;
    }
    let mut tau_hi = samples.last().map(|s| s.0).unwrap_or(0.0);
    k = -1;
    let mut prev = f64::INFINITY;
    let mut tau_lo;
    loop {
        let tau = k as f64 * probe;
        let v = term(tau);
        max_abs = max_abs.max(v.abs());
        tau_lo = tau;
        if tau < -6.5 {
            break;
        }
        if k < -4 && v.abs() <= NEGLIGIBLE * max_abs && prev <= NEGLIGIBLE * max_abs {
            break;
        }
        prev = v.abs();
        k -= 1;
    }
    if max_abs == 0.0 {
        let rule = ExpSinhRule { scale, tau_lo: 0.0, h: 0.5, count: 0 };
        return (QuadResult { value: 0.0, error: 0.0, l1: 0.0, converged: true }, rule);
    }
    // Trim the upper end to the last non-negligible probe.
    while tau_hi > probe {
        let v = term(tau_hi - probe);
        if v.abs() > NEGLIGIBLE * max_abs {
            break;
        }
        tau_hi -= probe;
    }

    let mut h = 0.5;
    let n = ((tau_hi - tau_lo) / h).ceil() as i64;
    let mut sum = 0.0;
    let mut l1 = 0.0;
    for i in 0..=n {
        let v = term(tau_lo + i as f64 * h);
        sum += v;
        l1 += v.abs();
    }
    let mut estimate = sum * h;
    let mut error = f64::INFINITY;
    let mut converged = false;
    let mut level_count = n;
    for _ in 1..=MAX_LEVEL {
        h *= 0.5;
        level_count *= 2;
        let mut odd = 0.0;
        for i in (1..=level_count).step_by(2) {
            let v = term(tau_lo + i as f64 * h);
            odd += v;
            l1 += v.abs();
        }
        sum += odd;
        let next = sum * h;
        error = (next - estimate).abs();
        estimate = next;
        if error <= abs_tol.max(rel_tol * estimate.abs()) {
            converged = true;
            break;
        }
    }
    let rule = ExpSinhRule { scale, tau_lo, h, count: level_count as usize };
    (QuadResult { value: estimate, error, l1: l1 * h, converged }, rule)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gk_integrates_polynomials_and_smooth_functions() {
        let r = adaptive_gk(|x| x * x, 0.0, 3.0, 1e-14, 1e-14, 50);
        assert!((r.value - 9.0).abs() < 1e-12);
        let r = adaptive_gk(|x: f64| x.sin(), 0.0, std::f64::consts::PI, 1e-14, 1e-14, 200);
        assert!((r.value - 2.0).abs() < 1e-12);
    }

    #[test]
    fn gk_handles_integrable_endpoint_singularity() {
        let r = adaptive_gk(|x: f64| x.powf(-0.5), 0.0, 1.0, 1e-11, 1e-11, 2000);
        assert!((r.value - 2.0).abs() < 1e-9, "{}", r.value);
    }

    #[test]
    fn exp_sinh_gaussian_and_algebraic_tails() {
        let r = exp_sinh(|y| (-y * y).exp(), 1.0, 1e-15, 1e-14);
        assert!((r.value - 0.5 * std::f64::consts::PI.sqrt()).abs() < 1e-13);
        let r = exp_sinh(|y| 1.0 / (1.0 + y * y), 1.0, 1e-15, 1e-14);
        assert!((r.value - FRAC_PI_2).abs() < 1e-12);
        let r = exp_sinh(|y| (-3.0 * y).exp(), 0.01, 1e-15, 1e-14);
        assert!((r.value - 1.0 / 3.0).abs() < 1e-13);
    }

    #[test]
    fn returned_rule_reproduces_the_estimate() {
        let f = |y: f64| (-y * y).exp() / (1.0 + y);
        let (r, rule) = exp_sinh_with_rule(f, 0.7, 1e-15, 1e-14);
        let again: f64 = rule.nodes().map(|(y, w)| w * f(y)).sum();
        assert!((again - r.value).abs() < 1e-15);
        // Neighbouring integrands are handled by the same nodes.
        let g = |y: f64| (-1.1 * y * y).exp() / (1.0 + y);
        let direct = exp_sinh(g, 0.7, 1e-15, 1e-14).value;
        let reused: f64 = rule.nodes().map(|(y, w)| w * g(y)).sum();
        assert!((direct - reused).abs() < 1e-13);
    }
}
