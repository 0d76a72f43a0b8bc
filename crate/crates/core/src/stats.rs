//! Empirical distribution checks used by the Monte Carlo tests and reports.

/// Kolmogorov-Smirnov distance between the empirical CDF of `samples` and
/// `cdf`. Sorts `samples` in place.
pub fn ks_distance<F: FnMut(f64) -> f64>(samples: &mut [f64], mut cdf: F) -> f64 {
    samples.sort_by(f64::total_cmp);
    let n = samples.len() as f64;
    samples.iter().enumerate().fold(0.0f64, |d, (i, &x)| {
        let f = cdf(x);
        d.max(f - i as f64 / n).max((i + 1) as f64 / n - f)
    })
}

/// Bounds on the Kolmogorov-Smirnov distance that evaluate `cdf` only at
/// every `stride`-th order statistic (and the last one). Sorts `samples` in
/// place and returns `(lower, upper)`.
///
/// Between two evaluated order statistics the CDF is bracketed by its values
/// at the ends, so `upper` is a rigorous bound and exceeds the exact
/// distance by at most the largest CDF increment across one stride.
pub fn ks_distance_bounds<F: FnMut(f64) -> f64>(samples: &mut [f64], stride: usize, mut cdf: F) -> (f64, f64) {
    samples.sort_by(f64::total_cmp);
    let n = samples.len();
    if n == 0 {
        return (0.0, 0.0);
    }
    let stride = stride.max(1);
    let mut idx: Vec<usize> = (0..n).step_by(stride).collect();
    if *idx.last().expect("non-empty") != n - 1 {
        idx.push(n - 1);
    }
    let fs: Vec<f64> = idx.iter().map(|&i| cdf(samples[i])).collect();
    let nf = n as f64;
    let mut lower = 0.0f64;
    for (&i, &f) in idx.iter().zip(&fs) {
        lower = lower.max(f - i as f64 / nf).max((i + 1) as f64 / nf - f);
    }
    let mut upper = lower;
    for w in 0..idx.len().saturating_sub(1) {
        // Order statistics strictly between two evaluated ones.
        let (a, b) = (idx[w], idx[w + 1]);
        if b > a + 1 {
            upper = upper.max(fs[w + 1] - (a + 1) as f64 / nf).max(b as f64 / nf - fs[w]);
        }
    }
    (lower, upper)
}

/// Two-sample Kolmogorov-Smirnov distance. Sorts both inputs in place.
pub fn ks_two_sample(a: &mut [f64], b: &mut [f64]) -> f64 {
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j, mut d) = (0usize, 0usize, 0.0f64);
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    d
}

/// Asymptotic 1% critical value of the one-sample statistic.
pub fn ks_critical_1pct(n: usize) -> f64 {
    1.6276 / (n as f64).sqrt()
}

/// Asymptotic 1% critical value of the two-sample statistic.
pub fn ks_critical_1pct_two_sample(n: usize, m: usize) -> f64 {
    let (n, m) = (n as f64, m as f64);
    1.6276 * ((n + m) / (n * m)).sqrt()
}

/// Sample mean and unbiased sample variance; `None` for fewer than two values.
pub fn mean_variance(xs: &[f64]) -> Option<(f64, f64)> {
    if xs.len() < 2 {
        return None;
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    Some((mean, var))
}
