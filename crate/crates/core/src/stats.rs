//! Small numerical and statistical helpers shared by the harness and
//! the test oracles: quadrature, Kolmogorov–Smirnov distance, Monte
//! Carlo summaries.

/// Sample mean and standard error of the mean.
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct McSummary {
    pub mean: f64,
    pub stderr: f64,
    pub n: usize,
}

pub fn summarize(samples: &[f64]) -> McSummary {
    let n = samples.len();
    assert!(n > 1, "need at least two samples");
    let mean = samples.iter().sum::<f64>() / n as f64;
    let var = samples.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n as f64 - 1.0);
    McSummary { mean, stderr: (var / n as f64).sqrt(), n }
}

/// One-sample Kolmogorov–Smirnov statistic `sup |F_n - F|` against the
/// CDF `cdf`. Sorts the sample in place.
pub fn ks_statistic(samples: &mut [f64], cdf: impl Fn(f64) -> f64) -> f64 {
    assert!(!samples.is_empty());
    samples.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = samples.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in samples.iter().enumerate() {
        let f = cdf(x);
        d = d.max((f - i as f64 / n).abs());
        d = d.max(((i + 1) as f64 / n - f).abs());
    }
    d
}

/// Critical value of the one-sample KS statistic at significance
/// `alpha` (asymptotic): `c(alpha)/sqrt(n)` with
/// `c(alpha) = sqrt(-ln(alpha/2)/2)`.
pub fn ks_critical(n: usize, alpha: f64) -> f64 {
    ((-((alpha / 2.0).ln())) / 2.0).sqrt() / (n as f64).sqrt()
}

/// Adaptive Simpson quadrature with absolute tolerance `tol`.
pub fn adaptive_simpson(f: &impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn simpson(f: &impl Fn(f64) -> f64, a: f64, fa: f64, b: f64, fb: f64) -> (f64, f64, f64) {
        let m = 0.5 * (a + b);
        let fm = f(m);
        ((b - a) / 6.0 * (fa + 4.0 * fm + fb), m, fm)
    }
    fn rec(
        f: &impl Fn(f64) -> f64,
        a: f64,
        fa: f64,
        b: f64,
        fb: f64,
        whole: f64,
        m: f64,
        fm: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let (left, lm, flm) = simpson(f, a, fa, m, fm);
        let (right, rm, frm) = simpson(f, m, fm, b, fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            left + right + delta / 15.0
        } else {
            rec(f, a, fa, m, fm, left, lm, flm, tol / 2.0, depth - 1)
                + rec(f, m, fm, b, fb, right, rm, frm, tol / 2.0, depth - 1)
        }
    }
    let fa = f(a);
    let fb = f(b);
    let (whole, m, fm) = simpson(f, a, fa, b, fb);
    rec(f, a, fa, b, fb, whole, m, fm, tol, 48)
}

/// Trapezoid rule on equally spaced samples with spacing `dt`.
pub fn trapezoid(values: &[f64], dt: f64) -> f64 {
    if values.len() < 2 {
        return 0.0;
    }
    let inner: f64 = values[1..values.len() - 1].iter().sum();
    dt * (0.5 * values[0] + inner + 0.5 * values[values.len() - 1])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simpson_integrates_polynomials_exactly() {
        let f = |x: f64| 3.0 * x * x;
        let v = adaptive_simpson(&f, 0.0, 2.0, 1e-12);
        assert!((v - 8.0).abs() < 1e-10);
    }

    #[test]
    fn simpson_handles_mild_singularity() {
        // int_0^1 x^{-1/2} dx = 2; integrable endpoint singularity is
        // approached adaptively from a tiny offset
        let f = |x: f64| x.sqrt().recip();
        let v = adaptive_simpson(&f, 1e-12, 1.0, 1e-10);
        assert!((v - 2.0).abs() < 1e-4, "{v}");
    }

    #[test]
    fn ks_of_exact_uniform_grid_is_small() {
        let n = 1000;
        let mut xs: Vec<f64> = (0..n).map(|i| (i as f64 + 0.5) / n as f64).collect();
        let d = ks_statistic(&mut xs, |x| x);
        assert!(d <= 0.5 / n as f64 + 1e-12);
    }

    #[test]
    fn trapezoid_linear_exact() {
        let vals: Vec<f64> = (0..11).map(|i| i as f64).collect();
        assert!((trapezoid(&vals, 0.1) - 5.0).abs() < 1e-12);
    }
}
