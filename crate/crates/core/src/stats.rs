//! Small statistical helpers shared by the estimators and the test harness.

use statrs::distribution::{ContinuousCDF, Normal};

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Unbiased sample variance.
pub fn variance(xs: &[f64]) -> f64 {
    let m = mean(xs);
    xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() as f64 - 1.0)
}

/// Ranks 1..=n. Ties get consecutive ranks in order of appearance, so the
/// result depends on the data only through its ordering.
pub fn ranks(xs: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..xs.len()).collect();
    idx.sort_by(|&a, &b| xs[a].total_cmp(&xs[b]));
    let mut out = vec![0; xs.len()];
    for (r, &i) in idx.iter().enumerate() {
        out[i] = r + 1;
    }
    out
}

/// Linear-interpolation sample quantile (type 7).
pub fn empirical_quantile(xs: &[f64], p: f64) -> f64 {
    let mut s = xs.to_vec();
    s.sort_by(f64::total_cmp);
    let h = (s.len() - 1) as f64 * p.clamp(0.0, 1.0);
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    s[lo] + (h - lo as f64) * (s[hi] - s[lo])
}

/// Kolmogorov-Smirnov distance between the empirical CDF of `xs` and `cdf`.
pub fn ks_distance(xs: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let mut s = xs.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len() as f64;
    s.iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max)
}

/// Two-sample Kolmogorov-Smirnov distance.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> f64 {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
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

/// Asymptotic 1% critical value of the one-sample KS distance.
pub fn ks_critical_1pct(n: usize) -> f64 {
    1.6276 / (n as f64).sqrt()
}

pub fn normal_quantile(p: f64) -> f64 {
    Normal::new(0.0, 1.0).expect("standard normal").inverse_cdf(p)
}

fn normal_cdf(x: f64) -> f64 {
    Normal::new(0.0, 1.0).expect("standard normal").cdf(x)
}

/// Anderson-Darling test of normality with mean and variance estimated from
/// the sample. Returns `(A*^2, p-value)` using the small-sample modification
/// `A*^2 = A^2 (1 + 0.75/n + 2.25/n^2)` and D'Agostino-Stephens p-value
/// approximations.
pub fn anderson_darling_normal(xs: &[f64]) -> (f64, f64) {
    let n = xs.len();
    let m = mean(xs);
    let sd = variance(xs).sqrt();
    let mut z: Vec<f64> = xs.iter().map(|x| (x - m) / sd).collect();
    z.sort_by(f64::total_cmp);
    let nf = n as f64;
    let mut s = 0.0;
    for i in 0..n {
        let fi = normal_cdf(z[i]).clamp(1e-300, 1.0 - 1e-16);
        let fr = normal_cdf(z[n - 1 - i]).clamp(1e-300, 1.0 - 1e-16);
        s += (2.0 * i as f64 + 1.0) * (fi.ln() + (1.0 - fr).ln());
    }
    let a2 = -nf - s / nf;
    let a = a2 * (1.0 + 0.75 / nf + 2.25 / (nf * nf));
    let p = if a >= 0.6 {
        (1.2937 - 5.709 * a + 0.0186 * a * a).exp()
    } else if a >= 0.34 {
        (0.9177 - 4.279 * a - 1.38 * a * a).exp()
    } else if a >= 0.2 {
        1.0 - (-8.318 + 42.796 * a - 59.938 * a * a).exp()
    } else {
        1.0 - (-13.436 + 101.14 * a - 223.73 * a * a).exp()
    };
    (a, p.clamp(0.0, 1.0))
}
