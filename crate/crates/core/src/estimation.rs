//! Estimators of the autoregressive coefficient of a unit Frechet ARMAX
//! component, their asymptotic variance, and the Hill tail index.
//!
//! The moment estimator rests on `E exp(-1/X) = 1/(2 - c)` for the stationary
//! marginal `exp(-1/((1-c)x))`, giving `c = 2 - 1/E exp(-1/X)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::stats::normal_quantile;

pub const DEFAULT_SIGMA_TOL: f64 = 1e-14;
pub const MAX_SIGMA_LAGS: usize = 10_000;

/// Validity of a ratio-type estimate `2 - 1/p` with `p` expected in `(1/2, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimateFlag {
    Ok,
    /// `p <= 1/2`: the data do not look like this model.
    Misfit,
    /// `p >= 1`.
    Boundary,
}

impl EstimateFlag {
    fn from_p(p: f64) -> Self {
        if !(p > 0.5) {
            EstimateFlag::Misfit
        } else if p >= 1.0 {
            EstimateFlag::Boundary
        } else {
            EstimateFlag::Ok
        }
    }

    pub fn is_ok(self) -> bool {
        self == EstimateFlag::Ok
    }

    pub fn as_str(self) -> &'static str {
        match self {
            EstimateFlag::Ok => "ok",
            EstimateFlag::Misfit => "misfit",
            EstimateFlag::Boundary => "boundary",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MomentEstimate {
    pub c_hat: f64,
    pub u_bar: f64,
    pub flag: EstimateFlag,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LebedevEstimate {
    pub c_hat: f64,
    pub p_tilde: f64,
    pub flag: EstimateFlag,
}

fn ratio_estimate(p: f64) -> f64 {
    let c = 2.0 - 1.0 / p;
    if c.is_finite() {
        c
    } else {
        f64::NAN
    }
}

/// `exp(-1/x)`, with nonpositive `x` contributing 0.
fn frechet_transform(x: f64) -> f64 {
    if x > 0.0 {
        (-1.0 / x).exp()
    } else {
        0.0
    }
}

pub fn estimate_c_moment(series: &[f64]) -> Result<MomentEstimate> {
    if series.is_empty() {
        return Err(Error::domain("empty series"));
    }
    if series.iter().any(|x| x.is_nan()) {
        return Err(Error::domain("series contains NaN"));
    }
    let u_bar = series.iter().map(|&x| frechet_transform(x)).sum::<f64>() / series.len() as f64;
    Ok(MomentEstimate { c_hat: ratio_estimate(u_bar), u_bar, flag: EstimateFlag::from_p(u_bar) })
}

/// Lebedev's estimator from the frequency of non-increases `X_{i+1} <= X_i`.
pub fn estimate_c_lebedev(series: &[f64]) -> Result<LebedevEstimate> {
    if series.len() < 2 {
        return Err(Error::domain("Lebedev estimator needs at least two observations"));
    }
    let descents = series.windows(2).filter(|w| w[1] <= w[0]).count();
    let p_tilde = descents as f64 / (series.len() - 1) as f64;
    Ok(LebedevEstimate { c_hat: ratio_estimate(p_tilde), p_tilde, flag: EstimateFlag::from_p(p_tilde) })
}

/// Davis-Resnick estimator `min_i X_i / X_{i-1}`.
pub fn estimate_c_davis_resnick(series: &[f64]) -> Result<f64> {
    if series.len() < 2 {
        return Err(Error::domain("Davis-Resnick estimator needs at least two observations"));
    }
    if let Some(x) = series.iter().find(|x| !(**x > 0.0)) {
        return Err(Error::domain(format!("Davis-Resnick estimator needs positive data, got {x}")));
    }
    Ok(series.windows(2).map(|w| w[1] / w[0]).fold(f64::INFINITY, f64::min))
}

/// `E[exp(-1/X_0) exp(-1/X_r)]` as the closed form
/// `(1 - c^r) / ((2 - c)(2 - c - c^r - c^{r+1}))`.
pub fn cross_moment(c: f64, r: usize) -> f64 {
    let cr = c.powi(r as i32);
    (1.0 - cr) / ((2.0 - c) * (2.0 - c - cr - cr * c))
}

/// `E[exp(-1/X_0) exp(-1/X_r)]` computed directly from
/// `X_r = max(c^r X_0, Z)` with `Z` independent of `X_0`:
/// with `a = (1 - c^r)/(1 - c)`, `b = 1/(1 - c)`, `m = c^{-r}`,
/// `ab/((a+1)(b+1)) + b/((a+1)(b+1+m(a+1)))`.
pub fn cross_moment_exact(c: f64, r: usize) -> f64 {
    let cr = c.powi(r as i32);
    let a = (1.0 - cr) / (1.0 - c);
    let b = 1.0 / (1.0 - c);
    let tail = if cr == 0.0 { 0.0 } else { b * cr / ((a + 1.0) * (cr * (b + 1.0) + a + 1.0)) };
    a * b / ((a + 1.0) * (b + 1.0)) + tail
}

fn sigma2_series(c: f64, trunc_tol: f64, cross: impl Fn(f64, usize) -> f64) -> f64 {
    let m2 = 1.0 / ((2.0 - c) * (2.0 - c));
    let mut s = 1.0 / (3.0 - 2.0 * c) - m2;
    for r in 1..=MAX_SIGMA_LAGS {
        let term = cross(c, r) - m2;
        s += 2.0 * term;
        if term.abs() < trunc_tol {
            break;
        }
    }
    s
}

/// Long-run variance of `exp(-1/X_i)` built on [`cross_moment`].
pub fn asymptotic_variance(c: f64, trunc_tol: f64) -> f64 {
    sigma2_series(c, trunc_tol, cross_moment)
}

/// Long-run variance of `exp(-1/X_i)` built on [`cross_moment_exact`].
pub fn asymptotic_variance_exact(c: f64, trunc_tol: f64) -> f64 {
    sigma2_series(c, trunc_tol, cross_moment_exact)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VarianceConvention {
    /// `sigma^2 (2 - c)^4`, the delta method for `g(x) = 2 - 1/x`.
    #[default]
    DeltaPow4,
    /// `sigma^2 (3 - 2c)`.
    #[serde(rename = "paper_3m2c")]
    Paper3m2c,
}

impl VarianceConvention {
    pub fn as_str(self) -> &'static str {
        match self {
            VarianceConvention::DeltaPow4 => "delta_pow4",
            VarianceConvention::Paper3m2c => "paper_3m2c",
        }
    }
}

/// Asymptotic variance of `sqrt(n) (c_hat - c)` given `sigma^2`.
pub fn interval_variance(sigma2: f64, c: f64, convention: VarianceConvention) -> f64 {
    match convention {
        VarianceConvention::DeltaPow4 => sigma2 * (2.0 - c).powi(4),
        VarianceConvention::Paper3m2c => sigma2 * (3.0 - 2.0 * c),
    }
}

/// Normal interval `c_hat -/+ z sqrt(V/n)` with `sigma^2` evaluated at `c_hat`.
pub fn confidence_interval(c_hat: f64, n: usize, convention: VarianceConvention, level: f64) -> Result<(f64, f64)> {
    if !(c_hat > 0.0 && c_hat < 1.0) {
        return Err(Error::domain(format!("confidence interval needs c_hat in (0,1), got {c_hat}")));
    }
    if !(0.0..1.0).contains(&level) {
        return Err(Error::domain(format!("level must lie in [0,1), got {level}")));
    }
    if n == 0 {
        return Err(Error::domain("n must be positive"));
    }
    if level == 0.0 {
        return Ok((c_hat, c_hat));
    }
    let v = interval_variance(asymptotic_variance(c_hat, DEFAULT_SIGMA_TOL), c_hat, convention);
    if !(v > 0.0 && v.is_finite()) {
        return Err(Error::NumericLimit(format!("asymptotic variance is {v} at c_hat={c_hat}")));
    }
    let half = normal_quantile(0.5 + level / 2.0) * (v / n as f64).sqrt();
    Ok((c_hat - half, c_hat + half))
}

/// Hill estimator `k / sum_{i<=k} log(X_(n-i+1) / X_(n-k))`.
pub fn hill_tail_index(series: &[f64], k: usize) -> Result<f64> {
    let n = series.len();
    if k == 0 || k >= n {
        return Err(Error::domain(format!("Hill estimator needs 1 <= k < n, got k={k}, n={n}")));
    }
    if series.iter().any(|x| x.is_nan()) {
        return Err(Error::domain("series contains NaN"));
    }
    let mut sorted = series.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let base = sorted[k];
    if !(base > 0.0) {
        return Err(Error::domain("Hill estimator needs positive top order statistics"));
    }
    let s: f64 = sorted[..k].iter().map(|x| (x / base).ln()).sum();
    if !(s > 0.0) {
        return Err(Error::undefined("tied upper order statistics"));
    }
    Ok(k as f64 / s)
}

/// Default Hill `k`, `ceil(sqrt(n))`.
pub fn default_hill_k(n: usize) -> usize {
    (n as f64).sqrt().ceil() as usize
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EstimateReport {
    pub margin: usize,
    pub n: usize,
    pub u_bar: f64,
    pub c_moment: f64,
    pub moment_flag: EstimateFlag,
    pub p_tilde: f64,
    pub c_lebedev: f64,
    pub lebedev_flag: EstimateFlag,
    /// `None` when the series has nonpositive values.
    pub c_davis_resnick: Option<f64>,
    /// `sigma^2` at `c_moment`; `None` when the moment estimate is invalid.
    pub sigma2: Option<f64>,
    pub ci: Option<(f64, f64)>,
    pub level: f64,
    pub variance_convention: VarianceConvention,
    pub alpha_hill: Option<f64>,
}

impl EstimateReport {
    pub fn warnings(&self) -> Vec<String> {
        let mut w = Vec::new();
        if !self.moment_flag.is_ok() {
            w.push(format!("moment estimator {}: u_bar={}", self.moment_flag.as_str(), self.u_bar));
        }
        if !self.lebedev_flag.is_ok() {
            w.push(format!("lebedev estimator {}: p_tilde={}", self.lebedev_flag.as_str(), self.p_tilde));
        }
        if self.moment_flag.is_ok() && self.ci.is_none() {
            w.push(format!("no confidence interval: sigma2={:?}", self.sigma2));
        }
        if self.c_davis_resnick.is_none() {
            w.push("davis-resnick estimator undefined on nonpositive data".into());
        }
        if self.alpha_hill.is_none() {
            w.push("hill estimator undefined".into());
        }
        w
    }
}

/// All estimators on one component series.
pub fn estimate_report(
    margin: usize,
    series: &[f64],
    convention: VarianceConvention,
    level: f64,
    hill_k: Option<usize>,
) -> Result<EstimateReport> {
    let n = series.len();
    let mom = estimate_c_moment(series)?;
    let leb = estimate_c_lebedev(series)?;
    let c_dr = estimate_c_davis_resnick(series).ok();
    let valid = mom.flag.is_ok() && mom.c_hat > 0.0 && mom.c_hat < 1.0;
    let sigma2 = valid.then(|| asymptotic_variance(mom.c_hat, DEFAULT_SIGMA_TOL));
    let ci = if valid { confidence_interval(mom.c_hat, n, convention, level).ok() } else { None };
    let k = hill_k.unwrap_or_else(|| default_hill_k(n)).min(n - 1);
    let alpha_hill = hill_tail_index(series, k).ok();
    Ok(EstimateReport {
        margin,
        n,
        u_bar: mom.u_bar,
        c_moment: mom.c_hat,
        moment_flag: mom.flag,
        p_tilde: leb.p_tilde,
        c_lebedev: leb.c_hat,
        lebedev_flag: leb.flag,
        c_davis_resnick: c_dr,
        sigma2,
        ci,
        level,
        variance_convention: convention,
        alpha_hill,
    })
}
