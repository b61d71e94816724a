//! The d-variate ARMAX recursion
//!
//! ```text
//! X[n,j] = max(c[j] * X[n-1,j], Y[n,j])
//! ```
//!
//! with i.i.d. innovation vectors `Y[n] ~ G`, plus the stationarity criterion
//! and the stationary law `F(x) = prod_{i>=0} G(x / c^i)`, the unique solution
//! of `F(x) = F(x/c) G(x)`.

use rand::Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::copulas::{CopulaSpec, ExtremeValueCopula};
use crate::error::{Error, Result};
use crate::margins::MarginSpec;
use crate::rng;

pub const DEFAULT_BURN_IN: usize = 1_000;
pub const DEFAULT_TRUNC_TOL: f64 = 1e-12;
pub const DEFAULT_MAX_TERMS: usize = 10_000;
pub const DEFAULT_STATIONARITY_TOL: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InitPolicy {
    /// Draw the first row from the stationary marginals. Only available in
    /// closed form for unit Frechet innovations; other margins fall back to
    /// `BurnIn(DEFAULT_BURN_IN)`.
    ExactMarginal,
    /// Start from an innovation draw and discard `length` recursion steps.
    BurnIn { length: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProcessConfig {
    pub c: Vec<f64>,
    pub margins: Vec<MarginSpec>,
    pub copula: CopulaSpec,
    #[serde(default = "default_init")]
    pub init: InitPolicy,
}

fn default_init() -> InitPolicy {
    InitPolicy::BurnIn { length: DEFAULT_BURN_IN }
}

impl ProcessConfig {
    pub fn new(c: Vec<f64>, margins: Vec<MarginSpec>, copula: CopulaSpec) -> Result<Self> {
        let cfg = ProcessConfig { c, margins, copula, init: default_init() };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_init(mut self, init: InitPolicy) -> Self {
        self.init = init;
        self
    }

    pub fn d(&self) -> usize {
        self.c.len()
    }

    pub fn validate(&self) -> Result<()> {
        if self.c.is_empty() {
            return Err(Error::config("process needs at least one component"));
        }
        if self.margins.len() != self.c.len() {
            return Err(Error::config(format!(
                "{} margins for {} autoregressive coefficients",
                self.margins.len(),
                self.c.len()
            )));
        }
        if let Some(c) = self.c.iter().find(|c| !(**c > 0.0 && **c < 1.0)) {
            return Err(Error::config(format!("autoregressive coefficient {c} outside (0,1)")));
        }
        for m in &self.margins {
            m.validate()?;
        }
        self.copula.validate()?;
        if let InitPolicy::BurnIn { length: 0 } = self.init {
            return Err(Error::config("burn-in length must be positive"));
        }
        Ok(())
    }

    /// Short hex digest of the canonical JSON form.
    pub fn digest(&self) -> String {
        let json = serde_json::to_string(self).expect("config serializes");
        hex::encode(&Sha256::digest(json.as_bytes())[..8])
    }

    /// `-log G(y)` for the innovation law.
    pub fn innovation_neg_log_cdf(&self, y: &[f64]) -> f64 {
        let x: Vec<f64> = self.margins.iter().zip(y).map(|(m, &v)| m.neg_log_cdf(v)).collect();
        self.copula.exponent(&x)
    }

    pub fn innovation_cdf(&self, y: &[f64]) -> f64 {
        (-self.innovation_neg_log_cdf(y)).exp()
    }

    /// One innovation vector: a copula draw pushed through the margin
    /// quantiles.
    pub fn sample_innovation<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        self.copula
            .sample(self.d(), rng)
            .into_iter()
            .zip(&self.margins)
            .map(|(u, m)| {
                // frailty draws can round onto the closed endpoints
                let u = u.clamp(f64::MIN_POSITIVE, 1.0 - f64::EPSILON / 2.0);
                m.quantile(u).expect("u clamped into (0,1)")
            })
            .collect()
    }
}

/// Simulated observations, stored row-major (`n` rows of `d` values).
#[derive(Debug, Clone, PartialEq)]
pub struct SamplePath {
    pub data: Vec<f64>,
    pub n: usize,
    pub d: usize,
    pub seed: u64,
    pub config_digest: String,
}

impl SamplePath {
    pub fn from_rows(rows: Vec<Vec<f64>>, seed: u64, config_digest: String) -> Result<Self> {
        let d = rows.first().map(|r| r.len()).unwrap_or(0);
        if rows.iter().any(|r| r.len() != d) {
            return Err(Error::domain("ragged rows"));
        }
        let n = rows.len();
        Ok(SamplePath { data: rows.into_iter().flatten().collect(), n, d, seed, config_digest })
    }

    pub fn from_columns(columns: &[Vec<f64>]) -> Result<Self> {
        let n = columns.first().map(|c| c.len()).unwrap_or(0);
        if columns.iter().any(|c| c.len() != n) {
            return Err(Error::domain("columns differ in length"));
        }
        let rows = (0..n).map(|i| columns.iter().map(|c| c[i]).collect()).collect();
        Self::from_rows(rows, 0, String::new())
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.d..(i + 1) * self.d]
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.d + j]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.n).map(|i| self.get(i, j)).collect()
    }

    pub fn columns(&self) -> Vec<Vec<f64>> {
        (0..self.d).map(|j| self.column(j)).collect()
    }
}

/// Runs the recursion from `x0` over the supplied innovations; the output has
/// one row per innovation row and excludes `x0`.
pub fn run_recursion(c: &[f64], x0: &[f64], innovations: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let mut x = x0.to_vec();
    innovations
        .iter()
        .map(|y| {
            for j in 0..x.len() {
                x[j] = (c[j] * x[j]).max(y[j]);
            }
            x.clone()
        })
        .collect()
}

/// Simulates `n` rows on stream 0 of `seed`.
pub fn simulate_path(config: &ProcessConfig, n: usize, seed: u64) -> Result<SamplePath> {
    let mut r = rng::stream(seed);
    let data = simulate_with_rng(config, n, &mut r)?;
    Ok(SamplePath { data, n, d: config.d(), seed, config_digest: config.digest() })
}

/// Row-major simulation driven by an arbitrary stream.
pub fn simulate_with_rng<R: Rng + ?Sized>(config: &ProcessConfig, n: usize, rng: &mut R) -> Result<Vec<f64>> {
    config.validate()?;
    if n == 0 {
        return Err(Error::config("path length must be positive"));
    }
    let d = config.d();
    let mut out = Vec::with_capacity(n * d);

    let mut init = config.init;
    if init == InitPolicy::ExactMarginal {
        if !is_stationary(config) {
            return Err(Error::config("exact_marginal initialisation requires a stationary configuration"));
        }
        if !config.margins.iter().all(|m| m.is_unit_frechet()) {
            init = InitPolicy::BurnIn { length: DEFAULT_BURN_IN };
        }
    }

    let mut x = match init {
        InitPolicy::ExactMarginal => {
            let u = config.copula.sample(d, rng);
            let x: Vec<f64> = u
                .iter()
                .zip(&config.c)
                .map(|(&u, &c)| {
                    let u = u.clamp(f64::MIN_POSITIVE, 1.0 - f64::EPSILON / 2.0);
                    -1.0 / ((1.0 - c) * u.ln())
                })
                .collect();
            out.extend_from_slice(&x);
            x
        }
        InitPolicy::BurnIn { length } => {
            let mut x = config.sample_innovation(rng);
            for _ in 0..length {
                step(&config.c, &mut x, &config.sample_innovation(rng));
            }
            x
        }
    };

    while out.len() < n * d {
        let y = config.sample_innovation(rng);
        step(&config.c, &mut x, &y);
        out.extend_from_slice(&x);
    }
    Ok(out)
}

fn step(c: &[f64], x: &mut [f64], y: &[f64]) {
    for j in 0..x.len() {
        x[j] = (c[j] * x[j]).max(y[j]);
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StationarityCheck {
    pub stationary: bool,
    pub series_value: f64,
    pub terms: usize,
}

/// Partial sums of `sum_{i>=1} -log G(x / c^i)` for an arbitrary innovation
/// law given through `neg_log_g`.
pub fn stationarity_series(
    neg_log_g: impl Fn(&[f64]) -> f64,
    c: &[f64],
    probe: &[f64],
    tol: f64,
    max_terms: usize,
) -> Result<StationarityCheck> {
    if probe.len() != c.len() {
        return Err(Error::domain("probe length differs from dimension"));
    }
    if let Some(p) = probe.iter().find(|p| !(**p > 0.0)) {
        return Err(Error::domain(format!("probe entries must be positive, got {p}")));
    }
    let mut sum = 0.0;
    let mut last = f64::INFINITY;
    let mut terms = 0;
    for i in 1..=max_terms {
        let y: Vec<f64> = probe.iter().zip(c).map(|(x, c)| x / c.powi(i as i32)).collect();
        last = neg_log_g(&y);
        sum += last;
        terms = i;
        if !sum.is_finite() || last < tol {
            break;
        }
    }
    Ok(StationarityCheck {
        stationary: sum.is_finite() && sum > 0.0 && last < tol,
        series_value: sum,
        terms,
    })
}

pub fn check_stationarity(
    config: &ProcessConfig,
    probe: &[f64],
    tol: f64,
    max_terms: usize,
) -> Result<StationarityCheck> {
    config.validate()?;
    if config.margins.iter().any(|m| m.right_endpoint() <= 0.0) {
        return Ok(StationarityCheck { stationary: false, series_value: 0.0, terms: 0 });
    }
    stationarity_series(|y| config.innovation_neg_log_cdf(y), &config.c, probe, tol, max_terms)
}

/// Whether some probe `x = (q_1(p), ..., q_d(p))` built from innovation
/// quantiles satisfies the stationarity criterion.
pub fn is_stationary(config: &ProcessConfig) -> bool {
    [1e-9, 1e-6, 1e-3, 0.1, 0.5, 0.9].iter().any(|&p| {
        let probe: Vec<f64> = config.margins.iter().map(|m| m.quantile(p).unwrap_or(f64::NAN)).collect();
        probe.iter().all(|v| *v > 0.0)
            && check_stationarity(config, &probe, DEFAULT_STATIONARITY_TOL, DEFAULT_MAX_TERMS)
                .map(|s| s.stationary)
                .unwrap_or(false)
    })
}

/// Stationary marginal CDF under unit Frechet innovations,
/// `exp(-1 / ((1 - c) x))`.
pub fn stationary_marginal_cdf(c: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    (-1.0 / ((1.0 - c) * x)).exp()
}

/// `-log F(x)` of the stationary law, truncating the product once a factor
/// exceeds `1 - trunc_tol`. Entries of `x` may be `+inf` to leave a
/// coordinate unconstrained.
pub fn stationary_neg_log_cdf(config: &ProcessConfig, x: &[f64], trunc_tol: f64) -> Result<f64> {
    if x.len() != config.d() {
        return Err(Error::domain("argument length differs from dimension"));
    }
    if let Some(v) = x.iter().find(|v| !(**v > 0.0)) {
        return Err(Error::domain(format!("stationary CDF needs positive arguments, got {v}")));
    }
    if !is_stationary(config) {
        return Err(Error::config("configuration is not stationary"));
    }
    Ok(neg_log_product(config, x, trunc_tol))
}

pub(crate) fn neg_log_product(config: &ProcessConfig, x: &[f64], trunc_tol: f64) -> f64 {
    let mut sum = 0.0;
    for i in 0..DEFAULT_MAX_TERMS {
        let y: Vec<f64> = x.iter().zip(&config.c).map(|(x, c)| x / c.powi(i as i32)).collect();
        let term = config.innovation_neg_log_cdf(&y);
        sum += term;
        if !sum.is_finite() || term < trunc_tol {
            break;
        }
    }
    sum
}

pub fn stationary_joint_cdf(config: &ProcessConfig, x: &[f64], trunc_tol: f64) -> Result<f64> {
    stationary_neg_log_cdf(config, x, trunc_tol).map(|s| (-s).exp())
}

/// `-log F_j(x)` of the stationary marginal of component `j`.
pub fn stationary_marginal_neg_log(config: &ProcessConfig, j: usize, x: f64) -> f64 {
    if x <= 0.0 {
        return f64::INFINITY;
    }
    let (m, c) = (config.margins[j], config.c[j]);
    if m.is_unit_frechet() {
        return 1.0 / ((1.0 - c) * x);
    }
    let mut sum = 0.0;
    for i in 0..DEFAULT_MAX_TERMS {
        let term = m.neg_log_cdf(x / c.powi(i as i32));
        sum += term;
        if !sum.is_finite() || term < DEFAULT_TRUNC_TOL * 1e-3 {
            break;
        }
    }
    sum
}

/// Quantile of the stationary marginal of component `j`, located by
/// bisection on `-log F_j` (closed form for unit Frechet innovations).
/// `neg_log_p = -log p` is taken directly so that levels extremely close to
/// one keep their precision.
pub fn stationary_marginal_quantile(config: &ProcessConfig, j: usize, neg_log_p: f64) -> Result<f64> {
    if !(neg_log_p > 0.0 && neg_log_p.is_finite()) {
        return Err(Error::domain("stationary quantile needs a probability in (0,1)"));
    }
    if config.margins[j].is_unit_frechet() {
        return Ok(1.0 / ((1.0 - config.c[j]) * neg_log_p));
    }
    let f = |x: f64| stationary_marginal_neg_log(config, j, x);
    let (mut lo, mut hi) = (1.0, 1.0);
    let mut guard = 0;
    while f(lo) < neg_log_p {
        lo *= 0.5;
        guard += 1;
        if guard > 2000 {
            return Err(Error::NumericLimit("stationary quantile: lower bracket".into()));
        }
    }
    guard = 0;
    while f(hi) > neg_log_p {
        hi *= 2.0;
        guard += 1;
        if guard > 2000 {
            return Err(Error::NumericLimit("stationary quantile: upper bracket".into()));
        }
    }
    for _ in 0..400 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) > neg_log_p {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Level `u` with `n (1 - F_j(u)) = tau` exactly, for the unit Frechet
/// stationary marginal: `u = -1 / ((1 - c) log(1 - tau/n))`.
pub fn normalized_level(c: f64, n: usize, tau: f64) -> Result<f64> {
    if !(tau >= 0.0) {
        return Err(Error::domain(format!("tau must be nonnegative, got {tau}")));
    }
    if tau >= n as f64 {
        return Err(Error::domain(format!("tau={tau} >= n={n}: level undefined")));
    }
    if tau == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(-1.0 / ((1.0 - c) * (-tau / n as f64).ln_1p()))
}
