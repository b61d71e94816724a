//! Lag-r tail dependence (`lambda`) and tail independence (`eta`)
//! coefficients between components `j` and `j'` of the process.
//!
//! With `w_t` the `1 - t` quantile of the stationary marginal and
//! `q_t = F_j'(c_j'^{-r} w_j't)`, the lag-r coefficient is the limit
//!
//! ```text
//! lambda = 2 - lim_{t -> 0} (1/t) (1 - C_jj'(1 - t, q_t) (1 - t) / q_t)
//! ```
//!
//! where `C_jj'` is the copula of `(X_j, X_j')` at a common time. The limit is
//! evaluated along a decreasing grid and extrapolated linearly in `t`.

use serde::{Deserialize, Serialize};

use crate::armax::{is_stationary, neg_log_product, stationary_marginal_quantile, SamplePath};
use crate::error::{Error, Result};
use crate::margins::MarginSpec;
use crate::stats::ranks;
use crate::ProcessConfig;

pub const DEFAULT_T_GRID: [f64; 4] = [1e-2, 1e-3, 1e-4, 1e-5];
/// Half-width of the bands around 1/2 and 1 used by [`classify_tail_regime`].
pub const REGIME_BAND: f64 = 0.05;
const JOINT_TRUNC_TOL: f64 = 1e-20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TailRegime {
    Dependent,
    PositivelyAssociated,
    NearIndependent,
    NegativelyAssociated,
}

impl TailRegime {
    pub fn as_str(&self) -> &'static str {
        match self {
            TailRegime::Dependent => "dependent",
            TailRegime::PositivelyAssociated => "positively_associated",
            TailRegime::NearIndependent => "near_independent",
            TailRegime::NegativelyAssociated => "negatively_associated",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TailDepResult {
    pub j: usize,
    pub jp: usize,
    pub r: usize,
    pub lambda: Option<f64>,
    pub eta: Option<f64>,
    pub regime: Option<TailRegime>,
}

/// One grid evaluation: the finite-t expression and its Frechet-Hoeffding
/// envelope (the same expression with `W` and `M` in place of `C_jj'`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TdcGridPoint {
    pub t: f64,
    pub lower: f64,
    pub value: f64,
    pub upper: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TdcLimit {
    pub value: f64,
    /// Extrapolated value before clamping.
    pub raw: f64,
    pub grid: Vec<TdcGridPoint>,
    /// `[0, c^{alpha r}]` when `j'` is in the Frechet domain.
    pub bounds: Option<(f64, f64)>,
}

/// `[0, c^{alpha r}]`.
pub fn tdc_bounds(c: f64, alpha: f64, r: usize) -> Result<(f64, f64)> {
    if !(c > 0.0 && c < 1.0) || !(alpha > 0.0) {
        return Err(Error::domain(format!("tdc_bounds needs c in (0,1) and alpha > 0, got c={c}, alpha={alpha}")));
    }
    Ok((0.0, c.powf(alpha * r as f64)))
}

/// Admissible range of `eta` for Weibull-min(k) innovations (exponential is
/// k=1): `[1/2, max(1/2, c^{r k})]`. `None` for other margins.
pub fn eta_bounds(margin: &MarginSpec, c: f64, r: usize) -> Option<(f64, f64)> {
    let k = match *margin {
        MarginSpec::WeibullMin { k } => k,
        MarginSpec::Exponential { .. } => 1.0,
        _ => return None,
    };
    Some((0.5, c.powf(r as f64 * k).max(0.5)))
}

/// Linear extrapolation to `t = 0` through the last two grid points.
pub fn richardson_limit(ts: &[f64], fs: &[f64]) -> Result<f64> {
    let n = ts.len();
    if n != fs.len() || n < 2 {
        return Err(Error::domain("limit extrapolation needs at least two grid points"));
    }
    let (t3, t4, f3, f4) = (ts[n - 2], ts[n - 1], fs[n - 2], fs[n - 1]);
    if n >= 3 {
        let last = f4 - f3;
        let prev = f3 - fs[n - 3];
        if last.abs() > 10.0 * prev.abs() && last.abs() > 1e-9 {
            return Err(Error::NumericLimit(format!(
                "tail dependence grid does not converge: last increment {last:e}, previous {prev:e}"
            )));
        }
    }
    Ok(f4 + (f4 - f3) * t4 / (t3 - t4))
}

fn check_grid(t_grid: &[f64]) -> Result<()> {
    if t_grid.len() < 2 {
        return Err(Error::domain("t_grid needs at least two points"));
    }
    if t_grid.iter().any(|t| !(*t > 0.0 && *t < 1.0)) || t_grid.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::domain("t_grid must be strictly decreasing in (0,1)"));
    }
    Ok(())
}

fn grid_point(config: &ProcessConfig, j: usize, jp: usize, r: usize, t: f64) -> Result<TdcGridPoint> {
    let d = config.d();
    let neg_log_1mt = -(-t).ln_1p();
    let w_j = stationary_marginal_quantile(config, j, neg_log_1mt)?;
    let w_jp = stationary_marginal_quantile(config, jp, neg_log_1mt)?;
    let cr = config.c[jp].powi(r as i32);

    // -log q and the second argument of the joint CDF
    let (neg_log_q, x_jp) = match config.margins[jp].attraction_domain().frechet_alpha() {
        Some(alpha) => {
            let nlq = -(-t * config.c[jp].powf(alpha * r as f64)).ln_1p();
            let x = if nlq > 0.0 { stationary_marginal_quantile(config, jp, nlq)? } else { f64::INFINITY };
            (nlq, x)
        }
        None => {
            let x = w_jp / cr;
            (crate::armax::stationary_marginal_neg_log(config, jp, x), x)
        }
    };

    let neg_log_c = if j == jp {
        neg_log_1mt.max(neg_log_q)
    } else {
        let mut x = vec![f64::INFINITY; d];
        x[j] = w_j;
        x[jp] = x_jp;
        neg_log_product(config, &x, JOINT_TRUNC_TOL)
    };
    let q = (-neg_log_q).exp();
    let expr = |neg_log_joint: f64| 2.0 - (-(-neg_log_joint - neg_log_1mt + neg_log_q).exp_m1()) / t;

    let upper = expr(neg_log_1mt.max(neg_log_q));
    let w = (q - t).max(0.0);
    let lower = if w > 0.0 { expr(-w.ln()) } else { 2.0 - 1.0 / t };
    Ok(TdcGridPoint { t, lower, value: expr(neg_log_c), upper })
}

/// Theoretical lag-`r` tail dependence coefficient between `X_{n,j}` and
/// `X_{n+r,j'}`.
pub fn theoretical_lag_tdc(config: &ProcessConfig, j: usize, jp: usize, r: usize, t_grid: &[f64]) -> Result<TdcLimit> {
    config.validate()?;
    let d = config.d();
    if j >= d || jp >= d {
        return Err(Error::domain(format!("component index out of range for d={d}")));
    }
    check_grid(t_grid)?;
    if !is_stationary(config) {
        return Err(Error::config("configuration is not stationary"));
    }
    let grid = t_grid.iter().map(|&t| grid_point(config, j, jp, r, t)).collect::<Result<Vec<_>>>()?;
    let vals: Vec<f64> = grid.iter().map(|g| g.value).collect();
    let raw = richardson_limit(t_grid, &vals)?;
    let last = grid[grid.len() - 1];
    let lo_env = richardson_limit(t_grid, &grid.iter().map(|g| g.lower).collect::<Vec<_>>()).unwrap_or(last.lower);
    let hi_env = richardson_limit(t_grid, &grid.iter().map(|g| g.upper).collect::<Vec<_>>()).unwrap_or(last.upper);

    let bounds = config.margins[jp]
        .attraction_domain()
        .frechet_alpha()
        .map(|a| tdc_bounds(config.c[jp], a, r))
        .transpose()?;
    let (mut lo, mut hi) = (lo_env.max(0.0), hi_env.min(1.0));
    if let Some((b0, b1)) = bounds {
        lo = lo.max(b0);
        hi = hi.min(b1);
    }
    // rounding can make the envelope cross by ~1e-13
    let value = if lo > hi { hi.max(0.0) } else { raw.clamp(lo, hi) };
    Ok(TdcLimit { value, raw, grid, bounds })
}

/// Column `j` over rows `0..m` and column `j'` over rows `r..r+m`, ranked.
fn lagged_ranks(path: &SamplePath, j: usize, jp: usize, r: usize) -> Result<(Vec<usize>, Vec<usize>)> {
    if j >= path.d || jp >= path.d {
        return Err(Error::domain(format!("component index out of range for d={}", path.d)));
    }
    if r >= path.n {
        return Err(Error::domain(format!("lag r={r} leaves no pairs for n={}", path.n)));
    }
    let m = path.n - r;
    let a: Vec<f64> = (0..m).map(|i| path.get(i, j)).collect();
    let b: Vec<f64> = (0..m).map(|i| path.get(i + r, jp)).collect();
    Ok((ranks(&a), ranks(&b)))
}

/// Finite-t conditional exceedance frequency on ranks.
pub fn empirical_tdc(path: &SamplePath, j: usize, jp: usize, r: usize, t: f64) -> Result<f64> {
    if !(t > 0.0 && t < 1.0) {
        return Err(Error::domain(format!("t must lie in (0,1), got {t}")));
    }
    let m = path.n.saturating_sub(r);
    if t * (m as f64) < 10.0 {
        return Err(Error::domain(format!("t (n - r) = {} < 10: too few tail points", t * m as f64)));
    }
    let (ra, rb) = lagged_ranks(path, j, jp, r)?;
    let cut = (1.0 - t) * m as f64;
    let (mut cond, mut joint) = (0usize, 0usize);
    for (a, b) in ra.iter().zip(&rb) {
        if *a as f64 > cut {
            cond += 1;
            if *b as f64 > cut {
                joint += 1;
            }
        }
    }
    if cond == 0 {
        return Err(Error::undefined("empty conditioning set"));
    }
    Ok(joint as f64 / cond as f64)
}

/// Default `k` for [`empirical_eta`], `ceil(2 sqrt(n))`.
pub fn default_eta_k(n: usize) -> usize {
    (2.0 * (n as f64).sqrt()).ceil() as usize
}

/// Hill estimate of `eta` from the `k` largest values of
/// `T_i = min(1 / (1 - U_ij), 1 / (1 - U_{i+r,j'}))`, `U = rank / (m + 1)`.
pub fn empirical_eta(path: &SamplePath, j: usize, jp: usize, r: usize, k: usize) -> Result<f64> {
    let m = path.n.saturating_sub(r);
    if k == 0 || k >= m {
        return Err(Error::domain(format!("k must lie in [1, n - r), got k={k}, n - r={m}")));
    }
    let (ra, rb) = lagged_ranks(path, j, jp, r)?;
    let scale = (m + 1) as f64;
    let mut ts: Vec<f64> = ra
        .iter()
        .zip(&rb)
        .map(|(&a, &b)| {
            let ta = scale / (scale - a as f64);
            let tb = scale / (scale - b as f64);
            ta.min(tb)
        })
        .collect();
    ts.sort_by(|a, b| b.total_cmp(a));
    let base = ts[k];
    let hill = ts[..k].iter().map(|t| (t / base).ln()).sum::<f64>() / k as f64;
    if !(hill > 0.0 && hill.is_finite()) {
        return Err(Error::undefined("degenerate structure variable sample"));
    }
    Ok(hill.min(1.0))
}

/// Regime from `eta` with a band of [`REGIME_BAND`] around 1/2 and 1. A
/// known `lambda = 0` keeps an `eta` near 1 out of the dependent class.
pub fn classify_tail_regime(lambda: Option<f64>, eta: f64) -> Result<TailRegime> {
    if !(eta > 0.0 && eta <= 1.0) {
        return Err(Error::domain(format!("eta must lie in (0,1], got {eta}")));
    }
    Ok(if eta >= 1.0 - REGIME_BAND && lambda.is_none_or(|l| l > 0.0) {
        TailRegime::Dependent
    } else if (eta - 0.5).abs() <= REGIME_BAND {
        TailRegime::NearIndependent
    } else if eta > 0.5 {
        TailRegime::PositivelyAssociated
    } else {
        TailRegime::NegativelyAssociated
    })
}
