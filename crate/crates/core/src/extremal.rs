//! Extremal indices.
//!
//! The theoretical multivariate index of the process depends only on the
//! autoregressive coefficients, the marginal domains of attraction and the
//! attractor copula `C_H` of the stationary law:
//!
//! ```text
//! theta(tau) = 1 - V_H(tau*) / V_H(tau),   tau*_j = tau_j c_j^alpha_j for Frechet j, else 0
//! ```
//!
//! with `V_H` the exponent function of `C_H`. Setting the non-Frechet
//! coordinates to zero in `V_H` is the same as evaluating the sub-copula on the
//! Frechet index set `I`. The empirical version swaps `V_H` for the rank-based
//! stable tail dependence function.

use serde::Serialize;

use crate::armax::SamplePath;
use crate::copulas::ExtremeValueCopula;
use crate::error::{Error, Result};
use crate::margins::AttractionDomain;
use crate::stats::ranks;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExtremalIndexResult {
    pub theta: f64,
    pub tau: Vec<f64>,
    pub index_set: Vec<usize>,
    pub marginal_thetas: Vec<f64>,
}

/// `1 - c^alpha` in the Frechet domain, 1 otherwise.
pub fn marginal_extremal_index(c: f64, domain: AttractionDomain) -> f64 {
    match domain {
        AttractionDomain::Frechet { alpha } => 1.0 - c.powf(alpha),
        _ => 1.0,
    }
}

fn check_tau(tau: &[f64]) -> Result<()> {
    if let Some(t) = tau.iter().find(|t| !(**t >= 0.0 && t.is_finite())) {
        return Err(Error::domain(format!("tau entries must be finite and nonnegative, got {t}")));
    }
    if tau.iter().all(|&t| t == 0.0) {
        return Err(Error::domain("tau is identically zero"));
    }
    Ok(())
}

/// `tau*`: the levels `u/c` expressed on the `tau` scale.
fn shifted_tau(domains: &[AttractionDomain], c: &[f64], tau: &[f64]) -> Vec<f64> {
    domains
        .iter()
        .zip(c)
        .zip(tau)
        .map(|((dom, &c), &t)| dom.frechet_alpha().map_or(0.0, |a| t * c.powf(a)))
        .collect()
}

pub fn theoretical_mv_extremal_index<C: ExtremeValueCopula + ?Sized>(
    attractor: &C,
    domains: &[AttractionDomain],
    c: &[f64],
    tau: &[f64],
) -> Result<ExtremalIndexResult> {
    let d = tau.len();
    if domains.len() != d || c.len() != d {
        return Err(Error::domain("tau, domains and c must have equal length"));
    }
    if attractor.fixed_dim().is_some_and(|k| k != d) {
        return Err(Error::domain("attractor copula dimension differs from tau"));
    }
    check_tau(tau)?;

    let index_set: Vec<usize> = (0..d).filter(|&j| domains[j].frechet_alpha().is_some()).collect();
    let marginal_thetas = domains.iter().zip(c).map(|(&dom, &c)| marginal_extremal_index(c, dom)).collect();
    let theta = if index_set.is_empty() {
        1.0
    } else {
        let star = shifted_tau(domains, c, tau);
        1.0 - attractor.exponent(&star) / attractor.exponent(tau)
    };
    Ok(ExtremalIndexResult { theta, tau: tau.to_vec(), index_set, marginal_thetas })
}

/// Runs estimator: exceedances of `threshold` separated by at least `run_gap`
/// non-exceedances start a new cluster; returns clusters / exceedances.
pub fn empirical_extremal_index_runs(series: &[f64], threshold: f64, run_gap: usize) -> Result<f64> {
    if run_gap == 0 {
        return Err(Error::domain("run_gap must be positive"));
    }
    let mut exceedances = 0usize;
    let mut clusters = 0usize;
    let mut gap = usize::MAX;
    for &x in series {
        if x > threshold {
            if gap >= run_gap {
                clusters += 1;
            }
            exceedances += 1;
            gap = 0;
        } else {
            gap = gap.saturating_add(1);
        }
    }
    if exceedances == 0 {
        return Err(Error::undefined("no exceedances of the threshold"));
    }
    Ok(clusters as f64 / exceedances as f64)
}

/// Default number of upper order statistics, `ceil(sqrt(n))`.
pub fn default_k(n: usize) -> usize {
    (n as f64).sqrt().ceil() as usize
}

/// Column ranks of a path, computed once and reused across `tau` grids.
#[derive(Debug, Clone)]
pub struct RankedSample {
    pub n: usize,
    pub ranks: Vec<Vec<usize>>,
}

impl RankedSample {
    pub fn new(path: &SamplePath) -> Self {
        RankedSample { n: path.n, ranks: path.columns().iter().map(|c| ranks(c)).collect() }
    }

    /// Empirical stable tail dependence function
    /// `(1/k) #{i : rank_j(X_ij) > n - k x_j for some j}`.
    pub fn stdf(&self, k: usize, x: &[f64]) -> f64 {
        let cut: Vec<f64> = x.iter().map(|&v| self.n as f64 - k as f64 * v).collect();
        let hits = (0..self.n)
            .filter(|&i| self.ranks.iter().zip(&cut).any(|(r, &cut)| r[i] as f64 > cut))
            .count();
        hits as f64 / k as f64
    }

    pub fn mv_extremal_index(&self, domains: &[AttractionDomain], c_est: &[f64], k: usize, tau: &[f64]) -> Result<f64> {
        let d = self.ranks.len();
        if domains.len() != d || c_est.len() != d || tau.len() != d {
            return Err(Error::domain("tau, domains and c must match the path dimension"));
        }
        if k == 0 || k >= self.n {
            return Err(Error::domain(format!("k must lie in [1, n), got k={k}, n={}", self.n)));
        }
        check_tau(tau)?;
        let den = self.stdf(k, tau);
        if den == 0.0 {
            return Err(Error::undefined("no joint exceedances at this k and tau"));
        }
        let num = self.stdf(k, &shifted_tau(domains, c_est, tau));
        Ok((1.0 - num / den).clamp(0.0, 1.0))
    }
}

/// Empirical multivariate extremal index at threshold rank `k`.
pub fn empirical_mv_extremal_index(
    path: &SamplePath,
    domains: &[AttractionDomain],
    c_est: &[f64],
    k: usize,
    tau: &[f64],
) -> Result<f64> {
    RankedSample::new(path).mv_extremal_index(domains, c_est, k, tau)
}
