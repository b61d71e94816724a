//! Replicated estimation on simulated paths.
//!
//! Replicate `i` draws its path from `replicate_stream(seed, i)`, so results
//! do not depend on how replicates are scheduled across threads.

use rayon::prelude::*;
use serde::Serialize;

use crate::armax::{simulate_with_rng, SamplePath};
use crate::error::{Error, Result};
use crate::estimation::{
    asymptotic_variance, asymptotic_variance_exact, estimate_c_davis_resnick, estimate_c_lebedev, estimate_c_moment,
    interval_variance, VarianceConvention, DEFAULT_SIGMA_TOL,
};
use crate::rng::replicate_stream;
use crate::stats::{anderson_darling_normal, mean, variance};
use crate::ProcessConfig;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReplicateRow {
    pub replicate: usize,
    pub margin: usize,
    pub n: usize,
    pub c_true: f64,
    pub c_moment: f64,
    pub c_lebedev: f64,
    /// NaN when the path has nonpositive values.
    pub c_dr: f64,
    pub u_bar: f64,
}

fn estimate_rows(replicate: usize, config: &ProcessConfig, path: &SamplePath) -> Result<Vec<ReplicateRow>> {
    (0..path.d)
        .map(|j| {
            let x = path.column(j);
            let mom = estimate_c_moment(&x)?;
            let leb = estimate_c_lebedev(&x)?;
            Ok(ReplicateRow {
                replicate,
                margin: j,
                n: path.n,
                c_true: config.c[j],
                c_moment: mom.c_hat,
                c_lebedev: leb.c_hat,
                c_dr: estimate_c_davis_resnick(&x).unwrap_or(f64::NAN),
                u_bar: mom.u_bar,
            })
        })
        .collect()
}

/// Rows ordered by replicate, then margin.
pub fn run_replicates(config: &ProcessConfig, n: usize, replicates: usize, seed: u64) -> Result<Vec<ReplicateRow>> {
    config.validate()?;
    if n < 2 {
        return Err(Error::config("n must be at least 2"));
    }
    if replicates == 0 {
        return Err(Error::config("replicates must be positive"));
    }
    let per_rep: Vec<Vec<ReplicateRow>> = (0..replicates)
        .into_par_iter()
        .map(|i| {
            let mut rng = replicate_stream(seed, i as u64);
            let data = simulate_with_rng(config, n, &mut rng)?;
            let path = SamplePath { data, n, d: config.d(), seed, config_digest: String::new() };
            estimate_rows(i, config, &path)
        })
        .collect::<Result<_>>()?;
    Ok(per_rep.into_iter().flatten().collect())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EstimatorSummary {
    pub mean: f64,
    pub bias: f64,
    pub rmse: f64,
    /// Replicates with a finite estimate.
    pub count: usize,
}

impl EstimatorSummary {
    fn new(values: &[f64], truth: f64) -> Self {
        let v: Vec<f64> = values.iter().copied().filter(|x| x.is_finite()).collect();
        if v.is_empty() {
            return EstimatorSummary { mean: f64::NAN, bias: f64::NAN, rmse: f64::NAN, count: 0 };
        }
        let m = mean(&v);
        let mse = v.iter().map(|x| (x - truth).powi(2)).sum::<f64>() / v.len() as f64;
        EstimatorSummary { mean: m, bias: m - truth, rmse: mse.sqrt(), count: v.len() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MarginSummary {
    pub margin: usize,
    pub n: usize,
    pub replicates: usize,
    pub c_true: f64,
    pub moment: EstimatorSummary,
    pub lebedev: EstimatorSummary,
    pub davis_resnick: EstimatorSummary,
    /// Smallest `c_dr - c_true` over replicates.
    pub dr_min_excess: f64,
    /// Empirical variance of `sqrt(n) (c_moment - c)`.
    pub var_sqrt_n_c: f64,
    /// Empirical variance of `sqrt(n) (u_bar - 1/(2 - c))`.
    pub var_sqrt_n_u: f64,
    pub sigma2: f64,
    pub sigma2_exact: f64,
    pub v_delta_pow4: f64,
    pub v_paper_3m2c: f64,
    pub v_delta_pow4_exact: f64,
    pub v_paper_3m2c_exact: f64,
    /// Convention whose `V` (from `sigma2`) is closer to `var_sqrt_n_c` on the log scale.
    pub matching_convention: VarianceConvention,
    pub ad_statistic: f64,
    pub ad_p_value: f64,
}

fn closer(target: f64, a: f64, b: f64) -> bool {
    let d = |v: f64| if v > 0.0 { (v / target).ln().abs() } else { f64::INFINITY };
    d(a) <= d(b)
}

pub fn summarize(rows: &[ReplicateRow]) -> Vec<MarginSummary> {
    let d = rows.iter().map(|r| r.margin + 1).max().unwrap_or(0);
    (0..d)
        .map(|j| {
            let rs: Vec<&ReplicateRow> = rows.iter().filter(|r| r.margin == j).collect();
            let (c, n) = (rs[0].c_true, rs[0].n);
            let sn = (n as f64).sqrt();
            let col = |f: fn(&ReplicateRow) -> f64| rs.iter().map(|r| f(r)).collect::<Vec<f64>>();
            let (cm, cl, cd, ub) = (col(|r| r.c_moment), col(|r| r.c_lebedev), col(|r| r.c_dr), col(|r| r.u_bar));

            let zc: Vec<f64> = cm.iter().filter(|x| x.is_finite()).map(|x| sn * (x - c)).collect();
            let zu: Vec<f64> = ub.iter().map(|u| sn * (u - 1.0 / (2.0 - c))).collect();
            let var_c = if zc.len() > 1 { variance(&zc) } else { f64::NAN };
            let var_u = if zu.len() > 1 { variance(&zu) } else { f64::NAN };

            let sigma2 = asymptotic_variance(c, DEFAULT_SIGMA_TOL);
            let sigma2_exact = asymptotic_variance_exact(c, DEFAULT_SIGMA_TOL);
            let v_d = interval_variance(sigma2, c, VarianceConvention::DeltaPow4);
            let v_p = interval_variance(sigma2, c, VarianceConvention::Paper3m2c);
            let matching = if closer(var_c, v_d, v_p) { VarianceConvention::DeltaPow4 } else { VarianceConvention::Paper3m2c };
            let (ad_statistic, ad_p_value) = if zc.len() >= 8 { anderson_darling_normal(&zc) } else { (f64::NAN, f64::NAN) };

            MarginSummary {
                margin: j,
                n,
                replicates: rs.len(),
                c_true: c,
                moment: EstimatorSummary::new(&cm, c),
                lebedev: EstimatorSummary::new(&cl, c),
                davis_resnick: EstimatorSummary::new(&cd, c),
                dr_min_excess: cd.iter().map(|x| x - c).fold(f64::INFINITY, f64::min),
                var_sqrt_n_c: var_c,
                var_sqrt_n_u: var_u,
                sigma2,
                sigma2_exact,
                v_delta_pow4: v_d,
                v_paper_3m2c: v_p,
                v_delta_pow4_exact: interval_variance(sigma2_exact, c, VarianceConvention::DeltaPow4),
                v_paper_3m2c_exact: interval_variance(sigma2_exact, c, VarianceConvention::Paper3m2c),
                matching_convention: matching,
                ad_statistic,
                ad_p_value,
            }
        })
        .collect()
}
