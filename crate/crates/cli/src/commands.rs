use std::fs::File;
use std::io::BufReader;

use armax_core::armax::simulate_path;
use armax_core::copulas::{rectangle_mass_min, DerivedCopula, ExtremeValueCopula};
use armax_core::estimation::{estimate_c_moment, estimate_report};
use armax_core::extremal::{
    default_k, empirical_extremal_index_runs, marginal_extremal_index, theoretical_mv_extremal_index, RankedSample,
};
use armax_core::io::{read_path_csv, write_path_csv, PathMetadata};
use armax_core::montecarlo::{run_replicates, summarize, MarginSummary};
use armax_core::stats::empirical_quantile;
use armax_core::taildep::{
    classify_tail_regime, default_eta_k, empirical_eta, empirical_tdc, theoretical_lag_tdc, DEFAULT_T_GRID,
    REGIME_BAND,
};
use armax_core::{ProcessConfig, SamplePath};
use serde::Serialize;

use crate::config::*;
use crate::output::{flag_cell, fmt_float, fmt_opt, header, sidecar, sink, write_table, write_text};
use crate::CliError;

pub fn dispatch(kind: CommandKind, cfg: &RunConfig) -> Result<(), CliError> {
    match kind {
        CommandKind::Simulate => simulate(cfg),
        CommandKind::Estimate => estimate(cfg),
        CommandKind::ExtremalIndex => extremal_index(cfg),
        CommandKind::TailDep => tail_dep(cfg),
        CommandKind::Copula => copula(cfg),
        CommandKind::Montecarlo => montecarlo(cfg),
    }
}

fn warn(msg: &str) {
    eprintln!("warning: {msg}");
}

// validate() guarantees these for commands that simulate
fn seed(cfg: &RunConfig) -> u64 {
    cfg.seed.expect("validated seed")
}

fn n(cfg: &RunConfig) -> usize {
    cfg.n.expect("validated n")
}

/// The input file if configured, otherwise a fresh simulation.
fn load_path(cfg: &RunConfig) -> Result<SamplePath, CliError> {
    match &cfg.input_path {
        Some(p) => {
            let f = File::open(p).map_err(|e| CliError::Config(format!("cannot open {}: {e}", p.display())))?;
            let path = read_path_csv(BufReader::new(f))?;
            if let Some(proc_) = &cfg.process {
                if proc_.d() != path.d {
                    return Err(CliError::Config(format!(
                        "input has {} columns, process has dimension {}",
                        path.d,
                        proc_.d()
                    )));
                }
            }
            Ok(path)
        }
        None => Ok(simulate_path(cfg.process()?, n(cfg), seed(cfg))?),
    }
}

fn runs_estimates(path: &SamplePath, q: f64, gap: usize) -> Vec<(f64, Option<f64>)> {
    (0..path.d)
        .map(|j| {
            let col = path.column(j);
            let u = empirical_quantile(&col, q);
            (u, empirical_extremal_index_runs(&col, u, gap).ok())
        })
        .collect()
}

#[derive(Serialize)]
struct SimulateMetadata {
    #[serde(flatten)]
    path: PathMetadata,
    runs_quantile: f64,
    run_gap: usize,
    /// Runs estimate per column; `null` when no exceedances.
    runs_extremal_index: Vec<Option<f64>>,
    marginal_extremal_index: Vec<f64>,
}

fn simulate(cfg: &RunConfig) -> Result<(), CliError> {
    let process = cfg.process()?;
    let path = simulate_path(process, n(cfg), seed(cfg))?;
    let out = cfg.output_path.as_deref();
    write_path_csv(&path, sink(out)?)?;
    if let Some(out) = out {
        let q = cfg.runs_quantile.unwrap_or(DEFAULT_RUNS_QUANTILE);
        let gap = cfg.run_gap.unwrap_or(DEFAULT_RUN_GAP);
        let meta = SimulateMetadata {
            path: PathMetadata::new(&path, process),
            runs_quantile: q,
            run_gap: gap,
            runs_extremal_index: runs_estimates(&path, q, gap).into_iter().map(|r| r.1).collect(),
            marginal_extremal_index: process
                .margins
                .iter()
                .zip(&process.c)
                .map(|(m, &c)| marginal_extremal_index(c, m.attraction_domain()))
                .collect(),
        };
        write_text(&sidecar(out, ".json"), &(serde_json::to_string_pretty(&meta).expect("serializable") + "\n"))?;
    }
    Ok(())
}

fn estimate(cfg: &RunConfig) -> Result<(), CliError> {
    let path = load_path(cfg)?;
    let conv = cfg.variance_convention.unwrap_or_default();
    let level = cfg.level.unwrap_or(DEFAULT_LEVEL);
    let mut rows = Vec::new();
    for j in 0..path.d {
        let rep = estimate_report(j, &path.column(j), conv, level, cfg.hill_k)?;
        let warnings = rep.warnings();
        for w in &warnings {
            warn(&format!("x{}: {w}", j + 1));
        }
        let (lo, hi) = rep.ci.map_or((None, None), |(a, b)| (Some(a), Some(b)));
        rows.push(vec![
            (j + 1).to_string(),
            rep.n.to_string(),
            fmt_float(rep.u_bar),
            fmt_float(rep.c_moment),
            rep.moment_flag.as_str().to_string(),
            fmt_float(rep.p_tilde),
            fmt_float(rep.c_lebedev),
            rep.lebedev_flag.as_str().to_string(),
            fmt_opt(rep.c_davis_resnick),
            fmt_opt(rep.sigma2),
            fmt_opt(lo),
            fmt_opt(hi),
            fmt_float(rep.level),
            rep.variance_convention.as_str().to_string(),
            fmt_opt(rep.alpha_hill),
            flag_cell(&warnings),
        ]);
    }
    let h = header(&[
        "margin",
        "n",
        "u_bar",
        "c_moment",
        "moment_flag",
        "p_tilde",
        "c_lebedev",
        "lebedev_flag",
        "c_davis_resnick",
        "sigma2",
        "ci_low",
        "ci_high",
        "level",
        "variance_convention",
        "alpha_hill",
        "flag",
    ]);
    write_table(cfg.output_path.as_deref(), &h, &rows)
}

/// `c_est` from the config, else the moment estimate for unit Frechet
/// columns with a valid estimate, else the configured `c`.
fn c_estimates(cfg: &RunConfig, process: &ProcessConfig, path: &SamplePath) -> Result<Vec<f64>, CliError> {
    if let Some(c) = &cfg.c_est {
        if c.len() != path.d {
            return Err(CliError::Config("c_est length differs from the dimension".into()));
        }
        return Ok(c.clone());
    }
    Ok((0..path.d)
        .map(|j| {
            if process.margins[j].is_unit_frechet() {
                if let Ok(m) = estimate_c_moment(&path.column(j)) {
                    if m.flag.is_ok() && m.c_hat > 0.0 && m.c_hat < 1.0 {
                        return m.c_hat;
                    }
                }
                warn(&format!("x{}: moment estimate invalid, using configured c", j + 1));
            }
            process.c[j]
        })
        .collect())
}

fn extremal_index(cfg: &RunConfig) -> Result<(), CliError> {
    let process = cfg.process()?;
    let d = process.d();
    let path = load_path(cfg)?;
    let domains: Vec<_> = process.margins.iter().map(|m| m.attraction_domain()).collect();
    let attractor = cfg.attractor.clone().unwrap_or(AttractorSpec::Base(process.copula));
    let taus = cfg.tau_grid.clone().unwrap_or_else(|| vec![vec![1.0; d]]);
    let ks = cfg.k.clone().unwrap_or_else(|| vec![default_k(path.n)]);
    let c_est = c_estimates(cfg, process, &path)?;
    let ranked = RankedSample::new(&path);

    let mut rows = Vec::new();
    for tau in &taus {
        if tau.len() != d {
            return Err(CliError::Config(format!("tau {tau:?} has length {}, expected {d}", tau.len())));
        }
        let th = theoretical_mv_extremal_index(attractor.as_copula(), &domains, &process.c, tau)?;
        for &k in &ks {
            let (emp, flag) = match ranked.mv_extremal_index(&domains, &c_est, k, tau) {
                Ok(v) => (Some(v), vec![]),
                Err(e) => (None, vec![e.to_string()]),
            };
            let mut row: Vec<String> = tau.iter().map(|&t| fmt_float(t)).collect();
            row.extend([fmt_float(th.theta), fmt_opt(emp), k.to_string(), path.n.to_string(), flag_cell(&flag)]);
            rows.push(row);
        }
    }
    let mut h: Vec<String> = (1..=d).map(|j| format!("tau{j}")).collect();
    h.extend(header(&["theta_theoretical", "theta_empirical", "k", "n", "flag"]));
    let out = cfg.output_path.as_deref();
    write_table(out, &h, &rows)?;

    if let Some(out) = out {
        let q = cfg.runs_quantile.unwrap_or(DEFAULT_RUNS_QUANTILE);
        let gap = cfg.run_gap.unwrap_or(DEFAULT_RUN_GAP);
        let rows: Vec<Vec<String>> = runs_estimates(&path, q, gap)
            .into_iter()
            .enumerate()
            .map(|(j, (u, est))| {
                let flag = if est.is_none() { vec!["no exceedances".to_string()] } else { vec![] };
                vec![
                    (j + 1).to_string(),
                    fmt_float(process.c[j]),
                    fmt_float(u),
                    gap.to_string(),
                    fmt_opt(est),
                    fmt_float(marginal_extremal_index(process.c[j], domains[j])),
                    flag_cell(&flag),
                ]
            })
            .collect();
        let h = header(&["j", "c", "threshold", "run_gap", "theta_runs", "theta_marginal", "flag"]);
        write_table(Some(&sidecar(out, "_runs.csv")), &h, &rows)?;
    }
    Ok(())
}

fn check_index(j: usize, d: usize) -> Result<usize, CliError> {
    if j == 0 || j > d {
        return Err(CliError::Config(format!("component index {j} outside 1..={d}")));
    }
    Ok(j - 1)
}

fn tail_dep(cfg: &RunConfig) -> Result<(), CliError> {
    let process = cfg.process()?;
    let d = process.d();
    let path = load_path(cfg)?;
    let pairs = cfg
        .pairs
        .clone()
        .unwrap_or_else(|| (1..=d).flat_map(|j| (1..=d).map(move |jp| [j, jp])).collect());
    let lags = cfg.lags.clone().unwrap_or_else(|| DEFAULT_LAGS.to_vec());
    let t = cfg.t.unwrap_or(DEFAULT_TDC_T);
    let t_grid = cfg.t_grid.clone().unwrap_or_else(|| DEFAULT_T_GRID.to_vec());
    let k = cfg.eta_k.unwrap_or_else(|| default_eta_k(path.n));

    let mut rows = Vec::new();
    for [j1, jp1] in pairs {
        let (j, jp) = (check_index(j1, d)?, check_index(jp1, d)?);
        for &r in &lags {
            let mut flags = Vec::new();
            let th = theoretical_lag_tdc(process, j, jp, r, &t_grid)?;
            let lam = empirical_tdc(&path, j, jp, r, t).map_err(|e| flags.push(format!("lambda: {e}"))).ok();
            let eta = empirical_eta(&path, j, jp, r, k).map_err(|e| flags.push(format!("eta: {e}"))).ok();
            let regime = eta
                .and_then(|e| classify_tail_regime(Some(th.value), e).ok())
                .map_or("nan", |g| g.as_str());
            rows.push(vec![
                j1.to_string(),
                jp1.to_string(),
                r.to_string(),
                fmt_float(th.value),
                fmt_opt(lam),
                fmt_opt(eta),
                regime.to_string(),
                fmt_float(REGIME_BAND),
                flag_cell(&flags),
            ]);
        }
    }
    let h = header(&[
        "j",
        "jp",
        "r",
        "lambda_theoretical",
        "lambda_empirical",
        "eta_empirical",
        "regime",
        "regime_band",
        "flag",
    ]);
    write_table(cfg.output_path.as_deref(), &h, &rows)
}

fn copula(cfg: &RunConfig) -> Result<(), CliError> {
    let table = cfg.copula_table.as_ref().expect("validated copula_table");
    let derived = DerivedCopula::new(table.base, table.theta.clone())?;
    let d = table.theta.len();
    let subsets = table.subsets.clone().unwrap_or_else(|| vec![(1..=d).collect()]);

    let mut rows = Vec::new();
    for s in &subsets {
        if s.is_empty() {
            return Err(CliError::Config("empty subset".into()));
        }
        let mut x = vec![0.0; d];
        for &j in s {
            x[check_index(j, d)?] = 1.0;
        }
        let label = s.iter().map(|j| j.to_string()).collect::<Vec<_>>().join(";");
        rows.push(vec![
            label,
            s.len().to_string(),
            fmt_float(table.base.exponent(&x)),
            fmt_float(derived.exponent(&x)),
        ]);
    }
    let out = cfg.output_path.as_deref();
    write_table(out, &header(&["subset", "size", "epsilon_base", "epsilon_derived"]), &rows)?;

    if d == 2 {
        let m = rectangle_mass_min(&derived, 50)?;
        if m < -1e-12 {
            warn(&format!("derived copula is not 2-increasing: smallest rectangle mass {m:e} on a 50x50 grid"));
        }
    }
    if let (Some(out), Some(points)) = (out, &table.points) {
        let mut rows = Vec::new();
        for u in points {
            let mut flags = Vec::new();
            let b = table.base.cdf(u).map_err(|e| flags.push(format!("base: {e}"))).ok();
            let v = derived.cdf(u).map_err(|e| flags.push(format!("derived: {e}"))).ok();
            let mut row: Vec<String> = u.iter().map(|&x| fmt_float(x)).collect();
            row.extend([fmt_opt(b), fmt_opt(v), flag_cell(&flags)]);
            rows.push(row);
        }
        let mut h: Vec<String> = (1..=d).map(|j| format!("u{j}")).collect();
        h.extend(header(&["c_base", "c_derived", "flag"]));
        write_table(Some(&sidecar(out, "_eval.csv")), &h, &rows)?;
    }
    Ok(())
}

#[derive(Serialize)]
struct MonteCarloSummary<'a> {
    seed: u64,
    n: usize,
    replicates: usize,
    process: &'a ProcessConfig,
    /// One entry per component, `margin` 1-based.
    margins: Vec<MarginSummary>,
}

fn montecarlo(cfg: &RunConfig) -> Result<(), CliError> {
    let process = cfg.process()?;
    let reps = cfg.replicates.unwrap_or(DEFAULT_REPLICATES);
    let rows = run_replicates(process, n(cfg), reps, seed(cfg))?;
    let table: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            let flags: Vec<String> = [("c_moment", r.c_moment), ("c_lebedev", r.c_lebedev), ("c_dr", r.c_dr)]
                .iter()
                .filter(|(_, v)| !v.is_finite())
                .map(|(name, _)| format!("{name} undefined"))
                .collect();
            vec![
                r.replicate.to_string(),
                (r.margin + 1).to_string(),
                r.n.to_string(),
                fmt_float(r.c_true),
                fmt_float(r.c_moment),
                fmt_float(r.c_lebedev),
                fmt_float(r.c_dr),
                fmt_float(r.u_bar),
                flag_cell(&flags),
            ]
        })
        .collect();
    let h = header(&["replicate", "margin", "n", "c_true", "c_moment", "c_lebedev", "c_dr", "u_bar", "flag"]);
    let out = cfg.output_path.as_deref();
    write_table(out, &h, &table)?;

    let mut margins = summarize(&rows);
    for m in &mut margins {
        m.margin += 1;
    }
    let summary = MonteCarloSummary { seed: seed(cfg), n: n(cfg), replicates: reps, process, margins };
    let text = serde_json::to_string_pretty(&summary).expect("serializable") + "\n";
    match out {
        Some(out) => write_text(&sidecar(out, "_summary.json"), &text),
        None => {
            eprint!("{text}");
            Ok(())
        }
    }
}
