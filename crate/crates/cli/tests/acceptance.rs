//! Acceptance checks. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::path::Path;
use std::process::Command;

use armax_core::armax::{simulate_path, stationary_joint_cdf, DEFAULT_TRUNC_TOL};
use armax_core::copulas::{
    extremal_coefficient, extremal_coefficient_derived, rectangle_mass_min, CopulaSpec, DerivedCopula,
    ExtremeValueCopula,
};
use armax_core::estimation::{asymptotic_variance, cross_moment, DEFAULT_SIGMA_TOL};
use armax_core::extremal::{
    default_k, empirical_extremal_index_runs, empirical_mv_extremal_index, theoretical_mv_extremal_index,
};
use armax_core::montecarlo::{run_replicates, summarize};
use armax_core::rng;
use armax_core::stats::{empirical_quantile, ks_distance};
use armax_core::taildep::{default_eta_k, empirical_eta, empirical_tdc, theoretical_lag_tdc, DEFAULT_T_GRID};
use armax_core::{AttractionDomain, InitPolicy, MarginSpec, ProcessConfig};
use rand::Rng;

type Outcome = (bool, String);

fn frechet_1d(c: f64) -> ProcessConfig {
    ProcessConfig::new(vec![c], vec![MarginSpec::unit_frechet()], CopulaSpec::Independence).unwrap()
}

fn c1_stationary_margin() -> Outcome {
    let p = simulate_path(&frechet_1d(0.5), 100_000, 101).unwrap();
    let ks = ks_distance(&p.data, |x| if x > 0.0 { (-2.0 / x).exp() } else { 0.0 });
    (ks < 0.01, format!("KS = {ks:.5} (< 0.01)"))
}

fn c2_runs_estimator() -> Outcome {
    let mut out = Vec::new();
    let mut ok = true;
    for (c, target, seed) in [(0.8, 0.2, 201), (0.1, 0.9, 202)] {
        let p = simulate_path(&frechet_1d(c), 100_000, seed).unwrap();
        let u = empirical_quantile(&p.data, 0.995);
        let th = empirical_extremal_index_runs(&p.data, u, 5).unwrap();
        ok &= (th - target).abs() <= 0.05;
        out.push(format!("c={c}: {th:.4} (target {target} +/- 0.05)"));
    }
    (ok, out.join(", "))
}

fn c3_example_two() -> Outcome {
    let doms = [AttractionDomain::Frechet { alpha: 1.0 }; 2];
    let c = [0.8, 0.1];
    let th = theoretical_mv_extremal_index(&CopulaSpec::Comonotone, &doms, &c, &[1.0, 1.0]).unwrap().theta;
    // 1 - 0.8 is not representable; allow a few ulp
    let th_ok = (th - 0.2).abs() <= 4.0 * f64::EPSILON;
    let cfg = ProcessConfig::new(c.to_vec(), vec![MarginSpec::unit_frechet(); 2], CopulaSpec::Comonotone).unwrap();
    let p = simulate_path(&cfg, 100_000, 301).unwrap();
    let k = default_k(p.n);
    let emp = empirical_mv_extremal_index(&p, &doms, &c, k, &[1.0, 1.0]).unwrap();
    let emp_ok = (emp - 0.2).abs() <= 0.05;
    (th_ok && emp_ok, format!("theoretical {th:.17}, empirical {emp:.4} at k={k} (target 0.2 +/- 0.05)"))
}

fn c4_example_one() -> Outcome {
    let mut r = rng::stream(401);
    let doms = [
        AttractionDomain::Gumbel,
        AttractionDomain::Gumbel,
        AttractionDomain::Frechet { alpha: 1.0 },
        AttractionDomain::Frechet { alpha: 1.0 },
    ];
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let tau: Vec<f64> = (0..4).map(|_| r.gen_range(0.01..10.0)).collect();
        let c: Vec<f64> = (0..4).map(|_| r.gen_range(0.01..0.99)).collect();
        let g: f64 = r.gen_range(1.0..10.0);
        let th = theoretical_mv_extremal_index(&CopulaSpec::Gumbel { gamma: g }, &doms, &c, &tau).unwrap().theta;
        let num = ((tau[2] * c[2]).powf(g) + (tau[3] * c[3]).powf(g)).powf(1.0 / g);
        let den = tau.iter().map(|t| t.powf(g)).sum::<f64>().powf(1.0 / g);
        worst = worst.max((th - (1.0 - num / den)).abs());
    }
    (worst <= 1e-10, format!("max |diff| = {worst:.2e} over 1000 draws (<= 1e-10)"))
}

fn c5_ratio_rule() -> Outcome {
    let grid: Vec<f64> = (1..10).map(|i| i as f64 / 10.0).collect();
    let mut r = rng::stream(501);
    let (mut ident, mut maxstab) = (0.0f64, 0.0f64);
    let mut not_2inc = Vec::new();
    let mut draws = 0;
    for g in [1.0, 1.5, 2.0, 5.0] {
        let base = CopulaSpec::Gumbel { gamma: g };
        for &t in &[0.3, 0.5, 1.0] {
            let dc = DerivedCopula::new(base, vec![t, t]).unwrap();
            for &a in &grid {
                for &b in &grid {
                    ident = ident.max((dc.cdf(&[a, b]).unwrap() - base.cdf(&[a, b]).unwrap()).abs());
                }
            }
        }
        for _ in 0..25 {
            let theta: Vec<f64> = (0..2).map(|_| 1.0 - r.gen::<f64>()).collect();
            let dc = DerivedCopula::new(base, theta.clone()).unwrap();
            for &a in &grid {
                for &b in &grid {
                    let v = dc.cdf(&[a, b]).unwrap();
                    for s in [0.5, 2.0, 3.0] {
                        let vs = dc.cdf(&[a.powf(s), b.powf(s)]).unwrap();
                        maxstab = maxstab.max((vs - v.powf(s)).abs());
                    }
                }
            }
            let m = rectangle_mass_min(&dc, 40).unwrap();
            draws += 1;
            if m < -1e-12 {
                not_2inc.push(format!("gamma={g} theta=({:.3},{:.3}) mass {m:.2e}", theta[0], theta[1]));
            }
        }
    }
    let ok = ident <= 1e-12 && maxstab <= 1e-12 && not_2inc.is_empty();
    let first = not_2inc.first().cloned().unwrap_or_default();
    (
        ok,
        format!(
            "identities {ident:.1e}, max-stability {maxstab:.1e}, 2-increasing failures {}/{draws}{}",
            not_2inc.len(),
            if first.is_empty() { String::new() } else { format!(" (e.g. {first})") }
        ),
    )
}

fn c6_extremal_coefficients() -> Outcome {
    let a = extremal_coefficient(2.0, 2).unwrap();
    let b = extremal_coefficient_derived(2.0, &[0.5, 0.5]).unwrap();
    let s = 2f64.sqrt();
    let ok = (a - s).abs() <= 1e-12 && (b - s).abs() <= 1e-12;
    (ok, format!("eps_C = {a:.15}, eps_C* = {b:.15}"))
}

fn c7_lag_tdc() -> Outcome {
    let cfg = frechet_1d(0.5).with_init(InitPolicy::ExactMarginal);
    let p = simulate_path(&cfg, 1_000_000, 701).unwrap();
    let emp = empirical_tdc(&p, 0, 0, 2, 0.02).unwrap();
    let th = theoretical_lag_tdc(&frechet_1d(0.5), 0, 0, 2, &DEFAULT_T_GRID).unwrap().value;
    let mut inside = (0.0..=0.25).contains(&th);
    // cross-component cases with a unit Frechet lagged margin
    let mut r = rng::stream(702);
    for _ in 0..50 {
        let g: f64 = r.gen_range(1.0..6.0);
        let c0: f64 = r.gen_range(0.05..0.95);
        let cfg = ProcessConfig::new(
            vec![c0, 0.5],
            vec![MarginSpec::Exponential { rate: 1.0 }, MarginSpec::unit_frechet()],
            CopulaSpec::Gumbel { gamma: g },
        )
        .unwrap();
        let v = theoretical_lag_tdc(&cfg, 0, 1, 2, &DEFAULT_T_GRID).unwrap().value;
        inside &= (0.0..=0.25).contains(&v);
    }
    let ok = (emp - 0.25).abs() <= 0.05 && inside;
    (ok, format!("empirical {emp:.4} (0.25 +/- 0.05), theoretical {th:.6}, all theoretical in [0, 0.25]: {inside}"))
}

fn c8_tail_independence() -> Outcome {
    let cfg = ProcessConfig::new(vec![0.5], vec![MarginSpec::Uniform01], CopulaSpec::Independence).unwrap();
    let p = simulate_path(&cfg, 100_000, 801).unwrap();
    let lam = empirical_tdc(&p, 0, 0, 1, 0.02).unwrap();
    let eta_u = empirical_eta(&p, 0, 0, 1, default_eta_k(p.n)).unwrap();
    let cfg = ProcessConfig::new(vec![0.8], vec![MarginSpec::Exponential { rate: 1.0 }], CopulaSpec::Independence).unwrap();
    let p = simulate_path(&cfg, 100_000, 802).unwrap();
    let eta_e = empirical_eta(&p, 0, 0, 1, default_eta_k(p.n)).unwrap();
    let ok = lam < 0.05 && (eta_u - 0.5).abs() <= 0.1 && (0.4..=0.9).contains(&eta_e);
    (ok, format!("uniform: lambda {lam:.4} (< 0.05), eta {eta_u:.4} (0.5 +/- 0.1); exponential: eta {eta_e:.4} (in [0.4, 0.9])"))
}

fn c9_estimators() -> Outcome {
    let cfg = frechet_1d(0.5).with_init(InitPolicy::ExactMarginal);
    let rows = run_replicates(&cfg, 10_000, 1000, 901).unwrap();
    let s = &summarize(&rows)[0];
    let dr_all = rows.iter().all(|r| r.c_dr >= 0.5);
    let mut dr_means = Vec::new();
    for n in [100, 1_000, 10_000] {
        let rs = run_replicates(&cfg, n, 200, 902).unwrap();
        dr_means.push(rs.iter().map(|r| r.c_dr).sum::<f64>() / rs.len() as f64);
    }
    let down = dr_means.windows(2).all(|w| w[1] <= w[0]);
    let ok = (s.moment.mean - 0.5).abs() <= 0.01 && (s.lebedev.mean - 0.5).abs() <= 0.03 && dr_all && down;
    (
        ok,
        format!(
            "moment {:.5} (+/- 0.01), lebedev {:.5} (+/- 0.03), DR >= 0.5 on all: {dr_all}, DR mean n=1e2,1e3,1e4: {:.5}, {:.5}, {:.5}",
            s.moment.mean, s.lebedev.mean, dr_means[0], dr_means[1], dr_means[2]
        ),
    )
}

fn run_cli(args: &[&str]) -> i32 {
    let status = Command::new(env!("CARGO_BIN_EXE_armax")).args(args).status().expect("binary runs");
    status.code().unwrap_or(-1)
}

fn c10_variance() -> Outcome {
    let s2 = asymptotic_variance(0.5, DEFAULT_SIGMA_TOL);
    let s2_ok = (s2 - 1.0 / 18.0).abs() <= 1e-12;

    let dir = tempfile::tempdir().unwrap();
    let cfg = r#"{"process": {"c": [0.5], "margins": [{"kind": "frechet", "alpha": 1.0}],
        "copula": {"kind": "independence"}, "init": {"kind": "exact_marginal"}},
        "n": 10000, "seed": 1001, "replicates": 1000}"#;
    let cfg_path = dir.path().join("mc.json");
    std::fs::write(&cfg_path, cfg).unwrap();
    let out = dir.path().join("mc.csv");
    let code = run_cli(&["montecarlo", "--config", cfg_path.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("mc_summary.json")).unwrap()).unwrap();
    let m = &summary["margins"][0];
    let var_u = m["var_sqrt_n_u"].as_f64().unwrap();
    let var_c = m["var_sqrt_n_c"].as_f64().unwrap();
    let conv = m["matching_convention"].as_str().unwrap_or("").to_string();
    let var_ok = (var_u / (1.0 / 18.0) - 1.0).abs() <= 0.2;
    let conv_ok = code == 0 && (conv == "delta_pow4" || conv == "paper_3m2c");
    (
        s2_ok && var_ok && conv_ok,
        format!(
            "sigma2(0.5) = {s2:.15}; var sqrt(n)(U-2/3) = {var_u:.4} vs 1/18 = {:.4} (+/- 20%); var sqrt(n)(c-c) = {var_c:.4}, matching convention: {conv}",
            1.0 / 18.0
        ),
    )
}

fn c11_cross_moment() -> Outcome {
    let worst = (1..=10).map(|r| (cross_moment(0.5, r) - 4.0 / 9.0).abs()).fold(0.0, f64::max);
    (worst <= 1e-12, format!("max |cross_moment(0.5, r) - 4/9| = {worst:.1e} for r = 1..10"))
}

fn c12_fixed_point() -> Outcome {
    let mut r = rng::stream(1201);
    let margins = [MarginSpec::unit_frechet(), MarginSpec::Exponential { rate: 1.5 }, MarginSpec::Frechet { alpha: 2.0 }];
    let mut worst = 0.0f64;
    for d in 1..=3 {
        for _ in 0..100 {
            let c: Vec<f64> = (0..d).map(|_| r.gen_range(0.05..0.95)).collect();
            let g: f64 = r.gen_range(1.0..4.0);
            let cfg = ProcessConfig::new(c.clone(), margins[..d].to_vec(), CopulaSpec::Gumbel { gamma: g }).unwrap();
            let x: Vec<f64> = (0..d).map(|_| r.gen_range(0.2..20.0)).collect();
            let xc: Vec<f64> = x.iter().zip(&c).map(|(x, c)| x / c).collect();
            let f = stationary_joint_cdf(&cfg, &x, DEFAULT_TRUNC_TOL).unwrap();
            let fc = stationary_joint_cdf(&cfg, &xc, DEFAULT_TRUNC_TOL).unwrap();
            let u: Vec<f64> = margins[..d].iter().zip(&x).map(|(m, &x)| m.cdf(x)).collect();
            let gx = CopulaSpec::Gumbel { gamma: g }.cdf(&u).unwrap();
            worst = worst.max((f - fc * gx).abs());
        }
    }
    (worst <= 1e-10, format!("max |F(x) - F(x/c) G(x)| = {worst:.2e} over 300 probes (<= 1e-10)"))
}

fn run_twice(args: &[&str], files: &[&str], dir: &Path) -> Result<(), String> {
    let mut snapshots = Vec::new();
    for round in 0..2 {
        let code = run_cli(args);
        if code != 0 {
            return Err(format!("{} exited {code} on round {round}", args[0]));
        }
        let snap: Vec<Vec<u8>> = files.iter().map(|f| std::fs::read(dir.join(f)).unwrap_or_default()).collect();
        for f in files {
            let _ = std::fs::remove_file(dir.join(f));
        }
        snapshots.push(snap);
    }
    if snapshots[0] != snapshots[1] || snapshots[0].iter().any(|s| s.is_empty()) {
        return Err(format!("{} outputs differ or are missing", args[0]));
    }
    Ok(())
}

fn c13_determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let cfg = r#"{"process": {"c": [0.6, 0.3],
        "margins": [{"kind": "frechet", "alpha": 1.0}, {"kind": "exponential", "rate": 1.0}],
        "copula": {"kind": "gumbel", "gamma": 2.0}},
        "n": 5000, "replicates": 20, "lags": [0, 1],
        "copula_table": {"base": {"kind": "gumbel", "gamma": 2.0}, "theta": [0.5, 0.8], "points": [[0.3, 0.6]]}}"#;
    let cfg_path = d.join("cfg.json");
    std::fs::write(&cfg_path, cfg).unwrap();
    let cp = cfg_path.to_str().unwrap().to_string();
    let path_of = |name: &str| d.join(name).to_str().unwrap().to_string();

    let sim_out = path_of("sim.csv");
    let cases: Vec<(Vec<String>, Vec<&str>)> = vec![
        (vec!["simulate".into(), "--out".into(), sim_out.clone()], vec!["sim.csv", "sim.json"]),
        (vec!["estimate".into(), "--out".into(), path_of("est.csv")], vec!["est.csv"]),
        (vec!["extremal-index".into(), "--out".into(), path_of("ei.csv")], vec!["ei.csv", "ei_runs.csv"]),
        (vec!["tail-dep".into(), "--out".into(), path_of("td.csv")], vec!["td.csv"]),
        (vec!["copula".into(), "--out".into(), path_of("cop.csv")], vec!["cop.csv", "cop_eval.csv"]),
        (vec!["montecarlo".into(), "--out".into(), path_of("mc.csv")], vec!["mc.csv", "mc_summary.json"]),
    ];
    let mut errors = Vec::new();
    for (mut args, files) in cases {
        args.extend(["--config".into(), cp.clone(), "--seed".into(), "1301".into()]);
        let refs: Vec<&str> = args.iter().map(String::as_str).collect();
        if let Err(e) = run_twice(&refs, &files, d) {
            errors.push(e);
        }
    }
    (errors.is_empty(), if errors.is_empty() { "all 6 commands byte-identical".into() } else { errors.join("; ") })
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 13] = [
        ("stationary margin KS", c1_stationary_margin),
        ("marginal extremal index, runs estimator", c2_runs_estimator),
        ("multivariate extremal index, comonotone example", c3_example_two),
        ("multivariate extremal index, Gumbel closed form", c4_example_one),
        ("ratio-rule copula", c5_ratio_rule),
        ("extremal coefficients", c6_extremal_coefficients),
        ("lag-r tail dependence", c7_lag_tdc),
        ("tail independence cases", c8_tail_independence),
        ("estimator relations", c9_estimators),
        ("variance formula and convention report", c10_variance),
        ("cross moment identity", c11_cross_moment),
        ("stationary fixed point", c12_fixed_point),
        ("determinism", c13_determinism),
    ];
    let mut failed = Vec::new();
    for (i, (name, f)) in criteria.iter().enumerate() {
        let (ok, detail) = f();
        println!("{} [{:>2}] {name}: {detail}", if ok { "PASS" } else { "FAIL" }, i + 1);
        if !ok {
            failed.push(i + 1);
        }
    }
    println!("acceptance: {}/{} passed", criteria.len() - failed.len(), criteria.len());
    if !failed.is_empty() {
        println!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
