//! The six experiment commands.

use std::fs;
use std::path::Path;

use resvar::estimator::{dicker_estimate, dicker_variance_formula};
use resvar::sim::{
    gaussian_kde, histogram, run_bound_scaling_check, run_moment_identity_check,
    run_repetition_study, run_scenario, run_variance_check, silverman_bandwidth,
    table1_hypothesis, table1_scenario_id, BoundScalingConfig, MomentCheckConfig, ScenarioConfig,
    ScenarioResult, VarianceCheckConfig, TABLE1_SIZES,
};

use crate::config::RunManifest;
use crate::csvio::{fmt_f64, write_csv};
use crate::dataset::read_dataset;
use crate::svg::histogram_svg;
use crate::Failure;

const TABLE1_COLUMN_LABELS: [&str; 5] = [
    "(5/6,7/6)",
    "(4/6,8/6)",
    "(3/6,9/6)",
    "(2/6,10/6)",
    "(1/6,11/6)",
];

fn ensure_out_dir(manifest: &RunManifest) -> Result<(), Failure> {
    fs::create_dir_all(&manifest.out_dir)
        .map_err(|e| Failure::Usage(format!("{}: {e}", manifest.out_dir.display())))
}

fn io_failure(path: &Path) -> impl Fn(std::io::Error) -> Failure + '_ {
    move |e| Failure::Usage(format!("{}: {e}", path.display()))
}

pub fn cmd_table1(
    manifest: &RunManifest,
    rows: Option<Vec<usize>>,
    cols: Option<Vec<usize>>,
) -> Result<(), Failure> {
    ensure_out_dir(manifest)?;
    let replications = manifest.replications.unwrap_or(10_000);

    let selected_rows = match rows {
        None => TABLE1_SIZES.to_vec(),
        Some(rs) => {
            for r in &rs {
                if !TABLE1_SIZES.contains(r) {
                    return Err(Failure::Usage(format!(
                        "--rows {r} is not in the table grid {TABLE1_SIZES:?}"
                    )));
                }
            }
            rs
        }
    };
    let selected_cols: Vec<usize> = match cols {
        None => (1..=5).collect(),
        Some(cs) => {
            for c in &cs {
                if !(1..=5).contains(c) {
                    return Err(Failure::Usage(format!("--cols {c} must be in 1..=5")));
                }
            }
            cs
        }
    };

    let mut csv_rows = Vec::new();
    let mut results: Vec<(usize, usize, ScenarioResult)> = Vec::new();
    for &n in &selected_rows {
        for &col in &selected_cols {
            let col0 = col - 1;
            let hyp = table1_hypothesis(col0);
            let config = ScenarioConfig::new(
                n,
                n,
                hyp,
                manifest.master_seed,
                table1_scenario_id(n, col0),
            )
            .with_replications(replications);
            let design_seed = config.design_seed_spec().stream_seed();
            let res = run_scenario(&config)?;
            eprintln!(
                "table1 n={n} col={col}: error_rate={:.4} se={:.4}",
                res.error_rate, res.std_err
            );
            csv_rows.push(vec![
                n.to_string(),
                n.to_string(),
                fmt_f64(hyp.eta0_2()),
                fmt_f64(hyp.sigma0_2()),
                fmt_f64(hyp.eta1_2()),
                fmt_f64(hyp.sigma1_2()),
                replications.to_string(),
                fmt_f64(res.error_rate),
                fmt_f64(res.std_err),
                design_seed.to_string(),
            ]);
            results.push((n, col, res));
        }
    }

    let path = manifest.out_dir.join("table1.csv");
    write_csv(
        &path,
        manifest.master_seed,
        "table1",
        &[("replications", replications.to_string())],
        &[
            "n",
            "p",
            "eta0_2",
            "sigma0_2",
            "eta1_2",
            "sigma1_2",
            "replications",
            "error_rate",
            "std_err",
            "design_seed",
        ],
        &csv_rows,
    )
    .map_err(io_failure(&path))?;

    print_table(&selected_rows, &selected_cols, &results);
    println!("wrote {}", path.display());
    Ok(())
}

fn print_table(rows: &[usize], cols: &[usize], results: &[(usize, usize, ScenarioResult)]) {
    let mut header = format!("{:>6} ", "n=p");
    for &c in cols {
        header.push_str(&format!("| {:^14} ", TABLE1_COLUMN_LABELS[c - 1]));
    }
    println!("{header}");
    println!("{}", "-".repeat(header.len()));
    for &n in rows {
        let mut line = format!("{n:>6} ");
        for &c in cols {
            let cell = results
                .iter()
                .find(|(rn, rc, _)| *rn == n && *rc == c)
                .map(|(_, _, res)| format!("{:.3}({:.3})", res.error_rate, res.std_err))
                .unwrap_or_default();
            line.push_str(&format!("| {cell:^14} "));
        }
        println!("{line}");
    }
}

pub fn cmd_figure1(manifest: &RunManifest) -> Result<(), Failure> {
    ensure_out_dir(manifest)?;
    let designs = manifest.designs.unwrap_or(1000);
    let replications = manifest.replications.unwrap_or(10_000);
    eprintln!("figure1: {designs} designs x {replications} replications at n=p=100");

    let config = ScenarioConfig::new(
        100,
        100,
        table1_hypothesis(0),
        manifest.master_seed,
        "figure1",
    )
    .with_replications(replications);
    let study = run_repetition_study(&config, designs)?;

    let raw_path = manifest.out_dir.join("figure1_raw.csv");
    let raw_rows: Vec<Vec<String>> = study
        .error_rates
        .iter()
        .enumerate()
        .map(|(d, &rate)| vec![d.to_string(), fmt_f64(rate)])
        .collect();
    write_csv(
        &raw_path,
        manifest.master_seed,
        "figure1",
        &[
            ("designs", designs.to_string()),
            ("replications", replications.to_string()),
        ],
        &["design", "error_rate"],
        &raw_rows,
    )
    .map_err(io_failure(&raw_path))?;

    let hist = histogram(&study.error_rates, 30);
    let bandwidth = silverman_bandwidth(&study.error_rates);
    let hist_path = manifest.out_dir.join("figure1_hist.csv");
    let hist_rows: Vec<Vec<String>> = hist
        .counts
        .iter()
        .enumerate()
        .map(|(k, &count)| {
            let center = 0.5 * (hist.edges[k] + hist.edges[k + 1]);
            vec![
                fmt_f64(hist.edges[k]),
                fmt_f64(hist.edges[k + 1]),
                count.to_string(),
                fmt_f64(gaussian_kde(&study.error_rates, bandwidth, center)),
            ]
        })
        .collect();
    write_csv(
        &hist_path,
        manifest.master_seed,
        "figure1",
        &[
            ("designs", designs.to_string()),
            ("replications", replications.to_string()),
            ("kde_bandwidth", fmt_f64(bandwidth)),
        ],
        &["bin_lo", "bin_hi", "count", "density"],
        &hist_rows,
    )
    .map_err(io_failure(&hist_path))?;

    // Density curve on the counts scale: kde * designs * bin width.
    let x_lo = hist.edges[0];
    let x_hi = *hist.edges.last().expect("edges");
    let bin_width = (x_hi - x_lo) / hist.counts.len() as f64;
    let curve: Vec<(f64, f64)> = (0..=240)
        .map(|k| {
            let x = x_lo + (x_hi - x_lo) * k as f64 / 240.0;
            let y = gaussian_kde(&study.error_rates, bandwidth, x) * designs as f64 * bin_width;
            (x, y)
        })
        .collect();
    let svg_path = manifest.out_dir.join("figure1.svg");
    let svg = histogram_svg(
        &hist,
        &curve,
        "per-design error rate",
        &format!("Error rate of the midpoint rule over {designs} designs (n = p = 100)"),
    );
    fs::write(&svg_path, svg).map_err(io_failure(&svg_path))?;

    let below = study.fraction_below(0.5);
    println!("fraction of designs with error rate < 0.5: {below:.4}");
    println!(
        "wrote {}, {}, {}",
        raw_path.display(),
        hist_path.display(),
        svg_path.display()
    );
    Ok(())
}

pub fn cmd_estimate(
    data: &Path,
    sigma2: Option<f64>,
    beta_norm2: Option<f64>,
) -> Result<(), Failure> {
    let dataset = read_dataset(data)?;
    let est = dicker_estimate(&dataset);
    println!("n: {}", est.n);
    println!("p: {}", est.p);
    println!("y_norm2: {}", fmt_f64(est.y_norm2));
    println!("xty_norm2: {}", fmt_f64(est.xty_norm2));
    println!("dicker_estimate: {}", fmt_f64(est.value));
    match (sigma2, beta_norm2) {
        (Some(s2), Some(b2)) => {
            if !s2.is_finite() || s2 <= 0.0 || b2 < 0.0 {
                return Err(Failure::Usage(
                    "--sigma2 must be positive and --beta-norm2 nonnegative".into(),
                ));
            }
            println!(
                "formula_variance: {}",
                fmt_f64(dicker_variance_formula(est.n, est.p, s2, b2))
            );
        }
        (None, None) => {}
        _ => {
            return Err(Failure::Usage(
                "--sigma2 and --beta-norm2 must be given together".into(),
            ));
        }
    }
    Ok(())
}

pub fn cmd_variance_check(
    manifest: &RunManifest,
    n: Option<usize>,
    p: Option<usize>,
    sigma2: Option<f64>,
    beta_norm2: Option<f64>,
) -> Result<(), Failure> {
    ensure_out_dir(manifest)?;
    let n = n.unwrap_or(400);
    let config = VarianceCheckConfig {
        n,
        p: p.unwrap_or(n),
        sigma2: sigma2.unwrap_or(1.0),
        beta_norm2: beta_norm2.unwrap_or(1.0),
        replications: manifest.replications.unwrap_or(20_000),
        master_seed: manifest.master_seed,
        scenario_id: "variance-check".into(),
    };
    let report = run_variance_check(&config)?;

    let columns = [
        "n",
        "p",
        "sigma2",
        "beta_norm2",
        "replications",
        "mc_mean",
        "mc_variance",
        "formula_variance",
        "variance_ratio",
        "mean_std_err",
        "mean_ok",
        "variance_ok",
        "pass",
    ];
    let row = vec![
        report.n.to_string(),
        report.p.to_string(),
        fmt_f64(report.sigma2),
        fmt_f64(report.beta_norm2),
        report.replications.to_string(),
        fmt_f64(report.mc_mean),
        fmt_f64(report.mc_variance),
        fmt_f64(report.formula_variance),
        fmt_f64(report.variance_ratio),
        fmt_f64(report.mean_std_err),
        report.mean_ok.to_string(),
        report.variance_ok.to_string(),
        report.pass().to_string(),
    ];
    let path = manifest.out_dir.join("variance_check.csv");
    write_csv(
        &path,
        manifest.master_seed,
        "variance-check",
        &[],
        &columns,
        std::slice::from_ref(&row),
    )
    .map_err(io_failure(&path))?;

    println!(
        "variance-check n={} p={}: mc_mean={:.5} mc_var={:.5} formula={:.5} ratio={:.4}",
        report.n, report.p, report.mc_mean, report.mc_variance, report.formula_variance,
        report.variance_ratio
    );
    println!("wrote {}", path.display());
    if report.pass() {
        println!("variance-check: PASS");
        Ok(())
    } else {
        eprintln!("variance-check FAILED: {}", row.join(","));
        Err(Failure::Check("variance-check failed".into()))
    }
}

pub fn cmd_bound_check(
    manifest: &RunManifest,
    c: Option<f64>,
    n_grid: Option<Vec<usize>>,
    xi: Option<f64>,
    sigma2: Option<f64>,
    beta_norm2: Option<f64>,
) -> Result<(), Failure> {
    ensure_out_dir(manifest)?;
    let config = BoundScalingConfig {
        c: c.unwrap_or(1.0),
        n_grid: n_grid.unwrap_or_else(|| vec![100, 400, 1600]),
        sigma2: sigma2.unwrap_or(1.0),
        beta_norm2: beta_norm2.unwrap_or(1.0),
        xi: xi.unwrap_or(0.5),
        replications: manifest.replications.unwrap_or(4_000),
        master_seed: manifest.master_seed,
        scenario_id: "bound-check".into(),
    };
    let report = run_bound_scaling_check(&config)?;

    let columns = [
        "n",
        "p",
        "replications",
        "exceedances",
        "exceed_rate",
        "mean_mu_norm2",
        "g_value",
        "bound_rhs_unit_c",
        "ratio",
        "trend_slope",
        "trend_slope_se",
        "fitted_c",
        "pass",
    ];
    let rows: Vec<Vec<String>> = report
        .rows
        .iter()
        .map(|r| {
            vec![
                r.n.to_string(),
                r.p.to_string(),
                report.replications.to_string(),
                r.exceedances.to_string(),
                fmt_f64(r.exceed_rate),
                fmt_f64(r.mean_mu_norm2),
                fmt_f64(r.g_value),
                fmt_f64(r.bound_rhs_unit_c),
                fmt_f64(r.ratio),
                fmt_f64(report.trend_slope),
                fmt_f64(report.trend_slope_se),
                fmt_f64(report.fitted_c),
                report.pass().to_string(),
            ]
        })
        .collect();
    let path = manifest.out_dir.join("bound_check.csv");
    write_csv(
        &path,
        manifest.master_seed,
        "bound-check",
        &[
            ("xi", fmt_f64(config.xi)),
            ("c", fmt_f64(config.c)),
        ],
        &columns,
        &rows,
    )
    .map_err(io_failure(&path))?;

    for r in &report.rows {
        println!(
            "bound-check n={} p={}: exceed_rate={:.5} bound(C=1)={:.5} ratio={:.5}",
            r.n, r.p, r.exceed_rate, r.bound_rhs_unit_c, r.ratio
        );
    }
    println!(
        "trend slope {:.3e} (se {:.3e}), fitted C = {:.4}",
        report.trend_slope, report.trend_slope_se, report.fitted_c
    );
    println!("wrote {}", path.display());
    if report.pass() {
        println!("bound-check: PASS");
        Ok(())
    } else {
        eprintln!(
            "bound-check FAILED: ratio trend slope {:.3e} exceeds noise",
            report.trend_slope
        );
        Err(Failure::Check("bound-check failed".into()))
    }
}

pub fn cmd_moment_check(
    manifest: &RunManifest,
    p: Option<usize>,
    beta_norm2: Option<f64>,
    beta: Option<Vec<f64>>,
    draws: Option<usize>,
    design_rows: Option<usize>,
) -> Result<(), Failure> {
    ensure_out_dir(manifest)?;
    let beta = match beta {
        Some(b) => b,
        None => {
            // Default: beta_norm2^(1/2) e_1 in dimension p.
            let p = p.unwrap_or(16);
            let b2 = beta_norm2.unwrap_or(1.0);
            if p == 0 || b2 < 0.0 {
                return Err(Failure::Usage(
                    "--p must be positive and --beta-norm2 nonnegative".into(),
                ));
            }
            let mut v = vec![0.0; p];
            v[0] = b2.sqrt();
            v
        }
    };
    let config = MomentCheckConfig {
        beta,
        draws: draws.unwrap_or(1_000_000),
        designs: manifest.designs.unwrap_or(10_000),
        design_rows: design_rows.unwrap_or(50),
        master_seed: manifest.master_seed,
        scenario_id: "moment-check".into(),
    };
    let report = run_moment_identity_check(&config)?;

    let columns = [
        "beta_norm2",
        "draws",
        "designs",
        "design_rows",
        "fourth_moment_mc",
        "fourth_moment_se",
        "fourth_moment_target",
        "fourth_ok",
        "excess_mc",
        "excess_target",
        "excess_ok",
        "signal_var_mc",
        "signal_var_se",
        "signal_var_target",
        "signal_ok",
        "pass",
    ];
    let row = vec![
        fmt_f64(report.beta_norm2),
        report.draws.to_string(),
        report.designs.to_string(),
        report.design_rows.to_string(),
        fmt_f64(report.fourth_moment_mc),
        fmt_f64(report.fourth_moment_se),
        fmt_f64(report.fourth_moment_target),
        report.fourth_ok.to_string(),
        fmt_f64(report.excess_mc),
        fmt_f64(report.excess_target),
        report.excess_ok.to_string(),
        fmt_f64(report.signal_var_mc),
        fmt_f64(report.signal_var_se),
        fmt_f64(report.signal_var_target),
        report.signal_ok.to_string(),
        report.pass().to_string(),
    ];
    let path = manifest.out_dir.join("moment_check.csv");
    write_csv(
        &path,
        manifest.master_seed,
        "moment-check",
        &[],
        &columns,
        std::slice::from_ref(&row),
    )
    .map_err(io_failure(&path))?;

    println!(
        "moment-check: E(x^T b)^4 = {:.5} (target {:.5}, se {:.2e})",
        report.fourth_moment_mc, report.fourth_moment_target, report.fourth_moment_se
    );
    println!(
        "moment-check: var((1/n)||mu||^2) = {:.6} (target {:.6}, se {:.2e})",
        report.signal_var_mc, report.signal_var_target, report.signal_var_se
    );
    println!("wrote {}", path.display());
    if report.pass() {
        println!("moment-check: PASS");
        Ok(())
    } else {
        eprintln!("moment-check FAILED: {}", row.join(","));
        Err(Failure::Check("moment-check failed".into()))
    }
}
