//! Output files. Floats are written with 17 significant digits and LF endings.

use std::fmt::Write as _;
use std::path::Path;

use fracspec::experiments::{run_comparison, run_convergence};
use fracspec::solver::solve;

use crate::config::Resolved;
use crate::CliError;

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn write_file(dir: &Path, name: &str, contents: &str) -> Result<(), CliError> {
    let path = dir.join(name);
    std::fs::write(&path, contents).map_err(|source| CliError::Io { path, source })
}

/// Creates the output directory and echoes the resolved config into it.
pub fn prepare(run: &Resolved) -> Result<(), CliError> {
    std::fs::create_dir_all(&run.output).map_err(|source| CliError::Io { path: run.output.clone(), source })?;
    let mut echo = serde_json::to_string_pretty(&run.config).expect("config serializes");
    echo.push('\n');
    write_file(&run.output, "config.json", &echo)
}

pub fn write_solve(run: &Resolved) -> Result<(), CliError> {
    let sol = solve(&run.spec)?;
    let (grid, values) = sol.sample(run.config.grid_points);
    let mut csv = String::from("x,u\n");
    for (x, u) in grid.iter().zip(&values) {
        writeln!(csv, "{},{}", num(*x), num(*u)).unwrap();
    }
    write_file(&run.output, "solution.csv", &csv)?;

    let fp = &sol.fp;
    let d = &sol.diagnostics;
    let (pl2, ph1) = fp.predicted_rates(run.spec.advection_free(), f64::INFINITY, run.spec.variant);
    let mut summary = String::new();
    writeln!(summary, "alpha = {}", fp.alpha).unwrap();
    writeln!(summary, "r = {}", fp.r).unwrap();
    writeln!(summary, "beta = {:.12}", fp.beta).unwrap();
    writeln!(summary, "c** = {:.12}", fp.c_star_star).unwrap();
    writeln!(summary, "variant = {}", run.spec.variant.name()).unwrap();
    writeln!(summary, "N = {}", run.spec.n).unwrap();
    writeln!(summary, "quad_points = {}", run.spec.quad_points).unwrap();
    writeln!(summary, "predicted rate_L2 = {pl2:.4}").unwrap();
    writeln!(summary, "predicted rate_H1 = {ph1:.4}").unwrap();
    writeln!(summary, "condition estimate = {:.6e}", d.cond_estimate).unwrap();
    writeln!(summary, "residual = {:.6e}", d.residual).unwrap();
    writeln!(summary, "reciprocal pivot growth = {:.6e}", d.reciprocal_pivot_growth).unwrap();
    writeln!(summary, "near singular = {}", d.near_singular).unwrap();
    writeln!(summary, "k_min = {:.6e}", d.k_min).unwrap();
    writeln!(summary, "rhs[0] = {}", num(d.rhs0)).unwrap();
    write_file(&run.output, "summary.txt", &summary)
}

pub fn write_converge(run: &Resolved) -> Result<(), CliError> {
    let ns = run.config.ns.as_deref().unwrap_or_default();
    let report = run_convergence(&run.spec, ns, run.config.n_ref)?.on_interval(run.norm_interval);
    let rate = |r: Option<f64>| r.map(num).unwrap_or_default();
    let mut csv = String::from("N,err_L2,rate_L2,err_H1,rate_H1\n");
    for row in &report.rows {
        writeln!(csv, "{},{},{},{},{}", row.n, num(row.err_l2), rate(row.rate_l2), num(row.err_h1), rate(row.rate_h1))
            .unwrap();
    }
    writeln!(csv, "# pred,{},{}", num(report.predicted.0), num(report.predicted.1)).unwrap();
    write_file(&run.output, "convergence.csv", &csv)
}

pub fn write_compare(run: &Resolved) -> Result<(), CliError> {
    let report = run_comparison(&run.spec, &run.k_variants, run.config.grid_points)?;
    let single = run.config.k_variants.is_none();
    for r in &report.runs {
        let mut csv = String::from("x,u_acute,u_grave\n");
        for ((x, a), g) in report.grid.iter().zip(&r.u_acute).zip(&r.u_grave) {
            writeln!(csv, "{},{},{}", num(*x), num(*a), num(*g)).unwrap();
        }
        let name = if single { "compare.csv".to_string() } else { format!("compare_{}.csv", r.name) };
        write_file(&run.output, &name, &csv)?;
    }
    Ok(())
}
