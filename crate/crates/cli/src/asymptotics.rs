use std::path::PathBuf;

use clap::Args;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use sumrule_core::asymptotics::{experiment_row, limit_values, ConvergenceRow, ConvergenceTable};
use sumrule_core::jacobi::{JacobiOperator, Side};
use sumrule_core::orthopoly::SpectralData;
use sumrule_core::sumrules::DEFAULT_NODES;

use crate::config::{
    build_grid, config_err, impl_merge, num_err, parse_ns, parse_weight, Failure, Merge, OperatorArgs,
};
use crate::output::{fmt, write_csv, write_json};

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(default)]
pub struct AsymptoticsOpts {
    #[command(flatten)]
    #[serde(flatten)]
    pub operator: OperatorArgs,
    /// Weight spec (default U2sq)
    #[arg(long = "A")]
    #[serde(rename = "A", alias = "a")]
    pub a: Option<String>,
    /// Degrees as start:end:step or a comma list (default 50:200:10)
    #[arg(long)]
    pub n: Option<String>,
    /// Explicit grid `re,im;re,im;..` instead of the lattice
    #[arg(long)]
    pub points: Option<String>,
    /// Lattice radius (default 6)
    #[arg(long)]
    pub radius: Option<f64>,
    /// Lattice spacing (default 0.5)
    #[arg(long)]
    pub step: Option<f64>,
    /// Minimum distance of lattice points to [-2, 2], at least 0.1 (default 1)
    #[arg(long)]
    pub min_dist: Option<f64>,
    #[arg(long)]
    pub nodes: Option<usize>,
    /// Monotonicity is required for n at or above this value (default 50)
    #[arg(long)]
    pub burn_in: Option<usize>,
    /// Allowed relative increase between consecutive sup-errors (default 0.05)
    #[arg(long)]
    pub jitter: Option<f64>,
    /// Bound on the last sup-error (default 1e-3)
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub csv: Option<PathBuf>,
    #[arg(long)]
    pub json: Option<PathBuf>,
}

impl_merge!(
    AsymptoticsOpts { a, n, points, radius, step, min_dist, nodes, burn_in, jitter, tol, csv, json }
    flatten { operator: OperatorArgs }
);

#[derive(Serialize)]
struct RowSummary {
    n: usize,
    sup_error: f64,
}

#[derive(Serialize)]
struct Summary<'a> {
    operator: &'a JacobiOperator,
    #[serde(rename = "A_spec")]
    a_spec: &'a str,
    grid_points: usize,
    rows: Vec<RowSummary>,
    burn_in: usize,
    monotone: bool,
    final_sup_error: f64,
    pass: bool,
}

pub fn run(opts: AsymptoticsOpts) -> Result<(), Failure> {
    let mut ops = opts.operator.resolve("rank3")?;
    if ops.len() != 1 {
        return Err(config_err("asymptotics runs on a single operator"));
    }
    let j = ops.remove(0);
    if j.side() != Side::HalfLine {
        return Err(config_err("asymptotics needs a half-line operator"));
    }
    let a_spec = opts.a.unwrap_or_else(|| "U2sq".into());
    let a = parse_weight(&a_spec)?;
    let ns = parse_ns(opts.n.as_deref().unwrap_or("50:200:10"))?;
    let grid = build_grid(
        opts.points.as_deref(),
        opts.radius.unwrap_or(6.0),
        opts.step.unwrap_or(0.5),
        opts.min_dist.unwrap_or(1.0),
        &a,
    )?;
    let nodes = opts.nodes.unwrap_or(DEFAULT_NODES);
    if nodes < 16 {
        return Err(config_err("--nodes must be at least 16"));
    }
    let burn_in = opts.burn_in.unwrap_or(50);
    let jitter = opts.jitter.unwrap_or(0.05);
    let tol = opts.tol.unwrap_or(1e-3);

    let sd = SpectralData::new(&j).map_err(num_err)?;
    let limits = limit_values(&sd, &a, &grid, nodes).map_err(num_err)?;
    let rows = ns
        .par_iter()
        .map(|&n| experiment_row(&j, &a, n, &grid, &limits))
        .collect::<Result<Vec<ConvergenceRow>, _>>()
        .map_err(num_err)?;
    let table = ConvergenceTable { grid: grid.iter().map(|z| (z.re, z.im)).collect(), rows };

    let csv_rows: Vec<Vec<String>> = table
        .rows
        .iter()
        .flat_map(|row| {
            grid.iter().zip(&row.errors).map(move |(z, e)| vec![row.n.to_string(), fmt(z.re), fmt(z.im), fmt(*e)])
        })
        .collect();
    write_csv(opts.csv.as_deref(), &["n", "z_re", "z_im", "err_abs"], &csv_rows)?;

    let tail =
        ConvergenceTable { grid: Vec::new(), rows: table.rows.iter().filter(|r| r.n >= burn_in).cloned().collect() };
    let monotone = tail.is_monotone(jitter);
    let final_sup_error = table.rows.last().map_or(0.0, |r| r.sup_error);
    let pass = monotone && final_sup_error <= tol;
    let summary = Summary {
        operator: &j,
        a_spec: &a_spec,
        grid_points: grid.len(),
        rows: table.rows.iter().map(|r| RowSummary { n: r.n, sup_error: r.sup_error }).collect(),
        burn_in,
        monotone,
        final_sup_error,
        pass,
    };
    write_json(opts.json.as_deref(), &summary)?;

    for r in &table.rows {
        eprintln!("n = {:>4}  sup error {}", r.n, fmt(r.sup_error));
    }
    eprintln!("asymptotics: monotone after n = {burn_in}: {monotone}, final {}", fmt(final_sup_error));
    if pass {
        Ok(())
    } else {
        Err(Failure::Numerical(format!(
            "monotone = {monotone}, final sup error {final_sup_error:e} (tolerance {tol:e})"
        )))
    }
}
