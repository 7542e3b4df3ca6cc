use std::path::PathBuf;

use clap::Args;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use sumrule_core::cheb::ChebUExpansion;
use sumrule_core::ensemble::{random_direction, rng, whole_line_ensemble};
use sumrule_core::jacobi::{FinVec, JacobiOperator, Side};
use sumrule_core::lns::{
    band_defect, dt_linearization, hankel_toeplitz_psd, hs_identity_check, quadratic_form, t_apply, t_of_j,
    PerturbationDirection,
};
use sumrule_core::sumrules::h_via_trace;
use sumrule_core::Result as CoreResult;

use crate::config::{config_err, impl_merge, num_err, parse_operator, parse_weight, Failure, Merge};
use crate::output::{fmt, write_csv, write_json};

const CHECKS: [&str; 6] = ["bands", "psd", "positivity", "hs", "linearization", "quadform"];

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(default)]
pub struct AppendixOpts {
    /// bands, psd, positivity, hs, linearization, quadform or all (default all)
    #[arg(long)]
    pub check: Option<String>,
    /// Degree bound: l for bands (default 6), hs, positivity and linearization (default 4)
    #[arg(long)]
    pub l: Option<usize>,
    /// Size of the Hankel-Toeplitz matrix (default 8)
    #[arg(long = "K")]
    #[serde(rename = "K", alias = "k")]
    pub k: Option<usize>,
    /// Whole-line operator (inline JSON or path) instead of the random ensemble
    #[arg(long)]
    pub operator: Option<String>,
    /// Size of the random whole-line ensemble (default 50)
    #[arg(long)]
    pub random: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Bound on |p - 1| and |q| in the ensemble (default 0.4)
    #[arg(long)]
    pub amp: Option<f64>,
    /// Step for the second-order check (default 1e-3)
    #[arg(long)]
    pub eps: Option<f64>,
    /// Number of random directions (default 10)
    #[arg(long)]
    pub directions: Option<usize>,
    /// Weights for the second-order check (default one, U2sq, U3sq, sq:1,1)
    #[arg(long = "A")]
    #[serde(rename = "A", alias = "a")]
    pub a: Option<Vec<String>>,
    /// Bound on |H/ε² - QF| / QF (default 0.05)
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub csv: Option<PathBuf>,
    #[arg(long)]
    pub json: Option<PathBuf>,
}

impl_merge!(AppendixOpts { check, l, k, operator, random, seed, amp, eps, directions, a, tol, csv, json });

#[derive(Debug, Clone, Serialize)]
struct Row {
    case_id: usize,
    check_name: String,
    value: f64,
    threshold: f64,
    pass: bool,
}

fn at_most(case_id: usize, name: impl Into<String>, value: f64, threshold: f64) -> Row {
    Row { case_id, check_name: name.into(), value, threshold, pass: value <= threshold }
}

fn at_least(case_id: usize, name: impl Into<String>, value: f64, threshold: f64) -> Row {
    Row { case_id, check_name: name.into(), value, threshold, pass: value >= threshold }
}

fn per_operator(
    ops: &[JacobiOperator],
    f: impl Fn(usize, &JacobiOperator) -> CoreResult<Vec<Row>> + Sync,
) -> Result<Vec<Row>, Failure> {
    let rows = ops.par_iter().enumerate().map(|(i, j)| f(i, j)).collect::<CoreResult<Vec<_>>>().map_err(num_err)?;
    Ok(rows.into_iter().flatten().collect())
}

fn max_norm(v: &FinVec) -> f64 {
    v.max_abs_diff(&FinVec::zero())
}

/// `|FD| / |dT_l|` over `ε = 1e-2 .. 1e-6` for `l = 1..=l_max`.
fn linearization_ratios(d: &PerturbationDirection, l_max: usize) -> CoreResult<(f64, f64)> {
    let free = JacobiOperator::free(Side::WholeLine);
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    for l in 1..=l_max {
        let lin = dt_linearization(d, l);
        let base = t_apply(&free, l, &FinVec::unit(0));
        for p in 2..=6 {
            let eps = 10f64.powi(-p);
            let moved = t_apply(&d.perturb_free(eps)?, l, &FinVec::unit(0));
            let ratio = max_norm(&moved.axpy(-1.0, &base).scale(1.0 / eps)) / max_norm(&lin);
            lo = lo.min(ratio);
            hi = hi.max(ratio);
        }
    }
    Ok((lo, hi))
}

pub fn run(opts: AppendixOpts) -> Result<(), Failure> {
    let which = opts.check.as_deref().unwrap_or("all");
    let checks: Vec<&str> = if which == "all" {
        CHECKS.to_vec()
    } else if CHECKS.contains(&which) {
        vec![which]
    } else {
        return Err(config_err(format!("unknown check {which:?} (expected one of {CHECKS:?} or all)")));
    };
    let ops = match &opts.operator {
        Some(spec) => {
            let j = parse_operator(spec)?;
            if j.side() != Side::WholeLine {
                return Err(config_err("appendix checks need a whole-line operator"));
            }
            vec![j]
        }
        None => {
            let amp = opts.amp.unwrap_or(0.4);
            if !(0.0..1.0).contains(&amp) {
                return Err(config_err("--amp must lie in [0, 1)"));
            }
            whole_line_ensemble(opts.seed.unwrap_or(0), opts.random.unwrap_or(50), amp)
        }
    };
    let k = opts.k.unwrap_or(8);
    let eps = opts.eps.unwrap_or(1e-3);
    let tol = opts.tol.unwrap_or(0.05);
    if k == 0 || eps.is_nan() || eps <= 0.0 || tol.is_nan() || tol <= 0.0 {
        return Err(config_err("--K, --eps and --tol must be positive"));
    }
    let specs = opts.a.clone().unwrap_or_else(|| ["one", "U2sq", "U3sq", "sq:1,1"].map(String::from).to_vec());
    let weights: Vec<ChebUExpansion> = specs.iter().map(|s| parse_weight(s)).collect::<Result<_, _>>()?;
    let mut r = rng(opts.seed.unwrap_or(0).wrapping_add(1));
    let dirs: Vec<PerturbationDirection> =
        (0..opts.directions.unwrap_or(10)).map(|_| random_direction(&mut r, -2, 2)).collect();
    let l_or = |default: usize| opts.l.unwrap_or(default);
    if opts.l == Some(0) {
        return Err(config_err("--l must be at least 1"));
    }

    let mut rows = Vec::new();
    for check in checks {
        match check {
            "bands" => {
                let l_max = l_or(6);
                rows.extend(per_operator(&ops, |i, j| {
                    let b1 = t_of_j(j, 1)?;
                    let (r0, r1) = b1.rows();
                    let mut worst = (r0..=r1)
                        .map(|s| (b1.get(1, s) - j.p(s)).abs().max((b1.get(0, s) - j.q(s)).abs()))
                        .fold(0.0, f64::max);
                    for l in 2..=l_max {
                        worst = worst.max(band_defect(j, l)?);
                    }
                    Ok(vec![at_most(i, "bands_max_gap", worst, 1e-12)])
                })?);
            }
            "psd" => rows.extend(per_operator(&ops, |i, j| {
                Ok(vec![at_least(i, "psd_min_eig", hankel_toeplitz_psd(j, k)?.1, -1e-10)])
            })?),
            "positivity" => {
                let n_max = l_or(4);
                rows.extend(per_operator(&ops, |i, j| {
                    let mut min = f64::INFINITY;
                    for n in 1..=n_max {
                        min = min.min(h_via_trace(j, &ChebUExpansion::u_squared(n))?);
                    }
                    Ok(vec![at_least(i, "h_min", min, -1e-10)])
                })?);
            }
            "hs" => {
                let l_max = l_or(4);
                rows.extend(per_operator(&ops, |i, j| {
                    let mut worst: f64 = 0.0;
                    for l in 1..=l_max {
                        worst = worst.max(hs_identity_check(j, l)?.residual);
                    }
                    Ok(vec![at_most(i, "hs_residual", worst, 1e-9)])
                })?);
            }
            "linearization" => {
                let l_max = l_or(4);
                let found = dirs
                    .par_iter()
                    .map(|d| linearization_ratios(d, l_max))
                    .collect::<CoreResult<Vec<_>>>()
                    .map_err(num_err)?;
                for (i, (lo, hi)) in found.into_iter().enumerate() {
                    rows.push(at_least(i, "linearization_min_ratio", lo, 0.5));
                    rows.push(at_most(i, "linearization_max_ratio", hi, 2.0));
                }
            }
            "quadform" => {
                let found = dirs
                    .par_iter()
                    .enumerate()
                    .map(|(i, d)| {
                        let j = d.perturb_free(eps)?;
                        weights
                            .iter()
                            .zip(&specs)
                            .map(|(a, s)| {
                                let qf = quadratic_form(a, d);
                                let h = h_via_trace(&j, a)?;
                                Ok(at_most(i, format!("quadform:{s}"), (h / (eps * eps) - qf).abs() / qf, tol))
                            })
                            .collect::<CoreResult<Vec<_>>>()
                    })
                    .collect::<CoreResult<Vec<_>>>()
                    .map_err(num_err)?;
                rows.extend(found.into_iter().flatten());
            }
            _ => unreachable!(),
        }
    }

    let csv_rows: Vec<Vec<String>> = rows
        .iter()
        .map(|r| vec![r.case_id.to_string(), r.check_name.clone(), fmt(r.value), fmt(r.threshold), r.pass.to_string()])
        .collect();
    write_csv(opts.csv.as_deref(), &["case_id", "check_name", "value", "threshold", "pass"], &csv_rows)?;
    write_json(opts.json.as_deref(), &rows)?;

    let failed = rows.iter().filter(|r| !r.pass).count();
    eprintln!("appendix: {} rows, {failed} failed", rows.len());
    if failed == 0 {
        Ok(())
    } else {
        Err(Failure::Numerical(format!("{failed} of {} checks failed", rows.len())))
    }
}
