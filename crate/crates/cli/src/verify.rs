use std::path::PathBuf;

use clap::Args;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use sumrule_core::jacobi::{JacobiOperator, Side};
use sumrule_core::sumrules::{verify_sum_rule, DEFAULT_NODES};
use sumrule_core::SumRuleReport;

use crate::config::{config_err, impl_merge, num_err, parse_weight, Failure, Merge, OperatorArgs};
use crate::output::{fmt, write_csv, write_json};

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(default)]
pub struct VerifyOpts {
    #[command(flatten)]
    #[serde(flatten)]
    pub operator: OperatorArgs,
    /// Weight specs (repeatable): one, U2sq, UmUn:m,n, sq:c1,c2, or U-coefficients
    #[arg(long = "A")]
    #[serde(rename = "A", alias = "a")]
    pub a: Option<Vec<String>>,
    /// Base node count of the cut quadrature
    #[arg(long)]
    pub nodes: Option<usize>,
    #[arg(long)]
    pub csv: Option<PathBuf>,
    #[arg(long)]
    pub json: Option<PathBuf>,
}

impl_merge!(VerifyOpts { a, nodes, csv, json } flatten { operator: OperatorArgs });

#[derive(Serialize)]
struct CaseRecord<'a> {
    case_id: usize,
    #[serde(rename = "A_spec")]
    a_spec: &'a str,
    rank: usize,
    operator: &'a JacobiOperator,
    #[serde(flatten)]
    report: &'a SumRuleReport,
}

pub fn run(opts: VerifyOpts) -> Result<(), Failure> {
    let ops = opts.operator.resolve("free")?;
    if ops.iter().any(|j| j.side() != Side::HalfLine) {
        return Err(config_err("verify needs half-line operators"));
    }
    let specs = opts.a.unwrap_or_else(|| vec!["one".into()]);
    let weights = specs.iter().map(|s| parse_weight(s)).collect::<Result<Vec<_>, _>>()?;
    let nodes = opts.nodes.unwrap_or(DEFAULT_NODES);
    if nodes < 16 {
        return Err(config_err("--nodes must be at least 16"));
    }

    let cases: Vec<(usize, usize)> = (0..ops.len()).flat_map(|o| (0..weights.len()).map(move |w| (o, w))).collect();
    let reports = cases
        .par_iter()
        .map(|&(o, w)| verify_sum_rule(&ops[o], &weights[w], nodes))
        .collect::<Result<Vec<_>, _>>()
        .map_err(num_err)?;

    let rows: Vec<Vec<String>> = cases
        .iter()
        .zip(&reports)
        .enumerate()
        .map(|(id, (&(o, w), r))| {
            vec![
                id.to_string(),
                specs[w].clone(),
                ops[o].rank_index().to_string(),
                fmt(r.lambda_value),
                fmt(r.h_value),
                fmt(r.residual),
                r.pass.to_string(),
            ]
        })
        .collect();
    write_csv(opts.csv.as_deref(), &["case_id", "A_spec", "rank", "lambda", "h", "residual", "pass"], &rows)?;
    let records: Vec<CaseRecord> = cases
        .iter()
        .zip(&reports)
        .enumerate()
        .map(|(case_id, (&(o, w), report))| CaseRecord {
            case_id,
            a_spec: &specs[w],
            rank: ops[o].rank_index(),
            operator: &ops[o],
            report,
        })
        .collect();
    write_json(opts.json.as_deref(), &records)?;

    let failed = reports.iter().filter(|r| !r.pass).count();
    eprintln!("verify: {} cases, {failed} failed", reports.len());
    if failed == 0 {
        Ok(())
    } else {
        Err(Failure::Numerical(format!("{failed} of {} cases failed", reports.len())))
    }
}
