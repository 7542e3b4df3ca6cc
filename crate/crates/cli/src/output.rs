use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::config::{config_err, Failure};

/// 17 significant digits.
pub fn fmt(x: f64) -> String {
    format!("{x:.16e}")
}

/// Writes `header` and `rows` as CSV to `path`, or to stdout when absent.
pub fn write_csv(path: Option<&Path>, header: &[&str], rows: &[Vec<String>]) -> Result<(), Failure> {
    let sink: Box<dyn Write> = match path {
        Some(p) => Box::new(std::fs::File::create(p).map_err(|e| config_err(format!("{}: {e}", p.display())))?),
        None => Box::new(std::io::stdout().lock()),
    };
    let mut w = csv::Writer::from_writer(sink);
    w.write_record(header).map_err(config_err)?;
    for row in rows {
        w.write_record(row).map_err(config_err)?;
    }
    w.flush().map_err(config_err)
}

pub fn write_json(path: Option<&Path>, value: &impl Serialize) -> Result<(), Failure> {
    let Some(p) = path else {
        return Ok(());
    };
    let text = serde_json::to_string_pretty(value).map_err(config_err)?;
    std::fs::write(p, text + "\n").map_err(|e| config_err(format!("{}: {e}", p.display())))
}
