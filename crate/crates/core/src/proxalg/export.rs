//! Trace serialization. The CSV has a fixed header and one row per step
//! `k = 1..n`, describing the iterate `x^k`; optional columns are left empty.

use serde::Serialize;

use super::Trace;
use crate::error::{Error, Result};

pub const CSV_HEADER: [&str; 7] = [
    "k",
    "lambda",
    "successive_dist",
    "fejer_dist",
    "bound_71",
    "bound_72",
    "eq_residual",
];

/// Embedded in every output so a file can be traced to its inputs.
#[derive(Debug, Clone, Serialize)]
pub struct Provenance {
    pub tool_version: String,
    pub config_hash: String,
    pub seed: u64,
}

fn num(v: f64) -> String {
    format!("{v:e}")
}

pub fn to_csv(trace: &Trace, prov: &Provenance) -> Result<String> {
    let mut out = format!(
        "# hadamard {} config_hash={} seed={}\n",
        prov.tool_version, prov.config_hash, prov.seed
    );
    let mut w = csv::Writer::from_writer(Vec::new());
    let row_err = |e: csv::Error| Error::invalid(format!("csv: {e}"));
    w.write_record(CSV_HEADER).map_err(row_err)?;
    for k in 0..trace.len() {
        let opt = |v: Option<f64>| v.map(num).unwrap_or_default();
        w.write_record([
            (k + 1).to_string(),
            num(trace.steps[k]),
            num(trace.successive[k]),
            opt(trace.fejer.as_ref().map(|f| f[k + 1])),
            num(trace.residual_lower_bounds[k]),
            opt(trace.diameter_bounds.as_ref().map(|b| b[k])),
            num(trace.equilibrium_residuals[k]),
        ])
        .map_err(row_err)?;
    }
    let body = w.into_inner().map_err(|e| Error::invalid(format!("csv: {e}")))?;
    out.push_str(&String::from_utf8(body).expect("csv output is utf-8"));
    Ok(out)
}

#[derive(Serialize)]
struct Document<'a> {
    provenance: &'a Provenance,
    trace: &'a Trace,
}

pub fn to_json(trace: &Trace, prov: &Provenance) -> Result<String> {
    serde_json::to_string_pretty(&Document { provenance: prov, trace })
        .map_err(|e| Error::invalid(format!("json: {e}")))
}
