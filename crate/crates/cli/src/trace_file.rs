//! Lasso traces as CSV: one row per position, `;`-separated AP names, and
//! a `# cycle_start: N` comment marking where the repeated part begins.

use tempograd::ltl::{Label, LassoTrace};

use crate::error::CliError;
use crate::output::CSV_HEADER;

pub fn parse_trace(text: &str, ap_names: &[&str]) -> Result<LassoTrace, CliError> {
    let bad = |m: String| CliError::Validation(format!("trace: {m}"));
    let mut cycle_start = None;
    for line in text.lines().map(str::trim).filter(|l| l.starts_with('#')) {
        if let Some(v) = line.trim_start_matches('#').trim().strip_prefix("cycle_start:") {
            cycle_start = Some(
                v.trim()
                    .parse::<usize>()
                    .map_err(|e| bad(format!("cycle_start: {e}")))?,
            );
        }
    }
    let cycle_start = cycle_start.ok_or_else(|| bad("missing '# cycle_start: N' line".into()))?;
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .flexible(true)
        .from_reader(text.as_bytes());
    let headers = rdr.headers().map_err(|e| bad(e.to_string()))?.clone();
    if headers.iter().collect::<Vec<_>>() != ["step", "labels"] {
        return Err(bad(format!("expected header 'step,labels', found {headers:?}")));
    }
    let mut labels: Vec<Label> = Vec::new();
    for (row, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| bad(e.to_string()))?;
        let step: usize = rec
            .get(0)
            .unwrap_or("")
            .trim()
            .parse()
            .map_err(|e| bad(format!("row {row}: step: {e}")))?;
        if step != row {
            return Err(bad(format!("row {row}: expected step {row}, found {step}")));
        }
        let mut label = 0;
        for name in rec.get(1).unwrap_or("").split(';').map(str::trim) {
            if name.is_empty() {
                continue;
            }
            let i = ap_names
                .iter()
                .position(|n| *n == name)
                .ok_or_else(|| bad(format!("row {row}: unknown AP '{name}'")))?;
            label |= 1 << i;
        }
        labels.push(label);
    }
    if cycle_start >= labels.len() {
        return Err(bad(format!(
            "cycle_start {cycle_start} leaves an empty cycle ({} rows)",
            labels.len()
        )));
    }
    let cycle = labels.split_off(cycle_start);
    Ok(LassoTrace::new(labels, cycle))
}

pub fn write_trace(t: &LassoTrace, ap_names: &[&str]) -> Result<String, CliError> {
    let mut out = format!("{CSV_HEADER}\n# cycle_start: {}\n", t.prefix.len());
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["step", "labels"])?;
    for (i, l) in t.prefix.iter().chain(&t.cycle).enumerate() {
        let names: Vec<&str> = ap_names
            .iter()
            .enumerate()
            .filter(|(k, _)| l >> k & 1 == 1)
            .map(|(_, n)| *n)
            .collect();
        w.write_record([i.to_string(), names.join(";")])?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Runtime(e.to_string()))?;
    out.push_str(&String::from_utf8_lossy(&bytes));
    Ok(out)
}
