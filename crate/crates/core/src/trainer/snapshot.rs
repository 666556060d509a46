use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use super::{Policy, PolicyShape, TrainError};

/// Header line of a snapshot file; parameters follow one per line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Snapshot {
    pub format: String,
    pub shape: PolicyShape,
    pub num_params: usize,
    pub seed: u64,
}

const FORMAT: &str = "tempograd-snapshot v1";

pub fn write_snapshot<W: Write>(mut w: W, policy: &Policy, seed: u64) -> std::io::Result<()> {
    let header = Snapshot {
        format: FORMAT.to_string(),
        shape: policy.shape.clone(),
        num_params: policy.params.len(),
        seed,
    };
    writeln!(w, "{}", serde_json::to_string(&header)?)?;
    for p in &policy.params {
        // Display of f64 is the shortest round-tripping form.
        writeln!(w, "{p}")?;
    }
    Ok(())
}

pub fn read_snapshot<R: BufRead>(r: R) -> Result<(Policy, Snapshot), TrainError> {
    let err = |m: String| TrainError::Snapshot(m);
    let mut lines = r.lines();
    let head = lines
        .next()
        .ok_or_else(|| err("empty file".into()))?
        .map_err(|e| err(e.to_string()))?;
    let header: Snapshot = serde_json::from_str(&head).map_err(|e| err(format!("header: {e}")))?;
    if header.format != FORMAT {
        return Err(err(format!("unsupported format '{}'", header.format)));
    }
    let mut params = Vec::with_capacity(header.num_params);
    for (i, line) in lines.enumerate() {
        let line = line.map_err(|e| err(e.to_string()))?;
        if line.trim().is_empty() {
            continue;
        }
        params.push(
            line.trim()
                .parse::<f64>()
                .map_err(|e| err(format!("parameter line {}: {e}", i + 2)))?,
        );
    }
    if params.len() != header.num_params || params.len() != header.shape.num_params() {
        return Err(err(format!(
            "expected {} parameters, found {}",
            header.num_params,
            params.len()
        )));
    }
    Ok((
        Policy {
            shape: header.shape.clone(),
            params,
        },
        header,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trainer::PolicyConfig;

    #[test]
    fn round_trip_is_exact() {
        let cfg = PolicyConfig::Mlp {
            hidden: vec![3],
            eps_head: true,
            init_scale: 1.0,
        };
        let p = Policy::new(&cfg, 4, &[-1.0], &[1.0], 2, 11);
        let mut buf = Vec::new();
        write_snapshot(&mut buf, &p, 11).unwrap();
        let (q, h) = read_snapshot(&buf[..]).unwrap();
        assert_eq!(p, q);
        assert_eq!(h.seed, 11);
    }

    #[test]
    fn truncated_file_is_rejected() {
        let p = Policy::new(&PolicyConfig::Constant { init: vec![1.0, 2.0] }, 0, &[0.0], &[1.0], 0, 0);
        let mut buf = Vec::new();
        write_snapshot(&mut buf, &p, 0).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let cut: String = text.lines().take(2).map(|l| format!("{l}\n")).collect();
        assert!(read_snapshot(cut.as_bytes()).is_err());
    }
}
