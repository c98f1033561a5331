//! CSV and JSON output for radius sweeps.

use std::io::Write;

use super::decay::{DecayResult, DecayRow};
use crate::error::Result;

/// First line of every CSV file; bump the version when columns change.
pub const CSV_HEADER_COMMENT: &str = "# gblab probe csv v1";

pub const CSV_COLUMNS: [&str; 8] = ["family", "radius", "M", "C", "kernel_dim", "slope", "verdict", "wall_ms"];

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn record(row: &DecayRow) -> [String; 8] {
    [
        row.family.clone(),
        opt(row.radius),
        opt(row.m),
        opt(row.c),
        opt(row.kernel_dim),
        opt(row.slope),
        row.verdict.as_str().to_string(),
        opt(row.wall_ms),
    ]
}

pub fn write_csv<W: Write>(mut out: W, rows: &[DecayRow]) -> Result<()> {
    writeln!(out, "{CSV_HEADER_COMMENT}")?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_COLUMNS)?;
    for row in rows {
        w.write_record(record(row))?;
    }
    w.flush()?;
    Ok(())
}

pub fn csv_string(rows: &[DecayRow]) -> Result<String> {
    let mut buf = Vec::new();
    write_csv(&mut buf, rows)?;
    Ok(String::from_utf8(buf).expect("csv output is utf-8"))
}

pub fn json_string(result: &DecayResult) -> Result<String> {
    Ok(serde_json::to_string_pretty(result)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lab::decay::Verdict;

    #[test]
    fn csv_layout() {
        let row = DecayRow {
            family: "triadic".into(),
            radius: Some(4),
            m: Some(1),
            c: Some(0.5),
            kernel_dim: Some(0),
            slope: None,
            verdict: Verdict::Fail,
            wall_ms: None,
        };
        let text = csv_string(&[row]).unwrap();
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines[0], CSV_HEADER_COMMENT);
        assert_eq!(lines[1], "family,radius,M,C,kernel_dim,slope,verdict,wall_ms");
        assert_eq!(lines[2], "triadic,4,1,0.5,0,,FAIL,");
    }
}
