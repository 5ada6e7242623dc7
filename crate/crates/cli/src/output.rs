use std::io::Write;

use anyhow::Result;
use serde::Serialize;

/// CSV with a leading `# rispls <version>` line, or one JSON object per line.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Ndjson,
}

pub fn version_line() -> String {
    format!("# rispls {}", crate::VERSION)
}

/// Writes `rows`; the CSV header comes from the row's field names.
pub fn write_rows<W: Write, R: Serialize>(mut out: W, rows: &[R], format: Format) -> Result<()> {
    match format {
        Format::Csv => {
            writeln!(out, "{}", version_line())?;
            let mut w = csv::Writer::from_writer(&mut out);
            for r in rows {
                w.serialize(r)?;
            }
            w.flush()?;
        }
        Format::Ndjson => {
            for r in rows {
                serde_json::to_writer(&mut out, r)?;
                writeln!(out)?;
            }
        }
    }
    out.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sweep::{EvalMethod, Metric, Row, SweepVar};

    fn row() -> Row {
        Row {
            metric: Metric::PLeak,
            method: EvalMethod::Closed,
            sweep_var: SweepVar::RhoRatioDb,
            sweep_value: Some(0.0),
            elements: 4,
            kr_db: 5.0,
            m: 3.0,
            rho_b_db: 0.0,
            rho_e_db: 0.0,
            value: 5.5634838e-4,
            std_error: None,
            n_samples: None,
            seed: None,
        }
    }

    #[test]
    fn csv_layout() {
        let mut buf = Vec::new();
        write_rows(&mut buf, &[row()], Format::Csv).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert!(lines[0].starts_with("# rispls "));
        assert_eq!(
            lines[1],
            "metric,method,sweep_var,sweep_value,M,K_r_db,m,rho_b_db,rho_e_db,value,std_error,n_samples,seed"
        );
        assert_eq!(lines[2], "p_leak,closed,rho_ratio_db,0.0,4,5.0,3.0,0.0,0.0,0.00055634838,,,");
    }

    #[test]
    fn ndjson_layout() {
        let mut buf = Vec::new();
        write_rows(&mut buf, &[row(), row()], Format::Ndjson).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 2);
        let v: serde_json::Value = serde_json::from_str(text.lines().next().unwrap()).unwrap();
        assert_eq!(v["M"], 4);
        assert_eq!(v["std_error"], serde_json::Value::Null);
        assert_eq!(v["metric"], "p_leak");
    }
}
