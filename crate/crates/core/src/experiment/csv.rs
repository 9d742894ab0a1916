//! Result rows and their CSV rendering.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::Result;

pub const HEADER: &str = "scenario,mode,sweep,x,estimate,error,reps,seed";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub scenario: String,
    pub mode: String,
    pub sweep: String,
    /// Threshold in dB, Laplace argument, slot count, or 0 for throughput.
    pub x: f64,
    pub estimate: f64,
    /// Standard error (Monte Carlo) or tolerance (analytic).
    pub error: f64,
    pub reps: usize,
    pub seed: u64,
}

/// Six significant digits; positional notation between 1e-5 and 1e6.
pub fn format_sig(v: f64) -> String {
    if v == 0.0 {
        return "0.00000".into();
    }
    if !v.is_finite() {
        return if v.is_nan() { "nan".into() } else if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let exp = v.abs().log10().floor() as i32;
    if (-5..6).contains(&exp) {
        let decimals = (5 - exp).max(0) as usize;
        format!("{v:.decimals$}")
    } else {
        format!("{v:.5e}")
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

impl ResultRow {
    pub fn to_csv(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{}",
            csv_field(&self.scenario),
            csv_field(&self.mode),
            csv_field(&self.sweep),
            format_sig(self.x),
            format_sig(self.estimate),
            format_sig(self.error),
            self.reps,
            self.seed
        )
    }
}

pub fn render(rows: &[ResultRow]) -> String {
    let mut out = String::from(HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&r.to_csv());
        out.push('\n');
    }
    out
}

pub fn write_csv(path: &Path, rows: &[ResultRow]) -> Result<()> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            std::fs::create_dir_all(dir)?;
        }
    }
    let mut f = std::fs::File::create(path)?;
    f.write_all(render(rows).as_bytes())?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn significant_digits() {
        assert_eq!(format_sig(1.93701234), "1.93701");
        assert_eq!(format_sig(0.000123456789), "0.000123457");
        assert_eq!(format_sig(-10.0), "-10.0000");
        assert_eq!(format_sig(123456789.0), "1.23457e8");
        assert_eq!(format_sig(123456.4), "123456");
        assert_eq!(format_sig(1.5e-9), "1.50000e-9");
        assert_eq!(format_sig(0.0), "0.00000");
    }

    #[test]
    fn quoted_fields() {
        let r = ResultRow {
            scenario: "a,b".into(),
            mode: "correlated".into(),
            sweep: "0.5/5".into(),
            x: 0.0,
            estimate: 0.5,
            error: 0.001,
            reps: 10,
            seed: 1,
        };
        assert_eq!(r.to_csv(), "\"a,b\",correlated,0.5/5,0.00000,0.500000,0.00100000,10,1");
    }
}
