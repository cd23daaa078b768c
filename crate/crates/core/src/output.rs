//! CSV writers shared by the continuous and discrete runs.

use std::io::Write;
use std::path::Path;

use crate::error::Result;
use crate::geometry::MetricsSample;

pub const METRICS_HEADER: &str = "t,sed_circumference,hull_perimeter,dispersion,cluster_fraction";

/// Formats a float with 9 significant digits, trimming trailing zeros.
pub fn fmt_sig9(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let exp = x.abs().log10().floor() as i32;
    if (-5..9).contains(&exp) {
        let decimals = (8 - exp).max(0) as usize;
        trim_fraction(format!("{x:.decimals$}"))
    } else {
        let s = format!("{x:.8e}");
        match s.split_once('e') {
            Some((mantissa, e)) => format!("{}e{}", trim_fraction(mantissa.to_string()), e),
            None => s,
        }
    }
}

fn trim_fraction(s: String) -> String {
    if !s.contains('.') {
        return s;
    }
    let t = s.trim_end_matches('0').trim_end_matches('.');
    if t == "-0" {
        "0".to_string()
    } else {
        t.to_string()
    }
}

/// Renders a metrics series as CSV text (header plus one line per sample).
pub fn metrics_csv(series: &[MetricsSample]) -> String {
    let mut out = String::with_capacity(64 * (series.len() + 1));
    out.push_str(METRICS_HEADER);
    out.push('\n');
    for s in series {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            fmt_sig9(s.time),
            fmt_sig9(s.sed_circumference),
            fmt_sig9(s.hull_perimeter),
            fmt_sig9(s.dispersion),
            fmt_sig9(s.cluster_fraction)
        ));
    }
    out
}

pub fn write_metrics_csv(path: &Path, series: &[MetricsSample]) -> Result<()> {
    let mut f = std::fs::File::create(path)?;
    f.write_all(metrics_csv(series).as_bytes())?;
    Ok(())
}

/// Writes `key = value` lines describing a run next to its CSV.
pub fn write_sidecar(path: &Path, entries: &[(&str, String)]) -> Result<()> {
    let mut f = std::fs::File::create(path)?;
    for (k, v) in entries {
        writeln!(f, "{k} = {v}")?;
    }
    Ok(())
}

/// Parses a metrics CSV written by [`metrics_csv`].
pub fn read_metrics_csv(path: &Path) -> Result<Vec<MetricsSample>> {
    let mut rdr = csv::Reader::from_path(path)?;
    let mut out = Vec::new();
    for row in rdr.records() {
        let row = row?;
        let field = |i: usize| -> Result<f64> {
            row.get(i)
                .and_then(|s| s.trim().parse::<f64>().ok())
                .ok_or_else(|| crate::Error::Spec(format!("bad metrics row: {row:?}")))
        };
        out.push(MetricsSample {
            time: field(0)?,
            sed_circumference: field(1)?,
            hull_perimeter: field(2)?,
            dispersion: field(3)?,
            cluster_fraction: field(4)?,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sig9_formatting() {
        assert_eq!(fmt_sig9(0.0), "0");
        assert_eq!(fmt_sig9(0.5), "0.5");
        assert_eq!(fmt_sig9(300.0), "300");
        assert_eq!(fmt_sig9(1.0 / 3.0), "0.333333333");
        assert_eq!(fmt_sig9(123456.789012), "123456.789");
        assert_eq!(fmt_sig9(-2.5), "-2.5");
        assert_eq!(fmt_sig9(1.234567891e-7), "1.23456789e-7");
        assert_eq!(fmt_sig9(9.87654321987e12), "9.87654322e12");
    }

    #[test]
    fn csv_header_and_rows() {
        let s = MetricsSample {
            time: 0.5,
            sed_circumference: 10.0,
            hull_perimeter: 8.0,
            dispersion: 3.25,
            cluster_fraction: 1.0,
        };
        let text = metrics_csv(&[s]);
        assert_eq!(text, format!("{METRICS_HEADER}\n0.5,10,8,3.25,1\n"));
    }
}
