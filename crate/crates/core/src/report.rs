//! Artifact serialization: every JSON document carries a schema version, the
//! run configuration that produced it, a metadata block (where the timestamp
//! lives, so payloads stay byte-comparable), and the payload itself. CSV
//! writers cover the plot-ready tables.

use std::fs;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;

use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::wronskian::ScanCell;
use crate::zerofinder::CertifiedZero;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    schema_version: u32,
    config: &'a RunConfig,
    meta: Meta,
    payload: &'a T,
}

#[derive(Serialize)]
struct Meta {
    timestamp: String,
}

/// The complete artifact document: envelope plus payload, pretty-printed.
pub fn render<T: Serialize>(config: &RunConfig, payload: &T) -> Result<String> {
    let doc = Envelope {
        schema_version: SCHEMA_VERSION,
        config,
        meta: Meta {
            timestamp: utc_timestamp(),
        },
        payload,
    };
    let mut text = serde_json::to_string_pretty(&doc)
        .map_err(|e| Error::Serialization(e.to_string()))?;
    text.push('\n');
    Ok(text)
}

/// The payload alone, without envelope or timestamp — the part of an
/// artifact that must be bit-identical across repeated runs.
pub fn payload_json<T: Serialize>(payload: &T) -> Result<String> {
    serde_json::to_string(payload).map_err(|e| Error::Serialization(e.to_string()))
}

/// Render and write one artifact, creating parent directories as needed.
pub fn write_artifact<T: Serialize>(path: &Path, config: &RunConfig, payload: &T) -> Result<()> {
    let text = render(config, payload)?;
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)
            .map_err(|e| Error::ArtifactIo(format!("creating {}: {e}", parent.display())))?;
    }
    fs::write(path, text)
        .map_err(|e| Error::ArtifactIo(format!("writing {}: {e}", path.display())))
}

/// Write a CSV table, creating parent directories as needed.
pub fn write_table(path: &Path, text: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)
            .map_err(|e| Error::ArtifactIo(format!("creating {}: {e}", parent.display())))?;
    }
    fs::write(path, text)
        .map_err(|e| Error::ArtifactIo(format!("writing {}: {e}", path.display())))
}

/// Heatmap table for a Wronskian scan. Failed cells keep their coordinates
/// and leave the value columns empty.
pub fn scan_csv(cells: &[ScanCell]) -> String {
    let mut out = String::from("re,im,log_abs_W,arg_W,defect\n");
    for cell in cells {
        match &cell.eval {
            Some(eval) => {
                let value = &eval.value;
                out.push_str(&format!(
                    "{},{},{},{},{}\n",
                    cell.zeta.re,
                    cell.zeta.im,
                    value.abs_log(),
                    value.arg(),
                    eval.constancy_defect
                ));
            }
            None => out.push_str(&format!("{},{},,,\n", cell.zeta.re, cell.zeta.im)),
        }
    }
    out
}

/// Certified zeros as a flat table.
pub fn zeros_csv(zeros: &[CertifiedZero]) -> String {
    let mut out = String::from("re,im,residual_log,winding,cert_radius\n");
    for zero in zeros {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            zero.zeta_star.re, zero.zeta_star.im, zero.residual_log, zero.winding, zero.cert_radius
        ));
    }
    out
}

/// Eigenfunction samples `(x, f(x))` as a flat table.
pub fn eigenfunction_csv(samples: &[(f64, num_complex::Complex64)]) -> String {
    let mut out = String::from("x,re_f,im_f\n");
    for &(x, f) in samples {
        out.push_str(&format!("{},{},{}\n", x, f.re, f.im));
    }
    out
}

/// Current time as ISO-8601 UTC, second resolution.
pub fn utc_timestamp() -> String {
    let secs = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    format_epoch(secs)
}

fn format_epoch(secs: u64) -> String {
    let days = (secs / 86_400) as i64;
    let rem = secs % 86_400;
    let (year, month, day) = civil_from_days(days);
    format!(
        "{year:04}-{month:02}-{day:02}T{:02}:{:02}:{:02}Z",
        rem / 3600,
        (rem % 3600) / 60,
        rem % 60
    )
}

/// Gregorian date for a day count since 1970-01-01 (Hinnant's algorithm).
fn civil_from_days(z: i64) -> (i64, u32, u32) {
    let z = z + 719_468;
    let era = z.div_euclid(146_097);
    let doe = z.rem_euclid(146_097);
    let yoe = (doe - doe / 1460 + doe / 36_524 - doe / 146_096) / 365;
    let y = yoe + era * 400;
    let doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    let mp = (5 * doy + 2) / 153;
    let d = (doy - (153 * mp + 2) / 5 + 1) as u32;
    let m = if mp < 10 { mp + 3 } else { mp - 9 } as u32;
    (if m <= 2 { y + 1 } else { y }, m, d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wronskian::{eval_w, ScanCell};
    use crate::Problem;
    use num_complex::Complex64;
    use serde_json::Value;

    #[test]
    fn envelope_has_the_documented_shape() {
        let config = RunConfig::default();
        let text = render(&config, &vec![1.5f64, 2.5]).unwrap();
        let doc: Value = serde_json::from_str(&text).unwrap();
        assert_eq!(doc["schema_version"], 1);
        assert_eq!(doc["config"]["m"], 3);
        assert!(doc["meta"]["timestamp"].is_string());
        assert_eq!(doc["payload"][1], 2.5);
    }

    #[test]
    fn payload_survives_a_json_round_trip_bitwise() {
        let payload = vec![0.1f64, std::f64::consts::PI, -3.25e-11, 6.02e23];
        let text = payload_json(&payload).unwrap();
        let back: Vec<f64> = serde_json::from_str(&text).unwrap();
        for (a, b) in payload.iter().zip(&back) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
        assert_eq!(text, payload_json(&payload).unwrap());
    }

    #[test]
    fn epoch_formatting_matches_known_dates() {
        assert_eq!(format_epoch(0), "1970-01-01T00:00:00Z");
        assert_eq!(format_epoch(86_399), "1970-01-01T23:59:59Z");
        assert_eq!(format_epoch(951_782_400), "2000-02-29T00:00:00Z");
        assert_eq!(format_epoch(1_700_000_000), "2023-11-14T22:13:20Z");
    }

    #[test]
    fn scan_csv_keeps_failed_cells() {
        let problem = Problem::new(2).unwrap();
        let zeta = Complex64::new(0.5, 0.5);
        let ok = ScanCell {
            zeta,
            eval: Some(eval_w(&problem, zeta).unwrap()),
            failure: None,
        };
        let bad = ScanCell {
            zeta: Complex64::new(1.0, -1.0),
            eval: None,
            failure: Some("step size underflow".into()),
        };
        let csv = scan_csv(&[ok, bad]);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "re,im,log_abs_W,arg_W,defect");
        assert_eq!(lines[1].split(',').count(), 5);
        assert_eq!(lines[2], "1,-1,,,");
    }

    #[test]
    fn eigenfunction_csv_round_trips_values() {
        let csv = eigenfunction_csv(&[(0.25, Complex64::new(1.0, -2.0))]);
        assert_eq!(csv, "x,re_f,im_f\n0.25,1,-2\n");
    }
}
