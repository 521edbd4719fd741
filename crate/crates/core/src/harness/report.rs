//! CSV and JSON output for survey records.

use std::fmt::Display;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;
use std::str::FromStr;

use super::{CountRecord, TRACKED_PRIMES};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Json,
}

impl FromStr for ReportFormat {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(ReportFormat::Csv),
            "json" => Ok(ReportFormat::Json),
            _ => Err(Error::InvalidArgument(format!("unknown report format {s:?}"))),
        }
    }
}

/// Leading CSV columns, in order. Extra diagnostic columns follow them.
pub const CSV_COLUMNS: [&str; 12] = [
    "B",
    "n",
    "C",
    "delta",
    "pairs_total",
    "pairs_in_S",
    "ratio_BlogB",
    "min_pair_freeness",
    "mean_pair_freeness",
    "floor_2dn_over_n1",
    "euler_product_ref",
    "max_correction_budget",
];

const EXTRA_COLUMNS: [&str; 8] = [
    "pairs_balanced",
    "balanced_w1_fraction",
    "balanced_arch_fraction",
    "pairs_below_floor",
    "max_second_height",
    "max_W_in_S",
    "worst_x1",
    "worst_x2",
];

fn opt<T: Display>(v: &Option<T>) -> String {
    v.as_ref().map(|x| x.to_string()).unwrap_or_default()
}

fn csv_row(r: &CountRecord) -> Vec<String> {
    let mut row = vec![
        r.bound.to_string(),
        r.n.to_string(),
        r.c.to_string(),
        r.delta.to_string(),
        r.pairs_total.to_string(),
        r.pairs_in_s.to_string(),
        r.ratio.to_string(),
        opt(&r.min_pair_freeness),
        opt(&r.mean_pair_freeness),
        r.floor_2dn_over_n1.to_string(),
        r.euler_product_ref.to_string(),
        opt(&r.max_correction_budget),
        r.pairs_balanced.to_string(),
        opt(&r.balanced_w1_fraction),
        opt(&r.balanced_arch_fraction),
        r.pairs_below_floor.to_string(),
        opt(&r.max_second_height),
        opt(&r.max_modulus_in_s),
        opt(&r.worst_pair.as_ref().map(|w| w.x1.clone())),
        opt(&r.worst_pair.as_ref().map(|w| w.x2.clone())),
    ];
    for p in TRACKED_PRIMES {
        row.push(opt(&r.congruent_density_by_prime.get(&p)));
    }
    row
}

/// Writes records as CSV or pretty JSON.
pub fn write_records<W: Write>(records: &[CountRecord], format: ReportFormat, mut out: W) -> Result<()> {
    match format {
        ReportFormat::Csv => {
            let mut header: Vec<String> = CSV_COLUMNS.iter().chain(&EXTRA_COLUMNS).map(|s| s.to_string()).collect();
            header.extend(TRACKED_PRIMES.iter().map(|p| format!("congruent_p{p}")));
            writeln!(out, "{}", header.join(","))?;
            for r in records {
                writeln!(out, "{}", csv_row(r).join(","))?;
            }
        }
        ReportFormat::Json => {
            serde_json::to_writer_pretty(&mut out, records)?;
            writeln!(out)?;
        }
    }
    out.flush()?;
    Ok(())
}

pub fn emit_report(records: &[CountRecord], format: ReportFormat, path: &Path) -> Result<()> {
    if records.is_empty() {
        return Err(Error::InvalidArgument("no records to write".into()));
    }
    write_records(records, format, BufWriter::new(File::create(path)?))
}

#[cfg(test)]
mod tests {
    use super::super::{run_survey, SurveyConfig};
    use super::*;

    #[test]
    fn csv_shape_and_json_fields() {
        let cfg = SurveyConfig::dyadic(2, 3.0, 0.4, 8, 10);
        let recs = run_survey(&cfg).unwrap();
        assert_eq!(recs.len(), 3);
        let mut buf = Vec::new();
        write_records(&recs, ReportFormat::Csv, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 4);
        assert!(lines[0].starts_with(&CSV_COLUMNS.join(",")));
        let width = lines[0].split(',').count();
        assert!(lines[1..].iter().all(|l| l.split(',').count() == width));

        let mut buf = Vec::new();
        write_records(&recs, ReportFormat::Json, &mut buf).unwrap();
        let v: serde_json::Value = serde_json::from_slice(&buf).unwrap();
        let obj = v[0].as_object().unwrap();
        for c in CSV_COLUMNS.iter().chain(&EXTRA_COLUMNS[..6]) {
            assert!(obj.contains_key(*c), "missing {c}");
        }
    }

    #[test]
    fn empty_records_rejected() {
        let dir = std::env::temp_dir().join("freelat-empty-report.csv");
        assert!(emit_report(&[], ReportFormat::Csv, &dir).is_err());
        assert!("xml".parse::<ReportFormat>().is_err());
    }
}
