//! CSV and JSON-lines output with a metadata sidecar.

use std::fmt::Write as _;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use rstre_core::branching::ComponentStatsTable;
use rstre_core::experiments::ResultRecord;
use serde_json::Value;

use crate::error::{io_error, HarnessError};

pub const ARTIFACT_VERSION: &str = env!("CARGO_PKG_VERSION");

pub const RECORD_COLUMNS: [&str; 16] = [
    "n",
    "gamma",
    "trial",
    "seed",
    "diameter",
    "c1_size",
    "max_excess",
    "max_comp_diam",
    "lower_bound",
    "t_1",
    "s_n",
    "elapsed_ms",
    "partial_cover",
    "capped",
    "tail_k",
    "tail_r",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Jsonl,
}

impl Format {
    pub fn parse(s: &str) -> Result<Self, HarnessError> {
        match s {
            "csv" => Ok(Format::Csv),
            "jsonl" => Ok(Format::Jsonl),
            other => Err(HarnessError::Usage(format!("unknown format '{other}' (csv or jsonl)"))),
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Jsonl => "jsonl",
        }
    }
}

/// 17 significant digits, enough to read back the same `f64`.
pub fn fmt_float(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        x.to_string()
    }
}

fn opt<T: ToString>(v: &Option<T>) -> String {
    v.as_ref().map(|x| x.to_string()).unwrap_or_default()
}

fn opt_float(v: Option<f64>) -> String {
    v.map(fmt_float).unwrap_or_default()
}

fn joined(v: &[f64]) -> String {
    v.iter().map(|&x| fmt_float(x)).collect::<Vec<_>>().join(";")
}

fn csv_row(r: &ResultRecord) -> [String; 16] {
    [
        r.n.to_string(),
        fmt_float(r.gamma),
        r.trial.to_string(),
        r.seed.to_string(),
        opt(&r.diameter),
        opt(&r.c1_size),
        opt(&r.max_excess),
        opt(&r.max_comp_diam),
        opt(&r.lower_bound),
        opt(&r.t_1),
        opt_float(r.s_n),
        opt_float(r.elapsed_ms),
        r.partial_cover.to_string(),
        r.capped.to_string(),
        joined(&r.tail_k),
        joined(&r.tail_r),
    ]
}

fn json_number(x: f64) -> String {
    if x.is_finite() {
        fmt_float(x)
    } else {
        "null".into()
    }
}

fn json_opt<T: ToString>(v: &Option<T>) -> String {
    v.as_ref().map(|x| x.to_string()).unwrap_or_else(|| "null".into())
}

fn json_array(v: &[f64]) -> String {
    format!("[{}]", v.iter().map(|&x| json_number(x)).collect::<Vec<_>>().join(","))
}

/// One JSON object; numbers use the same text as the CSV.
pub fn json_line(r: &ResultRecord) -> String {
    let values = [
        r.n.to_string(),
        json_number(r.gamma),
        r.trial.to_string(),
        r.seed.to_string(),
        json_opt(&r.diameter),
        json_opt(&r.c1_size),
        json_opt(&r.max_excess),
        json_opt(&r.max_comp_diam),
        json_opt(&r.lower_bound),
        json_opt(&r.t_1),
        r.s_n.map(json_number).unwrap_or_else(|| "null".into()),
        r.elapsed_ms.map(json_number).unwrap_or_else(|| "null".into()),
        r.partial_cover.to_string(),
        r.capped.to_string(),
        json_array(&r.tail_k),
        json_array(&r.tail_r),
    ];
    let mut s = String::from("{");
    for (i, (k, v)) in RECORD_COLUMNS.iter().zip(values).enumerate() {
        if i > 0 {
            s.push(',');
        }
        let _ = write!(s, "\"{k}\":{v}");
    }
    s.push('}');
    s
}

pub fn write_records_to<W: Write>(records: &[ResultRecord], format: Format, out: W) -> std::io::Result<()> {
    let mut out = BufWriter::new(out);
    match format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(&mut out);
            w.write_record(RECORD_COLUMNS)?;
            for r in records {
                w.write_record(csv_row(r))?;
            }
            w.flush()?;
        }
        Format::Jsonl => {
            for r in records {
                writeln!(out, "{}", json_line(r))?;
            }
        }
    }
    out.flush()
}

pub fn meta_path(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".meta.json");
    PathBuf::from(s)
}

/// Writes the data file and `<path>.meta.json`.
pub fn write_records(
    records: &[ResultRecord],
    format: Format,
    path: &Path,
    config_hash: &str,
) -> Result<(), HarnessError> {
    let file = File::create(path).map_err(io_error(path))?;
    write_records_to(records, format, file).map_err(io_error(path))?;
    write_meta(path, format, config_hash, records.len(), "records")
}

fn write_meta(path: &Path, format: Format, config_hash: &str, rows: usize, kind: &str) -> Result<(), HarnessError> {
    let meta = meta_path(path);
    let text = format!(
        "{{\"artifact_version\":\"{ARTIFACT_VERSION}\",\"config_hash\":\"{config_hash}\",\"format\":\"{}\",\"kind\":\"{kind}\",\"rows\":{rows}}}\n",
        format.as_str()
    );
    std::fs::write(&meta, text).map_err(io_error(&meta))
}

fn bad(path: &Path, message: impl Into<String>) -> HarnessError {
    HarnessError::Format {
        path: path.display().to_string(),
        message: message.into(),
    }
}

fn parse_opt<T: std::str::FromStr>(s: &str, path: &Path, col: &str) -> Result<Option<T>, HarnessError> {
    if s.is_empty() {
        return Ok(None);
    }
    s.parse().map(Some).map_err(|_| bad(path, format!("column {col}: cannot parse '{s}'")))
}

fn parse_req<T: std::str::FromStr>(s: &str, path: &Path, col: &str) -> Result<T, HarnessError> {
    parse_opt(s, path, col)?.ok_or_else(|| bad(path, format!("column {col} is empty")))
}

fn parse_list(s: &str, path: &Path, col: &str) -> Result<Vec<f64>, HarnessError> {
    if s.is_empty() {
        return Ok(Vec::new());
    }
    s.split(';').map(|x| parse_req(x, path, col)).collect()
}

fn from_json(v: &Value, path: &Path) -> Result<ResultRecord, HarnessError> {
    let get = |k: &str| v.get(k).ok_or_else(|| bad(path, format!("missing key {k}")));
    let uint = |k: &str| -> Result<Option<u64>, HarnessError> {
        let x = get(k)?;
        if x.is_null() {
            Ok(None)
        } else {
            x.as_u64().map(Some).ok_or_else(|| bad(path, format!("{k} is not an unsigned integer")))
        }
    };
    let float = |k: &str| -> Result<Option<f64>, HarnessError> {
        let x = get(k)?;
        if x.is_null() {
            Ok(None)
        } else {
            x.as_f64().map(Some).ok_or_else(|| bad(path, format!("{k} is not a number")))
        }
    };
    let flag = |k: &str| get(k)?.as_bool().ok_or_else(|| bad(path, format!("{k} is not a boolean")));
    let list = |k: &str| -> Result<Vec<f64>, HarnessError> {
        get(k)?
            .as_array()
            .ok_or_else(|| bad(path, format!("{k} is not an array")))?
            .iter()
            .map(|x| x.as_f64().ok_or_else(|| bad(path, format!("{k} holds a non-number"))))
            .collect()
    };
    let need = |x: Option<u64>, k: &str| x.ok_or_else(|| bad(path, format!("{k} is null")));
    let excess = get("max_excess")?;
    Ok(ResultRecord {
        n: need(uint("n")?, "n")? as usize,
        gamma: float("gamma")?.ok_or_else(|| bad(path, "gamma is null"))?,
        trial: need(uint("trial")?, "trial")?,
        seed: need(uint("seed")?, "seed")?,
        diameter: uint("diameter")?,
        c1_size: uint("c1_size")?,
        max_excess: if excess.is_null() {
            None
        } else {
            Some(excess.as_i64().ok_or_else(|| bad(path, "max_excess is not an integer"))?)
        },
        max_comp_diam: uint("max_comp_diam")?,
        lower_bound: uint("lower_bound")?,
        t_1: uint("t_1")?,
        s_n: float("s_n")?,
        elapsed_ms: float("elapsed_ms")?,
        partial_cover: flag("partial_cover")?,
        capped: flag("capped")?,
        tail_k: list("tail_k")?,
        tail_r: list("tail_r")?,
    })
}

pub fn read_records(path: &Path, format: Format) -> Result<Vec<ResultRecord>, HarnessError> {
    let file = File::open(path).map_err(io_error(path))?;
    match format {
        Format::Csv => {
            let mut rdr = csv::Reader::from_reader(file);
            let header = rdr.headers().map_err(|e| bad(path, e.to_string()))?.clone();
            if header.iter().ne(RECORD_COLUMNS.iter().copied()) {
                return Err(bad(path, "unexpected header"));
            }
            let mut out = Vec::new();
            for row in rdr.records() {
                let row = row.map_err(|e| bad(path, e.to_string()))?;
                let c = |i: usize| &row[i];
                out.push(ResultRecord {
                    n: parse_req(c(0), path, "n")?,
                    gamma: parse_req(c(1), path, "gamma")?,
                    trial: parse_req(c(2), path, "trial")?,
                    seed: parse_req(c(3), path, "seed")?,
                    diameter: parse_opt(c(4), path, "diameter")?,
                    c1_size: parse_opt(c(5), path, "c1_size")?,
                    max_excess: parse_opt(c(6), path, "max_excess")?,
                    max_comp_diam: parse_opt(c(7), path, "max_comp_diam")?,
                    lower_bound: parse_opt(c(8), path, "lower_bound")?,
                    t_1: parse_opt(c(9), path, "t_1")?,
                    s_n: parse_opt(c(10), path, "s_n")?,
                    elapsed_ms: parse_opt(c(11), path, "elapsed_ms")?,
                    partial_cover: parse_req(c(12), path, "partial_cover")?,
                    capped: parse_req(c(13), path, "capped")?,
                    tail_k: parse_list(c(14), path, "tail_k")?,
                    tail_r: parse_list(c(15), path, "tail_r")?,
                });
            }
            Ok(out)
        }
        Format::Jsonl => {
            let mut out = Vec::new();
            for line in BufReader::new(file).lines() {
                let line = line.map_err(io_error(path))?;
                if line.trim().is_empty() {
                    continue;
                }
                let v: Value = serde_json::from_str(&line).map_err(|e| bad(path, e.to_string()))?;
                out.push(from_json(&v, path)?);
            }
            Ok(out)
        }
    }
}

pub const STATS_COLUMNS: [&str; 9] = [
    "n",
    "trials",
    "j",
    "count",
    "probability",
    "stderr",
    "cycle_free_fraction",
    "same_component",
    "same_component_stderr",
];

pub fn write_stats_to<W: Write>(tables: &[ComponentStatsTable], format: Format, out: W) -> std::io::Result<()> {
    let mut out = BufWriter::new(out);
    let rows = tables.iter().flat_map(|t| {
        t.rows.iter().map(move |r| {
            [
                t.n.to_string(),
                t.trials.to_string(),
                r.j.to_string(),
                r.count.to_string(),
                fmt_float(r.probability),
                fmt_float(r.stderr),
                fmt_float(r.cycle_free_fraction),
                fmt_float(t.same_component),
                fmt_float(t.same_component_stderr),
            ]
        })
    });
    match format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(&mut out);
            w.write_record(STATS_COLUMNS)?;
            for row in rows {
                w.write_record(row)?;
            }
            w.flush()?;
        }
        Format::Jsonl => {
            for row in rows {
                let body: Vec<String> = STATS_COLUMNS.iter().zip(row).map(|(k, v)| format!("\"{k}\":{v}")).collect();
                writeln!(out, "{{{}}}", body.join(","))?;
            }
        }
    }
    out.flush()
}

pub fn write_stats(
    tables: &[ComponentStatsTable],
    format: Format,
    path: &Path,
    config_hash: &str,
) -> Result<(), HarnessError> {
    let file = File::create(path).map_err(io_error(path))?;
    write_stats_to(tables, format, file).map_err(io_error(path))?;
    let rows = tables.iter().map(|t| t.rows.len()).sum();
    write_meta(path, format, config_hash, rows, "component-stats")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Vec<ResultRecord> {
        vec![
            ResultRecord {
                n: 100,
                gamma: 5.0,
                trial: 0,
                seed: u64::MAX,
                diameter: Some(17),
                c1_size: Some(9),
                max_excess: Some(-1),
                max_comp_diam: Some(4),
                lower_bound: None,
                t_1: None,
                s_n: None,
                elapsed_ms: None,
                partial_cover: false,
                capped: true,
                tail_k: vec![],
                tail_r: vec![],
            },
            ResultRecord {
                n: 365,
                gamma: -1.0,
                trial: 3,
                seed: 12,
                diameter: None,
                c1_size: Some(1),
                max_excess: Some(0),
                max_comp_diam: Some(0),
                lower_bound: Some(3),
                t_1: Some(22),
                s_n: Some(1.0 / 365f64.sqrt()),
                elapsed_ms: Some(0.1),
                partial_cover: true,
                capped: false,
                tail_k: vec![0.1 + 0.2, 1e-300],
                tail_r: vec![std::f64::consts::PI],
            },
        ]
    }

    #[test]
    fn floats_round_trip_exactly() {
        for x in [0.1 + 0.2, 1.0 / 3.0, 1e-300, 6.02e23, -0.0, 5.0] {
            assert_eq!(fmt_float(x).parse::<f64>().unwrap().to_bits(), x.to_bits());
        }
    }

    #[test]
    fn write_then_read_back() {
        let dir = tempfile::tempdir().unwrap();
        for format in [Format::Csv, Format::Jsonl] {
            let path = dir.path().join(format!("r.{}", format.as_str()));
            write_records(&sample(), format, &path, "abc").unwrap();
            assert_eq!(read_records(&path, format).unwrap(), sample());
            let meta = std::fs::read_to_string(meta_path(&path)).unwrap();
            assert!(meta.contains("\"config_hash\":\"abc\""));
            assert!(meta.contains(ARTIFACT_VERSION));
        }
    }

    #[test]
    fn empty_outputs() {
        let dir = tempfile::tempdir().unwrap();
        let csv_path = dir.path().join("e.csv");
        write_records(&[], Format::Csv, &csv_path, "h").unwrap();
        assert_eq!(std::fs::read_to_string(&csv_path).unwrap(), RECORD_COLUMNS.join(",") + "\n");
        let jl = dir.path().join("e.jsonl");
        write_records(&[], Format::Jsonl, &jl, "h").unwrap();
        assert_eq!(std::fs::read_to_string(&jl).unwrap(), "");
        assert!(meta_path(&jl).exists());
    }

    #[test]
    fn json_lines_are_valid_json() {
        for r in sample() {
            let v: Value = serde_json::from_str(&json_line(&r)).unwrap();
            assert_eq!(v.as_object().unwrap().len(), RECORD_COLUMNS.len());
        }
    }

    #[test]
    fn io_errors_carry_the_path() {
        let e = write_records(&[], Format::Csv, Path::new("/nonexistent-dir/x.csv"), "h").unwrap_err();
        assert!(e.to_string().contains("/nonexistent-dir/x.csv"));
        assert_eq!(e.exit_code(), 3);
    }
}
