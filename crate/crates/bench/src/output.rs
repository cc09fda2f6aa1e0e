//! CSV and gnuplot emission.
//!
//! A result file starts with `#`-prefixed `key = value` summary lines, then a
//! `threshold_db,ccdf` header and one row per grid point. Values are written
//! with 17 significant digits so re-reading reproduces the curve exactly.
//! Wall time is deliberately left out so that files are reproducible.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::error::{BenchError, Result};
use crate::run::RunResult;

pub const HEADER: [&str; 2] = ["threshold_db", "ccdf"];

fn number(v: f64) -> String {
    format!("{v:.16e}")
}

fn optional(v: Option<f64>) -> String {
    v.map(number).unwrap_or_else(|| "n/a".to_string())
}

/// Summary lines, without the leading `# `.
pub fn summary_lines(result: &RunResult) -> Vec<String> {
    let cfg = &result.config;
    let mut lines = vec![
        format!("label = {}", cfg.label),
        format!("technique = {}", cfg.technique.technique()),
        format!("n_subcarriers = {}", cfg.n_subcarriers),
        format!("oversampling = {}", cfg.oversampling),
        format!("n_symbols = {}", cfg.n_symbols),
        format!("seed = {}", cfg.seed),
    ];
    for (key, value) in cfg.technique.parameters() {
        lines.push(format!("{key} = {value}"));
    }
    lines.push(format!(
        "mean_papr_db = {}",
        number(result.summary.mean_papr_db)
    ));
    lines.push(format!(
        "max_papr_db = {}",
        number(result.summary.max_papr_db)
    ));
    for &(p, v) in &result.summary.papr_at {
        lines.push(format!("papr_db_at_{p:e} = {}", optional(v)));
    }
    for (key, value) in &result.aggregates {
        lines.push(format!("{key} = {}", number(*value)));
    }
    lines
}

pub fn format_csv(result: &RunResult) -> String {
    let mut out = Vec::new();
    write_to(result, &mut out).expect("writing to memory cannot fail");
    String::from_utf8(out).expect("csv output is ASCII")
}

fn write_to(result: &RunResult, out: &mut Vec<u8>) -> std::result::Result<(), csv::Error> {
    for line in summary_lines(result) {
        writeln!(out, "# {line}")?;
    }
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    w.write_record(HEADER)?;
    for (t, p) in result
        .curve
        .thresholds_db
        .iter()
        .zip(&result.curve.probabilities)
    {
        w.write_record([number(*t), number(*p)])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_csv(result: &RunResult, path: &Path) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|source| BenchError::Io {
            path: parent.to_path_buf(),
            source,
        })?;
    }
    fs::write(path, format_csv(result)).map_err(|source| BenchError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// A curve read back from a result file.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvCurve {
    pub summary: Vec<(String, String)>,
    pub thresholds_db: Vec<f64>,
    pub probabilities: Vec<f64>,
}

impl CsvCurve {
    pub fn summary_value(&self, key: &str) -> Option<&str> {
        self.summary
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }
}

pub fn read_csv(path: &Path) -> Result<CsvCurve> {
    let text = fs::read_to_string(path).map_err(|source| BenchError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_csv(&text).map_err(|e| match e {
        ParseError::Csv(source) => BenchError::Csv {
            path: path.to_path_buf(),
            source,
        },
        ParseError::Malformed(message) => BenchError::MalformedCsv {
            path: path.to_path_buf(),
            message,
        },
    })
}

enum ParseError {
    Csv(csv::Error),
    Malformed(String),
}

fn parse_csv(text: &str) -> std::result::Result<CsvCurve, ParseError> {
    let summary = text
        .lines()
        .filter_map(|l| l.strip_prefix("# "))
        .filter_map(|l| l.split_once(" = "))
        .map(|(k, v)| (k.to_string(), v.to_string()))
        .collect();
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let header = reader.headers().map_err(ParseError::Csv)?;
    if header.iter().ne(HEADER) {
        return Err(ParseError::Malformed(format!(
            "unexpected header {header:?}"
        )));
    }
    let mut thresholds_db = Vec::new();
    let mut probabilities = Vec::new();
    for record in reader.records() {
        let record = record.map_err(ParseError::Csv)?;
        let value = |i: usize| -> std::result::Result<f64, ParseError> {
            record
                .get(i)
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| ParseError::Malformed(format!("bad row {record:?}")))
        };
        thresholds_db.push(value(0)?);
        probabilities.push(value(1)?);
    }
    Ok(CsvCurve {
        summary,
        thresholds_db,
        probabilities,
    })
}

/// Gnuplot script drawing every CSV on one log-scale CCDF plot. Paths are
/// written relative to the script's directory when possible.
pub fn gnuplot_script(title: &str, csvs: &[PathBuf], script_dir: &Path) -> String {
    let mut s = String::new();
    s.push_str("set datafile separator ','\n");
    s.push_str("set datafile commentschars '#'\n");
    s.push_str("set logscale y\n");
    s.push_str("set format y '10^{%L}'\n");
    s.push_str("set yrange [1e-4:1]\n");
    s.push_str("set xlabel 'PAPR_0 (dB)'\n");
    s.push_str("set ylabel 'Pr(PAPR > PAPR_0)'\n");
    s.push_str("set grid\n");
    s.push_str(&format!("set title '{title}'\n"));
    let entries: Vec<String> = csvs
        .iter()
        .map(|p| {
            let rel = p.strip_prefix(script_dir).unwrap_or(p);
            let name = rel.file_stem().and_then(|n| n.to_str()).unwrap_or("curve");
            format!("'{}' using 1:2 with lines title '{name}'", rel.display())
        })
        .collect();
    s.push_str("plot ");
    s.push_str(&entries.join(", \\\n     "));
    s.push('\n');
    s
}
