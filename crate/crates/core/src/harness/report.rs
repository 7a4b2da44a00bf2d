use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};

use super::grid::{Algorithm, ExperimentKind};

pub const CSV_HEADER: &str = "experiment,algorithm,n,s,b,k,m,alpha,nsr,trials,recovery_probability,mean_relative_error,mean_wall_time_seconds,master_seed";

/// Aggregated outcome of one cell.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub experiment: ExperimentKind,
    pub algorithm: Algorithm,
    pub n: usize,
    pub s: usize,
    pub b: Option<usize>,
    pub k: Option<usize>,
    pub m: usize,
    pub alpha: Option<f64>,
    pub nsr: f64,
    pub trials: usize,
    pub successes: usize,
    pub recovery_probability: f64,
    pub mean_relative_error: f64,
    pub mean_wall_time_seconds: f64,
    pub master_seed: u64,
}

/// `%g`-style formatting with six significant digits.
pub fn format_sig6(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return if x.is_nan() {
            "nan".into()
        } else if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    let sci = format!("{x:.5e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..6).contains(&exp) {
        let mantissa = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        return format!("{mantissa}e{sign}{:02}", exp.abs());
    }
    let decimals = (5 - exp) as usize;
    trim_zeros(&format!("{x:.decimals$}")).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

impl ResultRow {
    fn fields(&self) -> [String; 14] {
        [
            self.experiment.name().to_string(),
            self.algorithm.name().to_string(),
            self.n.to_string(),
            self.s.to_string(),
            opt(self.b),
            opt(self.k),
            self.m.to_string(),
            opt(self.alpha.map(format_sig6)),
            format_sig6(self.nsr),
            self.trials.to_string(),
            format_sig6(self.recovery_probability),
            format_sig6(self.mean_relative_error),
            format_sig6(self.mean_wall_time_seconds),
            self.master_seed.to_string(),
        ]
    }
}

/// Writes the table as CSV to any sink.
pub fn write_csv<W: Write>(rows: &[ResultRow], out: W) -> std::io::Result<()> {
    let mut w = BufWriter::new(out);
    writeln!(w, "{CSV_HEADER}")?;
    for row in rows {
        writeln!(w, "{}", row.fields().join(","))?;
    }
    w.flush()
}

pub fn emit_csv(rows: &[ResultRow], path: &Path) -> Result<()> {
    let io = |source| Error::Io {
        path: path.to_path_buf(),
        source,
    };
    let file = File::create(path).map_err(io)?;
    write_csv(rows, file).map_err(io)
}

/// Parses a table written by [`emit_csv`].
///
/// `successes` is reconstructed as `round(probability * trials)`.
pub fn read_csv(path: &Path) -> Result<Vec<ResultRow>> {
    let io = |source| Error::Io {
        path: path.to_path_buf(),
        source,
    };
    let text = std::fs::read_to_string(path).map_err(io)?;
    let mut reader = csv::ReaderBuilder::new().from_reader(text.as_bytes());
    let header = reader
        .headers()
        .map_err(|e| Error::config("csv", e.to_string()))?
        .iter()
        .collect::<Vec<_>>()
        .join(",");
    if header != CSV_HEADER {
        return Err(Error::config(
            "csv",
            format!("unexpected header {header:?}"),
        ));
    }
    let mut rows = Vec::new();
    for record in reader.records() {
        let r = record.map_err(|e| Error::config("csv", e.to_string()))?;
        let field = |i: usize| r.get(i).unwrap_or("");
        let num = |i: usize| -> Result<f64> {
            field(i)
                .parse()
                .map_err(|_| Error::config(CSV_HEADER.split(',').nth(i).unwrap_or("csv"), field(i)))
        };
        let int = |i: usize| -> Result<usize> {
            field(i)
                .parse()
                .map_err(|_| Error::config(CSV_HEADER.split(',').nth(i).unwrap_or("csv"), field(i)))
        };
        let maybe = |i: usize| -> Result<Option<usize>> {
            if field(i).is_empty() {
                Ok(None)
            } else {
                int(i).map(Some)
            }
        };
        let trials = int(9)?;
        let recovery_probability = num(10)?;
        rows.push(ResultRow {
            experiment: field(0).parse()?,
            algorithm: field(1).parse()?,
            n: int(2)?,
            s: int(3)?,
            b: maybe(4)?,
            k: maybe(5)?,
            m: int(6)?,
            alpha: if field(7).is_empty() {
                None
            } else {
                Some(num(7)?)
            },
            nsr: num(8)?,
            trials,
            successes: (recovery_probability * trials as f64).round() as usize,
            recovery_probability,
            mean_relative_error: num(11)?,
            mean_wall_time_seconds: num(12)?,
            master_seed: field(13)
                .parse()
                .map_err(|_| Error::config("master_seed", field(13)))?,
        });
    }
    Ok(rows)
}
