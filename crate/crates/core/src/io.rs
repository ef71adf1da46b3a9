//! On-disk formats: observation matrices, hidden permutations and risk
//! tables, all CSV.
//!
//! A matrix file starts with a header row `n=<rows>,d=<cols>` followed by
//! one row per database record. Reals are written with 17 significant
//! digits so a write/read round trip is exact; discrete symbols are written
//! as integers.

use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::experiments::SweepRow;
use crate::matrix::Matrix;

/// Column order of risk tables.
pub const RISK_COLUMNS: [&str; 12] = [
    "model_kind",
    "param",
    "n",
    "d",
    "detector",
    "threshold",
    "fpr",
    "fnr",
    "risk",
    "stderr",
    "trials",
    "seed",
];

fn csv_err(e: csv::Error) -> Error {
    Error::Io(e.to_string())
}

fn data_err(name: &str, line: u64, msg: impl std::fmt::Display) -> Error {
    Error::Data(format!("{name}:{line}: {msg}"))
}

fn header_value(field: &str, key: &str) -> Option<usize> {
    field
        .trim()
        .strip_prefix(key)?
        .strip_prefix('=')?
        .trim()
        .parse()
        .ok()
}

/// Writes a matrix. `integer` formats entries as whole numbers.
pub fn write_matrix<W: Write>(out: W, m: &Matrix, integer: bool) -> Result<()> {
    let mut w = csv::WriterBuilder::new().flexible(true).from_writer(out);
    w.write_record([format!("n={}", m.rows()), format!("d={}", m.cols())])
        .map_err(csv_err)?;
    for i in 0..m.rows() {
        let row = m.row(i).iter().map(|&v| {
            if integer {
                format!("{}", v as i64)
            } else {
                format!("{v:.16e}")
            }
        });
        w.write_record(row).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a matrix, checking the header against the body. `name` labels
/// error messages.
pub fn read_matrix<R: Read>(input: R, name: &str) -> Result<Matrix> {
    let mut r = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(input);
    let mut records = r.records();
    let header = records
        .next()
        .ok_or_else(|| data_err(name, 1, "empty file; expected header 'n=<rows>,d=<cols>'"))?
        .map_err(csv_err)?;
    let (n, d) = match (header.get(0), header.get(1), header.len()) {
        (Some(a), Some(b), 2) => match (header_value(a, "n"), header_value(b, "d")) {
            (Some(n), Some(d)) if n > 0 && d > 0 => (n, d),
            _ => {
                return Err(data_err(
                    name,
                    1,
                    "header must be 'n=<rows>,d=<cols>' with positive sizes",
                ))
            }
        },
        _ => return Err(data_err(name, 1, "header must be 'n=<rows>,d=<cols>'")),
    };
    let mut data = Vec::with_capacity(n * d);
    let mut rows = 0;
    for rec in records {
        let rec = rec.map_err(csv_err)?;
        let line = rec.position().map_or(0, csv::Position::line);
        if rec.len() == 1 && rec.get(0) == Some("") {
            continue;
        }
        if rec.len() != d {
            return Err(data_err(
                name,
                line,
                format!("expected {d} values, found {}", rec.len()),
            ));
        }
        for field in &rec {
            let v: f64 = field
                .parse()
                .map_err(|_| data_err(name, line, format!("'{field}' is not a number")))?;
            if !v.is_finite() {
                return Err(data_err(name, line, format!("non-finite value '{field}'")));
            }
            data.push(v);
        }
        rows += 1;
    }
    if rows != n {
        return Err(data_err(
            name,
            1,
            format!("header declares {n} rows, found {rows}"),
        ));
    }
    Matrix::from_row_major(n, d, data)
}

/// Writes a permutation, one 0-based index per line under a `sigma` header.
pub fn write_sigma<W: Write>(out: W, sigma: &[usize]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["sigma"]).map_err(csv_err)?;
    for s in sigma {
        w.write_record([s.to_string()]).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a permutation written by [`write_sigma`].
pub fn read_sigma<R: Read>(input: R, name: &str) -> Result<Vec<usize>> {
    let mut r = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(input);
    let header = r.headers().map_err(csv_err)?;
    if header.len() != 1 || header.get(0) != Some("sigma") {
        return Err(data_err(name, 1, "header must be 'sigma'"));
    }
    r.records()
        .map(|rec| {
            let rec = rec.map_err(csv_err)?;
            let line = rec.position().map_or(0, csv::Position::line);
            rec.get(0)
                .and_then(|f| f.parse().ok())
                .ok_or_else(|| data_err(name, line, "expected a non-negative integer"))
        })
        .collect()
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(String::new, |x| x.to_string())
}

/// Writes risk rows. Failed rows keep their grid coordinates and leave the
/// numeric fields empty.
pub fn write_risk_csv<W: Write>(out: W, rows: &[SweepRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(RISK_COLUMNS).map_err(csv_err)?;
    for row in rows {
        let mut rec = vec![
            row.model_kind.clone(),
            opt(row.param),
            row.n.to_string(),
            row.d.to_string(),
            row.detector.to_string(),
        ];
        match &row.outcome {
            Ok(r) => rec.extend([
                r.threshold.to_string(),
                r.fpr.to_string(),
                r.fnr.to_string(),
                r.risk.to_string(),
                r.stderr.to_string(),
                r.trials.to_string(),
                r.seed.to_string(),
            ]),
            Err(_) => rec.extend(std::iter::repeat_n(String::new(), 7)),
        }
        w.write_record(&rec).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}
