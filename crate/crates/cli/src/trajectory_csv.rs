//! Trajectory files: header `t,u,v,J`, one row per node, every value in
//! 17-significant-digit scientific notation so that it parses back to the
//! same double.

use std::io::{Read, Write};

use ehp_duffing::{DuffingSystem, PhasePoint, Trajectory};

/// Column names, in order.
pub const HEADER: [&str; 4] = ["t", "u", "v", "J"];

/// One output row. `j` is absent for the reference integrator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Row {
    pub t: f64,
    pub u: f64,
    pub v: f64,
    pub j: Option<f64>,
}

/// Errors from reading a trajectory file.
#[derive(Debug, thiserror::Error)]
pub enum CsvError {
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error("unexpected header {0:?}")]
    Header(Vec<String>),
    #[error("line {line}: {why}")]
    Field { line: u64, why: String },
}

/// Formats a value with 17 significant digits.
pub fn format_value(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn ehp_rows(system: &DuffingSystem, trajectory: &Trajectory) -> Vec<Row> {
    trajectory
        .states
        .iter()
        .map(|s| Row {
            t: s.t,
            u: s.u,
            v: s.velocity(system),
            j: Some(s.j),
        })
        .collect()
}

pub fn reference_rows(points: &[PhasePoint]) -> Vec<Row> {
    points
        .iter()
        .map(|p| Row {
            t: p.t,
            u: p.u,
            v: p.v,
            j: None,
        })
        .collect()
}

pub fn write_rows<W: Write>(out: W, rows: &[Row]) -> csv::Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    w.write_record(HEADER)?;
    for r in rows {
        let j = r.j.map(format_value).unwrap_or_default();
        w.write_record([format_value(r.t), format_value(r.u), format_value(r.v), j])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_rows<R: Read>(input: R) -> Result<Vec<Row>, CsvError> {
    let mut rd = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(input);
    let header: Vec<String> = rd.headers()?.iter().map(str::to_string).collect();
    if header != HEADER {
        return Err(CsvError::Header(header));
    }
    let mut rows = Vec::new();
    for rec in rd.records() {
        let rec = rec?;
        let line = rec.position().map_or(0, |p| p.line());
        let num = |i: usize| -> Result<f64, CsvError> {
            let field = rec.get(i).unwrap_or_default();
            field.parse().map_err(|_| CsvError::Field {
                line,
                why: format!("'{field}' is not a number"),
            })
        };
        let j = match rec.get(3) {
            Some("") | None => None,
            Some(_) => Some(num(3)?),
        };
        rows.push(Row {
            t: num(0)?,
            u: num(1)?,
            v: num(2)?,
            j,
        });
    }
    Ok(rows)
}
