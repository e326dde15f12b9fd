//! CSV tables: counts files, series files and generic report output.

use std::fs::File;
use std::io::{self, Read, Write};
use std::path::Path;

use fiberpair_core::{CountRecord, SeriesPoint};

use crate::error::{CliError, Result};

pub const COUNTS_HEADER: [&str; 5] = ["pulse_count", "n_s", "n_i", "n_co", "n_ac"];

/// One row of a counts file.
#[derive(Debug, Clone, PartialEq)]
pub struct CountsRow {
    pub label: Option<String>,
    pub pulse_count: u64,
    pub counts: CountRecord,
}

/// Column-ordered table of already-formatted cells.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Self { header: header.into_iter().map(Into::into).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn write_to<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.header)?;
        for row in &self.rows {
            w.write_record(row)?;
        }
        w.flush()?;
        Ok(())
    }

    /// Writes to `path`, or standard output when `path` is `None`.
    pub fn emit(&self, path: Option<&Path>) -> Result<()> {
        match path {
            Some(p) => {
                let file = File::create(p).map_err(|e| CliError::Io(format!("{}: {e}", p.display())))?;
                self.write_to(file)
            }
            None => self.write_to(io::stdout().lock()),
        }
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| h == name)
    }
}

/// Shortest round-trip decimal representation; `None` becomes an empty cell.
pub fn cell(value: Option<f64>) -> String {
    value.map(|v| format!("{v}")).unwrap_or_default()
}

fn open(path: &Path) -> Result<Box<dyn Read>> {
    let file = File::open(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    Ok(Box::new(file))
}

pub fn read_counts(path: &Path) -> Result<Vec<CountsRow>> {
    parse_counts(open(path)?)
}

pub fn parse_counts<R: Read>(input: R) -> Result<Vec<CountsRow>> {
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(input);
    let header: Vec<String> = reader.headers()?.iter().map(str::to_owned).collect();
    let labelled = matches!(header.first().map(String::as_str), Some("label"));
    let body = if labelled { &header[1..] } else { &header[..] };
    if body != COUNTS_HEADER {
        return Err(CliError::validation(format!(
            "counts CSV header must be `{}` (optionally preceded by `label`), found `{}`",
            COUNTS_HEADER.join(","),
            header.join(",")
        )));
    }

    let mut rows = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let row_no = i + 1;
        let record = record.map_err(|e| CliError::validation(format!("counts CSV row {row_no}: {e}")))?;
        let offset = labelled as usize;
        let text = |col: usize| record.get(col + offset).unwrap_or("").trim();
        let pulse_count = text(0).parse::<u64>().map_err(|_| {
            CliError::validation(format!("counts CSV row {row_no}, column pulse_count: not an integer: {:?}", text(0)))
        })?;
        let mut values = [0.0; 4];
        for (k, v) in values.iter_mut().enumerate() {
            let raw = text(k + 1);
            *v = raw.parse::<f64>().ok().filter(|x| x.is_finite()).ok_or_else(|| {
                CliError::validation(format!(
                    "counts CSV row {row_no}, column {}: not a number: {raw:?}",
                    COUNTS_HEADER[k + 1]
                ))
            })?;
        }
        rows.push(CountsRow {
            label: labelled.then(|| record.get(0).unwrap_or("").to_owned()),
            pulse_count,
            counts: CountRecord { n_s: values[0], n_i: values[1], n_co: values[2], n_ac: values[3] },
        });
    }
    if rows.is_empty() {
        return Err(CliError::validation("counts CSV: no data rows"));
    }
    Ok(rows)
}

pub fn counts_table(rows: &[CountsRow]) -> Table {
    let labelled = rows.iter().any(|r| r.label.is_some());
    let mut header: Vec<&str> = Vec::new();
    if labelled {
        header.push("label");
    }
    header.extend(COUNTS_HEADER);
    let mut table = Table::new(header);
    for r in rows {
        let mut row = Vec::new();
        if labelled {
            row.push(r.label.clone().unwrap_or_default());
        }
        row.push(r.pulse_count.to_string());
        row.extend([r.counts.n_s, r.counts.n_i, r.counts.n_co, r.counts.n_ac].map(|v| cell(Some(v))));
        table.push(row);
    }
    table
}

/// Column selection for reading a series out of any CSV.
#[derive(Debug, Clone)]
pub struct SeriesColumns {
    pub x: String,
    pub y: String,
    pub weight: Option<String>,
}

impl Default for SeriesColumns {
    fn default() -> Self {
        Self { x: "x".into(), y: "y".into(), weight: None }
    }
}

pub fn read_series(path: &Path, cols: &SeriesColumns) -> Result<Vec<SeriesPoint>> {
    parse_series(open(path)?, cols)
}

/// Reads `x`, `y` and optional weight columns. Rows whose x or y cell is empty
/// are skipped, so report files with undefined entries can be fitted directly.
pub fn parse_series<R: Read>(input: R, cols: &SeriesColumns) -> Result<Vec<SeriesPoint>> {
    let mut reader = csv::Reader::from_reader(input);
    let header = reader.headers()?.clone();
    let find = |name: &str| {
        header
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| CliError::validation(format!("series CSV has no column {name:?}")))
    };
    let xi = find(&cols.x)?;
    let yi = find(&cols.y)?;
    let wi = match &cols.weight {
        Some(w) => Some(find(w)?),
        None => header.iter().position(|h| h == "weight").filter(|_| cols.x == "x" && cols.y == "y"),
    };
    let mut points = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let row_no = i + 1;
        let record = record.map_err(|e| CliError::validation(format!("series CSV row {row_no}: {e}")))?;
        let get = |col: usize, name: &str| -> Result<Option<f64>> {
            let raw = record.get(col).unwrap_or("").trim();
            if raw.is_empty() {
                return Ok(None);
            }
            raw.parse::<f64>().map(Some).map_err(|_| {
                CliError::validation(format!("series CSV row {row_no}, column {name}: not a number: {raw:?}"))
            })
        };
        let (Some(x), Some(y)) = (get(xi, &cols.x)?, get(yi, &cols.y)?) else { continue };
        let weight = match wi {
            Some(c) => get(c, "weight")?.unwrap_or(1.0),
            None => 1.0,
        };
        points.push(SeriesPoint::weighted(x, y, weight));
    }
    if points.is_empty() {
        return Err(CliError::validation("series CSV: no data rows"));
    }
    Ok(points)
}
