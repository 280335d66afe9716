use std::io::{Read, Write};
use std::path::Path;
use std::str::FromStr;

use infoflow_core::TimeSeriesData;
use nalgebra::DMatrix;

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Layout {
    #[default]
    RowsAreSamples,
    RowsAreChannels,
}

impl FromStr for Layout {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rows_are_samples" => Ok(Layout::RowsAreSamples),
            "rows_are_channels" => Ok(Layout::RowsAreChannels),
            other => Err(CliError::Config(format!(
                "unknown layout '{other}' (expected rows_are_samples or rows_are_channels)"
            ))),
        }
    }
}

fn is_header(record: &csv::StringRecord) -> bool {
    record.iter().all(|f| f.parse::<f64>().is_err())
}

/// Reads a numeric CSV table. A first row with no numeric field is taken as a header.
///
/// Error locations are `line:column` in the file, both 1-based.
pub fn read_timeseries<R: Read>(reader: R, layout: Layout, origin: &str) -> Result<TimeSeriesData> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let mut width: Option<usize> = None;
    let mut table: Vec<f64> = Vec::new();
    let mut n_rows = 0usize;
    let mut first = true;
    for record in rdr.records() {
        let record = record.map_err(|e| {
            let location = e.position().map(|p| format!("{}:1", p.line())).unwrap_or_else(|| "?".into());
            CliError::Parse { origin: origin.to_string(), location, message: e.to_string() }
        })?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        if first {
            first = false;
            if is_header(&record) {
                width = Some(record.len());
                continue;
            }
        }
        let w = *width.get_or_insert(record.len());
        if record.len() != w {
            return Err(CliError::Parse {
                origin: origin.to_string(),
                location: format!("{line}:{}", record.len().min(w) + 1),
                message: format!("ragged row on line {line}: expected {w} fields, found {}", record.len()),
            });
        }
        for (c, field) in record.iter().enumerate() {
            let location = format!("{line}:{}", c + 1);
            let v: f64 = field.parse().map_err(|_| CliError::Parse {
                origin: origin.to_string(),
                location: location.clone(),
                message: format!("'{field}' is not a number"),
            })?;
            if !v.is_finite() {
                return Err(CliError::Data {
                    origin: origin.to_string(),
                    location,
                    message: format!("non-finite value '{field}'"),
                });
            }
            table.push(v);
        }
        n_rows += 1;
    }
    let w = width.unwrap_or(0);
    if n_rows == 0 || w == 0 {
        return Err(CliError::Parse {
            origin: origin.to_string(),
            location: "1:1".into(),
            message: "no data rows".into(),
        });
    }
    let as_read = DMatrix::from_row_slice(n_rows, w, &table);
    let values = match layout {
        Layout::RowsAreSamples => as_read,
        Layout::RowsAreChannels => as_read.transpose(),
    };
    Ok(TimeSeriesData::new(values, None)?)
}

pub fn load_timeseries(path: &Path, layout: Layout) -> Result<TimeSeriesData> {
    let file = std::fs::File::open(path).map_err(|e| CliError::io(path.display(), e))?;
    read_timeseries(file, layout, &path.display().to_string())
}

/// Rows are samples, with an `x1,x2,...` header.
pub fn write_timeseries<W: Write>(writer: W, data: &TimeSeriesData) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(writer);
    let io = |e: csv::Error| CliError::io("csv output", e);
    wtr.write_record((1..=data.channels()).map(|c| format!("x{c}"))).map_err(io)?;
    let v = data.values();
    for r in 0..data.n_samples() {
        wtr.write_record(v.row(r).iter().map(|x| x.to_string())).map_err(io)?;
    }
    wtr.flush().map_err(|e| CliError::io("csv output", e))?;
    Ok(())
}

pub fn save_timeseries(path: &Path, data: &TimeSeriesData) -> Result<()> {
    let mut buf = Vec::new();
    write_timeseries(&mut buf, data)?;
    crate::write_file(path, &buf)
}
