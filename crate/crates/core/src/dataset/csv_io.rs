use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use chrono::{DateTime, NaiveDate, Utc};

use super::key::CoinKey;
use super::snapshot::{CoinSnapshot, Field};
use super::store::Dataset;
use crate::error::{Error, Result};

/// Header names for each CSV column.
///
/// The default matches the canonical export:
/// `name,symbol,date,price,max_supply,total_supply,circulating_supply,volume_24h,market_cap,num_market_pairs`
/// followed optionally by the four extended columns.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvSchema {
    pub name: String,
    pub symbol: String,
    pub date: String,
    pub fields: Vec<(Field, String)>,
}

impl Default for CsvSchema {
    fn default() -> Self {
        Self {
            name: "name".into(),
            symbol: "symbol".into(),
            date: "date".into(),
            fields: Field::BASE
                .iter()
                .chain(Field::EXTENDED.iter())
                .map(|&f| (f, f.name().to_string()))
                .collect(),
        }
    }
}

struct Layout {
    name: usize,
    symbol: usize,
    date: usize,
    fields: Vec<(Field, usize)>,
    extended: bool,
}

impl CsvSchema {
    fn layout(&self, header: &csv::StringRecord) -> Result<Layout> {
        let find = |col: &str| header.iter().position(|h| h.trim() == col);
        let require = |col: &str| {
            find(col).ok_or_else(|| Error::Header(format!("missing required column `{col}`")))
        };
        let mut fields = Vec::new();
        let mut extended = false;
        for (field, col) in &self.fields {
            match find(col) {
                Some(i) => {
                    extended |= field.is_extended();
                    fields.push((*field, i));
                }
                None if field.is_extended() => {}
                None => return Err(Error::Header(format!("missing required column `{col}`"))),
            }
        }
        Ok(Layout {
            name: require(&self.name)?,
            symbol: require(&self.symbol)?,
            date: require(&self.date)?,
            fields,
            extended,
        })
    }
}

/// Parses a day. Intraday timestamps are converted to UTC and truncated.
pub fn parse_day(text: &str) -> Option<NaiveDate> {
    let text = text.trim();
    if let Ok(d) = NaiveDate::parse_from_str(text, "%Y-%m-%d") {
        return Some(d);
    }
    if let Ok(dt) = DateTime::parse_from_rfc3339(text) {
        return Some(dt.with_timezone(&Utc).date_naive());
    }
    let prefix = text.get(..10)?;
    match text.as_bytes().get(10) {
        Some(b'T') | Some(b' ') => NaiveDate::parse_from_str(prefix, "%Y-%m-%d").ok(),
        _ => None,
    }
}

fn parse_value(cell: &str, column: &str, row: u64) -> Result<Option<f64>> {
    let cell = cell.trim();
    if cell.is_empty() {
        return Ok(None);
    }
    let v: f64 = cell.parse().map_err(|_| Error::MalformedRow {
        row,
        message: format!("column `{column}`: `{cell}` is not a number"),
    })?;
    if !v.is_finite() || v < 0.0 {
        return Err(Error::MalformedRow {
            row,
            message: format!("column `{column}`: value {cell} must be finite and nonnegative"),
        });
    }
    Ok(Some(v))
}

/// Reads a dataset from any CSV source.
pub fn read_csv<R: Read>(reader: R, schema: &CsvSchema) -> Result<Dataset> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(false)
        .from_reader(reader);
    let header = rdr.headers()?.clone();
    let layout = schema.layout(&header)?;
    let mut snapshots = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(|e| {
            let row = e.position().map(|p| p.line()).unwrap_or(0);
            Error::MalformedRow {
                row,
                message: e.to_string(),
            }
        })?;
        let row = record.position().map(|p| p.line()).unwrap_or(0);
        let key = CoinKey::new(&record[layout.name], &record[layout.symbol]).map_err(|e| {
            Error::MalformedRow {
                row,
                message: e.to_string(),
            }
        })?;
        let date = parse_day(&record[layout.date]).ok_or_else(|| Error::MalformedRow {
            row,
            message: format!("bad date `{}`", &record[layout.date]),
        })?;
        let mut snap = CoinSnapshot::empty(key, date);
        for &(field, idx) in &layout.fields {
            snap.set(field, parse_value(&record[idx], field.name(), row)?);
        }
        snapshots.push(snap);
    }
    Dataset::from_snapshots(snapshots, layout.extended)
}

pub fn load_csv(path: impl AsRef<Path>, schema: &CsvSchema) -> Result<Dataset> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_csv(file, schema)
}

fn fmt_value(v: Option<f64>) -> String {
    // `Display` for f64 prints the shortest text that parses back to the same bits.
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Writes the canonical CSV layout. Extended columns are written when the
/// dataset carries them.
pub fn write_csv<W: Write>(dataset: &Dataset, writer: W) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(writer);
    let mut fields: Vec<Field> = Field::BASE.to_vec();
    if dataset.has_extended_columns() {
        fields.extend(Field::EXTENDED);
    }
    let mut header = vec!["name", "symbol", "date"];
    header.extend(fields.iter().map(|f| f.name()));
    wtr.write_record(&header)?;
    for s in dataset.rows() {
        let mut rec = vec![
            s.key.name().to_string(),
            s.key.symbol().to_string(),
            s.date.format("%Y-%m-%d").to_string(),
        ];
        rec.extend(fields.iter().map(|&f| fmt_value(s.get(f))));
        wtr.write_record(&rec)?;
    }
    wtr.flush().map_err(|e| Error::io("<csv writer>", e))?;
    Ok(())
}

pub fn save_csv(dataset: &Dataset, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    write_csv(dataset, std::io::BufWriter::new(file))
}

pub fn to_csv_string(dataset: &Dataset) -> Result<String> {
    let mut buf = Vec::new();
    write_csv(dataset, &mut buf)?;
    Ok(String::from_utf8(buf).expect("csv output is utf-8"))
}
