use std::io::{Read, Write};
use std::path::Path;

use log::warn;

use super::{CategoricalEncoder, ColumnData, ColumnKind, Schema, Table, TARGET};
use crate::error::{Error, Result};

/// Loads a headed CSV file. Header names must match the schema as a set;
/// column order in the file is free.
pub fn load_csv(path: impl AsRef<Path>, schema: &Schema) -> Result<Table> {
    let file = std::fs::File::open(path)?;
    read_csv(std::io::BufReader::new(file), schema)
}

/// Loads a CSV whose schema is inferred from its header
/// (see [`Schema::infer`]), with `winPlacePerc` as target.
pub fn load_csv_inferred(path: impl AsRef<Path>) -> Result<Table> {
    let file = std::fs::File::open(path.as_ref())?;
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(file);
    let header: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
    let schema = Schema::infer(header.iter().map(String::as_str), TARGET)?;
    load_csv(path, &schema)
}

/// Like [`load_csv_inferred`], but accepts files without a `winPlacePerc`
/// column (as in a held-out test file); the label is then filled with zeros.
/// Returns whether the file carried labels.
pub fn load_csv_unlabelled(path: impl AsRef<Path>) -> Result<(Table, bool)> {
    let file = std::fs::File::open(path.as_ref())?;
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(file);
    let header = rdr.headers()?.clone();
    if header.iter().any(|h| h == TARGET) {
        return Ok((load_csv_inferred(path)?, true));
    }
    let mut buf = Vec::new();
    {
        let mut w = csv::Writer::from_writer(&mut buf);
        w.write_record(header.iter().chain([TARGET]))?;
        for rec in rdr.records() {
            let rec = rec?;
            w.write_record(rec.iter().chain(["0"]))?;
        }
        w.flush()?;
    }
    let names: Vec<&str> = header.iter().chain([TARGET]).collect();
    let schema = Schema::infer(names, TARGET)?;
    Ok((read_csv(buf.as_slice(), &schema)?, false))
}

enum Builder {
    Numeric(Vec<f64>),
    Categorical(CategoricalEncoder),
}

pub fn read_csv<R: Read>(reader: R, schema: &Schema) -> Result<Table> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
    let header = rdr.headers()?.clone();

    // schema column i -> csv field position
    let mut field_of = Vec::with_capacity(schema.len());
    for spec in schema.columns() {
        let hits: Vec<usize> = header
            .iter()
            .enumerate()
            .filter(|(_, h)| *h == spec.name)
            .map(|(i, _)| i)
            .collect();
        match hits.as_slice() {
            [] => return Err(Error::schema(format!("missing column `{}`", spec.name))),
            [i] => field_of.push(*i),
            _ => return Err(Error::schema(format!("column `{}` appears twice", spec.name))),
        }
    }
    if let Some(extra) = header.iter().find(|h| schema.position(h).is_none()) {
        return Err(Error::schema(format!("unexpected column `{extra}`")));
    }

    let target_pos = schema.position(schema.target()).expect("validated schema");
    let mut builders: Vec<Builder> = schema
        .columns()
        .iter()
        .map(|s| match s.kind {
            ColumnKind::Numeric => Builder::Numeric(Vec::new()),
            _ => Builder::Categorical(CategoricalEncoder::default()),
        })
        .collect();

    let mut record = csv::StringRecord::new();
    let mut row = 0usize;
    let mut cells = vec![0.0f64; schema.len()];
    while rdr.read_record(&mut record)? {
        row += 1;
        let target_cell = record.get(field_of[target_pos]).unwrap_or("").trim();
        match parse_real(target_cell) {
            Some(_) => {}
            None => {
                warn!("row {row}: unusable label `{target_cell}`, dropping row");
                continue;
            }
        }
        for (i, spec) in schema.columns().iter().enumerate() {
            if spec.kind == ColumnKind::Numeric {
                let cell = record.get(field_of[i]).unwrap_or("").trim();
                cells[i] = parse_real(cell).ok_or_else(|| Error::Parse {
                    row,
                    column: spec.name.clone(),
                    message: if cell.is_empty() {
                        "empty numeric cell".into()
                    } else {
                        format!("`{cell}` is not a finite number")
                    },
                })?;
            }
        }
        for (i, b) in builders.iter_mut().enumerate() {
            match b {
                Builder::Numeric(v) => v.push(cells[i]),
                Builder::Categorical(enc) => enc.push(record.get(field_of[i]).unwrap_or("")),
            }
        }
    }

    let columns = builders
        .into_iter()
        .map(|b| match b {
            Builder::Numeric(v) => ColumnData::Numeric(v),
            Builder::Categorical(enc) => ColumnData::Categorical(enc.finish()),
        })
        .collect();
    Table::new(schema.clone(), columns)
}

fn parse_real(cell: &str) -> Option<f64> {
    cell.parse::<f64>().ok().filter(|v| v.is_finite())
}

/// Writes the table with a header in schema order. Numbers use the shortest
/// representation that parses back to the same `f64`.
pub fn write_csv<W: Write>(table: &Table, writer: W) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(writer);
    wtr.write_record(table.schema().names())?;
    let mut buf: Vec<String> = vec![String::new(); table.n_columns()];
    for r in 0..table.n_rows() {
        for (i, cell) in buf.iter_mut().enumerate() {
            cell.clear();
            match table.column_at(i) {
                ColumnData::Numeric(v) => {
                    use std::fmt::Write as _;
                    write!(cell, "{}", v[r]).expect("write to string");
                }
                ColumnData::Categorical(c) => cell.push_str(c.value(r)),
            }
        }
        wtr.write_record(&buf)?;
    }
    wtr.flush()?;
    Ok(())
}
