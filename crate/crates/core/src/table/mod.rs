//! Typed column store for player-level match statistics.

mod clean;
mod csv_io;
mod schema;
mod summary;

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::matrix::FeatureMatrix;
use crate::scalar::Real;

pub use clean::{clean, CleanRules};
pub use csv_io::{load_csv, load_csv_inferred, load_csv_unlabelled, read_csv, write_csv};
pub use schema::{ColumnKind, ColumnSpec, Schema, IDENTIFIERS, MATCH_TYPE, PUBG_COLUMNS, TARGET};
pub use summary::{summarize, CategoricalSummary, MatchTypeFractions, NumericSummary, SummaryStats};

/// Dictionary-encoded string column. Codes index into `dictionary`, which
/// lists values in first-occurrence order.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Categorical {
    codes: Vec<u32>,
    dictionary: Vec<String>,
}

impl Categorical {
    pub fn from_values<S: AsRef<str>>(values: impl IntoIterator<Item = S>) -> Self {
        let mut enc = CategoricalEncoder::default();
        for v in values {
            enc.push(v.as_ref());
        }
        enc.finish()
    }

    pub fn codes(&self) -> &[u32] {
        &self.codes
    }

    pub fn dictionary(&self) -> &[String] {
        &self.dictionary
    }

    pub fn value(&self, row: usize) -> &str {
        &self.dictionary[self.codes[row] as usize]
    }

    pub fn len(&self) -> usize {
        self.codes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.codes.is_empty()
    }

    /// Keeps `rows` (in order) and re-codes by first occurrence among them.
    fn take(&self, rows: impl Iterator<Item = usize>) -> Self {
        let mut remap: Vec<Option<u32>> = vec![None; self.dictionary.len()];
        let mut out = Categorical::default();
        for r in rows {
            let old = self.codes[r] as usize;
            let code = *remap[old].get_or_insert_with(|| {
                out.dictionary.push(self.dictionary[old].clone());
                (out.dictionary.len() - 1) as u32
            });
            out.codes.push(code);
        }
        out
    }
}

#[derive(Default)]
pub(crate) struct CategoricalEncoder {
    index: HashMap<String, u32>,
    column: Categorical,
}

impl CategoricalEncoder {
    pub(crate) fn push(&mut self, value: &str) {
        let code = match self.index.get(value) {
            Some(&c) => c,
            None => {
                let c = self.column.dictionary.len() as u32;
                self.column.dictionary.push(value.to_string());
                self.index.insert(value.to_string(), c);
                c
            }
        };
        self.column.codes.push(code);
    }

    pub(crate) fn finish(self) -> Categorical {
        self.column
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ColumnData {
    Numeric(Vec<f64>),
    Categorical(Categorical),
}

impl ColumnData {
    pub fn len(&self) -> usize {
        match self {
            ColumnData::Numeric(v) => v.len(),
            ColumnData::Categorical(c) => c.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn take(&self, rows: &[usize]) -> Self {
        match self {
            ColumnData::Numeric(v) => ColumnData::Numeric(rows.iter().map(|&r| v[r]).collect()),
            ColumnData::Categorical(c) => ColumnData::Categorical(c.take(rows.iter().copied())),
        }
    }
}

/// Immutable, column-major table. Identifier and categorical columns are
/// dictionary encoded; numeric columns are `f64`.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    schema: Schema,
    columns: Vec<ColumnData>,
    n_rows: usize,
}

impl Table {
    pub fn new(schema: Schema, columns: Vec<ColumnData>) -> Result<Self> {
        if schema.len() != columns.len() {
            return Err(Error::schema(format!(
                "schema has {} columns, data has {}",
                schema.len(),
                columns.len()
            )));
        }
        let n_rows = columns.first().map_or(0, ColumnData::len);
        for (spec, data) in schema.columns().iter().zip(&columns) {
            let ok = matches!(
                (spec.kind, data),
                (ColumnKind::Numeric, ColumnData::Numeric(_))
                    | (ColumnKind::Categorical | ColumnKind::Identifier, ColumnData::Categorical(_))
            );
            if !ok {
                return Err(Error::schema(format!("column `{}` has the wrong storage kind", spec.name)));
            }
            if data.len() != n_rows {
                return Err(Error::schema(format!(
                    "column `{}` has {} rows, expected {n_rows}",
                    spec.name,
                    data.len()
                )));
            }
            if let ColumnData::Categorical(c) = data {
                if c.codes.iter().any(|&k| k as usize >= c.dictionary.len()) {
                    return Err(Error::schema(format!("column `{}` has an out-of-range code", spec.name)));
                }
            }
        }
        let table = Self { schema, columns, n_rows };
        if let Ok(y) = table.numeric(TARGET) {
            if let Some(r) = y.iter().position(|v| !(0.0..=1.0).contains(v)) {
                return Err(Error::Parse {
                    row: r + 1,
                    column: TARGET.into(),
                    message: format!("label {} outside [0, 1]", y[r]),
                });
            }
        }
        Ok(table)
    }

    /// Convenience constructor for numeric-only tables.
    pub fn from_numeric(columns: Vec<(&str, Vec<f64>)>, target: &str) -> Result<Self> {
        let specs = columns
            .iter()
            .map(|(n, _)| ColumnSpec::new(*n, ColumnKind::Numeric))
            .collect();
        let schema = Schema::new(specs, target)?;
        Self::new(schema, columns.into_iter().map(|(_, v)| ColumnData::Numeric(v)).collect())
    }

    pub fn schema(&self) -> &Schema {
        &self.schema
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_columns(&self) -> usize {
        self.columns.len()
    }

    pub fn column_names(&self) -> Vec<String> {
        self.schema.names().map(str::to_string).collect()
    }

    pub fn has_column(&self, name: &str) -> bool {
        self.schema.position(name).is_some()
    }

    pub fn column(&self, name: &str) -> Result<&ColumnData> {
        self.schema
            .position(name)
            .map(|i| &self.columns[i])
            .ok_or_else(|| Error::schema(format!("missing column `{name}`")))
    }

    pub fn column_at(&self, i: usize) -> &ColumnData {
        &self.columns[i]
    }

    pub fn numeric(&self, name: &str) -> Result<&[f64]> {
        match self.column(name)? {
            ColumnData::Numeric(v) => Ok(v),
            ColumnData::Categorical(_) => Err(Error::schema(format!("column `{name}` is not numeric"))),
        }
    }

    pub fn categorical(&self, name: &str) -> Result<&Categorical> {
        match self.column(name)? {
            ColumnData::Categorical(c) => Ok(c),
            ColumnData::Numeric(_) => Err(Error::schema(format!("column `{name}` is not categorical"))),
        }
    }

    pub fn target(&self) -> &[f64] {
        self.numeric(self.schema.target()).expect("schema guarantees a numeric target")
    }

    pub fn feature_names(&self) -> Vec<String> {
        self.schema.feature_names()
    }

    /// Numeric view of `names`; categorical columns contribute their codes.
    pub fn feature_matrix<T: Real>(&self, names: &[String]) -> Result<FeatureMatrix<T>> {
        let columns = names
            .iter()
            .map(|n| {
                Ok(match self.column(n)? {
                    ColumnData::Numeric(v) => v.iter().map(|&x| T::lit(x)).collect(),
                    ColumnData::Categorical(c) => {
                        c.codes.iter().map(|&k| T::from_count(k as usize)).collect()
                    }
                })
            })
            .collect::<Result<Vec<Vec<T>>>>()?;
        let fm = FeatureMatrix::new(names.to_vec(), columns)?;
        if fm.n_rows() != self.n_rows && !names.is_empty() {
            return Err(Error::schema("row count mismatch"));
        }
        Ok(fm)
    }

    /// Dictionaries of every non-identifier categorical column; models store
    /// these so prediction-time strings map to training-time codes.
    pub fn category_dictionaries(&self) -> Vec<(String, Vec<String>)> {
        self.schema
            .columns()
            .iter()
            .zip(&self.columns)
            .filter_map(|(spec, data)| match (spec.kind, data) {
                (ColumnKind::Categorical, ColumnData::Categorical(c)) => {
                    Some((spec.name.clone(), c.dictionary.clone()))
                }
                _ => None,
            })
            .collect()
    }

    /// Appends numeric columns; existing names are rejected.
    pub fn with_numeric_columns(&self, new: Vec<(String, Vec<f64>)>) -> Result<Self> {
        let mut specs = self.schema.columns().to_vec();
        let mut columns = self.columns.clone();
        for (name, data) in new {
            if specs.iter().any(|s| s.name == name) {
                return Err(Error::schema(format!("column `{name}` already exists")));
            }
            specs.push(ColumnSpec::new(name, ColumnKind::Numeric));
            columns.push(ColumnData::Numeric(data));
        }
        Self::new(Schema::new(specs, self.schema.target())?, columns)
    }

    /// Keeps the columns for which `keep` is true, in schema order.
    pub fn retain_columns(&self, mut keep: impl FnMut(&ColumnSpec) -> bool) -> Result<Self> {
        let (specs, columns): (Vec<_>, Vec<_>) = self
            .schema
            .columns()
            .iter()
            .zip(&self.columns)
            .filter(|(s, _)| keep(s))
            .map(|(s, c)| (s.clone(), c.clone()))
            .unzip();
        Self::new(Schema::new(specs, self.schema.target())?, columns)
    }

    /// Replaces a column (same name) with new numeric columns at its position.
    pub(crate) fn replace_with_numeric(&self, name: &str, new: Vec<(String, Vec<f64>)>) -> Result<Self> {
        let pos = self
            .schema
            .position(name)
            .ok_or_else(|| Error::schema(format!("missing column `{name}`")))?;
        let mut specs = Vec::with_capacity(self.schema.len() + new.len());
        let mut columns = Vec::with_capacity(specs.capacity());
        for (i, (s, c)) in self.schema.columns().iter().zip(&self.columns).enumerate() {
            if i == pos {
                for (n, data) in &new {
                    specs.push(ColumnSpec::new(n.clone(), ColumnKind::Numeric));
                    columns.push(ColumnData::Numeric(data.clone()));
                }
            } else {
                specs.push(s.clone());
                columns.push(c.clone());
            }
        }
        Self::new(Schema::new(specs, self.schema.target())?, columns)
    }

    /// Rows at `idx`, in that order. Categorical dictionaries are re-coded by
    /// first occurrence so the result is canonical.
    pub fn take_rows(&self, idx: &[usize]) -> Self {
        Self {
            schema: self.schema.clone(),
            columns: self.columns.iter().map(|c| c.take(idx)).collect(),
            n_rows: idx.len(),
        }
    }

    pub fn filter_rows(&self, keep: &[bool]) -> Self {
        let idx: Vec<usize> = keep
            .iter()
            .enumerate()
            .filter_map(|(i, &k)| k.then_some(i))
            .collect();
        self.take_rows(&idx)
    }
}
