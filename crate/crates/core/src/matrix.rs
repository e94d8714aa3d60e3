use crate::error::{Error, Result};
use crate::scalar::Real;

/// Column-major feature matrix with named columns.
///
/// Every learner consumes this layout: split search and correlation scans
/// walk one contiguous column at a time.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix<T> {
    names: Vec<String>,
    columns: Vec<Vec<T>>,
    n_rows: usize,
}

impl<T: Real> FeatureMatrix<T> {
    pub fn new(names: Vec<String>, columns: Vec<Vec<T>>) -> Result<Self> {
        if names.len() != columns.len() {
            return Err(Error::schema(format!(
                "{} names for {} columns",
                names.len(),
                columns.len()
            )));
        }
        let n_rows = columns.first().map_or(0, Vec::len);
        if let Some((i, _)) = columns.iter().enumerate().find(|(_, c)| c.len() != n_rows) {
            return Err(Error::schema(format!(
                "column `{}` has {} rows, expected {n_rows}",
                names[i],
                columns[i].len()
            )));
        }
        for (i, name) in names.iter().enumerate() {
            if names[..i].contains(name) {
                return Err(Error::schema(format!("duplicate column `{name}`")));
            }
        }
        Ok(Self { names, columns, n_rows })
    }

    /// Builds a matrix from row-major data with generated names `x0, x1, ...`.
    pub fn from_rows(rows: &[Vec<T>]) -> Result<Self> {
        let m = rows.first().map_or(0, Vec::len);
        let mut columns = vec![Vec::with_capacity(rows.len()); m];
        for (r, row) in rows.iter().enumerate() {
            if row.len() != m {
                return Err(Error::schema(format!("row {r} has {} values, expected {m}", row.len())));
            }
            for (c, &v) in row.iter().enumerate() {
                columns[c].push(v);
            }
        }
        let names = (0..m).map(|i| format!("x{i}")).collect();
        let mut fm = Self::new(names, columns)?;
        fm.n_rows = rows.len();
        Ok(fm)
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_features(&self) -> usize {
        self.columns.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn column(&self, j: usize) -> &[T] {
        &self.columns[j]
    }

    pub fn columns(&self) -> &[Vec<T>] {
        &self.columns
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> T {
        self.columns[col][row]
    }

    pub fn row(&self, i: usize) -> Vec<T> {
        self.columns.iter().map(|c| c[i]).collect()
    }

    /// Rows `idx` in the given order.
    pub fn select_rows(&self, idx: &[usize]) -> Self {
        let columns = self
            .columns
            .iter()
            .map(|c| idx.iter().map(|&i| c[i]).collect())
            .collect();
        Self { names: self.names.clone(), columns, n_rows: idx.len() }
    }

    /// Column subset by index, in the given order.
    pub fn select_columns(&self, cols: &[usize]) -> Self {
        Self {
            names: cols.iter().map(|&j| self.names[j].clone()).collect(),
            columns: cols.iter().map(|&j| self.columns[j].clone()).collect(),
            n_rows: self.n_rows,
        }
    }

    /// Reorders the columns of `self` to match `names`; missing names are a schema error.
    pub fn align_to(&self, names: &[String]) -> Result<Self> {
        let mut cols = Vec::with_capacity(names.len());
        for name in names {
            let j = self
                .index_of(name)
                .ok_or_else(|| Error::schema(format!("missing attribute `{name}`")))?;
            cols.push(j);
        }
        Ok(self.select_columns(&cols))
    }

    pub fn ensure_finite(&self) -> Result<()> {
        for (name, col) in self.names.iter().zip(&self.columns) {
            if let Some(r) = col.iter().position(|v| !v.is_finite()) {
                return Err(Error::domain(format!("non-finite value in `{name}` at row {r}")));
            }
        }
        Ok(())
    }

    pub fn cast<U: Real>(&self) -> FeatureMatrix<U> {
        FeatureMatrix {
            names: self.names.clone(),
            columns: self
                .columns
                .iter()
                .map(|c| c.iter().map(|v| U::lit(v.as_f64())).collect())
                .collect(),
            n_rows: self.n_rows,
        }
    }
}

pub(crate) fn check_targets<T: Real>(x: &FeatureMatrix<T>, y: &[T]) -> Result<()> {
    if x.n_rows() != y.len() {
        return Err(Error::domain(format!(
            "{} feature rows but {} targets",
            x.n_rows(),
            y.len()
        )));
    }
    if let Some(i) = y.iter().position(|v| !v.is_finite()) {
        return Err(Error::domain(format!("non-finite target at row {i}")));
    }
    Ok(())
}
