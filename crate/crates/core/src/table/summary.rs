use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{ColumnData, ColumnKind, Table, MATCH_TYPE};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NumericSummary {
    pub name: String,
    pub min: f64,
    pub max: f64,
    pub mean: f64,
    pub zero_fraction: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CategoricalSummary {
    pub name: String,
    /// (value, count) in dictionary order.
    pub frequencies: Vec<(String, usize)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MatchTypeFractions {
    pub solo: f64,
    pub duo: f64,
    pub squad: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryStats {
    pub n_rows: usize,
    pub numeric: Vec<NumericSummary>,
    pub categorical: Vec<CategoricalSummary>,
    pub match_types: Option<MatchTypeFractions>,
    /// Fraction of rows with walk + ride + swim distance equal to zero.
    pub zero_distance_fraction: Option<f64>,
}

pub fn summarize(table: &Table) -> Result<SummaryStats> {
    let n = table.n_rows();
    if n == 0 {
        return Err(Error::EmptyInput("cannot summarize an empty table".into()));
    }
    let nf = n as f64;
    let specs = table.schema().columns();

    let numeric: Vec<NumericSummary> = specs
        .par_iter()
        .enumerate()
        .filter_map(|(i, spec)| match table.column_at(i) {
            ColumnData::Numeric(v) => {
                let (mut min, mut max, mut sum, mut zeros) = (f64::INFINITY, f64::NEG_INFINITY, 0.0, 0usize);
                for &x in v {
                    min = min.min(x);
                    max = max.max(x);
                    sum += x;
                    zeros += usize::from(x == 0.0);
                }
                let mean = (sum / nf).clamp(min, max);
                Some(NumericSummary {
                    name: spec.name.clone(),
                    min,
                    max,
                    mean,
                    zero_fraction: zeros as f64 / nf,
                })
            }
            ColumnData::Categorical(_) => None,
        })
        .collect();

    let categorical = specs
        .iter()
        .enumerate()
        .filter(|(_, s)| s.kind == ColumnKind::Categorical)
        .map(|(i, spec)| {
            let ColumnData::Categorical(c) = table.column_at(i) else { unreachable!() };
            let mut counts = vec![0usize; c.dictionary().len()];
            for &k in c.codes() {
                counts[k as usize] += 1;
            }
            CategoricalSummary {
                name: spec.name.clone(),
                frequencies: c.dictionary().iter().cloned().zip(counts).collect(),
            }
        })
        .collect();

    let match_types = table.categorical(MATCH_TYPE).ok().map(|c| {
        let (mut solo, mut duo, mut squad) = (0usize, 0usize, 0usize);
        for r in 0..c.len() {
            let mode = c.value(r).to_ascii_lowercase();
            // "squad" is tested first: no Kaggle mode name contains two of these
            if mode.contains("squad") {
                squad += 1;
            } else if mode.contains("duo") {
                duo += 1;
            } else if mode.contains("solo") {
                solo += 1;
            }
        }
        MatchTypeFractions { solo: solo as f64 / nf, duo: duo as f64 / nf, squad: squad as f64 / nf }
    });

    let zero_distance_fraction = match (
        table.numeric("walkDistance"),
        table.numeric("rideDistance"),
        table.numeric("swimDistance"),
    ) {
        (Ok(w), Ok(r), Ok(s)) => {
            let zeros = (0..n).filter(|&i| w[i] + r[i] + s[i] == 0.0).count();
            Some(zeros as f64 / nf)
        }
        _ => None,
    };

    Ok(SummaryStats { n_rows: n, numeric, categorical, match_types, zero_distance_fraction })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::table::{Categorical, ColumnSpec, Schema};

    #[test]
    fn zero_fraction_of_kills() {
        let t = Table::from_numeric(
            vec![("kills", vec![0.0, 0.0, 1.0]), ("winPlacePerc", vec![0.1, 0.2, 0.3])],
            "winPlacePerc",
        )
        .unwrap();
        let s = summarize(&t).unwrap();
        assert!((s.numeric[0].zero_fraction - 2.0 / 3.0).abs() < 1e-15);
        assert!(s.match_types.is_none());
        assert!(s.zero_distance_fraction.is_none());
    }

    #[test]
    fn single_row_degenerate() {
        let t = Table::from_numeric(vec![("kills", vec![4.0]), ("winPlacePerc", vec![0.3])], "winPlacePerc")
            .unwrap();
        for col in summarize(&t).unwrap().numeric {
            assert_eq!(col.min, col.max);
            assert_eq!(col.min, col.mean);
        }
    }

    #[test]
    fn empty_table_rejected() {
        let t = Table::from_numeric(vec![("kills", vec![]), ("winPlacePerc", vec![])], "winPlacePerc").unwrap();
        assert!(matches!(summarize(&t), Err(Error::EmptyInput(_))));
    }

    #[test]
    fn match_type_grouping() {
        let schema = Schema::new(
            vec![
                ColumnSpec::new("matchType", ColumnKind::Categorical),
                ColumnSpec::new("winPlacePerc", ColumnKind::Numeric),
            ],
            "winPlacePerc",
        )
        .unwrap();
        let t = Table::new(
            schema,
            vec![
                ColumnData::Categorical(Categorical::from_values([
                    "solo-fpp",
                    "duo",
                    "squad-fpp",
                    "normal-squad",
                    "crashfpp",
                ])),
                ColumnData::Numeric(vec![0.0; 5]),
            ],
        )
        .unwrap();
        let s = summarize(&t).unwrap();
        let m = s.match_types.unwrap();
        assert_eq!((m.solo, m.duo, m.squad), (0.2, 0.2, 0.4));
        let total: usize = s.categorical[0].frequencies.iter().map(|(_, c)| c).sum();
        assert_eq!(total, 5);
    }
}
