use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::FeatureMatrix;
use crate::scalar::Real;
use crate::split::midpoint;

/// Histogram-ready feature matrix: per-feature ascending bin edges and a
/// bin index per cell, with `x <= edges[b]` exactly when `bin(x) <= b`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BinnedMatrix<T> {
    pub names: Vec<String>,
    pub edges: Vec<Vec<T>>,
    /// Column-major bin indices.
    pub bins: Vec<Vec<u16>>,
}

impl<T: Real> BinnedMatrix<T> {
    pub fn n_rows(&self) -> usize {
        self.bins.first().map_or(0, Vec::len)
    }

    pub fn n_features(&self) -> usize {
        self.bins.len()
    }

    pub fn n_bins(&self, feature: usize) -> usize {
        self.edges[feature].len() + 1
    }

    #[inline]
    pub fn bin_of(&self, feature: usize, value: T) -> u16 {
        bin_index(&self.edges[feature], value)
    }
}

#[inline]
pub(crate) fn bin_index<T: Real>(edges: &[T], value: T) -> u16 {
    edges.partition_point(|&e| e < value) as u16
}

/// Equal-frequency edges over the distinct values of `values`; one bin per
/// distinct value when there are at most `max_bins` of them.
pub fn bin_edges<T: Real>(values: &[T], max_bins: usize) -> Vec<T> {
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite values"));
    let mut distinct: Vec<(T, usize)> = Vec::new();
    for v in sorted {
        match distinct.last_mut() {
            Some((last, c)) if *last == v => *c += 1,
            _ => distinct.push((v, 1)),
        }
    }
    if distinct.len() <= max_bins {
        return distinct.windows(2).map(|w| midpoint(w[0].0, w[1].0)).collect();
    }
    let n = values.len();
    let mut edges = Vec::with_capacity(max_bins - 1);
    let mut next = 1usize;
    let mut cum = 0usize;
    for j in 0..distinct.len() - 1 {
        cum += distinct[j].1;
        if next < max_bins && cum * max_bins >= next * n {
            edges.push(midpoint(distinct[j].0, distinct[j + 1].0));
            while next < max_bins && cum * max_bins >= next * n {
                next += 1;
            }
        }
    }
    edges
}

pub fn bin_features<T: Real>(x: &FeatureMatrix<T>, max_bins: usize) -> Result<BinnedMatrix<T>> {
    if !(2..=u16::MAX as usize).contains(&max_bins) {
        return Err(Error::domain(format!("max_bins must lie in [2, {}], got {max_bins}", u16::MAX)));
    }
    x.ensure_finite()?;
    let edges: Vec<Vec<T>> = x.columns().par_iter().map(|c| bin_edges(c, max_bins)).collect();
    let bins = x
        .columns()
        .par_iter()
        .zip(&edges)
        .map(|(c, e)| c.iter().map(|&v| bin_index(e, v)).collect())
        .collect();
    Ok(BinnedMatrix { names: x.names().to_vec(), edges, bins })
}
