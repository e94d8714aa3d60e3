//! Random forest regression: bootstrap-bagged variance-reduction trees with
//! a fresh random feature subset at every node.

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{check_targets, FeatureMatrix};
use crate::scalar::Real;
use crate::split::{self, Criterion, SplitCandidate};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ForestParams {
    pub n_trees: usize,
    /// Bootstrap sample size as a fraction of the training rows.
    pub bag_fraction: f64,
    /// Train every tree on all rows, without resampling.
    pub no_bootstrap: bool,
    /// Features tried per node; `None` means `floor(log2(m)) + 1`.
    pub k_features: Option<usize>,
    /// 0 means unlimited.
    pub max_depth: usize,
    pub min_leaf: usize,
    pub seed: u64,
}

impl Default for ForestParams {
    fn default() -> Self {
        Self {
            n_trees: 100,
            bag_fraction: 1.0,
            no_bootstrap: false,
            k_features: None,
            max_depth: 0,
            min_leaf: 1,
            seed: 42,
        }
    }
}

impl ForestParams {
    pub fn resolved_k(&self, m: usize) -> usize {
        self.k_features
            .unwrap_or_else(|| (m.max(1) as f64).log2().floor() as usize + 1)
            .min(m)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum TreeNode<T> {
    Split { attribute: usize, threshold: T, left: usize, right: usize },
    Leaf { value: T },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegressionTree<T> {
    pub nodes: Vec<TreeNode<T>>,
}

impl<T: Real> RegressionTree<T> {
    #[inline]
    pub fn predict_row(&self, row: &[T]) -> T {
        let mut id = 0;
        loop {
            match &self.nodes[id] {
                TreeNode::Leaf { value } => return *value,
                TreeNode::Split { attribute, threshold, left, right } => {
                    id = if row[*attribute] <= *threshold { *left } else { *right };
                }
            }
        }
    }

    pub fn n_leaves(&self) -> usize {
        self.nodes.iter().filter(|n| matches!(n, TreeNode::Leaf { .. })).count()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Forest<T> {
    pub format_version: u32,
    pub features: Vec<String>,
    pub params: ForestParams,
    pub tree_seeds: Vec<u64>,
    pub trees: Vec<RegressionTree<T>>,
    /// Out-of-bag MAE; absent without bootstrap or when no row is ever out of bag.
    pub oob_mae: Option<T>,
}

fn leaf_value<T: Real>(y: &[T], rows: &[usize]) -> T {
    let (lo, hi) = rows
        .iter()
        .fold((T::infinity(), T::neg_infinity()), |(lo, hi), &r| (lo.min(y[r]), hi.max(y[r])));
    if lo == hi {
        return lo;
    }
    let m = rows.iter().map(|&r| y[r]).sum::<T>() / T::from_count(rows.len());
    m.max(lo).min(hi)
}

fn grow_tree<T: Real>(
    x: &FeatureMatrix<T>,
    y: &[T],
    mut rows: Vec<usize>,
    params: &ForestParams,
    k: usize,
    rng: &mut ChaCha8Rng,
) -> RegressionTree<T> {
    let m = x.n_features();
    let min_leaf = params.min_leaf.max(1);
    let mut nodes = vec![TreeNode::Leaf { value: T::zero() }];
    // (node id, start, end, depth)
    let mut stack = vec![(0usize, 0usize, rows.len(), 0usize)];
    while let Some((id, start, end, depth)) = stack.pop() {
        let slice = &rows[start..end];
        let pure = slice.iter().all(|&r| y[r] == y[slice[0]]);
        let depth_capped = params.max_depth > 0 && depth >= params.max_depth;
        let mut best: Option<SplitCandidate<T>> = None;
        if !pure && !depth_capped && slice.len() >= 2 * min_leaf {
            let mut attrs = index::sample(rng, m, k).into_vec();
            attrs.sort_unstable();
            best = split::best_split(x, y, slice, &attrs, min_leaf, Criterion::VarianceReduction);
        }
        match best {
            None => nodes[id] = TreeNode::Leaf { value: leaf_value(y, slice) },
            Some(s) => {
                let nl = split::partition_rows(x, &mut rows[start..end], s.attribute, s.threshold);
                let left = nodes.len();
                nodes.push(TreeNode::Leaf { value: T::zero() });
                nodes.push(TreeNode::Leaf { value: T::zero() });
                nodes[id] = TreeNode::Split {
                    attribute: s.attribute,
                    threshold: s.threshold,
                    left,
                    right: left + 1,
                };
                stack.push((left + 1, start + nl, end, depth + 1));
                stack.push((left, start, start + nl, depth + 1));
            }
        }
    }
    RegressionTree { nodes }
}

/// Best variance-reduction split over all features and rows (exposed for
/// oracle checks).
pub fn best_split<T: Real>(x: &FeatureMatrix<T>, y: &[T], min_leaf: usize) -> Option<SplitCandidate<T>> {
    let rows: Vec<usize> = (0..x.n_rows()).collect();
    let attrs: Vec<usize> = (0..x.n_features()).collect();
    split::best_split(x, y, &rows, &attrs, min_leaf, Criterion::VarianceReduction)
}

pub fn fit_forest<T: Real>(x: &FeatureMatrix<T>, y: &[T], params: &ForestParams) -> Result<Forest<T>> {
    check_targets(x, y)?;
    x.ensure_finite()?;
    let n = y.len();
    let m = x.n_features();
    if n < 2 {
        return Err(Error::domain("a forest needs at least 2 rows"));
    }
    if params.n_trees == 0 {
        return Err(Error::domain("n_trees must be at least 1"));
    }
    if m == 0 {
        return Err(Error::domain("a forest needs at least one feature"));
    }
    if let Some(k) = params.k_features {
        if k > m || k == 0 {
            return Err(Error::domain(format!("k_features = {k} but there are {m} features")));
        }
    }
    if !(params.bag_fraction > 0.0 && params.bag_fraction <= 1.0) {
        return Err(Error::domain("bag_fraction must lie in (0, 1]"));
    }
    let k = params.resolved_k(m);
    let bag = ((params.bag_fraction * n as f64).ceil() as usize).clamp(1, n);
    let tree_seeds: Vec<u64> = (0..params.n_trees as u64).map(|i| params.seed ^ i).collect();

    let fitted: Vec<(RegressionTree<T>, Vec<bool>)> = tree_seeds
        .par_iter()
        .map(|&seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut in_bag = vec![params.no_bootstrap; n];
            let rows: Vec<usize> = if params.no_bootstrap {
                (0..n).collect()
            } else {
                (0..bag)
                    .map(|_| {
                        let r = rng.random_range(0..n);
                        in_bag[r] = true;
                        r
                    })
                    .collect()
            };
            (grow_tree(x, y, rows, params, k, &mut rng), in_bag)
        })
        .collect();

    let oob_mae = if params.no_bootstrap {
        None
    } else {
        let (mut err, mut counted) = (T::zero(), 0usize);
        for r in 0..n {
            let row = x.row(r);
            let (mut sum, mut c) = (T::zero(), 0usize);
            for (tree, in_bag) in &fitted {
                if !in_bag[r] {
                    sum += tree.predict_row(&row);
                    c += 1;
                }
            }
            if c > 0 {
                err += (sum / T::from_count(c) - y[r]).abs();
                counted += 1;
            }
        }
        (counted > 0).then(|| err / T::from_count(counted))
    };

    Ok(Forest {
        format_version: FORMAT_VERSION,
        features: x.names().to_vec(),
        params: *params,
        tree_seeds,
        trees: fitted.into_iter().map(|(t, _)| t).collect(),
        oob_mae,
    })
}

impl<T: Real> Forest<T> {
    /// Mean of the tree outputs for a row in `self.features` order.
    pub fn predict_row(&self, row: &[T]) -> T {
        let (mut sum, mut lo, mut hi) = (T::zero(), T::infinity(), T::neg_infinity());
        for t in &self.trees {
            let v = t.predict_row(row);
            sum += v;
            lo = lo.min(v);
            hi = hi.max(v);
        }
        (sum / T::from_count(self.trees.len())).max(lo).min(hi)
    }

    pub fn predict(&self, x: &FeatureMatrix<T>) -> Result<Vec<T>> {
        let x = x.align_to(&self.features)?;
        Ok((0..x.n_rows()).into_par_iter().map(|r| self.predict_row(&x.row(r))).collect())
    }
}

pub fn predict_forest<T: Real>(forest: &Forest<T>, x: &FeatureMatrix<T>) -> Result<Vec<T>> {
    forest.predict(x)
}
