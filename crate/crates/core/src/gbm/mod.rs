//! Leaf-wise, histogram-binned gradient boosting.

mod binning;

pub use binning::{bin_edges, bin_features, BinnedMatrix};

use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{check_targets, FeatureMatrix};
use crate::scalar::{mean, median, Real};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Objective {
    Mae,
    Mse,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    Mae,
    Rmse,
}

impl Metric {
    pub fn name(self) -> &'static str {
        match self {
            Metric::Mae => "mae",
            Metric::Rmse => "rmse",
        }
    }

    fn eval<T: Real>(self, y: &[T], pred: &[T]) -> T {
        let n = T::from_count(y.len());
        match self {
            Metric::Mae => y.iter().zip(pred).map(|(&a, &p)| (a - p).abs()).sum::<T>() / n,
            Metric::Rmse => (y.iter().zip(pred).map(|(&a, &p)| (a - p) * (a - p)).sum::<T>() / n).sqrt(),
        }
    }
}

fn default_objective() -> Objective {
    Objective::Mae
}
fn default_num_leaves() -> usize {
    31
}
fn default_learning_rate() -> f64 {
    0.1
}
fn default_fraction() -> f64 {
    0.7
}
fn default_max_bins() -> usize {
    255
}
fn default_min_leaf() -> usize {
    20
}
fn default_seed() -> u64 {
    42
}
fn default_lambda() -> f64 {
    1e-3
}
fn default_metric() -> Metric {
    Metric::Mae
}

/// Booster settings. `n_iterations` has no default and must be given.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GbmParams {
    #[serde(default = "default_objective")]
    pub objective: Objective,
    #[serde(default = "default_num_leaves")]
    pub num_leaves: usize,
    #[serde(default = "default_learning_rate")]
    pub learning_rate: f64,
    #[serde(default = "default_fraction")]
    pub bagging_fraction: f64,
    #[serde(default = "default_fraction")]
    pub feature_fraction: f64,
    pub n_iterations: usize,
    #[serde(default = "default_max_bins")]
    pub max_bins: usize,
    #[serde(default = "default_min_leaf")]
    pub min_leaf: usize,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "default_lambda")]
    pub lambda: f64,
    #[serde(default = "default_metric")]
    pub metric: Metric,
    #[serde(default)]
    pub verbose: u8,
}

impl GbmParams {
    pub fn new(n_iterations: usize) -> Self {
        GbmParams {
            objective: default_objective(),
            num_leaves: default_num_leaves(),
            learning_rate: default_learning_rate(),
            bagging_fraction: default_fraction(),
            feature_fraction: default_fraction(),
            n_iterations,
            max_bins: default_max_bins(),
            min_leaf: default_min_leaf(),
            seed: default_seed(),
            lambda: default_lambda(),
            metric: default_metric(),
            verbose: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.num_leaves < 2 {
            return Err(Error::domain(format!("num_leaves must be at least 2, got {}", self.num_leaves)));
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::domain(format!("learning_rate must be positive, got {}", self.learning_rate)));
        }
        for (name, f) in [("bagging_fraction", self.bagging_fraction), ("feature_fraction", self.feature_fraction)] {
            if !(f > 0.0 && f <= 1.0) {
                return Err(Error::domain(format!("{name} must lie in (0, 1], got {f}")));
            }
        }
        if self.min_leaf == 0 {
            return Err(Error::domain("min_leaf must be at least 1"));
        }
        if !(self.lambda >= 0.0 && self.lambda.is_finite()) {
            return Err(Error::domain(format!("lambda must be non-negative, got {}", self.lambda)));
        }
        if !(2..=u16::MAX as usize).contains(&self.max_bins) {
            return Err(Error::domain(format!("max_bins must lie in [2, {}]", u16::MAX)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum GbmNode<T> {
    Split {
        feature: usize,
        bin: u16,
        /// Raw-value form of `bin`: rows with `x <= threshold` go left.
        threshold: T,
        gain: T,
        left: usize,
        right: usize,
    },
    Leaf {
        value: T,
        count: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GbmTree<T> {
    pub nodes: Vec<GbmNode<T>>,
}

impl<T: Real> GbmTree<T> {
    pub fn n_leaves(&self) -> usize {
        self.nodes.iter().filter(|n| matches!(n, GbmNode::Leaf { .. })).count()
    }

    pub fn predict_row(&self, row: &[T]) -> T {
        let mut i = 0;
        loop {
            match &self.nodes[i] {
                GbmNode::Split { feature, threshold, left, right, .. } => {
                    i = if row[*feature] <= *threshold { *left } else { *right };
                }
                GbmNode::Leaf { value, .. } => return *value,
            }
        }
    }

    fn predict_binned(&self, bins: &BinnedMatrix<T>, r: usize) -> T {
        let mut i = 0;
        loop {
            match &self.nodes[i] {
                GbmNode::Split { feature, bin, left, right, .. } => {
                    i = if bins.bins[*feature][r] <= *bin { *left } else { *right };
                }
                GbmNode::Leaf { value, .. } => return *value,
            }
        }
    }

    pub fn leaf_counts(&self) -> Vec<usize> {
        self.nodes
            .iter()
            .filter_map(|n| match n {
                GbmNode::Leaf { count, .. } => Some(*count),
                _ => None,
            })
            .collect()
    }
}

/// One growth step: the gain executed and the best gain left at any other leaf.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GrowthStep<T> {
    pub executed: T,
    pub best_other: Option<T>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Serialize", deserialize = "T: Deserialize<'de>"))]
pub struct GbmModel<T> {
    pub format_version: u32,
    pub features: Vec<String>,
    pub params: GbmParams,
    pub init_score: T,
    pub bin_edges: Vec<Vec<T>>,
    pub trees: Vec<GbmTree<T>>,
    pub metric_trace: Vec<T>,
    #[serde(skip)]
    pub growth_log: Vec<Vec<GrowthStep<T>>>,
}

impl<T: Real> GbmModel<T> {
    pub fn predict_row(&self, row: &[T]) -> T {
        let mut s = self.init_score;
        for t in &self.trees {
            s += t.predict_row(row);
        }
        s
    }

    pub fn predict(&self, x: &FeatureMatrix<T>) -> Result<Vec<T>> {
        let x = x.align_to(&self.features)?;
        Ok((0..x.n_rows()).into_par_iter().map(|i| self.predict_row(&x.row(i))).collect())
    }
}

pub fn predict_gbm<T: Real>(model: &GbmModel<T>, x: &FeatureMatrix<T>) -> Result<Vec<T>> {
    model.predict(x)
}

#[derive(Debug, Clone, Copy, Default)]
struct Cell<T> {
    g: T,
    h: T,
    n: usize,
}

/// Per sampled feature, one cell per bin.
type Histogram<T> = Vec<Vec<Cell<T>>>;

#[derive(Debug, Clone, Copy)]
struct Candidate<T> {
    /// Position in the sampled feature list.
    slot: usize,
    bin: u16,
    gain: T,
}

struct Grower<'a, T> {
    bins: &'a BinnedMatrix<T>,
    features: &'a [usize],
    grad: &'a [T],
    hess: &'a [T],
    lambda: T,
    min_leaf: usize,
}

impl<T: Real> Grower<'_, T> {
    fn histogram(&self, rows: &[usize]) -> Histogram<T> {
        self.features
            .par_iter()
            .map(|&f| {
                let col = &self.bins.bins[f];
                let mut h = vec![Cell::default(); self.bins.n_bins(f)];
                for &r in rows {
                    let c = &mut h[col[r] as usize];
                    c.g += self.grad[r];
                    c.h += self.hess[r];
                    c.n += 1;
                }
                h
            })
            .collect()
    }

    fn best(&self, hist: &Histogram<T>) -> Option<Candidate<T>> {
        let score = |g: T, h: T| g * g / (h + self.lambda);
        let mut best: Option<Candidate<T>> = None;
        for (slot, cells) in hist.iter().enumerate() {
            let (gt, ht, nt) = cells
                .iter()
                .fold((T::zero(), T::zero(), 0), |(g, h, n), c| (g + c.g, h + c.h, n + c.n));
            let parent = score(gt, ht);
            let (mut gl, mut hl, mut nl) = (T::zero(), T::zero(), 0usize);
            for (b, c) in cells.iter().enumerate().take(cells.len().saturating_sub(1)) {
                gl += c.g;
                hl += c.h;
                nl += c.n;
                if c.n == 0 || nl < self.min_leaf {
                    continue;
                }
                if nt - nl < self.min_leaf {
                    break;
                }
                let gain = score(gl, hl) + score(gt - gl, ht - hl) - parent;
                if gain > T::zero() && best.is_none_or(|c| gain > c.gain) {
                    best = Some(Candidate { slot, bin: b as u16, gain });
                }
            }
        }
        best
    }
}

fn subtract<T: Real>(parent: &Histogram<T>, child: &Histogram<T>) -> Histogram<T> {
    parent
        .iter()
        .zip(child)
        .map(|(p, c)| {
            p.iter().zip(c).map(|(a, b)| Cell { g: a.g - b.g, h: a.h - b.h, n: a.n - b.n }).collect()
        })
        .collect()
}

struct OpenLeaf<T> {
    node: usize,
    rows: Vec<usize>,
    hist: Histogram<T>,
    best: Option<Candidate<T>>,
}

/// Node index of each leaf and the bagged rows that reached it.
type LeafRows = (usize, Vec<usize>);

fn grow_tree<T: Real>(
    g: &Grower<'_, T>,
    rows: Vec<usize>,
    num_leaves: usize,
    log: &mut Vec<GrowthStep<T>>,
) -> (Vec<GbmNode<T>>, Vec<LeafRows>) {
    let mut nodes = vec![GbmNode::Leaf { value: T::zero(), count: rows.len() }];
    let hist = g.histogram(&rows);
    let best = g.best(&hist);
    let mut open = vec![OpenLeaf { node: 0, rows, hist, best }];
    while open.len() < num_leaves {
        let mut pick: Option<usize> = None;
        for (i, leaf) in open.iter().enumerate() {
            if let Some(c) = leaf.best {
                if pick.is_none_or(|p| c.gain > open[p].best.unwrap().gain) {
                    pick = Some(i);
                }
            }
        }
        let Some(pick) = pick else { break };
        let leaf = open.swap_remove(pick);
        let cand = leaf.best.unwrap();
        log.push(GrowthStep {
            executed: cand.gain,
            best_other: open.iter().filter_map(|l| l.best.map(|c| c.gain)).reduce(T::max),
        });
        let feature = g.features[cand.slot];
        let col = &g.bins.bins[feature];
        let (lrows, rrows): (Vec<usize>, Vec<usize>) = leaf.rows.iter().partition(|&&r| col[r] <= cand.bin);
        let (lhist, rhist) = if lrows.len() <= rrows.len() {
            let l = g.histogram(&lrows);
            let r = subtract(&leaf.hist, &l);
            (l, r)
        } else {
            let r = g.histogram(&rrows);
            let l = subtract(&leaf.hist, &r);
            (l, r)
        };
        let left = nodes.len();
        nodes.push(GbmNode::Leaf { value: T::zero(), count: lrows.len() });
        nodes.push(GbmNode::Leaf { value: T::zero(), count: rrows.len() });
        nodes[leaf.node] = GbmNode::Split {
            feature,
            bin: cand.bin,
            threshold: g.bins.edges[feature][cand.bin as usize],
            gain: cand.gain,
            left,
            right: left + 1,
        };
        let lbest = g.best(&lhist);
        let rbest = g.best(&rhist);
        open.push(OpenLeaf { node: left, rows: lrows, hist: lhist, best: lbest });
        open.push(OpenLeaf { node: left + 1, rows: rrows, hist: rhist, best: rbest });
    }
    let mut leaves: Vec<(usize, Vec<usize>)> = open.into_iter().map(|l| (l.node, l.rows)).collect();
    leaves.sort_by_key(|l| l.0);
    (nodes, leaves)
}

fn check_rows<T: Real>(x: &FeatureMatrix<T>, y: &[T], params: &GbmParams) -> Result<()> {
    params.validate()?;
    check_targets(x, y)?;
    if x.n_rows() < 2 * params.min_leaf {
        return Err(Error::domain(format!(
            "need at least 2*min_leaf = {} rows, got {}",
            2 * params.min_leaf,
            x.n_rows()
        )));
    }
    Ok(())
}

fn init_score<T: Real>(y: &[T], objective: Objective) -> T {
    match objective {
        Objective::Mae => median(y),
        Objective::Mse => mean(y),
    }
}

fn gradients<T: Real>(y: &[T], pred: &[T], objective: Objective) -> Vec<T> {
    y.iter()
        .zip(pred)
        .map(|(&a, &p)| match objective {
            Objective::Mae => {
                let d = p - a;
                if d > T::zero() {
                    T::one()
                } else if d < T::zero() {
                    -T::one()
                } else {
                    T::zero()
                }
            }
            Objective::Mse => p - a,
        })
        .collect()
}

pub fn fit_gbm<T: Real>(x: &FeatureMatrix<T>, y: &[T], params: &GbmParams) -> Result<GbmModel<T>> {
    check_rows(x, y, params)?;
    let n = x.n_rows();
    let m = x.n_features();
    let bins = bin_features(x, params.max_bins)?;
    let init = init_score(y, params.objective);
    let mut pred = vec![init; n];
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let n_bag = ((params.bagging_fraction * n as f64).ceil() as usize).min(n);
    let n_feat = ((params.feature_fraction * m as f64).ceil() as usize).clamp(1, m);
    if n_bag == 0 {
        return Err(Error::domain("bagging selects no rows"));
    }
    let hess = vec![T::one(); n];
    let lr = T::lit(params.learning_rate);
    let mut trees = Vec::with_capacity(params.n_iterations);
    let mut trace = Vec::with_capacity(params.n_iterations);
    let mut growth_log = Vec::with_capacity(params.n_iterations);

    for it in 0..params.n_iterations {
        let mut rows = index::sample(&mut rng, n, n_bag).into_vec();
        rows.sort_unstable();
        let mut features = index::sample(&mut rng, m, n_feat).into_vec();
        features.sort_unstable();
        let grad = gradients(y, &pred, params.objective);
        let grower = Grower {
            bins: &bins,
            features: &features,
            grad: &grad,
            hess: &hess,
            lambda: T::lit(params.lambda),
            min_leaf: params.min_leaf,
        };
        let mut log = Vec::new();
        let (mut nodes, leaves) = grow_tree(&grower, rows, params.num_leaves, &mut log);
        for (node, rows) in leaves {
            let value = match params.objective {
                Objective::Mae => {
                    let resid: Vec<T> = rows.iter().map(|&r| y[r] - pred[r]).collect();
                    median(&resid) * lr
                }
                Objective::Mse => {
                    let gs: T = rows.iter().map(|&r| grad[r]).sum();
                    -gs / (T::from_count(rows.len()) + T::lit(params.lambda)) * lr
                }
            };
            nodes[node] = GbmNode::Leaf { value, count: rows.len() };
        }
        let tree = GbmTree { nodes };
        pred.par_iter_mut().enumerate().for_each(|(r, p)| *p += tree.predict_binned(&bins, r));
        let metric = params.metric.eval(y, &pred);
        if params.verbose >= 1 {
            eprintln!("iter {}: {}={}", it + 1, params.metric.name(), metric);
        }
        trees.push(tree);
        trace.push(metric);
        growth_log.push(log);
    }

    Ok(GbmModel {
        format_version: FORMAT_VERSION,
        features: x.names().to_vec(),
        params: params.clone(),
        init_score: init,
        bin_edges: bins.edges,
        trees,
        metric_trace: trace,
        growth_log,
    })
}

/// The first split the booster would make with every row and feature in play.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootSplit<T> {
    pub feature: usize,
    pub threshold: T,
    pub gain: T,
}

pub fn root_split<T: Real>(x: &FeatureMatrix<T>, y: &[T], params: &GbmParams) -> Result<Option<RootSplit<T>>> {
    check_rows(x, y, params)?;
    let n = x.n_rows();
    let bins = bin_features(x, params.max_bins)?;
    let pred = vec![init_score(y, params.objective); n];
    let grad = gradients(y, &pred, params.objective);
    let hess = vec![T::one(); n];
    let features: Vec<usize> = (0..x.n_features()).collect();
    let g = Grower {
        bins: &bins,
        features: &features,
        grad: &grad,
        hess: &hess,
        lambda: T::lit(params.lambda),
        min_leaf: params.min_leaf,
    };
    let rows: Vec<usize> = (0..n).collect();
    Ok(g.best(&g.histogram(&rows)).map(|c| RootSplit {
        feature: c.slot,
        threshold: bins.edges[c.slot][c.bin as usize],
        gain: c.gain,
    }))
}
