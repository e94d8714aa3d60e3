//! M5 model trees: regression trees with least-squares linear models at the
//! nodes, grown by standard-deviation reduction, pruned bottom-up with a
//! complexity-adjusted error estimate, and optionally smoothed along the
//! root path at prediction time.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use log::debug;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::cholesky_solve;
use crate::matrix::{check_targets, FeatureMatrix};
use crate::scalar::{population_sd, Real};
use crate::split::{self, Criterion, SplitCandidate};

pub const FORMAT_VERSION: u32 = 1;

/// Node errors within this fraction of sd(root) of the subtree error prune.
const PRUNE_TIE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearModel<T> {
    /// Feature indices (into the owning matrix) with a coefficient each.
    pub attributes: Vec<usize>,
    pub coefficients: Vec<T>,
    pub intercept: T,
}

impl<T: Real> LinearModel<T> {
    pub fn constant(value: T) -> Self {
        Self { attributes: Vec::new(), coefficients: Vec::new(), intercept: value }
    }

    #[inline]
    pub fn predict(&self, row: &[T]) -> T {
        self.attributes
            .iter()
            .zip(&self.coefficients)
            .fold(self.intercept, |acc, (&a, &c)| acc + c * row[a])
    }

    fn predict_at(&self, x: &FeatureMatrix<T>, r: usize) -> T {
        self.attributes
            .iter()
            .zip(&self.coefficients)
            .fold(self.intercept, |acc, (&a, &c)| acc + c * x.get(r, a))
    }

    /// Parameter count including the intercept.
    pub fn terms(&self) -> usize {
        self.coefficients.len() + 1
    }
}

/// Ordinary least squares of `y` on the columns `attrs` over all rows.
pub fn fit_linear<T: Real>(x: &FeatureMatrix<T>, y: &[T], attrs: &[usize]) -> Result<LinearModel<T>> {
    check_targets(x, y)?;
    if y.is_empty() {
        return Err(Error::domain("cannot fit a linear model to zero rows"));
    }
    if let Some(&a) = attrs.iter().find(|&&a| a >= x.n_features()) {
        return Err(Error::domain(format!("attribute index {a} out of range")));
    }
    let rows: Vec<usize> = (0..y.len()).collect();
    Ok(fit_linear_rows(x, y, &rows, attrs))
}

pub(crate) fn fit_linear_rows<T: Real>(
    x: &FeatureMatrix<T>,
    y: &[T],
    rows: &[usize],
    attrs: &[usize],
) -> LinearModel<T> {
    let n = T::from_count(rows.len());
    let y_mean = rows.iter().map(|&r| y[r]).sum::<T>() / n;
    let k = attrs.len();
    if k == 0 {
        return LinearModel::constant(y_mean);
    }
    let x_mean: Vec<T> = attrs
        .iter()
        .map(|&a| rows.iter().map(|&r| x.get(r, a)).sum::<T>() / n)
        .collect();

    // centred normal equations
    let mut gram = vec![T::zero(); k * k];
    let mut rhs = vec![T::zero(); k];
    let mut centred = vec![T::zero(); k];
    for &r in rows {
        for (j, &a) in attrs.iter().enumerate() {
            centred[j] = x.get(r, a) - x_mean[j];
        }
        let dy = y[r] - y_mean;
        for i in 0..k {
            rhs[i] += centred[i] * dy;
            for j in 0..=i {
                gram[i * k + j] += centred[i] * centred[j];
            }
        }
    }
    for i in 0..k {
        for j in 0..i {
            gram[j * k + i] = gram[i * k + j];
        }
    }

    let coefficients = cholesky_solve(&gram, &rhs, k).or_else(|| {
        let trace = (0..k).map(|i| gram[i * k + i]).sum::<T>();
        let ridge = T::lit(1e-8) * trace / T::from_count(k);
        if ridge <= T::zero() {
            return None;
        }
        let mut damped = gram.clone();
        for i in 0..k {
            damped[i * k + i] += ridge;
        }
        cholesky_solve(&damped, &rhs, k)
    });
    match coefficients {
        Some(c) => {
            let intercept = y_mean - c.iter().zip(&x_mean).map(|(&b, &m)| b * m).sum::<T>();
            LinearModel { attributes: attrs.to_vec(), coefficients: c, intercept }
        }
        None => LinearModel {
            attributes: attrs.to_vec(),
            coefficients: vec![T::zero(); k],
            intercept: y_mean,
        },
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct M5pParams {
    pub min_leaf: usize,
    /// Growth stops below this fraction of the root's standard deviation.
    pub sd_fraction_stop: f64,
    pub pruning: bool,
    pub smoothing: bool,
    pub smoothing_k: f64,
    /// Prediction batching knob carried over from the original tool; has no
    /// effect on the learned model.
    pub batch_size: usize,
}

impl Default for M5pParams {
    fn default() -> Self {
        Self {
            min_leaf: 4,
            sd_fraction_stop: 0.05,
            pruning: true,
            smoothing: true,
            smoothing_k: 15.0,
            batch_size: 100,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Node<T> {
    Split {
        parent: Option<usize>,
        attribute: usize,
        threshold: T,
        left: usize,
        right: usize,
        n_train: usize,
        /// Unsmoothed model over the attributes tested below this node.
        model: LinearModel<T>,
    },
    Leaf {
        parent: Option<usize>,
        n_train: usize,
        model: LinearModel<T>,
    },
}

impl<T> Node<T> {
    pub fn n_train(&self) -> usize {
        match self {
            Node::Split { n_train, .. } | Node::Leaf { n_train, .. } => *n_train,
        }
    }

    pub fn model(&self) -> &LinearModel<T> {
        match self {
            Node::Split { model, .. } | Node::Leaf { model, .. } => model,
        }
    }

    pub fn parent(&self) -> Option<usize> {
        match self {
            Node::Split { parent, .. } | Node::Leaf { parent, .. } => *parent,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelTree<T> {
    pub format_version: u32,
    pub features: Vec<String>,
    pub params: M5pParams,
    /// Pre-order; node 0 is the root.
    pub nodes: Vec<Node<T>>,
}

/// Best SDR split over every attribute and row (exposed for oracle checks).
pub fn best_split<T: Real>(x: &FeatureMatrix<T>, y: &[T], min_leaf: usize) -> Option<SplitCandidate<T>> {
    let rows: Vec<usize> = (0..x.n_rows()).collect();
    let attrs: Vec<usize> = (0..x.n_features()).collect();
    split::best_split(x, y, &rows, &attrs, min_leaf, Criterion::StdDevReduction)
}

struct GrowNode<T> {
    start: usize,
    end: usize,
    split: Option<(usize, T, usize, usize)>,
}

/// (grown node id, new parent id, (new parent id, is left child))
type WorkItem = (usize, Option<usize>, Option<(usize, bool)>);

pub fn fit_m5p<T: Real>(x: &FeatureMatrix<T>, y: &[T], params: &M5pParams) -> Result<ModelTree<T>> {
    check_targets(x, y)?;
    x.ensure_finite()?;
    if y.is_empty() {
        return Err(Error::domain("cannot fit a model tree to zero rows"));
    }
    if params.min_leaf == 0 {
        return Err(Error::domain("min_leaf must be at least 1"));
    }
    let n = y.len();
    let mut rows: Vec<usize> = (0..n).collect();
    let all_attrs: Vec<usize> = (0..x.n_features()).collect();
    let root_sd = population_sd(y);
    let stop_sd = T::lit(params.sd_fraction_stop) * root_sd;

    // growth: nodes are created parent-before-child
    let mut grow: Vec<GrowNode<T>> = vec![GrowNode { start: 0, end: n, split: None }];
    let mut stack = vec![0usize];
    while let Some(id) = stack.pop() {
        let (start, end) = (grow[id].start, grow[id].end);
        let count = end - start;
        if count < 2 * params.min_leaf {
            continue;
        }
        let ys: Vec<T> = rows[start..end].iter().map(|&r| y[r]).collect();
        if population_sd(&ys) < stop_sd || population_sd(&ys) == T::zero() {
            continue;
        }
        let Some(best) = split::best_split(
            x,
            y,
            &rows[start..end],
            &all_attrs,
            params.min_leaf,
            Criterion::StdDevReduction,
        ) else {
            continue;
        };
        let nl = split::partition_rows(x, &mut rows[start..end], best.attribute, best.threshold);
        let left = grow.len();
        grow.push(GrowNode { start, end: start + nl, split: None });
        grow.push(GrowNode { start: start + nl, end, split: None });
        grow[id].split = Some((best.attribute, best.threshold, left, left + 1));
        stack.push(left + 1);
        stack.push(left);
    }

    // attributes tested in each subtree
    let mut tested: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); grow.len()];
    for id in (0..grow.len()).rev() {
        if let Some((a, _, l, r)) = grow[id].split {
            let mut s: BTreeSet<usize> = tested[l].union(&tested[r]).copied().collect();
            s.insert(a);
            tested[id] = s;
        }
    }

    let models: Vec<LinearModel<T>> = grow
        .par_iter()
        .zip(&tested)
        .map(|(g, attrs)| {
            let attrs: Vec<usize> = attrs.iter().copied().collect();
            fit_linear_rows(x, y, &rows[g.start..g.end], &attrs)
        })
        .collect();

    // bottom-up pruning on complexity-adjusted mean absolute error
    let tie = T::lit(PRUNE_TIE) * root_sd;
    let mut est_err = vec![T::zero(); grow.len()];
    let mut is_leaf: Vec<bool> = grow.iter().map(|g| g.split.is_none()).collect();
    for id in (0..grow.len()).rev() {
        let g = &grow[id];
        let count = g.end - g.start;
        let raw = rows[g.start..g.end]
            .iter()
            .map(|&r| (y[r] - models[id].predict_at(x, r)).abs())
            .sum::<T>()
            / T::from_count(count);
        let own = raw * pruning_factor::<T>(count, models[id].terms());
        match g.split {
            None => est_err[id] = own,
            Some((_, _, l, r)) => {
                let nl = T::from_count(grow[l].end - grow[l].start);
                let nr = T::from_count(grow[r].end - grow[r].start);
                let subtree = (nl * est_err[l] + nr * est_err[r]) / (nl + nr);
                if params.pruning && own <= subtree + tie {
                    is_leaf[id] = true;
                    est_err[id] = own;
                } else {
                    est_err[id] = subtree;
                }
            }
        }
    }

    // compact reachable nodes in pre-order
    let mut nodes: Vec<Node<T>> = Vec::new();
    let mut work: Vec<WorkItem> = vec![(0, None, None)];
    while let Some((gid, parent, link)) = work.pop() {
        let id = nodes.len();
        if let Some((p, is_left)) = link {
            if let Node::Split { left, right, .. } = &mut nodes[p] {
                if is_left {
                    *left = id;
                } else {
                    *right = id;
                }
            }
        }
        let g = &grow[gid];
        let n_train = g.end - g.start;
        let model = models[gid].clone();
        match (is_leaf[gid], g.split) {
            (false, Some((attribute, threshold, l, r))) => {
                nodes.push(Node::Split { parent, attribute, threshold, left: 0, right: 0, n_train, model });
                work.push((r, Some(id), Some((id, false))));
                work.push((l, Some(id), Some((id, true))));
            }
            _ => nodes.push(Node::Leaf { parent, n_train, model }),
        }
    }
    debug!("m5p: grew {} nodes, kept {} after pruning", grow.len(), nodes.len());

    Ok(ModelTree {
        format_version: FORMAT_VERSION,
        features: x.names().to_vec(),
        params: *params,
        nodes,
    })
}

fn pruning_factor<T: Real>(n: usize, v: usize) -> T {
    if n <= v {
        T::lit(10.0)
    } else {
        T::from_count(n + v) / T::from_count(n - v)
    }
}

impl<T: Real> ModelTree<T> {
    pub fn n_leaves(&self) -> usize {
        self.nodes.iter().filter(|n| matches!(n, Node::Leaf { .. })).count()
    }

    /// Index of the leaf that `row` routes to (`<=` goes left).
    pub fn leaf_index(&self, row: &[T]) -> usize {
        let mut id = 0;
        while let Node::Split { attribute, threshold, left, right, .. } = &self.nodes[id] {
            id = if row[*attribute] <= *threshold { *left } else { *right };
        }
        id
    }

    /// Node-model outputs from the leaf up to the root together with the
    /// training count of the node each output belongs to.
    pub fn path_outputs(&self, row: &[T]) -> Vec<(T, usize)> {
        let mut id = Some(self.leaf_index(row));
        let mut out = Vec::new();
        while let Some(i) = id {
            out.push((self.nodes[i].model().predict(row), self.nodes[i].n_train()));
            id = self.nodes[i].parent();
        }
        out
    }

    /// Prediction for a row given in `self.features` order.
    pub fn predict_row(&self, row: &[T]) -> T {
        let leaf = self.leaf_index(row);
        let mut p = self.nodes[leaf].model().predict(row);
        if !self.params.smoothing {
            return p;
        }
        let k = T::lit(self.params.smoothing_k);
        let mut child = leaf;
        while let Some(parent) = self.nodes[child].parent() {
            let n = T::from_count(self.nodes[child].n_train());
            let q = self.nodes[parent].model().predict(row);
            p = (n * p + k * q) / (n + k);
            child = parent;
        }
        p
    }

    /// Predicts every row of `x`, matching columns by name.
    pub fn predict(&self, x: &FeatureMatrix<T>) -> Result<Vec<T>> {
        let x = x.align_to(&self.features)?;
        Ok((0..x.n_rows()).into_par_iter().map(|r| self.predict_row(&x.row(r))).collect())
    }

    /// Indented if/then rendering.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        self.write_node(0, 0, &mut out);
        out
    }

    fn write_node(&self, id: usize, depth: usize, out: &mut String) {
        let pad = "|   ".repeat(depth);
        match &self.nodes[id] {
            Node::Split { attribute, threshold, left, right, .. } => {
                let name = &self.features[*attribute];
                let _ = writeln!(out, "{pad}if {name} <= {threshold}:");
                self.write_node(*left, depth + 1, out);
                let _ = writeln!(out, "{pad}else ({name} > {threshold}):");
                self.write_node(*right, depth + 1, out);
            }
            Node::Leaf { n_train, model, .. } => {
                let mut expr = format!("{}", model.intercept);
                for (&a, c) in model.attributes.iter().zip(&model.coefficients) {
                    let _ = write!(expr, " + {c}*{}", self.features[a]);
                }
                let _ = writeln!(out, "{pad}then y = {expr}  [n={n_train}]");
            }
        }
    }
}

/// Convenience for callers holding a model over all training columns.
pub fn predict_m5p<T: Real>(tree: &ModelTree<T>, x: &FeatureMatrix<T>) -> Result<Vec<T>> {
    tree.predict(x)
}
