//! Exact sorted-scan split search shared by the model tree and the forest.

use serde::{Deserialize, Serialize};

use crate::matrix::FeatureMatrix;
use crate::scalar::Real;

/// An axis-aligned split `x[attribute] <= threshold` and its criterion value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitCandidate<T> {
    pub attribute: usize,
    pub threshold: T,
    pub score: T,
}

/// Impurity-decrease criterion evaluated from population variances of the
/// parent and both children.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Criterion {
    /// sd(T) - sum |Ti|/|T| sd(Ti)
    StdDevReduction,
    /// var(T) - sum |Ti|/|T| var(Ti)
    VarianceReduction,
}

impl Criterion {
    #[inline]
    fn score<T: Real>(self, n: T, nl: T, nr: T, var: T, var_l: T, var_r: T) -> T {
        match self {
            Criterion::StdDevReduction => var.sqrt() - (nl / n) * var_l.sqrt() - (nr / n) * var_r.sqrt(),
            Criterion::VarianceReduction => var - (nl / n) * var_l - (nr / n) * var_r,
        }
    }
}

/// Midpoint of two distinct consecutive values that still separates them.
#[inline]
pub(crate) fn midpoint<T: Real>(lo: T, hi: T) -> T {
    let m = lo + (hi - lo) / T::lit(2.0);
    if m >= hi {
        lo
    } else {
        m
    }
}

/// Best split of `rows` over `attrs`; both children must hold at least
/// `min_leaf` rows. Ties keep the earliest attribute in `attrs`, then the
/// lowest threshold. Returns `None` when no split has a positive score.
pub(crate) fn best_split<T: Real>(
    x: &FeatureMatrix<T>,
    y: &[T],
    rows: &[usize],
    attrs: &[usize],
    min_leaf: usize,
    criterion: Criterion,
) -> Option<SplitCandidate<T>> {
    let n = rows.len();
    let min_leaf = min_leaf.max(1);
    if n < 2 * min_leaf {
        return None;
    }
    let nf = T::from_count(n);
    let y_mean = rows.iter().map(|&r| y[r]).sum::<T>() / nf;
    let (mut tot1, mut tot2) = (T::zero(), T::zero());
    for &r in rows {
        let d = y[r] - y_mean;
        tot1 += d;
        tot2 += d * d;
    }
    let var = (tot2 / nf - (tot1 / nf).powi(2)).max(T::zero());

    let mut best: Option<SplitCandidate<T>> = None;
    let mut order: Vec<(T, T)> = Vec::with_capacity(n);
    // right-hand sums accumulated from the right, so small children carry
    // no cancellation residue (the sd criterion takes its square root)
    let mut suffix: Vec<(T, T)> = vec![(T::zero(), T::zero()); n + 1];
    for &a in attrs {
        let col = x.column(a);
        order.clear();
        order.extend(rows.iter().map(|&r| (col[r], y[r] - y_mean)));
        order.sort_by(|p, q| p.0.partial_cmp(&q.0).expect("finite features"));
        for i in (0..n).rev() {
            let d = order[i].1;
            suffix[i] = (suffix[i + 1].0 + d, suffix[i + 1].1 + d * d);
        }
        let (mut s1, mut s2) = (T::zero(), T::zero());
        for i in 1..n {
            let d = order[i - 1].1;
            s1 += d;
            s2 += d * d;
            if order[i - 1].0 == order[i].0 || i < min_leaf || n - i < min_leaf {
                continue;
            }
            let (nl, nr) = (T::from_count(i), T::from_count(n - i));
            let var_l = (s2 / nl - (s1 / nl).powi(2)).max(T::zero());
            let (r1, r2) = suffix[i];
            let var_r = (r2 / nr - (r1 / nr).powi(2)).max(T::zero());
            let score = criterion.score(nf, nl, nr, var, var_l, var_r);
            if score > T::zero() && best.is_none_or(|b| score > b.score) {
                best = Some(SplitCandidate {
                    attribute: a,
                    threshold: midpoint(order[i - 1].0, order[i].0),
                    score,
                });
            }
        }
    }
    best
}

/// In-place stable partition of `rows` by `x[attr] <= threshold`; returns
/// the size of the left part.
pub(crate) fn partition_rows<T: Real>(
    x: &FeatureMatrix<T>,
    rows: &mut [usize],
    attr: usize,
    threshold: T,
) -> usize {
    let col = x.column(attr);
    let (left, right): (Vec<usize>, Vec<usize>) = rows.iter().partition(|&&r| col[r] <= threshold);
    let nl = left.len();
    rows[..nl].copy_from_slice(&left);
    rows[nl..].copy_from_slice(&right);
    nl
}
