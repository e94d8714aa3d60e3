//! Attribute ranking and selection: correlation, information gain, CFS and
//! a single-attribute M5P wrapper.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::eval::kfold;
use crate::m5p::{fit_m5p, M5pParams};
use crate::matrix::FeatureMatrix;
use crate::scalar::mean;
use crate::table::{ColumnKind, Table};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Correlation,
    InfoGain,
    Cfs,
    Classifier,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Correlation => "correlation",
            Method::InfoGain => "info_gain",
            Method::Cfs => "cfs",
            Method::Classifier => "classifier",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttributeScore {
    pub name: String,
    pub score: f64,
    /// 1 is best.
    pub rank: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionResult {
    pub method: Method,
    pub threshold: Option<f64>,
    pub scores: Vec<AttributeScore>,
    pub kept: Vec<String>,
}

impl SelectionResult {
    pub fn to_text(&self) -> String {
        let width = self.scores.iter().map(|s| s.name.len()).max().unwrap_or(4).max(9);
        let mut out = format!("{:>4}  {:>10}  {:<width$}\n", "rank", "score", "attribute");
        for s in &self.scores {
            let mark = if self.kept.contains(&s.name) { "" } else { "  (dropped)" };
            let _ = writeln!(out, "{:>4}  {:>10.6}  {:<width$}{mark}", s.rank, s.score, s.name);
        }
        out
    }
}

/// Sample Pearson correlation; 0 when either side has zero variance.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::domain(format!("pearson on sequences of length {} and {}", x.len(), y.len())));
    }
    if x.len() < 2 {
        return Err(Error::domain("pearson needs at least 2 values"));
    }
    let (mx, my) = (mean(x), mean(y));
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (&a, &b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Ok(0.0);
    }
    Ok((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

/// Candidate predictors: every non-identifier column other than the target,
/// in schema order. Categorical columns contribute their codes.
fn candidates(table: &Table, target: &str) -> Result<(Vec<String>, FeatureMatrix<f64>, Vec<f64>)> {
    let y = table.numeric(target)?.to_vec();
    let names: Vec<String> = table
        .schema()
        .columns()
        .iter()
        .filter(|c| c.kind != ColumnKind::Identifier && c.name != target && c.name != table.schema().target())
        .map(|c| c.name.clone())
        .collect();
    if names.is_empty() {
        return Err(Error::schema("no candidate attributes to score"));
    }
    let x = table.feature_matrix::<f64>(&names)?;
    Ok((names, x, y))
}

/// Sorts descending by score; ties keep schema order.
fn ranked(names: &[String], scores: &[f64]) -> Vec<AttributeScore> {
    let mut order: Vec<usize> = (0..names.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]));
    order
        .into_iter()
        .enumerate()
        .map(|(i, j)| AttributeScore { name: names[j].clone(), score: scores[j], rank: i + 1 })
        .collect()
}

pub fn rank_by_correlation(table: &Table, target: &str) -> Result<SelectionResult> {
    let (names, x, y) = candidates(table, target)?;
    let scores = x
        .columns()
        .par_iter()
        .map(|c| pearson(c, &y).map(f64::abs))
        .collect::<Result<Vec<_>>>()?;
    let scores = ranked(&names, &scores);
    let kept = scores.iter().map(|s| s.name.clone()).collect();
    Ok(SelectionResult { method: Method::Correlation, threshold: None, scores, kept })
}

pub const DEFAULT_TARGET_BINS: usize = 10;

/// Equal-frequency class labels for a continuous target.
pub fn discretize_target(y: &[f64], bins: usize) -> Result<Vec<usize>> {
    if bins < 2 {
        return Err(Error::domain(format!("target_bins must be at least 2, got {bins}")));
    }
    let mut sorted = y.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut distinct = sorted.clone();
    distinct.dedup();
    if distinct.len() < bins {
        return Err(Error::domain(format!(
            "target has {} distinct values, fewer than {bins} bins",
            distinct.len()
        )));
    }
    let n = y.len();
    let cuts: Vec<f64> = (1..bins).map(|b| sorted[b * n / bins]).collect();
    Ok(y.iter().map(|&v| cuts.partition_point(|&c| c <= v)).collect())
}

fn entropy(counts: &[usize], total: usize) -> f64 {
    if total == 0 {
        return 0.0;
    }
    let t = total as f64;
    counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / t;
            -p * p.log2()
        })
        .sum()
}

/// Best binary-cut information gain of `x` about `classes`, in bits, searching
/// only boundaries between neighbouring values whose classes differ.
pub fn info_gain(x: &[f64], classes: &[usize], n_classes: usize) -> f64 {
    let n = x.len();
    if n == 0 {
        return 0.0;
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| x[a].total_cmp(&x[b]));
    // class histograms of each run of equal x values
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut last = f64::NAN;
    for &i in &order {
        if groups.is_empty() || x[i] != last {
            groups.push(vec![0; n_classes]);
            last = x[i];
        }
        groups.last_mut().unwrap()[classes[i]] += 1;
    }
    let mut total = vec![0; n_classes];
    for &c in classes {
        total[c] += 1;
    }
    let h = entropy(&total, n);
    let pure = |g: &[usize]| {
        let mut nz = g.iter().enumerate().filter(|(_, &c)| c > 0);
        match (nz.next(), nz.next()) {
            (Some((k, _)), None) => Some(k),
            _ => None,
        }
    };
    let mut left = vec![0; n_classes];
    let mut nl = 0;
    let mut best = 0.0f64;
    for w in groups.windows(2) {
        for (l, &c) in left.iter_mut().zip(&w[0]) {
            *l += c;
        }
        nl += w[0].iter().sum::<usize>();
        if let (Some(a), Some(b)) = (pure(&w[0]), pure(&w[1])) {
            if a == b {
                continue;
            }
        }
        let right: Vec<usize> = total.iter().zip(&left).map(|(t, l)| t - l).collect();
        let cond = (nl as f64 * entropy(&left, nl) + (n - nl) as f64 * entropy(&right, n - nl)) / n as f64;
        best = best.max(h - cond);
    }
    best.max(0.0)
}

pub fn info_gain_rank(table: &Table, target: &str, target_bins: usize) -> Result<SelectionResult> {
    let (names, x, y) = candidates(table, target)?;
    let classes = discretize_target(&y, target_bins)?;
    let scores: Vec<f64> = x.columns().par_iter().map(|c| info_gain(c, &classes, target_bins)).collect();
    let scores = ranked(&names, &scores);
    let kept = scores.iter().map(|s| s.name.clone()).collect();
    Ok(SelectionResult { method: Method::InfoGain, threshold: None, scores, kept })
}

/// CFS merit `k * r_cf / sqrt(k + k(k-1) r_ff)` of `subset`, given absolute
/// feature-target correlations and the absolute feature-feature matrix.
pub fn cfs_merit(subset: &[usize], r_cf: &[f64], r_ff: &[Vec<f64>]) -> f64 {
    let k = subset.len();
    if k == 0 {
        return 0.0;
    }
    let kf = k as f64;
    let mean_cf = subset.iter().map(|&i| r_cf[i]).sum::<f64>() / kf;
    let mean_ff = if k > 1 {
        let mut s = 0.0;
        for (a, &i) in subset.iter().enumerate() {
            for &j in &subset[a + 1..] {
                s += r_ff[i][j];
            }
        }
        s / (kf * (kf - 1.0) / 2.0)
    } else {
        0.0
    };
    let denom = (kf + kf * (kf - 1.0) * mean_ff).sqrt();
    if denom == 0.0 { 0.0 } else { kf * mean_cf / denom }
}

/// Absolute correlations with the target and between every pair of columns.
pub fn correlation_tables(x: &FeatureMatrix<f64>, y: &[f64]) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    let m = x.n_features();
    let r_cf = x.columns().par_iter().map(|c| pearson(c, y).map(f64::abs)).collect::<Result<Vec<_>>>()?;
    let r_ff = (0..m)
        .into_par_iter()
        .map(|i| {
            (0..m)
                .map(|j| if i == j { Ok(1.0) } else { pearson(x.column(i), x.column(j)).map(f64::abs) })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((r_cf, r_ff))
}

/// Greedy forward CFS. `kept` is the subset at which no addition improves the
/// merit; the search then continues to place every remaining attribute, and
/// each score is the merit of the subset right after that attribute joined.
pub fn cfs_select(table: &Table, target: &str) -> Result<SelectionResult> {
    let (names, x, y) = candidates(table, target)?;
    let (r_cf, r_ff) = correlation_tables(&x, &y)?;
    let m = names.len();
    let mut chosen: Vec<usize> = Vec::with_capacity(m);
    let mut merits: Vec<f64> = Vec::with_capacity(m);
    let mut stop_at: Option<usize> = None;
    let mut current = 0.0;
    while chosen.len() < m {
        let mut best: Option<(usize, f64)> = None;
        let remaining: Vec<usize> = (0..m).filter(|j| !chosen.contains(j)).collect();
        for j in remaining {
            chosen.push(j);
            let merit = cfs_merit(&chosen, &r_cf, &r_ff);
            chosen.pop();
            if best.is_none_or(|(_, b)| merit > b) {
                best = Some((j, merit));
            }
        }
        let (j, merit) = best.unwrap();
        if stop_at.is_none() && !chosen.is_empty() && merit <= current {
            stop_at = Some(chosen.len());
        }
        chosen.push(j);
        merits.push(merit);
        current = merit;
    }
    let stop = stop_at.unwrap_or(m).max(1);
    let scores = chosen
        .iter()
        .zip(&merits)
        .enumerate()
        .map(|(i, (&j, &merit))| AttributeScore { name: names[j].clone(), score: merit, rank: i + 1 })
        .collect();
    let kept = chosen[..stop].iter().map(|&j| names[j].clone()).collect();
    Ok(SelectionResult { method: Method::Cfs, threshold: None, scores, kept })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassifierEvalParams {
    pub folds: usize,
    pub threshold: f64,
    pub seed: u64,
}

impl Default for ClassifierEvalParams {
    fn default() -> Self {
        ClassifierEvalParams { folds: 5, threshold: 0.01, seed: 42 }
    }
}

/// Mean held-out MAE improvement of a one-attribute M5P over predicting the
/// training mean.
pub fn classifier_attribute_eval(table: &Table, target: &str, params: &ClassifierEvalParams) -> Result<SelectionResult> {
    let (names, x, y) = candidates(table, target)?;
    if params.folds < 2 {
        return Err(Error::domain(format!("need at least 2 folds, got {}", params.folds)));
    }
    let plan = kfold(y.len(), params.folds, params.seed)?;
    let m5p = M5pParams::default();
    let scores = (0..names.len())
        .into_par_iter()
        .map(|a| {
            let xa = x.select_columns(&[a]);
            let mut gains = Vec::with_capacity(params.folds);
            for fold in 0..params.folds {
                let (train, test) = (plan.train_rows(fold), plan.test_rows(fold));
                let yt: Vec<f64> = train.iter().map(|&r| y[r]).collect();
                let ys: Vec<f64> = test.iter().map(|&r| y[r]).collect();
                let base = mean(&yt);
                let base_mae = ys.iter().map(|v| (v - base).abs()).sum::<f64>() / ys.len() as f64;
                match fit_m5p(&xa.select_rows(&train), &yt, &m5p).and_then(|t| t.predict(&xa.select_rows(&test))) {
                    Ok(p) => {
                        let mae = p.iter().zip(&ys).map(|(p, v)| (p - v).abs()).sum::<f64>() / ys.len() as f64;
                        gains.push(base_mae - mae);
                    }
                    Err(e) => log::warn!("attribute {} fold {fold} skipped: {e}", names[a]),
                }
            }
            if gains.is_empty() {
                return Err(Error::Evaluation(format!("every fold failed for attribute {}", names[a])));
            }
            Ok(gains.iter().sum::<f64>() / gains.len() as f64)
        })
        .collect::<Result<Vec<_>>>()?;
    let scores = ranked(&names, &scores);
    let kept = scores.iter().filter(|s| s.score >= params.threshold).map(|s| s.name.clone()).collect();
    Ok(SelectionResult { method: Method::Classifier, threshold: Some(params.threshold), scores, kept })
}

/// Keeps the selected attributes, the target and any identifier columns.
pub fn apply_selection(table: &Table, result: &SelectionResult) -> Result<Table> {
    for name in &result.kept {
        if !table.has_column(name) {
            return Err(Error::schema(format!("selected attribute `{name}` is not in the table")));
        }
    }
    let target = table.schema().target().to_string();
    table.retain_columns(|c| c.name == target || c.kind == ColumnKind::Identifier || result.kept.contains(&c.name))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn noise(n: usize, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n).map(|_| rng.random::<f64>()).collect()
    }

    #[test]
    fn pearson_examples() {
        assert!((pearson(&[1.0, 2.0, 3.0], &[2.0, 4.0, 6.0]).unwrap() - 1.0).abs() < 1e-15);
        assert!((pearson(&[1.0, 2.0, 3.0], &[3.0, 2.0, 1.0]).unwrap() + 1.0).abs() < 1e-15);
        assert_eq!(pearson(&[1.0, 2.0, 3.0], &[5.0, 5.0, 5.0]).unwrap(), 0.0);
        assert!(pearson(&[1.0], &[1.0]).is_err());
        assert!(pearson(&[1.0, 2.0], &[1.0]).is_err());
    }

    #[test]
    fn correlation_ranking() {
        let y = noise(200, 1);
        let t = Table::from_numeric(
            vec![("flat", vec![1.0; 200]), ("noise", noise(200, 2)), ("copy", y.clone()), ("winPlacePerc", y)],
            "winPlacePerc",
        )
        .unwrap();
        let r = rank_by_correlation(&t, "winPlacePerc").unwrap();
        assert_eq!(r.scores[0].name, "copy");
        assert!((r.scores[0].score - 1.0).abs() < 1e-12);
        assert_eq!(r.scores[2].name, "flat");
        assert_eq!(r.scores[2].score, 0.0);
        assert_eq!(r.scores.iter().map(|s| s.rank).collect::<Vec<_>>(), vec![1, 2, 3]);
    }

    #[test]
    fn info_gain_examples() {
        let x = [1.0, 2.0, 3.0, 4.0];
        let classes = discretize_target(&[0.1, 0.2, 0.8, 0.9], 2).unwrap();
        assert_eq!(classes, vec![0, 0, 1, 1]);
        assert!((info_gain(&x, &classes, 2) - 1.0).abs() < 1e-15);
        // brute force over the three cuts
        let brute = (1..4)
            .map(|c| {
                let h = |s: &[usize]| {
                    let ones = s.iter().filter(|&&k| k == 1).count();
                    entropy(&[s.len() - ones, ones], s.len())
                };
                1.0 - (c as f64 * h(&classes[..c]) + (4 - c) as f64 * h(&classes[c..])) / 4.0
            })
            .fold(0.0, f64::max);
        assert_eq!(brute, 1.0);
        assert_eq!(info_gain(&[7.0; 4], &classes, 2), 0.0);
        assert!(discretize_target(&[0.1, 0.1, 0.2], 3).is_err());
    }

    #[test]
    fn cfs_examples() {
        let r_cf = vec![0.5, 0.5];
        let r_ff = vec![vec![1.0, 1.0], vec![1.0, 1.0]];
        assert!((cfs_merit(&[0], &r_cf, &r_ff) - 0.5).abs() < 1e-15);
        assert!((cfs_merit(&[0, 1], &r_cf, &r_ff) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn cfs_rejects_duplicate() {
        let y = noise(150, 3);
        let near: Vec<f64> = y.iter().zip(noise(150, 4)).map(|(a, b)| a + 0.3 * b).collect();
        let t = Table::from_numeric(
            vec![
                ("a", near.clone()),
                ("b", near),
                ("c", noise(150, 5)),
                ("winPlacePerc", y),
            ],
            "winPlacePerc",
        )
        .unwrap();
        let r = cfs_select(&t, "winPlacePerc").unwrap();
        assert_eq!(r.kept, vec!["a".to_string()]);
        assert_eq!(r.scores.len(), 3);
    }

    #[test]
    fn classifier_eval() {
        let y = noise(300, 6);
        let t = Table::from_numeric(
            vec![("noise", noise(300, 7)), ("copy", y.clone()), ("winPlacePerc", y.clone())],
            "winPlacePerc",
        )
        .unwrap();
        let r = classifier_attribute_eval(&t, "winPlacePerc", &ClassifierEvalParams::default()).unwrap();
        assert_eq!(r.scores[0].name, "copy");
        let base = y.iter().map(|v| (v - mean(&y)).abs()).sum::<f64>() / 300.0;
        assert!((r.scores[0].score - base).abs() < 0.02, "{} vs {base}", r.scores[0].score);
        assert!(r.scores[1].score.abs() < 0.01, "{}", r.scores[1].score);
        assert_eq!(r.kept, vec!["copy".to_string()]);
        let again = classifier_attribute_eval(&t, "winPlacePerc", &ClassifierEvalParams::default()).unwrap();
        assert_eq!(r, again);
    }

    #[test]
    fn selection_projection() {
        let t = Table::from_numeric(
            vec![("a", vec![1.0, 2.0]), ("b", vec![3.0, 4.0]), ("winPlacePerc", vec![0.0, 1.0])],
            "winPlacePerc",
        )
        .unwrap();
        let mut r = rank_by_correlation(&t, "winPlacePerc").unwrap();
        assert_eq!(apply_selection(&t, &r).unwrap(), t);
        r.kept = vec!["b".into()];
        assert_eq!(apply_selection(&t, &r).unwrap().column_names(), vec!["b", "winPlacePerc"]);
        r.kept = vec!["zzz".into()];
        assert!(matches!(apply_selection(&t, &r), Err(Error::Schema(_))));
    }

    #[test]
    fn json_shape() {
        let r = SelectionResult {
            method: Method::InfoGain,
            threshold: None,
            scores: vec![AttributeScore { name: "a".into(), score: 0.5, rank: 1 }],
            kept: vec!["a".into()],
        };
        let v: serde_json::Value = serde_json::to_value(&r).unwrap();
        assert_eq!(v["method"], "info_gain");
        assert_eq!(v["scores"][0]["rank"], 1);
        assert!(r.to_text().contains("0.500000"));
    }

    fn brute_best_single(r_cf: &[f64], r_ff: &[Vec<f64>]) -> f64 {
        (0..r_cf.len()).map(|i| cfs_merit(&[i], r_cf, r_ff)).fold(0.0, f64::max)
    }

    proptest! {
        #[test]
        fn pearson_invariances(
            pairs in proptest::collection::vec((-100.0f64..100.0, -100.0f64..100.0), 3..80),
            a in 0.1f64..10.0,
            b in -50.0f64..50.0,
        ) {
            let (x, y): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
            let r = pearson(&x, &y).unwrap();
            prop_assert!((-1.0..=1.0).contains(&r));
            prop_assert!((pearson(&y, &x).unwrap() - r).abs() < 1e-12);
            let scaled: Vec<f64> = x.iter().map(|v| a * v + b).collect();
            prop_assert!((pearson(&scaled, &y).unwrap() - r).abs() < 1e-9);
            let neg: Vec<f64> = x.iter().map(|v| -v).collect();
            prop_assert!((pearson(&neg, &y).unwrap() + r).abs() < 1e-12);
        }

        #[test]
        fn info_gain_monotone_invariant(
            x in proptest::collection::vec(-5.0f64..5.0, 20..120),
            seed in any::<u64>(),
        ) {
            let y = noise(x.len(), seed);
            let classes = discretize_target(&y, 4).unwrap();
            let g = info_gain(&x, &classes, 4);
            let t: Vec<f64> = x.iter().map(|v| v.exp() * 3.0 + 1.0).collect();
            prop_assert!((info_gain(&t, &classes, 4) - g).abs() < 1e-12);
            prop_assert!(g >= 0.0);
        }

        #[test]
        fn cfs_merit_matches_formula(cols in proptest::collection::vec(proptest::collection::vec(-1.0f64..1.0, 30), 1..=5), seed in any::<u64>()) {
            let y = noise(30, seed);
            let names: Vec<String> = (0..cols.len()).map(|i| format!("x{i}")).collect();
            let x = FeatureMatrix::new(names, cols.clone()).unwrap();
            let (r_cf, r_ff) = correlation_tables(&x, &y).unwrap();
            let m = cols.len();
            for mask in 1u32..(1 << m) {
                let s: Vec<usize> = (0..m).filter(|i| mask & (1 << i) != 0).collect();
                let k = s.len() as f64;
                let cf = s.iter().map(|&i| pearson(&cols[i], &y).unwrap().abs()).sum::<f64>() / k;
                let mut ff = 0.0;
                let mut pairs = 0.0;
                for (a, &i) in s.iter().enumerate() {
                    for &j in &s[a + 1..] {
                        ff += pearson(&cols[i], &cols[j]).unwrap().abs();
                        pairs += 1.0;
                    }
                }
                let ff = if pairs > 0.0 { ff / pairs } else { 0.0 };
                let denom = (k + k * (k - 1.0) * ff).sqrt();
                let direct = if denom == 0.0 { 0.0 } else { k * cf / denom };
                prop_assert!((cfs_merit(&s, &r_cf, &r_ff) - direct).abs() < 1e-12);
            }
            let mut table_cols: Vec<(&str, Vec<f64>)> = Vec::new();
            let labels = ["x0", "x1", "x2", "x3", "x4"];
            for (i, c) in cols.iter().enumerate() {
                table_cols.push((labels[i], c.clone()));
            }
            table_cols.push(("winPlacePerc", y.clone()));
            let t = Table::from_numeric(table_cols, "winPlacePerc").unwrap();
            let r = cfs_select(&t, "winPlacePerc").unwrap();
            let idx: Vec<usize> = r.kept.iter().map(|n| labels.iter().position(|l| l == n).unwrap()).collect();
            prop_assert!(cfs_merit(&idx, &r_cf, &r_ff) >= brute_best_single(&r_cf, &r_ff) - 1e-12);
        }

        #[test]
        fn correlation_rank_affine_invariant(seed in any::<u64>(), a in 0.1f64..10.0, b in -5.0f64..5.0) {
            let y = noise(60, seed);
            let c1 = noise(60, seed ^ 1);
            let c2: Vec<f64> = y.iter().zip(noise(60, seed ^ 2)).map(|(p, q)| p + q).collect();
            let mk = |c2: Vec<f64>| Table::from_numeric(vec![("p", c1.clone()), ("q", c2), ("winPlacePerc", y.clone())], "winPlacePerc").unwrap();
            let r1 = rank_by_correlation(&mk(c2.clone()), "winPlacePerc").unwrap();
            let r2 = rank_by_correlation(&mk(c2.iter().map(|v| a * v + b).collect()), "winPlacePerc").unwrap();
            let n1: Vec<_> = r1.scores.iter().map(|s| &s.name).collect();
            let n2: Vec<_> = r2.scores.iter().map(|s| &s.name).collect();
            prop_assert_eq!(n1, n2);
        }
    }
}
