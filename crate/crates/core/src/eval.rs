//! Error metrics and k-fold cross-validation.

use std::io::Write;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::ModelSpec;
use crate::scalar::Real;
use crate::table::Table;

/// Paired predictions and ground truth.
#[derive(Debug, Clone, PartialEq)]
pub struct Predictions<T> {
    predicted: Vec<T>,
    actual: Vec<T>,
}

impl<T: Real> Predictions<T> {
    pub fn new(predicted: Vec<T>, actual: Vec<T>) -> Result<Self> {
        if predicted.len() != actual.len() {
            return Err(Error::domain(format!(
                "{} predictions for {} actual values",
                predicted.len(),
                actual.len()
            )));
        }
        if predicted.is_empty() {
            return Err(Error::domain("no predictions to score"));
        }
        Ok(Predictions { predicted, actual })
    }

    pub fn len(&self) -> usize {
        self.actual.len()
    }

    pub fn is_empty(&self) -> bool {
        self.actual.is_empty()
    }

    pub fn predicted(&self) -> &[T] {
        &self.predicted
    }

    pub fn actual(&self) -> &[T] {
        &self.actual
    }
}

pub fn mae<T: Real>(p: &Predictions<T>) -> T {
    let s: T = p.actual.iter().zip(&p.predicted).map(|(&a, &b)| (a - b).abs()).sum();
    s / T::from_count(p.len())
}

pub fn rmse<T: Real>(p: &Predictions<T>) -> T {
    let s: T = p.actual.iter().zip(&p.predicted).map(|(&a, &b)| (a - b) * (a - b)).sum();
    (s / T::from_count(p.len())).sqrt()
}

pub fn mae_of<T: Real>(predicted: &[T], actual: &[T]) -> Result<T> {
    Ok(mae(&Predictions::new(predicted.to_vec(), actual.to_vec())?))
}

pub fn rmse_of<T: Real>(predicted: &[T], actual: &[T]) -> Result<T> {
    Ok(rmse(&Predictions::new(predicted.to_vec(), actual.to_vec())?))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoldPlan {
    pub k: usize,
    pub seed: u64,
    /// Fold index of every row.
    pub assignment: Vec<usize>,
}

impl FoldPlan {
    pub fn n_rows(&self) -> usize {
        self.assignment.len()
    }

    pub fn test_rows(&self, fold: usize) -> Vec<usize> {
        (0..self.n_rows()).filter(|&r| self.assignment[r] == fold).collect()
    }

    pub fn train_rows(&self, fold: usize) -> Vec<usize> {
        (0..self.n_rows()).filter(|&r| self.assignment[r] != fold).collect()
    }

    pub fn sizes(&self) -> Vec<usize> {
        let mut s = vec![0; self.k];
        for &f in &self.assignment {
            s[f] += 1;
        }
        s
    }
}

/// Seeded shuffle, then contiguous slices; the first `n % k` folds get one extra row.
pub fn kfold(n: usize, k: usize, seed: u64) -> Result<FoldPlan> {
    if k < 2 {
        return Err(Error::domain(format!("need at least 2 folds, got {k}")));
    }
    if k > n {
        return Err(Error::domain(format!("{k} folds requested for {n} rows")));
    }
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let mut assignment = vec![0; n];
    let (base, extra) = (n / k, n % k);
    let mut start = 0;
    for f in 0..k {
        let len = base + usize::from(f < extra);
        for &r in &perm[start..start + len] {
            assignment[r] = f;
        }
        start += len;
    }
    Ok(FoldPlan { k, seed, assignment })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldResult {
    pub fold: usize,
    pub n_test: usize,
    pub mae: Option<f64>,
    pub rmse: Option<f64>,
    pub seconds: f64,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub model: String,
    pub feature_set: String,
    pub folds: Vec<FoldResult>,
    pub mean_mae: f64,
    pub sd_mae: f64,
    pub mean_rmse: f64,
    pub sd_rmse: f64,
    pub note: String,
}

pub const SELECTION_NOTE: &str =
    "feature selection, when used, was fit once on the full table before splitting; fold scores can be optimistic";

/// Arithmetic mean and sample standard deviation (0 for a single value).
pub fn mean_sd(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let n = values.len() as f64;
    let m = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (m, 0.0);
    }
    let ss: f64 = values.iter().map(|v| (v - m) * (v - m)).sum();
    (m, (ss / (n - 1.0)).sqrt())
}

impl EvalReport {
    pub fn from_folds(model: &str, feature_set: &str, folds: Vec<FoldResult>) -> Self {
        let maes: Vec<f64> = folds.iter().filter_map(|f| f.mae).collect();
        let rmses: Vec<f64> = folds.iter().filter_map(|f| f.rmse).collect();
        let (mean_mae, sd_mae) = mean_sd(&maes);
        let (mean_rmse, sd_rmse) = mean_sd(&rmses);
        EvalReport {
            model: model.into(),
            feature_set: feature_set.into(),
            folds,
            mean_mae,
            sd_mae,
            mean_rmse,
            sd_rmse,
            note: SELECTION_NOTE.into(),
        }
    }

    pub fn n_failed(&self) -> usize {
        self.folds.iter().filter(|f| f.error.is_some()).count()
    }

    pub fn write_csv_rows<W: Write>(&self, w: &mut csv::Writer<W>) -> Result<()> {
        for f in &self.folds {
            w.write_record([
                self.model.clone(),
                self.feature_set.clone(),
                f.fold.to_string(),
                f.mae.map(|v| v.to_string()).unwrap_or_default(),
                f.rmse.map(|v| v.to_string()).unwrap_or_default(),
            ])?;
        }
        Ok(())
    }
}

pub const CSV_HEADER: [&str; 5] = ["model", "feature_set", "fold", "mae", "rmse"];

/// Writes one or more reports as a single `model,feature_set,fold,mae,rmse` table.
pub fn write_reports_csv<W: Write>(reports: &[EvalReport], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(CSV_HEADER)?;
    for r in reports {
        r.write_csv_rows(&mut w)?;
    }
    w.flush()?;
    Ok(())
}

/// Trains `spec` on each fold's complement and scores it on the fold, using
/// every non-identifier, non-target column of `table` as a feature.
pub fn cross_validate<T: Real>(spec: &ModelSpec, table: &Table, plan: &FoldPlan, feature_set: &str) -> Result<EvalReport> {
    if plan.n_rows() != table.n_rows() {
        return Err(Error::domain(format!(
            "fold plan covers {} rows but the table has {}",
            plan.n_rows(),
            table.n_rows()
        )));
    }
    let x = table.feature_matrix::<T>(&table.feature_names())?;
    let y: Vec<T> = table.target().iter().map(|&v| T::lit(v)).collect();
    let folds: Vec<FoldResult> = (0..plan.k)
        .into_par_iter()
        .map(|fold| {
            let start = Instant::now();
            let (train, test) = (plan.train_rows(fold), plan.test_rows(fold));
            let xt = x.select_rows(&train);
            let yt: Vec<T> = train.iter().map(|&r| y[r]).collect();
            let xs = x.select_rows(&test);
            let ys: Vec<T> = test.iter().map(|&r| y[r]).collect();
            let outcome = spec.fit(&xt, &yt).and_then(|m| m.predict(&xs)).and_then(|p| Predictions::new(p, ys));
            let seconds = start.elapsed().as_secs_f64();
            match outcome {
                Ok(p) => FoldResult {
                    fold,
                    n_test: test.len(),
                    mae: Some(mae(&p).as_f64()),
                    rmse: Some(rmse(&p).as_f64()),
                    seconds,
                    error: None,
                },
                Err(e) => {
                    log::warn!("{} fold {fold} failed: {e}", spec.family());
                    FoldResult { fold, n_test: test.len(), mae: None, rmse: None, seconds, error: Some(e.to_string()) }
                }
            }
        })
        .collect();
    let report = EvalReport::from_folds(spec.family().name(), feature_set, folds);
    if report.n_failed() * 2 > plan.k {
        return Err(Error::Evaluation(format!(
            "{} of {} folds failed for {}",
            report.n_failed(),
            plan.k,
            spec.family()
        )));
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::m5p::M5pParams;
    use proptest::prelude::*;

    #[test]
    fn metric_examples() {
        let p = Predictions::new(vec![0.5], vec![0.7]).unwrap();
        assert!((mae(&p) - 0.2f64).abs() < 1e-15);
        let p = Predictions::new(vec![0.0, 1.0], vec![1.0, 0.0]).unwrap();
        assert_eq!(mae(&p), 1.0);
        let p = Predictions::new(vec![0.0, 0.0], vec![3.0, 4.0]).unwrap();
        assert!((rmse(&p) - 12.5f64.sqrt()).abs() < 1e-15);
        let p = Predictions::new(vec![0.3, 0.9], vec![0.3, 0.9]).unwrap();
        assert_eq!((mae(&p), rmse(&p)), (0.0, 0.0));
        assert!(Predictions::new(vec![1.0], vec![1.0, 2.0]).is_err());
        assert!(Predictions::<f64>::new(vec![], vec![]).is_err());
    }

    #[test]
    fn fold_sizes() {
        assert_eq!(kfold(10, 10, 1).unwrap().sizes(), vec![1; 10]);
        assert_eq!(kfold(10, 3, 1).unwrap().sizes(), vec![4, 3, 3]);
        assert_eq!(kfold(10, 3, 9).unwrap(), kfold(10, 3, 9).unwrap());
        assert!(kfold(3, 4, 0).is_err());
        assert!(kfold(3, 1, 0).is_err());
    }

    fn linear_table(n: usize) -> Table {
        let a: Vec<f64> = (0..n).map(|i| (i % 17) as f64 / 17.0).collect();
        let b: Vec<f64> = (0..n).map(|i| (i * 7 % 23) as f64 / 23.0).collect();
        let y: Vec<f64> = a.iter().zip(&b).map(|(a, b)| 0.2 + 0.5 * a + 0.25 * b).collect();
        Table::from_numeric(vec![("a", a), ("b", b), ("winPlacePerc", y)], "winPlacePerc").unwrap()
    }

    #[test]
    fn m5p_on_linear_data() {
        let t = linear_table(200);
        let plan = kfold(200, 10, 3).unwrap();
        let r = cross_validate::<f64>(&ModelSpec::M5p(M5pParams::default()), &t, &plan, "all").unwrap();
        assert_eq!(r.folds.len(), 10);
        assert!(r.mean_mae < 1e-6, "{}", r.mean_mae);
        let recomputed = r.folds.iter().map(|f| f.mae.unwrap()).sum::<f64>() / 10.0;
        assert_eq!(recomputed, r.mean_mae);
    }

    #[test]
    fn baseline_constant_target() {
        let t = Table::from_numeric(vec![("a", (0..20).map(f64::from).collect()), ("winPlacePerc", vec![0.4; 20])], "winPlacePerc")
            .unwrap();
        let r = cross_validate::<f64>(&ModelSpec::Baseline, &t, &kfold(20, 5, 0).unwrap(), "all").unwrap();
        assert!(r.folds.iter().all(|f| f.mae == Some(0.0)));
    }

    #[test]
    fn failing_folds_are_an_error() {
        let t = linear_table(30);
        let spec = ModelSpec::Gbm(crate::gbm::GbmParams::new(2));
        assert!(matches!(cross_validate::<f64>(&spec, &t, &kfold(30, 3, 0).unwrap(), "all"), Err(Error::Evaluation(_))));
        assert!(cross_validate::<f64>(&ModelSpec::Baseline, &t, &kfold(20, 3, 0).unwrap(), "all").is_err());
    }

    #[test]
    fn csv_layout() {
        let t = linear_table(40);
        let r = cross_validate::<f64>(&ModelSpec::Baseline, &t, &kfold(40, 4, 0).unwrap(), "pre").unwrap();
        let mut out = Vec::new();
        write_reports_csv(&[r], &mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "model,feature_set,fold,mae,rmse");
        assert_eq!(lines.len(), 5);
        assert!(lines[1].starts_with("baseline,pre,0,"));
    }

    proptest! {
        #[test]
        fn metrics_match_oracle(pairs in proptest::collection::vec((-1e3f64..1e3, -1e3f64..1e3), 1..2000)) {
            let (p, a): (Vec<f64>, Vec<f64>) = pairs.iter().copied().unzip();
            let preds = Predictions::new(p.clone(), a.clone()).unwrap();
            let n = p.len() as f64;
            let m: f64 = p.iter().zip(&a).map(|(x, y)| (y - x).abs()).sum::<f64>() / n;
            let r: f64 = (p.iter().zip(&a).map(|(x, y)| (y - x).powi(2)).sum::<f64>() / n).sqrt();
            prop_assert!((mae(&preds) - m).abs() <= 1e-12 * m.max(1.0));
            prop_assert!((rmse(&preds) - r).abs() <= 1e-12 * r.max(1.0));
            prop_assert!(rmse(&preds) >= mae(&preds) * (1.0 - 1e-12));
        }

        #[test]
        fn folds_partition_rows(n in 2usize..500, k in 2usize..20, seed in any::<u64>()) {
            prop_assume!(k <= n);
            let plan = kfold(n, k, seed).unwrap();
            let mut seen = vec![false; n];
            for f in 0..k {
                for r in plan.test_rows(f) {
                    prop_assert!(!seen[r]);
                    seen[r] = true;
                }
            }
            prop_assert!(seen.iter().all(|&s| s));
            let sizes = plan.sizes();
            prop_assert!(sizes.iter().max().unwrap() - sizes.iter().min().unwrap() <= 1);
        }
    }
}
