//! Config-driven wiring of the stages: load, engineer, clean, select, train,
//! predict, evaluate and compare.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::eval::{cross_validate, kfold, EvalReport};
use crate::features::{engineer, one_hot_match_type, FeatureRecipe, ENGINEERED};
use crate::featsel::{
    apply_selection, cfs_select, classifier_attribute_eval, info_gain_rank, rank_by_correlation,
    ClassifierEvalParams, Method, SelectionResult, DEFAULT_TARGET_BINS,
};
use crate::forest::ForestParams;
use crate::gbm::GbmParams;
use crate::m5p::M5pParams;
use crate::matrix::FeatureMatrix;
use crate::mlp::MlpParams;
use crate::model::{Family, Model, ModelSpec};
use crate::table::{clean, load_csv, load_csv_inferred, CleanRules, ColumnData, Schema, Table, MATCH_TYPE};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FeatureStage {
    pub enabled: bool,
    pub recipe: FeatureRecipe,
}

impl Default for FeatureStage {
    fn default() -> Self {
        FeatureStage { enabled: true, recipe: FeatureRecipe::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SelectionStage {
    /// `None` skips selection (except in `compare`, which falls back to the
    /// classifier evaluator).
    pub method: Option<Method>,
    /// Minimum score kept by the classifier evaluator.
    pub threshold: f64,
    /// Keep only the best `top_k` attributes of a ranking method.
    pub top_k: Option<usize>,
    pub folds: usize,
    pub target_bins: usize,
    pub seed: u64,
}

impl Default for SelectionStage {
    fn default() -> Self {
        SelectionStage {
            method: None,
            threshold: 0.01,
            top_k: None,
            folds: 5,
            target_bins: DEFAULT_TARGET_BINS,
            seed: 42,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelSection {
    pub m5p: M5pParams,
    pub forest: ForestParams,
    /// Needs at least `n_iterations`.
    pub gbm: Option<GbmParams>,
    /// Needs at least `epochs`.
    pub mlp: Option<MlpParams>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvalStage {
    pub folds: usize,
    pub seed: u64,
}

impl Default for EvalStage {
    fn default() -> Self {
        EvalStage { folds: 10, seed: 42 }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    /// Inline schema; inferred from the CSV header when absent.
    pub schema: Option<Schema>,
    pub clean: CleanRules,
    pub features: FeatureStage,
    pub selection: SelectionStage,
    pub model: ModelSection,
    pub eval: EvalStage,
}

impl PipelineConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.features.recipe.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)?;
        Self::from_json(&text).map_err(|e| match e {
            Error::Config(m) => Error::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn spec(&self, family: Family) -> Result<ModelSpec> {
        Ok(match family {
            Family::Baseline => ModelSpec::Baseline,
            Family::M5p => ModelSpec::M5p(self.model.m5p),
            Family::Forest => ModelSpec::Forest(self.model.forest),
            Family::Gbm => ModelSpec::Gbm(
                self.model.gbm.clone().ok_or_else(|| Error::Config("model.gbm.n_iterations is required".into()))?,
            ),
            Family::Mlp => ModelSpec::Mlp(
                self.model.mlp.clone().ok_or_else(|| Error::Config("model.mlp.epochs is required".into()))?,
            ),
        })
    }
}

pub fn load_table(path: impl AsRef<Path>, cfg: &PipelineConfig) -> Result<Table> {
    match &cfg.schema {
        Some(schema) => load_csv(path, schema),
        None => load_csv_inferred(path),
    }
}

fn has_engineered(table: &Table) -> bool {
    ENGINEERED.iter().all(|n| table.has_column(n))
}

/// Engineers features (skipped when already present) and optionally one-hot
/// encodes `matchType`. Rows are never dropped.
pub fn engineer_stage(table: &Table, stage: &FeatureStage) -> Result<Table> {
    let mut t = if stage.enabled && !has_engineered(table) {
        engineer(table, &stage.recipe)?
    } else {
        table.clone()
    };
    if stage.recipe.one_hot_match_type && t.categorical(MATCH_TYPE).is_ok() {
        t = one_hot_match_type(&t)?;
    }
    Ok(t)
}

/// The training-side preparation: [`engineer_stage`] followed by cleaning.
pub fn prepare(table: &Table, cfg: &PipelineConfig) -> Result<Table> {
    clean(&engineer_stage(table, &cfg.features)?, cfg.clean)
}

pub fn select(table: &Table, stage: &SelectionStage, method: Method) -> Result<SelectionResult> {
    let target = table.schema().target().to_string();
    let mut result = match method {
        Method::Correlation => rank_by_correlation(table, &target)?,
        Method::InfoGain => info_gain_rank(table, &target, stage.target_bins)?,
        Method::Cfs => cfs_select(table, &target)?,
        Method::Classifier => classifier_attribute_eval(
            table,
            &target,
            &ClassifierEvalParams { folds: stage.folds, threshold: stage.threshold, seed: stage.seed },
        )?,
    };
    if let (Some(k), Method::Correlation | Method::InfoGain) = (stage.top_k, method) {
        result.kept.truncate(k);
    }
    Ok(result)
}

/// A trained model with what is needed to rebuild its inputs from raw rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelEnvelope {
    pub format_version: u32,
    pub family: Family,
    pub features: Vec<String>,
    /// Dictionaries of categorical features, so codes mean the same at
    /// prediction time.
    pub categories: Vec<(String, Vec<String>)>,
    pub feature_stage: FeatureStage,
    pub model: Model<f64>,
}

pub const ENVELOPE_VERSION: u32 = 1;

/// Fits `spec` on every non-identifier, non-target column of a prepared table.
pub fn train(table: &Table, spec: &ModelSpec, stage: &FeatureStage) -> Result<ModelEnvelope> {
    let features = table.feature_names();
    let x = table.feature_matrix::<f64>(&features)?;
    let model = spec.fit(&x, table.target())?;
    let categories = table
        .category_dictionaries()
        .into_iter()
        .filter(|(n, _)| features.contains(n))
        .collect();
    Ok(ModelEnvelope {
        format_version: ENVELOPE_VERSION,
        family: spec.family(),
        features,
        categories,
        feature_stage: stage.clone(),
        model,
    })
}

impl ModelEnvelope {
    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, serde_json::to_string(self)?)?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let env: Self = serde_json::from_str(&std::fs::read_to_string(path)?)?;
        if env.format_version != ENVELOPE_VERSION {
            return Err(Error::Config(format!("unsupported model format version {}", env.format_version)));
        }
        Ok(env)
    }

    /// Feature matrix for `table` in the model's column order, re-coding
    /// categorical columns through the training dictionaries.
    pub fn inputs(&self, table: &Table) -> Result<FeatureMatrix<f64>> {
        let t = engineer_stage(table, &self.feature_stage)?;
        let mut columns = Vec::with_capacity(self.features.len());
        for name in &self.features {
            let col = match t.column(name)? {
                ColumnData::Numeric(v) => v.clone(),
                ColumnData::Categorical(c) => {
                    let dict = self
                        .categories
                        .iter()
                        .find(|(n, _)| n == name)
                        .map(|(_, d)| d)
                        .ok_or_else(|| Error::schema(format!("model has no dictionary for `{name}`")))?;
                    (0..c.len())
                        .map(|r| {
                            let v = c.value(r);
                            dict.iter().position(|d| d == v).map(|k| k as f64).ok_or_else(|| {
                                Error::domain(format!("unseen value `{v}` in column `{name}` at row {}", r + 1))
                            })
                        })
                        .collect::<Result<Vec<_>>>()?
                }
            };
            columns.push(col);
        }
        FeatureMatrix::new(self.features.clone(), columns)
    }

    pub fn predict(&self, table: &Table) -> Result<Vec<f64>> {
        self.model.predict(&self.inputs(table)?)
    }
}

pub fn evaluate(table: &Table, spec: &ModelSpec, stage: &EvalStage, feature_set: &str) -> Result<EvalReport> {
    let plan = kfold(table.n_rows(), stage.folds, stage.seed)?;
    cross_validate::<f64>(spec, table, &plan, feature_set)
}

pub const COMPARE_FAMILIES: [Family; 4] = [Family::M5p, Family::Forest, Family::Gbm, Family::Mlp];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub selection: SelectionResult,
    pub reports: Vec<EvalReport>,
}

/// Every model family on all features ("pre") and on the selected ones
/// ("post"), with one shared fold plan.
pub fn compare(table: &Table, cfg: &PipelineConfig) -> Result<Comparison> {
    let specs = COMPARE_FAMILIES.iter().map(|&f| cfg.spec(f)).collect::<Result<Vec<_>>>()?;
    let method = cfg.selection.method.unwrap_or(Method::Classifier);
    let selection = select(table, &cfg.selection, method)?;
    if selection.kept.is_empty() {
        return Err(Error::Evaluation("feature selection kept no attributes".into()));
    }
    let post = apply_selection(table, &selection)?;
    let plan = kfold(table.n_rows(), cfg.eval.folds, cfg.eval.seed)?;
    let mut reports = Vec::with_capacity(2 * specs.len());
    for (set, t) in [("pre", table), ("post", &post)] {
        for spec in &specs {
            log::info!("cross-validating {} on {set}-selection features", spec.family());
            reports.push(cross_validate::<f64>(spec, t, &plan, set)?);
        }
    }
    Ok(Comparison { selection, reports })
}
