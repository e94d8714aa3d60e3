//! Family-agnostic fitting and prediction.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::forest::{fit_forest, Forest, ForestParams};
use crate::gbm::{fit_gbm, GbmModel, GbmParams};
use crate::m5p::{fit_m5p, M5pParams, ModelTree};
use crate::matrix::{check_targets, FeatureMatrix};
use crate::mlp::{fit_mlp, MlpModel, MlpParams};
use crate::scalar::{mean, Real};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Baseline,
    M5p,
    Forest,
    Gbm,
    Mlp,
}

impl Family {
    pub const ALL: [Family; 5] = [Family::Baseline, Family::M5p, Family::Forest, Family::Gbm, Family::Mlp];

    pub fn name(self) -> &'static str {
        match self {
            Family::Baseline => "baseline",
            Family::M5p => "m5p",
            Family::Forest => "forest",
            Family::Gbm => "gbm",
            Family::Mlp => "mlp",
        }
    }
}

impl std::fmt::Display for Family {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Family {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Family::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| format!("unknown model family `{s}`"))
    }
}

/// A model family together with its hyperparameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", content = "params", rename_all = "lowercase")]
pub enum ModelSpec {
    Baseline,
    M5p(M5pParams),
    Forest(ForestParams),
    Gbm(GbmParams),
    Mlp(MlpParams),
}

impl ModelSpec {
    pub fn family(&self) -> Family {
        match self {
            ModelSpec::Baseline => Family::Baseline,
            ModelSpec::M5p(_) => Family::M5p,
            ModelSpec::Forest(_) => Family::Forest,
            ModelSpec::Gbm(_) => Family::Gbm,
            ModelSpec::Mlp(_) => Family::Mlp,
        }
    }

    pub fn fit<T: Real>(&self, x: &FeatureMatrix<T>, y: &[T]) -> Result<Model<T>> {
        Ok(match self {
            ModelSpec::Baseline => Model::Baseline(MeanModel::fit(x, y)?),
            ModelSpec::M5p(p) => Model::M5p(fit_m5p(x, y, p)?),
            ModelSpec::Forest(p) => Model::Forest(fit_forest(x, y, p)?),
            ModelSpec::Gbm(p) => Model::Gbm(fit_gbm(x, y, p)?),
            ModelSpec::Mlp(p) => Model::Mlp(fit_mlp(x, y, p)?),
        })
    }
}

/// Predicts the training mean for every row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeanModel<T> {
    pub features: Vec<String>,
    pub mean: T,
}

impl<T: Real> MeanModel<T> {
    pub fn fit(x: &FeatureMatrix<T>, y: &[T]) -> Result<Self> {
        check_targets(x, y)?;
        if y.is_empty() {
            return Err(crate::Error::EmptyInput("no training rows".into()));
        }
        Ok(MeanModel { features: x.names().to_vec(), mean: mean(y) })
    }

    pub fn predict(&self, x: &FeatureMatrix<T>) -> Result<Vec<T>> {
        Ok(vec![self.mean; x.n_rows()])
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", content = "model", rename_all = "lowercase")]
pub enum Model<T> {
    Baseline(MeanModel<T>),
    M5p(ModelTree<T>),
    Forest(Forest<T>),
    Gbm(GbmModel<T>),
    Mlp(MlpModel<T>),
}

impl<T: Real> Model<T> {
    pub fn family(&self) -> Family {
        match self {
            Model::Baseline(_) => Family::Baseline,
            Model::M5p(_) => Family::M5p,
            Model::Forest(_) => Family::Forest,
            Model::Gbm(_) => Family::Gbm,
            Model::Mlp(_) => Family::Mlp,
        }
    }

    pub fn features(&self) -> &[String] {
        match self {
            Model::Baseline(m) => &m.features,
            Model::M5p(m) => &m.features,
            Model::Forest(m) => &m.features,
            Model::Gbm(m) => &m.features,
            Model::Mlp(m) => &m.features,
        }
    }

    pub fn predict(&self, x: &FeatureMatrix<T>) -> Result<Vec<T>> {
        match self {
            Model::Baseline(m) => m.predict(x),
            Model::M5p(m) => m.predict(x),
            Model::Forest(m) => m.predict(x),
            Model::Gbm(m) => m.predict(x),
            Model::Mlp(m) => m.predict(x),
        }
    }
}
