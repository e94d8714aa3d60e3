//! Tabular regression toolkit for battle-royale finish placement: CSV
//! ingestion, cleaning, feature engineering, attribute selection, four model
//! families and cross-validated evaluation.
//!
//! Learners are generic over [`Real`] (`f32` or `f64`); the aliases below fix
//! the scalar to `f64`, which is what the pipeline and CLI use.

pub mod error;
pub mod eval;
pub mod features;
pub mod featsel;
pub mod forest;
pub mod gbm;
pub mod linalg;
pub mod m5p;
pub mod matrix;
pub mod mlp;
pub mod model;
pub mod pipeline;
pub mod scalar;
pub mod split;
pub mod synth;
pub mod table;

pub use error::{Error, Result};
pub use model::{Family, ModelSpec};
pub use scalar::Real;
pub use table::{Schema, Table};

pub type FeatureMatrix<T = f64> = matrix::FeatureMatrix<T>;
pub type ModelTree = m5p::ModelTree<f64>;
pub type Forest = forest::Forest<f64>;
pub type GbmModel = gbm::GbmModel<f64>;
pub type MlpModel = mlp::MlpModel<f64>;
pub type Model = model::Model<f64>;
pub type Predictions = eval::Predictions<f64>;
