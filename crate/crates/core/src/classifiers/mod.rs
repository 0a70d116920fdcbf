//! The four model families: decision tree, naive Bayes, k-NN and linear SVM.
//!
//! All of them consume categorical [`FeatureVector`]s and produce a hard
//! label (true = readmitted) plus a real-valued risk score. Ties resolve to
//! the negative class everywhere.

mod bayes;
mod knn;
mod svm;
mod tree;

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::{Dataset, FeatureVector};
use crate::io;

pub use bayes::NaiveBayesModel;
pub use knn::{overlap_distance, KnnModel};
pub use svm::{LinearSvmModel, SvmParams};
pub use tree::{
    entropy, gain_ratio, leaf_score, DecisionTreeModel, TreeNode, TreeParams, RATIO_TIE_EPS,
};

pub trait Classifier {
    fn predict(&self, v: &FeatureVector) -> Result<bool>;
    fn score(&self, v: &FeatureVector) -> Result<f64>;
}

pub(crate) fn check_width(expected: usize, v: &FeatureVector) -> Result<()> {
    if v.len() == expected {
        Ok(())
    } else {
        Err(Error::MalformedVector {
            expected,
            found: v.len(),
        })
    }
}

pub(crate) fn check_codes(cardinalities: &[usize], v: &FeatureVector) -> Result<()> {
    check_width(cardinalities.len(), v)?;
    match v
        .codes()
        .iter()
        .zip(cardinalities)
        .position(|(&c, &k)| c as usize >= k)
    {
        Some(f) => Err(Error::Domain(format!("code out of range at feature {f}"))),
        None => Ok(()),
    }
}

pub const DEFAULT_NB_ALPHA: f64 = 1.0;

/// A model family with its hyperparameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ModelSpec {
    DecisionTree(TreeParams),
    NaiveBayes { alpha: f64 },
    Knn { k: usize },
    Svm(SvmParams),
}

impl ModelSpec {
    /// The six model rows of the comparison table.
    pub fn table_rows() -> Vec<ModelSpec> {
        "dt,nb,knn:2,knn:5,knn:10,svm"
            .split(',')
            .map(|s| s.parse().expect("built-in specs parse"))
            .collect()
    }

    /// Parses a comma-separated list such as `dt,nb,knn:5,svm`.
    pub fn parse_list(text: &str) -> Result<Vec<ModelSpec>> {
        text.split(',').map(str::trim).map(str::parse).collect()
    }

    /// Short code as accepted by the parser.
    pub fn code(&self) -> String {
        match self {
            ModelSpec::DecisionTree(_) => "dt".into(),
            ModelSpec::NaiveBayes { .. } => "nb".into(),
            ModelSpec::Knn { k } => format!("knn:{k}"),
            ModelSpec::Svm(_) => "svm".into(),
        }
    }

    pub fn with_seed(self, seed: u64) -> Self {
        match self {
            ModelSpec::Svm(p) => ModelSpec::Svm(SvmParams { seed, ..p }),
            other => other,
        }
    }

    pub fn fit(&self, data: &Dataset) -> Result<TrainedModel> {
        Ok(match *self {
            ModelSpec::DecisionTree(p) => TrainedModel::DecisionTree(DecisionTreeModel::fit(data, p)?),
            ModelSpec::NaiveBayes { alpha } => TrainedModel::NaiveBayes(NaiveBayesModel::fit(data, alpha)?),
            ModelSpec::Knn { k } => TrainedModel::Knn(KnnModel::fit(data, k)?),
            ModelSpec::Svm(p) => TrainedModel::Svm(LinearSvmModel::fit(data, p)?),
        })
    }
}

/// Display names follow the comparison table's row labels.
impl fmt::Display for ModelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelSpec::DecisionTree(_) => f.write_str("Decision Tree"),
            ModelSpec::NaiveBayes { .. } => f.write_str("Naïve-Bayes"),
            ModelSpec::Knn { k } => write!(f, "K-NN (K = {k})"),
            ModelSpec::Svm(_) => f.write_str("SVM"),
        }
    }
}

impl FromStr for ModelSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dt" => Ok(ModelSpec::DecisionTree(TreeParams::default())),
            "nb" => Ok(ModelSpec::NaiveBayes {
                alpha: DEFAULT_NB_ALPHA,
            }),
            "svm" => Ok(ModelSpec::Svm(SvmParams::default())),
            other => match other.strip_prefix("knn:").map(str::parse::<usize>) {
                Some(Ok(k)) if k >= 1 => Ok(ModelSpec::Knn { k }),
                _ => Err(Error::InvalidParameter(format!(
                    "unknown model spec {other:?} (expected dt, nb, knn:<k> or svm)"
                ))),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum TrainedModel {
    DecisionTree(DecisionTreeModel),
    NaiveBayes(NaiveBayesModel),
    Knn(KnnModel),
    Svm(LinearSvmModel),
}

impl Classifier for TrainedModel {
    fn predict(&self, v: &FeatureVector) -> Result<bool> {
        match self {
            TrainedModel::DecisionTree(m) => m.predict(v),
            TrainedModel::NaiveBayes(m) => m.predict(v),
            TrainedModel::Knn(m) => m.predict(v),
            TrainedModel::Svm(m) => m.predict(v),
        }
    }

    fn score(&self, v: &FeatureVector) -> Result<f64> {
        match self {
            TrainedModel::DecisionTree(m) => m.score(v),
            TrainedModel::NaiveBayes(m) => m.score(v),
            TrainedModel::Knn(m) => m.score(v),
            TrainedModel::Svm(m) => m.score(v),
        }
    }
}

/// On-disk form of a trained model. k-NN keeps no parameters beyond `k`
/// and points at the feature matrix it memorizes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum ModelRecord {
    DecisionTree(DecisionTreeModel),
    NaiveBayes(NaiveBayesModel),
    Knn { k: usize, training_matrix: String },
    Svm(LinearSvmModel),
}

/// Writes `model` as JSON. A k-NN model also needs the path of its training
/// matrix, stored verbatim (relative paths resolve against the model file).
pub fn save_model(model: &TrainedModel, path: impl AsRef<Path>, training_matrix: Option<&str>) -> Result<()> {
    let record = match model {
        TrainedModel::DecisionTree(m) => ModelRecord::DecisionTree(m.clone()),
        TrainedModel::NaiveBayes(m) => ModelRecord::NaiveBayes(m.clone()),
        TrainedModel::Svm(m) => ModelRecord::Svm(m.clone()),
        TrainedModel::Knn(m) => ModelRecord::Knn {
            k: m.k,
            training_matrix: training_matrix
                .ok_or_else(|| Error::InvalidParameter("k-NN model needs its training matrix path".into()))?
                .to_owned(),
        },
    };
    io::write_json(&record, path)
}

pub fn load_model(path: impl AsRef<Path>) -> Result<TrainedModel> {
    let path = path.as_ref();
    Ok(match io::read_json::<ModelRecord>(path)? {
        ModelRecord::DecisionTree(m) => TrainedModel::DecisionTree(m),
        ModelRecord::NaiveBayes(m) => TrainedModel::NaiveBayes(m),
        ModelRecord::Svm(m) => TrainedModel::Svm(m),
        ModelRecord::Knn { k, training_matrix } => {
            let base = path.parent().unwrap_or_else(|| Path::new(""));
            let data = io::load_feature_matrix(base.join(training_matrix))?;
            TrainedModel::Knn(KnnModel::fit(&data, k)?)
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spec_parsing() {
        let specs = ModelSpec::parse_list("dt,nb,knn:2,knn:5,knn:10,svm").unwrap();
        assert_eq!(specs, ModelSpec::table_rows());
        let names: Vec<String> = specs.iter().map(ToString::to_string).collect();
        assert_eq!(
            names,
            ["Decision Tree", "Naïve-Bayes", "K-NN (K = 2)", "K-NN (K = 5)", "K-NN (K = 10)", "SVM"]
        );
        assert_eq!(specs[3].code(), "knn:5");
        for bad in ["knn", "knn:0", "knn:x", "rf", ""] {
            assert!(bad.parse::<ModelSpec>().is_err(), "{bad}");
        }
    }
}
