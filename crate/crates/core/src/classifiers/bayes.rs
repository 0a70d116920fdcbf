//! Categorical naive Bayes with add-alpha smoothing.

use serde::{Deserialize, Serialize};

use super::{check_codes, Classifier};
use crate::error::{Error, Result};
use crate::features::{Dataset, FeatureVector};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NaiveBayesModel {
    pub alpha: f64,
    /// `[negative, positive]` record counts.
    pub class_counts: [u32; 2],
    /// `counts[feature][class][category]`.
    pub counts: Vec<[Vec<u32>; 2]>,
}

impl NaiveBayesModel {
    pub fn fit(data: &Dataset, alpha: f64) -> Result<Self> {
        if data.is_empty() {
            return Err(Error::EmptyTrainingSet);
        }
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::InvalidParameter(format!("alpha {alpha} must be positive")));
        }
        let mut counts: Vec<[Vec<u32>; 2]> = data
            .catalog
            .cardinalities()
            .into_iter()
            .map(|k| [vec![0; k], vec![0; k]])
            .collect();
        let mut class_counts = [0u32; 2];
        for (row, &label) in data.rows.iter().zip(&data.labels) {
            let class = usize::from(label);
            class_counts[class] += 1;
            for (f, &code) in row.codes().iter().enumerate() {
                counts[f][class][code as usize] += 1;
            }
        }
        Ok(NaiveBayesModel {
            alpha,
            class_counts,
            counts,
        })
    }

    /// Smoothed P(category | class) for one feature.
    pub fn likelihood(&self, feature: usize, class: usize, code: u16) -> f64 {
        let table = &self.counts[feature][class];
        (f64::from(table[code as usize]) + self.alpha)
            / (f64::from(self.class_counts[class]) + self.alpha * table.len() as f64)
    }

    /// Unnormalized `[negative, positive]` log joint probabilities.
    fn log_joint(&self, v: &FeatureVector) -> Result<[f64; 2]> {
        let cards: Vec<usize> = self.counts.iter().map(|c| c[0].len()).collect();
        check_codes(&cards, v)?;
        let total = f64::from(self.class_counts[0] + self.class_counts[1]);
        let mut joint = [0.0; 2];
        for (class, lj) in joint.iter_mut().enumerate() {
            *lj = (f64::from(self.class_counts[class]) / total).ln();
            for (f, &code) in v.codes().iter().enumerate() {
                *lj += self.likelihood(f, class, code).ln();
            }
        }
        Ok(joint)
    }

    /// Posterior `[negative, positive]`, normalized in log space.
    pub fn posterior(&self, v: &FeatureVector) -> Result<[f64; 2]> {
        let [ln, lp] = self.log_joint(v)?;
        let m = ln.max(lp);
        let (en, ep) = ((ln - m).exp(), (lp - m).exp());
        Ok([en / (en + ep), ep / (en + ep)])
    }
}

impl Classifier for NaiveBayesModel {
    fn predict(&self, v: &FeatureVector) -> Result<bool> {
        let [ln, lp] = self.log_joint(v)?;
        Ok(lp > ln)
    }

    fn score(&self, v: &FeatureVector) -> Result<f64> {
        self.posterior(v).map(|p| p[1])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::features::{FeatureCatalog, FeatureDef};

    fn one_feature(rows: &[(u16, bool)]) -> Dataset {
        let catalog = FeatureCatalog::new(vec![FeatureDef::custom("f", &["A", "B", "C"])], None).unwrap();
        Dataset::new(
            catalog,
            rows.iter().map(|&(c, _)| FeatureVector::new(vec![c])).collect(),
            rows.iter().map(|&(_, l)| l).collect(),
        )
        .unwrap()
    }

    #[test]
    fn hand_computed_posterior() {
        let catalog = FeatureCatalog::new(vec![FeatureDef::custom("f", &["A", "B"])], None).unwrap();
        let d = Dataset::new(
            catalog,
            vec![FeatureVector::new(vec![0]), FeatureVector::new(vec![1])],
            vec![true, false],
        )
        .unwrap();
        let m = NaiveBayesModel::fit(&d, 1.0).unwrap();
        let post = m.posterior(&FeatureVector::new(vec![0])).unwrap();
        // (0.5 * 2/3) / (0.5 * 2/3 + 0.5 * 1/3)
        assert!((post[1] - 2.0 / 3.0).abs() < 1e-12);
        assert!((post[0] + post[1] - 1.0).abs() < 1e-12);
        assert!(m.predict(&FeatureVector::new(vec![0])).unwrap());
        assert!(!m.predict(&FeatureVector::new(vec![1])).unwrap());
    }

    #[test]
    fn unseen_category_keeps_nonzero_posterior() {
        let m = NaiveBayesModel::fit(&one_feature(&[(0, true), (1, false), (0, false)]), 1.0).unwrap();
        let p = m.score(&FeatureVector::new(vec![2])).unwrap();
        assert!(p > 0.0 && p < 1.0);
    }

    #[test]
    fn smoothed_tables_sum_to_one() {
        let m = NaiveBayesModel::fit(&one_feature(&[(0, true), (1, false), (0, false), (2, true)]), 0.5).unwrap();
        for class in 0..2 {
            let s: f64 = (0..3).map(|c| m.likelihood(0, class, c)).sum();
            assert!((s - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn tie_goes_negative() {
        let m = NaiveBayesModel::fit(&one_feature(&[(0, true), (0, false)]), 1.0).unwrap();
        assert!(!m.predict(&FeatureVector::new(vec![0])).unwrap());
        assert!((m.score(&FeatureVector::new(vec![0])).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn single_class_training_is_finite() {
        let m = NaiveBayesModel::fit(&one_feature(&[(0, true), (1, true)]), 1.0).unwrap();
        assert_eq!(m.score(&FeatureVector::new(vec![0])).unwrap(), 1.0);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(NaiveBayesModel::fit(&one_feature(&[]), 1.0), Err(Error::EmptyTrainingSet)));
        assert!(NaiveBayesModel::fit(&one_feature(&[(0, true)]), 0.0).is_err());
        let m = NaiveBayesModel::fit(&one_feature(&[(0, true)]), 1.0).unwrap();
        assert!(m.score(&FeatureVector::new(vec![0, 1])).is_err());
        assert!(m.score(&FeatureVector::new(vec![3])).is_err());
    }
}
