//! Linear SVM over one-hot encoded categories, trained with Pegasos-style
//! stochastic subgradient descent on the regularized hinge loss.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{check_codes, Classifier};
use crate::error::{Error, Result};
use crate::features::{Dataset, FeatureVector};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SvmParams {
    pub lambda: f64,
    pub epochs: usize,
    pub seed: u64,
}

impl Default for SvmParams {
    fn default() -> Self {
        SvmParams {
            lambda: 1e-4,
            epochs: 50,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearSvmModel {
    pub params: SvmParams,
    /// Offset of each feature's block in the one-hot layout.
    pub offsets: Vec<usize>,
    pub cardinalities: Vec<usize>,
    pub weights: Vec<f64>,
    pub bias: f64,
}

impl LinearSvmModel {
    pub fn fit(data: &Dataset, params: SvmParams) -> Result<Self> {
        if data.is_empty() {
            return Err(Error::EmptyTrainingSet);
        }
        let positives = data.positives();
        if positives == 0 || positives == data.len() {
            return Err(Error::SingleClass);
        }
        if !(params.lambda > 0.0 && params.lambda.is_finite()) || params.epochs == 0 {
            return Err(Error::InvalidParameter(
                "svm needs lambda > 0 and at least one epoch".into(),
            ));
        }
        let cardinalities = data.catalog.cardinalities();
        let offsets: Vec<usize> = cardinalities
            .iter()
            .scan(0, |acc, &k| {
                let start = *acc;
                *acc += k;
                Some(start)
            })
            .collect();
        let active: Vec<Vec<usize>> = data
            .rows
            .iter()
            .map(|r| r.codes().iter().zip(&offsets).map(|(&c, &o)| o + c as usize).collect())
            .collect();
        let ys: Vec<f64> = data.labels.iter().map(|&l| if l { 1.0 } else { -1.0 }).collect();

        // the bias is the last coordinate, fed by a constant input of 1
        let dim = data.catalog.one_hot_width();
        let mut w = vec![0.0; dim + 1];
        let mut order: Vec<usize> = (0..data.len()).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
        // the returned model is the mean of the iterates from the second
        // half of training
        let total_steps = params.epochs * data.len();
        let average_from = total_steps / 2;
        let mut avg = vec![0.0; dim + 1];
        let mut t = 0usize;
        for _ in 0..params.epochs {
            order.shuffle(&mut rng);
            for &i in &order {
                t += 1;
                let eta = 1.0 / (params.lambda * t as f64);
                let margin = ys[i] * (active[i].iter().map(|&j| w[j]).sum::<f64>() + w[dim]);
                let shrink = 1.0 - eta * params.lambda;
                w.iter_mut().for_each(|x| *x *= shrink);
                if margin < 1.0 {
                    for &j in &active[i] {
                        w[j] += eta * ys[i];
                    }
                    w[dim] += eta * ys[i];
                }
                if t > average_from {
                    avg.iter_mut().zip(&w).for_each(|(a, x)| *a += x);
                }
            }
        }
        let averaged = (total_steps - average_from) as f64;
        let mut w: Vec<f64> = avg.into_iter().map(|a| a / averaged).collect();
        let bias = w.pop().expect("bias coordinate");
        Ok(LinearSvmModel {
            params,
            offsets,
            cardinalities,
            weights: w,
            bias,
        })
    }

    /// Signed margin `w·x + b`.
    pub fn margin(&self, v: &FeatureVector) -> Result<f64> {
        check_codes(&self.cardinalities, v)?;
        Ok(v.codes()
            .iter()
            .zip(&self.offsets)
            .map(|(&c, &o)| self.weights[o + c as usize])
            .sum::<f64>()
            + self.bias)
    }
}

impl Classifier for LinearSvmModel {
    /// Positive only for a strictly positive margin.
    fn predict(&self, v: &FeatureVector) -> Result<bool> {
        Ok(self.margin(v)? > 0.0)
    }

    fn score(&self, v: &FeatureVector) -> Result<f64> {
        self.margin(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::features::{FeatureCatalog, FeatureDef};

    fn data(rows: &[([u16; 2], bool)]) -> Dataset {
        let catalog = FeatureCatalog::new(
            vec![FeatureDef::custom("a", &["x", "y"]), FeatureDef::custom("b", &["p", "q", "r"])],
            None,
        )
        .unwrap();
        Dataset::new(
            catalog,
            rows.iter().map(|(c, _)| FeatureVector::new(c.to_vec())).collect(),
            rows.iter().map(|&(_, l)| l).collect(),
        )
        .unwrap()
    }

    #[test]
    fn separable_pair() {
        let d = data(&[([0, 0], true), ([1, 2], false)]);
        let m = LinearSvmModel::fit(&d, SvmParams::default()).unwrap();
        assert_eq!(m.weights.len(), 5);
        for (v, &l) in d.rows.iter().zip(&d.labels) {
            assert_eq!(m.predict(v).unwrap(), l);
            assert_eq!(m.predict(v).unwrap(), m.score(v).unwrap() > 0.0);
        }
    }

    #[test]
    fn deterministic_given_seed() {
        let d = data(&[([0, 0], true), ([1, 2], false), ([0, 1], true), ([1, 1], false), ([0, 2], false)]);
        let a = LinearSvmModel::fit(&d, SvmParams::default()).unwrap();
        let b = LinearSvmModel::fit(&d, SvmParams::default()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn single_class_rejected() {
        let d = data(&[([0, 0], true), ([1, 2], true)]);
        assert!(matches!(LinearSvmModel::fit(&d, SvmParams::default()), Err(Error::SingleClass)));
    }
}
