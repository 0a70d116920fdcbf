//! Stratified k-fold cross-validation and the comparison metrics.
//!
//! Held-out predictions from every fold are pooled into one confusion
//! matrix and one score list before computing accuracy, recall, precision,
//! F-measure and ROC AUC. The positive class is "readmitted".

use std::thread;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::classifiers::{Classifier, ModelSpec};
use crate::error::{Error, Result};
use crate::features::Dataset;

pub const DEFAULT_FOLDS: usize = 10;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FoldAssignment {
    pub k: usize,
    pub seed: u64,
    /// Fold index of each record.
    pub folds: Vec<usize>,
}

impl FoldAssignment {
    pub fn test_indices(&self, fold: usize) -> Vec<usize> {
        (0..self.folds.len()).filter(|&i| self.folds[i] == fold).collect()
    }

    pub fn train_indices(&self, fold: usize) -> Vec<usize> {
        (0..self.folds.len()).filter(|&i| self.folds[i] != fold).collect()
    }
}

/// Shuffles each class with the seeded generator and deals it round-robin
/// over the folds. Positives are dealt first; negatives continue from the
/// fold after the last positive so fold sizes stay balanced too.
pub fn stratified_folds(labels: &[bool], k: usize, seed: u64) -> Result<FoldAssignment> {
    if k < 2 {
        return Err(Error::InvalidParameter(format!("need at least 2 folds, got {k}")));
    }
    let mut positives: Vec<usize> = (0..labels.len()).filter(|&i| labels[i]).collect();
    let mut negatives: Vec<usize> = (0..labels.len()).filter(|&i| !labels[i]).collect();
    for (name, class) in [("positive", &positives), ("negative", &negatives)] {
        if class.len() < k {
            return Err(Error::InvalidParameter(format!(
                "{name} class has {} records, fewer than {k} folds",
                class.len()
            )));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    positives.shuffle(&mut rng);
    negatives.shuffle(&mut rng);
    let mut folds = vec![0; labels.len()];
    for (slot, &i) in positives.iter().chain(&negatives).enumerate() {
        folds[i] = slot % k;
    }
    Ok(FoldAssignment { k, seed, folds })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub tp: u64,
    pub fp: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
    pub tn: u64,
}

impl ConfusionMatrix {
    pub fn from_predictions(predicted: &[bool], actual: &[bool]) -> Self {
        let mut cm = ConfusionMatrix::default();
        for (&p, &a) in predicted.iter().zip(actual) {
            cm.record(p, a);
        }
        cm
    }

    pub fn record(&mut self, predicted: bool, actual: bool) {
        match (predicted, actual) {
            (true, true) => self.tp += 1,
            (true, false) => self.fp += 1,
            (false, true) => self.fn_ += 1,
            (false, false) => self.tn += 1,
        }
    }

    pub fn total(&self) -> u64 {
        self.tp + self.fp + self.fn_ + self.tn
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub accuracy: f64,
    pub precision: f64,
    pub recall: f64,
    pub f_measure: f64,
}

fn ratio_or_zero(num: u64, den: u64) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

/// Harmonic mean of precision and recall; 0 when both are 0.
pub fn f_measure(precision: f64, recall: f64) -> f64 {
    if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    }
}

pub fn metrics(cm: &ConfusionMatrix) -> Result<Metrics> {
    if cm.total() == 0 {
        return Err(Error::InvalidParameter("empty confusion matrix".into()));
    }
    let precision = ratio_or_zero(cm.tp, cm.tp + cm.fp);
    let recall = ratio_or_zero(cm.tp, cm.tp + cm.fn_);
    Ok(Metrics {
        accuracy: ratio_or_zero(cm.tp + cm.tn, cm.total()),
        precision,
        recall,
        f_measure: f_measure(precision, recall),
    })
}

/// Probability that a random positive outscores a random negative, ties
/// counting one half; computed from mid-ranks (Mann–Whitney U).
pub fn roc_auc(scores: &[f64], labels: &[bool]) -> Result<f64> {
    if scores.len() != labels.len() {
        return Err(Error::InvalidParameter(format!(
            "{} scores but {} labels",
            scores.len(),
            labels.len()
        )));
    }
    if scores.iter().any(|s| s.is_nan()) {
        return Err(Error::InvalidParameter("NaN score".into()));
    }
    let n_pos = labels.iter().filter(|&&l| l).count();
    let n_neg = labels.len() - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return Err(Error::SingleClass);
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));

    let mut positive_rank_sum = 0.0;
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j < order.len() && scores[order[j]] == scores[order[i]] {
            j += 1;
        }
        // ranks i+1 ..= j share their mean
        let mid_rank = (i + 1 + j) as f64 / 2.0;
        let tied_pos = order[i..j].iter().filter(|&&idx| labels[idx]).count();
        positive_rank_sum += mid_rank * tied_pos as f64;
        i = j;
    }
    let (p, n) = (n_pos as f64, n_neg as f64);
    Ok((positive_rank_sum - p * (p + 1.0) / 2.0) / (p * n))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationResult {
    pub model_name: String,
    pub model_spec: String,
    pub folds: usize,
    pub seed: u64,
    pub confusion: ConfusionMatrix,
    pub accuracy: f64,
    pub recall: f64,
    pub precision: f64,
    pub f_measure: f64,
    pub auc: f64,
}

/// Pooled held-out outputs, indexed like the dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct HeldOut {
    pub predictions: Vec<bool>,
    pub scores: Vec<f64>,
}

/// Fits on k-1 folds and predicts the remaining one, for every fold. Folds
/// run concurrently; results land at their record indices so the output
/// does not depend on scheduling.
pub fn held_out_predictions(data: &Dataset, spec: &ModelSpec, folds: &FoldAssignment) -> Result<HeldOut> {
    let per_fold: Vec<Result<Vec<(usize, bool, f64)>>> = thread::scope(|scope| {
        let handles: Vec<_> = (0..folds.k)
            .map(|fold| {
                scope.spawn(move || -> Result<Vec<(usize, bool, f64)>> {
                    let model = spec.fit(&data.subset(&folds.train_indices(fold)))?;
                    folds
                        .test_indices(fold)
                        .into_iter()
                        .map(|i| Ok((i, model.predict(&data.rows[i])?, model.score(&data.rows[i])?)))
                        .collect()
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("fold worker panicked"))
            .collect()
    });
    let mut out = HeldOut {
        predictions: vec![false; data.len()],
        scores: vec![0.0; data.len()],
    };
    for fold in per_fold {
        for (i, p, s) in fold? {
            out.predictions[i] = p;
            out.scores[i] = s;
        }
    }
    Ok(out)
}

pub fn cross_validate(data: &Dataset, spec: &ModelSpec, k: usize, seed: u64) -> Result<EvaluationResult> {
    let folds = stratified_folds(&data.labels, k, seed)?;
    let held = held_out_predictions(data, spec, &folds)?;
    let confusion = ConfusionMatrix::from_predictions(&held.predictions, &data.labels);
    let m = metrics(&confusion)?;
    Ok(EvaluationResult {
        model_name: spec.to_string(),
        model_spec: spec.code(),
        folds: k,
        seed,
        confusion,
        accuracy: m.accuracy,
        recall: m.recall,
        precision: m.precision,
        f_measure: m.f_measure,
        auc: roc_auc(&held.scores, &data.labels)?,
    })
}

/// Accuracy of always predicting the larger class (ties: negative).
pub fn majority_baseline(labels: &[bool]) -> f64 {
    let pos = labels.iter().filter(|&&l| l).count();
    pos.max(labels.len() - pos) as f64 / labels.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn balanced_small_folds() {
        let labels: Vec<bool> = (0..10).map(|i| i < 5).collect();
        let a = stratified_folds(&labels, 5, 9).unwrap();
        for f in 0..5 {
            let test = a.test_indices(f);
            assert_eq!(test.iter().filter(|&&i| labels[i]).count(), 1);
            assert_eq!(test.len(), 2);
        }
        assert_eq!(a, stratified_folds(&labels, 5, 9).unwrap());
    }

    #[test]
    fn uneven_class_sizes() {
        let labels: Vec<bool> = (0..50).map(|i| i < 23).collect();
        let a = stratified_folds(&labels, 10, 1).unwrap();
        for f in 0..10 {
            let test = a.test_indices(f);
            let pos = test.iter().filter(|&&i| labels[i]).count();
            assert!((2..=3).contains(&pos));
            assert!((2..=3).contains(&(test.len() - pos)));
        }
    }

    #[test]
    fn fold_preconditions() {
        let labels = [true, true, false, false, false];
        assert!(stratified_folds(&labels, 3, 0).is_err());
        assert!(stratified_folds(&labels, 1, 0).is_err());
        assert!(stratified_folds(&labels, 2, 0).is_ok());
    }

    #[test]
    fn hand_metrics() {
        let m = metrics(&ConfusionMatrix { tp: 3, fp: 1, fn_: 2, tn: 4 }).unwrap();
        assert!((m.accuracy - 0.7).abs() < 1e-15);
        assert!((m.precision - 0.75).abs() < 1e-15);
        assert!((m.recall - 0.6).abs() < 1e-15);
        assert!((m.f_measure - 2.0 / 3.0).abs() < 1e-15);

        let perfect = metrics(&ConfusionMatrix { tp: 4, fp: 0, fn_: 0, tn: 6 }).unwrap();
        assert_eq!(
            [perfect.accuracy, perfect.precision, perfect.recall, perfect.f_measure],
            [1.0; 4]
        );
        let none = metrics(&ConfusionMatrix { tp: 0, fp: 0, fn_: 3, tn: 2 }).unwrap();
        assert_eq!((none.precision, none.recall, none.f_measure), (0.0, 0.0, 0.0));
        assert!(metrics(&ConfusionMatrix::default()).is_err());
    }

    #[test]
    fn published_row_is_self_consistent() {
        assert_eq!(format!("{:.2}", f_measure(0.725, 0.774)), "0.75");
    }

    #[test]
    fn auc_examples() {
        assert_eq!(roc_auc(&[0.9, 0.8, 0.1], &[true, true, false]).unwrap(), 1.0);
        assert_eq!(roc_auc(&[0.9, 0.4, 0.4], &[true, true, false]).unwrap(), 0.75);
        assert_eq!(roc_auc(&[0.3; 6], &[true, false, false, true, false, true]).unwrap(), 0.5);
        assert!(matches!(roc_auc(&[0.1, 0.2], &[true, true]), Err(Error::SingleClass)));
        assert!(roc_auc(&[f64::NAN, 0.2], &[true, false]).is_err());
    }

    #[test]
    fn baseline() {
        assert_eq!(majority_baseline(&[true, false, false, false]), 0.75);
    }
}
