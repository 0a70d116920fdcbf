//! k-nearest neighbors under overlap (Hamming) distance.

use super::{check_width, Classifier};
use crate::error::{Error, Result};
use crate::features::{Dataset, FeatureVector};

#[derive(Debug, Clone, PartialEq)]
pub struct KnnModel {
    pub k: usize,
    width: usize,
    /// Row-major training codes.
    codes: Vec<u16>,
    labels: Vec<bool>,
}

/// Number of positions where the two vectors disagree.
pub fn overlap_distance(a: &[u16], b: &[u16]) -> usize {
    a.iter().zip(b).filter(|(x, y)| x != y).count()
}

impl KnnModel {
    pub fn fit(data: &Dataset, k: usize) -> Result<Self> {
        if data.is_empty() {
            return Err(Error::EmptyTrainingSet);
        }
        if k == 0 || k > data.len() {
            return Err(Error::InvalidParameter(format!(
                "k = {k} must be between 1 and the training size {}",
                data.len()
            )));
        }
        let width = data.catalog.len();
        let codes = data.rows.iter().flat_map(|r| r.codes().iter().copied()).collect();
        Ok(KnnModel {
            k,
            width,
            codes,
            labels: data.labels.clone(),
        })
    }

    pub fn training_size(&self) -> usize {
        self.labels.len()
    }

    /// Indices of the k nearest training records, closest first; equal
    /// distances resolve by training index.
    pub fn neighbors(&self, v: &FeatureVector) -> Result<Vec<usize>> {
        check_width(self.width, v)?;
        let q = v.codes();
        let w = self.width;
        let distances: Vec<usize> = (0..self.labels.len())
            .map(|i| overlap_distance(&self.codes[i * w..(i + 1) * w], q))
            .collect();
        // counting sort by distance keeps index order within a distance
        let mut buckets = vec![Vec::new(); self.width + 1];
        for (i, &d) in distances.iter().enumerate() {
            buckets[d].push(i);
        }
        Ok(buckets.into_iter().flatten().take(self.k).collect())
    }

    fn positive_votes(&self, v: &FeatureVector) -> Result<usize> {
        Ok(self.neighbors(v)?.into_iter().filter(|&i| self.labels[i]).count())
    }
}

impl Classifier for KnnModel {
    /// Majority vote; a tied vote is negative.
    fn predict(&self, v: &FeatureVector) -> Result<bool> {
        Ok(2 * self.positive_votes(v)? > self.k)
    }

    /// Fraction of positive neighbors.
    fn score(&self, v: &FeatureVector) -> Result<f64> {
        Ok(self.positive_votes(v)? as f64 / self.k as f64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::features::{FeatureCatalog, FeatureDef};

    fn data(rows: &[([u16; 2], bool)]) -> Dataset {
        let catalog = FeatureCatalog::new(
            vec![FeatureDef::custom("a", &["0", "1", "2"]), FeatureDef::custom("b", &["0", "1", "2"])],
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
    fn exact_match_wins_with_k1() {
        let d = data(&[([0, 0], false), ([1, 2], true), ([2, 2], false)]);
        let m = KnnModel::fit(&d, 1).unwrap();
        assert!(m.predict(&FeatureVector::new(vec![1, 2])).unwrap());
        assert_eq!(m.neighbors(&FeatureVector::new(vec![1, 2])).unwrap(), vec![1]);
    }

    #[test]
    fn vote_tie_is_negative() {
        let d = data(&[([0, 0], true), ([0, 1], false), ([2, 2], true)]);
        let m = KnnModel::fit(&d, 2).unwrap();
        let q = FeatureVector::new(vec![0, 0]);
        assert!(!m.predict(&q).unwrap());
        assert_eq!(m.score(&q).unwrap(), 0.5);
    }

    #[test]
    fn distance_ties_by_index() {
        let d = data(&[([1, 1], true), ([0, 2], false), ([2, 0], false), ([0, 0], true)]);
        let m = KnnModel::fit(&d, 2).unwrap();
        assert_eq!(m.neighbors(&FeatureVector::new(vec![2, 2])).unwrap(), vec![1, 2]);
        // rows 0, 2 and 3 are all at distance 1
        assert_eq!(m.neighbors(&FeatureVector::new(vec![1, 0])).unwrap(), vec![0, 2]);
    }

    #[test]
    fn invalid_k_and_width() {
        let d = data(&[([0, 0], true)]);
        assert!(KnnModel::fit(&d, 0).is_err());
        assert!(KnnModel::fit(&d, 2).is_err());
        let m = KnnModel::fit(&d, 1).unwrap();
        assert!(m.predict(&FeatureVector::new(vec![0])).is_err());
    }
}
