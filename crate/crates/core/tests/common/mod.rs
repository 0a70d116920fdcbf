//! Independent reference implementations used by the integration and
//! acceptance tests. Nothing here calls into the code under test beyond
//! building datasets.

#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use readmit::features::{FeatureCatalog, FeatureDef};
use readmit::{Dataset, FeatureVector, TreeParams};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Catalog of custom features `f0..` with categories `c0..`.
pub fn catalog(cardinalities: &[usize]) -> FeatureCatalog {
    let defs = cardinalities
        .iter()
        .enumerate()
        .map(|(f, &k)| {
            let cats: Vec<String> = (0..k).map(|c| format!("c{c}")).collect();
            let refs: Vec<&str> = cats.iter().map(String::as_str).collect();
            FeatureDef::custom(format!("f{f}"), &refs)
        })
        .collect();
    FeatureCatalog::new(defs, None).expect("valid catalog")
}

pub fn dataset(cardinalities: &[usize], rows: Vec<Vec<u16>>, labels: Vec<bool>) -> Dataset {
    Dataset::new(
        catalog(cardinalities),
        rows.into_iter().map(FeatureVector::new).collect(),
        labels,
    )
    .expect("valid dataset")
}

/// Random dataset whose label leans on feature 0 so splits are not pure noise.
pub fn random_dataset(rng: &mut ChaCha8Rng, n: usize, cardinalities: &[usize]) -> Dataset {
    let mut rows = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for _ in 0..n {
        let row: Vec<u16> = cardinalities.iter().map(|&k| rng.random_range(0..k as u16)).collect();
        let lean = if row[0] == 0 { 0.7 } else { 0.35 };
        labels.push(rng.random_bool(lean));
        rows.push(row);
    }
    dataset(cardinalities, rows, labels)
}

/// All-pairs AUC with ties counted one half.
pub fn brute_auc(scores: &[f64], labels: &[bool]) -> f64 {
    let mut wins = 0.0;
    let mut pairs = 0.0;
    for (i, &li) in labels.iter().enumerate() {
        if !li {
            continue;
        }
        for (j, &lj) in labels.iter().enumerate() {
            if lj {
                continue;
            }
            pairs += 1.0;
            if scores[i] > scores[j] {
                wins += 1.0;
            } else if scores[i] == scores[j] {
                wins += 0.5;
            }
        }
    }
    wins / pairs
}

/// Exhaustive k-NN: sort every training point by (distance, index).
pub fn knn_oracle(data: &Dataset, k: usize, query: &[u16]) -> (bool, f64) {
    let mut order: Vec<(usize, usize)> = data
        .rows
        .iter()
        .enumerate()
        .map(|(i, r)| (r.codes().iter().zip(query).filter(|(a, b)| a != b).count(), i))
        .collect();
    order.sort();
    let pos = order[..k].iter().filter(|&&(_, i)| data.labels[i]).count();
    (2 * pos > k, pos as f64 / k as f64)
}

/// Naive Bayes posterior of the positive class from raw counts.
pub fn nb_oracle(data: &Dataset, alpha: f64, query: &[u16]) -> f64 {
    let cards = data.catalog.cardinalities();
    let mut joint = [0.0f64; 2];
    for (class, slot) in joint.iter_mut().enumerate() {
        let members: Vec<usize> = (0..data.len()).filter(|&i| usize::from(data.labels[i]) == class).collect();
        let mut p = members.len() as f64 / data.len() as f64;
        for (f, &q) in query.iter().enumerate() {
            let hits = members.iter().filter(|&&i| data.rows[i].codes()[f] == q).count() as f64;
            p *= (hits + alpha) / (members.len() as f64 + alpha * cards[f] as f64);
        }
        *slot = p;
    }
    joint[1] / (joint[0] + joint[1])
}

fn entropy_bits(neg: f64, pos: f64) -> f64 {
    let n = neg + pos;
    [neg, pos]
        .iter()
        .filter(|&&c| c > 0.0)
        .map(|&c| -(c / n) * (c / n).log2())
        .sum()
}

/// Gain ratio of splitting `indices` on `feature`, computed from scratch.
pub fn oracle_gain_ratio(data: &Dataset, indices: &[usize], feature: usize) -> f64 {
    let k = data.catalog.feature(feature).cardinality();
    let mut table = vec![[0.0f64; 2]; k];
    for &i in indices {
        table[data.rows[i].codes()[feature] as usize][usize::from(data.labels[i])] += 1.0;
    }
    let n = indices.len() as f64;
    let parent_pos = table.iter().map(|c| c[1]).sum::<f64>();
    let mut remainder = 0.0;
    let mut split_info = 0.0;
    for c in &table {
        let m = c[0] + c[1];
        if m > 0.0 {
            remainder += m / n * entropy_bits(c[0], c[1]);
            split_info -= m / n * (m / n).log2();
        }
    }
    if split_info <= 0.0 {
        return 0.0;
    }
    (entropy_bits(n - parent_pos, parent_pos) - remainder) / split_info
}

/// Root feature a gain-ratio tree should choose on `indices`, restricted to
/// `candidates`: the admissible feature (two or more branches holding at
/// least `min_leaf` records) with the highest ratio, earliest on ties.
/// `None` when the root should be a leaf.
pub fn oracle_root(data: &Dataset, indices: &[usize], candidates: &[usize], params: TreeParams) -> Option<usize> {
    let pos = indices.iter().filter(|&&i| data.labels[i]).count();
    if pos == 0 || pos == indices.len() || params.max_depth == 0 || indices.len() < 2 * params.min_leaf {
        return None;
    }
    let mut best: Option<(usize, f64)> = None;
    for &f in candidates {
        let k = data.catalog.feature(f).cardinality();
        let mut sizes = vec![0usize; k];
        for &i in indices {
            sizes[data.rows[i].codes()[f] as usize] += 1;
        }
        if sizes.iter().filter(|&&s| s >= params.min_leaf).count() < 2 {
            continue;
        }
        let r = oracle_gain_ratio(data, indices, f);
        if best.is_none_or(|(_, b)| r > b + 1e-12) {
            best = Some((f, r));
        }
    }
    best.filter(|&(_, r)| r >= params.min_gain_ratio).map(|(f, _)| f)
}
