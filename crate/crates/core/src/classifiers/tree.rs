//! Multiway categorical decision tree grown by gain ratio.
//!
//! Each internal node splits on one feature with one child per category, so
//! a feature is used at most once along any root-to-leaf path. There is no
//! post-pruning; growth is bounded by the stopping rules in [`TreeParams`].

use serde::{Deserialize, Serialize};

use super::{check_width, Classifier};
use crate::error::{Error, Result};
use crate::features::{Dataset, FeatureVector};

/// Ratios closer than this are treated as ties (lower feature index wins).
pub const RATIO_TIE_EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TreeParams {
    pub min_leaf: usize,
    pub max_depth: usize,
    pub min_gain_ratio: f64,
}

impl Default for TreeParams {
    fn default() -> Self {
        TreeParams {
            min_leaf: 20,
            max_depth: 12,
            min_gain_ratio: 1e-6,
        }
    }
}

impl TreeParams {
    /// Grows until leaves are pure or features run out.
    pub fn unbounded() -> Self {
        TreeParams {
            min_leaf: 1,
            max_depth: usize::MAX,
            min_gain_ratio: 0.0,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.min_leaf == 0 {
            return Err(Error::InvalidParameter("min_leaf must be at least 1".into()));
        }
        if !(self.min_gain_ratio >= 0.0) {
            return Err(Error::InvalidParameter("min_gain_ratio must be non-negative".into()));
        }
        Ok(())
    }
}

/// Shannon entropy in bits of a class distribution given as counts.
pub fn entropy(counts: &[f64]) -> Result<f64> {
    let total: f64 = counts.iter().sum();
    if counts.iter().any(|&c| c < 0.0 || !c.is_finite()) {
        return Err(Error::InvalidParameter("class counts must be non-negative".into()));
    }
    if !(total > 0.0) {
        return Err(Error::InvalidParameter("entropy of an empty distribution".into()));
    }
    Ok(entropy_unchecked(counts, total))
}

fn entropy_unchecked(counts: &[f64], total: f64) -> f64 {
    counts
        .iter()
        .filter(|&&c| c > 0.0)
        .map(|&c| {
            let p = c / total;
            -p * p.log2()
        })
        .sum()
}

/// Information gain of a split divided by its split information (the
/// entropy of the child sizes). Zero when the split information is zero.
pub fn gain_ratio(parent: &[f64], children: &[Vec<f64>]) -> Result<f64> {
    let classes = parent.len();
    for (class, &p) in parent.iter().enumerate() {
        let sum: f64 = children.iter().map(|c| c.get(class).copied().unwrap_or(0.0)).sum();
        if children.iter().any(|c| c.len() != classes) || (sum - p).abs() > 1e-9 * p.max(1.0) {
            return Err(Error::InvalidParameter(
                "child counts do not partition the parent".into(),
            ));
        }
    }
    let total: f64 = parent.iter().sum();
    let parent_entropy = entropy(parent)?;
    let sizes: Vec<f64> = children.iter().map(|c| c.iter().sum()).collect();
    let mut remainder = 0.0;
    for (child, &size) in children.iter().zip(&sizes) {
        if size > 0.0 {
            remainder += size / total * entropy_unchecked(child, size);
        }
    }
    let split_info = entropy_unchecked(&sizes, total);
    Ok(ratio(parent_entropy - remainder, split_info))
}

fn ratio(gain: f64, split_info: f64) -> f64 {
    if split_info <= RATIO_TIE_EPS {
        0.0
    } else {
        (gain / split_info).max(0.0)
    }
}

/// Gain ratio from per-category `[negative, positive]` counts.
fn category_gain_ratio(per_category: &[[u32; 2]]) -> f64 {
    let mut parent = [0.0f64; 2];
    for c in per_category {
        parent[0] += f64::from(c[0]);
        parent[1] += f64::from(c[1]);
    }
    let total = parent[0] + parent[1];
    let parent_entropy = entropy_unchecked(&parent, total);
    let mut remainder = 0.0;
    let mut sizes = Vec::with_capacity(per_category.len());
    for c in per_category {
        let size = f64::from(c[0] + c[1]);
        if size > 0.0 {
            let counts = [f64::from(c[0]), f64::from(c[1])];
            remainder += size / total * entropy_unchecked(&counts, size);
        }
        sizes.push(size);
    }
    ratio(parent_entropy - remainder, entropy_unchecked(&sizes, total))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "node", rename_all = "snake_case")]
pub enum TreeNode {
    Leaf {
        /// `[negative, positive]` training counts.
        counts: [u32; 2],
    },
    Split {
        feature: usize,
        counts: [u32; 2],
        /// One slot per category; `None` where no training record fell.
        children: Vec<Option<TreeNode>>,
        /// Child taking categories unseen at this node in training.
        fallback: usize,
    },
}

impl TreeNode {
    pub fn counts(&self) -> [u32; 2] {
        match self {
            TreeNode::Leaf { counts } | TreeNode::Split { counts, .. } => *counts,
        }
    }

    /// Majority label; ties go to the negative class.
    pub fn majority(&self) -> bool {
        let [neg, pos] = self.counts();
        pos > neg
    }

    pub fn is_leaf(&self) -> bool {
        matches!(self, TreeNode::Leaf { .. })
    }

    /// Child reached by category `code`, falling back to the largest child.
    pub fn child_for(&self, code: u16) -> Option<&TreeNode> {
        match self {
            TreeNode::Leaf { .. } => None,
            TreeNode::Split {
                children, fallback, ..
            } => children
                .get(code as usize)
                .and_then(Option::as_ref)
                .or_else(|| children[*fallback].as_ref()),
        }
    }

    fn depth(&self) -> usize {
        match self {
            TreeNode::Leaf { .. } => 0,
            TreeNode::Split { children, .. } => {
                1 + children.iter().flatten().map(TreeNode::depth).max().unwrap_or(0)
            }
        }
    }

    fn leaves(&self) -> usize {
        match self {
            TreeNode::Leaf { .. } => 1,
            TreeNode::Split { children, .. } => children.iter().flatten().map(TreeNode::leaves).sum(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionTreeModel {
    pub feature_names: Vec<String>,
    pub categories: Vec<Vec<String>>,
    pub params: TreeParams,
    pub root: TreeNode,
}

struct Grower<'a> {
    data: &'a Dataset,
    cardinalities: Vec<usize>,
    params: TreeParams,
}

impl Grower<'_> {
    fn counts(&self, indices: &[usize]) -> [u32; 2] {
        let pos = indices.iter().filter(|&&i| self.data.labels[i]).count() as u32;
        [indices.len() as u32 - pos, pos]
    }

    fn per_category(&self, indices: &[usize], feature: usize) -> Vec<[u32; 2]> {
        let mut table = vec![[0u32; 2]; self.cardinalities[feature]];
        for &i in indices {
            let code = self.data.rows[i].codes()[feature] as usize;
            table[code][usize::from(self.data.labels[i])] += 1;
        }
        table
    }

    /// A split must send at least `min_leaf` records down two or more
    /// branches.
    fn admissible(&self, table: &[[u32; 2]]) -> bool {
        let min = self.params.min_leaf as u32;
        table.iter().filter(|c| c[0] + c[1] >= min).count() >= 2
    }

    fn grow(&self, indices: Vec<usize>, available: &mut [bool], depth: usize) -> TreeNode {
        let counts = self.counts(&indices);
        let leaf = TreeNode::Leaf { counts };
        if counts[0] == 0
            || counts[1] == 0
            || depth >= self.params.max_depth
            || indices.len() < 2 * self.params.min_leaf
        {
            return leaf;
        }

        let mut best: Option<(usize, f64)> = None;
        for feature in (0..available.len()).filter(|&f| available[f]) {
            let table = self.per_category(&indices, feature);
            if !self.admissible(&table) {
                continue;
            }
            let r = category_gain_ratio(&table);
            if best.map_or(true, |(_, b)| r > b + RATIO_TIE_EPS) {
                best = Some((feature, r));
            }
        }
        let Some((feature, best_ratio)) = best else {
            return leaf;
        };
        if best_ratio < self.params.min_gain_ratio {
            return leaf;
        }

        let mut buckets = vec![Vec::new(); self.cardinalities[feature]];
        for &i in &indices {
            buckets[self.data.rows[i].codes()[feature] as usize].push(i);
        }
        let mut fallback = 0;
        for (c, b) in buckets.iter().enumerate() {
            if b.len() > buckets[fallback].len() {
                fallback = c;
            }
        }
        available[feature] = false;
        let children = buckets
            .into_iter()
            .map(|b| (!b.is_empty()).then(|| self.grow(b, available, depth + 1)))
            .collect();
        available[feature] = true;
        TreeNode::Split {
            feature,
            counts,
            children,
            fallback,
        }
    }
}

impl DecisionTreeModel {
    pub fn fit(data: &Dataset, params: TreeParams) -> Result<Self> {
        let all: Vec<usize> = (0..data.catalog.len()).collect();
        Self::fit_with_features(data, params, &all)
    }

    /// Fits using only the listed features as split candidates.
    pub fn fit_with_features(data: &Dataset, params: TreeParams, candidates: &[usize]) -> Result<Self> {
        params.validate()?;
        if data.is_empty() {
            return Err(Error::EmptyTrainingSet);
        }
        let mut available = vec![false; data.catalog.len()];
        for &f in candidates {
            if f >= available.len() {
                return Err(Error::InvalidParameter(format!("feature index {f} out of range")));
            }
            available[f] = true;
        }
        let grower = Grower {
            data,
            cardinalities: data.catalog.cardinalities(),
            params,
        };
        let root = grower.grow((0..data.len()).collect(), &mut available, 0);
        Ok(DecisionTreeModel {
            feature_names: data.catalog.names().map(String::from).collect(),
            categories: data.catalog.features().iter().map(|f| f.categories.clone()).collect(),
            params,
            root,
        })
    }

    fn check(&self, v: &FeatureVector) -> Result<()> {
        check_width(self.feature_names.len(), v)?;
        for (f, &c) in v.codes().iter().enumerate() {
            if c as usize >= self.categories[f].len() {
                return Err(Error::Domain(format!(
                    "code {c} out of range for feature {:?}",
                    self.feature_names[f]
                )));
            }
        }
        Ok(())
    }

    /// Leaf reached by `v`.
    pub fn route(&self, v: &FeatureVector) -> Result<&TreeNode> {
        self.check(v)?;
        let mut node = &self.root;
        while let TreeNode::Split { feature, .. } = node {
            node = node
                .child_for(v.codes()[*feature])
                .expect("split nodes have at least one child");
        }
        Ok(node)
    }

    pub fn depth(&self) -> usize {
        self.root.depth()
    }

    pub fn leaf_count(&self) -> usize {
        self.root.leaves()
    }

    /// Feature used at the root, if the tree is not a single leaf.
    pub fn root_feature(&self) -> Option<&str> {
        match &self.root {
            TreeNode::Split { feature, .. } => Some(&self.feature_names[*feature]),
            TreeNode::Leaf { .. } => None,
        }
    }
}

/// Laplace-smoothed positive fraction of a leaf.
pub fn leaf_score(counts: [u32; 2]) -> f64 {
    (f64::from(counts[1]) + 1.0) / (f64::from(counts[0] + counts[1]) + 2.0)
}

impl Classifier for DecisionTreeModel {
    fn predict(&self, v: &FeatureVector) -> Result<bool> {
        self.route(v).map(TreeNode::majority)
    }

    fn score(&self, v: &FeatureVector) -> Result<f64> {
        self.route(v).map(|leaf| leaf_score(leaf.counts()))
    }
}
