//! Comparison tables, annotated trees, per-band subgroup trees and DOT
//! export.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::classifiers::{DecisionTreeModel, TreeNode, TreeParams};
use crate::error::{Error, Result};
use crate::eval::EvaluationResult;
use crate::features::Dataset;

const COLUMNS: [&str; 6] = ["Model", "Accuracy", "Recall", "Precision", "F Measure", "AUC"];
const NAME_WIDTH: usize = 16;
const NUM_WIDTH: usize = 10;

/// Fixed-width comparison table: accuracy, recall and precision as
/// percentages with one decimal, F-measure and AUC with two decimals.
pub fn render_comparison(results: &[EvaluationResult]) -> String {
    let mut out = format!("{:<NAME_WIDTH$}", COLUMNS[0]);
    for c in &COLUMNS[1..] {
        let _ = write!(out, "{c:>NUM_WIDTH$}");
    }
    out.push('\n');
    for r in results {
        let _ = writeln!(
            out,
            "{:<NAME_WIDTH$}{:>NUM_WIDTH$.1}{:>NUM_WIDTH$.1}{:>NUM_WIDTH$.1}{:>NUM_WIDTH$.2}{:>NUM_WIDTH$.2}",
            r.model_name,
            100.0 * r.accuracy,
            100.0 * r.recall,
            100.0 * r.precision,
            r.f_measure,
            r.auc
        );
    }
    out
}

/// Machine-readable variant of the comparison table.
pub fn comparison_json(results: &[EvaluationResult]) -> String {
    serde_json::to_string_pretty(results).expect("evaluation results serialize") + "\n"
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnnotatedNode {
    /// Split feature; `None` at leaves.
    pub split: Option<String>,
    /// Predicted class from the tree's training counts.
    pub majority_readmitted: bool,
    pub n: u64,
    pub readmitted: u64,
    /// Outgoing edges labeled with the categories routed along them.
    pub children: Vec<(String, AnnotatedNode)>,
}

impl AnnotatedNode {
    pub fn single_admission(&self) -> u64 {
        self.n - self.readmitted
    }

    pub fn percent_single(&self) -> Option<f64> {
        (self.n > 0).then(|| 100.0 * self.single_admission() as f64 / self.n as f64)
    }

    pub fn percent_readmitted(&self) -> Option<f64> {
        (self.n > 0).then(|| 100.0 * self.readmitted as f64 / self.n as f64)
    }

    pub fn is_leaf(&self) -> bool {
        self.children.is_empty()
    }

    pub fn child(&self, edge: &str) -> Option<&AnnotatedNode> {
        self.children.iter().find(|(e, _)| e == edge).map(|(_, c)| c)
    }

    pub fn node_count(&self) -> usize {
        1 + self.children.iter().map(|(_, c)| c.node_count()).sum::<usize>()
    }

    fn stats(&self) -> String {
        match (self.percent_single(), self.percent_readmitted()) {
            (Some(s), Some(r)) => format!("n={}, single {s:.1}%, readmitted {r:.1}%", self.n),
            _ => format!("n={}, single —, readmitted —", self.n),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnnotatedTree {
    pub root: AnnotatedNode,
}

fn class_name(readmitted: bool) -> &'static str {
    if readmitted {
        "readmitted"
    } else {
        "single admission"
    }
}

fn skeleton(model: &DecisionTreeModel, node: &TreeNode) -> AnnotatedNode {
    let mut out = AnnotatedNode {
        split: None,
        majority_readmitted: node.majority(),
        n: 0,
        readmitted: 0,
        children: Vec::new(),
    };
    if let TreeNode::Split {
        feature,
        children,
        fallback,
        ..
    } = node
    {
        let categories = &model.categories[*feature];
        out.split = Some(model.feature_names[*feature].clone());
        for (code, child) in children.iter().enumerate() {
            let Some(child) = child else { continue };
            let mut routed = vec![categories[code].as_str()];
            if code == *fallback {
                routed.extend(
                    children
                        .iter()
                        .enumerate()
                        .filter(|(_, c)| c.is_none())
                        .map(|(c, _)| categories[c].as_str()),
                );
            }
            out.children.push((routed.join(", "), skeleton(model, child)));
        }
    }
    out
}

/// Routes every record of `data` through the tree and counts, at each node,
/// how many arrived and how many were readmitted.
pub fn annotate_tree(model: &DecisionTreeModel, data: &Dataset) -> Result<AnnotatedTree> {
    let names: Vec<&str> = data.catalog.names().collect();
    if names != model.feature_names {
        return Err(Error::InvalidParameter(
            "dataset features do not match the tree's features".into(),
        ));
    }
    let mut root = skeleton(model, &model.root);
    for (row, &label) in data.rows.iter().zip(&data.labels) {
        model.route(row)?;
        let mut node = &model.root;
        let mut ann = &mut root;
        loop {
            ann.n += 1;
            ann.readmitted += u64::from(label);
            let TreeNode::Split { feature, .. } = node else { break };
            let next = node.child_for(row.codes()[*feature]).expect("split has children");
            let TreeNode::Split { children, .. } = node else { unreachable!() };
            let slot = children
                .iter()
                .flatten()
                .position(|c| std::ptr::eq(c, next))
                .expect("routed child exists");
            ann = &mut ann.children[slot].1;
            node = next;
        }
    }
    Ok(AnnotatedTree { root })
}

/// One tree per category of the partition feature.
#[derive(Debug, Clone, PartialEq)]
pub struct Subgroup {
    pub category: String,
    pub model: DecisionTreeModel,
    pub tree: AnnotatedTree,
}

/// Splits the data by `partition_feature`, then fits and annotates a tree on
/// each nonempty group with that feature removed from the candidates.
/// Groups come back in category order.
pub fn subgroup_trees(data: &Dataset, partition_feature: &str, params: TreeParams) -> Result<Vec<Subgroup>> {
    let feature = data
        .catalog
        .index_of(partition_feature)
        .ok_or_else(|| Error::UnknownFeature(partition_feature.to_owned()))?;
    let candidates: Vec<usize> = (0..data.catalog.len()).filter(|&f| f != feature).collect();
    let mut groups = Vec::new();
    for (code, category) in data.catalog.feature(feature).categories.iter().enumerate() {
        let members: Vec<usize> = (0..data.len())
            .filter(|&i| data.rows[i].codes()[feature] as usize == code)
            .collect();
        if members.is_empty() {
            continue;
        }
        let subset = data.subset(&members);
        let model = DecisionTreeModel::fit_with_features(&subset, params, &candidates)?;
        let tree = annotate_tree(&model, &subset)?;
        groups.push(Subgroup {
            category: category.clone(),
            model,
            tree,
        });
    }
    Ok(groups)
}

fn dot_escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// Graphviz rendering. Nodes are numbered in preorder; internal nodes show
/// the split feature, leaves the predicted class, and every node its
/// record count and class percentages.
pub fn export_tree_dot(tree: &AnnotatedTree, title: &str) -> String {
    fn visit(node: &AnnotatedNode, next_id: &mut usize, out: &mut String) -> usize {
        let id = *next_id;
        *next_id += 1;
        let (head, shape) = match &node.split {
            Some(feature) => (feature.as_str(), "box"),
            None => (class_name(node.majority_readmitted), "ellipse"),
        };
        let pct = |p: Option<f64>| p.map_or("—".to_owned(), |v| format!("{v:.1}%"));
        let _ = writeln!(
            out,
            "  n{id} [shape={shape}, label=\"{}\\nn={}\\nsingle {} / readmitted {}\"];",
            dot_escape(head),
            node.n,
            pct(node.percent_single()),
            pct(node.percent_readmitted()),
        );
        for (edge, child) in &node.children {
            let child_id = visit(child, next_id, out);
            let _ = writeln!(out, "  n{id} -> n{child_id} [label=\"{}\"];", dot_escape(edge));
        }
        id
    }
    let mut out = format!("digraph \"{}\" {{\n  node [fontname=\"Helvetica\"];\n", dot_escape(title));
    visit(&tree.root, &mut 0, &mut out);
    out.push_str("}\n");
    out
}

/// Indented plain-text rendering for terminals.
pub fn render_tree_text(tree: &AnnotatedTree) -> String {
    fn visit(node: &AnnotatedNode, edge: Option<&str>, depth: usize, out: &mut String) {
        let head = node
            .split
            .clone()
            .unwrap_or_else(|| format!("=> {}", class_name(node.majority_readmitted)));
        let indent = "  ".repeat(depth);
        match edge {
            Some(e) => {
                let _ = writeln!(out, "{indent}[{e}] {head} ({})", node.stats());
            }
            None => {
                let _ = writeln!(out, "{indent}{head} ({})", node.stats());
            }
        }
        for (e, child) in &node.children {
            visit(child, Some(e), depth + 1, out);
        }
    }
    let mut out = String::new();
    visit(&tree.root, None, 0, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::ConfusionMatrix;
    use crate::features::{FeatureCatalog, FeatureDef, FeatureVector};

    fn result(name: &str, acc: f64, rec: f64, prec: f64, f: f64, auc: f64) -> EvaluationResult {
        EvaluationResult {
            model_name: name.into(),
            model_spec: "dt".into(),
            folds: 10,
            seed: 0,
            confusion: ConfusionMatrix::default(),
            accuracy: acc,
            recall: rec,
            precision: prec,
            f_measure: f,
            auc,
        }
    }

    fn cells(line: &str) -> Vec<&str> {
        line.split_whitespace().collect()
    }

    #[test]
    fn comparison_rows() {
        let table = render_comparison(&[
            result("Tree", 0.737, 0.774, 0.725, 0.7489, 0.78),
            result("Perfect", 1.0, 1.0, 1.0, 1.0, 1.0),
        ]);
        let lines: Vec<&str> = table.lines().collect();
        assert_eq!(lines.len(), 3);
        assert_eq!(cells(lines[0]), ["Model", "Accuracy", "Recall", "Precision", "F", "Measure", "AUC"]);
        assert_eq!(cells(lines[1]), ["Tree", "73.7", "77.4", "72.5", "0.75", "0.78"]);
        assert_eq!(cells(lines[2]), ["Perfect", "100.0", "100.0", "100.0", "1.00", "1.00"]);
    }

    fn toy() -> Dataset {
        let catalog = FeatureCatalog::new(
            vec![FeatureDef::custom("a", &["x", "y", "z"]), FeatureDef::custom("b", &["p", "q"])],
            None,
        )
        .unwrap();
        let rows = [([0u16, 0u16], false), ([0, 1], false), ([0, 0], false), ([1, 0], true), ([1, 1], true),
            ([0, 1], true), ([1, 0], false), ([0, 0], false), ([1, 1], true), ([0, 0], false)];
        Dataset::new(
            catalog,
            rows.iter().map(|(c, _)| FeatureVector::new(c.to_vec())).collect(),
            rows.iter().map(|&(_, l)| l).collect(),
        )
        .unwrap()
    }

    fn check_sums(node: &AnnotatedNode) {
        if !node.is_leaf() {
            assert_eq!(node.children.iter().map(|(_, c)| c.n).sum::<u64>(), node.n);
            assert_eq!(node.children.iter().map(|(_, c)| c.readmitted).sum::<u64>(), node.readmitted);
        }
        node.children.iter().for_each(|(_, c)| check_sums(c));
    }

    #[test]
    fn annotation_counts() {
        let d = toy();
        let model = DecisionTreeModel::fit(&d, TreeParams::unbounded()).unwrap();
        let tree = annotate_tree(&model, &d).unwrap();
        assert_eq!(tree.root.n, 10);
        assert_eq!(tree.root.percent_single(), Some(60.0));
        assert_eq!(tree.root.percent_readmitted(), Some(40.0));
        check_sums(&tree.root);
        // category z was never seen, so it rides along with the larger child
        assert_eq!(tree.root.children[0].0, "x, z");
    }

    #[test]
    fn empty_annotation_prints_dash() {
        let d = toy();
        let model = DecisionTreeModel::fit(&d, TreeParams::unbounded()).unwrap();
        let tree = annotate_tree(&model, &d.subset(&[])).unwrap();
        assert_eq!(tree.root.n, 0);
        assert_eq!(tree.root.percent_single(), None);
        assert!(export_tree_dot(&tree, "t").contains("single — / readmitted —"));
    }

    #[test]
    fn dot_structure() {
        let leaf = AnnotatedTree {
            root: AnnotatedNode {
                split: None,
                majority_readmitted: false,
                n: 10,
                readmitted: 3,
                children: vec![],
            },
        };
        let dot = export_tree_dot(&leaf, "leaf");
        assert_eq!(dot.matches(" [shape=").count(), 1);
        assert_eq!(dot.matches("->").count(), 0);
        assert!(dot.contains("single 70.0% / readmitted 30.0%"));

        let mut root = leaf.root.clone();
        root.split = Some("age_band".into());
        root.children = ["young", "middle-aged", "old", "very-old"]
            .iter()
            .map(|b| (b.to_string(), leaf.root.clone()))
            .collect();
        let tree = AnnotatedTree { root };
        let dot = export_tree_dot(&tree, "four");
        assert_eq!(dot.matches(" [shape=").count(), 5);
        assert_eq!(dot.matches("->").count(), 4);
        assert!(dot.contains("n0 -> n1 [label=\"young\"]"));
        assert_eq!(dot, export_tree_dot(&tree, "four"));
    }

    #[test]
    fn subgroups_drop_partition_feature() {
        let d = toy();
        let groups = subgroup_trees(&d, "a", TreeParams::unbounded()).unwrap();
        // category z has no records
        assert_eq!(groups.iter().map(|g| g.category.as_str()).collect::<Vec<_>>(), ["x", "y"]);
        for g in &groups {
            assert_ne!(g.model.root_feature(), Some("a"));
        }
        assert!(matches!(
            subgroup_trees(&d, "c", TreeParams::default()),
            Err(Error::UnknownFeature(_))
        ));
    }

    #[test]
    fn text_rendering() {
        let d = toy();
        let model = DecisionTreeModel::fit(&d, TreeParams::unbounded()).unwrap();
        let text = render_tree_text(&annotate_tree(&model, &d).unwrap());
        assert!(text.starts_with("a (n=10, single 60.0%, readmitted 40.0%)"));
        assert!(text.contains("  [x, z] "));
    }
}
