//! Readmission-risk modeling over categorical nursing care records.
//!
//! The pipeline runs from a validated [`Cohort`] of hospital episodes
//! (real or generated by [`synth`]) through a categorical featurizer to four
//! classifier families, compared by stratified cross-validation and
//! inspected through annotated decision trees.
//!
//! ```
//! use readmit::{build_catalog, cross_validate, generate_cohort, CohortProfile, Dataset, ModelSpec};
//!
//! let profile = CohortProfile { n: 300, seed: 7, ..CohortProfile::default() };
//! let cohort = generate_cohort(&profile).unwrap();
//! let catalog = build_catalog(&cohort, 0.05).unwrap();
//! let data = Dataset::from_cohort(&cohort, catalog).unwrap();
//! let result = cross_validate(&data, &"nb".parse::<ModelSpec>().unwrap(), 5, 7).unwrap();
//! assert!(result.accuracy > 0.5);
//! ```

pub mod classifiers;
pub mod cli;
pub mod cohort;
pub mod error;
pub mod eval;
pub mod features;
pub mod io;
pub mod report;
pub mod synth;
pub mod taxonomy;

pub use classifiers::{Classifier, DecisionTreeModel, ModelSpec, TrainedModel, TreeParams};
pub use cohort::{validate_episode, Cohort, Episode, NocOutcome, ShiftRecord, Timestamp};
pub use error::{Error, Result};
pub use eval::{cross_validate, roc_auc, stratified_folds, ConfusionMatrix, EvaluationResult};
pub use features::{build_catalog, featurize, Dataset, FeatureCatalog, FeatureVector};
pub use report::{annotate_tree, export_tree_dot, render_comparison, subgroup_trees, AnnotatedTree};
pub use synth::{cohort_summary, generate_cohort, CohortProfile};
pub use taxonomy::Tag;
