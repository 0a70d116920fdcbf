//! Pools held-out scores over ten stratified folds and reports the
//! confusion matrix and ROC AUC for each model family.

use readmit::eval::{held_out_predictions, metrics};
use readmit::{build_catalog, generate_cohort, roc_auc, stratified_folds, CohortProfile, ConfusionMatrix, Dataset, ModelSpec};

fn main() -> readmit::Result<()> {
    let cohort = generate_cohort(&CohortProfile { seed: 8, ..CohortProfile::default() })?;
    let data = Dataset::from_cohort(&cohort, build_catalog(&cohort, 0.05)?)?;
    let folds = stratified_folds(&data.labels, 10, 8)?;

    println!("{:<16} {:>5} {:>5} {:>5} {:>5} {:>7} {:>6}", "model", "tp", "fp", "fn", "tn", "recall", "auc");
    for spec in ModelSpec::table_rows() {
        let held = held_out_predictions(&data, &spec, &folds)?;
        let cm = ConfusionMatrix::from_predictions(&held.predictions, &data.labels);
        let m = metrics(&cm)?;
        let auc = roc_auc(&held.scores, &data.labels)?;
        println!(
            "{:<16} {:>5} {:>5} {:>5} {:>5} {:>7.3} {:>6.3}",
            spec.to_string(),
            cm.tp,
            cm.fp,
            cm.fn_,
            cm.tn,
            m.recall,
            auc
        );
    }
    Ok(())
}
