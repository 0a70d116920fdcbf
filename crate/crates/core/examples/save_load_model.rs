//! Trains each model family on a generated cohort, saves it as JSON,
//! loads it back and checks that predictions are unchanged.

use readmit::classifiers::{load_model, save_model};
use readmit::{build_catalog, generate_cohort, io, Classifier, CohortProfile, Dataset, ModelSpec};

fn main() -> readmit::Result<()> {
    let cohort = generate_cohort(&CohortProfile { n: 600, seed: 21, ..CohortProfile::default() })?;
    let data = Dataset::from_cohort(&cohort, build_catalog(&cohort, 0.05)?)?;

    let dir = std::env::temp_dir().join(format!("readmit-models-{}", std::process::id()));
    std::fs::create_dir_all(&dir).expect("temp dir");
    io::save_feature_matrix(&data, dir.join("train.csv"))?;

    for spec in ["dt", "nb", "knn:5", "svm"] {
        let spec: ModelSpec = spec.parse()?;
        let model = spec.fit(&data)?;
        let path = dir.join(format!("{}.json", spec.code().replace(':', "-")));
        save_model(&model, &path, Some("train.csv"))?;
        let loaded = load_model(&path)?;
        let same = data
            .rows
            .iter()
            .all(|v| model.score(v).ok() == loaded.score(v).ok());
        let bytes = std::fs::metadata(&path).map(|m| m.len()).unwrap_or(0);
        println!("{:<16} {:>8} bytes  identical scores: {same}", spec.to_string(), bytes);
        assert!(same);
    }
    std::fs::remove_dir_all(&dir).ok();
    Ok(())
}
