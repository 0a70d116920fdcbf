//! Cross-validates the six standard model rows on a generated cohort and
//! prints the comparison table next to the majority-class baseline.
//!
//! ```text
//! cargo run --release --example compare_models -- [seed]
//! ```

use readmit::eval::{cross_validate, majority_baseline, DEFAULT_FOLDS};
use readmit::{build_catalog, cohort_summary, generate_cohort, render_comparison, CohortProfile, Dataset, ModelSpec};

fn main() -> readmit::Result<()> {
    let seed = std::env::args().nth(1).map_or(Ok(0), |s| s.parse()).expect("seed must be an integer");
    let profile = CohortProfile { seed, ..CohortProfile::default() };
    let cohort = generate_cohort(&profile)?;
    let summary = cohort_summary(&cohort)?;
    let data = Dataset::from_cohort(&cohort, build_catalog(&cohort, 0.05)?)?;
    println!(
        "{} episodes, {} features, prevalence {:.3}",
        data.len(),
        data.catalog.len(),
        summary.prevalence
    );

    let results = ModelSpec::table_rows()
        .iter()
        .map(|spec| cross_validate(&data, &spec.with_seed(seed), DEFAULT_FOLDS, seed))
        .collect::<readmit::Result<Vec<_>>>()?;
    print!("{}", render_comparison(&results));
    println!("majority baseline accuracy {:.1}%", 100.0 * majority_baseline(&data.labels));
    Ok(())
}
