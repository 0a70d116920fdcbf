//! Grows a separate tree inside each age band and compares which feature
//! each subgroup splits on first.
//!
//! ```text
//! cargo run --example subgroup_trees -- [feature]
//! ```

use readmit::{build_catalog, generate_cohort, subgroup_trees, CohortProfile, Dataset, TreeParams};

fn main() -> readmit::Result<()> {
    let by = std::env::args().nth(1).unwrap_or_else(|| "age_band".to_owned());
    let cohort = generate_cohort(&CohortProfile { seed: 5, ..CohortProfile::default() })?;
    let data = Dataset::from_cohort(&cohort, build_catalog(&cohort, 0.05)?)?;

    for g in subgroup_trees(&data, &by, TreeParams::default())? {
        let root = &g.tree.root;
        println!(
            "{by} = {:<12} n={:<5} readmitted {:>5.1}%  root split: {}",
            g.category,
            root.n,
            root.percent_readmitted().unwrap_or(0.0),
            g.model.root_feature().unwrap_or("(leaf)")
        );
    }
    Ok(())
}
