//! Builds a feature catalog from a generated cohort and shows how one
//! episode is encoded.
//!
//! ```text
//! cargo run --example featurize_cohort -- [support-threshold]
//! ```

use readmit::{build_catalog, featurize, generate_cohort, CohortProfile};

fn main() -> readmit::Result<()> {
    let threshold: f64 = std::env::args()
        .nth(1)
        .map_or(0.05, |s| s.parse().expect("threshold must be a number"));
    let cohort = generate_cohort(&CohortProfile { seed: 3, ..CohortProfile::default() })?;
    let catalog = build_catalog(&cohort, threshold)?;

    println!("{} features at support threshold {threshold}:", catalog.len());
    for def in catalog.features() {
        println!("  {:<48} {}", def.name, def.categories.join(" | "));
    }

    let first = &cohort.episodes()[0];
    let v = featurize(first, &catalog)?;
    println!("\nepisode {} encodes as {:?}", first.episode_id, v.codes());
    for (name, token) in catalog.names().zip(catalog.tokens(&v)) {
        println!("  {name} = {token}");
    }
    Ok(())
}
