//! Generates a synthetic cohort, prints its summary statistics and checks
//! that it survives a write/read round trip through the JSON-lines format.
//!
//! ```text
//! cargo run --example generate_cohort -- [n] [seed]
//! ```

use readmit::synth::generate_with_rule;
use readmit::{cohort_summary, io, CohortProfile};

fn main() -> readmit::Result<()> {
    let mut args = std::env::args().skip(1);
    let n = args.next().map_or(2300, |s| s.parse().expect("n must be an integer"));
    let seed = args.next().map_or(0, |s| s.parse().expect("seed must be an integer"));
    let profile = CohortProfile { n, seed, ..CohortProfile::default() };

    let (cohort, rule) = generate_with_rule(&profile)?;
    let s = cohort_summary(&cohort)?;
    println!("episodes      {}", s.count);
    println!("readmitted    {} ({:.1}%)", s.readmitted, 100.0 * s.prevalence);
    println!("age (years)   {:.1} ± {:.1}", s.age_years.mean, s.age_years.sd);
    println!("stay (hours)  {:.1} ± {:.1}", s.los_hours.mean, s.los_hours.sd);
    println!(
        "experience    {:.2} ± {:.2}",
        s.nurse_experience_years.mean, s.nurse_experience_years.sd
    );

    let mut tags = s.tag_frequencies.clone();
    tags.sort_by(|a, b| b.1.total_cmp(&a.1));
    println!("most frequent tags:");
    for (tag, freq) in tags.iter().take(6) {
        println!("  {freq:>6.3}  {tag}");
    }

    // agreement between the noiseless planted rule and the final labels
    let agree = cohort
        .episodes()
        .iter()
        .map(|e| rule.predict(e).map(|p| p == e.readmitted))
        .collect::<readmit::Result<Vec<_>>>()?
        .into_iter()
        .filter(|&a| a)
        .count();
    println!("planted rule matches {:.1}% of labels", 100.0 * agree as f64 / s.count as f64);

    let dir = std::env::temp_dir().join(format!("readmit-example-{}", std::process::id()));
    std::fs::create_dir_all(&dir).expect("temp dir");
    let path = dir.join("cohort.jsonl");
    io::save_cohort(&cohort, &path)?;
    let reloaded = io::load_cohort(&path)?;
    assert_eq!(reloaded, cohort);
    println!("round trip through {} ok", path.display());
    std::fs::remove_dir_all(&dir).ok();
    Ok(())
}
