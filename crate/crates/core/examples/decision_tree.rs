//! Fits one decision tree on a whole generated cohort, prints it with
//! per-node readmission rates and writes a Graphviz rendering.
//!
//! ```text
//! cargo run --example decision_tree -- [out.dot]
//! dot -Tsvg out.dot > tree.svg
//! ```

use readmit::report::render_tree_text;
use readmit::{annotate_tree, build_catalog, export_tree_dot, generate_cohort, CohortProfile, Dataset, DecisionTreeModel, TreeParams};

fn main() -> readmit::Result<()> {
    let cohort = generate_cohort(&CohortProfile { seed: 11, ..CohortProfile::default() })?;
    let data = Dataset::from_cohort(&cohort, build_catalog(&cohort, 0.05)?)?;

    let params = TreeParams { max_depth: 3, ..TreeParams::default() };
    let model = DecisionTreeModel::fit(&data, params)?;
    println!("depth {}, {} leaves", model.depth(), model.leaf_count());

    let annotated = annotate_tree(&model, &data)?;
    print!("{}", render_tree_text(&annotated));

    let dot = export_tree_dot(&annotated, "readmission");
    match std::env::args().nth(1) {
        Some(path) => {
            std::fs::write(&path, dot).expect("writable output path");
            println!("wrote {path}");
        }
        None => println!("\n{} lines of DOT (pass a path to save them)", dot.lines().count()),
    }
    Ok(())
}
