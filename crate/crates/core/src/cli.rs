//! Command-line front end: `synth`, `featurize`, `evaluate`, `tree` and
//! `subgroup`.
//!
//! Exit status is 0 on success, 1 for usage errors (bad flags or flag
//! values) and 2 for data errors (unreadable or invalid files).

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

use crate::classifiers::{DecisionTreeModel, ModelSpec, TreeParams};
use crate::error::Error;
use crate::eval::{cross_validate, DEFAULT_FOLDS};
use crate::features::{build_catalog, Dataset, DEFAULT_SUPPORT_THRESHOLD};
use crate::io;
use crate::report::{annotate_tree, comparison_json, export_tree_dot, render_comparison, render_tree_text, subgroup_trees};
use crate::synth::{generate_cohort, CohortProfile};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "readmit", version, about = "Readmission-risk modeling over nursing care records")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a synthetic cohort file.
    Synth(SynthArgs),
    /// Turn a cohort file into a feature matrix and catalog.
    Featurize(FeaturizeArgs),
    /// Cross-validate models and write the comparison report.
    Evaluate(EvaluateArgs),
    /// Fit one tree on all records and export it as DOT.
    Tree(TreeArgs),
    /// Fit one tree per category of a feature and export each as DOT.
    Subgroup(SubgroupArgs),
}

#[derive(Debug, Args)]
struct SynthArgs {
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    prevalence: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Label flip probability applied after the planted rule.
    #[arg(long)]
    noise: Option<f64>,
    /// JSON profile; flags given on the command line override it.
    #[arg(long)]
    profile: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct FeaturizeArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long, default_value_t = DEFAULT_SUPPORT_THRESHOLD)]
    threshold: f64,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    catalog: PathBuf,
}

#[derive(Debug, Args)]
struct EvaluateArgs {
    #[arg(long)]
    features: PathBuf,
    #[arg(long, default_value = "dt,nb,knn:2,knn:5,knn:10,svm")]
    models: String,
    #[arg(long, default_value_t = DEFAULT_FOLDS)]
    folds: usize,
    /// Seeds both the fold assignment and SVM training.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    report: PathBuf,
    /// Also write the results as JSON.
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct TreeParamArgs {
    #[arg(long)]
    min_leaf: Option<usize>,
    #[arg(long)]
    max_depth: Option<usize>,
}

impl TreeParamArgs {
    fn params(&self) -> Result<TreeParams, Failure> {
        let mut p = TreeParams::default();
        if let Some(m) = self.min_leaf {
            if m == 0 {
                return Err(Failure::Usage("--min-leaf must be at least 1".into()));
            }
            p.min_leaf = m;
        }
        if let Some(d) = self.max_depth {
            p.max_depth = d;
        }
        Ok(p)
    }
}

#[derive(Debug, Args)]
struct TreeArgs {
    #[arg(long)]
    features: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[command(flatten)]
    tree: TreeParamArgs,
}

#[derive(Debug, Args)]
struct SubgroupArgs {
    #[arg(long)]
    features: PathBuf,
    #[arg(long, default_value = "age_band")]
    by: String,
    #[arg(long)]
    out_dir: PathBuf,
    #[command(flatten)]
    tree: TreeParamArgs,
}

enum Failure {
    Usage(String),
    Data(String),
}

fn data(flag: &str) -> impl Fn(Error) -> Failure + '_ {
    move |e| Failure::Data(format!("{flag}: {e}"))
}

fn write_file(flag: &str, path: &Path, contents: &str) -> Result<(), Failure> {
    fs::write(path, contents).map_err(|e| Failure::Data(format!("{flag}: {}: {e}", path.display())))
}

/// Parses `argv` (program name first), runs the subcommand and returns the
/// process exit status. Diagnostics go to standard error.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            print!("{e}");
            return EXIT_OK;
        }
        Err(e) if e.kind() == ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => {
            eprint!("{e}");
            return EXIT_USAGE;
        }
        Err(e) => {
            let rendered = e.to_string();
            eprintln!("{}", rendered.lines().next().unwrap_or("usage error"));
            return EXIT_USAGE;
        }
    };
    let outcome = match cli.command {
        Command::Synth(a) => synth(a),
        Command::Featurize(a) => featurize(a),
        Command::Evaluate(a) => evaluate(a),
        Command::Tree(a) => tree(a),
        Command::Subgroup(a) => subgroup(a),
    };
    match outcome {
        Ok(()) => EXIT_OK,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            EXIT_USAGE
        }
        Err(Failure::Data(msg)) => {
            eprintln!("error: {msg}");
            EXIT_DATA
        }
    }
}

fn synth(a: SynthArgs) -> Result<(), Failure> {
    let mut profile = match &a.profile {
        Some(path) => io::read_json::<CohortProfile>(path).map_err(data("--profile"))?,
        None => CohortProfile::default(),
    };
    if let Some(n) = a.n {
        if n < 10 {
            return Err(Failure::Usage(format!("--n {n} is below 10")));
        }
        profile.n = n;
    }
    if let Some(p) = a.prevalence {
        if !(p > 0.0 && p < 1.0) {
            return Err(Failure::Usage(format!("--prevalence {p} outside (0, 1)")));
        }
        profile.prevalence = p;
    }
    if let Some(p) = a.noise {
        if !(0.0..0.5).contains(&p) {
            return Err(Failure::Usage(format!("--noise {p} outside [0, 0.5)")));
        }
        profile.signal.noise_flip_prob = p;
    }
    if let Some(s) = a.seed {
        profile.seed = s;
    }
    let cohort = generate_cohort(&profile).map_err(data("--profile"))?;
    io::save_cohort(&cohort, &a.out).map_err(data("--out"))
}

fn featurize(a: FeaturizeArgs) -> Result<(), Failure> {
    if !(0.0..1.0).contains(&a.threshold) {
        return Err(Failure::Usage(format!("--threshold {} outside [0, 1)", a.threshold)));
    }
    let cohort = io::load_cohort(&a.input).map_err(data("--in"))?;
    let catalog = build_catalog(&cohort, a.threshold).map_err(data("--in"))?;
    let dataset = Dataset::from_cohort(&cohort, catalog).map_err(data("--in"))?;
    io::save_feature_matrix(&dataset, &a.out).map_err(data("--out"))?;
    io::save_catalog(&dataset.catalog, &a.catalog).map_err(data("--catalog"))
}

fn evaluate(a: EvaluateArgs) -> Result<(), Failure> {
    let specs = ModelSpec::parse_list(&a.models).map_err(|e| Failure::Usage(format!("--models: {e}")))?;
    if a.folds < 2 {
        return Err(Failure::Usage(format!("--folds {} is below 2", a.folds)));
    }
    let dataset = io::load_feature_matrix(&a.features).map_err(data("--features"))?;
    let results = specs
        .iter()
        .map(|spec| cross_validate(&dataset, &spec.with_seed(a.seed), a.folds, a.seed))
        .collect::<Result<Vec<_>, _>>()
        .map_err(data("--features"))?;
    let table = render_comparison(&results);
    print!("{table}");
    write_file("--report", &a.report, &table)?;
    if let Some(path) = &a.json {
        write_file("--json", path, &comparison_json(&results))?;
    }
    Ok(())
}

fn tree(a: TreeArgs) -> Result<(), Failure> {
    let params = a.tree.params()?;
    let dataset = io::load_feature_matrix(&a.features).map_err(data("--features"))?;
    let model = DecisionTreeModel::fit(&dataset, params).map_err(data("--features"))?;
    let annotated = annotate_tree(&model, &dataset).map_err(data("--features"))?;
    print!("{}", render_tree_text(&annotated));
    write_file("--out", &a.out, &export_tree_dot(&annotated, "readmission"))
}

fn subgroup(a: SubgroupArgs) -> Result<(), Failure> {
    let params = a.tree.params()?;
    let dataset = io::load_feature_matrix(&a.features).map_err(data("--features"))?;
    if dataset.catalog.index_of(&a.by).is_none() {
        return Err(Failure::Usage(format!("--by: unknown feature {:?}", a.by)));
    }
    let groups = subgroup_trees(&dataset, &a.by, params).map_err(data("--features"))?;
    fs::create_dir_all(&a.out_dir)
        .map_err(|e| Failure::Data(format!("--out-dir: {}: {e}", a.out_dir.display())))?;
    for g in &groups {
        println!("{} = {}", a.by, g.category);
        print!("{}", render_tree_text(&g.tree));
        let title = format!("{} = {}", a.by, g.category);
        write_file("--out-dir", &a.out_dir.join(format!("{}.dot", g.category)), &export_tree_dot(&g.tree, &title))?;
    }
    Ok(())
}
