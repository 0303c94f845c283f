use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;

#[derive(Parser, Debug)]
#[command(name = "elicit", version, about = "Seed itemset selection for cold-start rating elicitation")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

/// Configuration sources shared by every data-driven subcommand.
#[derive(Args, Debug, Clone, Default)]
pub struct ConfigArgs {
    /// Flat key = value configuration file.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Raw interaction file or prepared snapshot directory.
    #[arg(long)]
    pub dataset: Option<PathBuf>,
    /// Seed itemset size.
    #[arg(long)]
    pub k: Option<usize>,
    /// Master random seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Seeded repetitions.
    #[arg(long)]
    pub runs: Option<usize>,
    /// Comma-separated methods.
    #[arg(long)]
    pub methods: Option<String>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Any configuration key, as key=value. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub set: Vec<String>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Binarize and filter a raw interaction file into a matrix snapshot.
    Prepare(ConfigArgs),
    /// Train the selector, extract seeds, re-train the decoder and save the model.
    Train(ConfigArgs),
    /// Evaluate methods over seeded runs on the held-out users.
    Eval(EvalArgs),
    /// Sweep hyper-parameters and keep the best validation cell.
    Grid(GridArgs),
    /// Recommend items to a new user from their answers on the seed items.
    Recommend(RecommendArgs),
    /// Render an evaluation dump as a comparison table.
    Report(ReportArgs),
}

#[derive(Args, Debug, Clone)]
pub struct EvalArgs {
    #[command(flatten)]
    pub config: ConfigArgs,
    /// Trained model to evaluate as DRE instead of training one per run.
    #[arg(long)]
    pub checkpoint: Option<PathBuf>,
    /// Extra method from a seed file, as NAME=path; evaluated with a fresh neural decoder.
    #[arg(long = "seeds", value_name = "NAME=PATH")]
    pub seeds: Vec<String>,
}

#[derive(Args, Debug, Clone)]
pub struct GridArgs {
    #[command(flatten)]
    pub config: ConfigArgs,
    /// Sweep axis, as key=v1,v2,... Repeatable.
    #[arg(long = "grid", value_name = "KEY=VALUES")]
    pub grid: Vec<String>,
}

#[derive(Args, Debug, Clone)]
pub struct RecommendArgs {
    /// Model file written by `train`.
    #[arg(long)]
    pub checkpoint: PathBuf,
    /// Snapshot directory holding the item map; defaults to the checkpoint's directory.
    #[arg(long)]
    pub dataset: Option<PathBuf>,
    /// Ask for each answer on the terminal.
    #[arg(long, conflicts_with = "feedback")]
    pub interactive: bool,
    /// File with one 0/1 answer per seed item, in seed order.
    #[arg(long)]
    pub feedback: Option<PathBuf>,
    /// Number of items to recommend.
    #[arg(long = "top-n", default_value_t = 10)]
    pub top_n: usize,
}

#[derive(Args, Debug, Clone)]
pub struct ReportArgs {
    /// `report.json` files written by `eval`.
    #[arg(required = true)]
    pub reports: Vec<PathBuf>,
    /// Also write the rendered table here.
    #[arg(long)]
    pub out: Option<PathBuf>,
}
