use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use proxi_core::featurization::{LabelStyle, UserPredicateTarget};
use proxi_core::harness::{self, Algorithm, Axis, RunConfig};
use proxi_core::ingestion::{histogram_csv, ActionLog, Network, PropagationOptions, SocialGraph};
use proxi_core::render::render_table;
use proxi_core::report::ExplanationReport;
use proxi_core::synth::{generate, SynthConfig};
use proxi_core::{Error, Result};

#[derive(Parser)]
#[command(name = "proxi", version, about = "Explain who follows an influencer, and why")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Rank users by number of followups.
    Rank(RankArgs),
    /// Mine explanations for the top influencers with the greedy miner.
    Mine(MineArgs),
    /// Run a baseline for the top influencers.
    Baseline(BaselineArgs),
    /// Coverage (and optionally timing) over a range of k or l.
    Sweep(SweepArgs),
    /// Render one explanation report as a text table.
    Render(RenderArgs),
    /// Histogram of followups per influencer.
    Histogram(NetworkArgs),
    /// Write a seeded synthetic dataset.
    Gen(GenArgs),
}

#[derive(Args)]
struct NetworkArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    actions: PathBuf,
    /// Drop propagation arcs slower than this many time units.
    #[arg(long)]
    max_delay: Option<u64>,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RankArgs {
    #[command(flatten)]
    network: NetworkArgs,
    #[arg(long, default_value_t = 100)]
    top: usize,
}

#[derive(Clone, Copy, ValueEnum)]
enum Target {
    Follower,
    Influencer,
}

#[derive(Clone, Copy, ValueEnum)]
enum Labels {
    OpenEnded,
    Range,
}

#[derive(Args)]
struct Inputs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    actions: PathBuf,
    #[arg(long)]
    user_attrs: Option<PathBuf>,
    #[arg(long)]
    action_attrs: Option<PathBuf>,
    /// JSON bin specs; numeric attributes without one get equi-depth bins.
    #[arg(long)]
    bins: Option<PathBuf>,
    #[arg(long, default_value_t = 3)]
    nbins: usize,
    #[arg(long, value_enum, default_value_t = Labels::OpenEnded)]
    bin_labels: Labels,
    #[arg(long)]
    max_delay: Option<u64>,
    #[arg(long, value_enum, default_value_t = Target::Follower)]
    user_predicate_target: Target,
    #[arg(short, default_value_t = 6)]
    k: usize,
    #[arg(short, default_value_t = 3)]
    l: usize,
    #[arg(long, default_value_t = 100)]
    top: usize,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: PathBuf,
}

impl Inputs {
    fn config(&self, algorithm: Algorithm) -> RunConfig {
        let mut cfg = RunConfig::new(&self.graph, &self.actions, &self.out);
        cfg.user_attrs = self.user_attrs.clone();
        cfg.action_attrs = self.action_attrs.clone();
        cfg.bins = self.bins.clone();
        cfg.nbins = self.nbins;
        cfg.label_style = match self.bin_labels {
            Labels::OpenEnded => LabelStyle::OpenEnded,
            Labels::Range => LabelStyle::Range,
        };
        cfg.max_delay = self.max_delay;
        cfg.target = match self.user_predicate_target {
            Target::Follower => UserPredicateTarget::Follower,
            Target::Influencer => UserPredicateTarget::Influencer,
        };
        cfg.k = self.k;
        cfg.l = self.l;
        cfg.top_n = self.top;
        cfg.seed = self.seed;
        cfg.algorithm = algorithm;
        cfg
    }
}

#[derive(Args)]
struct MineArgs {
    #[command(flatten)]
    inputs: Inputs,
    #[arg(long, default_value = "greedy", value_parser = ["greedy", "eager"])]
    algo: String,
}

#[derive(Args)]
struct BaselineArgs {
    #[command(flatten)]
    inputs: Inputs,
    #[arg(long, value_parser = ["random", "most-popular", "exhaustive", "oracle"])]
    algo: String,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    inputs: Inputs,
    #[arg(long, value_parser = ["k", "l"])]
    axis: String,
    /// Ascending axis values, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    values: Vec<usize>,
    /// Algorithms to compare, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "greedy,most-popular,random,exhaustive")]
    algo: Vec<String>,
    /// Also write timing.csv (wall-clock, so not reproducible byte for byte).
    #[arg(long)]
    timing: bool,
}

#[derive(Args)]
struct RenderArgs {
    /// Explanation report JSON written by `mine` or `baseline`.
    #[arg(long)]
    report: PathBuf,
    /// Display names as attr=Name pairs; an empty name shows the bare value.
    #[arg(long, default_value = "")]
    names: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 5_000)]
    users: usize,
    #[arg(long, default_value_t = 2_000)]
    actions: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

fn emit(out: Option<&Path>, body: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, body).map_err(|e| io_error(path, e)),
        None => std::io::stdout()
            .write_all(body.as_bytes())
            .map_err(|e| io_error(Path::new("<stdout>"), e)),
    }
}

fn io_error(path: &Path, source: std::io::Error) -> Error {
    Error::Io { path: path.to_path_buf(), source }
}

fn load_network(args: &NetworkArgs) -> Result<Network> {
    let graph = SocialGraph::from_path(&args.graph)?;
    let log = ActionLog::from_path(&args.actions)?;
    Ok(Network::new(&graph, &log, PropagationOptions { max_delay: args.max_delay }))
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Rank(args) => {
            let network = load_network(&args.network)?;
            let mut csv = String::from("rank,influencer,followups\n");
            for (i, r) in network.rank_influencers(args.top)?.iter().enumerate() {
                csv.push_str(&format!("{},{},{}\n", i + 1, r.name, r.followups));
            }
            emit(args.network.out.as_deref(), &csv)
        }
        Command::Mine(args) => {
            let summary = harness::run_pipeline(&args.inputs.config(args.algo.parse()?))?;
            eprintln!("wrote {} reports to {}", summary.rows.len(), args.inputs.out.display());
            Ok(())
        }
        Command::Baseline(args) => {
            let summary = harness::run_pipeline(&args.inputs.config(args.algo.parse()?))?;
            eprintln!("wrote {} reports to {}", summary.rows.len(), args.inputs.out.display());
            Ok(())
        }
        Command::Sweep(args) => {
            let algorithms = args.algo.iter().map(|a| a.parse()).collect::<Result<Vec<Algorithm>>>()?;
            let axis: Axis = args.axis.parse()?;
            let mut cfg = args.inputs.config(Algorithm::Greedy);
            cfg.seed = Some(cfg.seed.unwrap_or(0));
            let result = harness::sweep_from_config(&cfg, axis, &args.values, &algorithms)?;
            harness::write_sweep(&result, &args.inputs.out, args.timing)?;
            Ok(())
        }
        Command::Render(args) => {
            let text = fs::read_to_string(&args.report).map_err(|e| io_error(&args.report, e))?;
            let report = ExplanationReport::from_json(&text)?;
            let names = harness::parse_display_names(&args.names)?;
            emit(args.out.as_deref(), &render_table(&report, &names))
        }
        Command::Histogram(args) => {
            let network = load_network(&args)?;
            emit(args.out.as_deref(), &histogram_csv(&network.followup_histogram()))
        }
        Command::Gen(args) => {
            let cfg = SynthConfig {
                users: args.users,
                actions: args.actions,
                seed: args.seed,
                ..SynthConfig::default()
            };
            generate(&cfg)?.write_to(&args.out)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_resource() { 3 } else { 2 })
        }
    }
}
