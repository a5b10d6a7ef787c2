//! End-to-end pipeline and experiment runner.

use std::collections::HashMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::baselines::{
    brute_force_oracle, exhaustive_baseline, most_popular_baseline, random_baseline, OracleGuard,
    DEFAULT_COMBINATION_BUDGET,
};
use crate::error::{Error, Result};
use crate::featurization::{
    bin_specs_to_json, derive_bins, entity_weights, load_bin_specs, AttributeTable, BinSpec, Dimension, LabelStyle,
    PredicateIndex, UserPredicateTarget,
};
use crate::ids::UserId;
use crate::ingestion::{ActionLog, FollowupSet, InfluencerRank, Network, PropagationOptions, SocialGraph};
use crate::miner::{eager_greedy, mine_explanations, ExplanationSet};
use crate::report::ExplanationReport;
use crate::synth::SynthData;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algorithm {
    Greedy,
    Eager,
    Random,
    MostPopular,
    Exhaustive,
    Oracle,
}

impl Algorithm {
    pub const ALL: [Algorithm; 6] = [
        Algorithm::Greedy,
        Algorithm::Eager,
        Algorithm::Random,
        Algorithm::MostPopular,
        Algorithm::Exhaustive,
        Algorithm::Oracle,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Greedy => "greedy",
            Algorithm::Eager => "eager",
            Algorithm::Random => "random",
            Algorithm::MostPopular => "most-popular",
            Algorithm::Exhaustive => "exhaustive",
            Algorithm::Oracle => "oracle",
        }
    }

    pub fn is_baseline(self) -> bool {
        !matches!(self, Algorithm::Greedy | Algorithm::Eager)
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown algorithm {s:?}")))
    }
}

/// Runs one algorithm. `seed` only matters for [`Algorithm::Random`].
pub fn run_algorithm(index: &PredicateIndex, algorithm: Algorithm, k: usize, l: usize, seed: u64) -> Result<ExplanationSet> {
    match algorithm {
        Algorithm::Greedy => mine_explanations(index, k, l),
        Algorithm::Eager => eager_greedy(index, k, l),
        Algorithm::Random => random_baseline(index, k, l, seed),
        Algorithm::MostPopular => most_popular_baseline(index, k, l),
        Algorithm::Exhaustive => exhaustive_baseline(index, k, l, DEFAULT_COMBINATION_BUDGET).map(|(s, _)| s),
        Algorithm::Oracle => brute_force_oracle(index, k, l, OracleGuard::default()).map(|(_, s)| s),
    }
}

/// Parsed inputs shared by every influencer of a run. Immutable.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub network: Network,
    pub user_attrs: AttributeTable,
    pub action_attrs: AttributeTable,
    pub bins: Vec<BinSpec>,
    pub target: UserPredicateTarget,
}

impl Dataset {
    /// Joins the inputs. Numeric attributes without a spec in `bins` get
    /// equi-depth bins weighted by global followup counts.
    pub fn from_parts(
        network: Network,
        user_attrs: AttributeTable,
        action_attrs: AttributeTable,
        bins: Vec<BinSpec>,
        nbins: usize,
        style: LabelStyle,
        target: UserPredicateTarget,
    ) -> Result<Self> {
        let mut bins = bins;
        let missing = |t: &AttributeTable, bins: &[BinSpec]| {
            t.numeric_attributes().any(|a| !bins.iter().any(|b| b.attribute == a))
        };
        if missing(&user_attrs, &bins) || missing(&action_attrs, &bins) {
            if nbins == 0 {
                return Err(Error::InvalidArgument("nbins must be at least 1".into()));
            }
            let mass = network.followup_mass();
            for table in [&user_attrs, &action_attrs] {
                let weights = entity_weights(&network, &mass, table.dimension);
                for spec in derive_bins(table, &weights, nbins, style)? {
                    if !bins.iter().any(|b| b.attribute == spec.attribute) {
                        bins.push(spec);
                    }
                }
            }
        }
        Ok(Dataset {
            network,
            user_attrs,
            action_attrs,
            bins,
            target,
        })
    }

    pub fn load(cfg: &RunConfig) -> Result<Self> {
        let graph = SocialGraph::from_path(&cfg.graph)?;
        let log = ActionLog::from_path(&cfg.actions)?;
        let network = Network::new(&graph, &log, PropagationOptions { max_delay: cfg.max_delay });
        let user_attrs = match &cfg.user_attrs {
            Some(p) => AttributeTable::from_path(p, Dimension::User)?,
            None => AttributeTable::empty(Dimension::User),
        };
        let action_attrs = match &cfg.action_attrs {
            Some(p) => AttributeTable::from_path(p, Dimension::Action)?,
            None => AttributeTable::empty(Dimension::Action),
        };
        let bins = match &cfg.bins {
            Some(p) => load_bin_specs(p)?,
            None => Vec::new(),
        };
        Self::from_parts(network, user_attrs, action_attrs, bins, cfg.nbins, cfg.label_style, cfg.target)
    }

    /// Parses generated files directly, without touching the filesystem.
    pub fn from_synth(data: &SynthData, nbins: usize, options: PropagationOptions) -> Result<Self> {
        let graph = SocialGraph::parse(data.graph.as_bytes())?;
        let log = ActionLog::parse(data.actions.as_bytes())?;
        let user_attrs = AttributeTable::parse(data.user_attrs.as_bytes(), Dimension::User)?;
        let action_attrs = AttributeTable::parse(data.action_attrs.as_bytes(), Dimension::Action)?;
        let network = Network::new(&graph, &log, options);
        Self::from_parts(
            network,
            user_attrs,
            action_attrs,
            Vec::new(),
            nbins,
            LabelStyle::default(),
            UserPredicateTarget::Follower,
        )
    }

    pub fn index_for(&self, user: UserId) -> Result<(FollowupSet, PredicateIndex)> {
        let fset = self.network.followup_set(user);
        let index = PredicateIndex::build(&self.network, &fset, &self.user_attrs, &self.action_attrs, &self.bins, self.target)?;
        Ok((fset, index))
    }
}

/// Everything a pipeline or sweep run needs.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub graph: PathBuf,
    pub actions: PathBuf,
    pub user_attrs: Option<PathBuf>,
    pub action_attrs: Option<PathBuf>,
    pub bins: Option<PathBuf>,
    pub nbins: usize,
    pub label_style: LabelStyle,
    pub algorithm: Algorithm,
    pub seed: Option<u64>,
    pub k: usize,
    pub l: usize,
    pub top_n: usize,
    pub out: PathBuf,
    pub max_delay: Option<u64>,
    pub target: UserPredicateTarget,
}

impl RunConfig {
    pub fn new(graph: impl Into<PathBuf>, actions: impl Into<PathBuf>, out: impl Into<PathBuf>) -> Self {
        RunConfig {
            graph: graph.into(),
            actions: actions.into(),
            user_attrs: None,
            action_attrs: None,
            bins: None,
            nbins: 3,
            label_style: LabelStyle::default(),
            algorithm: Algorithm::Greedy,
            seed: None,
            k: 6,
            l: 3,
            top_n: 100,
            out: out.into(),
            max_delay: None,
            target: UserPredicateTarget::Follower,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.k == 0 || self.l == 0 || self.top_n == 0 {
            return Err(Error::InvalidArgument("k, l and top must all be at least 1".into()));
        }
        let inputs = [Some(&self.graph), Some(&self.actions), self.user_attrs.as_ref(), self.action_attrs.as_ref(), self.bins.as_ref()];
        for path in inputs.into_iter().flatten() {
            if !path.is_file() {
                return Err(Error::io(path, std::io::Error::new(std::io::ErrorKind::NotFound, "input file not found")));
            }
        }
        match (self.algorithm, self.seed) {
            (Algorithm::Random, None) => Err(Error::InvalidArgument("--algo random needs --seed".into())),
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryRow {
    pub rank: usize,
    pub influencer: u64,
    pub followups: usize,
    pub explanations: usize,
    pub total_coverage: usize,
    pub relative_coverage: f64,
}

#[derive(Debug, Clone, Default)]
pub struct PipelineSummary {
    pub rows: Vec<SummaryRow>,
    pub files: Vec<PathBuf>,
}

pub const SUMMARY_FILE: &str = "summary.csv";
pub const BINS_FILE: &str = "bins.json";

pub fn summary_csv(rows: &[SummaryRow]) -> String {
    let mut out = String::from("rank,influencer,followups,explanations,total_coverage,relative_coverage\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{:.6}\n",
            r.rank, r.influencer, r.followups, r.explanations, r.total_coverage, r.relative_coverage
        ));
    }
    out
}

pub fn report_file_name(rank: usize, influencer: u64) -> String {
    format!("{rank:03}_{influencer}.json")
}

/// Mines one influencer with `cfg`'s algorithm and produces its report.
pub fn explain_influencer(dataset: &Dataset, user: UserId, cfg: &RunConfig) -> Result<ExplanationReport> {
    let (_, index) = dataset.index_for(user)?;
    let seed = cfg.seed.unwrap_or(0);
    let set = run_algorithm(&index, cfg.algorithm, cfg.k, cfg.l, seed)?;
    let report = ExplanationReport::new(&index, &set, dataset.network.user_name(user))?;
    Ok(if cfg.algorithm.is_baseline() {
        let seed = (cfg.algorithm == Algorithm::Random).then_some(seed);
        report.with_algorithm(cfg.algorithm.name(), seed)
    } else {
        report
    })
}

/// Parses the inputs, ranks the top influencers, mines each one and writes
/// one JSON report per influencer, `bins.json` and `summary.csv` under
/// `cfg.out`. Files written before a failure are removed.
pub fn run_pipeline(cfg: &RunConfig) -> Result<PipelineSummary> {
    cfg.validate()?;
    let dataset = Dataset::load(cfg)?;
    let ranks = dataset.network.rank_influencers(cfg.top_n)?;
    let reports: Vec<ExplanationReport> = ranks
        .par_iter()
        .map(|r| explain_influencer(&dataset, r.user, cfg))
        .collect::<Result<_>>()?;

    let mut summary = PipelineSummary::default();
    let result = write_outputs(cfg, &dataset, &reports, &mut summary);
    if let Err(e) = result {
        for f in &summary.files {
            let _ = fs::remove_file(f);
        }
        return Err(e);
    }
    Ok(summary)
}

fn write_outputs(cfg: &RunConfig, dataset: &Dataset, reports: &[ExplanationReport], summary: &mut PipelineSummary) -> Result<()> {
    fs::create_dir_all(&cfg.out).map_err(|e| Error::io(&cfg.out, e))?;
    let write = |name: &str, body: &str, summary: &mut PipelineSummary| -> Result<()> {
        let path = cfg.out.join(name);
        fs::write(&path, body).map_err(|e| Error::io(&path, e))?;
        summary.files.push(path);
        Ok(())
    };
    for (i, report) in reports.iter().enumerate() {
        write(&report_file_name(i + 1, report.influencer), &report.to_json(), summary)?;
        summary.rows.push(SummaryRow {
            rank: i + 1,
            influencer: report.influencer,
            followups: report.total_followups,
            explanations: report.explanations.len(),
            total_coverage: report.total_coverage,
            relative_coverage: report.relative_coverage,
        });
    }
    write(BINS_FILE, &bin_specs_to_json(&dataset.bins), summary)?;
    let csv = summary_csv(&summary.rows);
    write(SUMMARY_FILE, &csv, summary)
}

/// Lower median (the element of rank ceil(n/2)); `None` when empty.
pub fn lower_median(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    Some(v[(v.len() - 1) / 2])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    K,
    L,
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Axis::K => "k",
            Axis::L => "l",
        })
    }
}

impl FromStr for Axis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "k" => Ok(Axis::K),
            "l" => Ok(Axis::L),
            _ => Err(Error::InvalidArgument(format!("unknown sweep axis {s:?}"))),
        }
    }
}

/// One algorithm at one axis value, over every influencer.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AlgorithmRun {
    pub algorithm: Algorithm,
    pub k: usize,
    pub l: usize,
    pub influencers: Vec<u64>,
    pub coverages: Vec<f64>,
    pub millis: Vec<f64>,
}

impl AlgorithmRun {
    pub fn median_coverage(&self) -> f64 {
        lower_median(&self.coverages).unwrap_or(0.0)
    }

    pub fn median_millis(&self) -> f64 {
        lower_median(&self.millis).unwrap_or(0.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepPoint {
    pub value: usize,
    pub runs: Vec<AlgorithmRun>,
}

impl SweepPoint {
    pub fn run(&self, algorithm: Algorithm) -> Option<&AlgorithmRun> {
        self.runs.iter().find(|r| r.algorithm == algorithm)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepResult {
    pub axis: Axis,
    pub points: Vec<SweepPoint>,
}

/// A prepared influencer: its index is built once and shared by every run.
pub struct Subject {
    pub name: u64,
    pub index: PredicateIndex,
}

pub fn prepare_subjects(dataset: &Dataset, ranks: &[InfluencerRank]) -> Result<Vec<Subject>> {
    ranks
        .par_iter()
        .map(|r| {
            let (_, index) = dataset.index_for(r.user)?;
            Ok(Subject { name: r.name, index })
        })
        .collect()
}

/// Runs every algorithm on every subject for each axis value. The other
/// parameter stays at `fixed_k` or `fixed_l`. Wall time covers the mining
/// call only.
pub fn sweep(
    subjects: &[Subject],
    axis: Axis,
    values: &[usize],
    algorithms: &[Algorithm],
    fixed_k: usize,
    fixed_l: usize,
    seed: u64,
) -> Result<SweepResult> {
    if values.is_empty() || values.windows(2).any(|w| w[0] >= w[1]) || values[0] == 0 {
        return Err(Error::InvalidArgument("sweep values must be non-empty, positive and strictly ascending".into()));
    }
    if algorithms.is_empty() {
        return Err(Error::InvalidArgument("sweep needs at least one algorithm".into()));
    }
    let mut points = Vec::with_capacity(values.len());
    for &value in values {
        let (k, l) = match axis {
            Axis::K => (value, fixed_l),
            Axis::L => (fixed_k, value),
        };
        let mut runs = Vec::with_capacity(algorithms.len());
        for &algorithm in algorithms {
            let mut run = AlgorithmRun {
                algorithm,
                k,
                l,
                influencers: Vec::with_capacity(subjects.len()),
                coverages: Vec::with_capacity(subjects.len()),
                millis: Vec::with_capacity(subjects.len()),
            };
            for s in subjects {
                let start = Instant::now();
                let set = run_algorithm(&s.index, algorithm, k, l, seed)?;
                let elapsed = start.elapsed();
                run.influencers.push(s.name);
                run.coverages.push(set.relative_coverage());
                run.millis.push(elapsed.as_secs_f64() * 1e3);
            }
            runs.push(run);
        }
        points.push(SweepPoint { value, runs });
    }
    Ok(SweepResult { axis, points })
}

/// Loads `cfg`'s inputs, takes its top influencers and sweeps.
pub fn sweep_from_config(cfg: &RunConfig, axis: Axis, values: &[usize], algorithms: &[Algorithm]) -> Result<SweepResult> {
    cfg.validate()?;
    let dataset = Dataset::load(cfg)?;
    let ranks = dataset.network.rank_influencers(cfg.top_n)?;
    let subjects = prepare_subjects(&dataset, &ranks)?;
    sweep(&subjects, axis, values, algorithms, cfg.k, cfg.l, cfg.seed.unwrap_or(0))
}

/// Median relative coverage per (value, algorithm).
pub fn sweep_csv(result: &SweepResult) -> String {
    let mut out = String::from("axis,value,algorithm,median_relative_coverage\n");
    for p in &result.points {
        for r in &p.runs {
            out.push_str(&format!("{},{},{},{:.6}\n", result.axis, p.value, r.algorithm, r.median_coverage()));
        }
    }
    out
}

/// Every per-influencer coverage behind [`sweep_csv`].
pub fn sweep_raw_csv(result: &SweepResult) -> String {
    let mut out = String::from("axis,value,algorithm,influencer,relative_coverage\n");
    for p in &result.points {
        for r in &p.runs {
            for (name, c) in r.influencers.iter().zip(&r.coverages) {
                out.push_str(&format!("{},{},{},{},{:.6}\n", result.axis, p.value, r.algorithm, name, c));
            }
        }
    }
    out
}

/// Median wall time of each (algorithm, k, l).
pub fn timing_report(result: &SweepResult) -> String {
    let mut out = String::from("algorithm,k,l,median_millis\n");
    for p in &result.points {
        for r in &p.runs {
            out.push_str(&format!("{},{},{},{:.3}\n", r.algorithm, r.k, r.l, r.median_millis()));
        }
    }
    out
}

/// Writes `sweep.csv` and `sweep_raw.csv` (and `timing.csv` when asked)
/// under `dir`.
pub fn write_sweep(result: &SweepResult, dir: &Path, with_timing: bool) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut files = vec![
        ("sweep.csv", sweep_csv(result)),
        ("sweep_raw.csv", sweep_raw_csv(result)),
    ];
    if with_timing {
        files.push(("timing.csv", timing_report(result)));
    }
    files
        .into_iter()
        .map(|(name, body)| {
            let path = dir.join(name);
            fs::write(&path, body).map_err(|e| Error::io(&path, e))?;
            Ok(path)
        })
        .collect()
}

/// Parses `attr=Display,attr2=` pairs for table rendering.
pub fn parse_display_names(spec: &str) -> Result<HashMap<String, String>> {
    spec.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|pair| {
            let (k, v) = pair
                .split_once('=')
                .ok_or_else(|| Error::InvalidArgument(format!("display name {pair:?} is not attr=name")))?;
            Ok((k.trim().to_string(), v.trim().to_string()))
        })
        .collect()
}
