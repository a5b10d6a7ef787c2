use std::collections::HashMap;
use std::path::PathBuf;

use pyo3::create_exception;
use pyo3::exceptions::{PyOSError, PyValueError};
use pyo3::prelude::*;

use proxi_core::featurization::{
    bin_specs_to_json, Dimension, LabelStyle, Predicate as CorePredicate, PredicateId,
    PredicateIndex as CoreIndex, UserPredicateTarget,
};
use proxi_core::harness::{self, Algorithm, RunConfig};
use proxi_core::ingestion::{histogram_csv, ActionLog, Network as CoreNetwork, PropagationOptions, SocialGraph};
use proxi_core::miner::ExplanationSet as CoreSet;
use proxi_core::report::ExplanationReport;
use proxi_core::synth::{generate, SynthConfig, SynthData};

create_exception!(proxi, ProxiError, PyValueError, "Invalid input or configuration.");
create_exception!(proxi, ResourceLimitError, ProxiError, "An enumeration guard was exceeded.");

fn to_py(e: proxi_core::Error) -> PyErr {
    match e {
        proxi_core::Error::Io { .. } => PyOSError::new_err(e.to_string()),
        e if e.is_resource() => ResourceLimitError::new_err(e.to_string()),
        e => ProxiError::new_err(e.to_string()),
    }
}

fn options(max_delay: Option<u64>) -> PropagationOptions {
    PropagationOptions { max_delay }
}

fn parse_dimension(s: &str) -> PyResult<Dimension> {
    match s {
        "user" => Ok(Dimension::User),
        "action" => Ok(Dimension::Action),
        _ => Err(ProxiError::new_err(format!("dimension must be 'user' or 'action', not {s:?}"))),
    }
}

/// Social graph joined with an action log.
#[pyclass(module = "proxi")]
struct Network {
    inner: CoreNetwork,
}

#[pymethods]
impl Network {
    #[new]
    #[pyo3(signature = (graph, actions, max_delay=None))]
    fn new(graph: PathBuf, actions: PathBuf, max_delay: Option<u64>) -> PyResult<Self> {
        let g = SocialGraph::from_path(&graph).map_err(to_py)?;
        let l = ActionLog::from_path(&actions).map_err(to_py)?;
        Ok(Network { inner: CoreNetwork::new(&g, &l, options(max_delay)) })
    }

    /// Builds a network from file contents instead of paths.
    #[staticmethod]
    #[pyo3(signature = (graph, actions, max_delay=None))]
    fn from_strings(graph: &str, actions: &str, max_delay: Option<u64>) -> PyResult<Self> {
        let g = SocialGraph::parse(graph.as_bytes()).map_err(to_py)?;
        let l = ActionLog::parse(actions.as_bytes()).map_err(to_py)?;
        Ok(Network { inner: CoreNetwork::new(&g, &l, options(max_delay)) })
    }

    #[getter]
    fn user_count(&self) -> usize {
        self.inner.user_count()
    }

    #[getter]
    fn action_count(&self) -> usize {
        self.inner.action_count()
    }

    /// `(influencer, followups)` pairs, most followups first.
    fn rank_influencers(&self, top_n: usize) -> PyResult<Vec<(u64, u64)>> {
        let ranks = self.inner.rank_influencers(top_n).map_err(to_py)?;
        Ok(ranks.iter().map(|r| (r.name, r.followups)).collect())
    }

    /// `(action, follower)` pairs followed up from `influencer`.
    fn followups(&self, influencer: u64) -> PyResult<Vec<(String, u64)>> {
        let set = self.inner.followup_set_of(influencer).map_err(to_py)?;
        Ok(set
            .cells()
            .iter()
            .map(|c| (self.inner.action_name(c.action).to_string(), self.inner.user_name(c.follower)))
            .collect())
    }

    /// `(followups, users)` rows of the followup-count histogram.
    fn histogram(&self) -> Vec<(u64, u64)> {
        self.inner.followup_histogram()
    }

    fn histogram_csv(&self) -> String {
        histogram_csv(&self.inner.followup_histogram())
    }
}

/// Inputs of a mining run: network, attribute tables and bins.
#[pyclass(module = "proxi")]
struct Dataset {
    inner: harness::Dataset,
}

#[pymethods]
impl Dataset {
    #[new]
    #[pyo3(signature = (graph, actions, user_attrs=None, action_attrs=None, bins=None, nbins=3, max_delay=None, target="follower", range_labels=false))]
    #[allow(clippy::too_many_arguments)]
    fn new(
        graph: PathBuf,
        actions: PathBuf,
        user_attrs: Option<PathBuf>,
        action_attrs: Option<PathBuf>,
        bins: Option<PathBuf>,
        nbins: usize,
        max_delay: Option<u64>,
        target: &str,
        range_labels: bool,
    ) -> PyResult<Self> {
        let mut cfg = RunConfig::new(graph, actions, PathBuf::new());
        cfg.user_attrs = user_attrs;
        cfg.action_attrs = action_attrs;
        cfg.bins = bins;
        cfg.nbins = nbins;
        cfg.max_delay = max_delay;
        cfg.label_style = if range_labels { LabelStyle::Range } else { LabelStyle::OpenEnded };
        cfg.target = match target {
            "follower" => UserPredicateTarget::Follower,
            "influencer" => UserPredicateTarget::Influencer,
            other => return Err(ProxiError::new_err(format!("unknown target {other:?}"))),
        };
        Ok(Dataset { inner: harness::Dataset::load(&cfg).map_err(to_py)? })
    }

    /// Seeded synthetic dataset, parsed in memory.
    #[staticmethod]
    #[pyo3(signature = (users=5000, actions=2000, seed=1, nbins=3))]
    fn synthetic(users: usize, actions: usize, seed: u64, nbins: usize) -> PyResult<Self> {
        let data = generate(&SynthConfig { users, actions, seed, ..SynthConfig::default() }).map_err(to_py)?;
        let inner = harness::Dataset::from_synth(&data, nbins, PropagationOptions::default()).map_err(to_py)?;
        Ok(Dataset { inner })
    }

    fn rank_influencers(&self, top_n: usize) -> PyResult<Vec<(u64, u64)>> {
        let ranks = self.inner.network.rank_influencers(top_n).map_err(to_py)?;
        Ok(ranks.iter().map(|r| (r.name, r.followups)).collect())
    }

    /// Predicate index over the followups of `influencer`.
    fn index(&self, influencer: u64) -> PyResult<PredicateIndex> {
        let user = self
            .inner
            .network
            .user_id(influencer)
            .ok_or_else(|| ProxiError::new_err(format!("unknown user {influencer}")))?;
        let (_, index) = self.inner.index_for(user).map_err(to_py)?;
        Ok(PredicateIndex { inner: index, influencer })
    }

    fn bins_json(&self) -> String {
        bin_specs_to_json(&self.inner.bins)
    }
}

/// Inverted index from predicates to followup cells.
#[pyclass(module = "proxi")]
struct PredicateIndex {
    inner: CoreIndex,
    influencer: u64,
}

#[pymethods]
impl PredicateIndex {
    /// Index over explicit postings: `(dimension, attribute, value, cells)`.
    #[staticmethod]
    fn from_postings(n_cells: usize, entries: Vec<(String, String, String, Vec<u32>)>) -> PyResult<Self> {
        let entries = entries
            .into_iter()
            .map(|(d, attribute, value, cells)| {
                Ok((CorePredicate { dimension: parse_dimension(&d)?, attribute, value }, cells))
            })
            .collect::<PyResult<Vec<_>>>()?;
        Ok(PredicateIndex { inner: CoreIndex::from_postings(n_cells, entries).map_err(to_py)?, influencer: 0 })
    }

    #[getter]
    fn cell_count(&self) -> usize {
        self.inner.cell_count()
    }

    #[getter]
    fn predicate_count(&self) -> usize {
        self.inner.predicate_count()
    }

    /// `(dimension, attribute, value)` per predicate id.
    fn predicates(&self) -> Vec<(String, String, String)> {
        self.inner
            .predicates()
            .iter()
            .map(|p| (p.dimension.to_string(), p.attribute.clone(), p.value.clone()))
            .collect()
    }

    fn postings(&self, predicate: u32) -> PyResult<Vec<u32>> {
        let id = PredicateId(predicate);
        self.inner.check_id(id).map_err(to_py)?;
        Ok(self.inner.postings(id).to_vec())
    }

    /// Mines with the lazy greedy.
    fn mine(&self, k: usize, l: usize) -> PyResult<ExplanationSet> {
        self.run("greedy", k, l, 0)
    }

    /// Runs any algorithm: greedy, eager, random, most-popular, exhaustive
    /// or oracle.
    #[pyo3(signature = (algorithm, k, l, seed=0))]
    fn run(&self, algorithm: &str, k: usize, l: usize, seed: u64) -> PyResult<ExplanationSet> {
        let algorithm: Algorithm = algorithm.parse().map_err(to_py)?;
        let inner = harness::run_algorithm(&self.inner, algorithm, k, l, seed).map_err(to_py)?;
        Ok(ExplanationSet { inner })
    }

    /// Annotated JSON report of `set`, as written by the CLI.
    fn report(&self, set: PyRef<'_, ExplanationSet>) -> PyResult<String> {
        let report = ExplanationReport::new(&self.inner, &set.inner, self.influencer).map_err(to_py)?;
        Ok(report.to_json())
    }
}

/// Mined explanations with coverage bookkeeping.
#[pyclass(module = "proxi")]
struct ExplanationSet {
    inner: CoreSet,
}

#[pymethods]
impl ExplanationSet {
    /// Predicate ids of each explanation, in selection order.
    #[getter]
    fn explanations(&self) -> Vec<Vec<u32>> {
        self.inner.predicate_lists().into_iter().map(|e| e.into_iter().map(|p| p.0).collect()).collect()
    }

    /// Cells covered by each explanation.
    #[getter]
    fn covered(&self) -> Vec<Vec<u32>> {
        self.inner.explanations.iter().map(|e| e.covered.clone()).collect()
    }

    #[getter]
    fn total_coverage(&self) -> usize {
        self.inner.total_coverage()
    }

    #[getter]
    fn relative_coverage(&self) -> f64 {
        self.inner.relative_coverage()
    }

    #[getter]
    fn universe(&self) -> usize {
        self.inner.universe()
    }

    #[getter]
    fn truncated(&self) -> bool {
        self.inner.truncated
    }

    fn to_json(&self) -> String {
        self.inner.to_json()
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __repr__(&self) -> String {
        format!(
            "ExplanationSet(explanations={}, coverage={}/{})",
            self.inner.len(),
            self.inner.total_coverage(),
            self.inner.universe()
        )
    }
}

/// Renders a JSON report as a text table.
#[pyfunction]
#[pyo3(signature = (report_json, names=None))]
fn render_table(report_json: &str, names: Option<HashMap<String, String>>) -> PyResult<String> {
    let report = ExplanationReport::from_json(report_json).map_err(to_py)?;
    Ok(proxi_core::render::render_table(&report, &names.unwrap_or_default()))
}

/// Seeded synthetic input files as a dict of file name to contents.
/// Also writes them to `out` when given.
#[pyfunction]
#[pyo3(signature = (users=5000, actions=2000, seed=1, out=None))]
fn generate_synthetic(users: usize, actions: usize, seed: u64, out: Option<PathBuf>) -> PyResult<HashMap<String, String>> {
    let data = generate(&SynthConfig { users, actions, seed, ..SynthConfig::default() }).map_err(to_py)?;
    if let Some(dir) = out {
        data.write_to(&dir).map_err(to_py)?;
    }
    Ok(HashMap::from([
        (SynthData::GRAPH_FILE.to_string(), data.graph),
        (SynthData::ACTIONS_FILE.to_string(), data.actions),
        (SynthData::USER_ATTRS_FILE.to_string(), data.user_attrs),
        (SynthData::ACTION_ATTRS_FILE.to_string(), data.action_attrs),
    ]))
}

type SummaryTuple = (usize, u64, usize, usize, usize, f64);

/// Full pipeline; returns summary rows
/// `(rank, influencer, followups, explanations, total_coverage, relative_coverage)`.
#[pyfunction]
#[pyo3(signature = (graph, actions, out, user_attrs=None, action_attrs=None, bins=None, algorithm="greedy", k=6, l=3, top_n=100, seed=None, max_delay=None))]
#[allow(clippy::too_many_arguments)]
fn run_pipeline(
    graph: PathBuf,
    actions: PathBuf,
    out: PathBuf,
    user_attrs: Option<PathBuf>,
    action_attrs: Option<PathBuf>,
    bins: Option<PathBuf>,
    algorithm: &str,
    k: usize,
    l: usize,
    top_n: usize,
    seed: Option<u64>,
    max_delay: Option<u64>,
) -> PyResult<Vec<SummaryTuple>> {
    let mut cfg = RunConfig::new(graph, actions, out);
    cfg.user_attrs = user_attrs;
    cfg.action_attrs = action_attrs;
    cfg.bins = bins;
    cfg.algorithm = algorithm.parse().map_err(to_py)?;
    cfg.k = k;
    cfg.l = l;
    cfg.top_n = top_n;
    cfg.seed = seed;
    cfg.max_delay = max_delay;
    let summary = harness::run_pipeline(&cfg).map_err(to_py)?;
    Ok(summary
        .rows
        .iter()
        .map(|r| (r.rank, r.influencer, r.followups, r.explanations, r.total_coverage, r.relative_coverage))
        .collect())
}

#[pymodule]
fn proxi(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add("ProxiError", m.py().get_type::<ProxiError>())?;
    m.add("ResourceLimitError", m.py().get_type::<ResourceLimitError>())?;
    m.add_class::<Network>()?;
    m.add_class::<Dataset>()?;
    m.add_class::<PredicateIndex>()?;
    m.add_class::<ExplanationSet>()?;
    m.add_function(wrap_pyfunction!(render_table, m)?)?;
    m.add_function(wrap_pyfunction!(generate_synthetic, m)?)?;
    m.add_function(wrap_pyfunction!(run_pipeline, m)?)?;
    Ok(())
}
