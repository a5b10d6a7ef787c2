//! Attribute tables, equi-depth binning of numeric attributes and the
//! predicate -> cell inverted index for one followup set.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, Read};
use std::path::Path;

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ids::{ActionId, UserId};
use crate::ingestion::{FollowupMass, FollowupSet, Network};
use crate::tsv;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Dimension {
    User,
    Action,
}

impl fmt::Display for Dimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Dimension::User => "user",
            Dimension::Action => "action",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AttributeValue {
    pub attribute: String,
    pub value: String,
    /// Parsed value for attributes declared numeric.
    pub number: Option<f64>,
}

/// Attribute rows for users or actions, grouped by external entity id.
///
/// Header directives: `#numeric: a,b` declares numeric (and single-valued)
/// attributes, `#single: c` declares single-valued categorical attributes.
/// Other categorical attributes may carry several distinct values per entity.
#[derive(Debug, Clone)]
pub struct AttributeTable {
    pub dimension: Dimension,
    numeric: BTreeSet<String>,
    single: BTreeSet<String>,
    rows: BTreeMap<String, Vec<AttributeValue>>,
}

impl AttributeTable {
    pub fn empty(dimension: Dimension) -> Self {
        AttributeTable {
            dimension,
            numeric: BTreeSet::new(),
            single: BTreeSet::new(),
            rows: BTreeMap::new(),
        }
    }

    pub fn parse<R: Read>(reader: R, dimension: Dimension) -> Result<Self> {
        Self::parse_named(BufReader::new(reader), dimension, &format!("<{dimension} attributes>"))
    }

    pub fn from_path(path: impl AsRef<Path>, dimension: Dimension) -> Result<Self> {
        let path = path.as_ref();
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        Self::parse_named(BufReader::new(file), dimension, &path.display().to_string())
    }

    pub fn parse_named<R: BufRead>(reader: R, dimension: Dimension, source_name: &str) -> Result<Self> {
        let mut table = AttributeTable::empty(dimension);
        let mut pending: Vec<(usize, String, String, String)> = Vec::new();
        tsv::for_each_line(reader, source_name, |number, text| {
            let trimmed = text.trim();
            if let Some(list) = directive(trimmed, "numeric") {
                table.numeric.extend(list);
                return Ok(());
            }
            if let Some(list) = directive(trimmed, "single") {
                table.single.extend(list);
                return Ok(());
            }
            if tsv::is_skippable(text) {
                return Ok(());
            }
            let line = tsv::split(number, text);
            line.expect_columns(source_name, 3)?;
            pending.push((
                number,
                line.fields[0].to_string(),
                line.fields[1].to_string(),
                line.fields[2].to_string(),
            ));
            Ok(())
        })?;
        for (number, entity, attribute, value) in pending {
            table
                .insert(&entity, &attribute, &value)
                .map_err(|e| Error::parse(source_name, number, e))?;
        }
        Ok(table)
    }

    pub fn declare_numeric(&mut self, attribute: &str) {
        self.numeric.insert(attribute.to_string());
    }

    pub fn declare_single(&mut self, attribute: &str) {
        self.single.insert(attribute.to_string());
    }

    pub fn is_numeric(&self, attribute: &str) -> bool {
        self.numeric.contains(attribute)
    }

    pub fn is_single_valued(&self, attribute: &str) -> bool {
        self.numeric.contains(attribute) || self.single.contains(attribute)
    }

    pub fn numeric_attributes(&self) -> impl Iterator<Item = &str> {
        self.numeric.iter().map(String::as_str)
    }

    /// Adds one row. Numeric attributes must parse as finite numbers and,
    /// like `#single` attributes, appear at most once per entity. Exact
    /// duplicate rows of multi-valued attributes collapse.
    pub fn insert(&mut self, entity: &str, attribute: &str, value: &str) -> Result<(), String> {
        let number = if self.is_numeric(attribute) {
            match value.parse::<f64>() {
                Ok(x) if x.is_finite() => Some(x),
                _ => return Err(format!("numeric attribute {attribute:?} has non-numeric value {value:?}")),
            }
        } else {
            None
        };
        let single = self.is_single_valued(attribute);
        let row = self.rows.entry(entity.to_string()).or_default();
        for existing in row.iter().filter(|v| v.attribute == attribute) {
            if single {
                return Err(format!(
                    "single-valued attribute {attribute:?} repeated for entity {entity:?}"
                ));
            }
            if existing.value == value {
                return Ok(());
            }
        }
        row.push(AttributeValue {
            attribute: attribute.to_string(),
            value: value.to_string(),
            number,
        });
        Ok(())
    }

    pub fn entity_count(&self) -> usize {
        self.rows.len()
    }

    pub fn entities(&self) -> impl Iterator<Item = &str> {
        self.rows.keys().map(String::as_str)
    }

    pub fn row(&self, entity: &str) -> &[AttributeValue] {
        self.rows.get(entity).map(Vec::as_slice).unwrap_or(&[])
    }

    /// Values of a numeric attribute as (entity, value).
    pub fn numeric_values(&self, attribute: &str) -> Vec<(&str, f64)> {
        self.rows
            .iter()
            .flat_map(|(e, row)| {
                row.iter()
                    .filter(move |v| v.attribute == attribute)
                    .filter_map(move |v| v.number.map(|x| (e.as_str(), x)))
            })
            .collect()
    }
}

fn directive(line: &str, name: &str) -> Option<Vec<String>> {
    let rest = line.strip_prefix('#')?.trim_start();
    let rest = rest.strip_prefix(name)?.trim_start().strip_prefix(':')?;
    Some(
        rest.split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(str::to_string)
            .collect(),
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LabelStyle {
    /// `pre-X`, `X-Y`, ..., `Y+`.
    #[default]
    OpenEnded,
    /// `lo-hi` for every bin, using the observed minimum and maximum at the ends.
    Range,
}

/// Cut points for one numeric attribute. A value equal to a cut point falls
/// in the lower bin.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BinSpec {
    pub attribute: String,
    pub boundaries: Vec<f64>,
    pub labels: Vec<String>,
}

impl BinSpec {
    pub fn new(attribute: &str, boundaries: Vec<f64>, labels: Vec<String>) -> Result<Self> {
        let spec = BinSpec {
            attribute: attribute.to_string(),
            boundaries,
            labels,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.boundaries.windows(2).any(|w| w[0] >= w[1]) || self.boundaries.iter().any(|b| !b.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "bin boundaries for {:?} must be finite and strictly increasing",
                self.attribute
            )));
        }
        if self.labels.len() != self.boundaries.len() + 1 {
            return Err(Error::InvalidArgument(format!(
                "bin spec for {:?} has {} labels for {} boundaries",
                self.attribute,
                self.labels.len(),
                self.boundaries.len()
            )));
        }
        Ok(())
    }

    pub fn bin_count(&self) -> usize {
        self.boundaries.len() + 1
    }

    /// Index of the bin holding `x`.
    pub fn bin_of(&self, x: f64) -> usize {
        self.boundaries.partition_point(|&b| b < x)
    }

    pub fn label_of(&self, x: f64) -> &str {
        &self.labels[self.bin_of(x)]
    }
}

/// Reads a JSON array of bin specs.
pub fn load_bin_specs(path: impl AsRef<Path>) -> Result<Vec<BinSpec>> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let specs: Vec<BinSpec> = serde_json::from_str(&text).map_err(|source| Error::Json {
        context: path.display().to_string(),
        source,
    })?;
    for spec in &specs {
        spec.validate()?;
    }
    Ok(specs)
}

pub fn bin_specs_to_json(specs: &[BinSpec]) -> String {
    let mut s = serde_json::to_string_pretty(specs).expect("bin specs serialize");
    s.push('\n');
    s
}

pub(crate) fn format_number(x: f64) -> String {
    if x.fract() == 0.0 && x.abs() < 1e15 {
        format!("{}", x as i64)
    } else {
        format!("{x}")
    }
}

/// Equi-depth bins over weighted points `(value, weight)`.
///
/// Equal values always share a bin. Among all ways to cut the sorted
/// distinct values into exactly `nbins` non-empty contiguous groups, the
/// returned one minimises the heaviest bin.
pub fn equi_depth_bins(attribute: &str, points: &[(f64, u64)], nbins: usize, style: LabelStyle) -> Result<BinSpec> {
    if nbins == 0 {
        return Err(Error::InvalidArgument("nbins must be at least 1".into()));
    }
    if points.is_empty() {
        return Err(Error::InvalidArgument(format!("no values to bin for {attribute:?}")));
    }
    if points.iter().any(|(x, _)| !x.is_finite()) {
        return Err(Error::InvalidArgument(format!("non-finite value for {attribute:?}")));
    }
    let mut merged: BTreeMap<OrdF64, u64> = BTreeMap::new();
    for &(x, w) in points {
        *merged.entry(OrdF64(x)).or_default() += w;
    }
    let values: Vec<f64> = merged.keys().map(|k| k.0).collect();
    let weights: Vec<u64> = merged.values().copied().collect();
    let d = values.len();
    if nbins > d {
        return Err(Error::InvalidArgument(format!(
            "{nbins} bins requested for {attribute:?} but only {d} distinct values"
        )));
    }

    let ends = minimax_partition(&weights, nbins);
    let boundaries: Vec<f64> = ends[..nbins - 1].iter().map(|&e| values[e - 1]).collect();
    let (lo, hi) = (values[0], values[d - 1]);
    let labels = (0..nbins)
        .map(|t| {
            let from = if t == 0 { lo } else { boundaries[t - 1] };
            let to = if t == nbins - 1 { hi } else { boundaries[t] };
            match style {
                _ if nbins == 1 => format!("{}-{}", format_number(lo), format_number(hi)),
                LabelStyle::OpenEnded if t == 0 => format!("pre-{}", format_number(to)),
                LabelStyle::OpenEnded if t == nbins - 1 => format!("{}+", format_number(from)),
                _ => format!("{}-{}", format_number(from), format_number(to)),
            }
        })
        .collect();
    BinSpec::new(attribute, boundaries, labels)
}

/// Splits `weights` into `groups` non-empty contiguous runs minimising the
/// maximum run sum. Returns the exclusive end index of each run.
fn minimax_partition(weights: &[u64], groups: usize) -> Vec<usize> {
    let d = weights.len();
    let mut prefix = vec![0u64; d + 1];
    for (i, &w) in weights.iter().enumerate() {
        prefix[i + 1] = prefix[i] + w;
    }
    // best[b][i]: minimax of the first i values in b+1 groups.
    let mut best = vec![vec![u64::MAX; d + 1]; groups];
    let mut cut = vec![vec![0usize; d + 1]; groups];
    best[0][1..=d].copy_from_slice(&prefix[1..=d]);
    for b in 1..groups {
        for i in (b + 1)..=d {
            // j ranges over [b, i-1]; best[b-1][j] is non-decreasing in j and
            // the last run's weight prefix[i]-prefix[j] is non-increasing.
            let (mut lo, mut hi) = (b, i - 1);
            while lo < hi {
                let mid = (lo + hi) / 2;
                if best[b - 1][mid] >= prefix[i] - prefix[mid] {
                    hi = mid;
                } else {
                    lo = mid + 1;
                }
            }
            let cost = |j: usize| best[b - 1][j].max(prefix[i] - prefix[j]);
            let mut j = lo;
            if j > b && cost(j - 1) <= cost(j) {
                j -= 1;
            }
            best[b][i] = cost(j);
            cut[b][i] = j;
        }
    }
    let mut ends = vec![0usize; groups];
    let mut i = d;
    for b in (0..groups).rev() {
        ends[b] = i;
        i = cut[b][i];
    }
    ends
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct OrdF64(f64);

impl Eq for OrdF64 {}

impl PartialOrd for OrdF64 {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for OrdF64 {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.total_cmp(&other.0)
    }
}

/// Bins one numeric attribute of `table`, weighting each entity by `weights`
/// (entities missing from `weights` weigh zero).
pub fn bin_numeric_attribute(
    table: &AttributeTable,
    attribute: &str,
    weights: &HashMap<String, u64>,
    nbins: usize,
    style: LabelStyle,
) -> Result<BinSpec> {
    let points: Vec<(f64, u64)> = table
        .numeric_values(attribute)
        .into_iter()
        .map(|(e, x)| (x, weights.get(e).copied().unwrap_or(0)))
        .collect();
    equi_depth_bins(attribute, &points, nbins, style)
}

/// Global followup weight of every entity of `table`'s dimension: followup
/// cells per action, or cells in which the user is the follower.
pub fn entity_weights(network: &Network, mass: &FollowupMass, dimension: Dimension) -> HashMap<String, u64> {
    match dimension {
        Dimension::Action => (0..network.action_count())
            .map(|a| {
                let a = ActionId(a as u32);
                (network.action_name(a).to_string(), mass.per_action[a.index()])
            })
            .collect(),
        Dimension::User => (0..network.user_count())
            .map(|u| {
                let u = UserId(u as u32);
                (network.user_name(u).to_string(), mass.per_follower[u.index()])
            })
            .collect(),
    }
}

/// Bin specs for every numeric attribute of `table`, with at most `nbins`
/// bins each (fewer when the attribute has fewer distinct values).
pub fn derive_bins(
    table: &AttributeTable,
    weights: &HashMap<String, u64>,
    nbins: usize,
    style: LabelStyle,
) -> Result<Vec<BinSpec>> {
    table
        .numeric_attributes()
        .map(|attr| {
            let distinct: BTreeSet<OrdF64> = table.numeric_values(attr).iter().map(|&(_, x)| OrdF64(x)).collect();
            if distinct.is_empty() {
                return Err(Error::InvalidArgument(format!("numeric attribute {attr:?} has no values")));
            }
            bin_numeric_attribute(table, attr, weights, nbins.min(distinct.len()), style)
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PredicateId(pub u32);

impl PredicateId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// An `attribute = value` test on the action or the user side of a cell.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Predicate {
    pub dimension: Dimension,
    pub attribute: String,
    pub value: String,
}

impl fmt::Display for Predicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}={}", self.attribute, self.value)
    }
}

/// Whose attributes user predicates test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum UserPredicateTarget {
    #[default]
    Follower,
    Influencer,
}

/// Inverted index from predicates to the followup cells satisfying them.
///
/// Postings are ascending and duplicate-free, and `c` is in the postings of
/// `p` exactly when `p` is in the predicate list of cell `c`.
#[derive(Debug, Clone)]
pub struct PredicateIndex {
    n_cells: usize,
    predicates: Vec<Predicate>,
    postings: Vec<Vec<u32>>,
    /// Bitset copies of the postings that cover at least 1/32 of the cells.
    dense: Vec<Option<FixedBitSet>>,
    cell_predicates: Vec<Vec<PredicateId>>,
    context: Option<AnnotationContext>,
}

/// Entity-level predicate membership kept for annotation.
#[derive(Debug, Clone, Default)]
pub(crate) struct AnnotationContext {
    /// Every action of the influencer with its catalog action predicates.
    pub actions: Vec<(ActionId, Vec<PredicateId>)>,
    /// Every active follower with the catalog user predicates that apply to it.
    pub followers: Vec<(UserId, Vec<PredicateId>)>,
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
enum ValueKey {
    Bin(usize),
    Text(String),
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
struct PredicateKey {
    dimension: Dimension,
    attribute: String,
    value: ValueKey,
    label: String,
}

struct Featurizer<'a> {
    bins: HashMap<&'a str, &'a BinSpec>,
    keys: Vec<PredicateKey>,
    key_ids: HashMap<PredicateKey, u32>,
}

impl<'a> Featurizer<'a> {
    fn features(&mut self, table: &AttributeTable, entity: &str) -> Vec<u32> {
        let mut out = Vec::new();
        for v in table.row(entity) {
            let (value, label) = match (v.number, self.bins.get(v.attribute.as_str())) {
                (Some(x), Some(spec)) => {
                    let bin = spec.bin_of(x);
                    (ValueKey::Bin(bin), spec.labels[bin].clone())
                }
                _ => (ValueKey::Text(v.value.clone()), v.value.clone()),
            };
            let key = PredicateKey {
                dimension: table.dimension,
                attribute: v.attribute.clone(),
                value,
                label,
            };
            let next = self.keys.len() as u32;
            let id = *self.key_ids.entry(key.clone()).or_insert_with(|| {
                self.keys.push(key);
                next
            });
            out.push(id);
        }
        out.sort_unstable();
        out.dedup();
        out
    }
}

impl PredicateIndex {
    /// Builds the index of `fset`. Action predicates test the cell's action;
    /// user predicates test the follower (or the influencer, per `target`).
    /// Predicates with empty postings are left out of the catalog, and
    /// catalog ids follow (dimension, attribute, value) order with bins in
    /// ascending order.
    pub fn build(
        network: &Network,
        fset: &FollowupSet,
        user_attrs: &AttributeTable,
        action_attrs: &AttributeTable,
        bins: &[BinSpec],
        target: UserPredicateTarget,
    ) -> Result<Self> {
        if user_attrs.dimension != Dimension::User || action_attrs.dimension != Dimension::Action {
            return Err(Error::InvalidArgument(
                "attribute tables passed with the wrong dimension".into(),
            ));
        }
        let bin_map: HashMap<&str, &BinSpec> = bins.iter().map(|b| (b.attribute.as_str(), b)).collect();
        for table in [user_attrs, action_attrs] {
            if let Some(attr) = table.numeric_attributes().find(|a| !bin_map.contains_key(a)) {
                return Err(Error::InvalidArgument(format!(
                    "no bin spec for numeric {} attribute {attr:?}",
                    table.dimension
                )));
            }
        }
        let mut fz = Featurizer {
            bins: bin_map,
            keys: Vec::new(),
            key_ids: HashMap::new(),
        };

        let influencer_actions = network.actions_of(fset.influencer);
        let action_features: Vec<Vec<u32>> = influencer_actions
            .iter()
            .map(|&a| fz.features(action_attrs, network.action_name(a)))
            .collect();
        let action_slot: HashMap<ActionId, usize> =
            influencer_actions.iter().enumerate().map(|(i, &a)| (a, i)).collect();

        let followers = fset.active_followers();
        let influencer_features = fz.features(user_attrs, &network.user_name(fset.influencer).to_string());
        let follower_features: Vec<Vec<u32>> = followers
            .iter()
            .map(|&v| match target {
                UserPredicateTarget::Follower => fz.features(user_attrs, &network.user_name(v).to_string()),
                UserPredicateTarget::Influencer => influencer_features.clone(),
            })
            .collect();
        let follower_slot: HashMap<UserId, usize> = followers.iter().enumerate().map(|(i, &v)| (v, i)).collect();

        let mut raw_postings: Vec<Vec<u32>> = vec![Vec::new(); fz.keys.len()];
        for (cid, cell) in fset.cells().iter().enumerate() {
            let slot = *action_slot
                .get(&cell.action)
                .expect("followup cell on an action the influencer did not perform");
            let mut feats: Vec<u32> = action_features[slot]
                .iter()
                .chain(&follower_features[follower_slot[&cell.follower]])
                .copied()
                .collect();
            feats.sort_unstable();
            feats.dedup();
            for k in feats {
                raw_postings[k as usize].push(cid as u32);
            }
        }

        let mut live: Vec<u32> = (0..fz.keys.len() as u32)
            .filter(|&k| !raw_postings[k as usize].is_empty())
            .collect();
        live.sort_by(|&a, &b| fz.keys[a as usize].cmp(&fz.keys[b as usize]));
        let mut remap: HashMap<u32, PredicateId> = HashMap::new();
        let mut predicates = Vec::with_capacity(live.len());
        let mut postings = Vec::with_capacity(live.len());
        for (new, &k) in live.iter().enumerate() {
            remap.insert(k, PredicateId(new as u32));
            let key = &fz.keys[k as usize];
            predicates.push(Predicate {
                dimension: key.dimension,
                attribute: key.attribute.clone(),
                value: key.label.clone(),
            });
            postings.push(std::mem::take(&mut raw_postings[k as usize]));
        }
        let translate = |feats: &[u32]| -> Vec<PredicateId> {
            let mut out: Vec<PredicateId> = feats.iter().filter_map(|k| remap.get(k).copied()).collect();
            out.sort_unstable();
            out
        };
        let context = AnnotationContext {
            actions: influencer_actions
                .iter()
                .zip(&action_features)
                .map(|(&a, f)| (a, translate(f)))
                .collect(),
            followers: followers
                .iter()
                .zip(&follower_features)
                .map(|(&v, f)| (v, translate(f)))
                .collect(),
        };
        let mut index = Self::from_postings(fset.len(), predicates.into_iter().zip(postings).collect())?;
        index.context = Some(context);
        Ok(index)
    }

    /// Builds an index directly from predicate postings over `n_cells`
    /// cells. Ids follow the given order; empty postings are kept.
    pub fn from_postings(n_cells: usize, entries: Vec<(Predicate, Vec<u32>)>) -> Result<Self> {
        let mut predicates = Vec::with_capacity(entries.len());
        let mut postings = Vec::with_capacity(entries.len());
        let mut cell_predicates: Vec<Vec<PredicateId>> = vec![Vec::new(); n_cells];
        let mut seen = BTreeSet::new();
        for (pid, (pred, mut list)) in entries.into_iter().enumerate() {
            if !seen.insert((pred.dimension, pred.attribute.clone(), pred.value.clone())) {
                return Err(Error::InvalidArgument(format!("duplicate predicate {pred}")));
            }
            list.sort_unstable();
            list.dedup();
            if let Some(&c) = list.last() {
                if c as usize >= n_cells {
                    return Err(Error::InvalidArgument(format!(
                        "posting of {pred} references cell {c} of {n_cells}"
                    )));
                }
            }
            for &c in &list {
                cell_predicates[c as usize].push(PredicateId(pid as u32));
            }
            predicates.push(pred);
            postings.push(list);
        }
        let dense = postings
            .iter()
            .map(|list| {
                (n_cells > 0 && list.len() * 32 >= n_cells).then(|| {
                    let mut bits = FixedBitSet::with_capacity(n_cells);
                    bits.extend(list.iter().map(|&c| c as usize));
                    bits
                })
            })
            .collect();
        Ok(PredicateIndex {
            n_cells,
            predicates,
            postings,
            dense,
            cell_predicates,
            context: None,
        })
    }

    /// Number of cells in the followup set.
    pub fn cell_count(&self) -> usize {
        self.n_cells
    }

    pub fn predicate_count(&self) -> usize {
        self.predicates.len()
    }

    pub fn predicate(&self, id: PredicateId) -> &Predicate {
        &self.predicates[id.index()]
    }

    pub fn predicates(&self) -> &[Predicate] {
        &self.predicates
    }

    pub fn find(&self, dimension: Dimension, attribute: &str, value: &str) -> Option<PredicateId> {
        self.predicates
            .iter()
            .position(|p| p.dimension == dimension && p.attribute == attribute && p.value == value)
            .map(|i| PredicateId(i as u32))
    }

    pub fn postings(&self, id: PredicateId) -> &[u32] {
        &self.postings[id.index()]
    }

    /// The posting as a bitset, kept only for dense postings.
    pub fn posting_bits(&self, id: PredicateId) -> Option<&FixedBitSet> {
        self.dense[id.index()].as_ref()
    }

    pub fn cell_predicates(&self, cell: usize) -> &[PredicateId] {
        &self.cell_predicates[cell]
    }

    pub fn ids(&self) -> impl Iterator<Item = PredicateId> {
        (0..self.predicates.len() as u32).map(PredicateId)
    }

    pub fn check_id(&self, id: PredicateId) -> Result<()> {
        if id.index() < self.predicates.len() {
            Ok(())
        } else {
            Err(Error::NotFound {
                kind: "predicate",
                id: id.0.to_string(),
            })
        }
    }

    pub(crate) fn context(&self) -> Option<&AnnotationContext> {
        self.context.as_ref()
    }
}

/// Predicates by posting length, descending; ties by ascending id.
pub fn predicate_popularity(index: &PredicateIndex) -> Vec<(PredicateId, usize)> {
    let mut out: Vec<(PredicateId, usize)> = index.ids().map(|p| (p, index.postings(p).len())).collect();
    out.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
    out
}
