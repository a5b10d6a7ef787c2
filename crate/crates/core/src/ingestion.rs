//! Social graph and action log parsing, per-action propagation graphs and
//! followup sets.
//!
//! A user `v` is a followup of influencer `u` on action `a` when both
//! performed `a` and there is a path `u -> ... -> v` in the social graph
//! along which every hop strictly increases the performance time. The set
//! of such `(a, v)` pairs is the influencer's followup set; it is the
//! universe every explanation later covers.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fs::File;
use std::io::{BufRead, BufReader, Read};
use std::path::Path;

use fixedbitset::FixedBitSet;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::ids::{ActionId, IdMap, UserId};
use crate::tsv;

/// Directed social graph. An arc `u -> v` means `v` follows `u`, so
/// influence flows from `u` to `v`.
#[derive(Debug, Clone, Default)]
pub struct SocialGraph {
    users: IdMap<u64>,
    followers: Vec<Vec<UserId>>,
    arc_count: usize,
}

impl SocialGraph {
    pub fn new() -> Self {
        Self::default()
    }

    /// Parses `u<TAB>v` lines. Duplicate arcs collapse; self-arcs are rejected.
    pub fn parse<R: Read>(reader: R) -> Result<Self> {
        Self::parse_named(BufReader::new(reader), "<graph>")
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        Self::parse_named(BufReader::new(file), &path.display().to_string())
    }

    pub fn parse_named<R: BufRead>(reader: R, source_name: &str) -> Result<Self> {
        let mut graph = SocialGraph::new();
        tsv::for_each_line(reader, source_name, |number, text| {
            if tsv::is_skippable(text) {
                return Ok(());
            }
            let line = tsv::split(number, text);
            line.expect_columns(source_name, 2)?;
            let u = line.integer(source_name, 0, "user id")?;
            let v = line.integer(source_name, 1, "user id")?;
            if u == v {
                return Err(Error::parse(source_name, number, format!("self-arc on user {u}")));
            }
            let u = graph.add_user(u);
            let v = graph.add_user(v);
            graph.followers[u.index()].push(v);
            Ok(())
        })?;
        graph.arc_count = 0;
        for list in &mut graph.followers {
            list.sort_unstable();
            list.dedup();
            graph.arc_count += list.len();
        }
        Ok(graph)
    }

    /// Registers `external` if unseen and returns its dense id.
    pub fn add_user(&mut self, external: u64) -> UserId {
        let id = self.users.intern(&external);
        if id as usize == self.followers.len() {
            self.followers.push(Vec::new());
        }
        UserId(id)
    }

    /// Adds the arc `u -> v` ("v follows u"). Returns false if it already existed.
    pub fn add_arc(&mut self, u: u64, v: u64) -> Result<bool> {
        if u == v {
            return Err(Error::InvalidArgument(format!("self-arc on user {u}")));
        }
        let u = self.add_user(u);
        let v = self.add_user(v);
        let list = &mut self.followers[u.index()];
        match list.binary_search(&v) {
            Ok(_) => Ok(false),
            Err(pos) => {
                list.insert(pos, v);
                self.arc_count += 1;
                Ok(true)
            }
        }
    }

    pub fn user_count(&self) -> usize {
        self.users.len()
    }

    pub fn arc_count(&self) -> usize {
        self.arc_count
    }

    pub fn user_id(&self, external: u64) -> Option<UserId> {
        self.users.get(&external).map(UserId)
    }

    pub fn user_name(&self, user: UserId) -> u64 {
        *self.users.name(user.0)
    }

    /// Followers of `user`, ascending by dense id.
    pub fn followers(&self, user: UserId) -> &[UserId] {
        &self.followers[user.index()]
    }

    pub fn arcs(&self) -> impl Iterator<Item = (UserId, UserId)> + '_ {
        self.followers
            .iter()
            .enumerate()
            .flat_map(|(u, vs)| vs.iter().map(move |&v| (UserId(u as u32), v)))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct ActionRecord {
    /// External user id.
    pub user: u64,
    pub action: ActionId,
    pub time: u64,
}

/// The action log: at most one record per (user, action), keeping the
/// earliest timestamp, sorted by (action, time, user).
#[derive(Debug, Clone, Default)]
pub struct ActionLog {
    actions: IdMap<String>,
    records: Vec<ActionRecord>,
}

impl ActionLog {
    pub fn parse<R: Read>(reader: R) -> Result<Self> {
        Self::parse_named(BufReader::new(reader), "<actions>")
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        Self::parse_named(BufReader::new(file), &path.display().to_string())
    }

    pub fn parse_named<R: BufRead>(reader: R, source_name: &str) -> Result<Self> {
        let mut actions = IdMap::new();
        let mut earliest: HashMap<(u64, ActionId), u64> = HashMap::new();
        tsv::for_each_line(reader, source_name, |number, text| {
            if tsv::is_skippable(text) {
                return Ok(());
            }
            let line = tsv::split(number, text);
            line.expect_columns(source_name, 3)?;
            let user = line.integer(source_name, 0, "user id")?;
            let action = ActionId(actions.intern(&line.fields[1].to_string()));
            let time = line.integer(source_name, 2, "timestamp")?;
            earliest
                .entry((user, action))
                .and_modify(|t| *t = (*t).min(time))
                .or_insert(time);
            Ok(())
        })?;
        Ok(Self::assemble(actions, earliest))
    }

    /// Builds a log from `(user, action, time)` triples with the same
    /// earliest-kept rule as the parser.
    pub fn from_records<'a, I>(records: I) -> Self
    where
        I: IntoIterator<Item = (u64, &'a str, u64)>,
    {
        let mut actions = IdMap::new();
        let mut earliest: HashMap<(u64, ActionId), u64> = HashMap::new();
        for (user, action, time) in records {
            let action = ActionId(actions.intern(&action.to_string()));
            earliest
                .entry((user, action))
                .and_modify(|t| *t = (*t).min(time))
                .or_insert(time);
        }
        Self::assemble(actions, earliest)
    }

    fn assemble(actions: IdMap<String>, earliest: HashMap<(u64, ActionId), u64>) -> Self {
        let mut records: Vec<ActionRecord> = earliest
            .into_iter()
            .map(|((user, action), time)| ActionRecord { user, action, time })
            .collect();
        records.sort_unstable_by_key(|r| (r.action, r.time, r.user));
        ActionLog { actions, records }
    }

    pub fn records(&self) -> &[ActionRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn action_count(&self) -> usize {
        self.actions.len()
    }

    pub fn action_id(&self, name: &str) -> Option<ActionId> {
        self.actions.get(&name.to_string()).map(ActionId)
    }

    pub fn action_name(&self, action: ActionId) -> &str {
        self.actions.name(action.0)
    }
}

/// Options applied when deriving propagation graphs.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct PropagationOptions {
    /// Keep an arc `u -> v` only if `t_v - t_u <= max_delay`. `None` is unbounded.
    pub max_delay: Option<u64>,
}

/// The propagation graph of one action: performers as nodes, social arcs
/// whose endpoint times strictly increase as edges.
///
/// Nodes are stored in ascending (time, user) order, which is a topological
/// order because every arc strictly increases time.
#[derive(Debug, Clone)]
pub struct PropagationGraph {
    pub action: ActionId,
    nodes: Vec<UserId>,
    times: Vec<u64>,
    children: Vec<Vec<u32>>,
}

impl PropagationGraph {
    pub fn nodes(&self) -> &[UserId] {
        &self.nodes
    }

    pub fn times(&self) -> &[u64] {
        &self.times
    }

    /// Local node indices reached by one arc from node `i`.
    pub fn children(&self, i: usize) -> &[u32] {
        &self.children[i]
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn arc_count(&self) -> usize {
        self.children.iter().map(Vec::len).sum()
    }

    /// Arcs as (from, to) user pairs.
    pub fn arcs(&self) -> impl Iterator<Item = (UserId, UserId)> + '_ {
        self.children.iter().enumerate().flat_map(move |(i, cs)| {
            cs.iter().map(move |&c| (self.nodes[i], self.nodes[c as usize]))
        })
    }

    pub fn local_index(&self, user: UserId) -> Option<usize> {
        self.nodes.iter().position(|&u| u == user)
    }

    /// For each node, the set of local indices reachable from it (excluding
    /// itself), computed in reverse topological order.
    pub fn descendants(&self) -> Vec<FixedBitSet> {
        let n = self.nodes.len();
        let mut desc: Vec<FixedBitSet> = vec![FixedBitSet::with_capacity(n); n];
        for i in (0..n).rev() {
            let mut acc = FixedBitSet::with_capacity(n);
            for &c in &self.children[i] {
                let c = c as usize;
                debug_assert!(c > i, "arc against topological order");
                acc.insert(c);
                acc.union_with(&desc[c]);
            }
            desc[i] = acc;
        }
        desc
    }
}

/// One followup of the influencer: `follower` performed `action` after
/// the influencer, along a time-respecting path.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Cell {
    pub action: ActionId,
    pub follower: UserId,
}

/// The followup set of one influencer. Cell ids are positions in `cells`,
/// which is sorted by (action, follower).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FollowupSet {
    pub influencer: UserId,
    cells: Vec<Cell>,
}

impl FollowupSet {
    pub fn new(influencer: UserId, mut cells: Vec<Cell>) -> Self {
        cells.sort_unstable();
        cells.dedup();
        FollowupSet { influencer, cells }
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn cell(&self, id: usize) -> Cell {
        self.cells[id]
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    /// Distinct followers appearing in the set, ascending.
    pub fn active_followers(&self) -> Vec<UserId> {
        let mut out: Vec<UserId> = self.cells.iter().map(|c| c.follower).collect();
        out.sort_unstable();
        out.dedup();
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct InfluencerRank {
    pub user: UserId,
    /// External id as it appeared in the input files.
    pub name: u64,
    pub followups: u64,
}

/// Aggregate followup counts over the whole dataset.
#[derive(Debug, Clone, Default)]
pub struct FollowupMass {
    /// Followups per influencer, indexed by dense user id.
    pub per_influencer: Vec<u64>,
    /// Followup cells per action, over all influencers.
    pub per_action: Vec<u64>,
    /// Followup cells in which the user is the follower, over all influencers.
    pub per_follower: Vec<u64>,
}

/// Social graph joined with the action log, indexed for propagation queries.
/// Immutable after construction.
#[derive(Debug, Clone)]
pub struct Network {
    graph: SocialGraph,
    actions: IdMap<String>,
    performers: Vec<Vec<(UserId, u64)>>,
    times: Vec<HashMap<UserId, u64>>,
    user_actions: Vec<Vec<ActionId>>,
    options: PropagationOptions,
}

impl Network {
    /// Joins `graph` and `log`. Users that only appear in the log are
    /// registered with no arcs.
    pub fn new(graph: &SocialGraph, log: &ActionLog, options: PropagationOptions) -> Self {
        let mut graph = graph.clone();
        let n_actions = log.action_count();
        let mut performers: Vec<Vec<(UserId, u64)>> = vec![Vec::new(); n_actions];
        for r in log.records() {
            let user = graph.add_user(r.user);
            performers[r.action.index()].push((user, r.time));
        }
        let mut user_actions: Vec<Vec<ActionId>> = vec![Vec::new(); graph.user_count()];
        let mut times = Vec::with_capacity(n_actions);
        for (a, list) in performers.iter_mut().enumerate() {
            list.sort_unstable_by_key(|&(u, t)| (t, u));
            let mut map = HashMap::with_capacity(list.len());
            for &(u, t) in list.iter() {
                map.insert(u, t);
                user_actions[u.index()].push(ActionId(a as u32));
            }
            times.push(map);
        }
        Network {
            graph,
            actions: log.actions.clone(),
            performers,
            times,
            user_actions,
            options,
        }
    }

    pub fn graph(&self) -> &SocialGraph {
        &self.graph
    }

    pub fn options(&self) -> PropagationOptions {
        self.options
    }

    pub fn user_count(&self) -> usize {
        self.graph.user_count()
    }

    pub fn action_count(&self) -> usize {
        self.actions.len()
    }

    pub fn user_id(&self, external: u64) -> Option<UserId> {
        self.graph.user_id(external)
    }

    pub fn user_name(&self, user: UserId) -> u64 {
        self.graph.user_name(user)
    }

    pub fn action_id(&self, name: &str) -> Option<ActionId> {
        self.actions.get(&name.to_string()).map(ActionId)
    }

    pub fn action_name(&self, action: ActionId) -> &str {
        self.actions.name(action.0)
    }

    /// Actions performed by `user`, ascending.
    pub fn actions_of(&self, user: UserId) -> &[ActionId] {
        &self.user_actions[user.index()]
    }

    /// Performers of `action` as (user, time), ascending by time.
    pub fn performers(&self, action: ActionId) -> &[(UserId, u64)] {
        &self.performers[action.index()]
    }

    #[inline]
    fn propagates(&self, t_from: u64, t_to: u64) -> bool {
        t_to > t_from && self.options.max_delay.is_none_or(|d| t_to - t_from <= d)
    }

    /// Propagation graph of the action named `name`.
    pub fn propagation_graph(&self, name: &str) -> Result<PropagationGraph> {
        let action = self.action_id(name).ok_or_else(|| Error::NotFound {
            kind: "action",
            id: name.to_string(),
        })?;
        Ok(self.propagation_graph_of(action))
    }

    pub fn propagation_graph_of(&self, action: ActionId) -> PropagationGraph {
        let list = &self.performers[action.index()];
        let local: HashMap<UserId, u32> = list
            .iter()
            .enumerate()
            .map(|(i, &(u, _))| (u, i as u32))
            .collect();
        let children = list
            .iter()
            .map(|&(u, tu)| {
                let mut cs: Vec<u32> = self
                    .graph
                    .followers(u)
                    .iter()
                    .filter_map(|v| {
                        let &j = local.get(v)?;
                        self.propagates(tu, list[j as usize].1).then_some(j)
                    })
                    .collect();
                cs.sort_unstable();
                cs
            })
            .collect();
        PropagationGraph {
            action,
            nodes: list.iter().map(|&(u, _)| u).collect(),
            times: list.iter().map(|&(_, t)| t).collect(),
            children,
        }
    }

    /// Followup set of `influencer`, by forward traversal of each of its
    /// actions' propagation graphs.
    pub fn followup_set(&self, influencer: UserId) -> FollowupSet {
        let mut cells = Vec::new();
        let mut seen: HashSet<UserId> = HashSet::new();
        let mut stack: Vec<(UserId, u64)> = Vec::new();
        for &action in &self.user_actions[influencer.index()] {
            let times = &self.times[action.index()];
            seen.clear();
            stack.push((influencer, times[&influencer]));
            while let Some((w, tw)) = stack.pop() {
                for &v in self.graph.followers(w) {
                    let Some(&tv) = times.get(&v) else { continue };
                    if self.propagates(tw, tv) && seen.insert(v) {
                        stack.push((v, tv));
                    }
                }
            }
            cells.extend(seen.iter().map(|&follower| Cell { action, follower }));
        }
        FollowupSet::new(influencer, cells)
    }

    pub fn followup_set_of(&self, external: u64) -> Result<FollowupSet> {
        let user = self.user_id(external).ok_or_else(|| Error::NotFound {
            kind: "user",
            id: external.to_string(),
        })?;
        Ok(self.followup_set(user))
    }

    /// Followup totals for every user, action and follower, computed from
    /// per-action descendant sets. Actions are processed in parallel.
    pub fn followup_mass(&self) -> FollowupMass {
        // (action, its total, per-user (user, as influencer, as follower))
        type Partial = (ActionId, u64, Vec<(UserId, u64, u64)>);
        let n_users = self.user_count();
        let partials: Vec<Partial> = (0..self.action_count())
            .into_par_iter()
            .map(|a| {
                let pg = self.propagation_graph_of(ActionId(a as u32));
                let desc = pg.descendants();
                let mut as_follower = vec![0u64; pg.node_count()];
                let mut as_influencer = vec![0u64; pg.node_count()];
                for (i, d) in desc.iter().enumerate() {
                    as_influencer[i] = d.count_ones(..) as u64;
                    for j in d.ones() {
                        as_follower[j] += 1;
                    }
                }
                let total = as_influencer.iter().sum();
                let per_user = pg
                    .nodes()
                    .iter()
                    .enumerate()
                    .filter(|&(i, _)| as_influencer[i] > 0 || as_follower[i] > 0)
                    .map(|(i, &u)| (u, as_influencer[i], as_follower[i]))
                    .collect();
                (pg.action, total, per_user)
            })
            .collect();
        let mut mass = FollowupMass {
            per_influencer: vec![0; n_users],
            per_action: vec![0; self.action_count()],
            per_follower: vec![0; n_users],
        };
        for (action, total, per_user) in partials {
            mass.per_action[action.index()] = total;
            for (u, inf, fol) in per_user {
                mass.per_influencer[u.index()] += inf;
                mass.per_follower[u.index()] += fol;
            }
        }
        mass
    }

    /// Users with at least one followup, by descending count; ties by
    /// ascending external id.
    pub fn rank_influencers(&self, top_n: usize) -> Result<Vec<InfluencerRank>> {
        if top_n == 0 {
            return Err(Error::InvalidArgument("top_n must be at least 1".into()));
        }
        let mass = self.followup_mass();
        let mut ranked: Vec<InfluencerRank> = mass
            .per_influencer
            .iter()
            .enumerate()
            .filter(|&(_, &c)| c > 0)
            .map(|(u, &followups)| {
                let user = UserId(u as u32);
                InfluencerRank {
                    user,
                    name: self.user_name(user),
                    followups,
                }
            })
            .collect();
        ranked.sort_by(|a, b| b.followups.cmp(&a.followups).then(a.name.cmp(&b.name)));
        ranked.truncate(top_n);
        Ok(ranked)
    }

    /// Frequency table of followup counts over users with at least one
    /// followup: `(count, number of users)` ascending by count.
    pub fn followup_histogram(&self) -> Vec<(u64, u64)> {
        let mut table: BTreeMap<u64, u64> = BTreeMap::new();
        for c in self.followup_mass().per_influencer {
            if c > 0 {
                *table.entry(c).or_default() += 1;
            }
        }
        table.into_iter().collect()
    }
}

/// Renders a histogram as `followups,users` CSV.
pub fn histogram_csv(table: &[(u64, u64)]) -> String {
    let mut out = String::from("followups,users\n");
    for (count, users) in table {
        out.push_str(&format!("{count},{users}\n"));
    }
    out
}
