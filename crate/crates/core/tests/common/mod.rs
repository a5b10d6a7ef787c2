//! Instance generators and brute-force oracles shared by the integration
//! tests. Oracles work on plain `BTreeSet` families and never call the
//! library code they are checking.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use proxi_core::featurization::{Dimension, Predicate, PredicateId, PredicateIndex};
use proxi_core::ingestion::{ActionLog, SocialGraph};
use rand::Rng;

pub type Family = Vec<BTreeSet<u32>>;

/// A predicate index together with the raw family it was built from.
pub struct Instance {
    pub n_cells: usize,
    pub family: Family,
    pub index: PredicateIndex,
}

fn pred(i: usize, attr: usize, dim: Dimension) -> Predicate {
    Predicate {
        dimension: dim,
        attribute: format!("a{attr}"),
        value: format!("v{i}"),
    }
}

pub fn instance_from_family(n_cells: usize, family: Family) -> Instance {
    let entries = family
        .iter()
        .enumerate()
        .map(|(i, s)| (pred(i, i, Dimension::Action), s.iter().copied().collect()))
        .collect();
    let index = PredicateIndex::from_postings(n_cells, entries).expect("valid family");
    Instance { n_cells, family, index }
}

/// Attribute-structured instance: each cell takes one skewed value per
/// single-valued attribute, plus membership in a few independent
/// multi-valued predicates. Predicates with empty postings are dropped.
pub fn structured_instance<R: Rng>(rng: &mut R, max_cells: usize, max_preds: usize) -> Instance {
    let n_cells = rng.gen_range(1..=max_cells);
    let mut entries: Vec<(Predicate, Vec<u32>)> = Vec::new();
    let mut attr = 0;
    while entries.len() < max_preds {
        let room = max_preds - entries.len();
        if rng.gen_bool(0.75) {
            let card = rng.gen_range(2..=6).min(room.max(1));
            let skew: f64 = rng.gen_range(0.0..2.0);
            let weights: Vec<f64> = (1..=card).map(|r| 1.0 / (r as f64).powf(skew)).collect();
            let total: f64 = weights.iter().sum();
            let mut postings = vec![Vec::new(); card];
            for c in 0..n_cells as u32 {
                let mut x = rng.gen_range(0.0..total);
                let mut v = 0;
                while v + 1 < card && x >= weights[v] {
                    x -= weights[v];
                    v += 1;
                }
                postings[v].push(c);
            }
            let dim = if rng.gen_bool(0.5) { Dimension::User } else { Dimension::Action };
            for (v, list) in postings.into_iter().enumerate() {
                if !list.is_empty() {
                    entries.push((pred(v, attr, dim), list));
                }
            }
        } else {
            let density: f64 = rng.gen_range(0.005..0.9);
            let list: Vec<u32> = (0..n_cells as u32).filter(|_| rng.gen_bool(density)).collect();
            if !list.is_empty() {
                entries.push((pred(0, attr, Dimension::Action), list));
            }
        }
        attr += 1;
        if attr > 4 * max_preds {
            break;
        }
    }
    entries.truncate(max_preds);
    let family = entries.iter().map(|(_, l)| l.iter().copied().collect()).collect();
    let index = PredicateIndex::from_postings(n_cells, entries).expect("valid instance");
    Instance { n_cells, family, index }
}

/// Independent random subsets of `0..n_cells`.
pub fn random_family<R: Rng>(rng: &mut R, n_cells: usize, n_preds: usize) -> Family {
    (0..n_preds)
        .map(|_| {
            let density: f64 = rng.gen_range(0.1..0.9);
            (0..n_cells as u32).filter(|_| rng.gen_bool(density)).collect()
        })
        .collect()
}

pub fn intersect(family: &Family, members: &[usize], n_cells: usize) -> BTreeSet<u32> {
    let mut acc: BTreeSet<u32> = (0..n_cells as u32).collect();
    for &m in members {
        acc = acc.intersection(&family[m]).copied().collect();
    }
    acc
}

pub fn union_size(sets: &[BTreeSet<u32>]) -> usize {
    sets.iter().flatten().collect::<BTreeSet<_>>().len()
}

/// All `r`-subsets of `0..n` in lexicographic order.
pub fn subsets(n: usize, r: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn go(n: usize, r: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == r {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(n, r, i + 1, cur, out);
            cur.pop();
        }
    }
    go(n, r, 0, &mut cur, &mut out);
    out
}

/// Maximum l-subset intersection: the largest `|F_i1 ∩ ... ∩ F_il|` over
/// distinct members of the family.
pub fn max_l_subset_intersection(family: &Family, l: usize) -> usize {
    if l > family.len() {
        return 0;
    }
    subsets(family.len(), l)
        .iter()
        .map(|combo| {
            let mut it = combo.iter();
            let first = family[*it.next().unwrap()].clone();
            it.fold(first, |acc, &i| acc.intersection(&family[i]).copied().collect()).len()
        })
        .max()
        .unwrap_or(0)
}

/// Best union coverage of at most `k` conjunctions of exactly `l` distinct
/// predicates (longer conjunctions never cover more).
pub fn optimum(family: &Family, n_cells: usize, k: usize, l: usize) -> usize {
    if l > family.len() {
        return 0;
    }
    let covers: Vec<BTreeSet<u32>> = subsets(family.len(), l)
        .iter()
        .map(|c| intersect(family, c, n_cells))
        .collect();
    let mut best = 0;
    for r in 1..=k.min(covers.len()) {
        for pick in subsets(covers.len(), r) {
            let sets: Vec<BTreeSet<u32>> = pick.iter().map(|&i| covers[i].clone()).collect();
            best = best.max(union_size(&sets));
        }
    }
    best
}

/// Exhaustive greedy without pruning: each round takes the `l`-subset with
/// the largest count of uncovered cells, lexicographically least on ties.
pub fn naive_exhaustive(family: &Family, n_cells: usize, k: usize, l: usize) -> Vec<Vec<usize>> {
    let mut covered: BTreeSet<u32> = BTreeSet::new();
    let mut out = Vec::new();
    let combos = subsets(family.len(), l);
    for _ in 0..k {
        let mut best: Option<(usize, &Vec<usize>)> = None;
        for c in &combos {
            let gain = intersect(family, c, n_cells).difference(&covered).count();
            if best.is_none_or(|(g, _)| gain > g) {
                best = Some((gain, c));
            }
        }
        match best {
            Some((g, c)) if g > 0 => {
                covered.extend(intersect(family, c, n_cells));
                out.push(c.clone());
            }
            _ => break,
        }
    }
    out
}

pub fn ids(v: &[usize]) -> Vec<PredicateId> {
    v.iter().map(|&i| PredicateId(i as u32)).collect()
}

/// Raw inputs of a random social network with per-action timestamps.
pub struct RandomNetwork {
    pub users: u64,
    pub arcs: BTreeSet<(u64, u64)>,
    /// (user, action, time); at most one record per (user, action).
    pub records: Vec<(u64, String, u64)>,
}

impl RandomNetwork {
    pub fn generate<R: Rng>(rng: &mut R, max_users: u64, max_actions: usize) -> Self {
        let users = rng.gen_range(2..=max_users);
        let density: f64 = rng.gen_range(0.02..0.3);
        let mut arcs = BTreeSet::new();
        for u in 0..users {
            for v in 0..users {
                if u != v && rng.gen_bool(density) {
                    arcs.insert((u, v));
                }
            }
        }
        let n_actions = rng.gen_range(1..=max_actions);
        let mut records = Vec::new();
        for a in 0..n_actions {
            let adoption: f64 = rng.gen_range(0.05..0.8);
            for u in 0..users {
                if rng.gen_bool(adoption) {
                    // Small time range so ties happen.
                    records.push((u, format!("act{a}"), rng.gen_range(0..12)));
                }
            }
        }
        RandomNetwork { users, arcs, records }
    }

    pub fn graph(&self) -> SocialGraph {
        let mut g = SocialGraph::new();
        for u in 0..self.users {
            g.add_user(u);
        }
        for &(u, v) in &self.arcs {
            g.add_arc(u, v).unwrap();
        }
        g
    }

    pub fn log(&self) -> ActionLog {
        ActionLog::from_records(self.records.iter().map(|(u, a, t)| (*u, a.as_str(), *t)))
    }

    /// Followups of `influencer` as (action name, follower) pairs.
    pub fn followups(&self, influencer: u64, max_delay: Option<u64>) -> BTreeSet<(String, u64)> {
        self.all_followups(max_delay).remove(&influencer).unwrap_or_default()
    }

    /// Followups of every user, computed by transitive closure over each
    /// action's time-respecting arcs.
    pub fn all_followups(&self, max_delay: Option<u64>) -> BTreeMap<u64, BTreeSet<(String, u64)>> {
        let mut by_action: BTreeMap<&str, BTreeMap<u64, u64>> = BTreeMap::new();
        for (u, a, t) in &self.records {
            by_action.entry(a.as_str()).or_default().insert(*u, *t);
        }
        let mut out: BTreeMap<u64, BTreeSet<(String, u64)>> = BTreeMap::new();
        for (a, times) in by_action {
            let users: Vec<u64> = times.keys().copied().collect();
            let n = users.len();
            let pos: BTreeMap<u64, usize> = users.iter().enumerate().map(|(i, &u)| (u, i)).collect();
            let mut reach = vec![vec![false; n]; n];
            for &(u, v) in &self.arcs {
                if let (Some(&tu), Some(&tv)) = (times.get(&u), times.get(&v)) {
                    if tu < tv && max_delay.is_none_or(|d| tv - tu <= d) {
                        reach[pos[&u]][pos[&v]] = true;
                    }
                }
            }
            #[allow(clippy::needless_range_loop)]
            for m in 0..n {
                for i in 0..n {
                    if reach[i][m] {
                        for j in 0..n {
                            if reach[m][j] {
                                reach[i][j] = true;
                            }
                        }
                    }
                }
            }
            for i in 0..n {
                for j in 0..n {
                    if reach[i][j] {
                        out.entry(users[i]).or_default().insert((a.to_string(), users[j]));
                    }
                }
            }
        }
        out
    }
}
