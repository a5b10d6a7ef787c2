//! Coverage functions and the lazy double greedy that mines explanations.
//!
//! An explanation is a conjunction of predicates; it covers the cells that
//! satisfy every one of them. A set of explanations covers the union of
//! what its members cover. The outer greedy adds one explanation at a
//! time; the inner greedy grows each explanation one predicate at a time,
//! always taking the predicate that keeps the most not-yet-covered cells.
//!
//! Both greedy levels are lazy. Marginal coverage of a predicate never
//! grows while an explanation gets longer, nor while the covered set grows,
//! so a cached value is an upper bound and only needs refreshing when it
//! reaches the top of the heap. Staleness is tracked with stamps: in
//! iteration `i` (explanations mined so far) with `j` predicates picked,
//! the current stamp is `i * l + j`. A cell whose flag equals the stamp is
//! covered by all `j` picked predicates.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use fixedbitset::FixedBitSet;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::featurization::{Dimension, PredicateId, PredicateIndex};

/// One mined conjunction.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Explanation {
    /// Predicates in selection order.
    pub predicates: Vec<PredicateId>,
    /// Cells satisfying every predicate, ascending.
    pub covered: Vec<u32>,
    pub raw_coverage: usize,
    /// Cells first covered by this explanation.
    pub marginal_coverage: usize,
}

/// Up to `k` explanations with union-coverage bookkeeping.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExplanationSet {
    pub explanations: Vec<Explanation>,
    marked: FixedBitSet,
    universe: usize,
    /// Set when a baseline could not fill its last explanation.
    pub truncated: bool,
}

impl ExplanationSet {
    pub fn new(universe: usize) -> Self {
        ExplanationSet {
            explanations: Vec::new(),
            marked: FixedBitSet::with_capacity(universe),
            universe,
            truncated: false,
        }
    }

    pub fn len(&self) -> usize {
        self.explanations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.explanations.is_empty()
    }

    /// Size of the followup set being covered.
    pub fn universe(&self) -> usize {
        self.universe
    }

    pub fn is_marked(&self, cell: usize) -> bool {
        self.marked.contains(cell)
    }

    pub fn marked(&self) -> &FixedBitSet {
        &self.marked
    }

    pub fn total_coverage(&self) -> usize {
        self.marked.count_ones(..)
    }

    /// Covered fraction of the followup set; zero for an empty set.
    pub fn relative_coverage(&self) -> f64 {
        if self.universe == 0 {
            0.0
        } else {
            self.total_coverage() as f64 / self.universe as f64
        }
    }

    /// Evaluates `predicates` against the current marks and appends it.
    pub fn push(&mut self, index: &PredicateIndex, predicates: Vec<PredicateId>) -> Result<&Explanation> {
        let covered = covered_cells(index, &predicates)?;
        let mut marginal = 0;
        for &c in &covered {
            if !self.marked.put(c as usize) {
                marginal += 1;
            }
        }
        self.explanations.push(Explanation {
            predicates,
            raw_coverage: covered.len(),
            covered,
            marginal_coverage: marginal,
        });
        Ok(self.explanations.last().unwrap())
    }

    /// Predicate lists of all explanations.
    /// Canonical JSON: explanations in mining order plus the set totals.
    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct View<'a> {
            universe: usize,
            total_coverage: usize,
            truncated: bool,
            explanations: &'a [Explanation],
        }
        let view = View {
            universe: self.universe,
            total_coverage: self.total_coverage(),
            truncated: self.truncated,
            explanations: &self.explanations,
        };
        serde_json::to_string(&view).expect("explanation set serializes")
    }

    pub fn predicate_lists(&self) -> Vec<Vec<PredicateId>> {
        self.explanations.iter().map(|e| e.predicates.clone()).collect()
    }
}

fn intersect_sorted(a: &[u32], b: &[u32]) -> Vec<u32> {
    let (small, large) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    let mut out = Vec::with_capacity(small.len());
    let mut rest = large;
    for &x in small {
        let pos = rest.partition_point(|&y| y < x);
        if pos == rest.len() {
            break;
        }
        if rest[pos] == x {
            out.push(x);
        }
        rest = &rest[pos..];
    }
    out
}

/// Cells satisfying every predicate in `predicates`. The empty conjunction
/// covers every cell.
pub fn covered_cells(index: &PredicateIndex, predicates: &[PredicateId]) -> Result<Vec<u32>> {
    for &p in predicates {
        index.check_id(p)?;
    }
    let mut lists: Vec<&[u32]> = predicates.iter().map(|&p| index.postings(p)).collect();
    lists.sort_by_key(|l| l.len());
    let Some((first, rest)) = lists.split_first() else {
        return Ok((0..index.cell_count() as u32).collect());
    };
    let mut acc = first.to_vec();
    for list in rest {
        if acc.is_empty() {
            break;
        }
        acc = intersect_sorted(&acc, list);
    }
    Ok(acc)
}

/// Coverage of one explanation: the size of its predicates' intersection.
pub fn coverage_of_explanation(index: &PredicateIndex, predicates: &[PredicateId]) -> Result<usize> {
    covered_cells(index, predicates).map(|c| c.len())
}

/// Coverage of a set of explanations: the size of the union of what each covers.
pub fn coverage_of_set(index: &PredicateIndex, explanations: &[Vec<PredicateId>]) -> Result<usize> {
    let mut union = FixedBitSet::with_capacity(index.cell_count());
    for e in explanations {
        for c in covered_cells(index, e)? {
            union.insert(c as usize);
        }
    }
    Ok(union.count_ones(..))
}

fn check_kl(k: usize, l: usize) -> Result<()> {
    if k == 0 || l == 0 {
        return Err(Error::InvalidArgument(format!(
            "k and l must both be at least 1 (got k={k}, l={l})"
        )));
    }
    Ok(())
}

/// Heap element: a predicate with its cached marginal coverage and the
/// stamp at which that value was computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LazyHeapEntry {
    pub predicate: PredicateId,
    pub cov: usize,
    pub flag: u64,
}

impl Ord for LazyHeapEntry {
    // Max-heap on cov; equal cov puts the lower predicate id on top.
    fn cmp(&self, other: &Self) -> Ordering {
        self.cov
            .cmp(&other.cov)
            .then_with(|| other.predicate.cmp(&self.predicate))
    }
}

impl PartialOrd for LazyHeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Per-cell stamps and the marked (already covered) bits.
#[derive(Debug, Clone)]
pub struct CellState {
    flag: Vec<u64>,
    marked: FixedBitSet,
    /// Cells whose flag equals the stamp of the explanation being grown.
    current: FixedBitSet,
    /// `current` minus the marked cells.
    live: FixedBitSet,
}

impl CellState {
    pub fn new(n_cells: usize) -> Self {
        CellState {
            flag: vec![0; n_cells],
            marked: FixedBitSet::with_capacity(n_cells),
            current: FixedBitSet::with_capacity(n_cells),
            live: FixedBitSet::with_capacity(n_cells),
        }
    }

    pub fn flag(&self, cell: usize) -> u64 {
        self.flag[cell]
    }

    pub fn is_marked(&self, cell: usize) -> bool {
        self.marked.contains(cell)
    }

    fn unmarked_in(&self, index: &PredicateIndex, p: PredicateId) -> usize {
        match index.posting_bits(p) {
            Some(bits) => bits.count_ones(..) - bits.intersection_count(&self.marked),
            None => index.postings(p).iter().filter(|&&c| !self.marked.contains(c as usize)).count(),
        }
    }

    /// Unmarked cells of `p` whose flag equals the current stamp.
    fn live_in(&self, index: &PredicateIndex, p: PredicateId) -> usize {
        match index.posting_bits(p) {
            Some(bits) => bits.intersection_count(&self.live),
            None => index.postings(p).iter().filter(|&&c| self.live.contains(c as usize)).count(),
        }
    }

    /// First predicate of an explanation: its cells move to `base + 1`.
    fn start(&mut self, index: &PredicateIndex, p: PredicateId, base: u64) {
        let postings = index.postings(p);
        for &c in postings {
            self.flag[c as usize] = base + 1;
        }
        self.current.clear();
        match index.posting_bits(p) {
            Some(bits) => self.current.union_with(bits),
            None => self.current.extend(postings.iter().map(|&c| c as usize)),
        }
        self.live.clone_from(&self.current);
        self.live.difference_with(&self.marked);
    }

    /// Later predicates: cells of `p` still at `stamp` advance to `stamp + 1`.
    fn extend(&mut self, index: &PredicateIndex, p: PredicateId, stamp: u64) {
        match index.posting_bits(p) {
            Some(bits) => {
                self.current.intersect_with(bits);
                self.live.intersect_with(bits);
            }
            None => {
                let kept: Vec<u32> =
                    index.postings(p).iter().copied().filter(|&c| self.current.contains(c as usize)).collect();
                self.current.clear();
                self.current.extend(kept.iter().map(|&c| c as usize));
                self.live.clone_from(&self.current);
                self.live.difference_with(&self.marked);
            }
        }
        for c in self.current.ones() {
            debug_assert_eq!(self.flag[c], stamp);
            self.flag[c] = stamp + 1;
        }
    }
}

/// Counters describing how much work the lazy evaluation saved.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct MiningStats {
    /// Marginal-coverage recomputations performed.
    pub evaluations: u64,
}

/// Lazy greedy miner over one predicate index. Owns its heap and cell state.
pub struct LazyMiner<'a> {
    index: &'a PredicateIndex,
    l: usize,
    heap: BinaryHeap<LazyHeapEntry>,
    cells: CellState,
    stats: MiningStats,
}

impl<'a> LazyMiner<'a> {
    pub fn new(index: &'a PredicateIndex, l: usize) -> Self {
        let heap = index
            .ids()
            .map(|p| LazyHeapEntry {
                predicate: p,
                cov: index.postings(p).len(),
                flag: 0,
            })
            .collect();
        LazyMiner {
            index,
            l,
            heap,
            cells: CellState::new(index.cell_count()),
            stats: MiningStats::default(),
        }
    }

    pub fn stats(&self) -> MiningStats {
        self.stats
    }

    pub fn cells(&self) -> &CellState {
        &self.cells
    }

    /// Runs the outer greedy until `k` explanations are mined or no
    /// explanation can cover anything new.
    pub fn mine(&mut self, k: usize) -> Result<ExplanationSet> {
        check_kl(k, self.l)?;
        let mut set = ExplanationSet::new(self.index.cell_count());
        if self.index.predicate_count() < self.l {
            return Ok(set);
        }
        while set.len() < k {
            let Some(&top) = self.heap.peek() else { break };
            let stamp = (set.len() * self.l) as u64;
            if top.flag < stamp {
                let mut entry = self.heap.pop().unwrap();
                entry.cov = self.cells.unmarked_in(self.index, entry.predicate);
                entry.flag = stamp;
                self.stats.evaluations += 1;
                self.heap.push(entry);
                continue;
            }
            if top.cov == 0 {
                break;
            }
            let working = self.heap.clone();
            let explanation = self.next_explanation(working, set.len());
            if explanation.marginal_coverage == 0 {
                break;
            }
            for &c in &explanation.covered {
                set.marked.insert(c as usize);
            }
            set.explanations.push(explanation);
        }
        Ok(set)
    }

    /// Inner greedy: grows one explanation to `l` predicates from a copy of
    /// the heap, then marks the cells it covers.
    ///
    /// If fewer than `l` predicates keep a positive marginal, the remaining
    /// slots take the best zero-marginal predicates (lowest id first).
    pub fn next_explanation(&mut self, mut heap: BinaryHeap<LazyHeapEntry>, iteration: usize) -> Explanation {
        let l = self.l;
        let base = (iteration * l) as u64;
        let mut picked: Vec<PredicateId> = Vec::with_capacity(l);
        while picked.len() < l {
            let mut entry = heap.pop().expect("catalog has at least l predicates");
            let j = picked.len() as u64;
            let stamp = base + j;
            if entry.flag < stamp {
                entry.cov = if j == 0 {
                    self.cells.unmarked_in(self.index, entry.predicate)
                } else {
                    self.cells.live_in(self.index, entry.predicate)
                };
                entry.flag = stamp;
                self.stats.evaluations += 1;
                heap.push(entry);
                continue;
            }
            picked.push(entry.predicate);
            if j == 0 {
                self.cells.start(self.index, entry.predicate, base);
            } else {
                self.cells.extend(self.index, entry.predicate, stamp);
            }
        }
        // Cells whose flag reached base + l satisfy the whole conjunction.
        let covered: Vec<u32> = self.cells.current.ones().map(|c| c as u32).collect();
        let marginal = self.cells.live.count_ones(..);
        // A zero-marginal explanation is discarded by the caller, so only
        // mark when something new is covered.
        if marginal > 0 {
            self.cells.marked.union_with(&self.cells.current);
        }
        Explanation {
            predicates: picked,
            raw_coverage: covered.len(),
            covered,
            marginal_coverage: marginal,
        }
    }
}

/// Mines at most `k` explanations of `l` predicates each with the lazy
/// double greedy. Stops early once no explanation adds coverage.
pub fn mine_explanations(index: &PredicateIndex, k: usize, l: usize) -> Result<ExplanationSet> {
    mine_explanations_with_stats(index, k, l).map(|(set, _)| set)
}

pub fn mine_explanations_with_stats(index: &PredicateIndex, k: usize, l: usize) -> Result<(ExplanationSet, MiningStats)> {
    check_kl(k, l)?;
    let mut miner = LazyMiner::new(index, l);
    let set = miner.mine(k)?;
    Ok((set, miner.stats()))
}

/// Reference greedy: recomputes every candidate's marginal at every step.
/// Same tie-break and stopping rules as [`mine_explanations`].
pub fn eager_greedy(index: &PredicateIndex, k: usize, l: usize) -> Result<ExplanationSet> {
    check_kl(k, l)?;
    let n = index.cell_count();
    let mut set = ExplanationSet::new(n);
    if index.predicate_count() < l {
        return Ok(set);
    }
    'outer: while set.len() < k {
        // Cells still in play: unmarked and inside the current conjunction.
        let mut alive = set.marked.clone();
        alive.toggle_range(..);
        let mut picked: Vec<PredicateId> = Vec::with_capacity(l);
        for j in 0..l {
            let mut best: Option<(usize, PredicateId)> = None;
            for p in index.ids().filter(|p| !picked.contains(p)) {
                let m = index.postings(p).iter().filter(|&&c| alive.contains(c as usize)).count();
                if best.is_none_or(|(bm, _)| m > bm) {
                    best = Some((m, p));
                }
            }
            let (m, p) = best.expect("catalog has at least l predicates");
            if j == 0 && m == 0 {
                break 'outer;
            }
            let mut next = FixedBitSet::with_capacity(n);
            for &c in index.postings(p) {
                if alive.contains(c as usize) {
                    next.insert(c as usize);
                }
            }
            alive = next;
            picked.push(p);
        }
        if alive.count_ones(..) == 0 {
            break;
        }
        set.push(index, picked)?;
    }
    Ok(set)
}

/// Table-style statistics for one explanation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Annotation {
    /// Actions of the influencer satisfying every action predicate.
    pub actions: usize,
    /// Active followers satisfying every user predicate.
    pub followers: usize,
    /// Raw coverage of the explanation.
    pub followups: usize,
}

/// Annotates an explanation mined over `index`. The index must have been
/// built from a followup set (see [`PredicateIndex::build`]).
pub fn annotate(index: &PredicateIndex, explanation: &Explanation) -> Result<Annotation> {
    let ctx = index.context().ok_or_else(|| {
        Error::InvalidArgument("annotation needs an index built from a followup set".into())
    })?;
    for &p in &explanation.predicates {
        index.check_id(p)?;
    }
    let wanted = |dim: Dimension| -> Vec<PredicateId> {
        explanation
            .predicates
            .iter()
            .copied()
            .filter(|&p| index.predicate(p).dimension == dim)
            .collect()
    };
    let action_preds = wanted(Dimension::Action);
    let user_preds = wanted(Dimension::User);
    let satisfies = |have: &[PredicateId], need: &[PredicateId]| need.iter().all(|p| have.binary_search(p).is_ok());
    Ok(Annotation {
        actions: ctx.actions.iter().filter(|(_, f)| satisfies(f, &action_preds)).count(),
        followers: ctx.followers.iter().filter(|(_, f)| satisfies(f, &user_preds)).count(),
        followups: explanation.raw_coverage,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::featurization::Predicate;

    fn index(n: usize, postings: &[&[u32]]) -> PredicateIndex {
        let entries = postings
            .iter()
            .enumerate()
            .map(|(i, p)| {
                (
                    Predicate {
                        dimension: Dimension::Action,
                        attribute: "f".into(),
                        value: format!("p{}", i + 1),
                    },
                    p.to_vec(),
                )
            })
            .collect();
        PredicateIndex::from_postings(n, entries).unwrap()
    }

    fn ids(v: &[u32]) -> Vec<PredicateId> {
        v.iter().map(|&i| PredicateId(i)).collect()
    }

    /// Cells 1..6 are ids 0..5; p1={1,2,3,4}, p2={1,2,3}, p3=p4={5,6}.
    fn crafted() -> PredicateIndex {
        index(6, &[&[0, 1, 2, 3], &[0, 1, 2], &[4, 5], &[4, 5]])
    }

    #[test]
    fn empty_conjunction_covers_everything() {
        let idx = crafted();
        assert_eq!(coverage_of_explanation(&idx, &[]).unwrap(), 6);
        assert_eq!(coverage_of_explanation(&idx, &ids(&[0, 1])).unwrap(), 3);
        assert_eq!(coverage_of_explanation(&idx, &ids(&[0, 2])).unwrap(), 0);
        assert!(coverage_of_explanation(&idx, &ids(&[9])).is_err());
    }

    #[test]
    fn set_coverage_is_an_idempotent_union() {
        let idx = crafted();
        let e = ids(&[0, 1]);
        assert_eq!(coverage_of_set(&idx, std::slice::from_ref(&e)).unwrap(), 3);
        assert_eq!(coverage_of_set(&idx, &[e.clone(), e]).unwrap(), 3);
        assert_eq!(coverage_of_set(&idx, &[ids(&[0]), ids(&[2])]).unwrap(), 6);
    }

    #[test]
    fn rejects_zero_k_or_l() {
        let idx = crafted();
        assert!(matches!(mine_explanations(&idx, 0, 1), Err(Error::InvalidArgument(_))));
        assert!(matches!(mine_explanations(&idx, 1, 0), Err(Error::InvalidArgument(_))));
        assert!(matches!(eager_greedy(&idx, 0, 1), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn single_predicate_covering_everything() {
        let idx = index(5, &[&[0, 1, 2, 3, 4]]);
        let set = mine_explanations(&idx, 1, 1).unwrap();
        assert_eq!(set.len(), 1);
        assert_eq!(set.relative_coverage(), 1.0);
    }

    #[test]
    fn crafted_instance() {
        let idx = crafted();
        let set = mine_explanations(&idx, 2, 2).unwrap();
        assert_eq!(set.predicate_lists(), vec![ids(&[0, 1]), ids(&[2, 3])]);
        let covs: Vec<_> = set.explanations.iter().map(|e| (e.raw_coverage, e.marginal_coverage)).collect();
        assert_eq!(covs, vec![(3, 3), (2, 2)]);
        assert_eq!(set.total_coverage(), 5);
        assert_eq!(set, eager_greedy(&idx, 2, 2).unwrap());
    }

    #[test]
    fn empty_followup_set_yields_nothing() {
        let idx = index(0, &[]);
        assert!(mine_explanations(&idx, 3, 2).unwrap().is_empty());
        assert!(eager_greedy(&idx, 3, 2).unwrap().is_empty());
        let idx = index(0, &[&[], &[]]);
        assert!(mine_explanations(&idx, 3, 1).unwrap().is_empty());
    }

    #[test]
    fn next_explanation_single_predicate_marks_cells() {
        let idx = index(3, &[&[0, 2]]);
        let mut miner = LazyMiner::new(&idx, 1);
        let heap = miner.heap.clone();
        let e = miner.next_explanation(heap, 0);
        assert_eq!(e.predicates, ids(&[0]));
        assert!(miner.cells().is_marked(0) && miner.cells().is_marked(2));
        assert!(!miner.cells().is_marked(1));
    }

    #[test]
    fn next_explanation_first_iteration_on_crafted() {
        let idx = crafted();
        let mut miner = LazyMiner::new(&idx, 2);
        let heap = miner.heap.clone();
        let e = miner.next_explanation(heap, 0);
        assert_eq!(e.predicates, ids(&[0, 1]));
        assert_eq!(e.covered, vec![0, 1, 2]);
    }

    #[test]
    fn equal_marginals_pick_the_lower_id() {
        let idx = index(4, &[&[2, 3], &[0, 1]]);
        let set = mine_explanations(&idx, 1, 1).unwrap();
        assert_eq!(set.predicate_lists(), vec![ids(&[0])]);
    }

    #[test]
    fn pads_with_zero_marginal_predicates() {
        // Only p1 touches the cells; the explanation still gets l = 3 predicates.
        let idx = index(3, &[&[0, 1, 2], &[], &[]]);
        let set = mine_explanations(&idx, 2, 3);
        let set = set.unwrap();
        assert!(set.is_empty(), "zero-marginal explanation must be dropped");

        let idx = index(3, &[&[0, 1, 2], &[0], &[]]);
        let set = mine_explanations(&idx, 2, 3).unwrap();
        assert!(set.is_empty());

        let idx = index(3, &[&[0, 1, 2], &[0, 1], &[1]]);
        let set = mine_explanations(&idx, 2, 2).unwrap();
        assert_eq!(set.predicate_lists()[0], ids(&[0, 1]));
        assert_eq!(set, eager_greedy(&idx, 2, 2).unwrap());
    }

    #[test]
    fn catalog_smaller_than_l() {
        let idx = index(2, &[&[0, 1]]);
        assert!(mine_explanations(&idx, 1, 2).unwrap().is_empty());
        assert!(eager_greedy(&idx, 1, 2).unwrap().is_empty());
    }

    #[test]
    fn predicates_may_repeat_across_explanations() {
        // Best second explanation reuses p1.
        let idx = index(6, &[&[0, 1, 2, 3, 4, 5], &[0, 1, 2], &[3, 4]]);
        let set = mine_explanations(&idx, 2, 2).unwrap();
        assert_eq!(set.predicate_lists(), vec![ids(&[0, 1]), ids(&[0, 2])]);
        assert_eq!(set, eager_greedy(&idx, 2, 2).unwrap());
    }

    #[test]
    fn push_tracks_marginals() {
        let idx = crafted();
        let mut set = ExplanationSet::new(6);
        set.push(&idx, ids(&[0])).unwrap();
        set.push(&idx, ids(&[1])).unwrap();
        assert_eq!(set.explanations[1].marginal_coverage, 0);
        assert_eq!(set.explanations[1].raw_coverage, 3);
        assert_eq!(set.total_coverage(), 4);
        assert!(set.push(&idx, ids(&[7])).is_err());
    }

    #[test]
    fn lazy_skips_evaluations() {
        let postings: Vec<Vec<u32>> = (0..40u32).map(|p| (0..200u32).filter(|c| (c * 7 + p) % (p + 2) == 0).collect()).collect();
        let refs: Vec<&[u32]> = postings.iter().map(Vec::as_slice).collect();
        let idx = index(200, &refs);
        let (set, stats) = mine_explanations_with_stats(&idx, 3, 3).unwrap();
        assert_eq!(set, eager_greedy(&idx, 3, 3).unwrap());
        let eager_evals = (3 * 3 * 40) as u64;
        assert!(stats.evaluations < eager_evals, "{stats:?}");
    }

    #[test]
    fn heap_order() {
        let a = LazyHeapEntry { predicate: PredicateId(3), cov: 5, flag: 0 };
        let b = LazyHeapEntry { predicate: PredicateId(1), cov: 5, flag: 0 };
        let c = LazyHeapEntry { predicate: PredicateId(0), cov: 4, flag: 0 };
        let mut heap: BinaryHeap<_> = [a, b, c].into_iter().collect();
        assert_eq!(heap.pop().unwrap().predicate, PredicateId(1));
        assert_eq!(heap.pop().unwrap().predicate, PredicateId(3));
        assert_eq!(heap.pop().unwrap().predicate, PredicateId(0));
    }

    #[test]
    fn annotation_needs_context() {
        let idx = crafted();
        let set = mine_explanations(&idx, 1, 1).unwrap();
        assert!(annotate(&idx, &set.explanations[0]).is_err());
    }
}
