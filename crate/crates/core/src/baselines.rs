//! Comparison algorithms: weighted random, most-popular, per-iteration
//! exhaustive search, and a brute-force optimum for tiny instances.

use fixedbitset::FixedBitSet;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::featurization::{predicate_popularity, PredicateId, PredicateIndex};
use crate::miner::ExplanationSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BaselineKind {
    Random,
    MostPopular,
    Exhaustive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BaselineConfig {
    pub kind: BaselineKind,
    pub k: usize,
    pub l: usize,
    /// Required for, and only for, the random baseline.
    pub seed: Option<u64>,
}

impl BaselineConfig {
    pub fn validate(&self) -> Result<()> {
        if self.k == 0 || self.l == 0 {
            return Err(Error::InvalidArgument("k and l must both be at least 1".into()));
        }
        match (self.kind, self.seed) {
            (BaselineKind::Random, None) => Err(Error::InvalidArgument("the random baseline needs a seed".into())),
            (BaselineKind::Random, Some(_)) | (_, None) => Ok(()),
            (kind, Some(_)) => Err(Error::InvalidArgument(format!("{kind:?} baseline takes no seed"))),
        }
    }

    pub fn run(&self, index: &PredicateIndex) -> Result<ExplanationSet> {
        self.validate()?;
        match self.kind {
            BaselineKind::Random => random_baseline(index, self.k, self.l, self.seed.unwrap()),
            BaselineKind::MostPopular => most_popular_baseline(index, self.k, self.l),
            BaselineKind::Exhaustive => {
                exhaustive_baseline(index, self.k, self.l, DEFAULT_COMBINATION_BUDGET).map(|(set, _)| set)
            }
        }
    }
}

/// Draws `count` distinct positions from `weights`, each draw proportional
/// to the weight among those not yet drawn. When all remaining weights are
/// zero the draw is uniform.
pub fn weighted_sample_without_replacement<R: Rng>(weights: &[u64], count: usize, rng: &mut R) -> Vec<usize> {
    let mut pool: Vec<usize> = (0..weights.len()).collect();
    let mut out = Vec::with_capacity(count);
    for _ in 0..count.min(weights.len()) {
        let total: u64 = pool.iter().map(|&i| weights[i]).sum();
        let slot = if total == 0 {
            rng.gen_range(0..pool.len())
        } else {
            let mut r = rng.gen_range(0..total);
            pool.iter()
                .position(|&i| {
                    if r < weights[i] {
                        true
                    } else {
                        r -= weights[i];
                        false
                    }
                })
                .unwrap()
        };
        out.push(pool.remove(slot));
    }
    out
}

/// `k` explanations, each of `l` distinct predicates drawn with probability
/// proportional to posting length. Fully determined by `seed`.
pub fn random_baseline(index: &PredicateIndex, k: usize, l: usize, seed: u64) -> Result<ExplanationSet> {
    if k == 0 || l == 0 {
        return Err(Error::InvalidArgument("k and l must both be at least 1".into()));
    }
    if index.predicate_count() < l {
        return Err(Error::InvalidArgument(format!(
            "catalog has {} predicates, fewer than l={l}",
            index.predicate_count()
        )));
    }
    let weights: Vec<u64> = index.ids().map(|p| index.postings(p).len() as u64).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut set = ExplanationSet::new(index.cell_count());
    for _ in 0..k {
        let picks = weighted_sample_without_replacement(&weights, l, &mut rng)
            .into_iter()
            .map(|i| PredicateId(i as u32))
            .collect();
        set.push(index, picks)?;
    }
    Ok(set)
}

/// Explanation `i` takes the predicates ranked `i*l .. (i+1)*l` by
/// popularity. A short last explanation sets `truncated`.
pub fn most_popular_baseline(index: &PredicateIndex, k: usize, l: usize) -> Result<ExplanationSet> {
    if k == 0 || l == 0 {
        return Err(Error::InvalidArgument("k and l must both be at least 1".into()));
    }
    let ranked: Vec<PredicateId> = predicate_popularity(index).into_iter().map(|(p, _)| p).collect();
    let mut set = ExplanationSet::new(index.cell_count());
    for chunk in ranked.chunks(l).take(k) {
        if chunk.len() < l {
            set.truncated = true;
        }
        set.push(index, chunk.to_vec())?;
    }
    Ok(set)
}

/// Default cap on search nodes visited by [`exhaustive_baseline`] per run.
pub const DEFAULT_COMBINATION_BUDGET: u64 = 200_000_000;

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ExhaustiveStats {
    /// Search nodes (partial or full combinations) visited per iteration.
    pub nodes: Vec<u64>,
    /// Size of the unpruned search space `C(candidates, l)` per iteration.
    pub nominal: Vec<u128>,
}

pub fn binomial(n: usize, r: usize) -> u128 {
    if r > n {
        return 0;
    }
    let r = r.min(n - r);
    (0..r).fold(1u128, |acc, i| acc * (n - i) as u128 / (i as u128 + 1))
}

struct Search<'a> {
    bits: &'a [FixedBitSet],
    l: usize,
    levels: Vec<FixedBitSet>,
    chosen: Vec<usize>,
    best: usize,
    best_combo: Vec<usize>,
    nodes: u64,
    budget: u64,
}

impl Search<'_> {
    fn descend(&mut self, depth: usize, start: usize) -> Result<()> {
        let remaining = self.l - depth;
        for i in start..=(self.bits.len() - remaining) {
            self.nodes += 1;
            if self.nodes > self.budget {
                return Err(Error::Resource(format!(
                    "exhaustive search exceeded its budget of {} combinations",
                    self.budget
                )));
            }
            let count = self.levels[depth].intersection_count(&self.bits[i]);
            // Intersections only shrink with depth, so nothing below can beat
            // the incumbent; ties keep the earlier (lexicographically smaller) one.
            if count == 0 || count <= self.best {
                continue;
            }
            self.chosen.push(i);
            if remaining == 1 {
                self.best = count;
                self.best_combo = self.chosen.clone();
            } else {
                let (head, tail) = self.levels.split_at_mut(depth + 1);
                tail[0].clone_from(&head[depth]);
                tail[0].intersect_with(&self.bits[i]);
                self.descend(depth + 1, i + 1)?;
            }
            self.chosen.pop();
        }
        Ok(())
    }
}

/// Each iteration picks the `l`-combination with the largest marginal
/// coverage, searching combinations of predicates that still touch an
/// uncovered cell in ascending id order and pruning partial intersections
/// that are empty or no larger than the incumbent. Ties go to the
/// lexicographically smallest combination. Stops early when nothing new
/// can be covered. More than `budget` visited nodes is a resource error.
pub fn exhaustive_baseline(
    index: &PredicateIndex,
    k: usize,
    l: usize,
    budget: u64,
) -> Result<(ExplanationSet, ExhaustiveStats)> {
    if k == 0 || l == 0 {
        return Err(Error::InvalidArgument("k and l must both be at least 1".into()));
    }
    let n = index.cell_count();
    let mut set = ExplanationSet::new(n);
    let mut stats = ExhaustiveStats::default();
    let mut spent = 0u64;
    while set.len() < k {
        let mut unmarked = set.marked().clone();
        unmarked.toggle_range(..);
        let mut candidates = Vec::new();
        let mut bits = Vec::new();
        for p in index.ids() {
            let mut b = match index.posting_bits(p) {
                Some(bits) => bits.clone(),
                None => {
                    let mut b = FixedBitSet::with_capacity(n);
                    b.extend(index.postings(p).iter().map(|&c| c as usize));
                    b
                }
            };
            b.intersect_with(&unmarked);
            if !b.is_clear() {
                candidates.push(p);
                bits.push(b);
            }
        }
        if candidates.len() < l {
            break;
        }
        stats.nominal.push(binomial(candidates.len(), l));
        let mut search = Search {
            bits: &bits,
            l,
            levels: vec![FixedBitSet::with_capacity(n); l],
            chosen: Vec::with_capacity(l),
            best: 0,
            best_combo: Vec::new(),
            nodes: 0,
            budget: budget - spent,
        };
        search.levels[0] = unmarked;
        search.descend(0, 0)?;
        spent += search.nodes;
        stats.nodes.push(search.nodes);
        if search.best == 0 {
            break;
        }
        let combo = search.best_combo.iter().map(|&i| candidates[i]).collect();
        set.push(index, combo)?;
    }
    Ok((set, stats))
}

/// Size limits for [`brute_force_oracle`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleGuard {
    pub max_predicates: usize,
    pub max_k: usize,
    pub max_l: usize,
}

impl Default for OracleGuard {
    fn default() -> Self {
        OracleGuard {
            max_predicates: 12,
            max_k: 2,
            max_l: 3,
        }
    }
}

fn combinations(n: usize, r: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(r);
    fn rec(n: usize, r: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == r {
            out.push(cur.clone());
            return;
        }
        for i in start..=(n - (r - cur.len())) {
            cur.push(i);
            rec(n, r, i + 1, cur, out);
            cur.pop();
        }
    }
    if r <= n {
        rec(n, r, 0, &mut cur, &mut out);
    }
    out
}

/// Exact optimum over all sets of at most `k` conjunctions of at least `l`
/// predicates, with the lexicographically least optimal witness.
///
/// Conjunctions longer than `l` never cover more than their length-`l`
/// prefix, so only length-`l` conjunctions are enumerated.
pub fn brute_force_oracle(
    index: &PredicateIndex,
    k: usize,
    l: usize,
    guard: OracleGuard,
) -> Result<(usize, ExplanationSet)> {
    if k == 0 || l == 0 {
        return Err(Error::InvalidArgument("k and l must both be at least 1".into()));
    }
    if index.predicate_count() > guard.max_predicates || k > guard.max_k || l > guard.max_l {
        return Err(Error::Resource(format!(
            "oracle limited to {} predicates, k <= {}, l <= {} (got {}, k={k}, l={l})",
            guard.max_predicates,
            guard.max_k,
            guard.max_l,
            index.predicate_count()
        )));
    }
    let n = index.cell_count();
    let conjunctions = combinations(index.predicate_count(), l);
    let covers: Vec<FixedBitSet> = conjunctions
        .iter()
        .map(|combo| {
            let mut b = FixedBitSet::with_capacity(n);
            b.insert_range(..);
            for &p in combo {
                let mut q = FixedBitSet::with_capacity(n);
                q.extend(index.postings(PredicateId(p as u32)).iter().map(|&c| c as usize));
                b.intersect_with(&q);
            }
            b
        })
        .collect();

    let picks = k.min(covers.len());
    let mut best = 0usize;
    let mut best_pick: Vec<usize> = Vec::new();
    let mut stack = vec![FixedBitSet::with_capacity(n); picks + 1];
    let mut cur = Vec::with_capacity(picks);
    fn rec(
        covers: &[FixedBitSet],
        picks: usize,
        start: usize,
        cur: &mut Vec<usize>,
        stack: &mut [FixedBitSet],
        best: &mut usize,
        best_pick: &mut Vec<usize>,
    ) {
        let depth = cur.len();
        if depth == picks {
            let v = stack[depth].count_ones(..);
            if v > *best {
                *best = v;
                *best_pick = cur.clone();
            }
            return;
        }
        for i in start..=(covers.len() - (picks - depth)) {
            let (head, tail) = stack.split_at_mut(depth + 1);
            tail[0].clone_from(&head[depth]);
            tail[0].union_with(&covers[i]);
            cur.push(i);
            rec(covers, picks, i + 1, cur, stack, best, best_pick);
            cur.pop();
        }
    }
    if picks > 0 {
        rec(&covers, picks, 0, &mut cur, &mut stack, &mut best, &mut best_pick);
    }

    let mut set = ExplanationSet::new(n);
    for i in best_pick {
        let preds = conjunctions[i].iter().map(|&p| PredicateId(p as u32)).collect();
        set.push(index, preds)?;
    }
    Ok((best, set))
}
