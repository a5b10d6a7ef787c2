mod common;

use std::collections::{BTreeMap, BTreeSet};

use common::*;
use proptest::prelude::*;
use proxi_core::baselines::{
    brute_force_oracle, exhaustive_baseline, most_popular_baseline, random_baseline, OracleGuard,
};
use proxi_core::featurization::{
    equi_depth_bins, AttributeTable, Dimension, LabelStyle, PredicateIndex, UserPredicateTarget,
};
use proxi_core::ingestion::{Network, PropagationOptions};
use proxi_core::miner::{
    annotate, coverage_of_explanation, coverage_of_set, eager_greedy, mine_explanations, ExplanationSet,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn followup_sets_match_transitive_closure(seed in any::<u64>(), delay in prop::option::of(1u64..6)) {
        let net = RandomNetwork::generate(&mut rng(seed), 14, 5);
        let network = Network::new(&net.graph(), &net.log(), PropagationOptions { max_delay: delay });
        for u in 0..net.users {
            let got: BTreeSet<(String, u64)> = network
                .followup_set_of(u)
                .unwrap()
                .cells()
                .iter()
                .map(|c| (network.action_name(c.action).to_string(), network.user_name(c.follower)))
                .collect();
            prop_assert_eq!(got, net.followups(u, delay), "influencer {}", u);
        }
    }

    #[test]
    fn followup_mass_marginals_agree(seed in any::<u64>()) {
        let net = RandomNetwork::generate(&mut rng(seed), 14, 5);
        let network = Network::new(&net.graph(), &net.log(), PropagationOptions::default());
        let mass = network.followup_mass();
        let total: u64 = (0..net.users).map(|u| net.followups(u, None).len() as u64).sum();
        prop_assert_eq!(mass.per_influencer.iter().sum::<u64>(), total);
        prop_assert_eq!(mass.per_action.iter().sum::<u64>(), total);
        prop_assert_eq!(mass.per_follower.iter().sum::<u64>(), total);
    }

    #[test]
    fn index_round_trips_its_postings(seed in any::<u64>()) {
        let inst = structured_instance(&mut rng(seed), 120, 20);
        let idx = &inst.index;
        prop_assert_eq!(idx.predicate_count(), inst.family.len());
        for (p, set) in idx.ids().zip(&inst.family) {
            let listed: BTreeSet<u32> = idx.postings(p).iter().copied().collect();
            prop_assert_eq!(&listed, set);
            prop_assert!(idx.postings(p).windows(2).all(|w| w[0] < w[1]));
            if let Some(bits) = idx.posting_bits(p) {
                let from_bits: BTreeSet<u32> = bits.ones().map(|c| c as u32).collect();
                prop_assert_eq!(&from_bits, set);
            }
        }
        for c in 0..inst.n_cells {
            let expected: Vec<usize> = (0..inst.family.len()).filter(|&p| inst.family[p].contains(&(c as u32))).collect();
            let got: Vec<usize> = idx.cell_predicates(c).iter().map(|p| p.index()).collect();
            prop_assert_eq!(got, expected);
        }
    }

    #[test]
    fn equi_depth_bins_conserve_weight_and_are_minimax(
        points in prop::collection::vec((0u32..25, 0u64..20), 1..30),
        nbins in 1usize..5,
    ) {
        let pts: Vec<(f64, u64)> = points.iter().map(|&(x, w)| (x as f64, w)).collect();
        let mut merged: BTreeMap<u32, u64> = BTreeMap::new();
        for &(x, w) in &points {
            *merged.entry(x).or_default() += w;
        }
        let spec = equi_depth_bins("x", &pts, nbins, LabelStyle::default());
        if nbins > merged.len() {
            prop_assert!(spec.is_err());
            return Ok(());
        }
        let spec = spec.unwrap();
        prop_assert_eq!(spec.bin_count(), nbins);
        prop_assert_eq!(spec.labels.len(), nbins);
        let mut loads = vec![0u64; nbins];
        let mut seen = vec![false; nbins];
        for (&x, &w) in &merged {
            let b = spec.bin_of(x as f64);
            loads[b] += w;
            seen[b] = true;
        }
        prop_assert!(seen.iter().all(|&s| s), "every bin holds a value");
        prop_assert_eq!(loads.iter().sum::<u64>(), points.iter().map(|p| p.1).sum::<u64>());
        // Bins are contiguous in value order.
        let order: Vec<usize> = merged.keys().map(|&x| spec.bin_of(x as f64)).collect();
        prop_assert!(order.windows(2).all(|w| w[0] <= w[1]));
        // Best heaviest bin over every way to cut into nbins non-empty runs.
        let weights: Vec<u64> = merged.values().copied().collect();
        let best = subsets(weights.len() - 1, nbins - 1)
            .iter()
            .map(|cuts| {
                let mut bounds = vec![0];
                bounds.extend(cuts.iter().map(|c| c + 1));
                bounds.push(weights.len());
                bounds.windows(2).map(|w| weights[w[0]..w[1]].iter().sum::<u64>()).max().unwrap()
            })
            .min()
            .unwrap();
        prop_assert_eq!(*loads.iter().max().unwrap(), best);
    }

    #[test]
    fn lazy_and_eager_greedy_agree(seed in any::<u64>(), k in 1usize..6, l in 1usize..5) {
        let inst = structured_instance(&mut rng(seed), 200, 30);
        let lazy = mine_explanations(&inst.index, k, l).unwrap();
        let eager = eager_greedy(&inst.index, k, l).unwrap();
        prop_assert_eq!(lazy.to_json(), eager.to_json());
    }

    #[test]
    fn greedy_bookkeeping_matches_recount(seed in any::<u64>(), k in 1usize..5, l in 1usize..4) {
        let inst = structured_instance(&mut rng(seed), 150, 20);
        let set = mine_explanations(&inst.index, k, l).unwrap();
        let mut covered = BTreeSet::new();
        for e in &set.explanations {
            let members: Vec<usize> = e.predicates.iter().map(|p| p.index()).collect();
            let cover = intersect(&inst.family, &members, inst.n_cells);
            prop_assert_eq!(e.covered.iter().copied().collect::<BTreeSet<u32>>(), cover.clone());
            prop_assert_eq!(e.raw_coverage, cover.len());
            prop_assert_eq!(e.marginal_coverage, cover.difference(&covered).count());
            prop_assert!(e.marginal_coverage > 0);
            covered.extend(cover);
        }
        prop_assert_eq!(set.total_coverage(), covered.len());
    }

    #[test]
    fn coverage_is_submodular_and_conjunctions_supermodular(seed in any::<u64>()) {
        use rand::Rng;
        let mut r = rng(seed);
        let inst = structured_instance(&mut r, 80, 12);
        let m = inst.index.predicate_count();
        let pick = |r: &mut ChaCha8Rng, n: usize| -> Vec<usize> { (0..m).filter(|_| r.gen_bool(n as f64 / m.max(1) as f64)).collect() };
        // Conjunctions: E ⊆ E' and one more predicate p.
        let e = pick(&mut r, 2);
        let mut e2 = e.clone();
        e2.extend(pick(&mut r, 2));
        e2.sort_unstable();
        e2.dedup();
        let p = r.gen_range(0..m);
        let with = |s: &[usize]| { let mut v = s.to_vec(); v.push(p); v.sort_unstable(); v.dedup(); v };
        let cov = |s: &[usize]| coverage_of_explanation(&inst.index, &ids(s)).unwrap();
        prop_assert_eq!(cov(&e), intersect(&inst.family, &e, inst.n_cells).len());
        prop_assert!(cov(&e) >= cov(&e2));
        prop_assert!(cov(&e) - cov(&with(&e)) >= cov(&e2) - cov(&with(&e2)));
        // Explanation sets: S ⊆ S' and one more explanation x.
        let random_expl = |r: &mut ChaCha8Rng| { let mut v = pick(r, 2); v.sort_unstable(); ids(&v) };
        let s: Vec<_> = (0..r.gen_range(0..3)).map(|_| random_expl(&mut r)).collect();
        let mut s2 = s.clone();
        s2.extend((0..r.gen_range(0..3)).map(|_| random_expl(&mut r)));
        let x = random_expl(&mut r);
        let set_cov = |s: &[Vec<_>]| coverage_of_set(&inst.index, s).unwrap();
        let plus = |s: &[Vec<_>]| { let mut v = s.to_vec(); v.push(x.clone()); v };
        prop_assert!(set_cov(&s) <= set_cov(&s2));
        prop_assert!(set_cov(&plus(&s)) - set_cov(&s) >= set_cov(&plus(&s2)) - set_cov(&s2));
    }

    #[test]
    fn pruned_exhaustive_matches_naive_enumeration(seed in any::<u64>(), k in 1usize..4, l in 1usize..4) {
        use rand::Rng;
        let mut r = rng(seed);
        let n = r.gen_range(1..30);
        let m = r.gen_range(1..=12);
        let inst = instance_from_family(n, random_family(&mut r, n, m));
        let (set, stats) = exhaustive_baseline(&inst.index, k, l, u64::MAX).unwrap();
        let naive = naive_exhaustive(&inst.family, n, k, l);
        let got: Vec<Vec<usize>> = set.predicate_lists().iter().map(|e| e.iter().map(|p| p.index()).collect()).collect();
        prop_assert_eq!(got, naive);
        prop_assert!(stats.nodes.iter().zip(&stats.nominal).all(|(&a, &b)| (a as u128) <= b * (l as u128)));
    }

    #[test]
    fn oracle_is_optimal_and_dominates_baselines(seed in any::<u64>(), k in 1usize..3, l in 1usize..4) {
        use rand::Rng;
        let mut r = rng(seed);
        let n = r.gen_range(1..25);
        let m = r.gen_range(1..=9);
        let inst = instance_from_family(n, random_family(&mut r, n, m));
        let (opt, witness) = brute_force_oracle(&inst.index, k, l, OracleGuard::default()).unwrap();
        prop_assert_eq!(opt, optimum(&inst.family, n, k, l));
        prop_assert_eq!(witness.total_coverage(), opt);
        let greedy = mine_explanations(&inst.index, k, l).unwrap().total_coverage();
        let (exhaustive, _) = exhaustive_baseline(&inst.index, k, l, u64::MAX).unwrap();
        prop_assert!(opt >= greedy && opt >= exhaustive.total_coverage());
        // A truncated most-popular explanation is shorter than l, so it is
        // outside the oracle's search space.
        let popular = most_popular_baseline(&inst.index, k, l).unwrap();
        prop_assert!(popular.truncated || opt >= popular.total_coverage());
        if m >= l {
            let random = random_baseline(&inst.index, k, l, seed).unwrap();
            prop_assert!(opt >= random.total_coverage());
            prop_assert_eq!(random, random_baseline(&inst.index, k, l, seed).unwrap());
        }
    }

    #[test]
    fn annotation_matches_entity_scan(seed in any::<u64>()) {
        use rand::Rng;
        let mut r = rng(seed);
        let net = RandomNetwork::generate(&mut r, 16, 6);
        let network = Network::new(&net.graph(), &net.log(), PropagationOptions::default());
        let mut users = AttributeTable::empty(Dimension::User);
        let mut actions = AttributeTable::empty(Dimension::Action);
        users.declare_single("group");
        for u in 0..net.users {
            users.insert(&u.to_string(), "group", &format!("g{}", r.gen_range(0..3))).unwrap();
        }
        let names: BTreeSet<&str> = net.records.iter().map(|(_, a, _)| a.as_str()).collect();
        for a in &names {
            for tag in ["x", "y", "z"] {
                if r.gen_bool(0.5) {
                    actions.insert(a, "tag", tag).unwrap();
                }
            }
        }
        let Some(top) = network.rank_influencers(1).unwrap().first().copied() else { return Ok(()) };
        let fset = network.followup_set(top.user);
        let index = PredicateIndex::build(&network, &fset, &users, &actions, &[], UserPredicateTarget::Follower).unwrap();
        if index.predicate_count() == 0 {
            return Ok(());
        }
        let set = mine_explanations(&index, 3, 2).unwrap();
        let action_rows: Vec<&str> = network.actions_of(top.user).iter().map(|&a| network.action_name(a)).collect();
        let followers: Vec<u64> = fset.active_followers().iter().map(|&f| network.user_name(f)).collect();
        for e in &set.explanations {
            let a = annotate(&index, e).unwrap();
            let preds: Vec<_> = e.predicates.iter().map(|&p| index.predicate(p).clone()).collect();
            let has = |row: &[proxi_core::featurization::AttributeValue], p: &proxi_core::featurization::Predicate| {
                row.iter().any(|v| v.attribute == p.attribute && v.value == p.value)
            };
            let want_actions = action_rows
                .iter()
                .filter(|name| preds.iter().filter(|p| p.dimension == Dimension::Action).all(|p| has(actions.row(name), p)))
                .count();
            let want_followers = followers
                .iter()
                .filter(|u| preds.iter().filter(|p| p.dimension == Dimension::User).all(|p| has(users.row(&u.to_string()), p)))
                .count();
            prop_assert_eq!(a.actions, want_actions);
            prop_assert_eq!(a.followers, want_followers);
            prop_assert_eq!(a.followups, e.raw_coverage);
        }
    }
}

#[test]
fn explanation_set_push_rejects_unknown_predicates() {
    let inst = instance_from_family(3, vec![[0, 1].into(), [1, 2].into()]);
    let mut set = ExplanationSet::new(3);
    assert!(set.push(&inst.index, ids(&[0, 5])).is_err());
    set.push(&inst.index, ids(&[0, 1])).unwrap();
    assert_eq!(set.total_coverage(), 1);
}
