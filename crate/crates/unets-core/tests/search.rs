//! The search engine checked against independent paths: censuses for the
//! enumerator, a plain one-directional test-local BFS for distances, and
//! closed-one-hop facts for unit distances.

mod common;

use common::{all_trees, census, snowflake};
use std::collections::{BTreeMap, BTreeSet, VecDeque};
use unets_core::rearrange::{pr_neighbors, tbr_neighbors, MoveKind};
use unets_core::search::{
    bfs_distance, caterpillar, enumerate_tier_codes, enumerate_tier_with_budget, OperationSet,
    SearchConfig, SearchError,
};
use unets_core::{CanonicalCode, PhyloNetwork};

#[test]
fn enumeration_matches_tree_censuses() {
    for n in 4..=6u32 {
        let trees: BTreeSet<_> = all_trees(n).into_keys().collect();
        assert_eq!(enumerate_tier_codes(n, 0).unwrap(), trees, "n = {n}");
    }
}

#[test]
fn enumeration_matches_brute_force_censuses() {
    for (n, tier) in [(2u32, 1u32), (2, 2), (3, 1), (3, 2), (4, 1)] {
        let brute: BTreeSet<_> = census(n, tier).into_keys().collect();
        assert_eq!(
            enumerate_tier_codes(n, tier).unwrap(),
            brute,
            "n = {n}, tier = {tier}"
        );
    }
}

#[test]
fn enumeration_budget_reported() {
    assert!(matches!(
        enumerate_tier_with_budget(6, 1, 10),
        Err(SearchError::BudgetExhausted { .. })
    ));
}

/// Plain uniform-cost BFS over canonical codes, mirroring the engine's
/// kind gating but sharing none of its frontier, meet, or reconstruction
/// machinery.
fn local_distance(a: &PhyloNetwork, b: &PhyloNetwork, ops: OperationSet, hi: u32) -> u32 {
    let target = b.canonical_form();
    let mut seen: BTreeSet<CanonicalCode> = BTreeSet::new();
    let mut queue: VecDeque<(PhyloNetwork, u32)> = VecDeque::new();
    seen.insert(a.canonical_form());
    queue.push_back((a.clone(), 0));
    while let Some((net, d)) = queue.pop_front() {
        if net.canonical_form() == target {
            return d;
        }
        let mut kinds = vec![if ops == OperationSet::Tbr {
            MoveKind::Tbr0
        } else {
            MoveKind::Pr0
        }];
        if net.tier() < hi {
            kinds.push(MoveKind::TbrPlus);
        }
        if net.tier() > 0 {
            kinds.push(MoveKind::TbrMinus);
        }
        let map = if ops == OperationSet::Tbr {
            tbr_neighbors(&net, &kinds)
        } else {
            pr_neighbors(&net, &kinds)
        };
        for (code, (_, t)) in map {
            if seen.insert(code) {
                queue.push_back((t, d + 1));
            }
        }
    }
    panic!("connected space");
}

#[test]
fn engine_matches_local_bfs_on_five_leaf_trees() {
    let trees: Vec<PhyloNetwork> = all_trees(5).into_values().collect();
    let a = &trees[0];
    for ops in [OperationSet::Tbr, OperationSet::Pr] {
        let cfg = SearchConfig::new(ops);
        for b in &trees {
            let got = bfs_distance(a, b, &cfg).unwrap();
            assert_eq!(got.distance, local_distance(a, b, ops, 1));
            assert_eq!(got.witness.len() as u32, got.distance);
            got.witness.replay().unwrap();
        }
    }
}

#[test]
fn distance_is_symmetric() {
    let trees: Vec<PhyloNetwork> = all_trees(6).into_values().collect();
    let nets: Vec<PhyloNetwork> = census(3, 1).into_values().collect();
    let pairs = [
        (&trees[0], &trees[7]),
        (&trees[3], &trees[90]),
        (&nets[0], &nets[nets.len() - 1]),
    ];
    for ops in [OperationSet::Tbr, OperationSet::Pr, OperationSet::Replug] {
        let cfg = SearchConfig::new(ops);
        for (a, b) in pairs {
            let fwd = bfs_distance(a, b, &cfg).unwrap();
            let bwd = bfs_distance(b, a, &cfg).unwrap();
            assert_eq!(fwd.distance, bwd.distance);
            fwd.witness.replay().unwrap();
            bwd.witness.replay().unwrap();
        }
    }
}

#[test]
fn triangle_inequality_sampled() {
    let trees: Vec<PhyloNetwork> = all_trees(5).into_values().collect();
    let cfg = SearchConfig::new(OperationSet::Tbr);
    let d = |x: &PhyloNetwork, y: &PhyloNetwork| bfs_distance(x, y, &cfg).unwrap().distance;
    for (i, j, k) in [(0usize, 4usize, 9usize), (1, 7, 13), (2, 8, 14), (0, 14, 5)] {
        let (a, b, c) = (&trees[i], &trees[j], &trees[k]);
        assert!(d(a, c) <= d(a, b) + d(b, c));
    }
}

#[test]
fn unit_and_two_step_distances_follow_neighborhoods() {
    let a = caterpillar(6);
    let cfg = SearchConfig::new(OperationSet::Tbr);
    let hop1: BTreeMap<_, _> = tbr_neighbors(&a, &[MoveKind::Tbr0, MoveKind::TbrPlus]);
    let own = a.canonical_form();

    // Every distinct one-hop code is at distance exactly one.
    let mut checked = 0;
    for (code, (_, m)) in hop1.iter() {
        if *code == own || checked == 6 {
            continue;
        }
        let _ = m;
        let got = bfs_distance(&a, &hop1[code].1, &cfg).unwrap();
        assert_eq!(got.distance, 1);
        checked += 1;
    }

    // Some code in the two-hop shell but not the one-hop shell is at
    // distance exactly two; the snowflake variant below is one.
    let b = {
        use unets_core::multigraph::{Label, MultiGraph};
        let mut g = MultiGraph::new();
        let centre = g.add_vertex();
        for (l1, l2) in [(1u32, 4u32), (2, 6), (3, 5)] {
            let root = g.add_vertex();
            g.add_edge(centre, root).unwrap();
            for l in [l1, l2] {
                let v = g.add_labelled_vertex(Label(l)).unwrap();
                g.add_edge(root, v).unwrap();
            }
        }
        PhyloNetwork::validate(g).unwrap()
    };
    let bcode = b.canonical_form();
    assert!(!hop1.contains_key(&bcode) && bcode != own);
    let two = bfs_distance(&a, &b, &cfg).unwrap();
    assert!(two.distance >= 2);
    let reachable_in_two = hop1
        .values()
        .any(|(_, m)| tbr_neighbors(m, &[MoveKind::Tbr0]).contains_key(&bcode));
    if reachable_in_two {
        assert_eq!(two.distance, 2);
    }
}

#[test]
fn known_adjacent_tree_pair() {
    // Moving leaf 3 next to leaf 4 turns the caterpillar into the
    // snowflake, so the pair is at every tier-preserving distance one.
    let a = caterpillar(6);
    let b = snowflake();
    for ops in [OperationSet::Tbr, OperationSet::Pr, OperationSet::Replug] {
        let got = bfs_distance(&a, &b, &SearchConfig::new(ops)).unwrap();
        assert_eq!(got.distance, 1);
        got.witness.replay().unwrap();
    }
}
