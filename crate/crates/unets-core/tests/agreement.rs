//! The agreement machinery checked against independent paths: BFS
//! distances for the sandwich bounds, the deletion-subset forest oracle on
//! trees, replug BFS for the endpoint variant, and replays for the
//! constructed sequences.

mod common;

use common::{all_trees, census};
use std::collections::BTreeMap;
use unets_core::agreement::{
    agreement_distance, maf_distance, mag_to_tbr_sequence, meag_search, AgreementError,
};
use unets_core::rearrange::MoveKind;
use unets_core::search::{
    bfs_distance, caterpillar, distance_stability, replug_distance, OperationSet, SearchConfig,
};
use unets_core::{CanonicalCode, PhyloNetwork};

/// The whole n=4, tier 0..=1 space, by brute-force census.
fn quartet_space() -> Vec<PhyloNetwork> {
    let mut all: Vec<PhyloNetwork> = all_trees(4).into_values().collect();
    all.extend(census(4, 1).into_values());
    all
}

#[test]
fn identical_networks_have_zero_distances() {
    for net in [caterpillar(5), census(3, 1).into_values().next().unwrap()] {
        let ad = agreement_distance(&net, &net).unwrap();
        assert_eq!(ad.distance, 0);
        assert_eq!(ad.graph.subgraphs.len(), 1);
        let (ead, _) = meag_search(&net, &net, 1_000_000).unwrap();
        assert_eq!(ead, 0);
    }
}

#[test]
fn leaf_set_mismatch_is_rejected() {
    let a = caterpillar(4);
    let b = caterpillar(5);
    assert_eq!(
        agreement_distance(&a, &b).unwrap_err(),
        AgreementError::LeafSetMismatch
    );
    assert_eq!(
        meag_search(&a, &b, 1_000).unwrap_err(),
        AgreementError::LeafSetMismatch
    );
}

#[test]
fn caterpillar_tree_pairs_agree_three_ways() {
    // Agreement distance, TBR search, and the deletion-subset forest
    // oracle must coincide on trees.
    let cat = caterpillar(5);
    let cfg = SearchConfig::new(OperationSet::Tbr);
    for tree in all_trees(5).values() {
        let ad = agreement_distance(&cat, tree).unwrap().distance;
        let tbr = bfs_distance(&cat, tree, &cfg).unwrap().distance;
        let (maf, _) = maf_distance(&cat, tree).unwrap();
        assert_eq!(ad, tbr);
        assert_eq!(ad, maf);
    }
}

#[test]
fn displayed_trees_sit_at_the_tier_gap() {
    // Lifting a tree by TBR additions keeps it displayed, and both the
    // agreement and TBR distances back to the tree equal the gap.
    let tree = caterpillar(4);
    let mut net = tree.clone();
    for r in 1..=2u32 {
        let (_, (_, lifted)) = unets_core::rearrange::tbr_neighbors(&net, &[MoveKind::TbrPlus])
            .into_iter()
            .next()
            .unwrap();
        net = lifted;
        assert!(net.displays(&tree));
        let ad = agreement_distance(&tree, &net).unwrap().distance;
        assert_eq!(ad, r);
        let tbr = bfs_distance(&tree, &net, &SearchConfig::new(OperationSet::Tbr))
            .unwrap()
            .distance;
        assert_eq!(tbr, r);
    }
}

#[test]
fn quartet_space_sandwich_and_unit_biconditional() {
    let space = quartet_space();
    let cfg = SearchConfig::new(OperationSet::Tbr);
    for (i, a) in space.iter().enumerate() {
        for b in &space[i + 1..] {
            let ad = agreement_distance(a, b).unwrap();
            let tbr = bfs_distance(a, b, &cfg).unwrap().distance;
            assert!(ad.distance <= tbr, "agreement exceeds TBR");
            assert!(tbr <= 2 * ad.distance, "TBR exceeds twice agreement");
            assert_eq!(ad.distance == 1, tbr == 1, "unit distances disagree");
        }
    }
}

#[test]
fn quartet_space_agreement_is_symmetric() {
    let space = quartet_space();
    for (i, a) in space.iter().enumerate() {
        for b in space[i + 1..].iter().step_by(3) {
            let ab = agreement_distance(a, b).unwrap().distance;
            let ba = agreement_distance(b, a).unwrap().distance;
            assert_eq!(ab, ba);
        }
    }
}

#[test]
fn quartet_triples_satisfy_the_triangle_inequality() {
    let space = quartet_space();
    let mut dist: BTreeMap<(usize, usize), u32> = BTreeMap::new();
    let picks: Vec<usize> = (0..space.len()).step_by(4).collect();
    for (pi, &i) in picks.iter().enumerate() {
        for &j in &picks[pi + 1..] {
            let d = agreement_distance(&space[i], &space[j]).unwrap().distance;
            assert!(d > 0, "distinct codes at distance zero");
            dist.insert((i, j), d);
            dist.insert((j, i), d);
        }
    }
    for &i in &picks {
        for &j in &picks {
            for &k in &picks {
                if i == j || j == k || i == k {
                    continue;
                }
                assert!(dist[&(i, k)] <= dist[&(i, j)] + dist[&(j, k)]);
            }
        }
    }
}

#[test]
fn endpoint_distance_matches_replug_search() {
    let space = quartet_space();
    let cfg = SearchConfig::new(OperationSet::Replug);
    for (i, a) in space.iter().enumerate() {
        for b in space[i + 1..].iter().step_by(5) {
            let (ead, graph) = meag_search(a, b, 50_000_000).unwrap();
            let replug = replug_distance(a, b, &cfg).unwrap().distance;
            assert_eq!(ead, replug, "endpoint variant disagrees with replug");
            assert_eq!(graph.sprout_tally() + graph.disagreement_count, ead);
        }
    }
}

#[test]
fn sequences_realize_corpus_distances() {
    let space = quartet_space();
    for (i, a) in space.iter().enumerate() {
        for b in space[i + 1..].iter().step_by(4) {
            let ad = agreement_distance(a, b).unwrap();
            let seq = mag_to_tbr_sequence(a, b, &ad).unwrap();
            assert!(seq.len() <= 2 * ad.distance as usize);
            let codes: Vec<CanonicalCode> = seq.replay().unwrap();
            assert_eq!(codes.first().unwrap(), &a.canonical_form());
            assert_eq!(codes.last().unwrap(), &b.canonical_form());
        }
    }
}

#[test]
fn sequence_additions_precede_removals() {
    let a = caterpillar(5);
    for b in all_trees(5).values().take(6) {
        let ad = agreement_distance(&a, b).unwrap();
        let seq = mag_to_tbr_sequence(&a, b, &ad).unwrap();
        let kinds: Vec<MoveKind> = seq.moves.iter().map(|m| m.kind()).collect();
        let first_removal = kinds
            .iter()
            .position(|&k| k == MoveKind::TbrMinus)
            .unwrap_or(kinds.len());
        assert!(kinds[..first_removal]
            .iter()
            .all(|&k| k == MoveKind::TbrPlus));
        assert!(kinds[first_removal..]
            .iter()
            .all(|&k| k == MoveKind::TbrMinus));
    }
}

#[test]
fn window_stability_holds_on_quartet_samples() {
    let space = quartet_space();
    let cfg = SearchConfig::new(OperationSet::Tbr);
    for (i, a) in space.iter().enumerate().step_by(6) {
        for b in space[i + 1..].iter().step_by(7) {
            let report = distance_stability(a, b, &cfg).unwrap();
            assert!(report.stable, "distance moved when the window widened");
        }
    }
}
