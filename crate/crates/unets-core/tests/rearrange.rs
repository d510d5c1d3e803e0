//! The neighborhood generators checked against constructions that share no
//! code with them: a closed-form subtree-prune count on trees, single-edge
//! removal profiles, and raw removal eligibility for tier changes.

mod common;

use common::{all_trees, census, snowflake};
use std::collections::BTreeSet;
use unets_core::phylo::is_cut_edge;
use unets_core::rearrange::{pr_neighbors, replug_neighbors, tbr_neighbors, MoveKind};
use unets_core::search::caterpillar;
use unets_core::{CanonicalCode, PhyloNetwork, ReplugNetwork};

const ALL_TBR: [MoveKind; 3] = [MoveKind::Tbr0, MoveKind::TbrPlus, MoveKind::TbrMinus];

/// Codes of every graph obtained by deleting one edge (with the usual
/// suppressions). Two networks are one tier-preserving move apart exactly
/// when their profiles share a code.
fn removal_profile(n: &PhyloNetwork) -> BTreeSet<CanonicalCode> {
    let g = n.as_graph();
    g.edge_ids()
        .map(|e| g.remove_edge(e).unwrap().canonical_form())
        .collect()
}

/// Codes of every proper network reachable by one eligible edge removal:
/// the edge is not a cut edge and no suppression produces a loop. Stated
/// directly on the substrate, bypassing the move machinery.
fn eligible_removals(n: &PhyloNetwork) -> BTreeSet<CanonicalCode> {
    let g = n.as_graph();
    let mut out = BTreeSet::new();
    for e in g.edge_ids() {
        if is_cut_edge(g, e) {
            continue;
        }
        let h = g.remove_edge(e).unwrap();
        if h.edge_ids().any(|f| h.is_loop(f)) {
            continue;
        }
        if let Ok(net) = PhyloNetwork::validate(h) {
            out.insert(net.canonical_form());
        }
    }
    out
}

#[test]
fn spr_count_matches_closed_form() {
    // Any n-leaf binary tree has exactly 2(n-3)(2n-7) distinct trees one
    // subtree-prune-regraft away, independent of shape.
    let cases = [
        (caterpillar(4), 4u32),
        (caterpillar(5), 5),
        (caterpillar(6), 6),
        (snowflake(), 6),
    ];
    for (tree, n) in cases {
        let own = tree.canonical_form();
        let distinct = pr_neighbors(&tree, &[MoveKind::Pr0])
            .keys()
            .filter(|c| **c != own)
            .count() as u32;
        assert_eq!(distinct, 2 * (n - 3) * (2 * n - 7), "n = {n}");
    }
}

#[test]
fn tree_census_matches_leaf_insertion() {
    for n in 4..=6u32 {
        let grown: BTreeSet<_> = all_trees(n).into_keys().collect();
        let brute: BTreeSet<_> = census(n, 0).into_keys().collect();
        assert_eq!(grown, brute, "n = {n}");
    }
    assert_eq!(census(6, 0).len(), 105);
}

#[test]
fn removal_characterization_tier_zero() {
    for (n, expected) in [(4u32, 3usize), (5, 15)] {
        let space = census(n, 0);
        assert_eq!(space.len(), expected);
        check_removal_characterization(&space);
    }
}

#[test]
fn removal_characterization_tier_one() {
    let space = census(4, 1);
    assert!(!space.is_empty());
    check_removal_characterization(&space);
}

fn check_removal_characterization(
    space: &std::collections::BTreeMap<CanonicalCode, PhyloNetwork>,
) {
    let profiles: Vec<(&CanonicalCode, BTreeSet<CanonicalCode>)> = space
        .iter()
        .map(|(c, n)| (c, removal_profile(n)))
        .collect();
    for (code_a, net_a) in space {
        let generated: BTreeSet<_> = tbr_neighbors(net_a, &[MoveKind::Tbr0])
            .into_keys()
            .collect();
        let profile_a = &profiles
            .iter()
            .find(|(c, _)| *c == code_a)
            .expect("profile computed")
            .1;
        for (code_b, profile_b) in &profiles {
            let adjacent = *code_b == code_a || generated.contains(*code_b);
            let share = !profile_a.is_disjoint(profile_b);
            assert_eq!(
                adjacent, share,
                "removal characterization disagrees on a pair"
            );
        }
    }
}

#[test]
fn plus_matches_minus_eligibility() {
    // m is one tier-raising move from n exactly when some eligible removal
    // of m lands back on n.
    for (n_leaves, tier) in [(4u32, 0u32), (3, 0), (3, 1)] {
        let lower = census(n_leaves, tier);
        let upper = census(n_leaves, tier + 1);
        for (code_a, net_a) in &lower {
            let generated: BTreeSet<_> = tbr_neighbors(net_a, &[MoveKind::TbrPlus])
                .into_keys()
                .collect();
            let oracle: BTreeSet<_> = upper
                .iter()
                .filter(|(_, m)| eligible_removals(m).contains(code_a))
                .map(|(c, _)| c.clone())
                .collect();
            assert_eq!(generated, oracle, "tier {tier} -> {}", tier + 1);
        }
    }
}

#[test]
fn minus_matches_eligible_removals() {
    for (n_leaves, tier) in [(4u32, 1u32), (3, 1), (3, 2)] {
        for net in census(n_leaves, tier).values() {
            let generated: BTreeSet<_> = tbr_neighbors(net, &[MoveKind::TbrMinus])
                .into_keys()
                .collect();
            assert_eq!(generated, eligible_removals(net), "tier {tier}");
        }
    }
}

#[test]
fn minus_empty_on_trees() {
    for net in census(5, 0).values() {
        assert!(tbr_neighbors(net, &[MoveKind::TbrMinus]).is_empty());
    }
}

#[test]
fn neighborhood_symmetry_sweep() {
    let mut space = census(4, 0);
    space.extend(census(4, 1));
    space.extend(census(3, 1));
    for (code, net) in &space {
        for (_, (_, target)) in tbr_neighbors(net, &ALL_TBR) {
            let back = tbr_neighbors(&target, &ALL_TBR);
            assert!(
                back.contains_key(code) || target.canonical_form() == *code,
                "tbr neighborhoods are symmetric"
            );
        }
        for (_, (_, target)) in pr_neighbors(net, &[MoveKind::Pr0]) {
            let back = pr_neighbors(&target, &[MoveKind::Pr0]);
            assert!(
                back.contains_key(code) || target.canonical_form() == *code,
                "pr neighborhoods are symmetric"
            );
        }
    }
}

#[test]
fn replug_symmetry_sweep() {
    for (code, net) in census(3, 1) {
        let start = ReplugNetwork::from_phylo(&net);
        for (tcode, (_, target)) in replug_neighbors(&start) {
            let back = replug_neighbors(&target);
            assert!(
                back.contains_key(&code) || tcode == code,
                "replug neighborhoods are symmetric"
            );
        }
    }
}

#[test]
fn pr_zero_within_tbr_zero_sweep() {
    let mut space = census(5, 0);
    space.extend(census(4, 1));
    for net in space.values() {
        let tbr: BTreeSet<_> = tbr_neighbors(net, &[MoveKind::Tbr0]).into_keys().collect();
        for code in pr_neighbors(net, &[MoveKind::Pr0]).keys() {
            assert!(
                tbr.contains(code) || *code == net.canonical_form(),
                "every prune-regraft result is one tbr move away"
            );
        }
    }
}
