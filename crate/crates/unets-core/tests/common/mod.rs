//! Independent enumerations shared by the integration oracles. Nothing in
//! here goes through the neighborhood generators or the search engine, so
//! agreement with those paths is evidence, not circularity.

use std::collections::BTreeMap;
use unets_core::multigraph::{Label, MultiGraph};
use unets_core::PhyloNetwork;

/// Every proper network with `n` leaves at the given tier, enumerated by
/// brute force over degree sequences: each leaf picks an internal
/// neighbor, and the internal vertices are wired by every multiset of
/// vertex pairs that balances all degrees to three. Loops are skipped
/// because a loop forces an unlabelled pendant blob, which properness
/// rejects anyway.
pub fn census(n: u32, tier: u32) -> BTreeMap<unets_core::CanonicalCode, PhyloNetwork> {
    assert!(n >= 2, "census needs at least two leaves");
    let internals = (n as usize - 2) + 2 * tier as usize;
    assert!(internals >= 1, "the bare two-leaf edge is out of scope");
    let ends = 3 * internals - n as usize;
    assert!(ends % 2 == 0, "internal degree ends must pair up");
    let edge_count = ends / 2;

    let pairs: Vec<(usize, usize)> = (0..internals)
        .flat_map(|a| (a + 1..internals).map(move |b| (a, b)))
        .collect();
    let multisets = pair_multisets(&pairs, edge_count);

    let mut out = BTreeMap::new();
    let mut assignment = vec![0usize; n as usize];
    loop {
        let mut demand = vec![3i32; internals];
        for &host in &assignment {
            demand[host] -= 1;
        }
        if demand.iter().all(|&d| d >= 0) {
            for multiset in &multisets {
                let mut left = demand.clone();
                for &(a, b) in multiset {
                    left[a] -= 1;
                    left[b] -= 1;
                }
                if left.iter().any(|&d| d != 0) {
                    continue;
                }
                let mut g = MultiGraph::new();
                let hosts: Vec<_> = (0..internals).map(|_| g.add_vertex()).collect();
                for (idx, &host) in assignment.iter().enumerate() {
                    let leaf = g.add_labelled_vertex(Label(idx as u32 + 1)).unwrap();
                    g.add_edge(hosts[host], leaf).unwrap();
                }
                for &(a, b) in multiset {
                    g.add_edge(hosts[a], hosts[b]).unwrap();
                }
                if let Ok(net) = PhyloNetwork::validate(g) {
                    out.insert(net.canonical_form(), net);
                }
            }
        }
        if !advance(&mut assignment, internals) {
            break;
        }
    }
    out
}

/// Every unrooted binary tree on leaves 1..n, generated the classic way:
/// start from the two-leaf edge and insert each next leaf on every edge.
pub fn all_trees(n: u32) -> BTreeMap<unets_core::CanonicalCode, PhyloNetwork> {
    assert!(n >= 2);
    let mut current: Vec<MultiGraph> = vec![{
        let mut g = MultiGraph::new();
        let a = g.add_labelled_vertex(Label(1)).unwrap();
        let b = g.add_labelled_vertex(Label(2)).unwrap();
        g.add_edge(a, b).unwrap();
        g
    }];
    for next in 3..=n {
        let mut grown = Vec::new();
        for g in &current {
            for e in g.edge_ids() {
                let (mut h, mid) = g.subdivide_edge(e).unwrap();
                let leaf = h.add_labelled_vertex(Label(next)).unwrap();
                h.add_edge(mid, leaf).unwrap();
                grown.push(h);
            }
        }
        current = grown;
    }
    current
        .into_iter()
        .map(|g| {
            let net = PhyloNetwork::validate(g).unwrap();
            (net.canonical_form(), net)
        })
        .collect()
}

/// The six-leaf tree with cherries {1,2}, {3,4}, {5,6} around a centre.
#[allow(dead_code)]
pub fn snowflake() -> PhyloNetwork {
    let mut g = MultiGraph::new();
    let centre = g.add_vertex();
    for (l1, l2) in [(1u32, 2u32), (3, 4), (5, 6)] {
        let root = g.add_vertex();
        g.add_edge(centre, root).unwrap();
        for l in [l1, l2] {
            let v = g.add_labelled_vertex(Label(l)).unwrap();
            g.add_edge(root, v).unwrap();
        }
    }
    PhyloNetwork::validate(g).unwrap()
}

fn pair_multisets(pairs: &[(usize, usize)], k: usize) -> Vec<Vec<(usize, usize)>> {
    fn rec(
        pairs: &[(usize, usize)],
        k: usize,
        start: usize,
        cur: &mut Vec<(usize, usize)>,
        out: &mut Vec<Vec<(usize, usize)>>,
    ) {
        if k == 0 {
            out.push(cur.clone());
            return;
        }
        for i in start..pairs.len() {
            cur.push(pairs[i]);
            rec(pairs, k - 1, i, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(pairs, k, 0, &mut Vec::new(), &mut out);
    out
}

fn advance(digits: &mut [usize], radix: usize) -> bool {
    for d in digits {
        *d += 1;
        if *d < radix {
            return true;
        }
        *d = 0;
    }
    false
}
