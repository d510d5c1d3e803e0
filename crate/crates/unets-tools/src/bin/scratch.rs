use std::fs;

use unets_core::agreement::{agreement_distance, meag_search};
use unets_core::phylo::improper_witness;
use unets_core::{Label, MultiGraph, PhyloNetwork, VertexId};
use unets_tools::netformat;

fn prism_minus_rung(g: &mut MultiGraph) -> (VertexId, VertexId) {
    let a = g.add_vertex();
    let b = g.add_vertex();
    let c = g.add_vertex();
    let d = g.add_vertex();
    let e = g.add_vertex();
    let f = g.add_vertex();
    for (u, v) in [(a, b), (b, c), (c, a), (d, e), (e, f), (f, d), (b, e), (c, f)] {
        g.add_edge(u, v).unwrap();
    }
    (a, d)
}

fn k33_two_subdiv(g: &mut MultiGraph) -> (VertexId, VertexId) {
    let u: Vec<_> = (0..3).map(|_| g.add_vertex()).collect();
    let w: Vec<_> = (0..3).map(|_| g.add_vertex()).collect();
    let s = g.add_vertex();
    let r = g.add_vertex();
    for i in 0..3 {
        for j in 0..3 {
            if i == j && i < 2 {
                continue;
            }
            g.add_edge(u[i], w[j]).unwrap();
        }
    }
    g.add_edge(u[0], s).unwrap();
    g.add_edge(s, w[0]).unwrap();
    g.add_edge(u[1], r).unwrap();
    g.add_edge(r, w[1]).unwrap();
    (s, r)
}

fn assemble(la: u32, lb: u32) -> PhyloNetwork {
    let mut g = MultiGraph::new();
    let (a_leaf, a_bridge) = prism_minus_rung(&mut g);
    let (b_leaf, b_bridge) = k33_two_subdiv(&mut g);
    let l1 = g.add_labelled_vertex(Label(la)).unwrap();
    let l2 = g.add_labelled_vertex(Label(lb)).unwrap();
    g.add_edge(a_bridge, b_bridge).unwrap();
    g.add_edge(a_leaf, l1).unwrap();
    g.add_edge(b_leaf, l2).unwrap();
    PhyloNetwork::validate(g).unwrap()
}

fn caterpillar_six() -> PhyloNetwork {
    let mut g = MultiGraph::new();
    let ls: Vec<_> = (1..=6)
        .map(|k| g.add_labelled_vertex(Label(k)).unwrap())
        .collect();
    let is: Vec<_> = (0..4).map(|_| g.add_vertex()).collect();
    for (u, v) in [
        (ls[0], is[0]),
        (ls[1], is[0]),
        (is[0], is[1]),
        (ls[2], is[1]),
        (is[1], is[2]),
        (ls[3], is[2]),
        (is[2], is[3]),
        (ls[4], is[3]),
        (ls[5], is[3]),
    ] {
        g.add_edge(u, v).unwrap();
    }
    PhyloNetwork::validate(g).unwrap()
}

fn display_host_six() -> PhyloNetwork {
    let mut g = MultiGraph::new();
    let ls: Vec<_> = (1..=6)
        .map(|k| g.add_labelled_vertex(Label(k)).unwrap())
        .collect();
    let is: Vec<_> = (0..4).map(|_| g.add_vertex()).collect();
    let ms: Vec<_> = (0..4).map(|_| g.add_vertex()).collect();
    for (u, v) in [
        (ls[0], is[0]),
        (ls[1], is[0]),
        (is[0], ms[0]),
        (ms[0], is[1]),
        (ls[2], is[1]),
        (is[1], ms[1]),
        (ms[1], is[2]),
        (ls[3], ms[2]),
        (ms[2], is[2]),
        (is[2], is[3]),
        (ls[4], ms[3]),
        (ms[3], is[3]),
        (ls[5], is[3]),
        (ms[0], ms[1]),
        (ms[2], ms[3]),
    ] {
        g.add_edge(u, v).unwrap();
    }
    PhyloNetwork::validate(g).unwrap()
}

const ORIG_GAP_HIGH: &str = "unets 1\nv 0 1\nv 1 2\nv 2\nv 3 3\nv 4\nv 5 4\nv 6\nv 7\ne 0 2\ne 1 7\ne 2 3\ne 2 4\ne 4 5\ne 4 6\ne 6 7\ne 6 7\n";
const ORIG_UNLAB_A: &str = "unets 1\nv 0 1\nv 1 2\nv 2\nv 3\nv 4\nv 5\nv 6\nv 7\ne 0 6\ne 1 4\ne 2 4\ne 2 5\ne 2 7\ne 3 5\ne 3 6\ne 3 7\ne 4 5\ne 6 7\n";
const ORIG_UNLAB_B: &str = "unets 1\nv 0 1\nv 1 2\nv 2\nv 3\nv 4\nv 5\nv 6\nv 7\ne 0 5\ne 1 4\ne 2 3\ne 2 3\ne 2 4\ne 3 5\ne 4 7\ne 5 6\ne 6 7\ne 6 7\n";
const ORIG_SPROUT_LOW: &str = "unets 1\nv 0 1\nv 1 2\nv 2\nv 3 3\nv 4\nv 5 4\ne 0 4\ne 1 2\ne 2 3\ne 2 4\ne 4 5\n";
const ORIG_SPROUT_HIGH: &str = "unets 1\nv 0 1\nv 1 2\nv 2\nv 3 3\nv 4\nv 5 4\nv 6\nv 7\ne 0 6\ne 1 7\ne 2 3\ne 2 4\ne 2 6\ne 4 5\ne 4 7\ne 6 7\n";

fn load(name: &str) -> MultiGraph {
    let path = format!("crates/unets-tools/fixtures/{name}.unets");
    netformat::parse(&fs::read_to_string(&path).unwrap_or_else(|e| panic!("{path}: {e}"))).unwrap()
}

fn load_net(name: &str) -> PhyloNetwork {
    PhyloNetwork::validate(load(name)).unwrap()
}

fn main() {
    let sa = load_net("swap_pair_a");
    let sb = load_net("swap_pair_b");
    assert_eq!(sa.canonical_form(), assemble(1, 2).canonical_form());
    assert_eq!(sb.canonical_form(), assemble(2, 1).canonical_form());
    println!("swap pair ok");

    let t = load_net("tree_six");
    assert_eq!(t.canonical_form(), caterpillar_six().canonical_form());
    let host = load_net("display_host");
    assert_eq!(host.canonical_form(), display_host_six().canonical_form());
    assert_eq!(host.tier(), 2);
    assert!(host.displays(&t));
    let m = load("improper_pendant");
    assert!(PhyloNetwork::validate(m.clone()).is_err());
    let w = improper_witness(&m).expect("witness");
    assert_eq!(m.endpoints(w).unwrap(), (VertexId(10), VertexId(11)));
    println!("six-leaf trio ok");

    let low = load_net("gap_pair_low");
    let high = load_net("gap_pair_high");
    assert_eq!(
        high.canonical_form(),
        PhyloNetwork::validate(netformat::parse(ORIG_GAP_HIGH).unwrap())
            .unwrap()
            .canonical_form()
    );
    assert_eq!((low.tier(), high.tier()), (0, 1));
    let ad = agreement_distance(&low, &high).unwrap();
    assert_eq!(ad.distance, 2);
    assert_eq!(ad.into_a.disagreement_usage(), 1);
    assert_eq!(ad.into_b.disagreement_usage(), 2);
    assert!(!high.displays(&low));
    println!("gap pair ok");

    let ua = load_net("unlabelled_pair_a");
    let ub = load_net("unlabelled_pair_b");
    assert_eq!(
        ua.canonical_form(),
        PhyloNetwork::validate(netformat::parse(ORIG_UNLAB_A).unwrap())
            .unwrap()
            .canonical_form()
    );
    assert_eq!(
        ub.canonical_form(),
        PhyloNetwork::validate(netformat::parse(ORIG_UNLAB_B).unwrap())
            .unwrap()
            .canonical_form()
    );
    assert_eq!((ua.tier(), ub.tier()), (3, 3));
    let ad = agreement_distance(&ua, &ub).unwrap();
    assert_eq!(ad.distance, 2);
    assert!(ad
        .graph
        .subgraphs
        .iter()
        .any(|s| s.labelled_vertices().is_empty()));
    println!("unlabelled pair ok");

    let slow = load_net("sprout_pair_low");
    let shigh = load_net("sprout_pair_high");
    assert_eq!(
        slow.canonical_form(),
        PhyloNetwork::validate(netformat::parse(ORIG_SPROUT_LOW).unwrap())
            .unwrap()
            .canonical_form()
    );
    assert_eq!(
        shigh.canonical_form(),
        PhyloNetwork::validate(netformat::parse(ORIG_SPROUT_HIGH).unwrap())
            .unwrap()
            .canonical_form()
    );
    let (d, h) = meag_search(&slow, &shigh, 10_000_000).unwrap();
    assert_eq!(d, 2);
    assert_eq!(h.sprout_tally(), 1);
    assert_eq!(h.disagreement_count, 1);
    println!("sprout pair ok");
}
