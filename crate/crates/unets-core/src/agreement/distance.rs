//! Minimal agreement distance between two networks on one leaf set.
//!
//! The engine deepens on the disagreement edge count k, starting at the
//! tier gap. For each k it decomposes both hosts with the matching trail
//! counts (k minus the gap on the lower host, k on the higher), groups the
//! decompositions by the multiset of suppressed component codes, and for
//! every cross pair in a shared group rebuilds the higher images in the
//! lower components' coordinates through label-preserving isomorphisms.
//! A pair is accepted only after the independent certifier re-finds an
//! embedding on both hosts.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::multigraph::CanonicalCode;
use crate::phylo::PhyloNetwork;

use super::decompose::{align_images, decomposition_for_mask, MaskScan, RedBlackDecomposition};
use super::embedding::{
    check_agreement_embedding, find_label_iso, verify_embedding, AgreementEmbedding,
    ComponentImage,
};
use super::{AgreementError, AgreementGraph, AgreementMode};

/// A certified agreement distance with its witnesses.
#[derive(Clone, Debug)]
pub struct AdResult {
    /// The distance: the minimal disagreement edge count.
    pub distance: u32,
    /// The minimal agreement graph, components in lower-host order.
    pub graph: AgreementGraph,
    /// Embedding of the graph into the first argument.
    pub into_a: AgreementEmbedding,
    /// Embedding of the graph into the second argument.
    pub into_b: AgreementEmbedding,
}

/// Computes the agreement distance between two networks sharing a leaf
/// set, with embeddings certifying both directions.
pub fn agreement_distance(
    a: &PhyloNetwork,
    b: &PhyloNetwork,
) -> Result<AdResult, AgreementError> {
    if a.leaf_count() != b.leaf_count() {
        return Err(AgreementError::LeafSetMismatch);
    }
    let swapped = b.tier() < a.tier();
    let (lo, hi) = if swapped { (b, a) } else { (a, b) };
    let gap = hi.tier() - lo.tier();
    if gap == 0 && lo.canonical_form() == hi.canonical_form() {
        let (graph, into_lo, into_hi) = identity_result(lo, hi)?;
        return Ok(assemble(0, graph, into_lo, into_hi, swapped));
    }
    let scan_lo = MaskScan::new(lo)?;
    let scan_hi = MaskScan::new(hi)?;
    for k in gap.max(1)..=scan_hi.max_trails() {
        let lo_groups = grouped(lo, &scan_lo, k - gap);
        let hi_groups = grouped(hi, &scan_hi, k);
        for (key, lo_masks) in &lo_groups {
            let Some(hi_masks) = hi_groups.get(key) else {
                continue;
            };
            for &lm in lo_masks {
                let d_lo =
                    decomposition_for_mask(lo, &scan_lo, lm).expect("grouped mask decomposes");
                for &hm in hi_masks {
                    let d_hi =
                        decomposition_for_mask(hi, &scan_hi, hm).expect("grouped mask decomposes");
                    if let Some((graph, into_lo, into_hi)) = certify_pair(lo, hi, &d_lo, &d_hi, k)
                    {
                        return Ok(assemble(k, graph, into_lo, into_hi, swapped));
                    }
                }
            }
        }
    }
    Err(AgreementError::Uncertified)
}

fn assemble(
    distance: u32,
    graph: AgreementGraph,
    into_lo: AgreementEmbedding,
    into_hi: AgreementEmbedding,
    swapped: bool,
) -> AdResult {
    let (into_a, into_b) = if swapped { (into_hi, into_lo) } else { (into_lo, into_hi) };
    AdResult { distance, graph, into_a, into_b }
}

/// Equal networks agree through their whole graph and no disagreement
/// edges; the second embedding goes through an isomorphism.
fn identity_result(
    lo: &PhyloNetwork,
    hi: &PhyloNetwork,
) -> Result<(AgreementGraph, AgreementEmbedding, AgreementEmbedding), AgreementError> {
    let whole = lo.as_graph().clone();
    let graph = AgreementGraph {
        subgraphs: alloc::vec![whole.clone()],
        disagreement_count: 0,
        mode: AgreementMode::Mag,
    };
    graph.validate(lo.leaf_count())?;
    let into_lo = AgreementEmbedding {
        components: alloc::vec![ComponentImage {
            vertex_images: whole.vertex_ids().map(|v| (v, v)).collect(),
            edge_images: whole.edge_ids().map(|e| (e, alloc::vec![e])).collect(),
        }],
        trails: Vec::new(),
    };
    let (vmap, emap) =
        find_label_iso(&whole, hi.as_graph()).ok_or(AgreementError::Uncertified)?;
    let into_hi = AgreementEmbedding {
        components: alloc::vec![ComponentImage {
            vertex_images: vmap,
            edge_images: emap.into_iter().map(|(e, f)| (e, alloc::vec![f])).collect(),
        }],
        trails: Vec::new(),
    };
    verify_embedding(&graph, lo, &into_lo)?;
    verify_embedding(&graph, hi, &into_hi)?;
    if check_agreement_embedding(&graph, lo, 0)?.is_none()
        || check_agreement_embedding(&graph, hi, 0)?.is_none()
    {
        return Err(AgreementError::Uncertified);
    }
    Ok((graph, into_lo, into_hi))
}

/// Viable masks with `trails` trails, grouped by the sorted multiset of
/// suppressed component codes. Masks keep their (cardinality, value) order
/// within each group.
fn grouped(
    host: &PhyloNetwork,
    scan: &MaskScan,
    trails: u32,
) -> BTreeMap<Vec<CanonicalCode>, Vec<u64>> {
    let mut out: BTreeMap<Vec<CanonicalCode>, Vec<u64>> = BTreeMap::new();
    for &mask in scan.bucket(trails) {
        if let Some(d) = decomposition_for_mask(host, scan, mask) {
            let mut codes: Vec<CanonicalCode> =
                d.components.iter().map(|c| c.graph.canonical_form()).collect();
            codes.sort();
            out.entry(codes).or_default().push(mask);
        }
    }
    out
}

/// Tries to certify one decomposition pair as a shared agreement graph
/// with k disagreement edges. The graph is taken from the lower side; the
/// higher images are rewritten through per-component isomorphisms. Both
/// directions must pass the independent certifier.
fn certify_pair(
    lo: &PhyloNetwork,
    hi: &PhyloNetwork,
    d_lo: &RedBlackDecomposition,
    d_hi: &RedBlackDecomposition,
    k: u32,
) -> Option<(AgreementGraph, AgreementEmbedding, AgreementEmbedding)> {
    let graph = AgreementGraph {
        subgraphs: d_lo.components.iter().map(|c| c.graph.clone()).collect(),
        disagreement_count: k,
        mode: AgreementMode::Mag,
    };
    graph.validate(lo.leaf_count()).ok()?;
    let into_lo = AgreementEmbedding {
        components: d_lo
            .components
            .iter()
            .map(|c| ComponentImage {
                vertex_images: c.vertex_images.clone(),
                edge_images: c.edge_images.clone(),
            })
            .collect(),
        trails: d_lo.trails.clone(),
    };
    let into_hi = AgreementEmbedding {
        components: align_images(&graph.subgraphs, &d_hi.components)?,
        trails: d_hi.trails.clone(),
    };
    verify_embedding(&graph, lo, &into_lo).ok()?;
    verify_embedding(&graph, hi, &into_hi).ok()?;
    check_agreement_embedding(&graph, lo, into_lo.trails.len()).ok().flatten()?;
    check_agreement_embedding(&graph, hi, k as usize).ok().flatten()?;
    Some((graph, into_lo, into_hi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::multigraph::{Label, MultiGraph};

    fn quartet(split_partner: u32) -> PhyloNetwork {
        // Leaf 1 cherries with `split_partner`; the other two share v.
        let mut g = MultiGraph::new();
        let mut leaves = BTreeMap::new();
        for l in 1..=4 {
            leaves.insert(l, g.add_labelled_vertex(Label(l)).unwrap());
        }
        let u = g.add_vertex();
        let v = g.add_vertex();
        g.add_edge(leaves[&1], u).unwrap();
        g.add_edge(leaves[&split_partner], u).unwrap();
        g.add_edge(u, v).unwrap();
        for l in 2..=4 {
            if l != split_partner {
                g.add_edge(v, leaves[&l]).unwrap();
            }
        }
        PhyloNetwork::validate(g).unwrap()
    }

    fn quartet_with_parallel_pair() -> PhyloNetwork {
        let mut g = MultiGraph::new();
        let la = g.add_labelled_vertex(Label(1)).unwrap();
        let lb = g.add_labelled_vertex(Label(2)).unwrap();
        let lc = g.add_labelled_vertex(Label(3)).unwrap();
        let ld = g.add_labelled_vertex(Label(4)).unwrap();
        let u = g.add_vertex();
        let x = g.add_vertex();
        let y = g.add_vertex();
        let v = g.add_vertex();
        g.add_edge(la, u).unwrap();
        g.add_edge(lb, u).unwrap();
        g.add_edge(u, x).unwrap();
        g.add_edge(x, y).unwrap();
        g.add_edge(x, y).unwrap();
        g.add_edge(y, v).unwrap();
        g.add_edge(v, lc).unwrap();
        g.add_edge(v, ld).unwrap();
        PhyloNetwork::validate(g).unwrap()
    }

    #[test]
    fn identical_networks_are_at_distance_zero() {
        let t = quartet(2);
        let r = agreement_distance(&t, &t).unwrap();
        assert_eq!(r.distance, 0);
        assert_eq!(r.graph.subgraphs.len(), 1);
        assert_eq!(r.graph.disagreement_count, 0);
        verify_embedding(&r.graph, &t, &r.into_a).unwrap();
        verify_embedding(&r.graph, &t, &r.into_b).unwrap();
    }

    #[test]
    fn conflicting_quartets_are_at_distance_one() {
        let s = quartet(2);
        let t = quartet(3);
        let r = agreement_distance(&s, &t).unwrap();
        assert_eq!(r.distance, 1);
        assert_eq!(r.graph.subgraphs.len(), 2);
        verify_embedding(&r.graph, &s, &r.into_a).unwrap();
        verify_embedding(&r.graph, &t, &r.into_b).unwrap();
        assert_eq!(r.into_a.trails.len(), 1);
        assert_eq!(r.into_b.trails.len(), 1);
    }

    #[test]
    fn tier_gap_to_a_displayed_tree_is_the_gap() {
        let tree = quartet(2);
        let net = quartet_with_parallel_pair();
        let r = agreement_distance(&tree, &net).unwrap();
        assert_eq!(r.distance, 1);
        assert_eq!(r.graph.subgraphs.len(), 1);
        assert_eq!(r.into_a.trails.len(), 0);
        assert_eq!(r.into_b.trails.len(), 1);
        verify_embedding(&r.graph, &tree, &r.into_a).unwrap();
        verify_embedding(&r.graph, &net, &r.into_b).unwrap();
    }

    #[test]
    fn argument_order_does_not_change_the_distance() {
        let tree = quartet(2);
        let net = quartet_with_parallel_pair();
        let r = agreement_distance(&net, &tree).unwrap();
        assert_eq!(r.distance, 1);
        assert_eq!(r.into_a.trails.len(), 1);
        assert_eq!(r.into_b.trails.len(), 0);
        verify_embedding(&r.graph, &net, &r.into_a).unwrap();
        verify_embedding(&r.graph, &tree, &r.into_b).unwrap();
    }

    #[test]
    fn different_leaf_counts_are_rejected() {
        let mut g = MultiGraph::new();
        let l1 = g.add_labelled_vertex(Label(1)).unwrap();
        let l2 = g.add_labelled_vertex(Label(2)).unwrap();
        g.add_edge(l1, l2).unwrap();
        let two = PhyloNetwork::validate(g).unwrap();
        assert_eq!(
            agreement_distance(&two, &quartet(2)).unwrap_err(),
            AgreementError::LeafSetMismatch
        );
    }
}
