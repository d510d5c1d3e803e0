//! Sprouted agreement graphs across a tier gap.
//!
//! Between hosts of tiers r and r + l the graph carries exactly l
//! disagreement edges, but its subgraphs may keep sprouts: a detached edge
//! end whose image stays put as an attachment point. The distance is the
//! sprout count plus the gap. [`meag_search`] enumerates detachments on
//! both hosts, deepening on the sprout count; [`endpoint_agreement_distance`]
//! is the independent route to the same number through replug search.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;

use crate::multigraph::{CanonicalCode, EdgeId, MultiGraph, VertexId};
use crate::phylo::PhyloNetwork;
use crate::search::{replug_distance, SearchConfig, SearchError};

use super::decompose::{
    align_images, decomposition_for_mask, suppressed_components, MaskScan,
};
use super::embedding::{check_agreement_embedding, verify_embedding, AgreementEmbedding, TrailImage};
use super::{AgreementError, AgreementGraph, AgreementMode};

/// Replug distance as a plain count; equals the sprouted agreement
/// distance and serves as its cross-check.
pub fn endpoint_agreement_distance(
    a: &PhyloNetwork,
    b: &PhyloNetwork,
    cfg: &SearchConfig,
) -> Result<u32, SearchError> {
    replug_distance(a, b, cfg).map(|r| r.distance)
}

/// Finds a minimal sprouted agreement graph by exhaustive detachment
/// enumeration, certified on both hosts. `budget` caps the number of
/// candidates examined.
pub fn meag_search(
    a: &PhyloNetwork,
    b: &PhyloNetwork,
    budget: u64,
) -> Result<(u32, AgreementGraph), AgreementError> {
    if a.leaf_count() != b.leaf_count() {
        return Err(AgreementError::LeafSetMismatch);
    }
    let (lo, hi) = if b.tier() < a.tier() { (b, a) } else { (a, b) };
    let gap = hi.tier() - lo.tier();
    let scan_hi = MaskScan::new(hi)?;
    let no_red: BTreeSet<EdgeId> = BTreeSet::new();
    let hi_bases: Vec<(BTreeSet<EdgeId>, Vec<TrailImage>)> = scan_hi
        .bucket(gap)
        .iter()
        .filter_map(|&m| decomposition_for_mask(hi, &scan_hi, m).map(|d| (d.red, d.trails)))
        .collect();
    let lo_slots = detach_slots(lo.as_graph(), &no_red);
    let mut explored: u64 = 0;
    let spend = |explored: &mut u64| -> Result<(), AgreementError> {
        *explored += 1;
        if *explored > budget {
            return Err(AgreementError::BudgetExhausted { explored: *explored });
        }
        Ok(())
    };
    for sprouts in 0..=lo_slots.len() {
        let mut groups: BTreeMap<Vec<CanonicalCode>, Vec<BTreeSet<(VertexId, EdgeId)>>> =
            BTreeMap::new();
        for detach in detach_sets(&lo_slots, sprouts) {
            spend(&mut explored)?;
            let comps = suppressed_components(lo.as_graph(), &no_red, &detach);
            let mut key: Vec<CanonicalCode> =
                comps.iter().map(|c| c.graph.canonical_form()).collect();
            key.sort();
            groups.entry(key).or_default().push(detach);
        }
        for (red, trails) in &hi_bases {
            let slots = detach_slots(hi.as_graph(), red);
            for hi_detach in detach_sets(&slots, sprouts) {
                spend(&mut explored)?;
                let hi_comps = suppressed_components(hi.as_graph(), red, &hi_detach);
                let mut key: Vec<CanonicalCode> =
                    hi_comps.iter().map(|c| c.graph.canonical_form()).collect();
                key.sort();
                let Some(lo_list) = groups.get(&key) else {
                    continue;
                };
                for lo_detach in lo_list {
                    spend(&mut explored)?;
                    if let Some(g) =
                        certify(lo, hi, lo_detach, red, &hi_detach, trails, gap)
                    {
                        return Ok((sprouts as u32 + gap, g));
                    }
                }
            }
        }
    }
    Err(AgreementError::Uncertified)
}

/// Admissible detachment points: one of the three ends at an unlabelled
/// vertex of full black degree, or the pendant end at a leaf whose edge is
/// black. Subdivision vertices of black paths are never detachment points.
fn detach_slots(h: &MultiGraph, red: &BTreeSet<EdgeId>) -> Vec<(VertexId, EdgeId)> {
    let mut out = Vec::new();
    for v in h.vertex_ids() {
        let black: Vec<EdgeId> = h
            .incident_edges(v)
            .expect("vertex exists")
            .iter()
            .copied()
            .filter(|e| !red.contains(e))
            .collect();
        let labelled = h.label(v).expect("vertex exists").is_some();
        if labelled && black.len() == 1 {
            out.push((v, black[0]));
        } else if !labelled && black.len() == 3 && h.degree(v).expect("vertex exists") == 3 {
            for e in black {
                out.push((v, e));
            }
        }
    }
    out
}

/// All detachment sets of the given size, at most one per vertex, in
/// lexicographic slot order.
fn detach_sets(slots: &[(VertexId, EdgeId)], size: usize) -> Vec<BTreeSet<(VertexId, EdgeId)>> {
    let mut out = Vec::new();
    let mut current: Vec<usize> = Vec::new();
    pick(slots, size, 0, &mut current, &mut out);
    out
}

fn pick(
    slots: &[(VertexId, EdgeId)],
    size: usize,
    from: usize,
    current: &mut Vec<usize>,
    out: &mut Vec<BTreeSet<(VertexId, EdgeId)>>,
) {
    if current.len() == size {
        out.push(current.iter().map(|&i| slots[i]).collect());
        return;
    }
    for i in from..slots.len() {
        if current.iter().any(|&j| slots[j].0 == slots[i].0) {
            continue;
        }
        current.push(i);
        pick(slots, size, i + 1, current, out);
        current.pop();
    }
}

/// Builds the graph from the lower side, aligns the higher images, and
/// certifies both embeddings independently.
fn certify(
    lo: &PhyloNetwork,
    hi: &PhyloNetwork,
    lo_detach: &BTreeSet<(VertexId, EdgeId)>,
    red: &BTreeSet<EdgeId>,
    hi_detach: &BTreeSet<(VertexId, EdgeId)>,
    trails: &[TrailImage],
    gap: u32,
) -> Option<AgreementGraph> {
    let no_red = BTreeSet::new();
    let lo_comps = suppressed_components(lo.as_graph(), &no_red, lo_detach);
    let graph = AgreementGraph {
        subgraphs: lo_comps.iter().map(|c| c.graph.clone()).collect(),
        disagreement_count: gap,
        mode: AgreementMode::Meag,
    };
    graph.validate(lo.leaf_count()).ok()?;
    let into_lo = AgreementEmbedding {
        components: align_images(&graph.subgraphs, &lo_comps)?,
        trails: Vec::new(),
    };
    let hi_comps = suppressed_components(hi.as_graph(), red, hi_detach);
    let into_hi = AgreementEmbedding {
        components: align_images(&graph.subgraphs, &hi_comps)?,
        trails: trails.to_vec(),
    };
    verify_embedding(&graph, lo, &into_lo).ok()?;
    verify_embedding(&graph, hi, &into_hi).ok()?;
    check_agreement_embedding(&graph, lo, 0).ok().flatten()?;
    check_agreement_embedding(&graph, hi, gap as usize).ok().flatten()?;
    Some(graph)
}
