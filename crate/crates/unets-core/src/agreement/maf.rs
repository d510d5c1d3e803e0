//! Agreement forests for trees, by exhaustive edge deletion.
//!
//! Deleting d edges from each tree and tidying away the unlabelled debris
//! leaves two forests; the distance is the least d at which some pair of
//! deletion sets produces label-isomorphic forests. This is a deliberately
//! separate oracle from the agreement graph machinery, used to cross-check
//! it on tree inputs.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;

use crate::multigraph::{CanonicalCode, EdgeId, MultiGraph, VertexId};
use crate::phylo::PhyloNetwork;

use super::AgreementError;

/// Minimal deletion count producing a common forest, together with that
/// forest's components taken from the first argument's side.
pub fn maf_distance(
    a: &PhyloNetwork,
    b: &PhyloNetwork,
) -> Result<(u32, Vec<MultiGraph>), AgreementError> {
    for t in [a, b] {
        if t.tier() != 0 {
            return Err(AgreementError::NotATree { tier: t.tier() });
        }
    }
    if a.leaf_count() != b.leaf_count() {
        return Err(AgreementError::LeafSetMismatch);
    }
    let ea: Vec<EdgeId> = a.as_graph().edge_ids().collect();
    let eb: Vec<EdgeId> = b.as_graph().edge_ids().collect();
    for d in 0..=ea.len() {
        let mut seen: BTreeMap<Vec<CanonicalCode>, Vec<MultiGraph>> = BTreeMap::new();
        for del in combinations(&ea, d) {
            let forest = tidied_components(a.as_graph(), &del);
            let key = forest_key(&forest);
            seen.entry(key).or_insert(forest);
        }
        for del in combinations(&eb, d) {
            let forest = tidied_components(b.as_graph(), &del);
            if let Some(f) = seen.get(&forest_key(&forest)) {
                return Ok((d as u32, f.clone()));
            }
        }
    }
    Err(AgreementError::Uncertified)
}

fn forest_key(forest: &[MultiGraph]) -> Vec<CanonicalCode> {
    let mut key: Vec<CanonicalCode> = forest.iter().map(|c| c.canonical_form()).collect();
    key.sort();
    key
}

/// Components left after deleting `delete` and repeatedly pruning
/// unlabelled vertices of degree at most one and suppressing unlabelled
/// vertices of degree two. All-unlabelled components vanish entirely.
fn tidied_components(g: &MultiGraph, delete: &[EdgeId]) -> Vec<MultiGraph> {
    let keep: BTreeSet<EdgeId> = g.edge_ids().filter(|e| !delete.contains(e)).collect();
    let mut f = g.edge_subgraph(&keep);
    loop {
        let unlabelled =
            |f: &MultiGraph, v: VertexId| f.label(v).expect("vertex exists").is_none();
        let prunable = f
            .vertex_ids()
            .find(|&v| unlabelled(&f, v) && f.degree(v).expect("vertex exists") <= 1);
        if let Some(v) = prunable {
            let keepv: BTreeSet<VertexId> = f.vertex_ids().filter(|&u| u != v).collect();
            f = f.induced_subgraph(&keepv);
            continue;
        }
        let open = f
            .vertex_ids()
            .find(|&v| unlabelled(&f, v) && f.degree(v).expect("vertex exists") == 2);
        if let Some(v) = open {
            f = f.suppress_vertex(v).expect("forests carry no loops");
            continue;
        }
        break;
    }
    f.components().into_iter().map(|comp| f.induced_subgraph(&comp)).collect()
}

/// All d-subsets of `items` in lexicographic index order.
fn combinations(items: &[EdgeId], d: usize) -> Vec<Vec<EdgeId>> {
    let n = items.len();
    if d > n {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut idx: Vec<usize> = (0..d).collect();
    loop {
        out.push(idx.iter().map(|&i| items[i]).collect());
        let mut i = d;
        while i > 0 && idx[i - 1] == n - d + (i - 1) {
            i -= 1;
        }
        if i == 0 {
            return out;
        }
        idx[i - 1] += 1;
        for j in i..d {
            idx[j] = idx[j - 1] + 1;
        }
    }
}
