//! Realizing a certified agreement witness as a TBR walk.
//!
//! The walk runs from the first host to the second through their common
//! refinement: one edge addition per disagreement trail of the target
//! side, then one edge removal per trail of the source side in reverse
//! order. Each addition subdivides at the attachment points the target
//! embedding dictates, keeping earlier attachments on the same image in
//! their relative order; by the time a source trail is removed, every
//! later trail attached inside it is gone and it has contracted to a
//! single removable edge. The move count is the total trail count of the
//! two embeddings, at most twice the distance.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;

use crate::multigraph::{EdgeId, Label, MultiGraph, VertexId};
use crate::phylo::PhyloNetwork;
use crate::rearrange::{Move, RearrangementSequence};

use super::distance::AdResult;
use super::embedding::{path_vertices, verify_embedding, AgreementEmbedding};
use super::ordered::ordered_embedding;
use super::{AgreementError, AgreementGraph, AgreementMode};

/// Builds a replayable TBR sequence from `a` to `b` out of a certified
/// agreement witness between them.
pub fn mag_to_tbr_sequence(
    a: &PhyloNetwork,
    b: &PhyloNetwork,
    witness: &AdResult,
) -> Result<RearrangementSequence, AgreementError> {
    if witness.graph.mode != AgreementMode::Mag {
        return Err(AgreementError::Malformed(
            "sequence construction needs a sprout-free agreement graph",
        ));
    }
    verify_embedding(&witness.graph, a, &witness.into_a)
        .map_err(|_| AgreementError::Uncertified)?;
    verify_embedding(&witness.graph, b, &witness.into_b)
        .map_err(|_| AgreementError::Uncertified)?;
    let graph = &witness.graph;
    let into_a = ordered_embedding(graph, a, &witness.into_a)?;
    let into_b = ordered_embedding(graph, b, &witness.into_b)?;
    debug_assert_eq!(
        a.tier() + into_b.trails.len() as u32,
        b.tier() + into_a.trails.len() as u32,
    );

    let mut anchors = Vec::new();
    for (j, trail) in into_b.trails.iter().enumerate() {
        anchors.push((
            classify(b, graph, &into_b, j, trail.ends.0)?,
            classify(b, graph, &into_b, j, trail.ends.1)?,
        ));
    }

    let mut arena = Arena::new();
    let mut comp_tracks: BTreeMap<(usize, EdgeId), usize> = BTreeMap::new();
    for (ci, img) in into_a.components.iter().enumerate() {
        for (&ge, path) in &img.edge_images {
            let (x, _) = graph.subgraphs[ci]
                .endpoints(ge)
                .map_err(|_| AgreementError::ConstructionFailed)?;
            let from = img.vertex_images[&x];
            let verts =
                path_vertices(a.as_graph(), from, path).ok_or(AgreementError::ConstructionFailed)?;
            comp_tracks.insert((ci, ge), arena.register(path.clone(), verts));
        }
    }
    let mut source_tracks = Vec::new();
    for trail in &into_a.trails {
        let verts = path_vertices(a.as_graph(), trail.ends.0, &trail.edges)
            .ok_or(AgreementError::ConstructionFailed)?;
        source_tracks.push(arena.register(trail.edges.clone(), verts));
    }

    let mut cur = a.as_graph().clone();
    let mut moves = Vec::new();
    let mut blue_tracks: Vec<usize> = Vec::new();
    for (first_anchor, second_anchor) in &anchors {
        let (first, r0) = resolve(&arena, &cur, first_anchor, &comp_tracks, &blue_tracks)?;
        let (g1, x0, lo0, hi0, small0) = subdivide_known(&cur, first)?;
        arena.subdivide(first, lo0, hi0, x0, small0, r0)?;
        let (second, r1) = resolve(&arena, &g1, second_anchor, &comp_tracks, &blue_tracks)?;
        let (mut g2, x1, lo1, hi1, small1) = subdivide_known(&g1, second)?;
        arena.subdivide(second, lo1, hi1, x1, small1, r1)?;
        let blue = g2
            .add_edge(x0, x1)
            .map_err(|_| AgreementError::ConstructionFailed)?;
        blue_tracks.push(arena.register(alloc::vec![blue], alloc::vec![x0, x1]));
        moves.push(Move::TbrPlus { first, second });
        cur = g2;
    }

    for &t in source_tracks.iter().rev() {
        let candidates: Vec<EdgeId> = arena.tracks[t]
            .path
            .iter()
            .copied()
            .filter(|&e| {
                let (p, q) = cur.endpoints(e).expect("tracked edge exists");
                let unlabelled =
                    |v: VertexId| cur.label(v).expect("endpoint exists").is_none();
                unlabelled(p) && unlabelled(q)
            })
            .collect();
        let &[removed] = candidates.as_slice() else {
            return Err(AgreementError::ConstructionFailed);
        };
        arena.split_out(t, removed)?;
        let (next, merges) = remove_known(&cur, removed)?;
        for (v, e1, e2, fresh) in merges {
            arena.merge(v, e1, e2, fresh)?;
        }
        moves.push(Move::TbrMinus { removed });
        cur = next;
    }

    let seq = RearrangementSequence {
        start: a.clone(),
        end: b.clone(),
        moves,
    };
    seq.replay().map_err(|_| AgreementError::ConstructionFailed)?;
    Ok(seq)
}

// ── Attachment anchors on the target side ────────────────────────────────

/// Where one target-side trail end sits: on a labelled singleton, at the
/// rank-th interior vertex of a component edge image, or at the rank-th
/// interior vertex of an earlier target trail.
enum Anchor {
    Singleton(Label),
    Comp { comp: usize, edge: EdgeId, rank: usize },
    Blue { trail: usize, rank: usize },
}

fn classify(
    host: &PhyloNetwork,
    graph: &AgreementGraph,
    emb: &AgreementEmbedding,
    trail: usize,
    w: VertexId,
) -> Result<Anchor, AgreementError> {
    let h = host.as_graph();
    if let Some(label) = h.label(w).map_err(|_| AgreementError::ConstructionFailed)? {
        return Ok(Anchor::Singleton(label));
    }
    for (ci, img) in emb.components.iter().enumerate() {
        for (&ge, path) in &img.edge_images {
            let (x, _) = graph.subgraphs[ci]
                .endpoints(ge)
                .map_err(|_| AgreementError::ConstructionFailed)?;
            let from = img.vertex_images[&x];
            let vs = path_vertices(h, from, path).ok_or(AgreementError::ConstructionFailed)?;
            if let Some(p) = vs[1..vs.len() - 1].iter().position(|&v| v == w) {
                return Ok(Anchor::Comp {
                    comp: ci,
                    edge: ge,
                    rank: p + 1,
                });
            }
        }
    }
    for (j, t) in emb.trails.iter().enumerate().take(trail) {
        let vs = path_vertices(h, t.ends.0, &t.edges).ok_or(AgreementError::ConstructionFailed)?;
        if let Some(p) = vs[1..vs.len() - 1].iter().position(|&v| v == w) {
            return Ok(Anchor::Blue { trail: j, rank: p + 1 });
        }
    }
    Err(AgreementError::ConstructionFailed)
}

/// Picks the current edge to subdivide for an anchor, together with the
/// rank the new vertex will carry on its track.
fn resolve(
    arena: &Arena,
    cur: &MultiGraph,
    anchor: &Anchor,
    comp_tracks: &BTreeMap<(usize, EdgeId), usize>,
    blue_tracks: &[usize],
) -> Result<(EdgeId, Option<usize>), AgreementError> {
    match *anchor {
        Anchor::Singleton(label) => {
            let v = cur
                .vertex_with_label(label)
                .ok_or(AgreementError::ConstructionFailed)?;
            let inc = cur
                .incident_edges(v)
                .map_err(|_| AgreementError::ConstructionFailed)?;
            let &[e] = inc else {
                return Err(AgreementError::ConstructionFailed);
            };
            Ok((e, None))
        }
        Anchor::Comp { comp, edge, rank } => {
            let t = *comp_tracks
                .get(&(comp, edge))
                .ok_or(AgreementError::ConstructionFailed)?;
            Ok((arena.window_edge(t, rank)?, Some(rank)))
        }
        Anchor::Blue { trail, rank } => {
            let t = *blue_tracks
                .get(trail)
                .ok_or(AgreementError::ConstructionFailed)?;
            Ok((arena.window_edge(t, rank)?, Some(rank)))
        }
    }
}

// ── Track arena over the evolving graph ──────────────────────────────────

/// One tracked image path in the current graph. `verts` runs alongside
/// `path` (one vertex more); `ranks` marks interior vertices inserted for
/// target-side anchors, increasing along the path.
struct Tr {
    path: Vec<EdgeId>,
    verts: Vec<VertexId>,
    ranks: Vec<Option<usize>>,
}

impl Tr {
    fn hollow() -> Tr {
        Tr {
            path: Vec::new(),
            verts: Vec::new(),
            ranks: Vec::new(),
        }
    }

    fn reverse(&mut self) {
        self.path.reverse();
        self.verts.reverse();
        self.ranks.reverse();
    }
}

struct Arena {
    tracks: Vec<Tr>,
    by_edge: BTreeMap<EdgeId, usize>,
}

impl Arena {
    fn new() -> Arena {
        Arena {
            tracks: Vec::new(),
            by_edge: BTreeMap::new(),
        }
    }

    fn register(&mut self, path: Vec<EdgeId>, verts: Vec<VertexId>) -> usize {
        debug_assert_eq!(verts.len(), path.len() + 1);
        let idx = self.tracks.len();
        for &e in &path {
            self.by_edge.insert(e, idx);
        }
        let ranks = alloc::vec![None; verts.len()];
        self.tracks.push(Tr { path, verts, ranks });
        idx
    }

    /// First edge of the open window where an anchor of this rank may be
    /// inserted: after the last present smaller rank, before the first
    /// present larger one.
    fn window_edge(&self, t: usize, rank: usize) -> Result<EdgeId, AgreementError> {
        let tr = &self.tracks[t];
        let mut lo = 0;
        let mut hi = tr.verts.len() - 1;
        for (i, r) in tr.ranks.iter().enumerate() {
            match *r {
                Some(rv) if rv < rank => lo = i,
                Some(rv) if rv > rank => {
                    hi = i;
                    break;
                }
                Some(_) => return Err(AgreementError::ConstructionFailed),
                None => {}
            }
        }
        if lo >= hi {
            return Err(AgreementError::ConstructionFailed);
        }
        Ok(tr.path[lo])
    }

    /// Replaces `e` by its subdivision halves; `small` is the original
    /// endpoint the lower-id half keeps.
    fn subdivide(
        &mut self,
        e: EdgeId,
        half_small: EdgeId,
        half_large: EdgeId,
        x: VertexId,
        small: VertexId,
        rank: Option<usize>,
    ) -> Result<(), AgreementError> {
        let t = self
            .by_edge
            .remove(&e)
            .ok_or(AgreementError::ConstructionFailed)?;
        let tr = &mut self.tracks[t];
        let p = tr
            .path
            .iter()
            .position(|&f| f == e)
            .ok_or(AgreementError::ConstructionFailed)?;
        let pair = if tr.verts[p] == small {
            [half_small, half_large]
        } else {
            [half_large, half_small]
        };
        tr.path.splice(p..=p, pair);
        tr.verts.insert(p + 1, x);
        tr.ranks.insert(p + 1, rank);
        self.by_edge.insert(half_small, t);
        self.by_edge.insert(half_large, t);
        Ok(())
    }

    /// Removes `e` from track `t`, leaving any split-off remainder as its
    /// own track.
    fn split_out(&mut self, t: usize, e: EdgeId) -> Result<(), AgreementError> {
        if self.by_edge.remove(&e) != Some(t) {
            return Err(AgreementError::ConstructionFailed);
        }
        let tr = &mut self.tracks[t];
        let p = tr
            .path
            .iter()
            .position(|&f| f == e)
            .ok_or(AgreementError::ConstructionFailed)?;
        let right_path = tr.path.split_off(p + 1);
        tr.path.pop();
        let right_verts = tr.verts.split_off(p + 1);
        let right_ranks = tr.ranks.split_off(p + 1);
        if !right_path.is_empty() {
            let idx = self.tracks.len();
            for &f in &right_path {
                self.by_edge.insert(f, idx);
            }
            self.tracks.push(Tr {
                path: right_path,
                verts: right_verts,
                ranks: right_ranks,
            });
        }
        Ok(())
    }

    /// Applies one suppression: `e1` and `e2` met at `v` and were replaced
    /// by `fresh`. Within one track this splices the path; across tracks
    /// it concatenates them through `v`.
    fn merge(
        &mut self,
        v: VertexId,
        e1: EdgeId,
        e2: EdgeId,
        fresh: EdgeId,
    ) -> Result<(), AgreementError> {
        let t1 = self
            .by_edge
            .remove(&e1)
            .ok_or(AgreementError::ConstructionFailed)?;
        let t2 = self
            .by_edge
            .remove(&e2)
            .ok_or(AgreementError::ConstructionFailed)?;
        if t1 == t2 {
            let tr = &mut self.tracks[t1];
            let p1 = tr
                .path
                .iter()
                .position(|&f| f == e1)
                .ok_or(AgreementError::ConstructionFailed)?;
            let p2 = tr
                .path
                .iter()
                .position(|&f| f == e2)
                .ok_or(AgreementError::ConstructionFailed)?;
            let (lo, hi) = if p1 < p2 { (p1, p2) } else { (p2, p1) };
            if hi != lo + 1 || tr.verts[hi] != v {
                return Err(AgreementError::ConstructionFailed);
            }
            tr.path.splice(lo..=hi, [fresh]);
            tr.verts.remove(hi);
            tr.ranks.remove(hi);
            self.by_edge.insert(fresh, t1);
        } else {
            let mut side = core::mem::replace(&mut self.tracks[t2], Tr::hollow());
            if side.verts.last() == Some(&v) {
                side.reverse();
            }
            if side.verts.first() != Some(&v) || side.path.first() != Some(&e2) {
                return Err(AgreementError::ConstructionFailed);
            }
            for &f in side.path.iter().skip(1) {
                self.by_edge.insert(f, t1);
            }
            self.by_edge.insert(fresh, t1);
            let tr = &mut self.tracks[t1];
            if tr.verts.first() == Some(&v) {
                tr.reverse();
            }
            if tr.verts.last() != Some(&v) || tr.path.last() != Some(&e1) {
                return Err(AgreementError::ConstructionFailed);
            }
            tr.path.pop();
            tr.verts.pop();
            tr.ranks.pop();
            tr.path.push(fresh);
            tr.path.extend(side.path.into_iter().skip(1));
            tr.verts.extend(side.verts.into_iter().skip(1));
            tr.ranks.extend(side.ranks.into_iter().skip(1));
        }
        Ok(())
    }
}

// ── Mirrored suboperations with known identifiers ────────────────────────

/// Subdivides `e`, reporting the fresh vertex, both halves in id order,
/// and the original endpoint the lower half keeps.
fn subdivide_known(
    g: &MultiGraph,
    e: EdgeId,
) -> Result<(MultiGraph, VertexId, EdgeId, EdgeId, VertexId), AgreementError> {
    let (small, _) = g.endpoints(e).map_err(|_| AgreementError::ConstructionFailed)?;
    let before: BTreeSet<EdgeId> = g.edge_ids().collect();
    let (next, x) = g
        .subdivide_edge(e)
        .map_err(|_| AgreementError::ConstructionFailed)?;
    let fresh: Vec<EdgeId> = next.edge_ids().filter(|f| !before.contains(f)).collect();
    let &[half_small, half_large] = fresh.as_slice() else {
        return Err(AgreementError::ConstructionFailed);
    };
    debug_assert!({
        let (p, q) = next.endpoints(half_small).expect("fresh half exists");
        p == small || q == small
    });
    Ok((next, x, half_small, half_large, small))
}

/// Removes `e` exactly as edge removal with suppression does, reporting
/// each suppression as (vertex, edge, edge, replacement).
#[allow(clippy::type_complexity)]
fn remove_known(
    g: &MultiGraph,
    e: EdgeId,
) -> Result<(MultiGraph, Vec<(VertexId, EdgeId, EdgeId, EdgeId)>), AgreementError> {
    let (a, b) = g.endpoints(e).map_err(|_| AgreementError::ConstructionFailed)?;
    let keep: BTreeSet<EdgeId> = g.edge_ids().filter(|&f| f != e).collect();
    let mut h = g.edge_subgraph(&keep);
    let mut merges = Vec::new();
    for v in [a, b] {
        if v == b && a == b {
            continue;
        }
        let open = h
            .label(v)
            .map_err(|_| AgreementError::ConstructionFailed)?
            .is_none()
            && h.degree(v).map_err(|_| AgreementError::ConstructionFailed)? == 2;
        if !open {
            continue;
        }
        let inc = h
            .incident_edges(v)
            .map_err(|_| AgreementError::ConstructionFailed)?;
        let (e1, e2) = (inc[0], inc[1]);
        if e1 == e2 {
            continue;
        }
        let before: BTreeSet<EdgeId> = h.edge_ids().collect();
        let next = h
            .suppress_vertex(v)
            .map_err(|_| AgreementError::ConstructionFailed)?;
        let fresh = next
            .edge_ids()
            .find(|f| !before.contains(f))
            .ok_or(AgreementError::ConstructionFailed)?;
        merges.push((v, e1, e2, fresh));
        h = next;
    }
    Ok((h, merges))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::agreement::agreement_distance;
    use crate::rearrange::MoveKind;

    fn quartet(split_partner: u32) -> PhyloNetwork {
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

    fn two_leaf_edge() -> PhyloNetwork {
        let mut g = MultiGraph::new();
        let l1 = g.add_labelled_vertex(Label(1)).unwrap();
        let l2 = g.add_labelled_vertex(Label(2)).unwrap();
        g.add_edge(l1, l2).unwrap();
        PhyloNetwork::validate(g).unwrap()
    }

    fn two_leaf_parallel_pair() -> PhyloNetwork {
        let mut g = MultiGraph::new();
        let l1 = g.add_labelled_vertex(Label(1)).unwrap();
        let l2 = g.add_labelled_vertex(Label(2)).unwrap();
        let x = g.add_vertex();
        let y = g.add_vertex();
        g.add_edge(l1, x).unwrap();
        g.add_edge(l2, y).unwrap();
        g.add_edge(x, y).unwrap();
        g.add_edge(x, y).unwrap();
        PhyloNetwork::validate(g).unwrap()
    }

    #[test]
    fn identical_networks_need_no_moves() {
        let t = quartet(2);
        let w = agreement_distance(&t, &t).unwrap();
        let seq = mag_to_tbr_sequence(&t, &t, &w).unwrap();
        assert!(seq.is_empty());
        seq.replay().unwrap();
    }

    #[test]
    fn conflicting_quartets_walk_in_two_moves() {
        let s = quartet(2);
        let t = quartet(3);
        let w = agreement_distance(&s, &t).unwrap();
        let seq = mag_to_tbr_sequence(&s, &t, &w).unwrap();
        assert_eq!(seq.len(), 2);
        assert!(seq.len() <= 2 * w.distance as usize);
        assert_eq!(seq.moves[0].kind(), MoveKind::TbrPlus);
        assert_eq!(seq.moves[1].kind(), MoveKind::TbrMinus);
        let codes = seq.replay().unwrap();
        assert_eq!(codes.len(), 3);
    }

    #[test]
    fn tier_gap_walk_is_one_addition() {
        let tree = quartet(2);
        let net = quartet_with_parallel_pair();
        let w = agreement_distance(&tree, &net).unwrap();
        let seq = mag_to_tbr_sequence(&tree, &net, &w).unwrap();
        assert_eq!(seq.len(), 1);
        assert_eq!(seq.moves[0].kind(), MoveKind::TbrPlus);
        seq.replay().unwrap();
    }

    #[test]
    fn tier_drop_walk_is_one_removal() {
        let tree = quartet(2);
        let net = quartet_with_parallel_pair();
        let w = agreement_distance(&net, &tree).unwrap();
        let seq = mag_to_tbr_sequence(&net, &tree, &w).unwrap();
        assert_eq!(seq.len(), 1);
        assert_eq!(seq.moves[0].kind(), MoveKind::TbrMinus);
        seq.replay().unwrap();
    }

    #[test]
    fn second_subdivision_may_name_a_half() {
        let a = two_leaf_edge();
        let b = two_leaf_parallel_pair();
        let w = agreement_distance(&a, &b).unwrap();
        let seq = mag_to_tbr_sequence(&a, &b, &w).unwrap();
        assert_eq!(seq.len(), 1);
        let Move::TbrPlus { second, .. } = seq.moves[0] else {
            panic!("addition expected");
        };
        assert!(!a.as_graph().has_edge(second), "second names a fresh half");
        seq.replay().unwrap();
    }

    #[test]
    fn foreign_witness_is_rejected() {
        let s = quartet(2);
        let t = quartet(3);
        let other = quartet(4);
        let w = agreement_distance(&s, &t).unwrap();
        assert_eq!(
            mag_to_tbr_sequence(&s, &other, &w).unwrap_err(),
            AgreementError::Uncertified
        );
    }
}
