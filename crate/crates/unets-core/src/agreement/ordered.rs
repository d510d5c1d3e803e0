//! Ordered embeddings and sprout re-attachment.
//!
//! An embedding is ordered when its trails can be consumed first to last
//! such that, while the union of the subgraph images is still
//! disconnected, every trail joins two of its parts, and every trail end
//! lands on something already present: a subgraph image or an earlier
//! trail. [`ordered_embedding`] rebuilds the trail list of any valid
//! embedding into that shape without touching the subgraph images, which
//! is what the move-sequence construction consumes.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;

use crate::multigraph::{EdgeId, MultiGraph, VertexId};
use crate::phylo::PhyloNetwork;

use super::embedding::{path_vertices, verify_embedding, AgreementEmbedding, TrailImage};
use super::{AgreementError, AgreementGraph, AgreementMode};

/// Names one sprout of an agreement graph within an embedding.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum SproutRef {
    /// An end of a disagreement trail: `end` 0 or 1 picks the tuple slot.
    TrailEnd { trail: usize, end: u8 },
    /// The sprout vertex of a subgraph component.
    ComponentSprout { component: usize, vertex: VertexId },
}

// ── Disjoint set over host vertices ──────────────────────────────────────

struct Dsu {
    parent: BTreeMap<VertexId, VertexId>,
}

impl Dsu {
    fn new() -> Dsu {
        Dsu { parent: BTreeMap::new() }
    }

    fn add(&mut self, v: VertexId) {
        self.parent.entry(v).or_insert(v);
    }

    fn find(&mut self, v: VertexId) -> VertexId {
        let mut cur = v;
        loop {
            let p = self.parent[&cur];
            if p == cur {
                return cur;
            }
            let gp = self.parent[&p];
            self.parent.insert(cur, gp);
            cur = gp;
        }
    }

    fn union(&mut self, a: VertexId, b: VertexId) {
        let ra = self.find(a);
        let rb = self.find(b);
        if ra != rb {
            self.parent.insert(ra, rb);
        }
    }
}

/// Host vertices touched by the subgraph images, pre-joined in a disjoint
/// set (shared host vertices bridge components).
fn image_union(
    host: &PhyloNetwork,
    e: &AgreementEmbedding,
) -> (BTreeSet<VertexId>, Dsu) {
    let h = host.as_graph();
    let mut verts = BTreeSet::new();
    let mut dsu = Dsu::new();
    for im in &e.components {
        let mut rep: Option<VertexId> = None;
        let mut touch = |dsu: &mut Dsu, v: VertexId| {
            dsu.add(v);
            match rep {
                None => rep = Some(v),
                Some(r) => dsu.union(r, v),
            }
        };
        for &w in im.vertex_images.values() {
            verts.insert(w);
            touch(&mut dsu, w);
        }
        for path in im.edge_images.values() {
            let start = *path.first().expect("verified path");
            let (a, b) = h.endpoints(start).expect("edge exists");
            // Walk from whichever endpoint chains through the whole path.
            let from = if path_vertices(h, a, path).is_some() { a } else { b };
            for v in path_vertices(h, from, path).expect("verified path") {
                verts.insert(v);
                touch(&mut dsu, v);
            }
        }
    }
    (verts, dsu)
}

fn part_count(dsu: &mut Dsu, verts: &BTreeSet<VertexId>) -> usize {
    let roots: BTreeSet<VertexId> = verts.iter().map(|&v| dsu.find(v)).collect();
    roots.len()
}

// ── Verification ─────────────────────────────────────────────────────────

/// Checks the ordered clauses on top of plain embedding validity: every
/// trail end lands on the union built so far, trails keep joining distinct
/// parts while any remain, and in sprouted mode no subgraph sprout stands
/// on a trail interior.
pub fn verify_ordered_embedding(
    g: &AgreementGraph,
    host: &PhyloNetwork,
    e: &AgreementEmbedding,
) -> Result<(), AgreementError> {
    verify_embedding(g, host, e)?;
    let h = host.as_graph();
    let (mut verts, mut dsu) = image_union(host, e);
    let mut trail_interiors: BTreeSet<VertexId> = BTreeSet::new();
    for t in &e.trails {
        for end in [t.ends.0, t.ends.1] {
            if !verts.contains(&end) {
                return Err(AgreementError::InvalidEmbedding("trail attaches to a later image"));
            }
        }
        if part_count(&mut dsu, &verts) > 1 && dsu.find(t.ends.0) == dsu.find(t.ends.1) {
            return Err(AgreementError::InvalidEmbedding("trail fails to join two parts"));
        }
        let walk = path_vertices(h, t.ends.0, &t.edges).expect("verified path");
        for &v in &walk {
            dsu.add(v);
            verts.insert(v);
        }
        for w in walk.windows(2) {
            dsu.union(w[0], w[1]);
        }
        trail_interiors.extend(walk[1..walk.len() - 1].iter().copied());
    }
    if g.mode == AgreementMode::Meag {
        for (s, im) in g.subgraphs.iter().zip(&e.components) {
            for v in s.sprouts() {
                if trail_interiors.contains(&im.vertex_images[&v]) {
                    return Err(AgreementError::InvalidEmbedding("subgraph sprout on a trail"));
                }
            }
        }
    }
    Ok(())
}

// ── Ordering construction ────────────────────────────────────────────────

/// Rewrites the trail list of a valid embedding into ordered form. The
/// subgraph images stay untouched; the trail edges are re-partitioned into
/// paths extracted against the growing union, merging parts first.
pub fn ordered_embedding(
    g: &AgreementGraph,
    host: &PhyloNetwork,
    e: &AgreementEmbedding,
) -> Result<AgreementEmbedding, AgreementError> {
    verify_embedding(g, host, e)?;
    let h = host.as_graph();
    let (mut verts, mut dsu) = image_union(host, e);
    let mut red: BTreeSet<EdgeId> = e.trails.iter().flat_map(|t| t.edges.iter().copied()).collect();
    let mut trails = Vec::new();
    while !red.is_empty() {
        let merging = part_count(&mut dsu, &verts) > 1;
        let path = extract_path(host, &red, &verts, &mut dsu, merging)
            .ok_or(AgreementError::ConstructionFailed)?;
        let walk = path_vertices(h, path.ends.0, &path.edges).expect("extracted path chains");
        for &f in &path.edges {
            red.remove(&f);
        }
        for &v in &walk {
            dsu.add(v);
            verts.insert(v);
        }
        for w in walk.windows(2) {
            dsu.union(w[0], w[1]);
        }
        trails.push(path);
    }
    if trails.len() != e.trails.len() {
        return Err(AgreementError::ConstructionFailed);
    }
    let out = AgreementEmbedding { components: e.components.clone(), trails };
    verify_ordered_embedding(g, host, &out)?;
    Ok(out)
}

/// First simple red path running from one union vertex to another through
/// non-union interiors; with `merging` set, its ends must lie in distinct
/// parts. Deterministic: least start vertex, ascending edges, shortest-
/// first through depth-first extension order.
fn extract_path(
    host: &PhyloNetwork,
    red: &BTreeSet<EdgeId>,
    verts: &BTreeSet<VertexId>,
    dsu: &mut Dsu,
    merging: bool,
) -> Option<TrailImage> {
    let h = host.as_graph();
    for &start in verts {
        let candidates: Vec<EdgeId> = h
            .incident_edges(start)
            .expect("vertex exists")
            .iter()
            .copied()
            .filter(|f| red.contains(f))
            .collect();
        for first in candidates {
            let mut visited = BTreeSet::new();
            visited.insert(start);
            if let Some(found) =
                extend_red(h, red, verts, dsu, merging, start, start, first, &visited, &Vec::new())
            {
                return Some(found);
            }
        }
    }
    None
}

#[allow(clippy::too_many_arguments)]
fn extend_red(
    h: &MultiGraph,
    red: &BTreeSet<EdgeId>,
    verts: &BTreeSet<VertexId>,
    dsu: &mut Dsu,
    merging: bool,
    start: VertexId,
    cur: VertexId,
    via: EdgeId,
    visited: &BTreeSet<VertexId>,
    path: &Vec<EdgeId>,
) -> Option<TrailImage> {
    let w = h.other_endpoint(via, cur).expect("incident");
    let mut path2 = path.clone();
    path2.push(via);
    if verts.contains(&w) {
        if w == start || (merging && dsu.find(start) == dsu.find(w)) {
            return None;
        }
        return Some(TrailImage { edges: path2, ends: (start, w) });
    }
    if visited.contains(&w) {
        return None;
    }
    let mut visited2 = visited.clone();
    visited2.insert(w);
    for &f in h.incident_edges(w).expect("vertex exists") {
        if f == via || !red.contains(&f) || path2.contains(&f) {
            continue;
        }
        if let Some(found) =
            extend_red(h, red, verts, dsu, merging, start, w, f, &visited2, &path2)
        {
            return Some(found);
        }
    }
    None
}

// ── Sprout re-attachment ─────────────────────────────────────────────────

/// Moves sprout `moved` onto the far end of `donor`'s path prefix: the
/// donor edge keeps its suffix from `moved`'s old attachment point, and
/// `moved`'s edge takes over the prefix. Requires `moved`'s image to lie
/// strictly inside the donor path. The reshaped trail or edge runs from
/// its relocated sprout, so a moved trail end sits in tuple slot 0
/// afterwards. Applying the change again with the roles exchanged restores
/// the original embedding.
pub fn embedding_change(
    g: &AgreementGraph,
    host: &PhyloNetwork,
    e: &AgreementEmbedding,
    moved: SproutRef,
    donor: SproutRef,
) -> Result<AgreementEmbedding, AgreementError> {
    let h = host.as_graph();
    let (moved_img, moved_path, moved_far) = locate(g, e, moved)?;
    let (donor_img, donor_path, donor_far) = locate(g, e, donor)?;
    let walk = path_vertices(h, donor_img, &donor_path)
        .ok_or(AgreementError::InvalidEmbedding("donor path does not chain"))?;
    let pos = walk[1..walk.len() - 1]
        .iter()
        .position(|&v| v == moved_img)
        .map(|p| p + 1)
        .ok_or(AgreementError::AttachmentMissing)?;
    let mut new_moved: Vec<EdgeId> = donor_path[..pos].to_vec();
    new_moved.extend(moved_path.iter().copied());
    let new_donor: Vec<EdgeId> = donor_path[pos..].to_vec();
    let mut out = e.clone();
    store(g, &mut out, moved, donor_img, moved_far, new_moved)?;
    store(g, &mut out, donor, moved_img, donor_far, new_donor)?;
    verify_embedding(g, host, &out)?;
    Ok(out)
}

/// Resolves a sprout to its host image, its edge's path oriented away from
/// it, and the host image of the path's far end.
fn locate(
    g: &AgreementGraph,
    e: &AgreementEmbedding,
    r: SproutRef,
) -> Result<(VertexId, Vec<EdgeId>, VertexId), AgreementError> {
    match r {
        SproutRef::TrailEnd { trail, end } => {
            let t = e.trails.get(trail).ok_or(AgreementError::Malformed("no such trail"))?;
            let mut path = t.edges.clone();
            let (img, far) = match end {
                0 => (t.ends.0, t.ends.1),
                1 => {
                    path.reverse();
                    (t.ends.1, t.ends.0)
                }
                _ => return Err(AgreementError::Malformed("trail end index out of range")),
            };
            Ok((img, path, far))
        }
        SproutRef::ComponentSprout { component, vertex } => {
            let s = g
                .subgraphs
                .get(component)
                .ok_or(AgreementError::Malformed("no such component"))?;
            if !s.is_sprout(vertex) {
                return Err(AgreementError::Malformed("vertex is not a sprout"));
            }
            let im = &e.components[component];
            let edge = s.incident_edges(vertex).expect("sprout exists")[0];
            let (x, y) = s.endpoints(edge).expect("edge exists");
            let mut path = im.edge_images[&edge].clone();
            let far_vertex = if vertex == x { y } else { x };
            if vertex != x {
                path.reverse();
            }
            Ok((im.vertex_images[&vertex], path, im.vertex_images[&far_vertex]))
        }
    }
}

/// Writes a sprout's reshaped path back, restoring the orientation
/// conventions of its slot.
fn store(
    g: &AgreementGraph,
    out: &mut AgreementEmbedding,
    r: SproutRef,
    new_img: VertexId,
    far_img: VertexId,
    path_from_sprout: Vec<EdgeId>,
) -> Result<(), AgreementError> {
    match r {
        SproutRef::TrailEnd { trail, .. } => {
            out.trails[trail] =
                TrailImage { edges: path_from_sprout, ends: (new_img, far_img) };
            Ok(())
        }
        SproutRef::ComponentSprout { component, vertex } => {
            let s = &g.subgraphs[component];
            let im = &mut out.components[component];
            im.vertex_images.insert(vertex, new_img);
            let edge = s.incident_edges(vertex).expect("sprout exists")[0];
            let (x, _) = s.endpoints(edge).expect("edge exists");
            let mut path = path_from_sprout;
            if vertex != x {
                path.reverse();
            }
            im.edge_images.insert(edge, path);
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::agreement::decompose::red_black_decompositions;
    use crate::agreement::embedding::ComponentImage;
    use crate::multigraph::{Label, MultiGraph};

    fn quartet() -> PhyloNetwork {
        let mut g = MultiGraph::new();
        let la = g.add_labelled_vertex(Label(1)).unwrap();
        let lb = g.add_labelled_vertex(Label(2)).unwrap();
        let lc = g.add_labelled_vertex(Label(3)).unwrap();
        let ld = g.add_labelled_vertex(Label(4)).unwrap();
        let u = g.add_vertex();
        let v = g.add_vertex();
        g.add_edge(la, u).unwrap();
        g.add_edge(lb, u).unwrap();
        g.add_edge(u, v).unwrap();
        g.add_edge(v, lc).unwrap();
        g.add_edge(v, ld).unwrap();
        PhyloNetwork::validate(g).unwrap()
    }

    /// The all-red decomposition of the quartet: four singletons joined by
    /// three trails, the third of which hangs between the first two.
    fn singleton_config(host: &PhyloNetwork) -> (AgreementGraph, AgreementEmbedding) {
        let d = red_black_decompositions(host, 3).unwrap().remove(0);
        let g = AgreementGraph {
            subgraphs: d.components.iter().map(|c| c.graph.clone()).collect(),
            disagreement_count: 3,
            mode: AgreementMode::Mag,
        };
        let e = AgreementEmbedding {
            components: d
                .components
                .iter()
                .map(|c| ComponentImage {
                    vertex_images: c.vertex_images.clone(),
                    edge_images: c.edge_images.clone(),
                })
                .collect(),
            trails: d.trails,
        };
        (g, e)
    }

    #[test]
    fn decomposition_order_is_already_ordered() {
        let host = quartet();
        let (g, e) = singleton_config(&host);
        verify_ordered_embedding(&g, &host, &e).unwrap();
    }

    #[test]
    fn bad_trail_order_is_rejected_and_repaired() {
        let host = quartet();
        let (g, e) = singleton_config(&host);
        let mut shuffled = e.clone();
        shuffled.trails.rotate_right(1);
        verify_embedding(&g, &host, &shuffled).unwrap();
        assert!(verify_ordered_embedding(&g, &host, &shuffled).is_err());
        let fixed = ordered_embedding(&g, &host, &shuffled).unwrap();
        assert_eq!(fixed.trails.len(), 3);
        verify_ordered_embedding(&g, &host, &fixed).unwrap();
        assert_eq!(fixed.components, e.components);
    }

    #[test]
    fn ordering_without_trails_is_the_identity() {
        let host = quartet();
        let whole = host.as_graph().clone();
        let g = AgreementGraph {
            subgraphs: alloc::vec![whole.clone()],
            disagreement_count: 0,
            mode: AgreementMode::Mag,
        };
        let e = AgreementEmbedding {
            components: alloc::vec![ComponentImage {
                vertex_images: whole.vertex_ids().map(|v| (v, v)).collect(),
                edge_images: whole.edge_ids().map(|e| (e, alloc::vec![e])).collect(),
            }],
            trails: Vec::new(),
        };
        let out = ordered_embedding(&g, &host, &e).unwrap();
        assert_eq!(out, e);
    }

    #[test]
    fn embedding_change_is_an_involution() {
        let host = quartet();
        let (g, e) = singleton_config(&host);
        // The third trail's far end hangs inside the second trail.
        let moved = SproutRef::TrailEnd { trail: 2, end: 1 };
        let donor = SproutRef::TrailEnd { trail: 1, end: 0 };
        let changed = embedding_change(&g, &host, &e, moved, donor).unwrap();
        assert_ne!(changed.trails, e.trails);
        verify_embedding(&g, &host, &changed).unwrap();
        // Relocated sprouts sit in slot 0 of their trails; exchanging them
        // back restores the embedding up to trail orientation.
        let back = embedding_change(
            &g,
            &host,
            &changed,
            SproutRef::TrailEnd { trail: 1, end: 0 },
            SproutRef::TrailEnd { trail: 2, end: 0 },
        )
        .unwrap();
        assert_eq!(back.components, e.components);
        let norm = |t: &TrailImage| {
            if t.ends.0 <= t.ends.1 {
                (t.edges.clone(), t.ends)
            } else {
                let mut rev = t.edges.clone();
                rev.reverse();
                (rev, (t.ends.1, t.ends.0))
            }
        };
        let reached: Vec<_> = back.trails.iter().map(norm).collect();
        let expected: Vec<_> = e.trails.iter().map(norm).collect();
        assert_eq!(reached, expected);
    }

    #[test]
    fn change_without_attachment_is_rejected() {
        let host = quartet();
        let (g, e) = singleton_config(&host);
        let moved = SproutRef::TrailEnd { trail: 0, end: 0 };
        let donor = SproutRef::TrailEnd { trail: 1, end: 0 };
        assert_eq!(
            embedding_change(&g, &host, &e, moved, donor).unwrap_err(),
            AgreementError::AttachmentMissing
        );
    }
}
