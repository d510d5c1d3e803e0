//! Agreement embeddings and their backtracking certifier.
//!
//! An embedding maps every subgraph component onto a subdivision inside the
//! host and every disagreement edge onto an open path, such that the images
//! are pairwise edge-disjoint, together cover every host edge, and share
//! host vertices only in the one permitted way: a sprout standing on a
//! labelled singleton's leaf. [`check_agreement_embedding`] searches for
//! such an embedding from scratch and is deliberately independent of the
//! red-black decomposition engine, which makes it the verification oracle
//! for everything that engine produces.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;

use crate::multigraph::{EdgeId, Label, MultiGraph, VertexId};
use crate::phylo::PhyloNetwork;

use super::{AgreementError, AgreementGraph};

// ── Embedding data ───────────────────────────────────────────────────────

/// Image of one subgraph component: a host vertex per component vertex and
/// a host path per component edge.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ComponentImage {
    /// Host vertex for each component vertex.
    pub vertex_images: BTreeMap<VertexId, VertexId>,
    /// Host path (ordered edge ids) for each component edge, running from
    /// the image of the smaller endpoint to the image of the larger one.
    pub edge_images: BTreeMap<EdgeId, Vec<EdgeId>>,
}

/// Image of one disagreement edge: an open host path between the images of
/// its two sprouts.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TrailImage {
    /// Ordered host edges of the path.
    pub edges: Vec<EdgeId>,
    /// Sprout images, in path order.
    pub ends: (VertexId, VertexId),
}

/// A full agreement embedding of an [`AgreementGraph`] into one host.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct AgreementEmbedding {
    /// One image per agreement subgraph, in subgraph order.
    pub components: Vec<ComponentImage>,
    /// One image per embedded disagreement edge.
    pub trails: Vec<TrailImage>,
}

impl AgreementEmbedding {
    /// Number of disagreement edges this embedding uses.
    pub fn disagreement_usage(&self) -> usize {
        self.trails.len()
    }

    /// Host vertices carrying sprouts: trail endpoints first, then subgraph
    /// sprout images in component order.
    pub fn sprout_images(&self, g: &AgreementGraph) -> Vec<VertexId> {
        let mut out: Vec<VertexId> = self
            .trails
            .iter()
            .flat_map(|t| [t.ends.0, t.ends.1])
            .collect();
        for (s, im) in g.subgraphs.iter().zip(&self.components) {
            for v in s.sprouts() {
                out.push(im.vertex_images[&v]);
            }
        }
        out
    }

    /// Host leaf for each labelled singleton component, keyed by label.
    pub fn singleton_images(&self, g: &AgreementGraph) -> BTreeMap<Label, VertexId> {
        let mut out = BTreeMap::new();
        for (s, im) in g.subgraphs.iter().zip(&self.components) {
            for (label, v) in s.labelled_vertices() {
                if s.degree(v).expect("labelled vertex exists") == 0 {
                    out.insert(label, im.vertex_images[&v]);
                }
            }
        }
        out
    }
}

// ── Shared occupancy accounting ──────────────────────────────────────────

/// What kind of graph vertex stands on a host vertex.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub(super) enum OccKind {
    /// Leaf, branch, or loop vertex: must have the host vertex to itself.
    Other,
    /// Unlabelled degree-one vertex: may share only with a singleton.
    Sprout,
    /// Labelled isolated vertex: may share only with a sprout.
    Singleton,
}

#[derive(Clone, Copy, Default, Debug)]
pub(super) struct Occ {
    other: bool,
    sprout: bool,
    singleton: bool,
}

impl Occ {
    /// Records one more graph vertex here; false on a coincidence the
    /// definition forbids.
    pub(super) fn occupy(&mut self, kind: OccKind) -> bool {
        match kind {
            OccKind::Other => {
                if self.other || self.sprout || self.singleton {
                    return false;
                }
                self.other = true;
            }
            OccKind::Sprout => {
                if self.other || self.sprout {
                    return false;
                }
                self.sprout = true;
            }
            OccKind::Singleton => {
                if self.other || self.singleton {
                    return false;
                }
                self.singleton = true;
            }
        }
        true
    }
}

/// Occupancy kind of a graph vertex, from its label and degree.
pub(super) fn occ_kind(s: &MultiGraph, v: VertexId) -> OccKind {
    let degree = s.degree(v).expect("vertex exists");
    match s.label(v).expect("vertex exists") {
        Some(_) if degree == 0 => OccKind::Singleton,
        Some(_) => OccKind::Other,
        None if degree == 1 => OccKind::Sprout,
        None => OccKind::Other,
    }
}

// ── Path helpers ─────────────────────────────────────────────────────────

/// Walks an edge path from `start`, returning the visited vertices (one
/// more than the edge count). None if the edges do not chain.
pub(super) fn path_vertices(
    host: &MultiGraph,
    start: VertexId,
    edges: &[EdgeId],
) -> Option<Vec<VertexId>> {
    let mut verts = alloc::vec![start];
    let mut cur = start;
    for &e in edges {
        cur = host.other_endpoint(e, cur).ok()?;
        verts.push(cur);
    }
    Some(verts)
}

/// True when the walk revisits no vertex, except that the two ends may
/// coincide (a closed path carrying a loop image).
fn is_simple_walk(verts: &[VertexId]) -> bool {
    let n = verts.len();
    let head: BTreeSet<VertexId> = verts[..n - 1].iter().copied().collect();
    let tail: BTreeSet<VertexId> = verts[1..].iter().copied().collect();
    head.len() == n - 1 && tail.len() == n - 1
}

// ── Verification of a given embedding ────────────────────────────────────

/// Checks a claimed embedding against its graph and host: image totality,
/// label agreement, path integrity and simplicity, pairwise edge
/// disjointness, exact coverage, and the vertex coincidence rules.
pub fn verify_embedding(
    g: &AgreementGraph,
    host: &PhyloNetwork,
    e: &AgreementEmbedding,
) -> Result<(), AgreementError> {
    let h = host.as_graph();
    if e.components.len() != g.subgraphs.len() {
        return Err(AgreementError::InvalidEmbedding("component count mismatch"));
    }
    if e.trails.len() > g.disagreement_count as usize {
        return Err(AgreementError::InvalidEmbedding("more trails than disagreement edges"));
    }
    let mut occ: BTreeMap<VertexId, Occ> = BTreeMap::new();
    let mut used: BTreeSet<EdgeId> = BTreeSet::new();
    for (s, im) in g.subgraphs.iter().zip(&e.components) {
        if im.vertex_images.len() != s.vertex_count() {
            return Err(AgreementError::InvalidEmbedding("vertex image missing"));
        }
        for (&v, &w) in &im.vertex_images {
            if !s.has_vertex(v) || !h.has_vertex(w) {
                return Err(AgreementError::InvalidEmbedding("unknown vertex in image"));
            }
            if let Some(label) = s.label(v).expect("checked") {
                if h.label(w).expect("checked") != Some(label) {
                    return Err(AgreementError::InvalidEmbedding("label sent to wrong leaf"));
                }
            }
            if !occ.entry(w).or_default().occupy(occ_kind(s, v)) {
                return Err(AgreementError::InvalidEmbedding("forbidden vertex coincidence"));
            }
        }
        let s_edges: BTreeSet<EdgeId> = s.edge_ids().collect();
        let imaged: BTreeSet<EdgeId> = im.edge_images.keys().copied().collect();
        if s_edges != imaged {
            return Err(AgreementError::InvalidEmbedding("edge image missing"));
        }
        for (&eid, path) in &im.edge_images {
            let (x, y) = s.endpoints(eid).expect("checked");
            let start = im.vertex_images[&x];
            let goal = im.vertex_images[&y];
            if path.is_empty() {
                return Err(AgreementError::InvalidEmbedding("empty edge path"));
            }
            let verts = path_vertices(h, start, path)
                .ok_or(AgreementError::InvalidEmbedding("edge path does not chain"))?;
            if *verts.last().expect("nonempty") != goal {
                return Err(AgreementError::InvalidEmbedding("edge path misses endpoint"));
            }
            if !is_simple_walk(&verts) {
                return Err(AgreementError::InvalidEmbedding("edge path not simple"));
            }
            for &he in path {
                if !used.insert(he) {
                    return Err(AgreementError::InvalidEmbedding("host edge used twice"));
                }
            }
        }
    }
    for t in &e.trails {
        if t.edges.is_empty() {
            return Err(AgreementError::InvalidEmbedding("empty trail"));
        }
        let verts = path_vertices(h, t.ends.0, &t.edges)
            .ok_or(AgreementError::InvalidEmbedding("trail does not chain"))?;
        if *verts.last().expect("nonempty") != t.ends.1 || t.ends.0 == t.ends.1 {
            return Err(AgreementError::InvalidEmbedding("trail ends wrong"));
        }
        if !is_simple_walk(&verts) {
            return Err(AgreementError::InvalidEmbedding("trail not simple"));
        }
        for end in [t.ends.0, t.ends.1] {
            if !occ.entry(end).or_default().occupy(OccKind::Sprout) {
                return Err(AgreementError::InvalidEmbedding("forbidden sprout coincidence"));
            }
        }
        for &he in &t.edges {
            if !used.insert(he) {
                return Err(AgreementError::InvalidEmbedding("host edge used twice"));
            }
        }
    }
    if used.len() != h.edge_count() {
        return Err(AgreementError::InvalidEmbedding("host edges left uncovered"));
    }
    for (label, w) in h.labelled_vertices() {
        let claimed = g
            .subgraphs
            .iter()
            .zip(&e.components)
            .any(|(s, im)| s.vertex_with_label(label).is_some_and(|v| im.vertex_images[&v] == w));
        if !claimed {
            return Err(AgreementError::InvalidEmbedding("host label unclaimed"));
        }
    }
    Ok(())
}

// ── Certifier search ─────────────────────────────────────────────────────

#[derive(Clone)]
struct St {
    used: BTreeSet<EdgeId>,
    occ: BTreeMap<VertexId, Occ>,
    vmaps: Vec<BTreeMap<VertexId, VertexId>>,
    emaps: Vec<BTreeMap<EdgeId, Vec<EdgeId>>>,
}

enum Step {
    /// Enumerate host images for an unforced component vertex.
    Seed { comp: usize, vertex: VertexId },
    /// Route one component edge; its far endpoint may still be unbound.
    Route { comp: usize, edge: EdgeId },
}

struct Search<'a> {
    g: &'a AgreementGraph,
    host: &'a MultiGraph,
    steps: Vec<Step>,
    allowed: usize,
}

/// Searches for an agreement embedding of `g` into `host` that uses exactly
/// `allowed_disagreement` disagreement edges. Errors when the subgraph
/// labels are not exactly the host leaf set.
pub fn check_agreement_embedding(
    g: &AgreementGraph,
    host: &PhyloNetwork,
    allowed_disagreement: usize,
) -> Result<Option<AgreementEmbedding>, AgreementError> {
    let h = host.as_graph();
    let mut g_labels: BTreeSet<Label> = BTreeSet::new();
    for s in &g.subgraphs {
        for (label, _) in s.labelled_vertices() {
            if !g_labels.insert(label) {
                return Err(AgreementError::LabelMismatch);
            }
        }
    }
    let host_labels: BTreeSet<Label> = h.labelled_vertices().into_iter().map(|(l, _)| l).collect();
    if g_labels != host_labels {
        return Err(AgreementError::LabelMismatch);
    }

    let mut steps = Vec::new();
    for (c, s) in g.subgraphs.iter().enumerate() {
        let mut placed: BTreeSet<VertexId> =
            s.labelled_vertices().into_iter().map(|(_, v)| v).collect();
        if placed.is_empty() {
            if let Some(seed) = s.vertex_ids().next() {
                steps.push(Step::Seed { comp: c, vertex: seed });
                placed.insert(seed);
            }
        }
        let mut pending: BTreeSet<EdgeId> = s.edge_ids().collect();
        while !pending.is_empty() {
            let next = pending
                .iter()
                .copied()
                .map(|e| {
                    let (x, y) = s.endpoints(e).expect("edge exists");
                    let anchored = placed.contains(&x) as u8 + placed.contains(&y) as u8;
                    (core::cmp::Reverse(anchored), e)
                })
                .min()
                .map(|(_, e)| e)
                .expect("pending nonempty");
            let (x, y) = s.endpoints(next).expect("edge exists");
            if !placed.contains(&x) && !placed.contains(&y) {
                return Err(AgreementError::Malformed("disconnected subgraph component"));
            }
            steps.push(Step::Route { comp: c, edge: next });
            pending.remove(&next);
            placed.insert(x);
            placed.insert(y);
        }
    }

    let search = Search { g, host: h, steps, allowed: allowed_disagreement };
    let mut st = St {
        used: BTreeSet::new(),
        occ: BTreeMap::new(),
        vmaps: alloc::vec![BTreeMap::new(); g.subgraphs.len()],
        emaps: alloc::vec![BTreeMap::new(); g.subgraphs.len()],
    };
    for (c, s) in g.subgraphs.iter().enumerate() {
        for (label, v) in s.labelled_vertices() {
            let w = h.vertex_with_label(label).expect("label set checked");
            if !st.occ.entry(w).or_default().occupy(occ_kind(s, v)) {
                return Ok(None);
            }
            st.vmaps[c].insert(v, w);
        }
    }
    Ok(search.step(0, st))
}

impl Search<'_> {
    fn free_capacity(&self, st: &St, w: VertexId) -> usize {
        self.host
            .incident_edges(w)
            .expect("host vertex")
            .iter()
            .filter(|e| !st.used.contains(e))
            .count()
    }

    fn step(&self, i: usize, st: St) -> Option<AgreementEmbedding> {
        // Every unrouted component edge and every pending trail consumes at
        // least one more host edge.
        let pending = self.steps[i..]
            .iter()
            .filter(|s| matches!(s, Step::Route { .. }))
            .count();
        if st.used.len() + pending + self.allowed > self.host.edge_count() {
            return None;
        }
        let Some(step) = self.steps.get(i) else {
            return self.cover(st, self.allowed, Vec::new());
        };
        match *step {
            Step::Seed { comp, vertex } => {
                let s = &self.g.subgraphs[comp];
                let kind = occ_kind(s, vertex);
                let need = s.degree(vertex).expect("vertex exists");
                for w in self.host.vertex_ids() {
                    if self.free_capacity(&st, w) < need {
                        continue;
                    }
                    let mut st2 = st.clone();
                    if !st2.occ.entry(w).or_default().occupy(kind) {
                        continue;
                    }
                    st2.vmaps[comp].insert(vertex, w);
                    if let Some(found) = self.step(i + 1, st2) {
                        return Some(found);
                    }
                }
                None
            }
            Step::Route { comp, edge } => {
                let s = &self.g.subgraphs[comp];
                let (a, b) = s.endpoints(edge).expect("edge exists");
                let (from, far) = if st.vmaps[comp].contains_key(&a) { (a, b) } else { (b, a) };
                let start = st.vmaps[comp][&from];
                let goal = st.vmaps[comp].get(&far).copied();
                let mut visited = BTreeSet::new();
                visited.insert(start);
                self.route(i, comp, edge, far, st, start, goal, &visited, &Vec::new())
            }
        }
    }

    /// Extends the path of `edge` from `cur`. With `goal` bound the path
    /// must end exactly there (for a loop image, back at its start); with
    /// `goal` free, any admissible stop binds the far endpoint `far`.
    #[allow(clippy::too_many_arguments)]
    fn route(
        &self,
        i: usize,
        comp: usize,
        edge: EdgeId,
        far: VertexId,
        st: St,
        cur: VertexId,
        goal: Option<VertexId>,
        visited: &BTreeSet<VertexId>,
        path: &Vec<EdgeId>,
    ) -> Option<AgreementEmbedding> {
        let s = &self.g.subgraphs[comp];
        for &e in self.host.incident_edges(cur).expect("host vertex") {
            if st.used.contains(&e) {
                continue;
            }
            let w = self.host.other_endpoint(e, cur).expect("incident");
            let mut path2 = path.clone();
            path2.push(e);
            match goal {
                Some(t) if w == t => {
                    let mut st2 = st.clone();
                    st2.used.insert(e);
                    st2.emaps[comp].insert(edge, orient(s, edge, far, path2));
                    if let Some(found) = self.step(i + 1, st2) {
                        return Some(found);
                    }
                    continue; // the goal vertex cannot be passed through
                }
                _ => {}
            }
            if visited.contains(&w) {
                continue;
            }
            if goal.is_none() {
                // Stop here, binding the far endpoint to w.
                let need_rest = s.degree(far).expect("vertex exists") - 1;
                let mut st2 = st.clone();
                st2.used.insert(e);
                if self.free_capacity(&st2, w) >= need_rest
                    && st2.occ.entry(w).or_default().occupy(occ_kind(s, far))
                {
                    st2.vmaps[comp].insert(far, w);
                    st2.emaps[comp].insert(edge, orient(s, edge, far, path2.clone()));
                    if let Some(found) = self.step(i + 1, st2) {
                        return Some(found);
                    }
                }
            }
            let mut st2 = st.clone();
            st2.used.insert(e);
            if self.free_capacity(&st2, w) >= 1 {
                let mut visited2 = visited.clone();
                visited2.insert(w);
                if let Some(found) =
                    self.route(i, comp, edge, far, st2, w, goal, &visited2, &path2)
                {
                    return Some(found);
                }
            }
        }
        None
    }

    /// Covers the remaining host edges with exactly `left` open trails.
    fn cover(&self, st: St, left: usize, acc: Vec<TrailImage>) -> Option<AgreementEmbedding> {
        let Some(e0) = self.host.edge_ids().find(|e| !st.used.contains(e)) else {
            if left != 0 {
                return None;
            }
            return Some(AgreementEmbedding {
                components: st
                    .vmaps
                    .iter()
                    .zip(&st.emaps)
                    .map(|(vm, em)| ComponentImage {
                        vertex_images: vm.clone(),
                        edge_images: em.clone(),
                    })
                    .collect(),
                trails: acc,
            });
        };
        if left == 0 {
            return None;
        }
        let (a, b) = self.host.endpoints(e0).expect("edge exists");
        let mut st2 = st.clone();
        st2.used.insert(e0);
        let mut visited = BTreeSet::new();
        visited.insert(a);
        visited.insert(b);
        self.grow_trail(st2, alloc::vec![e0], a, b, visited, left, acc)
    }

    /// Grows a trail around its seed edge; the edge list runs from `l` to
    /// `r`. Tries closing both ends, then extending either end.
    #[allow(clippy::too_many_arguments)]
    fn grow_trail(
        &self,
        st: St,
        edges: Vec<EdgeId>,
        l: VertexId,
        r: VertexId,
        visited: BTreeSet<VertexId>,
        left: usize,
        acc: Vec<TrailImage>,
    ) -> Option<AgreementEmbedding> {
        let mut st2 = st.clone();
        if st2.occ.entry(l).or_default().occupy(OccKind::Sprout)
            && st2.occ.entry(r).or_default().occupy(OccKind::Sprout)
        {
            let mut acc2 = acc.clone();
            acc2.push(TrailImage { edges: edges.clone(), ends: (l, r) });
            if let Some(found) = self.cover(st2, left - 1, acc2) {
                return Some(found);
            }
        }
        for (end, other) in [(l, r), (r, l)] {
            for &e in self.host.incident_edges(end).expect("host vertex") {
                if st.used.contains(&e) {
                    continue;
                }
                let w = self.host.other_endpoint(e, end).expect("incident");
                if visited.contains(&w) {
                    continue;
                }
                let mut st2 = st.clone();
                st2.used.insert(e);
                let mut visited2 = visited.clone();
                visited2.insert(w);
                let mut edges2 = edges.clone();
                let (l2, r2) = if end == l {
                    edges2.insert(0, e);
                    (w, other)
                } else {
                    edges2.push(e);
                    (other, w)
                };
                if let Some(found) =
                    self.grow_trail(st2, edges2, l2, r2, visited2, left, acc.clone())
                {
                    return Some(found);
                }
            }
        }
        None
    }
}

/// Orders a freshly routed path to run from the image of the edge's smaller
/// endpoint; `far` names the endpoint the path currently ends at.
fn orient(s: &MultiGraph, edge: EdgeId, far: VertexId, mut path: Vec<EdgeId>) -> Vec<EdgeId> {
    let (x, _) = s.endpoints(edge).expect("edge exists");
    if far == x {
        path.reverse();
    }
    path
}

// ── Label-preserving isomorphism ─────────────────────────────────────────

/// A label-preserving isomorphism between two multigraphs, as a vertex map
/// and a compatible edge map. Deterministic: the lexicographically least
/// assignment in vertex-id order is returned.
pub(super) fn find_label_iso(
    a: &MultiGraph,
    b: &MultiGraph,
) -> Option<(BTreeMap<VertexId, VertexId>, BTreeMap<EdgeId, EdgeId>)> {
    if a.vertex_count() != b.vertex_count() || a.edge_count() != b.edge_count() {
        return None;
    }
    let avs: Vec<VertexId> = a.vertex_ids().collect();
    let vmap = match_vertices(a, b, &avs, 0, BTreeMap::new())?;
    let mut emap = BTreeMap::new();
    let mut taken: BTreeSet<EdgeId> = BTreeSet::new();
    for e in a.edge_ids() {
        let (u, v) = a.endpoints(e).expect("edge exists");
        let (bu, bv) = (vmap[&u], vmap[&v]);
        let img = b.edge_ids().find(|&f| {
            if taken.contains(&f) {
                return false;
            }
            let (x, y) = b.endpoints(f).expect("edge exists");
            (x, y) == ordered(bu, bv)
        })?;
        taken.insert(img);
        emap.insert(e, img);
    }
    Some((vmap, emap))
}

fn ordered(u: VertexId, v: VertexId) -> (VertexId, VertexId) {
    if u <= v {
        (u, v)
    } else {
        (v, u)
    }
}

fn multiplicity(g: &MultiGraph, u: VertexId, v: VertexId) -> usize {
    g.edge_ids()
        .filter(|&e| g.endpoints(e).expect("edge exists") == ordered(u, v))
        .count()
}

fn match_vertices(
    a: &MultiGraph,
    b: &MultiGraph,
    avs: &[VertexId],
    idx: usize,
    vmap: BTreeMap<VertexId, VertexId>,
) -> Option<BTreeMap<VertexId, VertexId>> {
    let Some(&v) = avs.get(idx) else {
        return Some(vmap);
    };
    let taken: BTreeSet<VertexId> = vmap.values().copied().collect();
    for w in b.vertex_ids() {
        if taken.contains(&w)
            || a.label(v).expect("vertex") != b.label(w).expect("vertex")
            || a.degree(v).expect("vertex") != b.degree(w).expect("vertex")
        {
            continue;
        }
        if multiplicity(a, v, v) != multiplicity(b, w, w) {
            continue;
        }
        let consistent = vmap.iter().all(|(&u, &bu)| {
            multiplicity(a, v, u) == multiplicity(b, w, bu)
        });
        if !consistent {
            continue;
        }
        let mut vmap2 = vmap.clone();
        vmap2.insert(v, w);
        if let Some(done) = match_vertices(a, b, avs, idx + 1, vmap2) {
            return Some(done);
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::agreement::AgreementMode;

    fn quartet(a: u32, b: u32, c: u32, d: u32) -> PhyloNetwork {
        let mut g = MultiGraph::new();
        let la = g.add_labelled_vertex(Label(a)).unwrap();
        let lb = g.add_labelled_vertex(Label(b)).unwrap();
        let lc = g.add_labelled_vertex(Label(c)).unwrap();
        let ld = g.add_labelled_vertex(Label(d)).unwrap();
        let u = g.add_vertex();
        let v = g.add_vertex();
        g.add_edge(la, u).unwrap();
        g.add_edge(lb, u).unwrap();
        g.add_edge(u, v).unwrap();
        g.add_edge(v, lc).unwrap();
        g.add_edge(v, ld).unwrap();
        PhyloNetwork::validate(g).unwrap()
    }

    fn whole_network_graph(n: &PhyloNetwork) -> AgreementGraph {
        AgreementGraph {
            subgraphs: alloc::vec![n.as_graph().clone()],
            disagreement_count: 0,
            mode: AgreementMode::Mag,
        }
    }

    #[test]
    fn network_embeds_into_itself() {
        let n = quartet(1, 2, 3, 4);
        let g = whole_network_graph(&n);
        let emb = check_agreement_embedding(&g, &n, 0).unwrap().expect("identity embedding");
        verify_embedding(&g, &n, &emb).unwrap();
        assert_eq!(emb.disagreement_usage(), 0);
        for (&v, &w) in &emb.components[0].vertex_images {
            if let Some(l) = n.as_graph().label(v).unwrap() {
                assert_eq!(n.as_graph().label(w).unwrap(), Some(l));
            }
        }
    }

    #[test]
    fn label_mismatch_rejected() {
        let n = quartet(1, 2, 3, 4);
        let mut raw = MultiGraph::new();
        let la = raw.add_labelled_vertex(Label(1)).unwrap();
        let lb = raw.add_labelled_vertex(Label(2)).unwrap();
        let lc = raw.add_labelled_vertex(Label(3)).unwrap();
        let ld = raw.add_labelled_vertex(Label(5)).unwrap();
        let u = raw.add_vertex();
        let v = raw.add_vertex();
        raw.add_edge(la, u).unwrap();
        raw.add_edge(lb, u).unwrap();
        raw.add_edge(u, v).unwrap();
        raw.add_edge(v, lc).unwrap();
        raw.add_edge(v, ld).unwrap();
        let g = AgreementGraph {
            subgraphs: alloc::vec![raw],
            disagreement_count: 0,
            mode: AgreementMode::Mag,
        };
        assert_eq!(
            check_agreement_embedding(&g, &n, 0).unwrap_err(),
            AgreementError::LabelMismatch
        );
    }

    #[test]
    fn star_plus_singleton_embeds_with_one_trail() {
        // Splitting off leaf 1 leaves a star on {2,3,4}; the pendant edge
        // of leaf 1 must be covered by one disagreement trail ending on the
        // singleton's leaf.
        let n = quartet(1, 2, 3, 4);
        let mut star = MultiGraph::new();
        let c = star.add_vertex();
        for l in 2..=4 {
            let leaf = star.add_labelled_vertex(Label(l)).unwrap();
            star.add_edge(c, leaf).unwrap();
        }
        let mut single = MultiGraph::new();
        single.add_labelled_vertex(Label(1)).unwrap();
        let g = AgreementGraph {
            subgraphs: alloc::vec![star, single],
            disagreement_count: 1,
            mode: AgreementMode::Mag,
        };
        let emb = check_agreement_embedding(&g, &n, 1).unwrap().expect("one-trail embedding");
        verify_embedding(&g, &n, &emb).unwrap();
        assert_eq!(emb.trails.len(), 1);
        let leaf1 = n.as_graph().vertex_with_label(Label(1)).unwrap();
        let t = &emb.trails[0];
        assert!(t.ends.0 == leaf1 || t.ends.1 == leaf1);
        assert!(check_agreement_embedding(&g, &n, 0).unwrap().is_none());
        assert!(check_agreement_embedding(&g, &n, 2).unwrap().is_none());
    }

    #[test]
    fn whole_graph_with_spare_trail_rejected() {
        // With the full network as its one component there is nothing left
        // for a disagreement edge to cover.
        let n = quartet(1, 2, 3, 4);
        let g = whole_network_graph(&n);
        assert!(check_agreement_embedding(&g, &n, 1).unwrap().is_none());
    }

    #[test]
    fn verify_rejects_tampered_embedding() {
        let n = quartet(1, 2, 3, 4);
        let g = whole_network_graph(&n);
        let emb = check_agreement_embedding(&g, &n, 0).unwrap().unwrap();
        let mut bad = emb.clone();
        let first = *bad.components[0].edge_images.keys().next().unwrap();
        bad.components[0].edge_images.get_mut(&first).unwrap().clear();
        assert!(verify_embedding(&g, &n, &bad).is_err());
        let mut dropped = emb;
        let last = *dropped.components[0].edge_images.keys().last().unwrap();
        dropped.components[0].edge_images.remove(&last);
        assert!(verify_embedding(&g, &n, &dropped).is_err());
    }

    #[test]
    fn iso_finder_handles_parallel_edges_and_loops() {
        let mut a = MultiGraph::new();
        let a1 = a.add_vertex();
        let a2 = a.add_vertex();
        a.add_edge(a1, a2).unwrap();
        a.add_edge(a1, a2).unwrap();
        a.add_edge(a2, a2).unwrap();
        let mut b = MultiGraph::new();
        let b0 = b.add_vertex();
        let b1 = b.add_vertex();
        b.add_edge(b0, b0).unwrap();
        b.add_edge(b1, b0).unwrap();
        b.add_edge(b1, b0).unwrap();
        let (vmap, emap) = find_label_iso(&a, &b).expect("isomorphic");
        assert_eq!(vmap[&a1], b1);
        assert_eq!(vmap[&a2], b0);
        assert_eq!(emap.len(), 3);
        let mut c = MultiGraph::new();
        let c0 = c.add_vertex();
        let c1 = c.add_vertex();
        c.add_edge(c0, c1).unwrap();
        c.add_edge(c0, c1).unwrap();
        c.add_edge(c0, c1).unwrap();
        assert!(find_label_iso(&a, &c).is_none());
    }
}
