//! Undirected multigraphs with optional leaf labels and the suboperations
//! (suppress, subdivide, prune, regraft, remove) that all network
//! rearrangements are assembled from.
//!
//! Graphs are plain values: every operation takes `&self` and returns a new
//! graph, leaving the receiver untouched. Vertex and edge identifiers are
//! allocated from per-graph monotonic counters and are never reused, so a
//! fixed operation sequence replayed against equal starting values produces
//! identical identifiers throughout.
//!
//! Degrees count loops twice: a loop contributes both of its ends to its
//! vertex. Incidence lists store a loop's edge id twice to keep that
//! bookkeeping implicit.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;
use core::fmt;

mod canon;

pub use canon::CanonicalCode;

// ── Identifiers ──────────────────────────────────────────────────────────

/// Opaque vertex identifier, unique within one graph lineage.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct VertexId(pub u32);

/// Opaque edge identifier, unique within one graph lineage.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct EdgeId(pub u32);

/// Leaf label: a positive integer. Labels are unique within a graph.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Label(pub u32);

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "v{}", self.0)
    }
}

impl fmt::Display for EdgeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e{}", self.0)
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

// ── Errors ───────────────────────────────────────────────────────────────

/// Failure modes of graph construction and suboperations.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum GraphError {
    /// The vertex id does not exist in this graph.
    UnknownVertex(VertexId),
    /// The edge id does not exist in this graph.
    UnknownEdge(EdgeId),
    /// Labels must be positive.
    ZeroLabel,
    /// The label is already carried by another vertex.
    DuplicateLabel(Label),
    /// Suppression requires an unlabelled vertex of degree exactly two.
    NotSuppressible { vertex: VertexId, degree: usize },
    /// Suppression of a vertex whose two edge ends form its own loop would
    /// erase the component; it is rejected.
    SuppressLoop(VertexId),
    /// The vertex is labelled, so it cannot be suppressed.
    SuppressLabelled(VertexId),
    /// The vertex is not an endpoint of the edge.
    NotAnEndpoint { edge: EdgeId, vertex: VertexId },
    /// Pruning requires the chosen end to be a labelled leaf or an
    /// unlabelled degree-three vertex.
    NotPrunable { vertex: VertexId, degree: usize },
    /// Regrafting requires an unlabelled degree-one vertex (a sprout).
    NotASprout(VertexId),
    /// Regrafting onto a vertex requires a labelled degree-zero singleton.
    NotASingleton(VertexId),
}

impl fmt::Display for GraphError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GraphError::UnknownVertex(v) => write!(f, "unknown vertex {v}"),
            GraphError::UnknownEdge(e) => write!(f, "unknown edge {e}"),
            GraphError::ZeroLabel => write!(f, "labels must be positive"),
            GraphError::DuplicateLabel(l) => write!(f, "label {l} is already in use"),
            GraphError::NotSuppressible { vertex, degree } => {
                write!(f, "cannot suppress {vertex}: degree is {degree}, not 2")
            }
            GraphError::SuppressLoop(v) => {
                write!(f, "cannot suppress {v}: its two edge ends form a loop")
            }
            GraphError::SuppressLabelled(v) => {
                write!(f, "cannot suppress labelled vertex {v}")
            }
            GraphError::NotAnEndpoint { edge, vertex } => {
                write!(f, "{vertex} is not an endpoint of {edge}")
            }
            GraphError::NotPrunable { vertex, degree } => write!(
                f,
                "cannot prune at {vertex}: degree {degree} and not a labelled leaf"
            ),
            GraphError::NotASprout(v) => {
                write!(f, "{v} is not a sprout (unlabelled, degree 1)")
            }
            GraphError::NotASingleton(v) => {
                write!(f, "{v} is not a labelled singleton (degree 0)")
            }
        }
    }
}

impl core::error::Error for GraphError {}

// ── Regraft targets ──────────────────────────────────────────────────────

/// Where a sprout may be regrafted: into the interior of an edge, or onto a
/// labelled degree-zero singleton.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub enum RegraftTarget {
    /// Subdivide the edge and identify the sprout with the new vertex.
    Edge(EdgeId),
    /// Identify the sprout with the singleton; the singleton keeps its label.
    Singleton(VertexId),
}

// ── Graph ────────────────────────────────────────────────────────────────

#[derive(Clone, PartialEq, Eq, Debug)]
struct VertexRecord {
    label: Option<Label>,
    /// Incident edge ids; a loop appears twice. Kept sorted.
    incident: Vec<EdgeId>,
}

/// An undirected multigraph with loops, parallel edges, and optional unique
/// positive-integer labels on vertices.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct MultiGraph {
    vertices: BTreeMap<VertexId, VertexRecord>,
    edges: BTreeMap<EdgeId, (VertexId, VertexId)>,
    next_vertex: u32,
    next_edge: u32,
}

impl Default for MultiGraph {
    fn default() -> Self {
        Self::new()
    }
}

impl MultiGraph {
    /// Empty graph.
    pub fn new() -> Self {
        MultiGraph {
            vertices: BTreeMap::new(),
            edges: BTreeMap::new(),
            next_vertex: 0,
            next_edge: 0,
        }
    }

    // ── Construction ─────────────────────────────────────────────────

    /// Adds an unlabelled vertex and returns its id.
    pub fn add_vertex(&mut self) -> VertexId {
        let id = VertexId(self.next_vertex);
        self.next_vertex += 1;
        self.vertices.insert(
            id,
            VertexRecord {
                label: None,
                incident: Vec::new(),
            },
        );
        id
    }

    /// Adds a vertex carrying `label`. Labels must be positive and unique.
    pub fn add_labelled_vertex(&mut self, label: Label) -> Result<VertexId, GraphError> {
        if label.0 == 0 {
            return Err(GraphError::ZeroLabel);
        }
        if self.vertices.values().any(|r| r.label == Some(label)) {
            return Err(GraphError::DuplicateLabel(label));
        }
        let id = self.add_vertex();
        self.vertices.get_mut(&id).expect("just added").label = Some(label);
        Ok(id)
    }

    /// Adds an edge between `u` and `v`; `u == v` creates a loop.
    pub fn add_edge(&mut self, u: VertexId, v: VertexId) -> Result<EdgeId, GraphError> {
        if !self.vertices.contains_key(&u) {
            return Err(GraphError::UnknownVertex(u));
        }
        if !self.vertices.contains_key(&v) {
            return Err(GraphError::UnknownVertex(v));
        }
        let id = EdgeId(self.next_edge);
        self.next_edge += 1;
        let (a, b) = if u <= v { (u, v) } else { (v, u) };
        self.edges.insert(id, (a, b));
        self.attach(a, id);
        self.attach(b, id);
        Ok(id)
    }

    fn attach(&mut self, v: VertexId, e: EdgeId) {
        let rec = self.vertices.get_mut(&v).expect("endpoint exists");
        let pos = rec.incident.partition_point(|&x| x < e);
        rec.incident.insert(pos, e);
    }

    fn detach(&mut self, v: VertexId, e: EdgeId) {
        let rec = self.vertices.get_mut(&v).expect("endpoint exists");
        let pos = rec
            .incident
            .iter()
            .position(|&x| x == e)
            .expect("incidence recorded");
        rec.incident.remove(pos);
    }

    /// Deletes an edge without any suppression bookkeeping.
    fn delete_edge_raw(&mut self, e: EdgeId) {
        let (u, v) = self.edges.remove(&e).expect("edge exists");
        self.detach(u, e);
        self.detach(v, e);
    }

    /// Deletes an isolated or dangling vertex together with its incidences.
    fn delete_vertex_raw(&mut self, v: VertexId) {
        let rec = self.vertices.remove(&v).expect("vertex exists");
        debug_assert!(rec.incident.is_empty(), "delete only detached vertices");
    }

    // ── Queries ──────────────────────────────────────────────────────

    /// Number of vertices.
    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    /// Number of edges (loops count once).
    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Vertex ids in ascending order.
    pub fn vertex_ids(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.vertices.keys().copied()
    }

    /// Edge ids in ascending order.
    pub fn edge_ids(&self) -> impl Iterator<Item = EdgeId> + '_ {
        self.edges.keys().copied()
    }

    /// True if the vertex id exists.
    pub fn has_vertex(&self, v: VertexId) -> bool {
        self.vertices.contains_key(&v)
    }

    /// True if the edge id exists.
    pub fn has_edge(&self, e: EdgeId) -> bool {
        self.edges.contains_key(&e)
    }

    /// The two endpoints of an edge (equal for a loop), smaller id first.
    pub fn endpoints(&self, e: EdgeId) -> Result<(VertexId, VertexId), GraphError> {
        self.edges.get(&e).copied().ok_or(GraphError::UnknownEdge(e))
    }

    /// True if the edge is a loop.
    pub fn is_loop(&self, e: EdgeId) -> bool {
        matches!(self.edges.get(&e), Some((u, v)) if u == v)
    }

    /// Given one endpoint, the other endpoint of the edge (itself for loops).
    pub fn other_endpoint(&self, e: EdgeId, v: VertexId) -> Result<VertexId, GraphError> {
        let (a, b) = self.endpoints(e)?;
        if v == a {
            Ok(b)
        } else if v == b {
            Ok(a)
        } else {
            Err(GraphError::NotAnEndpoint { edge: e, vertex: v })
        }
    }

    /// Degree of `v`; loops count twice.
    pub fn degree(&self, v: VertexId) -> Result<usize, GraphError> {
        self.vertices
            .get(&v)
            .map(|r| r.incident.len())
            .ok_or(GraphError::UnknownVertex(v))
    }

    /// Incident edge ids in ascending order; a loop appears twice.
    pub fn incident_edges(&self, v: VertexId) -> Result<&[EdgeId], GraphError> {
        self.vertices
            .get(&v)
            .map(|r| r.incident.as_slice())
            .ok_or(GraphError::UnknownVertex(v))
    }

    /// The label of `v`, if any.
    pub fn label(&self, v: VertexId) -> Result<Option<Label>, GraphError> {
        self.vertices
            .get(&v)
            .map(|r| r.label)
            .ok_or(GraphError::UnknownVertex(v))
    }

    /// All (label, vertex) pairs in ascending label order.
    pub fn labelled_vertices(&self) -> Vec<(Label, VertexId)> {
        let mut out: Vec<(Label, VertexId)> = self
            .vertices
            .iter()
            .filter_map(|(&v, r)| r.label.map(|l| (l, v)))
            .collect();
        out.sort_unstable();
        out
    }

    /// The vertex carrying `label`, if present.
    pub fn vertex_with_label(&self, label: Label) -> Option<VertexId> {
        self.vertices
            .iter()
            .find(|(_, r)| r.label == Some(label))
            .map(|(&v, _)| v)
    }

    /// Unlabelled degree-one vertex.
    pub fn is_sprout(&self, v: VertexId) -> bool {
        matches!(self.vertices.get(&v), Some(r) if r.label.is_none() && r.incident.len() == 1)
    }

    /// Labelled degree-zero vertex.
    pub fn is_labelled_singleton(&self, v: VertexId) -> bool {
        matches!(self.vertices.get(&v), Some(r) if r.label.is_some() && r.incident.is_empty())
    }

    /// Ids of all sprouts, ascending.
    pub fn sprouts(&self) -> Vec<VertexId> {
        self.vertex_ids().filter(|&v| self.is_sprout(v)).collect()
    }

    /// Connected components as ascending vertex-id sets. Isolated vertices
    /// form their own components.
    pub fn components(&self) -> Vec<BTreeSet<VertexId>> {
        let mut seen: BTreeSet<VertexId> = BTreeSet::new();
        let mut out = Vec::new();
        for start in self.vertex_ids() {
            if seen.contains(&start) {
                continue;
            }
            let mut comp = BTreeSet::new();
            let mut stack = alloc::vec![start];
            while let Some(v) = stack.pop() {
                if !comp.insert(v) {
                    continue;
                }
                for &e in &self.vertices[&v].incident {
                    let (a, b) = self.edges[&e];
                    let w = if a == v { b } else { a };
                    if !comp.contains(&w) {
                        stack.push(w);
                    }
                }
            }
            seen.extend(comp.iter().copied());
            out.push(comp);
        }
        out
    }

    /// True if the graph is connected (the empty graph counts as connected).
    pub fn is_connected(&self) -> bool {
        self.components().len() <= 1
    }

    /// The subgraph induced by `keep`, preserving ids, labels, and counters.
    pub fn induced_subgraph(&self, keep: &BTreeSet<VertexId>) -> MultiGraph {
        let mut g = self.clone();
        let drop: Vec<VertexId> = g.vertex_ids().filter(|v| !keep.contains(v)).collect();
        for v in drop {
            let incident: Vec<EdgeId> = g.vertices[&v].incident.clone();
            let mut uniq = incident;
            uniq.dedup();
            for e in uniq {
                g.delete_edge_raw(e);
            }
            g.delete_vertex_raw(v);
        }
        g
    }

    /// The graph restricted to the edge set `keep` (all vertices retained).
    pub fn edge_subgraph(&self, keep: &BTreeSet<EdgeId>) -> MultiGraph {
        let mut g = self.clone();
        let drop: Vec<EdgeId> = g.edge_ids().filter(|e| !keep.contains(e)).collect();
        for e in drop {
            g.delete_edge_raw(e);
        }
        g
    }

    // ── Suboperations ────────────────────────────────────────────────

    /// Suppresses an unlabelled degree-two vertex: deletes the vertex and
    /// its two incident edges and joins the two far endpoints with a fresh
    /// edge. The far endpoints may coincide, in which case the fresh edge is
    /// a loop. A vertex whose two edge ends belong to its own loop cannot be
    /// suppressed.
    pub fn suppress_vertex(&self, v: VertexId) -> Result<MultiGraph, GraphError> {
        let rec = self.vertices.get(&v).ok_or(GraphError::UnknownVertex(v))?;
        if rec.label.is_some() {
            return Err(GraphError::SuppressLabelled(v));
        }
        if rec.incident.len() != 2 {
            return Err(GraphError::NotSuppressible {
                vertex: v,
                degree: rec.incident.len(),
            });
        }
        let (e1, e2) = (rec.incident[0], rec.incident[1]);
        if e1 == e2 {
            return Err(GraphError::SuppressLoop(v));
        }
        let mut g = self.clone();
        let a = g.other_endpoint(e1, v)?;
        let b = g.other_endpoint(e2, v)?;
        g.delete_edge_raw(e1);
        g.delete_edge_raw(e2);
        g.delete_vertex_raw(v);
        g.add_edge(a, b)?;
        Ok(g)
    }

    /// Subdivides an edge: replaces `{u, w}` with `{u, x}` and `{x, w}` for
    /// a fresh unlabelled vertex `x`, which is returned. Subdividing a loop
    /// yields a pair of parallel edges.
    pub fn subdivide_edge(&self, e: EdgeId) -> Result<(MultiGraph, VertexId), GraphError> {
        let (u, w) = self.endpoints(e)?;
        let mut g = self.clone();
        g.delete_edge_raw(e);
        let x = g.add_vertex();
        g.add_edge(u, x)?;
        g.add_edge(x, w)?;
        Ok((g, x))
    }

    /// Prunes the edge `e` at its endpoint `end`: the edge is detached from
    /// `end` and handed to a fresh sprout, which is returned. `end` must be
    /// a labelled degree-one leaf (which becomes a labelled singleton) or an
    /// unlabelled degree-three vertex (which is suppressed once its degree
    /// drops to two). Pruning a loop at its own vertex detaches the whole
    /// loop: the fresh edge runs from the sprout back to the vertex, which
    /// is then suppressed.
    pub fn prune_edge(&self, e: EdgeId, end: VertexId) -> Result<(MultiGraph, VertexId), GraphError> {
        let (a, b) = self.endpoints(e)?;
        if end != a && end != b {
            return Err(GraphError::NotAnEndpoint { edge: e, vertex: end });
        }
        let rec = &self.vertices[&end];
        let labelled_leaf = rec.label.is_some() && rec.incident.len() == 1;
        let internal = rec.label.is_none() && rec.incident.len() == 3;
        if !labelled_leaf && !internal {
            return Err(GraphError::NotPrunable {
                vertex: end,
                degree: rec.incident.len(),
            });
        }
        let other = if end == a && end == b {
            end // loop: the replacement edge returns to the same vertex
        } else if end == a {
            b
        } else {
            a
        };
        let mut g = self.clone();
        g.delete_edge_raw(e);
        let sprout = g.add_vertex();
        g.add_edge(sprout, other)?;
        if g.has_vertex(end) && g.vertices[&end].label.is_none() && g.degree(end)? == 2 {
            g = g.suppress_vertex(end)?;
        }
        Ok((g, sprout))
    }

    /// Regrafts the sprout `s` onto a target: into an edge (the edge is
    /// subdivided and the sprout identified with the subdivision vertex) or
    /// onto a labelled singleton (the sprout is identified with it).
    /// Regrafting a sprout into its own pendant edge produces a loop at the
    /// subdivision vertex.
    pub fn regraft_edge(&self, s: VertexId, target: RegraftTarget) -> Result<MultiGraph, GraphError> {
        if !self.has_vertex(s) {
            return Err(GraphError::UnknownVertex(s));
        }
        if !self.is_sprout(s) {
            return Err(GraphError::NotASprout(s));
        }
        match target {
            RegraftTarget::Edge(t) => {
                if !self.has_edge(t) {
                    return Err(GraphError::UnknownEdge(t));
                }
                let (g, x) = self.subdivide_edge(t)?;
                g.identify_sprout(s, x)
            }
            RegraftTarget::Singleton(x) => {
                if !self.has_vertex(x) {
                    return Err(GraphError::UnknownVertex(x));
                }
                if !self.is_labelled_singleton(x) {
                    return Err(GraphError::NotASingleton(x));
                }
                self.identify_sprout(s, x)
            }
        }
    }

    /// Re-points the sprout's pendant edge at `x` and deletes the sprout.
    fn identify_sprout(&self, s: VertexId, x: VertexId) -> Result<MultiGraph, GraphError> {
        debug_assert!(self.is_sprout(s));
        let mut g = self.clone();
        let pendant = g.vertices[&s].incident[0];
        let far = g.other_endpoint(pendant, s)?;
        g.delete_edge_raw(pendant);
        g.delete_vertex_raw(s);
        // The far endpoint is x itself when the sprout hung off the
        // subdivided edge; the re-pointed edge is then a loop at x.
        let far = if far == s { x } else { far };
        g.add_edge(x, far)?;
        Ok(g)
    }

    /// Removes an edge and suppresses each (former) endpoint that is left
    /// unlabelled with degree two. Suppression may create loops. An endpoint
    /// left with only its own loop cannot be suppressed and is kept as is;
    /// callers police validity of the result.
    pub fn remove_edge(&self, e: EdgeId) -> Result<MultiGraph, GraphError> {
        let (a, b) = self.endpoints(e)?;
        let mut g = self.clone();
        g.delete_edge_raw(e);
        for v in [a, b] {
            if v == b && a == b {
                continue; // loop removal: single endpoint
            }
            if g.has_vertex(v) && g.vertices[&v].label.is_none() && g.degree(v)? == 2 {
                match g.suppress_vertex(v) {
                    Ok(next) => g = next,
                    Err(GraphError::SuppressLoop(_)) => {}
                    Err(other) => return Err(other),
                }
            }
        }
        Ok(g)
    }

    // ── Canonical forms ──────────────────────────────────────────────

    /// Canonical code: equal codes exactly when the graphs are related by a
    /// label-preserving isomorphism.
    pub fn canonical_form(&self) -> CanonicalCode {
        canon::canonical_form(self)
    }

    /// Cheap isomorphism-invariant hash for prefiltering; equal codes imply
    /// equal hashes but not conversely.
    pub fn invariant_hash(&self) -> u64 {
        canon::invariant_hash(self)
    }
}
