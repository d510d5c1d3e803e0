//! Validated phylogenetic network types.
//!
//! [`PhyloNetwork`] wraps a multigraph that passed every clause of the
//! proper unrooted binary network definition; [`ReplugNetwork`] wraps the
//! relaxed form in which labelled singletons, loops, and disconnection are
//! tolerated. Both are sealed: the only way in is validation, so holding a
//! value is proof the invariants held at construction time.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;
use core::fmt;

use crate::multigraph::{CanonicalCode, EdgeId, Label, MultiGraph, VertexId};

// ── Validation diagnostics ───────────────────────────────────────────────

/// One violated clause of a network definition. Validation reports every
/// violated clause, not only the first.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum ValidationError {
    /// The graph is empty.
    Empty,
    /// The graph has more than one connected component.
    Disconnected { components: usize },
    /// A labelled vertex with degree above one.
    LabelledNotLeaf { vertex: VertexId, degree: usize },
    /// A labelled vertex of degree zero in a graph with other vertices
    /// (only rejected where singletons are not part of the definition).
    LabelledSingleton { vertex: VertexId },
    /// An unlabelled vertex whose degree is not three.
    BadDegree { vertex: VertexId, degree: usize },
    /// The labels present are not exactly 1..=n.
    LabelsNotContiguous { expected: u32, found: Vec<u32> },
    /// A cut edge with at least one side holding no labelled vertex.
    ImproperCutEdge { edge: EdgeId },
}

impl fmt::Display for ValidationError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ValidationError::Empty => write!(f, "graph is empty"),
            ValidationError::Disconnected { components } => {
                write!(f, "graph has {components} components, expected 1")
            }
            ValidationError::LabelledNotLeaf { vertex, degree } => {
                write!(f, "labelled vertex {vertex} has degree {degree}, expected at most 1")
            }
            ValidationError::LabelledSingleton { vertex } => {
                write!(f, "labelled vertex {vertex} is an isolated singleton")
            }
            ValidationError::BadDegree { vertex, degree } => {
                write!(f, "internal vertex {vertex} has degree {degree}, expected 3")
            }
            ValidationError::LabelsNotContiguous { expected, found } => {
                write!(f, "labels are not exactly 1..={expected}: found {found:?}")
            }
            ValidationError::ImproperCutEdge { edge } => {
                write!(f, "cut edge {edge} has a side without a labelled vertex")
            }
        }
    }
}

impl core::error::Error for ValidationError {}

fn check_labels_contiguous(g: &MultiGraph, errors: &mut Vec<ValidationError>) -> u32 {
    let labels: Vec<u32> = g.labelled_vertices().iter().map(|(l, _)| l.0).collect();
    let n = labels.len() as u32;
    let contiguous = labels.iter().copied().eq(1..=n);
    if !contiguous {
        errors.push(ValidationError::LabelsNotContiguous {
            expected: n,
            found: labels,
        });
    }
    n
}

/// Cut edges (bridges) of the graph; loops and parallel edges are never cut
/// edges. Returned ascending.
pub fn cut_edges(g: &MultiGraph) -> Vec<EdgeId> {
    g.edge_ids().filter(|&e| is_cut_edge(g, e)).collect()
}

/// Whether `e` is a cut edge. Loops never are; a parallel partner keeps
/// the endpoints connected, so parallel edges never are either.
pub fn is_cut_edge(g: &MultiGraph, e: EdgeId) -> bool {
    let (u, v) = g.endpoints(e).expect("listed edge");
    if u == v {
        return false;
    }
    // BFS from u avoiding e; e is a cut edge iff v is unreachable.
    let mut seen: BTreeSet<VertexId> = BTreeSet::new();
    let mut stack = alloc::vec![u];
    while let Some(x) = stack.pop() {
        if !seen.insert(x) {
            continue;
        }
        if x == v {
            return false;
        }
        for &f in g.incident_edges(x).expect("listed vertex") {
            if f == e {
                continue;
            }
            let y = g.other_endpoint(f, x).expect("incident");
            if !seen.contains(&y) {
                stack.push(y);
            }
        }
    }
    true
}

/// The side of cut edge `e` containing endpoint `u` (with `e` removed).
fn cut_side(g: &MultiGraph, e: EdgeId, u: VertexId) -> BTreeSet<VertexId> {
    let mut seen: BTreeSet<VertexId> = BTreeSet::new();
    let mut stack = alloc::vec![u];
    while let Some(x) = stack.pop() {
        if !seen.insert(x) {
            continue;
        }
        for &f in g.incident_edges(x).expect("listed vertex") {
            if f == e {
                continue;
            }
            let y = g.other_endpoint(f, x).expect("incident");
            if !seen.contains(&y) {
                stack.push(y);
            }
        }
    }
    seen
}

/// The first cut edge (ascending) with a labelled-vertex-free side, if any.
/// A graph is proper when this returns `None`.
pub fn improper_witness(g: &MultiGraph) -> Option<EdgeId> {
    for e in g.edge_ids() {
        if !is_cut_edge(g, e) {
            continue;
        }
        let (u, v) = g.endpoints(e).expect("listed edge");
        let side_u = cut_side(g, e, u);
        let u_has = side_u.iter().any(|&x| g.label(x).expect("vertex").is_some());
        let side_v = cut_side(g, e, v);
        let v_has = side_v.iter().any(|&x| g.label(x).expect("vertex").is_some());
        if !u_has || !v_has {
            return Some(e);
        }
    }
    None
}

// ── Proper networks ──────────────────────────────────────────────────────

/// A proper unrooted binary phylogenetic network: connected, labelled
/// degree-one leaves carrying exactly the labels 1..=n, every other vertex
/// of degree three, and every cut edge separating two labelled leaves.
/// Parallel edges are permitted; the definition excludes loops.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PhyloNetwork {
    graph: MultiGraph,
    n: u32,
}

impl PhyloNetwork {
    /// Checks every clause of the definition; on failure reports all
    /// violated clauses.
    pub fn validate(graph: MultiGraph) -> Result<PhyloNetwork, Vec<ValidationError>> {
        let mut errors = Vec::new();
        if graph.vertex_count() == 0 {
            return Err(alloc::vec![ValidationError::Empty]);
        }
        let comps = graph.components();
        if comps.len() != 1 {
            errors.push(ValidationError::Disconnected {
                components: comps.len(),
            });
        }
        let single_vertex = graph.vertex_count() == 1;
        for v in graph.vertex_ids() {
            let degree = graph.degree(v).expect("listed vertex");
            match graph.label(v).expect("listed vertex") {
                Some(_) => {
                    if degree > 1 {
                        errors.push(ValidationError::LabelledNotLeaf { vertex: v, degree });
                    } else if degree == 0 && !single_vertex {
                        errors.push(ValidationError::LabelledSingleton { vertex: v });
                    }
                }
                None => {
                    if degree != 3 {
                        errors.push(ValidationError::BadDegree { vertex: v, degree });
                    }
                }
            }
        }
        let n = check_labels_contiguous(&graph, &mut errors);
        if errors.is_empty() {
            if let Some(edge) = improper_witness(&graph) {
                errors.push(ValidationError::ImproperCutEdge { edge });
            }
        }
        if errors.is_empty() {
            Ok(PhyloNetwork { graph, n })
        } else {
            Err(errors)
        }
    }

    /// The underlying multigraph.
    pub fn as_graph(&self) -> &MultiGraph {
        &self.graph
    }

    /// Unwraps the multigraph.
    pub fn into_graph(self) -> MultiGraph {
        self.graph
    }

    /// Number of leaves (and of labels).
    pub fn leaf_count(&self) -> u32 {
        self.n
    }

    /// Tier: the number of edges beyond a spanning tree.
    pub fn tier(&self) -> u32 {
        (self.graph.edge_count() + 1 - self.graph.vertex_count()) as u32
    }

    /// Canonical code of the underlying graph.
    pub fn canonical_form(&self) -> CanonicalCode {
        self.graph.canonical_form()
    }

    /// Cheap isomorphism-invariant hash of the underlying graph.
    pub fn invariant_hash(&self) -> u64 {
        self.graph.invariant_hash()
    }

    /// Leaf vertex per label, ascending by label.
    pub fn leaves(&self) -> Vec<(Label, VertexId)> {
        self.graph.labelled_vertices()
    }

    /// True when this network displays `tree`: some subgraph is a
    /// subdivision of the tree.
    pub fn displays(&self, tree: &PhyloNetwork) -> bool {
        displays(self, tree)
    }
}

// ── Replug networks ──────────────────────────────────────────────────────

/// A network in the relaxed replug space: labelled vertices are degree-one
/// leaves or degree-zero singletons carrying exactly the labels 1..=n, and
/// every unlabelled vertex has degree three. Loops, parallel edges, and
/// disconnection are all tolerated; sprouts and unlabelled isolated
/// vertices are not.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ReplugNetwork {
    graph: MultiGraph,
    n: u32,
}

impl ReplugNetwork {
    /// Checks every clause of the replug definition; on failure reports all
    /// violated clauses.
    pub fn validate(graph: MultiGraph) -> Result<ReplugNetwork, Vec<ValidationError>> {
        let mut errors = Vec::new();
        if graph.vertex_count() == 0 {
            return Err(alloc::vec![ValidationError::Empty]);
        }
        for v in graph.vertex_ids() {
            let degree = graph.degree(v).expect("listed vertex");
            match graph.label(v).expect("listed vertex") {
                Some(_) => {
                    if degree > 1 {
                        errors.push(ValidationError::LabelledNotLeaf { vertex: v, degree });
                    }
                }
                None => {
                    if degree != 3 {
                        errors.push(ValidationError::BadDegree { vertex: v, degree });
                    }
                }
            }
        }
        let n = check_labels_contiguous(&graph, &mut errors);
        if errors.is_empty() {
            Ok(ReplugNetwork { graph, n })
        } else {
            Err(errors)
        }
    }

    /// Embeds a proper network into the replug space (always valid).
    pub fn from_phylo(network: &PhyloNetwork) -> ReplugNetwork {
        ReplugNetwork {
            graph: network.as_graph().clone(),
            n: network.leaf_count(),
        }
    }

    /// The underlying multigraph.
    pub fn as_graph(&self) -> &MultiGraph {
        &self.graph
    }

    /// Unwraps the multigraph.
    pub fn into_graph(self) -> MultiGraph {
        self.graph
    }

    /// Number of labels.
    pub fn leaf_count(&self) -> u32 {
        self.n
    }

    /// Tier in the replug space: the cyclomatic number
    /// `|E| - |V| + #components`, which agrees with the proper tier on
    /// connected networks.
    pub fn tier(&self) -> u32 {
        let c = self.graph.components().len();
        (self.graph.edge_count() + c - self.graph.vertex_count()) as u32
    }

    /// Canonical code of the underlying graph.
    pub fn canonical_form(&self) -> CanonicalCode {
        self.graph.canonical_form()
    }

    /// Cheap isomorphism-invariant hash of the underlying graph.
    pub fn invariant_hash(&self) -> u64 {
        self.graph.invariant_hash()
    }

    /// True when the underlying graph is also a proper network.
    pub fn is_proper(&self) -> bool {
        PhyloNetwork::validate(self.graph.clone()).is_ok()
    }
}

// ── Display relation ─────────────────────────────────────────────────────

/// True when `network` contains a subgraph that is a subdivision of `tree`.
/// The tree must be a tier-zero network on the same label set.
pub fn displays(network: &PhyloNetwork, tree: &PhyloNetwork) -> bool {
    if tree.tier() != 0 || network.leaf_count() != tree.leaf_count() {
        return false;
    }
    let n = network.leaf_count();
    if n == 0 {
        return true;
    }
    let ng = network.as_graph();
    let tg = tree.as_graph();
    if n == 1 {
        return true; // both are the single labelled vertex
    }

    // Map tree vertices to network vertices; leaves are forced by label.
    let mut image: alloc::collections::BTreeMap<VertexId, VertexId> =
        alloc::collections::BTreeMap::new();
    for (label, tv) in tg.labelled_vertices() {
        let nv = ng.vertex_with_label(label).expect("same label set");
        image.insert(tv, nv);
    }

    // Order the tree edges so each one touches an already-mapped vertex.
    let mut ordered: Vec<EdgeId> = Vec::new();
    let mut reached: BTreeSet<VertexId> = image.keys().copied().collect();
    let mut remaining: BTreeSet<EdgeId> = tg.edge_ids().collect();
    while !remaining.is_empty() {
        let next = remaining
            .iter()
            .copied()
            .find(|&e| {
                let (u, v) = tg.endpoints(e).expect("edge");
                reached.contains(&u) || reached.contains(&v)
            })
            .expect("tree is connected");
        remaining.remove(&next);
        let (u, v) = tg.endpoints(next).expect("edge");
        reached.insert(u);
        reached.insert(v);
        ordered.push(next);
    }

    let mut used_vertices: BTreeSet<VertexId> = image.values().copied().collect();
    let mut used_edges: BTreeSet<EdgeId> = BTreeSet::new();
    embed_edges(
        ng,
        tg,
        &ordered,
        0,
        &mut image,
        &mut used_vertices,
        &mut used_edges,
    )
}

/// Tries to realize tree edge `ordered[idx]` as a path in `ng` whose
/// interior avoids all vertices used so far, then recurses.
fn embed_edges(
    ng: &MultiGraph,
    tg: &MultiGraph,
    ordered: &[EdgeId],
    idx: usize,
    image: &mut alloc::collections::BTreeMap<VertexId, VertexId>,
    used_vertices: &mut BTreeSet<VertexId>,
    used_edges: &mut BTreeSet<EdgeId>,
) -> bool {
    if idx == ordered.len() {
        return true;
    }
    let (tu, tv) = tg.endpoints(ordered[idx]).expect("edge");
    // Walk from a mapped endpoint; the other may be mapped or fresh.
    let (start_t, goal_t) = if image.contains_key(&tu) {
        (tu, tv)
    } else {
        (tv, tu)
    };
    let start = *image.get(&start_t).expect("ordered ensures one mapped end");
    let goal = image.get(&goal_t).copied();

    // Depth-first over simple paths from `start`.
    let mut path_vertices: Vec<VertexId> = alloc::vec![start];
    let mut path_edges: Vec<EdgeId> = Vec::new();
    extend_path(
        ng,
        tg,
        ordered,
        idx,
        image,
        used_vertices,
        used_edges,
        goal_t,
        goal,
        &mut path_vertices,
        &mut path_edges,
    )
}

#[allow(clippy::too_many_arguments)]
fn extend_path(
    ng: &MultiGraph,
    tg: &MultiGraph,
    ordered: &[EdgeId],
    idx: usize,
    image: &mut alloc::collections::BTreeMap<VertexId, VertexId>,
    used_vertices: &mut BTreeSet<VertexId>,
    used_edges: &mut BTreeSet<EdgeId>,
    goal_t: VertexId,
    goal: Option<VertexId>,
    path_vertices: &mut Vec<VertexId>,
    path_edges: &mut Vec<EdgeId>,
) -> bool {
    let here = *path_vertices.last().expect("path starts nonempty");
    for &e in ng.incident_edges(here).expect("vertex") {
        if used_edges.contains(&e) || path_edges.contains(&e) {
            continue;
        }
        let next = ng.other_endpoint(e, here).expect("incident");
        if path_vertices.contains(&next) {
            continue; // keep the path simple
        }
        let arrived = match goal {
            Some(g) => next == g,
            // A fresh branch vertex must be an unused internal vertex; it
            // may also be passed through, so both options are explored.
            None => false,
        };
        if arrived {
            path_edges.push(e);
            for &w in path_edges.iter() {
                used_edges.insert(w);
            }
            for &w in &path_vertices[1..] {
                used_vertices.insert(w);
            }
            if embed_edges(ng, tg, ordered, idx + 1, image, used_vertices, used_edges) {
                return true;
            }
            for &w in path_edges.iter() {
                used_edges.remove(&w);
            }
            for &w in &path_vertices[1..] {
                used_vertices.remove(&w);
            }
            path_edges.pop();
            continue;
        }
        if used_vertices.contains(&next) {
            continue; // may not pass through another image or path interior
        }
        if ng.label(next).expect("vertex").is_some() {
            continue; // foreign leaves cannot appear inside a path
        }
        if goal.is_none() {
            // Option A: `next` becomes the image of the fresh tree vertex.
            path_edges.push(e);
            image.insert(goal_t, next);
            used_vertices.insert(next);
            for &w in path_edges.iter() {
                used_edges.insert(w);
            }
            for &w in &path_vertices[1..] {
                used_vertices.insert(w);
            }
            if embed_edges(ng, tg, ordered, idx + 1, image, used_vertices, used_edges) {
                return true;
            }
            for &w in path_edges.iter() {
                used_edges.remove(&w);
            }
            for &w in &path_vertices[1..] {
                used_vertices.remove(&w);
            }
            used_vertices.remove(&next);
            image.remove(&goal_t);
            path_edges.pop();
        }
        // Option B: pass through `next`.
        path_vertices.push(next);
        path_edges.push(e);
        if extend_path(
            ng,
            tg,
            ordered,
            idx,
            image,
            used_vertices,
            used_edges,
            goal_t,
            goal,
            path_vertices,
            path_edges,
        ) {
            return true;
        }
        path_edges.pop();
        path_vertices.pop();
    }
    false
}
