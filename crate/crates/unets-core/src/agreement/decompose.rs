//! Red-black decompositions of a host network.
//!
//! Colouring some host edges red and the rest black proposes an embedding
//! in reverse: the red edges must split into disagreement trails and the
//! black remainder, with its degree-two vertices suppressed, yields the
//! agreement subgraphs together with their images. A colouring is viable
//! only when no unlabelled vertex has red degree exactly two, which pins
//! the trail count to half the number of odd-red-degree vertices.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::multigraph::{CanonicalCode, EdgeId, MultiGraph, VertexId};
use crate::phylo::PhyloNetwork;

use super::embedding::{find_label_iso, ComponentImage, TrailImage};
use super::AgreementError;

/// Largest host edge count the exhaustive colouring scan accepts.
const MAX_SCAN_EDGES: usize = 24;

/// One black component after suppression, with its embedding images.
#[derive(Clone, Debug)]
pub struct SuppressedComponent {
    /// The component as a standalone multigraph with fresh ids.
    pub graph: MultiGraph,
    /// Host vertex behind each component vertex.
    pub vertex_images: BTreeMap<VertexId, VertexId>,
    /// Host path behind each component edge, from the image of its smaller
    /// endpoint.
    pub edge_images: BTreeMap<EdgeId, Vec<EdgeId>>,
}

/// A full decomposition: the red edge set, the suppressed black
/// components, and a trail cover of the red edges.
#[derive(Clone, Debug)]
pub struct RedBlackDecomposition {
    pub red: BTreeSet<EdgeId>,
    pub components: Vec<SuppressedComponent>,
    pub trails: Vec<TrailImage>,
}

// ── Mask scan ────────────────────────────────────────────────────────────

/// All viable red subsets of a host, bucketed by forced trail count.
/// Computed once per host and reused across deepening levels.
pub(super) struct MaskScan {
    edges: Vec<EdgeId>,
    buckets: BTreeMap<u32, Vec<u64>>,
}

impl MaskScan {
    pub(super) fn new(host: &PhyloNetwork) -> Result<MaskScan, AgreementError> {
        let h = host.as_graph();
        let edges: Vec<EdgeId> = h.edge_ids().collect();
        if edges.len() > MAX_SCAN_EDGES {
            return Err(AgreementError::Malformed("host too large for exhaustive decomposition"));
        }
        let verts: Vec<VertexId> = h.vertex_ids().collect();
        let vidx: BTreeMap<VertexId, usize> = verts.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let labelled: Vec<bool> = verts
            .iter()
            .map(|&v| h.label(v).expect("vertex exists").is_some())
            .collect();
        let ends: Vec<(usize, usize)> = edges
            .iter()
            .map(|&e| {
                let (u, v) = h.endpoints(e).expect("edge exists");
                (vidx[&u], vidx[&v])
            })
            .collect();
        let mut buckets: BTreeMap<u32, Vec<u64>> = BTreeMap::new();
        for mask in 0..(1u64 << edges.len()) {
            let mut deg = [0u8; MAX_SCAN_EDGES + 1];
            let mut bits = mask;
            while bits != 0 {
                let i = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                deg[ends[i].0] += 1;
                deg[ends[i].1] += 1;
            }
            let mut odd = 0u32;
            let mut ok = true;
            for (i, &d) in deg.iter().take(verts.len()).enumerate() {
                if d == 2 && !labelled[i] {
                    ok = false;
                    break;
                }
                odd += u32::from(d & 1);
            }
            if ok {
                buckets.entry(odd / 2).or_default().push(mask);
            }
        }
        for masks in buckets.values_mut() {
            masks.sort_by_key(|m| (m.count_ones(), *m));
        }
        Ok(MaskScan { edges, buckets })
    }

    pub(super) fn bucket(&self, trails: u32) -> &[u64] {
        self.buckets.get(&trails).map_or(&[], |v| v.as_slice())
    }

    /// Largest trail count any viable colouring reaches.
    pub(super) fn max_trails(&self) -> u32 {
        self.buckets.keys().next_back().copied().unwrap_or(0)
    }

    pub(super) fn red_set(&self, mask: u64) -> BTreeSet<EdgeId> {
        self.edges
            .iter()
            .enumerate()
            .filter(|(i, _)| mask & (1u64 << i) != 0)
            .map(|(_, &e)| e)
            .collect()
    }
}

// ── Trail cover of the red edges ─────────────────────────────────────────

/// Splits the red edges into simple open trails obeying the weak ordering
/// discipline: a junction may serve as a trail endpoint only once some
/// earlier trail has passed through it. Returns the first cover found, in
/// construction order.
fn trail_decompose(h: &MultiGraph, red: &BTreeSet<EdgeId>) -> Option<Vec<TrailImage>> {
    if red.is_empty() {
        return Some(Vec::new());
    }
    let mut red_deg: BTreeMap<VertexId, usize> = BTreeMap::new();
    for &e in red {
        let (u, v) = h.endpoints(e).expect("edge exists");
        *red_deg.entry(u).or_insert(0) += 1;
        *red_deg.entry(v).or_insert(0) += 1;
    }
    let end_slot: BTreeSet<VertexId> =
        red_deg.iter().filter(|(_, &d)| d % 2 == 1).map(|(&v, _)| v).collect();
    let pass_slot: BTreeSet<VertexId> =
        red_deg.iter().filter(|(_, &d)| d == 3).map(|(&v, _)| v).collect();
    search_trails(h, &red_deg, red.clone(), end_slot, pass_slot, Vec::new())
}

fn attachable(red_deg: &BTreeMap<VertexId, usize>, end: &BTreeSet<VertexId>, pass: &BTreeSet<VertexId>, v: VertexId) -> bool {
    end.contains(&v) && (red_deg[&v] == 1 || !pass.contains(&v))
}

fn search_trails(
    h: &MultiGraph,
    red_deg: &BTreeMap<VertexId, usize>,
    rem: BTreeSet<EdgeId>,
    end_slot: BTreeSet<VertexId>,
    pass_slot: BTreeSet<VertexId>,
    acc: Vec<TrailImage>,
) -> Option<Vec<TrailImage>> {
    if rem.is_empty() {
        debug_assert!(end_slot.is_empty() && pass_slot.is_empty());
        return Some(acc);
    }
    let starts: Vec<VertexId> = end_slot
        .iter()
        .copied()
        .filter(|&v| attachable(red_deg, &end_slot, &pass_slot, v))
        .collect();
    for start in starts {
        let mut end2 = end_slot.clone();
        end2.remove(&start);
        let mut visited = BTreeSet::new();
        visited.insert(start);
        if let Some(found) = grow_trail(
            h, red_deg, &rem, &end2, &pass_slot, start, start, &visited, &Vec::new(), &acc,
        ) {
            return Some(found);
        }
    }
    None
}

#[allow(clippy::too_many_arguments)]
fn grow_trail(
    h: &MultiGraph,
    red_deg: &BTreeMap<VertexId, usize>,
    rem: &BTreeSet<EdgeId>,
    end_slot: &BTreeSet<VertexId>,
    pass_slot: &BTreeSet<VertexId>,
    start: VertexId,
    cur: VertexId,
    visited: &BTreeSet<VertexId>,
    path: &Vec<EdgeId>,
    acc: &Vec<TrailImage>,
) -> Option<Vec<TrailImage>> {
    for &e in h.incident_edges(cur).expect("vertex exists") {
        if !rem.contains(&e) || path.contains(&e) {
            continue;
        }
        let w = h.other_endpoint(e, cur).expect("incident");
        if visited.contains(&w) {
            continue;
        }
        let mut path2 = path.clone();
        path2.push(e);
        if attachable(red_deg, end_slot, pass_slot, w) {
            let mut rem2 = rem.clone();
            for &f in &path2 {
                rem2.remove(&f);
            }
            let mut end2 = end_slot.clone();
            end2.remove(&w);
            let mut acc2 = acc.clone();
            acc2.push(TrailImage { edges: path2.clone(), ends: (start, w) });
            if let Some(found) =
                search_trails(h, red_deg, rem2, end2, pass_slot.clone(), acc2)
            {
                return Some(found);
            }
        }
        if pass_slot.contains(&w) {
            let mut pass2 = pass_slot.clone();
            pass2.remove(&w);
            let mut visited2 = visited.clone();
            visited2.insert(w);
            if let Some(found) = grow_trail(
                h, red_deg, rem, end_slot, &pass2, start, w, &visited2, &path2, acc,
            ) {
                return Some(found);
            }
        }
    }
    None
}

// ── Suppression of the black remainder ───────────────────────────────────

/// A vertex of a suppressed component: either a surviving host vertex or a
/// fresh sprout standing for a detached edge end.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum NodeKey {
    Host(VertexId),
    Sprout(VertexId, EdgeId),
}

impl NodeKey {
    fn host_vertex(self) -> VertexId {
        match self {
            NodeKey::Host(v) | NodeKey::Sprout(v, _) => v,
        }
    }

    fn sort_key(self) -> (VertexId, u8, EdgeId) {
        match self {
            NodeKey::Host(v) => (v, 0, EdgeId(0)),
            NodeKey::Sprout(v, e) => (v, 1, e),
        }
    }
}

impl Ord for NodeKey {
    fn cmp(&self, other: &Self) -> Ordering {
        self.sort_key().cmp(&other.sort_key())
    }
}

impl PartialOrd for NodeKey {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Suppresses the black subgraph of `h` into components. A pair `(v, e)`
/// in `detach` cuts black edge `e` loose from its endpoint `v`, leaving a
/// sprout whose image stays at `v`. Unlabelled vertices of effective black
/// degree two are suppressed into path interiors, those of degree zero are
/// dropped, and black cycles without surviving vertices become loop
/// vertices based at their least host vertex.
pub(super) fn suppressed_components(
    h: &MultiGraph,
    red: &BTreeSet<EdgeId>,
    detach: &BTreeSet<(VertexId, EdgeId)>,
) -> Vec<SuppressedComponent> {
    let black: BTreeSet<EdgeId> = h.edge_ids().filter(|e| !red.contains(e)).collect();
    let eff = |v: VertexId| -> usize {
        h.incident_edges(v)
            .expect("vertex exists")
            .iter()
            .filter(|&&e| black.contains(&e) && !detach.contains(&(v, e)))
            .count()
    };
    let labelled = |v: VertexId| h.label(v).expect("vertex exists").is_some();
    let kept = |v: VertexId| labelled(v) || matches!(eff(v), 1 | 3);
    let step = |cur: VertexId, via: EdgeId| -> Option<EdgeId> {
        h.incident_edges(cur)
            .expect("vertex exists")
            .iter()
            .copied()
            .find(|&f| f != via && black.contains(&f) && !detach.contains(&(cur, f)))
    };
    let walk = |start_v: VertexId, first: EdgeId| -> (NodeKey, Vec<EdgeId>) {
        let mut path = alloc::vec![first];
        let mut prev = start_v;
        let mut e = first;
        loop {
            let cur = h.other_endpoint(e, prev).expect("incident");
            if detach.contains(&(cur, e)) {
                return (NodeKey::Sprout(cur, e), path);
            }
            if kept(cur) {
                return (NodeKey::Host(cur), path);
            }
            let next = step(cur, e).expect("interior vertex continues");
            path.push(next);
            prev = cur;
            e = next;
        }
    };

    let mut starts: Vec<(NodeKey, VertexId, EdgeId)> = Vec::new();
    for v in h.vertex_ids().filter(|&v| kept(v)) {
        for &e in h.incident_edges(v).expect("vertex exists") {
            if black.contains(&e) && !detach.contains(&(v, e)) {
                starts.push((NodeKey::Host(v), v, e));
            }
        }
    }
    for &(v, e) in detach {
        starts.push((NodeKey::Sprout(v, e), v, e));
    }
    starts.sort();

    let mut walks: Vec<(NodeKey, NodeKey, Vec<EdgeId>)> = Vec::new();
    let mut covered: BTreeSet<EdgeId> = BTreeSet::new();
    for (key, v, first) in starts {
        let (end, path) = walk(v, first);
        let forward = match key.cmp(&end) {
            Ordering::Less => true,
            Ordering::Greater => false,
            Ordering::Equal => path.first() <= path.last(),
        };
        if forward {
            covered.extend(path.iter().copied());
            walks.push((key, end, path));
        }
    }

    // Black edges no walk reached lie on interior-only cycles.
    let mut remaining: BTreeSet<EdgeId> = black.difference(&covered).copied().collect();
    while let Some(&seed) = remaining.iter().next() {
        let (anchor, _) = h.endpoints(seed).expect("edge exists");
        let mut cyc_verts = alloc::vec![anchor];
        let mut cyc_edges = alloc::vec![seed];
        let mut prev = anchor;
        let mut e = seed;
        loop {
            let cur = h.other_endpoint(e, prev).expect("incident");
            if cur == anchor {
                break;
            }
            cyc_verts.push(cur);
            let next = step(cur, e).expect("cycle continues");
            cyc_edges.push(next);
            prev = cur;
            e = next;
        }
        let base = cyc_verts.iter().copied().min().expect("cycle nonempty");
        let cyc_set: BTreeSet<EdgeId> = cyc_edges.iter().copied().collect();
        let first = h
            .incident_edges(base)
            .expect("vertex exists")
            .iter()
            .copied()
            .filter(|f| cyc_set.contains(f))
            .min()
            .expect("cycle edge at base");
        let mut path = alloc::vec![first];
        let mut prev = base;
        let mut e = first;
        loop {
            let cur = h.other_endpoint(e, prev).expect("incident");
            if cur == base {
                break;
            }
            let next = step(cur, e).expect("cycle continues");
            path.push(next);
            prev = cur;
            e = next;
        }
        for f in &path {
            remaining.remove(f);
        }
        walks.push((NodeKey::Host(base), NodeKey::Host(base), path));
    }

    let mut nodes: BTreeSet<NodeKey> = BTreeSet::new();
    for (s, t, _) in &walks {
        nodes.insert(*s);
        nodes.insert(*t);
    }
    for v in h.vertex_ids() {
        if labelled(v) && eff(v) == 0 {
            nodes.insert(NodeKey::Host(v));
        }
    }

    let mut adj: BTreeMap<NodeKey, Vec<NodeKey>> = BTreeMap::new();
    for (s, t, _) in &walks {
        adj.entry(*s).or_default().push(*t);
        adj.entry(*t).or_default().push(*s);
    }
    let mut seen: BTreeSet<NodeKey> = BTreeSet::new();
    let mut out = Vec::new();
    for &root in &nodes {
        if seen.contains(&root) {
            continue;
        }
        let mut comp: BTreeSet<NodeKey> = BTreeSet::new();
        let mut queue = alloc::vec![root];
        seen.insert(root);
        comp.insert(root);
        while let Some(n) = queue.pop() {
            for &m in adj.get(&n).into_iter().flatten() {
                if seen.insert(m) {
                    comp.insert(m);
                    queue.push(m);
                }
            }
        }
        let mut graph = MultiGraph::new();
        let mut ids: BTreeMap<NodeKey, VertexId> = BTreeMap::new();
        let mut vertex_images = BTreeMap::new();
        for &key in &comp {
            let vid = match key {
                NodeKey::Host(v) => match h.label(v).expect("vertex exists") {
                    Some(l) => graph.add_labelled_vertex(l).expect("fresh label"),
                    None => graph.add_vertex(),
                },
                NodeKey::Sprout(_, _) => graph.add_vertex(),
            };
            ids.insert(key, vid);
            vertex_images.insert(vid, key.host_vertex());
        }
        let mut comp_walks: Vec<&(NodeKey, NodeKey, Vec<EdgeId>)> =
            walks.iter().filter(|(s, _, _)| comp.contains(s)).collect();
        comp_walks.sort_by_key(|(s, t, p)| (*s, *t, p[0]));
        let mut edge_images = BTreeMap::new();
        for (s, t, path) in comp_walks {
            let eid = graph.add_edge(ids[s], ids[t]).expect("vertices exist");
            edge_images.insert(eid, path.clone());
        }
        out.push(SuppressedComponent { graph, vertex_images, edge_images });
    }
    out
}

/// Matches each subgraph to an isomorphic suppressed component, first fit
/// within equal canonical codes, and rewrites the component's images into
/// the subgraph's own coordinates. Edge paths are reversed where the
/// isomorphism flips their orientation.
pub(super) fn align_images(
    subgraphs: &[MultiGraph],
    targets: &[SuppressedComponent],
) -> Option<Vec<ComponentImage>> {
    if subgraphs.len() != targets.len() {
        return None;
    }
    let codes: Vec<CanonicalCode> = targets.iter().map(|t| t.graph.canonical_form()).collect();
    let mut taken = alloc::vec![false; targets.len()];
    let mut out = Vec::new();
    for s in subgraphs {
        let code = s.canonical_form();
        let pick = (0..targets.len()).find(|&i| !taken[i] && codes[i] == code)?;
        taken[pick] = true;
        let t = &targets[pick];
        let (vmap, emap) = find_label_iso(s, &t.graph)?;
        let vertex_images: BTreeMap<VertexId, VertexId> =
            vmap.iter().map(|(&v, &w)| (v, t.vertex_images[&w])).collect();
        let mut edge_images = BTreeMap::new();
        for e in s.edge_ids() {
            let (x, _) = s.endpoints(e).expect("edge exists");
            let f = emap[&e];
            let (fx, _) = t.graph.endpoints(f).expect("edge exists");
            let mut path = t.edge_images[&f].clone();
            if vmap[&x] != fx {
                path.reverse();
            }
            edge_images.insert(e, path);
        }
        out.push(ComponentImage { vertex_images, edge_images });
    }
    Some(out)
}

// ── Entry points ─────────────────────────────────────────────────────────

/// Builds the decomposition behind one viable red mask, if its red edges
/// admit a weakly ordered trail cover.
pub(super) fn decomposition_for_mask(
    host: &PhyloNetwork,
    scan: &MaskScan,
    mask: u64,
) -> Option<RedBlackDecomposition> {
    let red = scan.red_set(mask);
    let trails = trail_decompose(host.as_graph(), &red)?;
    let components = suppressed_components(host.as_graph(), &red, &BTreeSet::new());
    Some(RedBlackDecomposition { red, components, trails })
}

/// All decompositions of `host` with exactly `trails` disagreement trails,
/// in ascending (red cardinality, mask) order.
pub fn red_black_decompositions(
    host: &PhyloNetwork,
    trails: u32,
) -> Result<Vec<RedBlackDecomposition>, AgreementError> {
    let scan = MaskScan::new(host)?;
    Ok(scan
        .bucket(trails)
        .iter()
        .filter_map(|&mask| decomposition_for_mask(host, &scan, mask))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::multigraph::Label;

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

    #[test]
    fn quartet_bucket_sizes_match_hand_count() {
        let scan = MaskScan::new(&quartet()).unwrap();
        assert_eq!(scan.bucket(0).len(), 1);
        assert_eq!(scan.bucket(1).len(), 5);
        assert_eq!(scan.bucket(2).len(), 6);
        assert_eq!(scan.bucket(3).len(), 1);
        assert_eq!(scan.bucket(4).len(), 0);
    }

    #[test]
    fn quartet_single_trail_decompositions() {
        let host = quartet();
        let all = red_black_decompositions(&host, 1).unwrap();
        assert_eq!(all.len(), 5);
        // The mask taking only leaf 1's pendant edge leaves a singleton
        // plus the star on the other three leaves.
        let leaf1 = host.as_graph().vertex_with_label(Label(1)).unwrap();
        let pendant = host.as_graph().incident_edges(leaf1).unwrap()[0];
        let d = all
            .iter()
            .find(|d| d.red.len() == 1 && d.red.contains(&pendant))
            .expect("pendant mask viable");
        assert_eq!(d.trails.len(), 1);
        assert_eq!(d.components.len(), 2);
        let single = &d.components[0].graph;
        assert_eq!(single.vertex_count(), 1);
        assert_eq!(single.labelled_vertices(), alloc::vec![(Label(1), VertexId(0))]);
        let star = &d.components[1].graph;
        assert_eq!(star.vertex_count(), 4);
        assert_eq!(star.edge_count(), 3);
        assert!(star.sprouts().is_empty());
    }

    #[test]
    fn quartet_all_red_leaves_only_singletons() {
        let host = quartet();
        let all = red_black_decompositions(&host, 3).unwrap();
        assert_eq!(all.len(), 1);
        let d = &all[0];
        assert_eq!(d.red.len(), 5);
        assert_eq!(d.trails.len(), 3);
        assert_eq!(d.components.len(), 4);
        for c in &d.components {
            assert_eq!(c.graph.vertex_count(), 1);
            assert_eq!(c.graph.edge_count(), 0);
        }
    }

    #[test]
    fn parallel_pair_black_cycle_suppresses_to_loop() {
        let mut g = MultiGraph::new();
        let l1 = g.add_labelled_vertex(Label(1)).unwrap();
        let l2 = g.add_labelled_vertex(Label(2)).unwrap();
        let a = g.add_vertex();
        let b = g.add_vertex();
        let p1 = g.add_edge(l1, a).unwrap();
        let p2 = g.add_edge(l2, b).unwrap();
        g.add_edge(a, b).unwrap();
        g.add_edge(a, b).unwrap();
        let host = PhyloNetwork::validate(g).unwrap();
        let mut red = BTreeSet::new();
        red.insert(p1);
        red.insert(p2);
        let trails = trail_decompose(host.as_graph(), &red).unwrap();
        assert_eq!(trails.len(), 2);
        let comps = suppressed_components(host.as_graph(), &red, &BTreeSet::new());
        assert_eq!(comps.len(), 3);
        let looped = comps
            .iter()
            .find(|c| c.graph.edge_count() == 1)
            .expect("loop component");
        assert_eq!(looped.graph.vertex_count(), 1);
        let e = looped.graph.edge_ids().next().unwrap();
        assert!(looped.graph.is_loop(e));
        assert_eq!(looped.edge_images[&e].len(), 2);
        assert_eq!(looped.vertex_images[&VertexId(0)], a.min(b));
    }

    #[test]
    fn detaching_a_pendant_end_splits_off_a_sprouted_edge() {
        let host = quartet();
        let h = host.as_graph();
        let leaf1 = h.vertex_with_label(Label(1)).unwrap();
        let pendant = h.incident_edges(leaf1).unwrap()[0];
        let mid = h.other_endpoint(pendant, leaf1).unwrap();
        let mut detach = BTreeSet::new();
        detach.insert((mid, pendant));
        let comps = suppressed_components(h, &BTreeSet::new(), &detach);
        assert_eq!(comps.len(), 2);
        let sprouted = comps
            .iter()
            .find(|c| !c.graph.sprouts().is_empty())
            .expect("sprouted component");
        assert_eq!(sprouted.graph.vertex_count(), 2);
        assert_eq!(sprouted.graph.edge_count(), 1);
        assert_eq!(sprouted.graph.sprouts().len(), 1);
        let sprout = sprouted.graph.sprouts()[0];
        assert_eq!(sprouted.vertex_images[&sprout], mid);
        let star = comps.iter().find(|c| c.graph.sprouts().is_empty()).unwrap();
        assert_eq!(star.graph.vertex_count(), 4);
        assert_eq!(star.graph.edge_count(), 3);
    }

    #[test]
    fn weak_ordering_resolves_a_junction() {
        // All five quartet edges red: two junctions, three trails. The
        // junction trails must come after the trails that pass them.
        let host = quartet();
        let red: BTreeSet<EdgeId> = host.as_graph().edge_ids().collect();
        let trails = trail_decompose(host.as_graph(), &red).unwrap();
        assert_eq!(trails.len(), 3);
        let covered: usize = trails.iter().map(|t| t.edges.len()).sum();
        assert_eq!(covered, 5);
    }
}
