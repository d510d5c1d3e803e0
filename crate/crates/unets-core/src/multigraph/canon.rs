//! Canonical forms for label-preserving multigraph isomorphism.
//!
//! The canonical code is the lexicographically least adjacency encoding over
//! all vertex orderings reachable by equitable refinement plus
//! individualization. Two graphs receive equal codes exactly when some
//! label-preserving isomorphism maps one onto the other (loops and edge
//! multiplicities included).

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use super::{MultiGraph, VertexId};

/// Total-ordered fingerprint of a graph up to label-preserving isomorphism.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct CanonicalCode(Vec<u8>);

impl CanonicalCode {
    /// Raw code bytes.
    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }
}

impl fmt::Display for CanonicalCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.0 {
            write!(f, "{b:02x}")?;
        }
        Ok(())
    }
}

/// Dense view of a multigraph for the refinement machinery.
struct Dense {
    n: usize,
    /// Multiplicity matrix; `adj[i][i]` counts loops (each loop once).
    adj: Vec<Vec<u16>>,
    /// Label per vertex, 0 for unlabelled.
    labels: Vec<u32>,
    /// Degree with loops counted twice.
    degrees: Vec<u32>,
    edge_total: usize,
}

impl Dense {
    fn build(g: &MultiGraph) -> Dense {
        let ids: Vec<VertexId> = g.vertex_ids().collect();
        let index: BTreeMap<VertexId, usize> =
            ids.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let n = ids.len();
        let mut adj = vec![vec![0u16; n]; n];
        for e in g.edge_ids() {
            let (u, v) = g.endpoints(e).expect("listed edge");
            let (i, j) = (index[&u], index[&v]);
            adj[i][j] += 1;
            if i != j {
                adj[j][i] += 1;
            }
        }
        let labels: Vec<u32> = ids
            .iter()
            .map(|&v| g.label(v).expect("listed vertex").map_or(0, |l| l.0))
            .collect();
        let degrees: Vec<u32> = (0..n)
            .map(|i| {
                let mut d = 0u32;
                for j in 0..n {
                    d += u32::from(adj[i][j]);
                }
                d + u32::from(adj[i][i]) // loop's second end
            })
            .collect();
        Dense {
            n,
            adj,
            labels,
            degrees,
            edge_total: g.edge_count(),
        }
    }

    /// Edge ends leaving `v` into the vertex set `cell`.
    fn ends_into(&self, v: usize, cell: &[usize]) -> u32 {
        let mut total = 0u32;
        for &w in cell {
            if w == v {
                total += 2 * u32::from(self.adj[v][v]);
            } else {
                total += u32::from(self.adj[v][w]);
            }
        }
        total
    }

    /// Splits every cell by edge ends into every cell until equitable. Cell
    /// order after a split follows ascending signature, so the refined
    /// partition depends only on the input partition up to isomorphism.
    fn refine(&self, partition: &mut Vec<Vec<usize>>) {
        loop {
            let mut changed = false;
            let snapshot = partition.clone();
            let mut next: Vec<Vec<usize>> = Vec::with_capacity(partition.len());
            for cell in partition.iter() {
                if cell.len() == 1 {
                    next.push(cell.clone());
                    continue;
                }
                let mut keyed: Vec<(Vec<u32>, usize)> = cell
                    .iter()
                    .map(|&v| {
                        let sig: Vec<u32> =
                            snapshot.iter().map(|d| self.ends_into(v, d)).collect();
                        (sig, v)
                    })
                    .collect();
                keyed.sort();
                let mut group: Vec<usize> = vec![keyed[0].1];
                let mut group_sig = &keyed[0].0;
                let mut split: Vec<Vec<usize>> = Vec::new();
                for (sig, v) in keyed.iter().skip(1) {
                    if sig == group_sig {
                        group.push(*v);
                    } else {
                        split.push(core::mem::take(&mut group));
                        group.push(*v);
                        group_sig = sig;
                    }
                }
                split.push(group);
                if split.len() > 1 {
                    changed = true;
                }
                next.extend(split);
            }
            *partition = next;
            if !changed {
                return;
            }
        }
    }

    /// Encodes the graph under a discrete ordering (cell i holds position-i
    /// vertex). Lexicographic comparison of encodings picks the canon.
    fn encode(&self, partition: &[Vec<usize>]) -> Vec<u8> {
        debug_assert!(partition.iter().all(|c| c.len() == 1));
        let order: Vec<usize> = partition.iter().map(|c| c[0]).collect();
        let mut code = Vec::with_capacity(8 + 4 * self.n + 8 * self.edge_total);
        push_u32(&mut code, self.n as u32);
        push_u32(&mut code, self.edge_total as u32);
        for &v in &order {
            push_u32(&mut code, self.labels[v]);
        }
        for (i, &v) in order.iter().enumerate() {
            for (j, &w) in order.iter().enumerate().skip(i) {
                let mult = self.adj[v][w];
                for _ in 0..mult {
                    push_u32(&mut code, i as u32);
                    push_u32(&mut code, j as u32);
                }
            }
        }
        code
    }

    /// Whether all vertices of the cell are mutually interchangeable: equal
    /// adjacency rows outside the cell, one multiplicity between any two
    /// cell members, one loop count. Any ordering of such a cell yields the
    /// same encoding, so the search need not branch on it.
    fn homogeneous(&self, cell: &[usize]) -> bool {
        let first = cell[0];
        let loops = self.adj[first][first];
        let cross = self.adj[first][cell[1]];
        for &u in cell {
            if self.adj[u][u] != loops {
                return false;
            }
            for &w in cell {
                if w != u && self.adj[u][w] != cross {
                    return false;
                }
            }
        }
        for w in 0..self.n {
            if cell.contains(&w) {
                continue;
            }
            if cell.iter().any(|&u| self.adj[u][w] != self.adj[first][w]) {
                return false;
            }
        }
        true
    }

    fn search(&self, mut partition: Vec<Vec<usize>>, best: &mut Option<Vec<u8>>) {
        self.refine(&mut partition);
        if let Some(pos) = partition.iter().position(|c| c.len() > 1) {
            let cell = partition[pos].clone();
            if self.homogeneous(&cell) {
                let mut branched: Vec<Vec<usize>> =
                    Vec::with_capacity(partition.len() + cell.len());
                branched.extend_from_slice(&partition[..pos]);
                branched.extend(cell.iter().map(|&v| vec![v]));
                branched.extend_from_slice(&partition[pos + 1..]);
                self.search(branched, best);
            } else {
                for &v in &cell {
                    let mut branched: Vec<Vec<usize>> =
                        Vec::with_capacity(partition.len() + 1);
                    branched.extend_from_slice(&partition[..pos]);
                    branched.push(vec![v]);
                    branched.push(cell.iter().copied().filter(|&w| w != v).collect());
                    branched.extend_from_slice(&partition[pos + 1..]);
                    self.search(branched, best);
                }
            }
        } else {
            let code = self.encode(&partition);
            match best {
                Some(b) if *b <= code => {}
                _ => *best = Some(code),
            }
        }
    }
}

fn push_u32(out: &mut Vec<u8>, v: u32) {
    out.extend_from_slice(&v.to_be_bytes());
}

/// Initial partition: cells grouped by (label, degree), ordered by that key.
fn initial_partition(d: &Dense) -> Vec<Vec<usize>> {
    let mut by_key: BTreeMap<(u32, u32), Vec<usize>> = BTreeMap::new();
    for v in 0..d.n {
        by_key
            .entry((d.labels[v], d.degrees[v]))
            .or_default()
            .push(v);
    }
    by_key.into_values().collect()
}

pub(super) fn canonical_form(g: &MultiGraph) -> CanonicalCode {
    let d = Dense::build(g);
    if d.n == 0 {
        let mut code = Vec::new();
        push_u32(&mut code, 0);
        push_u32(&mut code, 0);
        return CanonicalCode(code);
    }
    let partition = initial_partition(&d);
    let mut best = None;
    d.search(partition, &mut best);
    CanonicalCode(best.expect("nonempty graph yields a code"))
}

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x100_0000_01b3;

fn fnv_step(h: u64, byte: u8) -> u64 {
    (h ^ u64::from(byte)).wrapping_mul(FNV_PRIME)
}

fn fnv_u32(mut h: u64, v: u32) -> u64 {
    for b in v.to_be_bytes() {
        h = fnv_step(h, b);
    }
    h
}

fn fnv_u64(mut h: u64, v: u64) -> u64 {
    for b in v.to_be_bytes() {
        h = fnv_step(h, b);
    }
    h
}

/// One refinement round of neighborhood hashing: per vertex, hash (label,
/// degree, sorted neighbor (label, degree) multiset with loops visiting the
/// vertex itself twice), then hash the sorted per-vertex values.
pub(super) fn invariant_hash(g: &MultiGraph) -> u64 {
    let mut per_vertex: Vec<u64> = Vec::with_capacity(g.vertex_count());
    for v in g.vertex_ids() {
        let label = g.label(v).expect("listed vertex").map_or(0, |l| l.0);
        let incident = g.incident_edges(v).expect("listed vertex");
        let mut nb: Vec<(u32, u32)> = incident
            .iter()
            .map(|&e| {
                let w = g.other_endpoint(e, v).expect("incident edge");
                let wl = g.label(w).expect("endpoint").map_or(0, |l| l.0);
                let wd = g.degree(w).expect("endpoint") as u32;
                (wl, wd)
            })
            .collect();
        nb.sort_unstable();
        let mut h = FNV_OFFSET;
        h = fnv_u32(h, label);
        h = fnv_u32(h, incident.len() as u32);
        for (wl, wd) in nb {
            h = fnv_u32(h, wl);
            h = fnv_u32(h, wd);
        }
        per_vertex.push(h);
    }
    per_vertex.sort_unstable();
    let mut h = FNV_OFFSET;
    h = fnv_u32(h, g.vertex_count() as u32);
    h = fnv_u32(h, g.edge_count() as u32);
    for hv in per_vertex {
        h = fnv_u64(h, hv);
    }
    h
}

#[cfg(test)]
mod tests {
    use super::super::{Label, MultiGraph};

    #[test]
    fn empty_and_singleton_codes_differ() {
        let empty = MultiGraph::new();
        let mut single = MultiGraph::new();
        single.add_vertex();
        assert_ne!(empty.canonical_form(), single.canonical_form());
    }

    #[test]
    fn parallel_pair_differs_from_single_edge() {
        let mut a = MultiGraph::new();
        let u = a.add_vertex();
        let v = a.add_vertex();
        a.add_edge(u, v).unwrap();
        let mut b = a.clone();
        b.add_edge(u, v).unwrap();
        assert_ne!(a.canonical_form(), b.canonical_form());
    }

    #[test]
    fn loop_differs_from_parallel_pair() {
        let mut a = MultiGraph::new();
        let u = a.add_vertex();
        a.add_edge(u, u).unwrap();
        let mut b = MultiGraph::new();
        let x = b.add_vertex();
        let y = b.add_vertex();
        b.add_edge(x, y).unwrap();
        b.add_edge(x, y).unwrap();
        assert_ne!(a.canonical_form(), b.canonical_form());
    }

    #[test]
    fn labels_break_symmetry() {
        // Path 1 - x - 2 versus path 2 - x - 1 are isomorphic; but swapping
        // labels on an asymmetric graph must change the code.
        let mut a = MultiGraph::new();
        let l1 = a.add_labelled_vertex(Label(1)).unwrap();
        let x = a.add_vertex();
        let l2 = a.add_labelled_vertex(Label(2)).unwrap();
        a.add_edge(l1, x).unwrap();
        a.add_edge(x, l2).unwrap();

        let mut b = MultiGraph::new();
        let m2 = b.add_labelled_vertex(Label(2)).unwrap();
        let y = b.add_vertex();
        let m1 = b.add_labelled_vertex(Label(1)).unwrap();
        b.add_edge(m2, y).unwrap();
        b.add_edge(y, m1).unwrap();
        assert_eq!(a.canonical_form(), b.canonical_form());

        // 1 - x = degree asymmetry: label 1 on the degree-2 side vs label 2.
        let mut c = MultiGraph::new();
        let c1 = c.add_labelled_vertex(Label(1)).unwrap();
        let c2 = c.add_labelled_vertex(Label(2)).unwrap();
        let cx = c.add_vertex();
        c.add_edge(c1, cx).unwrap();
        c.add_edge(c1, cx).unwrap();
        c.add_edge(c2, cx).unwrap();

        let mut d = MultiGraph::new();
        let d1 = d.add_labelled_vertex(Label(1)).unwrap();
        let d2 = d.add_labelled_vertex(Label(2)).unwrap();
        let dx = d.add_vertex();
        d.add_edge(d2, dx).unwrap();
        d.add_edge(d2, dx).unwrap();
        d.add_edge(d1, dx).unwrap();
        assert_ne!(c.canonical_form(), d.canonical_form());
    }

    #[test]
    fn id_renaming_is_invisible() {
        // Same shape built in two different insertion orders.
        let mut a = MultiGraph::new();
        let a1 = a.add_labelled_vertex(Label(1)).unwrap();
        let ax = a.add_vertex();
        let ay = a.add_vertex();
        let a2 = a.add_labelled_vertex(Label(2)).unwrap();
        a.add_edge(a1, ax).unwrap();
        a.add_edge(ax, ay).unwrap();
        a.add_edge(ax, ay).unwrap();
        a.add_edge(ay, a2).unwrap();

        let mut b = MultiGraph::new();
        let by = b.add_vertex();
        let b2 = b.add_labelled_vertex(Label(2)).unwrap();
        let b1 = b.add_labelled_vertex(Label(1)).unwrap();
        let bx = b.add_vertex();
        b.add_edge(by, b2).unwrap();
        b.add_edge(bx, by).unwrap();
        b.add_edge(b1, bx).unwrap();
        b.add_edge(bx, by).unwrap();
        assert_eq!(a.canonical_form(), b.canonical_form());
        assert_eq!(a.invariant_hash(), b.invariant_hash());
    }

    #[test]
    fn interchangeable_cells_collapse_without_search_blowup() {
        // A dozen isolated vertices branch nowhere; counts still matter.
        let mut a = MultiGraph::new();
        for _ in 0..12 {
            a.add_vertex();
        }
        let mut b = a.clone();
        b.add_vertex();
        assert_ne!(a.canonical_form(), b.canonical_form());

        // Clique cells are homogeneous; an attached pendant is still seen.
        let mut k4 = MultiGraph::new();
        let vs: alloc::vec::Vec<_> = (0..4).map(|_| k4.add_vertex()).collect();
        for i in 0..4 {
            for j in (i + 1)..4 {
                k4.add_edge(vs[i], vs[j]).unwrap();
            }
        }
        let mut k4p = k4.clone();
        let p = k4p.add_vertex();
        k4p.add_edge(vs[2], p).unwrap();
        assert_ne!(k4.canonical_form(), k4p.canonical_form());
        let mut k4q = k4.clone();
        let q = k4q.add_vertex();
        k4q.add_edge(vs[0], q).unwrap();
        assert_eq!(k4p.canonical_form(), k4q.canonical_form());
    }

    #[test]
    fn invariant_hash_respects_codes_on_small_family() {
        // Build a family of small graphs; equal codes must give equal hashes.
        let mut graphs = alloc::vec::Vec::new();
        for loops in 0..3u32 {
            for par in 1..3u32 {
                let mut g = MultiGraph::new();
                let u = g.add_labelled_vertex(Label(1)).unwrap();
                let v = g.add_vertex();
                for _ in 0..par {
                    g.add_edge(u, v).unwrap();
                }
                for _ in 0..loops {
                    g.add_edge(v, v).unwrap();
                }
                graphs.push(g);
            }
        }
        for a in &graphs {
            for b in &graphs {
                if a.canonical_form() == b.canonical_form() {
                    assert_eq!(a.invariant_hash(), b.invariant_hash());
                }
            }
        }
    }
}
