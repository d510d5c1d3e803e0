//! Exact shortest-path engines over rearrangement spaces.
//!
//! Distances are computed by breadth-first search with canonical-code
//! deduplication, restricted to networks whose tier lies inside a window.
//! The bidirectional mode alternates layer expansions from both endpoints
//! and stops at the first meet, which at that point is provably optimal:
//! after radii (F, B) are complete without a meet, any meet discovered in
//! the next layer has length exactly F + B + 1.
//!
//! Reported distances are exact within the window; the window itself is a
//! declared assumption, surfaced through [`distance_stability`], which
//! re-runs with a widened window and reports whether the value moved.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;
use core::fmt;

use crate::multigraph::CanonicalCode;
use crate::phylo::{PhyloNetwork, ReplugNetwork};
use crate::rearrange::{
    self, Move, MoveKind, RearrangementSequence,
};

// ── Configuration ────────────────────────────────────────────────────────

/// Which move family the search walks.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum OperationSet {
    Tbr,
    Pr,
    Replug,
}

/// Search parameters. When `window` is `None` the window is derived from
/// the query endpoints as `[max(0, min_tier - tier_slack), max_tier +
/// tier_slack]`; tiers are cyclomatic numbers in the replug space.
#[derive(Clone, Debug)]
pub struct SearchConfig {
    pub ops: OperationSet,
    pub window: Option<(u32, u32)>,
    pub tier_slack: u32,
    pub node_budget: usize,
    pub bidirectional: bool,
}

impl SearchConfig {
    /// Defaults: derived window with slack 1, two-million-node budget,
    /// bidirectional on.
    pub fn new(ops: OperationSet) -> Self {
        SearchConfig {
            ops,
            window: None,
            tier_slack: 1,
            node_budget: 2_000_000,
            bidirectional: true,
        }
    }

    fn resolve_window(&self, ta: u32, tb: u32) -> (u32, u32) {
        match self.window {
            Some(w) => w,
            None => {
                let lo = ta.min(tb).saturating_sub(self.tier_slack);
                let hi = ta.max(tb) + self.tier_slack;
                (lo, hi)
            }
        }
    }
}

/// A successful distance query.
#[derive(Clone, Debug)]
pub struct DistanceResult {
    pub distance: u32,
    pub witness: RearrangementSequence,
    pub explored: usize,
    pub window_used: (u32, u32),
}

/// Why a distance query failed.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum SearchError {
    /// The endpoints carry different label sets.
    LeafSetMismatch { a: u32, b: u32 },
    /// An explicit window excludes an endpoint's tier.
    WindowExcludesEndpoint { window: (u32, u32), tier: u32 },
    /// The node budget was reached before the search settled.
    BudgetExhausted { explored: usize },
    /// No path exists inside the window.
    Unreachable { window: (u32, u32), explored: usize },
}

impl fmt::Display for SearchError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SearchError::LeafSetMismatch { a, b } => {
                write!(f, "endpoints have {a} and {b} leaves")
            }
            SearchError::WindowExcludesEndpoint { window, tier } => {
                write!(f, "window [{}, {}] excludes tier {tier}", window.0, window.1)
            }
            SearchError::BudgetExhausted { explored } => {
                write!(f, "node budget exhausted after {explored} networks")
            }
            SearchError::Unreachable { window, explored } => write!(
                f,
                "no path within window [{}, {}] ({explored} networks explored)",
                window.0, window.1
            ),
        }
    }
}

impl core::error::Error for SearchError {}

// ── Space abstraction ────────────────────────────────────────────────────

#[derive(Clone)]
enum Net {
    Phylo(PhyloNetwork),
    Replug(ReplugNetwork),
}

impl Net {
    fn code(&self) -> CanonicalCode {
        match self {
            Net::Phylo(n) => n.canonical_form(),
            Net::Replug(n) => n.canonical_form(),
        }
    }

}

fn neighbors(net: &Net, ops: OperationSet, window: (u32, u32)) -> Vec<(CanonicalCode, Move, Net)> {
    match (net, ops) {
        (Net::Phylo(n), OperationSet::Tbr) | (Net::Phylo(n), OperationSet::Pr) => {
            let t = n.tier();
            let zero = if ops == OperationSet::Tbr {
                MoveKind::Tbr0
            } else {
                MoveKind::Pr0
            };
            let mut kinds = alloc::vec![zero];
            if t < window.1 {
                kinds.push(MoveKind::TbrPlus);
            }
            if t > window.0 {
                kinds.push(MoveKind::TbrMinus);
            }
            let map = if ops == OperationSet::Tbr {
                rearrange::tbr_neighbors(n, &kinds)
            } else {
                rearrange::pr_neighbors(n, &kinds)
            };
            map.into_iter()
                .map(|(code, (m, t))| (code, m, Net::Phylo(t)))
                .collect()
        }
        (Net::Replug(n), OperationSet::Replug) => rearrange::replug_neighbors(n)
            .into_iter()
            .filter(|(_, (_, t))| {
                let tier = t.tier();
                tier >= window.0 && tier <= window.1
            })
            .map(|(code, (m, t))| (code, m, Net::Replug(t)))
            .collect(),
        _ => unreachable!("operation set fixed per query"),
    }
}

// ── Engine ───────────────────────────────────────────────────────────────

struct NodeEntry {
    net: Net,
    dist: u32,
    parent: Option<(CanonicalCode, Move)>,
}

struct Side {
    map: BTreeMap<CanonicalCode, NodeEntry>,
    frontier: Vec<CanonicalCode>,
    radius: u32,
}

impl Side {
    fn seed(net: Net) -> Side {
        let code = net.code();
        let mut map = BTreeMap::new();
        map.insert(
            code.clone(),
            NodeEntry {
                net,
                dist: 0,
                parent: None,
            },
        );
        Side {
            map,
            frontier: alloc::vec![code],
            radius: 0,
        }
    }
}

fn run_bfs(
    a: Net,
    b: Net,
    ops: OperationSet,
    window: (u32, u32),
    node_budget: usize,
    bidirectional: bool,
) -> Result<(u32, CanonicalCode, Side, Side, usize), SearchError> {
    let code_a = a.code();
    let code_b = b.code();
    let mut fwd = Side::seed(a);
    let mut bwd = Side::seed(b);
    if code_a == code_b {
        return Ok((0, code_a, fwd, bwd, 1));
    }

    loop {
        // Pick the side to expand: forward only in unidirectional mode,
        // otherwise the side with the smaller frontier (forward on ties).
        let expand_fwd = !bidirectional || fwd.frontier.len() <= bwd.frontier.len();
        let (this, that) = if expand_fwd {
            (&mut fwd, &mut bwd)
        } else {
            (&mut bwd, &mut fwd)
        };
        if this.frontier.is_empty() {
            let explored = fwd.map.len() + bwd.map.len();
            return Err(SearchError::Unreachable { window, explored });
        }

        let frontier = core::mem::take(&mut this.frontier);
        let mut next: Vec<CanonicalCode> = Vec::new();
        let new_dist = this.radius + 1;
        for code in frontier {
            let net = this.map[&code].net.clone();
            for (tcode, mv, tnet) in neighbors(&net, ops, window) {
                if this.map.contains_key(&tcode) {
                    continue;
                }
                this.map.insert(
                    tcode.clone(),
                    NodeEntry {
                        net: tnet,
                        dist: new_dist,
                        parent: Some((code.clone(), mv)),
                    },
                );
                if let Some(other) = that.map.get(&tcode) {
                    // First meet: provably optimal (see module docs).
                    let d = new_dist + other.dist;
                    let explored = this.map.len() + that.map.len();
                    return Ok((d, tcode, fwd, bwd, explored));
                }
                next.push(tcode);
                if this.map.len() + that.map.len() > node_budget {
                    let explored = this.map.len() + that.map.len();
                    return Err(SearchError::BudgetExhausted { explored });
                }
            }
        }
        this.frontier = next;
        this.radius = new_dist;
    }
}

/// Rebuilds the move list a → meet → b from the two parent maps. Every
/// move is re-derived against the value produced by replaying the prefix,
/// so descriptors always reference identifiers that exist at replay time
/// (the stored backward-side representatives carry ids from the other
/// replay direction and cannot be used directly).
fn reconstruct(
    start: &Net,
    meet: &CanonicalCode,
    fwd: &Side,
    bwd: &Side,
    ops: OperationSet,
    window: (u32, u32),
) -> Vec<Move> {
    // Code path a → meet from the forward parents.
    let mut path: Vec<CanonicalCode> = alloc::vec![meet.clone()];
    while let Some((pcode, _)) = fwd.map[path.last().expect("nonempty")].parent.clone() {
        path.push(pcode);
    }
    path.reverse();
    // Continue meet → b from the backward parents.
    let mut cursor = meet.clone();
    while let Some((pcode, _)) = bwd.map[&cursor].parent.clone() {
        path.push(pcode.clone());
        cursor = pcode;
    }

    // Replay along the code path, looking each step's deterministic least
    // move up in the neighborhood of the current value.
    let mut moves = Vec::with_capacity(path.len() - 1);
    let mut current = start.clone();
    for next_code in path.into_iter().skip(1) {
        let (_, mv, net) = neighbors(&current, ops, window)
            .into_iter()
            .find(|(code, _, _)| *code == next_code)
            .expect("move sets are symmetric, so each path step exists");
        moves.push(mv);
        current = net;
    }
    moves
}

fn finish(
    a: &PhyloNetwork,
    b: &PhyloNetwork,
    start: &Net,
    outcome: (u32, CanonicalCode, Side, Side, usize),
    ops: OperationSet,
    window: (u32, u32),
) -> DistanceResult {
    let (distance, meet, fwd, bwd, explored) = outcome;
    let moves = reconstruct(start, &meet, &fwd, &bwd, ops, window);
    debug_assert_eq!(moves.len() as u32, distance);
    DistanceResult {
        distance,
        witness: RearrangementSequence {
            start: a.clone(),
            end: b.clone(),
            moves,
        },
        explored,
        window_used: window,
    }
}

/// Exact TBR or PR distance within the tier window.
pub fn bfs_distance(
    a: &PhyloNetwork,
    b: &PhyloNetwork,
    cfg: &SearchConfig,
) -> Result<DistanceResult, SearchError> {
    if a.leaf_count() != b.leaf_count() {
        return Err(SearchError::LeafSetMismatch {
            a: a.leaf_count(),
            b: b.leaf_count(),
        });
    }
    match cfg.ops {
        OperationSet::Tbr | OperationSet::Pr => {}
        OperationSet::Replug => return replug_distance(a, b, cfg),
    }
    let (ta, tb) = (a.tier(), b.tier());
    let window = cfg.resolve_window(ta, tb);
    for t in [ta, tb] {
        if t < window.0 || t > window.1 {
            return Err(SearchError::WindowExcludesEndpoint { window, tier: t });
        }
    }
    let start = Net::Phylo(a.clone());
    let outcome = run_bfs(
        start.clone(),
        Net::Phylo(b.clone()),
        cfg.ops,
        window,
        cfg.node_budget,
        cfg.bidirectional,
    )?;
    Ok(finish(a, b, &start, outcome, cfg.ops, window))
}

/// Exact replug distance within the (cyclomatic) tier window; endpoints
/// are proper networks, intermediates range over replug networks.
pub fn replug_distance(
    a: &PhyloNetwork,
    b: &PhyloNetwork,
    cfg: &SearchConfig,
) -> Result<DistanceResult, SearchError> {
    if a.leaf_count() != b.leaf_count() {
        return Err(SearchError::LeafSetMismatch {
            a: a.leaf_count(),
            b: b.leaf_count(),
        });
    }
    let ra = ReplugNetwork::from_phylo(a);
    let rb = ReplugNetwork::from_phylo(b);
    let (ta, tb) = (ra.tier(), rb.tier());
    let window = cfg.resolve_window(ta, tb);
    for t in [ta, tb] {
        if t < window.0 || t > window.1 {
            return Err(SearchError::WindowExcludesEndpoint { window, tier: t });
        }
    }
    let start = Net::Replug(ra);
    let outcome = run_bfs(
        start.clone(),
        Net::Replug(rb),
        OperationSet::Replug,
        window,
        cfg.node_budget,
        cfg.bidirectional,
    )?;
    Ok(finish(a, b, &start, outcome, OperationSet::Replug, window))
}

/// Whether the distance stays put when the window is widened by one tier
/// on each side.
#[derive(Clone, Debug)]
pub struct StabilityReport {
    pub base: DistanceResult,
    pub widened: DistanceResult,
    pub stable: bool,
}

/// Runs the query at the configured window and once more with the window
/// widened by one on both ends, reporting whether the distance moved.
pub fn distance_stability(
    a: &PhyloNetwork,
    b: &PhyloNetwork,
    cfg: &SearchConfig,
) -> Result<StabilityReport, SearchError> {
    let base = bfs_distance(a, b, cfg)?;
    let mut wide_cfg = cfg.clone();
    wide_cfg.window = Some((
        base.window_used.0.saturating_sub(1),
        base.window_used.1 + 1,
    ));
    let widened = bfs_distance(a, b, &wide_cfg)?;
    let stable = base.distance == widened.distance;
    Ok(StabilityReport {
        base,
        widened,
        stable,
    })
}

// ── Tier enumeration ─────────────────────────────────────────────────────

/// All proper networks with `n_leaves` leaves in the given tier, up to
/// label-preserving isomorphism: the tier-0 space is the TBR0 closure of a
/// caterpillar seed, and each higher tier is the TBR0 closure of all TBR⁺
/// lifts of the tier below.
pub fn enumerate_tier(
    n_leaves: u32,
    tier: u32,
) -> Result<BTreeMap<CanonicalCode, PhyloNetwork>, SearchError> {
    enumerate_tier_with_budget(n_leaves, tier, 1_000_000)
}

/// [`enumerate_tier`] with an explicit node budget.
pub fn enumerate_tier_with_budget(
    n_leaves: u32,
    tier: u32,
    budget: usize,
) -> Result<BTreeMap<CanonicalCode, PhyloNetwork>, SearchError> {
    let mut current: BTreeMap<CanonicalCode, PhyloNetwork> = BTreeMap::new();
    let seed = caterpillar(n_leaves);
    current.insert(seed.canonical_form(), seed);
    close_under_tbr0(&mut current, budget)?;
    for _ in 0..tier {
        let mut lifted: BTreeMap<CanonicalCode, PhyloNetwork> = BTreeMap::new();
        for net in current.values() {
            for (code, (_, t)) in rearrange::tbr_neighbors(net, &[MoveKind::TbrPlus]) {
                lifted.entry(code).or_insert(t);
                if lifted.len() > budget {
                    return Err(SearchError::BudgetExhausted {
                        explored: lifted.len(),
                    });
                }
            }
        }
        current = lifted;
        close_under_tbr0(&mut current, budget)?;
    }
    Ok(current)
}

fn close_under_tbr0(
    space: &mut BTreeMap<CanonicalCode, PhyloNetwork>,
    budget: usize,
) -> Result<(), SearchError> {
    let mut queue: Vec<CanonicalCode> = space.keys().cloned().collect();
    while let Some(code) = queue.pop() {
        let net = space[&code].clone();
        for (tcode, (_, t)) in rearrange::tbr_neighbors(&net, &[MoveKind::Tbr0]) {
            if !space.contains_key(&tcode) {
                space.insert(tcode.clone(), t);
                queue.push(tcode);
                if space.len() > budget {
                    return Err(SearchError::BudgetExhausted {
                        explored: space.len(),
                    });
                }
            }
        }
    }
    Ok(())
}

/// The caterpillar tree on 1..=n: leaves 1 and 2 share the head cherry,
/// labels increase along the spine.
pub fn caterpillar(n: u32) -> PhyloNetwork {
    use crate::multigraph::{Label, MultiGraph};
    let mut g = MultiGraph::new();
    match n {
        0 => panic!("caterpillar needs at least one leaf"),
        1 => {
            g.add_labelled_vertex(Label(1)).unwrap();
        }
        2 => {
            let a = g.add_labelled_vertex(Label(1)).unwrap();
            let b = g.add_labelled_vertex(Label(2)).unwrap();
            g.add_edge(a, b).unwrap();
        }
        _ => {
            let spine: Vec<_> = (0..n - 2).map(|_| g.add_vertex()).collect();
            for w in spine.windows(2) {
                g.add_edge(w[0], w[1]).unwrap();
            }
            let l1 = g.add_labelled_vertex(Label(1)).unwrap();
            let l2 = g.add_labelled_vertex(Label(2)).unwrap();
            g.add_edge(spine[0], l1).unwrap();
            g.add_edge(spine[0], l2).unwrap();
            for k in 3..=n {
                let idx = ((k - 2) as usize).min(spine.len() - 1);
                let v = g.add_labelled_vertex(Label(k)).unwrap();
                g.add_edge(spine[idx], v).unwrap();
            }
        }
    }
    PhyloNetwork::validate(g).expect("caterpillar construction is proper")
}

/// Convenience: the set of canonical codes of a tier (the spec surface of
/// [`enumerate_tier`]).
pub fn enumerate_tier_codes(n_leaves: u32, tier: u32) -> Result<BTreeSet<CanonicalCode>, SearchError> {
    Ok(enumerate_tier(n_leaves, tier)?.into_keys().collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::multigraph::{Label, MultiGraph};

    fn quartet(p: u32, q: u32, r: u32, s: u32) -> PhyloNetwork {
        let mut g = MultiGraph::new();
        let a = g.add_vertex();
        let b = g.add_vertex();
        for l in [p, q] {
            let v = g.add_labelled_vertex(Label(l)).unwrap();
            g.add_edge(a, v).unwrap();
        }
        for l in [r, s] {
            let v = g.add_labelled_vertex(Label(l)).unwrap();
            g.add_edge(b, v).unwrap();
        }
        g.add_edge(a, b).unwrap();
        PhyloNetwork::validate(g).unwrap()
    }

    #[test]
    fn caterpillar_shapes() {
        for n in 1..=6 {
            let c = caterpillar(n);
            assert_eq!(c.leaf_count(), n);
            assert_eq!(c.tier(), 0);
        }
    }

    #[test]
    fn distance_zero_has_empty_witness() {
        let q = quartet(1, 2, 3, 4);
        let cfg = SearchConfig::new(OperationSet::Tbr);
        let r = bfs_distance(&q, &q, &cfg).unwrap();
        assert_eq!(r.distance, 0);
        assert!(r.witness.is_empty());
        r.witness.replay().unwrap();
    }

    #[test]
    fn quartet_distances_are_one() {
        let a = quartet(1, 2, 3, 4);
        let b = quartet(1, 3, 2, 4);
        let cfg = SearchConfig::new(OperationSet::Tbr);
        let r = bfs_distance(&a, &b, &cfg).unwrap();
        assert_eq!(r.distance, 1);
        assert_eq!(r.witness.len(), 1);
        r.witness.replay().unwrap();
        // Symmetric.
        let r2 = bfs_distance(&b, &a, &cfg).unwrap();
        assert_eq!(r2.distance, 1);
        // PR agrees on trees one SPR apart.
        let cfg_pr = SearchConfig::new(OperationSet::Pr);
        assert_eq!(bfs_distance(&a, &b, &cfg_pr).unwrap().distance, 1);
        // An SPR is a replug.
        let cfg_rp = SearchConfig::new(OperationSet::Replug);
        let rr = replug_distance(&a, &b, &cfg_rp).unwrap();
        assert_eq!(rr.distance, 1);
        rr.witness.replay().unwrap();
    }

    #[test]
    fn leaf_mismatch_rejected() {
        let a = quartet(1, 2, 3, 4);
        let b = caterpillar(5);
        let cfg = SearchConfig::new(OperationSet::Tbr);
        assert!(matches!(
            bfs_distance(&a, &b, &cfg),
            Err(SearchError::LeafSetMismatch { a: 4, b: 5 })
        ));
    }

    #[test]
    fn tiny_budget_reported() {
        let a = caterpillar(6);
        // Three cherries around a centre, none shared with the caterpillar,
        // so the distance is at least two and no meet can precede the first
        // budget check.
        let b = {
            let mut g = MultiGraph::new();
            let centre = g.add_vertex();
            for (l1, l2) in [(1u32, 4u32), (2, 6), (3, 5)] {
                let root = g.add_vertex();
                g.add_edge(centre, root).unwrap();
                for l in [l1, l2] {
                    let v = g.add_labelled_vertex(Label(l)).unwrap();
                    g.add_edge(root, v).unwrap();
                }
            }
            PhyloNetwork::validate(g).unwrap()
        };
        let mut cfg = SearchConfig::new(OperationSet::Tbr);
        cfg.node_budget = 1;
        assert!(matches!(
            bfs_distance(&a, &b, &cfg),
            Err(SearchError::BudgetExhausted { .. })
        ));
    }

    #[test]
    fn window_monotonicity() {
        let a = quartet(1, 2, 3, 4);
        let b = quartet(1, 4, 2, 3);
        let mut narrow = SearchConfig::new(OperationSet::Tbr);
        narrow.window = Some((0, 0));
        let mut wide = SearchConfig::new(OperationSet::Tbr);
        wide.window = Some((0, 2));
        let dn = bfs_distance(&a, &b, &narrow).unwrap().distance;
        let dw = bfs_distance(&a, &b, &wide).unwrap().distance;
        assert!(dw <= dn);
        let report = distance_stability(&a, &b, &SearchConfig::new(OperationSet::Tbr)).unwrap();
        assert!(report.stable);
        assert_eq!(report.base.distance, 1);
    }

    #[test]
    fn explicit_window_must_contain_endpoints() {
        let a = quartet(1, 2, 3, 4);
        let mut cfg = SearchConfig::new(OperationSet::Tbr);
        cfg.window = Some((1, 2));
        assert!(matches!(
            bfs_distance(&a, &a, &cfg),
            Err(SearchError::WindowExcludesEndpoint { .. })
        ));
    }

    #[test]
    fn tier_zero_counts() {
        assert_eq!(enumerate_tier(4, 0).unwrap().len(), 3);
        assert_eq!(enumerate_tier(5, 0).unwrap().len(), 15);
    }

    #[test]
    fn enumerated_networks_validate_with_requested_tier() {
        for (n, r) in [(3u32, 0u32), (3, 1), (4, 0), (4, 1)] {
            let space = enumerate_tier(n, r).unwrap();
            assert!(!space.is_empty());
            for (code, net) in &space {
                assert_eq!(net.tier(), r);
                assert_eq!(net.leaf_count(), n);
                assert_eq!(&net.canonical_form(), code);
            }
        }
    }

    #[test]
    fn bidirectional_matches_unidirectional() {
        let a = caterpillar(5);
        let space = enumerate_tier(5, 0).unwrap();
        let mut bi = SearchConfig::new(OperationSet::Tbr);
        bi.bidirectional = true;
        let mut uni = bi.clone();
        uni.bidirectional = false;
        for b in space.values() {
            let db = bfs_distance(&a, b, &bi).unwrap();
            let du = bfs_distance(&a, b, &uni).unwrap();
            assert_eq!(db.distance, du.distance);
            db.witness.replay().unwrap();
            du.witness.replay().unwrap();
        }
    }
}
