//! Neighborhood generators for the TBR, PR, and replug operations.
//!
//! Each generator enumerates attachment descriptors, executes them through
//! the single shared executor [`apply_phylo`] / [`apply_replug`] use, and
//! keeps exactly the results that re-validate in the target space. A
//! neighborhood is returned deduplicated by canonical code; every retained
//! network keeps the lexicographically least [`Move`] that produces it, so
//! traces are deterministic.
//!
//! Kind arithmetic: plus-kinds raise the tier by one, minus-kinds lower it
//! by one, and zero/horizontal kinds preserve it (for replug, tier means
//! the cyclomatic number, so removing or re-adding a bridge is
//! tier-preserving there).

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::fmt;

use crate::multigraph::{
    CanonicalCode, EdgeId, GraphError, MultiGraph, RegraftTarget, VertexId,
};
use crate::phylo::{self, PhyloNetwork, ReplugNetwork, ValidationError};

// ── Moves ────────────────────────────────────────────────────────────────

/// Operation taxonomy.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub enum MoveKind {
    Tbr0,
    TbrPlus,
    TbrMinus,
    Pr0,
    ReplugH,
    ReplugPlus,
    ReplugMinus,
}

/// Where a freshly created endpoint attaches: inside an edge (which is
/// subdivided) or onto a labelled degree-zero singleton.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub enum Attachment {
    OnEdge(EdgeId),
    OnSingleton(VertexId),
}

/// A single rearrangement step, recorded as the descriptors needed to
/// replay it deterministically against its source network. Edge ids in
/// `second`-style fields refer to the graph after the earlier suboperations
/// of the same move (so a second subdivision may name a half produced by
/// the first); replay is still deterministic because identifier allocation
/// is.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub enum Move {
    /// Remove an internal edge, subdivide `first` then `second`, join the
    /// two subdivision vertices.
    Tbr0Internal {
        removed: EdgeId,
        first: EdgeId,
        second: EdgeId,
    },
    /// Prune an external edge at its internal endpoint, regraft the sprout
    /// into `target`.
    Tbr0External {
        pruned: EdgeId,
        at: VertexId,
        target: EdgeId,
    },
    /// Subdivide `first` then `second`, join the subdivision vertices.
    TbrPlus { first: EdgeId, second: EdgeId },
    /// Remove a non-cut edge.
    TbrMinus { removed: EdgeId },
    /// Prune any edge at one internal endpoint, regraft into `target`.
    Pr0 {
        pruned: EdgeId,
        at: VertexId,
        target: EdgeId,
    },
    /// Replug horizontal: prune at an endpoint (internal or labelled leaf),
    /// regraft anywhere, including loop-creating self-attachments and
    /// labelled singletons.
    ReplugH {
        pruned: EdgeId,
        at: VertexId,
        target: Attachment,
    },
    /// Replug vertical add: join two attachment points with a new edge.
    ReplugPlus { first: Attachment, second: Attachment },
    /// Replug vertical remove: remove any edge whose removal leaves a valid
    /// replug network.
    ReplugMinus { removed: EdgeId },
}

impl Move {
    /// The taxonomy kind of this move.
    pub fn kind(&self) -> MoveKind {
        match self {
            Move::Tbr0Internal { .. } | Move::Tbr0External { .. } => MoveKind::Tbr0,
            Move::TbrPlus { .. } => MoveKind::TbrPlus,
            Move::TbrMinus { .. } => MoveKind::TbrMinus,
            Move::Pr0 { .. } => MoveKind::Pr0,
            Move::ReplugH { .. } => MoveKind::ReplugH,
            Move::ReplugPlus { .. } => MoveKind::ReplugPlus,
            Move::ReplugMinus { .. } => MoveKind::ReplugMinus,
        }
    }
}

// ── Errors ───────────────────────────────────────────────────────────────

/// Why a move could not be applied.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum MoveError {
    /// A suboperation failed (missing id, bad degree, ...).
    Graph(GraphError),
    /// TBR0 internal requires both endpoints of the removed edge unlabelled.
    NotInternalEdge(EdgeId),
    /// The prune endpoint must be unlabelled for this kind.
    NotInternalEndpoint(VertexId),
    /// TBR⁻ may not remove a cut edge.
    CutEdge(EdgeId),
    /// TBR⁻ suppression may not yield a loop.
    LoopAfterSuppression(EdgeId),
    /// The move kind does not belong to the space it was applied in.
    WrongSpace(MoveKind),
    /// The result failed validation in the target space.
    InvalidResult(Vec<ValidationError>),
}

impl From<GraphError> for MoveError {
    fn from(e: GraphError) -> Self {
        MoveError::Graph(e)
    }
}

impl fmt::Display for MoveError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MoveError::Graph(e) => write!(f, "suboperation failed: {e}"),
            MoveError::NotInternalEdge(e) => {
                write!(f, "edge {e} is not internal (a labelled endpoint)")
            }
            MoveError::NotInternalEndpoint(v) => {
                write!(f, "prune endpoint {v} is labelled")
            }
            MoveError::CutEdge(e) => write!(f, "edge {e} is a cut edge"),
            MoveError::LoopAfterSuppression(e) => {
                write!(f, "removing {e} would create a loop by suppression")
            }
            MoveError::WrongSpace(k) => write!(f, "move kind {k:?} not valid in this space"),
            MoveError::InvalidResult(errs) => {
                write!(f, "result is not a valid network ({} clauses)", errs.len())
            }
        }
    }
}

impl core::error::Error for MoveError {}

// ── Shared executor ──────────────────────────────────────────────────────

/// Executes a move on the raw graph without final-space validation.
/// Per-kind structural restrictions are enforced here so generators and
/// replay share one code path.
fn execute(g: &MultiGraph, m: &Move) -> Result<MultiGraph, MoveError> {
    match *m {
        Move::Tbr0Internal {
            removed,
            first,
            second,
        } => {
            let (a, b) = g.endpoints(removed)?;
            if g.label(a)?.is_some() || g.label(b)?.is_some() {
                return Err(MoveError::NotInternalEdge(removed));
            }
            let h = g.remove_edge(removed)?;
            let (h, u) = h.subdivide_edge(first)?;
            let (mut h, v) = h.subdivide_edge(second)?;
            h.add_edge(u, v)?;
            Ok(h)
        }
        Move::Tbr0External { pruned, at, target } | Move::Pr0 { pruned, at, target } => {
            if g.label(at)?.is_some() {
                return Err(MoveError::NotInternalEndpoint(at));
            }
            let (h, sprout) = g.prune_edge(pruned, at)?;
            Ok(h.regraft_edge(sprout, RegraftTarget::Edge(target))?)
        }
        Move::TbrPlus { first, second } => {
            let (h, u) = g.subdivide_edge(first)?;
            let (mut h, v) = h.subdivide_edge(second)?;
            h.add_edge(u, v)?;
            Ok(h)
        }
        Move::TbrMinus { removed } => {
            if !g.has_edge(removed) {
                return Err(MoveError::Graph(GraphError::UnknownEdge(removed)));
            }
            if phylo::cut_edges(g).contains(&removed) {
                return Err(MoveError::CutEdge(removed));
            }
            let h = g.remove_edge(removed)?;
            if h.edge_ids().any(|e| h.is_loop(e)) {
                return Err(MoveError::LoopAfterSuppression(removed));
            }
            Ok(h)
        }
        Move::ReplugH { pruned, at, target } => {
            let (h, sprout) = g.prune_edge(pruned, at)?;
            let target = match target {
                Attachment::OnEdge(e) => RegraftTarget::Edge(e),
                Attachment::OnSingleton(v) => RegraftTarget::Singleton(v),
            };
            Ok(h.regraft_edge(sprout, target)?)
        }
        Move::ReplugPlus { first, second } => {
            let (h, u) = resolve_attachment(g.clone(), first)?;
            let (mut h, v) = resolve_attachment(h, second)?;
            h.add_edge(u, v)?;
            Ok(h)
        }
        Move::ReplugMinus { removed } => Ok(g.remove_edge(removed)?),
    }
}

fn resolve_attachment(g: MultiGraph, a: Attachment) -> Result<(MultiGraph, VertexId), MoveError> {
    match a {
        Attachment::OnEdge(e) => Ok(g.subdivide_edge(e)?),
        Attachment::OnSingleton(v) => {
            if !g.is_labelled_singleton(v) {
                return Err(MoveError::Graph(GraphError::NotASingleton(v)));
            }
            Ok((g, v))
        }
    }
}

/// Replays a TBR/PR move against a proper network; the result must
/// re-validate as proper.
pub fn apply_phylo(src: &PhyloNetwork, m: &Move) -> Result<PhyloNetwork, MoveError> {
    match m.kind() {
        MoveKind::Tbr0 | MoveKind::TbrPlus | MoveKind::TbrMinus | MoveKind::Pr0 => {}
        other => return Err(MoveError::WrongSpace(other)),
    }
    let h = execute(src.as_graph(), m)?;
    PhyloNetwork::validate(h).map_err(MoveError::InvalidResult)
}

/// Replays a replug move; the result must re-validate as a replug network.
pub fn apply_replug(src: &ReplugNetwork, m: &Move) -> Result<ReplugNetwork, MoveError> {
    match m.kind() {
        MoveKind::ReplugH | MoveKind::ReplugPlus | MoveKind::ReplugMinus => {}
        other => return Err(MoveError::WrongSpace(other)),
    }
    let h = execute(src.as_graph(), m)?;
    ReplugNetwork::validate(h).map_err(MoveError::InvalidResult)
}

// ── Neighborhood generators ──────────────────────────────────────────────

/// One-step neighborhood under the requested TBR kinds, deduplicated by
/// canonical code; each entry keeps the least move producing it.
pub fn tbr_neighbors(
    n: &PhyloNetwork,
    kinds: &[MoveKind],
) -> BTreeMap<CanonicalCode, (Move, PhyloNetwork)> {
    let mut out = BTreeMap::new();
    if kinds.contains(&MoveKind::Tbr0) {
        for m in tbr0_internal_moves(n.as_graph()) {
            try_record_phylo(&mut out, n, m);
        }
        for m in external_prune_moves(n.as_graph(), true) {
            try_record_phylo(&mut out, n, m);
        }
    }
    if kinds.contains(&MoveKind::TbrPlus) {
        for m in plus_moves(n.as_graph()) {
            try_record_phylo(&mut out, n, m);
        }
    }
    if kinds.contains(&MoveKind::TbrMinus) {
        for m in minus_moves(n.as_graph()) {
            try_record_phylo(&mut out, n, m);
        }
    }
    out
}

/// One-step neighborhood under the requested PR kinds (PR⁺ and PR⁻ share
/// the TBR⁺/TBR⁻ kinds and move sets).
pub fn pr_neighbors(
    n: &PhyloNetwork,
    kinds: &[MoveKind],
) -> BTreeMap<CanonicalCode, (Move, PhyloNetwork)> {
    let mut out = BTreeMap::new();
    if kinds.contains(&MoveKind::Pr0) {
        for m in pr0_moves(n.as_graph()) {
            try_record_phylo(&mut out, n, m);
        }
    }
    if kinds.contains(&MoveKind::TbrPlus) {
        for m in plus_moves(n.as_graph()) {
            try_record_phylo(&mut out, n, m);
        }
    }
    if kinds.contains(&MoveKind::TbrMinus) {
        for m in minus_moves(n.as_graph()) {
            try_record_phylo(&mut out, n, m);
        }
    }
    out
}

/// One-step replug neighborhood: horizontal prune-regrafts (loop-creating
/// self-attachments and singleton targets included) plus vertical edge
/// additions and removals. Connectivity and properness are not required of
/// results, only replug validity.
pub fn replug_neighbors(m: &ReplugNetwork) -> BTreeMap<CanonicalCode, (Move, ReplugNetwork)> {
    let g = m.as_graph();
    let mut out = BTreeMap::new();
    for mv in replug_horizontal_moves(g) {
        try_record_replug(&mut out, m, mv);
    }
    for mv in replug_plus_moves(g) {
        try_record_replug(&mut out, m, mv);
    }
    for e in g.edge_ids() {
        try_record_replug(&mut out, m, Move::ReplugMinus { removed: e });
    }
    out
}

fn try_record_phylo(
    out: &mut BTreeMap<CanonicalCode, (Move, PhyloNetwork)>,
    src: &PhyloNetwork,
    m: Move,
) {
    if let Ok(target) = apply_phylo(src, &m) {
        record(out, m, target.canonical_form(), target);
    }
}

fn try_record_replug(
    out: &mut BTreeMap<CanonicalCode, (Move, ReplugNetwork)>,
    src: &ReplugNetwork,
    m: Move,
) {
    if let Ok(target) = apply_replug(src, &m) {
        record(out, m, target.canonical_form(), target);
    }
}

fn record<N>(out: &mut BTreeMap<CanonicalCode, (Move, N)>, m: Move, code: CanonicalCode, net: N) {
    match out.get_mut(&code) {
        Some(entry) => {
            if m < entry.0 {
                *entry = (m, net);
            }
        }
        None => {
            out.insert(code, (m, net));
        }
    }
}

/// Internal TBR0 descriptors: remove an edge with two unlabelled endpoints,
/// re-add between two subdivision points. The second subdivision may land
/// on a half of the first. Unordered (first, second) pairs are enumerated
/// once when both name surviving original edges.
fn tbr0_internal_moves(g: &MultiGraph) -> Vec<Move> {
    let mut moves = Vec::new();
    for e in g.edge_ids() {
        let (a, b) = g.endpoints(e).expect("listed edge");
        if g.label(a).expect("vertex").is_some() || g.label(b).expect("vertex").is_some() {
            continue;
        }
        let Ok(intermediate) = g.remove_edge(e) else {
            continue;
        };
        for f in intermediate.edge_ids() {
            let Ok((after_first, _)) = intermediate.subdivide_edge(f) else {
                continue;
            };
            for s in after_first.edge_ids() {
                if intermediate.has_edge(s) && s < f {
                    continue; // unordered pair already enumerated
                }
                moves.push(Move::Tbr0Internal {
                    removed: e,
                    first: f,
                    second: s,
                });
            }
        }
    }
    moves
}

/// External TBR0 / PR0 prune descriptors. With `external_only`, only edges
/// with a labelled endpoint are pruned (the TBR0 special case); otherwise
/// every edge is pruned at each unlabelled endpoint (PR0).
fn prune_regraft_moves(g: &MultiGraph, external_only: bool, as_tbr: bool) -> Vec<Move> {
    let mut moves = Vec::new();
    for e in g.edge_ids() {
        let (a, b) = g.endpoints(e).expect("listed edge");
        let a_lab = g.label(a).expect("vertex").is_some();
        let b_lab = g.label(b).expect("vertex").is_some();
        if external_only && !(a_lab || b_lab) {
            continue;
        }
        let mut ends = Vec::new();
        if !a_lab {
            ends.push(a);
        }
        if !b_lab && b != a {
            ends.push(b);
        }
        for at in ends {
            let Ok((pruned, _sprout)) = g.prune_edge(e, at) else {
                continue;
            };
            for t in pruned.edge_ids() {
                moves.push(if as_tbr {
                    Move::Tbr0External {
                        pruned: e,
                        at,
                        target: t,
                    }
                } else {
                    Move::Pr0 {
                        pruned: e,
                        at,
                        target: t,
                    }
                });
            }
        }
    }
    moves
}

fn external_prune_moves(g: &MultiGraph, as_tbr: bool) -> Vec<Move> {
    prune_regraft_moves(g, true, as_tbr)
}

fn pr0_moves(g: &MultiGraph) -> Vec<Move> {
    prune_regraft_moves(g, false, false)
}

/// TBR⁺ descriptors: subdivide two edges (the second may be a half of the
/// first) and join the subdivision vertices.
fn plus_moves(g: &MultiGraph) -> Vec<Move> {
    let mut moves = Vec::new();
    for f in g.edge_ids() {
        let Ok((after_first, _)) = g.subdivide_edge(f) else {
            continue;
        };
        for s in after_first.edge_ids() {
            if g.has_edge(s) && s < f {
                continue;
            }
            moves.push(Move::TbrPlus { first: f, second: s });
        }
    }
    moves
}

/// TBR⁻ descriptors: every edge; restrictions are enforced at execution.
fn minus_moves(g: &MultiGraph) -> Vec<Move> {
    g.edge_ids().map(|e| Move::TbrMinus { removed: e }).collect()
}

/// Horizontal replug descriptors: prune every edge at each prunable
/// endpoint (unlabelled degree-three vertices, labelled leaves, and loops
/// at their own vertex), regraft onto every edge or labelled singleton of
/// the pruned graph.
fn replug_horizontal_moves(g: &MultiGraph) -> Vec<Move> {
    let mut moves = Vec::new();
    for e in g.edge_ids() {
        let (a, b) = g.endpoints(e).expect("listed edge");
        let mut ends = alloc::vec![a];
        if b != a {
            ends.push(b);
        }
        for at in ends {
            let Ok((pruned, _sprout)) = g.prune_edge(e, at) else {
                continue;
            };
            for t in pruned.edge_ids() {
                moves.push(Move::ReplugH {
                    pruned: e,
                    at,
                    target: Attachment::OnEdge(t),
                });
            }
            for v in pruned.vertex_ids() {
                if pruned.is_labelled_singleton(v) {
                    moves.push(Move::ReplugH {
                        pruned: e,
                        at,
                        target: Attachment::OnSingleton(v),
                    });
                }
            }
        }
    }
    moves
}

/// Vertical-add descriptors: all unordered pairs of attachment points.
/// Both points on one edge are expressed as the second landing on a half
/// of the first; two distinct singletons may be joined directly.
fn replug_plus_moves(g: &MultiGraph) -> Vec<Move> {
    let mut moves = Vec::new();
    let singletons: Vec<VertexId> = g
        .vertex_ids()
        .filter(|&v| g.is_labelled_singleton(v))
        .collect();
    for f in g.edge_ids() {
        let Ok((after_first, _)) = g.subdivide_edge(f) else {
            continue;
        };
        for s in after_first.edge_ids() {
            if g.has_edge(s) && s < f {
                continue;
            }
            moves.push(Move::ReplugPlus {
                first: Attachment::OnEdge(f),
                second: Attachment::OnEdge(s),
            });
        }
        for &x in &singletons {
            moves.push(Move::ReplugPlus {
                first: Attachment::OnEdge(f),
                second: Attachment::OnSingleton(x),
            });
        }
    }
    for (i, &x) in singletons.iter().enumerate() {
        for &y in &singletons[i + 1..] {
            moves.push(Move::ReplugPlus {
                first: Attachment::OnSingleton(x),
                second: Attachment::OnSingleton(y),
            });
        }
    }
    moves
}

// ── Sequences ────────────────────────────────────────────────────────────

/// An ordered list of moves between two proper networks. TBR/PR sequences
/// re-validate every intermediate as proper; sequences containing replug
/// kinds re-validate intermediates as replug networks while the endpoints
/// stay proper.
#[derive(Clone, Debug)]
pub struct RearrangementSequence {
    pub start: PhyloNetwork,
    pub end: PhyloNetwork,
    pub moves: Vec<Move>,
}

/// Why a sequence failed to replay.
#[derive(Clone, Debug)]
pub enum SequenceError {
    /// A move failed at the given index.
    Step { index: usize, error: MoveError },
    /// Replay finished on a network other than `end`.
    WrongEndpoint,
}

impl fmt::Display for SequenceError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SequenceError::Step { index, error } => {
                write!(f, "move {index} failed: {error}")
            }
            SequenceError::WrongEndpoint => write!(f, "replay did not reach the end network"),
        }
    }
}

impl RearrangementSequence {
    /// Number of moves.
    pub fn len(&self) -> usize {
        self.moves.len()
    }

    /// True when the sequence carries no moves.
    pub fn is_empty(&self) -> bool {
        self.moves.is_empty()
    }

    /// True when any move uses a replug kind, selecting replug-space
    /// validation for intermediates.
    pub fn is_replug(&self) -> bool {
        self.moves.iter().any(|m| {
            matches!(
                m.kind(),
                MoveKind::ReplugH | MoveKind::ReplugPlus | MoveKind::ReplugMinus
            )
        })
    }

    /// Replays every move from `start`, validating each intermediate in the
    /// appropriate space, and checks the final canonical code equals
    /// `end`'s. Returns the canonical codes of all intermediate networks
    /// (endpoints included).
    pub fn replay(&self) -> Result<Vec<CanonicalCode>, SequenceError> {
        let mut codes = alloc::vec![self.start.canonical_form()];
        if self.is_replug() {
            let mut current = ReplugNetwork::from_phylo(&self.start);
            for (index, m) in self.moves.iter().enumerate() {
                current = apply_replug(&current, m)
                    .map_err(|error| SequenceError::Step { index, error })?;
                codes.push(current.canonical_form());
            }
            if !current.is_proper() {
                return Err(SequenceError::WrongEndpoint);
            }
            if current.canonical_form() != self.end.canonical_form() {
                return Err(SequenceError::WrongEndpoint);
            }
        } else {
            let mut current = self.start.clone();
            for (index, m) in self.moves.iter().enumerate() {
                current = apply_phylo(&current, m)
                    .map_err(|error| SequenceError::Step { index, error })?;
                codes.push(current.canonical_form());
            }
            if current.canonical_form() != self.end.canonical_form() {
                return Err(SequenceError::WrongEndpoint);
            }
        }
        Ok(codes)
    }
}
