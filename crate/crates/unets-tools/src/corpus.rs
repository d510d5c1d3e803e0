//! Seeded corpus generation and the claim verification harness.
//!
//! A [`CorpusSpec`] pins a family of random networks: identical specs
//! yield byte-identical corpora. [`verify_claims`] evaluates distance
//! claims over the corpus pairs plus the shipped fixtures and renders a
//! deterministic report; any failing check carries a replayable witness.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use unets_core::agreement::{agreement_distance, maf_distance, meag_search};
use unets_core::multigraph::CanonicalCode;
use unets_core::phylo::improper_witness;
use unets_core::rearrange::{tbr_neighbors, MoveKind};
use unets_core::search::{bfs_distance, replug_distance, OperationSet, SearchConfig, SearchError};
use unets_core::{Label, MultiGraph, PhyloNetwork, VertexId};

use crate::netformat;

// ── Corpus specification ─────────────────────────────────────────────────

/// A deterministic corpus: leaf count, inclusive tier range, instance
/// count, and the seed feeding every random choice. A count of zero
/// selects full enumeration of the tier range instead of sampling.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CorpusSpec {
    pub n_leaves: u32,
    pub tier_lo: u32,
    pub tier_hi: u32,
    pub count: u32,
    pub seed: u64,
}

/// Why a corpus request was rejected.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum CorpusError {
    /// Fewer than two leaves requested.
    TooFewLeaves { n_leaves: u32 },
    /// Empty tier range.
    EmptyTierRange { lo: u32, hi: u32 },
    /// Instance index at or above the spec's count.
    IndexOutOfRange { index: u32, count: u32 },
}

impl fmt::Display for CorpusError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CorpusError::TooFewLeaves { n_leaves } => {
                write!(f, "a corpus needs at least two leaves, got {n_leaves}")
            }
            CorpusError::EmptyTierRange { lo, hi } => {
                write!(f, "empty tier range {lo}..{hi}")
            }
            CorpusError::IndexOutOfRange { index, count } => {
                write!(f, "instance {index} outside the corpus of {count}")
            }
        }
    }
}

impl std::error::Error for CorpusError {}

impl CorpusSpec {
    /// Structural validity: at least two leaves and a nonempty tier range.
    pub fn check(&self) -> Result<(), CorpusError> {
        if self.n_leaves < 2 {
            return Err(CorpusError::TooFewLeaves { n_leaves: self.n_leaves });
        }
        if self.tier_lo > self.tier_hi {
            return Err(CorpusError::EmptyTierRange { lo: self.tier_lo, hi: self.tier_hi });
        }
        Ok(())
    }

    /// Independent generator stream for one instance.
    fn rng(&self, index: u32) -> ChaCha8Rng {
        let mixed = self.seed ^ (u64::from(index).wrapping_mul(0x9e37_79b9_7f4a_7c15));
        ChaCha8Rng::seed_from_u64(mixed)
    }
}

// ── Generation ───────────────────────────────────────────────────────────

fn two_leaf_tree() -> PhyloNetwork {
    let mut g = MultiGraph::new();
    let a = g.add_labelled_vertex(Label(1)).expect("fresh label");
    let b = g.add_labelled_vertex(Label(2)).expect("fresh label");
    g.add_edge(a, b).expect("declared vertices");
    PhyloNetwork::validate(g).expect("two-leaf tree is proper")
}

fn insert_leaf(tree: &PhyloNetwork, label: u32, edge_index: usize) -> PhyloNetwork {
    let g = tree.as_graph();
    let e = g.edge_ids().nth(edge_index).expect("edge index in range");
    let (mut grown, mid) = g.subdivide_edge(e).expect("listed edge");
    let leaf = grown.add_labelled_vertex(Label(label)).expect("fresh label");
    grown.add_edge(mid, leaf).expect("declared vertices");
    PhyloNetwork::validate(grown).expect("leaf insertion preserves properness")
}

/// Uniform random tree on `1..=n` by repeated leaf insertion into a
/// uniformly chosen edge.
fn random_tree(n: u32, rng: &mut ChaCha8Rng) -> PhyloNetwork {
    let mut tree = two_leaf_tree();
    for label in 3..=n {
        let edges = tree.as_graph().edge_ids().count();
        tree = insert_leaf(&tree, label, rng.gen_range(0..edges));
    }
    tree
}

/// One uniformly chosen distinct TBR⁺ neighbor.
fn random_lift(net: &PhyloNetwork, rng: &mut ChaCha8Rng) -> PhyloNetwork {
    let up = tbr_neighbors(net, &[MoveKind::TbrPlus]);
    let pick = rng.gen_range(0..up.len());
    up.into_values().nth(pick).expect("index in range").1
}

/// Builds corpus instance `index`: a uniform random leaf-insertion tree
/// lifted by a range-uniform number of random TBR⁺ moves. Deterministic
/// in `(spec, index)`.
pub fn random_network(spec: &CorpusSpec, index: u32) -> Result<PhyloNetwork, CorpusError> {
    spec.check()?;
    let mut rng = spec.rng(index);
    let tier = rng.gen_range(spec.tier_lo..=spec.tier_hi);
    let mut net = random_tree(spec.n_leaves, &mut rng);
    for _ in 0..tier {
        net = random_lift(&net, &mut rng);
    }
    Ok(net)
}

// ── Enumeration ──────────────────────────────────────────────────────────

/// Every tree on `1..=n`, deduplicated by canonical form, sorted by code.
pub fn all_trees(n: u32) -> Result<Vec<PhyloNetwork>, CorpusError> {
    if n < 2 {
        return Err(CorpusError::TooFewLeaves { n_leaves: n });
    }
    let mut cur = vec![two_leaf_tree()];
    for label in 3..=n {
        let mut next: BTreeMap<CanonicalCode, PhyloNetwork> = BTreeMap::new();
        for tree in &cur {
            for index in 0..tree.as_graph().edge_ids().count() {
                let grown = insert_leaf(tree, label, index);
                next.insert(grown.canonical_form(), grown);
            }
        }
        cur = next.into_values().collect();
    }
    Ok(cur)
}

/// Every network on `1..=n` in the given tier, sorted by canonical code.
/// Tier `r + 1` is the closure of tier `r` under distinct TBR⁺ moves,
/// which reaches everything because each tier-`r + 1` network has a TBR⁻
/// move back down whose reversal is a TBR⁺.
pub fn enumerate_networks(n: u32, tier: u32) -> Result<Vec<PhyloNetwork>, CorpusError> {
    let mut layer: BTreeMap<CanonicalCode, PhyloNetwork> = all_trees(n)?
        .into_iter()
        .map(|t| (t.canonical_form(), t))
        .collect();
    for _ in 0..tier {
        let mut next: BTreeMap<CanonicalCode, PhyloNetwork> = BTreeMap::new();
        for net in layer.values() {
            next.extend(
                tbr_neighbors(net, &[MoveKind::TbrPlus])
                    .into_iter()
                    .map(|(code, (_, lifted))| (code, lifted)),
            );
        }
        layer = next;
    }
    Ok(layer.into_values().collect())
}

/// The networks a spec talks about: sampled instances, or the full tier
/// census when the count is zero.
pub fn corpus_networks(spec: &CorpusSpec) -> Result<Vec<PhyloNetwork>, CorpusError> {
    spec.check()?;
    if spec.count == 0 {
        let mut nets = Vec::new();
        for tier in spec.tier_lo..=spec.tier_hi {
            nets.extend(enumerate_networks(spec.n_leaves, tier)?);
        }
        return Ok(nets);
    }
    (0..spec.count).map(|i| random_network(spec, i)).collect()
}

// ── Claims ───────────────────────────────────────────────────────────────

/// One verifiable statement about distances on the corpus.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub enum Claim {
    /// Agreement distance is a metric: symmetric, zero exactly on equal
    /// canonical forms, triangle inequality.
    MetricAd,
    /// The same three axioms for the extended agreement distance.
    MetricEad,
    /// AD ≤ TBR ≤ 2·AD.
    BoundsTbr,
    /// AD ≤ PR ≤ 4·AD.
    BoundsPr,
    /// AD ≤ EAD ≤ 2·AD.
    BoundsEad,
    /// EAD ≤ PR ≤ 3·EAD.
    BoundsEadPr,
    /// AD = 1 exactly when TBR = 1.
    UnitDistance,
    /// On tree pairs AD = TBR = MAF.
    Trees,
    /// Against a tree host AD = TBR.
    TreeNetwork,
    /// A display pair's AD and TBR both equal the tier gap.
    Display,
    /// The shipped fixture files keep their pinned values.
    Figures,
}

impl Claim {
    pub const ALL: [Claim; 11] = [
        Claim::MetricAd,
        Claim::MetricEad,
        Claim::BoundsTbr,
        Claim::BoundsPr,
        Claim::BoundsEad,
        Claim::BoundsEadPr,
        Claim::UnitDistance,
        Claim::Trees,
        Claim::TreeNetwork,
        Claim::Display,
        Claim::Figures,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Claim::MetricAd => "metric-ad",
            Claim::MetricEad => "metric-ead",
            Claim::BoundsTbr => "bounds-tbr",
            Claim::BoundsPr => "bounds-pr",
            Claim::BoundsEad => "bounds-ead",
            Claim::BoundsEadPr => "bounds-ead-pr",
            Claim::UnitDistance => "unit-distance",
            Claim::Trees => "trees",
            Claim::TreeNetwork => "tree-network",
            Claim::Display => "display",
            Claim::Figures => "figures",
        }
    }
}

impl fmt::Display for Claim {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Claim {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Claim::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| format!("unknown claim \"{s}\""))
    }
}

// ── Reports ──────────────────────────────────────────────────────────────

/// A failing or noteworthy check, replayable from the carried networks.
#[derive(Clone, Debug)]
pub struct Witness {
    /// Which check produced it, e.g. `pair:2:5` or a fixture name.
    pub context: String,
    /// Computed values in deterministic order.
    pub values: Vec<(String, String)>,
    /// Serialized participant networks.
    pub networks: Vec<String>,
}

/// Aggregate result of one claim over the corpus.
#[derive(Clone, Debug)]
pub struct ClaimOutcome {
    pub claim: Claim,
    pub pass: u64,
    pub fail: u64,
    /// Checks abandoned on search budget exhaustion; recorded, never
    /// silently skipped.
    pub exhausted: u64,
    /// Checks whose BFS value moved when the tier window widened by one.
    pub window_unstable: u64,
    pub witnesses: Vec<Witness>,
    pub runtime: Duration,
}

/// Everything `verify_claims` learned, renderable as deterministic
/// `key=value` lines.
#[derive(Clone, Debug)]
pub struct VerificationReport {
    pub spec: CorpusSpec,
    pub outcomes: Vec<ClaimOutcome>,
}

/// One-line encoding for multi-line text in `key=value` output.
pub fn escape(text: &str) -> String {
    text.replace('\\', "\\\\").replace('\n', "\\n")
}

/// Reverses [`escape`]; used when replaying witness networks.
pub fn unescape(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    let mut chars = text.chars();
    while let Some(c) = chars.next() {
        if c != '\\' {
            out.push(c);
            continue;
        }
        match chars.next() {
            Some('n') => out.push('\n'),
            Some(other) => out.push(other),
            None => out.push('\\'),
        }
    }
    out
}

impl VerificationReport {
    /// True when every claim passed every check.
    pub fn passed(&self) -> bool {
        self.outcomes.iter().all(|o| o.fail == 0)
    }

    /// Deterministic report body: identical specs yield identical bytes.
    /// Runtimes are deliberately excluded; see [`Self::render_runtimes`].
    pub fn render(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "spec n={} tiers={}..{} count={} seed={}\n",
            self.spec.n_leaves, self.spec.tier_lo, self.spec.tier_hi, self.spec.count, self.spec.seed,
        ));
        for o in &self.outcomes {
            out.push_str(&format!(
                "claim={} pass={} fail={} exhausted={} window_unstable={}\n",
                o.claim, o.pass, o.fail, o.exhausted, o.window_unstable,
            ));
            for w in &o.witnesses {
                out.push_str(&format!("witness claim={} context={}", o.claim, w.context));
                for (k, v) in &w.values {
                    out.push_str(&format!(" {k}={v}"));
                }
                out.push('\n');
                for (i, net) in w.networks.iter().enumerate() {
                    out.push_str(&format!(
                        "network claim={} context={} index={} text={}\n",
                        o.claim,
                        w.context,
                        i,
                        escape(net),
                    ));
                }
            }
        }
        out.push_str(if self.passed() { "verdict=pass\n" } else { "verdict=fail\n" });
        out
    }

    /// Wall-clock lines, separate from the deterministic body.
    pub fn render_runtimes(&self) -> String {
        self.outcomes
            .iter()
            .map(|o| format!("runtime claim={} ms={}\n", o.claim, o.runtime.as_millis()))
            .collect()
    }
}

// ── Claim evaluation ─────────────────────────────────────────────────────

/// Per-check verdict folded into a [`ClaimOutcome`].
enum Check {
    Pass,
    Fail(Witness),
    Exhausted(Witness),
}

struct Tally {
    pass: u64,
    fail: u64,
    exhausted: u64,
    window_unstable: u64,
    witnesses: Vec<Witness>,
}

impl Tally {
    fn new() -> Self {
        Tally { pass: 0, fail: 0, exhausted: 0, window_unstable: 0, witnesses: Vec::new() }
    }

    fn absorb(&mut self, check: Check) {
        match check {
            Check::Pass => self.pass += 1,
            Check::Fail(w) => {
                self.fail += 1;
                self.witnesses.push(w);
            }
            Check::Exhausted(w) => {
                self.exhausted += 1;
                self.witnesses.push(w);
            }
        }
    }
}

fn witness(context: String, values: Vec<(String, String)>, nets: &[&PhyloNetwork]) -> Witness {
    Witness {
        context,
        values,
        networks: nets.iter().map(|n| netformat::serialize(n.as_graph())).collect(),
    }
}

/// The unordered index pairs a claim walks: everything at full
/// enumeration, a sliding window over sampled instances.
fn claim_pairs(spec: &CorpusSpec, len: usize) -> Vec<(usize, usize)> {
    if spec.count == 0 {
        let mut pairs = Vec::new();
        for i in 0..len {
            for j in i + 1..len {
                pairs.push((i, j));
            }
        }
        pairs
    } else {
        (0..len.saturating_sub(1)).map(|i| (i, i + 1)).collect()
    }
}

/// BFS distance together with a window-stability probe at slack + 1.
fn stable_distance(
    a: &PhyloNetwork,
    b: &PhyloNetwork,
    ops: OperationSet,
) -> Result<(u32, bool), SearchError> {
    let run = |slack: u32| {
        let mut cfg = SearchConfig::new(ops);
        cfg.tier_slack = slack;
        match ops {
            OperationSet::Replug => replug_distance(a, b, &cfg).map(|r| r.distance),
            _ => bfs_distance(a, b, &cfg).map(|r| r.distance),
        }
    };
    let base = run(1)?;
    let widened = run(2)?;
    Ok((base, base == widened))
}

fn exhaustion(context: String, nets: &[&PhyloNetwork], error: &SearchError) -> Check {
    Check::Exhausted(witness(
        context,
        vec![("note".into(), format!("budget exhausted: {error}"))],
        nets,
    ))
}

/// Evaluates the two-sided bound `lhs ≤ mid ≤ factor·lhs` given engines
/// for both quantities; also folds in the window-stability probe.
fn bound_checks(
    spec: &CorpusSpec,
    nets: &[PhyloNetwork],
    factor: u32,
    lhs: impl Fn(&PhyloNetwork, &PhyloNetwork) -> Result<u32, String> + Sync,
    mid: impl Fn(&PhyloNetwork, &PhyloNetwork) -> Result<(u32, bool), SearchError> + Sync,
    names: (&str, &str),
) -> Tally {
    let pairs = claim_pairs(spec, nets.len());
    let mut results: Vec<(usize, Check, bool)> = pairs
        .par_iter()
        .enumerate()
        .map(|(k, &(i, j))| {
            let (a, b) = (&nets[i], &nets[j]);
            let context = format!("pair:{i}:{j}");
            let low = match lhs(a, b) {
                Ok(v) => v,
                Err(e) => {
                    return (
                        k,
                        Check::Exhausted(witness(
                            context,
                            vec![("note".into(), format!("budget exhausted: {e}"))],
                            &[a, b],
                        )),
                        true,
                    )
                }
            };
            let (m, stable) = match mid(a, b) {
                Ok(v) => v,
                Err(e) => return (k, exhaustion(context, &[a, b], &e), true),
            };
            let ok = low <= m && m <= factor * low;
            let check = if ok {
                Check::Pass
            } else {
                Check::Fail(witness(
                    context,
                    vec![
                        (names.0.to_string(), low.to_string()),
                        (names.1.to_string(), m.to_string()),
                        ("factor".into(), factor.to_string()),
                    ],
                    &[a, b],
                ))
            };
            (k, check, stable)
        })
        .collect();
    results.sort_by_key(|&(k, _, _)| k);
    let mut tally = Tally::new();
    for (_, check, stable) in results {
        if !stable {
            tally.window_unstable += 1;
        }
        tally.absorb(check);
    }
    tally
}

fn ad_of(a: &PhyloNetwork, b: &PhyloNetwork) -> Result<u32, String> {
    agreement_distance(a, b).map(|r| r.distance).map_err(|e| e.to_string())
}

fn ead_of(a: &PhyloNetwork, b: &PhyloNetwork) -> Result<u32, String> {
    let cfg = SearchConfig::new(OperationSet::Replug);
    replug_distance(a, b, &cfg).map(|r| r.distance).map_err(|e| e.to_string())
}

/// Metric axioms over a distance engine: symmetry and the zero law on
/// every walked pair, triangle inequality on every index triple of the
/// pair-distance matrix.
fn metric_checks(
    spec: &CorpusSpec,
    nets: &[PhyloNetwork],
    dist: impl Fn(&PhyloNetwork, &PhyloNetwork) -> Result<u32, String> + Sync,
    name: &str,
) -> Tally {
    let pairs = claim_pairs(spec, nets.len());
    let mut results: Vec<(usize, Check, Option<((usize, usize), u32)>)> = pairs
        .par_iter()
        .enumerate()
        .map(|(k, &(i, j))| {
            let (a, b) = (&nets[i], &nets[j]);
            let context = format!("pair:{i}:{j}");
            let forward = match dist(a, b) {
                Ok(v) => v,
                Err(e) => {
                    return (
                        k,
                        Check::Exhausted(witness(
                            context,
                            vec![("note".into(), format!("budget exhausted: {e}"))],
                            &[a, b],
                        )),
                        None,
                    )
                }
            };
            let backward = match dist(b, a) {
                Ok(v) => v,
                Err(e) => {
                    return (
                        k,
                        Check::Exhausted(witness(
                            context,
                            vec![("note".into(), format!("budget exhausted: {e}"))],
                            &[a, b],
                        )),
                        None,
                    )
                }
            };
            let same = a.canonical_form() == b.canonical_form();
            let ok = forward == backward && (forward == 0) == same;
            let check = if ok {
                Check::Pass
            } else {
                Check::Fail(witness(
                    context,
                    vec![
                        (format!("{name}_forward"), forward.to_string()),
                        (format!("{name}_backward"), backward.to_string()),
                        ("equal_code".into(), same.to_string()),
                    ],
                    &[a, b],
                ))
            };
            (k, check, Some(((i, j), forward)))
        })
        .collect();
    results.sort_by_key(|&(k, _, _)| k);
    let mut tally = Tally::new();
    let mut matrix: BTreeMap<(usize, usize), u32> = BTreeMap::new();
    for (_, check, entry) in results {
        tally.absorb(check);
        if let Some(((i, j), d)) = entry {
            matrix.insert((i, j), d);
            matrix.insert((j, i), d);
            matrix.insert((i, i), 0);
            matrix.insert((j, j), 0);
        }
    }
    // Triangle inequality on every triple the matrix covers.
    let indices: Vec<usize> = {
        let mut v: Vec<usize> = matrix.keys().map(|&(i, _)| i).collect();
        v.dedup();
        v
    };
    for &i in &indices {
        for &j in &indices {
            for &k in &indices {
                let (Some(&ij), Some(&jk), Some(&ik)) =
                    (matrix.get(&(i, j)), matrix.get(&(j, k)), matrix.get(&(i, k)))
                else {
                    continue;
                };
                if ik <= ij + jk {
                    tally.pass += 1;
                } else {
                    tally.fail += 1;
                    tally.witnesses.push(witness(
                        format!("triple:{i}:{j}:{k}"),
                        vec![
                            (format!("{name}_ij"), ij.to_string()),
                            (format!("{name}_jk"), jk.to_string()),
                            (format!("{name}_ik"), ik.to_string()),
                        ],
                        &[&nets[i], &nets[j], &nets[k]],
                    ));
                }
            }
        }
    }
    tally
}

fn unit_distance_checks(spec: &CorpusSpec, nets: &[PhyloNetwork]) -> Tally {
    let pairs = claim_pairs(spec, nets.len());
    let mut results: Vec<(usize, Check)> = pairs
        .par_iter()
        .enumerate()
        .map(|(k, &(i, j))| {
            let (a, b) = (&nets[i], &nets[j]);
            let context = format!("pair:{i}:{j}");
            let ad = match ad_of(a, b) {
                Ok(v) => v,
                Err(e) => {
                    return (
                        k,
                        Check::Exhausted(witness(
                            context,
                            vec![("note".into(), format!("budget exhausted: {e}"))],
                            &[a, b],
                        )),
                    )
                }
            };
            let tbr = match stable_distance(a, b, OperationSet::Tbr) {
                Ok((v, _)) => v,
                Err(e) => return (k, exhaustion(context, &[a, b], &e)),
            };
            let check = if (ad == 1) == (tbr == 1) {
                Check::Pass
            } else {
                Check::Fail(witness(
                    context,
                    vec![("ad".into(), ad.to_string()), ("tbr".into(), tbr.to_string())],
                    &[a, b],
                ))
            };
            (k, check)
        })
        .collect();
    results.sort_by_key(|&(k, _)| k);
    let mut tally = Tally::new();
    for (_, check) in results {
        tally.absorb(check);
    }
    tally
}

/// Tree-restricted claims: `maf` additionally checks the three-way
/// equality with the agreement forest count.
fn tree_checks(spec: &CorpusSpec, nets: &[PhyloNetwork], maf: bool) -> Tally {
    let eligible: Vec<&PhyloNetwork> = if maf {
        nets.iter().filter(|n| n.tier() == 0).collect()
    } else {
        nets.iter().collect()
    };
    let pairs = claim_pairs(spec, eligible.len());
    let mut results: Vec<(usize, Check)> = pairs
        .par_iter()
        .enumerate()
        .filter_map(|(k, &(i, j))| {
            let (a, b) = (eligible[i], eligible[j]);
            // The tree-host claim needs a tree on one side.
            let (a, b) = if a.tier() == 0 {
                (a, b)
            } else if b.tier() == 0 {
                (b, a)
            } else {
                return None;
            };
            let context = format!("pair:{i}:{j}");
            let ad = match ad_of(a, b) {
                Ok(v) => v,
                Err(e) => {
                    return Some((
                        k,
                        Check::Exhausted(witness(
                            context,
                            vec![("note".into(), format!("budget exhausted: {e}"))],
                            &[a, b],
                        )),
                    ))
                }
            };
            let tbr = match stable_distance(a, b, OperationSet::Tbr) {
                Ok((v, _)) => v,
                Err(e) => return Some((k, exhaustion(context, &[a, b], &e))),
            };
            let mut ok = ad == tbr;
            let mut values = vec![("ad".into(), ad.to_string()), ("tbr".into(), tbr.to_string())];
            if maf {
                match maf_distance(a, b) {
                    Ok((m, _)) => {
                        values.push(("maf".into(), m.to_string()));
                        ok &= m == ad;
                    }
                    Err(e) => {
                        values.push(("maf_error".into(), e.to_string()));
                        ok = false;
                    }
                }
            }
            let check = if ok {
                Check::Pass
            } else {
                Check::Fail(witness(context, values, &[a, b]))
            };
            Some((k, check))
        })
        .collect();
    results.sort_by_key(|&(k, _)| k);
    let mut tally = Tally::new();
    for (_, check) in results {
        tally.absorb(check);
    }
    tally
}

/// Display pairs: a seeded tree lifted through the spec's tier range must
/// sit at AD = TBR = lift count from its start.
fn display_checks(spec: &CorpusSpec, nets: &[PhyloNetwork]) -> Tally {
    let cases: Vec<u32> = if spec.count == 0 {
        (0..nets.len() as u32).collect()
    } else {
        (0..spec.count).collect()
    };
    let mut results: Vec<(usize, Check)> = cases
        .par_iter()
        .enumerate()
        .map(|(k, &index)| {
            let mut rng = spec.rng(index ^ 0x5eed);
            let gap = rng.gen_range(spec.tier_lo..=spec.tier_hi);
            let tree = random_tree(spec.n_leaves, &mut rng);
            let mut net = tree.clone();
            for _ in 0..gap {
                net = random_lift(&net, &mut rng);
            }
            let context = format!("display:{index}");
            let displayed = net.displays(&tree);
            let ad = match ad_of(&tree, &net) {
                Ok(v) => v,
                Err(e) => {
                    return (
                        k,
                        Check::Exhausted(witness(
                            context,
                            vec![("note".into(), format!("budget exhausted: {e}"))],
                            &[&tree, &net],
                        )),
                    )
                }
            };
            let tbr = match stable_distance(&tree, &net, OperationSet::Tbr) {
                Ok((v, _)) => v,
                Err(e) => return (k, exhaustion(context, &[&tree, &net], &e)),
            };
            let check = if displayed && ad == gap && tbr == gap {
                Check::Pass
            } else {
                Check::Fail(witness(
                    context,
                    vec![
                        ("displayed".into(), displayed.to_string()),
                        ("gap".into(), gap.to_string()),
                        ("ad".into(), ad.to_string()),
                        ("tbr".into(), tbr.to_string()),
                    ],
                    &[&tree, &net],
                ))
            };
            (k, check)
        })
        .collect();
    results.sort_by_key(|&(k, _)| k);
    let mut tally = Tally::new();
    for (_, check) in results {
        tally.absorb(check);
    }
    tally
}

// ── Fixtures ─────────────────────────────────────────────────────────────

/// The shipped fixture files as `(name, text)`, embedded so the harness
/// and tests work from any directory.
pub fn fixtures() -> &'static [(&'static str, &'static str)] {
    &[
        ("swap_pair_a", include_str!("../fixtures/swap_pair_a.unets")),
        ("swap_pair_b", include_str!("../fixtures/swap_pair_b.unets")),
        ("tree_six", include_str!("../fixtures/tree_six.unets")),
        ("display_host", include_str!("../fixtures/display_host.unets")),
        ("improper_pendant", include_str!("../fixtures/improper_pendant.unets")),
        ("gap_pair_low", include_str!("../fixtures/gap_pair_low.unets")),
        ("gap_pair_high", include_str!("../fixtures/gap_pair_high.unets")),
        ("unlabelled_pair_a", include_str!("../fixtures/unlabelled_pair_a.unets")),
        ("unlabelled_pair_b", include_str!("../fixtures/unlabelled_pair_b.unets")),
        ("sprout_pair_low", include_str!("../fixtures/sprout_pair_low.unets")),
        ("sprout_pair_high", include_str!("../fixtures/sprout_pair_high.unets")),
    ]
}

fn fixture_net(name: &str) -> PhyloNetwork {
    let text = fixtures()
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, t)| *t)
        .expect("known fixture name");
    PhyloNetwork::validate(netformat::parse(text).expect("fixture parses"))
        .expect("fixture validates")
}

/// Pinned fixture expectations. Values were computed once with the
/// library engines and the pair distances re-derive here on every run.
fn figure_checks() -> Tally {
    let mut tally = Tally::new();
    let mut check = |context: &str, ok: bool, values: Vec<(String, String)>, nets: &[&PhyloNetwork]| {
        tally.absorb(if ok {
            Check::Pass
        } else {
            Check::Fail(witness(context.to_string(), values, nets))
        });
    };

    let a = fixture_net("swap_pair_a");
    let b = fixture_net("swap_pair_b");
    let ad = agreement_distance(&a, &b).map(|r| r.distance);
    let ead = replug_distance(&a, &b, &SearchConfig::new(OperationSet::Replug)).map(|r| r.distance);
    let meag = meag_search(&a, &b, 100_000_000).map(|(d, _)| d);
    let tbr = bfs_distance(&a, &b, &SearchConfig::new(OperationSet::Tbr)).map(|r| r.distance);
    check(
        "figure:swap_pair",
        a.tier() == 7
            && ad == Ok(2)
            && ead == Ok(2)
            && meag == Ok(2)
            && tbr == Ok(3),
        vec![
            ("tier".into(), a.tier().to_string()),
            ("ad".into(), format!("{ad:?}")),
            ("ead".into(), format!("{ead:?}")),
            ("meag".into(), format!("{meag:?}")),
            ("tbr".into(), format!("{tbr:?}")),
        ],
        &[&a, &b],
    );

    let tree = fixture_net("tree_six");
    let host = fixture_net("display_host");
    check(
        "figure:display_host",
        host.tier() == 2 && host.displays(&tree),
        vec![
            ("tier".into(), host.tier().to_string()),
            ("displays".into(), host.displays(&tree).to_string()),
        ],
        &[&tree, &host],
    );

    let improper_text = fixtures()
        .iter()
        .find(|(n, _)| *n == "improper_pendant")
        .map(|(_, t)| *t)
        .expect("shipped fixture");
    let improper = netformat::parse(improper_text).expect("fixture parses");
    let rejected = PhyloNetwork::validate(improper.clone()).is_err();
    let w = improper_witness(&improper);
    let witness_at_blob = w
        .and_then(|e| improper.endpoints(e).ok())
        .map(|(u, v)| (u, v) == (VertexId(10), VertexId(11)))
        .unwrap_or(false);
    check(
        "figure:improper_pendant",
        rejected && witness_at_blob,
        vec![
            ("rejected".into(), rejected.to_string()),
            ("witness".into(), format!("{w:?}")),
        ],
        &[],
    );

    let low = fixture_net("gap_pair_low");
    let high = fixture_net("gap_pair_high");
    let gap_ad = agreement_distance(&low, &high);
    let (d, ua, ub) = match &gap_ad {
        Ok(r) => (r.distance, r.into_a.disagreement_usage(), r.into_b.disagreement_usage()),
        Err(_) => (u32::MAX, usize::MAX, usize::MAX),
    };
    check(
        "figure:gap_pair",
        high.tier() == low.tier() + 1 && d == 2 && ua == 1 && ub == 2 && !high.displays(&low),
        vec![
            ("ad".into(), d.to_string()),
            ("usage_low".into(), ua.to_string()),
            ("usage_high".into(), ub.to_string()),
        ],
        &[&low, &high],
    );

    let ua_net = fixture_net("unlabelled_pair_a");
    let ub_net = fixture_net("unlabelled_pair_b");
    let un_ad = agreement_distance(&ua_net, &ub_net);
    let (d, unlabelled) = match &un_ad {
        Ok(r) => (
            r.distance,
            r.graph.subgraphs.iter().any(|s| s.labelled_vertices().is_empty()),
        ),
        Err(_) => (u32::MAX, false),
    };
    check(
        "figure:unlabelled_pair",
        d == 2 && unlabelled,
        vec![
            ("ad".into(), d.to_string()),
            ("unlabelled_subgraph".into(), unlabelled.to_string()),
        ],
        &[&ua_net, &ub_net],
    );

    let slow = fixture_net("sprout_pair_low");
    let shigh = fixture_net("sprout_pair_high");
    let sprouted = meag_search(&slow, &shigh, 10_000_000);
    let (d, sprouts, disagreement) = match &sprouted {
        Ok((d, h)) => (*d, h.sprout_tally(), h.disagreement_count),
        Err(_) => (u32::MAX, u32::MAX, u32::MAX),
    };
    check(
        "figure:sprout_pair",
        d == 2 && sprouts == 1 && disagreement == 1,
        vec![
            ("ead".into(), d.to_string()),
            ("sprouts".into(), sprouts.to_string()),
            ("disagreement".into(), disagreement.to_string()),
        ],
        &[&slow, &shigh],
    );

    tally
}

// ── Harness entry point ──────────────────────────────────────────────────

/// Evaluates the selected claims (all of them when `claims` is empty)
/// over the spec's corpus plus the shipped fixtures. Deterministic for a
/// fixed spec up to the runtime fields.
pub fn verify_claims(spec: &CorpusSpec, claims: &[Claim]) -> Result<VerificationReport, CorpusError> {
    spec.check()?;
    let nets = corpus_networks(spec)?;
    let mut selected: Vec<Claim> =
        if claims.is_empty() { Claim::ALL.to_vec() } else { claims.to_vec() };
    selected.sort();
    selected.dedup();

    let outcomes = selected
        .into_iter()
        .map(|claim| {
            let started = Instant::now();
            let tally = match claim {
                Claim::MetricAd => metric_checks(spec, &nets, ad_of, "ad"),
                Claim::MetricEad => metric_checks(spec, &nets, ead_of, "ead"),
                Claim::BoundsTbr => bound_checks(
                    spec,
                    &nets,
                    2,
                    ad_of,
                    |a, b| stable_distance(a, b, OperationSet::Tbr),
                    ("ad", "tbr"),
                ),
                Claim::BoundsPr => bound_checks(
                    spec,
                    &nets,
                    4,
                    ad_of,
                    |a, b| stable_distance(a, b, OperationSet::Pr),
                    ("ad", "pr"),
                ),
                Claim::BoundsEad => bound_checks(
                    spec,
                    &nets,
                    2,
                    ad_of,
                    |a, b| stable_distance(a, b, OperationSet::Replug),
                    ("ad", "ead"),
                ),
                Claim::BoundsEadPr => bound_checks(
                    spec,
                    &nets,
                    3,
                    ead_of,
                    |a, b| stable_distance(a, b, OperationSet::Pr),
                    ("ead", "pr"),
                ),
                Claim::UnitDistance => unit_distance_checks(spec, &nets),
                Claim::Trees => tree_checks(spec, &nets, true),
                Claim::TreeNetwork => tree_checks(spec, &nets, false),
                Claim::Display => display_checks(spec, &nets),
                Claim::Figures => figure_checks(),
            };
            ClaimOutcome {
                claim,
                pass: tally.pass,
                fail: tally.fail,
                exhausted: tally.exhausted,
                window_unstable: tally.window_unstable,
                witnesses: tally.witnesses,
                runtime: started.elapsed(),
            }
        })
        .collect();

    Ok(VerificationReport { spec: spec.clone(), outcomes })
}
