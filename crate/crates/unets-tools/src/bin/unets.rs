//! Command line front end over the library: validation, distances,
//! neighborhoods, enumeration, agreement witnesses, corpus verification,
//! and instance generation. Results are `key=value` lines, one result per
//! line; exits 0 on success, 1 on a negative or failed verdict, 2 on
//! usage or parse errors.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use unets_core::agreement::{
    agreement_distance, maf_distance, mag_to_tbr_sequence, meag_search, verify_embedding,
    AgreementError,
};
use unets_core::rearrange::{
    pr_neighbors, replug_neighbors, tbr_neighbors, Attachment, Move, MoveKind,
};
use unets_core::search::{bfs_distance, replug_distance, OperationSet, SearchConfig, SearchError};
use unets_core::{MultiGraph, PhyloNetwork, ReplugNetwork};

use unets_tools::corpus::{self, Claim, CorpusSpec};
use unets_tools::netformat;

const MEAG_BUDGET: u64 = 100_000_000;

/// Writes one output line, treating a closed stdout (e.g. piping into
/// `head`) as a normal early finish rather than a panic.
fn emit(args: std::fmt::Arguments<'_>) {
    use std::io::Write;
    let mut stdout = std::io::stdout().lock();
    if writeln!(stdout, "{args}").is_err() {
        std::process::exit(0);
    }
}

fn emit_raw(text: &str) {
    use std::io::Write;
    let mut stdout = std::io::stdout().lock();
    if write!(stdout, "{text}").is_err() {
        std::process::exit(0);
    }
}

macro_rules! out {
    ($($arg:tt)*) => { emit(format_args!($($arg)*)) };
}

#[derive(Parser)]
#[command(name = "unets", version, about = "Unrooted binary phylogenetic network toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse FILE and validate it as a proper network
    Validate { file: PathBuf },
    /// Distance between the networks in files A and B
    Dist {
        #[arg(long, value_enum)]
        metric: Metric,
        a: PathBuf,
        b: PathBuf,
        /// Widen the search tier window beyond the endpoint tiers
        #[arg(long, default_value_t = 1)]
        tier_slack: u32,
    },
    /// Neighborhood of the network in FILE under one operation
    Neighbors {
        #[arg(long, value_enum)]
        op: Op,
        file: PathBuf,
    },
    /// Every network with N leaves in tier R
    Enumerate {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        tier: u32,
    },
    /// Maximum agreement forest distance between two trees
    Maf { a: PathBuf, b: PathBuf },
    /// Maximum agreement graph witness between A and B
    Mag {
        a: PathBuf,
        b: PathBuf,
        /// Write DOT renderings with the disagreement images highlighted
        #[arg(long)]
        emit_dot: Option<PathBuf>,
        /// Derive and print a replay-checked TBR sequence
        #[arg(long)]
        emit_sequence: bool,
    },
    /// Run the claim harness over a seeded corpus
    Verify {
        #[arg(long)]
        n: u32,
        /// Inclusive tier range LO..HI
        #[arg(long, value_parser = parse_tiers)]
        tiers: (u32, u32),
        /// Instances to sample; zero enumerates the whole range
        #[arg(long)]
        count: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Comma-separated claim subset; omitted means every claim
        #[arg(long, value_delimiter = ',')]
        claims: Vec<Claim>,
    },
    /// Generate one corpus instance and print it
    Gen {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        tier: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Metric {
    Tbr,
    Pr,
    Replug,
    Ad,
    Ead,
}

impl Metric {
    fn name(self) -> &'static str {
        match self {
            Metric::Tbr => "tbr",
            Metric::Pr => "pr",
            Metric::Replug => "replug",
            Metric::Ad => "ad",
            Metric::Ead => "ead",
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Op {
    #[value(name = "tbr0")]
    Tbr0,
    #[value(name = "tbr+")]
    TbrPlus,
    #[value(name = "tbr-")]
    TbrMinus,
    #[value(name = "pr0")]
    Pr0,
    #[value(name = "replug")]
    Replug,
}

fn parse_tiers(s: &str) -> Result<(u32, u32), String> {
    let (lo, hi) = s
        .split_once("..")
        .ok_or_else(|| format!("expected LO..HI, got \"{s}\""))?;
    let hi = hi.strip_prefix('=').unwrap_or(hi);
    let parse = |t: &str| {
        t.trim()
            .parse::<u32>()
            .map_err(|_| format!("\"{t}\" is not a tier number"))
    };
    Ok((parse(lo)?, parse(hi)?))
}

/// Verdict severity doubling as the process exit code.
#[derive(Clone, Copy, PartialEq, Eq)]
enum Exit {
    Success,
    Negative,
    Usage,
}

impl Exit {
    fn code(self) -> ExitCode {
        match self {
            Exit::Success => ExitCode::SUCCESS,
            Exit::Negative => ExitCode::from(1),
            Exit::Usage => ExitCode::from(2),
        }
    }
}

type CmdResult = Result<(), Exit>;

fn fail(exit: Exit, line: String) -> Exit {
    out!("{line}");
    exit
}

fn parse_failure(e: &netformat::ParseError) -> Exit {
    let (line, col) = e.position();
    fail(
        Exit::Usage,
        format!("error=parse line={line} col={col} message={:?}", e.to_string()),
    )
}

fn read_graph(path: &Path) -> Result<MultiGraph, Exit> {
    let text = fs::read_to_string(path).map_err(|e| {
        fail(Exit::Usage, format!("error=io file={:?} message={:?}", path, e.to_string()))
    })?;
    netformat::parse(&text).map_err(|e| parse_failure(&e))
}

fn read_net(path: &Path) -> Result<PhyloNetwork, Exit> {
    let g = read_graph(path)?;
    PhyloNetwork::validate(g).map_err(|errors| {
        let first = errors.first().map(|e| e.to_string()).unwrap_or_default();
        fail(
            Exit::Usage,
            format!("error=invalid_network file={:?} message={first:?}", path),
        )
    })
}

fn agreement_failure(e: &AgreementError) -> Exit {
    let line = format!("error=agreement message={:?}", e.to_string());
    match e {
        AgreementError::BudgetExhausted { .. } => fail(Exit::Negative, line),
        _ => fail(Exit::Usage, line),
    }
}

fn search_failure(e: &SearchError) -> Exit {
    let line = format!("error=search message={:?}", e.to_string());
    match e {
        SearchError::BudgetExhausted { .. } => fail(Exit::Negative, line),
        _ => fail(Exit::Usage, line),
    }
}

fn attachment(a: &Attachment) -> String {
    match a {
        Attachment::OnEdge(e) => e.to_string(),
        Attachment::OnSingleton(v) => v.to_string(),
    }
}

fn move_fields(m: &Move) -> String {
    match m {
        Move::Tbr0Internal { removed, first, second } => {
            format!("kind=tbr0 removed={removed} first={first} second={second}")
        }
        Move::Tbr0External { pruned, at, target } => {
            format!("kind=tbr0 pruned={pruned} at={at} target={target}")
        }
        Move::TbrPlus { first, second } => format!("kind=tbr+ first={first} second={second}"),
        Move::TbrMinus { removed } => format!("kind=tbr- removed={removed}"),
        Move::Pr0 { pruned, at, target } => {
            format!("kind=pr0 pruned={pruned} at={at} target={target}")
        }
        Move::ReplugH { pruned, at, target } => {
            format!("kind=replug-h pruned={pruned} at={at} target={}", attachment(target))
        }
        Move::ReplugPlus { first, second } => {
            format!("kind=replug+ first={} second={}", attachment(first), attachment(second))
        }
        Move::ReplugMinus { removed } => format!("kind=replug- removed={removed}"),
    }
}

fn validate(file: &Path) -> CmdResult {
    let g = read_graph(file)?;
    match PhyloNetwork::validate(g) {
        Ok(net) => {
            out!("valid=true n={} tier={}", net.leaf_count(), net.tier());
            Ok(())
        }
        Err(errors) => {
            let first = errors.first().map(|e| e.to_string()).unwrap_or_default();
            Err(fail(
                Exit::Negative,
                format!("valid=false errors={} first={first:?}", errors.len()),
            ))
        }
    }
}

fn dist(metric: Metric, a: &Path, b: &Path, tier_slack: u32) -> CmdResult {
    let (a, b) = (read_net(a)?, read_net(b)?);
    let mut cfg = SearchConfig::new(match metric {
        Metric::Tbr => OperationSet::Tbr,
        Metric::Pr => OperationSet::Pr,
        _ => OperationSet::Replug,
    });
    cfg.tier_slack = tier_slack;
    let value = match metric {
        Metric::Ad => agreement_distance(&a, &b)
            .map(|r| r.distance)
            .map_err(|e| agreement_failure(&e))?,
        Metric::Ead => meag_search(&a, &b, MEAG_BUDGET)
            .map(|(d, _)| d)
            .map_err(|e| agreement_failure(&e))?,
        Metric::Replug => replug_distance(&a, &b, &cfg)
            .map(|r| r.distance)
            .map_err(|e| search_failure(&e))?,
        Metric::Tbr | Metric::Pr => bfs_distance(&a, &b, &cfg)
            .map(|r| r.distance)
            .map_err(|e| search_failure(&e))?,
    };
    out!("{}={value}", metric.name());
    Ok(())
}

fn neighbors(op: Op, file: &Path) -> CmdResult {
    let net = read_net(file)?;
    let rows: Vec<(String, String, String)> = match op {
        Op::Replug => replug_neighbors(&ReplugNetwork::from_phylo(&net))
            .into_iter()
            .map(|(code, (mv, m))| {
                (code.to_string(), move_fields(&mv), netformat::serialize(m.as_graph()))
            })
            .collect(),
        Op::Pr0 => pr_neighbors(&net, &[MoveKind::Pr0])
            .into_iter()
            .map(|(code, (mv, m))| {
                (code.to_string(), move_fields(&mv), netformat::serialize(m.as_graph()))
            })
            .collect(),
        Op::Tbr0 | Op::TbrPlus | Op::TbrMinus => {
            let kind = match op {
                Op::Tbr0 => MoveKind::Tbr0,
                Op::TbrPlus => MoveKind::TbrPlus,
                _ => MoveKind::TbrMinus,
            };
            tbr_neighbors(&net, &[kind])
                .into_iter()
                .map(|(code, (mv, m))| {
                    (code.to_string(), move_fields(&mv), netformat::serialize(m.as_graph()))
                })
                .collect()
        }
    };
    out!("count={}", rows.len());
    for (index, (code, mv, text)) in rows.iter().enumerate() {
        out!("index={index} {mv} code={code} text={}", corpus::escape(text));
    }
    Ok(())
}

fn enumerate(n: u32, tier: u32) -> CmdResult {
    let nets = corpus::enumerate_networks(n, tier)
        .map_err(|e| fail(Exit::Usage, format!("error=spec message={:?}", e.to_string())))?;
    out!("count={}", nets.len());
    for (index, net) in nets.iter().enumerate() {
        out!(
            "index={index} code={} text={}",
            net.canonical_form(),
            corpus::escape(&netformat::serialize(net.as_graph())),
        );
    }
    Ok(())
}

fn maf(a: &Path, b: &Path) -> CmdResult {
    let (a, b) = (read_net(a)?, read_net(b)?);
    let (d, forest) = maf_distance(&a, &b).map_err(|e| agreement_failure(&e))?;
    out!("maf={d} components={}", forest.len());
    for (index, comp) in forest.iter().enumerate() {
        out!("component index={index} text={}", corpus::escape(&netformat::serialize(comp)));
    }
    Ok(())
}

fn mag(a_path: &Path, b_path: &Path, emit_dot: Option<&Path>, emit_sequence: bool) -> CmdResult {
    let (a, b) = (read_net(a_path)?, read_net(b_path)?);
    let witness = agreement_distance(&a, &b).map_err(|e| agreement_failure(&e))?;
    // Re-certify the emitted witness before printing anything.
    for (host, emb) in [(&a, &witness.into_a), (&b, &witness.into_b)] {
        verify_embedding(&witness.graph, host, emb)
            .map_err(|e| agreement_failure(&e))?;
    }
    out!(
        "ad={} disagreement={} subgraphs={}",
        witness.distance,
        witness.graph.disagreement_count,
        witness.graph.subgraphs.len(),
    );
    for (index, s) in witness.graph.subgraphs.iter().enumerate() {
        out!("subgraph index={index} text={}", corpus::escape(&netformat::serialize(s)));
    }
    if let Some(dir) = emit_dot {
        fs::create_dir_all(dir).map_err(|e| {
            fail(Exit::Usage, format!("error=io file={:?} message={:?}", dir, e.to_string()))
        })?;
        for (name, host, emb) in
            [("host_a.dot", &a, &witness.into_a), ("host_b.dot", &b, &witness.into_b)]
        {
            let highlight: Vec<_> = emb.trails.iter().flat_map(|t| t.edges.clone()).collect();
            let dot = netformat::to_dot(host.as_graph(), &highlight).map_err(|e| {
                fail(Exit::Usage, format!("error=dot message={:?}", e.to_string()))
            })?;
            let path = dir.join(name);
            fs::write(&path, dot).map_err(|e| {
                fail(Exit::Usage, format!("error=io file={:?} message={:?}", path, e.to_string()))
            })?;
            out!("dot={}", path.display());
        }
    }
    if emit_sequence {
        let seq = mag_to_tbr_sequence(&a, &b, &witness).map_err(|e| agreement_failure(&e))?;
        let codes = seq.replay().map_err(|e| {
            fail(Exit::Negative, format!("error=replay message={:?}", format!("{e:?}")))
        })?;
        let lands = codes.last() == Some(&b.canonical_form());
        let bounded = seq.len() as u32 <= 2 * witness.distance;
        if !lands || !bounded {
            return Err(fail(
                Exit::Negative,
                format!("error=sequence lands={lands} len={} bound={}", seq.len(), 2 * witness.distance),
            ));
        }
        out!("sequence_len={}", seq.len());
        for (step, m) in seq.moves.iter().enumerate() {
            out!("step={step} {}", move_fields(m));
        }
    }
    Ok(())
}

fn verify(n: u32, tiers: (u32, u32), count: u32, seed: u64, claims: &[Claim]) -> CmdResult {
    let spec = CorpusSpec { n_leaves: n, tier_lo: tiers.0, tier_hi: tiers.1, count, seed };
    let report = corpus::verify_claims(&spec, claims)
        .map_err(|e| fail(Exit::Usage, format!("error=spec message={:?}", e.to_string())))?;
    emit_raw(&report.render());
    eprint!("{}", report.render_runtimes());
    if report.passed() {
        Ok(())
    } else {
        Err(Exit::Negative)
    }
}

fn gen(n: u32, tier: u32, seed: u64) -> CmdResult {
    let spec = CorpusSpec { n_leaves: n, tier_lo: tier, tier_hi: tier, count: 1, seed };
    let net = corpus::random_network(&spec, 0)
        .map_err(|e| fail(Exit::Usage, format!("error=spec message={:?}", e.to_string())))?;
    emit_raw(&netformat::serialize(net.as_graph()));
    Ok(())
}

fn run(command: Command) -> CmdResult {
    match command {
        Command::Validate { file } => validate(&file),
        Command::Dist { metric, a, b, tier_slack } => dist(metric, &a, &b, tier_slack),
        Command::Neighbors { op, file } => neighbors(op, &file),
        Command::Enumerate { n, tier } => enumerate(n, tier),
        Command::Maf { a, b } => maf(&a, &b),
        Command::Mag { a, b, emit_dot, emit_sequence } => {
            mag(&a, &b, emit_dot.as_deref(), emit_sequence)
        }
        Command::Verify { n, tiers, count, seed, claims } => {
            verify(n, tiers, count, seed, &claims)
        }
        Command::Gen { n, tier, seed } => gen(n, tier, seed),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse().command) {
        Ok(()) => Exit::Success.code(),
        Err(exit) => exit.code(),
    }
}
