//! Hop-by-hop packet routing behind a locality firewall, BFS ground truth
//! and pairwise verification.
//!
//! A scheme's step function is an associated function: it receives only the
//! current vertex's link table, its routing table, the target label and the
//! packet header. The engine resolves the returned label and refuses any hop
//! that does not follow an edge of the visibility graph.

use std::collections::VecDeque;
use std::fmt::{self, Debug, Write as _};
use std::io;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::visibility::VisibilityGraph;

/// Labels of a vertex's closed neighborhood.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinkTable<L> {
    pub own: L,
    /// Includes `own`.
    pub entries: Vec<L>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Hop<L, H> {
    pub next: L,
    pub header: H,
}

/// Errors a step function may raise on its local inputs.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StepError {
    #[error("header names {0}, which is not in the link table")]
    HeaderProtocol(String),
    #[error("malformed link table: {0}")]
    MalformedLinkTable(&'static str),
    #[error("no neighbor makes progress toward the target")]
    NoProgress,
}

pub trait RoutingScheme: Sync {
    type Label: Clone + Eq + Debug + Send + Sync;
    type Table: Debug + Send + Sync;
    type Header: Clone + Default + Eq + Debug + Send + Sync;

    fn n(&self) -> usize;
    fn label(&self, v: usize) -> &Self::Label;
    fn table(&self, v: usize) -> &Self::Table;
    fn link_table(&self, v: usize) -> &LinkTable<Self::Label>;
    /// Maps a label back to its vertex; used by the engine only.
    fn resolve(&self, label: &Self::Label) -> Option<usize>;

    fn label_bits(&self, v: usize) -> usize;
    fn table_bits(&self, v: usize) -> usize;
    fn header_bits(&self, header: &Self::Header) -> usize;

    fn step(
        links: &LinkTable<Self::Label>,
        table: &Self::Table,
        target: &Self::Label,
        header: &Self::Header,
    ) -> Result<Hop<Self::Label, Self::Header>, StepError>;
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RouteError {
    #[error("firewall: step at {at} returned {next}, which is not a neighbor")]
    NotANeighbor { at: usize, next: String },
    #[error("hop limit {limit} exceeded routing {s} -> {t}")]
    HopLimit {
        s: usize,
        t: usize,
        limit: usize,
        trace: Vec<usize>,
    },
    #[error("step at {at} failed: {source}")]
    Step { at: usize, source: StepError },
    #[error("vertex {0} out of range")]
    OutOfRange(usize),
}

/// State of a packet in flight.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Packet<H> {
    pub current: usize,
    pub header: H,
    pub trace: Vec<usize>,
    pub hop_limit: usize,
}

/// A completed route; `headers[i]` is the header carried on hop `i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Route<H> {
    pub trace: Vec<usize>,
    pub headers: Vec<H>,
}

impl<H> Route<H> {
    pub fn hops(&self) -> usize {
        self.trace.len().saturating_sub(1)
    }
}

pub fn default_hop_limit(n: usize) -> usize {
    4 * n
}

/// Routes a packet from `s` to `t`. For `s == t` the trace is empty.
pub fn run_route<S: RoutingScheme>(
    scheme: &S,
    graph: &VisibilityGraph,
    s: usize,
    t: usize,
    hop_limit: usize,
) -> Result<Route<S::Header>, RouteError> {
    let n = scheme.n();
    for v in [s, t] {
        if v >= n {
            return Err(RouteError::OutOfRange(v));
        }
    }
    if s == t {
        return Ok(Route {
            trace: Vec::new(),
            headers: Vec::new(),
        });
    }
    let mut packet = Packet {
        current: s,
        header: S::Header::default(),
        trace: vec![s],
        hop_limit,
    };
    let mut headers = Vec::new();
    let target = scheme.label(t);
    while packet.current != t {
        if packet.trace.len() > packet.hop_limit {
            return Err(RouteError::HopLimit {
                s,
                t,
                limit: packet.hop_limit,
                trace: packet.trace,
            });
        }
        let at = packet.current;
        let hop = S::step(
            scheme.link_table(at),
            scheme.table(at),
            target,
            &packet.header,
        )
        .map_err(|source| RouteError::Step { at, source })?;
        let next = scheme
            .resolve(&hop.next)
            .filter(|&v| graph.adjacent(at, v))
            .ok_or_else(|| RouteError::NotANeighbor {
                at,
                next: format!("{:?}", hop.next),
            })?;
        packet.current = next;
        packet.header = hop.header;
        packet.trace.push(next);
        headers.push(packet.header.clone());
    }
    Ok(Route {
        trace: packet.trace,
        headers,
    })
}

/// Unweighted distances from `s`; unreachable vertices get `usize::MAX`.
pub fn bfs_all(graph: &VisibilityGraph, s: usize) -> Vec<usize> {
    let mut dist = vec![usize::MAX; graph.n()];
    let mut queue = VecDeque::from([s]);
    dist[s] = 0;
    while let Some(v) = queue.pop_front() {
        for &w in graph.neighbors(v) {
            if dist[w] == usize::MAX {
                dist[w] = dist[v] + 1;
                queue.push_back(w);
            }
        }
    }
    dist
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairSelection {
    All,
    Sample { count: usize, seed: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VerifyOptions {
    pub pairs: PairSelection,
    /// Routed length must not exceed `stretch_bound` times the BFS distance.
    pub stretch_bound: usize,
    /// Check that within two hops of every routing decision the distance
    /// to the target drops.
    pub two_step_progress: bool,
    pub keep_records: bool,
}

impl VerifyOptions {
    pub fn exact() -> Self {
        Self {
            pairs: PairSelection::All,
            stretch_bound: 1,
            two_step_progress: false,
            keep_records: false,
        }
    }

    pub fn stretch_two() -> Self {
        Self {
            stretch_bound: 2,
            two_step_progress: true,
            ..Self::exact()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairRecord {
    pub s: usize,
    pub t: usize,
    pub bfs: usize,
    pub routed: usize,
    pub stretch: f64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FailureKind {
    Route(RouteError),
    Stretch { bfs: usize, routed: usize },
    NoProgress { position: usize },
    ConsecutiveHeaders { position: usize },
    SlowTermination { hops: usize },
    Disconnected,
}

impl fmt::Display for FailureKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FailureKind::Route(e) => write!(f, "{e}"),
            FailureKind::Stretch { bfs, routed } => write!(f, "routed {routed} hops, bfs {bfs}"),
            FailureKind::NoProgress { position } => {
                write!(
                    f,
                    "no distance progress within two hops of position {position}"
                )
            }
            FailureKind::ConsecutiveHeaders { position } => {
                write!(
                    f,
                    "non-empty headers on consecutive hops at position {position}"
                )
            }
            FailureKind::SlowTermination { hops } => write!(f, "took {hops} hops (more than 2n)"),
            FailureKind::Disconnected => write!(f, "target unreachable in the graph"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Failure {
    pub s: usize,
    pub t: usize,
    pub kind: FailureKind,
    pub trace: Vec<usize>,
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let trace: Vec<String> = self.trace.iter().map(usize::to_string).collect();
        write!(
            f,
            "{} -> {}: {} [trace: {}]",
            self.s,
            self.t,
            self.kind,
            trace.join(" ")
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyReport {
    pub records: Vec<PairRecord>,
    pub pairs: usize,
    pub max_stretch: f64,
    pub mean_stretch: f64,
    pub label_bits: usize,
    pub table_bits: usize,
    pub header_bits: usize,
    pub failures: Vec<Failure>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    /// `key=value` summary lines.
    pub fn summary(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "maxStretch={:.3}", self.max_stretch);
        let _ = writeln!(out, "meanStretch={:.3}", self.mean_stretch);
        let _ = writeln!(out, "labBits={}", self.label_bits);
        let _ = writeln!(out, "tabBits={}", self.table_bits);
        let _ = writeln!(out, "hdrBits={}", self.header_bits);
        let _ = writeln!(out, "pairs={}", self.pairs);
        let _ = writeln!(out, "failures={}", self.failures.len());
        out
    }

    pub fn write_csv<W: io::Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "s,t,bfs,routed,stretch")?;
        for r in &self.records {
            writeln!(w, "{},{},{},{},{:.6}", r.s, r.t, r.bfs, r.routed, r.stretch)?;
        }
        Ok(())
    }
}

/// Ordered pairs grouped by target, targets ascending.
fn select_pairs(n: usize, selection: PairSelection) -> Vec<(usize, Vec<usize>)> {
    match selection {
        PairSelection::All => (0..n)
            .map(|t| (t, (0..n).filter(|&s| s != t).collect()))
            .collect(),
        PairSelection::Sample { count, seed } => {
            let mut by_target = vec![Vec::new(); n];
            if n >= 2 {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                for _ in 0..count {
                    let s = rng.gen_range(0..n);
                    let mut t = rng.gen_range(0..n - 1);
                    if t >= s {
                        t += 1;
                    }
                    by_target[t].push(s);
                }
            }
            by_target
                .into_iter()
                .enumerate()
                .filter(|(_, sources)| !sources.is_empty())
                .collect()
        }
    }
}

struct TargetResult {
    records: Vec<PairRecord>,
    pairs: usize,
    stretch_sum: f64,
    max_stretch: f64,
    header_bits: usize,
    failures: Vec<Failure>,
}

/// Trace positions where the scheme makes a routing decision: the source,
/// and every vertex reached with an empty header. A vertex reached with a
/// header only forwards the packet as instructed.
pub fn decision_points<'a, H: PartialEq>(
    headers: &'a [H],
    empty: &'a H,
) -> impl Iterator<Item = usize> + 'a {
    (0..headers.len()).filter(move |&i| i == 0 || headers[i - 1] == *empty)
}

fn check_pair<S: RoutingScheme>(
    scheme: &S,
    graph: &VisibilityGraph,
    dist: &[usize],
    s: usize,
    t: usize,
    opts: &VerifyOptions,
    out: &mut TargetResult,
) {
    let n = scheme.n();
    let fail = |kind, trace: Vec<usize>| Failure { s, t, kind, trace };
    let bfs = dist[s];
    if bfs == usize::MAX {
        out.failures.push(fail(FailureKind::Disconnected, vec![]));
        return;
    }
    let route = match run_route(scheme, graph, s, t, default_hop_limit(n)) {
        Ok(r) => r,
        Err(e) => {
            let trace = match &e {
                RouteError::HopLimit { trace, .. } => trace.clone(),
                _ => vec![s],
            };
            out.failures.push(fail(FailureKind::Route(e), trace));
            return;
        }
    };
    let routed = route.hops();
    let stretch = routed as f64 / bfs as f64;
    out.pairs += 1;
    out.stretch_sum += stretch;
    out.max_stretch = out.max_stretch.max(stretch);
    for h in &route.headers {
        out.header_bits = out.header_bits.max(scheme.header_bits(h));
    }
    if opts.keep_records {
        out.records.push(PairRecord {
            s,
            t,
            bfs,
            routed,
            stretch,
        });
    }

    if routed > opts.stretch_bound * bfs {
        out.failures.push(fail(
            FailureKind::Stretch { bfs, routed },
            route.trace.clone(),
        ));
    }
    if routed > 2 * n {
        out.failures.push(fail(
            FailureKind::SlowTermination { hops: routed },
            route.trace.clone(),
        ));
    }
    let empty = S::Header::default();
    if opts.two_step_progress {
        let p = &route.trace;
        let k = p.len() - 1;
        if let Some(i) = decision_points(&route.headers, &empty)
            .find(|&i| dist[p[(i + 2).min(k)]] + 1 > dist[p[i]])
        {
            out.failures
                .push(fail(FailureKind::NoProgress { position: i }, p.clone()));
        }
    }
    if let Some(i) = route
        .headers
        .windows(2)
        .position(|w| w[0] != empty && w[1] != empty)
    {
        out.failures.push(fail(
            FailureKind::ConsecutiveHeaders { position: i + 1 },
            route.trace,
        ));
    }
}

/// Routes the selected pairs and compares against BFS. Work is split by
/// target in parallel and merged in target order, so the report is
/// deterministic.
pub fn verify<S: RoutingScheme>(
    scheme: &S,
    graph: &VisibilityGraph,
    opts: &VerifyOptions,
) -> VerifyReport {
    let n = scheme.n();
    let groups = select_pairs(n, opts.pairs);
    let results: Vec<TargetResult> = groups
        .par_iter()
        .map(|(t, sources)| {
            let dist = bfs_all(graph, *t);
            let mut out = TargetResult {
                records: Vec::new(),
                pairs: 0,
                stretch_sum: 0.0,
                max_stretch: 0.0,
                header_bits: 0,
                failures: Vec::new(),
            };
            for &s in sources {
                check_pair(scheme, graph, &dist, s, *t, opts, &mut out);
            }
            out
        })
        .collect();

    let mut report = VerifyReport {
        records: Vec::new(),
        pairs: 0,
        max_stretch: 0.0,
        mean_stretch: 0.0,
        label_bits: (0..n).map(|v| scheme.label_bits(v)).max().unwrap_or(0),
        table_bits: (0..n).map(|v| scheme.table_bits(v)).max().unwrap_or(0),
        header_bits: 0,
        failures: Vec::new(),
    };
    let mut stretch_sum = 0.0;
    for r in results {
        report.records.extend(r.records);
        report.pairs += r.pairs;
        stretch_sum += r.stretch_sum;
        report.max_stretch = report.max_stretch.max(r.max_stretch);
        report.header_bits = report.header_bits.max(r.header_bits);
        report.failures.extend(r.failures);
    }
    if report.pairs > 0 {
        report.mean_stretch = stretch_sum / report.pairs as f64;
    }
    report
}

/// All ordered pairs with the given stretch bound.
pub fn verify_all_pairs<S: RoutingScheme>(
    scheme: &S,
    graph: &VisibilityGraph,
    stretch_bound: usize,
) -> VerifyReport {
    let opts = VerifyOptions {
        stretch_bound,
        two_step_progress: stretch_bound > 1,
        ..VerifyOptions::exact()
    };
    verify(scheme, graph, &opts)
}
