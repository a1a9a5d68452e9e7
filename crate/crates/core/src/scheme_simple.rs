//! Shortest-path routing in simple histograms with one-bit tables.
//!
//! Labels are vertex ids, extended by the breakpoint id for reflex and base
//! vertices. The table bit records whether ℓ(v) lies higher than r(v).

use std::fmt::Write as _;

use thiserror::Error;

use crate::bits::{ceil_log2, BitError, BitReader, BitWriter, Bits};
use crate::engine::{Hop, LinkTable, RoutingScheme, StepError};
use crate::landmarks::{breakpoint, LandmarkError};
use crate::polygon::{Histogram, Kind};
use crate::visibility::{Visibility, VisibilityGraph};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SimpleLabel {
    pub id: usize,
    pub br: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SimpleTable {
    pub higher_left: bool,
}

#[derive(Debug, Error)]
pub enum BuildError {
    #[error("expected a simple histogram, got a {0} histogram")]
    WrongKind(Kind),
    #[error("interval of vertex {0} is not an id range")]
    IndexInterval(usize),
    #[error(transparent)]
    Landmark(#[from] LandmarkError),
}

#[derive(Debug, Error)]
pub enum DumpError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: {source}")]
    Bits { line: usize, source: BitError },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimpleScheme {
    width: u32,
    labels: Vec<SimpleLabel>,
    tables: Vec<SimpleTable>,
    links: Vec<LinkTable<SimpleLabel>>,
}

fn check_index_intervals(vis: &Visibility) -> Result<(), BuildError> {
    let h = &vis.hist;
    for v in 0..h.n() {
        let lm = &vis.landmarks[v];
        let (Some(lo), Some(hi)) = (lm.left.vertex(), lm.right.vertex()) else {
            return Err(BuildError::IndexInterval(v));
        };
        let members: Vec<usize> = vis.vertices_in(lm.interval()).collect();
        if members != (lo..=hi).collect::<Vec<_>>() {
            return Err(BuildError::IndexInterval(v));
        }
    }
    Ok(())
}

impl SimpleScheme {
    pub fn build(h: &Histogram) -> Result<Self, BuildError> {
        Self::from_visibility(&Visibility::new(h.clone()))
    }

    pub fn from_visibility(vis: &Visibility) -> Result<Self, BuildError> {
        let h = &vis.hist;
        if h.kind() != Kind::Simple {
            return Err(BuildError::WrongKind(h.kind()));
        }
        check_index_intervals(vis)?;
        let n = h.n();
        let labels = (0..n)
            .map(|v| {
                let br = if h.vertex(v).is_reflex() || h.is_base_vertex(v) {
                    Some(breakpoint(vis, v)?)
                } else {
                    None
                };
                Ok(SimpleLabel { id: v, br })
            })
            .collect::<Result<Vec<_>, BuildError>>()?;
        let tables = (0..n)
            .map(|v| SimpleTable {
                higher_left: vis.landmarks[v].higher_left(h),
            })
            .collect();
        Ok(Self::assemble(labels, tables, &vis.graph))
    }

    fn assemble(
        labels: Vec<SimpleLabel>,
        tables: Vec<SimpleTable>,
        graph: &VisibilityGraph,
    ) -> Self {
        let links = (0..labels.len())
            .map(|v| LinkTable {
                own: labels[v],
                entries: graph
                    .closed_neighbors(v)
                    .iter()
                    .map(|&w| labels[w])
                    .collect(),
            })
            .collect();
        Self {
            width: ceil_log2(labels.len()),
            labels,
            tables,
            links,
        }
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn labels(&self) -> &[SimpleLabel] {
        &self.labels
    }

    pub fn encode_label(&self, label: &SimpleLabel) -> Result<Bits, BitError> {
        let mut w = BitWriter::new();
        w.unsigned(label.id as u64, self.width)?;
        if let Some(br) = label.br {
            w.unsigned(br as u64, self.width)?;
        }
        Ok(w.finish())
    }

    /// The field count is implied by the bit length.
    pub fn decode_label(&self, bits: &Bits) -> Result<SimpleLabel, BitError> {
        let mut r = BitReader::new(bits);
        let id = r.unsigned(self.width)? as usize;
        let br = if r.remaining() > 0 {
            Some(r.unsigned(self.width)? as usize)
        } else {
            None
        };
        Ok(SimpleLabel { id, br })
    }

    /// The visibility graph recorded in the link tables.
    pub fn graph(&self) -> VisibilityGraph {
        VisibilityGraph::from_adjacency(
            self.links
                .iter()
                .map(|l| {
                    l.entries
                        .iter()
                        .map(|e| e.id)
                        .filter(|&w| w != l.own.id)
                        .collect()
                })
                .collect(),
        )
    }

    /// Text dump: a header line, then `id | label-bits | table-bit | neighbor-ids`.
    pub fn dump(&self) -> String {
        let mut out = format!("scheme simple {} {}\n", self.labels.len(), self.width);
        for (v, label) in self.labels.iter().enumerate() {
            let bits: String = self
                .encode_label(label)
                .expect("labels fit their width")
                .iter()
                .map(|b| if *b { '1' } else { '0' })
                .collect();
            let nb: Vec<String> = self.links[v]
                .entries
                .iter()
                .filter(|e| e.id != v)
                .map(|e| e.id.to_string())
                .collect();
            let _ = writeln!(
                out,
                "{v} | {bits} | {} | {}",
                u8::from(self.tables[v].higher_left),
                nb.join(" ")
            );
        }
        out
    }

    pub fn parse_dump(text: &str) -> Result<Self, DumpError> {
        let syntax = |line: usize, message: &str| DumpError::Syntax {
            line,
            message: message.to_string(),
        };
        let mut lines = text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty());
        let (_, head) = lines.next().ok_or_else(|| syntax(1, "empty dump"))?;
        let head: Vec<&str> = head.split_whitespace().collect();
        let (n, width) = match head.as_slice() {
            ["scheme", "simple", n, w] => (
                n.parse::<usize>()
                    .map_err(|_| syntax(1, "bad vertex count"))?,
                w.parse::<u32>().map_err(|_| syntax(1, "bad width"))?,
            ),
            _ => return Err(syntax(1, "expected `scheme simple <n> <width>`")),
        };
        let probe = Self {
            width,
            labels: Vec::new(),
            tables: Vec::new(),
            links: Vec::new(),
        };
        let mut labels = Vec::with_capacity(n);
        let mut tables = Vec::with_capacity(n);
        let mut adj = Vec::with_capacity(n);
        for (i, line) in lines {
            let line_no = i + 1;
            let fields: Vec<&str> = line.split('|').map(str::trim).collect();
            if fields.len() != 4 || fields[0].parse() != Ok(labels.len()) {
                return Err(syntax(
                    line_no,
                    "expected `id | label-bits | table-bit | neighbors`",
                ));
            }
            let mut bits = Bits::new();
            for c in fields[1].chars() {
                match c {
                    '0' => bits.push(false),
                    '1' => bits.push(true),
                    _ => return Err(syntax(line_no, "label bits must be 0/1")),
                }
            }
            let label = probe
                .decode_label(&bits)
                .map_err(|source| DumpError::Bits {
                    line: line_no,
                    source,
                })?;
            let higher_left = match fields[2] {
                "0" => false,
                "1" => true,
                _ => return Err(syntax(line_no, "table bit must be 0 or 1")),
            };
            let nb = fields[3]
                .split_whitespace()
                .map(|t| t.parse::<usize>().ok().filter(|&w| w < n))
                .collect::<Option<Vec<_>>>()
                .ok_or_else(|| syntax(line_no, "bad neighbor id"))?;
            labels.push(label);
            tables.push(SimpleTable { higher_left });
            adj.push(nb);
        }
        if labels.len() != n {
            return Err(syntax(text.lines().count(), "vertex count mismatch"));
        }
        Ok(Self::assemble(
            labels,
            tables,
            &VisibilityGraph::from_adjacency(adj),
        ))
    }
}

impl RoutingScheme for SimpleScheme {
    type Label = SimpleLabel;
    type Table = SimpleTable;
    type Header = ();

    fn n(&self) -> usize {
        self.labels.len()
    }

    fn label(&self, v: usize) -> &SimpleLabel {
        &self.labels[v]
    }

    fn table(&self, v: usize) -> &SimpleTable {
        &self.tables[v]
    }

    fn link_table(&self, v: usize) -> &LinkTable<SimpleLabel> {
        &self.links[v]
    }

    fn resolve(&self, label: &SimpleLabel) -> Option<usize> {
        (self.labels.get(label.id) == Some(label)).then_some(label.id)
    }

    fn label_bits(&self, v: usize) -> usize {
        self.width as usize * if self.labels[v].br.is_some() { 2 } else { 1 }
    }

    fn table_bits(&self, _: usize) -> usize {
        1
    }

    fn header_bits(&self, _: &()) -> usize {
        0
    }

    fn step(
        links: &LinkTable<SimpleLabel>,
        table: &SimpleTable,
        target: &SimpleLabel,
        _: &(),
    ) -> Result<Hop<SimpleLabel, ()>, StepError> {
        let hop = |next: &SimpleLabel| {
            Ok(Hop {
                next: *next,
                header: (),
            })
        };
        let entries = &links.entries;
        if let Some(t) = entries.iter().find(|e| e.id == target.id) {
            return hop(t);
        }
        let lo = entries.iter().min_by_key(|e| e.id);
        let hi = entries.iter().max_by_key(|e| e.id);
        let (Some(lo), Some(hi)) = (lo, hi) else {
            return Err(StepError::MalformedLinkTable("empty"));
        };
        let t = target.id;
        if t < lo.id || t > hi.id {
            return hop(if table.higher_left { lo } else { hi });
        }
        let s = links.own.id;
        let (nd, fd) = if t > s {
            (
                entries.iter().filter(|e| e.id < t).max_by_key(|e| e.id),
                entries.iter().filter(|e| e.id > t).min_by_key(|e| e.id),
            )
        } else {
            (
                entries.iter().filter(|e| e.id > t).min_by_key(|e| e.id),
                entries.iter().filter(|e| e.id < t).max_by_key(|e| e.id),
            )
        };
        let (Some(nd), Some(fd)) = (nd, fd) else {
            return Err(StepError::MalformedLinkTable("target not bracketed"));
        };
        if nd.id == s {
            return Err(StepError::NoProgress);
        }
        let b = nd.br.ok_or(StepError::MalformedLinkTable(
            "near dominator without breakpoint",
        ))?;
        let toward_nd = if t > s {
            nd.id <= t && t <= b
        } else {
            b <= t && t <= nd.id
        };
        hop(if toward_nd { nd } else { fd })
    }
}
