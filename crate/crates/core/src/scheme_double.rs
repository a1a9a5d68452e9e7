//! Stretch-2 routing in double histograms.
//!
//! A label holds a vertex's normalized coordinates and the bounds of I(v).
//! The table holds I²(bd(v)), I²(td(v)), the coordinates of bd²(v) and one
//! bit choosing the first hop of the canonical path to bd²(v). Headers carry
//! at most one vertex's coordinates.

use std::collections::HashMap;
use std::fmt::Write as _;

use thiserror::Error;

use crate::bits::{ceil_log2, BitError, BitWriter, Bits};
use crate::engine::{Hop, LinkTable, RoutingScheme, StepError};
use crate::landmarks::{
    dominators, extension_indices, extension_sequences, first_hop_is_top, k_dominators, Candidate,
    LandmarkError,
};
use crate::polygon::{normalize, Histogram, Kind, Point};
use crate::visibility::{Interval, Visibility, VisibilityGraph};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct DoubleLabel {
    pub x: i64,
    pub y: i64,
    pub lo: i64,
    pub hi: i64,
}

impl DoubleLabel {
    pub fn point(&self) -> Point {
        Point::new(self.x, self.y)
    }

    fn candidate(&self) -> Candidate {
        Candidate {
            x: self.x,
            base_dist: self.y.abs(),
            lo: self.lo,
            hi: self.hi,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DoubleTable {
    pub bd_i2: Interval,
    pub td_i2: Interval,
    pub bd2: Point,
    /// π_b(v,2) leaves v through td(v).
    pub bit: bool,
}

pub type DoubleHeader = Option<Point>;

#[derive(Debug, Error)]
pub enum BuildError {
    #[error("expected a double histogram, got a {0} histogram")]
    WrongKind(Kind),
    #[error(transparent)]
    Landmark(#[from] LandmarkError),
    #[error("vertex {v}: {source}")]
    Bits { v: usize, source: BitError },
}

#[derive(Debug, Error)]
pub enum DumpError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DoubleScheme {
    width: u32,
    labels: Vec<DoubleLabel>,
    tables: Vec<DoubleTable>,
    links: Vec<LinkTable<DoubleLabel>>,
    index: HashMap<Point, usize>,
}

impl DoubleScheme {
    /// Normalizes `h` and preprocesses it.
    pub fn build(h: &Histogram) -> Result<Self, BuildError> {
        Self::from_visibility(&Visibility::new(normalize(h)))
    }

    /// Preprocesses `vis` as given; coordinates must fit the bit widths,
    /// which holds for normalized histograms.
    pub fn from_visibility(vis: &Visibility) -> Result<Self, BuildError> {
        let h = &vis.hist;
        if h.kind() != Kind::Double {
            return Err(BuildError::WrongKind(h.kind()));
        }
        let n = h.n();
        let labels: Vec<DoubleLabel> = (0..n)
            .map(|v| {
                let p = h.point(v);
                let i = vis.interval(v);
                DoubleLabel {
                    x: p.x,
                    y: p.y,
                    lo: i.lo,
                    hi: i.hi,
                }
            })
            .collect();
        let i2: Vec<Interval> = (0..n)
            .map(|v| extension_sequences(vis, v).second_interval())
            .collect();
        let tables = (0..n)
            .map(|v| {
                let dom = k_dominators(vis, v, 2);
                Ok(DoubleTable {
                    bd_i2: i2[dom.bd[1]],
                    td_i2: i2[dom.td[1]],
                    bd2: h.point(dom.bd[2]),
                    bit: first_hop_is_top(vis, &dom)?,
                })
            })
            .collect::<Result<Vec<_>, BuildError>>()?;
        let scheme = Self::assemble(labels, tables, &vis.graph);
        for v in 0..n {
            scheme
                .encode_label(&scheme.labels[v])
                .and_then(|_| scheme.encode_table(&scheme.tables[v]))
                .map_err(|source| BuildError::Bits { v, source })?;
        }
        Ok(scheme)
    }

    fn assemble(
        labels: Vec<DoubleLabel>,
        tables: Vec<DoubleTable>,
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
        let index = labels
            .iter()
            .enumerate()
            .map(|(v, l)| (l.point(), v))
            .collect();
        Self {
            width: ceil_log2(labels.len()),
            labels,
            tables,
            links,
            index,
        }
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn vertex_at(&self, p: Point) -> Option<usize> {
        self.index.get(&p).copied()
    }

    pub fn encode_label(&self, l: &DoubleLabel) -> Result<Bits, BitError> {
        let w = self.width;
        let mut out = BitWriter::new();
        out.unsigned(l.x as u64, w)?
            .signed(l.y, w)?
            .unsigned(l.lo as u64, w)?
            .unsigned(l.hi as u64, w)?;
        Ok(out.finish())
    }

    pub fn encode_table(&self, t: &DoubleTable) -> Result<Bits, BitError> {
        let w = self.width;
        let mut out = BitWriter::new();
        for i in [t.bd_i2, t.td_i2] {
            out.unsigned(i.lo as u64, w)?.unsigned(i.hi as u64, w)?;
        }
        out.unsigned(t.bd2.x as u64, w)?
            .signed(t.bd2.y, w)?
            .flag(t.bit);
        Ok(out.finish())
    }

    pub fn encode_header(&self, h: &DoubleHeader) -> Result<Bits, BitError> {
        let mut out = BitWriter::new();
        if let Some(p) = h {
            out.unsigned(p.x as u64, self.width)?
                .signed(p.y, self.width)?;
        }
        Ok(out.finish())
    }

    pub fn graph(&self) -> VisibilityGraph {
        VisibilityGraph::from_adjacency(
            self.links
                .iter()
                .map(|l| {
                    let mut nb: Vec<usize> = l
                        .entries
                        .iter()
                        .filter(|e| **e != l.own)
                        .map(|e| self.index[&e.point()])
                        .collect();
                    nb.sort_unstable();
                    nb
                })
                .collect(),
        )
    }

    /// Text dump: a header line, then
    /// `id | x y | lo hi | bdlo bdhi tdlo tdhi bd2x bd2y | bit | neighbor ids`.
    pub fn dump(&self) -> String {
        let mut out = format!("scheme double {} {}\n", self.labels.len(), self.width);
        let graph = self.graph();
        for (v, (l, t)) in self.labels.iter().zip(&self.tables).enumerate() {
            let nb: Vec<String> = graph.neighbors(v).iter().map(usize::to_string).collect();
            let _ = writeln!(
                out,
                "{v} | {} {} | {} {} | {} {} {} {} {} {} | {} | {}",
                l.x,
                l.y,
                l.lo,
                l.hi,
                t.bd_i2.lo,
                t.bd_i2.hi,
                t.td_i2.lo,
                t.td_i2.hi,
                t.bd2.x,
                t.bd2.y,
                u8::from(t.bit),
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
        let n = match head.split_whitespace().collect::<Vec<_>>().as_slice() {
            ["scheme", "double", n, w] if w.parse::<u32>().is_ok() => n
                .parse::<usize>()
                .map_err(|_| syntax(1, "bad vertex count"))?,
            _ => return Err(syntax(1, "expected `scheme double <n> <width>`")),
        };
        let mut labels = Vec::with_capacity(n);
        let mut tables = Vec::with_capacity(n);
        let mut adj = Vec::with_capacity(n);
        for (i, line) in lines {
            let line_no = i + 1;
            let fields: Vec<&str> = line.split('|').map(str::trim).collect();
            let ints = |f: &str, count: usize| -> Result<Vec<i64>, DumpError> {
                let v = f
                    .split_whitespace()
                    .map(str::parse::<i64>)
                    .collect::<Result<Vec<_>, _>>()
                    .map_err(|_| syntax(line_no, "bad integer"))?;
                if count != usize::MAX && v.len() != count {
                    return Err(syntax(line_no, "wrong field count"));
                }
                Ok(v)
            };
            if fields.len() != 6 || fields[0].parse() != Ok(labels.len()) {
                return Err(syntax(line_no, "expected 6 `|`-separated fields"));
            }
            let xy = ints(fields[1], 2)?;
            let b = ints(fields[2], 2)?;
            let t = ints(fields[3], 6)?;
            let bit = match fields[4] {
                "0" => false,
                "1" => true,
                _ => return Err(syntax(line_no, "bit must be 0 or 1")),
            };
            let nb = ints(fields[5], usize::MAX)?;
            if nb.iter().any(|&w| w < 0 || w as usize >= n)
                || b[0] > b[1]
                || t[0] > t[1]
                || t[2] > t[3]
            {
                return Err(syntax(line_no, "value out of range"));
            }
            labels.push(DoubleLabel {
                x: xy[0],
                y: xy[1],
                lo: b[0],
                hi: b[1],
            });
            tables.push(DoubleTable {
                bd_i2: Interval::new(t[0], t[1]),
                td_i2: Interval::new(t[2], t[3]),
                bd2: Point::new(t[4], t[5]),
                bit,
            });
            adj.push(nb.into_iter().map(|w| w as usize).collect());
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

/// Closest-to-base, then leftmost, link-table entry on one side of the base
/// line, falling back to the other side.
pub fn local_dominators(links: &LinkTable<DoubleLabel>) -> (DoubleLabel, DoubleLabel) {
    let pick = |below: bool| {
        links
            .entries
            .iter()
            .filter(|e| (e.y < 0) == below)
            .min_by_key(|e| (e.y.abs(), e.x))
            .copied()
    };
    match (pick(true), pick(false)) {
        (Some(b), Some(t)) => (b, t),
        (Some(b), None) => (b, b),
        (None, Some(t)) => (t, t),
        (None, None) => (links.own, links.own),
    }
}

/// The a- and b-sequences of the link table's owner.
pub fn local_sequences(links: &LinkTable<DoubleLabel>) -> (Vec<DoubleLabel>, Vec<DoubleLabel>) {
    let cands: Vec<Candidate> = links.entries.iter().map(DoubleLabel::candidate).collect();
    let own = links
        .entries
        .iter()
        .position(|e| *e == links.own)
        .expect("link table contains its owner");
    let (a, b) = extension_indices(&cands, own);
    (
        a.into_iter().map(|i| links.entries[i]).collect(),
        b.into_iter().map(|i| links.entries[i]).collect(),
    )
}

/// Case-1 hop for a target inside I(s) but not visible: t's vertical
/// partner if visible, else the far dominator, else the near dominator.
pub fn local_case1(links: &LinkTable<DoubleLabel>, target: &DoubleLabel) -> Option<DoubleLabel> {
    let s = links.own;
    let entries = &links.entries;
    if let Some(p) = entries.iter().find(|e| e.x == target.x) {
        return Some(*p);
    }
    let right = target.x > s.x;
    let beyond = entries
        .iter()
        .filter(|e| {
            if right {
                e.x > target.x
            } else {
                e.x < target.x
            }
        })
        .min_by_key(|e| ((e.x - target.x).abs(), e.y.abs()));
    let before = entries
        .iter()
        .filter(|e| {
            if right {
                e.x < target.x
            } else {
                e.x > target.x
            }
        })
        .min_by_key(|e| ((e.x - target.x).abs(), e.y.abs()));
    beyond.or(before).copied()
}

/// Compares every locally derived quantity with its global definition on
/// the histogram the scheme was built from. Returns one line per mismatch.
pub fn cross_check(scheme: &DoubleScheme, vis: &Visibility) -> Vec<String> {
    let mut out = Vec::new();
    let ids = |ls: &[DoubleLabel]| -> Vec<Option<usize>> {
        ls.iter().map(|l| scheme.resolve(l)).collect()
    };
    for v in 0..vis.n() {
        let links = scheme.link_table(v);
        let dom = k_dominators(vis, v, 1);
        let (bd, td) = local_dominators(links);
        if ids(&[bd, td]) != [Some(dom.bd[1]), Some(dom.td[1])] {
            out.push(format!("{v}: local dominators {:?} differ", ids(&[bd, td])));
        }
        let (a, b) = local_sequences(links);
        let seq = extension_sequences(vis, v);
        let wrap = |s: &[usize]| s.iter().map(|&x| Some(x)).collect::<Vec<_>>();
        if ids(&a) != wrap(&seq.a) || ids(&b) != wrap(&seq.b) {
            out.push(format!("{v}: local sequences differ"));
        }
        for t in vis
            .vertices_in(vis.interval(v))
            .filter(|&t| !vis.sees(v, t))
        {
            let partner = vis.hist.vertical_partner(t);
            let expected = if vis.sees(v, partner) {
                partner
            } else {
                match dominators(vis, v, t) {
                    Ok(d) => d.fd.vertex().unwrap_or(d.nd),
                    Err(e) => {
                        out.push(format!("{v} -> {t}: {e}"));
                        continue;
                    }
                }
            };
            let local = local_case1(links, scheme.label(t)).and_then(|l| scheme.resolve(&l));
            if local != Some(expected) {
                out.push(format!(
                    "{v} -> {t}: case-1 hop {local:?}, expected {expected}"
                ));
            }
        }
    }
    out
}

fn find(links: &LinkTable<DoubleLabel>, p: Point) -> Option<DoubleLabel> {
    links.entries.iter().find(|e| e.point() == p).copied()
}

impl RoutingScheme for DoubleScheme {
    type Label = DoubleLabel;
    type Table = DoubleTable;
    type Header = DoubleHeader;

    fn n(&self) -> usize {
        self.labels.len()
    }

    fn label(&self, v: usize) -> &DoubleLabel {
        &self.labels[v]
    }

    fn table(&self, v: usize) -> &DoubleTable {
        &self.tables[v]
    }

    fn link_table(&self, v: usize) -> &LinkTable<DoubleLabel> {
        &self.links[v]
    }

    fn resolve(&self, label: &DoubleLabel) -> Option<usize> {
        self.vertex_at(label.point())
            .filter(|&v| self.labels[v] == *label)
    }

    fn label_bits(&self, _: usize) -> usize {
        4 * self.width as usize + 1
    }

    fn table_bits(&self, _: usize) -> usize {
        6 * self.width as usize + 2
    }

    fn header_bits(&self, header: &DoubleHeader) -> usize {
        match header {
            Some(_) => 2 * self.width as usize + 1,
            None => 0,
        }
    }

    fn step(
        links: &LinkTable<DoubleLabel>,
        table: &DoubleTable,
        target: &DoubleLabel,
        header: &DoubleHeader,
    ) -> Result<Hop<DoubleLabel, DoubleHeader>, StepError> {
        let go = |next: DoubleLabel| Ok(Hop { next, header: None });
        let s = links.own;
        if let Some(t) = find(links, target.point()) {
            return go(t);
        }
        // A header naming the current vertex has already been delivered.
        if let Some(p) = header.filter(|&p| p != s.point()) {
            return match find(links, p) {
                Some(v) => go(v),
                None => Err(StepError::HeaderProtocol(p.to_string())),
            };
        }

        let tx = target.x;
        if s.lo <= tx && tx <= s.hi {
            return local_case1(links, target).map_or(Err(StepError::NoProgress), go);
        }

        let (a, b) = local_sequences(links);
        let (left_star, right_star) = (a.last().unwrap().lo, b.last().unwrap().hi);
        if left_star <= tx && tx <= right_star {
            let hop = if tx < s.lo {
                a.windows(2)
                    .find(|w| w[1].lo <= tx && tx <= w[0].lo)
                    .map(|w| w[1])
            } else {
                b.windows(2)
                    .find(|w| w[0].hi <= tx && tx <= w[1].hi)
                    .map(|w| w[1])
            };
            return hop.map_or(Err(StepError::NoProgress), go);
        }

        let (bd, td) = local_dominators(links);
        if table.bd_i2.hull(&table.td_i2).contains(tx) {
            return go(if table.bd_i2.contains(tx) { bd } else { td });
        }

        let first = if table.bit { td } else { bd };
        if first == s {
            // s sees bd²(s) directly.
            return find(links, table.bd2)
                .map_or(Err(StepError::HeaderProtocol(table.bd2.to_string())), go);
        }
        Ok(Hop {
            next: first,
            header: Some(table.bd2),
        })
    }
}
