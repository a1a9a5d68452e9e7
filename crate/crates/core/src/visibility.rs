//! Landmarks ℓ(v), r(v), visibility intervals and the r-visibility graph.

use std::collections::HashMap;
use std::fmt::Write as _;

use crate::polygon::{Histogram, Kind, Point};

/// End of the maximal horizontal segment through a vertex.
///
/// For a double histogram the segment may end on a boundary edge at a point
/// that is not a vertex.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Landmark {
    Vertex { id: usize, point: Point },
    Boundary(Point),
}

impl Landmark {
    pub fn point(&self) -> Point {
        match *self {
            Landmark::Vertex { point, .. } | Landmark::Boundary(point) => point,
        }
    }

    pub fn x(&self) -> i64 {
        self.point().x
    }

    pub fn vertex(&self) -> Option<usize> {
        match *self {
            Landmark::Vertex { id, .. } => Some(id),
            Landmark::Boundary(_) => None,
        }
    }
}

/// Closed x-range `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Interval {
    pub lo: i64,
    pub hi: i64,
}

impl Interval {
    pub fn new(lo: i64, hi: i64) -> Self {
        debug_assert!(lo <= hi);
        Self { lo, hi }
    }

    pub fn contains(&self, x: i64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn contains_interval(&self, other: &Interval) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    pub fn overlaps(&self, other: &Interval) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }

    pub fn hull(&self, other: &Interval) -> Interval {
        Interval::new(self.lo.min(other.lo), self.hi.max(other.hi))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VertexLandmarks {
    pub left: Landmark,
    pub right: Landmark,
}

impl VertexLandmarks {
    pub fn interval(&self) -> Interval {
        Interval::new(self.left.x(), self.right.x())
    }

    /// ℓ(v) is strictly higher (closer to the base) than r(v).
    pub fn higher_left(&self, h: &Histogram) -> bool {
        h.base_distance(self.left.point()) < h.base_distance(self.right.point())
    }
}

/// Interior intervals of the horizontal line at doubled height `y2` (odd).
fn slice(h: &Histogram, y2: i64) -> Vec<(i64, i64)> {
    let mut xs: Vec<i64> = h
        .vertical_edges()
        .filter_map(|(a, b)| {
            let (pa, pb) = (h.point(a), h.point(b));
            let (lo, hi) = (2 * pa.y.min(pb.y), 2 * pa.y.max(pb.y));
            (lo < y2 && y2 < hi).then_some(pa.x)
        })
        .collect();
    xs.sort_unstable();
    xs.chunks_exact(2).map(|c| (c[0], c[1])).collect()
}

/// Maximal closed horizontal segment of `h` at height `y` containing `x`.
fn segment_at(
    h: &Histogram,
    cache: &mut HashMap<i64, Vec<(i64, i64)>>,
    x: i64,
    y: i64,
) -> (i64, i64) {
    let mut pieces: Vec<(i64, i64)> = [2 * y - 1, 2 * y + 1]
        .iter()
        .flat_map(|&y2| cache.entry(y2).or_insert_with(|| slice(h, y2)).clone())
        .collect();
    pieces.sort_unstable();
    let mut merged: Vec<(i64, i64)> = Vec::new();
    for (lo, hi) in pieces {
        match merged.last_mut() {
            Some(last) if lo <= last.1 => last.1 = last.1.max(hi),
            _ => merged.push((lo, hi)),
        }
    }
    merged
        .into_iter()
        .find(|&(lo, hi)| lo <= x && x <= hi)
        .expect("vertex lies on the polygon")
}

/// ℓ(v) and r(v) for every vertex.
pub fn compute_landmarks(h: &Histogram) -> Vec<VertexLandmarks> {
    let n = h.n();
    let edge_at: HashMap<i64, (usize, usize)> = h
        .vertical_edges()
        .map(|(a, b)| (h.point(a).x, (a, b)))
        .collect();
    let (x_min, x_max) = (h.x_min(), h.x_max());
    let mut cache = HashMap::new();

    let landmark = |end: i64, y: i64| -> Landmark {
        let boundary = end == x_min || end == x_max;
        match (h.kind(), boundary) {
            (Kind::Simple, true) => {
                let id = if end == x_min { 0 } else { n - 1 };
                Landmark::Vertex {
                    id,
                    point: h.point(id),
                }
            }
            (Kind::Double, true) => Landmark::Boundary(Point::new(end, y)),
            (_, false) => {
                let (a, b) = edge_at[&end];
                let id = if h.base_distance(h.point(a)) <= h.base_distance(h.point(b)) {
                    a
                } else {
                    b
                };
                Landmark::Vertex {
                    id,
                    point: h.point(id),
                }
            }
        }
    };

    (0..n)
        .map(|v| {
            let p = h.point(v);
            let (lo, hi) = segment_at(h, &mut cache, p.x, p.y);
            VertexLandmarks {
                left: landmark(lo, p.y),
                right: landmark(hi, p.y),
            }
        })
        .collect()
}

/// Visibility test from landmarks: `v` and `w` see each other iff each lies
/// in the other's interval.
pub fn co_visible_fast(h: &Histogram, lm: &[VertexLandmarks], v: usize, w: usize) -> bool {
    lm[w].interval().contains(h.point(v).x) && lm[v].interval().contains(h.point(w).x)
}

/// The r-visibility graph with sorted open neighbor lists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VisibilityGraph {
    adj: Vec<Vec<usize>>,
}

impl VisibilityGraph {
    pub fn from_adjacency(adj: Vec<Vec<usize>>) -> Self {
        Self { adj }
    }

    pub fn n(&self) -> usize {
        self.adj.len()
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    /// Neighbors of `v` together with `v` itself, sorted by id.
    pub fn closed_neighbors(&self, v: usize) -> Vec<usize> {
        let mut out = self.adj[v].clone();
        let pos = out.binary_search(&v).unwrap_err();
        out.insert(pos, v);
        out
    }

    pub fn adjacent(&self, v: usize, w: usize) -> bool {
        self.adj[v].binary_search(&w).is_ok()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// One line per vertex: `id: n1 n2 ...`.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for (v, nb) in self.adj.iter().enumerate() {
            let ids: Vec<String> = nb.iter().map(usize::to_string).collect();
            let _ = writeln!(out, "{v}: {}", ids.join(" "));
        }
        out
    }
}

/// Builds the visibility graph in O(n²) from the landmark intervals.
pub fn build_graph(h: &Histogram, lm: &[VertexLandmarks]) -> VisibilityGraph {
    let n = h.n();
    let adj = (0..n)
        .map(|v| {
            (0..n)
                .filter(|&w| w != v && co_visible_fast(h, lm, v, w))
                .collect()
        })
        .collect();
    VisibilityGraph { adj }
}

/// A histogram together with its landmarks and visibility graph.
#[derive(Debug, Clone)]
pub struct Visibility {
    pub hist: Histogram,
    pub landmarks: Vec<VertexLandmarks>,
    pub graph: VisibilityGraph,
}

impl Visibility {
    pub fn new(hist: Histogram) -> Self {
        let landmarks = compute_landmarks(&hist);
        let graph = build_graph(&hist, &landmarks);
        Self {
            hist,
            landmarks,
            graph,
        }
    }

    pub fn n(&self) -> usize {
        self.hist.n()
    }

    pub fn interval(&self, v: usize) -> Interval {
        self.landmarks[v].interval()
    }

    /// Visibility with `v` seeing itself.
    pub fn sees(&self, v: usize, w: usize) -> bool {
        v == w || self.graph.adjacent(v, w)
    }

    /// Vertices whose x lies in `range`.
    pub fn vertices_in(&self, range: Interval) -> impl Iterator<Item = usize> + '_ {
        (0..self.n()).filter(move |&v| range.contains(self.hist.point(v).x))
    }
}
