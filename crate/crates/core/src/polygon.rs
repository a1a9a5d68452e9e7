//! Simple and double histogram polygons.
//!
//! A histogram is stored as its counterclockwise vertex cycle. Vertex 0 is
//! the upper endpoint of the left boundary edge, so edge `i -> i+1` is
//! vertical for even `i` and horizontal for odd `i`. For a simple histogram
//! the horizontal edge `n-1 -> 0` is the base edge; for a double histogram
//! the base line is the x-axis.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Point {
    pub x: i64,
    pub y: i64,
}

impl Point {
    pub const fn new(x: i64, y: i64) -> Self {
        Self { x, y }
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.x, self.y)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Kind {
    Simple,
    Double,
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Kind::Simple => "simple",
            Kind::Double => "double",
        })
    }
}

impl FromStr for Kind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "simple" => Ok(Kind::Simple),
            "double" => Ok(Kind::Double),
            other => Err(format!("unknown histogram kind `{other}`")),
        }
    }
}

/// Position of a vertex relative to the base line.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Above,
    Below,
    OnSimpleBase,
}

/// Whether a vertex is the left or the right endpoint of its horizontal edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orientation {
    Left,
    Right,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Convexity {
    Convex,
    Reflex,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Vertex {
    pub id: usize,
    pub point: Point,
    pub side: Side,
    pub orientation: Orientation,
    pub convexity: Convexity,
}

impl Vertex {
    pub fn is_reflex(&self) -> bool {
        self.convexity == Convexity::Reflex
    }

    /// ℓ-reflex: left endpoint of its horizontal edge and reflex.
    pub fn is_left_reflex(&self) -> bool {
        self.is_reflex() && self.orientation == Orientation::Left
    }

    /// r-reflex: right endpoint of its horizontal edge and reflex.
    pub fn is_right_reflex(&self) -> bool {
        self.is_reflex() && self.orientation == Orientation::Right
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Axis::X => "x",
            Axis::Y => "y",
        })
    }
}

/// A violated histogram invariant.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ValidationError {
    #[error("too few vertices: {0} (need at least 4)")]
    TooFewVertices(usize),
    #[error("odd vertex count {0}: an orthogonal polygon has an even number of vertices")]
    OddVertexCount(usize),
    #[error("general position violated: {count} vertices share {axis} = {value}")]
    GeneralPosition {
        axis: Axis,
        value: i64,
        count: usize,
    },
    #[error("edge {edge} ({from} -> {to}) is not axis-parallel")]
    NotOrthogonal { edge: usize, from: Point, to: Point },
    #[error("edge {edge} has zero length")]
    ZeroLengthEdge { edge: usize },
    #[error("edges {edge} and {next} do not alternate between horizontal and vertical")]
    NotAlternating { edge: usize, next: usize },
    #[error("boundary is not simple: edges {first} and {second} intersect")]
    NotSimple { first: usize, second: usize },
    #[error("polygon is not x-monotone")]
    NotXMonotone,
    #[error("vertices are not in counterclockwise order")]
    NotCounterClockwise,
    #[error("vertex 0 {found} must be the upper endpoint of the left boundary edge")]
    BadAnchor { found: Point },
    #[error(
        "simple histogram: upper boundary must be the single edge between vertex 0 and vertex n-1"
    )]
    NotSingleBaseEdge,
    #[error("simple histogram: vertex n-1 {found} is not the lexicographically largest vertex")]
    LastNotLexMax { found: Point },
    #[error("double histogram: vertex {id} lies on the base line y = 0")]
    VertexOnBaseLine { id: usize },
    #[error("double histogram: base line y = 0 not strictly between bottom chain max y {bottom_max} and top chain min y {top_min}")]
    BaseLineNotInterior { bottom_max: i64, top_min: i64 },
}

#[derive(Debug, Error)]
pub enum ParseError {
    #[error("line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid histogram: {0}")]
    Invalid(#[from] ValidationError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GenerateError {
    #[error("invalid vertex count {n} for a {kind} histogram (need an even n >= 4)")]
    InvalidCount { kind: Kind, n: usize },
}

/// A validated simple or double histogram.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Histogram {
    kind: Kind,
    vertices: Vec<Vertex>,
    base_y: i64,
}

impl Histogram {
    /// Validates `points` (counterclockwise, starting at vertex 0) and
    /// classifies every vertex.
    pub fn new(kind: Kind, points: Vec<Point>) -> Result<Self, ValidationError> {
        validate_points(kind, &points)?;
        Ok(Self::classify(kind, &points))
    }

    fn classify(kind: Kind, points: &[Point]) -> Self {
        let n = points.len();
        let base_y = match kind {
            Kind::Simple => points[0].y,
            Kind::Double => 0,
        };
        let vertices = (0..n)
            .map(|id| {
                let p = points[id];
                let prev = points[(id + n - 1) % n];
                let next = points[(id + 1) % n];
                let turn = cross(sub(p, prev), sub(next, p));
                let convexity = if turn > 0 {
                    Convexity::Convex
                } else {
                    Convexity::Reflex
                };
                let cv = if id % 2 == 1 { next } else { prev };
                let orientation = if cv.x > p.x {
                    Orientation::Left
                } else {
                    Orientation::Right
                };
                let side = match kind {
                    Kind::Simple if id == 0 || id == n - 1 => Side::OnSimpleBase,
                    Kind::Simple => Side::Below,
                    Kind::Double if p.y > 0 => Side::Above,
                    Kind::Double => Side::Below,
                };
                Vertex {
                    id,
                    point: p,
                    side,
                    orientation,
                    convexity,
                }
            })
            .collect();
        Self {
            kind,
            vertices,
            base_y,
        }
    }

    pub fn kind(&self) -> Kind {
        self.kind
    }

    pub fn n(&self) -> usize {
        self.vertices.len()
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn vertex(&self, id: usize) -> &Vertex {
        &self.vertices[id]
    }

    pub fn point(&self, id: usize) -> Point {
        self.vertices[id].point
    }

    pub fn points(&self) -> Vec<Point> {
        self.vertices.iter().map(|v| v.point).collect()
    }

    /// y of the base edge (simple) or of the base line (double, always 0).
    pub fn base_y(&self) -> i64 {
        self.base_y
    }

    /// The vertex sharing `v`'s horizontal edge.
    pub fn cv(&self, v: usize) -> usize {
        let n = self.n();
        if v % 2 == 1 {
            (v + 1) % n
        } else {
            (v + n - 1) % n
        }
    }

    /// The vertex sharing `v`'s vertical edge.
    pub fn vertical_partner(&self, v: usize) -> usize {
        if v.is_multiple_of(2) {
            v + 1
        } else {
            v - 1
        }
    }

    pub fn x_min(&self) -> i64 {
        self.vertices[0].point.x
    }

    pub fn x_max(&self) -> i64 {
        self.vertices.iter().map(|v| v.point.x).max().unwrap_or(0)
    }

    /// Vertical distance to the base edge or base line; smaller is closer.
    pub fn base_distance(&self, p: Point) -> i64 {
        match self.kind {
            Kind::Simple => self.base_y - p.y,
            Kind::Double => p.y.abs(),
        }
    }

    pub fn is_base_vertex(&self, v: usize) -> bool {
        self.kind == Kind::Simple && (v == 0 || v == self.n() - 1)
    }

    pub fn on_boundary_edge(&self, v: usize) -> bool {
        let x = self.point(v).x;
        x == self.x_min() || x == self.x_max()
    }

    /// Vertical edges as `(2k, 2k+1)` vertex pairs.
    pub fn vertical_edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n()).step_by(2).map(|v| (v, v + 1))
    }

    /// Horizontal edges as `(left endpoint, right endpoint)`.
    pub fn horizontal_edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let n = self.n();
        (1..n).step_by(2).map(move |a| {
            let b = (a + 1) % n;
            if self.point(a).x < self.point(b).x {
                (a, b)
            } else {
                (b, a)
            }
        })
    }

    /// Re-checks every invariant of the stored vertex cycle.
    pub fn validate(&self) -> Result<(), ValidationError> {
        validate_points(self.kind, &self.points())
    }

    /// Serializes in the polygon file format.
    pub fn to_text(&self) -> String {
        let mut out = format!("{} {}\n", self.kind, self.n());
        for v in &self.vertices {
            out.push_str(&format!("{} {}\n", v.point.x, v.point.y));
        }
        out
    }
}

impl fmt::Display for Histogram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

fn sub(a: Point, b: Point) -> Point {
    Point::new(a.x - b.x, a.y - b.y)
}

fn cross(a: Point, b: Point) -> i64 {
    a.x * b.y - a.y * b.x
}

fn signed_area2(points: &[Point]) -> i64 {
    let n = points.len();
    (0..n).map(|i| cross(points[i], points[(i + 1) % n])).sum()
}

fn check_general_position(points: &[Point]) -> Result<(), ValidationError> {
    for axis in [Axis::X, Axis::Y] {
        let mut counts: HashMap<i64, usize> = HashMap::new();
        for p in points {
            let key = match axis {
                Axis::X => p.x,
                Axis::Y => p.y,
            };
            *counts.entry(key).or_default() += 1;
        }
        if let Some((&value, &count)) = counts
            .iter()
            .filter(|(_, &c)| c > 2)
            .min_by_key(|(&v, _)| v)
        {
            return Err(ValidationError::GeneralPosition { axis, value, count });
        }
    }
    Ok(())
}

fn check_orthogonal(points: &[Point]) -> Result<(), ValidationError> {
    let n = points.len();
    let mut vertical = Vec::with_capacity(n);
    for i in 0..n {
        let (a, b) = (points[i], points[(i + 1) % n]);
        if a == b {
            return Err(ValidationError::ZeroLengthEdge { edge: i });
        }
        if a.x != b.x && a.y != b.y {
            return Err(ValidationError::NotOrthogonal {
                edge: i,
                from: a,
                to: b,
            });
        }
        vertical.push(a.x == b.x);
    }
    for i in 0..n {
        if vertical[i] == vertical[(i + 1) % n] {
            return Err(ValidationError::NotAlternating {
                edge: i,
                next: (i + 1) % n,
            });
        }
    }
    Ok(())
}

fn segments_touch(a0: Point, a1: Point, b0: Point, b1: Point) -> bool {
    let (ax0, ax1) = (a0.x.min(a1.x), a0.x.max(a1.x));
    let (ay0, ay1) = (a0.y.min(a1.y), a0.y.max(a1.y));
    let (bx0, bx1) = (b0.x.min(b1.x), b0.x.max(b1.x));
    let (by0, by1) = (b0.y.min(b1.y), b0.y.max(b1.y));
    ax0 <= bx1 && bx0 <= ax1 && ay0 <= by1 && by0 <= ay1
}

fn check_simple(points: &[Point]) -> Result<(), ValidationError> {
    let n = points.len();
    for i in 0..n {
        let (a0, a1) = (points[i], points[(i + 1) % n]);
        for j in i + 2..n {
            if i == 0 && j == n - 1 {
                continue;
            }
            let (b0, b1) = (points[j], points[(j + 1) % n]);
            if segments_touch(a0, a1, b0, b1) {
                return Err(ValidationError::NotSimple {
                    first: i,
                    second: j,
                });
            }
        }
    }
    Ok(())
}

/// Cyclic runs of horizontal edge directions; an x-monotone orthogonal
/// polygon has exactly one run going right and one going left.
fn check_x_monotone(points: &[Point]) -> Result<(), ValidationError> {
    let n = points.len();
    let dirs: Vec<bool> = (0..n)
        .filter(|&i| points[i].y == points[(i + 1) % n].y)
        .map(|i| points[(i + 1) % n].x > points[i].x)
        .collect();
    let changes = (0..dirs.len())
        .filter(|&k| dirs[k] != dirs[(k + 1) % dirs.len()])
        .count();
    if changes == 2 {
        Ok(())
    } else {
        Err(ValidationError::NotXMonotone)
    }
}

/// Checks every histogram invariant on a raw vertex cycle, reporting the
/// first violation.
pub fn validate_points(kind: Kind, points: &[Point]) -> Result<(), ValidationError> {
    let n = points.len();
    if n < 4 {
        return Err(ValidationError::TooFewVertices(n));
    }
    if n % 2 == 1 {
        return Err(ValidationError::OddVertexCount(n));
    }
    check_general_position(points)?;
    check_orthogonal(points)?;
    check_simple(points)?;
    check_x_monotone(points)?;
    if signed_area2(points) <= 0 {
        return Err(ValidationError::NotCounterClockwise);
    }

    let x_min = points.iter().map(|p| p.x).min().unwrap_or(0);
    let (p0, p1) = (points[0], points[1]);
    if p0.x != x_min || p1.x != x_min || p0.y < p1.y {
        return Err(ValidationError::BadAnchor { found: p0 });
    }

    // Edges going left form the upper chain, edges going right the lower one.
    let horizontal = |i: usize| (points[i], points[(i + 1) % n]);
    let upper: Vec<usize> = (1..n)
        .step_by(2)
        .filter(|&i| horizontal(i).1.x < horizontal(i).0.x)
        .collect();
    match kind {
        Kind::Simple => {
            if upper != [n - 1] {
                return Err(ValidationError::NotSingleBaseEdge);
            }
            let last = points[n - 1];
            let lex_max = points.iter().max_by_key(|p| (p.x, p.y)).copied();
            if lex_max != Some(last) {
                return Err(ValidationError::LastNotLexMax { found: last });
            }
        }
        Kind::Double => {
            if let Some(id) = points.iter().position(|p| p.y == 0) {
                return Err(ValidationError::VertexOnBaseLine { id });
            }
            let lower = (1..n).step_by(2).filter(|i| !upper.contains(i));
            let bottom_max = lower.map(|i| points[i].y).max().unwrap_or(0);
            let top_min = upper.iter().map(|&i| points[i].y).min().unwrap_or(0);
            if !(bottom_max < 0 && 0 < top_min) {
                return Err(ValidationError::BaseLineNotInterior {
                    bottom_max,
                    top_min,
                });
            }
        }
    }
    Ok(())
}

/// Parses the polygon file format: a `kind n` header followed by `n` lines
/// of `x y`. Blank lines and `#` comments are ignored.
pub fn parse_polygon(text: &str) -> Result<Histogram, ParseError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, raw)| {
            let content = raw.split('#').next().unwrap_or("");
            (i + 1, raw, content)
        })
        .filter(|(_, _, content)| !content.trim().is_empty());

    let syntax = |line: usize, column: usize, message: String| ParseError::Syntax {
        line,
        column,
        message,
    };

    let (line_no, raw, content) = lines
        .next()
        .ok_or_else(|| syntax(1, 1, "missing `kind n` header".into()))?;
    let header = tokens(raw, content);
    if header.len() != 2 {
        let col = header.get(2).map_or(raw.len() + 1, |t| t.0);
        return Err(syntax(line_no, col, "expected `kind n`".into()));
    }
    let kind: Kind = header[0]
        .1
        .parse()
        .map_err(|e: String| syntax(line_no, header[0].0, e))?;
    let declared: usize = header[1].1.parse().map_err(|_| {
        syntax(
            line_no,
            header[1].0,
            format!("invalid vertex count `{}`", header[1].1),
        )
    })?;

    let mut points = Vec::with_capacity(declared);
    for (line_no, raw, content) in lines {
        let toks = tokens(raw, content);
        if toks.len() != 2 {
            let col = toks.get(2).map_or(raw.len() + 1, |t| t.0);
            return Err(syntax(line_no, col, "expected `x y`".into()));
        }
        let mut coord = [0i64; 2];
        for (slot, (col, tok)) in coord.iter_mut().zip(&toks) {
            *slot = tok
                .parse()
                .map_err(|_| syntax(line_no, *col, format!("invalid integer `{tok}`")))?;
        }
        if points.len() == declared {
            return Err(syntax(
                line_no,
                1,
                format!("more than the declared {declared} vertices"),
            ));
        }
        points.push(Point::new(coord[0], coord[1]));
    }
    if points.len() != declared {
        let last = text.lines().count().max(1);
        return Err(syntax(
            last,
            1,
            format!("expected {declared} vertices, found {}", points.len()),
        ));
    }
    Ok(Histogram::new(kind, points)?)
}

/// Whitespace-separated tokens of `content` with 1-based columns in `raw`.
fn tokens<'a>(raw: &'a str, content: &'a str) -> Vec<(usize, &'a str)> {
    let base = content.as_ptr() as usize - raw.as_ptr() as usize;
    content
        .split_whitespace()
        .map(|tok| {
            (
                tok.as_ptr() as usize - content.as_ptr() as usize + base + 1,
                tok,
            )
        })
        .collect()
}

fn rank_map(values: impl Iterator<Item = i64>) -> HashMap<i64, i64> {
    let distinct: BTreeSet<i64> = values.collect();
    distinct
        .into_iter()
        .enumerate()
        .map(|(rank, v)| (v, rank as i64))
        .collect()
}

/// Order-preserving coordinate compression.
///
/// x values become ranks `0..`; y values become ranks with the base edge on
/// top (simple) or signed ranks `±1, ±2, ..` counted away from the base
/// line (double). Vertex ids are unchanged.
pub fn normalize(h: &Histogram) -> Histogram {
    let points = h.points();
    let xs = rank_map(points.iter().map(|p| p.x));
    let y_of: Box<dyn Fn(i64) -> i64> = match h.kind() {
        Kind::Simple => {
            let ys = rank_map(points.iter().map(|p| p.y));
            Box::new(move |y| ys[&y])
        }
        Kind::Double => {
            let above = rank_map(points.iter().map(|p| p.y).filter(|&y| y > 0));
            let below = rank_map(points.iter().map(|p| -p.y).filter(|&y| y > 0));
            Box::new(move |y| {
                if y > 0 {
                    above[&y] + 1
                } else {
                    -(below[&-y] + 1)
                }
            })
        }
    };
    let mapped = points
        .iter()
        .map(|p| Point::new(xs[&p.x], y_of(p.y)))
        .collect::<Vec<_>>();
    Histogram::classify(h.kind(), &mapped)
}

/// Deterministically generates a random valid histogram with `n` vertices.
///
/// Vertical edges sit at distinct x ranks and every horizontal edge gets its
/// own height level, drawn as a random permutation, so general position
/// holds by construction.
pub fn generate(kind: Kind, n: usize, seed: u64) -> Result<Histogram, GenerateError> {
    if n < 4 || n % 2 == 1 {
        return Err(GenerateError::InvalidCount { kind, n });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let points = match kind {
        Kind::Simple => {
            // m vertical edges at x = 0..m, m-1 floor edges below the base.
            let m = n / 2;
            let top = (m - 1) as i64;
            let mut levels: Vec<i64> = (0..top).collect();
            levels.shuffle(&mut rng);
            let mut pts = vec![Point::new(0, top)];
            for (k, &y) in levels.iter().enumerate() {
                pts.push(Point::new(k as i64, y));
                pts.push(Point::new(k as i64 + 1, y));
            }
            pts.push(Point::new(top, top));
            pts
        }
        Kind::Double => {
            let m = n / 2;
            let bottom_edges = rng.gen_range(1..m);
            let top_edges = m - bottom_edges;
            // Interior x ranks 1..m-1 are split between the two chains.
            let mut interior: Vec<i64> = (1..m as i64 - 1).collect();
            interior.shuffle(&mut rng);
            let mut bottom_x: Vec<i64> = interior[..bottom_edges - 1].to_vec();
            let mut top_x: Vec<i64> = interior[bottom_edges - 1..].to_vec();
            bottom_x.sort_unstable();
            top_x.sort_unstable();
            let x_max = m as i64 - 1;

            let mut bottom_levels: Vec<i64> = (1..=bottom_edges as i64).map(|y| -y).collect();
            bottom_levels.shuffle(&mut rng);
            let mut top_levels: Vec<i64> = (1..=top_edges as i64).collect();
            top_levels.shuffle(&mut rng);

            let mut bottom_breaks = vec![0];
            bottom_breaks.extend(&bottom_x);
            bottom_breaks.push(x_max);
            let mut top_breaks = vec![0];
            top_breaks.extend(&top_x);
            top_breaks.push(x_max);

            let mut pts = vec![Point::new(0, top_levels[0])];
            for (k, &y) in bottom_levels.iter().enumerate() {
                pts.push(Point::new(bottom_breaks[k], y));
                pts.push(Point::new(bottom_breaks[k + 1], y));
            }
            for k in (0..top_edges).rev() {
                let y = top_levels[k];
                pts.push(Point::new(top_breaks[k + 1], y));
                if k > 0 {
                    pts.push(Point::new(top_breaks[k], y));
                }
            }
            pts
        }
    };
    let h = Histogram::new(kind, points).expect("generator produced an invalid histogram");
    Ok(h)
}
