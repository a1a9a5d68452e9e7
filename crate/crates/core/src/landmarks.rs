//! Routing structures derived from the landmarks: near and far dominators,
//! breakpoints, the extension sequences a^i and b^i, the k-th bottom and top
//! dominators and their canonical paths.

use thiserror::Error;

use crate::polygon::{Kind, Orientation};
use crate::visibility::{Interval, Landmark, Visibility};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LandmarkError {
    #[error("target {t} is visible from {s}")]
    TargetVisible { s: usize, t: usize },
    #[error("target {t} lies outside the interval of {s}")]
    TargetOutsideInterval { s: usize, t: usize },
    #[error("vertex {0} has no breakpoint")]
    NoBreakpoint(usize),
    #[error("no canonical path step from {from} at level {level}")]
    BrokenCanonicalPath { from: usize, level: usize },
}

/// Position order on vertices: x first, then a nudge toward the partner on
/// the vertex's horizontal edge. Boundary-edge pairs tie. Used to decide on
/// which side of a target a vertex with the same x lies.
///
/// In a simple histogram this order coincides with id order.
pub fn position_key(vis: &Visibility, v: usize) -> (i64, i8) {
    let h = &vis.hist;
    let dir = if h.on_boundary_edge(v) {
        0
    } else {
        match h.vertex(v).orientation {
            Orientation::Left => 1,
            Orientation::Right => -1,
        }
    };
    (h.point(v).x, dir)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DominatorPair {
    pub nd: usize,
    pub fd: Landmark,
}

/// Near and far dominators of `s` with respect to a target `t` in
/// `I(s) \ N[s]`.
pub fn dominators(vis: &Visibility, s: usize, t: usize) -> Result<DominatorPair, LandmarkError> {
    let h = &vis.hist;
    if vis.sees(s, t) {
        return Err(LandmarkError::TargetVisible { s, t });
    }
    if !vis.interval(s).contains(h.point(t).x) {
        return Err(LandmarkError::TargetOutsideInterval { s, t });
    }
    let kt = position_key(vis, t);
    let rightward = kt > position_key(vis, s);
    let near_side = |v: usize| {
        let k = position_key(vis, v);
        if rightward {
            k < kt
        } else {
            k > kt
        }
    };
    // Larger score = better. The key only decides the side of t; among
    // candidates on one side, x ties go toward the base.
    let score = |v: usize, toward_t: bool| {
        let sign = if rightward == toward_t { 1 } else { -1 };
        (sign * h.point(v).x, -h.base_distance(h.point(v)))
    };
    let closed = vis.graph.closed_neighbors(s);
    let nd = closed
        .iter()
        .copied()
        .filter(|&v| near_side(v))
        .max_by_key(|&v| score(v, true))
        .expect("s itself is on the near side");
    let fd = closed
        .iter()
        .copied()
        .filter(|&v| v != t && !near_side(v))
        .max_by_key(|&v| score(v, false))
        .map(|id| Landmark::Vertex {
            id,
            point: h.point(id),
        })
        .unwrap_or(if rightward {
            vis.landmarks[s].right
        } else {
            vis.landmarks[s].left
        });
    Ok(DominatorPair { nd, fd })
}

/// Breakpoint of a reflex or base vertex of a simple histogram.
///
/// For an r-reflex vertex or vertex 0 this is the left endpoint of the
/// highest horizontal edge right of and below `v` whose left endpoint `v`
/// sees; ℓ-reflex vertices and vertex n-1 use the mirror image.
pub fn breakpoint(vis: &Visibility, v: usize) -> Result<usize, LandmarkError> {
    let h = &vis.hist;
    assert_eq!(
        h.kind(),
        Kind::Simple,
        "breakpoints are defined for simple histograms"
    );
    let n = h.n();
    let p = h.point(v);
    let toward_right = v == 0 || (v != n - 1 && h.vertex(v).is_right_reflex());
    h.horizontal_edges()
        .map(|(a, b)| if toward_right { a } else { b })
        .filter(|&e| {
            let q = h.point(e);
            let beside = if toward_right { q.x >= p.x } else { q.x <= p.x };
            beside && q.y < p.y && vis.sees(v, e)
        })
        .max_by_key(|&e| h.point(e).y)
        .ok_or(LandmarkError::NoBreakpoint(v))
}

/// Inputs to the extension-sequence recurrence for one vertex of `N[s]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Candidate {
    pub x: i64,
    pub base_dist: i64,
    pub lo: i64,
    pub hi: i64,
}

/// Runs the a^i / b^i recurrence on `cands` starting from `cands[own]`.
///
/// Returns index sequences `[a^0, a^1, .., a^*]` and `[b^0, .., b^*]`
/// without the repeated fixpoint.
pub fn extension_indices(cands: &[Candidate], own: usize) -> (Vec<usize>, Vec<usize>) {
    let mut a = vec![own];
    loop {
        let bound = cands[*a.last().unwrap()].lo;
        let next = (0..cands.len())
            .filter(|&i| cands[i].lo < bound)
            .min_by_key(|&i| (cands[i].x, cands[i].base_dist));
        match next {
            Some(i) => a.push(i),
            None => break,
        }
    }
    let mut b = vec![own];
    loop {
        let bound = cands[*b.last().unwrap()].hi;
        let next = (0..cands.len())
            .filter(|&i| cands[i].hi > bound)
            .min_by_key(|&i| (-cands[i].x, cands[i].base_dist));
        match next {
            Some(i) => b.push(i),
            None => break,
        }
    }
    (a, b)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtensionSequences {
    pub a: Vec<usize>,
    pub b: Vec<usize>,
    /// ℓ^i = ℓ(a^i).x
    pub left: Vec<i64>,
    /// r^i = r(b^i).x
    pub right: Vec<i64>,
}

impl ExtensionSequences {
    pub fn a_star(&self) -> usize {
        *self.a.last().unwrap()
    }

    pub fn b_star(&self) -> usize {
        *self.b.last().unwrap()
    }

    /// I²(s) = [ℓ*, r*].
    pub fn second_interval(&self) -> Interval {
        Interval::new(*self.left.last().unwrap(), *self.right.last().unwrap())
    }
}

pub fn candidate(vis: &Visibility, v: usize) -> Candidate {
    let h = &vis.hist;
    let i = vis.interval(v);
    Candidate {
        x: h.point(v).x,
        base_dist: h.base_distance(h.point(v)),
        lo: i.lo,
        hi: i.hi,
    }
}

pub fn extension_sequences(vis: &Visibility, s: usize) -> ExtensionSequences {
    let closed = vis.graph.closed_neighbors(s);
    let cands: Vec<Candidate> = closed.iter().map(|&v| candidate(vis, v)).collect();
    let own = closed.binary_search(&s).unwrap();
    let (ai, bi) = extension_indices(&cands, own);
    ExtensionSequences {
        left: ai.iter().map(|&i| cands[i].lo).collect(),
        right: bi.iter().map(|&i| cands[i].hi).collect(),
        a: ai.into_iter().map(|i| closed[i]).collect(),
        b: bi.into_iter().map(|i| closed[i]).collect(),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KDominators {
    pub bd: Vec<usize>,
    pub td: Vec<usize>,
    /// `intervals[k]` = I^k(s) as an x-range; I^0(s) is the point s.
    pub intervals: Vec<Interval>,
}

/// Base-line-closest, then leftmost, vertex of `range` on one side.
fn side_dominator(vis: &Visibility, range: Interval, below: bool) -> Option<usize> {
    let h = &vis.hist;
    vis.vertices_in(range)
        .filter(|&v| (h.point(v).y < 0) == below)
        .min_by_key(|&v| (h.point(v).y.abs(), h.point(v).x))
}

/// bd^k(s), td^k(s) and I^k(s) for k = 0..=k_max.
pub fn k_dominators(vis: &Visibility, s: usize, k_max: usize) -> KDominators {
    assert_eq!(
        vis.hist.kind(),
        Kind::Double,
        "k-dominators are defined for double histograms"
    );
    let x = vis.hist.point(s).x;
    let mut out = KDominators {
        bd: vec![s],
        td: vec![s],
        intervals: vec![Interval::new(x, x)],
    };
    for k in 1..=k_max {
        let (ib, it) = (vis.interval(out.bd[k - 1]), vis.interval(out.td[k - 1]));
        assert!(ib.overlaps(&it), "dominator intervals must overlap");
        let ik = ib.hull(&it);
        let bd = side_dominator(vis, ik, true);
        let td = side_dominator(vis, ik, false);
        let (bd, td) = match (bd, td) {
            (Some(b), Some(t)) => (b, t),
            (Some(b), None) => (b, b),
            (None, Some(t)) => (t, t),
            (None, None) => unreachable!("I^k(s) contains s"),
        };
        out.bd.push(bd);
        out.td.push(td);
        out.intervals.push(ik);
    }
    out
}

/// Canonical paths π_b(s,k) and π_t(s,k), each of length k+1.
///
/// Built backward from the k-th dominator; at every level the bottom
/// dominator is preferred when it sees (or is) the next entry. Fixpoints
/// may repeat a vertex.
pub fn canonical_paths(
    vis: &Visibility,
    dom: &KDominators,
    k: usize,
) -> Result<(Vec<usize>, Vec<usize>), LandmarkError> {
    let build = |end: usize| -> Result<Vec<usize>, LandmarkError> {
        let mut path = vec![end];
        for i in (0..k).rev() {
            let next = *path.last().unwrap();
            let step = [dom.bd[i], dom.td[i]]
                .into_iter()
                .find(|&c| vis.sees(c, next))
                .ok_or(LandmarkError::BrokenCanonicalPath {
                    from: next,
                    level: i,
                })?;
            path.push(step);
        }
        path.reverse();
        Ok(path)
    };
    Ok((build(dom.bd[k])?, build(dom.td[k])?))
}

/// Whether π_b(s,2) leaves s through td(s) rather than bd(s).
pub fn first_hop_is_top(vis: &Visibility, dom: &KDominators) -> Result<bool, LandmarkError> {
    let (pb, _) = canonical_paths(vis, dom, 2)?;
    Ok(dom.td[1] != dom.bd[1] && pb[1] == dom.td[1])
}
