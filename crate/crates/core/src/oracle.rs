//! Brute-force r-visibility, independent of the landmark machinery.
//!
//! Two vertices see each other iff no point of their spanning rectangle is
//! strictly outside the polygon. Because all vertices have integer-like
//! coordinates on a common grid, it suffices to sample every grid line and
//! every midpoint between consecutive distinct coordinates.

use crate::polygon::{Histogram, Point};
use crate::visibility::VisibilityGraph;

/// Point-in-closed-polygon test in quadrupled coordinates.
///
/// Boundary points count as inside. Interior points are decided by casting
/// a ray to the right at a quarter-unit offset, which never passes through
/// a vertex.
pub fn point_in_closed_polygon(h: &Histogram, x4: i64, y4: i64) -> bool {
    let n = h.n();
    let q = |p: Point| (4 * p.x, 4 * p.y);
    let mut crossings = 0;
    for i in 0..n {
        let (ax, ay) = q(h.point(i));
        let (bx, by) = q(h.point((i + 1) % n));
        let (xlo, xhi) = (ax.min(bx), ax.max(bx));
        let (ylo, yhi) = (ay.min(by), ay.max(by));
        if xlo <= x4 && x4 <= xhi && ylo <= y4 && y4 <= yhi {
            return true;
        }
        if ax == bx && ax > x4 && ylo < y4 + 1 && y4 + 1 < yhi {
            crossings += 1;
        }
    }
    crossings % 2 == 1
}

fn samples(mut values: Vec<i64>) -> Vec<i64> {
    values.sort_unstable();
    values.dedup();
    let mut out = Vec::with_capacity(2 * values.len());
    for (i, &v) in values.iter().enumerate() {
        out.push(2 * v);
        if let Some(&next) = values.get(i + 1) {
            out.push(v + next);
        }
    }
    out
}

/// Direct check of a single pair; O(n) per sample point.
pub fn co_visible_naive(h: &Histogram, a: usize, b: usize) -> bool {
    let (pa, pb) = (h.point(a), h.point(b));
    let xs = samples(h.points().iter().map(|p| p.x).collect());
    let ys = samples(h.points().iter().map(|p| p.y).collect());
    let (xlo, xhi) = (2 * pa.x.min(pb.x), 2 * pa.x.max(pb.x));
    let (ylo, yhi) = (2 * pa.y.min(pb.y), 2 * pa.y.max(pb.y));
    xs.iter().filter(|&&x| xlo <= x && x <= xhi).all(|&x| {
        ys.iter()
            .filter(|&&y| ylo <= y && y <= yhi)
            .all(|&y| point_in_closed_polygon(h, 2 * x, 2 * y))
    })
}

/// Precomputed exterior grid with 2D prefix sums for O(1) rectangle queries.
pub struct NaiveVisibility {
    xs: Vec<i64>,
    ys: Vec<i64>,
    /// `prefix[i][j]` counts exterior samples with column < i and row < j.
    prefix: Vec<Vec<u32>>,
}

impl NaiveVisibility {
    pub fn new(h: &Histogram) -> Self {
        let xs = samples(h.points().iter().map(|p| p.x).collect());
        let ys = samples(h.points().iter().map(|p| p.y).collect());
        let mut prefix = vec![vec![0u32; ys.len() + 1]; xs.len() + 1];
        for (i, &x) in xs.iter().enumerate() {
            for (j, &y) in ys.iter().enumerate() {
                let outside = u32::from(!point_in_closed_polygon(h, 2 * x, 2 * y));
                prefix[i + 1][j + 1] = outside + prefix[i][j + 1] + prefix[i + 1][j] - prefix[i][j];
            }
        }
        Self { xs, ys, prefix }
    }

    pub fn rectangle_inside(&self, a: Point, b: Point) -> bool {
        let idx = |axis: &[i64], v: i64| axis.binary_search(&(2 * v)).expect("vertex coordinate");
        let (i0, i1) = {
            let (p, q) = (idx(&self.xs, a.x), idx(&self.xs, b.x));
            (p.min(q), p.max(q) + 1)
        };
        let (j0, j1) = {
            let (p, q) = (idx(&self.ys, a.y), idx(&self.ys, b.y));
            (p.min(q), p.max(q) + 1)
        };
        let p = &self.prefix;
        p[i1][j1] + p[i0][j0] == p[i0][j1] + p[i1][j0]
    }

    /// The full visibility graph, O(n²) queries.
    pub fn graph(&self, h: &Histogram) -> VisibilityGraph {
        let n = h.n();
        let adj = (0..n)
            .map(|v| {
                (0..n)
                    .filter(|&w| w != v && self.rectangle_inside(h.point(v), h.point(w)))
                    .collect()
            })
            .collect();
        VisibilityGraph::from_adjacency(adj)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polygon::{generate, Kind};
    use crate::visibility::{build_graph, compute_landmarks};

    fn steps() -> Histogram {
        let raw = [
            (0, 4),
            (0, 0),
            (2, 0),
            (2, 3),
            (3, 3),
            (3, 1),
            (7, 1),
            (7, 4),
        ];
        Histogram::new(
            Kind::Simple,
            raw.iter().map(|&(x, y)| Point::new(x, y)).collect(),
        )
        .unwrap()
    }

    #[test]
    fn point_tests() {
        let h = steps();
        assert!(point_in_closed_polygon(&h, 0, 0));
        assert!(point_in_closed_polygon(&h, 4, 4));
        assert!(point_in_closed_polygon(&h, 4 * 5, 4));
        assert!(!point_in_closed_polygon(&h, 4 * 5, 2));
        assert!(!point_in_closed_polygon(&h, -1, 4));
    }

    #[test]
    fn pair_checks() {
        let h = steps();
        assert!(co_visible_naive(&h, 2, 0));
        assert!(!co_visible_naive(&h, 2, 4));
        assert!(co_visible_naive(&h, 4, 6));
        assert!(!co_visible_naive(&h, 0, 5));
    }

    #[test]
    fn grid_matches_pairwise() {
        for kind in [Kind::Simple, Kind::Double] {
            let h = generate(kind, 24, 5).unwrap();
            let grid = NaiveVisibility::new(&h);
            for a in 0..h.n() {
                for b in 0..h.n() {
                    assert_eq!(
                        grid.rectangle_inside(h.point(a), h.point(b)),
                        co_visible_naive(&h, a, b)
                    );
                }
            }
        }
    }

    #[test]
    fn steps_graph_agrees() {
        let h = steps();
        let fast = build_graph(&h, &compute_landmarks(&h));
        assert_eq!(NaiveVisibility::new(&h).graph(&h), fast);
    }

    #[test]
    fn fast_matches_naive_random() {
        for seed in 0..60u64 {
            for kind in [Kind::Simple, Kind::Double] {
                let n = 4 + 2 * (seed as usize % 20);
                let h = generate(kind, n, seed).unwrap();
                let fast = build_graph(&h, &compute_landmarks(&h));
                assert_eq!(
                    NaiveVisibility::new(&h).graph(&h),
                    fast,
                    "{kind} n={n} seed={seed}"
                );
            }
        }
    }
}
