//! Fixtures, corpora and property checkers shared by the integration tests.
//!
//! Every checker returns a list of human-readable violations; an empty list
//! means the property holds on the instance.

#![allow(dead_code, clippy::needless_range_loop)]

use histroute::engine::bfs_all;
use histroute::landmarks::{
    dominators, extension_sequences, k_dominators, position_key, DominatorPair,
};
use histroute::polygon::{generate, Histogram, Kind, Point};
use histroute::visibility::{Interval, Landmark, Visibility};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn hist(kind: Kind, raw: &[(i64, i64)]) -> Histogram {
    Histogram::new(kind, raw.iter().map(|&(x, y)| Point::new(x, y)).collect()).unwrap()
}

pub fn h_rect() -> Histogram {
    hist(Kind::Simple, &[(0, 3), (0, 0), (3, 0), (3, 3)])
}

pub fn h_steps() -> Histogram {
    hist(
        Kind::Simple,
        &[
            (0, 4),
            (0, 0),
            (2, 0),
            (2, 3),
            (3, 3),
            (3, 1),
            (7, 1),
            (7, 4),
        ],
    )
}

pub fn h_dbl() -> Histogram {
    hist(
        Kind::Double,
        &[
            (0, 3),
            (0, -3),
            (2, -3),
            (2, -1),
            (3, -1),
            (3, -2),
            (9, -2),
            (9, 4),
            (7, 4),
            (7, 1),
            (5, 1),
            (5, 3),
        ],
    )
}

pub fn double_rect() -> Histogram {
    hist(Kind::Double, &[(0, 2), (0, -1), (4, -1), (4, 2)])
}

/// `count` random histograms with even n drawn uniformly from `lo..=hi`.
pub fn corpus(kind: Kind, count: usize, lo: usize, hi: usize, seed: u64) -> Vec<Histogram> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let n = 2 * rng.gen_range(lo / 2..=hi / 2);
            generate(kind, n, rng.gen()).unwrap()
        })
        .collect()
}

/// The small mixed corpus used for the oracle and lemma checks.
pub fn small_corpus() -> Vec<Histogram> {
    let mut out = corpus(Kind::Simple, 50, 4, 60, 0x5eed_0001);
    out.extend(corpus(Kind::Double, 50, 4, 60, 0x5eed_0002));
    out
}

pub fn all_distances(vis: &Visibility) -> Vec<Vec<usize>> {
    (0..vis.n()).map(|s| bfs_all(&vis.graph, s)).collect()
}

fn x(vis: &Visibility, v: usize) -> i64 {
    vis.hist.point(v).x
}

fn full_range(vis: &Visibility) -> Interval {
    Interval::new(vis.hist.x_min(), vis.hist.x_max())
}

/// Pairs (s, t) with t in I(s) but not visible from s.
fn hidden_pairs(vis: &Visibility) -> Vec<(usize, usize)> {
    let n = vis.n();
    (0..n)
        .flat_map(|s| (0..n).map(move |t| (s, t)))
        .filter(|&(s, t)| !vis.sees(s, t) && vis.interval(s).contains(x(vis, t)))
        .collect()
}

fn dom(vis: &Visibility, s: usize, t: usize, out: &mut Vec<String>) -> Option<DominatorPair> {
    match dominators(vis, s, t) {
        Ok(d) => Some(d),
        Err(e) => {
            out.push(format!("dominators({s},{t}): {e}"));
            None
        }
    }
}

pub fn nd_sees_fd(vis: &Visibility) -> Vec<String> {
    let mut out = Vec::new();
    for (s, t) in hidden_pairs(vis) {
        if let Some(d) = dom(vis, s, t, &mut out) {
            if let Some(fd) = d.fd.vertex() {
                if !vis.sees(d.nd, fd) {
                    out.push(format!("s={s} t={t}: nd={} does not see fd={fd}", d.nd));
                }
            }
        }
    }
    out
}

pub fn shortest_path_via_nd_or_fd(vis: &Visibility, dist: &[Vec<usize>]) -> Vec<String> {
    let mut out = Vec::new();
    for (s, t) in hidden_pairs(vis) {
        if let Some(d) = dom(vis, s, t, &mut out) {
            let best = match d.fd.vertex() {
                Some(fd) => dist[d.nd][t].min(dist[fd][t]),
                None => dist[d.nd][t],
            };
            if 1 + best != dist[s][t] {
                out.push(format!(
                    "s={s} t={t}: neither dominator {d:?} is on a shortest path"
                ));
            }
        }
    }
    out
}

pub fn fd_fd_is_closer(vis: &Visibility, dist: &[Vec<usize>]) -> Vec<String> {
    let mut out = Vec::new();
    for (s, t) in hidden_pairs(vis) {
        let Some(d) = dom(vis, s, t, &mut out) else {
            continue;
        };
        let Some(fd) = d.fd.vertex() else { continue };
        if 1 + dist[fd][t] == dist[s][t] {
            continue;
        }
        let Some(d2) = dom(vis, fd, t, &mut out) else {
            continue;
        };
        match d2.fd.vertex() {
            Some(fd2) if dist[fd2][t] + 1 == dist[s][t] => {}
            other => out.push(format!("s={s} t={t}: fd={fd}, fd²={other:?} is not closer")),
        }
    }
    out
}

pub fn ai_sees_previous_left(vis: &Visibility) -> Vec<String> {
    let mut out = Vec::new();
    for s in 0..vis.n() {
        let seq = extension_sequences(vis, s);
        for i in 1..seq.a.len() {
            match vis.landmarks[seq.a[i - 1]].left {
                Landmark::Vertex { id, .. } if vis.sees(id, seq.a[i]) => {}
                other => out.push(format!("s={s}: ℓ^{} = {other:?} does not see a^{i}", i - 1)),
            }
        }
        for i in 1..seq.b.len() {
            match vis.landmarks[seq.b[i - 1]].right {
                Landmark::Vertex { id, .. } if vis.sees(id, seq.b[i]) => {}
                other => out.push(format!("s={s}: r^{} = {other:?} does not see b^{i}", i - 1)),
            }
        }
    }
    out
}

/// A vertex at x = ℓ^{i-1} also lies in the previous range, and routing
/// takes the smallest i, so the ranges are half-open at the inner end.
pub fn t_in_extended_interval(vis: &Visibility, dist: &[Vec<usize>]) -> Vec<String> {
    let mut out = Vec::new();
    for s in 0..vis.n() {
        let seq = extension_sequences(vis, s);
        let own = vis.interval(s);
        for t in (0..vis.n()).filter(|&t| !own.contains(x(vis, t))) {
            let tx = x(vis, t);
            for i in 1..seq.a.len() {
                if seq.left[i] <= tx && tx < seq.left[i - 1] && dist[seq.a[i]][t] + 1 != dist[s][t]
                {
                    out.push(format!(
                        "s={s} t={t}: a^{i}={} not on a shortest path",
                        seq.a[i]
                    ));
                }
            }
            for i in 1..seq.b.len() {
                if seq.right[i - 1] < tx
                    && tx <= seq.right[i]
                    && dist[seq.b[i]][t] + 1 != dist[s][t]
                {
                    out.push(format!(
                        "s={s} t={t}: b^{i}={} not on a shortest path",
                        seq.b[i]
                    ));
                }
            }
        }
    }
    out
}

pub fn sequences_are_monotone(vis: &Visibility) -> Vec<String> {
    let mut out = Vec::new();
    for s in 0..vis.n() {
        let seq = extension_sequences(vis, s);
        let closed = vis.graph.closed_neighbors(s);
        if seq.a.iter().chain(&seq.b).any(|v| !closed.contains(v)) {
            out.push(format!("s={s}: sequence leaves N[s]"));
        }
        if !seq.left.windows(2).all(|w| w[1] < w[0]) || !seq.right.windows(2).all(|w| w[1] > w[0]) {
            out.push(format!("s={s}: interval bounds not strictly growing"));
        }
        let ax: Vec<i64> = seq.a.iter().skip(1).map(|&v| x(vis, v)).collect();
        let bx: Vec<i64> = seq.b.iter().skip(1).map(|&v| x(vis, v)).collect();
        if !ax.windows(2).all(|w| w[1] > w[0]) || !bx.windows(2).all(|w| w[1] < w[0]) {
            out.push(format!(
                "s={s}: nested intervals [ℓ^i, a^i] not strictly increasing"
            ));
        }
    }
    out
}

pub fn ik_inside(vis: &Visibility, k_max: usize) -> Vec<String> {
    let mut out = Vec::new();
    for s in 0..vis.n() {
        let d = k_dominators(vis, s, k_max);
        for k in 0..=k_max {
            let ik = d.intervals[k];
            if !vis.interval(d.bd[k]).contains_interval(&ik)
                || !vis.interval(d.td[k]).contains_interval(&ik)
            {
                out.push(format!("s={s} k={k}: I^k not inside I(bd^k) ∩ I(td^k)"));
            }
        }
    }
    out
}

pub fn dominators_see_each_other(vis: &Visibility, k_max: usize) -> Vec<String> {
    let mut out = Vec::new();
    for s in 0..vis.n() {
        let d = k_dominators(vis, s, k_max);
        for k in 0..=k_max {
            if !vis.sees(d.bd[k], d.td[k]) {
                out.push(format!(
                    "s={s} k={k}: bd={} and td={} not co-visible",
                    d.bd[k], d.td[k]
                ));
            }
        }
    }
    out
}

pub fn i3_equals(vis: &Visibility) -> Vec<String> {
    let mut out = Vec::new();
    let i2: Vec<Interval> = (0..vis.n())
        .map(|v| extension_sequences(vis, v).second_interval())
        .collect();
    for s in 0..vis.n() {
        let d = k_dominators(vis, s, 3);
        if d.intervals[2] != i2[s] {
            out.push(format!(
                "s={s}: I² from sequences {:?} differs from {:?}",
                i2[s], d.intervals[2]
            ));
        }
        let (b, t) = (i2[d.bd[1]], i2[d.td[1]]);
        if !b.overlaps(&t) || b.hull(&t) != d.intervals[3] {
            out.push(format!(
                "s={s}: I³ {:?} differs from I²(bd) ∪ I²(td)",
                d.intervals[3]
            ));
        }
    }
    out
}

pub fn diameter(dist: &[Vec<usize>]) -> usize {
    dist.iter().flatten().copied().max().unwrap_or(0)
}

pub fn distance_k_implies_in_ik(vis: &Visibility, dist: &[Vec<usize>]) -> Vec<String> {
    let mut out = Vec::new();
    let diam = diameter(dist);
    for s in 0..vis.n() {
        let d = k_dominators(vis, s, diam);
        for t in 0..vis.n() {
            for k in dist[s][t]..=diam {
                if !d.intervals[k].contains(x(vis, t)) {
                    out.push(format!("s={s} t={t} k={k}: d={} but t ∉ I^k", dist[s][t]));
                }
            }
        }
    }
    out
}

pub fn dominators_have_distance_k(vis: &Visibility, dist: &[Vec<usize>]) -> Vec<String> {
    let mut out = Vec::new();
    let full = full_range(vis);
    let k_max = diameter(dist) + 1;
    for s in 0..vis.n() {
        let d = k_dominators(vis, s, k_max);
        for k in 1..=k_max {
            for (name, seq) in [("bd", &d.bd), ("td", &d.td)] {
                if vis.interval(seq[k - 1]) != full && dist[s][seq[k]] != k {
                    out.push(format!(
                        "s={s} k={k}: d(s,{name}^k)={} ≠ k",
                        dist[s][seq[k]]
                    ));
                }
            }
        }
    }
    out
}

pub fn t_outside_next_interval(vis: &Visibility, dist: &[Vec<usize>], k_max: usize) -> Vec<String> {
    let mut out = Vec::new();
    for s in 0..vis.n() {
        let d = k_dominators(vis, s, k_max + 1);
        for k in 1..=k_max {
            for t in (0..vis.n()).filter(|&t| !d.intervals[k + 1].contains(x(vis, t))) {
                let via = |m: usize| dist[s][m] + dist[m][t];
                if via(d.bd[k]).min(via(d.td[k])) != dist[s][t] {
                    out.push(format!(
                        "s={s} t={t} k={k}: neither k-th dominator on a shortest path"
                    ));
                }
            }
        }
    }
    out
}

/// Same-side intervals are pairwise disjoint or nested.
pub fn laminar_family(vis: &Visibility) -> Vec<String> {
    let mut out = Vec::new();
    let h = &vis.hist;
    let below = |v: usize| h.point(v).y < 0 || h.kind() == Kind::Simple;
    for v in 0..vis.n() {
        for w in v + 1..vis.n() {
            if below(v) != below(w) || h.is_base_vertex(v) || h.is_base_vertex(w) {
                continue;
            }
            let (a, b) = (vis.interval(v), vis.interval(w));
            if a.overlaps(&b) && !a.contains_interval(&b) && !b.contains_interval(&a) {
                out.push(format!("I({v})={a:?} and I({w})={b:?} cross"));
            }
        }
    }
    out
}

/// a ≤ b ≤ c ≤ d in x, a ∈ I(c) and d ∈ I(b) imply b and c co-visible.
pub fn overlapping_intervals(vis: &Visibility) -> Vec<String> {
    let mut out = Vec::new();
    let n = vis.n();
    let xs: Vec<i64> = (0..n).map(|v| x(vis, v)).collect();
    for b in 0..n {
        for c in 0..n {
            if xs[b] > xs[c] {
                continue;
            }
            let has_a = (0..n).any(|a| xs[a] <= xs[b] && vis.interval(c).contains(xs[a]));
            let has_d = (0..n).any(|d| xs[d] >= xs[c] && vis.interval(b).contains(xs[d]));
            if has_a && has_d && !vis.sees(b, c) {
                out.push(format!("b={b} c={c} not co-visible"));
            }
        }
    }
    out
}

// Simple-histogram observations. Index intervals [v, w] are id ranges.

fn lm_id(l: Landmark) -> usize {
    l.vertex().expect("simple histogram landmarks are vertices")
}

pub fn simple_interval_inclusion(vis: &Visibility) -> Vec<String> {
    let mut out = Vec::new();
    let h = &vis.hist;
    for v in (0..vis.n()).filter(|&v| v == 0 || h.vertex(v).is_right_reflex()) {
        let r = lm_id(vis.landmarks[v].right);
        for u in v + 1..r {
            let (lu, ru) = (lm_id(vis.landmarks[u].left), lm_id(vis.landmarks[u].right));
            if lu < v || ru > r {
                out.push(format!("v={v} u={u}: I(u)=[{lu},{ru}] leaves [{v},{r}]"));
            }
        }
    }
    out
}

pub fn simple_only_two_visible(vis: &Visibility) -> Vec<String> {
    let mut out = Vec::new();
    let h = &vis.hist;
    for v in (0..vis.n()).filter(|&v| !h.is_base_vertex(v)) {
        let cv = h.cv(v);
        let key = position_key(vis, v);
        let rightward = position_key(vis, cv) > key;
        let mut seen: Vec<usize> = vis
            .graph
            .neighbors(v)
            .iter()
            .copied()
            .filter(|&w| (position_key(vis, w) > key) == rightward && position_key(vis, w) != key)
            .collect();
        let lm = &vis.landmarks[v];
        let mut expected = vec![cv, lm_id(if rightward { lm.right } else { lm.left })];
        seen.sort_unstable();
        expected.sort_unstable();
        expected.dedup();
        if seen != expected {
            out.push(format!(
                "v={v}: sees {seen:?} on the far side, expected {expected:?}"
            ));
        }
    }
    out
}

/// nd is reflex, fd ∈ {ℓ(nd), r(nd)}, and the id-extremal choice made by
/// the routing function agrees with the geometric definition.
pub fn simple_nd_sees_fd(vis: &Visibility) -> Vec<String> {
    let mut out = Vec::new();
    let h = &vis.hist;
    for (s, t) in hidden_pairs(vis) {
        let Some(d) = dom(vis, s, t, &mut out) else {
            continue;
        };
        let fd = d.fd.vertex().unwrap();
        let lm = &vis.landmarks[d.nd];
        if !h.vertex(d.nd).is_reflex() || (fd != lm_id(lm.left) && fd != lm_id(lm.right)) {
            out.push(format!(
                "s={s} t={t}: nd={} fd={fd} violate the reflex pairing",
                d.nd
            ));
        }
        let closed = vis.graph.closed_neighbors(s);
        let (nd_id, fd_id) = if t > s {
            (
                closed.iter().copied().filter(|&v| v < t).max(),
                closed.iter().copied().filter(|&v| v > t).min(),
            )
        } else {
            (
                closed.iter().copied().filter(|&v| v > t).min(),
                closed.iter().copied().filter(|&v| v < t).max(),
            )
        };
        if nd_id != Some(d.nd) || fd_id != Some(fd) {
            out.push(format!(
                "s={s} t={t}: id choice {nd_id:?}/{fd_id:?} vs {}/{fd}",
                d.nd
            ));
        }
    }
    out
}

pub fn simple_taking_higher(vis: &Visibility, dist: &[Vec<usize>]) -> Vec<String> {
    let mut out = Vec::new();
    let h = &vis.hist;
    for s in 0..vis.n() {
        let lm = &vis.landmarks[s];
        let hop = lm_id(if lm.higher_left(h) { lm.left } else { lm.right });
        for t in (0..vis.n()).filter(|&t| !vis.interval(s).contains(x(vis, t))) {
            if dist[hop][t] + 1 != dist[s][t] {
                out.push(format!(
                    "s={s} t={t}: higher landmark {hop} not on a shortest path"
                ));
            }
        }
    }
    out
}

/// Removing co-visible v (r-reflex or vertex 0) and w (ℓ-reflex or vertex
/// n-1) separates [v, w] from the rest.
pub fn simple_interval_border_separates(vis: &Visibility) -> Vec<String> {
    let mut out = Vec::new();
    let h = &vis.hist;
    let n = vis.n();
    let left_ok = |v: usize| v == 0 || h.vertex(v).is_right_reflex();
    let right_ok = |w: usize| w == n - 1 || h.vertex(w).is_left_reflex();
    for v in (0..n).filter(|&v| left_ok(v)) {
        for &w in vis
            .graph
            .neighbors(v)
            .iter()
            .filter(|&&w| w > v && right_ok(w))
        {
            // Flood from the inside of [v, w] avoiding v and w.
            let mut seen = vec![false; n];
            seen[v] = true;
            seen[w] = true;
            let mut stack: Vec<usize> = (v + 1..w).collect();
            for &u in &stack {
                seen[u] = true;
            }
            while let Some(u) = stack.pop() {
                for &z in vis.graph.neighbors(u) {
                    if !seen[z] {
                        if z < v || z > w {
                            out.push(format!("[{v},{w}]: {u} reaches {z} outside"));
                        }
                        seen[z] = true;
                        stack.push(z);
                    }
                }
            }
        }
    }
    out
}

/// Runs every check that applies to the instance's kind, returning
/// `(name, violations)` pairs.
pub fn lemma_suite(h: &Histogram) -> Vec<(&'static str, Vec<String>)> {
    let vis = Visibility::new(h.clone());
    let dist = all_distances(&vis);
    let mut out = vec![
        (
            "shortest-path-via-nd-or-fd",
            shortest_path_via_nd_or_fd(&vis, &dist),
        ),
        ("fd-fd-is-closer", fd_fd_is_closer(&vis, &dist)),
        ("laminar-family", laminar_family(&vis)),
        ("overlapping-intervals", overlapping_intervals(&vis)),
    ];
    match h.kind() {
        Kind::Double => out.extend([
            ("nd-sees-fd", nd_sees_fd(&vis)),
            ("ai-sees-previous-left", ai_sees_previous_left(&vis)),
            (
                "t-in-extended-interval",
                t_in_extended_interval(&vis, &dist),
            ),
            ("sequence-monotonicity", sequences_are_monotone(&vis)),
            ("ik-inside", ik_inside(&vis, 4)),
            (
                "dominators-see-each-other",
                dominators_see_each_other(&vis, 4),
            ),
            ("i3-equals", i3_equals(&vis)),
            (
                "distance-k-implies-in-ik",
                distance_k_implies_in_ik(&vis, &dist),
            ),
            (
                "dominators-have-distance-k",
                dominators_have_distance_k(&vis, &dist),
            ),
            (
                "t-outside-next-interval",
                t_outside_next_interval(&vis, &dist, 3),
            ),
        ]),
        Kind::Simple => out.extend([
            ("interval-inclusion", simple_interval_inclusion(&vis)),
            ("only-two-visible", simple_only_two_visible(&vis)),
            ("nd-sees-fd-simple", simple_nd_sees_fd(&vis)),
            ("taking-higher-is-better", simple_taking_higher(&vis, &dist)),
            (
                "interval-border-separates",
                simple_interval_border_separates(&vis),
            ),
        ]),
    }
    out
}
