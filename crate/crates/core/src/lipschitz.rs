//! Inf- and lex-minimal Lipschitz extensions on partially labeled DAGs.
//!
//! A labeling assigns a value to some vertices (terminals) and leaves the
//! rest free. Extending it to all vertices while keeping the positive
//! gradients `max((x(u) - x(v)) / len(u, v), 0)` small is the core of ℓ∞
//! and strict isotonic regression:
//!
//! * [`comp_inf_min`] minimizes the largest gradient in expected linear time.
//! * [`comp_lex_min`] minimizes the sorted gradient vector lexicographically
//!   by repeatedly fixing steepest free terminal paths.
//!
//! Infinite labels use IEEE infinities. Gradients follow `0/0 = 0`,
//! `0·∞ = 0` and `finite/∞ = 0` explicitly.

use std::cmp::Ordering;

use rand::Rng;

use crate::dag::{shortest_paths, Dag, Direction};
use crate::error::{IsoError, Result};

/// Value per vertex; `None` marks a free vertex.
pub type PartialLabeling = Vec<Option<f64>>;

/// `max((xu - xv) / len, 0)`; a zero length gives `+∞` when `xu > xv` and
/// `0` otherwise.
#[inline]
pub fn grad_plus(len: f64, xu: f64, xv: f64) -> f64 {
    let diff = xu - xv;
    if !(diff > 0.0) {
        0.0
    } else if len == 0.0 {
        f64::INFINITY
    } else if len == f64::INFINITY {
        0.0
    } else {
        diff / len
    }
}

/// `α · len` with `0 · ∞ = 0`.
#[inline]
fn scaled(alpha: f64, len: f64) -> f64 {
    if len == 0.0 || alpha == 0.0 {
        0.0
    } else {
        alpha * len
    }
}

/// A path whose endpoints are terminals.
#[derive(Debug, Clone, PartialEq)]
pub struct TerminalPath {
    pub vertices: Vec<usize>,
    pub length: f64,
    pub gradient: f64,
}

impl TerminalPath {
    fn trivial(x: usize) -> Self {
        TerminalPath {
            vertices: vec![x],
            length: 0.0,
            gradient: 0.0,
        }
    }

    pub fn start(&self) -> usize {
        self.vertices[0]
    }

    pub fn end(&self) -> usize {
        *self.vertices.last().unwrap()
    }

    fn map(mut self, back: &[usize]) -> Self {
        for v in &mut self.vertices {
            *v = back[*v];
        }
        self
    }
}

/// Per-edge positive gradients of a complete labeling.
pub fn gradient_vector(dag: &Dag, x: &[f64]) -> Vec<f64> {
    dag.edges().iter().map(|e| grad_plus(e.length, x[e.tail], x[e.head])).collect()
}

pub fn max_gradient(dag: &Dag, x: &[f64]) -> f64 {
    gradient_vector(dag, x).into_iter().fold(0.0, f64::max)
}

pub fn is_terminal(v0: &PartialLabeling, x: usize) -> bool {
    v0[x].is_some()
}

/// Checks lengths, finiteness of terminal values and that every vertex is
/// reachable from, or reaches, some terminal.
pub fn check_well_posed(dag: &Dag, v0: &PartialLabeling) -> Result<()> {
    if v0.len() != dag.n() {
        return Err(IsoError::LengthMismatch {
            left: v0.len(),
            right: dag.n(),
        });
    }
    if let Some(x) = v0.iter().position(|v| matches!(v, Some(val) if !val.is_finite())) {
        return Err(IsoError::InvalidInstance(format!("label of vertex {x} is not finite")));
    }
    let sources: Vec<(usize, f64)> = (0..dag.n()).filter(|&x| v0[x].is_some()).map(|x| (x, 0.0)).collect();
    if sources.is_empty() {
        return Err(IsoError::InvalidInstance("labeling has no terminal".into()));
    }
    let down = shortest_paths(dag, &sources, Direction::Forward).0;
    let up = shortest_paths(dag, &sources, Direction::Backward).0;
    if let Some(x) = (0..dag.n()).find(|&x| down[x].is_infinite() && up[x].is_infinite()) {
        return Err(IsoError::InvalidInstance(format!("vertex {x} is not connected to any terminal")));
    }
    Ok(())
}

/// Which terminals [`mod_dijkstra`] minimizes over.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sweep {
    /// `v(x) = min v₀(t) + α·dist(t, x)` over terminals `t` reaching `x`.
    Into,
    /// `v(x) = min v₀(t) + α·dist(x, t)` over terminals `t` reachable from `x`.
    OutOf,
}

/// One topological pass relaxing `v` along (or against) the edges. Returns
/// the labeling and, per vertex, the neighbour that last relaxed it.
pub fn mod_dijkstra(dag: &Dag, v0: &PartialLabeling, alpha: f64, sweep: Sweep) -> (Vec<f64>, Vec<Option<usize>>) {
    let n = dag.n();
    let mut v: Vec<f64> = v0.iter().map(|l| l.unwrap_or(f64::INFINITY)).collect();
    let mut parent = vec![None; n];
    let edges = dag.edges();
    match sweep {
        Sweep::Into => {
            for &i in &dag.topo().order {
                if v[i] == f64::INFINITY {
                    continue;
                }
                for &ei in dag.out_edges(i) {
                    let e = &edges[ei];
                    let cand = v[i] + scaled(alpha, e.length);
                    if v[e.head] > cand {
                        v[e.head] = cand;
                        parent[e.head] = Some(i);
                    }
                }
            }
        }
        Sweep::OutOf => {
            for &i in dag.topo().order.iter().rev() {
                if v[i] == f64::INFINITY {
                    continue;
                }
                for &ei in dag.in_edges(i) {
                    let e = &edges[ei];
                    let cand = v[i] + scaled(alpha, e.length);
                    if v[e.tail] > cand {
                        v[e.tail] = cand;
                        parent[e.tail] = Some(i);
                    }
                }
            }
        }
    }
    (v, parent)
}

/// `vLow[α](x) = min_t v₀(t) + α·dist(x, t)` over terminals reachable from `x`.
pub fn comp_vlow(dag: &Dag, v0: &PartialLabeling, alpha: f64) -> (Vec<f64>, Vec<Option<usize>>) {
    mod_dijkstra(dag, v0, alpha, Sweep::OutOf)
}

/// `vHigh[α](x) = max_t v₀(t) - α·dist(t, x)` over terminals reaching `x`.
pub fn comp_vhigh(dag: &Dag, v0: &PartialLabeling, alpha: f64) -> (Vec<f64>, Vec<Option<usize>>) {
    let neg: PartialLabeling = v0.iter().map(|l| l.map(|v| -v)).collect();
    let (mut v, parent) = mod_dijkstra(dag, &neg, alpha, Sweep::Into);
    v.iter_mut().for_each(|x| *x = -*x);
    (v, parent)
}

/// Vertices whose pressure exceeds `α`, i.e. `vHigh[α] > vLow[α]`.
pub fn high_pressure_vertices(dag: &Dag, v0: &PartialLabeling, alpha: f64) -> Vec<bool> {
    let low = comp_vlow(dag, v0, alpha).0;
    let high = comp_vhigh(dag, v0, alpha).0;
    low.iter().zip(&high).map(|(l, h)| h > l).collect()
}

/// Subgraph induced by the vertices of pressure above `α`, the restricted
/// labeling and the map back to vertex ids of `dag`.
///
/// Vertices on a path of gradient exactly `α` can land on either side of
/// the comparison through roundoff, so the test keeps a small margin.
pub fn comp_high_press_graph(dag: &Dag, v0: &PartialLabeling, alpha: f64) -> (Dag, PartialLabeling, Vec<usize>) {
    let low = comp_vlow(dag, v0, alpha).0;
    let high = comp_vhigh(dag, v0, alpha).0;
    let vmax = v0.iter().flatten().fold(0.0f64, |a, v| a.max(v.abs()));
    let keep: Vec<bool> = low
        .iter()
        .zip(&high)
        .map(|(&l, &h)| h > l && (h - l > ROUNDOFF * (vmax + h.abs() + l.abs()) || !(h - l).is_finite()))
        .collect();
    let (sub, back) = dag.induced(&keep);
    let labels = back.iter().map(|&x| v0[x]).collect();
    (sub, labels, back)
}

const ROUNDOFF: f64 = 64.0 * f64::EPSILON;

/// Steepest pair on a star: `l` and `r` hold `(value, distance to center)`.
/// Returns indices `(i, j)` maximizing `max((l_i.0 - r_j.0) / (l_i.1 + r_j.1), 0)`.
pub fn star_steepest_path<R: Rng + ?Sized>(l: &[(f64, f64)], r: &[(f64, f64)], rng: &mut R) -> (usize, usize) {
    assert!(!l.is_empty() && !r.is_empty(), "both sides of the star must be non-empty");
    let ratio = |i: usize, j: usize| grad_plus(l[i].1 + r[j].1, l[i].0, r[j].0);
    let mut left: Vec<usize> = (0..l.len()).collect();
    let mut right: Vec<usize> = (0..r.len()).collect();
    let mut best = (0, 0, ratio(0, 0));
    loop {
        let t1 = left[rng.random_range(0..left.len())];
        let t2 = right[rng.random_range(0..right.len())];
        for &t in &right {
            let g = ratio(t1, t);
            if g > best.2 {
                best = (t1, t, g);
            }
        }
        for &t in &left {
            let g = ratio(t, t2);
            if g > best.2 {
                best = (t, t2, g);
            }
        }
        let alpha = best.2;
        if alpha == f64::INFINITY {
            return (best.0, best.1);
        }
        let v_low = right.iter().map(|&t| r[t].0 + scaled(alpha, r[t].1)).fold(f64::INFINITY, f64::min);
        let v_high = left.iter().map(|&t| l[t].0 - scaled(alpha, l[t].1)).fold(f64::NEG_INFINITY, f64::max);
        left.retain(|&t| t != t1 && l[t].0 > v_low + scaled(alpha, l[t].1));
        right.retain(|&t| t != t2 && r[t].0 < v_high - scaled(alpha, r[t].1));
        if left.is_empty() || right.is_empty() {
            return (best.0, best.1);
        }
    }
}

/// Follows parent edges from `from` until `to` is reached.
fn walk(dag: &Dag, parent: &[usize], from: usize, to: usize, forward: bool) -> Vec<usize> {
    let mut out = vec![from];
    let mut cur = from;
    while cur != to {
        let e = dag.edge(parent[cur]);
        cur = if forward { e.head } else { e.tail };
        out.push(cur);
    }
    out
}

/// A steepest terminal path through `x`; `(x)` with gradient zero when no
/// terminal lies on one side of `x`.
pub fn vertex_steepest_path<R: Rng + ?Sized>(dag: &Dag, v0: &PartialLabeling, x: usize, rng: &mut R) -> TerminalPath {
    // Backward: distance from each vertex to x, parents point toward x.
    let (d_in, p_in) = shortest_paths(dag, &[(x, 0.0)], Direction::Backward);
    let (d_out, p_out) = shortest_paths(dag, &[(x, 0.0)], Direction::Forward);
    let terminals = |d: &[f64]| -> Vec<usize> {
        (0..dag.n())
            .filter(|&t| t != x && v0[t].is_some() && d[t].is_finite())
            .collect()
    };
    let left = terminals(&d_in);
    let right = terminals(&d_out);
    let val = |t: usize| v0[t].unwrap();

    if let Some(vx) = v0[x] {
        // Any terminal path through a terminal splits into two terminal paths
        // at x, one of which is at least as steep.
        let down = right
            .iter()
            .map(|&t| (t, grad_plus(d_out[t], vx, val(t))))
            .max_by(|a, b| a.1.partial_cmp(&b.1).unwrap_or(Ordering::Equal));
        let up = left
            .iter()
            .map(|&t| (t, grad_plus(d_in[t], val(t), vx)))
            .max_by(|a, b| a.1.partial_cmp(&b.1).unwrap_or(Ordering::Equal));
        return match (down, up) {
            (None, None) => TerminalPath::trivial(x),
            (Some((t, g)), u) if u.is_none_or(|(_, gu)| g >= gu) => {
                let mut vertices = walk(dag, &p_out, t, x, false);
                vertices.reverse();
                TerminalPath {
                    vertices,
                    length: d_out[t],
                    gradient: g,
                }
            }
            (_, Some((t, g))) => TerminalPath {
                vertices: walk(dag, &p_in, t, x, true),
                length: d_in[t],
                gradient: g,
            },
            _ => unreachable!(),
        };
    }

    if left.is_empty() || right.is_empty() {
        return TerminalPath::trivial(x);
    }
    let l: Vec<(f64, f64)> = left.iter().map(|&t| (val(t), d_in[t])).collect();
    let r: Vec<(f64, f64)> = right.iter().map(|&t| (val(t), d_out[t])).collect();
    let (i, j) = star_steepest_path(&l, &r, rng);
    let (t1, t2) = (left[i], right[j]);
    let mut vertices = walk(dag, &p_in, t1, x, true);
    let mut tail = walk(dag, &p_out, t2, x, false);
    tail.reverse();
    vertices.extend_from_slice(&tail[1..]);
    let length = d_in[t1] + d_out[t2];
    TerminalPath {
        vertices,
        length,
        gradient: grad_plus(length, val(t1), val(t2)),
    }
}

/// A steepest terminal path of a graph without terminal-terminal edges.
/// Returns a single-vertex path of gradient zero when the graph has no edges.
pub fn steepest_path<R: Rng + ?Sized>(dag: &Dag, v0: &PartialLabeling, rng: &mut R) -> TerminalPath {
    if dag.m() == 0 {
        let x = (0..dag.n()).find(|&x| v0[x].is_some()).unwrap_or(0);
        return TerminalPath::trivial(x);
    }
    let mut graph = dag.clone();
    let mut labels = v0.clone();
    let mut back: Vec<usize> = (0..dag.n()).collect();
    let mut incumbent: Option<TerminalPath> = None;
    loop {
        let e = *graph.edge(rng.random_range(0..graph.m()));
        let x3 = rng.random_range(0..graph.n());
        let mut best: Option<TerminalPath> = None;
        for x in [e.tail, e.head, x3] {
            let p = vertex_steepest_path(&graph, &labels, x, rng);
            if best.as_ref().is_none_or(|b| p.gradient > b.gradient) {
                best = Some(p);
            }
        }
        let best = best.unwrap();
        // Every vertex that survives the filter lies on a strictly steeper
        // path, so a round without progress only happens through roundoff.
        if let Some(inc) = incumbent.take() {
            if best.gradient <= inc.gradient {
                return inc;
            }
        }
        let best = best.map(&back);
        if best.gradient == f64::INFINITY {
            return best;
        }
        let (sub, sub_labels, sub_back) = comp_high_press_graph(&graph, &labels, best.gradient);
        if sub.m() == 0 {
            return best;
        }
        back = sub_back.iter().map(|&v| back[v]).collect();
        graph = sub;
        labels = sub_labels;
        incumbent = Some(best);
    }
}

/// Labels the free interior vertices of a steepest path by linear
/// interpolation from its start at slope `-∇⁺P`.
pub fn fix_path(dag: &Dag, v0: &PartialLabeling, path: &TerminalPath) -> PartialLabeling {
    let mut out = v0.clone();
    let start = v0[path.start()].expect("path must start at a terminal");
    let mut prefix = 0.0;
    for w in path.vertices.windows(2) {
        prefix += edge_length(dag, w[0], w[1]);
        if out[w[1]].is_none() {
            out[w[1]] = Some(start - scaled(path.gradient, prefix));
        }
    }
    out
}

/// Shortest parallel edge from `a` to `b`.
fn edge_length(dag: &Dag, a: usize, b: usize) -> f64 {
    dag.out_edges(a)
        .iter()
        .map(|&ei| dag.edge(ei))
        .filter(|e| e.head == b)
        .map(|e| e.length)
        .fold(f64::INFINITY, f64::min)
}

/// Completes a labeling whose steepest free path has gradient zero without
/// creating positive gradients: vertices reached from labeled ones take the
/// largest label above them, the rest the smallest label below them.
pub fn assign_zero_gradient(dag: &Dag, v0: &PartialLabeling) -> Result<Vec<f64>> {
    let mut v = v0.clone();
    let edges = dag.edges();
    for &i in &dag.topo().order {
        let Some(vi) = v[i] else { continue };
        for &ei in dag.out_edges(i) {
            let j = edges[ei].head;
            if v0[j].is_none() && v[j].is_none_or(|vj| vj < vi) {
                v[j] = Some(vi);
            }
        }
    }
    let stage_one: Vec<bool> = v.iter().map(|l| l.is_some()).collect();
    for &i in dag.topo().order.iter().rev() {
        let Some(vi) = v[i] else { continue };
        for &ei in dag.in_edges(i) {
            let j = edges[ei].tail;
            if !stage_one[j] && v[j].is_none_or(|vj| vj > vi) {
                v[j] = Some(vi);
            }
        }
    }
    let mut out = Vec::with_capacity(v.len());
    for (x, l) in v.iter().enumerate() {
        match l {
            Some(val) => out.push(*val),
            None => {
                return Err(IsoError::InvalidInstance(format!("vertex {x} is not connected to any terminal")));
            }
        }
    }
    for (i, e) in edges.iter().enumerate() {
        let fresh = v0[e.tail].is_none() || v0[e.head].is_none();
        if fresh && grad_plus(e.length, out[e.tail], out[e.head]) > 0.0 {
            return Err(IsoError::ContractViolation(format!(
                "edge {i} ({} -> {}) received a positive gradient",
                e.tail, e.head
            )));
        }
    }
    Ok(out)
}

/// Which inf-minimizer [`comp_inf_min`] returns.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum InfVariant {
    /// Midpoint of the smallest and largest minimizers.
    #[default]
    Avg,
    /// Pointwise smallest minimizer.
    Min,
    /// Pointwise largest minimizer.
    Max,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InfMin {
    pub labeling: Vec<f64>,
    /// Optimal largest gradient.
    pub alpha: f64,
}

fn strip_terminal_edges(dag: &Dag, v0: &PartialLabeling) -> Dag {
    dag.filter_edges(|_, e| !(v0[e.tail].is_some() && v0[e.head].is_some()))
}

/// Completes `v0` minimizing the largest positive gradient.
pub fn comp_inf_min<R: Rng + ?Sized>(dag: &Dag, v0: &PartialLabeling, variant: InfVariant, rng: &mut R) -> Result<InfMin> {
    check_well_posed(dag, v0)?;
    let mut alpha: f64 = dag
        .edges()
        .iter()
        .filter_map(|e| match (v0[e.tail], v0[e.head]) {
            (Some(a), Some(b)) => Some(grad_plus(e.length, a, b)),
            _ => None,
        })
        .fold(0.0, f64::max);
    if v0.iter().all(|l| l.is_some()) {
        return Ok(InfMin {
            labeling: v0.iter().map(|l| l.unwrap()).collect(),
            alpha,
        });
    }
    let g = strip_terminal_edges(dag, v0);
    alpha = alpha.max(steepest_path(&g, v0, rng).gradient);
    let low = comp_vlow(&g, v0, alpha).0;
    let high = comp_vhigh(&g, v0, alpha).0;
    let partial: PartialLabeling = (0..g.n())
        .map(|x| {
            if v0[x].is_some() {
                return v0[x];
            }
            let (l, h) = (low[x], high[x]);
            if !(l.is_finite() && h.is_finite()) {
                return None;
            }
            Some(match variant {
                InfVariant::Avg => 0.5 * (l + h),
                InfVariant::Min => l,
                InfVariant::Max => h,
            })
        })
        .collect();
    let labeling = if partial.iter().all(|l| l.is_some()) {
        partial.into_iter().map(|l| l.unwrap()).collect()
    } else {
        assign_zero_gradient(&g, &partial)?
    };
    Ok(InfMin { labeling, alpha })
}

/// `r ⪯ s` on absolute values sorted in decreasing order.
pub fn lex_less(r: &[f64], s: &[f64]) -> Result<bool> {
    if r.len() != s.len() {
        return Err(IsoError::LengthMismatch {
            left: r.len(),
            right: s.len(),
        });
    }
    let sorted = |v: &[f64]| {
        let mut a: Vec<f64> = v.iter().map(|x| x.abs()).collect();
        a.sort_by(|x, y| y.total_cmp(x));
        a
    };
    let (a, b) = (sorted(r), sorted(s));
    for (x, y) in a.iter().zip(&b) {
        if x != y {
            return Ok(x < y);
        }
    }
    Ok(true)
}

/// Completes `v0` with a labeling whose gradient vector is lexicographically
/// minimal.
pub fn comp_lex_min<R: Rng + ?Sized>(dag: &Dag, v0: &PartialLabeling, rng: &mut R) -> Result<Vec<f64>> {
    check_well_posed(dag, v0)?;
    let mut v = v0.clone();
    while v.iter().any(|l| l.is_none()) {
        let g = strip_terminal_edges(dag, &v);
        let path = steepest_path(&g, &v, rng);
        if path.gradient == 0.0 {
            return assign_zero_gradient(&g, &v);
        }
        v = fix_path(&g, &v, &path);
    }
    Ok(v.into_iter().map(|l| l.unwrap()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dag::Edge;
    use rand::rngs::StdRng;
    use rand::SeedableRng;

    fn chain(lengths: &[f64]) -> Dag {
        let edges = lengths
            .iter()
            .enumerate()
            .map(|(i, &l)| Edge::with_length(i, i + 1, l))
            .collect();
        Dag::new(lengths.len() + 1, edges).unwrap()
    }

    fn rng() -> StdRng {
        StdRng::seed_from_u64(7)
    }

    #[test]
    fn grad_plus_conventions() {
        assert_eq!(grad_plus(2.0, 3.0, 1.0), 1.0);
        assert_eq!(grad_plus(0.0, 1.0, 1.0), 0.0);
        assert_eq!(grad_plus(0.0, 2.0, 1.0), f64::INFINITY);
        assert_eq!(grad_plus(1.0, 1.0, 2.0), 0.0);
    }

    #[test]
    fn mod_dijkstra_on_chain() {
        let g = chain(&[1.0, 1.0]);
        let v0 = vec![Some(0.0), None, None];
        let (v, parent) = mod_dijkstra(&g, &v0, 1.0, Sweep::Into);
        assert_eq!(v, vec![0.0, 1.0, 2.0]);
        assert_eq!(parent, vec![None, Some(0), Some(1)]);
        let (v, _) = mod_dijkstra(&g, &v0, 1.0, Sweep::OutOf);
        assert_eq!(v, vec![0.0, f64::INFINITY, f64::INFINITY]);
    }

    #[test]
    fn vlow_vhigh_on_chain() {
        let g = chain(&[1.0, 1.0]);
        let v0 = vec![Some(2.0), None, Some(0.0)];
        assert_eq!(comp_vlow(&g, &v0, 1.0).0, vec![2.0, 1.0, 0.0]);
        assert_eq!(comp_vhigh(&g, &v0, 1.0).0, vec![2.0, 1.0, 0.0]);
        assert!(high_pressure_vertices(&g, &v0, 1.0).iter().all(|b| !b));
        assert!(high_pressure_vertices(&g, &v0, 0.5).iter().all(|b| *b));
    }

    #[test]
    fn star_examples() {
        let l = [(3.0, 1.0), (1.0, 1.0)];
        let r = [(0.0, 1.0)];
        assert_eq!(star_steepest_path(&l, &r, &mut rng()), (0, 0));
    }

    #[test]
    fn vertex_path_and_fix() {
        let g = chain(&[1.0, 1.0]);
        let v0 = vec![Some(2.0), None, Some(0.0)];
        let p = vertex_steepest_path(&g, &v0, 1, &mut rng());
        assert_eq!(p.vertices, vec![0, 1, 2]);
        assert_eq!(p.gradient, 1.0);
        assert_eq!(fix_path(&g, &v0, &p)[1], Some(1.0));
        let g = chain(&[1.0, 3.0]);
        let p = steepest_path(&g, &v0, &mut rng());
        assert_eq!(p.gradient, 0.5);
        assert_eq!(fix_path(&g, &v0, &p)[1], Some(1.5));
    }

    #[test]
    fn vertex_path_without_terminal_above() {
        let g = chain(&[1.0, 1.0]);
        let v0 = vec![None, None, Some(0.0)];
        let p = vertex_steepest_path(&g, &v0, 1, &mut rng());
        assert_eq!(p.vertices, vec![1]);
        assert_eq!(p.gradient, 0.0);
    }

    #[test]
    fn zero_gradient_passes() {
        let g = chain(&[1.0, 1.0]);
        assert_eq!(assign_zero_gradient(&g, &vec![Some(5.0), None, None]).unwrap(), vec![5.0; 3]);
        assert_eq!(assign_zero_gradient(&g, &vec![None, None, Some(5.0)]).unwrap(), vec![5.0; 3]);
    }

    #[test]
    fn inf_min_on_chain() {
        let g = chain(&[1.0, 1.0]);
        let r = comp_inf_min(&g, &vec![Some(2.0), None, Some(0.0)], InfVariant::Avg, &mut rng()).unwrap();
        assert_eq!(r.alpha, 1.0);
        assert_eq!(r.labeling, vec![2.0, 1.0, 0.0]);
    }

    #[test]
    fn lex_less_examples() {
        assert!(lex_less(&[1.0, -2.0], &[3.0, 0.0]).unwrap());
        assert!(lex_less(&[2.0, 1.0], &[-1.0, 2.0]).unwrap());
        assert!(lex_less(&[-1.0, 2.0], &[2.0, 1.0]).unwrap());
        assert!(!lex_less(&[3.0, 0.0], &[1.0, -2.0]).unwrap());
        assert!(lex_less(&[1.0], &[1.0, 2.0]).is_err());
    }

    #[test]
    fn lex_min_interpolates_chain() {
        let g = chain(&[1.0, 1.0, 1.0]);
        let v = comp_lex_min(&g, &vec![Some(3.0), None, None, Some(0.0)], &mut rng()).unwrap();
        assert_eq!(v, vec![3.0, 2.0, 1.0, 0.0]);
    }
}
