//! Directed acyclic graphs with nonnegative edge lengths.
//!
//! A [`Dag`] is validated once at construction and is immutable afterwards.
//! Every accepted graph carries a cached topological order, so derived graphs
//! (reversal, induced subgraphs, edge filters) never need to re-run cycle
//! detection.

use crate::error::{IsoError, Result};

/// A directed edge `tail -> head` with a nonnegative length.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub tail: usize,
    pub head: usize,
    pub length: f64,
}

impl Edge {
    pub fn new(tail: usize, head: usize) -> Self {
        Edge {
            tail,
            head,
            length: 1.0,
        }
    }

    pub fn with_length(tail: usize, head: usize, length: f64) -> Self {
        Edge { tail, head, length }
    }
}

/// A topological order and its inverse permutation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TopoOrder {
    pub order: Vec<usize>,
    pub rank: Vec<usize>,
}

impl TopoOrder {
    fn from_order(order: Vec<usize>) -> Self {
        let mut rank = vec![0; order.len()];
        for (i, &v) in order.iter().enumerate() {
            rank[v] = i;
        }
        TopoOrder { order, rank }
    }
}

/// Compressed adjacency: for vertex `v`, `edges[offsets[v]..offsets[v + 1]]`
/// are edge indices.
#[derive(Debug, Clone)]
struct Adjacency {
    offsets: Vec<usize>,
    edges: Vec<usize>,
}

impl Adjacency {
    fn build(n: usize, edges: &[Edge], key: impl Fn(&Edge) -> usize, other: impl Fn(&Edge) -> usize) -> Self {
        let mut offsets = vec![0usize; n + 1];
        for e in edges {
            offsets[key(e) + 1] += 1;
        }
        for v in 0..n {
            offsets[v + 1] += offsets[v];
        }
        let mut fill = offsets.clone();
        let mut list = vec![0usize; edges.len()];
        for (i, e) in edges.iter().enumerate() {
            let k = key(e);
            list[fill[k]] = i;
            fill[k] += 1;
        }
        // Sort each bucket by the opposite endpoint so traversal order is
        // independent of insertion order ties.
        for v in 0..n {
            list[offsets[v]..offsets[v + 1]].sort_by_key(|&i| (other(&edges[i]), i));
        }
        Adjacency {
            offsets,
            edges: list,
        }
    }

    #[inline]
    fn of(&self, v: usize) -> &[usize] {
        &self.edges[self.offsets[v]..self.offsets[v + 1]]
    }
}

/// Which way a single-source sweep follows the edges.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// Distances from the sources along edge directions.
    Forward,
    /// Distances to the sources, i.e. along reversed edges.
    Backward,
}

#[derive(Debug, Clone)]
pub struct Dag {
    n: usize,
    edges: Vec<Edge>,
    out_adj: Adjacency,
    in_adj: Adjacency,
    topo: TopoOrder,
}

impl Dag {
    /// Validates an edge list and builds the graph. See [`validate_dag`].
    pub fn new(n: usize, edges: Vec<Edge>) -> Result<Self> {
        for (index, e) in edges.iter().enumerate() {
            for vertex in [e.tail, e.head] {
                if vertex >= n {
                    return Err(IsoError::VertexOutOfRange { index, vertex, n });
                }
            }
            if e.tail == e.head {
                return Err(IsoError::SelfLoop { vertex: e.tail });
            }
            if !(e.length.is_finite() && e.length >= 0.0) {
                return Err(IsoError::NegativeLength {
                    index,
                    length: e.length,
                });
            }
        }
        let out_adj = Adjacency::build(n, &edges, |e| e.tail, |e| e.head);
        let in_adj = Adjacency::build(n, &edges, |e| e.head, |e| e.tail);
        let order = dfs_topological_order(n, &edges, &out_adj)?;
        Ok(Dag {
            n,
            edges,
            out_adj,
            in_adj,
            topo: TopoOrder::from_order(order),
        })
    }

    /// Builds a graph whose acyclicity is already certified by `order`.
    pub(crate) fn with_order(n: usize, edges: Vec<Edge>, order: Vec<usize>) -> Self {
        let out_adj = Adjacency::build(n, &edges, |e| e.tail, |e| e.head);
        let in_adj = Adjacency::build(n, &edges, |e| e.head, |e| e.tail);
        let topo = TopoOrder::from_order(order);
        debug_assert!(edges.iter().all(|e| topo.rank[e.tail] < topo.rank[e.head]));
        Dag {
            n,
            edges,
            out_adj,
            in_adj,
            topo,
        }
    }

    /// Unit-length edges from `(tail, head)` pairs.
    pub fn from_pairs(n: usize, pairs: &[(usize, usize)]) -> Result<Self> {
        Dag::new(n, pairs.iter().map(|&(a, b)| Edge::new(a, b)).collect())
    }

    /// A directed path `0 -> 1 -> ... -> n-1` with unit lengths.
    pub fn path(n: usize) -> Self {
        let edges = (1..n).map(|i| Edge::new(i - 1, i)).collect();
        Dag::with_order(n, edges, (0..n).collect())
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn m(&self) -> usize {
        self.edges.len()
    }

    #[inline]
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    #[inline]
    pub fn edge(&self, i: usize) -> &Edge {
        &self.edges[i]
    }

    /// Indices of edges leaving `v`, ordered by head id.
    #[inline]
    pub fn out_edges(&self, v: usize) -> &[usize] {
        self.out_adj.of(v)
    }

    /// Indices of edges entering `v`, ordered by tail id.
    #[inline]
    pub fn in_edges(&self, v: usize) -> &[usize] {
        self.in_adj.of(v)
    }

    #[inline]
    pub fn topo(&self) -> &TopoOrder {
        &self.topo
    }

    /// The same graph with every edge flipped; lengths are preserved.
    pub fn reverse(&self) -> Dag {
        let edges = self
            .edges
            .iter()
            .map(|e| Edge::with_length(e.head, e.tail, e.length))
            .collect();
        let order = self.topo.order.iter().rev().copied().collect();
        Dag::with_order(self.n, edges, order)
    }

    /// Keeps the edges for which `keep` returns true. Vertex ids are unchanged.
    pub fn filter_edges(&self, mut keep: impl FnMut(usize, &Edge) -> bool) -> Dag {
        let edges = self
            .edges
            .iter()
            .enumerate()
            .filter(|(i, e)| keep(*i, e))
            .map(|(_, e)| *e)
            .collect();
        Dag::with_order(self.n, edges, self.topo.order.clone())
    }

    /// Vertex-induced subgraph on `{v : keep[v]}`. Returns the subgraph and
    /// the map from its vertex ids back to ids in `self`.
    pub fn induced(&self, keep: &[bool]) -> (Dag, Vec<usize>) {
        let mut new_id = vec![usize::MAX; self.n];
        let mut back = Vec::new();
        for v in 0..self.n {
            if keep[v] {
                new_id[v] = back.len();
                back.push(v);
            }
        }
        let edges = self
            .edges
            .iter()
            .filter(|e| keep[e.tail] && keep[e.head])
            .map(|e| Edge::with_length(new_id[e.tail], new_id[e.head], e.length))
            .collect();
        let order = self
            .topo
            .order
            .iter()
            .filter(|&&v| keep[v])
            .map(|&v| new_id[v])
            .collect();
        (Dag::with_order(back.len(), edges, order), back)
    }

    /// Undirected adjacency lists (parallel edges collapsed, self excluded).
    pub fn undirected_neighbors(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.n];
        for e in &self.edges {
            adj[e.tail].push(e.head);
            adj[e.head].push(e.tail);
        }
        for list in &mut adj {
            list.sort_unstable();
            list.dedup();
        }
        adj
    }
}

impl PartialEq for Dag {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.edges == other.edges
    }
}

/// Validates `edges` on vertices `0..n` and returns the graph, or the first
/// structural problem found. Cycles are reported with a witness list of edges
/// `(a, b), (b, c), ..., (z, a)` rotated to start at its smallest vertex.
pub fn validate_dag(edges: &[Edge], n: usize) -> Result<Dag> {
    Dag::new(n, edges.to_vec())
}

/// Topological order of a validated graph. Deterministic: a depth-first
/// search whose ties resolve toward ascending vertex ids.
pub fn topological_sort(dag: &Dag) -> TopoOrder {
    dag.topo.clone()
}

pub fn reverse(dag: &Dag) -> Dag {
    dag.reverse()
}

// Reverse postorder of an iterative DFS. Roots and children are scanned in
// descending id order, which places smaller ids first among unordered vertices.
fn dfs_topological_order(n: usize, edges: &[Edge], out_adj: &Adjacency) -> Result<Vec<usize>> {
    const WHITE: u8 = 0;
    const GRAY: u8 = 1;
    const BLACK: u8 = 2;
    let mut color = vec![WHITE; n];
    let mut post = Vec::with_capacity(n);
    // (vertex, number of out-edges still to scan, edge used to enter vertex)
    let mut stack: Vec<(usize, usize, usize)> = Vec::new();
    for root in (0..n).rev() {
        if color[root] != WHITE {
            continue;
        }
        color[root] = GRAY;
        stack.push((root, out_adj.of(root).len(), usize::MAX));
        while let Some(top) = stack.last_mut() {
            let (v, remaining, _) = *top;
            if remaining == 0 {
                color[v] = BLACK;
                post.push(v);
                stack.pop();
                continue;
            }
            top.1 -= 1;
            let ei = out_adj.of(v)[remaining - 1];
            let w = edges[ei].head;
            match color[w] {
                WHITE => {
                    color[w] = GRAY;
                    stack.push((w, out_adj.of(w).len(), ei));
                }
                GRAY => {
                    let start = stack.iter().position(|s| s.0 == w).expect("gray vertex is on the stack");
                    let mut witness: Vec<(usize, usize)> = stack[start + 1..]
                        .iter()
                        .map(|s| (edges[s.2].tail, edges[s.2].head))
                        .collect();
                    witness.push((v, w));
                    let min_pos = witness
                        .iter()
                        .enumerate()
                        .min_by_key(|(_, e)| e.0)
                        .map(|(i, _)| i)
                        .unwrap_or(0);
                    witness.rotate_left(min_pos);
                    return Err(IsoError::Cycle { witness });
                }
                _ => {}
            }
        }
    }
    post.reverse();
    Ok(post)
}

/// Single pass shortest paths on a DAG from a set of `(vertex, initial value)`
/// sources. `Forward` gives `d(v) = min_s value(s) + dist(s, v)`; `Backward`
/// gives `d(v) = min_s value(s) + dist(v, s)`. Unreachable vertices get `+inf`.
pub fn dag_sssp(dag: &Dag, sources: &[(usize, f64)], direction: Direction) -> Vec<f64> {
    shortest_paths(dag, sources, direction).0
}

/// Like [`dag_sssp`], also returning for each vertex the edge index through
/// which its distance was last improved (`usize::MAX` for none).
pub fn shortest_paths(dag: &Dag, sources: &[(usize, f64)], direction: Direction) -> (Vec<f64>, Vec<usize>) {
    let n = dag.n();
    let mut dist = vec![f64::INFINITY; n];
    let mut parent = vec![usize::MAX; n];
    for &(s, value) in sources {
        if value < dist[s] {
            dist[s] = value;
        }
    }
    match direction {
        Direction::Forward => {
            for &u in &dag.topo.order {
                let du = dist[u];
                if du == f64::INFINITY {
                    continue;
                }
                for &ei in dag.out_edges(u) {
                    let e = &dag.edges[ei];
                    let cand = du + e.length;
                    if cand < dist[e.head] {
                        dist[e.head] = cand;
                        parent[e.head] = ei;
                    }
                }
            }
        }
        Direction::Backward => {
            for &u in dag.topo.order.iter().rev() {
                let du = dist[u];
                if du == f64::INFINITY {
                    continue;
                }
                for &ei in dag.in_edges(u) {
                    let e = &dag.edges[ei];
                    let cand = du + e.length;
                    if cand < dist[e.tail] {
                        dist[e.tail] = cand;
                        parent[e.tail] = ei;
                    }
                }
            }
        }
    }
    (dist, parent)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diamond() -> Dag {
        Dag::from_pairs(4, &[(0, 1), (0, 2), (1, 3), (2, 3)]).unwrap()
    }

    #[test]
    fn chain_is_valid() {
        let g = Dag::from_pairs(3, &[(0, 1), (1, 2)]).unwrap();
        assert_eq!(g.n(), 3);
        assert_eq!(g.m(), 2);
    }

    #[test]
    fn two_cycle_reports_witness() {
        let err = Dag::from_pairs(2, &[(0, 1), (1, 0)]).unwrap_err();
        assert_eq!(
            err,
            IsoError::Cycle {
                witness: vec![(0, 1), (1, 0)]
            }
        );
    }

    #[test]
    fn longer_cycle_witness_is_closed() {
        let err = Dag::from_pairs(5, &[(0, 1), (1, 2), (2, 3), (3, 1), (3, 4)]).unwrap_err();
        match err {
            IsoError::Cycle { witness } => {
                assert_eq!(witness, vec![(1, 2), (2, 3), (3, 1)]);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn self_loop_rejected() {
        assert_eq!(
            Dag::from_pairs(1, &[(0, 0)]).unwrap_err(),
            IsoError::SelfLoop { vertex: 0 }
        );
    }

    #[test]
    fn bad_lengths_and_ranges_rejected() {
        assert!(matches!(
            Dag::new(2, vec![Edge::with_length(0, 1, -1.0)]),
            Err(IsoError::NegativeLength { .. })
        ));
        assert!(matches!(
            Dag::new(2, vec![Edge::with_length(0, 1, f64::NAN)]),
            Err(IsoError::NegativeLength { .. })
        ));
        assert!(matches!(
            Dag::from_pairs(2, &[(0, 2)]),
            Err(IsoError::VertexOutOfRange { vertex: 2, .. })
        ));
        assert!(Dag::new(2, vec![Edge::with_length(0, 1, 0.0)]).is_ok());
    }

    #[test]
    fn topological_orders() {
        let chain = Dag::from_pairs(3, &[(0, 1), (1, 2)]).unwrap();
        assert_eq!(topological_sort(&chain).order, vec![0, 1, 2]);
        let d = diamond();
        let t = topological_sort(&d);
        assert_eq!(t.order, vec![0, 1, 2, 3]);
        for e in d.edges() {
            assert!(t.rank[e.tail] < t.rank[e.head]);
        }
        let empty = Dag::new(3, vec![]).unwrap();
        assert_eq!(topological_sort(&empty).order, vec![0, 1, 2]);
    }

    #[test]
    fn topological_order_respects_edges_against_id_order() {
        let g = Dag::from_pairs(4, &[(3, 0), (2, 3), (1, 2)]).unwrap();
        assert_eq!(g.topo().order, vec![1, 2, 3, 0]);
    }

    #[test]
    fn reverse_chain_and_involution() {
        let chain = Dag::from_pairs(3, &[(0, 1), (1, 2)]).unwrap();
        let r = chain.reverse();
        let pairs: Vec<_> = r.edges().iter().map(|e| (e.tail, e.head)).collect();
        assert_eq!(pairs, vec![(1, 0), (2, 1)]);
        assert_eq!(r.topo().order, vec![2, 1, 0]);
        assert_eq!(r.reverse(), chain);

        let d = diamond().reverse();
        assert_eq!(d.m(), 4);
        assert!(d.edges().iter().all(|e| d.topo().rank[e.tail] < d.topo().rank[e.head]));
    }

    #[test]
    fn sssp_examples() {
        let chain = Dag::from_pairs(3, &[(0, 1), (1, 2)]).unwrap();
        assert_eq!(dag_sssp(&chain, &[(0, 0.0)], Direction::Forward), vec![0.0, 1.0, 2.0]);
        assert_eq!(
            dag_sssp(&chain, &[(2, 0.0)], Direction::Forward),
            vec![f64::INFINITY, f64::INFINITY, 0.0]
        );
        assert_eq!(dag_sssp(&chain, &[(2, 0.0)], Direction::Backward), vec![2.0, 1.0, 0.0]);

        let d = Dag::new(
            4,
            vec![
                Edge::with_length(0, 1, 1.0),
                Edge::with_length(0, 2, 3.0),
                Edge::with_length(1, 3, 1.0),
                Edge::with_length(2, 3, 1.0),
            ],
        )
        .unwrap();
        let dist = dag_sssp(&d, &[(0, 0.0)], Direction::Forward);
        assert_eq!(dist[3], 2.0);
        let (_, parent) = shortest_paths(&d, &[(0, 0.0)], Direction::Forward);
        assert_eq!(d.edge(parent[3]).tail, 1);
    }

    #[test]
    fn induced_subgraph_keeps_internal_edges() {
        let d = diamond();
        let (sub, back) = d.induced(&[true, true, false, true]);
        assert_eq!(back, vec![0, 1, 3]);
        assert_eq!(sub.m(), 2);
        assert_eq!(sub.topo().order, vec![0, 1, 2]);
    }
}
