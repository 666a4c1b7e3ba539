//! Brute-force reference solvers for small instances.
//!
//! These are exponential or cubic and exist only to validate the fast
//! solvers. They share no code with them beyond the graph type and the
//! barrier Hessian blocks.

use std::collections::{HashMap, HashSet};

use nalgebra::DMatrix;

use crate::barrier::{hessian_blocks, FeasiblePoint};
use crate::dag::{shortest_paths, Dag, Direction};
use crate::error::{IsoError, Result};
use crate::instance::IsoInstance;

#[derive(Debug, Clone, PartialEq)]
pub struct OracleResult {
    pub value: f64,
    pub x: Vec<f64>,
    pub method: &'static str,
    /// Edge subsets or pools examined.
    pub enumerated: usize,
    /// Distinct candidates evaluated.
    pub candidates: usize,
}

const ACTIVE_SET_MAX_EDGES: usize = 16;
const FEAS_TOL: f64 = 1e-9;

/// Interval of minimizers of `Σ c_i |x - y_i|^p` over a group.
fn group_minimizers(ys: &[f64], cs: &[f64], p: f64) -> (f64, f64) {
    if p == 1.0 {
        let mut idx: Vec<usize> = (0..ys.len()).collect();
        idx.sort_by(|&a, &b| ys[a].total_cmp(&ys[b]));
        let total: f64 = cs.iter().sum();
        let mut acc = 0.0;
        let mut lo = ys[idx[0]];
        for &i in &idx {
            acc += cs[i];
            if acc >= total / 2.0 {
                lo = ys[i];
                break;
            }
        }
        acc = 0.0;
        let mut hi = ys[*idx.last().unwrap()];
        for &i in idx.iter().rev() {
            acc += cs[i];
            if acc >= total / 2.0 {
                hi = ys[i];
                break;
            }
        }
        return (lo, hi);
    }
    // The derivative is increasing, so bisect on its sign.
    let df = |x: f64| -> f64 {
        ys.iter()
            .zip(cs)
            .map(|(y, c)| c * (x - y).signum() * (x - y).abs().powf(p - 1.0))
            .sum()
    };
    let mut a = ys.iter().copied().fold(f64::INFINITY, f64::min);
    let mut b = ys.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break;
        }
        if df(mid) < 0.0 {
            a = mid;
        } else {
            b = mid;
        }
    }
    let x = 0.5 * (a + b);
    (x, x)
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

/// Exact weighted ℓp isotonic regression by enumerating active edge sets.
///
/// Every subset of edges is contracted; each resulting group takes the
/// minimizer of its own separable objective (the smallest feasible point of
/// the weighted-median interval when `p = 1`) and the best candidate that
/// satisfies all edge constraints is returned. Works in the instance's
/// normalized units.
pub fn active_set_oracle(inst: &IsoInstance) -> Result<OracleResult> {
    let dag = inst.dag();
    let (n, m) = (dag.n(), dag.m());
    if m > ACTIVE_SET_MAX_EDGES {
        return Err(IsoError::TooLarge {
            what: "active set enumeration (edges)",
            size: m,
            limit: ACTIVE_SET_MAX_EDGES,
        });
    }
    if n > 64 {
        return Err(IsoError::TooLarge {
            what: "active set enumeration (vertices)",
            size: n,
            limit: 64,
        });
    }
    let (y, wp, p) = (inst.y(), inst.wp(), inst.p());
    let mut seen: HashSet<Vec<usize>> = HashSet::new();
    let mut solved: HashMap<u64, (f64, f64)> = HashMap::new();
    let mut best: Option<(Vec<f64>, Vec<f64>)> = None;
    let mut parent = vec![0usize; n];
    for subset in 0u32..(1u32 << m) {
        parent.iter_mut().enumerate().for_each(|(i, p)| *p = i);
        for (i, e) in dag.edges().iter().enumerate() {
            if subset >> i & 1 == 1 {
                let (a, b) = (find(&mut parent, e.tail), find(&mut parent, e.head));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
        let groups: Vec<usize> = (0..n).map(|v| find(&mut parent, v)).collect();
        if !seen.insert(groups.clone()) {
            continue;
        }
        let mut masks: HashMap<usize, u64> = HashMap::new();
        for (v, &g) in groups.iter().enumerate() {
            *masks.entry(g).or_default() |= 1u64 << v;
        }
        let mut lo = vec![0.0; n];
        let mut hi = vec![0.0; n];
        for (&g, &mask) in &masks {
            let interval = *solved.entry(mask).or_insert_with(|| {
                let members: Vec<usize> = (0..n).filter(|v| mask >> v & 1 == 1).collect();
                let ys: Vec<f64> = members.iter().map(|&v| y[v]).collect();
                let cs: Vec<f64> = members.iter().map(|&v| wp[v]).collect();
                group_minimizers(&ys, &cs, p)
            });
            lo[g] = interval.0;
            hi[g] = interval.1;
        }
        // Least group values that respect every edge and the lower ends.
        let mut val = lo.clone();
        let mut changed = true;
        let mut rounds = 0;
        while changed && rounds <= n {
            changed = false;
            rounds += 1;
            for e in dag.edges() {
                let (a, b) = (groups[e.tail], groups[e.head]);
                if val[a] > val[b] {
                    val[b] = val[a];
                    changed = true;
                }
            }
        }
        if masks.keys().any(|&g| val[g] > hi[g] + FEAS_TOL) {
            continue;
        }
        let x: Vec<f64> = (0..n).map(|v| val[groups[v]]).collect();
        if dag.edges().iter().any(|e| x[e.tail] > x[e.head] + FEAS_TOL) {
            continue;
        }
        // Compare per-vertex terms: shared values cancel exactly, so tiny
        // differences survive at large p where the totals round equal.
        let terms: Vec<f64> = (0..n).map(|v| wp[v] * (x[v] - y[v]).abs().powf(p)).collect();
        let better = best
            .as_ref()
            .is_none_or(|(b, _)| terms.iter().zip(b).map(|(t, u)| t - u).sum::<f64>() < 0.0);
        if better {
            best = Some((terms, x));
        }
    }
    let (_, x) = best.expect("the all-pooled candidate is always feasible");
    let value = inst.normalized_objective(&x);
    Ok(OracleResult {
        value,
        x,
        method: "active_set",
        enumerated: 1usize << m,
        candidates: seen.len(),
    })
}

/// Vertex order of a directed path, if `dag` is one.
fn path_order(dag: &Dag) -> Option<Vec<usize>> {
    let n = dag.n();
    if dag.m() + 1 != n {
        return None;
    }
    let order = dag.topo().order.clone();
    for w in order.windows(2) {
        if dag.out_edges(w[0]).len() != 1 || dag.edge(dag.out_edges(w[0])[0]).head != w[1] {
            return None;
        }
    }
    Some(order)
}

/// Pool-adjacent-violators for `Σ (w_i (x_i - y_i))²` on a directed path.
pub fn pava_oracle(dag: &Dag, y: &[f64], w: &[f64]) -> Result<OracleResult> {
    let n = dag.n();
    for len in [y.len(), w.len()] {
        if len != n {
            return Err(IsoError::LengthMismatch { left: len, right: n });
        }
    }
    let order = path_order(dag).ok_or(IsoError::NotAPath)?;
    // Blocks of (weighted mean, total weight, count).
    let mut blocks: Vec<(f64, f64, usize)> = Vec::with_capacity(n);
    let mut pools = 0;
    for &v in &order {
        let c = w[v] * w[v];
        blocks.push((y[v], c, 1));
        while blocks.len() > 1 && blocks[blocks.len() - 2].0 > blocks[blocks.len() - 1].0 {
            let (m2, c2, k2) = blocks.pop().unwrap();
            let (m1, c1, k1) = blocks.pop().unwrap();
            blocks.push(((m1 * c1 + m2 * c2) / (c1 + c2), c1 + c2, k1 + k2));
            pools += 1;
        }
    }
    let mut x = vec![0.0; n];
    let mut pos = 0;
    for (mean, _, k) in &blocks {
        for &v in &order[pos..pos + k] {
            x[v] = *mean;
        }
        pos += k;
    }
    let value = (0..n).map(|v| (w[v] * (x[v] - y[v])).powi(2)).sum();
    Ok(OracleResult {
        value,
        x,
        method: "pava",
        enumerated: pools,
        candidates: blocks.len(),
    })
}

const ALLPAIRS_MAX: usize = 512;

/// `dist[s][t]` and the predecessor edge on a shortest `s -> t` path.
fn all_pairs(dag: &Dag) -> (Vec<Vec<f64>>, Vec<Vec<usize>>) {
    (0..dag.n())
        .map(|s| shortest_paths(dag, &[(s, 0.0)], Direction::Forward))
        .unzip()
}

fn ratio(len: f64, a: f64, b: f64) -> f64 {
    if a <= b {
        0.0
    } else if len == 0.0 {
        f64::INFINITY
    } else {
        (a - b) / len
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct InfOracle {
    pub alpha: f64,
    /// `(vLow + vHigh) / 2` where both are finite.
    pub labeling: Vec<Option<f64>>,
}

/// Optimal largest gradient by enumerating all terminal pairs.
pub fn allpairs_inf_oracle(dag: &Dag, v0: &[Option<f64>]) -> Result<InfOracle> {
    let n = dag.n();
    if n > ALLPAIRS_MAX {
        return Err(IsoError::TooLarge {
            what: "all-pairs oracle",
            size: n,
            limit: ALLPAIRS_MAX,
        });
    }
    let (dist, _) = all_pairs(dag);
    let terms: Vec<usize> = (0..n).filter(|&v| v0[v].is_some()).collect();
    let mut alpha: f64 = 0.0;
    for &s in &terms {
        for &t in &terms {
            if s != t && dist[s][t].is_finite() {
                alpha = alpha.max(ratio(dist[s][t], v0[s].unwrap(), v0[t].unwrap()));
            }
        }
    }
    let mul = |d: f64| if d == 0.0 { 0.0 } else { alpha * d };
    let labeling = (0..n)
        .map(|x| {
            let low = terms
                .iter()
                .filter(|&&t| dist[x][t].is_finite())
                .map(|&t| v0[t].unwrap() + mul(dist[x][t]))
                .fold(f64::INFINITY, f64::min);
            let high = terms
                .iter()
                .filter(|&&t| dist[t][x].is_finite())
                .map(|&t| v0[t].unwrap() - mul(dist[t][x]))
                .fold(f64::NEG_INFINITY, f64::max);
            (low.is_finite() && high.is_finite()).then_some(0.5 * (low + high))
        })
        .collect();
    Ok(InfOracle { alpha, labeling })
}

/// Brute-force pressure: the steepest terminal path through each vertex.
pub fn allpairs_pressure(dag: &Dag, v0: &[Option<f64>]) -> Result<Vec<f64>> {
    let n = dag.n();
    if n > ALLPAIRS_MAX {
        return Err(IsoError::TooLarge {
            what: "all-pairs oracle",
            size: n,
            limit: ALLPAIRS_MAX,
        });
    }
    let (dist, _) = all_pairs(dag);
    let terms: Vec<usize> = (0..n).filter(|&v| v0[v].is_some()).collect();
    Ok((0..n)
        .map(|x| {
            let mut best: f64 = 0.0;
            for &s in &terms {
                if !dist[s][x].is_finite() {
                    continue;
                }
                for &t in &terms {
                    let len = dist[s][x] + dist[x][t];
                    if len.is_finite() && !(s == x && t == x) {
                        best = best.max(ratio(len, v0[s].unwrap(), v0[t].unwrap()));
                    }
                }
            }
            best
        })
        .collect())
}

const LEX_MAX: usize = 64;

/// Lex-minimal extension; the steepest free path is found each round by
/// scanning all terminal pairs.
pub fn lex_reference(dag: &Dag, v0: &[Option<f64>]) -> Result<Vec<f64>> {
    let n = dag.n();
    if n > LEX_MAX {
        return Err(IsoError::TooLarge {
            what: "lex reference",
            size: n,
            limit: LEX_MAX,
        });
    }
    let mut v: Vec<Option<f64>> = v0.to_vec();
    while v.iter().any(|l| l.is_none()) {
        let g = dag.filter_edges(|_, e| !(v[e.tail].is_some() && v[e.head].is_some()));
        let (dist, pred) = all_pairs(&g);
        let terms: Vec<usize> = (0..n).filter(|&x| v[x].is_some()).collect();
        let mut best = (0.0, usize::MAX, usize::MAX);
        for &s in &terms {
            for &t in &terms {
                if s != t && dist[s][t].is_finite() {
                    let r = ratio(dist[s][t], v[s].unwrap(), v[t].unwrap());
                    if r > best.0 {
                        best = (r, s, t);
                    }
                }
            }
        }
        let (grad, s, t) = best;
        if grad == 0.0 {
            return Ok(zero_gradient_reference(&g, &v));
        }
        let mut path = vec![t];
        let mut cur = t;
        while cur != s {
            cur = g.edge(pred[s][cur]).tail;
            path.push(cur);
        }
        path.reverse();
        let vs = v[s].unwrap();
        for &x in &path {
            if v[x].is_none() {
                let d = dist[s][x];
                v[x] = Some(vs - if d == 0.0 { 0.0 } else { grad * d });
            }
        }
    }
    Ok(v.into_iter().map(|l| l.unwrap()).collect())
}

/// Unlabeled vertices reached from a terminal take the largest such
/// terminal label; the rest take the smallest label they reach afterwards.
fn zero_gradient_reference(dag: &Dag, v: &[Option<f64>]) -> Vec<f64> {
    let n = dag.n();
    let (dist, _) = all_pairs(dag);
    let mut out: Vec<Option<f64>> = v.to_vec();
    for x in 0..n {
        if v[x].is_none() {
            out[x] = (0..n)
                .filter(|&t| v[t].is_some() && dist[t][x].is_finite())
                .map(|t| v[t].unwrap())
                .fold(None, |acc: Option<f64>, val| Some(acc.map_or(val, |a| a.max(val))));
        }
    }
    let stage_one = out.clone();
    for x in 0..n {
        if stage_one[x].is_none() {
            out[x] = (0..n)
                .filter(|&t| t != x && stage_one[t].is_some() && dist[x][t].is_finite())
                .map(|t| stage_one[t].unwrap())
                .fold(None, |acc: Option<f64>, val| Some(acc.map_or(val, |a| a.min(val))));
        }
    }
    out.into_iter().map(|l| l.expect("instance is well posed")).collect()
}

const DENSE_MAX: usize = 64;

/// The full `2n × 2n` barrier Hessian in `(x, t)` layout.
pub fn dense_hessian(inst: &IsoInstance, k: f64, point: &FeasiblePoint) -> Result<DMatrix<f64>> {
    let n = inst.n();
    if n > DENSE_MAX {
        return Err(IsoError::TooLarge {
            what: "dense Hessian",
            size: n,
            limit: DENSE_MAX,
        });
    }
    let b = hessian_blocks(inst, k, point)?;
    let mut h = DMatrix::zeros(2 * n, 2 * n);
    for v in 0..n {
        h[(v, v)] += b.r_hat[v];
        h[(n + v, n + v)] += b.t_diag[v];
        h[(v, n + v)] += b.coupling[v];
        h[(n + v, v)] += b.coupling[v];
    }
    for (i, e) in inst.dag().edges().iter().enumerate() {
        let r = b.r_edge[i];
        h[(e.tail, e.tail)] += r;
        h[(e.head, e.head)] += r;
        h[(e.tail, e.head)] -= r;
        h[(e.head, e.tail)] -= r;
    }
    let slack = k - inst.wp().iter().zip(&point.t).map(|(a, b)| a * b).sum::<f64>();
    let wp = inst.wp();
    for i in 0..n {
        for j in 0..n {
            h[(n + i, n + j)] += wp[i] * wp[j] / (slack * slack);
        }
    }
    Ok(h)
}

pub fn dense_hessian_inverse(inst: &IsoInstance, k: f64, point: &FeasiblePoint) -> Result<DMatrix<f64>> {
    let h = dense_hessian(inst, k, point)?;
    let chol = h.cholesky().ok_or(IsoError::NotPositiveDefinite { pivot: 0 })?;
    Ok(chol.inverse())
}
