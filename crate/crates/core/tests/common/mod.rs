#![allow(dead_code)]

use dagiso::barrier::FeasiblePoint;
use dagiso::{Dag, Edge, IsoInstance};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub use rand::SeedableRng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random DAG: `m` distinct pairs oriented along a hidden random order.
pub fn random_dag<R: Rng>(n: usize, m: usize, rng: &mut R) -> Dag {
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(rng);
    let mut pairs: Vec<(usize, usize)> = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            pairs.push((perm[i], perm[j]));
        }
    }
    pairs.shuffle(rng);
    pairs.truncate(m.min(pairs.len()));
    Dag::from_pairs(n, &pairs).unwrap()
}

/// Same as [`random_dag`] with lengths drawn from `{0} ∪ [0.1, 2]`.
pub fn random_dag_with_lengths<R: Rng>(n: usize, m: usize, rng: &mut R) -> Dag {
    let base = random_dag(n, m, rng);
    let edges = base
        .edges()
        .iter()
        .map(|e| {
            let len = if rng.random_bool(0.15) { 0.0 } else { rng.random_range(0.1..2.0) };
            Edge::with_length(e.tail, e.head, len)
        })
        .collect();
    Dag::new(n, edges).unwrap()
}

pub fn random_instance<R: Rng>(n: usize, m: usize, p: f64, rng: &mut R) -> IsoInstance {
    let dag = random_dag(n, m, rng);
    let y = (0..n).map(|_| rng.random_range(-2.0..2.0)).collect();
    let w = (0..n).map(|_| rng.random_range(0.5..3.0)).collect();
    IsoInstance::new(dag, y, w, p).unwrap()
}

/// Strictly isotonic `x` in `(0, 1)` with comfortable cone slack.
pub fn random_point<R: Rng>(inst: &IsoInstance, rng: &mut R) -> FeasiblePoint {
    let n = inst.n();
    let mut vals: Vec<f64> = (0..n).map(|_| rng.random_range(0.05..0.95)).collect();
    vals.sort_by(f64::total_cmp);
    vals.dedup();
    while vals.len() < n {
        vals.push(vals.last().copied().unwrap_or(0.05) + 1e-3);
    }
    let rank = &inst.dag().topo().rank;
    let x: Vec<f64> = (0..n).map(|v| vals[rank[v]]).collect();
    let t = (0..n)
        .map(|v| (x[v] - inst.y()[v]).abs().powf(inst.p()) + rng.random_range(0.1..1.0))
        .collect();
    FeasiblePoint::new(x, t)
}

/// Partial labeling with about `frac` of the vertices labeled, at least two.
pub fn random_labeling<R: Rng>(n: usize, frac: f64, rng: &mut R) -> Vec<Option<f64>> {
    let mut v: Vec<Option<f64>> = (0..n)
        .map(|_| rng.random_bool(frac).then(|| rng.random_range(-5.0..5.0)))
        .collect();
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(rng);
    for &i in idx.iter().take(2) {
        if v[i].is_none() {
            v[i] = Some(rng.random_range(-5.0..5.0));
        }
    }
    v
}

pub fn is_isotonic(dag: &Dag, x: &[f64]) -> bool {
    dag.edges().iter().all(|e| x[e.tail] <= x[e.head])
}
