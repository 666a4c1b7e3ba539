//! Synthetic instances: oriented 2-d grids and random regular graphs with
//! noisy observations drawn from a random linear extension.

use dagiso::{Dag, Edge};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::{Distribution, Normal};

/// `k × k` grid with vertex `(i, j)` at id `i·k + j` and edges pointing right
/// and down, so every edge moves toward corner `(k-1, k-1)`.
pub fn grid2d(k: usize) -> Dag {
    let mut edges = Vec::with_capacity(2 * k * k.saturating_sub(1));
    for i in 0..k {
        for j in 0..k {
            let v = i * k + j;
            if j + 1 < k {
                edges.push(Edge::new(v, v + 1));
            }
            if i + 1 < k {
                edges.push(Edge::new(v, v + k));
            }
        }
    }
    Dag::new(k * k, edges).expect("grid edges point forward")
}

/// A linear extension sampled by Kahn's algorithm with uniform choice among
/// the currently available sources. Returns the position of each vertex.
pub fn random_linear_extension<R: Rng + ?Sized>(dag: &Dag, rng: &mut R) -> Vec<usize> {
    let n = dag.n();
    let mut indeg: Vec<usize> = (0..n).map(|v| dag.in_edges(v).len()).collect();
    let mut ready: Vec<usize> = (0..n).filter(|&v| indeg[v] == 0).collect();
    let mut pos = vec![0; n];
    for slot in 0..n {
        let i = rng.random_range(0..ready.len());
        let v = ready.swap_remove(i);
        pos[v] = slot;
        for &e in dag.out_edges(v) {
            let h = dag.edge(e).head;
            indeg[h] -= 1;
            if indeg[h] == 0 {
                ready.push(h);
            }
        }
    }
    pos
}

/// `y(v) = position + 1` in a random linear extension plus `N(0, σ²)` noise.
pub fn noisy_observations<R: Rng + ?Sized>(dag: &Dag, sigma: f64, rng: &mut R) -> Vec<f64> {
    let pos = random_linear_extension(dag, rng);
    if sigma == 0.0 {
        return pos.iter().map(|&p| (p + 1) as f64).collect();
    }
    let noise = Normal::new(0.0, sigma).expect("sigma is finite and non-negative");
    pos.iter().map(|&p| (p + 1) as f64 + noise.sample(rng)).collect()
}

pub fn gen_grid2d<R: Rng + ?Sized>(k: usize, sigma: f64, rng: &mut R) -> (Dag, Vec<f64>) {
    let dag = grid2d(k);
    let y = noisy_observations(&dag, sigma, rng);
    (dag, y)
}

/// Undirected simple `d`-regular graph from the configuration model,
/// resampled until no loop or parallel edge appears.
pub fn random_regular_pairs<R: Rng + ?Sized>(n: usize, d: usize, rng: &mut R) -> Vec<(usize, usize)> {
    assert!((n * d).is_multiple_of(2), "n·d must be even");
    assert!(d < n || n * d == 0, "degree must be below n");
    let mut stubs: Vec<usize> = (0..n).flat_map(|v| std::iter::repeat_n(v, d)).collect();
    'retry: loop {
        stubs.shuffle(rng);
        let mut seen = std::collections::HashSet::with_capacity(n * d / 2);
        let mut pairs = Vec::with_capacity(n * d / 2);
        for c in stubs.chunks(2) {
            let (a, b) = (c[0].min(c[1]), c[0].max(c[1]));
            if a == b || !seen.insert((a, b)) {
                continue 'retry;
            }
            pairs.push((a, b));
        }
        return pairs;
    }
}

/// Random `d`-regular graph with vertices relabeled by a uniform random
/// permutation and every edge oriented from the lower to the higher label.
pub fn gen_random_regular<R: Rng + ?Sized>(n: usize, d: usize, rng: &mut R) -> Dag {
    let pairs = random_regular_pairs(n, d, rng);
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(rng);
    let edges = pairs
        .into_iter()
        .map(|(a, b)| {
            let (pa, pb) = (perm[a], perm[b]);
            Edge::new(pa.min(pb), pa.max(pb))
        })
        .collect();
    Dag::new(n, edges).expect("orientation by label is acyclic")
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn grid_counts_and_orientation() {
        let dag = grid2d(2);
        assert_eq!((dag.n(), dag.m()), (4, 4));
        let k = 5;
        let dag = grid2d(k);
        for e in dag.edges() {
            let (ti, tj, hi, hj) = (e.tail / k, e.tail % k, e.head / k, e.head % k);
            assert!((hi == ti + 1 && hj == tj) || (hi == ti && hj == tj + 1));
        }
    }

    #[test]
    fn noiseless_grid_is_isotonic() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let (dag, y) = gen_grid2d(6, 0.0, &mut rng);
        assert!(dag.edges().iter().all(|e| y[e.tail] < y[e.head]));
        let mut sorted = y.clone();
        sorted.sort_by(f64::total_cmp);
        assert_eq!(sorted, (1..=36).map(|v| v as f64).collect::<Vec<_>>());
    }

    #[test]
    fn regular_graph_counts_and_determinism() {
        let mut a = ChaCha8Rng::seed_from_u64(3);
        let mut b = ChaCha8Rng::seed_from_u64(3);
        let g = gen_random_regular(10, 4, &mut a);
        assert_eq!(g.m(), 20);
        assert_eq!(g, gen_random_regular(10, 4, &mut b));
        let pairs = random_regular_pairs(30, 4, &mut a);
        let mut deg = [0; 30];
        for (u, v) in pairs {
            deg[u] += 1;
            deg[v] += 1;
        }
        assert!(deg.iter().all(|&d| d == 4));
    }
}
