//! ℓ∞ and strict isotonic regression through Lipschitz extensions.
//!
//! Each vertex `u` gets two labeled copies: `u_L` with an edge into `u` and
//! `u_R` with an edge out of `u`, both of length `1/w(u)` and label `y(u)`.
//! Original edges get length zero, which forces isotonicity: any labeling
//! with a finite largest gradient satisfies `x(u) <= x(v)` on them. The
//! gradients on the new edges are exactly the weighted errors.

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use crate::dag::{Dag, Edge};
use crate::error::{IsoError, Result};
use crate::lipschitz::{comp_inf_min, comp_lex_min, InfVariant, PartialLabeling};

/// The labeled graph on `V ∪ V_L ∪ V_R`. Vertex `u` keeps its id, `u_L` is
/// `n + u` and `u_R` is `2n + u`.
#[derive(Debug, Clone)]
pub struct AugmentedInstance {
    pub gprime: Dag,
    pub yprime: PartialLabeling,
    /// Original vertex for every augmented id.
    pub back: Vec<usize>,
}

impl AugmentedInstance {
    pub fn n_original(&self) -> usize {
        self.gprime.n() / 3
    }
}

fn check_inputs(dag: &Dag, y: &[f64], w: &[f64]) -> Result<()> {
    let n = dag.n();
    for len in [y.len(), w.len()] {
        if len != n {
            return Err(IsoError::LengthMismatch { left: len, right: n });
        }
    }
    for (vertex, &weight) in w.iter().enumerate() {
        if !(weight > 0.0 && weight.is_finite()) {
            return Err(IsoError::NonpositiveWeight { vertex, weight });
        }
    }
    if let Some(v) = y.iter().position(|v| !v.is_finite()) {
        return Err(IsoError::InvalidInstance(format!("observation at vertex {v} is not finite")));
    }
    Ok(())
}

pub fn build_augmented(dag: &Dag, y: &[f64], w: &[f64]) -> Result<AugmentedInstance> {
    check_inputs(dag, y, w)?;
    let n = dag.n();
    let mut edges: Vec<Edge> = dag.edges().iter().map(|e| Edge::with_length(e.tail, e.head, 0.0)).collect();
    for u in 0..n {
        let len = 1.0 / w[u];
        edges.push(Edge::with_length(n + u, u, len));
        edges.push(Edge::with_length(u, 2 * n + u, len));
    }
    let order: Vec<usize> = (n..2 * n)
        .chain(dag.topo().order.iter().copied())
        .chain(2 * n..3 * n)
        .collect();
    let gprime = Dag::with_order(3 * n, edges, order);
    let mut yprime = vec![None; 3 * n];
    for u in 0..n {
        yprime[n + u] = Some(y[u]);
        yprime[2 * n + u] = Some(y[u]);
    }
    let back = (0..3 * n).map(|i| i % n.max(1)).collect();
    Ok(AugmentedInstance { gprime, yprime, back })
}

/// Result of [`isotonic_inf`].
#[derive(Debug, Clone, PartialEq)]
pub struct InfRegression {
    pub x: Vec<f64>,
    /// `max_u w(u) |x(u) - y(u)|`
    pub error: f64,
}

/// `max_u w(u) |x(u) - y(u)|`
pub fn weighted_inf_error(x: &[f64], y: &[f64], w: &[f64]) -> f64 {
    x.iter()
        .zip(y)
        .zip(w)
        .map(|((a, b), c)| c * (a - b).abs())
        .fold(0.0, f64::max)
}

/// Lifts roundoff-sized violations left by interpolating separate paths, so
/// the output is exactly isotonic.
fn close_roundoff(dag: &Dag, x: &mut [f64]) {
    for &v in &dag.topo().order {
        for &ei in dag.out_edges(v) {
            let h = dag.edge(ei).head;
            if x[h] < x[v] {
                debug_assert!(x[v] - x[h] <= 1e-9 * (1.0 + x[v].abs()));
                x[h] = x[v];
            }
        }
    }
}

/// Weighted ℓ∞ isotonic regression with a fixed seed.
pub fn isotonic_inf(dag: &Dag, y: &[f64], w: &[f64], variant: InfVariant) -> Result<InfRegression> {
    isotonic_inf_with_rng(dag, y, w, variant, &mut StdRng::seed_from_u64(0))
}

pub fn isotonic_inf_with_rng<R: Rng + ?Sized>(
    dag: &Dag,
    y: &[f64],
    w: &[f64],
    variant: InfVariant,
    rng: &mut R,
) -> Result<InfRegression> {
    if dag.n() == 0 {
        return Ok(InfRegression { x: vec![], error: 0.0 });
    }
    let aug = build_augmented(dag, y, w)?;
    let res = comp_inf_min(&aug.gprime, &aug.yprime, variant, rng)?;
    let mut x = res.labeling[..dag.n()].to_vec();
    close_roundoff(dag, &mut x);
    Ok(InfRegression { error: res.alpha, x })
}

/// Strict isotonic regression with a fixed seed: the ℓ∞ minimizer whose
/// sorted weighted errors are lexicographically smallest.
pub fn isotonic_strict(dag: &Dag, y: &[f64], w: &[f64]) -> Result<Vec<f64>> {
    isotonic_strict_with_rng(dag, y, w, &mut StdRng::seed_from_u64(0))
}

pub fn isotonic_strict_with_rng<R: Rng + ?Sized>(dag: &Dag, y: &[f64], w: &[f64], rng: &mut R) -> Result<Vec<f64>> {
    if dag.n() == 0 {
        return Ok(vec![]);
    }
    let aug = build_augmented(dag, y, w)?;
    let v = comp_lex_min(&aug.gprime, &aug.yprime, rng)?;
    let mut x = v[..dag.n()].to_vec();
    close_roundoff(dag, &mut x);
    Ok(x)
}
