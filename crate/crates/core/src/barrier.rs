//! Self-concordant barrier for the bounded epigraph domain of weighted ℓp
//! isotonic regression.
//!
//! Variables are `z = (x, t)`: one fitted value and one epigraph variable per
//! vertex, always laid out as the x-block followed by the t-block. With
//! `r = x - y` and `a = t^(2/p)` the barrier is
//!
//! ```text
//! F(x, t) = Σ_v [ -log(a_v - r_v²) - 2 log t_v ]
//!         + Σ_(u,v)∈E -log(x_v - x_u)
//!         - log(K - <w^p, t>)
//! ```
//!
//! Its domain is bounded, so the central path exists for every objective
//! weight.

use crate::error::{IsoError, Result};
use crate::instance::IsoInstance;

/// An iterate `(x, t)`.
#[derive(Debug, Clone, PartialEq)]
pub struct FeasiblePoint {
    pub x: Vec<f64>,
    pub t: Vec<f64>,
}

impl FeasiblePoint {
    pub fn new(x: Vec<f64>, t: Vec<f64>) -> Self {
        FeasiblePoint { x, t }
    }

    /// Flattened `(x, t)`.
    pub fn to_vec(&self) -> Vec<f64> {
        let mut z = Vec::with_capacity(self.x.len() * 2);
        z.extend_from_slice(&self.x);
        z.extend_from_slice(&self.t);
        z
    }

    pub fn from_slice(z: &[f64]) -> Self {
        let n = z.len() / 2;
        FeasiblePoint {
            x: z[..n].to_vec(),
            t: z[n..].to_vec(),
        }
    }
}

/// One failed strict-feasibility constraint.
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    /// `x(head) - x(tail) <= 0` on this edge index.
    Edge { index: usize, slack: f64 },
    /// `t(v) <= 0`.
    Epigraph { vertex: usize, t: f64 },
    /// `t(v)^(2/p) - (x(v) - y(v))² <= 0`.
    Cone { vertex: usize, slack: f64 },
    /// `K - <w^p, t> <= 0`.
    ValueBound { slack: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Feasibility {
    pub feasible: bool,
    pub violations: Vec<Violation>,
}

/// Diagonal blocks of the Hessian of the per-edge barrier on the extended
/// graph (original edges plus one hat-edge `(v̂, v)` per vertex).
///
/// Rows of the x-block Hessian are `Σ_E r_edge (e_head - e_tail)(...)ᵀ +
/// diag(r_hat)`, the t-block is `diag(t_diag)` and the only cross terms are
/// `coupling[v]` between `x(v)` and `t(v)`.
#[derive(Debug, Clone)]
pub struct HessianBlocks {
    /// `T` on hat-edges.
    pub t_diag: Vec<f64>,
    /// `R` on hat-edges.
    pub r_hat: Vec<f64>,
    /// `R` on original edges, `1 / (x(head) - x(tail))²`.
    pub r_edge: Vec<f64>,
    /// `C` on hat-edges.
    pub coupling: Vec<f64>,
    /// `R - C² / T` on hat-edges, evaluated in a closed form that avoids the
    /// cancellation of the direct expression near the cone boundary.
    pub schur: Vec<f64>,
    /// Edge differences: original edges first, then hat-edges (`x - y`).
    pub r: Vec<f64>,
}

impl HessianBlocks {
    /// Diagonal of `R - C T⁻¹ Cᵀ` restricted to hat-edges. Every entry is
    /// strictly positive at an interior point.
    pub fn schur_diag(&self) -> Vec<f64> {
        self.schur.clone()
    }
}

/// `t^(2/p)` and its log-derivative helpers for one vertex.
#[derive(Debug, Clone, Copy)]
pub(crate) struct VertexTerms {
    /// `t^(2/p)`
    pub a: f64,
    /// `a - r²`
    pub s: f64,
    pub r: f64,
    pub t: f64,
}

#[inline]
pub(crate) fn pow_two_over_p(t: f64, p: f64) -> f64 {
    if p == 2.0 {
        t
    } else if p == 1.0 {
        t * t
    } else {
        ((2.0 / p) * t.ln()).exp()
    }
}

#[inline]
pub(crate) fn vertex_terms(x: f64, y: f64, t: f64, p: f64) -> Option<VertexTerms> {
    if !(t > 0.0) {
        return None;
    }
    let r = x - y;
    let a = pow_two_over_p(t, p);
    let s = a - r * r;
    if !(s > 0.0) {
        return None;
    }
    Some(VertexTerms { a, s, r, t })
}

/// Strict membership test; lists every failed constraint.
pub fn is_feasible(inst: &IsoInstance, k: f64, point: &FeasiblePoint) -> Feasibility {
    let mut violations = Vec::new();
    let y = inst.y();
    for (index, e) in inst.dag().edges().iter().enumerate() {
        let slack = point.x[e.head] - point.x[e.tail];
        if !(slack > 0.0) {
            violations.push(Violation::Edge { index, slack });
        }
    }
    for v in 0..inst.n() {
        let t = point.t[v];
        if !(t > 0.0) {
            violations.push(Violation::Epigraph { vertex: v, t });
            continue;
        }
        let r = point.x[v] - y[v];
        let slack = pow_two_over_p(t, inst.p()) - r * r;
        if !(slack > 0.0) {
            violations.push(Violation::Cone { vertex: v, slack });
        }
    }
    let slack = k - dot(inst.wp(), &point.t);
    if !(slack > 0.0) {
        violations.push(Violation::ValueBound { slack });
    }
    Feasibility {
        feasible: violations.is_empty(),
        violations,
    }
}

/// Barrier value at a strictly feasible point.
pub fn barrier_value(inst: &IsoInstance, k: f64, point: &FeasiblePoint) -> Result<f64> {
    value_flat(inst, k, &point.to_vec())
}

/// Gradient ordered as (x-block, t-block).
pub fn barrier_gradient(inst: &IsoInstance, k: f64, point: &FeasiblePoint) -> Result<Vec<f64>> {
    let z = point.to_vec();
    let mut g = vec![0.0; z.len()];
    gradient_flat(inst, k, &z, &mut g)?;
    Ok(g)
}

/// Hessian block data at a strictly feasible point.
pub fn hessian_blocks(inst: &IsoInstance, k: f64, point: &FeasiblePoint) -> Result<HessianBlocks> {
    let z = point.to_vec();
    let mut blocks = HessianBlocks {
        t_diag: vec![0.0; inst.n()],
        r_hat: vec![0.0; inst.n()],
        schur: vec![0.0; inst.n()],
        r_edge: vec![0.0; inst.m()],
        coupling: vec![0.0; inst.n()],
        r: vec![0.0; inst.m() + inst.n()],
    };
    hessian_blocks_into(inst, k, &z, &mut blocks)?;
    Ok(blocks)
}

/// `4` per vertex cone barrier, `1` per edge and `1` for the value bound.
pub fn complexity_parameter(inst: &IsoInstance) -> f64 {
    (4 * inst.n() + inst.m() + 1) as f64
}

pub(crate) fn value_flat(inst: &IsoInstance, k: f64, z: &[f64]) -> Result<f64> {
    let n = inst.n();
    let (x, t) = z.split_at(n);
    let y = inst.y();
    let p = inst.p();
    let mut total = 0.0;
    for v in 0..n {
        let vt = vertex_terms(x[v], y[v], t[v], p)
            .ok_or_else(|| IsoError::Infeasible(format!("cone constraint at vertex {v}")))?;
        total += -vt.s.ln() - 2.0 * vt.t.ln();
    }
    for (i, e) in inst.dag().edges().iter().enumerate() {
        let d = x[e.head] - x[e.tail];
        if !(d > 0.0) {
            return Err(IsoError::Infeasible(format!("edge {i} ({} -> {})", e.tail, e.head)));
        }
        total -= d.ln();
    }
    let slack = k - dot(inst.wp(), t);
    if !(slack > 0.0) {
        return Err(IsoError::Infeasible("value bound".into()));
    }
    Ok(total - slack.ln())
}

pub(crate) fn gradient_flat(inst: &IsoInstance, k: f64, z: &[f64], g: &mut [f64]) -> Result<()> {
    let n = inst.n();
    let (x, t) = z.split_at(n);
    let (gx, gt) = g.split_at_mut(n);
    let y = inst.y();
    let p = inst.p();
    let q = 2.0 / p;
    let wp = inst.wp();
    let slack = k - dot(wp, t);
    if !(slack > 0.0) {
        return Err(IsoError::Infeasible("value bound".into()));
    }
    for v in 0..n {
        let vt = vertex_terms(x[v], y[v], t[v], p)
            .ok_or_else(|| IsoError::Infeasible(format!("cone constraint at vertex {v}")))?;
        gx[v] = 2.0 * vt.r / vt.s;
        // d/dt t^q = q t^(q-1) = q a / t
        gt[v] = -q * vt.a / (vt.t * vt.s) - 2.0 / vt.t + wp[v] / slack;
    }
    for (i, e) in inst.dag().edges().iter().enumerate() {
        let d = x[e.head] - x[e.tail];
        if !(d > 0.0) {
            return Err(IsoError::Infeasible(format!("edge {i} ({} -> {})", e.tail, e.head)));
        }
        gx[e.tail] += 1.0 / d;
        gx[e.head] -= 1.0 / d;
    }
    Ok(())
}

pub(crate) fn hessian_blocks_into(inst: &IsoInstance, k: f64, z: &[f64], b: &mut HessianBlocks) -> Result<()> {
    let n = inst.n();
    let m = inst.m();
    let (x, t) = z.split_at(n);
    let y = inst.y();
    let p = inst.p();
    let q = 2.0 / p;
    if !(k - dot(inst.wp(), t) > 0.0) {
        return Err(IsoError::Infeasible("value bound".into()));
    }
    for (i, e) in inst.dag().edges().iter().enumerate() {
        let d = x[e.head] - x[e.tail];
        if !(d > 0.0) {
            return Err(IsoError::Infeasible(format!("edge {i} ({} -> {})", e.tail, e.head)));
        }
        b.r[i] = d;
        b.r_edge[i] = 1.0 / (d * d);
    }
    for v in 0..n {
        let vt = vertex_terms(x[v], y[v], t[v], p)
            .ok_or_else(|| IsoError::Infeasible(format!("cone constraint at vertex {v}")))?;
        let (a, s, r, tv) = (vt.a, vt.s, vt.r, vt.t);
        // t^(q-1) = a / t, t^(q-2) = a / t²
        let first = q * a / (tv * s);
        b.t_diag[v] = first * first - (q - 1.0) * q * a / (tv * tv * s) + 2.0 / (tv * tv);
        let rs = 2.0 * r / s;
        b.r_hat[v] = rs * rs + 2.0 / s;
        b.coupling[v] = -2.0 * q * (a / tv) * r / (s * s);
        // Substituting r² = a - s cancels the 1/s² terms exactly.
        let num = 2.0 * q * (2.0 - q) * a * a / s + 8.0 * a - 4.0 * s + 2.0 * q * (q - 1.0) * a;
        let den = q * q * a * a - q * (q - 1.0) * a * s + 2.0 * s * s;
        b.schur[v] = num / den;
        b.r[m + v] = r;
    }
    Ok(())
}

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
