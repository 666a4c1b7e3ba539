//! Weighted ℓp isotonic regression instances.

use crate::dag::Dag;
use crate::error::{IsoError, Result};

/// A DAG with observations, weights and an exponent `p >= 1`.
///
/// The solver works in normalized units: observations are mapped affinely
/// into `[0, 1]` and weights are divided by their minimum so that the
/// smallest `w^p` equals one. The original data and the scale factors are
/// kept so results can be reported in the caller's units.
#[derive(Debug, Clone)]
pub struct IsoInstance {
    dag: Dag,
    p: f64,
    y: Vec<f64>,
    w: Vec<f64>,
    wp: Vec<f64>,
    y_raw: Vec<f64>,
    w_raw: Vec<f64>,
    y_offset: f64,
    y_scale: f64,
    w_scale: f64,
}

impl IsoInstance {
    pub fn new(dag: Dag, y: Vec<f64>, w: Vec<f64>, p: f64) -> Result<Self> {
        let n = dag.n();
        if y.len() != n {
            return Err(IsoError::LengthMismatch {
                left: y.len(),
                right: n,
            });
        }
        if w.len() != n {
            return Err(IsoError::LengthMismatch {
                left: w.len(),
                right: n,
            });
        }
        if n == 0 {
            return Err(IsoError::InvalidInstance("empty vertex set".into()));
        }
        if !(p.is_finite() && p >= 1.0) {
            return Err(IsoError::InvalidInstance(format!("exponent p = {p} must be a finite real >= 1")));
        }
        if let Some(v) = y.iter().position(|v| !v.is_finite()) {
            return Err(IsoError::InvalidInstance(format!("observation at vertex {v} is not finite")));
        }
        for (vertex, &weight) in w.iter().enumerate() {
            if !(weight.is_finite() && weight > 0.0) {
                return Err(IsoError::NonpositiveWeight { vertex, weight });
            }
        }
        let y_min = y.iter().copied().fold(f64::INFINITY, f64::min);
        let y_max = y.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let y_scale = if y_max > y_min { y_max - y_min } else { 1.0 };
        let y_norm = y.iter().map(|v| (v - y_min) / y_scale).collect();
        let w_scale = w.iter().copied().fold(f64::INFINITY, f64::min);
        let w_norm: Vec<f64> = w.iter().map(|v| v / w_scale).collect();
        let wp = w_norm.iter().map(|v| v.powf(p)).collect();
        Ok(IsoInstance {
            dag,
            p,
            y: y_norm,
            w: w_norm,
            wp,
            y_raw: y,
            w_raw: w,
            y_offset: y_min,
            y_scale,
            w_scale,
        })
    }

    /// Unit weights.
    pub fn unweighted(dag: Dag, y: Vec<f64>, p: f64) -> Result<Self> {
        let n = dag.n();
        IsoInstance::new(dag, y, vec![1.0; n], p)
    }

    #[inline]
    pub fn dag(&self) -> &Dag {
        &self.dag
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.dag.n()
    }

    #[inline]
    pub fn m(&self) -> usize {
        self.dag.m()
    }

    #[inline]
    pub fn p(&self) -> f64 {
        self.p
    }

    /// Normalized observations in `[0, 1]`.
    #[inline]
    pub fn y(&self) -> &[f64] {
        &self.y
    }

    /// Normalized weights (minimum one).
    #[inline]
    pub fn w(&self) -> &[f64] {
        &self.w
    }

    /// Normalized `w^p` (minimum one).
    #[inline]
    pub fn wp(&self) -> &[f64] {
        &self.wp
    }

    pub fn wp_max(&self) -> f64 {
        self.wp.iter().copied().fold(1.0, f64::max)
    }

    pub fn y_raw(&self) -> &[f64] {
        &self.y_raw
    }

    pub fn w_raw(&self) -> &[f64] {
        &self.w_raw
    }

    /// Factor converting a normalized objective `Σ w^p |x - y|^p` into the
    /// caller's units.
    pub fn objective_scale(&self) -> f64 {
        (self.w_scale * self.y_scale).powf(self.p)
    }

    pub fn to_raw_x(&self, x: &[f64]) -> Vec<f64> {
        x.iter().map(|v| self.y_offset + self.y_scale * v).collect()
    }

    pub fn to_normalized_x(&self, x: &[f64]) -> Vec<f64> {
        x.iter().map(|v| (v - self.y_offset) / self.y_scale).collect()
    }

    /// `Σ w(v)^p |x(v) - y(v)|^p` in the caller's units, `x` in caller units.
    pub fn raw_objective(&self, x: &[f64]) -> f64 {
        weighted_pnorm_pow(x, &self.y_raw, &self.w_raw, self.p)
    }

    /// Same objective in normalized units, `x` normalized.
    pub fn normalized_objective(&self, x: &[f64]) -> f64 {
        x.iter()
            .zip(&self.y)
            .zip(&self.wp)
            .map(|((xv, yv), wp)| wp * (xv - yv).abs().powf(self.p))
            .sum()
    }
}

/// `Σ w(v)^p |x(v) - y(v)|^p`.
pub fn weighted_pnorm_pow(x: &[f64], y: &[f64], w: &[f64], p: f64) -> f64 {
    x.iter()
        .zip(y)
        .zip(w)
        .map(|((xv, yv), wv)| (wv * (xv - yv).abs()).powf(p))
        .sum()
}

/// Largest violation `max(x(tail) - x(head), 0)` over the edges.
pub fn isotonic_violation(dag: &Dag, x: &[f64]) -> f64 {
    dag.edges()
        .iter()
        .map(|e| (x[e.tail] - x[e.head]).max(0.0))
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalization_and_scales() {
        let dag = Dag::path(3);
        let inst = IsoInstance::new(dag, vec![2.0, 6.0, 4.0], vec![2.0, 4.0, 2.0], 2.0).unwrap();
        assert_eq!(inst.y(), &[0.0, 1.0, 0.5]);
        assert_eq!(inst.w(), &[1.0, 2.0, 1.0]);
        assert_eq!(inst.wp(), &[1.0, 4.0, 1.0]);
        assert_eq!(inst.objective_scale(), 64.0);
        let x = [0.25, 0.5, 0.5];
        let raw = inst.to_raw_x(&x);
        assert_eq!(raw, vec![3.0, 4.0, 4.0]);
        let lhs = inst.raw_objective(&raw);
        let rhs = inst.normalized_objective(&x) * inst.objective_scale();
        assert!((lhs - rhs).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_inputs() {
        let dag = Dag::path(2);
        assert!(IsoInstance::new(dag.clone(), vec![0.0], vec![1.0, 1.0], 2.0).is_err());
        assert!(IsoInstance::new(dag.clone(), vec![0.0, 1.0], vec![1.0, 0.0], 2.0).is_err());
        assert!(IsoInstance::new(dag.clone(), vec![0.0, 1.0], vec![1.0, 1.0], 0.5).is_err());
        assert!(IsoInstance::new(dag, vec![0.0, f64::NAN], vec![1.0, 1.0], 2.0).is_err());
    }

    #[test]
    fn constant_observations() {
        let inst = IsoInstance::unweighted(Dag::path(2), vec![3.0, 3.0], 2.0).unwrap();
        assert_eq!(inst.y(), &[0.0, 0.0]);
        assert_eq!(inst.to_raw_x(&[0.0, 0.0]), vec![3.0, 3.0]);
    }
}
