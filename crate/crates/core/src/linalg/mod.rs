//! Approximate inverse operators for the barrier Hessian.
//!
//! * [`sdd_solve`] returns an operator `M` with `(1-τ)S⁻¹ ⪯ M ⪯ (1+τ)S⁻¹` for a
//!   symmetric diagonally dominant `S`, realized by an exact sparse LDLᵀ
//!   factorization (default) or by preconditioned conjugate gradients.
//! * [`block_solve`] inverts the Hessian of the cone and edge barriers by
//!   eliminating the epigraph variables and solving the Schur complement.
//! * [`rank_one_more`] adds a Sherman–Morrison correction for one rank-one
//!   term, which is how the value-bound barrier enters in [`hessian_solve`].

mod block;
pub mod ldl;
mod pcg;

use std::cell::RefCell;

pub use block::{block_solve, hessian_solve, hessian_solve_operator, BlockSolveOperator, HessianSolver, SchurSystem};
pub use pcg::{IncompleteCholesky, PcgOperator};

use crate::error::{IsoError, Result};
use ldl::{LdlFactor, SymbolicLdl};

/// A symmetric linear map applied to vectors.
pub trait LinearOperator {
    fn dim(&self) -> usize;

    fn apply_into(&self, a: &[f64], out: &mut [f64]) -> Result<()>;

    fn apply(&self, a: &[f64]) -> Result<Vec<f64>> {
        let mut out = vec![0.0; self.dim()];
        self.apply_into(a, &mut out)?;
        Ok(out)
    }
}

impl<T: LinearOperator + ?Sized> LinearOperator for &T {
    fn dim(&self) -> usize {
        (**self).dim()
    }

    fn apply_into(&self, a: &[f64], out: &mut [f64]) -> Result<()> {
        (**self).apply_into(a, out)
    }
}

impl<T: LinearOperator + ?Sized> LinearOperator for Box<T> {
    fn dim(&self) -> usize {
        (**self).dim()
    }

    fn apply_into(&self, a: &[f64], out: &mut [f64]) -> Result<()> {
        (**self).apply_into(a, out)
    }
}

/// Sparse symmetric matrix in row-major compressed form.
#[derive(Debug, Clone, PartialEq)]
pub struct SddMatrix {
    n: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
}

impl SddMatrix {
    /// Builds the matrix from `(row, col, value)` triplets; duplicates are
    /// summed. Both triangles must be supplied.
    pub fn from_triplets(n: usize, triplets: &[(usize, usize, f64)]) -> Self {
        let mut t: Vec<(usize, usize, f64)> = triplets.to_vec();
        t.sort_by_key(|a| (a.0, a.1));
        let mut row_ptr = vec![0usize; n + 1];
        let mut cols = Vec::with_capacity(t.len());
        let mut vals: Vec<f64> = Vec::with_capacity(t.len());
        let mut last: Option<(usize, usize)> = None;
        for (r, c, v) in t {
            assert!(r < n && c < n, "triplet ({r}, {c}) out of range");
            if last == Some((r, c)) {
                *vals.last_mut().unwrap() += v;
            } else {
                cols.push(c);
                vals.push(v);
                row_ptr[r + 1] += 1;
                last = Some((r, c));
            }
        }
        for i in 0..n {
            row_ptr[i + 1] += row_ptr[i];
        }
        SddMatrix {
            n,
            row_ptr,
            cols,
            vals,
        }
    }

    /// Symmetric matrix from its lower triangle (diagonal included).
    pub fn from_lower_triplets(n: usize, lower: &[(usize, usize, f64)]) -> Self {
        let mut full = Vec::with_capacity(lower.len() * 2);
        for &(r, c, v) in lower {
            full.push((r, c, v));
            if r != c {
                full.push((c, r, v));
            }
        }
        SddMatrix::from_triplets(n, &full)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        self.cols[r.clone()].iter().copied().zip(self.vals[r].iter().copied())
    }

    pub fn triplets(&self) -> Vec<(usize, usize, f64)> {
        (0..self.n).flat_map(|i| self.row(i).map(move |(j, v)| (i, j, v))).collect()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.row(i).find(|&(c, _)| c == j).map(|(_, v)| v).unwrap_or(0.0)
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.get(i, i)).collect()
    }

    pub fn mul_vec_into(&self, x: &[f64], out: &mut [f64]) {
        for (i, o) in out.iter_mut().enumerate().take(self.n) {
            *o = self.row(i).map(|(j, v)| v * x[j]).sum();
        }
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.n];
        self.mul_vec_into(x, &mut out);
        out
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        (0..self.n).all(|i| self.row(i).all(|(j, v)| (v - self.get(j, i)).abs() <= tol * v.abs().max(1.0)))
    }

    /// `A(i,i) >= Σ_{j≠i} |A(i,j)|` for every row.
    pub fn is_diagonally_dominant(&self) -> bool {
        (0..self.n).all(|i| self.dominance_margin(i) >= 0.0)
    }

    fn dominance_margin(&self, i: usize) -> f64 {
        let mut diag = 0.0;
        let mut off = 0.0;
        for (j, v) in self.row(i) {
            if j == i {
                diag += v;
            } else {
                off += v.abs();
            }
        }
        diag - off
    }

    /// Gershgorin lower and upper bounds on the spectrum.
    pub fn gershgorin_bounds(&self) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..self.n {
            let mut diag = 0.0;
            let mut off = 0.0;
            for (j, v) in self.row(i) {
                if j == i {
                    diag += v;
                } else {
                    off += v.abs();
                }
            }
            lo = lo.min(diag - off);
            hi = hi.max(diag + off);
        }
        (lo, hi)
    }

    fn adjacency(&self) -> Vec<Vec<usize>> {
        (0..self.n)
            .map(|i| self.row(i).map(|(j, _)| j).filter(|&j| j != i).collect())
            .collect()
    }
}

/// How [`sdd_solve`] realizes its operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SddMethod {
    /// Cholesky when the symbolic factor stays within [`AUTO_FILL_RATIO`]
    /// times the input size, conjugate gradients otherwise.
    #[default]
    Auto,
    /// Sparse LDLᵀ with a minimum-degree ordering; a fixed symmetric operator.
    Cholesky,
    /// Conjugate gradients with an incomplete Cholesky preconditioner, run to
    /// the requested energy-norm accuracy on every application.
    Pcg,
}

/// Fill budget of [`SddMethod::Auto`], relative to the nonzeros of the input.
pub const AUTO_FILL_RATIO: usize = 8;

impl SddMethod {
    /// Resolves [`SddMethod::Auto`] from the fill of a symbolic factorization
    /// of a matrix with `nnz` off-diagonal entries in its lower triangle.
    pub fn resolve(self, n: usize, nnz: usize, factor_nnz: usize) -> SddMethod {
        match self {
            SddMethod::Auto if factor_nnz > AUTO_FILL_RATIO * (n + nnz) => SddMethod::Pcg,
            SddMethod::Auto => SddMethod::Cholesky,
            other => other,
        }
    }
}

/// Exact inverse through a sparse LDLᵀ factorization.
#[derive(Debug, Clone)]
pub struct CholeskyOperator {
    symbolic: SymbolicLdl,
    factor: LdlFactor,
    work: RefCell<Vec<f64>>,
}

impl CholeskyOperator {
    pub fn new(s: &SddMatrix) -> Result<Self> {
        let symbolic = SymbolicLdl::analyze(&s.adjacency());
        let mut values = vec![0.0; symbolic.pattern_len()];
        for (i, j, v) in s.triplets() {
            if i >= j {
                values[symbolic.slot(i, j)] += v;
            }
        }
        let factor = symbolic.factor(&values)?;
        Ok(CholeskyOperator {
            work: RefCell::new(vec![0.0; s.n()]),
            symbolic,
            factor,
        })
    }
}

impl LinearOperator for CholeskyOperator {
    fn dim(&self) -> usize {
        self.symbolic.n()
    }

    fn apply_into(&self, a: &[f64], out: &mut [f64]) -> Result<()> {
        let mut work = self.work.borrow_mut();
        self.symbolic.solve(&self.factor, a, out, &mut work);
        Ok(())
    }
}

/// Returns `M ≈ S⁻¹` within relative error `tau` in the spectral order.
///
/// `mu` is the admissible failure probability; both realizations here are
/// deterministic, and a convergence failure is reported as
/// [`IsoError::SolverFailure`] instead.
pub fn sdd_solve(s: &SddMatrix, mu: f64, tau: f64) -> Result<Box<dyn LinearOperator>> {
    sdd_solve_with(s, mu, tau, SddMethod::Cholesky)
}

pub fn sdd_solve_with(s: &SddMatrix, mu: f64, tau: f64, method: SddMethod) -> Result<Box<dyn LinearOperator>> {
    if !(0.0..1.0).contains(&tau) {
        return Err(IsoError::Precondition(format!("tau = {tau} must lie in [0, 1)")));
    }
    if !(mu > 0.0 && mu <= 1.0) {
        return Err(IsoError::Precondition(format!("mu = {mu} must lie in (0, 1]")));
    }
    if !s.is_symmetric(1e-12) {
        return Err(IsoError::Precondition("matrix is not symmetric".into()));
    }
    if !s.is_diagonally_dominant() {
        return Err(IsoError::Precondition("matrix is not diagonally dominant".into()));
    }
    let method = match method {
        SddMethod::Auto if tau == 0.0 => SddMethod::Cholesky,
        SddMethod::Auto => {
            let adj = s.adjacency();
            let nnz = adj.iter().map(Vec::len).sum::<usize>() / 2;
            method.resolve(s.n(), nnz, SymbolicLdl::analyze(&adj).factor_nnz())
        }
        other => other,
    };
    match method {
        SddMethod::Auto | SddMethod::Cholesky => Ok(Box::new(CholeskyOperator::new(s)?)),
        SddMethod::Pcg => {
            if tau == 0.0 {
                return Err(IsoError::Precondition("conjugate gradients need tau > 0".into()));
            }
            Ok(Box::new(PcgOperator::new(s.clone(), tau)?))
        }
    }
}

/// Applies `M` and a sum-of-cached rank-one correction:
/// `Z = M - (M u uᵀ M) / (1 + uᵀ M u)`, an approximation of `(X + u uᵀ)⁻¹`
/// whenever `M` approximates `X⁻¹`.
#[derive(Debug, Clone)]
pub struct RankOneUpdate<O> {
    inner: O,
    w: Vec<f64>,
    denom: f64,
}

impl<O: LinearOperator> RankOneUpdate<O> {
    pub fn new(inner: O, u: &[f64]) -> Result<Self> {
        let w = inner.apply(u)?;
        let denom = 1.0 + dot(u, &w);
        Ok(RankOneUpdate { inner, w, denom })
    }

    pub fn inner(&self) -> &O {
        &self.inner
    }
}

impl<O: LinearOperator> LinearOperator for RankOneUpdate<O> {
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn apply_into(&self, a: &[f64], out: &mut [f64]) -> Result<()> {
        self.inner.apply_into(a, out)?;
        let coef = dot(&self.w, a) / self.denom;
        for (o, w) in out.iter_mut().zip(&self.w) {
            *o -= coef * w;
        }
        Ok(())
    }
}

/// `b = z - (wᵀa)/(1 + uᵀw) · w` with `w = M u` and `z = M a`.
pub fn rank_one_more(m: &dyn LinearOperator, u: &[f64], a: &[f64]) -> Result<Vec<f64>> {
    RankOneUpdate::new(m, u)?.apply(a)
}

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
