use super::{dot, LinearOperator, SddMatrix};
use crate::error::{IsoError, Result};

/// Zero fill-in incomplete Cholesky factor `L D Lᵀ` on the pattern of the
/// lower triangle. Falls back to the Jacobi preconditioner when a pivot
/// breaks down.
#[derive(Debug, Clone)]
pub struct IncompleteCholesky {
    n: usize,
    /// Strictly lower part, row-major.
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
    d: Vec<f64>,
    jacobi: bool,
}

impl IncompleteCholesky {
    pub fn new(s: &SddMatrix) -> Self {
        let n = s.n();
        let mut row_ptr = vec![0usize; n + 1];
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        let mut diag = vec![0.0; n];
        for i in 0..n {
            for (j, v) in s.row(i) {
                if j < i {
                    cols.push(j);
                    vals.push(v);
                } else if j == i {
                    diag[i] = v;
                }
            }
            row_ptr[i + 1] = cols.len();
        }
        let mut d = diag.clone();
        let mut ok = true;
        // Row-oriented IC(0): L(i,j) = (A(i,j) - Σ_k L(i,k) D(k) L(j,k)) / D(j).
        let mut pos = vec![usize::MAX; n];
        'rows: for i in 0..n {
            let (lo, hi) = (row_ptr[i], row_ptr[i + 1]);
            for p in lo..hi {
                pos[cols[p]] = p;
            }
            for p in lo..hi {
                let j = cols[p];
                let mut acc = vals[p];
                for q in row_ptr[j]..row_ptr[j + 1] {
                    let k = cols[q];
                    if pos[k] != usize::MAX && pos[k] < p {
                        acc -= vals[pos[k]] * d[k] * vals[q];
                    }
                }
                vals[p] = acc / d[j];
            }
            let mut piv = diag[i];
            for p in lo..hi {
                piv -= vals[p] * vals[p] * d[cols[p]];
            }
            for p in lo..hi {
                pos[cols[p]] = usize::MAX;
            }
            if !(piv > 0.0) {
                ok = false;
                break 'rows;
            }
            d[i] = piv;
        }
        if !ok {
            return IncompleteCholesky {
                n,
                row_ptr: vec![0; n + 1],
                cols: Vec::new(),
                vals: Vec::new(),
                d: diag.iter().map(|v| if *v > 0.0 { *v } else { 1.0 }).collect(),
                jacobi: true,
            };
        }
        IncompleteCholesky {
            n,
            row_ptr,
            cols,
            vals,
            d,
            jacobi: false,
        }
    }

    pub fn is_jacobi(&self) -> bool {
        self.jacobi
    }

    /// `out = (L D Lᵀ)⁻¹ r`.
    pub fn apply(&self, r: &[f64], out: &mut [f64]) {
        let n = self.n;
        for i in 0..n {
            let mut acc = r[i];
            for p in self.row_ptr[i]..self.row_ptr[i + 1] {
                acc -= self.vals[p] * out[self.cols[p]];
            }
            out[i] = acc;
        }
        for i in 0..n {
            out[i] /= self.d[i];
        }
        for i in (0..n).rev() {
            let xi = out[i];
            for p in self.row_ptr[i]..self.row_ptr[i + 1] {
                out[self.cols[p]] -= self.vals[p] * xi;
            }
        }
    }
}

/// Preconditioned conjugate gradients run from zero on every application.
///
/// The loop stops once `‖r‖² / λ ≤ τ² bᵀx`, where `λ` is the Gershgorin
/// lower bound on the spectrum; this bounds the energy-norm error of the
/// returned solution by `τ` times the energy norm of the exact one.
#[derive(Debug, Clone)]
pub struct PcgOperator {
    matrix: SddMatrix,
    precond: IncompleteCholesky,
    tau: f64,
    lambda_lb: f64,
    max_iter: usize,
}

impl PcgOperator {
    pub fn new(matrix: SddMatrix, tau: f64) -> Result<Self> {
        let (lo, hi) = matrix.gershgorin_bounds();
        if !(lo > 0.0) {
            return Err(IsoError::Precondition(
                "conjugate gradients need a strictly diagonally dominant matrix".into(),
            ));
        }
        let kappa = hi / lo;
        let n = matrix.n();
        let bound = (20.0 * kappa.sqrt() * (1.0 / tau).ln()).ceil();
        let max_iter = if bound.is_finite() { (bound as usize).max(n + 10) } else { usize::MAX };
        let precond = IncompleteCholesky::new(&matrix);
        Ok(PcgOperator {
            matrix,
            precond,
            tau,
            lambda_lb: lo,
            max_iter,
        })
    }

    pub fn max_iterations(&self) -> usize {
        self.max_iter
    }

    /// Solves and returns the iteration count.
    pub fn solve(&self, b: &[f64], x: &mut [f64]) -> Result<usize> {
        let n = self.matrix.n();
        x.iter_mut().for_each(|v| *v = 0.0);
        if b.iter().all(|v| *v == 0.0) {
            return Ok(0);
        }
        let mut r = b.to_vec();
        let mut z = vec![0.0; n];
        self.precond.apply(&r, &mut z);
        let mut p = z.clone();
        let mut ap = vec![0.0; n];
        let mut rz = dot(&r, &z);
        let tau2 = self.tau * self.tau;
        for it in 0..self.max_iter {
            self.matrix.mul_vec_into(&p, &mut ap);
            let pap = dot(&p, &ap);
            if !(pap > 0.0) {
                return Err(IsoError::SolverFailure("conjugate gradients lost positive curvature".into()));
            }
            let alpha = rz / pap;
            for i in 0..n {
                x[i] += alpha * p[i];
                r[i] -= alpha * ap[i];
            }
            let rr = dot(&r, &r);
            if rr / self.lambda_lb <= tau2 * dot(b, x) {
                return Ok(it + 1);
            }
            self.precond.apply(&r, &mut z);
            let rz_new = dot(&r, &z);
            let beta = rz_new / rz;
            rz = rz_new;
            for i in 0..n {
                p[i] = z[i] + beta * p[i];
            }
        }
        Err(IsoError::SolverFailure(format!(
            "conjugate gradients did not converge in {} iterations",
            self.max_iter
        )))
    }
}

impl LinearOperator for PcgOperator {
    fn dim(&self) -> usize {
        self.matrix.n()
    }

    fn apply_into(&self, a: &[f64], out: &mut [f64]) -> Result<()> {
        self.solve(a, out).map(|_| ())
    }
}
