use std::cell::RefCell;

use super::ldl::{LdlFactor, SymbolicLdl};
use super::{dot, LinearOperator, PcgOperator, SddMatrix, SddMethod};
use crate::barrier::{hessian_blocks_into, FeasiblePoint, HessianBlocks};
use crate::dag::Dag;
use crate::error::{IsoError, Result};
use crate::instance::IsoInstance;

/// Symbolic data for the Schur complement `S = L_E + diag(R - C²/T)` of a
/// fixed graph: the sparsity pattern, its elimination order and the slot of
/// every edge and diagonal entry. Built once per graph and refactored
/// numerically at every iterate.
#[derive(Debug, Clone)]
pub struct SchurSystem {
    symbolic: SymbolicLdl,
    diag_slot: Vec<usize>,
    edge_slot: Vec<usize>,
    values: Vec<f64>,
}

impl SchurSystem {
    pub fn new(dag: &Dag) -> Self {
        let symbolic = SymbolicLdl::analyze(&dag.undirected_neighbors());
        let diag_slot = (0..dag.n()).map(|v| symbolic.slot(v, v)).collect();
        let edge_slot = dag.edges().iter().map(|e| symbolic.slot(e.tail, e.head)).collect();
        SchurSystem {
            values: vec![0.0; symbolic.pattern_len()],
            symbolic,
            diag_slot,
            edge_slot,
        }
    }

    pub fn factor_nnz(&self) -> usize {
        self.symbolic.factor_nnz()
    }

    fn fill(&mut self, dag: &Dag, blocks: &HessianBlocks) {
        self.values.iter_mut().for_each(|v| *v = 0.0);
        for v in 0..dag.n() {
            self.values[self.diag_slot[v]] = blocks.schur[v];
        }
        for (i, e) in dag.edges().iter().enumerate() {
            let w = blocks.r_edge[i];
            self.values[self.diag_slot[e.tail]] += w;
            self.values[self.diag_slot[e.head]] += w;
            self.values[self.edge_slot[i]] -= w;
        }
    }
}

fn schur_matrix(dag: &Dag, blocks: &HessianBlocks) -> SddMatrix {
    let mut t = Vec::with_capacity(dag.n() + 4 * dag.m());
    for v in 0..dag.n() {
        t.push((v, v, blocks.schur[v]));
    }
    for (i, e) in dag.edges().iter().enumerate() {
        let w = blocks.r_edge[i];
        t.push((e.tail, e.tail, w));
        t.push((e.head, e.head, w));
        t.push((e.tail, e.head, -w));
        t.push((e.head, e.tail, -w));
    }
    SddMatrix::from_triplets(dag.n(), &t)
}

#[derive(Debug, Clone)]
enum SchurInverse {
    Empty,
    Ldl(LdlFactor),
    Pcg(PcgOperator),
}

#[derive(Debug, Clone)]
struct Scratch {
    p: Vec<f64>,
    rhs: Vec<f64>,
    q: Vec<f64>,
    ldl: Vec<f64>,
}

/// Approximate inverse of the full barrier Hessian at one iterate.
///
/// The cone and edge barriers give a Hessian whose t-block is diagonal and
/// whose x-block is a weighted Laplacian plus a diagonal; eliminating `t`
/// leaves an SDD Schur complement. The value-bound barrier adds the rank-one
/// term `u uᵀ` with `u = (0, w^p) / (K - <w^p, t>)`, handled by a
/// Sherman–Morrison correction.
///
/// Vectors use the `(x, t)` layout of [`FeasiblePoint::to_vec`]. A solver is
/// reused across iterates of the same instance through [`HessianSolver::update`],
/// which keeps the symbolic factorization.
#[derive(Debug, Clone)]
pub struct HessianSolver {
    n: usize,
    method: SddMethod,
    tau: f64,
    schur: SchurSystem,
    blocks: HessianBlocks,
    t_inv: Vec<f64>,
    inverse: SchurInverse,
    u: Vec<f64>,
    w: Vec<f64>,
    denom: f64,
    scratch: RefCell<Scratch>,
}

impl HessianSolver {
    /// `tau` is only used by the conjugate gradient realization.
    pub fn new(inst: &IsoInstance, method: SddMethod, tau: f64) -> Result<Self> {
        if method == SddMethod::Pcg && !(tau > 0.0 && tau < 1.0) {
            return Err(IsoError::Precondition(format!("tau = {tau} must lie in (0, 1)")));
        }
        let n = inst.n();
        let m = inst.m();
        let schur = SchurSystem::new(inst.dag());
        let method = match method {
            SddMethod::Auto if !(tau > 0.0 && tau < 1.0) => SddMethod::Cholesky,
            other => other.resolve(n, m, schur.factor_nnz()),
        };
        Ok(HessianSolver {
            n,
            method,
            tau,
            schur,
            blocks: HessianBlocks {
                t_diag: vec![0.0; n],
                r_hat: vec![0.0; n],
                schur: vec![0.0; n],
                r_edge: vec![0.0; m],
                coupling: vec![0.0; n],
                r: vec![0.0; m + n],
            },
            t_inv: vec![0.0; n],
            inverse: SchurInverse::Empty,
            u: vec![0.0; 2 * n],
            w: vec![0.0; 2 * n],
            denom: 1.0,
            scratch: RefCell::new(Scratch {
                p: vec![0.0; n],
                rhs: vec![0.0; n],
                q: vec![0.0; n],
                ldl: vec![0.0; n],
            }),
        })
    }

    /// Refactors at the interior point `z = (x, t)`.
    pub fn update(&mut self, inst: &IsoInstance, k: f64, z: &[f64]) -> Result<()> {
        let n = self.n;
        hessian_blocks_into(inst, k, z, &mut self.blocks)?;
        for v in 0..n {
            self.t_inv[v] = 1.0 / self.blocks.t_diag[v];
        }
        match self.method {
            SddMethod::Auto | SddMethod::Cholesky => {
                self.schur.fill(inst.dag(), &self.blocks);
                let sym = &self.schur.symbolic;
                match &mut self.inverse {
                    SchurInverse::Ldl(f) => sym.refactor(&self.schur.values, f)?,
                    other => *other = SchurInverse::Ldl(sym.factor(&self.schur.values)?),
                }
            }
            SddMethod::Pcg => {
                let s = schur_matrix(inst.dag(), &self.blocks);
                self.inverse = SchurInverse::Pcg(PcgOperator::new(s, self.tau)?);
            }
        }
        let slack = k - dot(inst.wp(), &z[n..]);
        self.u[..n].iter_mut().for_each(|v| *v = 0.0);
        for (u, wp) in self.u[n..].iter_mut().zip(inst.wp()) {
            *u = wp / slack;
        }
        let mut w = std::mem::take(&mut self.w);
        let res = self.apply_block(&self.u, &mut w);
        self.w = w;
        res?;
        self.denom = 1.0 + dot(&self.u, &self.w);
        Ok(())
    }

    /// Hessian blocks at the last point passed to [`HessianSolver::update`].
    pub fn blocks(&self) -> &HessianBlocks {
        &self.blocks
    }

    /// The rank-one direction `u` of the value-bound barrier.
    pub fn rank_one_direction(&self) -> &[f64] {
        &self.u
    }

    /// Schur complement at the current point as an explicit matrix.
    pub fn schur_matrix(&self, dag: &Dag) -> SddMatrix {
        schur_matrix(dag, &self.blocks)
    }

    fn solve_schur(&self, b: &[f64], out: &mut [f64], work: &mut [f64]) -> Result<()> {
        match &self.inverse {
            SchurInverse::Empty => Err(IsoError::Precondition("solver used before update".into())),
            SchurInverse::Ldl(f) => {
                self.schur.symbolic.solve(f, b, out, work);
                Ok(())
            }
            SchurInverse::Pcg(op) => op.solve(b, out).map(|_| ()),
        }
    }

    /// Inverse of the cone and edge part of the Hessian (no rank-one term).
    pub fn apply_block(&self, a: &[f64], out: &mut [f64]) -> Result<()> {
        let n = self.n;
        let mut guard = self.scratch.borrow_mut();
        let Scratch { p, rhs, q, ldl } = &mut *guard;
        let (ax, at) = a.split_at(n);
        let c = &self.blocks.coupling;
        for v in 0..n {
            p[v] = self.t_inv[v] * at[v];
            rhs[v] = ax[v] - c[v] * p[v];
        }
        self.solve_schur(rhs, q, ldl)?;
        let (ox, ot) = out.split_at_mut(n);
        for v in 0..n {
            ot[v] = p[v] - self.t_inv[v] * c[v] * q[v];
            ox[v] = q[v];
        }
        Ok(())
    }
}

impl LinearOperator for HessianSolver {
    fn dim(&self) -> usize {
        2 * self.n
    }

    fn apply_into(&self, a: &[f64], out: &mut [f64]) -> Result<()> {
        self.apply_block(a, out)?;
        let coef = dot(&self.w, a) / self.denom;
        for (o, w) in out.iter_mut().zip(&self.w) {
            *o -= coef * w;
        }
        Ok(())
    }
}

/// The block part of a [`HessianSolver`] as a standalone operator.
#[derive(Debug, Clone)]
pub struct BlockSolveOperator(HessianSolver);

impl BlockSolveOperator {
    pub fn solver(&self) -> &HessianSolver {
        &self.0
    }
}

impl LinearOperator for BlockSolveOperator {
    fn dim(&self) -> usize {
        2 * self.0.n
    }

    fn apply_into(&self, a: &[f64], out: &mut [f64]) -> Result<()> {
        self.0.apply_block(a, out)
    }
}

fn check_mu(mu: f64) -> Result<()> {
    if mu > 0.0 && mu <= 1.0 {
        Ok(())
    } else {
        Err(IsoError::Precondition(format!("mu = {mu} must lie in (0, 1]")))
    }
}

/// Operator approximating the inverse of the cone and edge Hessian at `point`.
/// `tau = 0` asks for a direct solve; any `tau` in `[0, 1)` is met by the
/// exact factorization used here.
pub fn block_solve(inst: &IsoInstance, k: f64, point: &FeasiblePoint, mu: f64, tau: f64) -> Result<BlockSolveOperator> {
    check_mu(mu)?;
    if !(0.0..1.0).contains(&tau) {
        return Err(IsoError::Precondition(format!("tau = {tau} must lie in [0, 1)")));
    }
    let mut s = HessianSolver::new(inst, SddMethod::Cholesky, tau)?;
    s.update(inst, k, &point.to_vec())?;
    Ok(BlockSolveOperator(s))
}

/// Operator approximating the inverse of the full barrier Hessian at `point`.
pub fn hessian_solve_operator(inst: &IsoInstance, k: f64, point: &FeasiblePoint, mu: f64) -> Result<HessianSolver> {
    check_mu(mu)?;
    let mut s = HessianSolver::new(inst, SddMethod::Cholesky, 0.0)?;
    s.update(inst, k, &point.to_vec())?;
    Ok(s)
}

/// `H⁻¹ a` for the full barrier Hessian `H` at `point`.
pub fn hessian_solve(inst: &IsoInstance, k: f64, point: &FeasiblePoint, mu: f64, a: &[f64]) -> Result<Vec<f64>> {
    if a.len() != 2 * inst.n() {
        return Err(IsoError::LengthMismatch {
            left: a.len(),
            right: 2 * inst.n(),
        });
    }
    hessian_solve_operator(inst, k, point, mu)?.apply(a)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diamond() -> (IsoInstance, FeasiblePoint) {
        let dag = Dag::from_pairs(4, &[(0, 1), (0, 2), (1, 3), (2, 3)]).unwrap();
        let inst = IsoInstance::new(dag, vec![0.9, 0.1, 0.6, 0.3], vec![1.0, 2.0, 1.5, 1.0], 1.5).unwrap();
        let x = vec![0.1, 0.4, 0.5, 0.9];
        let t: Vec<f64> = x.iter().zip(inst.y()).map(|(a, b): (&f64, &f64)| (a - b).abs().powf(1.5) + 0.7).collect();
        (inst, FeasiblePoint::new(x, t))
    }

    #[test]
    fn direct_and_pcg_agree() {
        let (inst, pt) = diamond();
        let k = 50.0;
        let z = pt.to_vec();
        let mut a = HessianSolver::new(&inst, SddMethod::Cholesky, 0.0).unwrap();
        a.update(&inst, k, &z).unwrap();
        let mut b = HessianSolver::new(&inst, SddMethod::Pcg, 1e-10).unwrap();
        b.update(&inst, k, &z).unwrap();
        let rhs: Vec<f64> = (0..8).map(|i| (i as f64) - 3.5).collect();
        let u = a.apply(&rhs).unwrap();
        let v = b.apply(&rhs).unwrap();
        for (x, y) in u.iter().zip(&v) {
            assert!((x - y).abs() < 1e-6 * (1.0 + x.abs()));
        }
    }

    #[test]
    fn schur_complement_is_sdd() {
        let (inst, pt) = diamond();
        let op = block_solve(&inst, 50.0, &pt, 0.1, 0.0).unwrap();
        let s = op.solver().schur_matrix(inst.dag());
        assert!(s.is_symmetric(0.0));
        assert!(s.is_diagonally_dominant());
    }

    #[test]
    fn infeasible_point_is_rejected() {
        let (inst, mut pt) = diamond();
        pt.x[1] = pt.x[0];
        assert!(matches!(block_solve(&inst, 50.0, &pt, 0.1, 0.0), Err(IsoError::Infeasible(_))));
    }
}
