//! Primal path-following interior point method with approximate Newton steps.
//!
//! [`approx_ipm`] is generic over a [`SelfConcordantBarrier`]. It first walks
//! from the starting point toward the analytic center by shrinking the
//! weight `ρ` on the starting gradient, then follows the central path of
//! `η <c, z> + F(z)` by growing `η`. Every Newton step uses an approximate
//! inverse Hessian supplied by the barrier.
//!
//! [`isotonic_ipm`] instantiates it for weighted ℓp isotonic regression and
//! [`long_step_ipm`] is an adaptive variant that multiplies `η` by ten per
//! outer step and recenters with damped Newton steps.

use std::time::Instant;

use crate::barrier::{complexity_parameter, gradient_flat, value_flat, FeasiblePoint};
use crate::error::{IsoError, Result};
use crate::instance::IsoInstance;
use crate::linalg::{dot, HessianSolver, LinearOperator, SddMethod};

/// A barrier together with an approximate inverse Hessian oracle.
pub trait SelfConcordantBarrier {
    fn dim(&self) -> usize;

    /// Barrier value; [`IsoError::Infeasible`] outside the open domain.
    fn value(&self, z: &[f64]) -> Result<f64>;

    fn gradient(&self, z: &[f64], g: &mut [f64]) -> Result<()>;

    /// Builds the approximate inverse Hessian at `z` used by subsequent
    /// calls to [`SelfConcordantBarrier::apply_inverse_hessian`].
    fn prepare(&mut self, z: &[f64]) -> Result<()>;

    fn apply_inverse_hessian(&self, a: &[f64], out: &mut [f64]) -> Result<()>;

    fn contains(&self, z: &[f64]) -> bool {
        self.value(z).is_ok()
    }
}

/// Parameters of [`approx_ipm`].
#[derive(Debug, Clone)]
pub struct IpmConfig {
    /// Complexity parameter of the barrier.
    pub theta: f64,
    /// Lower bound on the symmetry of the starting point.
    pub s: f64,
    /// Upper bound on the objective over the domain.
    pub k: f64,
    /// Target relative error.
    pub epsilon: f64,
    /// Failure probability allowed per inverse Hessian application.
    pub mu: f64,
    /// Objective vector.
    pub c: Vec<f64>,
    /// Keep per-iteration records.
    pub record_trace: bool,
}

impl IpmConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.s > 0.0 && self.s <= 1.0) {
            return Err(IsoError::Precondition(format!("symmetry bound s = {} must lie in (0, 1]", self.s)));
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(IsoError::Precondition(format!("epsilon = {} must lie in (0, 1)", self.epsilon)));
        }
        if !(self.theta >= 1.0 && self.theta.is_finite()) {
            return Err(IsoError::Precondition(format!("theta = {} must be at least 1", self.theta)));
        }
        if !self.k.is_finite() {
            return Err(IsoError::Precondition("value bound K must be finite".into()));
        }
        if !(self.mu > 0.0 && self.mu <= 1.0) {
            return Err(IsoError::Precondition(format!("mu = {} must lie in (0, 1]", self.mu)));
        }
        Ok(())
    }

    /// `⌈20 √θ log(30 θ (1 + 1/s))⌉`
    pub fn phase_one_length(&self) -> usize {
        phase_one_length(self.theta, self.s)
    }

    /// `⌈20 √θ log(66 θ / ε)⌉`
    pub fn phase_two_length(&self) -> usize {
        phase_two_length(self.theta, self.epsilon)
    }
}

pub fn phase_one_length(theta: f64, s: f64) -> usize {
    (20.0 * theta.sqrt() * (30.0 * theta * (1.0 + 1.0 / s)).ln()).ceil() as usize
}

pub fn phase_two_length(theta: f64, epsilon: f64) -> usize {
    (20.0 * theta.sqrt() * (66.0 * theta / epsilon).ln()).ceil() as usize
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phase {
    /// Moving toward the analytic center; the parameter is `ρ`.
    One,
    /// The single step that starts path following; the parameter is `η`.
    Center,
    /// Path following; the parameter is `η`.
    Two,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IpmRecord {
    pub phase: Phase,
    /// `ρ` in phase one, `η` afterwards.
    pub parameter: f64,
    /// Estimated Newton decrement `√(zᵀ M z)` before the step.
    pub decrement_pre: f64,
    /// Same quantity at the new iterate for the same parameter.
    pub decrement_post: f64,
    /// Euclidean length of the step.
    pub step_norm: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct IpmTrace {
    pub records: Vec<IpmRecord>,
    pub t1: usize,
    pub t2: usize,
    /// Phase-two steps actually taken. Phase two ends as soon as the
    /// certified gap is under `εK`, which is usually well before `t2`.
    pub phase_two: usize,
    /// Phase-two steps taken beyond `t2` to bring the certified gap under `εK`.
    pub extra: usize,
    pub final_rho: f64,
    pub final_eta: f64,
    /// Decrement at the returned point for `final_eta`.
    pub final_decrement: f64,
}

impl IpmTrace {
    pub fn iterations(&self) -> usize {
        self.t1 + 1 + self.phase_two
    }

    pub fn max_decrement_pre(&self) -> f64 {
        self.records.iter().map(|r| r.decrement_pre).fold(0.0, f64::max)
    }

    pub fn max_decrement_post(&self) -> f64 {
        self.records.iter().map(|r| r.decrement_post).fold(0.0, f64::max)
    }
}

/// `(6/5) θ / η`, a certified bound on `<c, z> - opt` for a point whose
/// Newton decrement at `η` is at most `1/9`.
pub fn gap_bound(eta: f64, theta: f64, decrement: f64) -> Result<f64> {
    if !(decrement <= 1.0 / 9.0) {
        return Err(IsoError::Precondition(format!(
            "Newton decrement {decrement} exceeds 1/9; the gap bound does not apply"
        )));
    }
    Ok(1.2 * theta / eta)
}

/// Reusable buffers for one path-following run.
struct Walker<'a, B: SelfConcordantBarrier> {
    barrier: &'a mut B,
    /// Direction multiplied by the parameter: `g(x₀)` in phase one, `c` after.
    dir: Vec<f64>,
    x: Vec<f64>,
    g: Vec<f64>,
    /// `M dir` and `M g` at `x`.
    m_dir: Vec<f64>,
    m_g: Vec<f64>,
    z: Vec<f64>,
    step: Vec<f64>,
}

impl<B: SelfConcordantBarrier> Walker<'_, B> {
    /// Moves the cached data to the point `x`.
    fn refresh(&mut self, phase: &'static str, iteration: usize) -> Result<()> {
        let fail = |e: IsoError| match e {
            IsoError::Infeasible(_) => IsoError::InfeasibilityPanic { phase, iteration },
            other => other,
        };
        self.barrier.gradient(&self.x, &mut self.g).map_err(fail)?;
        self.barrier.prepare(&self.x).map_err(fail)?;
        self.barrier.apply_inverse_hessian(&self.dir, &mut self.m_dir)?;
        self.barrier.apply_inverse_hessian(&self.g, &mut self.m_g)?;
        Ok(())
    }

    /// Fills `z = sign·param·dir + g` and `step = M z`, returns `√(zᵀ M z)`.
    fn newton(&mut self, coef: f64) -> f64 {
        for i in 0..self.x.len() {
            self.z[i] = coef * self.dir[i] + self.g[i];
            self.step[i] = coef * self.m_dir[i] + self.m_g[i];
        }
        dot(&self.z, &self.step).max(0.0).sqrt()
    }

    fn decrement(&self, coef: f64) -> f64 {
        let mut acc = 0.0;
        for i in 0..self.x.len() {
            acc += (coef * self.dir[i] + self.g[i]) * (coef * self.m_dir[i] + self.m_g[i]);
        }
        acc.max(0.0).sqrt()
    }

    fn take_step(&mut self) -> f64 {
        let mut norm = 0.0;
        for (x, s) in self.x.iter_mut().zip(&self.step) {
            *x -= s;
            norm += s * s;
        }
        norm.sqrt()
    }
}

/// Runs the two-phase method from the strictly feasible `x0` and returns the
/// final iterate with its trace. Phase two stops once the certified gap is
/// at most `εK`; it may run up to `2 t2` steps to get there.
pub fn approx_ipm<B: SelfConcordantBarrier>(config: &IpmConfig, barrier: &mut B, x0: &[f64]) -> Result<(Vec<f64>, IpmTrace)> {
    config.validate()?;
    let dim = barrier.dim();
    if x0.len() != dim || config.c.len() != dim {
        return Err(IsoError::LengthMismatch {
            left: x0.len().max(config.c.len()),
            right: dim,
        });
    }
    if !barrier.contains(x0) {
        return Err(IsoError::Precondition("starting point is not strictly feasible".into()));
    }
    let theta = config.theta;
    let beta = 1.0 / (20.0 * theta.sqrt());
    let t1 = config.phase_one_length();
    let t2 = config.phase_two_length();
    let mut trace = IpmTrace {
        t1,
        t2,
        ..Default::default()
    };
    let mut g0 = vec![0.0; dim];
    barrier.gradient(x0, &mut g0)?;
    let mut wk = Walker {
        barrier,
        dir: g0,
        x: x0.to_vec(),
        g: vec![0.0; dim],
        m_dir: vec![0.0; dim],
        m_g: vec![0.0; dim],
        z: vec![0.0; dim],
        step: vec![0.0; dim],
    };
    wk.refresh("phase one", 0)?;

    let mut rho = 1.0;
    for i in 1..=t1 {
        rho *= 1.0 - beta;
        let pre = wk.newton(-rho);
        let step_norm = wk.take_step();
        wk.refresh("phase one", i)?;
        let post = wk.decrement(-rho);
        if config.record_trace {
            trace.records.push(IpmRecord {
                phase: Phase::One,
                parameter: rho,
                decrement_pre: pre,
                decrement_post: post,
                step_norm,
            });
        }
    }
    debug_assert!(t1 == 0 || rho <= 1.0 / (30.0 * theta * (1.0 + 1.0 / config.s)) * (1.0 + 1e-9));
    trace.final_rho = rho;

    // Switch the parameterized direction from g(x₀) to c.
    wk.dir.copy_from_slice(&config.c);
    wk.barrier.apply_inverse_hessian(&wk.dir, &mut wk.m_dir)?;
    let alpha = dot(&wk.dir, &wk.m_dir).max(0.0).sqrt();
    if !(alpha > 0.0) {
        return Err(IsoError::Precondition("objective vector has zero local norm".into()));
    }
    let mut eta = 1.0 / (50.0 * alpha);
    let pre = wk.newton(eta);
    let step_norm = wk.take_step();
    wk.refresh("centering", t1 + 1)?;
    let mut post = wk.decrement(eta);
    if config.record_trace {
        trace.records.push(IpmRecord {
            phase: Phase::Center,
            parameter: eta,
            decrement_pre: pre,
            decrement_post: post,
            step_norm,
        });
    }

    let target = config.epsilon * config.k;
    let mut i = 0;
    while i < 2 * t2 && !(post <= 1.0 / 9.0 && 1.2 * theta / eta <= target) {
        i += 1;
        eta *= 1.0 + beta;
        let pre = wk.newton(eta);
        let step_norm = wk.take_step();
        wk.refresh("phase two", t1 + 1 + i)?;
        post = wk.decrement(eta);
        if config.record_trace {
            trace.records.push(IpmRecord {
                phase: Phase::Two,
                parameter: eta,
                decrement_pre: pre,
                decrement_post: post,
                step_norm,
            });
        }
    }
    trace.phase_two = i;
    trace.extra = i.saturating_sub(t2);
    trace.final_eta = eta;
    trace.final_decrement = post;
    Ok((wk.x, trace))
}

/// The isotonic barrier with its Hessian solver; `z = (x, t)`.
pub struct IsotonicBarrier<'a> {
    inst: &'a IsoInstance,
    k: f64,
    solver: HessianSolver,
}

impl<'a> IsotonicBarrier<'a> {
    pub fn new(inst: &'a IsoInstance, k: f64, method: SddMethod, tau: f64) -> Result<Self> {
        Ok(IsotonicBarrier {
            inst,
            k,
            solver: HessianSolver::new(inst, method, tau)?,
        })
    }

    pub fn solver(&self) -> &HessianSolver {
        &self.solver
    }
}

impl SelfConcordantBarrier for IsotonicBarrier<'_> {
    fn dim(&self) -> usize {
        2 * self.inst.n()
    }

    fn value(&self, z: &[f64]) -> Result<f64> {
        value_flat(self.inst, self.k, z)
    }

    fn gradient(&self, z: &[f64], g: &mut [f64]) -> Result<()> {
        gradient_flat(self.inst, self.k, z, g)
    }

    fn prepare(&mut self, z: &[f64]) -> Result<()> {
        self.solver.update(self.inst, self.k, z)
    }

    fn apply_inverse_hessian(&self, a: &[f64], out: &mut [f64]) -> Result<()> {
        self.solver.apply_into(a, out)
    }
}

/// Starting point: `x₀` spreads the vertices over `(0, 1]` by topological
/// rank and `t₀ = |x₀ - y|^p + 1`.
pub fn good_start(inst: &IsoInstance) -> FeasiblePoint {
    let n = inst.n();
    let rank = &inst.dag().topo().rank;
    let p = inst.p();
    let x: Vec<f64> = (0..n).map(|v| (rank[v] + 1) as f64 / n as f64).collect();
    let t = x.iter().zip(inst.y()).map(|(a, b)| (a - b).abs().powf(p) + 1.0).collect();
    FeasiblePoint::new(x, t)
}

/// `3 n w_max^p`
pub fn value_bound(inst: &IsoInstance) -> f64 {
    3.0 * inst.n() as f64 * inst.wp_max()
}

/// `1 / (18 n² p w_max^p)`
pub fn symmetry_bound(inst: &IsoInstance) -> f64 {
    let n = inst.n() as f64;
    1.0 / (18.0 * n * n * inst.p() * inst.wp_max())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IpmMode {
    ShortStep,
    LongStep,
}

impl IpmMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            IpmMode::ShortStep => "short",
            IpmMode::LongStep => "long",
        }
    }
}

/// Tuning knobs shared by both modes.
#[derive(Debug, Clone)]
pub struct IpmOptions {
    pub method: SddMethod,
    /// Accuracy of the conjugate gradient Schur solve.
    pub tau: f64,
    pub record_trace: bool,
    /// Long-step mode also stops once both the gap bound and the objective's
    /// excess over the certified lower bound are below this fraction of that
    /// lower bound.
    pub relative_tolerance: Option<f64>,
}

impl Default for IpmOptions {
    fn default() -> Self {
        IpmOptions {
            method: SddMethod::Auto,
            tau: 1e-2,
            record_trace: false,
            relative_tolerance: None,
        }
    }
}

/// Outcome of an isotonic solve, in the caller's units.
#[derive(Debug, Clone)]
pub struct SolveReport {
    pub x: Vec<f64>,
    /// `Σ w^p |x - y|^p`
    pub objective: f64,
    /// Certified bound on `objective - opt`.
    pub gap_bound: f64,
    /// Certified lower bound on the optimum.
    pub lower_bound: f64,
    /// Certified bound on `(objective - opt) / opt`; infinite when the lower
    /// bound is zero.
    pub relative_gap: f64,
    pub mode: IpmMode,
    /// Total Newton steps.
    pub iterations: usize,
    pub phase_one_iterations: usize,
    pub phase_two_iterations: usize,
    pub extra_iterations: usize,
    /// Outer (η-increase) steps of the long-step mode.
    pub outer_iterations: usize,
    /// The long-step mode gave up and reran the short-step method.
    pub fell_back: bool,
    pub seconds: f64,
    pub trace: Option<IpmTrace>,
}

struct Internal {
    z: Vec<f64>,
    gap: f64,
}

fn internal_delta(inst: &IsoInstance, delta: f64) -> Result<f64> {
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(IsoError::Precondition(format!("delta = {delta} must be positive and finite")));
    }
    Ok(delta / inst.objective_scale())
}

fn objective_vector(inst: &IsoInstance) -> Vec<f64> {
    let n = inst.n();
    let mut c = vec![0.0; 2 * n];
    c[n..].copy_from_slice(inst.wp());
    c
}

fn finish(inst: &IsoInstance, internal: Internal, start: Instant, mode: IpmMode) -> SolveReport {
    let n = inst.n();
    let scale = inst.objective_scale();
    let x = inst.to_raw_x(&internal.z[..n]);
    let objective = inst.raw_objective(&x);
    let c_value = dot(inst.wp(), &internal.z[n..]) * scale;
    let gap = internal.gap * scale;
    let lower = (c_value - gap).max(0.0);
    let relative_gap = if lower > 0.0 { (objective - lower).max(0.0) / lower } else { f64::INFINITY };
    SolveReport {
        x,
        objective,
        gap_bound: gap,
        lower_bound: lower,
        relative_gap,
        mode,
        iterations: 0,
        phase_one_iterations: 0,
        phase_two_iterations: 0,
        extra_iterations: 0,
        outer_iterations: 0,
        fell_back: false,
        seconds: start.elapsed().as_secs_f64(),
        trace: None,
    }
}

/// Weighted ℓp isotonic regression to additive accuracy `delta` (caller's
/// units) with the short-step method.
pub fn isotonic_ipm(inst: &IsoInstance, delta: f64) -> Result<SolveReport> {
    isotonic_ipm_with(inst, delta, &IpmOptions::default())
}

pub fn isotonic_ipm_with(inst: &IsoInstance, delta: f64, opts: &IpmOptions) -> Result<SolveReport> {
    let start = Instant::now();
    let delta_int = internal_delta(inst, delta)?;
    let k = value_bound(inst);
    let n = inst.n() as f64;
    let config = IpmConfig {
        theta: complexity_parameter(inst),
        s: symmetry_bound(inst),
        k,
        epsilon: (delta_int / k).min(0.5),
        mu: 1.0 / (n * n * n),
        c: objective_vector(inst),
        record_trace: opts.record_trace,
    };
    let mut barrier = IsotonicBarrier::new(inst, k, opts.method, opts.tau)?;
    let x0 = good_start(inst).to_vec();
    let (z, trace) = approx_ipm(&config, &mut barrier, &x0)?;
    let gap = gap_bound(trace.final_eta, config.theta, trace.final_decrement)?;
    if gap > config.epsilon * k * (1.0 + 1e-12) {
        return Err(IsoError::SolverFailure(format!(
            "certified gap {gap} above target {} after {} extra steps",
            config.epsilon * k,
            trace.extra
        )));
    }
    let mut report = finish(inst, Internal { z, gap }, start, IpmMode::ShortStep);
    report.phase_one_iterations = trace.t1;
    report.phase_two_iterations = trace.phase_two;
    report.extra_iterations = trace.extra;
    report.iterations = trace.iterations();
    if opts.record_trace {
        report.trace = Some(trace);
    }
    Ok(report)
}

const LONG_STEP_MAX_OUTER: usize = 50;
const LONG_STEP_MAX_NEWTON: usize = 200;
const LONG_STEP_GROWTH: f64 = 10.0;

enum LongStep {
    Done { internal: Internal, outer: usize, newton: usize },
    Stalled,
}

/// Same contract as [`isotonic_ipm`] with adaptive steps: `η` grows tenfold
/// per outer step and the iterate is recentered by damped Newton steps with
/// a backtracking line search. Falls back to the short-step method if the
/// certified gap stalls.
pub fn long_step_ipm(inst: &IsoInstance, delta: f64) -> Result<SolveReport> {
    long_step_ipm_with(inst, delta, &IpmOptions::default())
}

pub fn long_step_ipm_with(inst: &IsoInstance, delta: f64, opts: &IpmOptions) -> Result<SolveReport> {
    let start = Instant::now();
    let delta_int = internal_delta(inst, delta)?;
    match long_step_core(inst, delta_int, opts)? {
        LongStep::Done { internal, outer, newton } => {
            let mut report = finish(inst, internal, start, IpmMode::LongStep);
            report.outer_iterations = outer;
            report.iterations = newton;
            Ok(report)
        }
        LongStep::Stalled => {
            let mut report = isotonic_ipm_with(inst, delta, opts)?;
            report.fell_back = true;
            report.mode = IpmMode::LongStep;
            report.seconds = start.elapsed().as_secs_f64();
            Ok(report)
        }
    }
}

fn long_step_core(inst: &IsoInstance, delta_int: f64, opts: &IpmOptions) -> Result<LongStep> {
    let n = inst.n();
    let dim = 2 * n;
    let k = value_bound(inst);
    let theta = complexity_parameter(inst);
    let c = objective_vector(inst);
    let mut barrier = IsotonicBarrier::new(inst, k, opts.method, opts.tau)?;
    let mut z = good_start(inst).to_vec();
    let mut g = vec![0.0; dim];
    let mut d = vec![0.0; dim];
    let mut step = vec![0.0; dim];
    let mut trial = vec![0.0; dim];

    barrier.prepare(&z)?;
    barrier.apply_inverse_hessian(&c, &mut step)?;
    let mut eta = 1.0 / (50.0 * dot(&c, &step).sqrt());
    let mut newton = 0;
    let mut best_gap = f64::INFINITY;
    let mut since_best = 0;

    for outer in 1..=LONG_STEP_MAX_OUTER {
        // Recenter on η <c, z> + F(z).
        let mut lambda;
        let mut inner = 0;
        loop {
            barrier.gradient(&z, &mut g)?;
            barrier.prepare(&z)?;
            for i in 0..dim {
                d[i] = eta * c[i] + g[i];
            }
            barrier.apply_inverse_hessian(&d, &mut step)?;
            lambda = dot(&d, &step).max(0.0).sqrt();
            if lambda <= 1.0 / 9.0 {
                break;
            }
            inner += 1;
            if inner > LONG_STEP_MAX_NEWTON {
                return Ok(LongStep::Stalled);
            }
            let phi = eta * dot(&c, &z) + barrier.value(&z)?;
            // Backtrack from the full step. The certificate is checked
            // afterwards, so the step rule only affects speed.
            let mut tau = 1.0;
            let mut accepted = false;
            for _ in 0..60 {
                for i in 0..dim {
                    trial[i] = z[i] - tau * step[i];
                }
                if let Ok(v) = barrier.value(&trial) {
                    let phi_new = eta * dot(&c, &trial) + v;
                    let slack = 1e-12 * (phi.abs() + 1.0);
                    if phi_new <= phi - 1e-4 * tau * lambda * lambda + slack {
                        accepted = true;
                        break;
                    }
                }
                tau *= 0.5;
            }
            if !accepted {
                return Ok(LongStep::Stalled);
            }
            std::mem::swap(&mut z, &mut trial);
            newton += 1;
        }
        let gap = gap_bound(eta, theta, lambda)?;
        if gap <= delta_int {
            return Ok(LongStep::Done {
                internal: Internal { z, gap },
                outer,
                newton,
            });
        }
        if let Some(rel) = opts.relative_tolerance {
            let x_obj = inst.normalized_objective(&z[..n]);
            let lower = dot(&c, &z) - gap;
            if lower > 0.0 && gap <= rel * lower && x_obj - lower <= rel * lower {
                return Ok(LongStep::Done {
                    internal: Internal { z, gap },
                    outer,
                    newton,
                });
            }
        }
        if gap < best_gap {
            best_gap = gap;
            since_best = 0;
        } else {
            since_best += 1;
            if since_best >= LONG_STEP_MAX_OUTER {
                break;
            }
        }
        eta *= LONG_STEP_GROWTH;
    }
    Ok(LongStep::Stalled)
}
