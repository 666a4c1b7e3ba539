//! One solve from parsed inputs to a JSON report.

use std::str::FromStr;
use std::time::Instant;

use dagiso::linalg::SddMethod;
use dagiso::reduction::{isotonic_inf_with_rng, isotonic_strict_with_rng, weighted_inf_error};
use dagiso::{isotonic_ipm_with, long_step_ipm_with, InfVariant, IpmMode, IpmOptions, IsoInstance};
use rand::rngs::StdRng;
use rand::SeedableRng;
use serde::{Deserialize, Serialize};

use crate::error::{BenchError, Result};
use crate::io::InstanceData;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Norm {
    P(f64),
    Inf,
    Strict,
}

impl FromStr for Norm {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "inf" => Ok(Norm::Inf),
            "strict" => Ok(Norm::Strict),
            _ => match s.parse::<f64>() {
                Ok(p) if p.is_finite() && p >= 1.0 => Ok(Norm::P(p)),
                _ => Err(BenchError::Usage(format!("norm must be a real p >= 1, `inf` or `strict`, got `{s}`"))),
            },
        }
    }
}

impl std::fmt::Display for Norm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Norm::P(p) => write!(f, "{p}"),
            Norm::Inf => f.write_str("inf"),
            Norm::Strict => f.write_str("strict"),
        }
    }
}

pub fn parse_variant(s: &str) -> Result<InfVariant> {
    match s {
        "avg" => Ok(InfVariant::Avg),
        "min" => Ok(InfVariant::Min),
        "max" => Ok(InfVariant::Max),
        _ => Err(BenchError::Usage(format!("variant must be avg, min or max, got `{s}`"))),
    }
}

pub fn parse_mode(s: &str) -> Result<IpmMode> {
    match s {
        "short" => Ok(IpmMode::ShortStep),
        "long" => Ok(IpmMode::LongStep),
        _ => Err(BenchError::Usage(format!("mode must be short or long, got `{s}`"))),
    }
}

pub fn parse_solver(s: &str) -> Result<SddMethod> {
    match s {
        "auto" => Ok(SddMethod::Auto),
        "cholesky" => Ok(SddMethod::Cholesky),
        "pcg" => Ok(SddMethod::Pcg),
        _ => Err(BenchError::Usage(format!("solver must be auto, cholesky or pcg, got `{s}`"))),
    }
}

#[derive(Debug, Clone)]
pub struct FitOptions {
    pub norm: Norm,
    pub variant: InfVariant,
    pub delta: f64,
    pub mode: IpmMode,
    /// Realization of the Laplacian solves inside the ℓp solver.
    pub solver: SddMethod,
    pub seed: u64,
}

impl Default for FitOptions {
    fn default() -> Self {
        FitOptions {
            norm: Norm::P(2.0),
            variant: InfVariant::Avg,
            delta: 1e-6,
            mode: IpmMode::LongStep,
            solver: SddMethod::Auto,
            seed: 0,
        }
    }
}

/// JSON report of a fit. Fields that do not apply to the chosen norm are
/// `null`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    pub schema_version: u32,
    pub norm: String,
    pub n: usize,
    pub m: usize,
    pub x: Vec<f64>,
    /// `Σ w^p |x - y|^p` for finite `p`, otherwise `max w |x - y|`.
    pub objective: f64,
    pub gap_bound: Option<f64>,
    pub lower_bound: Option<f64>,
    /// Optimal largest weighted error (ℓ∞ and strict).
    pub alpha: Option<f64>,
    pub mode: Option<String>,
    pub variant: Option<String>,
    pub iterations: Option<usize>,
    pub outer_iterations: Option<usize>,
    pub fell_back: Option<bool>,
    pub seconds: f64,
    pub seed: u64,
}

fn variant_name(v: InfVariant) -> &'static str {
    match v {
        InfVariant::Avg => "avg",
        InfVariant::Min => "min",
        InfVariant::Max => "max",
    }
}

pub fn run_fit(data: &InstanceData, opts: &FitOptions) -> Result<FitReport> {
    let start = Instant::now();
    let mut report = FitReport {
        schema_version: SCHEMA_VERSION,
        norm: opts.norm.to_string(),
        n: data.dag.n(),
        m: data.dag.m(),
        x: vec![],
        objective: 0.0,
        gap_bound: None,
        lower_bound: None,
        alpha: None,
        mode: None,
        variant: None,
        iterations: None,
        outer_iterations: None,
        fell_back: None,
        seconds: 0.0,
        seed: opts.seed,
    };
    let mut rng = StdRng::seed_from_u64(opts.seed);
    match opts.norm {
        Norm::P(p) => {
            let inst = IsoInstance::new(data.dag.clone(), data.y.clone(), data.w.clone(), p)?;
            let ipm = IpmOptions {
                method: opts.solver,
                ..IpmOptions::default()
            };
            let rep = match opts.mode {
                IpmMode::ShortStep => isotonic_ipm_with(&inst, opts.delta, &ipm)?,
                IpmMode::LongStep => long_step_ipm_with(&inst, opts.delta, &ipm)?,
            };
            report.objective = rep.objective;
            report.gap_bound = Some(rep.gap_bound);
            report.lower_bound = Some(rep.lower_bound);
            report.mode = Some(rep.mode.as_str().to_string());
            report.iterations = Some(rep.iterations);
            report.outer_iterations = Some(rep.outer_iterations);
            report.fell_back = Some(rep.fell_back);
            report.x = rep.x;
        }
        Norm::Inf => {
            let r = isotonic_inf_with_rng(&data.dag, &data.y, &data.w, opts.variant, &mut rng)?;
            report.objective = r.error;
            report.alpha = Some(r.error);
            report.variant = Some(variant_name(opts.variant).to_string());
            report.x = r.x;
        }
        Norm::Strict => {
            let x = isotonic_strict_with_rng(&data.dag, &data.y, &data.w, &mut rng)?;
            let err = weighted_inf_error(&x, &data.y, &data.w);
            report.objective = err;
            report.alpha = Some(err);
            report.x = x;
        }
    }
    report.seconds = start.elapsed().as_secs_f64();
    Ok(report)
}
