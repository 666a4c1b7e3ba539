//! Timing runs over generated families, written as CSV.

use std::io::Write;
use std::str::FromStr;

use dagiso::linalg::SddMethod;
use dagiso::{isotonic_ipm_with, long_step_ipm_with, IpmMode, IpmOptions, IsoInstance};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{BenchError, Result};
use crate::gen::{gen_grid2d, gen_random_regular, noisy_observations};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Grid2d,
    RandomRegular,
}

impl Family {
    pub fn as_str(self) -> &'static str {
        match self {
            Family::Grid2d => "grid2d",
            Family::RandomRegular => "random-regular",
        }
    }
}

impl FromStr for Family {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "grid2d" => Ok(Family::Grid2d),
            "random-regular" => Ok(Family::RandomRegular),
            _ => Err(BenchError::Usage(format!("family must be grid2d or random-regular, got `{s}`"))),
        }
    }
}

/// Sizes are grid sides for `grid2d` and vertex counts for `random-regular`.
#[derive(Debug, Clone)]
pub struct BenchSpec {
    pub family: Family,
    pub sizes: Vec<usize>,
    pub sigma: f64,
    pub trials: usize,
    pub seed: u64,
    pub p: f64,
    pub mode: IpmMode,
    pub delta: f64,
    /// Relative-error stop for the long-step mode.
    pub relative_tolerance: Option<f64>,
    pub degree: usize,
    pub solver: SddMethod,
}

impl BenchSpec {
    pub fn new(family: Family, sizes: Vec<usize>, sigma: f64, trials: usize) -> Self {
        BenchSpec {
            family,
            sizes,
            sigma,
            trials,
            seed: 0,
            p: 2.0,
            mode: IpmMode::LongStep,
            delta: 1e-6,
            relative_tolerance: Some(1e-3),
            degree: 4,
            solver: SddMethod::Auto,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(BenchError::Usage(m));
        if self.sizes.is_empty() || self.sizes.contains(&0) {
            return bad("sizes must be positive".into());
        }
        if self.trials == 0 {
            return bad("trials must be at least 1".into());
        }
        if !(self.sigma >= 0.0 && self.sigma.is_finite()) {
            return bad(format!("sigma must be finite and non-negative, got {}", self.sigma));
        }
        if !(self.p >= 1.0 && self.p.is_finite()) {
            return bad(format!("p must be a finite real >= 1, got {}", self.p));
        }
        if self.family == Family::RandomRegular {
            for &n in &self.sizes {
                if !(n * self.degree).is_multiple_of(2) || self.degree >= n {
                    return bad(format!("no simple {}-regular graph on {n} vertices", self.degree));
                }
            }
        }
        Ok(())
    }
}

/// One CSV data row. `objective`, `seconds` and `relerr` are empty when
/// `status` is an error code.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRow {
    pub family: &'static str,
    pub n: usize,
    pub m: usize,
    pub sigma: f64,
    pub trial: usize,
    pub mode: &'static str,
    pub seconds: Option<f64>,
    pub objective: Option<f64>,
    pub relerr: Option<f64>,
    pub status: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryRow {
    pub family: &'static str,
    pub n: usize,
    pub m: usize,
    pub sigma: f64,
    pub mode: &'static str,
    pub trials: usize,
    pub ok: usize,
    pub mean_seconds: f64,
    pub std_seconds: f64,
    pub max_relerr: f64,
}

/// `gap_bound / max(objective, delta)`.
///
/// Noisy data that happens to be isotonic already has an optimum of zero, and
/// the solver then stops on the absolute bound `delta`; the floor keeps the
/// ratio finite there.
pub fn relative_error(gap: f64, objective: f64, delta: f64) -> f64 {
    let denom = objective.max(delta);
    if denom > 0.0 {
        gap / denom
    } else if gap == 0.0 {
        0.0
    } else {
        f64::INFINITY
    }
}

/// Independent stream per trial.
fn trial_rng(seed: u64, family: Family, size: usize, trial: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream((family as u64) << 56 ^ (size as u64) << 20 ^ trial as u64);
    rng
}

pub fn run_trial(spec: &BenchSpec, size: usize, trial: usize) -> BenchRow {
    let mut rng = trial_rng(spec.seed, spec.family, size, trial);
    let (dag, y) = match spec.family {
        Family::Grid2d => gen_grid2d(size, spec.sigma, &mut rng),
        Family::RandomRegular => {
            let dag = gen_random_regular(size, spec.degree, &mut rng);
            let y = noisy_observations(&dag, spec.sigma, &mut rng);
            (dag, y)
        }
    };
    let (n, m) = (dag.n(), dag.m());
    let mut row = BenchRow {
        family: spec.family.as_str(),
        n,
        m,
        sigma: spec.sigma,
        trial,
        mode: spec.mode.as_str(),
        seconds: None,
        objective: None,
        relerr: None,
        status: "ok".into(),
    };
    let opts = IpmOptions {
        relative_tolerance: spec.relative_tolerance,
        method: spec.solver,
        ..IpmOptions::default()
    };
    // With a relative stop, an optimum below `delta` still needs its gap
    // reported as a small fraction of `delta`.
    let target = match (spec.mode, spec.relative_tolerance) {
        (IpmMode::LongStep, Some(rel)) => spec.delta * rel,
        _ => spec.delta,
    };
    let result = IsoInstance::unweighted(dag, y, spec.p).and_then(|inst| match spec.mode {
        IpmMode::ShortStep => isotonic_ipm_with(&inst, target, &opts),
        IpmMode::LongStep => long_step_ipm_with(&inst, target, &opts),
    });
    match result {
        Ok(rep) => {
            row.seconds = Some(rep.seconds);
            row.objective = Some(rep.objective);
            row.relerr = Some(relative_error(rep.gap_bound, rep.objective, spec.delta));
        }
        Err(e) => row.status = e.code().to_string(),
    }
    row
}

/// One row per `(size, trial)`; failures are recorded, never fatal.
pub fn run_bench(spec: &BenchSpec) -> Result<Vec<BenchRow>> {
    spec.validate()?;
    let mut rows = Vec::with_capacity(spec.sizes.len() * spec.trials);
    for &size in &spec.sizes {
        for trial in 0..spec.trials {
            rows.push(run_trial(spec, size, trial));
        }
    }
    Ok(rows)
}

/// Mean and sample standard deviation of successful trials per group.
pub fn summarize(rows: &[BenchRow]) -> Vec<SummaryRow> {
    let mut out: Vec<SummaryRow> = Vec::new();
    let mut secs: Vec<Vec<f64>> = Vec::new();
    for r in rows {
        let idx = match out
            .iter()
            .position(|s| s.family == r.family && s.n == r.n && s.sigma == r.sigma && s.mode == r.mode)
        {
            Some(i) => i,
            None => {
                out.push(SummaryRow {
                    family: r.family,
                    n: r.n,
                    m: r.m,
                    sigma: r.sigma,
                    mode: r.mode,
                    trials: 0,
                    ok: 0,
                    mean_seconds: 0.0,
                    std_seconds: 0.0,
                    max_relerr: 0.0,
                });
                secs.push(Vec::new());
                out.len() - 1
            }
        };
        out[idx].trials += 1;
        if let (Some(s), Some(e)) = (r.seconds, r.relerr) {
            out[idx].ok += 1;
            out[idx].max_relerr = out[idx].max_relerr.max(e);
            secs[idx].push(s);
        }
    }
    for (s, t) in out.iter_mut().zip(&secs) {
        let k = t.len() as f64;
        if t.is_empty() {
            s.mean_seconds = f64::NAN;
            s.std_seconds = f64::NAN;
            continue;
        }
        s.mean_seconds = t.iter().sum::<f64>() / k;
        s.std_seconds = if t.len() > 1 {
            (t.iter().map(|v| (v - s.mean_seconds).powi(2)).sum::<f64>() / (k - 1.0)).sqrt()
        } else {
            0.0
        };
    }
    out
}

/// Data rows, then a `# summary` marker line and the summary table.
pub fn write_csv<W: Write>(mut out: W, rows: &[BenchRow]) -> Result<()> {
    {
        let mut w = csv::Writer::from_writer(&mut out);
        for r in rows {
            w.serialize(r)?;
        }
        if rows.is_empty() {
            w.write_record([
                "family", "n", "m", "sigma", "trial", "mode", "seconds", "objective", "relerr", "status",
            ])?;
        }
        w.flush().map_err(|e| BenchError::io("csv output", e))?;
    }
    writeln!(out, "# summary").map_err(|e| BenchError::io("csv output", e))?;
    let mut w = csv::Writer::from_writer(&mut out);
    for s in summarize(rows) {
        w.serialize(s)?;
    }
    w.flush().map_err(|e| BenchError::io("csv output", e))?;
    Ok(())
}
