use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use dagiso_bench::bench::{run_bench, write_csv, BenchSpec, Family};
use dagiso_bench::error::{BenchError, Result};
use dagiso_bench::fit::{parse_mode, parse_solver, parse_variant, run_fit, FitOptions, Norm};
use dagiso_bench::gen::{gen_grid2d, gen_random_regular, noisy_observations};
use dagiso_bench::io::{parse_instance, write_instance, InstanceData};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Parser)]
#[command(name = "dagiso", version, about = "Isotonic regression on directed acyclic graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fit one instance and write a JSON report.
    Fit {
        /// A real p >= 1, `inf` or `strict`.
        #[arg(long, default_value = "2")]
        norm: String,
        /// Which ℓ∞ minimizer to return: avg, min or max.
        #[arg(long, default_value = "avg")]
        variant: String,
        /// Additive accuracy of the ℓp objective.
        #[arg(long, default_value_t = 1e-6)]
        delta: f64,
        /// Interior point variant: short or long.
        #[arg(long, default_value = "long")]
        mode: String,
        /// Laplacian solver: auto, cholesky or pcg.
        #[arg(long, default_value = "auto")]
        solver: String,
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        obs: PathBuf,
        /// Output path, `-` for standard output.
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Time the ℓp solver on generated instances and write CSV.
    Bench {
        /// grid2d or random-regular.
        #[arg(long)]
        family: String,
        /// Comma separated grid sides (grid2d) or vertex counts.
        #[arg(long, value_delimiter = ',', required = true)]
        sizes: Vec<usize>,
        #[arg(long, default_value_t = 1.0)]
        sigma: f64,
        #[arg(long, default_value_t = 5)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 2.0)]
        p: f64,
        #[arg(long, default_value = "long")]
        mode: String,
        #[arg(long, default_value_t = 1e-6)]
        delta: f64,
        /// Relative-error stop for the long-step mode; 0 disables it.
        #[arg(long, default_value_t = 1e-3)]
        rel: f64,
        #[arg(long, default_value_t = 4)]
        degree: usize,
        /// Laplacian solver: auto, cholesky or pcg.
        #[arg(long, default_value = "auto")]
        solver: String,
        /// Output path, `-` for standard output.
        #[arg(long, default_value = "-")]
        out: PathBuf,
    },
    /// Generate an instance and write graph and observation files.
    Gen {
        #[arg(long)]
        family: String,
        /// Grid side (grid2d) or vertex count.
        #[arg(long)]
        size: usize,
        #[arg(long, default_value_t = 1.0)]
        sigma: f64,
        #[arg(long, default_value_t = 4)]
        degree: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        obs: PathBuf,
    },
}

fn open_out(path: &Path) -> Result<Box<dyn Write>> {
    if path == Path::new("-") {
        return Ok(Box::new(std::io::stdout().lock()));
    }
    let f = File::create(path).map_err(|e| BenchError::Io {
        path: path.to_path_buf(),
        source: e,
    })?;
    Ok(Box::new(BufWriter::new(f)))
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Fit {
            norm,
            variant,
            delta,
            mode,
            solver,
            graph,
            obs,
            out,
            seed,
        } => {
            let opts = FitOptions {
                norm: norm.parse::<Norm>()?,
                variant: parse_variant(&variant)?,
                delta,
                mode: parse_mode(&mode)?,
                solver: parse_solver(&solver)?,
                seed,
            };
            let data = parse_instance(&graph, &obs)?;
            let report = run_fit(&data, &opts)?;
            let mut w = open_out(&out)?;
            serde_json::to_writer_pretty(&mut w, &report)?;
            writeln!(w).and_then(|_| w.flush()).map_err(|e| BenchError::Io { path: out, source: e })
        }
        Command::Bench {
            family,
            sizes,
            sigma,
            trials,
            seed,
            p,
            mode,
            delta,
            rel,
            degree,
            solver,
            out,
        } => {
            let mut spec = BenchSpec::new(family.parse::<Family>()?, sizes, sigma, trials);
            spec.seed = seed;
            spec.p = p;
            spec.mode = parse_mode(&mode)?;
            spec.delta = delta;
            spec.relative_tolerance = (rel > 0.0).then_some(rel);
            spec.degree = degree;
            spec.solver = parse_solver(&solver)?;
            let rows = run_bench(&spec)?;
            write_csv(open_out(&out)?, &rows)
        }
        Command::Gen {
            family,
            size,
            sigma,
            degree,
            seed,
            graph,
            obs,
        } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let (dag, y) = match family.parse::<Family>()? {
                Family::Grid2d => gen_grid2d(size, sigma, &mut rng),
                Family::RandomRegular => {
                    if !(size * degree).is_multiple_of(2) || degree >= size {
                        return Err(BenchError::Usage(format!("no simple {degree}-regular graph on {size} vertices")));
                    }
                    let dag = gen_random_regular(size, degree, &mut rng);
                    let y = noisy_observations(&dag, sigma, &mut rng);
                    (dag, y)
                }
            };
            let w = vec![1.0; dag.n()];
            write_instance(&InstanceData { dag, y, w }, &graph, &obs)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error[{}]: {e}", e.code());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
