//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
//! exits nonzero if any fails.

use std::time::Instant;

use dagiso::barrier::FeasiblePoint;
use dagiso::ipm::value_bound;
use dagiso::lipschitz::{check_well_posed, gradient_vector, high_pressure_vertices, lex_less, PartialLabeling};
use dagiso::linalg::{rank_one_more, HessianSolver, LinearOperator, SddMethod};
use dagiso::oracles::{
    active_set_oracle, allpairs_inf_oracle, allpairs_pressure, dense_hessian_inverse, lex_reference, pava_oracle,
};
use dagiso::reduction::build_augmented;
use dagiso::{isotonic_inf, isotonic_ipm_with, isotonic_strict, long_step_ipm, Dag, Edge, InfVariant, IpmOptions, IsoInstance, SolveReport};
use dagiso_bench::gen::{gen_random_regular, noisy_observations};
use dagiso_bench::{run_bench, summarize, write_csv, BenchRow, BenchSpec, Family};
use nalgebra::{DMatrix, DVector};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_dag<R: Rng>(n: usize, m: usize, rng: &mut R) -> Dag {
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(rng);
    let mut pairs = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            pairs.push((perm[i], perm[j]));
        }
    }
    pairs.shuffle(rng);
    pairs.truncate(m);
    Dag::from_pairs(n, &pairs).unwrap()
}

fn random_yw<R: Rng>(n: usize, r: &mut R) -> (Vec<f64>, Vec<f64>) {
    let y = (0..n).map(|_| r.random_range(-2.0..2.0)).collect();
    let w = (0..n).map(|_| r.random_range(0.5..3.0)).collect();
    (y, w)
}

fn random_instance<R: Rng>(n: usize, m: usize, p: f64, r: &mut R) -> IsoInstance {
    let dag = random_dag(n, m, r);
    let (y, w) = random_yw(n, r);
    IsoInstance::new(dag, y, w, p).unwrap()
}

/// Strictly isotonic `x` in `(0, 1)` with slack in every cone.
fn random_point<R: Rng>(inst: &IsoInstance, r: &mut R) -> FeasiblePoint {
    let n = inst.n();
    let mut vals: Vec<f64> = (0..n).map(|_| r.random_range(0.05..0.95)).collect();
    vals.sort_by(f64::total_cmp);
    for i in 1..n {
        vals[i] = vals[i].max(vals[i - 1] + 1e-3);
    }
    let rank = &inst.dag().topo().rank;
    let x: Vec<f64> = (0..n).map(|v| vals[rank[v]]).collect();
    let t = (0..n)
        .map(|v| (x[v] - inst.y()[v]).abs().powf(inst.p()) + r.random_range(0.1..1.0))
        .collect();
    FeasiblePoint::new(x, t)
}

/// Well-posed labeled DAG with positive lengths.
fn labeled_instance<R: Rng>(n: usize, r: &mut R) -> (Dag, PartialLabeling) {
    loop {
        let base = random_dag(n, r.random_range(n..=3 * n), r);
        let edges = base
            .edges()
            .iter()
            .map(|e| Edge::with_length(e.tail, e.head, r.random_range(0.05..2.0)))
            .collect();
        let dag = Dag::new(n, edges).unwrap();
        let mut v0: PartialLabeling = (0..n).map(|_| r.random_bool(0.4).then(|| r.random_range(-5.0..5.0))).collect();
        for _ in 0..2 {
            let i = r.random_range(0..n);
            v0[i].get_or_insert_with(|| r.random_range(-5.0..5.0));
        }
        if check_well_posed(&dag, &v0).is_ok() {
            return (dag, v0);
        }
    }
}

fn is_isotonic(dag: &Dag, x: &[f64]) -> bool {
    dag.edges().iter().all(|e| x[e.tail] <= x[e.head])
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let k = v.len();
    if k % 2 == 1 {
        v[k / 2]
    } else {
        0.5 * (v[k / 2 - 1] + v[k / 2])
    }
}

/// Decrement and gap invariants of one short-step solve.
#[derive(Default)]
struct TraceStats {
    runs: usize,
    max_pre: f64,
    max_post: f64,
    max_final: f64,
    violations: Vec<String>,
}

impl TraceStats {
    fn record(&mut self, label: &str, rep: &SolveReport, delta: f64) {
        self.runs += 1;
        let Some(trace) = &rep.trace else {
            self.violations.push(format!("{label}: no trace"));
            return;
        };
        let widen = 1.1f64.sqrt();
        let (pre, post) = (trace.max_decrement_pre(), trace.max_decrement_post());
        self.max_pre = self.max_pre.max(pre);
        self.max_post = self.max_post.max(post);
        self.max_final = self.max_final.max(trace.final_decrement);
        if pre > widen / 6.0 || post > widen / 9.0 || trace.final_decrement > widen / 9.0 {
            self.violations.push(format!("{label}: decrements {pre:.4} {post:.4}"));
        }
        if rep.gap_bound > delta {
            self.violations.push(format!("{label}: gap {:.3e} > {delta:e}", rep.gap_bound));
        }
    }
}

fn traced() -> IpmOptions {
    IpmOptions {
        record_trace: true,
        ..IpmOptions::default()
    }
}

fn criterion_1(stats: &mut TraceStats) -> Outcome {
    let start = Instant::now();
    let mut r = rng(1);
    let delta = 1e-4;
    let mut worst = f64::NEG_INFINITY;
    for i in 0..50 {
        let n = r.random_range(1..=10);
        let m = r.random_range(0..=16);
        let dag = random_dag(n, m, &mut r);
        let (y, w) = random_yw(n, &mut r);
        for p in [1.0, 1.5, 2.0, 3.0, 8.0] {
            let inst = IsoInstance::new(dag.clone(), y.clone(), w.clone(), p).unwrap();
            let rep = isotonic_ipm_with(&inst, delta, &traced()).map_err(|e| format!("instance {i}, p {p}: {e}"))?;
            let opt = active_set_oracle(&inst).map_err(|e| e.to_string())?.value * inst.objective_scale();
            stats.record(&format!("instance {i} p {p}"), &rep, delta);
            worst = worst.max(rep.objective - opt);
            if rep.objective > opt + delta || !is_isotonic(inst.dag(), &rep.x) {
                return Err(format!("instance {i}, p {p}: objective {} vs optimum {opt}", rep.objective));
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    if secs >= 60.0 {
        return Err(format!("took {secs:.1}s"));
    }
    Ok(format!("250 solves, worst excess {worst:.2e}"))
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let mut r = rng(2);
    let delta = 1e-6;
    let mut worst = 0.0f64;
    for i in 0..100 {
        let n = r.random_range(2..=200);
        let dag = Dag::path(n);
        let (y, w) = random_yw(n, &mut r);
        let want = pava_oracle(&dag, &y, &w).map_err(|e| e.to_string())?.value;
        let inst = IsoInstance::new(dag, y, w, 2.0).unwrap();
        let rep = long_step_ipm(&inst, delta).map_err(|e| format!("path {i}: {e}"))?;
        if rep.gap_bound > delta {
            return Err(format!("path {i}: gap {:.3e}", rep.gap_bound));
        }
        let diff = rep.objective - want;
        worst = worst.max(diff.abs());
        if diff.abs() > delta {
            return Err(format!("path {i} (n = {n}): {} vs {want}", rep.objective));
        }
    }
    let secs = start.elapsed().as_secs_f64();
    if secs >= 30.0 {
        return Err(format!("took {secs:.1}s"));
    }
    Ok(format!("100 paths, worst difference {worst:.2e}"))
}

fn criterion_3() -> Outcome {
    let mut r = rng(3);
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for _ in 0..20 {
        let n = r.random_range(2..=40);
        let p = [1.0, 1.5, 2.0, 3.0, 8.0][r.random_range(0..5)];
        let inst = random_instance(n, r.random_range(0..=3 * n), p, &mut r);
        let k = value_bound(&inst);
        let mut solver = HessianSolver::new(&inst, SddMethod::Pcg, 1.0 / 50.0).map_err(|e| e.to_string())?;
        for _ in 0..5 {
            let pt = random_point(&inst, &mut r);
            solver.update(&inst, k, &pt.to_vec()).map_err(|e| e.to_string())?;
            let hinv = dense_hessian_inverse(&inst, k, &pt).map_err(|e| e.to_string())?;
            for _ in 0..100 {
                let a: Vec<f64> = (0..2 * n).map(|_| r.random_range(-1.0..1.0)).collect();
                let av = DVector::from_column_slice(&a);
                let ma = DVector::from_vec(solver.apply(&a).map_err(|e| e.to_string())?);
                let q = av.dot(&ma) / av.dot(&(&hinv * &av));
                lo = lo.min(q);
                hi = hi.max(q);
            }
        }
    }
    let detail = format!("10000 probes in [{lo:.5}, {hi:.5}]");
    if lo >= 0.9 && hi <= 1.1 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

struct Dense(DMatrix<f64>);

impl LinearOperator for Dense {
    fn dim(&self) -> usize {
        self.0.nrows()
    }

    fn apply_into(&self, a: &[f64], out: &mut [f64]) -> dagiso::Result<()> {
        out.copy_from_slice((&self.0 * DVector::from_column_slice(a)).as_slice());
        Ok(())
    }
}

fn criterion_4() -> Outcome {
    let mut r = rng(4);
    let mut worst = 0.0f64;
    for i in 0..50 {
        let n = r.random_range(1..=20);
        let g = DMatrix::from_fn(n, n, |_, _| r.random_range(-1.0..1.0));
        let x = &g * g.transpose() + DMatrix::identity(n, n) * 0.5;
        let u: Vec<f64> = (0..n).map(|_| r.random_range(-2.0..2.0)).collect();
        let a: Vec<f64> = (0..n).map(|_| r.random_range(-2.0..2.0)).collect();
        let uv = DVector::from_column_slice(&u);
        let want = (&x + &uv * uv.transpose()).try_inverse().unwrap() * DVector::from_column_slice(&a);
        let inner = Dense(x.try_inverse().unwrap());
        let got = rank_one_more(&inner, &u, &a).map_err(|e| e.to_string())?;
        for v in 0..n {
            let err = (got[v] - want[v]).abs() / (1.0 + want[v].abs());
            worst = worst.max(err);
            if err > 1e-9 {
                return Err(format!("matrix {i}: entry {v} off by {err:.2e}"));
            }
        }
    }
    Ok(format!("50 matrices, worst error {worst:.2e}"))
}

fn criterion_5(stats: &TraceStats) -> Outcome {
    let detail = format!(
        "{} traced solves, max decrement {:.4} before and {:.4} after steps, final {:.4}",
        stats.runs, stats.max_pre, stats.max_post, stats.max_final
    );
    match stats.violations.first() {
        None if stats.runs > 0 => Ok(detail),
        None => Err("no traced solves".into()),
        Some(v) => Err(format!("{v} ({} violations)", stats.violations.len())),
    }
}

fn criterion_6() -> Outcome {
    let mut r = rng(6);
    for i in 0..200 {
        let n = r.random_range(1..=20);
        let dag = random_dag(n, r.random_range(0..=2 * n), &mut r);
        let (y, w) = random_yw(n, &mut r);
        let aug = build_augmented(&dag, &y, &w).map_err(|e| e.to_string())?;
        let want = allpairs_inf_oracle(&aug.gprime, &aug.yprime).map_err(|e| e.to_string())?.alpha;
        for variant in [InfVariant::Avg, InfVariant::Min, InfVariant::Max] {
            let got = isotonic_inf(&dag, &y, &w, variant).map_err(|e| e.to_string())?;
            if (got.error - want).abs() > 1e-12 * want {
                return Err(format!("instance {i} {variant:?}: {} vs {want}", got.error));
            }
            if !is_isotonic(&dag, &got.x) {
                return Err(format!("instance {i} {variant:?}: output not isotonic"));
            }
        }
    }
    // Doubling n on 4-regular graphs doubles m.
    let mut medians = Vec::new();
    for n in [50_000usize, 100_000] {
        let mut times = Vec::new();
        for trial in 0..20 {
            let mut r = rng(600 + trial);
            let dag = gen_random_regular(n, 4, &mut r);
            let y = noisy_observations(&dag, 10.0, &mut r);
            let w = vec![1.0; n];
            let start = Instant::now();
            let fit = isotonic_inf(&dag, &y, &w, InfVariant::Avg).map_err(|e| e.to_string())?;
            times.push(start.elapsed().as_secs_f64());
            std::hint::black_box(fit);
        }
        medians.push(median(times));
    }
    let ratio = medians[1] / medians[0];
    let detail = format!(
        "600 exact checks, median {:.1}ms at m = 1e5 and {:.1}ms at m = 2e5, ratio {ratio:.2}",
        1e3 * medians[0],
        1e3 * medians[1]
    );
    if ratio <= 2.5 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn criterion_7() -> Outcome {
    let mut r = rng(7);
    for i in 0..100 {
        let n = r.random_range(1..=15);
        let dag = random_dag(n, r.random_range(0..=2 * n), &mut r);
        let (y, w) = random_yw(n, &mut r);
        let got = isotonic_strict(&dag, &y, &w).map_err(|e| e.to_string())?;
        let aug = build_augmented(&dag, &y, &w).map_err(|e| e.to_string())?;
        let want = lex_reference(&aug.gprime, &aug.yprime).map_err(|e| e.to_string())?;
        if !is_isotonic(&dag, &got) {
            return Err(format!("instance {i}: output not isotonic"));
        }
        for v in 0..n {
            if (got[v] - want[v]).abs() > 1e-10 * (1.0 + want[v].abs()) {
                return Err(format!("instance {i} vertex {v}: {} vs {}", got[v], want[v]));
            }
        }
        let lift = |x: &[f64]| -> Vec<f64> {
            (0..aug.gprime.n()).map(|v| aug.yprime[v].unwrap_or(x[aug.back[v]])).collect()
        };
        let base = gradient_vector(&aug.gprime, &lift(&got));
        for _ in 0..1000 {
            let other: Vec<f64> = got.iter().map(|v| v + r.random_range(-0.5..0.5)).collect();
            if !lex_less(&base, &gradient_vector(&aug.gprime, &lift(&other))).map_err(|e| e.to_string())? {
                return Err(format!("instance {i}: a perturbation has a smaller gradient vector"));
            }
        }
    }
    Ok("100 instances, 100000 perturbations".into())
}

fn criterion_8() -> Outcome {
    let mut r = rng(8);
    let mut sizes = 0;
    for i in 0..100 {
        let n = r.random_range(2..=20);
        let (dag, v0) = labeled_instance(n, &mut r);
        let pressure = allpairs_pressure(&dag, &v0).map_err(|e| e.to_string())?;
        let top = pressure.iter().copied().filter(|p| p.is_finite()).fold(0.0, f64::max);
        let alpha = r.random_range(0.0..=top.max(1.0));
        let fast = high_pressure_vertices(&dag, &v0, alpha);
        let brute: Vec<bool> = pressure.iter().map(|&p| p > alpha).collect();
        if fast != brute {
            return Err(format!("pair {i}, alpha {alpha}"));
        }
        sizes += brute.iter().filter(|&&b| b).count();
    }
    Ok(format!("100 pairs, {sizes} high-pressure vertices in total"))
}

fn sci(v: &[f64]) -> String {
    let parts: Vec<String> = v.iter().map(|x| format!("{x:.2e}")).collect();
    format!("[{}]", parts.join(", "))
}

fn criterion_9() -> Outcome {
    let mut r = rng(9);
    let exponents = [2.0, 4.0, 8.0, 16.0, 32.0];
    let mut widest = (0.0, String::new());
    for i in 0..10 {
        let n = r.random_range(3..=10);
        let dag = random_dag(n, r.random_range(n - 1..=(2 * n).min(16)), &mut r);
        let y: Vec<f64> = (0..n).map(|_| r.random_range(-2.0..2.0)).collect();
        let w = vec![1.0; n];
        let strict = isotonic_strict(&dag, &y, &w).map_err(|e| e.to_string())?;
        let mut dists = Vec::new();
        for p in exponents {
            let inst = IsoInstance::new(dag.clone(), y.clone(), w.clone(), p).unwrap();
            let fit = active_set_oracle(&inst).map_err(|e| e.to_string())?;
            let x = inst.to_raw_x(&fit.x);
            dists.push(x.iter().zip(&strict).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max));
        }
        if dists.windows(2).any(|d| d[1] > d[0] + 1e-9) {
            return Err(format!("instance {i}: distances {}", sci(&dists)));
        }
        if dists[0] > widest.0 {
            widest = (dists[0], sci(&dists));
        }
    }
    Ok(format!("10 instances nonincreasing, widest {}", widest.1))
}

fn criterion_10() -> Outcome {
    let mut rows: Vec<BenchRow> = Vec::new();
    let families = [(Family::Grid2d, vec![8, 16, 32]), (Family::RandomRegular, vec![64, 256, 1024])];
    for (family, sizes) in families {
        for sigma in [1.0, 10.0] {
            let mut spec = BenchSpec::new(family, sizes.clone(), sigma, 5);
            spec.seed = 10;
            rows.extend(run_bench(&spec).map_err(|e| e.to_string())?);
        }
    }
    let path = std::path::Path::new(env!("CARGO_TARGET_TMPDIR")).join("acceptance_bench.csv");
    let file = std::fs::File::create(&path).map_err(|e| e.to_string())?;
    write_csv(file, &rows).map_err(|e| e.to_string())?;
    for s in summarize(&rows) {
        println!(
            "    {:<15} n {:>5} sigma {:>4} ok {}/{} mean {:.4}s std {:.4}s max relerr {:.2e}",
            s.family, s.n, s.sigma, s.ok, s.trials, s.mean_seconds, s.std_seconds, s.max_relerr
        );
    }
    if let Some(bad) = rows.iter().find(|r| r.status != "ok" || !r.relerr.is_some_and(|e| e < 0.01)) {
        return Err(format!("{} n {} trial {}: status {} relerr {:?}", bad.family, bad.n, bad.trial, bad.status, bad.relerr));
    }
    let worst = rows.iter().filter_map(|r| r.relerr).fold(0.0, f64::max);

    // Doubling n on random-regular graphs.
    let mut spec = BenchSpec::new(Family::RandomRegular, vec![512, 1024], 10.0, 5);
    spec.seed = 11;
    let pair = run_bench(&spec).map_err(|e| e.to_string())?;
    let med = |n: usize| median(pair.iter().filter(|r| r.n == n).filter_map(|r| r.seconds).collect());
    let ratio = med(1024) / med(512);
    if !(1.5..=6.0).contains(&ratio) {
        return Err(format!("random-regular doubling ratio {ratio:.2} outside [1.5, 6]"));
    }
    Ok(format!(
        "{} runs, worst relerr {worst:.2e}, doubling ratio {ratio:.2}, csv at {}",
        rows.len(),
        path.display()
    ))
}

fn main() {
    let mut stats = TraceStats::default();
    let mut failed = 0;
    let mut report = |id: usize, name: &str, f: &mut dyn FnMut() -> Outcome| {
        let start = Instant::now();
        let outcome = f();
        let secs = start.elapsed().as_secs_f64();
        let (tag, detail) = match outcome {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!("criterion {id:>2} {name}: {tag} ({detail}; {secs:.2}s)");
    };
    report(1, "lp correctness", &mut || criterion_1(&mut stats));
    report(2, "l2 on paths", &mut criterion_2);
    report(3, "hessian solver spectrum", &mut criterion_3);
    report(4, "rank-one update", &mut criterion_4);
    report(5, "ipm invariants", &mut || criterion_5(&stats));
    report(6, "inf correctness and scaling", &mut criterion_6);
    report(7, "strict correctness", &mut criterion_7);
    report(8, "pressure sets", &mut criterion_8);
    report(9, "large p limit", &mut criterion_9);
    report(10, "experiments", &mut criterion_10);
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
    println!("all criteria passed");
}
