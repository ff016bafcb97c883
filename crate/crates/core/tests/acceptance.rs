//! Acceptance run: one PASS/FAIL line per criterion, non-zero exit on any
//! hard failure.

mod common;

use std::time::{Duration, Instant};

use common::{brute_force_assignment, gaussian_rows, naive_distance, naive_head_similarity, random_tokens};
use dyto::clustering::temporal_distance_matrix;
use dyto::merge::{bipartite_match, compress_frame, head_similarity, plan_budget, MergeOptions, MergeSchedule};
use dyto::synth::bench::median;
use dyto::synth::rng::SplitMix64;
use dyto::synth::{
    event_coverage, exhaustive_match_oracle, frame_reconstruction_error, generate_synthetic_video, hungarian_match,
    mean_pool_frame, partition_accuracy, run_bench, BenchConfig, EventLayout, SyntheticSpec,
};
use dyto::tensor::ClsSequence;
use dyto::{run_dyto, PipelineConfig};

type Check = Result<String, String>;

enum Gate {
    Hard,
    Soft,
}

struct Suite {
    failures: usize,
}

impl Suite {
    fn run(&mut self, name: &str, gate: Gate, check: impl FnOnce() -> Check) {
        let start = Instant::now();
        let outcome = check();
        let secs = start.elapsed().as_secs_f64();
        match (outcome, gate) {
            (Ok(detail), _) => println!("PASS  {name}: {detail} [{secs:.2}s]"),
            (Err(detail), Gate::Hard) => {
                self.failures += 1;
                println!("FAIL  {name}: {detail} [{secs:.2}s]");
            }
            (Err(detail), Gate::Soft) => println!("FAIL  {name} (recorded only): {detail} [{secs:.2}s]"),
        }
    }
}

fn within(start: Instant, limit: Duration, detail: String) -> Check {
    let took = start.elapsed();
    if took <= limit {
        Ok(detail)
    } else {
        Err(format!("{detail}; took {took:.2?}, limit {limit:?}"))
    }
}

fn equation_fidelity() -> Check {
    let start = Instant::now();
    let mut rng = SplitMix64::new(0xd157);
    let mut worst_w = 0.0f64;
    for _ in 0..1000 {
        let n = 2 + rng.below(31);
        let d = 1 + rng.below(16);
        let rows = gaussian_rows(&mut rng, n, d);
        let w = temporal_distance_matrix(&ClsSequence::from_rows(n, d, &rows).map_err(|e| e.to_string())?)
            .map_err(|e| e.to_string())?;
        let naive = naive_distance(&rows, n, d);
        for (i, row) in naive.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                worst_w = worst_w.max((w.get(i, j) - v).abs());
            }
        }
    }
    let mut worst_s = 0.0f64;
    for case in 0..1000 {
        let heads = 1 + rng.below(16);
        let d = heads * (1 + rng.below(8));
        let a = gaussian_rows(&mut rng, 1, d);
        let b: Vec<f64> = match case % 4 {
            0 => a.clone(),
            1 => a.iter().map(|x| -x).collect(),
            _ => gaussian_rows(&mut rng, 1, d),
        };
        let s = head_similarity(&a, &b, heads).map_err(|e| e.to_string())?;
        worst_s = worst_s.max((s - naive_head_similarity(&a, &b, heads)).abs());
    }
    let detail = format!("max |dW| = {worst_w:.1e}, max |dsim| = {worst_s:.1e} over 1000 + 1000 instances");
    if worst_w > 1e-6 || worst_s > 1e-6 {
        return Err(detail);
    }
    within(start, Duration::from_secs(10), detail)
}

fn matching_oracle() -> Check {
    let start = Instant::now();
    let mut rng = SplitMix64::new(0x0a7c);
    let mut compared = 0;
    for case in 0..500 {
        let n = 2 + rng.below(11);
        let heads = 1 + rng.below(4);
        let d = heads * (1 + rng.below(4));
        let t = random_tokens(&mut rng, n, d);
        for r in 0..=n / 2 {
            let fast = bipartite_match(&t, r, heads).map_err(|e| e.to_string())?;
            let slow = exhaustive_match_oracle(&t, r, heads).map_err(|e| e.to_string())?;
            if fast != slow {
                return Err(format!("instance {case} (R={n}, r={r}) differs: {fast:?} vs {slow:?}"));
            }
            compared += 1;
        }
    }
    within(
        start,
        Duration::from_secs(30),
        format!("500 token sets, {compared} (set, r) pairs identical"),
    )
}

fn hungarian_correctness() -> Check {
    let start = Instant::now();
    let mut rng = SplitMix64::new(0x4a17);
    for case in 0..500 {
        let k = 1 + rng.below(8);
        let integral = case % 2 == 0;
        let cost: Vec<Vec<f64>> = (0..k)
            .map(|_| {
                (0..k)
                    .map(|_| if integral { rng.below(6) as f64 } else { rng.normal() })
                    .collect()
            })
            .collect();
        let fast = hungarian_match(&cost).map_err(|e| e.to_string())?;
        let (perm, total) = brute_force_assignment(&cost);
        if fast.columns != perm || fast.total != total {
            return Err(format!(
                "case {case} (k={k}): got {:?} = {}, brute force {perm:?} = {total}",
                fast.columns, fast.total
            ));
        }
    }
    within(
        start,
        Duration::from_secs(10),
        "500 matrices (half with tied integer costs) match the brute-force minimum".into(),
    )
}

fn budget_arithmetic() -> Check {
    for z in [3680usize, 7200] {
        for k in 1..=64usize {
            let s = plan_budget(577, z, k, 288).map_err(|e| e.to_string())?;
            let expected = (z / k).min(576);
            let counts = s.counts();
            let feasible = s
                .steps
                .iter()
                .zip(&counts)
                .enumerate()
                .all(|(i, (r, live))| *r >= 1 && *r <= live / 2 && (i > 0 || *r <= 288));
            if s.target != expected || *counts.last().unwrap() != expected || k * s.target > z || !feasible {
                return Err(format!("Z={z}, K={k}: schedule {:?} ends at {}", s.steps, s.target));
            }
        }
    }
    Ok("per-frame count min(576, floor(Z/K)) and K*T <= Z for K in 1..=64, Z in {3680, 7200}".into())
}

fn conservation() -> Check {
    let mut rng = SplitMix64::new(0xc0de);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let d = 64;
        let patches: Vec<f32> = (0..576 * d).map(|_| rng.normal() as f32).collect();
        let k = 1 + rng.below(64);
        let schedule = plan_budget(577, 3680, k, 288).map_err(|e| e.to_string())?;
        let out = compress_frame(0, &patches, d, &schedule, &MergeOptions::default()).map_err(|e| e.to_string())?;
        for c in 0..d {
            let original: f64 = (0..576).map(|p| patches[p * d + c] as f64).sum();
            let merged: f64 = (0..out.tokens.len())
                .map(|t| out.tokens.sizes()[t] as f64 * out.tokens.token(t)[c])
                .sum();
            worst = worst.max((original - merged).abs());
        }
    }
    let detail = format!("max per-channel deviation {worst:.1e} over 100 frames");
    if worst <= 1e-4 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn noisy_suite() -> BenchConfig {
    BenchConfig {
        runs: 50,
        base_seed: 1000,
        ..BenchConfig::default()
    }
}

fn provenance() -> Check {
    let outcome = run_bench(&noisy_suite()).map_err(|e| e.to_string())?;
    let mut frames = 0;
    for (i, run) in outcome.runs.iter().enumerate() {
        let patches = run.tokens.n_patches();
        for f in run.dyto.frames.iter().chain(&run.baseline.frames) {
            f.tokens
                .check_provenance(patches)
                .map_err(|e| format!("run {i}, frame {}: {e}", f.frame))?;
            frames += 1;
        }
    }
    Ok(format!("{frames} compressed frames across 50 bench runs partition their patches"))
}

fn noiseless_segmentation() -> Check {
    let start = Instant::now();
    let mut worst = (1.0f64, 1.0f64);
    for i in 0..50u64 {
        let events = 2 + (i as usize) % 7;
        let spec = SyntheticSpec {
            n_frames: 100,
            n_events: events,
            noise: 0.0,
            layout: EventLayout::Random { min_len: 2 },
            seed: 500 + i,
            ..SyntheticSpec::default()
        };
        let (tokens, truth) = generate_synthetic_video(&spec).map_err(|e| e.to_string())?;
        let cv = run_dyto(&tokens, &PipelineConfig { budget: 128, ..PipelineConfig::default() })
            .map_err(|e| e.to_string())?;
        let acc = partition_accuracy(&cv.partition, &truth).map_err(|e| e.to_string())?;
        let cov = event_coverage(&cv.keyframes, &truth).map_err(|e| e.to_string())?;
        worst = (worst.0.min(acc), worst.1.min(cov));
    }
    let detail = format!("min accuracy {:.3}, min coverage {:.3} over 50 runs, E in 2..=8", worst.0, worst.1);
    if worst != (1.0, 1.0) {
        return Err(detail);
    }
    within(start, Duration::from_secs(60), detail)
}

fn noisy_segmentation() -> Check {
    let report = run_bench(&noisy_suite()).map_err(|e| e.to_string())?.report;
    let detail = format!(
        "median accuracy {:.3} (baseline {:.3}); coverage >= baseline in {:.0}% of runs; mean coverage {:.3} vs {:.3}",
        report.dyto.median_accuracy,
        report.baseline.median_accuracy,
        100.0 * report.coverage_at_least_baseline,
        report.dyto.coverage,
        report.baseline.coverage
    );
    if report.dyto.median_accuracy >= 0.95 && report.coverage_at_least_baseline >= 0.9 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn reconstruction() -> Check {
    let (mut merged, mut pooled) = (Vec::new(), Vec::new());
    for seed in 0..20u64 {
        let spec = SyntheticSpec {
            n_frames: 1,
            n_events: 1,
            tokens_per_frame: 577,
            dim: 64,
            seed: 900 + seed,
            ..SyntheticSpec::default()
        };
        let (tokens, _) = generate_synthetic_video(&spec).map_err(|e| e.to_string())?;
        let patches = tokens.patches(0);
        let schedule = MergeSchedule::greedy(576, 144, 288).map_err(|e| e.to_string())?;
        let out = compress_frame(0, patches, 64, &schedule, &MergeOptions::default()).map_err(|e| e.to_string())?;
        merged.push(frame_reconstruction_error(&out, patches, 64).map_err(|e| e.to_string())?);
        let pool = mean_pool_frame(0, patches, 64, 144).map_err(|e| e.to_string())?;
        pooled.push(frame_reconstruction_error(&pool, patches, 64).map_err(|e| e.to_string())?);
    }
    let (m, p) = (median(&merged), median(&pooled));
    let detail = format!("median MSE {m:.4} merged vs {p:.4} mean-pooled, 576 -> 144 tokens over 20 frames");
    if m <= p {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn determinism() -> Check {
    let dirs = [tempfile::tempdir().map_err(|e| e.to_string())?, tempfile::tempdir().map_err(|e| e.to_string())?];
    for dir in &dirs {
        run_bench(&BenchConfig::default())
            .and_then(|o| o.write_outputs(dir.path()))
            .map_err(|e| e.to_string())?;
    }
    let mut names: Vec<_> = std::fs::read_dir(dirs[0].path())
        .map_err(|e| e.to_string())?
        .map(|e| e.unwrap().file_name())
        .collect();
    names.sort();
    for name in &names {
        let a = std::fs::read(dirs[0].path().join(name)).map_err(|e| e.to_string())?;
        let b = std::fs::read(dirs[1].path().join(name)).map_err(|e| format!("{name:?}: {e}"))?;
        if a != b {
            return Err(format!("{name:?} differs between runs"));
        }
    }
    Ok(format!("{} files byte-identical across two bench runs", names.len()))
}

fn throughput() -> Check {
    let spec = SyntheticSpec {
        n_frames: 100,
        n_events: 6,
        tokens_per_frame: 577,
        dim: 1024,
        seed: 77,
        ..SyntheticSpec::default()
    };
    let (tokens, _) = generate_synthetic_video(&spec).map_err(|e| e.to_string())?;
    let start = Instant::now();
    let cv = run_dyto(&tokens, &PipelineConfig::default()).map_err(|e| e.to_string())?;
    let took = start.elapsed();
    let detail = format!(
        "N=100, L=577, D=1024, Z=3680: K={}, {} tokens in {took:.2?} single-threaded (target < 5s)",
        cv.k(),
        cv.total_tokens()
    );
    if took < Duration::from_secs(5) {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn main() {
    let mut suite = Suite { failures: 0 };
    suite.run("equation fidelity", Gate::Hard, equation_fidelity);
    suite.run("matching oracle equivalence", Gate::Hard, matching_oracle);
    suite.run("hungarian correctness", Gate::Hard, hungarian_correctness);
    suite.run("budget arithmetic", Gate::Hard, budget_arithmetic);
    suite.run("conservation", Gate::Hard, conservation);
    suite.run("provenance", Gate::Hard, provenance);
    suite.run("noiseless segmentation", Gate::Hard, noiseless_segmentation);
    suite.run("noisy segmentation", Gate::Hard, noisy_segmentation);
    suite.run("reconstruction", Gate::Hard, reconstruction);
    suite.run("determinism", Gate::Hard, determinism);
    suite.run("throughput", Gate::Soft, throughput);
    if suite.failures > 0 {
        println!("{} criteria failed", suite.failures);
        std::process::exit(1);
    }
    println!("all criteria passed");
}
