//! Seeded comparison of DyTo against uniform sampling with grid pooling.

use std::path::Path;
use std::time::Instant;

use serde::Serialize;

use super::metrics::{event_coverage, partition_accuracy, reconstruction_error};
use super::video::{generate_synthetic_video, EventLayout, GroundTruth, SyntheticSpec};
use crate::error::{Error, Result};
use crate::merge::per_frame_target;
use crate::pipeline::{run_baseline_uniform_pool, run_dyto, CompressedVideo, PipelineConfig};
use crate::tensor::{write_dyt, VideoTokens};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchConfig {
    pub runs: usize,
    pub base_seed: u64,
    pub n_frames: usize,
    pub min_events: usize,
    pub max_events: usize,
    pub tokens_per_frame: usize,
    pub dim: usize,
    pub noise: f64,
    pub budget: usize,
    pub heads: usize,
    pub r1_cap: usize,
    /// Record wall-clock times (makes the report non-reproducible).
    pub timing: bool,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            runs: 20,
            base_seed: 0,
            n_frames: 100,
            min_events: 3,
            max_events: 8,
            tokens_per_frame: 65,
            dim: 64,
            noise: 0.05,
            budget: 128,
            heads: 16,
            r1_cap: 288,
            timing: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MethodMetrics {
    pub coverage: f64,
    pub accuracy: f64,
    pub reconstruction_error: f64,
    pub tokens_used: usize,
    pub wall_time_ms: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunRecord {
    pub seed: u64,
    pub events: usize,
    pub keyframes: usize,
    pub baseline_grid: usize,
    pub dyto: MethodMetrics,
    pub baseline: MethodMetrics,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MethodSummary {
    pub coverage: f64,
    pub accuracy: f64,
    pub median_accuracy: f64,
    pub reconstruction_error: f64,
    pub tokens_used: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchReport {
    pub config: BenchConfig,
    pub runs: Vec<RunRecord>,
    pub dyto: MethodSummary,
    pub baseline: MethodSummary,
    /// Runs where DyTo covered at least as many events as the baseline.
    pub coverage_at_least_baseline: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRun {
    pub tokens: VideoTokens,
    pub truth: GroundTruth,
    pub dyto: CompressedVideo,
    pub baseline: CompressedVideo,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchOutcome {
    pub report: BenchReport,
    pub runs: Vec<BenchRun>,
}

pub fn median(values: &[f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        (v[m - 1] + v[m]) / 2.0
    }
}

/// Largest `g` dividing the patch grid side with `g * g` within the
/// per-frame allowance.
fn baseline_grid(tokens_per_frame: usize, budget: usize, frames: usize) -> Result<usize> {
    let patches = tokens_per_frame - 1;
    let side = (patches as f64).sqrt().round() as usize;
    if side * side != patches {
        return Err(Error::Config(format!("{patches} patches do not form a square grid")));
    }
    let allowance = per_frame_target(tokens_per_frame, budget, frames)?;
    Ok((1..=side).filter(|g| side.is_multiple_of(*g) && g * g <= allowance).max().unwrap_or(1))
}

fn timed<T>(enabled: bool, f: impl FnOnce() -> Result<T>) -> Result<(T, Option<f64>)> {
    let start = Instant::now();
    let out = f()?;
    Ok((out, enabled.then(|| start.elapsed().as_secs_f64() * 1e3)))
}

fn metrics(cv: &CompressedVideo, tokens: &VideoTokens, truth: &GroundTruth, wall: Option<f64>) -> Result<MethodMetrics> {
    Ok(MethodMetrics {
        coverage: event_coverage(&cv.keyframes, truth)?,
        accuracy: partition_accuracy(&cv.partition, truth)?,
        reconstruction_error: reconstruction_error(cv, tokens)?,
        tokens_used: cv.total_tokens(),
        wall_time_ms: wall,
    })
}

fn summarize(records: &[&MethodMetrics]) -> MethodSummary {
    let n = records.len().max(1) as f64;
    let acc: Vec<f64> = records.iter().map(|m| m.accuracy).collect();
    MethodSummary {
        coverage: records.iter().map(|m| m.coverage).sum::<f64>() / n,
        accuracy: acc.iter().sum::<f64>() / n,
        median_accuracy: median(&acc),
        reconstruction_error: records.iter().map(|m| m.reconstruction_error).sum::<f64>() / n,
        tokens_used: records.iter().map(|m| m.tokens_used as f64).sum::<f64>() / n,
    }
}

/// Run `i` uses seed `base_seed + i` and cycles the event count through
/// `min_events..=max_events`. The baseline samples as many frames as DyTo
/// found keyframes.
pub fn run_bench(cfg: &BenchConfig) -> Result<BenchOutcome> {
    if cfg.runs == 0 || cfg.min_events == 0 || cfg.min_events > cfg.max_events {
        return Err(Error::Config(format!(
            "bench needs runs >= 1 and 1 <= min_events <= max_events, got {} runs, events {}..={}",
            cfg.runs, cfg.min_events, cfg.max_events
        )));
    }
    let span = cfg.max_events - cfg.min_events + 1;
    let mut records = Vec::with_capacity(cfg.runs);
    let mut runs = Vec::with_capacity(cfg.runs);
    for i in 0..cfg.runs {
        let seed = cfg.base_seed.wrapping_add(i as u64);
        let events = cfg.min_events + i % span;
        let spec = SyntheticSpec {
            n_frames: cfg.n_frames,
            n_events: events,
            tokens_per_frame: cfg.tokens_per_frame,
            dim: cfg.dim,
            noise: cfg.noise,
            layout: EventLayout::Random { min_len: 2 },
            seed,
            ..SyntheticSpec::default()
        };
        let (tokens, truth) = generate_synthetic_video(&spec)?;
        let mut pc = PipelineConfig {
            n_frames: cfg.n_frames,
            budget: cfg.budget,
            heads: cfg.heads,
            r1_cap: cfg.r1_cap,
            ..PipelineConfig::default()
        };
        let (dyto, dyto_ms) = timed(cfg.timing, || run_dyto(&tokens, &pc))?;
        pc.baseline_frames = dyto.k();
        pc.baseline_grid = baseline_grid(cfg.tokens_per_frame, cfg.budget, dyto.k())?;
        let (baseline, base_ms) = timed(cfg.timing, || run_baseline_uniform_pool(&tokens, &pc))?;
        records.push(RunRecord {
            seed,
            events,
            keyframes: dyto.k(),
            baseline_grid: pc.baseline_grid,
            dyto: metrics(&dyto, &tokens, &truth, dyto_ms)?,
            baseline: metrics(&baseline, &tokens, &truth, base_ms)?,
        });
        runs.push(BenchRun {
            tokens,
            truth,
            dyto,
            baseline,
        });
    }
    let covered = records.iter().filter(|r| r.dyto.coverage >= r.baseline.coverage).count();
    let report = BenchReport {
        config: cfg.clone(),
        dyto: summarize(&records.iter().map(|r| &r.dyto).collect::<Vec<_>>()),
        baseline: summarize(&records.iter().map(|r| &r.baseline).collect::<Vec<_>>()),
        coverage_at_least_baseline: covered as f64 / records.len() as f64,
        runs: records,
    };
    Ok(BenchOutcome { report, runs })
}

impl BenchOutcome {
    pub fn report_json(&self) -> String {
        serde_json::to_string_pretty(&self.report).expect("report serializes")
    }

    /// Writes `report.json` plus `run_NNN_dyto.dyt` and `run_NNN_baseline.dyt`
    /// under `dir`.
    pub fn write_outputs(&self, dir: impl AsRef<Path>) -> Result<()> {
        let dir = dir.as_ref();
        std::fs::create_dir_all(dir).map_err(|e| Error::storage(dir, e))?;
        let report = dir.join("report.json");
        std::fs::write(&report, self.report_json()).map_err(|e| Error::storage(&report, e))?;
        for (i, run) in self.runs.iter().enumerate() {
            write_dyt(&run.dyto.to_tensor(), dir.join(format!("run_{i:03}_dyto.dyt")))?;
            write_dyt(&run.baseline.to_tensor(), dir.join(format!("run_{i:03}_baseline.dyt")))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> BenchConfig {
        BenchConfig {
            runs: 3,
            n_frames: 40,
            ..BenchConfig::default()
        }
    }

    #[test]
    fn grid_choice() {
        assert_eq!(baseline_grid(65, 128, 8).unwrap(), 4);
        assert_eq!(baseline_grid(65, 128, 2).unwrap(), 8);
        assert_eq!(baseline_grid(577, 3680, 10).unwrap(), 12);
        assert!(baseline_grid(66, 128, 2).is_err());
    }

    #[test]
    fn median_even_and_odd() {
        assert_eq!(median(&[3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), 2.5);
    }

    #[test]
    fn report_is_reproducible() {
        let a = run_bench(&small()).unwrap();
        let b = run_bench(&small()).unwrap();
        assert_eq!(a.report_json(), b.report_json());
        assert_eq!(a.report.runs.len(), 3);
        assert_eq!(a.report.runs[1].events, 4);
        for r in &a.report.runs {
            assert!(r.dyto.tokens_used <= 128);
            assert!(r.dyto.wall_time_ms.is_none());
        }
    }

    #[test]
    fn writes_files() {
        let dir = tempfile::tempdir().unwrap();
        run_bench(&small()).unwrap().write_outputs(dir.path()).unwrap();
        assert!(dir.path().join("report.json").exists());
        assert!(dir.path().join("run_002_baseline.dyt").exists());
    }
}
