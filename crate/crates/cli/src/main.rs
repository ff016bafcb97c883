use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use dyto::clustering::report::ClusterDocument;
use dyto::clustering::{
    build_hierarchy_with, select_keyframes_per_cluster, select_level, HierarchyOptions, KeyframePolicy, PartitionRule,
};
use dyto::merge::Pooling;
use dyto::synth::{generate_synthetic_video, run_bench, BenchConfig, EventLayout, SyntheticSpec};
use dyto::tensor::extract_cls_sequence;
use dyto::{
    load_tokens, run_baseline_uniform_pool, run_dyto, run_merge_only, save_tokens, write_dyt, CompressedVideo, Error,
    ErrorCategory, PipelineConfig,
};

/// Video token compression by temporal event clustering and token merging
#[derive(Parser, Debug)]
#[command(name = "dyto", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build the event hierarchy and print the number of keyframes
    Cluster(Shared),
    /// Merge the patch tokens of chosen frames without clustering
    Merge {
        #[command(flatten)]
        shared: Shared,
        /// Frames to keep (comma separated); all frames when omitted
        #[arg(long, value_delimiter = ',')]
        frames: Option<Vec<usize>>,
    },
    /// Full pipeline: cluster, pick keyframes, merge to the budget
    Run(Shared),
    /// Uniform frame sampling with grid average pooling
    Baseline {
        #[command(flatten)]
        shared: Shared,
        /// Frames to sample
        #[arg(long, default_value_t = 8)]
        frames: usize,
        /// Side of the pooled patch grid
        #[arg(long, default_value_t = 12)]
        grid: usize,
    },
    /// Write a seeded synthetic video and its ground truth
    Synth(SynthArgs),
    /// Run the seeded comparison suite
    Bench(BenchArgs),
}

#[derive(Args, Debug)]
struct Shared {
    /// Input token tensor (DYT1, N x L x D)
    #[arg(long)]
    input: PathBuf,
    /// Output path; the sidecar JSON goes to <output>.json
    #[arg(long)]
    output: PathBuf,
    /// Include per-frame merge steps and provenance in the sidecar
    #[arg(long)]
    trace: bool,
    /// Total token budget
    #[arg(long, default_value_t = 3680)]
    budget: usize,
    /// Attention heads used for token similarity
    #[arg(long, default_value_t = 16)]
    heads: usize,
    /// Cap on pairs merged in the first step
    #[arg(long, default_value_t = 288)]
    r1: usize,
    /// Keyframe policy: temporal-middle, centroid-nearest, random-uniform
    #[arg(long, default_value = "temporal-middle")]
    policy: String,
    /// Seed for random-uniform keyframes
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Hierarchy level to use: coherent, penultimate, or an index
    #[arg(long, default_value = "coherent")]
    level: PartitionRule,
    /// Cosine gate for linking clusters above the first level, or "none"
    #[arg(long, default_value = "0.5")]
    gate: String,
    /// Keyframes per event
    #[arg(long, default_value_t = 1)]
    per_cluster: usize,
    /// Plain instead of size-weighted averaging when merging
    #[arg(long)]
    unweighted: bool,
    /// Give the budget remainder to the first keyframes
    #[arg(long)]
    spread_remainder: bool,
}

#[derive(Args, Debug)]
struct SynthArgs {
    /// Output tensor; ground truth goes to <output>.json
    #[arg(long)]
    output: PathBuf,
    #[arg(long, default_value_t = 4)]
    events: usize,
    #[arg(long, default_value_t = 100)]
    frames: usize,
    /// Tokens per frame, CLS included
    #[arg(long, default_value_t = 65)]
    tokens: usize,
    #[arg(long, default_value_t = 64)]
    dim: usize,
    #[arg(long, default_value_t = 0.05)]
    noise: f64,
    /// Shortest event, in frames
    #[arg(long, default_value_t = 2)]
    min_len: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args, Debug)]
struct BenchArgs {
    /// Directory for the report and per-run tensors; report to stdout when omitted
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, default_value_t = 20)]
    runs: usize,
    /// Seed of the first run
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Token budget per synthetic video
    #[arg(long, default_value_t = 128)]
    budget: usize,
    #[arg(long, default_value_t = 16)]
    heads: usize,
    /// Record wall-clock times in the report
    #[arg(long)]
    timing: bool,
}

impl Shared {
    fn config(&self) -> dyto::Result<PipelineConfig> {
        let coherence_gate = match self.gate.as_str() {
            "none" => None,
            g => Some(
                g.parse::<f64>()
                    .map_err(|_| Error::Config(format!("gate must be a number or \"none\", got {g:?}")))?,
            ),
        };
        Ok(PipelineConfig {
            budget: self.budget,
            heads: self.heads,
            r1_cap: self.r1,
            policy: KeyframePolicy::parse(&self.policy, self.seed)?,
            frames_per_cluster: self.per_cluster,
            partition_rule: self.level,
            coherence_gate,
            pooling: if self.unweighted { Pooling::Unweighted } else { Pooling::Weighted },
            spread_remainder: self.spread_remainder,
            ..PipelineConfig::default()
        })
    }
}

fn sidecar_path(output: &Path) -> PathBuf {
    let mut s = output.as_os_str().to_owned();
    s.push(".json");
    PathBuf::from(s)
}

fn write_json(path: &Path, value: &serde_json::Value) -> dyto::Result<()> {
    let text = serde_json::to_string_pretty(value).expect("documents serialize");
    std::fs::write(path, text + "\n").map_err(|e| Error::Storage {
        path: path.to_path_buf(),
        source: e,
    })
}

fn write_compressed(cv: &CompressedVideo, shared: &Shared) -> dyto::Result<()> {
    write_dyt(&cv.to_tensor(), &shared.output)?;
    write_json(&sidecar_path(&shared.output), &cv.sidecar(shared.trace))?;
    eprintln!(
        "{} keyframes, {} tokens -> {}",
        cv.k(),
        cv.total_tokens(),
        shared.output.display()
    );
    Ok(())
}

fn cluster(shared: &Shared) -> dyto::Result<()> {
    let cfg = shared.config()?;
    cfg.validate()?;
    let tokens = load_tokens(&shared.input)?;
    let cls = extract_cls_sequence(&tokens)?;
    let h = build_hierarchy_with(
        &cls,
        &HierarchyOptions {
            coherence_gate: cfg.coherence_gate,
        },
    )?;
    let level = select_level(&h, cfg.partition_rule)?;
    let keyframes = select_keyframes_per_cluster(h.level(level), &cls, cfg.policy, cfg.frames_per_cluster);
    let doc = ClusterDocument::new(&h, level, &keyframes, cfg.policy);
    write_json(&shared.output, &serde_json::to_value(doc).expect("documents serialize"))?;
    println!("{}", keyframes.len());
    Ok(())
}

fn synth(args: &SynthArgs) -> dyto::Result<()> {
    let spec = SyntheticSpec {
        n_frames: args.frames,
        n_events: args.events,
        tokens_per_frame: args.tokens,
        dim: args.dim,
        noise: args.noise,
        layout: EventLayout::Random { min_len: args.min_len },
        seed: args.seed,
        ..SyntheticSpec::default()
    };
    let (tokens, truth) = generate_synthetic_video(&spec)?;
    save_tokens(&tokens, &args.output)?;
    write_json(
        &sidecar_path(&args.output),
        &serde_json::to_value(truth).expect("documents serialize"),
    )
}

fn bench(args: &BenchArgs) -> dyto::Result<()> {
    let cfg = BenchConfig {
        runs: args.runs,
        base_seed: args.seed,
        budget: args.budget,
        heads: args.heads,
        timing: args.timing,
        ..BenchConfig::default()
    };
    let outcome = run_bench(&cfg)?;
    let r = &outcome.report;
    eprintln!(
        "dyto: coverage {:.3} accuracy {:.3} | uniform-pool: coverage {:.3} accuracy {:.3}",
        r.dyto.coverage, r.dyto.accuracy, r.baseline.coverage, r.baseline.accuracy
    );
    match &args.output {
        Some(dir) => outcome.write_outputs(dir),
        None => {
            println!("{}", outcome.report_json());
            Ok(())
        }
    }
}

fn dispatch(cli: &Cli) -> dyto::Result<()> {
    match &cli.command {
        Command::Cluster(shared) => cluster(shared),
        Command::Merge { shared, frames } => {
            let tokens = load_tokens(&shared.input)?;
            let cv = run_merge_only(&tokens, frames.as_deref(), &shared.config()?)?;
            write_compressed(&cv, shared)
        }
        Command::Run(shared) => {
            let tokens = load_tokens(&shared.input)?;
            let cv = run_dyto(&tokens, &shared.config()?)?;
            write_compressed(&cv, shared)
        }
        Command::Baseline { shared, frames, grid } => {
            let tokens = load_tokens(&shared.input)?;
            let cfg = PipelineConfig {
                baseline_frames: *frames,
                baseline_grid: *grid,
                ..shared.config()?
            };
            let cv = run_baseline_uniform_pool(&tokens, &cfg)?;
            write_compressed(&cv, shared)
        }
        Command::Synth(args) => synth(args),
        Command::Bench(args) => bench(args),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(3) } else { ExitCode::SUCCESS };
        }
    };
    match std::panic::catch_unwind(|| dispatch(&cli)) {
        Ok(Ok(())) => ExitCode::SUCCESS,
        Ok(Err(e)) => {
            eprintln!("error: {e}");
            match e.category() {
                ErrorCategory::Format => ExitCode::from(2),
                ErrorCategory::Constraint => ExitCode::from(3),
            }
        }
        Err(_) => ExitCode::from(1),
    }
}
