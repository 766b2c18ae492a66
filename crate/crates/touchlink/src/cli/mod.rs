//! Command-line front end: one subcommand per pipeline stage, every run
//! config-driven and reproducible. Each invocation writes its artifacts
//! plus one `run_manifest.json` (resolved config snapshot, seed, artifact
//! paths, wall clock, tool version) under `--out`.
//!
//! Exit codes: 0 success, 1 usage or validation error, 2 runtime failure.

mod config;

pub use config::{DataSection, ModelSection, RunConfig, TrainSection};

use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::alignment::run_training;
use crate::curation::{curate, judge_from_env, pattern_filter, write_queue};
use crate::data::{
    generate_grasp, generate_synthetic, load_all, save_dataset, GraspConfig, SyntheticConfig,
};
use crate::encoders::{load_checkpoint, EncoderBundle};
use crate::eval::{
    chance_report, format_curriculum_table, format_scale_table, linear_probe_report, project_2d,
    run_curriculum_ablation, run_scale_ablation, split_samples, touch_embeddings,
    write_projection, zero_shot_report, EvalReport, PromptTemplateSet, TaskKind, TsneOptions,
};

#[derive(Debug)]
enum CliError {
    Validation(String),
    Runtime(String),
}

impl CliError {
    fn code(&self) -> i32 {
        match self {
            Self::Validation(_) => 1,
            Self::Runtime(_) => 2,
        }
    }

    fn message(&self) -> &str {
        match self {
            Self::Validation(m) | Self::Runtime(m) => m,
        }
    }
}

trait Validate<T> {
    fn or_invalid(self) -> Result<T, CliError>;
    fn or_runtime(self) -> Result<T, CliError>;
}

impl<T, E: std::fmt::Display> Validate<T> for Result<T, E> {
    fn or_invalid(self) -> Result<T, CliError> {
        self.map_err(|e| CliError::Validation(e.to_string()))
    }

    fn or_runtime(self) -> Result<T, CliError> {
        self.map_err(|e| CliError::Runtime(e.to_string()))
    }
}

#[derive(Parser, Debug)]
#[command(
    name = "touchlink",
    version,
    about = "Curriculum-linked touch-language-vision representation learning at desk scale"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a synthetic dataset (material classification or grasp).
    Gen(GenArgs),
    /// Run the regex pattern filter over a dataset and write a report.
    Filter(FilterArgs),
    /// Pattern-filter plus consistency judging; emits the correction queue.
    Curate(CurateArgs),
    /// Pretrain the touch representation on a dataset.
    Train(TrainArgs),
    /// Linear probing of a frozen checkpoint.
    Probe(EvalCmdArgs),
    /// Zero-shot classification with prompt templates.
    Zeroshot(EvalCmdArgs),
    /// Grasp-outcome prediction from pooled four-frame embeddings.
    Grasp(GraspArgs),
    /// Train at 25/50/75/100% of the train split and tabulate.
    AblateScale(AblateArgs),
    /// Paired runs with the curriculum schedule enabled and disabled.
    AblateCurriculum(AblateArgs),
    /// Project touch embeddings to 2-D and write CSV + scatter plot.
    Project(ProjectArgs),
    /// Chance-baseline calibration through the evaluation harness.
    Chance(ChanceArgs),
}

#[derive(Args, Debug)]
struct GenArgs {
    /// Dataset flavor: material | grasp
    #[arg(long, default_value = "material")]
    task: String,
    /// Number of classes (material) or pad texture classes (grasp).
    #[arg(long, default_value_t = 4)]
    m: usize,
    /// Total record count.
    #[arg(long, default_value_t = 256)]
    n: usize,
    #[arg(long, default_value_t = 32)]
    height: u32,
    #[arg(long, default_value_t = 32)]
    width: u32,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// Fraction of records given exactly one injected text defect.
    #[arg(long, default_value_t = 0.0)]
    corruption_rate: f64,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct FilterArgs {
    /// Dataset directory (manifest.json + records.jsonl).
    #[arg(long)]
    data: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct CurateArgs {
    #[arg(long)]
    data: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct TrainArgs {
    /// TOML config file; flags below override file values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Dataset directory (overrides [data].path).
    #[arg(long)]
    data: Option<PathBuf>,
    /// Output directory for metrics, checkpoint, and run manifest.
    #[arg(long)]
    out: PathBuf,
    /// Run seed [default: 7, or the config value].
    #[arg(long)]
    seed: Option<u64>,
    /// Epoch count [default: 12, or the config value].
    #[arg(long)]
    epochs: Option<usize>,
    /// Batch size K [default: 16, or the config value].
    #[arg(long)]
    batch_size: Option<usize>,
    /// Base learning rate [default: 2e-4, or the config value].
    #[arg(long)]
    base_lr: Option<f64>,
    /// Contrastive temperature [default: 0.07, or the config value].
    #[arg(long)]
    temperature: Option<f64>,
    /// Disable the curriculum schedule (ablation arm).
    #[arg(long)]
    no_curriculum: bool,
}

#[derive(Args, Debug)]
struct EvalCmdArgs {
    #[arg(long)]
    checkpoint: PathBuf,
    #[arg(long)]
    data: PathBuf,
    /// material | hard_soft | rough_smooth | grasp
    #[arg(long, default_value = "material")]
    task: String,
    #[arg(long, default_value = "test")]
    split: String,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct GraspArgs {
    #[arg(long)]
    checkpoint: PathBuf,
    /// Grasp dataset directory (four-frame records).
    #[arg(long)]
    data: PathBuf,
    /// probe | zeroshot | both
    #[arg(long, default_value = "both")]
    protocol: String,
    #[arg(long, default_value = "test")]
    split: String,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct AblateArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    data: Option<PathBuf>,
    #[arg(long, default_value = "test")]
    split: String,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct ProjectArgs {
    #[arg(long)]
    checkpoint: PathBuf,
    #[arg(long)]
    data: PathBuf,
    #[arg(long, default_value = "test")]
    split: String,
    /// Task whose labels color the plot.
    #[arg(long, default_value = "material")]
    task: String,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct ChanceArgs {
    #[arg(long, default_value_t = 20)]
    m: usize,
    #[arg(long, default_value_t = 10_000)]
    n: usize,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

/// Parse and run; returns the process exit code.
pub fn dispatch<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            return if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                0
            } else {
                eprint!("{e}");
                1
            };
        }
    };
    match run(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {}", e.message());
            e.code()
        }
    }
}

#[derive(Serialize)]
struct RunManifest {
    command: String,
    config: serde_json::Value,
    seed: u64,
    artifacts: Vec<String>,
    wall_clock_seconds: f64,
    version: String,
}

struct RunScope {
    command: String,
    out_dir: PathBuf,
    started: Instant,
    artifacts: Vec<String>,
}

impl RunScope {
    fn new(command: &str, out_dir: &Path) -> Result<Self, CliError> {
        std::fs::create_dir_all(out_dir).or_runtime()?;
        Ok(Self {
            command: command.to_string(),
            out_dir: out_dir.to_path_buf(),
            started: Instant::now(),
            artifacts: Vec::new(),
        })
    }

    fn record(&mut self, path: &Path) {
        self.artifacts.push(path.display().to_string());
    }

    fn finish(mut self, seed: u64, config: serde_json::Value) -> Result<(), CliError> {
        let manifest_path = self.out_dir.join("run_manifest.json");
        self.artifacts.push(manifest_path.display().to_string());
        let manifest = RunManifest {
            command: self.command,
            config,
            seed,
            artifacts: self.artifacts,
            wall_clock_seconds: self.started.elapsed().as_secs_f64(),
            version: env!("CARGO_PKG_VERSION").to_string(),
        };
        let body = serde_json::to_string_pretty(&manifest).or_runtime()?;
        std::fs::write(&manifest_path, body).or_runtime()?;
        Ok(())
    }
}

fn write_json<T: Serialize>(scope: &mut RunScope, name: &str, value: &T) -> Result<PathBuf, CliError> {
    let path = scope.out_dir.join(name);
    let body = serde_json::to_string_pretty(value).or_runtime()?;
    std::fs::write(&path, body).or_runtime()?;
    scope.record(&path);
    Ok(path)
}

fn write_text(scope: &mut RunScope, name: &str, body: &str) -> Result<PathBuf, CliError> {
    let path = scope.out_dir.join(name);
    std::fs::write(&path, body).or_runtime()?;
    scope.record(&path);
    Ok(path)
}

fn report_table(reports: &[&EvalReport]) -> String {
    let mut out = format!("{:<14} {:<14} {:>10} {:>8}\n", "Task", "Protocol", "Accuracy%", "N");
    for r in reports {
        out.push_str(&format!(
            "{:<14} {:<14} {:>10.1} {:>8}\n",
            r.task.name(),
            r.protocol.name(),
            r.accuracy * 100.0,
            r.total()
        ));
    }
    out
}

fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Gen(args) => cmd_gen(args),
        Command::Filter(args) => cmd_filter(args),
        Command::Curate(args) => cmd_curate(args),
        Command::Train(args) => cmd_train(args),
        Command::Probe(args) => cmd_eval(args, true),
        Command::Zeroshot(args) => cmd_eval(args, false),
        Command::Grasp(args) => cmd_grasp(args),
        Command::AblateScale(args) => cmd_ablate_scale(args),
        Command::AblateCurriculum(args) => cmd_ablate_curriculum(args),
        Command::Project(args) => cmd_project(args),
        Command::Chance(args) => cmd_chance(args),
    }
}

fn cmd_gen(args: GenArgs) -> Result<(), CliError> {
    let mut scope = RunScope::new("gen", &args.out)?;
    let (manifest, samples, config_json) = match args.task.as_str() {
        "material" => {
            let config = SyntheticConfig {
                class_count: args.m,
                samples: args.n,
                height: args.height,
                width: args.width,
                seed: args.seed,
                corruption_rate: args.corruption_rate,
            };
            let (manifest, samples) = generate_synthetic(&config).or_invalid()?;
            (manifest, samples, serde_json::json!({ "task": "material", "m": args.m, "n": args.n,
                "height": args.height, "width": args.width, "seed": args.seed,
                "corruption_rate": args.corruption_rate }))
        }
        "grasp" => {
            let config = GraspConfig {
                samples: args.n,
                texture_classes: args.m,
                height: args.height,
                width: args.width,
                seed: args.seed,
            };
            let (manifest, samples) = generate_grasp(&config).or_invalid()?;
            (manifest, samples, serde_json::json!({ "task": "grasp", "m": args.m, "n": args.n,
                "height": args.height, "width": args.width, "seed": args.seed }))
        }
        other => {
            return Err(CliError::Validation(format!(
                "unknown gen task '{other}' (expected material or grasp)"
            )))
        }
    };
    save_dataset(&args.out, &manifest, &samples).or_runtime()?;
    scope.record(&args.out.join("manifest.json"));
    scope.record(&args.out.join("records.jsonl"));
    eprintln!(
        "generated {} records ({} classes) under {}",
        manifest.size,
        manifest.class_names.len(),
        args.out.display()
    );
    scope.finish(args.seed, config_json)
}

fn cmd_filter(args: FilterArgs) -> Result<(), CliError> {
    let mut scope = RunScope::new("filter", &args.out)?;
    let (manifest, samples) = load_all(&args.data).or_invalid()?;
    let mut flagged = 0usize;
    let mut lines = String::new();
    for s in &samples {
        let report = pattern_filter(&s.sentence_description).with_id(&s.id);
        if !report.is_clean() {
            flagged += 1;
        }
        lines.push_str(&serde_json::to_string(&report).or_runtime()?);
        lines.push('\n');
    }
    write_text(&mut scope, "filter_report.jsonl", &lines)?;
    eprintln!("filtered {} records: {flagged} flagged", samples.len());
    scope.finish(
        manifest.seed,
        serde_json::json!({ "data": args.data.display().to_string() }),
    )
}

fn cmd_curate(args: CurateArgs) -> Result<(), CliError> {
    let mut scope = RunScope::new("curate", &args.out)?;
    let (manifest, samples) = load_all(&args.data).or_invalid()?;
    let judge = judge_from_env();
    let outcome = curate(&manifest, &samples, judge.as_ref()).or_runtime()?;
    let queue_path = scope.out_dir.join("correction_queue.jsonl");
    write_queue(&queue_path, &outcome.queue).or_runtime()?;
    scope.record(&queue_path);
    write_json(&mut scope, "clean_ids.json", &outcome.clean_ids)?;
    eprintln!(
        "curated {} records with the {} judge: {} clean, {} queued",
        samples.len(),
        judge.name(),
        outcome.clean_ids.len(),
        outcome.queue.len()
    );
    scope.finish(
        manifest.seed,
        serde_json::json!({ "data": args.data.display().to_string(), "judge": judge.name() }),
    )
}

fn resolve_data_path(
    flag: &Option<PathBuf>,
    section: &Option<PathBuf>,
    config_dir: Option<&Path>,
) -> Result<PathBuf, CliError> {
    if let Some(p) = flag {
        return Ok(p.clone());
    }
    match section {
        Some(p) if p.is_absolute() => Ok(p.clone()),
        Some(p) => Ok(config_dir.map(|d| d.join(p)).unwrap_or_else(|| p.clone())),
        None => Err(CliError::Validation(
            "no dataset: pass --data or set [data].path in the config".into(),
        )),
    }
}

fn load_run_config(path: &Option<PathBuf>) -> Result<(RunConfig, Option<PathBuf>), CliError> {
    let config = RunConfig::load_or_default(path.as_deref()).or_invalid()?;
    let dir = path
        .as_deref()
        .and_then(Path::parent)
        .map(Path::to_path_buf);
    Ok((config, dir))
}

fn apply_train_overrides(args: &TrainArgs, config: &mut RunConfig) {
    if let Some(seed) = args.seed {
        config.train.seed = seed;
    }
    if let Some(epochs) = args.epochs {
        config.train.epochs = epochs;
    }
    if let Some(batch) = args.batch_size {
        config.train.batch_size = batch;
    }
    if let Some(lr) = args.base_lr {
        config.train.base_lr = lr;
    }
    if let Some(tau) = args.temperature {
        config.train.temperature = tau;
    }
    if args.no_curriculum {
        config.train.curriculum = false;
    }
}

fn cmd_train(args: TrainArgs) -> Result<(), CliError> {
    let (mut config, config_dir) = load_run_config(&args.config)?;
    apply_train_overrides(&args, &mut config);
    let data_path = resolve_data_path(&args.data, &config.data.path, config_dir.as_deref())?;
    let mut scope = RunScope::new("train", &args.out)?;
    let (manifest, samples) = load_all(&data_path).or_invalid()?;
    let train_cfg = config.train.train_config();
    train_cfg.validate().or_invalid()?;
    let mut bundle = EncoderBundle::new(
        config.model.encoder_config(),
        config.model.lora_config(),
        train_cfg.temperature,
        train_cfg.seed,
    )
    .or_invalid()?;
    let output = run_training(&scope.out_dir, &mut bundle, &manifest, &samples, &train_cfg)
        .or_runtime()?;
    scope.record(&scope.out_dir.join("metrics.csv"));
    scope.record(&scope.out_dir.join("checkpoint.json"));
    let last_loss = output.metrics.last().map(|m| m.loss);
    eprintln!(
        "trained {} steps ({} per epoch); final loss {:?}",
        output.total_steps, output.steps_per_epoch, last_loss
    );
    let mut snapshot = serde_json::to_value(&config).or_runtime()?;
    snapshot["schedule"] = serde_json::to_value(output.schedule).or_runtime()?;
    scope.finish(train_cfg.seed, snapshot)
}

fn cmd_eval(args: EvalCmdArgs, probe: bool) -> Result<(), CliError> {
    let task = TaskKind::parse(&args.task).or_invalid()?;
    let mut scope = RunScope::new(if probe { "probe" } else { "zeroshot" }, &args.out)?;
    let (bundle, _meta) = load_checkpoint(&args.checkpoint).or_invalid()?;
    let (manifest, samples) = load_all(&args.data).or_invalid()?;
    let checkpoint_name = args.checkpoint.display().to_string();
    let report = if probe {
        linear_probe_report(
            &bundle, &manifest, &samples, task, "train", &args.split, &checkpoint_name, args.seed,
        )
        .or_runtime()?
        .0
    } else {
        let prompts = PromptTemplateSet::for_task(task, &manifest);
        zero_shot_report(
            &bundle, &manifest, &samples, task, &prompts, &args.split, &checkpoint_name, args.seed,
        )
        .or_runtime()?
    };
    write_json(&mut scope, "report.json", &report)?;
    write_text(&mut scope, "report.txt", &report_table(&[&report]))?;
    eprintln!(
        "{} {} accuracy {:.1}% over {} samples",
        report.task.name(),
        report.protocol.name(),
        report.accuracy * 100.0,
        report.total()
    );
    scope.finish(
        args.seed,
        serde_json::json!({
            "checkpoint": checkpoint_name,
            "data": args.data.display().to_string(),
            "task": task.name(),
            "split": args.split,
        }),
    )
}

fn cmd_grasp(args: GraspArgs) -> Result<(), CliError> {
    let mut scope = RunScope::new("grasp", &args.out)?;
    let (bundle, _meta) = load_checkpoint(&args.checkpoint).or_invalid()?;
    let (manifest, samples) = load_all(&args.data).or_invalid()?;
    let checkpoint_name = args.checkpoint.display().to_string();
    let mut reports = Vec::new();
    if args.protocol == "probe" || args.protocol == "both" {
        reports.push(
            linear_probe_report(
                &bundle,
                &manifest,
                &samples,
                TaskKind::Grasp,
                "train",
                &args.split,
                &checkpoint_name,
                args.seed,
            )
            .or_runtime()?
            .0,
        );
    }
    if args.protocol == "zeroshot" || args.protocol == "both" {
        let prompts = PromptTemplateSet::for_task(TaskKind::Grasp, &manifest);
        reports.push(
            zero_shot_report(
                &bundle,
                &manifest,
                &samples,
                TaskKind::Grasp,
                &prompts,
                &args.split,
                &checkpoint_name,
                args.seed,
            )
            .or_runtime()?,
        );
    }
    if reports.is_empty() {
        return Err(CliError::Validation(format!(
            "unknown protocol '{}' (expected probe, zeroshot, or both)",
            args.protocol
        )));
    }
    write_json(&mut scope, "reports.json", &reports)?;
    let refs: Vec<&EvalReport> = reports.iter().collect();
    write_text(&mut scope, "report.txt", &report_table(&refs))?;
    for r in &reports {
        eprintln!("grasp {} accuracy {:.1}%", r.protocol.name(), r.accuracy * 100.0);
    }
    scope.finish(
        args.seed,
        serde_json::json!({
            "checkpoint": checkpoint_name,
            "data": args.data.display().to_string(),
            "protocol": args.protocol,
        }),
    )
}

fn cmd_ablate_scale(args: AblateArgs) -> Result<(), CliError> {
    let (config, config_dir) = load_run_config(&args.config)?;
    let data_path = resolve_data_path(&args.data, &config.data.path, config_dir.as_deref())?;
    let mut scope = RunScope::new("ablate-scale", &args.out)?;
    let (manifest, samples) = load_all(&data_path).or_invalid()?;
    let train_cfg = config.train.train_config();
    train_cfg.validate().or_invalid()?;
    let rows = run_scale_ablation(
        &scope.out_dir,
        &manifest,
        &samples,
        &config.model.encoder_config(),
        &config.model.lora_config(),
        &train_cfg,
        TaskKind::Material,
        &args.split,
    )
    .or_runtime()?;
    write_json(&mut scope, "scale_ablation.json", &rows)?;
    let table = format_scale_table(&manifest.name, TaskKind::Material, &rows);
    write_text(&mut scope, "scale_table.txt", &table)?;
    eprint!("{table}");
    scope.finish(train_cfg.seed, serde_json::to_value(&config).or_runtime()?)
}

fn cmd_ablate_curriculum(args: AblateArgs) -> Result<(), CliError> {
    let (config, config_dir) = load_run_config(&args.config)?;
    let data_path = resolve_data_path(&args.data, &config.data.path, config_dir.as_deref())?;
    let mut scope = RunScope::new("ablate-curriculum", &args.out)?;
    let (manifest, samples) = load_all(&data_path).or_invalid()?;
    let train_cfg = config.train.train_config();
    train_cfg.validate().or_invalid()?;
    let tasks = [TaskKind::Material, TaskKind::HardSoft, TaskKind::RoughSmooth];
    let ablation = run_curriculum_ablation(
        &scope.out_dir,
        &manifest,
        &samples,
        &config.model.encoder_config(),
        &config.model.lora_config(),
        &train_cfg,
        &tasks,
        &args.split,
    )
    .or_runtime()?;
    write_json(&mut scope, "curriculum_ablation.json", &ablation)?;
    let table = format_curriculum_table(&ablation);
    write_text(&mut scope, "curriculum_table.txt", &table)?;
    eprint!("{table}");
    scope.finish(train_cfg.seed, serde_json::to_value(&config).or_runtime()?)
}

fn cmd_project(args: ProjectArgs) -> Result<(), CliError> {
    let task = TaskKind::parse(&args.task).or_invalid()?;
    let mut scope = RunScope::new("project", &args.out)?;
    let (bundle, _meta) = load_checkpoint(&args.checkpoint).or_invalid()?;
    let (manifest, samples) = load_all(&args.data).or_invalid()?;
    let subset = split_samples(&manifest, &samples, &args.split).or_invalid()?;
    let embeddings = touch_embeddings(&bundle, &subset, task).or_runtime()?;
    let coords = project_2d(&embeddings, &TsneOptions { seed: args.seed, ..Default::default() })
        .or_runtime()?;
    let ids: Vec<String> = subset.iter().map(|s| s.id.clone()).collect();
    let labels: Vec<usize> = subset
        .iter()
        .map(|s| task.label_of(s))
        .collect::<Result<_, _>>()
        .or_runtime()?;
    let classes = task.class_names(&manifest).len();
    let stem = scope.out_dir.join("projection");
    let (csv_path, png_path) =
        write_projection(&stem, &ids, &labels, classes, &coords).or_runtime()?;
    scope.record(&csv_path);
    scope.record(&png_path);
    eprintln!("projected {} embeddings to {}", ids.len(), csv_path.display());
    scope.finish(
        args.seed,
        serde_json::json!({
            "checkpoint": args.checkpoint.display().to_string(),
            "data": args.data.display().to_string(),
            "task": task.name(),
            "split": args.split,
        }),
    )
}

fn cmd_chance(args: ChanceArgs) -> Result<(), CliError> {
    let mut scope = RunScope::new("chance", &args.out)?;
    let report = chance_report(args.m, args.n, args.seed).or_invalid()?;
    write_json(&mut scope, "report.json", &report)?;
    eprintln!(
        "chance baseline over {} draws with m={}: {:.2}%",
        args.n,
        args.m,
        report.accuracy * 100.0
    );
    scope.finish(args.seed, serde_json::json!({ "m": args.m, "n": args.n }))
}
