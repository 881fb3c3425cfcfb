use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Subcommand};
use vsl_core::harness::augment::Augmentation;
use vsl_core::planner::{ProviderConfig, SystemInstruction};
use vsl_core::{
    augment_manifest, evaluate, run_benchmark, stats, AugmentRules, CandidateDatabase, CaptionMode, Manifest, Metric,
    RunConfig, SelectionStrategy, VideoSceneLayout,
};

use crate::{load_projector, read_text, read_vsl};

#[derive(Subcommand)]
pub enum BenchCommand {
    /// Plan and score every manifest sample, resuming from the run directory.
    Run(RunArgs),
    /// Print the scene and spatial attribute breakdown of a manifest.
    Stats {
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Append flipped and reversed copies of every original sample.
    Augment {
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Augmentations for stationary samples, comma separated, or "none".
        #[arg(long, default_value = "flip")]
        stationary: String,
        #[arg(long, default_value = "flip,reverse,flip+reverse")]
        translational: String,
    },
    /// Score a directory of `<id>.json` layouts against a manifest.
    Evaluate {
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long)]
        plans: PathBuf,
        #[arg(long)]
        projector: Option<PathBuf>,
        #[arg(long, default_value = "all")]
        metrics: String,
        /// Directory for report.json and report.txt.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
pub struct RunArgs {
    #[arg(long)]
    manifest: PathBuf,
    #[arg(long)]
    db: PathBuf,
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    profile: Option<String>,
    #[arg(long)]
    run_dir: PathBuf,
    #[arg(long)]
    projector: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    strategy: Option<String>,
    #[arg(long)]
    temperature: Option<f64>,
    #[arg(long, default_value = "mix")]
    caption_mode: CaptionMode,
    #[arg(long, default_value = "all")]
    metrics: String,
    #[arg(long, default_value_t = 4)]
    concurrency: usize,
    /// Resolves relative audio references. Defaults to the manifest directory.
    #[arg(long)]
    audio_root: Option<PathBuf>,
    /// Resolves relative embedding references. Defaults to the manifest directory.
    #[arg(long)]
    embedding_root: Option<PathBuf>,
    #[arg(long)]
    instruction: Option<PathBuf>,
}

fn manifest_dir(path: &Path) -> Option<PathBuf> {
    path.parent().map(Path::to_path_buf)
}

fn load_plans(dir: &Path, manifest: &Manifest) -> Result<HashMap<String, VideoSceneLayout>> {
    let mut plans = HashMap::new();
    for r in manifest.records() {
        let path = dir.join(format!("{}.json", r.id));
        if path.exists() {
            plans.insert(r.id.clone(), read_vsl(&path)?);
        }
    }
    Ok(plans)
}

fn bench_run(args: RunArgs) -> Result<()> {
    let manifest = Manifest::load(&args.manifest)?;
    let db = CandidateDatabase::load(&args.db).with_context(|| format!("loading {}", args.db.display()))?;
    let providers = ProviderConfig::load(&args.config)?;
    let mut cfg = RunConfig {
        plan: providers.plan_config(args.profile.as_deref())?,
        caption_mode: args.caption_mode,
        seed: args.seed,
        metrics: Metric::parse_list(&args.metrics).map_err(anyhow::Error::msg)?,
        concurrency: args.concurrency,
        embedding_root: args.embedding_root.or_else(|| manifest_dir(&args.manifest)),
        ..Default::default()
    };
    if let Some(k) = args.k {
        cfg.plan.k = k;
    }
    if let Some(s) = &args.strategy {
        cfg.plan.strategy = SelectionStrategy::parse(s, args.seed).map_err(anyhow::Error::msg)?;
    }
    if let Some(t) = args.temperature {
        cfg.plan.temperature = t;
    }
    let root = args.audio_root.or_else(|| manifest_dir(&args.manifest));
    let provider = providers.build(args.profile.as_deref(), root.as_deref())?;
    let instruction = match &args.instruction {
        Some(p) => SystemInstruction::from_template(read_text(p)?),
        None => SystemInstruction::default(),
    };
    let gts: Vec<&VideoSceneLayout> = manifest.records().iter().map(|r| &r.gt_vsl).collect();
    let projector = load_projector(args.projector.as_deref(), gts)?;
    let out = run_benchmark(&manifest, &db, &cfg, provider.as_ref(), &projector, &instruction, Some(&args.run_dir))?;
    eprintln!("planned {} sample(s), resumed {}, failed {}", out.planned, out.resumed, out.failures.len());
    print!("{}", out.report.to_text());
    Ok(())
}

pub fn run(cmd: BenchCommand) -> Result<ExitCode> {
    match cmd {
        BenchCommand::Run(args) => bench_run(args)?,
        BenchCommand::Stats { manifest, json } => {
            let s = stats(&Manifest::load(&manifest)?);
            if json {
                println!("{}", serde_json::to_string_pretty(&s)?);
            } else {
                print!("{s}");
            }
        }
        BenchCommand::Augment { manifest, out, stationary, translational } => {
            let rules = AugmentRules {
                stationary: Augmentation::parse_list(&stationary).map_err(anyhow::Error::msg)?,
                translational: Augmentation::parse_list(&translational).map_err(anyhow::Error::msg)?,
                ..Default::default()
            };
            let input = Manifest::load(&manifest)?;
            let augmented = augment_manifest(&input, &rules)?;
            augmented.save(&out)?;
            eprintln!("{} record(s) -> {}", input.len(), augmented.len());
        }
        BenchCommand::Evaluate { manifest, plans, projector, metrics, out } => {
            let manifest = Manifest::load(&manifest)?;
            let metrics = Metric::parse_list(&metrics).map_err(anyhow::Error::msg)?;
            let plans = load_plans(&plans, &manifest)?;
            let gts: Vec<&VideoSceneLayout> = manifest.records().iter().map(|r| &r.gt_vsl).collect();
            let projector = load_projector(projector.as_deref(), gts.into_iter().chain(plans.values()))?;
            let report = evaluate(&manifest, &plans, &projector, &metrics);
            if let Some(dir) = out {
                std::fs::create_dir_all(&dir)?;
                report.save(&dir)?;
            }
            print!("{}", report.to_text());
        }
    }
    Ok(ExitCode::SUCCESS)
}
