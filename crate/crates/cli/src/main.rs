mod bench;

use std::collections::BTreeSet;
use std::io::Read;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use serde_json::json;
use vsl_core::interpolate::conditions_to_json;
use vsl_core::metrics::{score_sequence_all, TableProjector};
use vsl_core::planner::{ProviderConfig, SystemInstruction};
use vsl_core::{
    build_conditions, interpolate, parse_response, rescale, serialize, validate, CandidateDatabase, CaptionMode,
    Canvas, EmbeddingVector, Metric, SelectionStrategy, TemplateConfig, VideoSceneLayout,
};

#[derive(Parser)]
#[command(name = "vsl", version, about = "Plan, inspect and score video scene layouts")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a model response (stdin or file) into layout JSON.
    Parse {
        #[arg(long)]
        template: Option<PathBuf>,
        input: Option<PathBuf>,
    },
    /// Render layout JSON in the response template.
    Render {
        #[arg(long)]
        template: Option<PathBuf>,
        vsl: PathBuf,
    },
    /// Check a layout against the structural rules.
    Validate {
        vsl: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Score a predicted layout against a ground-truth layout.
    Score {
        /// maxiou, docsim, ltsim or all; comma separated.
        #[arg(long, default_value = "all")]
        metric: String,
        /// JSON map of label to float array. Defaults to exact label matching.
        #[arg(long)]
        projector: Option<PathBuf>,
        #[arg(long)]
        json: bool,
        pred: PathBuf,
        gt: PathBuf,
    },
    /// Select in-context examples for a query embedding.
    Retrieve {
        #[arg(long)]
        db: PathBuf,
        #[arg(long)]
        query: PathBuf,
        #[arg(long, default_value_t = 3)]
        k: usize,
        #[arg(long, default_value = "knn")]
        strategy: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Plan a layout for one audio clip.
    Plan {
        #[arg(long)]
        db: PathBuf,
        #[arg(long)]
        audio: PathBuf,
        #[arg(long)]
        embedding: PathBuf,
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        profile: Option<String>,
        /// Resolves relative example audio references. Defaults to the database directory.
        #[arg(long)]
        audio_root: Option<PathBuf>,
        /// System instruction template file.
        #[arg(long)]
        instruction: Option<PathBuf>,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        strategy: Option<String>,
        #[arg(long)]
        temperature: Option<f64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Expand a layout into per-frame generation conditions.
    Conditions {
        vsl: PathBuf,
        #[arg(long, default_value_t = 16)]
        frames: usize,
        #[arg(long, default_value = "mix")]
        caption_mode: CaptionMode,
        /// Target canvas as WIDTHxHEIGHT.
        #[arg(long, default_value_t = Canvas::GENERATION)]
        canvas: Canvas,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Benchmark manifests, runs and reports.
    #[command(subcommand)]
    Bench(bench::BenchCommand),
}

pub(crate) fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

pub(crate) fn read_vsl(path: &Path) -> Result<VideoSceneLayout> {
    VideoSceneLayout::from_json(&read_text(path)?).with_context(|| format!("parsing {}", path.display()))
}

pub(crate) fn write_or_print(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn load_template(path: Option<&Path>) -> Result<TemplateConfig> {
    match path {
        Some(p) => serde_json::from_str(&read_text(p)?).with_context(|| format!("parsing {}", p.display())),
        None => Ok(TemplateConfig::default()),
    }
}

/// Table projector from a file, or one-hot vectors over `labels`.
pub(crate) fn load_projector<'a>(
    path: Option<&Path>,
    labels: impl IntoIterator<Item = &'a VideoSceneLayout>,
) -> Result<TableProjector> {
    match path {
        Some(p) => Ok(TableProjector::load(p)?),
        None => {
            let names: BTreeSet<&str> = labels
                .into_iter()
                .flat_map(|v| v.keyframes.iter())
                .flat_map(|k| k.boxes.iter())
                .map(|b| b.label.as_str())
                .collect();
            if names.is_empty() {
                bail!("no labels to build a projector from");
            }
            Ok(TableProjector::one_hot(names))
        }
    }
}

fn read_embedding(path: &Path) -> Result<EmbeddingVector> {
    EmbeddingVector::from_json(&read_text(path)?).map_err(|e| anyhow::anyhow!("{}: {e}", path.display()))
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Parse { template, input } => {
            let cfg = load_template(template.as_deref())?;
            let text = match input {
                Some(p) => read_text(&p)?,
                None => {
                    let mut s = String::new();
                    std::io::stdin().read_to_string(&mut s)?;
                    s
                }
            };
            let parsed = parse_response(&text, &cfg)?;
            println!("{}", parsed.vsl.to_json());
        }
        Command::Render { template, vsl } => {
            let cfg = load_template(template.as_deref())?;
            print!("{}", serialize(&read_vsl(&vsl)?, &cfg));
        }
        Command::Validate { vsl, json } => {
            let report = validate(&read_vsl(&vsl)?);
            if json {
                println!("{}", serde_json::to_string_pretty(&report)?);
            } else if report.is_clean() {
                println!("ok");
            } else {
                print!("{report}");
            }
            if !report.is_clean() {
                return Ok(ExitCode::FAILURE);
            }
        }
        Command::Score { metric, projector, json, pred, gt } => {
            let metrics = Metric::parse_list(&metric).map_err(anyhow::Error::msg)?;
            let (pred, gt) = (read_vsl(&pred)?, read_vsl(&gt)?);
            let projector = load_projector(projector.as_deref(), [&pred, &gt])?;
            let scores = score_sequence_all(&pred, &gt, &metrics, &projector)?;
            if json {
                let out: serde_json::Map<String, serde_json::Value> =
                    scores.iter().map(|s| (s.metric.name().to_string(), json!(s.display()))).collect();
                println!("{}", serde_json::to_string_pretty(&out)?);
            } else {
                let width = scores.iter().map(|s| s.metric.name().len()).max().unwrap_or(6).max(6);
                println!("{:<width$} | {:>6}", "Metric", "Score");
                println!("{}-+-{}", "-".repeat(width), "-".repeat(6));
                for s in &scores {
                    println!("{:<width$} | {:>6.2}", s.metric.name(), s.display());
                }
            }
        }
        Command::Retrieve { db, query, k, strategy, seed } => {
            let db = CandidateDatabase::load(&db)?;
            let strategy = SelectionStrategy::parse(&strategy, seed).map_err(anyhow::Error::msg)?;
            let query = read_embedding(&query)?;
            for n in db.select(&query, k, strategy)? {
                println!("{}", json!({"id": n.example.id, "similarity": n.similarity}));
            }
        }
        Command::Plan {
            db,
            audio,
            embedding,
            config,
            profile,
            audio_root,
            instruction,
            k,
            strategy,
            temperature,
            seed,
            out,
        } => {
            let providers = ProviderConfig::load(&config)?;
            let mut cfg = providers.plan_config(profile.as_deref())?;
            if let Some(k) = k {
                cfg.k = k;
            }
            if let Some(s) = strategy {
                cfg.strategy = SelectionStrategy::parse(&s, seed).map_err(anyhow::Error::msg)?;
            }
            if let Some(t) = temperature {
                cfg.temperature = t;
            }
            let root = audio_root.or_else(|| db.parent().map(Path::to_path_buf));
            let provider = providers.build(profile.as_deref(), root.as_deref())?;
            let instruction = match instruction {
                Some(p) => SystemInstruction::from_template(read_text(&p)?),
                None => SystemInstruction::default(),
            };
            let database = CandidateDatabase::load(&db)?;
            let audio = std::path::absolute(&audio)?;
            let query = read_embedding(&embedding)?;
            let outcome = vsl_core::plan(&audio.to_string_lossy(), &query, &database, &cfg, provider.as_ref(), &instruction)?;
            eprintln!("planned in {} attempt(s) with examples {}", outcome.attempts, outcome.examples.join(", "));
            write_or_print(out.as_deref(), &outcome.parsed.vsl.to_json())?;
        }
        Command::Conditions { vsl, frames, caption_mode, canvas, out } => {
            let vsl = rescale(&read_vsl(&vsl)?, canvas);
            let dense = interpolate(&vsl, frames)?;
            write_or_print(out.as_deref(), &conditions_to_json(&build_conditions(&dense, &vsl, caption_mode)))?;
        }
        Command::Bench(cmd) => return bench::run(cmd),
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
