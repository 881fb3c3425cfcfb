//! Resumable end-to-end benchmark runs.
//!
//! Run directory layout:
//!
//! ```text
//! <run_dir>/config.json        settings of the latest invocation
//! <run_dir>/plans/<id>.json    completed layout per sample, skipped on resume
//! <run_dir>/partial/<id>.json  best partial layout of a failed sample
//! <run_dir>/failures.json      sample id -> failure reason
//! <run_dir>/report.json
//! <run_dir>/report.txt
//! ```

use std::collections::{BTreeMap, HashMap};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};
use std::sync::Mutex;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::evaluate::evaluate_with;
use super::manifest::{Manifest, SampleRecord};
use super::report::{ReportConfig, SimilarityReport};
use super::HarnessError;
use crate::interpolate::CaptionMode;
use crate::layout::VideoSceneLayout;
use crate::metrics::{LabelProjector, Metric};
use crate::planner::{plan_excluding, ChatProvider, PlanConfig, PlanError, ProviderError, SystemInstruction};
use crate::retrieval::{CandidateDatabase, SelectionStrategy};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    pub plan: PlanConfig,
    /// Recorded in the report; layouts are scored before captions are used.
    pub caption_mode: CaptionMode,
    /// Base seed for random example selection, mixed with each sample id.
    pub seed: u64,
    pub metrics: Vec<Metric>,
    /// Samples planned in parallel.
    pub concurrency: usize,
    /// Keep a sample out of its own in-context examples when the database
    /// contains the same id.
    pub exclude_self: bool,
    /// Base directory for relative `embedding_ref` paths.
    pub embedding_root: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            plan: PlanConfig::default(),
            caption_mode: CaptionMode::Mix,
            seed: 0,
            metrics: Metric::ALL.to_vec(),
            concurrency: 4,
            exclude_self: true,
            embedding_root: None,
        }
    }
}

impl RunConfig {
    pub fn report_config(&self) -> ReportConfig {
        ReportConfig {
            k: Some(self.plan.k),
            strategy: Some(self.plan.strategy.name().to_string()),
            temperature: Some(self.plan.temperature),
            caption_mode: Some(self.caption_mode),
            seed: Some(self.seed),
            model: Some(self.plan.model.clone()),
        }
    }

    /// Plan settings for one sample. Random selection gets a seed derived
    /// from the base seed and the sample id, so results do not depend on
    /// scheduling order.
    pub fn plan_for(&self, id: &str) -> PlanConfig {
        let mut cfg = self.plan.clone();
        if let SelectionStrategy::Random { .. } = cfg.strategy {
            cfg.strategy = SelectionStrategy::Random { seed: sample_seed(self.seed, id) };
        }
        cfg
    }
}

/// Stable per-sample seed.
pub fn sample_seed(seed: u64, id: &str) -> u64 {
    let mut h = Sha256::new();
    h.update(seed.to_le_bytes());
    h.update(id.as_bytes());
    u64::from_le_bytes(h.finalize()[..8].try_into().unwrap())
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub report: SimilarityReport,
    /// Layouts that were scored: completed plans and partial ones.
    pub plans: HashMap<String, VideoSceneLayout>,
    /// Sample id to failure reason.
    pub failures: BTreeMap<String, String>,
    /// Samples planned by this invocation.
    pub planned: usize,
    /// Samples taken from existing plan artifacts.
    pub resumed: usize,
}

fn safe_id(id: &str) -> bool {
    !id.is_empty()
        && !id.starts_with('.')
        && id.chars().all(|c| c.is_ascii_alphanumeric() || matches!(c, '-' | '_' | '.' | '+'))
}

fn write_atomic(path: &Path, contents: &str) -> std::io::Result<()> {
    let tmp = path.with_extension("json.tmp");
    std::fs::write(&tmp, contents)?;
    std::fs::rename(&tmp, path)
}

enum Outcome {
    Planned(VideoSceneLayout),
    Failed { reason: String, partial: Option<VideoSceneLayout> },
}

fn plan_one(
    record: &SampleRecord,
    db: &CandidateDatabase,
    cfg: &RunConfig,
    provider: &dyn ChatProvider,
    instruction: &SystemInstruction,
) -> Result<Outcome, ProviderError> {
    let embedding = match record.load_embedding(cfg.embedding_root.as_deref()) {
        Ok(e) => e,
        Err(reason) => return Ok(Outcome::Failed { reason, partial: None }),
    };
    let excluded: Vec<&str> = if cfg.exclude_self { vec![record.id.as_str()] } else { Vec::new() };
    let plan_cfg = cfg.plan_for(&record.id);
    match plan_excluding(&record.audio_ref, &embedding, db, &plan_cfg, provider, instruction, &excluded) {
        Ok(out) => Ok(Outcome::Planned(out.parsed.vsl)),
        Err(PlanError::Provider { source: source @ ProviderError::Auth(_), .. }) => Err(source),
        Err(PlanError::ExhaustedRetries { last_error, partial, attempts }) => Ok(Outcome::Failed {
            reason: format!("no usable layout after {attempts} attempt(s): {last_error}"),
            partial: partial.map(|p| p.vsl),
        }),
        Err(e) => Ok(Outcome::Failed { reason: e.to_string(), partial: None }),
    }
}

/// Plans every manifest sample that has no completed artifact in `run_dir`,
/// then scores all of them. Per-sample failures score 0; authentication
/// failures and invalid settings abort the run.
pub fn run_benchmark(
    manifest: &Manifest,
    db: &CandidateDatabase,
    cfg: &RunConfig,
    provider: &dyn ChatProvider,
    projector: &dyn LabelProjector,
    instruction: &SystemInstruction,
    run_dir: Option<&Path>,
) -> Result<RunOutput, HarnessError> {
    cfg.plan.check().map_err(|e| HarnessError::Config(e.to_string()))?;
    if cfg.plan.k > db.len() {
        return Err(HarnessError::Config(format!("k={} exceeds database size {}", cfg.plan.k, db.len())));
    }
    if let Some(dir) = run_dir {
        if let Some(bad) = manifest.records().iter().find(|r| !safe_id(&r.id)) {
            return Err(HarnessError::InvalidRecord {
                id: bad.id.clone(),
                message: "id is not usable as a file name".into(),
            });
        }
        std::fs::create_dir_all(dir.join("plans"))?;
        std::fs::create_dir_all(dir.join("partial"))?;
        std::fs::write(dir.join("config.json"), serde_json::to_string_pretty(cfg).expect("config serializes"))?;
    }

    let mut plans = HashMap::new();
    let mut todo = Vec::new();
    for r in manifest.records() {
        let existing = run_dir.map(|d| d.join("plans").join(format!("{}.json", r.id)));
        match existing.filter(|p| p.exists()).map(|p| std::fs::read_to_string(&p)) {
            Some(Ok(text)) => match VideoSceneLayout::from_json(&text) {
                Ok(vsl) => {
                    plans.insert(r.id.clone(), vsl);
                    continue;
                }
                Err(e) => log::warn!("{}: unreadable plan artifact ({e}), planning again", r.id),
            },
            Some(Err(e)) => log::warn!("{}: unreadable plan artifact ({e}), planning again", r.id),
            None => {}
        }
        todo.push(r);
    }
    let resumed = plans.len();

    let next = AtomicUsize::new(0);
    let abort = AtomicBool::new(false);
    let results: Mutex<Vec<(usize, Outcome)>> = Mutex::new(Vec::with_capacity(todo.len()));
    let fatal: Mutex<Option<ProviderError>> = Mutex::new(None);
    let workers = cfg.concurrency.max(1).min(todo.len().max(1));
    std::thread::scope(|s| {
        for _ in 0..workers {
            s.spawn(|| loop {
                if abort.load(Ordering::SeqCst) {
                    return;
                }
                let i = next.fetch_add(1, Ordering::SeqCst);
                let Some(record) = todo.get(i) else { return };
                match plan_one(record, db, cfg, provider, instruction) {
                    Ok(outcome) => {
                        if let (Some(dir), Outcome::Planned(vsl)) = (run_dir, &outcome) {
                            let path = dir.join("plans").join(format!("{}.json", record.id));
                            if let Err(e) = write_atomic(&path, &vsl.to_json()) {
                                log::warn!("{}: could not save plan: {e}", record.id);
                            }
                        }
                        results.lock().unwrap().push((i, outcome));
                    }
                    Err(e) => {
                        abort.store(true, Ordering::SeqCst);
                        fatal.lock().unwrap().get_or_insert(e);
                        return;
                    }
                }
            });
        }
    });
    if let Some(e) = fatal.into_inner().unwrap() {
        return Err(HarnessError::Config(format!("provider rejected the run: {e}")));
    }

    let mut results = results.into_inner().unwrap();
    results.sort_by_key(|(i, _)| *i);
    let planned = results.len();
    let mut failures = BTreeMap::new();
    for (i, outcome) in results {
        let id = &todo[i].id;
        match outcome {
            Outcome::Planned(vsl) => {
                plans.insert(id.clone(), vsl);
            }
            Outcome::Failed { reason, partial } => {
                if let Some(vsl) = partial {
                    if let Some(dir) = run_dir {
                        write_atomic(&dir.join("partial").join(format!("{id}.json")), &vsl.to_json())?;
                    }
                    plans.insert(id.clone(), vsl);
                }
                failures.insert(id.clone(), reason);
            }
        }
    }

    let reasons: HashMap<String, String> = failures.clone().into_iter().collect();
    let mut report = evaluate_with(manifest, &plans, projector, &cfg.metrics, &reasons, cfg.report_config());
    // Partial layouts earn their score but the sample still counts as failed.
    for s in &mut report.per_sample {
        if let Some(reason) = failures.get(&s.id) {
            s.failure = Some(reason.clone());
        }
    }
    report.failures = report.per_sample.iter().filter(|s| s.failure.is_some()).count();
    if let Some(dir) = run_dir {
        std::fs::write(dir.join("failures.json"), serde_json::to_string_pretty(&failures).expect("map serializes"))?;
        report.save(dir)?;
    }
    Ok(RunOutput { report, plans, failures, planned, resumed })
}
