//! Benchmark manifests, augmentation, statistics, evaluation and runs.

pub mod augment;
pub mod evaluate;
pub mod manifest;
pub mod report;
pub mod run;
pub mod stats;

use thiserror::Error;

pub use augment::{augment_manifest, augment_record, AugmentRules, Augmentation};
pub use evaluate::{evaluate, SampleScore};
pub use manifest::{Domain, Manifest, ManifestMetadata, Provenance, SampleRecord, Sources, SpatialTag};
pub use report::{Cell, DomainCells, MetricTable, ReportConfig, SimilarityReport};
pub use run::{run_benchmark, sample_seed, RunConfig, RunOutput};
pub use stats::{stats, BreakdownStats, SceneDistribution, SpatialAttributes};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("line {line}: {message}")]
    Schema { line: usize, message: String },
    #[error("duplicate sample id {0:?}")]
    DuplicateId(String),
    #[error("sample {id:?}: {message}")]
    InvalidRecord { id: String, message: String },
    #[error("rule violation for {subject}: {message}")]
    RuleViolation { subject: String, message: String },
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
