//! Planning, representation and evaluation tooling for audio-driven video
//! scene layouts.
//!
//! A video scene layout ([`VideoSceneLayout`]) is a short sequence of keyframe
//! layouts, each a set of labeled, identity-tracked bounding boxes with a
//! local caption, plus a global caption. The crate covers:
//!
//! * [`layout`]: validation and geometric augmentations
//! * [`interpolate`]: keyframe expansion and generator conditions
//! * [`parser`]: the text template exchanged with the planning model
//! * [`metrics`]: MaxIoU / DocSim / LTSim with soft label matching
//! * [`retrieval`]: in-context example selection
//! * [`planner`]: prompt assembly and chat-completion providers
//! * [`harness`]: benchmark manifests, augmentation, evaluation and runs

pub mod harness;
pub mod interpolate;
pub mod layout;
pub mod metrics;
pub mod parser;
pub mod planner;
pub mod retrieval;

pub use interpolate::{build_conditions, interpolate, CaptionMode, CaptionSource, DenseLayoutSequence, GenerationCondition};
pub use layout::{
    clamp_to_canvas, flip_horizontal, rescale, reverse_temporal, validate, BoundingBox, Canvas, KeyframeLayout,
    LayoutError, ValidationReport, VideoSceneLayout,
};
pub use metrics::{score_sequence, LabelProjector, Metric, SequenceScore};
pub use parser::{parse_response, serialize, ParseError, ParsedResponse, TemplateConfig};
pub use planner::{plan, ChatProvider, PlanConfig, PlanError, PlanOutcome};
pub use retrieval::{CandidateDatabase, EmbeddingVector, ExampleConversation, SelectionStrategy};
pub use harness::{
    augment_manifest, evaluate, run_benchmark, stats, AugmentRules, Manifest, RunConfig, SampleRecord,
    SimilarityReport,
};
