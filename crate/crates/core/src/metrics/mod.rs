//! Layout similarity: MaxIoU, DocSim and LTSim with a soft label indicator,
//! plus per-sequence averaging.

pub mod assignment;
pub mod frame;
pub mod geometry;
pub mod projector;
pub mod sequence;
pub mod transport;

use thiserror::Error;

use crate::interpolate::InterpolateError;
use crate::layout::Canvas;

pub use assignment::{solve_assignment, Assignment, MatchWeightMatrix};
pub use frame::{docsim_frame, docsim_raw_frame, frame_score, ltsim_frame, max_iou_frame, Frame, Metric};
pub use geometry::{giou, iou};
pub use projector::{soft_label_sim, HashProjector, LabelProjector, ProjectorError, TableProjector};
pub use sequence::{score_sequence, score_sequence_all, SequenceScore};
pub use transport::{solve_uniform_transport, TransportPlan};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MetricError {
    #[error("one of the layouts has no boxes")]
    EmptyLayout,
    #[error("canvas mismatch: {left} vs {right}")]
    CanvasMismatch { left: Canvas, right: Canvas },
    #[error(transparent)]
    Projector(#[from] ProjectorError),
    #[error(transparent)]
    Interpolate(#[from] InterpolateError),
}
