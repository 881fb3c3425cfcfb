use serde::{Deserialize, Serialize};

use super::frame::{frame_score, Frame, Metric};
use super::projector::LabelProjector;
use super::MetricError;
use crate::interpolate::{interpolate, DenseLayoutSequence};
use crate::layout::{rescale, VideoSceneLayout};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SequenceScore {
    pub metric: Metric,
    pub per_frame: Vec<f64>,
    pub mean: f64,
    /// Frames where either side had no boxes; they score 0.
    pub empty_frames: usize,
}

impl SequenceScore {
    pub fn from_frames(metric: Metric, per_frame: Vec<f64>, empty_frames: usize) -> Self {
        let mean = if per_frame.is_empty() { 0.0 } else { per_frame.iter().sum::<f64>() / per_frame.len() as f64 };
        SequenceScore { metric, per_frame, mean, empty_frames }
    }

    /// Mean on the x100 scale used in reports.
    pub fn display(&self) -> f64 {
        self.mean * 100.0
    }
}

/// Brings the prediction onto the ground-truth canvas and expands both to
/// the longer of the two keyframe counts.
fn align(pred: &VideoSceneLayout, gt: &VideoSceneLayout) -> Result<(DenseLayoutSequence, DenseLayoutSequence), MetricError> {
    let pred = rescale(pred, gt.canvas);
    let frames = pred.keyframes.len().max(gt.keyframes.len());
    Ok((interpolate(&pred, frames)?, interpolate(gt, frames)?))
}

fn score_aligned(
    pred: &DenseLayoutSequence,
    gt: &DenseLayoutSequence,
    metric: Metric,
    projector: &dyn LabelProjector,
) -> Result<SequenceScore, MetricError> {
    let mut per_frame = Vec::with_capacity(gt.frames.len());
    let mut empty = 0;
    for (p, g) in pred.frames.iter().zip(&gt.frames) {
        let score = match frame_score(metric, Frame::new(pred.canvas, &p.boxes), Frame::new(gt.canvas, &g.boxes), projector) {
            Err(MetricError::EmptyLayout) => {
                empty += 1;
                0.0
            }
            other => other?,
        };
        per_frame.push(score);
    }
    if empty > 0 {
        log::warn!("{metric}: {empty} of {} frames empty on one side, scored 0", per_frame.len());
    }
    Ok(SequenceScore::from_frames(metric, per_frame, empty))
}

/// Frame-averaged similarity between a predicted and a ground-truth layout.
pub fn score_sequence(
    pred: &VideoSceneLayout,
    gt: &VideoSceneLayout,
    metric: Metric,
    projector: &dyn LabelProjector,
) -> Result<SequenceScore, MetricError> {
    let (p, g) = align(pred, gt)?;
    score_aligned(&p, &g, metric, projector)
}

/// Like [`score_sequence`] for several metrics, aligning once.
pub fn score_sequence_all(
    pred: &VideoSceneLayout,
    gt: &VideoSceneLayout,
    metrics: &[Metric],
    projector: &dyn LabelProjector,
) -> Result<Vec<SequenceScore>, MetricError> {
    let (p, g) = align(pred, gt)?;
    metrics.iter().map(|&m| score_aligned(&p, &g, m, projector)).collect()
}
