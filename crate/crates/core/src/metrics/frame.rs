use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::assignment::{solve_assignment, MatchWeightMatrix};
use super::geometry::{giou, iou};
use super::projector::{soft_label_sim, LabelProjector};
use super::transport::solve_uniform_transport;
use super::MetricError;
use crate::layout::{BoundingBox, Canvas};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Metric {
    #[serde(rename = "maxiou")]
    MaxIou,
    #[serde(rename = "ltsim")]
    LtSim,
    #[serde(rename = "docsim")]
    DocSim,
}

impl Metric {
    pub const ALL: [Metric; 3] = [Metric::MaxIou, Metric::LtSim, Metric::DocSim];

    pub fn name(&self) -> &'static str {
        match self {
            Metric::MaxIou => "MaxIoU",
            Metric::LtSim => "LTSim",
            Metric::DocSim => "DocSim",
        }
    }

    /// Parses `maxiou`, `ltsim`, `docsim`, `all` or a comma-separated list.
    pub fn parse_list(s: &str) -> Result<Vec<Metric>, String> {
        let mut out = Vec::new();
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            if part.eq_ignore_ascii_case("all") {
                out.extend(Metric::ALL);
            } else {
                out.push(part.parse()?);
            }
        }
        out.sort();
        out.dedup();
        if out.is_empty() {
            return Err("no metrics given".into());
        }
        Ok(out)
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Metric {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "maxiou" => Ok(Metric::MaxIou),
            "ltsim" => Ok(Metric::LtSim),
            "docsim" => Ok(Metric::DocSim),
            other => Err(format!("unknown metric {other:?}")),
        }
    }
}

/// One layout: the boxes of a single frame on its canvas.
#[derive(Debug, Clone, Copy)]
pub struct Frame<'a> {
    pub canvas: Canvas,
    pub boxes: &'a [BoundingBox],
}

impl<'a> Frame<'a> {
    pub fn new(canvas: Canvas, boxes: &'a [BoundingBox]) -> Self {
        Frame { canvas, boxes }
    }
}

fn non_empty(a: &Frame, b: &Frame) -> Result<(), MetricError> {
    if a.boxes.is_empty() || b.boxes.is_empty() {
        return Err(MetricError::EmptyLayout);
    }
    Ok(())
}

/// Pairwise weights `soft_label_sim(i, j) * kernel(i, j)`. Label similarities
/// are computed once per distinct label pair.
fn weight_matrix(
    a: &Frame,
    b: &Frame,
    projector: &dyn LabelProjector,
    kernel: impl Fn(&BoundingBox, &BoundingBox) -> f64,
) -> Result<MatchWeightMatrix, MetricError> {
    let mut labels: HashMap<(&str, &str), f64> = HashMap::new();
    let mut w = MatchWeightMatrix::zeros(a.boxes.len(), b.boxes.len());
    for (i, bi) in a.boxes.iter().enumerate() {
        for (j, bj) in b.boxes.iter().enumerate() {
            let key = (bi.label.as_str(), bj.label.as_str());
            let sim = match labels.get(&key) {
                Some(&s) => s,
                None => {
                    let s = soft_label_sim(key.0, key.1, projector)?;
                    labels.insert(key, s);
                    s
                }
            };
            if sim > 0.0 {
                w.set(i, j, sim * kernel(bi, bj));
            }
        }
    }
    Ok(w)
}

fn normalizer(a: &Frame, b: &Frame) -> f64 {
    a.boxes.len().max(b.boxes.len()) as f64
}

/// Matched soft-weighted IoU, normalized by the larger box count.
pub fn max_iou_frame(a: Frame, b: Frame, projector: &dyn LabelProjector) -> Result<f64, MetricError> {
    non_empty(&a, &b)?;
    let w = weight_matrix(&a, &b, projector, iou)?;
    Ok((solve_assignment(&w).total / normalizer(&a, &b)).clamp(0.0, 1.0))
}

/// Position/size kernel for one box pair on a shared canvas.
pub fn docsim_kernel(a: &BoundingBox, b: &BoundingBox, canvas: Canvas) -> f64 {
    let diag = canvas.diagonal();
    let (ax, ay) = a.center();
    let (bx, by) = b.center();
    let center_shift = (ax - bx).hypot(ay - by) / diag;
    let size_shift = ((a.w - b.w).abs() + (a.h - b.h).abs()) / diag;
    let area = a.area().sqrt().min(b.area().sqrt()) / canvas.area().sqrt();
    area * (-center_shift - 2.0 * size_shift).exp2()
}

/// Matched position/size kernel normalized by the larger box count. A layout
/// compared with itself scores its mean area factor, not 1.
pub fn docsim_raw_frame(a: Frame, b: Frame, projector: &dyn LabelProjector) -> Result<f64, MetricError> {
    non_empty(&a, &b)?;
    if a.canvas != b.canvas {
        return Err(MetricError::CanvasMismatch { left: a.canvas, right: b.canvas });
    }
    let canvas = a.canvas;
    let w = weight_matrix(&a, &b, projector, |x, y| docsim_kernel(x, y, canvas))?;
    Ok((solve_assignment(&w).total / normalizer(&a, &b)).clamp(0.0, 1.0))
}

/// Raw DocSim divided by the geometric mean of both self-scores, so that
/// identical layouts score 1. Each self-score bounds the cross score from
/// above, hence the result stays in [0, 1].
pub fn docsim_frame(a: Frame, b: Frame, projector: &dyn LabelProjector) -> Result<f64, MetricError> {
    let cross = docsim_raw_frame(a, b, projector)?;
    if cross == 0.0 {
        return Ok(0.0);
    }
    let self_a = docsim_raw_frame(a, a, projector)?;
    let self_b = docsim_raw_frame(b, b, projector)?;
    Ok((cross / (self_a * self_b).sqrt()).clamp(0.0, 1.0))
}

/// Rescaled gIoU similarity in [0, 1] used as the transport reward.
pub fn ltsim_pair(a: &BoundingBox, b: &BoundingBox) -> f64 {
    (giou(a, b) + 1.0) / 2.0
}

/// Optimal-transport similarity with uniform box masses.
pub fn ltsim_frame(a: Frame, b: Frame, projector: &dyn LabelProjector) -> Result<f64, MetricError> {
    non_empty(&a, &b)?;
    let s = weight_matrix(&a, &b, projector, ltsim_pair)?;
    let plan = solve_uniform_transport(&s).ok_or(MetricError::EmptyLayout)?;
    Ok(plan.value.clamp(0.0, 1.0))
}

pub fn frame_score(metric: Metric, a: Frame, b: Frame, projector: &dyn LabelProjector) -> Result<f64, MetricError> {
    match metric {
        Metric::MaxIou => max_iou_frame(a, b, projector),
        Metric::LtSim => ltsim_frame(a, b, projector),
        Metric::DocSim => docsim_frame(a, b, projector),
    }
}
