//! Keyframe-to-dense interpolation and per-frame generation conditions.
//!
//! Keyframe `j` of an `N`-keyframe layout sits at dense time
//! `t_j = j * (n - 1) / (N - 1)`, so the first and last keyframes land on the
//! first and last dense frames. Between two anchors every coordinate of an
//! object present at both is linear in time; an object missing from either
//! anchor of a segment is absent inside it.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::layout::{BoundingBox, Canvas, KeyframeLayout, VideoSceneLayout};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum InterpolateError {
    #[error("cannot expand {keyframes} keyframes into {frames} frames")]
    BadFrameCount { frames: usize, keyframes: usize },
    #[error("layout has no keyframes")]
    NoKeyframes,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DenseLayoutSequence {
    pub canvas: Canvas,
    pub frames: Vec<KeyframeLayout>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum CaptionMode {
    #[default]
    Mix,
    Global,
    Local,
}

impl std::str::FromStr for CaptionMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "mix" => Ok(CaptionMode::Mix),
            "global" => Ok(CaptionMode::Global),
            "local" => Ok(CaptionMode::Local),
            other => Err(format!("unknown caption mode {other:?}")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CaptionSource {
    Global,
    Local,
}

/// One dense frame's grounding boxes and text prompt.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerationCondition {
    pub frame_index: u32,
    pub caption: String,
    pub caption_source: CaptionSource,
    pub boxes: Vec<BoundingBox>,
}

/// Dense-time position of every keyframe.
pub fn anchor_times(keyframes: usize, frames: usize) -> Vec<f64> {
    match keyframes {
        0 => Vec::new(),
        1 => vec![0.0],
        _ => {
            let span = (frames.max(1) - 1) as f64;
            let gaps = (keyframes - 1) as f64;
            (0..keyframes).map(|j| (j as f64 * span) / gaps).collect()
        }
    }
}

/// Nearest integer frame for an anchor, halves rounding up.
pub fn anchor_frame(t: f64) -> u32 {
    (t + 0.5).floor() as u32
}

fn lerp(a: f64, b: f64, u: f64) -> f64 {
    a + (b - a) * u
}

/// Evaluates the piecewise-linear layout at dense time `t` of an `n`-frame
/// expansion. `t` need not be an integer.
pub fn sample_at(vsl: &VideoSceneLayout, frames: usize, t: f64) -> Vec<BoundingBox> {
    let keyframes = &vsl.keyframes;
    let anchors = anchor_times(keyframes.len(), frames);
    match keyframes.len() {
        0 => return Vec::new(),
        1 => return keyframes[0].boxes.clone(),
        _ => {}
    }
    if let Some(j) = anchors.iter().position(|&a| a == t) {
        return keyframes[j].boxes.clone();
    }
    let Some(j) = anchors.windows(2).position(|w| w[0] < t && t < w[1]) else {
        return Vec::new();
    };
    let (t0, t1) = (anchors[j], anchors[j + 1]);
    let u = (t - t0) / (t1 - t0);
    let next = &keyframes[j + 1];
    keyframes[j]
        .boxes
        .iter()
        .filter_map(|a| {
            let b = next.find(a.object_id)?;
            Some(BoundingBox {
                object_id: a.object_id,
                label: a.label.clone(),
                x: lerp(a.x, b.x, u),
                y: lerp(a.y, b.y, u),
                w: lerp(a.w, b.w, u),
                h: lerp(a.h, b.h, u),
            })
        })
        .collect()
}

/// Expands the keyframes into `frames` evenly spaced layouts.
pub fn interpolate(vsl: &VideoSceneLayout, frames: usize) -> Result<DenseLayoutSequence, InterpolateError> {
    let keyframes = vsl.keyframes.len();
    if keyframes == 0 {
        return Err(InterpolateError::NoKeyframes);
    }
    if frames < keyframes {
        return Err(InterpolateError::BadFrameCount { frames, keyframes });
    }
    let anchors = anchor_times(keyframes, frames);
    let dense = (0..frames)
        .map(|t| {
            let local_caption = anchors
                .iter()
                .position(|&a| anchor_frame(a) as usize == t)
                .map(|j| vsl.keyframes[j].local_caption.clone())
                .unwrap_or_default();
            KeyframeLayout {
                frame_index: t as u32,
                local_caption,
                boxes: sample_at(vsl, frames, t as f64),
            }
        })
        .collect();
    Ok(DenseLayoutSequence { canvas: vsl.canvas, frames: dense })
}

fn nearest_anchor(anchors: &[f64], t: f64) -> usize {
    let mut best = 0;
    for (j, &a) in anchors.iter().enumerate() {
        if (a - t).abs() < (anchors[best] - t).abs() {
            best = j;
        }
    }
    best
}

/// Pairs each dense frame with the caption selected by `mode`. Empty local
/// captions fall back to the global caption.
pub fn build_conditions(
    dense: &DenseLayoutSequence,
    vsl: &VideoSceneLayout,
    mode: CaptionMode,
) -> Vec<GenerationCondition> {
    let anchors = anchor_times(vsl.keyframes.len(), dense.frames.len());
    let anchored: Vec<u32> = anchors.iter().map(|&a| anchor_frame(a)).collect();
    dense
        .frames
        .iter()
        .enumerate()
        .map(|(t, frame)| {
            let local = match mode {
                CaptionMode::Global => None,
                CaptionMode::Local if anchors.is_empty() => None,
                CaptionMode::Local => Some(nearest_anchor(&anchors, t as f64)),
                CaptionMode::Mix => anchored.iter().position(|&f| f as usize == t),
            };
            let local = local
                .map(|j| vsl.keyframes[j].local_caption.trim())
                .filter(|c| !c.is_empty());
            let (caption, caption_source) = match local {
                Some(c) => (c.to_string(), CaptionSource::Local),
                None => (fallback_caption(vsl, frame), CaptionSource::Global),
            };
            GenerationCondition {
                frame_index: frame.frame_index,
                caption,
                caption_source,
                boxes: frame.boxes.clone(),
            }
        })
        .collect()
}

fn fallback_caption(vsl: &VideoSceneLayout, frame: &KeyframeLayout) -> String {
    if !vsl.global_caption.trim().is_empty() {
        return vsl.global_caption.clone();
    }
    if let Some(c) = vsl.keyframes.iter().map(|k| k.local_caption.trim()).find(|c| !c.is_empty()) {
        return c.to_string();
    }
    let labels: Vec<&str> = frame.boxes.iter().map(|b| b.label.as_str()).collect();
    if labels.is_empty() {
        "an empty scene".to_string()
    } else {
        labels.join(", ")
    }
}

/// Canonical JSON export of a condition list, consumed by the generator.
pub fn conditions_to_json(conditions: &[GenerationCondition]) -> String {
    serde_json::to_string_pretty(conditions).expect("condition serialization is infallible")
}
