//! Video scene layouts: the keyframe-sequence representation shared by the
//! planner, the metrics and the generator hand-off.
//!
//! Every type here is a plain value. Transformations return new layouts and
//! never mutate their input.

use std::collections::{BTreeMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize, Serializer};
use thiserror::Error;

/// Slack allowed when checking canvas containment of floating coordinates
/// produced by rescaling or interpolation.
pub const CANVAS_EPS: f64 = 1e-6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LayoutError {
    #[error("every box was dropped while clamping to the canvas")]
    EmptyLayout,
    #[error("invalid canvas {width}x{height}")]
    InvalidCanvas { width: u32, height: u32 },
    #[error("layout json: {0}")]
    Json(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Canvas {
    pub width: u32,
    pub height: u32,
}

impl Canvas {
    /// Layout canvas used by the planner.
    pub const PLANNING: Canvas = Canvas { width: 454, height: 256 };
    /// Frame resolution handed to the video generator.
    pub const GENERATION: Canvas = Canvas { width: 512, height: 320 };

    pub fn new(width: u32, height: u32) -> Result<Self, LayoutError> {
        if width == 0 || height == 0 {
            return Err(LayoutError::InvalidCanvas { width, height });
        }
        Ok(Canvas { width, height })
    }

    pub fn w(&self) -> f64 {
        self.width as f64
    }

    pub fn h(&self) -> f64 {
        self.height as f64
    }

    pub fn area(&self) -> f64 {
        self.w() * self.h()
    }

    pub fn diagonal(&self) -> f64 {
        self.w().hypot(self.h())
    }
}

impl fmt::Display for Canvas {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}", self.width, self.height)
    }
}

impl std::str::FromStr for Canvas {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (w, h) = s
            .split_once(['x', 'X'])
            .ok_or_else(|| format!("expected WIDTHxHEIGHT, got {s:?}"))?;
        let w = w.trim().parse::<u32>().map_err(|e| e.to_string())?;
        let h = h.trim().parse::<u32>().map_err(|e| e.to_string())?;
        Canvas::new(w, h).map_err(|e| e.to_string())
    }
}

/// One labeled, identity-tracked rectangle in pixel coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundingBox {
    #[serde(rename = "id")]
    pub object_id: u32,
    pub label: String,
    #[serde(serialize_with = "serialize_coord")]
    pub x: f64,
    #[serde(serialize_with = "serialize_coord")]
    pub y: f64,
    #[serde(serialize_with = "serialize_coord")]
    pub w: f64,
    #[serde(serialize_with = "serialize_coord")]
    pub h: f64,
}

impl BoundingBox {
    pub fn new(object_id: u32, label: impl Into<String>, x: f64, y: f64, w: f64, h: f64) -> Self {
        BoundingBox { object_id, label: label.into(), x, y, w, h }
    }

    pub fn area(&self) -> f64 {
        self.w * self.h
    }

    pub fn right(&self) -> f64 {
        self.x + self.w
    }

    pub fn bottom(&self) -> f64 {
        self.y + self.h
    }

    pub fn center(&self) -> (f64, f64) {
        (self.x + self.w / 2.0, self.y + self.h / 2.0)
    }

    fn coords(&self) -> [f64; 4] {
        [self.x, self.y, self.w, self.h]
    }
}

/// Coordinates are written with at most two decimals; whole values are
/// written as JSON integers.
fn serialize_coord<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
    let r = (v * 100.0).round() / 100.0;
    if r.fract() == 0.0 && r.abs() < 9.0e15 {
        s.serialize_i64(r as i64)
    } else {
        s.serialize_f64(r)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KeyframeLayout {
    pub frame_index: u32,
    #[serde(default)]
    pub local_caption: String,
    pub boxes: Vec<BoundingBox>,
}

impl KeyframeLayout {
    pub fn new(frame_index: u32, local_caption: impl Into<String>, boxes: Vec<BoundingBox>) -> Self {
        KeyframeLayout { frame_index, local_caption: local_caption.into(), boxes }
    }

    pub fn find(&self, object_id: u32) -> Option<&BoundingBox> {
        self.boxes.iter().find(|b| b.object_id == object_id)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VideoSceneLayout {
    pub canvas: Canvas,
    pub global_caption: String,
    #[serde(default)]
    pub reasoning: Option<String>,
    pub keyframes: Vec<KeyframeLayout>,
}

impl VideoSceneLayout {
    pub fn from_json(text: &str) -> Result<Self, LayoutError> {
        serde_json::from_str(text).map_err(|e| LayoutError::Json(e.to_string()))
    }

    /// Canonical pretty-printed JSON (two-space indent, fixed key order).
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("layout serialization is infallible")
    }

    pub fn to_json_compact(&self) -> String {
        serde_json::to_string(self).expect("layout serialization is infallible")
    }

    pub fn box_count(&self) -> usize {
        self.keyframes.iter().map(|k| k.boxes.len()).sum()
    }

    /// Distinct object ids across all keyframes, ascending.
    pub fn object_ids(&self) -> Vec<u32> {
        let mut ids: Vec<u32> =
            self.keyframes.iter().flat_map(|k| k.boxes.iter().map(|b| b.object_id)).collect();
        ids.sort_unstable();
        ids.dedup();
        ids
    }

    pub fn validate(&self) -> ValidationReport {
        validate(self)
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_clean()
    }

    fn map_boxes(&self, mut f: impl FnMut(&BoundingBox) -> BoundingBox) -> VideoSceneLayout {
        VideoSceneLayout {
            canvas: self.canvas,
            global_caption: self.global_caption.clone(),
            reasoning: self.reasoning.clone(),
            keyframes: self
                .keyframes
                .iter()
                .map(|k| KeyframeLayout {
                    frame_index: k.frame_index,
                    local_caption: k.local_caption.clone(),
                    boxes: k.boxes.iter().map(&mut f).collect(),
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Rule {
    InvalidCanvas,
    NoKeyframes,
    FrameIndexNotIncreasing,
    NonFiniteCoordinate,
    NonPositiveSize,
    OutOfCanvas,
    EmptyLabel,
    DuplicateIdInFrame,
    IdentityLabelMismatch,
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Rule::InvalidCanvas => "invalid canvas",
            Rule::NoKeyframes => "no keyframes",
            Rule::FrameIndexNotIncreasing => "frame index not increasing",
            Rule::NonFiniteCoordinate => "non-finite coordinate",
            Rule::NonPositiveSize => "non-positive size",
            Rule::OutOfCanvas => "out-of-canvas",
            Rule::EmptyLabel => "empty label",
            Rule::DuplicateIdInFrame => "duplicate id in frame",
            Rule::IdentityLabelMismatch => "identity label mismatch",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Finding {
    /// Position of the keyframe in the sequence (not its frame_index).
    pub keyframe: Option<usize>,
    pub object_id: Option<u32>,
    pub rule: Rule,
    pub detail: String,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ValidationReport {
    pub findings: Vec<Finding>,
}

impl ValidationReport {
    pub fn is_clean(&self) -> bool {
        self.findings.is_empty()
    }

    pub fn has(&self, rule: Rule) -> bool {
        self.findings.iter().any(|f| f.rule == rule)
    }

    fn push(&mut self, keyframe: Option<usize>, object_id: Option<u32>, rule: Rule, detail: String) {
        self.findings.push(Finding { keyframe, object_id, rule, detail });
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for finding in &self.findings {
            match (finding.keyframe, finding.object_id) {
                (Some(k), Some(id)) => write!(f, "keyframe {k}, object {id}: ")?,
                (Some(k), None) => write!(f, "keyframe {k}: ")?,
                (None, Some(id)) => write!(f, "object {id}: ")?,
                (None, None) => {}
            }
            writeln!(f, "{} ({})", finding.rule, finding.detail)?;
        }
        Ok(())
    }
}

/// Checks every structural invariant of a layout. Never fails; problems are
/// collected as findings.
pub fn validate(vsl: &VideoSceneLayout) -> ValidationReport {
    let mut report = ValidationReport::default();
    let canvas = vsl.canvas;
    if canvas.width == 0 || canvas.height == 0 {
        report.push(None, None, Rule::InvalidCanvas, format!("{canvas}"));
    }
    if vsl.keyframes.is_empty() {
        report.push(None, None, Rule::NoKeyframes, "layout has no keyframes".into());
    }

    let mut labels: BTreeMap<u32, (usize, &str)> = BTreeMap::new();
    let mut prev_index: Option<u32> = None;
    for (k, frame) in vsl.keyframes.iter().enumerate() {
        if let Some(prev) = prev_index {
            if frame.frame_index <= prev {
                report.push(
                    Some(k),
                    None,
                    Rule::FrameIndexNotIncreasing,
                    format!("frame_index {} follows {}", frame.frame_index, prev),
                );
            }
        }
        prev_index = Some(frame.frame_index);

        let mut seen = HashSet::new();
        for b in &frame.boxes {
            let id = Some(b.object_id);
            if !seen.insert(b.object_id) {
                report.push(Some(k), id, Rule::DuplicateIdInFrame, "id repeated".into());
            }
            if b.label.trim().is_empty() {
                report.push(Some(k), id, Rule::EmptyLabel, "label is empty".into());
            }
            if b.coords().iter().any(|c| !c.is_finite()) {
                report.push(Some(k), id, Rule::NonFiniteCoordinate, format!("{:?}", b.coords()));
                continue;
            }
            if b.w <= 0.0 || b.h <= 0.0 {
                report.push(Some(k), id, Rule::NonPositiveSize, format!("w={} h={}", b.w, b.h));
            }
            if b.x < -CANVAS_EPS
                || b.y < -CANVAS_EPS
                || b.right() > canvas.w() + CANVAS_EPS
                || b.bottom() > canvas.h() + CANVAS_EPS
            {
                report.push(
                    Some(k),
                    id,
                    Rule::OutOfCanvas,
                    format!("[{}, {}, {}, {}] on {canvas}", b.x, b.y, b.w, b.h),
                );
            }
            match labels.get(&b.object_id) {
                Some(&(first_k, label)) if label != b.label => report.push(
                    Some(k),
                    id,
                    Rule::IdentityLabelMismatch,
                    format!("{:?} here, {:?} in keyframe {first_k}", b.label, label),
                ),
                Some(_) => {}
                None => {
                    labels.insert(b.object_id, (k, b.label.as_str()));
                }
            }
        }
    }
    report
}

/// Intersects every box with the canvas and drops boxes left with no area.
pub fn clamp_to_canvas(vsl: &VideoSceneLayout) -> Result<VideoSceneLayout, LayoutError> {
    let (cw, ch) = (vsl.canvas.w(), vsl.canvas.h());
    let mut out = vsl.clone();
    for frame in &mut out.keyframes {
        frame.boxes.retain_mut(|b| {
            let x0 = b.x.max(0.0);
            let y0 = b.y.max(0.0);
            let x1 = b.right().min(cw);
            let y1 = b.bottom().min(ch);
            if !(x1 > x0 && y1 > y0) {
                return false;
            }
            // Keep in-canvas coordinates bit-identical.
            if x0 != b.x || x1 != b.right() {
                b.x = x0;
                b.w = x1 - x0;
            }
            if y0 != b.y || y1 != b.bottom() {
                b.y = y0;
                b.h = y1 - y0;
            }
            true
        });
    }
    if out.box_count() == 0 {
        return Err(LayoutError::EmptyLayout);
    }
    Ok(out)
}

pub fn rescale(vsl: &VideoSceneLayout, target: Canvas) -> VideoSceneLayout {
    if target == vsl.canvas {
        return vsl.clone();
    }
    let sx = target.w() / vsl.canvas.w();
    let sy = target.h() / vsl.canvas.h();
    let mut out = vsl.map_boxes(|b| BoundingBox {
        x: b.x * sx,
        y: b.y * sy,
        w: b.w * sx,
        h: b.h * sy,
        ..b.clone()
    });
    out.canvas = target;
    out
}

/// Mirrors every box about the vertical center line: `x' = W - x - w`.
pub fn flip_horizontal(vsl: &VideoSceneLayout) -> VideoSceneLayout {
    let width = vsl.canvas.w();
    vsl.map_boxes(|b| BoundingBox { x: width - b.x - b.w, ..b.clone() })
}

/// Reverses keyframe order. Keyframes take the original frame_index values
/// in ascending order, so a sequence indexed 0..N stays indexed 0..N.
pub fn reverse_temporal(vsl: &VideoSceneLayout) -> VideoSceneLayout {
    let indices: Vec<u32> = vsl.keyframes.iter().map(|k| k.frame_index).collect();
    let keyframes = vsl
        .keyframes
        .iter()
        .rev()
        .zip(indices)
        .map(|(k, frame_index)| KeyframeLayout { frame_index, ..k.clone() })
        .collect();
    VideoSceneLayout { keyframes, ..vsl.clone() }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    pub(crate) fn sample_vsl() -> VideoSceneLayout {
        let kf = |i: u32, x: f64| {
            KeyframeLayout::new(
                i,
                format!("frame {i}"),
                vec![
                    BoundingBox::new(1, "piano", x, 100.0, 120.0, 80.0),
                    BoundingBox::new(2, "violin", 300.0, 40.0, 60.0, 150.0),
                ],
            )
        };
        VideoSceneLayout {
            canvas: Canvas::PLANNING,
            global_caption: "a piano and a violin in a room".into(),
            reasoning: Some("piano on the left, violin on the right".into()),
            keyframes: (0..5).map(|i| kf(i, 10.0 + 20.0 * i as f64)).collect(),
        }
    }

    fn single(b: BoundingBox) -> VideoSceneLayout {
        VideoSceneLayout {
            canvas: Canvas::PLANNING,
            global_caption: "g".into(),
            reasoning: None,
            keyframes: vec![KeyframeLayout::new(0, "", vec![b])],
        }
    }

    #[test]
    fn well_formed_layout_has_no_findings() {
        assert!(validate(&sample_vsl()).is_clean());
    }

    #[test]
    fn box_past_right_edge_is_out_of_canvas() {
        let v = single(BoundingBox::new(1, "car", 400.0, 0.0, 100.0, 50.0));
        let r = validate(&v);
        assert_eq!(r.findings.len(), 1);
        assert_eq!(r.findings[0].rule, Rule::OutOfCanvas);
        assert_eq!(r.findings[0].keyframe, Some(0));
        assert_eq!(r.findings[0].object_id, Some(1));
    }

    #[test]
    fn label_change_across_keyframes_is_flagged() {
        let mut v = sample_vsl();
        v.keyframes[0].boxes[0].label = "car".into();
        v.keyframes[2].boxes[0].label = "bus".into();
        let r = validate(&v);
        assert!(r.has(Rule::IdentityLabelMismatch));
        let f = r.findings.iter().find(|f| f.rule == Rule::IdentityLabelMismatch).unwrap();
        assert_eq!(f.object_id, Some(1));
    }

    #[test]
    fn structural_findings() {
        let mut v = sample_vsl();
        v.keyframes[1].frame_index = 0;
        v.keyframes[3].boxes[1].object_id = 1;
        v.keyframes[4].boxes[0].label = " ".into();
        v.keyframes[4].boxes[1].w = 0.0;
        let r = validate(&v);
        for rule in [
            Rule::FrameIndexNotIncreasing,
            Rule::DuplicateIdInFrame,
            Rule::EmptyLabel,
            Rule::NonPositiveSize,
        ] {
            assert!(r.has(rule), "missing {rule}");
        }
        let empty = VideoSceneLayout { keyframes: vec![], ..sample_vsl() };
        assert!(validate(&empty).has(Rule::NoKeyframes));
        let nan = single(BoundingBox::new(1, "car", f64::NAN, 0.0, 1.0, 1.0));
        assert!(validate(&nan).has(Rule::NonFiniteCoordinate));
    }

    #[test]
    fn clamp_trims_partial_and_drops_outside() {
        let v = single(BoundingBox::new(1, "car", -10.0, 0.0, 50.0, 50.0));
        let c = clamp_to_canvas(&v).unwrap();
        assert_eq!(c.keyframes[0].boxes[0], BoundingBox::new(1, "car", 0.0, 0.0, 40.0, 50.0));

        let mut v = sample_vsl();
        v.keyframes[0].boxes.push(BoundingBox::new(3, "dog", -60.0, 0.0, 50.0, 10.0));
        let c = clamp_to_canvas(&v).unwrap();
        assert_eq!(c.keyframes[0].boxes.len(), 2);
        assert!(c.is_valid());

        let gone = single(BoundingBox::new(1, "car", -60.0, 0.0, 50.0, 50.0));
        assert_eq!(clamp_to_canvas(&gone), Err(LayoutError::EmptyLayout));
    }

    #[test]
    fn clamp_is_identity_on_valid_layouts() {
        let v = sample_vsl();
        assert_eq!(clamp_to_canvas(&v).unwrap(), v);
    }

    #[test]
    fn rescale_examples() {
        let v = single(BoundingBox::new(1, "car", 227.0, 128.0, 100.0, 64.0));
        let r = rescale(&v, Canvas::new(908, 512).unwrap());
        let b = &r.keyframes[0].boxes[0];
        assert_eq!((b.x, b.y, b.w, b.h), (454.0, 256.0, 200.0, 128.0));
        assert_eq!(r.canvas, Canvas::new(908, 512).unwrap());
        assert_eq!(rescale(&v, Canvas::PLANNING), v);

        let full = single(BoundingBox::new(1, "car", 0.0, 0.0, 454.0, 256.0));
        let r = rescale(&full, Canvas::GENERATION);
        let b = &r.keyframes[0].boxes[0];
        assert_eq!((b.x, b.y, b.w, b.h), (0.0, 0.0, 512.0, 320.0));
    }

    #[test]
    fn flip_examples() {
        let v = single(BoundingBox::new(1, "car", 50.0, 0.0, 100.0, 10.0));
        assert_eq!(flip_horizontal(&v).keyframes[0].boxes[0].x, 304.0);
        let centered = single(BoundingBox::new(1, "car", 177.0, 0.0, 100.0, 10.0));
        assert_eq!(flip_horizontal(&centered), centered);
        let v = sample_vsl();
        assert_eq!(flip_horizontal(&flip_horizontal(&v)), v);
    }

    #[test]
    fn reverse_examples() {
        let v = sample_vsl();
        let r = reverse_temporal(&v);
        let idx: Vec<u32> = r.keyframes.iter().map(|k| k.frame_index).collect();
        assert_eq!(idx, vec![0, 1, 2, 3, 4]);
        assert_eq!(r.keyframes[0].local_caption, "frame 4");
        assert_eq!(r.keyframes[0].boxes, v.keyframes[4].boxes);
        assert_eq!(r.global_caption, v.global_caption);
        assert_eq!(reverse_temporal(&r), v);

        let one = single(BoundingBox::new(1, "car", 0.0, 0.0, 5.0, 5.0));
        assert_eq!(reverse_temporal(&one), one);
    }

    #[test]
    fn json_uses_canonical_key_order() {
        let mut v = single(BoundingBox::new(7, "car", 1.0, 2.5, 3.333, 4.0));
        v.reasoning = None;
        assert_eq!(
            v.to_json_compact(),
            r#"{"canvas":{"width":454,"height":256},"global_caption":"g","reasoning":null,"keyframes":[{"frame_index":0,"local_caption":"","boxes":[{"id":7,"label":"car","x":1,"y":2.5,"w":3.33,"h":4}]}]}"#
        );
        let back = VideoSceneLayout::from_json(&v.to_json()).unwrap();
        assert_eq!(back.keyframes[0].boxes[0].w, 3.33);
    }

    #[test]
    fn canvas_parsing() {
        assert_eq!("512x320".parse::<Canvas>().unwrap(), Canvas::GENERATION);
        assert!("0x5".parse::<Canvas>().is_err());
        assert!("big".parse::<Canvas>().is_err());
    }
}

#[cfg(test)]
pub(crate) mod props {
    use super::*;
    use proptest::prelude::*;

    const LABELS: [&str; 3] = ["piano", "violin", "car"];

    /// Box on a grid of `unit` pixels inside the planning canvas.
    pub(crate) fn arb_box(id: u32, unit: f64) -> impl Strategy<Value = BoundingBox> {
        let cw = (454.0 / unit) as u32;
        let ch = (256.0 / unit) as u32;
        (cw / 50..cw / 2, ch / 50..ch / 2)
            .prop_flat_map(move |(w, h)| (0..=cw - w, 0..=ch - h, Just(w), Just(h)))
            .prop_map(move |(x, y, w, h)| {
                let label = LABELS[(id as usize - 1) % LABELS.len()];
                BoundingBox::new(id, label, x as f64 * unit, y as f64 * unit, w as f64 * unit, h as f64 * unit)
            })
    }

    fn arb_keyframe(index: u32, unit: f64) -> impl Strategy<Value = KeyframeLayout> {
        prop::sample::subsequence(vec![1u32, 2, 3], 1..=3)
            .prop_flat_map(move |ids| ids.into_iter().map(|id| arb_box(id, unit)).collect::<Vec<_>>())
            .prop_map(move |boxes| KeyframeLayout::new(index, format!("frame {index}"), boxes))
    }

    /// Valid layout with 1 to `max_keyframes` non-empty keyframes.
    pub(crate) fn arb_vsl(max_keyframes: usize, unit: f64) -> impl Strategy<Value = VideoSceneLayout> {
        (1..=max_keyframes)
            .prop_flat_map(move |n| (0..n as u32).map(|i| arb_keyframe(i * 2, unit)).collect::<Vec<_>>())
            .prop_map(|keyframes| VideoSceneLayout {
                canvas: Canvas::PLANNING,
                global_caption: "a scene".into(),
                reasoning: Some("sources stay put".into()),
                keyframes,
            })
    }

    proptest! {
        #[test]
        fn generated_layouts_are_valid(v in arb_vsl(6, 0.25)) {
            prop_assert!(v.is_valid(), "{}", v.validate());
        }

        #[test]
        fn flip_and_reverse_are_involutions(v in arb_vsl(6, 0.25)) {
            prop_assert_eq!(flip_horizontal(&flip_horizontal(&v)), v.clone());
            prop_assert_eq!(reverse_temporal(&reverse_temporal(&v)), v.clone());
            prop_assert!(flip_horizontal(&v).is_valid());
            prop_assert!(reverse_temporal(&v).is_valid());
        }

        #[test]
        fn clamp_keeps_valid_layouts(v in arb_vsl(5, 0.25)) {
            prop_assert_eq!(clamp_to_canvas(&v).unwrap(), v);
        }

        #[test]
        fn rescale_round_trip(v in arb_vsl(5, 0.25)) {
            let back = rescale(&rescale(&v, Canvas::GENERATION), Canvas::PLANNING);
            for (a, b) in back.keyframes.iter().zip(&v.keyframes) {
                for (p, q) in a.boxes.iter().zip(&b.boxes) {
                    prop_assert!((p.x - q.x).abs() < 1e-6 && (p.y - q.y).abs() < 1e-6);
                    prop_assert!((p.w - q.w).abs() < 1e-6 && (p.h - q.h).abs() < 1e-6);
                }
            }
        }

        #[test]
        fn json_round_trip(v in arb_vsl(5, 0.25)) {
            prop_assert_eq!(VideoSceneLayout::from_json(&v.to_json()).unwrap(), v.clone());
            prop_assert_eq!(VideoSceneLayout::from_json(&v.to_json_compact()).unwrap(), v);
        }
    }
}
