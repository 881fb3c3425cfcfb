//! Text template for layouts exchanged with the planner model.
//!
//! ```text
//! Reasoning: <statement, may span lines>
//!
//! Global caption: <caption>
//!
//! Layout:
//! Frame 0: <local caption>
//! 1: piano [10, 20, 100, 50]
//! 2: violin [240, 30, 60, 150]
//! Frame 1: <local caption>
//! ...
//! ```
//!
//! Markers are configurable through [`TemplateConfig`]. The parser tolerates
//! prose before and after the blocks, markdown emphasis around markers and
//! code fences.

use std::collections::{BTreeMap, HashSet};
use std::fmt::Write as _;
use std::sync::LazyLock;

use regex::Regex;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::layout::{BoundingBox, Canvas, KeyframeLayout, VideoSceneLayout};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TemplateConfig {
    pub expected_keyframes: usize,
    pub canvas: Canvas,
    pub reasoning_marker: String,
    pub caption_marker: String,
    pub layout_marker: String,
    pub frame_marker: String,
}

impl Default for TemplateConfig {
    fn default() -> Self {
        TemplateConfig {
            expected_keyframes: 5,
            canvas: Canvas::PLANNING,
            reasoning_marker: "Reasoning:".into(),
            caption_marker: "Global caption:".into(),
            layout_marker: "Layout:".into(),
            frame_marker: "Frame".into(),
        }
    }
}

impl TemplateConfig {
    pub fn with_canvas(canvas: Canvas, expected_keyframes: usize) -> Self {
        TemplateConfig { canvas, expected_keyframes, ..Default::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ParsedResponse {
    pub reasoning: String,
    pub vsl: VideoSceneLayout,
    pub raw: String,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ParseError {
    #[error("response contains no layout block")]
    MissingLayoutBlock,
    #[error("malformed box on line {line}: {reason}")]
    MalformedBox { line: usize, reason: String },
    #[error("expected {expected} keyframes, found {found}")]
    KeyframeCountMismatch { expected: usize, found: usize, partial: Box<ParsedResponse> },
    #[error("object id {id} appears twice in keyframe {frame}")]
    DuplicateIdInFrame { frame: u32, id: u32 },
    #[error("object id {id} is labeled both {first:?} and {second:?}")]
    InconsistentIdentity { id: u32, first: String, second: String },
}

impl ParseError {
    /// The layout recovered despite the error, if any.
    pub fn partial(&self) -> Option<&ParsedResponse> {
        match self {
            ParseError::KeyframeCountMismatch { partial, .. } => Some(partial),
            _ => None,
        }
    }
}

static BOX_LINE: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"^(?:[-*]\s+)?(\d+)\s*:\s*(.*?)\s*\[([^\]]*)\]\s*[,.;]?$").unwrap());
static BOXISH: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"^(?:[-*]\s+)?\d+\s*:.*\[").unwrap());

/// Strips markdown decoration (`#`, `*`, `_`, `>` and list dashes) from a line.
fn undecorate(line: &str) -> &str {
    line.trim().trim_start_matches(['#', '>', ' ', '\t']).trim_matches(['*', '_']).trim()
}

/// If `line` starts with `marker` (ignoring case and decoration), returns the
/// remainder of the line.
fn strip_marker<'a>(line: &'a str, marker: &str) -> Option<&'a str> {
    let body = undecorate(line);
    let marker = marker.trim();
    if body.len() < marker.len() || !body.is_char_boundary(marker.len()) {
        return None;
    }
    let (head, rest) = body.split_at(marker.len());
    if !head.eq_ignore_ascii_case(marker) {
        return None;
    }
    Some(rest.trim_start_matches(['*', '_']).trim())
}

/// Recognizes `Frame <n>: caption` (the colon is optional).
fn frame_header(line: &str, marker: &str) -> Option<(u32, String)> {
    let rest = strip_marker(line, marker)?;
    let digits: String = rest.chars().take_while(|c| c.is_ascii_digit()).collect();
    if digits.is_empty() {
        return None;
    }
    let index = digits.parse::<u32>().ok()?;
    let tail = rest[digits.len()..].trim_start();
    let caption = match tail.strip_prefix(':') {
        Some(c) => c,
        None if tail.is_empty() => "",
        None => tail.strip_prefix('-').unwrap_or(tail),
    };
    Some((index, caption.trim_matches(['*', '_']).trim().to_string()))
}

fn parse_box(line: &str, line_no: usize) -> Result<Option<BoundingBox>, ParseError> {
    let body = line.trim();
    let Some(caps) = BOX_LINE.captures(body) else {
        if BOXISH.is_match(body) {
            return Err(ParseError::MalformedBox { line: line_no, reason: "unterminated coordinates".into() });
        }
        return Ok(None);
    };
    let bad = |reason: String| ParseError::MalformedBox { line: line_no, reason };
    let object_id = caps[1].parse::<u32>().map_err(|e| bad(format!("id: {e}")))?;
    let label = caps[2].trim().trim_end_matches([':', '-']).trim().to_string();
    if label.is_empty() {
        return Err(bad("empty label".into()));
    }
    let coords: Vec<&str> = caps[3].split(',').map(str::trim).collect();
    if coords.len() != 4 {
        return Err(bad(format!("expected 4 coordinates, found {}", coords.len())));
    }
    let mut values = [0.0f64; 4];
    for (slot, token) in values.iter_mut().zip(&coords) {
        let v = token.parse::<f64>().map_err(|_| bad(format!("non-numeric coordinate {token:?}")))?;
        if !v.is_finite() {
            return Err(bad(format!("non-finite coordinate {token:?}")));
        }
        *slot = v;
    }
    let [x, y, w, h] = values;
    if w <= 0.0 || h <= 0.0 {
        return Err(bad(format!("non-positive size w={w} h={h}")));
    }
    Ok(Some(BoundingBox { object_id, label, x, y, w, h }))
}

#[derive(Clone, Copy, PartialEq)]
enum Block {
    Prose,
    Reasoning,
    Caption,
    Layout,
}

/// Extracts the reasoning statement and the layout from a model response.
pub fn parse_response(text: &str, cfg: &TemplateConfig) -> Result<ParsedResponse, ParseError> {
    let mut reasoning: Vec<&str> = Vec::new();
    let mut caption: Vec<&str> = Vec::new();
    let mut frames: Vec<KeyframeLayout> = Vec::new();
    let mut saw_layout = false;
    let mut layout_done = false;
    let mut block = Block::Prose;

    for (i, raw_line) in text.lines().enumerate() {
        let line_no = i + 1;
        let trimmed = raw_line.trim();
        if trimmed.starts_with("```") || trimmed.starts_with("~~~") {
            continue;
        }
        if let Some(rest) = strip_marker(raw_line, &cfg.reasoning_marker) {
            block = Block::Reasoning;
            reasoning.clear();
            reasoning.push(rest);
            continue;
        }
        if let Some(rest) = strip_marker(raw_line, &cfg.caption_marker) {
            block = Block::Caption;
            caption.clear();
            caption.push(rest);
            continue;
        }
        if !layout_done {
            if let Some(rest) = strip_marker(raw_line, &cfg.layout_marker) {
                if frames.is_empty() {
                    block = Block::Layout;
                    saw_layout = true;
                    if rest.is_empty() {
                        continue;
                    }
                    // Allow the first frame header on the marker line itself.
                    if frame_header(rest, &cfg.frame_marker).is_none() {
                        continue;
                    }
                    if let Some((index, cap)) = frame_header(rest, &cfg.frame_marker) {
                        frames.push(KeyframeLayout::new(index, cap, Vec::new()));
                    }
                    continue;
                }
            }
        }
        match block {
            Block::Reasoning => reasoning.push(raw_line),
            Block::Caption => caption.push(raw_line),
            Block::Layout => {
                if trimmed.is_empty() {
                    continue;
                }
                if let Some((index, cap)) = frame_header(raw_line, &cfg.frame_marker) {
                    frames.push(KeyframeLayout::new(index, cap, Vec::new()));
                    continue;
                }
                match parse_box(raw_line, line_no)? {
                    Some(b) => match frames.last_mut() {
                        Some(frame) => frame.boxes.push(b),
                        None => frames.push(KeyframeLayout::new(0, "", vec![b])),
                    },
                    None if frames.is_empty() => {}
                    None => {
                        layout_done = true;
                        block = Block::Prose;
                    }
                }
            }
            Block::Prose => {}
        }
    }

    if !saw_layout || frames.is_empty() {
        return Err(ParseError::MissingLayoutBlock);
    }

    // Reindex if the model numbered frames out of order.
    if frames.windows(2).any(|w| w[1].frame_index <= w[0].frame_index) {
        for (i, f) in frames.iter_mut().enumerate() {
            f.frame_index = i as u32;
        }
    }

    let mut labels: BTreeMap<u32, String> = BTreeMap::new();
    for frame in &frames {
        let mut seen = HashSet::new();
        for b in &frame.boxes {
            if !seen.insert(b.object_id) {
                return Err(ParseError::DuplicateIdInFrame { frame: frame.frame_index, id: b.object_id });
            }
            match labels.get(&b.object_id) {
                Some(first) if *first != b.label => {
                    return Err(ParseError::InconsistentIdentity {
                        id: b.object_id,
                        first: first.clone(),
                        second: b.label.clone(),
                    })
                }
                Some(_) => {}
                None => {
                    labels.insert(b.object_id, b.label.clone());
                }
            }
        }
    }

    let reasoning = join_block(&reasoning);
    let found = frames.len();
    let parsed = ParsedResponse {
        vsl: VideoSceneLayout {
            canvas: cfg.canvas,
            global_caption: join_block(&caption),
            reasoning: (!reasoning.is_empty()).then(|| reasoning.clone()),
            keyframes: frames,
        },
        reasoning,
        raw: text.to_string(),
    };
    if found != cfg.expected_keyframes {
        return Err(ParseError::KeyframeCountMismatch {
            expected: cfg.expected_keyframes,
            found,
            partial: Box::new(parsed),
        });
    }
    Ok(parsed)
}

fn join_block(lines: &[&str]) -> String {
    let text = lines.join("\n");
    text.trim().trim_matches(['*', '_']).trim().to_string()
}

fn round_half_up(v: f64) -> i64 {
    (v + 0.5).floor() as i64
}

/// Renders a layout in the template grammar. Coordinates are rounded half-up
/// to whole pixels.
pub fn serialize(vsl: &VideoSceneLayout, cfg: &TemplateConfig) -> String {
    let mut out = String::new();
    if let Some(r) = vsl.reasoning.as_deref().map(str::trim).filter(|r| !r.is_empty()) {
        let _ = writeln!(out, "{} {}", cfg.reasoning_marker, r);
        out.push('\n');
    }
    let _ = writeln!(out, "{} {}", cfg.caption_marker, vsl.global_caption.trim());
    out.push('\n');
    let _ = writeln!(out, "{}", cfg.layout_marker);
    for frame in &vsl.keyframes {
        let caption = frame.local_caption.trim();
        if caption.is_empty() {
            let _ = writeln!(out, "{} {}:", cfg.frame_marker, frame.frame_index);
        } else {
            let _ = writeln!(out, "{} {}: {}", cfg.frame_marker, frame.frame_index, caption);
        }
        for b in &frame.boxes {
            let _ = writeln!(
                out,
                "{}: {} [{}, {}, {}, {}]",
                b.object_id,
                b.label.trim(),
                round_half_up(b.x),
                round_half_up(b.y),
                round_half_up(b.w),
                round_half_up(b.h)
            );
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::layout::tests::sample_vsl;

    fn cfg() -> TemplateConfig {
        TemplateConfig::default()
    }

    #[test]
    fn template_response_parses() {
        let v = sample_vsl();
        let text = serialize(&v, &cfg());
        let p = parse_response(&text, &cfg()).unwrap();
        assert_eq!(p.vsl.keyframes.len(), 5);
        assert_eq!(p.reasoning, v.reasoning.clone().unwrap());
        assert_eq!(p.vsl, v);
        assert_eq!(p.raw, text);
    }

    #[test]
    fn box_line_format() {
        let v = VideoSceneLayout {
            canvas: Canvas::PLANNING,
            global_caption: "g".into(),
            reasoning: None,
            keyframes: vec![KeyframeLayout::new(0, "c", vec![BoundingBox::new(1, "piano", 10.0, 20.0, 100.0, 50.0)])],
        };
        let text = serialize(&v, &cfg());
        assert!(text.contains("1: piano [10, 20, 100, 50]"));
        assert!(!text.contains("Reasoning"));
        assert_eq!(text, serialize(&v, &cfg()));
    }

    #[test]
    fn serialization_rounds_half_up() {
        let mut v = sample_vsl();
        v.keyframes[0].boxes[0].x = 10.5;
        v.keyframes[0].boxes[0].y = 10.49;
        let text = serialize(&v, &cfg());
        assert!(text.contains("1: piano [11, 10, 120, 80]"), "{text}");
    }

    #[test]
    fn missing_layout_block() {
        let err = parse_response("Reasoning: I hear a piano.\nNo layout here.", &cfg()).unwrap_err();
        assert_eq!(err, ParseError::MissingLayoutBlock);
        assert_eq!(parse_response("", &cfg()).unwrap_err(), ParseError::MissingLayoutBlock);
        assert_eq!(parse_response("Layout:\n", &cfg()).unwrap_err(), ParseError::MissingLayoutBlock);
    }

    #[test]
    fn tolerates_prose_fences_and_emphasis() {
        let body = serialize(&sample_vsl(), &cfg());
        let text = format!(
            "Sure! Here is the plan for your audio.\n\n```\n{}```\n\nLet me know if you need changes.",
            body.replace("Reasoning:", "**Reasoning:**").replace("Layout:", "### Layout:")
        );
        let p = parse_response(&text, &cfg()).unwrap();
        assert_eq!(p.vsl, sample_vsl());
    }

    #[test]
    fn decimal_and_negative_coordinates_accepted() {
        let text = "Layout:\nFrame 0: x\n1: car [-3.5, 2.25, 10, 4.0]\n";
        let p = parse_response(text, &TemplateConfig::with_canvas(Canvas::PLANNING, 1)).unwrap();
        let b = &p.vsl.keyframes[0].boxes[0];
        assert_eq!((b.x, b.y, b.w, b.h), (-3.5, 2.25, 10.0, 4.0));
        assert_eq!(p.vsl.reasoning, None);
        assert_eq!(p.reasoning, "");
    }

    #[test]
    fn malformed_boxes() {
        let one = TemplateConfig::with_canvas(Canvas::PLANNING, 1);
        for line in ["1: car [a, 2, 3, 4]", "1: car [1, 2, 3]", "1: car [1, 2, -3, 4]", "1: car [1, 2, 3, 4"] {
            let text = format!("Layout:\nFrame 0:\n{line}\n");
            match parse_response(&text, &one) {
                Err(ParseError::MalformedBox { line: 3, .. }) => {}
                other => panic!("{line}: {other:?}"),
            }
        }
    }

    #[test]
    fn duplicate_id_in_frame() {
        let text = "Layout:\nFrame 0:\n1: car [1, 2, 3, 4]\n1: car [5, 2, 3, 4]\n";
        assert_eq!(
            parse_response(text, &TemplateConfig::with_canvas(Canvas::PLANNING, 1)).unwrap_err(),
            ParseError::DuplicateIdInFrame { frame: 0, id: 1 }
        );
    }

    #[test]
    fn keyframe_count_mismatch_keeps_partial() {
        let mut v = sample_vsl();
        v.keyframes.truncate(3);
        let err = parse_response(&serialize(&v, &cfg()), &cfg()).unwrap_err();
        match &err {
            ParseError::KeyframeCountMismatch { expected: 5, found: 3, partial } => {
                assert_eq!(partial.vsl, v);
            }
            other => panic!("{other:?}"),
        }
        assert!(err.partial().is_some());
    }

    #[test]
    fn missing_local_captions_become_empty() {
        let text = "Global caption: cars\nLayout:\nFrame 0\n1: car [1, 2, 3, 4]\nFrame 1:\n1: car [2, 2, 3, 4]\n";
        let p = parse_response(text, &TemplateConfig::with_canvas(Canvas::PLANNING, 2)).unwrap();
        assert!(p.vsl.keyframes.iter().all(|k| k.local_caption.is_empty()));
        assert_eq!(p.vsl.global_caption, "cars");
    }

    #[test]
    fn trailing_prose_ends_the_layout() {
        let mut text = serialize(&sample_vsl(), &cfg());
        text.push_str("\nThe piano stays on the left while the violin plays.\n3: ghost [1, 1, 1, 1]\n");
        let p = parse_response(&text, &cfg()).unwrap();
        assert_eq!(p.vsl, sample_vsl());
    }

    #[test]
    fn custom_markers() {
        let c = TemplateConfig {
            reasoning_marker: "Thoughts:".into(),
            caption_marker: "Video:".into(),
            layout_marker: "VSL:".into(),
            frame_marker: "Keyframe".into(),
            ..cfg()
        };
        let v = sample_vsl();
        let text = serialize(&v, &c);
        assert!(text.starts_with("Thoughts: "));
        assert_eq!(parse_response(&text, &c).unwrap().vsl, v);
    }
}
