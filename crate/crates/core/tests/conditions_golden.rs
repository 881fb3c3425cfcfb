//! The conditions export is a cross-language contract; this pins it.
//! Regenerate with `UPDATE_GOLDEN=1 cargo test --test conditions_golden`.

use std::path::PathBuf;

use vsl_core::interpolate::conditions_to_json;
use vsl_core::{build_conditions, interpolate, rescale, CaptionMode, CaptionSource, Canvas, GenerationCondition, VideoSceneLayout};

fn fixtures() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures")
}

fn export() -> String {
    let text = std::fs::read_to_string(fixtures().join("sample_vsl.json")).unwrap();
    let vsl = rescale(&VideoSceneLayout::from_json(&text).unwrap(), Canvas::GENERATION);
    let dense = interpolate(&vsl, 16).unwrap();
    conditions_to_json(&build_conditions(&dense, &vsl, CaptionMode::Mix)) + "\n"
}

#[test]
fn export_matches_golden_file() {
    let path = fixtures().join("conditions_n16.json");
    let got = export();
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::write(&path, &got).unwrap();
    }
    let want = std::fs::read_to_string(&path).expect("golden file missing; run with UPDATE_GOLDEN=1");
    assert_eq!(got, want);
}

#[test]
fn golden_file_shape() {
    let text = std::fs::read_to_string(fixtures().join("conditions_n16.json")).unwrap();
    let conditions: Vec<GenerationCondition> = serde_json::from_str(&text).unwrap();
    assert_eq!(conditions.len(), 16);
    let local: Vec<u32> = conditions
        .iter()
        .filter(|c| c.caption_source == CaptionSource::Local)
        .map(|c| c.frame_index)
        .collect();
    // Keyframes 1 and 3 have empty local captions and fall back to the global one.
    assert_eq!(local, vec![0, 8, 15]);
    for c in &conditions {
        assert!(c.boxes.iter().all(|b| b.x >= 0.0 && b.right() <= 512.0 && b.bottom() <= 320.0));
    }
    let pos = |key: &str| text.find(&format!("\"{key}\"")).unwrap();
    let order = ["frame_index", "caption", "caption_source", "boxes", "id", "label", "x", "y", "w", "h"];
    assert!(order.windows(2).all(|w| pos(w[0]) < pos(w[1])), "keys out of canonical order");
}
