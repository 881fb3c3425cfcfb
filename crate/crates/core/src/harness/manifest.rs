//! Benchmark manifest: one [`SampleRecord`] per JSON line.
//!
//! An optional first line of the form `{"dataset": {...}}` carries
//! [`ManifestMetadata`].

use std::collections::{BTreeMap, HashSet};
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::HarnessError;
use crate::layout::VideoSceneLayout;
use crate::retrieval::EmbeddingVector;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Domain {
    Stationary,
    Translational,
}

impl Domain {
    pub const ALL: [Domain; 2] = [Domain::Stationary, Domain::Translational];

    pub fn name(&self) -> &'static str {
        match self {
            Domain::Stationary => "Stationary",
            Domain::Translational => "Translational",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sources {
    Single,
    Multiple,
}

/// Per-object spatial attribute. The first three apply to stationary
/// scenes, the rest to translational ones.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpatialTag {
    Left,
    Center,
    Right,
    LeftCrossing,
    RightCrossing,
    Approaching,
    Receding,
}

impl SpatialTag {
    pub const ALL: [SpatialTag; 7] = [
        SpatialTag::Left,
        SpatialTag::Center,
        SpatialTag::Right,
        SpatialTag::LeftCrossing,
        SpatialTag::RightCrossing,
        SpatialTag::Approaching,
        SpatialTag::Receding,
    ];

    pub fn domain(&self) -> Domain {
        match self {
            SpatialTag::Left | SpatialTag::Center | SpatialTag::Right => Domain::Stationary,
            _ => Domain::Translational,
        }
    }

    /// Image mirrored left to right.
    pub fn mirrored(self) -> Self {
        match self {
            SpatialTag::Left => SpatialTag::Right,
            SpatialTag::Right => SpatialTag::Left,
            SpatialTag::LeftCrossing => SpatialTag::RightCrossing,
            SpatialTag::RightCrossing => SpatialTag::LeftCrossing,
            other => other,
        }
    }

    /// Clip played backwards: every motion changes direction.
    pub fn reversed(self) -> Self {
        match self {
            SpatialTag::Approaching => SpatialTag::Receding,
            SpatialTag::Receding => SpatialTag::Approaching,
            SpatialTag::LeftCrossing => SpatialTag::RightCrossing,
            SpatialTag::RightCrossing => SpatialTag::LeftCrossing,
            other => other,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            SpatialTag::Left => "Left",
            SpatialTag::Center => "Center",
            SpatialTag::Right => "Right",
            SpatialTag::LeftCrossing => "Left Crossing",
            SpatialTag::RightCrossing => "Right Crossing",
            SpatialTag::Approaching => "Approaching",
            SpatialTag::Receding => "Receding",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub enum Provenance {
    #[default]
    #[serde(rename = "original")]
    Original,
    #[serde(rename = "flipped")]
    Flipped,
    #[serde(rename = "reversed")]
    Reversed,
    #[serde(rename = "flipped+reversed")]
    FlippedReversed,
}

impl Provenance {
    pub fn is_flipped(&self) -> bool {
        matches!(self, Provenance::Flipped | Provenance::FlippedReversed)
    }

    pub fn is_reversed(&self) -> bool {
        matches!(self, Provenance::Reversed | Provenance::FlippedReversed)
    }

    pub fn from_flags(flipped: bool, reversed: bool) -> Self {
        match (flipped, reversed) {
            (false, false) => Provenance::Original,
            (true, false) => Provenance::Flipped,
            (false, true) => Provenance::Reversed,
            (true, true) => Provenance::FlippedReversed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleRecord {
    pub id: String,
    pub audio_ref: String,
    #[serde(default = "default_true")]
    pub stereo: bool,
    /// Inline audio embedding.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub embedding: Option<EmbeddingVector>,
    /// Path to a JSON embedding file, used when `embedding` is absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub embedding_ref: Option<String>,
    pub gt_vsl: VideoSceneLayout,
    pub domain: Domain,
    pub sources: Sources,
    /// Spatial attribute per object id.
    #[serde(default)]
    pub spatial_tags: BTreeMap<u32, SpatialTag>,
    #[serde(default)]
    pub provenance: Provenance,
    /// Left and right audio channels are exchanged relative to the source
    /// recording.
    #[serde(default)]
    pub channels_swapped: bool,
}

fn default_true() -> bool {
    true
}

impl SampleRecord {
    pub fn check(&self) -> Result<(), String> {
        if self.id.trim().is_empty() {
            return Err("empty id".into());
        }
        let report = self.gt_vsl.validate();
        if !report.is_clean() {
            return Err(format!("invalid gt_vsl: {}", report.to_string().trim_end()));
        }
        let ids = self.gt_vsl.object_ids();
        for (id, tag) in &self.spatial_tags {
            if !ids.contains(id) {
                return Err(format!("spatial tag for unknown object {id}"));
            }
            if tag.domain() != self.domain {
                return Err(format!("tag {:?} does not belong to the {} domain", tag.name(), self.domain.name()));
            }
        }
        if let Some(e) = &self.embedding {
            if e.dim() == 0 || !e.is_finite() {
                return Err("embedding must be non-empty and finite".into());
            }
        }
        Ok(())
    }

    /// Resolves the query embedding, reading `embedding_ref` relative to
    /// `base` when needed.
    pub fn load_embedding(&self, base: Option<&Path>) -> Result<EmbeddingVector, String> {
        if let Some(e) = &self.embedding {
            return Ok(e.clone());
        }
        let r = self.embedding_ref.as_deref().ok_or("no embedding or embedding_ref")?;
        let path = match base {
            Some(b) if Path::new(r).is_relative() => b.join(r),
            _ => Path::new(r).to_path_buf(),
        };
        let text = std::fs::read_to_string(&path).map_err(|e| format!("{}: {e}", path.display()))?;
        EmbeddingVector::from_json(&text).map_err(|e| format!("{}: {e}", path.display()))
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct ManifestMetadata {
    pub name: String,
    pub version: String,
    pub description: String,
}

#[derive(Serialize, Deserialize)]
struct Header {
    dataset: ManifestMetadata,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Manifest {
    pub metadata: ManifestMetadata,
    records: Vec<SampleRecord>,
}

impl Manifest {
    pub fn new(metadata: ManifestMetadata, records: Vec<SampleRecord>) -> Result<Self, HarnessError> {
        let mut ids = HashSet::new();
        for r in &records {
            if !ids.insert(r.id.as_str()) {
                return Err(HarnessError::DuplicateId(r.id.clone()));
            }
            r.check().map_err(|message| HarnessError::InvalidRecord { id: r.id.clone(), message })?;
        }
        Ok(Manifest { metadata, records })
    }

    pub fn records(&self) -> &[SampleRecord] {
        &self.records
    }

    pub fn into_records(self) -> Vec<SampleRecord> {
        self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn get(&self, id: &str) -> Option<&SampleRecord> {
        self.records.iter().find(|r| r.id == id)
    }

    pub fn from_jsonl(text: &str) -> Result<Self, HarnessError> {
        let mut metadata = ManifestMetadata::default();
        let mut records = Vec::new();
        let mut ids = HashSet::new();
        for (i, line) in text.lines().enumerate() {
            let line_no = i + 1;
            if line.trim().is_empty() {
                continue;
            }
            let schema = |message: String| HarnessError::Schema { line: line_no, message };
            let value: serde_json::Value = serde_json::from_str(line).map_err(|e| schema(e.to_string()))?;
            if records.is_empty() && value.get("dataset").is_some() && value.get("id").is_none() {
                metadata = serde_json::from_value::<Header>(value).map_err(|e| schema(e.to_string()))?.dataset;
                continue;
            }
            let record: SampleRecord = serde_json::from_value(value).map_err(|e| schema(e.to_string()))?;
            record.check().map_err(|m| schema(format!("sample {:?}: {m}", record.id)))?;
            if !ids.insert(record.id.clone()) {
                return Err(schema(format!("duplicate sample id {:?}", record.id)));
            }
            records.push(record);
        }
        Ok(Manifest { metadata, records })
    }

    pub fn load(path: &Path) -> Result<Self, HarnessError> {
        let mut text = String::new();
        for line in BufReader::new(File::open(path)?).lines() {
            text.push_str(&line?);
            text.push('\n');
        }
        Manifest::from_jsonl(&text)
    }

    pub fn write_jsonl(&self, mut w: impl Write) -> std::io::Result<()> {
        if self.metadata != ManifestMetadata::default() {
            serde_json::to_writer(&mut w, &Header { dataset: self.metadata.clone() })?;
            w.write_all(b"\n")?;
        }
        for r in &self.records {
            serde_json::to_writer(&mut w, r)?;
            w.write_all(b"\n")?;
        }
        Ok(())
    }

    pub fn save(&self, path: &Path) -> Result<(), HarnessError> {
        let mut w = BufWriter::new(File::create(path)?);
        self.write_jsonl(&mut w)?;
        w.flush()?;
        Ok(())
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::layout::tests::sample_vsl;

    pub(crate) fn record(id: &str, domain: Domain, sources: Sources) -> SampleRecord {
        let tags = match domain {
            Domain::Stationary => [(1, SpatialTag::Left), (2, SpatialTag::Right)],
            Domain::Translational => [(1, SpatialTag::Approaching), (2, SpatialTag::LeftCrossing)],
        };
        SampleRecord {
            id: id.into(),
            audio_ref: format!("audio/{id}.wav"),
            stereo: true,
            embedding: Some(EmbeddingVector(vec![1.0, id.len() as f64])),
            embedding_ref: None,
            gt_vsl: sample_vsl(),
            domain,
            sources,
            spatial_tags: tags.into_iter().collect(),
            provenance: Provenance::Original,
            channels_swapped: false,
        }
    }

    #[test]
    fn jsonl_round_trip_with_header() {
        let m = Manifest::new(
            ManifestMetadata { name: "demo".into(), ..Default::default() },
            vec![record("a", Domain::Stationary, Sources::Single), record("b", Domain::Translational, Sources::Multiple)],
        )
        .unwrap();
        let mut buf = Vec::new();
        m.write_jsonl(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("{\"dataset\""));
        assert!(text.contains("\"provenance\":\"original\""));
        assert!(text.contains("\"2\":\"left-crossing\""));
        assert_eq!(Manifest::from_jsonl(&text).unwrap(), m);
    }

    #[test]
    fn duplicate_ids_are_rejected() {
        let r = record("a", Domain::Stationary, Sources::Single);
        assert!(matches!(
            Manifest::new(ManifestMetadata::default(), vec![r.clone(), r.clone()]),
            Err(HarnessError::DuplicateId(_))
        ));
        let line = serde_json::to_string(&r).unwrap();
        match Manifest::from_jsonl(&format!("{line}\n\n{line}\n")) {
            Err(HarnessError::Schema { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn tags_must_match_domain_and_objects() {
        let mut r = record("a", Domain::Stationary, Sources::Single);
        r.spatial_tags.insert(1, SpatialTag::Receding);
        assert!(r.check().is_err());
        let mut r = record("a", Domain::Stationary, Sources::Single);
        r.spatial_tags.insert(9, SpatialTag::Center);
        assert!(r.check().is_err());
    }

    #[test]
    fn bad_split_label_is_a_schema_error() {
        let line = serde_json::to_string(&record("a", Domain::Stationary, Sources::Single))
            .unwrap()
            .replace("\"stationary\"", "\"underwater\"");
        assert!(matches!(Manifest::from_jsonl(&line), Err(HarnessError::Schema { line: 1, .. })));
    }

    #[test]
    fn tag_mirroring_and_reversal() {
        for t in SpatialTag::ALL {
            assert_eq!(t.mirrored().mirrored(), t);
            assert_eq!(t.reversed().reversed(), t);
            assert_eq!(t.mirrored().domain(), t.domain());
        }
        assert_eq!(SpatialTag::Left.mirrored(), SpatialTag::Right);
        assert_eq!(SpatialTag::Approaching.reversed(), SpatialTag::Receding);
        assert_eq!(SpatialTag::Center.mirrored(), SpatialTag::Center);
    }

    #[test]
    fn embedding_ref_resolves_relative_to_base() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("e.json"), "[0.5, 0.25]").unwrap();
        let mut r = record("a", Domain::Stationary, Sources::Single);
        r.embedding = None;
        r.embedding_ref = Some("e.json".into());
        assert_eq!(r.load_embedding(Some(dir.path())).unwrap().0, vec![0.5, 0.25]);
        r.embedding_ref = None;
        assert!(r.load_embedding(None).is_err());
    }
}
