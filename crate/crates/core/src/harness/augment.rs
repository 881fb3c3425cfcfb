//! Mirror and time-reversal augmentation of benchmark records.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::manifest::{Domain, Manifest, Provenance, SampleRecord};
use super::HarnessError;
use crate::layout::{flip_horizontal, reverse_temporal};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Augmentation {
    #[serde(rename = "flip")]
    Flip,
    #[serde(rename = "reverse")]
    Reverse,
    #[serde(rename = "flip+reverse")]
    FlipReverse,
}

impl Augmentation {
    pub fn flips(&self) -> bool {
        matches!(self, Augmentation::Flip | Augmentation::FlipReverse)
    }

    pub fn reverses(&self) -> bool {
        matches!(self, Augmentation::Reverse | Augmentation::FlipReverse)
    }

    pub fn suffix(&self) -> &'static str {
        match self {
            Augmentation::Flip => "-flip",
            Augmentation::Reverse => "-rev",
            Augmentation::FlipReverse => "-fliprev",
        }
    }

    /// Parses a comma-separated list such as `flip,reverse,flip+reverse`.
    pub fn parse_list(s: &str) -> Result<Vec<Augmentation>, String> {
        s.split(',')
            .map(str::trim)
            .filter(|p| !p.is_empty() && *p != "none")
            .map(|p| p.parse())
            .collect()
    }
}

impl fmt::Display for Augmentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Augmentation::Flip => "flip",
            Augmentation::Reverse => "reverse",
            Augmentation::FlipReverse => "flip+reverse",
        })
    }
}

impl std::str::FromStr for Augmentation {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "flip" => Ok(Augmentation::Flip),
            "reverse" | "rev" => Ok(Augmentation::Reverse),
            "flip+reverse" | "fliprev" => Ok(Augmentation::FlipReverse),
            other => Err(format!("unknown augmentation {other:?}")),
        }
    }
}

/// Which augmentations each domain receives. Domains listed in `flip_only`
/// must not be time-reversed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct AugmentRules {
    pub stationary: Vec<Augmentation>,
    pub translational: Vec<Augmentation>,
    pub flip_only: Vec<Domain>,
}

impl Default for AugmentRules {
    fn default() -> Self {
        AugmentRules {
            stationary: vec![Augmentation::Flip],
            translational: vec![Augmentation::Flip, Augmentation::Reverse, Augmentation::FlipReverse],
            flip_only: vec![Domain::Stationary],
        }
    }
}

impl AugmentRules {
    pub fn for_domain(&self, domain: Domain) -> &[Augmentation] {
        match domain {
            Domain::Stationary => &self.stationary,
            Domain::Translational => &self.translational,
        }
    }

    pub fn check(&self) -> Result<(), HarnessError> {
        for &domain in &self.flip_only {
            if let Some(a) = self.for_domain(domain).iter().find(|a| a.reverses()) {
                return Err(HarnessError::RuleViolation {
                    subject: domain.name().to_string(),
                    message: format!("{a} requested but the domain is flip-only"),
                });
            }
        }
        Ok(())
    }
}

/// Derives one augmented copy of an original record.
pub fn augment_record(record: &SampleRecord, aug: Augmentation) -> SampleRecord {
    let mut out = record.clone();
    out.id = format!("{}{}", record.id, aug.suffix());
    if aug.flips() {
        out.gt_vsl = flip_horizontal(&out.gt_vsl);
        out.spatial_tags = out.spatial_tags.into_iter().map(|(id, t)| (id, t.mirrored())).collect();
        out.channels_swapped = !out.channels_swapped;
    }
    if aug.reverses() {
        out.gt_vsl = reverse_temporal(&out.gt_vsl);
        out.spatial_tags = out.spatial_tags.into_iter().map(|(id, t)| (id, t.reversed())).collect();
    }
    out.provenance = Provenance::from_flags(
        record.provenance.is_flipped() ^ aug.flips(),
        record.provenance.is_reversed() ^ aug.reverses(),
    );
    out
}

/// Keeps every record and appends the augmented copies of each original
/// record right after it.
pub fn augment_manifest(manifest: &Manifest, rules: &AugmentRules) -> Result<Manifest, HarnessError> {
    rules.check()?;
    let mut out = Vec::with_capacity(manifest.len() * 2);
    for r in manifest.records() {
        out.push(r.clone());
        if r.provenance != Provenance::Original {
            continue;
        }
        for &aug in rules.for_domain(r.domain) {
            out.push(augment_record(r, aug));
        }
    }
    Manifest::new(manifest.metadata.clone(), out)
}
