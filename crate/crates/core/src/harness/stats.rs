//! Breakdown statistics: scene distribution and per-object spatial
//! attributes.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::manifest::{Domain, Manifest, Sources, SpatialTag};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct SceneDistribution {
    pub stationary_single: usize,
    pub stationary_multiple: usize,
    pub translational_single: usize,
    pub translational_multiple: usize,
}

impl SceneDistribution {
    pub fn count(&self, domain: Domain, sources: Sources) -> usize {
        match (domain, sources) {
            (Domain::Stationary, Sources::Single) => self.stationary_single,
            (Domain::Stationary, Sources::Multiple) => self.stationary_multiple,
            (Domain::Translational, Sources::Single) => self.translational_single,
            (Domain::Translational, Sources::Multiple) => self.translational_multiple,
        }
    }

    pub fn subtotal(&self, domain: Domain) -> usize {
        self.count(domain, Sources::Single) + self.count(domain, Sources::Multiple)
    }

    pub fn total(&self) -> usize {
        self.subtotal(Domain::Stationary) + self.subtotal(Domain::Translational)
    }

    /// Single, Multiple, Subtotal for each domain, then Total.
    pub fn row(&self) -> [usize; 7] {
        [
            self.stationary_single,
            self.stationary_multiple,
            self.subtotal(Domain::Stationary),
            self.translational_single,
            self.translational_multiple,
            self.subtotal(Domain::Translational),
            self.total(),
        ]
    }
}

/// Object counts per spatial tag, in [`SpatialTag::ALL`] order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct SpatialAttributes {
    pub counts: [usize; 7],
}

impl SpatialAttributes {
    pub fn count(&self, tag: SpatialTag) -> usize {
        self.counts[SpatialTag::ALL.iter().position(|t| *t == tag).unwrap()]
    }

    pub fn subtotal(&self, domain: Domain) -> usize {
        SpatialTag::ALL.iter().filter(|t| t.domain() == domain).map(|&t| self.count(t)).sum()
    }

    pub fn total(&self) -> usize {
        self.counts.iter().sum()
    }

    /// Left, Center, Right, Subtotal, Left Crossing, Right Crossing,
    /// Approaching, Receding, Subtotal, Total.
    pub fn row(&self) -> [usize; 10] {
        let c = &self.counts;
        [
            c[0],
            c[1],
            c[2],
            self.subtotal(Domain::Stationary),
            c[3],
            c[4],
            c[5],
            c[6],
            self.subtotal(Domain::Translational),
            self.total(),
        ]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct BreakdownStats {
    pub scenes: SceneDistribution,
    pub spatial: SpatialAttributes,
}

pub fn stats(manifest: &Manifest) -> BreakdownStats {
    let mut out = BreakdownStats::default();
    for r in manifest.records() {
        let slot = match (r.domain, r.sources) {
            (Domain::Stationary, Sources::Single) => &mut out.scenes.stationary_single,
            (Domain::Stationary, Sources::Multiple) => &mut out.scenes.stationary_multiple,
            (Domain::Translational, Sources::Single) => &mut out.scenes.translational_single,
            (Domain::Translational, Sources::Multiple) => &mut out.scenes.translational_multiple,
        };
        *slot += 1;
        for tag in r.spatial_tags.values() {
            out.spatial.counts[SpatialTag::ALL.iter().position(|t| t == tag).unwrap()] += 1;
        }
    }
    out
}

fn table(f: &mut fmt::Formatter<'_>, groups: &[(&str, usize)], headers: &[&str], values: &[usize]) -> fmt::Result {
    let widths: Vec<usize> = headers
        .iter()
        .zip(values)
        .map(|(h, v)| h.len().max(v.to_string().len()))
        .collect();
    let mut col = 0;
    let mut line = String::new();
    for (name, span) in groups {
        let w: usize = widths[col..col + span].iter().sum::<usize>() + 3 * (span - 1);
        line.push_str(&format!("{name:^w$} | "));
        col += span;
    }
    writeln!(f, "{}", line.trim_end_matches(['|', ' ']))?;
    let cells: Vec<String> = headers.iter().zip(&widths).map(|(h, w)| format!("{h:>w$}")).collect();
    writeln!(f, "{}", cells.join(" | "))?;
    let cells: Vec<String> = values.iter().zip(&widths).map(|(v, w)| format!("{v:>w$}")).collect();
    writeln!(f, "{}", cells.join(" | "))
}

impl fmt::Display for BreakdownStats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Scene distribution")?;
        table(
            f,
            &[("Stationary", 3), ("Translational", 3), ("", 1)],
            &["Single", "Multiple", "Subtotal", "Single", "Multiple", "Subtotal", "Total"],
            &self.scenes.row(),
        )?;
        writeln!(f)?;
        writeln!(f, "Spatial attribute (per object)")?;
        table(
            f,
            &[("Stationary", 4), ("Translational", 5), ("", 1)],
            &[
                "Left",
                "Center",
                "Right",
                "Subtotal",
                "Left Crossing",
                "Right Crossing",
                "Approaching",
                "Receding",
                "Subtotal",
                "Total",
            ],
            &self.spatial.row(),
        )
    }
}
