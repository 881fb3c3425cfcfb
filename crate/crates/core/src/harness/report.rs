//! Similarity report: mean scores x100 per metric, split and domain.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::evaluate::SampleScore;
use super::manifest::{Domain, Sources};
use super::HarnessError;
use crate::interpolate::CaptionMode;
use crate::metrics::Metric;

/// Mean on the x100 scale, `None` when the cell has no samples.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Cell {
    pub mean: Option<f64>,
    pub count: usize,
}

impl Cell {
    fn from_sum(sum: f64, count: usize) -> Self {
        Cell { mean: (count > 0).then(|| 100.0 * sum / count as f64), count }
    }

    fn text(&self) -> String {
        self.mean.map_or_else(|| "-".to_string(), |m| format!("{m:.2}"))
    }
}

/// Single-source (S), multi-source (M) and combined (C) cells.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct DomainCells {
    pub single: Cell,
    pub multiple: Cell,
    pub combined: Cell,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricTable {
    pub metric: Metric,
    pub stationary: DomainCells,
    pub translational: DomainCells,
}

impl MetricTable {
    pub fn domain(&self, d: Domain) -> &DomainCells {
        match d {
            Domain::Stationary => &self.stationary,
            Domain::Translational => &self.translational,
        }
    }

    pub fn cells(&self) -> [Cell; 6] {
        let (s, t) = (&self.stationary, &self.translational);
        [s.single, s.multiple, s.combined, t.single, t.multiple, t.combined]
    }
}

/// Settings that distinguish one run from another.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct ReportConfig {
    pub k: Option<usize>,
    pub strategy: Option<String>,
    pub temperature: Option<f64>,
    pub caption_mode: Option<CaptionMode>,
    pub seed: Option<u64>,
    pub model: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimilarityReport {
    pub config: ReportConfig,
    pub metrics: Vec<Metric>,
    pub tables: Vec<MetricTable>,
    pub samples: usize,
    pub failures: usize,
    /// Sorted by id.
    pub per_sample: Vec<SampleScore>,
}

fn aggregate(scores: &[SampleScore], metric: Metric, domain: Domain) -> DomainCells {
    let (mut s, mut m, mut ns, mut nm) = (0.0, 0.0, 0, 0);
    for x in scores.iter().filter(|x| x.domain == domain) {
        let v = x.score(metric);
        match x.sources {
            Sources::Single => {
                s += v;
                ns += 1;
            }
            Sources::Multiple => {
                m += v;
                nm += 1;
            }
        }
    }
    DomainCells {
        single: Cell::from_sum(s, ns),
        multiple: Cell::from_sum(m, nm),
        combined: Cell::from_sum(s + m, ns + nm),
    }
}

impl SimilarityReport {
    pub fn from_scores(config: ReportConfig, metrics: &[Metric], mut per_sample: Vec<SampleScore>) -> Self {
        per_sample.sort_by(|a, b| a.id.cmp(&b.id));
        let tables = metrics
            .iter()
            .map(|&metric| MetricTable {
                metric,
                stationary: aggregate(&per_sample, metric, Domain::Stationary),
                translational: aggregate(&per_sample, metric, Domain::Translational),
            })
            .collect();
        SimilarityReport {
            config,
            metrics: metrics.to_vec(),
            tables,
            samples: per_sample.len(),
            failures: per_sample.iter().filter(|s| s.failure.is_some()).count(),
            per_sample,
        }
    }

    pub fn table(&self, metric: Metric) -> Option<&MetricTable> {
        self.tables.iter().find(|t| t.metric == metric)
    }

    /// Recomputes every combined cell as the count-weighted mean of the
    /// S and M cells and as the plain mean of raw sample scores.
    pub fn check_consistency(&self, tol: f64) -> Result<(), String> {
        for t in &self.tables {
            for d in Domain::ALL {
                let cells = t.domain(d);
                let raw: Vec<f64> = self.per_sample.iter().filter(|s| s.domain == d).map(|s| s.score(t.metric)).collect();
                if raw.len() != cells.combined.count || cells.single.count + cells.multiple.count != raw.len() {
                    return Err(format!("{} {}: count mismatch", t.metric, d.name()));
                }
                let Some(c) = cells.combined.mean else { continue };
                let direct = 100.0 * raw.iter().sum::<f64>() / raw.len() as f64;
                let weighted = (cells.single.mean.unwrap_or(0.0) * cells.single.count as f64
                    + cells.multiple.mean.unwrap_or(0.0) * cells.multiple.count as f64)
                    / cells.combined.count as f64;
                if (c - direct).abs() > tol || (c - weighted).abs() > tol {
                    return Err(format!("{} {}: C={c} raw={direct} weighted={weighted}", t.metric, d.name()));
                }
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let c = &self.config;
        let mut echo = Vec::new();
        if let Some(k) = c.k {
            echo.push(format!("k={k}"));
        }
        if let Some(s) = &c.strategy {
            echo.push(format!("strategy={s}"));
        }
        if let Some(t) = c.temperature {
            echo.push(format!("temperature={t}"));
        }
        if let Some(m) = c.caption_mode {
            echo.push(format!("caption_mode={}", format!("{m:?}").to_lowercase()));
        }
        if let Some(s) = c.seed {
            echo.push(format!("seed={s}"));
        }
        if let Some(m) = &c.model {
            echo.push(format!("model={m}"));
        }
        if !echo.is_empty() {
            writeln!(out, "{}", echo.join(" ")).unwrap();
        }
        writeln!(out, "samples={} failures={}", self.samples, self.failures).unwrap();
        writeln!(out).unwrap();

        let name_w = self.tables.iter().map(|t| t.metric.name().len()).max().unwrap_or(0).max(6);
        let cell_w = 6;
        let group_w = 3 * cell_w + 2;
        writeln!(out, "{:name_w$} | {:^group_w$} | {:^group_w$}", "Metric", "Stationary", "Translational").unwrap();
        let sub = format!("{:>cell_w$} {:>cell_w$} {:>cell_w$}", "S", "M", "C");
        writeln!(out, "{:name_w$} | {sub} | {sub}", "").unwrap();
        for t in &self.tables {
            let cells: Vec<String> = t.cells().iter().map(|c| format!("{:>cell_w$}", c.text())).collect();
            writeln!(out, "{:name_w$} | {} | {}", t.metric.name(), cells[..3].join(" "), cells[3..].join(" ")).unwrap();
        }
        let failed: Vec<&SampleScore> = self.per_sample.iter().filter(|s| s.failure.is_some()).collect();
        if !failed.is_empty() {
            writeln!(out).unwrap();
            writeln!(out, "failures:").unwrap();
            for s in failed.iter().take(20) {
                writeln!(out, "  {}: {}", s.id, s.failure.as_deref().unwrap_or_default()).unwrap();
            }
            if failed.len() > 20 {
                writeln!(out, "  ... and {} more", failed.len() - 20).unwrap();
            }
        }
        out
    }

    /// Writes `report.json` and `report.txt` into `dir`.
    pub fn save(&self, dir: &Path) -> Result<(), HarnessError> {
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join("report.json"), self.to_json())?;
        std::fs::write(dir.join("report.txt"), self.to_text())?;
        Ok(())
    }
}
