//! Scoring planned layouts against a manifest's ground truth.

use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::manifest::{Domain, Manifest, SampleRecord, Sources};
use super::report::{ReportConfig, SimilarityReport};
use crate::layout::VideoSceneLayout;
use crate::metrics::{score_sequence_all, LabelProjector, Metric};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleScore {
    pub id: String,
    pub domain: Domain,
    pub sources: Sources,
    /// Sequence mean per metric in [0, 1]; 0 for failures.
    pub scores: BTreeMap<Metric, f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub failure: Option<String>,
}

impl SampleScore {
    pub fn score(&self, metric: Metric) -> f64 {
        self.scores.get(&metric).copied().unwrap_or(0.0)
    }

    fn failed(record: &SampleRecord, metrics: &[Metric], reason: String) -> Self {
        SampleScore {
            id: record.id.clone(),
            domain: record.domain,
            sources: record.sources,
            scores: metrics.iter().map(|&m| (m, 0.0)).collect(),
            failure: Some(reason),
        }
    }
}

pub(crate) fn score_record(
    record: &SampleRecord,
    plan: Option<&VideoSceneLayout>,
    projector: &dyn LabelProjector,
    metrics: &[Metric],
    missing_reason: Option<&str>,
) -> SampleScore {
    let Some(plan) = plan else {
        return SampleScore::failed(record, metrics, missing_reason.unwrap_or("no plan").to_string());
    };
    match score_sequence_all(plan, &record.gt_vsl, metrics, projector) {
        Ok(scores) => SampleScore {
            id: record.id.clone(),
            domain: record.domain,
            sources: record.sources,
            scores: scores.into_iter().map(|s| (s.metric, s.mean)).collect(),
            failure: None,
        },
        Err(e) => SampleScore::failed(record, metrics, format!("scoring failed: {e}")),
    }
}

/// Scores every manifest record. Records without a plan count as failures
/// with score 0. An empty `metrics` slice means all metrics.
pub fn evaluate(
    manifest: &Manifest,
    plans: &HashMap<String, VideoSceneLayout>,
    projector: &dyn LabelProjector,
    metrics: &[Metric],
) -> SimilarityReport {
    evaluate_with(manifest, plans, projector, metrics, &HashMap::new(), ReportConfig::default())
}

pub(crate) fn evaluate_with(
    manifest: &Manifest,
    plans: &HashMap<String, VideoSceneLayout>,
    projector: &dyn LabelProjector,
    metrics: &[Metric],
    reasons: &HashMap<String, String>,
    config: ReportConfig,
) -> SimilarityReport {
    let metrics: Vec<Metric> = if metrics.is_empty() { Metric::ALL.to_vec() } else { metrics.to_vec() };
    let scores: Vec<SampleScore> = manifest
        .records()
        .par_iter()
        .map(|r| score_record(r, plans.get(&r.id), projector, &metrics, reasons.get(&r.id).map(String::as_str)))
        .collect();
    SimilarityReport::from_scores(config, &metrics, scores)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::augment::{augment_record, Augmentation};
    use crate::harness::manifest::tests::record;
    use crate::harness::manifest::ManifestMetadata;
    use crate::layout::{flip_horizontal, reverse_temporal};
    use crate::metrics::HashProjector;

    fn manifest() -> Manifest {
        Manifest::new(
            ManifestMetadata::default(),
            vec![
                record("a", Domain::Stationary, Sources::Single),
                record("b", Domain::Stationary, Sources::Multiple),
                record("c", Domain::Translational, Sources::Single),
                record("d", Domain::Translational, Sources::Multiple),
            ],
        )
        .unwrap()
    }

    fn gt_plans(m: &Manifest) -> HashMap<String, VideoSceneLayout> {
        m.records().iter().map(|r| (r.id.clone(), r.gt_vsl.clone())).collect()
    }

    #[test]
    fn ground_truth_plans_score_100() {
        let m = manifest();
        let r = evaluate(&m, &gt_plans(&m), &HashProjector::default(), &[]);
        assert_eq!(r.failures, 0);
        for t in &r.tables {
            for c in t.cells() {
                assert!((c.mean.unwrap() - 100.0).abs() < 1e-9);
            }
        }
        r.check_consistency(1e-9).unwrap();
    }

    #[test]
    fn no_plans_score_zero() {
        let m = manifest();
        let r = evaluate(&m, &HashMap::new(), &HashProjector::default(), &[Metric::LtSim]);
        assert_eq!(r.failures, m.len());
        assert_eq!(r.tables.len(), 1);
        assert!(r.tables[0].cells().iter().all(|c| c.mean == Some(0.0)));
    }

    #[test]
    fn permutation_invariant() {
        let m = manifest();
        let mut plans = gt_plans(&m);
        plans.insert("b".into(), flip_horizontal(&m.records()[1].gt_vsl));
        let p = HashProjector::default();
        let r1 = evaluate(&m, &plans, &p, &[]);
        let mut rev = m.records().to_vec();
        rev.reverse();
        let r2 = evaluate(&Manifest::new(ManifestMetadata::default(), rev).unwrap(), &plans, &p, &[]);
        assert_eq!(r1, r2);
    }

    #[test]
    fn augmented_pairs_match_originals() {
        let m = manifest();
        let p = HashProjector::default();
        let mut plans = HashMap::new();
        for r in m.records() {
            plans.insert(r.id.clone(), reverse_temporal(&r.gt_vsl));
        }
        let base = evaluate(&m, &plans, &p, &[]);
        let flipped: Vec<_> = m.records().iter().map(|r| augment_record(r, Augmentation::Flip)).collect();
        let mut fplans = HashMap::new();
        for (r, f) in m.records().iter().zip(&flipped) {
            fplans.insert(f.id.clone(), flip_horizontal(&plans[&r.id]));
        }
        let fm = Manifest::new(ManifestMetadata::default(), flipped).unwrap();
        let other = evaluate(&fm, &fplans, &p, &[]);
        for (a, b) in base.tables.iter().zip(&other.tables) {
            for (x, y) in a.cells().iter().zip(b.cells()) {
                assert!((x.mean.unwrap() - y.mean.unwrap()).abs() < 1e-9);
            }
        }
    }
}
