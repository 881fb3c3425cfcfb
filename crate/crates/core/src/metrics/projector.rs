//! Label embedding providers for the soft category indicator.

use std::collections::HashMap;
use std::path::Path;
use std::sync::{Arc, RwLock};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use sha2::{Digest, Sha256};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ProjectorError {
    #[error("projector has no vector for label {0:?}")]
    Miss(String),
    #[error("projector file: {0}")]
    File(String),
}

pub type Embedding = Arc<[f64]>;

/// Maps a label phrase to a unit-norm vector of fixed dimension.
///
/// Implementations are read-only after construction and shared across
/// scoring threads.
pub trait LabelProjector: Send + Sync {
    fn dim(&self) -> usize;
    fn project(&self, label: &str) -> Result<Embedding, ProjectorError>;
}

fn normalize(mut v: Vec<f64>) -> Option<Vec<f64>> {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if !norm.is_finite() || norm == 0.0 {
        return None;
    }
    v.iter_mut().for_each(|x| *x /= norm);
    Some(v)
}

pub fn cosine(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Cosine similarity of the two projected labels, clamped below at zero.
pub fn soft_label_sim(a: &str, b: &str, projector: &dyn LabelProjector) -> Result<f64, ProjectorError> {
    if a == b {
        // Still surface misses for unknown labels.
        projector.project(a)?;
        return Ok(1.0);
    }
    let (va, vb) = (projector.project(a)?, projector.project(b)?);
    Ok(cosine(&va, &vb).clamp(0.0, 1.0))
}

/// Deterministic pseudo-embeddings seeded from a SHA-256 of the label.
/// Distinct labels get nearly orthogonal vectors in high dimension.
pub struct HashProjector {
    dim: usize,
    memo: RwLock<HashMap<String, Embedding>>,
}

impl HashProjector {
    pub fn new(dim: usize) -> Self {
        assert!(dim > 0, "projector dimension must be positive");
        HashProjector { dim, memo: RwLock::new(HashMap::new()) }
    }

    fn generate(&self, label: &str) -> Embedding {
        let digest = Sha256::digest(label.as_bytes());
        let mut seed = [0u8; 32];
        seed.copy_from_slice(&digest);
        let mut rng = ChaCha8Rng::from_seed(seed);
        loop {
            let v: Vec<f64> = StandardNormal.sample_iter(&mut rng).take(self.dim).collect();
            if let Some(v) = normalize(v) {
                return v.into();
            }
        }
    }
}

impl Default for HashProjector {
    fn default() -> Self {
        HashProjector::new(256)
    }
}

impl LabelProjector for HashProjector {
    fn dim(&self) -> usize {
        self.dim
    }

    fn project(&self, label: &str) -> Result<Embedding, ProjectorError> {
        if let Some(v) = self.memo.read().unwrap().get(label) {
            return Ok(v.clone());
        }
        let v = self.generate(label);
        self.memo.write().unwrap().entry(label.to_string()).or_insert(v.clone());
        Ok(v)
    }
}

/// Precomputed label table, normalized on load.
#[derive(Debug, Clone)]
pub struct TableProjector {
    dim: usize,
    table: HashMap<String, Embedding>,
}

impl TableProjector {
    pub fn from_map(map: HashMap<String, Vec<f64>>) -> Result<Self, ProjectorError> {
        let mut dim = None;
        let mut table = HashMap::with_capacity(map.len());
        for (label, v) in map {
            match dim {
                None => dim = Some(v.len()),
                Some(d) if d != v.len() => {
                    return Err(ProjectorError::File(format!(
                        "label {label:?} has dimension {}, expected {d}",
                        v.len()
                    )))
                }
                Some(_) => {}
            }
            let v = normalize(v).ok_or_else(|| ProjectorError::File(format!("label {label:?} has a zero vector")))?;
            table.insert(label, v.into());
        }
        let dim = dim.ok_or_else(|| ProjectorError::File("empty projector table".into()))?;
        if dim == 0 {
            return Err(ProjectorError::File("zero-dimensional vectors".into()));
        }
        Ok(TableProjector { dim, table })
    }

    /// One-hot vectors: equal labels match fully, distinct labels not at all.
    pub fn one_hot<I, S>(labels: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut names: Vec<String> = labels.into_iter().map(Into::into).collect();
        names.sort();
        names.dedup();
        let dim = names.len().max(1);
        let table = names
            .into_iter()
            .enumerate()
            .map(|(i, name)| {
                let mut v = vec![0.0; dim];
                v[i] = 1.0;
                (name, Embedding::from(v))
            })
            .collect();
        TableProjector { dim, table }
    }

    /// Reads a JSON object mapping label to float array.
    pub fn load(path: &Path) -> Result<Self, ProjectorError> {
        let text = std::fs::read_to_string(path).map_err(|e| ProjectorError::File(format!("{}: {e}", path.display())))?;
        let map: HashMap<String, Vec<f64>> =
            serde_json::from_str(&text).map_err(|e| ProjectorError::File(format!("{}: {e}", path.display())))?;
        Self::from_map(map)
    }

    pub fn len(&self) -> usize {
        self.table.len()
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }
}

impl LabelProjector for TableProjector {
    fn dim(&self) -> usize {
        self.dim
    }

    fn project(&self, label: &str) -> Result<Embedding, ProjectorError> {
        self.table.get(label).cloned().ok_or_else(|| ProjectorError::Miss(label.to_string()))
    }
}
