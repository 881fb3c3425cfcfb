//! Candidate database of example conversations and nearest-neighbor
//! selection over precomputed audio embeddings.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashSet};
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::layout::VideoSceneLayout;

#[derive(Debug, Error)]
pub enum RetrievalError {
    #[error("query has dimension {query}, database has {db}")]
    DimMismatch { query: usize, db: usize },
    #[error("requested {k} examples from a database of {available}")]
    InsufficientCandidates { k: usize, available: usize },
    #[error("line {line}: {message}")]
    SchemaError { line: usize, message: String },
    #[error("duplicate example id {0:?}")]
    DuplicateId(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EmbeddingVector(pub Vec<f64>);

impl EmbeddingVector {
    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|x| x.is_finite())
    }

    /// Reads either a bare JSON array or an object with an `embedding` field.
    pub fn from_json(text: &str) -> Result<Self, String> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Shape {
            Bare(Vec<f64>),
            Wrapped { embedding: Vec<f64> },
        }
        let v = match serde_json::from_str::<Shape>(text).map_err(|e| e.to_string())? {
            Shape::Bare(v) | Shape::Wrapped { embedding: v } => EmbeddingVector(v),
        };
        if v.dim() == 0 || !v.is_finite() {
            return Err("embedding must be a non-empty array of finite numbers".into());
        }
        Ok(v)
    }
}

/// Cosine similarity; zero when either vector has zero norm.
pub fn cosine(a: &[f64], b: &[f64]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    if na == 0.0 || nb == 0.0 {
        return 0.0;
    }
    dot / (na * nb)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExampleConversation {
    pub id: String,
    pub audio_ref: String,
    pub embedding: EmbeddingVector,
    pub reasoning: String,
    pub vsl: VideoSceneLayout,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "kind")]
pub enum SelectionStrategy {
    #[default]
    Knn,
    Random { seed: u64 },
    Fixed,
}

impl SelectionStrategy {
    pub fn name(&self) -> &'static str {
        match self {
            SelectionStrategy::Knn => "knn",
            SelectionStrategy::Random { .. } => "random",
            SelectionStrategy::Fixed => "fixed",
        }
    }

    pub fn parse(name: &str, seed: u64) -> Result<Self, String> {
        match name.to_ascii_lowercase().as_str() {
            "knn" => Ok(SelectionStrategy::Knn),
            "random" => Ok(SelectionStrategy::Random { seed }),
            "fixed" => Ok(SelectionStrategy::Fixed),
            other => Err(format!("unknown selection strategy {other:?}")),
        }
    }
}

/// A retrieved example with its similarity to the query.
#[derive(Debug, Clone, PartialEq)]
pub struct Neighbor<'a> {
    pub example: &'a ExampleConversation,
    pub similarity: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct CandidateDatabase {
    entries: Vec<ExampleConversation>,
    norms: Vec<f64>,
    dim: usize,
}

/// Heap entry ordered so that the *worst* candidate sits at the top.
struct Ranked {
    similarity: f64,
    index: usize,
    id_rank: usize,
}

impl PartialEq for Ranked {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Ranked {}
impl PartialOrd for Ranked {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Ranked {
    /// Greater means worse: lower similarity, then later id.
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .similarity
            .total_cmp(&self.similarity)
            .then_with(|| self.id_rank.cmp(&other.id_rank))
    }
}

impl CandidateDatabase {
    pub fn new(entries: Vec<ExampleConversation>) -> Result<Self, RetrievalError> {
        let dim = entries.first().map_or(0, |e| e.embedding.dim());
        let mut ids = HashSet::new();
        for e in &entries {
            if !ids.insert(e.id.as_str()) {
                return Err(RetrievalError::DuplicateId(e.id.clone()));
            }
            if e.embedding.dim() != dim {
                return Err(RetrievalError::DimMismatch { query: e.embedding.dim(), db: dim });
            }
        }
        let norms = entries.iter().map(|e| e.embedding.norm()).collect();
        Ok(CandidateDatabase { entries, norms, dim })
    }

    pub fn entries(&self) -> &[ExampleConversation] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, id: &str) -> Option<&ExampleConversation> {
        self.entries.iter().find(|e| e.id == id)
    }

    /// Copy of the database without the given ids (e.g. the query itself).
    pub fn without(&self, excluded: &[&str]) -> CandidateDatabase {
        let keep: Vec<usize> = (0..self.len()).filter(|&i| !excluded.contains(&self.entries[i].id.as_str())).collect();
        self.pick(&keep)
    }

    fn pick(&self, indices: &[usize]) -> CandidateDatabase {
        CandidateDatabase {
            entries: indices.iter().map(|&i| self.entries[i].clone()).collect(),
            norms: indices.iter().map(|&i| self.norms[i]).collect(),
            dim: self.dim,
        }
    }

    /// Entry indices sorted by id.
    fn id_order(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.len()).collect();
        order.sort_by(|&a, &b| self.entries[a].id.cmp(&self.entries[b].id));
        order
    }

    fn similarity(&self, index: usize, query: &EmbeddingVector, query_norm: f64) -> f64 {
        let norm = self.norms[index];
        if norm == 0.0 || query_norm == 0.0 {
            return 0.0;
        }
        let dot: f64 = self.entries[index].embedding.0.iter().zip(&query.0).map(|(x, y)| x * y).sum();
        dot / (norm * query_norm)
    }

    /// Selects `k` examples for a query embedding.
    pub fn select(
        &self,
        query: &EmbeddingVector,
        k: usize,
        strategy: SelectionStrategy,
    ) -> Result<Vec<Neighbor<'_>>, RetrievalError> {
        self.select_excluding(query, k, strategy, &[])
    }

    /// Like [`select`](Self::select) with some ids treated as absent, which
    /// keeps a query out of its own prompt without copying the database.
    pub fn select_excluding(
        &self,
        query: &EmbeddingVector,
        k: usize,
        strategy: SelectionStrategy,
        excluded: &[&str],
    ) -> Result<Vec<Neighbor<'_>>, RetrievalError> {
        let candidates: Vec<usize> = (0..self.len())
            .filter(|&i| !excluded.contains(&self.entries[i].id.as_str()))
            .collect();
        if k == 0 {
            return Ok(Vec::new());
        }
        if k > candidates.len() {
            return Err(RetrievalError::InsufficientCandidates { k, available: candidates.len() });
        }
        if query.dim() != self.dim {
            return Err(RetrievalError::DimMismatch { query: query.dim(), db: self.dim });
        }
        let qn = query.norm();
        let neighbor = |i: usize| Neighbor { example: &self.entries[i], similarity: self.similarity(i, query, qn) };
        match strategy {
            SelectionStrategy::Knn => {
                let order = self.id_order();
                let mut id_rank = vec![0usize; self.len()];
                for (rank, &i) in order.iter().enumerate() {
                    id_rank[i] = rank;
                }
                let mut heap: BinaryHeap<Ranked> = BinaryHeap::with_capacity(k + 1);
                for &i in &candidates {
                    let cand = Ranked { similarity: self.similarity(i, query, qn), index: i, id_rank: id_rank[i] };
                    if heap.len() < k {
                        heap.push(cand);
                    } else if cand < *heap.peek().unwrap() {
                        heap.pop();
                        heap.push(cand);
                    }
                }
                Ok(heap
                    .into_sorted_vec()
                    .into_iter()
                    .map(|r| Neighbor { example: &self.entries[r.index], similarity: r.similarity })
                    .collect())
            }
            SelectionStrategy::Random { seed } => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                Ok(sample(&mut rng, candidates.len(), k).into_iter().map(|i| neighbor(candidates[i])).collect())
            }
            SelectionStrategy::Fixed => Ok(self
                .id_order()
                .into_iter()
                .filter(|i| candidates.binary_search(i).is_ok())
                .take(k)
                .map(neighbor)
                .collect()),
        }
    }

    /// The `k` most similar entries by cosine, ties broken by ascending id.
    pub fn knn(&self, query: &EmbeddingVector, k: usize) -> Result<Vec<Neighbor<'_>>, RetrievalError> {
        self.select(query, k, SelectionStrategy::Knn)
    }

    /// Seeded uniform subsample of `ceil(fraction * len)` entries, original
    /// order preserved.
    pub fn subset(&self, fraction: f64, seed: u64) -> CandidateDatabase {
        assert!(fraction > 0.0 && fraction <= 1.0, "fraction must lie in (0, 1]");
        let size = ((fraction * self.len() as f64).ceil() as usize).min(self.len());
        if size == self.len() {
            return self.clone();
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut keep = sample(&mut rng, self.len(), size).into_vec();
        keep.sort_unstable();
        self.pick(&keep)
    }

    /// Reads one example conversation per line. Blank lines are skipped.
    pub fn load(path: &Path) -> Result<Self, RetrievalError> {
        let reader = BufReader::new(File::open(path)?);
        let mut entries = Vec::new();
        let mut ids = HashSet::new();
        let mut dim = None;
        for (i, line) in reader.lines().enumerate() {
            let line_no = i + 1;
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let err = |message: String| RetrievalError::SchemaError { line: line_no, message };
            let entry: ExampleConversation = serde_json::from_str(&line).map_err(|e| err(e.to_string()))?;
            let d = entry.embedding.dim();
            if d == 0 || !entry.embedding.is_finite() {
                return Err(err("embedding must be non-empty and finite".into()));
            }
            match dim {
                None => dim = Some(d),
                Some(expected) if expected != d => {
                    return Err(err(format!("embedding dimension {d}, expected {expected}")))
                }
                Some(_) => {}
            }
            if entry.reasoning.trim().is_empty() {
                return Err(err("reasoning statement is empty".into()));
            }
            let report = entry.vsl.validate();
            if !report.is_clean() {
                return Err(err(format!("invalid layout: {}", report.to_string().trim_end())));
            }
            if !ids.insert(entry.id.clone()) {
                return Err(err(format!("duplicate id {:?}", entry.id)));
            }
            entries.push(entry);
        }
        CandidateDatabase::new(entries)
    }

    pub fn save(&self, path: &Path) -> Result<(), RetrievalError> {
        let mut w = BufWriter::new(File::create(path)?);
        for e in &self.entries {
            serde_json::to_writer(&mut w, e).map_err(std::io::Error::from)?;
            w.write_all(b"\n")?;
        }
        w.flush()?;
        Ok(())
    }
}
