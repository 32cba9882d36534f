use std::collections::HashMap;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::models::ModelSpec;
use crate::training::TrainConfig;

/// One evaluated (or pending) point of the search.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Candidate {
    pub id: u64,
    pub generation: usize,
    pub parent_id: Option<u64>,
    pub spec: ModelSpec,
    pub train_config: TrainConfig,
    /// Test accuracy in `[0, 1]` once evaluated.
    pub fitness: Option<f64>,
    /// Failure reason or reuse marker.
    pub note: Option<String>,
}

impl Candidate {
    /// Dedup key: canonical spec plus evaluation budget.
    pub fn dedup_key(&self) -> String {
        format!(
            "{}|{}",
            self.spec.canonical(),
            serde_json::to_string(&self.train_config).expect("TrainConfig serializes")
        )
    }

    pub fn fitness_or_zero(&self) -> f64 {
        self.fitness.unwrap_or(0.0)
    }
}

/// Orders by fitness descending, then id ascending.
pub fn rank(a: &Candidate, b: &Candidate) -> std::cmp::Ordering {
    b.fitness_or_zero()
        .total_cmp(&a.fitness_or_zero())
        .then(a.id.cmp(&b.id))
}

/// Counters for the remote generator's failures.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct GeneratorHealth {
    pub consecutive_failures: usize,
    pub total_failures: usize,
    /// Set once the search switched to scripted mutation for good.
    pub fell_back: bool,
}

/// Every candidate the search created, keyed by id (ids are dense from 0).
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Archive {
    candidates: Vec<Candidate>,
    /// Best fitness seen so far, recorded at the end of each generation.
    pub best_per_generation: Vec<f64>,
    /// Number of training runs actually performed (dedup hits excluded).
    pub training_runs: usize,
    pub notes: Vec<String>,
    pub generator_health: GeneratorHealth,
    evaluated: HashMap<String, (f64, Option<String>, u64)>,
}

impl Archive {
    pub fn new() -> Self {
        Archive::default()
    }

    pub fn len(&self) -> usize {
        self.candidates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.candidates.is_empty()
    }

    pub fn candidates(&self) -> &[Candidate] {
        &self.candidates
    }

    pub fn get(&self, id: u64) -> Option<&Candidate> {
        self.candidates.get(id as usize)
    }

    pub fn next_id(&self) -> u64 {
        self.candidates.len() as u64
    }

    /// Archived result for an identical spec and budget, if any.
    pub fn lookup(&self, candidate: &Candidate) -> Option<(f64, Option<String>, u64)> {
        self.evaluated.get(&candidate.dedup_key()).cloned()
    }

    /// Inserts an evaluated candidate; its id must be [`Archive::next_id`].
    pub fn insert(&mut self, candidate: Candidate) -> Result<()> {
        if candidate.id != self.next_id() {
            return Err(Error::State(format!(
                "candidate id {} out of sequence (expected {})",
                candidate.id,
                self.next_id()
            )));
        }
        let fitness = candidate
            .fitness
            .ok_or_else(|| Error::State(format!("candidate {} has no fitness", candidate.id)))?;
        if !(0.0..=1.0).contains(&fitness) {
            return Err(Error::State(format!("fitness {fitness} outside [0, 1]")));
        }
        self.evaluated
            .entry(candidate.dedup_key())
            .or_insert((fitness, candidate.note.clone(), candidate.id));
        self.candidates.push(candidate);
        Ok(())
    }

    /// Highest fitness, ties to the lowest id.
    pub fn best(&self) -> Option<&Candidate> {
        self.candidates.iter().min_by(|a, b| rank(a, b))
    }

    /// Evaluated candidates best first, one per distinct spec.
    pub fn ranked_unique(&self) -> Vec<&Candidate> {
        let mut seen = std::collections::HashSet::new();
        let mut out: Vec<&Candidate> = self.candidates.iter().collect();
        out.sort_by(|a, b| rank(a, b));
        out.retain(|c| seen.insert(c.spec.canonical()));
        out
    }

    /// One JSON object per line, in id order.
    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for c in &self.candidates {
            out.push_str(&serde_json::to_string(c).expect("Candidate serializes"));
            out.push('\n');
        }
        out
    }

    /// Appends candidate lines to `path`, creating it if needed.
    pub fn append_jsonl(path: impl AsRef<Path>, candidates: &[Candidate]) -> Result<()> {
        let path = path.as_ref();
        let io = |source| Error::Io {
            path: path.display().to_string(),
            source,
        };
        let mut file = std::fs::OpenOptions::new()
            .create(true)
            .append(true)
            .open(path)
            .map_err(io)?;
        for c in candidates {
            let line = serde_json::to_string(c).expect("Candidate serializes");
            writeln!(file, "{line}").map_err(io)?;
        }
        Ok(())
    }

    /// Rebuilds an archive from JSON lines (counters are not persisted).
    pub fn from_jsonl(text: &str) -> Result<Self> {
        let mut archive = Archive::new();
        for (i, line) in text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty()) {
            let c: Candidate = serde_json::from_str(line).map_err(|e| Error::Parse {
                row: i + 1,
                message: e.to_string(),
            })?;
            archive.insert(c)?;
        }
        Ok(archive)
    }
}
