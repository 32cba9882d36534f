use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::DatasetSplit;
use crate::error::{Error, Result};
use crate::models::{build_model, ModelKind, ModelSpec};
use crate::training::{train, TrainConfig};

use super::archive::{rank, Archive, Candidate, GeneratorHealth};
use super::generator::{HttpTransport, RemoteGenerator, ScriptedMutation, SpecGenerator};
use super::mutate::mutate;
use super::protocol::AgentTopology;

/// Consecutive generator failures before scripted mutation takes over for good.
pub const MAX_CONSECUTIVE_FAILURES: usize = 3;

/// Kinds seeded into generation 0, in this order.
pub const SEED_KINDS: [ModelKind; 4] = [
    ModelKind::Qmlp,
    ModelKind::Qff,
    ModelKind::Qbp,
    ModelKind::BaselineQnn,
];

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum GeneratorChoice {
    Scripted,
    Remote { endpoint: String },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SearchConfig {
    pub population: usize,
    pub generations: usize,
    pub elite_count: usize,
    pub seed: u64,
    pub generator: GeneratorChoice,
    pub eval_budget: TrainConfig,
    pub topology: AgentTopology,
    /// Archive entries sent to the remote generator per request.
    pub top_k: usize,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            population: 6,
            generations: 3,
            elite_count: 2,
            seed: 1,
            generator: GeneratorChoice::Scripted,
            eval_budget: TrainConfig {
                epochs: 3,
                ..TrainConfig::default()
            },
            topology: AgentTopology::default(),
            top_k: 5,
        }
    }
}

impl SearchConfig {
    /// Same loop with a one-epoch evaluation budget.
    pub fn ci() -> Self {
        let mut config = SearchConfig::default();
        config.eval_budget.epochs = 1;
        config
    }

    pub fn validate(&self) -> Result<()> {
        if self.population < 2 {
            return Err(Error::config("search.population", "must be at least 2"));
        }
        if self.elite_count < 1 || self.elite_count >= self.population {
            return Err(Error::config(
                "search.elite_count",
                format!("must lie in 1..{} (population)", self.population),
            ));
        }
        if self.generations < 1 {
            return Err(Error::config("search.generations", "must be at least 1"));
        }
        if self.top_k < 1 {
            return Err(Error::config("search.top_k", "must be at least 1"));
        }
        if let GeneratorChoice::Remote { endpoint } = &self.generator {
            if endpoint.trim().is_empty() {
                return Err(Error::config("search.endpoint", "remote generator needs an endpoint"));
            }
            self.topology.validate()?;
        }
        self.eval_budget.validate()
    }
}

/// Wraps a generator, counting failures and substituting scripted mutation.
pub struct GuardedGenerator<G> {
    inner: G,
    health: GeneratorHealth,
    notes: Vec<String>,
}

impl<G: SpecGenerator> GuardedGenerator<G> {
    pub fn new(inner: G) -> Self {
        GuardedGenerator {
            inner,
            health: GeneratorHealth::default(),
            notes: Vec::new(),
        }
    }

    pub fn health(&self) -> &GeneratorHealth {
        &self.health
    }

    pub fn notes(&self) -> &[String] {
        &self.notes
    }

    /// Always yields a valid spec; failed proposals fall back to `mutate`.
    pub fn propose(&mut self, parent: &ModelSpec, archive: &Archive, rng: &mut ChaCha8Rng) -> ModelSpec {
        if !self.health.fell_back {
            match self.inner.propose(parent, archive, rng).and_then(|s| s.validate().map(|_| s)) {
                Ok(spec) => {
                    self.health.consecutive_failures = 0;
                    return spec;
                }
                Err(e) => {
                    self.health.consecutive_failures += 1;
                    self.health.total_failures += 1;
                    self.notes.push(format!("generator failure: {e}"));
                    if self.health.consecutive_failures >= MAX_CONSECUTIVE_FAILURES {
                        self.health.fell_back = true;
                        self.notes.push(format!(
                            "{MAX_CONSECUTIVE_FAILURES} consecutive generator failures; \
                             using scripted mutation for the rest of the run"
                        ));
                    }
                }
            }
        }
        mutate(parent, rng)
    }
}

/// Trains `spec` under `budget` and returns test accuracy, or 0 and a note on failure.
pub fn evaluate_spec(spec: &ModelSpec, budget: &TrainConfig, split: &DatasetSplit) -> (f64, Option<String>) {
    let outcome = build_model(spec).and_then(|mut model| train(&mut model, split, budget));
    match outcome {
        Ok(report) if report.test_accuracy.is_finite() => (report.test_accuracy.clamp(0.0, 1.0), None),
        Ok(report) => (0.0, Some(format!("non-finite accuracy {}", report.test_accuracy))),
        Err(e) => (0.0, Some(format!("evaluation failed: {e}"))),
    }
}

/// Fills in `candidate.fitness`, reusing an archived result when one exists.
/// Returns whether a training run happened.
pub fn evaluate_candidate(candidate: &mut Candidate, archive: &Archive, split: &DatasetSplit) -> Result<bool> {
    if candidate.fitness.is_some() {
        return Err(Error::State(format!("candidate {} already evaluated", candidate.id)));
    }
    if let Some((fitness, _, source)) = archive.lookup(candidate) {
        candidate.fitness = Some(fitness);
        candidate.note = Some(reuse_note(source));
        return Ok(false);
    }
    let (fitness, note) = evaluate_spec(&candidate.spec, &candidate.train_config, split);
    candidate.fitness = Some(fitness);
    candidate.note = note;
    Ok(true)
}

fn reuse_note(source: u64) -> String {
    format!("reused evaluation of candidate {source}")
}

/// Runs the search with the generator named in `config`.
pub fn evolve(config: &SearchConfig, split: &DatasetSplit) -> Result<(Candidate, Archive)> {
    match &config.generator {
        GeneratorChoice::Scripted => evolve_with(config, split, ScriptedMutation),
        GeneratorChoice::Remote { endpoint } => {
            let remote = RemoteGenerator::new(
                HttpTransport::default(),
                endpoint.clone(),
                config.topology.clone(),
                config.top_k,
            );
            evolve_with(config, split, remote)
        }
    }
}

/// Runs the search with an explicit generator.
pub fn evolve_with<G: SpecGenerator>(
    config: &SearchConfig,
    split: &DatasetSplit,
    generator: G,
) -> Result<(Candidate, Archive)> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut guard = GuardedGenerator::new(generator);
    let mut archive = Archive::new();

    let defaults: Vec<ModelSpec> = SEED_KINDS
        .iter()
        .map(|&k| ModelSpec::default_for(k).with_seed(config.seed))
        .collect();
    let mut pending: Vec<(Option<u64>, ModelSpec)> = Vec::with_capacity(config.population);
    for i in 0..config.population {
        let spec = if i < defaults.len() {
            defaults[i].clone()
        } else {
            mutate(&defaults[i % defaults.len()], &mut rng)
        };
        pending.push((None, spec));
    }
    let mut population = evaluate_batch(&mut archive, 0, pending, config, split)?;
    archive.best_per_generation.push(best_fitness(&population));

    for generation in 1..config.generations {
        population.sort_by(|a, b| rank(a, b));
        population.truncate(config.elite_count);
        let mut pending = Vec::with_capacity(config.population - config.elite_count);
        for _ in config.elite_count..config.population {
            let parent = &population[rng.gen_range(0..population.len())];
            let spec = guard.propose(&parent.spec, &archive, &mut rng);
            pending.push((Some(parent.id), spec));
        }
        let children = evaluate_batch(&mut archive, generation, pending, config, split)?;
        population.extend(children);
        archive.best_per_generation.push(best_fitness(&population));
    }

    archive.notes.extend(guard.notes().iter().cloned());
    archive.generator_health = guard.health().clone();
    let best = archive
        .best()
        .cloned()
        .ok_or_else(|| Error::State("search produced no candidates".into()))?;
    Ok((best, archive))
}

fn best_fitness(population: &[Candidate]) -> f64 {
    population
        .iter()
        .map(Candidate::fitness_or_zero)
        .fold(0.0, f64::max)
}

/// Assigns ids in creation order, trains the distinct new specs in parallel
/// and inserts everything into the archive in id order.
fn evaluate_batch(
    archive: &mut Archive,
    generation: usize,
    pending: Vec<(Option<u64>, ModelSpec)>,
    config: &SearchConfig,
    split: &DatasetSplit,
) -> Result<Vec<Candidate>> {
    let first_id = archive.next_id();
    let mut batch: Vec<Candidate> = pending
        .into_iter()
        .enumerate()
        .map(|(i, (parent_id, spec))| Candidate {
            id: first_id + i as u64,
            generation,
            parent_id,
            spec,
            train_config: config.eval_budget.clone(),
            fitness: None,
            note: None,
        })
        .collect();

    // index into `batch` of the first candidate carrying each new key
    let mut first_seen: HashMap<String, usize> = HashMap::new();
    let mut to_train = Vec::new();
    for (i, c) in batch.iter().enumerate() {
        if archive.lookup(c).is_none() && !first_seen.contains_key(&c.dedup_key()) {
            first_seen.insert(c.dedup_key(), i);
            to_train.push(i);
        }
    }
    let results: Vec<(f64, Option<String>)> = to_train
        .par_iter()
        .map(|&i| evaluate_spec(&batch[i].spec, &batch[i].train_config, split))
        .collect();
    archive.training_runs += results.len();
    for (&i, (fitness, note)) in to_train.iter().zip(results) {
        batch[i].fitness = Some(fitness);
        batch[i].note = note;
    }

    for i in 0..batch.len() {
        if batch[i].fitness.is_none() {
            let trained = evaluate_candidate(&mut batch[i], archive, split)?;
            debug_assert!(!trained, "in-batch duplicate must hit the archive");
        }
        archive.insert(batch[i].clone())?;
    }
    Ok(batch)
}
