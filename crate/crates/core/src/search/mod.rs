//! Evolutionary search over model specifications.

mod archive;
mod evolve;
mod generator;
mod mutate;
mod protocol;

pub use archive::{rank, Archive, Candidate, GeneratorHealth};
pub use evolve::{
    evaluate_candidate, evaluate_spec, evolve, evolve_with, GeneratorChoice, GuardedGenerator,
    SearchConfig, MAX_CONSECUTIVE_FAILURES, SEED_KINDS,
};
pub use generator::{HttpTransport, RemoteGenerator, ScriptedMutation, SpecGenerator, Transport};
pub use mutate::{mutate, DEPTH_RANGE, QUBIT_RANGE, THRESHOLD_RANGE, TOGGLE_KINDS, WIDTH_RANGE};
pub use protocol::{
    compose_generator_request, parse_generator_response, response_document, Agent, AgentTopology,
    GeneratorRequest, GeneratorResponse, ScoredSpec,
};
