use std::time::Duration;

use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::models::ModelSpec;

use super::archive::Archive;
use super::mutate::mutate;
use super::protocol::{compose_generator_request, parse_generator_response, AgentTopology};

/// Proposes a child spec for a chosen parent.
pub trait SpecGenerator {
    fn propose(&mut self, parent: &ModelSpec, archive: &Archive, rng: &mut ChaCha8Rng)
        -> Result<ModelSpec>;
}

pub struct ScriptedMutation;

impl SpecGenerator for ScriptedMutation {
    fn propose(&mut self, parent: &ModelSpec, _: &Archive, rng: &mut ChaCha8Rng) -> Result<ModelSpec> {
        Ok(mutate(parent, rng))
    }
}

/// Carries a request body to the remote orchestrator and returns its reply.
pub trait Transport {
    fn post(&self, endpoint: &str, body: &str) -> Result<String>;
}

/// Blocking JSON POST over HTTP.
pub struct HttpTransport {
    agent: ureq::Agent,
}

impl HttpTransport {
    pub fn new(timeout: Duration) -> Self {
        let agent = ureq::Agent::config_builder()
            .timeout_global(Some(timeout))
            .build()
            .into();
        HttpTransport { agent }
    }
}

impl Default for HttpTransport {
    fn default() -> Self {
        HttpTransport::new(Duration::from_secs(30))
    }
}

impl Transport for HttpTransport {
    fn post(&self, endpoint: &str, body: &str) -> Result<String> {
        let mut response = self
            .agent
            .post(endpoint)
            .header("Content-Type", "application/json")
            .send(body)
            .map_err(|e| Error::Protocol(format!("POST {endpoint}: {e}")))?;
        response
            .body_mut()
            .read_to_string()
            .map_err(|e| Error::Protocol(format!("reading reply from {endpoint}: {e}")))
    }
}

/// Asks a remote orchestrator for specs. Never touches the rng, so a failed
/// slot can be refilled by scripted mutation without shifting the stream.
pub struct RemoteGenerator<T: Transport> {
    transport: T,
    endpoint: String,
    topology: AgentTopology,
    top_k: usize,
}

impl<T: Transport> RemoteGenerator<T> {
    pub fn new(transport: T, endpoint: impl Into<String>, topology: AgentTopology, top_k: usize) -> Self {
        RemoteGenerator {
            transport,
            endpoint: endpoint.into(),
            topology,
            top_k,
        }
    }
}

impl<T: Transport> SpecGenerator for RemoteGenerator<T> {
    fn propose(&mut self, _: &ModelSpec, archive: &Archive, _: &mut ChaCha8Rng) -> Result<ModelSpec> {
        let request = compose_generator_request(archive, &self.topology, self.top_k)?;
        let reply = self.transport.post(&self.endpoint, &request.to_json())?;
        parse_generator_response(&reply)
    }
}
