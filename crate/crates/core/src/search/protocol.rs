use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::models::ModelSpec;

use super::archive::Archive;

/// One agent of the remote orchestrator.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Agent {
    pub role: String,
    pub template_id: String,
}

/// Agents and their interaction weights; `interaction[i][j]` is the weight
/// agent `i` puts on agent `j`'s latest output. Agent 0 composes requests.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AgentTopology {
    pub agents: Vec<Agent>,
    pub interaction: Vec<Vec<f64>>,
}

impl Default for AgentTopology {
    fn default() -> Self {
        let agents = [
            ("composer", "compose-v1"),
            ("architect", "architect-v1"),
            ("critic", "critic-v1"),
        ]
        .into_iter()
        .map(|(role, template_id)| Agent {
            role: role.to_string(),
            template_id: template_id.to_string(),
        })
        .collect();
        AgentTopology {
            agents,
            interaction: vec![
                vec![0.0, 0.5, 0.5],
                vec![0.5, 0.0, 0.5],
                vec![0.5, 0.5, 0.0],
            ],
        }
    }
}

impl AgentTopology {
    pub fn validate(&self) -> Result<()> {
        let n = self.agents.len();
        if n == 0 {
            return Err(Error::config("search.topology.agents", "at least one agent is required"));
        }
        if self.interaction.len() != n || self.interaction.iter().any(|row| row.len() != n) {
            return Err(Error::config(
                "search.topology.interaction",
                format!("matrix must be {n}x{n}"),
            ));
        }
        for (i, row) in self.interaction.iter().enumerate() {
            if let Some(w) = row.iter().find(|w| !(w.is_finite() && **w >= 0.0)) {
                return Err(Error::config(
                    "search.topology.interaction",
                    format!("row {i} has invalid weight {w}"),
                ));
            }
        }
        Ok(())
    }

    pub fn composer_row(&self) -> &[f64] {
        &self.interaction[0]
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScoredSpec {
    pub spec: ModelSpec,
    pub fitness: f64,
}

/// Body of one POST to the remote generator.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorRequest {
    pub top_k: Vec<ScoredSpec>,
    pub agents: Vec<Agent>,
    pub alpha_row: Vec<f64>,
}

impl GeneratorRequest {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("GeneratorRequest serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Protocol(format!("request: {e}")))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorResponse {
    pub spec: ModelSpec,
}

/// Builds the request from the `k` best distinct specs in the archive.
pub fn compose_generator_request(
    archive: &Archive,
    topology: &AgentTopology,
    k: usize,
) -> Result<GeneratorRequest> {
    topology.validate()?;
    if archive.is_empty() {
        return Err(Error::State("cannot compose a request from an empty archive".into()));
    }
    let top_k = archive
        .ranked_unique()
        .into_iter()
        .take(k)
        .map(|c| ScoredSpec {
            spec: c.spec.clone(),
            fitness: c.fitness_or_zero(),
        })
        .collect();
    Ok(GeneratorRequest {
        top_k,
        agents: topology.agents.clone(),
        alpha_row: topology.composer_row().to_vec(),
    })
}

/// Parses and validates a response body.
pub fn parse_generator_response(document: &str) -> Result<ModelSpec> {
    let response: GeneratorResponse = serde_json::from_str(document)
        .map_err(|e| Error::Protocol(format!("response: {e}")))?;
    response
        .spec
        .validate()
        .map_err(|e| Error::Protocol(format!("response spec: {e}")))?;
    Ok(response.spec)
}

pub fn response_document(spec: &ModelSpec) -> String {
    serde_json::to_string(&GeneratorResponse { spec: spec.clone() })
        .expect("GeneratorResponse serializes")
}
