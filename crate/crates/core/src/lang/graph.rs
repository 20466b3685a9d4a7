use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::ExplicitSystem;

const GRAPH_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("malformed graph JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unsupported graph version {0}")]
    Version(u32),
    #[error("invalid graph: {0}")]
    Invalid(String),
}

/// On-disk shape of a `.zkx.json` file.
#[derive(Serialize, Deserialize)]
struct GraphFile {
    version: u32,
    /// Propositions holding in each state, in state order.
    states: Vec<Vec<String>>,
    #[serde(default)]
    init: Vec<usize>,
    #[serde(default)]
    transitions: Vec<(usize, usize)>,
}

pub fn graph_from_json(text: &str) -> Result<ExplicitSystem, GraphError> {
    let file: GraphFile = serde_json::from_str(text)?;
    if file.version != GRAPH_VERSION {
        return Err(GraphError::Version(file.version));
    }
    let sys = ExplicitSystem {
        labels: file.states.into_iter().map(|s| s.into_iter().collect()).collect(),
        init: file.init.into_iter().collect(),
        transitions: file.transitions.into_iter().collect(),
    };
    sys.validate().map_err(|e| GraphError::Invalid(e.to_string()))?;
    Ok(sys)
}

/// The public part of a graph: state labels only.
pub fn space_to_json(sys: &ExplicitSystem) -> String {
    let labels = ExplicitSystem { labels: sys.labels.clone(), init: BTreeSet::new(), transitions: BTreeSet::new() };
    graph_to_json(&labels)
}

pub fn graph_to_json(sys: &ExplicitSystem) -> String {
    let file = GraphFile {
        version: GRAPH_VERSION,
        states: sys.labels.iter().map(|l: &BTreeSet<String>| l.iter().cloned().collect()).collect(),
        init: sys.init.iter().copied().collect(),
        transitions: sys.transitions.iter().copied().collect(),
    };
    serde_json::to_string_pretty(&file).expect("graph serialises")
}
