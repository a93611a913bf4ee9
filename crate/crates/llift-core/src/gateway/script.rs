//! Scripted backend: pre-programmed responses for tests and for recording
//! replay transcripts without a live endpoint.
//!
//! Scripts are keyed by (case, label, run); lookups fall back to a
//! case-wildcard key and then to a global catch-all, so a single script can
//! serve every conversation when a test only cares about protocol shape.

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Mutex;

use serde::{Deserialize, Serialize};

use super::{ChatBackend, GatewayError, TurnRequest};

#[derive(Debug, Clone)]
pub enum Script {
    /// One response per turn, in order; running past the end is an error.
    Sequence(Vec<String>),
    /// The same response for every turn.
    Repeat(String),
}

struct ScriptState {
    script: Script,
    cursor: usize,
}

/// On-disk script collection consumed by the `record` flow.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScriptFile {
    pub scripts: Vec<ScriptEntry>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScriptEntry {
    pub case: String,
    pub label: String,
    pub run: u32,
    pub responses: Vec<String>,
}

impl ScriptFile {
    pub fn load(path: &Path) -> Result<ScriptFile, GatewayError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| GatewayError::Config(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| GatewayError::Config(format!("{}: {e}", path.display())))
    }

    /// Distinct case ids, in script order.
    pub fn cases(&self) -> Vec<String> {
        let mut seen = Vec::new();
        for entry in &self.scripts {
            if !seen.contains(&entry.case) {
                seen.push(entry.case.clone());
            }
        }
        seen
    }
}

pub struct ScriptedBackend {
    scripts: Mutex<BTreeMap<String, ScriptState>>,
}

impl ScriptedBackend {
    pub fn new() -> ScriptedBackend {
        ScriptedBackend {
            scripts: Mutex::new(BTreeMap::new()),
        }
    }

    /// Catch-all backend answering every turn with `response`.
    pub fn repeat_all(response: impl Into<String>) -> ScriptedBackend {
        let backend = ScriptedBackend::new();
        backend.insert_key("*", Script::Repeat(response.into()));
        backend
    }

    pub fn from_script_file(file: &ScriptFile) -> ScriptedBackend {
        let backend = ScriptedBackend::new();
        for entry in &file.scripts {
            backend.insert_key(
                &format!("{}/{}/{}", entry.case, entry.label, entry.run),
                Script::Sequence(entry.responses.clone()),
            );
        }
        backend
    }

    /// Script one conversation of one case.
    pub fn script(&self, case: &str, label: &str, run: u32, script: Script) -> &Self {
        self.insert_key(&format!("{case}/{label}/{run}"), script);
        self
    }

    /// Script a conversation for any case (key `*/label/run`).
    pub fn script_any_case(&self, label: &str, run: u32, script: Script) -> &Self {
        self.insert_key(&format!("*/{label}/{run}"), script);
        self
    }

    fn insert_key(&self, key: &str, script: Script) {
        self.scripts
            .lock()
            .expect("script lock")
            .insert(key.to_string(), ScriptState { script, cursor: 0 });
    }
}

impl Default for ScriptedBackend {
    fn default() -> Self {
        ScriptedBackend::new()
    }
}

impl ChatBackend for ScriptedBackend {
    fn complete(&self, req: &TurnRequest<'_>) -> Result<String, GatewayError> {
        let mut scripts = self.scripts.lock().expect("script lock");
        let keys = [
            format!("{}/{}/{}", req.id.case, req.id.label, req.id.run),
            format!("*/{}/{}", req.id.label, req.id.run),
            "*".to_string(),
        ];
        let key = keys
            .iter()
            .find(|k| scripts.contains_key(*k))
            .ok_or_else(|| GatewayError::Setup(format!("no script for conversation {}", req.id)))?;
        let state = scripts.get_mut(key).expect("key just found");
        match &state.script {
            Script::Repeat(response) => Ok(response.clone()),
            Script::Sequence(responses) => {
                let response = responses.get(state.cursor).cloned().ok_or_else(|| {
                    GatewayError::Backend(format!(
                        "script for {} exhausted after {} responses",
                        req.id, state.cursor
                    ))
                })?;
                state.cursor += 1;
                Ok(response)
            }
        }
    }

    fn describe(&self) -> String {
        "scripted".into()
    }
}
