//! Deterministic replay backend: fixture transcripts keyed by
//! (case, conversation label, run ordinal, turn ordinal).
//!
//! Each stored turn pins the sha256 of the prompt that produced it, so any
//! drift between the current prompt pipeline and the recorded one is a hard
//! error naming the turn rather than a silently divergent conversation.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{sha256_hex, ChatBackend, ConversationId, ConvoLabel, GatewayError, TurnRequest};

/// On-disk transcript document: one file per case.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TranscriptDoc {
    pub case: String,
    pub conversations: Vec<TranscriptEntry>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TranscriptEntry {
    pub label: String,
    pub run: u32,
    pub turns: Vec<TranscriptTurn>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TranscriptTurn {
    pub prompt_sha256: String,
    pub response: String,
}

pub struct ReplayBackend {
    transcripts: BTreeMap<ConversationId, Vec<TranscriptTurn>>,
}

impl ReplayBackend {
    /// Load every `*.json` transcript document under `dir`.
    pub fn load(dir: &Path) -> Result<ReplayBackend, GatewayError> {
        if !dir.is_dir() {
            return Err(GatewayError::Config(format!(
                "transcript directory `{}` does not exist",
                dir.display()
            )));
        }
        let mut transcripts = BTreeMap::new();
        let mut entries: Vec<_> = std::fs::read_dir(dir)
            .map_err(|e| GatewayError::Config(format!("cannot read transcripts: {e}")))?
            .filter_map(|e| e.ok())
            .map(|e| e.path())
            .filter(|p| p.extension().is_some_and(|e| e == "json"))
            .collect();
        entries.sort();
        for path in entries {
            let text = std::fs::read_to_string(&path)
                .map_err(|e| GatewayError::Config(format!("{}: {e}", path.display())))?;
            let doc: TranscriptDoc = serde_json::from_str(&text)
                .map_err(|e| GatewayError::Config(format!("{}: {e}", path.display())))?;
            for entry in doc.conversations {
                let label = ConvoLabel::parse(&entry.label).ok_or_else(|| {
                    GatewayError::Config(format!(
                        "{}: unknown conversation label `{}`",
                        path.display(),
                        entry.label
                    ))
                })?;
                let id = ConversationId::new(doc.case.clone(), label, entry.run);
                transcripts.insert(id, entry.turns);
            }
        }
        Ok(ReplayBackend { transcripts })
    }

    pub fn conversation_count(&self) -> usize {
        self.transcripts.len()
    }
}

impl ChatBackend for ReplayBackend {
    fn complete(&self, req: &TurnRequest<'_>) -> Result<String, GatewayError> {
        let turns = self.transcripts.get(req.id).ok_or_else(|| {
            GatewayError::Setup(format!("no transcript for conversation {}", req.id))
        })?;
        let turn = turns.get(req.turn_index as usize).ok_or_else(|| {
            GatewayError::TranscriptExhausted {
                id: req.id.to_string(),
                turn: req.turn_index,
            }
        })?;
        let actual = sha256_hex(req.prompt);
        if actual != turn.prompt_sha256 {
            return Err(GatewayError::Drift {
                turn: req.turn_index,
                detail: format!(
                    "prompt digest {actual} does not match recorded {} for {}",
                    turn.prompt_sha256, req.id
                ),
            });
        }
        Ok(turn.response.clone())
    }

    fn describe(&self) -> String {
        "replay".into()
    }

    fn deterministic(&self) -> bool {
        true
    }

    fn verify_conversation(&self, id: &ConversationId) -> Result<(), GatewayError> {
        if self.transcripts.contains_key(id) {
            Ok(())
        } else {
            Err(GatewayError::Setup(format!(
                "no transcript for conversation {id}"
            )))
        }
    }
}
