//! Recording wrapper: capture (prompt digest, response) pairs from any
//! backend and write them out as replay transcript documents. This is how
//! replay fixtures are produced — by running the real prompt pipeline, so
//! the pinned digests always correspond to prompts the pipeline actually
//! sends.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex};

use super::replay::{TranscriptDoc, TranscriptEntry, TranscriptTurn};
use super::{sha256_hex, ChatBackend, ConversationId, GatewayError, TurnRequest};

type Recorded = Arc<Mutex<BTreeMap<ConversationId, Vec<TranscriptTurn>>>>;

pub struct RecordingBackend<B> {
    inner: B,
    recorded: Recorded,
}

/// Survives the backend being moved into a gateway; used to write the
/// captured transcripts afterwards.
#[derive(Clone)]
pub struct RecordingHandle {
    recorded: Recorded,
}

impl<B: ChatBackend> RecordingBackend<B> {
    pub fn new(inner: B) -> RecordingBackend<B> {
        RecordingBackend {
            inner,
            recorded: Arc::new(Mutex::new(BTreeMap::new())),
        }
    }

    pub fn handle(&self) -> RecordingHandle {
        RecordingHandle {
            recorded: Arc::clone(&self.recorded),
        }
    }
}

impl RecordingHandle {
    /// Write one transcript document per recorded case into `dir` and
    /// return the paths, sorted by case id.
    pub fn write_transcripts(&self, dir: &Path) -> std::io::Result<Vec<PathBuf>> {
        std::fs::create_dir_all(dir)?;
        let recorded = self.recorded.lock().expect("record lock");
        let mut by_case: BTreeMap<&str, Vec<(&ConversationId, &Vec<TranscriptTurn>)>> =
            BTreeMap::new();
        for (id, turns) in recorded.iter() {
            by_case.entry(id.case.as_str()).or_default().push((id, turns));
        }
        let mut paths = Vec::new();
        for (case, convs) in by_case {
            let doc = TranscriptDoc {
                case: case.to_string(),
                conversations: convs
                    .into_iter()
                    .map(|(id, turns)| TranscriptEntry {
                        label: id.label.to_string(),
                        run: id.run,
                        turns: turns.clone(),
                    })
                    .collect(),
            };
            let path = dir.join(format!("{}.json", sanitize(case)));
            std::fs::write(&path, serde_json::to_string_pretty(&doc).expect("doc serializes"))?;
            paths.push(path);
        }
        Ok(paths)
    }
}

fn sanitize(case: &str) -> String {
    case.chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' { c } else { '_' })
        .collect()
}

impl<B: ChatBackend> ChatBackend for RecordingBackend<B> {
    fn complete(&self, req: &TurnRequest<'_>) -> Result<String, GatewayError> {
        let response = self.inner.complete(req)?;
        self.recorded
            .lock()
            .expect("record lock")
            .entry(req.id.clone())
            .or_default()
            .push(TranscriptTurn {
                prompt_sha256: sha256_hex(req.prompt),
                response: response.clone(),
            });
        Ok(response)
    }

    fn describe(&self) -> String {
        format!("recording({})", self.inner.describe())
    }

    fn verify_conversation(&self, id: &ConversationId) -> Result<(), GatewayError> {
        self.inner.verify_conversation(id)
    }
}
