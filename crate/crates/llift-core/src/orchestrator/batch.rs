//! Batch execution: a worker pool over independent cases, with the verdict
//! store as the only shared sink.

use std::collections::{BTreeMap, VecDeque};
use std::sync::Mutex;
use std::time::{SystemTime, UNIX_EPOCH};

use crate::constraint::Domain;
use crate::corpus::CorpusIndex;
use crate::gateway::Gateway;
use crate::report::BugReport;
use crate::store::{StoreError, VerdictRecord, VerdictStore};

use super::{run_case, Ablation, CaseContext, CaseVerdict, Decision, ModelLibrary, PromptPack};

#[derive(Debug, Clone)]
pub struct BatchOptions {
    pub batch_id: String,
    pub votes: u32,
    pub domain: Domain,
    pub workers: usize,
    pub ablation: Ablation,
}

impl Default for BatchOptions {
    fn default() -> Self {
        BatchOptions {
            batch_id: "default".into(),
            votes: 3,
            domain: Domain::default(),
            workers: 1,
            ablation: Ablation::Full,
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct BatchSummary {
    pub total: usize,
    pub counts: BTreeMap<Decision, usize>,
    pub store_failures: Vec<String>,
    pub verdicts: Vec<CaseVerdict>,
}

impl BatchSummary {
    pub fn inconclusive(&self) -> usize {
        self.counts.get(&Decision::Inconclusive).copied().unwrap_or(0)
    }
}

/// Run every report through the case pipeline, appending verdicts and
/// transcripts to the store as cases complete. Workers pull cases from a
/// shared queue; per-case state stays confined to one worker. A store
/// write failure is fatal for that case only.
#[allow(clippy::too_many_arguments)]
pub fn run_batch(
    reports: &[BugReport],
    corpus: &CorpusIndex,
    gateway: &Gateway,
    pack: &PromptPack,
    models: Option<&ModelLibrary>,
    store: &VerdictStore,
    options: &BatchOptions,
    progress: &(dyn Fn(&CaseVerdict) + Sync),
) -> BatchSummary {
    let queue: Mutex<VecDeque<usize>> = Mutex::new((0..reports.len()).collect());
    let results: Mutex<Vec<Option<CaseVerdict>>> = Mutex::new(vec![None; reports.len()]);
    let failures: Mutex<Vec<String>> = Mutex::new(Vec::new());
    let workers = options.workers.max(1);

    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let index = match queue.lock().expect("queue lock").pop_front() {
                    Some(index) => index,
                    None => break,
                };
                let report = &reports[index];
                let ctx = CaseContext {
                    report,
                    corpus,
                    gateway,
                    pack,
                    votes: options.votes,
                    domain: options.domain,
                    models,
                    ablation: options.ablation,
                };
                let outcome = run_case(&ctx);
                if let Err(e) = persist(store, gateway, pack, &outcome) {
                    failures
                        .lock()
                        .expect("failure lock")
                        .push(format!("{}: {e}", report.id));
                }
                progress(&outcome.verdict);
                results.lock().expect("results lock")[index] = Some(outcome.verdict);
            });
        }
    });

    let verdicts: Vec<CaseVerdict> = results
        .into_inner()
        .expect("results lock")
        .into_iter()
        .map(|v| v.expect("every case ran"))
        .collect();
    let mut counts = BTreeMap::new();
    for verdict in &verdicts {
        *counts.entry(verdict.decision).or_insert(0) += 1;
    }
    BatchSummary {
        total: verdicts.len(),
        counts,
        store_failures: failures.into_inner().expect("failure lock"),
        verdicts,
    }
}

fn persist(
    store: &VerdictStore,
    gateway: &Gateway,
    pack: &PromptPack,
    outcome: &super::CaseOutcome,
) -> Result<(), StoreError> {
    let mut transcript_paths = Vec::new();
    for conversation in &outcome.conversations {
        transcript_paths.push(store.write_transcript(conversation)?);
    }
    // Deterministic batches carry no wall-clock stamp so reruns compare
    // byte for byte.
    let timestamp = if gateway.deterministic() {
        None
    } else {
        Some(
            SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_millis() as u64)
                .unwrap_or(0),
        )
    };
    let record = VerdictRecord::from_verdict(
        &outcome.verdict,
        store.batch(),
        &gateway.describe(),
        gateway.model(),
        pack.name(),
        pack.version(),
        transcript_paths,
        timestamp,
    );
    store.append_verdict(&record)?;
    Ok(())
}
