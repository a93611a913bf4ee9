//! Per-case conversation protocol and decision policy.
//!
//! Each case runs two conversations against the backend. The first embeds
//! the caller source and the post-constraint pattern examples, asks for the
//! initializer and the post-constraint guarding the use, self-validates,
//! and ends with a structured extraction document. The second embeds that
//! document plus the initializer's definition, loops supplying requested
//! function definitions on demand under the turn cap, self-validates, and
//! ends with a structured must_init/may_init summary. A case is decided by
//! majority over repeated runs; every suspicious variable not guaranteed
//! initialized is a potential bug.

mod batch;
mod pack;
mod structured;

pub use batch::{run_batch, BatchOptions, BatchSummary};
pub use pack::PromptPack;
pub use structured::{
    convo_one_to_json, convo_two_to_json, parse_structured_response, parse_verdict_response,
    requests_to_json, StructuredResponse,
};

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::constraint::{
    parse_constraint, qualified_postcondition, Domain, QualifiedPostcondition, RoutineModel,
};
use crate::corpus::{CorpusIndex, FunctionDef};
use crate::gateway::{
    Conversation, ConversationHandle, ConversationId, ConvoLabel, Gateway, GatewayError,
};
use crate::report::BugReport;

#[derive(Debug, Error)]
pub enum OrchestratorError {
    #[error("prompt pack error: {0}")]
    Pack(String),
    #[error("model library error: {0}")]
    Models(String),
}

#[derive(Debug, Error)]
pub enum ProtocolError {
    #[error("no structured document in response (starts: `{snippet}`)")]
    NoStructuredDocument { snippet: String },
    #[error("structured document has the wrong shape: expected {expected}")]
    WrongShape { expected: &'static str },
}

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Gateway(#[from] GatewayError),
    #[error(transparent)]
    Protocol(#[from] ProtocolError),
}

/// Per-case decision.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Decision {
    Bug,
    NonBug,
    NoInitializer,
    Inconclusive,
}

impl Decision {
    pub fn as_str(&self) -> &'static str {
        match self {
            Decision::Bug => "bug",
            Decision::NonBug => "non_bug",
            Decision::NoInitializer => "no_initializer",
            Decision::Inconclusive => "inconclusive",
        }
    }
}

impl std::fmt::Display for Decision {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Every suspicious name must be guaranteed initialized for a non-bug; an
/// unreachable use is vacuously safe. Anything else is a potential bug.
pub fn decide(
    must_init: &BTreeSet<String>,
    unreachable_use: bool,
    suspicious: &BTreeSet<String>,
) -> Decision {
    if unreachable_use || suspicious.iter().all(|s| must_init.contains(s)) {
        Decision::NonBug
    } else {
        Decision::Bug
    }
}

pub fn decide_qualified(q: &QualifiedPostcondition, suspicious: &BTreeSet<String>) -> Decision {
    decide(&q.must_init, q.unreachable_use, suspicious)
}

pub fn decide_summary(summary: &ConvoTwoResult, suspicious: &BTreeSet<String>) -> Decision {
    match summary.status {
        ConvoTwoStatus::Success => {
            let must: BTreeSet<String> = summary.must_init.iter().cloned().collect();
            decide(&must, false, suspicious)
        }
        _ => Decision::Inconclusive,
    }
}

/// Wire shape of the extraction document.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConvoOneWire {
    pub initializers: Vec<String>,
    pub suspicious: Vec<String>,
    pub postconstraint: Option<String>,
}

/// Wire shape of the summarization document.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConvoTwoWire {
    pub must_init: Vec<String>,
    pub may_init: Vec<MayInitEntry>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MayInitEntry {
    pub name: String,
    pub condition: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InfoRequest {
    pub kind: String,
    pub name: String,
}

/// An initializer call site with its extracted callee name.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Initializer {
    pub text: String,
    pub callee: Option<String>,
}

/// The identifier immediately before the first argument list.
pub fn extract_callee(text: &str) -> Option<String> {
    let open = text.find('(')?;
    let head = text[..open].trim_end();
    let name: String = head
        .chars()
        .rev()
        .take_while(|c| c.is_ascii_alphanumeric() || *c == '_')
        .collect();
    let name: String = name.chars().rev().collect();
    if name.is_empty() || name.chars().next().is_some_and(|c| c.is_ascii_digit()) {
        None
    } else {
        Some(name)
    }
}

/// Outcome of the extraction conversation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConvoOneResult {
    pub initializers: Vec<Initializer>,
    pub suspicious: Vec<String>,
    pub postconstraint: Option<String>,
}

impl ConvoOneResult {
    pub fn initializer(&self) -> &Initializer {
        &self.initializers[0]
    }

    pub fn initializer_callee(&self) -> Option<&str> {
        self.initializer().callee.as_deref()
    }

    fn from_wire(wire: ConvoOneWire, report: &BugReport) -> ConvoOneOutcome {
        if wire.initializers.is_empty() {
            return ConvoOneOutcome::NoInitializer;
        }
        let mut suspicious = wire.suspicious;
        if suspicious.is_empty() {
            suspicious.push(report.variable.clone());
        }
        ConvoOneOutcome::Found(ConvoOneResult {
            initializers: wire
                .initializers
                .into_iter()
                .map(|text| Initializer {
                    callee: extract_callee(&text),
                    text,
                })
                .collect(),
            suspicious,
            postconstraint: wire.postconstraint,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ConvoOneOutcome {
    NoInitializer,
    Found(ConvoOneResult),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConvoTwoStatus {
    Success,
    NeedMoreInfo,
    Inconclusive,
}

/// Outcome of the summarization conversation. `status == Success` implies
/// `requests` is empty; `NeedMoreInfo` only occurs mid-loop.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConvoTwoResult {
    pub status: ConvoTwoStatus,
    pub must_init: Vec<String>,
    pub may_init: Vec<MayInitEntry>,
    pub requests: Vec<InfoRequest>,
    pub reason: Option<String>,
}

impl ConvoTwoResult {
    fn success(wire: ConvoTwoWire) -> ConvoTwoResult {
        // must_init wins when a response lists a name on both sides.
        let may_init = wire
            .may_init
            .into_iter()
            .filter(|m| !wire.must_init.contains(&m.name))
            .collect();
        ConvoTwoResult {
            status: ConvoTwoStatus::Success,
            must_init: wire.must_init,
            may_init,
            requests: Vec::new(),
            reason: None,
        }
    }

    fn inconclusive(reason: impl Into<String>) -> ConvoTwoResult {
        ConvoTwoResult {
            status: ConvoTwoStatus::Inconclusive,
            must_init: Vec::new(),
            may_init: Vec::new(),
            requests: Vec::new(),
            reason: Some(reason.into()),
        }
    }
}

/// Routine models keyed by function name, the desk-scale referee for
/// model-reported summaries.
#[derive(Debug, Default)]
pub struct ModelLibrary {
    models: BTreeMap<String, RoutineModel>,
}

impl ModelLibrary {
    pub fn load_dir(dir: &Path) -> Result<ModelLibrary, OrchestratorError> {
        let mut library = ModelLibrary::default();
        let mut paths: Vec<_> = std::fs::read_dir(dir)
            .map_err(|e| OrchestratorError::Models(format!("{}: {e}", dir.display())))?
            .filter_map(|e| e.ok())
            .map(|e| e.path())
            .filter(|p| p.extension().is_some_and(|e| e == "json"))
            .collect();
        paths.sort();
        for path in paths {
            let text = std::fs::read_to_string(&path)
                .map_err(|e| OrchestratorError::Models(format!("{}: {e}", path.display())))?;
            let model = RoutineModel::from_json(&text)
                .map_err(|e| OrchestratorError::Models(format!("{}: {e}", path.display())))?;
            library.insert(model);
        }
        Ok(library)
    }

    pub fn insert(&mut self, model: RoutineModel) {
        self.models.insert(model.name.clone(), model);
    }

    pub fn get(&self, name: &str) -> Option<&RoutineModel> {
        self.models.get(name)
    }

    pub fn len(&self) -> usize {
        self.models.len()
    }

    pub fn is_empty(&self) -> bool {
        self.models.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Ablation {
    ZeroStep,
    OneStep,
    #[default]
    Full,
}

/// Everything one case needs.
pub struct CaseContext<'a> {
    pub report: &'a BugReport,
    pub corpus: &'a CorpusIndex,
    pub gateway: &'a Gateway,
    pub pack: &'a PromptPack,
    pub votes: u32,
    pub domain: Domain,
    pub models: Option<&'a ModelLibrary>,
    pub ablation: Ablation,
}

/// Per-case verdict with vote provenance and token accounting.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CaseVerdict {
    pub case_id: String,
    pub decision: Decision,
    pub votes: Vec<Decision>,
    pub suspicious: Vec<String>,
    pub must_init: Vec<String>,
    pub may_init: Vec<MayInitEntry>,
    pub unreachable_use: bool,
    pub merged_initializers: bool,
    pub validation_warnings: Vec<String>,
    pub inconclusive_reason: Option<String>,
    pub transcripts: Vec<String>,
    pub turns_total: u32,
    pub tokens_total: u64,
}

pub struct CaseOutcome {
    pub verdict: CaseVerdict,
    pub conversations: Vec<Conversation>,
}

// ---- conversation drivers ----

// Pack errors are configuration bugs, not model misbehavior.
fn render(ctx: &CaseContext, key: &str, slots: &[(&str, &str)]) -> Result<String, RunError> {
    ctx.pack
        .render(key, slots)
        .map_err(|e| RunError::Gateway(GatewayError::Config(e.to_string())))
}

/// Send the structured-output prompt; an unparseable or wrong-shaped reply
/// gets exactly one repair re-prompt before giving up.
fn structured_turn<T>(
    ctx: &CaseContext,
    conv: &mut ConversationHandle<'_>,
    prompt: &str,
    expected: &'static str,
    extract: impl Fn(StructuredResponse) -> Option<T>,
) -> Result<T, RunError> {
    let response = conv.send_turn(prompt)?;
    if let Some(value) = parse_structured_response(&response).ok().and_then(&extract) {
        return Ok(value);
    }
    let repair = render(ctx, "repair", &[])?;
    let response = conv.send_turn(&repair)?;
    parse_structured_response(&response)
        .ok()
        .and_then(&extract)
        .ok_or_else(|| ProtocolError::WrongShape { expected }.into())
}

/// Conversation 1: analysis prompt with the caller source and pattern
/// examples, a self-validation turn, then the structured extraction.
pub fn run_convo_one(
    ctx: &CaseContext,
    caller: &FunctionDef,
    run: u32,
    sink: &mut Vec<Conversation>,
) -> Result<ConvoOneOutcome, RunError> {
    let id = ConversationId::new(ctx.report.id.clone(), ConvoLabel::Convo1, run);
    let system = render(ctx, "convo1_system", &[])?;
    let mut conv = ctx.gateway.open_conversation(&system, id)?;
    let result = drive_convo_one(ctx, caller, &mut conv);
    sink.push(conv.into_conversation());
    result
}

fn drive_convo_one(
    ctx: &CaseContext,
    caller: &FunctionDef,
    conv: &mut ConversationHandle<'_>,
) -> Result<ConvoOneOutcome, RunError> {
    let few_shot = render(ctx, "few_shot_block", &[])?;
    let line = ctx.report.line.to_string();
    let analysis = render(
        ctx,
        "convo1_analysis",
        &[
            ("variable", ctx.report.variable.as_str()),
            ("line", line.as_str()),
            ("caller_source", caller.text.as_str()),
            ("few_shot_block", few_shot.as_str()),
        ],
    )?;
    conv.send_turn(&analysis)?;
    let validate = render(ctx, "convo1_validate", &[])?;
    conv.send_turn(&validate)?;
    let structured = render(ctx, "convo1_structured", &[])?;
    let wire = structured_turn(ctx, conv, &structured, "extraction document", |parsed| {
        match parsed {
            StructuredResponse::ConvoOne(wire) => Some(wire),
            _ => None,
        }
    })?;
    Ok(ConvoOneResult::from_wire(wire, ctx.report))
}

fn def_block(def: &FunctionDef) -> String {
    format!(
        "Definition of `{}` (from {}):\n```c\n{}\n```",
        def.name, def.file, def.text
    )
}

fn unresolved_block(name: &str) -> String {
    format!(
        "No definition of `{name}` is available. Please proceed with the analysis based on the available data and your knowledge."
    )
}

fn unsupported_block(kind: &str) -> String {
    format!(
        "Requests of type `{kind}` are not supported; only function_def is. Please proceed with the analysis based on the available data and your knowledge."
    )
}

/// Honor one request list: function definitions looked up with the report
/// file as disambiguation hint; everything unresolvable gets the
/// proceed-anyway instruction.
fn supply_blocks(ctx: &CaseContext, requests: &[InfoRequest]) -> String {
    let mut blocks = Vec::new();
    for request in requests {
        if request.kind != "function_def" {
            blocks.push(unsupported_block(&request.kind));
            continue;
        }
        match ctx
            .corpus
            .extract_function(&request.name, Some(ctx.report.file.as_str()))
        {
            Ok(def) => blocks.push(def_block(def)),
            Err(_) => blocks.push(unresolved_block(&request.name)),
        }
    }
    blocks.join("\n\n")
}

/// Conversation 2 for one initializer: seed with the extraction document
/// and the initializer definition, loop honoring function-definition
/// requests under the turn cap, then self-validate and summarize.
pub fn run_convo_two(
    ctx: &CaseContext,
    c1: &ConvoOneResult,
    initializer_index: u32,
    run: u32,
    sink: &mut Vec<Conversation>,
) -> Result<ConvoTwoResult, RunError> {
    let id = ConversationId::new(
        ctx.report.id.clone(),
        ConvoLabel::Convo2 {
            initializer: initializer_index,
        },
        run,
    );
    let system = render(ctx, "convo2_system", &[])?;
    let mut conv = ctx.gateway.open_conversation(&system, id)?;
    let result = drive_convo_two(ctx, c1, initializer_index, &mut conv);
    sink.push(conv.into_conversation());
    result
}

/// A send that degrades turn-cap and context-overflow failures into an
/// inconclusive summary instead of an error.
enum SendOutcome {
    Response(String),
    Degraded(ConvoTwoResult),
}

fn send_degradable(
    conv: &mut ConversationHandle<'_>,
    prompt: &str,
) -> Result<SendOutcome, RunError> {
    match conv.send_turn(prompt) {
        Ok(response) => Ok(SendOutcome::Response(response)),
        Err(e @ (GatewayError::TurnCap { .. } | GatewayError::Overflow(_))) => {
            Ok(SendOutcome::Degraded(ConvoTwoResult::inconclusive(
                e.to_string(),
            )))
        }
        Err(other) => Err(other.into()),
    }
}

fn drive_convo_two(
    ctx: &CaseContext,
    c1: &ConvoOneResult,
    initializer_index: u32,
    conv: &mut ConversationHandle<'_>,
) -> Result<ConvoTwoResult, RunError> {
    let initializer = &c1.initializers[initializer_index as usize];
    let wire = ConvoOneWire {
        initializers: vec![initializer.text.clone()],
        suspicious: c1.suspicious.clone(),
        postconstraint: c1.postconstraint.clone(),
    };
    let request_doc = serde_json::to_string_pretty(&convo_one_to_json(&wire))
        .expect("request document serializes");
    let supplied = initializer
        .callee
        .as_deref()
        .and_then(|name| {
            ctx.corpus
                .extract_function(name, Some(ctx.report.file.as_str()))
                .ok()
        })
        .map(def_block)
        .unwrap_or_default();
    let seed = render(
        ctx,
        "convo2_seed",
        &[
            ("request_doc", request_doc.as_str()),
            ("supplied_defs", supplied.as_str()),
        ],
    )?;
    let mut response = match send_degradable(conv, &seed)? {
        SendOutcome::Response(r) => r,
        SendOutcome::Degraded(result) => return Ok(result),
    };
    loop {
        // Progressive stage: keep honoring request lists.
        while let Ok(StructuredResponse::Requests(requests)) = parse_structured_response(&response)
        {
            let blocks = supply_blocks(ctx, &requests);
            let supply = render(ctx, "convo2_supply", &[("supplied_defs", blocks.as_str())])?;
            response = match send_degradable(conv, &supply)? {
                SendOutcome::Response(r) => r,
                SendOutcome::Degraded(result) => return Ok(result),
            };
        }
        // Tail: self-validation, then the structured summary.
        let validate = render(ctx, "convo2_validate", &[])?;
        response = match send_degradable(conv, &validate)? {
            SendOutcome::Response(r) => r,
            SendOutcome::Degraded(result) => return Ok(result),
        };
        if matches!(
            parse_structured_response(&response),
            Ok(StructuredResponse::Requests(_))
        ) {
            continue; // revert to the progressive stage
        }
        let structured = render(ctx, "convo2_structured", &[])?;
        let final_response = match send_degradable(conv, &structured)? {
            SendOutcome::Response(r) => r,
            SendOutcome::Degraded(result) => return Ok(result),
        };
        match parse_structured_response(&final_response) {
            Ok(StructuredResponse::ConvoTwo(wire)) => return Ok(ConvoTwoResult::success(wire)),
            Ok(StructuredResponse::Requests(_)) => {
                response = final_response;
                continue; // revert to the progressive stage
            }
            _ => {
                let repair = render(ctx, "repair", &[])?;
                let repaired = match send_degradable(conv, &repair)? {
                    SendOutcome::Response(r) => r,
                    SendOutcome::Degraded(result) => return Ok(result),
                };
                match parse_structured_response(&repaired) {
                    Ok(StructuredResponse::ConvoTwo(wire)) => {
                        return Ok(ConvoTwoResult::success(wire))
                    }
                    Ok(StructuredResponse::Requests(_)) => {
                        response = repaired;
                        continue;
                    }
                    _ => {
                        return Err(ProtocolError::WrongShape {
                            expected: "summarization document",
                        }
                        .into())
                    }
                }
            }
        }
    }
}

// ---- per-run execution and voting ----

#[derive(Debug, Clone)]
struct RunResult {
    decision: Decision,
    suspicious: Vec<String>,
    must_init: Vec<String>,
    may_init: Vec<MayInitEntry>,
    merged: bool,
    warnings: Vec<String>,
    reason: Option<String>,
}

impl RunResult {
    fn bare(decision: Decision, suspicious: Vec<String>, reason: Option<String>) -> RunResult {
        RunResult {
            decision,
            suspicious,
            must_init: Vec::new(),
            may_init: Vec::new(),
            merged: false,
            warnings: Vec::new(),
            reason,
        }
    }
}

/// Check a model-reported summary against the constraint core when the
/// post-constraint parses and a routine model exists for the callee.
fn consistency_warning(
    ctx: &CaseContext,
    c1: &ConvoOneResult,
    callee: Option<&str>,
    summary: &ConvoTwoResult,
) -> Option<String> {
    let models = ctx.models?;
    let model = models.get(callee?)?;
    let cpost = parse_constraint(c1.postconstraint.as_deref()).ok()?;
    let suspicious: BTreeSet<String> = c1.suspicious.iter().cloned().collect();
    match qualified_postcondition(model, &cpost, &suspicious, ctx.domain) {
        Ok(q) => {
            let reported: BTreeSet<String> = summary
                .must_init
                .iter()
                .filter(|n| suspicious.contains(*n))
                .cloned()
                .collect();
            if reported != q.must_init {
                Some(format!(
                    "model `{}` disagrees with reported must_init: core says {{{}}}, response says {{{}}}",
                    model.name,
                    q.must_init.iter().cloned().collect::<Vec<_>>().join(", "),
                    reported.iter().cloned().collect::<Vec<_>>().join(", "),
                ))
            } else {
                None
            }
        }
        Err(e) => Some(format!("consistency check failed: {e}")),
    }
}

fn run_single(
    ctx: &CaseContext,
    caller: &FunctionDef,
    run: u32,
    sink: &mut Vec<Conversation>,
) -> RunResult {
    let fallback_suspicious = vec![ctx.report.variable.clone()];
    let c1 = match run_convo_one(ctx, caller, run, sink) {
        Ok(ConvoOneOutcome::NoInitializer) => {
            return RunResult::bare(Decision::NoInitializer, fallback_suspicious, None)
        }
        Ok(ConvoOneOutcome::Found(c1)) => c1,
        Err(e) => {
            return RunResult::bare(
                Decision::Inconclusive,
                fallback_suspicious,
                Some(e.to_string()),
            )
        }
    };
    let suspicious: BTreeSet<String> = c1.suspicious.iter().cloned().collect();
    let merged = c1.initializers.len() > 1;
    let mut must_union: BTreeSet<String> = BTreeSet::new();
    let mut may_union: Vec<MayInitEntry> = Vec::new();
    let mut warnings = Vec::new();

    for index in 0..c1.initializers.len() as u32 {
        let summary = match run_convo_two(ctx, &c1, index, run, sink) {
            Ok(summary) => summary,
            Err(e) => {
                return RunResult::bare(
                    Decision::Inconclusive,
                    c1.suspicious.clone(),
                    Some(e.to_string()),
                )
            }
        };
        if summary.status != ConvoTwoStatus::Success {
            return RunResult::bare(
                Decision::Inconclusive,
                c1.suspicious.clone(),
                summary.reason.clone(),
            );
        }
        let callee = c1.initializers[index as usize].callee.as_deref();
        if let Some(warning) = consistency_warning(ctx, &c1, callee, &summary) {
            warnings.push(warning);
        }
        // A later guaranteed initialization suffices: union across
        // sequentially executed initializers.
        must_union.extend(summary.must_init.iter().cloned());
        for entry in summary.may_init {
            if !may_union.iter().any(|m| m.name == entry.name) {
                may_union.push(entry);
            }
        }
    }
    may_union.retain(|m| !must_union.contains(&m.name));
    let decision = decide(&must_union, false, &suspicious);
    RunResult {
        decision,
        suspicious: c1.suspicious.clone(),
        must_init: must_union.into_iter().collect(),
        may_init: may_union,
        merged,
        warnings,
        reason: None,
    }
}

fn zero_step_run(
    ctx: &CaseContext,
    caller: &FunctionDef,
    run: u32,
    sink: &mut Vec<Conversation>,
) -> RunResult {
    let suspicious = vec![ctx.report.variable.clone()];
    let id = ConversationId::new(ctx.report.id.clone(), ConvoLabel::Convo1, run);
    let attempt = (|| -> Result<Decision, RunError> {
        let system = render(ctx, "convo1_system", &[])?;
        let mut conv = ctx.gateway.open_conversation(&system, id)?;
        let prompt = render(
            ctx,
            "zero_step",
            &[
                ("variable", ctx.report.variable.as_str()),
                ("caller_source", caller.text.as_str()),
            ],
        )?;
        let mut response = conv.send_turn(&prompt)?;
        if parse_verdict_response(&response).is_none() {
            let repair = render(ctx, "repair", &[])?;
            response = conv.send_turn(&repair)?;
        }
        let verdict = parse_verdict_response(&response);
        sink.push(conv.into_conversation());
        match verdict {
            Some(true) => Ok(Decision::Bug),
            Some(false) => Ok(Decision::NonBug),
            None => Err(ProtocolError::WrongShape { expected: "verdict document" }.into()),
        }
    })();
    match attempt {
        Ok(decision) => RunResult::bare(decision, suspicious, None),
        Err(e) => RunResult::bare(Decision::Inconclusive, suspicious, Some(e.to_string())),
    }
}

fn one_step_run(
    ctx: &CaseContext,
    caller: &FunctionDef,
    run: u32,
    sink: &mut Vec<Conversation>,
) -> RunResult {
    let suspicious_vec = vec![ctx.report.variable.clone()];
    let suspicious: BTreeSet<String> = suspicious_vec.iter().cloned().collect();
    let id = ConversationId::new(ctx.report.id.clone(), ConvoLabel::Convo1, run);
    let attempt = (|| -> Result<(ConvoTwoResult, Conversation), RunError> {
        let system = render(ctx, "convo1_system", &[])?;
        let mut conv = ctx.gateway.open_conversation(&system, id)?;
        let few_shot = render(ctx, "few_shot_block", &[])?;
        let prompt = render(
            ctx,
            "one_step",
            &[
                ("variable", ctx.report.variable.as_str()),
                ("caller_source", caller.text.as_str()),
                ("few_shot_block", few_shot.as_str()),
            ],
        )?;
        let mut response = match send_degradable(&mut conv, &prompt)? {
            SendOutcome::Response(r) => r,
            SendOutcome::Degraded(result) => return Ok((result, conv.into_conversation())),
        };
        let mut repaired = false;
        let result = loop {
            match parse_structured_response(&response) {
                Ok(StructuredResponse::Requests(requests)) => {
                    let blocks = supply_blocks(ctx, &requests);
                    let supply =
                        render(ctx, "convo2_supply", &[("supplied_defs", blocks.as_str())])?;
                    response = match send_degradable(&mut conv, &supply)? {
                        SendOutcome::Response(r) => r,
                        SendOutcome::Degraded(result) => break result,
                    };
                }
                Ok(StructuredResponse::ConvoTwo(wire)) => break ConvoTwoResult::success(wire),
                _ if !repaired => {
                    repaired = true;
                    let repair = render(ctx, "repair", &[])?;
                    response = match send_degradable(&mut conv, &repair)? {
                        SendOutcome::Response(r) => r,
                        SendOutcome::Degraded(result) => break result,
                    };
                }
                _ => {
                    sink.push(conv.into_conversation());
                    return Err(ProtocolError::WrongShape {
                        expected: "summarization document",
                    }
                    .into());
                }
            }
        };
        Ok((result, conv.into_conversation()))
    })();
    match attempt {
        Ok((summary, conversation)) => {
            sink.push(conversation);
            match summary.status {
                ConvoTwoStatus::Success => {
                    let decision = decide_summary(&summary, &suspicious);
                    RunResult {
                        decision,
                        suspicious: suspicious_vec,
                        must_init: summary.must_init,
                        may_init: summary.may_init,
                        merged: false,
                        warnings: Vec::new(),
                        reason: None,
                    }
                }
                _ => RunResult::bare(Decision::Inconclusive, suspicious_vec, summary.reason),
            }
        }
        Err(e) => RunResult::bare(Decision::Inconclusive, suspicious_vec, Some(e.to_string())),
    }
}

fn locate_caller<'c>(ctx: &CaseContext<'c>) -> Result<&'c FunctionDef, String> {
    let report = ctx.report;
    match ctx.corpus.enclosing_function(&report.file, report.line) {
        Ok(def) => Ok(def),
        Err(enclosing_err) => ctx
            .corpus
            .extract_function(&report.caller, Some(report.file.as_str()))
            .map_err(|extract_err| {
                format!("cannot locate caller: {enclosing_err}; by name: {extract_err}")
            }),
    }
}

/// Run a case end to end: up to `votes` independent runs with early stop
/// once a decision reaches the majority threshold, merged initializers, and
/// the decision policy applied to the merged must_init set. A deterministic
/// backend makes extra votes redundant, so it runs once.
pub fn run_case(ctx: &CaseContext) -> CaseOutcome {
    let mut conversations = Vec::new();
    let mut case_warnings = Vec::new();
    let report = ctx.report;

    let caller = match locate_caller(ctx) {
        Ok(def) => def,
        Err(reason) => {
            return finish_case(
                ctx,
                1,
                vec![RunResult::bare(
                    Decision::Inconclusive,
                    vec![report.variable.clone()],
                    Some(reason),
                )],
                vec![Decision::Inconclusive],
                Vec::new(),
                Vec::new(),
            )
        }
    };
    if caller.name != report.caller {
        case_warnings.push(format!(
            "report names caller `{}` but line {} falls in `{}`",
            report.caller, report.line, caller.name
        ));
    }
    if report.line < caller.start_line || caller.end_line < report.line {
        case_warnings.push(format!(
            "use line {} lies outside the located caller `{}` ({}..{})",
            report.line, caller.name, caller.start_line, caller.end_line
        ));
    }

    let effective_votes = if ctx.gateway.deterministic() {
        1
    } else {
        ctx.votes.max(1)
    };
    let threshold = effective_votes / 2 + 1;

    let mut results: Vec<RunResult> = Vec::new();
    let mut votes: Vec<Decision> = Vec::new();
    for run in 0..effective_votes {
        let result = match ctx.ablation {
            Ablation::Full => run_single(ctx, caller, run, &mut conversations),
            Ablation::ZeroStep => zero_step_run(ctx, caller, run, &mut conversations),
            Ablation::OneStep => one_step_run(ctx, caller, run, &mut conversations),
        };
        votes.push(result.decision);
        results.push(result);
        if count_votes(&votes, *votes.last().expect("just pushed")) >= threshold as usize {
            break;
        }
    }
    finish_case(ctx, threshold as usize, results, votes, case_warnings, conversations)
}

fn count_votes(votes: &[Decision], decision: Decision) -> usize {
    votes.iter().filter(|v| **v == decision).count()
}

fn finish_case(
    ctx: &CaseContext,
    threshold: usize,
    results: Vec<RunResult>,
    votes: Vec<Decision>,
    mut case_warnings: Vec<String>,
    conversations: Vec<Conversation>,
) -> CaseOutcome {
    let decision = [
        Decision::Bug,
        Decision::NonBug,
        Decision::NoInitializer,
        Decision::Inconclusive,
    ]
    .into_iter()
    .find(|d| count_votes(&votes, *d) >= threshold)
    .unwrap_or(Decision::Inconclusive);

    let representative = results
        .iter()
        .find(|r| r.decision == decision)
        .or(results.first())
        .expect("at least one run");
    for result in &results {
        case_warnings.extend(result.warnings.iter().cloned());
    }
    case_warnings.dedup();
    let inconclusive_reason = if decision == Decision::Inconclusive {
        results
            .iter()
            .find_map(|r| r.reason.clone())
            .or_else(|| Some(format!("no majority among run decisions {votes:?}")))
    } else {
        None
    };

    let verdict = CaseVerdict {
        case_id: ctx.report.id.clone(),
        decision,
        votes,
        suspicious: representative.suspicious.clone(),
        must_init: representative.must_init.clone(),
        may_init: representative.may_init.clone(),
        unreachable_use: false,
        merged_initializers: representative.merged,
        validation_warnings: case_warnings,
        inconclusive_reason,
        transcripts: conversations.iter().map(|c| c.id.to_string()).collect(),
        turns_total: conversations.iter().map(Conversation::turn_count).sum(),
        tokens_total: conversations.iter().map(Conversation::total_tokens).sum(),
    };
    CaseOutcome {
        verdict,
        conversations,
    }
}
