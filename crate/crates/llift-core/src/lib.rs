//! Triage engine for use-before-initialization (UBI) suspect reports.
//!
//! A static analyzer hands us suspects: a variable, the function that uses it,
//! and the use location. For each suspect we extract the relevant C source,
//! drive a staged two-conversation protocol against a language-model backend
//! (replayable from fixture transcripts or live over HTTP), validate the
//! model's structured answers against an embedded path-analysis core, and
//! decide bug / non-bug by majority vote.
//!
//! Modules map onto the pipeline stages:
//!
//! - [`report`] — parse and validate incoming suspect reports
//! - [`corpus`] — index a C tree and extract exact function definitions
//! - [`constraint`] — path models, post-constraint pruning, and the
//!   brute-force oracle that certifies them
//! - [`gateway`] — conversation handles over replay / HTTP / scripted backends
//! - [`orchestrator`] — the per-case conversation protocol and decision policy
//! - [`store`] — verdict log, transcripts, response cache, batch statistics

pub mod constraint;
pub mod corpus;
pub mod gateway;
pub mod orchestrator;
pub mod report;
pub mod store;
