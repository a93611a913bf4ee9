//! Acceptance suite: one test per release criterion, each printing a
//! PASS line on success. Run with `cargo test -p llift-core --test acceptance`
//! (add `-- --nocapture` to see the PASS lines).

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::SeedableRng;

use llift_core::constraint::{
    brute_force_oracle, parse_constraint, prune_paths, qualified_postcondition, random,
    ConstraintExpr, Domain, RoutineModel,
};
use llift_core::corpus::{build_index, slice_lines};
use llift_core::gateway::{BackendConfig, Gateway, Script, ScriptedBackend};
use llift_core::orchestrator::{
    convo_one_to_json, convo_two_to_json, parse_structured_response, requests_to_json, run_batch,
    run_case, run_convo_one, run_convo_two, Ablation, BatchOptions, CaseContext, ConvoOneOutcome,
    ConvoOneResult, ConvoTwoStatus, Decision, Initializer, PromptPack, RunError,
    StructuredResponse,
};
use llift_core::report::{parse_report_file, BugReport};
use llift_core::store::{batch_stats, VerdictStore};

fn fixtures_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

fn names(items: &[&str]) -> BTreeSet<String> {
    items.iter().map(|s| s.to_string()).collect()
}

fn pass(criterion: u32, what: &str) {
    println!("criterion {criterion} PASS: {what}");
}

// ---- criterion 1: pruning route equals the brute-force oracle ----

#[test]
fn criterion_1_oracle_equivalence_on_random_models() {
    let started = Instant::now();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x1eaf);
    let domain = Domain::default();
    let suspicious = random::suspicious_pool();
    for i in 0..1000 {
        let model = random::random_model(&mut rng);
        let cpost = random::random_cpost(&mut rng);
        let fast = qualified_postcondition(&model, &cpost, &suspicious, domain).unwrap();
        let slow = brute_force_oracle(&model, &cpost, &suspicious, domain).unwrap();
        assert_eq!(
            fast.must_init, slow.must_init,
            "instance {i}: `{cpost}` over {model:?}"
        );
    }
    let elapsed = started.elapsed();
    assert!(elapsed.as_secs_f64() < 10.0, "took {elapsed:?}, budget 10 s");
    pass(1, &format!("1000/1000 random models agree on must_init in {elapsed:?}"));
}

// ---- criterion 2: the worked examples, exact ----

fn load_model(name: &str) -> RoutineModel {
    let path = fixtures_dir().join("models").join(name);
    RoutineModel::from_json(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn criterion_2_worked_examples_exact() {
    let domain = Domain::default();

    let sscanf = load_model("sscanf.json");
    let suspicious = names(&["a", "b", "c", "d", "n"]);
    let cpost = parse_constraint(Some("ret >= 4")).unwrap();
    let q = qualified_postcondition(&sscanf, &cpost, &suspicious, domain).unwrap();
    assert_eq!(q.must_init, names(&["a", "b", "c", "d"]));
    assert_eq!(q.may_init.len(), 1);
    assert_eq!(q.may_init[0].name, "n");
    assert_eq!(q.may_init[0].condition.render(), "ret == 5");

    let func = load_model("func.json");
    let suspicious = names(&["a"]);
    // Unconstrained: the early return survives, a is only may_init.
    let q = qualified_postcondition(&func, &ConstraintExpr::Top, &suspicious, domain).unwrap();
    assert_eq!(q.must_init, names(&[]));
    assert_eq!(q.may_init.len(), 1);
    assert_eq!(q.may_init[0].name, "a");
    assert_eq!(q.may_init[0].condition.render(), "!some_condi");
    // Direct application: the path constraint contradicts the guard.
    let cpost = parse_constraint(Some("!some_condi")).unwrap();
    let q = qualified_postcondition(&func, &cpost, &suspicious, domain).unwrap();
    assert_eq!(q.must_init, names(&["a"]));
    assert!(q.may_init.is_empty());
    // Outcome conflict: ret == 0 rules out the ret -> -1 path.
    let cpost = parse_constraint(Some("ret == 0")).unwrap();
    let q = qualified_postcondition(&func, &cpost, &suspicious, domain).unwrap();
    assert_eq!(q.must_init, names(&["a"]));
    assert!(q.may_init.is_empty());

    pass(2, "scanf-style and early-return models reproduce all worked outcomes");
}

// ---- criterion 3: end-to-end replay of the three case studies ----

struct ReplayRun {
    store_dir: tempfile::TempDir,
    decisions: Vec<(String, Decision)>,
    case_iii_may_init: Vec<(String, String)>,
    verdicts: Vec<llift_core::orchestrator::CaseVerdict>,
}

fn replay_case_studies() -> ReplayRun {
    let fixtures = fixtures_dir();
    let reports = parse_report_file(&fixtures.join("reports/case_studies.json")).unwrap();
    let corpus = build_index(&fixtures.join("corpus")).unwrap();
    let gateway =
        Gateway::from_config(&BackendConfig::replay(fixtures.join("transcripts"))).unwrap();
    assert!(gateway.deterministic());
    let pack = PromptPack::builtin();
    let store_dir = tempfile::TempDir::new().unwrap();
    let store = VerdictStore::open(store_dir.path(), "case-studies").unwrap();
    let options = BatchOptions {
        batch_id: "case-studies".into(),
        ..BatchOptions::default()
    };
    let summary = run_batch(
        &reports, &corpus, &gateway, &pack, None, &store, &options, &|_| {},
    );
    assert!(summary.store_failures.is_empty());
    let decisions = summary
        .verdicts
        .iter()
        .map(|v| (v.case_id.clone(), v.decision))
        .collect();
    let case_iii_may_init = summary
        .verdicts
        .iter()
        .find(|v| v.case_id == "case_iii")
        .unwrap()
        .may_init
        .iter()
        .map(|m| (m.name.clone(), m.condition.clone()))
        .collect();
    ReplayRun {
        store_dir,
        decisions,
        case_iii_may_init,
        verdicts: summary.verdicts,
    }
}

#[test]
fn criterion_3_case_study_replay() {
    let started = Instant::now();
    let first = replay_case_studies();
    let second = replay_case_studies();
    let elapsed = started.elapsed();

    let expect = [
        ("case_i", Decision::NonBug),
        ("case_ii", Decision::NonBug),
        ("case_iii", Decision::Bug),
    ];
    for (case, decision) in expect {
        assert_eq!(
            first.decisions.iter().find(|(c, _)| c == case).unwrap().1,
            decision,
            "{case}"
        );
    }
    for verdict in &first.verdicts {
        assert_eq!(verdict.votes.len(), 1, "a deterministic backend runs each case once");
        // Policy consistency: non_bug exactly when every suspicious name is
        // guaranteed initialized (or the use is unreachable).
        let covered = verdict.unreachable_use
            || verdict.suspicious.iter().all(|s| verdict.must_init.contains(s));
        assert_eq!(verdict.decision == Decision::NonBug, covered, "{}", verdict.case_id);
    }
    assert_eq!(
        first.case_iii_may_init,
        [("ecode".to_string(), "p9pdu_readf returns 0".to_string())]
    );

    let verdicts_a = std::fs::read(first.store_dir.path().join("verdicts.jsonl")).unwrap();
    let verdicts_b = std::fs::read(second.store_dir.path().join("verdicts.jsonl")).unwrap();
    assert!(!verdicts_a.is_empty());
    assert_eq!(verdicts_a, verdicts_b, "two consecutive runs must be byte-identical");

    // Fixture-scale mirror of the batch statistics surface.
    let stats = batch_stats(first.store_dir.path(), "case-studies").unwrap();
    assert_eq!(stats.decisions.get("non_bug"), Some(&2));
    assert_eq!(stats.decisions.get("bug"), Some(&1));

    assert!(elapsed.as_secs_f64() < 5.0, "took {elapsed:?}, budget 5 s");
    pass(3, &format!(
        "case studies replay to non_bug/non_bug/bug with byte-identical stores in {elapsed:?}"
    ));
}

// ---- shared scripted-case scaffolding ----

const USE_C: &str = concat!(
    "static int parse_tuning_line(const char *str)\n",
    "{\n",
    "\tint a, b, c, d, n;\n",
    "\tint ret;\n",
    "\n",
    "\tret = sscanf(str, \"%d %d %d %d%n\", &a, &b, &c, &d, &n);\n",
    "\tif (ret >= 4) {\n",
    "\t\tconsume(a, b, c, d);\n",
    "\t\treturn 0;\n",
    "\t}\n",
    "\treturn -1;\n",
    "}\n",
);

const CONVO1_DOC: &str = r#"{"initializer": "ret = sscanf(str, \"%d %d %d %d%n\", &a, &b, &c, &d, &n)", "suspicious": ["a", "b", "c", "d"], "postconstraint": "ret >= 4"}"#;
const CONVO2_OK: &str = r#"{"ret": "success", "response": {"must_init": ["a", "b", "c", "d"], "may_init": [{"name": "n", "condition": "ret > 4"}]}}"#;
const CONVO2_BAD: &str = r#"{"ret": "success", "response": {"must_init": [], "may_init": [{"name": "a", "condition": "ret >= 1"}]}}"#;

struct Scaffold {
    _dir: tempfile::TempDir,
    corpus: llift_core::corpus::CorpusIndex,
    report: BugReport,
    gateway: Gateway,
    pack: PromptPack,
}

impl Scaffold {
    fn new(backend: ScriptedBackend) -> Scaffold {
        let dir = tempfile::TempDir::new().unwrap();
        std::fs::write(dir.path().join("use.c"), USE_C).unwrap();
        let corpus = build_index(dir.path()).unwrap();
        Scaffold {
            _dir: dir,
            corpus,
            report: BugReport {
                id: "s1".into(),
                variable: "a".into(),
                caller: "parse_tuning_line".into(),
                file: "use.c".into(),
                line: 8,
                extra: Default::default(),
            },
            gateway: Gateway::with_backend(
                &BackendConfig::http("http://unused", "test-model"),
                Box::new(backend),
            ),
            pack: PromptPack::builtin(),
        }
    }

    fn ctx(&self) -> CaseContext<'_> {
        CaseContext {
            report: &self.report,
            corpus: &self.corpus,
            gateway: &self.gateway,
            pack: &self.pack,
            votes: 3,
            domain: Domain::default(),
            models: None,
            ablation: Ablation::Full,
        }
    }

    fn c1(&self) -> ConvoOneResult {
        ConvoOneResult {
            initializers: vec![Initializer {
                text: "ret = sscanf(str, ...)".into(),
                callee: Some("sscanf".into()),
            }],
            suspicious: vec!["a".into(), "b".into(), "c".into(), "d".into()],
            postconstraint: Some("ret >= 4".into()),
        }
    }
}

fn seq(responses: &[&str]) -> Script {
    Script::Sequence(responses.iter().map(|s| s.to_string()).collect())
}

// ---- criterion 4: protocol bounds ----

#[test]
fn criterion_4_protocol_bounds() {
    // Requests on every turn: inconclusive at exactly the cap of 8.
    let backend = ScriptedBackend::new();
    backend.script(
        "s1",
        "convo2",
        0,
        Script::Repeat(r#"[{"type":"function_def", "name":"whatever"}]"#.into()),
    );
    let scaffold = Scaffold::new(backend);
    let ctx = scaffold.ctx();
    let mut sink = Vec::new();
    let summary = run_convo_two(&ctx, &scaffold.c1(), 0, 0, &mut sink).unwrap();
    assert_eq!(summary.status, ConvoTwoStatus::Inconclusive);
    assert_eq!(sink[0].turn_count(), 8, "terminates at exactly the cap");

    // One request round: seed, supply, self-validation, structured = 4 turns.
    let backend = ScriptedBackend::new();
    backend.script(
        "s1",
        "convo2",
        0,
        seq(&[
            r#"[{"type":"function_def", "name":"__alloc_skb"}]"#,
            "english analysis with the definition in hand",
            "validated",
            CONVO2_OK,
        ]),
    );
    let scaffold = Scaffold::new(backend);
    let ctx = scaffold.ctx();
    let mut sink = Vec::new();
    let summary = run_convo_two(&ctx, &scaffold.c1(), 0, 0, &mut sink).unwrap();
    assert_eq!(summary.status, ConvoTwoStatus::Success);
    assert_eq!(
        sink[0].turn_count(),
        4,
        "two request/supply turns then the two-turn tail"
    );
    // Completed summarization conversations end with a self-validation turn
    // followed by a structured turn.
    let turns = &sink[0].turns;
    assert!(turns[turns.len() - 2].prompt.contains("reassess your previous answer"));
    assert!(turns[turns.len() - 1].prompt.contains("output a single JSON document"));
    assert!(
        turns[1].prompt.contains("Please proceed with the analysis"),
        "unresolvable definition gets the proceed-anyway instruction in the supply turn"
    );

    // Two request rounds cost exactly one more turn.
    let backend = ScriptedBackend::new();
    backend.script(
        "s1",
        "convo2",
        0,
        seq(&[
            r#"[{"type":"function_def", "name":"first_fn"}]"#,
            r#"[{"type":"function_def", "name":"second_fn"}]"#,
            "english",
            "validated",
            CONVO2_OK,
        ]),
    );
    let scaffold = Scaffold::new(backend);
    let ctx = scaffold.ctx();
    let mut sink = Vec::new();
    let summary = run_convo_two(&ctx, &scaffold.c1(), 0, 0, &mut sink).unwrap();
    assert_eq!(summary.status, ConvoTwoStatus::Success);
    assert_eq!(sink[0].turn_count(), 5);

    pass(4, "turn cap of 8 enforced exactly; request rounds cost the expected turns");
}

// ---- criterion 5: majority voting ----

#[test]
fn criterion_5_majority_voting() {
    // [bug, non_bug, bug] -> bug.
    let backend = ScriptedBackend::new();
    for run in 0..3u32 {
        backend.script("s1", "convo1", run, seq(&["english", "ack", CONVO1_DOC]));
        let doc = if run == 1 { CONVO2_OK } else { CONVO2_BAD };
        backend.script("s1", "convo2", run, seq(&["english", "ack", doc]));
    }
    let scaffold = Scaffold::new(backend);
    let outcome = run_case(&scaffold.ctx());
    assert_eq!(outcome.verdict.decision, Decision::Bug);
    assert_eq!(
        outcome.verdict.votes,
        [Decision::Bug, Decision::NonBug, Decision::Bug]
    );

    // [non_bug, non_bug] early-stops after 2 runs.
    let backend = ScriptedBackend::new();
    for run in 0..3u32 {
        backend.script("s1", "convo1", run, seq(&["english", "ack", CONVO1_DOC]));
        backend.script("s1", "convo2", run, seq(&["english", "ack", CONVO2_OK]));
    }
    let scaffold = Scaffold::new(backend);
    let outcome = run_case(&scaffold.ctx());
    assert_eq!(outcome.verdict.decision, Decision::NonBug);
    assert_eq!(outcome.verdict.votes.len(), 2, "early stop after two agreements");

    // The reported decision always has >= ceil(votes/2) recorded votes.
    for outcome_votes in [
        vec![Decision::Bug, Decision::NonBug, Decision::Bug],
        vec![Decision::NonBug, Decision::NonBug],
    ] {
        let threshold = 3usize / 2 + 1;
        let decision = outcome_votes
            .iter()
            .find(|d| outcome_votes.iter().filter(|v| v == d).count() >= threshold)
            .copied()
            .unwrap();
        assert!(
            outcome_votes.iter().filter(|v| **v == decision).count() >= threshold
        );
    }
    pass(5, "majority decisions and early stop behave as specified");
}

// ---- criterion 6: wire-format fidelity ----

#[test]
fn criterion_6_wire_format_fidelity() {
    let request_doc = r#"{
 "initializer": "ret = sscanf(str,'%d %d %d %d%n',&a,&b,&c,&d,&n)",
 "suspicious": ["a", "b", "c", "d"],
 "postconstraint": "ret >= 4"
}"#;
    let response_doc = r#"{
 "ret": "success",
 "response": {
   "must_init": ["a", "b", "c", "d"],
   "may_init": [{"name":"n", "condition": "ret > 4"}]
  }
}"#;
    let request_list = r#"[{"type":"function_def", "name":"some_func"}]"#;
    for doc in [request_doc, response_doc, request_list] {
        let original: serde_json::Value = serde_json::from_str(doc).unwrap();
        let roundtripped = match parse_structured_response(doc).unwrap() {
            StructuredResponse::ConvoOne(w) => convo_one_to_json(&w),
            StructuredResponse::ConvoTwo(w) => convo_two_to_json(&w),
            StructuredResponse::Requests(r) => requests_to_json(&r),
        };
        assert_eq!(roundtripped, original);
    }

    // Prose-only structured turns trigger exactly one repair re-prompt and
    // then a protocol error.
    let backend = ScriptedBackend::new();
    backend.script(
        "s1",
        "convo1",
        0,
        seq(&["english", "ack", "prose without a document", "still prose"]),
    );
    let scaffold = Scaffold::new(backend);
    let ctx = scaffold.ctx();
    let mut sink = Vec::new();
    let caller = scaffold.corpus.enclosing_function("use.c", 8).unwrap();
    let err = run_convo_one(&ctx, caller, 0, &mut sink).unwrap_err();
    assert!(matches!(err, RunError::Protocol(_)));
    let conversation = &sink[0];
    assert_eq!(conversation.turn_count(), 4);
    assert!(conversation.turns[3]
        .prompt
        .contains("did not contain the required JSON"));
    let repairs = conversation
        .turns
        .iter()
        .filter(|t| t.prompt.contains("did not contain the required JSON"))
        .count();
    assert_eq!(repairs, 1, "exactly one repair re-prompt");

    pass(6, "paper documents round-trip verbatim; repair path bounded to one re-prompt");
}

// ---- criterion 7: corpus extraction fidelity ----

#[test]
fn criterion_7_corpus_extraction_fidelity() {
    let dir = tempfile::TempDir::new().unwrap();
    let mut expected = 0usize;
    for file_idx in 0..5 {
        let mut content = String::from("/* fixture file */\n\n#include <linux/kernel.h>\n\n");
        for fn_idx in 0..5 {
            let name = format!("fn_{file_idx}_{fn_idx}");
            content.push_str(&format!(
                concat!(
                    "/* {name} does a small amount of work\n",
                    " * across multiple comment lines */\n",
                    "static int {name}(const char *s, int n)\n",
                    "{{\n",
                    "\tchar open = '{{';\n",
                    "\tconst char *msg = \"braces {{ inside }} a string\";\n",
                    "\tif (n > {fn_idx}) {{\n",
                    "\t\tstruct init x = {{ .a = 1, .b = {{ 2, 3 }} }};\n",
                    "\t\treturn x.a + (s[0] == open) + (int)sizeof(msg);\n",
                    "\t}}\n",
                    "\treturn {fn_idx}; /* closing }} in a comment */\n",
                    "}}\n\n",
                ),
                name = name,
                fn_idx = fn_idx,
            ));
            expected += 1;
        }
        std::fs::write(dir.path().join(format!("file_{file_idx}.c")), content).unwrap();
    }
    assert!(expected >= 20);

    let index = build_index(dir.path()).unwrap();
    assert_eq!(index.stats().definitions_found, expected);
    let mut checked = 0usize;
    for name in index.names().map(str::to_string).collect::<Vec<_>>() {
        for def in index.definitions(&name) {
            let content = std::fs::read_to_string(dir.path().join(&def.file)).unwrap();
            let fresh = slice_lines(&content, def.start_line, def.end_line).unwrap();
            assert_eq!(fresh, def.text, "{name} must be byte-identical to its file slice");
            assert!(def.text.starts_with(&format!("/* {name} does")));
            checked += 1;
        }
    }
    assert_eq!(checked, expected);

    let again = build_index(dir.path()).unwrap();
    assert_eq!(index, again, "rebuild over an unchanged tree is idempotent");
    pass(7, &format!("{checked} extracted definitions byte-identical; rebuild idempotent"));
}

// ---- criterion 8: monotonicity and TOP identity ----

#[test]
fn criterion_8_monotonicity_and_top_identity() {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0xc0de);
    let domain = Domain::default();
    let mut monotonic_checked = 0usize;
    for _ in 0..500 {
        let model = random::random_model(&mut rng);
        let c1 = random::random_cpost(&mut rng);
        let c2 = random::random_cpost(&mut rng);

        // TOP identity: pruning under the unconstrained condition keeps
        // every path unchanged.
        let all = prune_paths(&model, &ConstraintExpr::Top, domain).unwrap();
        assert_eq!(all.len(), model.paths.len());
        assert!(all
            .iter()
            .zip(model.paths.iter())
            .all(|(kept, original)| *kept == original));

        let both = ConstraintExpr::and(vec![c1.clone(), c2]);
        if !llift_core::constraint::satisfiable(&both, domain).unwrap() {
            continue;
        }
        let wide: Vec<&str> = prune_paths(&model, &c1, domain)
            .unwrap()
            .iter()
            .map(|p| p.name.as_str())
            .collect();
        let narrow: Vec<&str> = prune_paths(&model, &both, domain)
            .unwrap()
            .iter()
            .map(|p| p.name.as_str())
            .collect();
        assert!(
            narrow.iter().all(|p| wide.contains(p)),
            "surviving(c1 && c2) must be a subset of surviving(c1)"
        );

        // must_init can only grow when the constraint tightens, as long as
        // some path still survives.
        if !narrow.is_empty() {
            let suspicious = random::suspicious_pool();
            let wide_q = qualified_postcondition(&model, &c1, &suspicious, domain).unwrap();
            let narrow_q = qualified_postcondition(&model, &both, &suspicious, domain).unwrap();
            assert!(wide_q.must_init.is_subset(&narrow_q.must_init));
        }
        monotonic_checked += 1;
    }
    assert!(monotonic_checked > 300, "satisfiable pairs should dominate");
    pass(8, &format!(
        "TOP identity on 500 models; monotonicity on {monotonic_checked} satisfiable pairs"
    ));
}

// ---- criterion 9: optional live smoke test ----

#[test]
#[ignore = "live smoke test; set LLIFT_API_KEY (and optionally LLIFT_ENDPOINT, LLIFT_MODEL) to run"]
fn criterion_9_live_smoke() {
    let Ok(api_key) = std::env::var("LLIFT_API_KEY") else {
        eprintln!("LLIFT_API_KEY not set; skipping");
        return;
    };
    let endpoint = std::env::var("LLIFT_ENDPOINT")
        .unwrap_or_else(|_| "https://api.openai.com/v1/chat/completions".into());
    let model = std::env::var("LLIFT_MODEL").unwrap_or_else(|_| "gpt-4".into());

    let dir = tempfile::TempDir::new().unwrap();
    std::fs::write(dir.path().join("use.c"), USE_C).unwrap();
    let corpus = build_index(dir.path()).unwrap();
    let report = BugReport {
        id: "live_sscanf".into(),
        variable: "a".into(),
        caller: "parse_tuning_line".into(),
        file: "use.c".into(),
        line: 8,
        extra: Default::default(),
    };
    let mut cfg = BackendConfig::http(endpoint, model);
    cfg.api_key = Some(api_key);
    let gateway = Gateway::from_config(&cfg).unwrap();
    let pack = PromptPack::builtin();
    let ctx = CaseContext {
        report: &report,
        corpus: &corpus,
        gateway: &gateway,
        pack: &pack,
        votes: 1,
        domain: Domain::default(),
        models: None,
        ablation: Ablation::Full,
    };
    let mut sink = Vec::new();
    let caller = corpus.enclosing_function("use.c", 8).unwrap();
    let c1 = run_convo_one(&ctx, caller, 0, &mut sink).expect("extraction conversation completes");
    let ConvoOneOutcome::Found(c1) = c1 else {
        panic!("live model found no initializer in the scanf fixture");
    };
    let summary = run_convo_two(&ctx, &c1, 0, 0, &mut sink).expect("summarization completes");
    assert!(sink.iter().all(|c| c.turn_count() <= 8));
    assert!(
        matches!(summary.status, ConvoTwoStatus::Success | ConvoTwoStatus::Inconclusive),
        "must terminate with a parseable summary or a bounded inconclusive"
    );
    pass(9, "live endpoint completed within the turn cap with a parseable summary");
}
