//! Structured-output handling: responses begin with English reasoning, so
//! the last well-formed brace/bracket-delimited document in the text is the
//! answer. Classification is by discriminating field: `type` means an
//! information-request list, `postconstraint` the extraction result,
//! `must_init` the summarization result.

use serde_json::{json, Map, Value};

use super::{ConvoOneWire, ConvoTwoWire, InfoRequest, MayInitEntry, ProtocolError};

#[derive(Debug, Clone, PartialEq)]
pub enum StructuredResponse {
    Requests(Vec<InfoRequest>),
    ConvoOne(ConvoOneWire),
    ConvoTwo(ConvoTwoWire),
}

/// Extract and classify the last well-formed JSON document in `text`.
pub fn parse_structured_response(text: &str) -> Result<StructuredResponse, ProtocolError> {
    let mut last = None;
    for value in json_documents(text) {
        if let Some(classified) = classify(&value) {
            last = Some(classified);
        }
    }
    last.ok_or_else(|| ProtocolError::NoStructuredDocument {
        snippet: text.chars().take(80).collect(),
    })
}

/// Every balanced, parseable JSON document in the text, left to right.
fn json_documents(text: &str) -> Vec<Value> {
    let bytes = text.as_bytes();
    let mut docs = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        if bytes[i] == b'{' || bytes[i] == b'[' {
            if let Some(end) = balanced_end(bytes, i) {
                if let Ok(value) = serde_json::from_str::<Value>(&text[i..end]) {
                    docs.push(value);
                    i = end;
                    continue;
                }
            }
        }
        i += 1;
    }
    docs
}

/// Byte index one past the end of the balanced bracket group opening at
/// `start`, honoring JSON string syntax.
fn balanced_end(bytes: &[u8], start: usize) -> Option<usize> {
    let mut stack = Vec::new();
    let mut in_string = false;
    let mut i = start;
    while i < bytes.len() {
        let b = bytes[i];
        if in_string {
            match b {
                b'\\' => i += 1,
                b'"' => in_string = false,
                _ => {}
            }
        } else {
            match b {
                b'"' => in_string = true,
                b'{' => stack.push(b'}'),
                b'[' => stack.push(b']'),
                b'}' | b']' => {
                    if stack.pop() != Some(b) {
                        return None;
                    }
                    if stack.is_empty() {
                        return Some(i + 1);
                    }
                }
                _ => {}
            }
        }
        i += 1;
    }
    None
}

fn classify(value: &Value) -> Option<StructuredResponse> {
    if let Some(requests) = as_request_list(value) {
        return Some(StructuredResponse::Requests(requests));
    }
    let obj = value.as_object()?;
    // A need_more_info envelope wraps a request list.
    if obj.get("ret").and_then(Value::as_str) == Some("need_more_info") {
        if let Some(requests) = obj.get("response").and_then(as_request_list) {
            return Some(StructuredResponse::Requests(requests));
        }
    }
    if obj.contains_key("postconstraint") || obj.contains_key("initializer") {
        return convo_one_from(obj).map(StructuredResponse::ConvoOne);
    }
    let body = obj
        .get("response")
        .and_then(Value::as_object)
        .unwrap_or(obj);
    if body.contains_key("must_init") {
        return convo_two_from(body).map(StructuredResponse::ConvoTwo);
    }
    None
}

fn as_request_list(value: &Value) -> Option<Vec<InfoRequest>> {
    let array = value.as_array()?;
    if array.is_empty() {
        return None;
    }
    array
        .iter()
        .map(|item| {
            let obj = item.as_object()?;
            Some(InfoRequest {
                kind: obj.get("type")?.as_str()?.to_string(),
                name: obj.get("name").and_then(Value::as_str).unwrap_or("").to_string(),
            })
        })
        .collect()
}

fn string_list(value: Option<&Value>) -> Vec<String> {
    value
        .and_then(Value::as_array)
        .map(|a| {
            a.iter()
                .filter_map(Value::as_str)
                .map(str::to_string)
                .collect()
        })
        .unwrap_or_default()
}

fn convo_one_from(obj: &Map<String, Value>) -> Option<ConvoOneWire> {
    let initializers = match obj.get("initializer") {
        None | Some(Value::Null) => Vec::new(),
        Some(Value::String(s)) => {
            let t = s.trim();
            if t.is_empty() || t.eq_ignore_ascii_case("none") || t.eq_ignore_ascii_case("null") {
                Vec::new()
            } else {
                vec![t.to_string()]
            }
        }
        Some(Value::Array(items)) => items
            .iter()
            .filter_map(Value::as_str)
            .map(str::to_string)
            .collect(),
        Some(_) => return None,
    };
    let postconstraint = match obj.get("postconstraint") {
        None | Some(Value::Null) => None,
        Some(Value::String(s)) if s.trim().is_empty() || s.trim() == "null" => None,
        Some(Value::String(s)) => Some(s.clone()),
        Some(_) => return None,
    };
    Some(ConvoOneWire {
        initializers,
        suspicious: string_list(obj.get("suspicious")),
        postconstraint,
    })
}

fn convo_two_from(body: &Map<String, Value>) -> Option<ConvoTwoWire> {
    let may_init = body
        .get("may_init")
        .and_then(Value::as_array)
        .map(|items| {
            items
                .iter()
                .filter_map(|item| {
                    let obj = item.as_object()?;
                    Some(MayInitEntry {
                        name: obj.get("name")?.as_str()?.to_string(),
                        condition: obj
                            .get("condition")
                            .and_then(Value::as_str)
                            .unwrap_or("")
                            .to_string(),
                    })
                })
                .collect()
        })
        .unwrap_or_default();
    Some(ConvoTwoWire {
        must_init: string_list(body.get("must_init")),
        may_init,
    })
}

/// Serialize back to the wire shapes, for round-trip checks and for
/// embedding the extraction result into the summarization request.
pub fn requests_to_json(requests: &[InfoRequest]) -> Value {
    Value::Array(
        requests
            .iter()
            .map(|r| json!({"type": r.kind, "name": r.name}))
            .collect(),
    )
}

pub fn convo_one_to_json(wire: &ConvoOneWire) -> Value {
    let initializer = match wire.initializers.len() {
        0 => Value::Null,
        1 => Value::String(wire.initializers[0].clone()),
        _ => Value::Array(
            wire.initializers
                .iter()
                .map(|s| Value::String(s.clone()))
                .collect(),
        ),
    };
    json!({
        "initializer": initializer,
        "suspicious": wire.suspicious,
        "postconstraint": wire.postconstraint,
    })
}

pub fn convo_two_to_json(wire: &ConvoTwoWire) -> Value {
    json!({
        "ret": "success",
        "response": {
            "must_init": wire.must_init,
            "may_init": wire.may_init.iter().map(|m| json!({"name": m.name, "condition": m.condition})).collect::<Vec<_>>(),
        }
    })
}

/// Terminal verdict document used by the zero-step ablation.
pub fn parse_verdict_response(text: &str) -> Option<bool> {
    for value in json_documents(text) {
        if let Some(verdict) = value.get("verdict").and_then(Value::as_str) {
            return match verdict {
                "bug" => Some(true),
                "non_bug" | "non-bug" => Some(false),
                _ => None,
            };
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    const REQUEST_DOC: &str = r#"{
 "initializer": "ret = sscanf(str,'%d %d %d %d%n',&a,&b,&c,&d,&n)",
 "suspicious": ["a", "b", "c", "d"],
 "postconstraint": "ret >= 4"
}"#;

    const RESPONSE_DOC: &str = r#"{
 "ret": "success",
 "response": {
   "must_init": ["a", "b", "c", "d"],
   "may_init": [{"name":"n", "condition": "ret > 4"}]
  }
}"#;

    const REQUEST_LIST: &str = r#"[{"type":"function_def", "name":"some_func"}]"#;

    #[test]
    fn classifies_request_doc_as_convo_one() {
        let parsed = parse_structured_response(REQUEST_DOC).unwrap();
        let StructuredResponse::ConvoOne(wire) = parsed else {
            panic!("expected extraction result, got {parsed:?}");
        };
        assert_eq!(wire.initializers.len(), 1);
        assert_eq!(wire.suspicious, ["a", "b", "c", "d"]);
        assert_eq!(wire.postconstraint.as_deref(), Some("ret >= 4"));
    }

    #[test]
    fn classifies_response_doc_as_convo_two() {
        let text = format!("Reasoning in English first.\n\n{RESPONSE_DOC}");
        let parsed = parse_structured_response(&text).unwrap();
        let StructuredResponse::ConvoTwo(wire) = parsed else {
            panic!("expected summarization result, got {parsed:?}");
        };
        assert_eq!(wire.must_init, ["a", "b", "c", "d"]);
        assert_eq!(wire.may_init.len(), 1);
        assert_eq!(wire.may_init[0].name, "n");
        assert_eq!(wire.may_init[0].condition, "ret > 4");
    }

    #[test]
    fn classifies_request_list() {
        let text = format!("I need more information.\n{REQUEST_LIST}");
        let parsed = parse_structured_response(&text).unwrap();
        let StructuredResponse::Requests(reqs) = parsed else {
            panic!("expected requests, got {parsed:?}");
        };
        assert_eq!(reqs.len(), 1);
        assert_eq!(reqs[0].kind, "function_def");
        assert_eq!(reqs[0].name, "some_func");
    }

    #[test]
    fn need_more_info_envelope_is_requests() {
        let text = r#"{ "ret": "need_more_info",  "response": [ {    "type": "function_def",    "name": "__alloc_skb" } ]}"#;
        let parsed = parse_structured_response(text).unwrap();
        let StructuredResponse::Requests(reqs) = parsed else {
            panic!("expected requests, got {parsed:?}");
        };
        assert_eq!(reqs[0].name, "__alloc_skb");
    }

    #[test]
    fn round_trips_paper_documents_verbatim() {
        for (doc, which) in [(REQUEST_DOC, "one"), (RESPONSE_DOC, "two"), (REQUEST_LIST, "req")] {
            let original: Value = serde_json::from_str(doc).unwrap();
            let reserialized = match parse_structured_response(doc).unwrap() {
                StructuredResponse::ConvoOne(w) => convo_one_to_json(&w),
                StructuredResponse::ConvoTwo(w) => convo_two_to_json(&w),
                StructuredResponse::Requests(r) => requests_to_json(&r),
            };
            assert_eq!(reserialized, original, "document {which}");
        }
    }

    #[test]
    fn last_document_wins() {
        let text = format!(
            "The format is [{{\"type\":\"function_def\", \"name\":\"x\"}}] as instructed.\n{RESPONSE_DOC}"
        );
        assert!(matches!(
            parse_structured_response(&text).unwrap(),
            StructuredResponse::ConvoTwo(_)
        ));
    }

    #[test]
    fn prose_only_is_a_parse_error() {
        assert!(matches!(
            parse_structured_response("I think the variable is always initialized."),
            Err(ProtocolError::NoStructuredDocument { .. })
        ));
        // A balanced but non-JSON brace group does not count.
        assert!(parse_structured_response("some {braces} here").is_err());
    }

    #[test]
    fn null_initializer_is_empty() {
        let text = r#"{"initializer": null, "suspicious": ["x"], "postconstraint": null}"#;
        let StructuredResponse::ConvoOne(wire) = parse_structured_response(text).unwrap() else {
            panic!();
        };
        assert!(wire.initializers.is_empty());
        assert!(wire.postconstraint.is_none());
    }

    #[test]
    fn initializer_array_preserved_in_order() {
        let text = r#"{"initializer": ["a(&x)", "b(&x)"], "suspicious": ["x"], "postconstraint": null}"#;
        let StructuredResponse::ConvoOne(wire) = parse_structured_response(text).unwrap() else {
            panic!();
        };
        assert_eq!(wire.initializers, ["a(&x)", "b(&x)"]);
    }

    #[test]
    fn combined_case_study_document_classifies_by_postconstraint() {
        // The unfamiliar-function case study publishes one combined document;
        // the `postconstraint` key takes precedence in classification.
        let text = r#"{
            "initializer": "err = p9pdu_readf(req->rc, c->proto_version, 'd', &ecode)",
            "suspicious": ["ecode"],
            "postconstraint": null,
            "response": {
                "must_init": [],
                "may_init": [{"name": "ecode", "condition": "p9pdu_readf returns 0"}]
            }
        }"#;
        assert!(matches!(
            parse_structured_response(text).unwrap(),
            StructuredResponse::ConvoOne(_)
        ));
    }

    #[test]
    fn zero_step_verdict_parse() {
        assert_eq!(parse_verdict_response("so: {\"verdict\": \"bug\"}"), Some(true));
        assert_eq!(parse_verdict_response("{\"verdict\": \"non_bug\"}"), Some(false));
        assert_eq!(parse_verdict_response("no doc"), None);
    }
}
