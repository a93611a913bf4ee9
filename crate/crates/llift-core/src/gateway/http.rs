//! Live backend speaking the OpenAI-compatible chat-completion protocol:
//! a system/user/assistant message list with model, temperature, and
//! max_tokens fields. Transport and rate-limit failures are retried with
//! exponential backoff; a context-window overflow reported by the service
//! is surfaced as its own error so the orchestrator can mark the case
//! inconclusive instead of retrying a hopeless request.

use std::time::Duration;

use serde_json::{json, Value};

use super::{BackendConfig, ChatBackend, GatewayError, RetryConfig, TurnRequest};

pub struct HttpBackend {
    client: reqwest::blocking::Client,
    endpoint: String,
    api_key: Option<String>,
    retry: RetryConfig,
}

impl HttpBackend {
    pub fn new(cfg: &BackendConfig) -> Result<HttpBackend, GatewayError> {
        let endpoint = cfg
            .endpoint
            .clone()
            .ok_or_else(|| GatewayError::Config("http backend requires an endpoint".into()))?;
        let client = reqwest::blocking::Client::builder()
            .timeout(Duration::from_secs(120))
            .build()
            .map_err(|e| GatewayError::Config(format!("http client: {e}")))?;
        Ok(HttpBackend {
            client,
            endpoint,
            api_key: cfg.api_key.clone(),
            retry: cfg.retry.clone(),
        })
    }
}

/// Request body with the complete ordered turn history, never a subset.
pub fn chat_payload(req: &TurnRequest<'_>) -> Value {
    let mut messages = vec![json!({"role": "system", "content": req.system_prompt})];
    for turn in req.history {
        messages.push(json!({"role": "user", "content": turn.prompt}));
        messages.push(json!({"role": "assistant", "content": turn.response}));
    }
    messages.push(json!({"role": "user", "content": req.prompt}));
    json!({
        "model": req.model,
        "temperature": req.temperature,
        "max_tokens": req.max_response_tokens,
        "messages": messages,
    })
}

enum Failure {
    Retryable(String),
    Fatal(GatewayError),
}

fn classify_error_body(status: u16, body: &str) -> Failure {
    let detail = serde_json::from_str::<Value>(body)
        .ok()
        .and_then(|v| {
            let err = v.get("error")?;
            let code = err.get("code").and_then(Value::as_str).unwrap_or("");
            let message = err.get("message").and_then(Value::as_str).unwrap_or("");
            Some((code.to_string(), message.to_string()))
        });
    if let Some((code, message)) = &detail {
        if code == "context_length_exceeded" || message.contains("maximum context length") {
            return Failure::Fatal(GatewayError::Overflow(message.clone()));
        }
    }
    let text = detail
        .map(|(code, message)| format!("{code}: {message}"))
        .unwrap_or_else(|| body.chars().take(200).collect());
    if status == 429 || status >= 500 {
        Failure::Retryable(format!("status {status}: {text}"))
    } else {
        Failure::Fatal(GatewayError::Backend(format!("status {status}: {text}")))
    }
}

fn extract_content(body: &str) -> Result<String, GatewayError> {
    let value: Value = serde_json::from_str(body)
        .map_err(|e| GatewayError::Backend(format!("unparseable completion body: {e}")))?;
    value
        .get("choices")
        .and_then(|c| c.get(0))
        .and_then(|c| c.get("message"))
        .and_then(|m| m.get("content"))
        .and_then(Value::as_str)
        .map(str::to_string)
        .ok_or_else(|| GatewayError::Backend("completion body has no message content".into()))
}

impl ChatBackend for HttpBackend {
    fn complete(&self, req: &TurnRequest<'_>) -> Result<String, GatewayError> {
        let payload = chat_payload(req);
        let mut last_failure = String::new();
        for attempt in 0..self.retry.attempts {
            if attempt > 0 {
                std::thread::sleep(self.retry.backoff(attempt - 1));
            }
            let mut builder = self.client.post(&self.endpoint).json(&payload);
            if let Some(key) = &self.api_key {
                builder = builder.bearer_auth(key);
            }
            let outcome = match builder.send() {
                Err(e) => Failure::Retryable(format!("transport: {e}")),
                Ok(response) => {
                    let status = response.status().as_u16();
                    let body = response.text().unwrap_or_default();
                    if (200..300).contains(&status) {
                        return extract_content(&body);
                    }
                    classify_error_body(status, &body)
                }
            };
            match outcome {
                Failure::Fatal(err) => return Err(err),
                Failure::Retryable(msg) => last_failure = msg,
            }
        }
        Err(GatewayError::Backend(format!(
            "gave up after {} attempts; last failure: {last_failure}",
            self.retry.attempts
        )))
    }

    fn describe(&self) -> String {
        format!("http:{}", self.endpoint)
    }
}
