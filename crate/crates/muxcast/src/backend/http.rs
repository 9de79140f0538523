//! Client for generic completion-style HTTP endpoints.
//!
//! Wire format: a JSON POST of `{model, prompt, max_tokens, temperature,
//! top_p, stop, logit_bias?}`; the response must carry the generated text
//! in `choices[0].text` or a top-level `text`/`completion` field. Auth is
//! a bearer token read from a configured environment variable.

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::thread;
use std::time::Duration;

use super::{BackendSelector, GenerationConstraint, TextBackend};
use crate::error::{Error, Result};
use crate::series::SamplingParams;

/// Completion-endpoint backend.
///
/// Vocabulary is enforced by optionally attaching a character-keyed
/// `logit_bias` map (for servers that accept one) and always by rejection:
/// responses containing disallowed characters are resampled up to
/// `max_retry` times, after which the longest allowed prefix is kept.
pub struct HttpBackend {
    client: reqwest::blocking::Client,
    endpoint: String,
    model_id: Option<String>,
    auth_token: Option<String>,
    send_logit_bias: bool,
}

#[derive(Serialize)]
struct CompletionRequest<'a> {
    model: Option<&'a str>,
    prompt: &'a str,
    max_tokens: usize,
    temperature: f64,
    top_p: f64,
    stop: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    logit_bias: Option<BTreeMap<String, f64>>,
}

#[derive(Deserialize)]
struct CompletionResponse {
    #[serde(default)]
    choices: Vec<Choice>,
    #[serde(default)]
    text: Option<String>,
    #[serde(default)]
    completion: Option<String>,
}

#[derive(Deserialize)]
struct Choice {
    #[serde(default)]
    text: Option<String>,
}

impl CompletionResponse {
    fn into_text(self) -> Option<String> {
        if let Some(choice) = self.choices.into_iter().next() {
            return choice.text;
        }
        self.text.or(self.completion)
    }
}

impl HttpBackend {
    pub fn new(selector: &BackendSelector) -> Result<Self> {
        selector.validate()?;
        let endpoint = selector
            .endpoint
            .clone()
            .ok_or_else(|| Error::InvalidConfig("http backend requires an endpoint".into()))?;
        let auth_token = selector
            .auth_token_env
            .as_deref()
            .and_then(|var| std::env::var(var).ok());
        let client = reqwest::blocking::Client::builder()
            .timeout(selector.timeout)
            .build()
            .map_err(|e| Error::BackendUnreachable(e.to_string()))?;
        Ok(HttpBackend {
            client,
            endpoint,
            model_id: selector.model_id.clone(),
            auth_token,
            send_logit_bias: false,
        })
    }

    /// Attach a character-keyed `logit_bias` map to requests. Servers that
    /// key bias by token id will ignore or reject it, so this is off by
    /// default; rejection sampling still enforces the vocabulary.
    pub fn with_char_logit_bias(mut self) -> Self {
        self.send_logit_bias = true;
        self
    }

    fn request_once(
        &self,
        prompt: &str,
        constraint: &GenerationConstraint,
        params: &SamplingParams,
    ) -> Result<String> {
        let logit_bias = self.send_logit_bias.then(|| {
            constraint
                .allowed_chars
                .iter()
                .map(|c| (c.to_string(), 100.0))
                .collect()
        });
        let body = CompletionRequest {
            model: self.model_id.as_deref(),
            prompt,
            max_tokens: constraint.max_chars,
            temperature: params.temperature,
            top_p: params.nucleus_mass,
            stop: None,
            logit_bias,
        };
        let mut request = self.client.post(&self.endpoint).json(&body);
        if let Some(token) = &self.auth_token {
            request = request.bearer_auth(token);
        }
        let response = request.send().map_err(|e| {
            if e.is_timeout() {
                Error::Timeout
            } else {
                Error::BackendUnreachable(e.to_string())
            }
        })?;
        let status = response.status();
        if !status.is_success() {
            return Err(Error::HttpStatus(status.as_u16()));
        }
        let parsed: CompletionResponse = response
            .json()
            .map_err(|e| Error::MalformedResponse(e.to_string()))?;
        parsed
            .into_text()
            .ok_or_else(|| Error::MalformedResponse("no generated text in response".into()))
    }

    /// One completion under the vocabulary constraint.
    ///
    /// Transient failures (connection, 5xx) and disallowed output are
    /// retried up to `max_retry` times. A final response that still
    /// violates the vocabulary is truncated at its first disallowed
    /// character; if every attempt yields a nonempty response with an
    /// empty allowed prefix, the constraint cannot be enforced at all.
    pub fn http_complete(
        &self,
        prompt: &str,
        constraint: &GenerationConstraint,
        params: &SamplingParams,
    ) -> Result<String> {
        let attempts = params.max_retry + 1;
        let mut last = None;
        for attempt in 0..attempts {
            match self.request_once(prompt, constraint, params) {
                Ok(raw) => {
                    if constraint.permits(&raw) {
                        return Ok(raw);
                    }
                    last = Some(raw);
                }
                Err(e @ (Error::BackendUnreachable(_) | Error::Timeout)) => {
                    if attempt + 1 == attempts {
                        return Err(e);
                    }
                }
                Err(Error::HttpStatus(code)) if (500..600).contains(&code) => {
                    if attempt + 1 == attempts {
                        return Err(Error::HttpStatus(code));
                    }
                }
                Err(e) => return Err(e),
            }
            if attempt + 1 < attempts {
                thread::sleep(Duration::from_millis(50 * (attempt as u64 + 1)));
            }
        }
        match last {
            Some(raw) => {
                let prefix = constraint.sanitize(&raw);
                if prefix.is_empty() && !raw.is_empty() {
                    Err(Error::ConstraintUnsupported {
                        retries: params.max_retry,
                    })
                } else {
                    Ok(prefix)
                }
            }
            // unreachable: every attempt either returned or stored a response
            None => Err(Error::BackendUnreachable("no response".into())),
        }
    }
}

impl TextBackend for HttpBackend {
    fn name(&self) -> &str {
        "http"
    }

    fn sample_continuations(
        &self,
        prompt: &str,
        n: usize,
        constraint: &GenerationConstraint,
        params: &SamplingParams,
    ) -> Result<Vec<String>> {
        // issue samples concurrently; collect preserves request order
        thread::scope(|scope| {
            let handles: Vec<_> = (0..n)
                .map(|_| scope.spawn(|| self.http_complete(prompt, constraint, params)))
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("sample thread panicked"))
                .collect()
        })
    }
}
