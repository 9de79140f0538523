//! Text-continuation backends.
//!
//! A backend turns a prompt into sampled continuations over a constrained
//! character vocabulary. Three implementations ship: an HTTP client for
//! generic completion endpoints, a deterministic pattern-copying mock for
//! offline runs, and an oracle that replays a known continuation for
//! end-to-end error-bound tests.

mod http;
mod mock;
mod oracle;

pub use http::HttpBackend;
pub use mock::MockBackend;
pub use oracle::OracleBackend;

use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::fmt;
use std::time::Duration;

use crate::error::{Error, Result};
use crate::multiplex::TokenVocabulary;
use crate::series::SamplingParams;

/// Output constraints for one generation call.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenerationConstraint {
    /// Characters the continuation may contain.
    pub allowed_chars: BTreeSet<char>,
    /// Hard cap on continuation length, in characters.
    pub max_chars: usize,
    /// Target number of timestamps (or segments) the caller will decode.
    pub stop_after_timestamps: usize,
}

impl GenerationConstraint {
    pub fn new(vocab: &TokenVocabulary, max_chars: usize, stop_after_timestamps: usize) -> Self {
        GenerationConstraint {
            allowed_chars: vocab.allowed_chars(),
            max_chars,
            stop_after_timestamps,
        }
    }

    pub fn permits(&self, text: &str) -> bool {
        text.chars().count() <= self.max_chars
            && text.chars().all(|c| self.allowed_chars.contains(&c))
    }

    /// Longest allowed prefix: cut at the first disallowed character,
    /// then cap at `max_chars`.
    pub fn sanitize(&self, raw: &str) -> String {
        raw.chars()
            .take_while(|c| self.allowed_chars.contains(c))
            .take(self.max_chars)
            .collect()
    }
}

/// Which backend to construct, and how to reach it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BackendSelector {
    pub kind: BackendKind,
    pub endpoint: Option<String>,
    pub model_id: Option<String>,
    #[serde(with = "duration_secs")]
    pub timeout: Duration,
    /// Environment variable holding the bearer token, if any.
    pub auth_token_env: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BackendKind {
    Http,
    Mock,
    Oracle,
}

impl fmt::Display for BackendKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BackendKind::Http => f.write_str("http"),
            BackendKind::Mock => f.write_str("mock"),
            BackendKind::Oracle => f.write_str("oracle"),
        }
    }
}

impl std::str::FromStr for BackendKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "http" => Ok(BackendKind::Http),
            "mock" => Ok(BackendKind::Mock),
            "oracle" => Ok(BackendKind::Oracle),
            other => Err(Error::InvalidConfig(format!(
                "unknown backend '{other}' (expected http, mock, or oracle)"
            ))),
        }
    }
}

impl Default for BackendSelector {
    fn default() -> Self {
        BackendSelector {
            kind: BackendKind::Mock,
            endpoint: None,
            model_id: None,
            timeout: Duration::from_secs(30),
            auth_token_env: None,
        }
    }
}

impl BackendSelector {
    pub fn validate(&self) -> Result<()> {
        if self.kind == BackendKind::Http && self.endpoint.is_none() {
            return Err(Error::InvalidConfig(
                "http backend requires an endpoint".into(),
            ));
        }
        Ok(())
    }
}

mod duration_secs {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};
    use std::time::Duration;

    pub fn serialize<S: Serializer>(d: &Duration, s: S) -> std::result::Result<S::Ok, S::Error> {
        d.as_secs_f64().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> std::result::Result<Duration, D::Error> {
        let secs = f64::deserialize(d)?;
        Ok(Duration::from_secs_f64(secs))
    }
}

/// A constrained text-continuation sampler.
///
/// Implementations must be callable from multiple threads; the `n` samples
/// of one call may be issued in parallel but the returned order matches
/// request order.
pub trait TextBackend: Send + Sync {
    fn name(&self) -> &str;

    /// Draw exactly `n` continuations of `prompt`, each within the
    /// constraint's vocabulary and length cap. Individual strings may be
    /// empty; downstream decoding discards them.
    fn sample_continuations(
        &self,
        prompt: &str,
        n: usize,
        constraint: &GenerationConstraint,
        params: &SamplingParams,
    ) -> Result<Vec<String>>;
}

/// Construct the backend a selector describes. The oracle backend needs
/// the continuation it should replay, which only in-process callers have.
pub fn build_backend(
    selector: &BackendSelector,
    oracle_continuation: Option<String>,
) -> Result<Box<dyn TextBackend>> {
    selector.validate()?;
    match selector.kind {
        BackendKind::Mock => Ok(Box::new(MockBackend::new())),
        BackendKind::Oracle => {
            let continuation = oracle_continuation.ok_or_else(|| {
                Error::InvalidConfig(
                    "oracle backend requires the hidden continuation at construction".into(),
                )
            })?;
            Ok(Box::new(OracleBackend::new(continuation)))
        }
        BackendKind::Http => Ok(Box::new(HttpBackend::new(selector)?)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sanitize_truncates_at_first_disallowed_char() {
        let vocab = TokenVocabulary::digits();
        let constraint = GenerationConstraint::new(&vocab, 100, 4);
        assert_eq!(constraint.sanitize("12,34x56"), "12,34");
        assert_eq!(constraint.sanitize("xyz"), "");
    }

    #[test]
    fn sanitize_caps_length() {
        let vocab = TokenVocabulary::digits();
        let constraint = GenerationConstraint::new(&vocab, 3, 1);
        assert_eq!(constraint.sanitize("123456"), "123");
    }

    #[test]
    fn http_selector_requires_endpoint() {
        let selector = BackendSelector {
            kind: BackendKind::Http,
            ..BackendSelector::default()
        };
        assert!(selector.validate().is_err());
    }

    #[test]
    fn oracle_requires_continuation() {
        let selector = BackendSelector {
            kind: BackendKind::Oracle,
            ..BackendSelector::default()
        };
        assert!(build_backend(&selector, None).is_err());
        assert!(build_backend(&selector, Some("12,34".into())).is_ok());
    }
}
