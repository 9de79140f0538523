//! Backend that replays a known continuation.

use super::{GenerationConstraint, TextBackend};
use crate::error::Result;
use crate::series::SamplingParams;

/// Replays the continuation it was constructed with, once per requested
/// sample. Used to measure the error floor of the surrounding pipeline:
/// with a perfect generator, residual error is pure quantization.
#[derive(Debug, Clone)]
pub struct OracleBackend {
    continuation: String,
}

impl OracleBackend {
    pub fn new(continuation: impl Into<String>) -> Self {
        OracleBackend {
            continuation: continuation.into(),
        }
    }
}

impl TextBackend for OracleBackend {
    fn name(&self) -> &str {
        "oracle"
    }

    fn sample_continuations(
        &self,
        _prompt: &str,
        n: usize,
        constraint: &GenerationConstraint,
        _params: &SamplingParams,
    ) -> Result<Vec<String>> {
        let sample = constraint.sanitize(&self.continuation);
        Ok(vec![sample; n])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::multiplex::TokenVocabulary;

    #[test]
    fn replays_exact_string_n_times() {
        let oracle = OracleBackend::new("1273,2361");
        let constraint = GenerationConstraint::new(&TokenVocabulary::digits(), 64, 2);
        let out = oracle
            .sample_continuations("irrelevant", 5, &constraint, &SamplingParams::default())
            .unwrap();
        assert_eq!(out.len(), 5);
        assert!(out.iter().all(|s| s == "1273,2361"));
    }

    #[test]
    fn respects_constraint_cap() {
        let oracle = OracleBackend::new("1273,2361");
        let constraint = GenerationConstraint::new(&TokenVocabulary::digits(), 4, 1);
        let out = oracle
            .sample_continuations("p", 1, &constraint, &SamplingParams::default())
            .unwrap();
        assert_eq!(out[0], "1273");
    }
}
