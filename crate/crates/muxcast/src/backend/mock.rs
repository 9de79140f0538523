//! Deterministic offline backend.

use super::{GenerationConstraint, TextBackend};
use crate::error::Result;
use crate::series::SamplingParams;

/// Maximum suffix length considered when matching repeated patterns.
const MAX_SUFFIX: usize = 64;

/// Predicts by pattern copying: the longest prompt suffix that recurs
/// earlier in the prompt is located, and the characters that followed its
/// earlier occurrence are replayed cyclically. Output depends only on the
/// prompt, so repeated calls are bit-identical.
#[derive(Debug, Clone)]
pub struct MockBackend {
    separator: char,
}

impl MockBackend {
    pub fn new() -> Self {
        MockBackend { separator: ',' }
    }

    pub fn with_separator(separator: char) -> Self {
        MockBackend { separator }
    }

    /// One deterministic continuation of `prompt`.
    pub fn predict(
        &self,
        prompt: &str,
        constraint: &GenerationConstraint,
        _params: &SamplingParams,
    ) -> String {
        if prompt.is_empty() || constraint.max_chars == 0 {
            return String::new();
        }
        let source = match recurring_suffix_tail(prompt) {
            Some(tail) => tail.to_string(),
            None => self.last_chunk_cycle(prompt),
        };
        debug_assert!(!source.is_empty());
        source
            .chars()
            .cycle()
            .take(constraint.max_chars)
            .collect()
    }

    /// Fallback when nothing recurs: repeat the final separator-delimited
    /// chunk, separator included. Never emits a character absent from the
    /// prompt, so output stays inside the prompt's alphabet.
    fn last_chunk_cycle(&self, prompt: &str) -> String {
        let mut chunk: String = prompt
            .rsplit(self.separator)
            .find(|part| !part.is_empty())
            .unwrap_or_default()
            .to_string();
        if prompt.contains(self.separator) {
            chunk.push(self.separator);
        }
        chunk
    }
}

impl Default for MockBackend {
    fn default() -> Self {
        Self::new()
    }
}

/// Characters following the rightmost earlier occurrence of the longest
/// prompt suffix (length >= 1 char, capped at MAX_SUFFIX) that recurs
/// earlier in the prompt.
fn recurring_suffix_tail(prompt: &str) -> Option<&str> {
    let boundaries: Vec<usize> = prompt.char_indices().map(|(i, _)| i).collect();
    let total = boundaries.len();
    let max_len = MAX_SUFFIX.min(total.saturating_sub(1));
    for len in (1..=max_len).rev() {
        let suffix_start = boundaries[total - len];
        let suffix = &prompt[suffix_start..];
        // a match fully inside [0, hi) must start strictly before the
        // suffix itself; overlap with the suffix region is fine
        let mut hi = suffix_start + suffix.len() - 1;
        while !prompt.is_char_boundary(hi) {
            hi -= 1;
        }
        if let Some(found) = prompt[..hi].rfind(suffix) {
            return Some(&prompt[found + suffix.len()..]);
        }
    }
    None
}

impl TextBackend for MockBackend {
    fn name(&self) -> &str {
        "mock"
    }

    fn sample_continuations(
        &self,
        prompt: &str,
        n: usize,
        constraint: &GenerationConstraint,
        params: &SamplingParams,
    ) -> Result<Vec<String>> {
        Ok((0..n)
            .map(|_| self.predict(prompt, constraint, params))
            .collect())
    }
}
