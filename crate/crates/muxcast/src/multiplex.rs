//! Dimensional multiplexing: folding an integer matrix into one token
//! stream and recovering it from (possibly truncated) continuations.
//!
//! Three schemes are supported. With values `d1 = [17, 26]`, `d2 = [23, 31]`
//! and a 2-digit budget:
//!
//! * digit interleaving (DI) interleaves digits per timestamp: `1273,2361`
//! * value interleaving (VI) concatenates whole values per timestamp: `1723,2631`
//! * value concatenation (VC) separates every value: `17,23,26,31`
//!
//! Values are always rendered zero-padded to exactly `b` digits; without the
//! fixed width, DI and VI decoding would be ambiguous. At `d = 1` all three
//! schemes coincide with the plain comma-separated univariate encoding.

use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};

/// Which multiplexing scheme renders the stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MuxScheme {
    /// Digit interleaving: digit-position-major, dimension-minor.
    Di,
    /// Value interleaving: whole values concatenated per timestamp.
    Vi,
    /// Value concatenation: every value separated.
    Vc,
}

impl MuxScheme {
    pub const ALL: [MuxScheme; 3] = [MuxScheme::Di, MuxScheme::Vi, MuxScheme::Vc];
}

impl fmt::Display for MuxScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            MuxScheme::Di => "di",
            MuxScheme::Vi => "vi",
            MuxScheme::Vc => "vc",
        };
        f.write_str(s)
    }
}

impl std::str::FromStr for MuxScheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "di" => Ok(MuxScheme::Di),
            "vi" => Ok(MuxScheme::Vi),
            "vc" => Ok(MuxScheme::Vc),
            other => Err(Error::InvalidConfig(format!(
                "unknown multiplexing scheme '{other}' (expected di, vi, or vc)"
            ))),
        }
    }
}

/// The character set a stream is rendered over.
///
/// Each value digit is a base-`radix` digit mapped through `symbols`;
/// the separator sits between timestamps (DI/VI) or values (VC).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TokenVocabulary {
    symbols: Vec<char>,
    separator: char,
}

impl TokenVocabulary {
    pub fn new(symbols: Vec<char>, separator: char) -> Result<Self> {
        if symbols.is_empty() {
            return Err(Error::InvalidConfig("vocabulary has no symbols".into()));
        }
        let unique: BTreeSet<char> = symbols.iter().copied().collect();
        if unique.len() != symbols.len() {
            return Err(Error::InvalidConfig("vocabulary symbols repeat".into()));
        }
        if symbols.contains(&separator) {
            return Err(Error::InvalidConfig(
                "separator must not be a vocabulary symbol".into(),
            ));
        }
        Ok(TokenVocabulary { symbols, separator })
    }

    /// The digit vocabulary: `0`-`9` separated by commas. Streams over it
    /// contain only digits and commas.
    pub fn digits() -> Self {
        TokenVocabulary {
            symbols: ('0'..='9').collect(),
            separator: ',',
        }
    }

    pub fn radix(&self) -> u64 {
        self.symbols.len() as u64
    }

    pub fn separator(&self) -> char {
        self.separator
    }

    pub fn symbols(&self) -> &[char] {
        &self.symbols
    }

    /// Every character a well-formed stream may contain.
    pub fn allowed_chars(&self) -> BTreeSet<char> {
        let mut set: BTreeSet<char> = self.symbols.iter().copied().collect();
        set.insert(self.separator);
        set
    }

    fn char_for(&self, digit: u64) -> char {
        self.symbols[digit as usize]
    }

    fn digit_for(&self, c: char) -> Option<u64> {
        self.symbols.iter().position(|&s| s == c).map(|i| i as u64)
    }
}

/// Shape of a multiplexed stream: scheme, dimensions, digits per value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MuxLayout {
    pub scheme: MuxScheme,
    pub d: usize,
    pub b: u32,
}

impl MuxLayout {
    pub fn new(scheme: MuxScheme, d: usize, b: u32) -> Result<Self> {
        if d == 0 {
            return Err(Error::InvalidConfig("layout needs at least 1 dimension".into()));
        }
        if b == 0 {
            return Err(Error::InvalidConfig("layout needs at least 1 digit".into()));
        }
        Ok(MuxLayout { scheme, d, b })
    }

    /// Value characters per timestamp, excluding separators: `d * b`.
    pub fn chars_per_timestamp(&self) -> usize {
        self.d * self.b as usize
    }

    /// Exact rendered length of `n` timestamps.
    ///
    /// DI/VI: `n*d*b + (n-1)`; VC: `n*d*b + (n*d - 1)`.
    pub fn stream_chars(&self, n: usize) -> usize {
        if n == 0 {
            return 0;
        }
        let value_chars = n * self.chars_per_timestamp();
        match self.scheme {
            MuxScheme::Di | MuxScheme::Vi => value_chars + (n - 1),
            MuxScheme::Vc => value_chars + (n * self.d - 1),
        }
    }
}

fn check_matrix(ints: &[Vec<u64>], layout: &MuxLayout, radix: u64) -> Result<usize> {
    if ints.len() != layout.d {
        return Err(Error::LengthMismatch {
            left: ints.len(),
            right: layout.d,
        });
    }
    let n = ints[0].len();
    let limit = radix
        .checked_pow(layout.b)
        .ok_or_else(|| Error::InvalidConfig("digit budget too large for radix".into()))?;
    for (col, column) in ints.iter().enumerate() {
        if column.len() != n {
            return Err(Error::LengthMismatch {
                left: column.len(),
                right: n,
            });
        }
        for (row, &v) in column.iter().enumerate() {
            if v >= limit {
                return Err(Error::DigitOverflow {
                    value: v,
                    row,
                    col,
                    budget: layout.b,
                });
            }
        }
    }
    Ok(n)
}

/// Digits of `value`, most significant first, zero-padded to `b`.
fn push_digits(out: &mut String, value: u64, b: u32, vocab: &TokenVocabulary) {
    let radix = vocab.radix();
    for p in (0..b).rev() {
        let digit = (value / radix.pow(p)) % radix;
        out.push(vocab.char_for(digit));
    }
}

/// Render an integer matrix (per-dimension columns) under the layout's scheme.
pub fn mux(ints: &[Vec<u64>], layout: &MuxLayout, vocab: &TokenVocabulary) -> Result<String> {
    match layout.scheme {
        MuxScheme::Di => mux_di(ints, layout, vocab),
        MuxScheme::Vi => mux_vi(ints, layout, vocab),
        MuxScheme::Vc => mux_vc(ints, layout, vocab),
    }
}

/// Digit interleaving: per timestamp, for each digit position (most
/// significant first), emit that digit of every dimension in order.
pub fn mux_di(ints: &[Vec<u64>], layout: &MuxLayout, vocab: &TokenVocabulary) -> Result<String> {
    let radix = vocab.radix();
    let n = check_matrix(ints, layout, radix)?;
    let mut out = String::with_capacity(layout.stream_chars(n));
    for t in 0..n {
        if t > 0 {
            out.push(vocab.separator);
        }
        for p in (0..layout.b).rev() {
            for column in ints {
                let digit = (column[t] / radix.pow(p)) % radix;
                out.push(vocab.char_for(digit));
            }
        }
    }
    Ok(out)
}

/// Value interleaving: per timestamp, concatenate the full rendering of
/// every dimension in order.
pub fn mux_vi(ints: &[Vec<u64>], layout: &MuxLayout, vocab: &TokenVocabulary) -> Result<String> {
    let n = check_matrix(ints, layout, vocab.radix())?;
    let mut out = String::with_capacity(layout.stream_chars(n));
    for t in 0..n {
        if t > 0 {
            out.push(vocab.separator);
        }
        for column in ints {
            push_digits(&mut out, column[t], layout.b, vocab);
        }
    }
    Ok(out)
}

/// Value concatenation: flatten timestamp-major, dimension-minor, and
/// separate every value.
pub fn mux_vc(ints: &[Vec<u64>], layout: &MuxLayout, vocab: &TokenVocabulary) -> Result<String> {
    let n = check_matrix(ints, layout, vocab.radix())?;
    let mut out = String::with_capacity(layout.stream_chars(n));
    for t in 0..n {
        for (k, column) in ints.iter().enumerate() {
            if t > 0 || k > 0 {
                out.push(vocab.separator);
            }
            push_digits(&mut out, column[t], layout.b, vocab);
        }
    }
    Ok(out)
}

/// Decode a continuation greedily from the left, stopping at the first
/// malformed chunk. Returns per-dimension columns and the number of
/// complete timestamps recovered; partial rows are never returned.
pub fn demux(
    continuation: &str,
    layout: &MuxLayout,
    vocab: &TokenVocabulary,
) -> Result<(Vec<Vec<u64>>, usize)> {
    let radix = vocab.radix();
    let b = layout.b as usize;
    let mut columns = vec![Vec::new(); layout.d];

    let decode_chunk = |chunk: &str, want: usize| -> Option<Vec<u64>> {
        let digits: Option<Vec<u64>> = chunk.chars().map(|c| vocab.digit_for(c)).collect();
        let digits = digits?;
        (digits.len() == want).then_some(digits)
    };

    match layout.scheme {
        MuxScheme::Di | MuxScheme::Vi => {
            for chunk in continuation.split(vocab.separator()) {
                let Some(digits) = decode_chunk(chunk, layout.chars_per_timestamp()) else {
                    break;
                };
                for (k, col) in columns.iter_mut().enumerate() {
                    let mut value = 0u64;
                    for p in 0..b {
                        let idx = match layout.scheme {
                            MuxScheme::Di => p * layout.d + k,
                            MuxScheme::Vi => k * b + p,
                            MuxScheme::Vc => unreachable!(),
                        };
                        value = value * radix + digits[idx];
                    }
                    col.push(value);
                }
            }
        }
        MuxScheme::Vc => {
            let mut pending: Vec<u64> = Vec::with_capacity(layout.d);
            for chunk in continuation.split(vocab.separator()) {
                let Some(digits) = decode_chunk(chunk, b) else {
                    break;
                };
                let value = digits.iter().fold(0u64, |acc, &d| acc * radix + d);
                pending.push(value);
                if pending.len() == layout.d {
                    for (k, col) in columns.iter_mut().enumerate() {
                        col.push(pending[k]);
                    }
                    pending.clear();
                }
            }
        }
    }

    let rows = columns[0].len();
    if rows == 0 {
        return Err(Error::NoCompleteTimestamp);
    }
    Ok((columns, rows))
}
