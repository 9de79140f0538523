//! Piecewise aggregate approximation and symbolic quantization.
//!
//! A column is z-normalized with history statistics, averaged over
//! fixed-length segments (PAA), and each coefficient is mapped to one of
//! `a` equiprobable symbols using standard normal breakpoints. Decoding
//! reconstructs each symbol as the mean of the standard normal truncated
//! to the symbol's interval, de-normalizes, and repeats it per segment.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};
use std::fmt;

use crate::error::{Error, Result};
use crate::multiplex::TokenVocabulary;
use crate::series::MultiSeries;

/// How symbol indices render to characters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AlphabetKind {
    /// Index `i` renders as letter `'a' + i`; up to 26 symbols.
    Alphabetical,
    /// Index `i` renders as digit `'0' + i`; up to 10 symbols.
    Digital,
}

impl fmt::Display for AlphabetKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AlphabetKind::Alphabetical => f.write_str("alpha"),
            AlphabetKind::Digital => f.write_str("digit"),
        }
    }
}

impl std::str::FromStr for AlphabetKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "alpha" | "alphabetical" => Ok(AlphabetKind::Alphabetical),
            "digit" | "digital" => Ok(AlphabetKind::Digital),
            other => Err(Error::InvalidConfig(format!(
                "unknown alphabet kind '{other}' (expected alpha or digit)"
            ))),
        }
    }
}

/// Quantization parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SaxConfig {
    /// Points averaged into one segment.
    pub segment_length: usize,
    /// Number of symbols, at least 2.
    pub alphabet_size: usize,
    pub alphabet_kind: AlphabetKind,
}

impl Default for SaxConfig {
    fn default() -> Self {
        SaxConfig {
            segment_length: 6,
            alphabet_size: 5,
            alphabet_kind: AlphabetKind::Alphabetical,
        }
    }
}

impl SaxConfig {
    pub fn validate(&self) -> Result<()> {
        if self.segment_length == 0 {
            return Err(Error::InvalidConfig(
                "segment length must be at least 1".into(),
            ));
        }
        if self.alphabet_size < 2 {
            return Err(Error::AlphabetTooSmall(self.alphabet_size));
        }
        match self.alphabet_kind {
            AlphabetKind::Digital if self.alphabet_size > 10 => {
                Err(Error::DigitalAlphabetOverflow(self.alphabet_size))
            }
            AlphabetKind::Alphabetical if self.alphabet_size > 26 => {
                Err(Error::InvalidConfig(format!(
                    "alphabetical alphabet supports at most 26 symbols, got {}",
                    self.alphabet_size
                )))
            }
            _ => Ok(()),
        }
    }

    /// Segments covering `n` points: `ceil(n / w)`.
    pub fn segments(&self, n: usize) -> usize {
        n.div_ceil(self.segment_length)
    }
}

/// Per-dimension normalization statistics, computed on history only.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormStats {
    pub mean: f64,
    /// Population standard deviation; 0 only for constant history.
    pub std: f64,
}

/// Mean and population standard deviation of one column.
pub fn norm_stats(column: &[f64]) -> Result<NormStats> {
    if column.is_empty() {
        return Err(Error::EmptyColumn);
    }
    let n = column.len() as f64;
    let mean = column.iter().sum::<f64>() / n;
    let var = column.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    Ok(NormStats {
        mean,
        std: var.sqrt(),
    })
}

/// One dimension's symbol sequence plus everything needed to invert it.
#[derive(Debug, Clone, PartialEq)]
pub struct SaxWord {
    /// Symbol indices in `0..alphabet_size`, one per segment.
    pub symbols: Vec<usize>,
    pub stats: NormStats,
    pub config: SaxConfig,
    /// Point count of the encoded column; decoding truncates back to it.
    pub original_length: usize,
}

/// Standard normal quantiles `Φ⁻¹(i/a)` for `i = 1..a-1`, strictly
/// increasing and antisymmetric by construction.
pub fn breakpoints(a: usize) -> Result<Vec<f64>> {
    if a < 2 {
        return Err(Error::AlphabetTooSmall(a));
    }
    let normal = Normal::new(0.0, 1.0).expect("standard normal");
    let mut beta = vec![0.0; a - 1];
    for i in 1..=(a - 1) / 2 {
        let q = normal.inverse_cdf(i as f64 / a as f64);
        beta[i - 1] = q;
        beta[a - 1 - i] = -q;
    }
    // a even: the middle quantile is Φ⁻¹(1/2) = 0, already in place.
    Ok(beta)
}

/// Per-segment means; a short final segment averages only its points.
pub fn paa(column: &[f64], w: usize) -> Vec<f64> {
    assert!(w >= 1, "segment length must be at least 1");
    column
        .chunks(w)
        .map(|seg| seg.iter().sum::<f64>() / seg.len() as f64)
        .collect()
}

/// Encode one column with the given history statistics.
pub fn sax_encode_column(column: &[f64], config: &SaxConfig, stats: NormStats) -> Result<SaxWord> {
    config.validate()?;
    if column.is_empty() {
        return Err(Error::EmptyColumn);
    }
    let beta = breakpoints(config.alphabet_size)?;
    let normalized: Vec<f64> = column
        .iter()
        .map(|&v| {
            if stats.std == 0.0 {
                0.0
            } else {
                (v - stats.mean) / stats.std
            }
        })
        .collect();
    let symbols = paa(&normalized, config.segment_length)
        .into_iter()
        // a coefficient equal to a breakpoint takes the higher symbol
        .map(|c| beta.partition_point(|&bp| bp <= c))
        .collect();
    Ok(SaxWord {
        symbols,
        stats,
        config: *config,
        original_length: column.len(),
    })
}

/// Encode every dimension of a series; `stats` must come from history only.
pub fn sax_encode(
    series: &MultiSeries,
    config: &SaxConfig,
    stats: &[NormStats],
) -> Result<Vec<SaxWord>> {
    if stats.len() != series.d() {
        return Err(Error::LengthMismatch {
            left: stats.len(),
            right: series.d(),
        });
    }
    (0..series.d())
        .map(|k| sax_encode_column(series.column(k), config, stats[k]))
        .collect()
}

/// Mean of the standard normal truncated to symbol `i`'s interval
/// `(β_i, β_{i+1})`, i.e. `(φ(β_i) − φ(β_{i+1})) · a` since each interval
/// carries probability mass `1/a`.
pub fn truncated_interval_mean(beta: &[f64], alphabet_size: usize, symbol: usize) -> f64 {
    let lo = if symbol == 0 { 0.0 } else { normal_pdf(beta[symbol - 1]) };
    let hi = if symbol == alphabet_size - 1 {
        0.0
    } else {
        normal_pdf(beta[symbol])
    };
    (lo - hi) * alphabet_size as f64
}

fn normal_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

/// Reconstruct the column a word encodes: truncated-interval means,
/// de-normalized, each repeated per segment and truncated to the
/// original length. Constant history (std = 0) reconstructs the mean.
pub fn sax_decode(word: &SaxWord) -> Vec<f64> {
    if word.stats.std == 0.0 {
        return vec![word.stats.mean; word.original_length];
    }
    let a = word.config.alphabet_size;
    let beta = breakpoints(a).expect("word carries a valid config");
    let mut out = Vec::with_capacity(word.original_length);
    'outer: for &symbol in &word.symbols {
        debug_assert!(symbol < a);
        let value = truncated_interval_mean(&beta, a, symbol) * word.stats.std + word.stats.mean;
        for _ in 0..word.config.segment_length {
            if out.len() == word.original_length {
                break 'outer;
            }
            out.push(value);
        }
    }
    out
}

/// Render a word's symbols joined by the stream separator, e.g. `a,b,c`
/// (alphabetical) or `0,1,2` (digital).
pub fn render_symbols(word: &SaxWord) -> Result<String> {
    let vocab = vocabulary(&word.config)?;
    let chars: Vec<String> = word
        .symbols
        .iter()
        .map(|&i| vocab.symbols()[i].to_string())
        .collect();
    Ok(chars.join(&vocab.separator().to_string()))
}

/// The symbol vocabulary of a configuration; multiplexing SAX streams
/// uses it with a 1-digit budget, under the same separator convention
/// as the digit vocabulary.
pub fn vocabulary(config: &SaxConfig) -> Result<TokenVocabulary> {
    config.validate()?;
    let symbols: Vec<char> = match config.alphabet_kind {
        AlphabetKind::Alphabetical => ('a'..)
            .take(config.alphabet_size)
            .collect(),
        AlphabetKind::Digital => ('0'..)
            .take(config.alphabet_size)
            .collect(),
    };
    TokenVocabulary::new(symbols, ',')
}
