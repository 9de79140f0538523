//! End-to-end forecasting: scale (or quantize), multiplex, sample,
//! demultiplex, reconstruct, aggregate.
//!
//! The prompt is the multiplexed history terminated by a trailing
//! separator, so a model's first emitted characters begin a fresh
//! timestamp. Sampled continuations are decoded greedily; samples that
//! yield no complete timestamp are discarded, shorter samples contribute
//! only the cells they cover, and the per-cell median over contributing
//! samples forms the forecast. With a single dimension the prompt is the
//! plain comma-separated univariate encoding under every scheme.

use std::time::Instant;

use crate::backend::{GenerationConstraint, TextBackend};
use crate::error::{Error, Result};
use crate::multiplex::{self, MuxLayout, TokenVocabulary};
use crate::sax::{self, NormStats, SaxConfig, SaxWord};
use crate::scaling::{self, ScaledSeries, DEFAULT_HEADROOM};
use crate::series::{ForecastRequest, MultiSeries, PipelineConfig};

/// Fractional slack added to the character budget so occasional extra
/// separators survive until decoding truncates them.
const MAX_CHARS_SLACK: f64 = 0.10;

/// Outcome of one forecast.
#[derive(Debug, Clone)]
pub struct ForecastResult {
    /// Median-aggregated forecast, exactly `horizon` rows.
    pub forecast: MultiSeries,
    /// Decoded per-sample matrices (per-dimension columns), each with at
    /// most `horizon` rows; kept for diagnostics.
    pub per_sample: Vec<Vec<Vec<f64>>>,
    pub valid_sample_count: usize,
    pub elapsed: std::time::Duration,
    pub config_fingerprint: String,
}

/// How the history was encoded, and how to take continuations back.
enum EncodeContext {
    Digit(ScaledSeries),
    Sax {
        stats: Vec<NormStats>,
        config: SaxConfig,
    },
}

struct EncodedPrompt {
    prompt: String,
    layout: MuxLayout,
    vocab: TokenVocabulary,
    context: EncodeContext,
}

fn encode_history(history: &MultiSeries, config: &PipelineConfig) -> Result<EncodedPrompt> {
    let (ints, layout, vocab, context) = match &config.sax {
        None => {
            let scaled = ScaledSeries::fit(history, config.digit_budget, DEFAULT_HEADROOM)?;
            let layout = MuxLayout::new(config.mux_scheme, history.d(), config.digit_budget)?;
            let ints = scaled.ints.clone();
            (ints, layout, TokenVocabulary::digits(), EncodeContext::Digit(scaled))
        }
        Some(sax_config) => {
            let stats: Vec<NormStats> = (0..history.d())
                .map(|k| sax::norm_stats(history.column(k)))
                .collect::<Result<_>>()?;
            let words = sax::sax_encode(history, sax_config, &stats)?;
            let ints: Vec<Vec<u64>> = words
                .iter()
                .map(|w| w.symbols.iter().map(|&s| s as u64).collect())
                .collect();
            // symbols are single characters, so DI and VI coincide here
            let layout = MuxLayout::new(config.mux_scheme, history.d(), 1)?;
            let vocab = sax::vocabulary(sax_config)?;
            (
                ints,
                layout,
                vocab,
                EncodeContext::Sax {
                    stats,
                    config: *sax_config,
                },
            )
        }
    };
    let mut prompt = multiplex::mux(&ints, &layout, &vocab)?;
    prompt.push(vocab.separator());
    Ok(EncodedPrompt {
        prompt,
        layout,
        vocab,
        context,
    })
}

fn derive_constraint(
    encoded: &EncodedPrompt,
    horizon: usize,
    sax: Option<&SaxConfig>,
) -> GenerationConstraint {
    let stop_after = match sax {
        None => horizon,
        Some(config) => config.segments(horizon),
    };
    let exact = encoded.layout.stream_chars(stop_after);
    let max_chars = (exact as f64 * (1.0 + MAX_CHARS_SLACK)).ceil() as usize;
    GenerationConstraint::new(&encoded.vocab, max_chars, stop_after)
}

/// Decode one continuation into real columns, truncated to `horizon` rows.
/// Returns `None` when no complete timestamp parses.
fn decode_sample(
    continuation: &str,
    encoded: &EncodedPrompt,
    horizon: usize,
) -> Result<Option<Vec<Vec<f64>>>> {
    let (ints, _rows) = match multiplex::demux(continuation, &encoded.layout, &encoded.vocab) {
        Ok(parsed) => parsed,
        Err(Error::NoCompleteTimestamp) => return Ok(None),
        Err(e) => return Err(e),
    };
    let columns = match &encoded.context {
        EncodeContext::Digit(scaled) => {
            let mut cols = Vec::with_capacity(ints.len());
            for (k, col) in ints.iter().enumerate() {
                let mut real = scaling::invert_scale(col, &scaled.params[k])?;
                real.truncate(horizon);
                cols.push(real);
            }
            cols
        }
        EncodeContext::Sax { stats, config } => {
            let mut cols = Vec::with_capacity(ints.len());
            for (k, col) in ints.iter().enumerate() {
                let covered = (col.len() * config.segment_length).min(horizon);
                let word = SaxWord {
                    symbols: col.iter().map(|&v| v as usize).collect(),
                    stats: stats[k],
                    config: *config,
                    original_length: covered,
                };
                cols.push(sax::sax_decode(&word));
            }
            cols
        }
    };
    Ok(Some(columns))
}

/// Per-cell median over the samples covering that cell; uncovered cells
/// forward-fill the previous aggregated value, seeded from `fallback_row`
/// (the last history row). Output is column-major, `horizon` rows per
/// column. Aggregation is invariant to sample order.
pub fn aggregate_samples(
    samples: &[Vec<Vec<f64>>],
    horizon: usize,
    d: usize,
    fallback_row: &[f64],
) -> Vec<Vec<f64>> {
    let mut columns = vec![Vec::with_capacity(horizon); d];
    for t in 0..horizon {
        for (k, column) in columns.iter_mut().enumerate() {
            let cell: Vec<f64> = samples
                .iter()
                .filter_map(|s| s[k].get(t).copied())
                .collect();
            let value = if cell.is_empty() {
                column.last().copied().unwrap_or(fallback_row[k])
            } else {
                median(&cell).expect("cell is nonempty")
            };
            column.push(value);
        }
    }
    columns
}

/// Standard median; an even count averages the two central order
/// statistics.
pub fn median(values: &[f64]) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut v = values.to_vec();
    let mid = v.len() / 2;
    let (low, upper, _) = v.select_nth_unstable_by(mid, |a, b| a.total_cmp(b));
    let upper = *upper;
    if values.len() % 2 == 1 {
        Ok(upper)
    } else {
        let lower = low.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Ok((lower + upper) / 2.0)
    }
}

/// Run the full pipeline for one request.
pub fn forecast(request: &ForecastRequest, backend: &dyn TextBackend) -> Result<ForecastResult> {
    request.validate()?;
    let started = Instant::now();
    let config = &request.config;
    let horizon = request.horizon;

    let encoded = encode_history(&request.history, config)?;
    let constraint = derive_constraint(&encoded, horizon, config.sax.as_ref());
    let continuations = backend.sample_continuations(
        &encoded.prompt,
        config.num_samples,
        &constraint,
        &config.sampling,
    )?;

    let mut per_sample = Vec::with_capacity(continuations.len());
    for continuation in &continuations {
        if let Some(columns) = decode_sample(continuation, &encoded, horizon)? {
            per_sample.push(columns);
        }
    }
    if per_sample.is_empty() {
        return Err(Error::AllSamplesInvalid(config.num_samples));
    }

    let columns = aggregate_samples(
        &per_sample,
        horizon,
        request.history.d(),
        &request.history.last_row(),
    );
    let forecast = MultiSeries::from_columns(request.history.dim_names().to_vec(), columns)?;
    Ok(ForecastResult {
        forecast,
        valid_sample_count: per_sample.len(),
        per_sample,
        elapsed: started.elapsed(),
        config_fingerprint: config.fingerprint(),
    })
}

/// Forecast each dimension independently through the same pipeline (the
/// univariate `d = 1` path) and reassemble the columns. Per-sample
/// matrices are not retained; `valid_sample_count` is the minimum across
/// dimensions.
pub fn forecast_per_dimension(
    request: &ForecastRequest,
    backend: &dyn TextBackend,
) -> Result<ForecastResult> {
    request.validate()?;
    let started = Instant::now();
    let mut columns = Vec::with_capacity(request.history.d());
    let mut valid = usize::MAX;
    for k in 0..request.history.d() {
        let sub = ForecastRequest {
            history: request.history.select_dims(&[k])?,
            horizon: request.horizon,
            config: request.config.clone(),
        };
        let result = forecast(&sub, backend)?;
        valid = valid.min(result.valid_sample_count);
        columns.push(result.forecast.column(0).to_vec());
    }
    let forecast = MultiSeries::from_columns(request.history.dim_names().to_vec(), columns)?;
    Ok(ForecastResult {
        forecast,
        per_sample: Vec::new(),
        valid_sample_count: valid,
        elapsed: started.elapsed(),
        config_fingerprint: request.config.fingerprint(),
    })
}

/// Encode a known future exactly as the backend would have to produce it:
/// scaling (or SAX statistics) fitted on the history alone, then the
/// future rendered under the same layout. This is the construction input
/// for [`crate::backend::OracleBackend`].
pub fn encode_continuation(
    history: &MultiSeries,
    future: &MultiSeries,
    config: &PipelineConfig,
) -> Result<String> {
    config.validate()?;
    history.validate()?;
    future.validate()?;
    if history.d() != future.d() {
        return Err(Error::LengthMismatch {
            left: history.d(),
            right: future.d(),
        });
    }
    match &config.sax {
        None => {
            let scaled = ScaledSeries::fit(history, config.digit_budget, DEFAULT_HEADROOM)?;
            let ints: Vec<Vec<u64>> = (0..future.d())
                .map(|k| scaling::apply_scale(future.column(k), &scaled.params[k]))
                .collect();
            let layout = MuxLayout::new(config.mux_scheme, future.d(), config.digit_budget)?;
            multiplex::mux(&ints, &layout, &TokenVocabulary::digits())
        }
        Some(sax_config) => {
            let stats: Vec<NormStats> = (0..history.d())
                .map(|k| sax::norm_stats(history.column(k)))
                .collect::<Result<_>>()?;
            let words = sax::sax_encode(future, sax_config, &stats)?;
            let ints: Vec<Vec<u64>> = words
                .iter()
                .map(|w| w.symbols.iter().map(|&s| s as u64).collect())
                .collect();
            let layout = MuxLayout::new(config.mux_scheme, future.d(), 1)?;
            multiplex::mux(&ints, &layout, &sax::vocabulary(sax_config)?)
        }
    }
}
