//! Multivariate time series forecasting through constrained text
//! generation.
//!
//! A series is rescaled (or SAX-quantized) per dimension, folded into a
//! single token stream by one of three multiplexing schemes, continued
//! by a pluggable text-generation backend under a digits-and-commas
//! vocabulary constraint, and decoded back into a multivariate forecast
//! by median aggregation over sampled continuations. Classical baselines
//! and a benchmark harness ship alongside.
//!
//! ## Examples
//!
//! Each major capability has a runnable example:
//!
//! - **`encode_decode`** - scaling and the three multiplexing schemes,
//!   including decoding of truncated continuations
//! - **`sax_quantization`** - PAA segmentation, symbol alphabets, and the
//!   token-count reduction
//! - **`forecast_mock`** - an end-to-end forecast with the deterministic
//!   offline backend
//! - **`oracle_roundtrip`** - error-floor measurement with a backend that
//!   replays the true future
//! - **`baselines`** - persistence and AR(p) reference forecasters
//! - **`benchmark`** - the evaluation harness: reports, tables, and SVG
//!   charts
//! - **`http_backend`** - the completion-endpoint wire format, exercised
//!   against a local stub server
//!
//! ```bash
//! cargo run -p muxcast --example forecast_mock
//! cargo run -p muxcast --example benchmark
//! ```
//!
//! The `muxcast` binary wraps the same pieces behind `forecast`,
//! `evaluate`, and `inspect` subcommands; see the README.

pub mod backend;
pub mod baselines;
pub mod cli;
mod error;
pub mod eval;
pub mod multiplex;
pub mod pipeline;
pub mod plot;
pub mod sax;
pub mod scaling;
pub mod series;

pub use error::{Error, Result};
pub use multiplex::MuxScheme;
pub use pipeline::{forecast, ForecastResult};
pub use series::{ForecastRequest, MultiSeries, PipelineConfig, SamplingParams};
