//! Command-line entry point: configuration layering plus the `forecast`,
//! `evaluate`, and `inspect` subcommands.
//!
//! Configuration precedence is flags > `--config` TOML file > `MUXCAST_*`
//! environment variables > built-in defaults. Exit codes: 1 usage, 2 io,
//! 3 backend, 4 data.

use clap::{Args, Parser, Subcommand};
use serde::Deserialize;
use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Duration;

use crate::backend::{build_backend, BackendKind, BackendSelector, OracleBackend};
use crate::error::{Error, Result};
use crate::eval::{self, EvalConfig, Method};
use crate::multiplex::{self, MuxLayout, MuxScheme, TokenVocabulary};
use crate::pipeline;
use crate::plot;
use crate::sax::{self, AlphabetKind, SaxConfig};
use crate::scaling::{ScaleParams, ScaledSeries, DEFAULT_HEADROOM};
use crate::series::{ForecastRequest, PipelineConfig, SamplingParams};

/// Fixed default seed so runs are reproducible unless `--seed random`
/// opts into entropy.
const DEFAULT_SEED: u64 = 42;

#[derive(Parser)]
#[command(
    name = "muxcast",
    version,
    about = "Multivariate time series forecasting through token-multiplexed text generation",
    after_help = "Configuration precedence: flags > --config file > MUXCAST_* env vars > defaults.\n\
                  Exit codes: 1 usage, 2 io, 3 backend, 4 data."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Forecast future rows of a CSV series
    Forecast(ForecastArgs),
    /// Benchmark forecasting methods on a held-out split
    Evaluate(EvaluateArgs),
    /// Print the encoded form of a series without contacting any backend
    Inspect(InspectArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// TOML configuration file merged below flags
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Multiplexing scheme: di, vi, or vc [default: di]
    #[arg(long)]
    mux: Option<String>,
    /// Digits per rendered value, 1-10 [default: 3]
    #[arg(long)]
    digits: Option<u32>,
    /// Continuations sampled per forecast [default: 5]
    #[arg(long)]
    samples: Option<usize>,
    /// Quantize with SAX instead of digit scaling [default: off]
    #[arg(long)]
    sax: bool,
    /// SAX points per segment [default: 6]
    #[arg(long)]
    segment_len: Option<usize>,
    /// SAX symbols per alphabet [default: 5]
    #[arg(long)]
    alphabet_size: Option<usize>,
    /// SAX alphabet kind: alpha or digit [default: alpha]
    #[arg(long)]
    alphabet: Option<String>,
    /// Backend kind: http, mock, or oracle [default: mock]
    #[arg(long)]
    backend: Option<String>,
    /// Completion endpoint URL (required with --backend http)
    #[arg(long)]
    endpoint: Option<String>,
    /// Model identifier forwarded to the endpoint
    #[arg(long)]
    model: Option<String>,
    /// Per-request timeout in seconds [default: 30]
    #[arg(long)]
    timeout_secs: Option<f64>,
    /// Sampling temperature [default: 0.7]
    #[arg(long)]
    temperature: Option<f64>,
    /// Nucleus sampling mass in (0, 1] [default: 0.9]
    #[arg(long)]
    top_p: Option<f64>,
    /// Retries for vocabulary enforcement and transient failures [default: 2]
    #[arg(long)]
    max_retry: Option<u32>,
    /// Integer seed, or 'random' for entropy [default: 42]
    #[arg(long)]
    seed: Option<String>,
    /// Environment variable holding the bearer token for http auth
    #[arg(long)]
    auth_token_env: Option<String>,
}

#[derive(Args)]
struct ForecastArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Input CSV: header of dimension names, one numeric row per timestamp
    #[arg(long)]
    input: PathBuf,
    /// Timestamps to predict
    #[arg(long)]
    horizon: usize,
    /// Output CSV path (same header as the input, horizon rows)
    #[arg(long)]
    output: PathBuf,
    /// CSV holding the true future; required with --backend oracle
    #[arg(long)]
    oracle_file: Option<PathBuf>,
}

#[derive(Args)]
struct EvaluateArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Input CSV
    #[arg(long)]
    input: PathBuf,
    /// Held-out rows [default: ceil(0.2 * n)]
    #[arg(long)]
    test_len: Option<usize>,
    /// Comma-separated methods [default: persistence,ar,llm]
    #[arg(long)]
    methods: Option<String>,
    /// Order of the AR baseline [default: 5]
    #[arg(long)]
    ar_order: Option<usize>,
    /// Report JSON path [default: report.json]
    #[arg(long)]
    report_json: Option<PathBuf>,
    /// Report text table path [default: report.txt]
    #[arg(long)]
    report_table: Option<PathBuf>,
    /// Directory for per-dimension SVG charts (created if absent)
    #[arg(long)]
    plots: Option<PathBuf>,
    /// Zero per-method seconds in the JSON so repeated runs are
    /// byte-identical
    #[arg(long)]
    redact_timings: bool,
}

#[derive(Args)]
struct InspectArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Input CSV
    #[arg(long)]
    input: PathBuf,
    /// Inspect only the first N rows [default: all]
    #[arg(long)]
    limit: Option<usize>,
    /// Fixed scaling offset applied to every dimension (with --factor);
    /// bypasses range fitting, e.g. for reproducing worked encodings
    #[arg(long, requires = "factor")]
    offset: Option<f64>,
    /// Fixed scaling factor applied to every dimension (with --offset)
    #[arg(long, requires = "offset")]
    factor: Option<f64>,
}

/// One source of configuration values; `None` falls through to the next
/// layer.
#[derive(Debug, Default, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct Layer {
    mux: Option<String>,
    digits: Option<u32>,
    samples: Option<usize>,
    sax: Option<bool>,
    segment_len: Option<usize>,
    alphabet_size: Option<usize>,
    alphabet: Option<String>,
    backend: Option<String>,
    endpoint: Option<String>,
    model: Option<String>,
    timeout_secs: Option<f64>,
    temperature: Option<f64>,
    top_p: Option<f64>,
    max_retry: Option<u32>,
    seed: Option<String>,
    auth_token_env: Option<String>,
    test_len: Option<usize>,
    methods: Option<String>,
    ar_order: Option<usize>,
}

impl Layer {
    fn from_flags(args: &CommonArgs) -> Layer {
        Layer {
            mux: args.mux.clone(),
            digits: args.digits,
            samples: args.samples,
            sax: args.sax.then_some(true),
            segment_len: args.segment_len,
            alphabet_size: args.alphabet_size,
            alphabet: args.alphabet.clone(),
            backend: args.backend.clone(),
            endpoint: args.endpoint.clone(),
            model: args.model.clone(),
            timeout_secs: args.timeout_secs,
            temperature: args.temperature,
            top_p: args.top_p,
            max_retry: args.max_retry,
            seed: args.seed.clone(),
            auth_token_env: args.auth_token_env.clone(),
            test_len: None,
            methods: None,
            ar_order: None,
        }
    }

    fn from_file(path: &Path) -> Result<Layer> {
        let text = std::fs::read_to_string(path)?;
        toml::from_str(&text)
            .map_err(|e| Error::InvalidConfig(format!("config file {}: {e}", path.display())))
    }

    fn from_env() -> Result<Layer> {
        fn var(name: &str) -> Option<String> {
            std::env::var(format!("MUXCAST_{name}")).ok()
        }
        fn parsed<T: FromStr>(name: &str) -> Result<Option<T>> {
            match var(name) {
                None => Ok(None),
                Some(raw) => raw.parse::<T>().map(Some).map_err(|_| {
                    Error::InvalidConfig(format!("MUXCAST_{name}: cannot parse '{raw}'"))
                }),
            }
        }
        Ok(Layer {
            mux: var("MUX"),
            digits: parsed("DIGITS")?,
            samples: parsed("SAMPLES")?,
            sax: parsed("SAX")?,
            segment_len: parsed("SEGMENT_LEN")?,
            alphabet_size: parsed("ALPHABET_SIZE")?,
            alphabet: var("ALPHABET"),
            backend: var("BACKEND"),
            endpoint: var("ENDPOINT"),
            model: var("MODEL"),
            timeout_secs: parsed("TIMEOUT_SECS")?,
            temperature: parsed("TEMPERATURE")?,
            top_p: parsed("TOP_P")?,
            max_retry: parsed("MAX_RETRY")?,
            seed: var("SEED"),
            auth_token_env: var("AUTH_TOKEN_ENV"),
            test_len: parsed("TEST_LEN")?,
            methods: var("METHODS"),
            ar_order: parsed("AR_ORDER")?,
        })
    }

    /// Field-wise overlay; `self` wins.
    fn over(self, lower: Layer) -> Layer {
        Layer {
            mux: self.mux.or(lower.mux),
            digits: self.digits.or(lower.digits),
            samples: self.samples.or(lower.samples),
            sax: self.sax.or(lower.sax),
            segment_len: self.segment_len.or(lower.segment_len),
            alphabet_size: self.alphabet_size.or(lower.alphabet_size),
            alphabet: self.alphabet.or(lower.alphabet),
            backend: self.backend.or(lower.backend),
            endpoint: self.endpoint.or(lower.endpoint),
            model: self.model.or(lower.model),
            timeout_secs: self.timeout_secs.or(lower.timeout_secs),
            temperature: self.temperature.or(lower.temperature),
            top_p: self.top_p.or(lower.top_p),
            max_retry: self.max_retry.or(lower.max_retry),
            seed: self.seed.or(lower.seed),
            auth_token_env: self.auth_token_env.or(lower.auth_token_env),
            test_len: self.test_len.or(lower.test_len),
            methods: self.methods.or(lower.methods),
            ar_order: self.ar_order.or(lower.ar_order),
        }
    }
}

/// Fully resolved configuration.
struct Resolved {
    pipeline: PipelineConfig,
    sax_enabled: bool,
    test_len: Option<usize>,
    methods: String,
    ar_order: usize,
}

fn resolve(common: &CommonArgs) -> Result<Resolved> {
    let mut layer = Layer::from_flags(common);
    if let Some(path) = &common.config {
        layer = layer.over(Layer::from_file(path)?);
    }
    layer = layer.over(Layer::from_env()?);

    let mux_scheme = match layer.mux.as_deref() {
        Some(raw) => raw.parse::<MuxScheme>()?,
        None => MuxScheme::Di,
    };
    let alphabet_kind = match layer.alphabet.as_deref() {
        Some(raw) => raw.parse::<AlphabetKind>()?,
        None => AlphabetKind::Alphabetical,
    };
    let sax_config = SaxConfig {
        segment_length: layer.segment_len.unwrap_or(6),
        alphabet_size: layer.alphabet_size.unwrap_or(5),
        alphabet_kind,
    };
    // reject incoherent SAX settings even when quantization is off
    sax_config.validate()?;
    let sax_enabled = layer.sax.unwrap_or(false);

    let backend_kind = match layer.backend.as_deref() {
        Some(raw) => raw.parse::<BackendKind>()?,
        None => BackendKind::Mock,
    };
    let seed = match layer.seed.as_deref() {
        None => DEFAULT_SEED,
        Some("random") => rand::random(),
        Some(raw) => raw
            .parse::<u64>()
            .map_err(|_| Error::InvalidConfig(format!("seed must be an integer or 'random', got '{raw}'")))?,
    };
    let timeout_secs = layer.timeout_secs.unwrap_or(30.0);
    if !(timeout_secs > 0.0 && timeout_secs.is_finite()) {
        return Err(Error::InvalidConfig(format!(
            "timeout must be a positive number of seconds, got {timeout_secs}"
        )));
    }

    let pipeline = PipelineConfig {
        mux_scheme,
        digit_budget: layer.digits.unwrap_or(3),
        num_samples: layer.samples.unwrap_or(5),
        sax: sax_enabled.then_some(sax_config),
        sampling: SamplingParams {
            temperature: layer.temperature.unwrap_or(0.7),
            nucleus_mass: layer.top_p.unwrap_or(0.9),
            max_retry: layer.max_retry.unwrap_or(2),
            seed: Some(seed),
        },
        backend: BackendSelector {
            kind: backend_kind,
            endpoint: layer.endpoint,
            model_id: layer.model,
            timeout: Duration::from_secs_f64(timeout_secs),
            auth_token_env: layer.auth_token_env,
        },
    };
    pipeline.validate()?;

    Ok(Resolved {
        pipeline,
        sax_enabled,
        test_len: layer.test_len,
        methods: layer
            .methods
            .unwrap_or_else(|| "persistence,ar,llm".to_string()),
        ar_order: layer.ar_order.unwrap_or(crate::baselines::DEFAULT_AR_ORDER),
    })
}

/// Parse `args` and run; returns the process exit code.
pub fn run_from<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    let outcome = match cli.command {
        Command::Forecast(args) => cmd_forecast(args),
        Command::Evaluate(args) => cmd_evaluate(args),
        Command::Inspect(args) => cmd_inspect(args),
    };
    match outcome {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

/// Run with the process arguments.
pub fn run() -> i32 {
    run_from(std::env::args_os())
}

fn cmd_forecast(args: ForecastArgs) -> Result<()> {
    let resolved = resolve(&args.common)?;
    if args.horizon == 0 {
        return Err(Error::InvalidConfig("horizon must be at least 1".into()));
    }
    let dataset = eval::load_csv(&args.input)?;

    let backend = match resolved.pipeline.backend.kind {
        BackendKind::Oracle => {
            let oracle_path = args.oracle_file.as_ref().ok_or_else(|| {
                Error::InvalidConfig(
                    "--backend oracle requires --oracle-file with the true future".into(),
                )
            })?;
            let future = eval::load_csv(oracle_path)?.series;
            if future.n() < args.horizon {
                return Err(Error::TooShort {
                    needed: args.horizon,
                    got: future.n(),
                });
            }
            let future = future.slice_rows(0, args.horizon)?;
            let continuation =
                pipeline::encode_continuation(&dataset.series, &future, &resolved.pipeline)?;
            Box::new(OracleBackend::new(continuation)) as Box<dyn crate::backend::TextBackend>
        }
        _ => build_backend(&resolved.pipeline.backend, None)?,
    };

    let request = ForecastRequest {
        history: dataset.series,
        horizon: args.horizon,
        config: resolved.pipeline,
    };
    let result = pipeline::forecast(&request, backend.as_ref())?;
    eval::write_csv(&result.forecast, &args.output)?;

    println!(
        "wrote {}: {} rows x {} dims ({} of {} samples valid, {:.3}s, config {})",
        args.output.display(),
        result.forecast.n(),
        result.forecast.d(),
        result.valid_sample_count,
        request.config.num_samples,
        result.elapsed.as_secs_f64(),
        &result.config_fingerprint[..12],
    );
    for (k, name) in result.forecast.dim_names().iter().enumerate() {
        let col = result.forecast.column(k);
        let mean = col.iter().sum::<f64>() / col.len() as f64;
        println!(
            "{name}: first {:.6}, last {:.6}, mean {:.6}",
            col[0],
            col[col.len() - 1],
            mean
        );
    }
    Ok(())
}

fn cmd_evaluate(args: EvaluateArgs) -> Result<()> {
    let mut resolved = resolve(&args.common)?;
    if let Some(test_len) = args.test_len {
        resolved.test_len = Some(test_len);
    }
    let methods = Method::parse_list(args.methods.as_deref().unwrap_or(&resolved.methods))?;
    let dataset = eval::load_csv(&args.input)?;
    let config = EvalConfig {
        test_len: resolved.test_len,
        ar_order: args.ar_order.unwrap_or(resolved.ar_order),
        pipeline: resolved.pipeline,
    };

    let report = eval::run_benchmark(&dataset, &methods, &config)?;

    let table = eval::render_text_table(&report);
    print!("{table}");
    let table_path = args
        .report_table
        .unwrap_or_else(|| PathBuf::from("report.txt"));
    std::fs::write(&table_path, &table)?;
    let json_path = args
        .report_json
        .unwrap_or_else(|| PathBuf::from("report.json"));
    std::fs::write(&json_path, report.to_json(args.redact_timings))?;
    println!("wrote {} and {}", json_path.display(), table_path.display());

    if let Some(dir) = args.plots {
        std::fs::create_dir_all(&dir)?;
        for (k, dim) in report.actual.dim_names().iter().enumerate() {
            // chart the per-dimension best method
            let best = report
                .methods
                .iter()
                .filter(|m| m.forecast.is_some())
                .min_by(|a, b| {
                    let ra = a.per_dim_rmse.get(dim).copied().unwrap_or(f64::INFINITY);
                    let rb = b.per_dim_rmse.get(dim).copied().unwrap_or(f64::INFINITY);
                    ra.total_cmp(&rb)
                });
            let Some(best) = best else {
                eprintln!("no successful method to plot for {dim}");
                continue;
            };
            let forecast = best.forecast.as_ref().expect("filtered on presence");
            let safe: String = dim
                .chars()
                .map(|c| if c.is_ascii_alphanumeric() { c } else { '_' })
                .collect();
            let path = dir.join(format!("{safe}.svg"));
            plot::emit_plot(
                report.history.column(k),
                report.actual.column(k),
                forecast.column(k),
                &best.name,
                dim,
                &path,
            )?;
            println!("wrote {}", path.display());
        }
    }
    Ok(())
}

fn cmd_inspect(args: InspectArgs) -> Result<()> {
    let resolved = resolve(&args.common)?;
    if args.limit == Some(0) {
        return Err(Error::InvalidConfig("--limit must be at least 1".into()));
    }
    let dataset = eval::load_csv(&args.input)?;
    let shown = args.limit.map_or(dataset.series.n(), |l| l.min(dataset.series.n()));
    let series = dataset.series.slice_rows(0, shown)?;

    println!(
        "input {}: {} rows x {} dims (showing {shown})",
        args.input.display(),
        dataset.series.n(),
        dataset.series.d()
    );

    if resolved.sax_enabled {
        let config = resolved.pipeline.sax.expect("sax enabled");
        let mut symbol_columns = Vec::with_capacity(series.d());
        for (k, name) in series.dim_names().iter().enumerate() {
            let stats = sax::norm_stats(series.column(k))?;
            let word = sax::sax_encode_column(series.column(k), &config, stats)?;
            println!(
                "{name}: mean {:.6}, std {:.6}, sax word (w={}, a={}, {}): {}",
                stats.mean,
                stats.std,
                config.segment_length,
                config.alphabet_size,
                config.alphabet_kind,
                sax::render_symbols(&word)?
            );
            symbol_columns.push(word.symbols.iter().map(|&s| s as u64).collect::<Vec<u64>>());
        }
        let layout = MuxLayout::new(resolved.pipeline.mux_scheme, series.d(), 1)?;
        let stream = multiplex::mux(&symbol_columns, &layout, &sax::vocabulary(&config)?)?;
        println!("multiplexed ({}, b=1): {stream}", resolved.pipeline.mux_scheme);
    } else {
        let budget = resolved.pipeline.digit_budget;
        let scaled = match (args.offset, args.factor) {
            (Some(offset), Some(factor)) => {
                if !(factor > 0.0 && factor.is_finite()) {
                    return Err(Error::InvalidConfig(format!(
                        "--factor must be positive, got {factor}"
                    )));
                }
                let params = ScaleParams::new(offset, factor, budget);
                ScaledSeries {
                    ints: series
                        .columns()
                        .iter()
                        .map(|col| crate::scaling::apply_scale(col, &params))
                        .collect(),
                    params: vec![params; series.d()],
                }
            }
            _ => ScaledSeries::fit(&series, budget, DEFAULT_HEADROOM)?,
        };
        for (k, name) in series.dim_names().iter().enumerate() {
            println!(
                "{name}: offset {:.6}, factor {:.6}",
                scaled.params[k].offset, scaled.params[k].factor
            );
        }
        println!("scaled integers:");
        for t in 0..series.n() {
            let row: Vec<String> = scaled
                .ints
                .iter()
                .map(|col| format!("{:0width$}", col[t], width = budget as usize))
                .collect();
            println!("  t{t}: {}", row.join(" "));
        }
        let layout = MuxLayout::new(resolved.pipeline.mux_scheme, series.d(), budget)?;
        let stream = multiplex::mux(&scaled.ints, &layout, &TokenVocabulary::digits())?;
        println!(
            "multiplexed ({}, b={budget}): {stream}",
            resolved.pipeline.mux_scheme
        );
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn layer_precedence_flags_over_file_over_env() {
        let flags = Layer {
            digits: Some(4),
            ..Layer::default()
        };
        let file = Layer {
            digits: Some(5),
            samples: Some(9),
            ..Layer::default()
        };
        let env = Layer {
            digits: Some(6),
            samples: Some(2),
            mux: Some("vc".into()),
            ..Layer::default()
        };
        let merged = flags.over(file).over(env);
        assert_eq!(merged.digits, Some(4));
        assert_eq!(merged.samples, Some(9));
        assert_eq!(merged.mux.as_deref(), Some("vc"));
    }

    #[test]
    fn config_file_rejects_unknown_keys() {
        let err = toml::from_str::<Layer>("diggits = 3").unwrap_err();
        assert!(err.to_string().contains("diggits"));
    }

    #[test]
    fn config_file_parses_known_keys() {
        let layer: Layer =
            toml::from_str("mux = \"vi\"\nsamples = 10\nsax = true\nseed = \"7\"").unwrap();
        assert_eq!(layer.mux.as_deref(), Some("vi"));
        assert_eq!(layer.samples, Some(10));
        assert_eq!(layer.sax, Some(true));
        assert_eq!(layer.seed.as_deref(), Some("7"));
    }
}
