//! Dataset ingestion, splitting, metrics, and benchmark orchestration.

use serde::Serialize;
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use crate::backend::{build_backend, BackendKind, OracleBackend, TextBackend};
use crate::baselines::{self, DEFAULT_AR_ORDER};
use crate::error::{Error, Result};
use crate::multiplex::MuxScheme;
use crate::pipeline;
use crate::sax::SaxConfig;
use crate::series::{ForecastRequest, MultiSeries, PipelineConfig};

/// A named series loaded from disk.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub name: String,
    pub series: MultiSeries,
    pub source_path: PathBuf,
}

/// Load a CSV with a header row of dimension names and one numeric row
/// per timestamp. Decimal separator is always the dot.
pub fn load_csv(path: &Path) -> Result<Dataset> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(csv_error)?;
    let dim_names: Vec<String> = reader
        .headers()
        .map_err(csv_error)?
        .iter()
        .map(str::to_string)
        .collect();
    let d = dim_names.len();

    let mut columns: Vec<Vec<f64>> = vec![Vec::new(); d];
    for (row, record) in reader.records().enumerate() {
        let record = record.map_err(csv_error)?;
        if record.len() != d {
            return Err(Error::RaggedRows {
                row,
                got: record.len(),
                expected: d,
            });
        }
        for (col, field) in record.iter().enumerate() {
            let value = f64::from_str(field).map_err(|e| Error::ParseError {
                row,
                col,
                message: format!("'{field}': {e}"),
            })?;
            columns[col].push(value);
        }
    }

    let series = MultiSeries::from_columns(dim_names, columns)?;
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "dataset".to_string());
    Ok(Dataset {
        name,
        series,
        source_path: path.to_path_buf(),
    })
}

fn csv_error(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        csv::ErrorKind::UnequalLengths { pos, expected_len, len } => Error::RaggedRows {
            row: pos.map(|p| p.record() as usize).unwrap_or(0),
            got: len as usize,
            expected: expected_len as usize,
        },
        other => Error::ParseError {
            row: 0,
            col: 0,
            message: format!("{other:?}"),
        },
    }
}

/// Write a series in the same CSV format `load_csv` reads. Values use the
/// shortest decimal rendering that reparses exactly, so a write/read
/// cycle is value-identical.
pub fn write_csv(series: &MultiSeries, path: &Path) -> Result<()> {
    let mut writer = csv::Writer::from_path(path).map_err(csv_error)?;
    writer
        .write_record(series.dim_names())
        .map_err(csv_error)?;
    for t in 0..series.n() {
        let row: Vec<String> = series.row(t).iter().map(|v| format!("{v}")).collect();
        writer.write_record(&row).map_err(csv_error)?;
    }
    writer.flush()?;
    Ok(())
}

/// Chronological split: first `n - test_len` rows become history, the
/// last `test_len` rows the held-out future.
pub fn split(series: &MultiSeries, test_len: usize) -> Result<(MultiSeries, MultiSeries)> {
    let n = series.n();
    if test_len == 0 || test_len >= n {
        return Err(Error::BadSplit { test_len, n });
    }
    let history = series.slice_rows(0, n - test_len)?;
    let future = series.slice_rows(n - test_len, n)?;
    Ok((history, future))
}

/// Default held-out length: the final fifth of the series, `ceil(0.2 n)`,
/// clamped so at least one row remains on each side.
pub fn default_test_len(n: usize) -> usize {
    n.div_ceil(5).clamp(1, n.saturating_sub(1).max(1))
}

/// Root mean squared error `sqrt(sum((y - y_hat)^2) / n)`.
pub fn rmse(actual: &[f64], predicted: &[f64]) -> Result<f64> {
    if actual.len() != predicted.len() {
        return Err(Error::LengthMismatch {
            left: actual.len(),
            right: predicted.len(),
        });
    }
    if actual.is_empty() {
        return Err(Error::EmptyInput);
    }
    let sum: f64 = actual
        .iter()
        .zip(predicted)
        .map(|(y, y_hat)| (y - y_hat).powi(2))
        .sum();
    Ok((sum / actual.len() as f64).sqrt())
}

/// A forecaster the benchmark can run.
#[derive(Debug, Clone, PartialEq)]
pub enum Method {
    Persistence,
    /// AR(p); `None` uses the configured default order.
    Ar(Option<usize>),
    /// Multiplexed pipeline; `None` uses the configured scheme.
    Llm(Option<MuxScheme>),
    /// The pipeline applied to each dimension independently.
    LlmPerDim,
    /// Pre-computed predictions loaded from a CSV, e.g. an external model.
    ExternalCsv(PathBuf),
}

impl Method {
    pub const USAGE: &'static str =
        "persistence, ar, ar:<p>, llm, llm-di, llm-vi, llm-vc, llm-uni, csv:<path>";

    pub fn parse(s: &str) -> Result<Method> {
        let lower = s.trim().to_ascii_lowercase();
        match lower.as_str() {
            "persistence" => Ok(Method::Persistence),
            "ar" => Ok(Method::Ar(None)),
            "llm" => Ok(Method::Llm(None)),
            "llm-di" => Ok(Method::Llm(Some(MuxScheme::Di))),
            "llm-vi" => Ok(Method::Llm(Some(MuxScheme::Vi))),
            "llm-vc" => Ok(Method::Llm(Some(MuxScheme::Vc))),
            "llm-uni" => Ok(Method::LlmPerDim),
            _ => {
                if let Some(order) = lower.strip_prefix("ar:") {
                    let order: usize = order.parse().map_err(|_| {
                        Error::InvalidConfig(format!("bad AR order in '{s}'"))
                    })?;
                    return Ok(Method::Ar(Some(order)));
                }
                if let Some(path) = s.trim().strip_prefix("csv:") {
                    return Ok(Method::ExternalCsv(PathBuf::from(path)));
                }
                Err(Error::InvalidConfig(format!(
                    "unknown method '{s}'; valid methods: {}",
                    Method::USAGE
                )))
            }
        }
    }

    pub fn parse_list(s: &str) -> Result<Vec<Method>> {
        let methods: Vec<Method> = s
            .split(',')
            .filter(|part| !part.trim().is_empty())
            .map(Method::parse)
            .collect::<Result<_>>()?;
        if methods.is_empty() {
            return Err(Error::InvalidConfig(format!(
                "no methods given; valid methods: {}",
                Method::USAGE
            )));
        }
        Ok(methods)
    }

    pub fn name(&self, config: &EvalConfig) -> String {
        match self {
            Method::Persistence => "persistence".into(),
            Method::Ar(order) => format!("ar({})", order.unwrap_or(config.ar_order)),
            Method::Llm(scheme) => {
                format!("llm-{}", scheme.unwrap_or(config.pipeline.mux_scheme))
            }
            Method::LlmPerDim => "llm-uni".into(),
            Method::ExternalCsv(path) => path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "external".into()),
        }
    }

    fn effective_pipeline(&self, config: &EvalConfig) -> PipelineConfig {
        let mut pipeline = config.pipeline.clone();
        if let Method::Llm(Some(scheme)) = self {
            pipeline.mux_scheme = *scheme;
        }
        pipeline
    }
}

/// Benchmark configuration.
#[derive(Debug, Clone)]
pub struct EvalConfig {
    /// Held-out rows; `None` selects `default_test_len`.
    pub test_len: Option<usize>,
    pub ar_order: usize,
    pub pipeline: PipelineConfig,
}

impl Default for EvalConfig {
    fn default() -> Self {
        EvalConfig {
            test_len: None,
            ar_order: DEFAULT_AR_ORDER,
            pipeline: PipelineConfig::default(),
        }
    }
}

/// One method's benchmark outcome.
#[derive(Debug, Clone, Serialize)]
pub struct MethodResult {
    pub name: String,
    pub per_dim_rmse: BTreeMap<String, f64>,
    pub seconds: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(skip)]
    pub forecast: Option<MultiSeries>,
}

/// Configuration summary embedded in the report.
#[derive(Debug, Clone, Serialize)]
pub struct ReportConfig {
    pub fingerprint: String,
    pub test_len: usize,
    pub mux: String,
    pub digit_budget: u32,
    pub num_samples: usize,
    pub sax: Option<SaxConfig>,
    pub backend: String,
    pub ar_order: usize,
}

/// Full benchmark report. Serializes to
/// `{dataset, config, methods: [{name, per_dim_rmse, seconds, error?}]}`;
/// raw predictions and the split stay in memory for plotting.
#[derive(Debug, Clone, Serialize)]
pub struct ForecastReport {
    pub dataset: String,
    pub config: ReportConfig,
    pub methods: Vec<MethodResult>,
    #[serde(skip)]
    pub history: MultiSeries,
    #[serde(skip)]
    pub actual: MultiSeries,
}

impl ForecastReport {
    /// Pretty-printed report JSON. `redact_timings` zeroes per-method
    /// seconds so repeated runs diff byte-identically.
    pub fn to_json(&self, redact_timings: bool) -> String {
        let mut doc = self.clone();
        if redact_timings {
            for method in &mut doc.methods {
                method.seconds = 0.0;
            }
        }
        serde_json::to_string_pretty(&doc).expect("report serializes")
    }
}

fn forecast_with_method(
    method: &Method,
    history: &MultiSeries,
    actual: &MultiSeries,
    config: &EvalConfig,
    shared_backend: Option<&dyn TextBackend>,
) -> Result<MultiSeries> {
    let horizon = actual.n();
    match method {
        Method::Persistence => {
            let columns = (0..history.d())
                .map(|k| baselines::persistence_forecast(history.column(k), horizon))
                .collect::<Result<_>>()?;
            MultiSeries::from_columns(history.dim_names().to_vec(), columns)
        }
        Method::Ar(order) => {
            let order = order.unwrap_or(config.ar_order);
            let columns = (0..history.d())
                .map(|k| {
                    let model = baselines::ar_fit(history.column(k), order)?;
                    baselines::ar_forecast(&model, history.column(k), horizon)
                })
                .collect::<Result<_>>()?;
            MultiSeries::from_columns(history.dim_names().to_vec(), columns)
        }
        Method::Llm(_) => {
            let pipeline_config = method.effective_pipeline(config);
            let request = ForecastRequest {
                history: history.clone(),
                horizon,
                config: pipeline_config.clone(),
            };
            // the oracle must replay the continuation for this exact config
            let oracle;
            let backend: &dyn TextBackend =
                if pipeline_config.backend.kind == BackendKind::Oracle {
                    oracle = OracleBackend::new(pipeline::encode_continuation(
                        history,
                        actual,
                        &pipeline_config,
                    )?);
                    &oracle
                } else {
                    shared_backend.ok_or_else(|| {
                        Error::InvalidConfig("no backend available for LLM methods".into())
                    })?
                };
            Ok(pipeline::forecast(&request, backend)?.forecast)
        }
        Method::LlmPerDim => {
            let pipeline_config = method.effective_pipeline(config);
            let request = ForecastRequest {
                history: history.clone(),
                horizon,
                config: pipeline_config.clone(),
            };
            if pipeline_config.backend.kind == BackendKind::Oracle {
                // each univariate pass needs its own single-dimension
                // continuation
                let columns = (0..history.d())
                    .map(|k| {
                        let sub_history = history.select_dims(&[k])?;
                        let sub_actual = actual.select_dims(&[k])?;
                        let oracle = OracleBackend::new(pipeline::encode_continuation(
                            &sub_history,
                            &sub_actual,
                            &pipeline_config,
                        )?);
                        let sub = ForecastRequest {
                            history: sub_history,
                            horizon,
                            config: pipeline_config.clone(),
                        };
                        Ok(pipeline::forecast(&sub, &oracle)?.forecast.column(0).to_vec())
                    })
                    .collect::<Result<_>>()?;
                MultiSeries::from_columns(history.dim_names().to_vec(), columns)
            } else {
                let backend = shared_backend.ok_or_else(|| {
                    Error::InvalidConfig("no backend available for LLM methods".into())
                })?;
                Ok(pipeline::forecast_per_dimension(&request, backend)?.forecast)
            }
        }
        Method::ExternalCsv(path) => {
            let loaded = load_csv(path)?;
            if loaded.series.n() < horizon {
                return Err(Error::TooShort {
                    needed: horizon,
                    got: loaded.series.n(),
                });
            }
            // align columns by dimension name
            let indices: Vec<usize> = history
                .dim_names()
                .iter()
                .map(|name| {
                    loaded
                        .series
                        .dim_names()
                        .iter()
                        .position(|other| other == name)
                        .ok_or_else(|| {
                            Error::InvalidConfig(format!(
                                "external forecast is missing dimension '{name}'"
                            ))
                        })
                })
                .collect::<Result<_>>()?;
            loaded.series.select_dims(&indices)?.slice_rows(0, horizon)
        }
    }
}

/// Run every method over the same split, recording per-dimension RMSE and
/// wall-clock seconds. Individual method failures are captured in the
/// report; the run continues.
pub fn run_benchmark(
    dataset: &Dataset,
    methods: &[Method],
    config: &EvalConfig,
) -> Result<ForecastReport> {
    if methods.is_empty() {
        return Err(Error::InvalidConfig("at least one method required".into()));
    }
    dataset.series.validate()?;
    let test_len = config
        .test_len
        .unwrap_or_else(|| default_test_len(dataset.series.n()));
    let (history, actual) = split(&dataset.series, test_len)?;

    let needs_shared_backend = config.pipeline.backend.kind != BackendKind::Oracle
        && methods
            .iter()
            .any(|m| matches!(m, Method::Llm(_) | Method::LlmPerDim));
    let shared_backend = if needs_shared_backend {
        Some(build_backend(&config.pipeline.backend, None)?)
    } else {
        None
    };

    let mut results = Vec::with_capacity(methods.len());
    for method in methods {
        let name = method.name(config);
        let started = Instant::now();
        let outcome = forecast_with_method(
            method,
            &history,
            &actual,
            config,
            shared_backend.as_deref(),
        );
        let seconds = started.elapsed().as_secs_f64();
        let result = match outcome {
            Ok(forecast) => {
                let mut per_dim_rmse = BTreeMap::new();
                for (k, dim) in actual.dim_names().iter().enumerate() {
                    per_dim_rmse
                        .insert(dim.clone(), rmse(actual.column(k), forecast.column(k))?);
                }
                MethodResult {
                    name,
                    per_dim_rmse,
                    seconds,
                    error: None,
                    forecast: Some(forecast),
                }
            }
            Err(e) => MethodResult {
                name,
                per_dim_rmse: BTreeMap::new(),
                seconds,
                error: Some(e.to_string()),
                forecast: None,
            },
        };
        results.push(result);
    }

    Ok(ForecastReport {
        dataset: dataset.name.clone(),
        config: ReportConfig {
            fingerprint: config.pipeline.fingerprint(),
            test_len,
            mux: config.pipeline.mux_scheme.to_string(),
            digit_budget: config.pipeline.digit_budget,
            num_samples: config.pipeline.num_samples,
            sax: config.pipeline.sax,
            backend: config.pipeline.backend.kind.to_string(),
            ar_order: config.ar_order,
        },
        methods: results,
        history,
        actual,
    })
}

/// Aligned text table with per-dimension best (`*`) and second-best (`~`)
/// annotations.
pub fn render_text_table(report: &ForecastReport) -> String {
    let dims: Vec<&String> = report.actual.dim_names().iter().collect();

    // rank methods per dimension
    let mut marks: BTreeMap<(usize, usize), char> = BTreeMap::new();
    for (j, dim) in dims.iter().enumerate() {
        let mut scored: Vec<(usize, f64)> = report
            .methods
            .iter()
            .enumerate()
            .filter_map(|(i, m)| m.per_dim_rmse.get(*dim).map(|&v| (i, v)))
            .collect();
        scored.sort_by(|a, b| a.1.total_cmp(&b.1));
        if let Some(&(best, _)) = scored.first() {
            marks.insert((best, j), '*');
        }
        if let Some(&(second, _)) = scored.get(1) {
            marks.insert((second, j), '~');
        }
    }

    let mut rows: Vec<Vec<String>> = Vec::new();
    let mut header = vec!["method".to_string()];
    header.extend(dims.iter().map(|d| d.to_string()));
    header.push("seconds".to_string());
    rows.push(header);
    for (i, method) in report.methods.iter().enumerate() {
        let mut row = vec![method.name.clone()];
        for (j, dim) in dims.iter().enumerate() {
            let cell = match method.per_dim_rmse.get(*dim) {
                Some(v) => {
                    let mark = marks.get(&(i, j)).copied().unwrap_or(' ');
                    format!("{mark}{v:.4}")
                }
                None => "failed".to_string(),
            };
            row.push(cell);
        }
        row.push(format!("{:.3}", method.seconds));
        rows.push(row);
    }

    let widths: Vec<usize> = (0..rows[0].len())
        .map(|c| rows.iter().map(|r| r[c].len()).max().unwrap_or(0))
        .collect();
    let mut out = format!(
        "dataset {}: {} dims, {} rows, test_len {}\n",
        report.dataset,
        report.actual.d(),
        report.history.n() + report.actual.n(),
        report.config.test_len
    );
    for row in &rows {
        let line: Vec<String> = row
            .iter()
            .zip(&widths)
            .map(|(cell, w)| format!("{cell:<w$}"))
            .collect();
        out.push_str(line.join("  ").trim_end());
        out.push('\n');
    }
    for method in &report.methods {
        if let Some(err) = &method.error {
            out.push_str(&format!("{}: {err}\n", method.name));
        }
    }
    out.push_str("markers: * best, ~ second best per dimension\n");
    out
}
