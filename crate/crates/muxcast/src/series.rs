//! Shared series, configuration, and request types.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::backend::BackendSelector;
use crate::error::{Error, Result};
use crate::multiplex::MuxScheme;
use crate::sax::SaxConfig;

/// A multivariate series: `n` timestamps by `d` named dimensions.
///
/// Values are stored per dimension. Timestamps are implicit row indices;
/// every encoding in this crate is position-based, so no time axis is kept.
/// Instances are validated at construction and immutable afterwards.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultiSeries {
    dim_names: Vec<String>,
    columns: Vec<Vec<f64>>,
}

impl MultiSeries {
    /// Build from per-dimension columns of equal length.
    pub fn from_columns(dim_names: Vec<String>, columns: Vec<Vec<f64>>) -> Result<Self> {
        let series = MultiSeries { dim_names, columns };
        series.validate()?;
        Ok(series)
    }

    /// Build from row-major data (one inner vector per timestamp).
    pub fn from_rows(dim_names: Vec<String>, rows: &[Vec<f64>]) -> Result<Self> {
        let d = dim_names.len();
        let mut columns = vec![Vec::with_capacity(rows.len()); d];
        for (r, row) in rows.iter().enumerate() {
            if row.len() != d {
                return Err(Error::RaggedRows {
                    row: r,
                    got: row.len(),
                    expected: d,
                });
            }
            for (k, &v) in row.iter().enumerate() {
                columns[k].push(v);
            }
        }
        Self::from_columns(dim_names, columns)
    }

    /// Number of timestamps.
    pub fn n(&self) -> usize {
        self.columns.first().map_or(0, Vec::len)
    }

    /// Number of dimensions.
    pub fn d(&self) -> usize {
        self.columns.len()
    }

    pub fn dim_names(&self) -> &[String] {
        &self.dim_names
    }

    pub fn column(&self, k: usize) -> &[f64] {
        &self.columns[k]
    }

    pub fn columns(&self) -> &[Vec<f64>] {
        &self.columns
    }

    /// Values of one timestamp across all dimensions.
    pub fn row(&self, t: usize) -> Vec<f64> {
        self.columns.iter().map(|c| c[t]).collect()
    }

    pub fn last_row(&self) -> Vec<f64> {
        self.row(self.n() - 1)
    }

    /// Checks every invariant: nonempty, rectangular, finite, unique names.
    pub fn validate(&self) -> Result<()> {
        if self.columns.is_empty() {
            return Err(Error::EmptySeries);
        }
        if self.dim_names.len() != self.columns.len() {
            return Err(Error::LengthMismatch {
                left: self.dim_names.len(),
                right: self.columns.len(),
            });
        }
        let n = self.columns[0].len();
        if n == 0 {
            return Err(Error::EmptySeries);
        }
        for (k, col) in self.columns.iter().enumerate() {
            if col.len() != n {
                return Err(Error::LengthMismatch {
                    left: col.len(),
                    right: n,
                });
            }
            for (t, &v) in col.iter().enumerate() {
                if !v.is_finite() {
                    return Err(Error::NonFinite {
                        value: v,
                        row: t,
                        col: k,
                    });
                }
            }
        }
        for (i, name) in self.dim_names.iter().enumerate() {
            if self.dim_names[..i].contains(name) {
                return Err(Error::DuplicateDimName(name.clone()));
            }
        }
        Ok(())
    }

    /// New series keeping only the given dimensions, in the given order.
    pub fn select_dims(&self, dims: &[usize]) -> Result<Self> {
        let names = dims.iter().map(|&k| self.dim_names[k].clone()).collect();
        let cols = dims.iter().map(|&k| self.columns[k].clone()).collect();
        Self::from_columns(names, cols)
    }

    /// New series keeping only rows `[start, end)`.
    pub fn slice_rows(&self, start: usize, end: usize) -> Result<Self> {
        let cols = self
            .columns
            .iter()
            .map(|c| c[start..end].to_vec())
            .collect();
        Self::from_columns(self.dim_names.clone(), cols)
    }
}

/// One forecasting task: history, horizon, and pipeline configuration.
#[derive(Debug, Clone)]
pub struct ForecastRequest {
    pub history: MultiSeries,
    /// Timestamps to predict.
    pub horizon: usize,
    pub config: PipelineConfig,
}

impl ForecastRequest {
    pub fn validate(&self) -> Result<()> {
        self.history.validate()?;
        if self.horizon == 0 {
            return Err(Error::InvalidConfig("horizon must be at least 1".into()));
        }
        self.config.validate()
    }
}

/// End-to-end pipeline configuration.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub mux_scheme: MuxScheme,
    /// Digits per rendered value, in [1, 10].
    pub digit_budget: u32,
    /// Continuations sampled per forecast.
    pub num_samples: usize,
    /// When set, values are SAX-quantized instead of digit-scaled.
    pub sax: Option<SaxConfig>,
    pub sampling: SamplingParams,
    pub backend: BackendSelector,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            mux_scheme: MuxScheme::Di,
            digit_budget: 3,
            num_samples: 5,
            sax: None,
            sampling: SamplingParams::default(),
            backend: BackendSelector::default(),
        }
    }
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<()> {
        if !(1..=10).contains(&self.digit_budget) {
            return Err(Error::InvalidConfig(format!(
                "digit budget must be in [1, 10], got {}",
                self.digit_budget
            )));
        }
        if self.num_samples == 0 {
            return Err(Error::InvalidConfig("num_samples must be at least 1".into()));
        }
        if let Some(sax) = &self.sax {
            sax.validate()?;
        }
        self.sampling.validate()?;
        self.backend.validate()
    }

    /// Stable hex digest of the full configuration; identical configs
    /// fingerprint identically across runs and platforms.
    pub fn fingerprint(&self) -> String {
        let canonical = serde_json::to_string(self).expect("config serializes");
        let digest = Sha256::digest(canonical.as_bytes());
        let mut out = String::with_capacity(64);
        for byte in digest {
            out.push_str(&format!("{byte:02x}"));
        }
        out
    }
}

/// Generation parameters forwarded to the text backend.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SamplingParams {
    pub temperature: f64,
    /// Top-p nucleus mass in (0, 1].
    pub nucleus_mass: f64,
    /// Resampling budget for vocabulary enforcement and transient failures.
    pub max_retry: u32,
    pub seed: Option<u64>,
}

impl Default for SamplingParams {
    fn default() -> Self {
        SamplingParams {
            temperature: 0.7,
            nucleus_mass: 0.9,
            max_retry: 2,
            seed: None,
        }
    }
}

impl SamplingParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.temperature > 0.0 && self.temperature.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "temperature must be positive, got {}",
                self.temperature
            )));
        }
        if !(self.nucleus_mass > 0.0 && self.nucleus_mass <= 1.0) {
            return Err(Error::InvalidConfig(format!(
                "nucleus mass must be in (0, 1], got {}",
                self.nucleus_mass
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names(names: &[&str]) -> Vec<String> {
        names.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn accepts_valid_two_by_two() {
        let s = MultiSeries::from_columns(
            names(&["d1", "d2"]),
            vec![vec![1.7, 2.6], vec![2.3, 3.1]],
        )
        .unwrap();
        assert_eq!(s.n(), 2);
        assert_eq!(s.d(), 2);
        assert_eq!(s.row(0), vec![1.7, 2.3]);
    }

    #[test]
    fn rejects_zero_rows() {
        let err = MultiSeries::from_columns(names(&["a"]), vec![vec![]]).unwrap_err();
        assert!(matches!(err, Error::EmptySeries));
    }

    #[test]
    fn rejects_zero_dims() {
        let err = MultiSeries::from_columns(vec![], vec![]).unwrap_err();
        assert!(matches!(err, Error::EmptySeries));
    }

    #[test]
    fn rejects_nan_with_position() {
        let mut cols = vec![vec![0.0; 5], vec![0.0; 5]];
        cols[1][3] = f64::NAN;
        let err = MultiSeries::from_columns(names(&["a", "b"]), cols).unwrap_err();
        match err {
            Error::NonFinite { row, col, .. } => {
                assert_eq!((row, col), (3, 1));
            }
            other => panic!("expected NonFinite, got {other:?}"),
        }
    }

    #[test]
    fn rejects_duplicate_dim_names() {
        let err = MultiSeries::from_columns(
            names(&["x", "x"]),
            vec![vec![1.0], vec![2.0]],
        )
        .unwrap_err();
        assert!(matches!(err, Error::DuplicateDimName(_)));
    }

    #[test]
    fn rejects_ragged_rows() {
        let err =
            MultiSeries::from_rows(names(&["a", "b"]), &[vec![1.0, 2.0], vec![3.0]]).unwrap_err();
        assert!(matches!(err, Error::RaggedRows { row: 1, .. }));
    }

    #[test]
    fn column_slice_revalidates() {
        let s = MultiSeries::from_columns(
            names(&["a", "b", "c"]),
            vec![vec![1.0, 2.0], vec![3.0, 4.0], vec![5.0, 6.0]],
        )
        .unwrap();
        let sliced = s.select_dims(&[2, 0]).unwrap();
        assert!(sliced.validate().is_ok());
        assert_eq!(sliced.dim_names(), &["c".to_string(), "a".to_string()]);
        assert_eq!(sliced.column(0), &[5.0, 6.0]);
    }

    #[test]
    fn horizon_zero_is_rejected() {
        let req = ForecastRequest {
            history: MultiSeries::from_columns(names(&["a"]), vec![vec![1.0, 2.0]]).unwrap(),
            horizon: 0,
            config: PipelineConfig::default(),
        };
        assert!(matches!(req.validate(), Err(Error::InvalidConfig(_))));
    }

    #[test]
    fn default_config_validates_and_fingerprints_stably() {
        let config = PipelineConfig::default();
        config.validate().unwrap();
        assert_eq!(config.num_samples, 5);
        assert_eq!(config.fingerprint(), config.fingerprint());
        assert_eq!(config.fingerprint().len(), 64);

        let mut other = config.clone();
        other.digit_budget = 4;
        assert_ne!(config.fingerprint(), other.fingerprint());
    }

    #[test]
    fn digit_budget_range_is_enforced() {
        for budget in [0, 11] {
            let config = PipelineConfig {
                digit_budget: budget,
                ..PipelineConfig::default()
            };
            assert!(config.validate().is_err());
        }
    }
}
