//! Error-floor measurement: a backend that replays the true future shows
//! how much error the scaling quantization itself introduces.
//!
//! Run with: cargo run -p muxcast --example oracle_roundtrip

use muxcast::backend::OracleBackend;
use muxcast::pipeline::encode_continuation;
use muxcast::scaling::{ScaledSeries, DEFAULT_HEADROOM};
use muxcast::{forecast, ForecastRequest, MultiSeries, MuxScheme, PipelineConfig};

fn main() -> muxcast::Result<()> {
    // integer-period sinusoids; the future stays inside the fitted range
    let n = 120;
    let columns: Vec<Vec<f64>> = (0..2)
        .map(|k| {
            (0..n)
                .map(|t| {
                    12.0 + 6.0 * k as f64
                        + 2.5 * (2.0 * std::f64::consts::PI * ((t + 3 * k) % 13) as f64 / 13.0).sin()
                })
                .collect()
        })
        .collect();
    let series = MultiSeries::from_columns(vec!["co2_in".into(), "co2_out".into()], columns)?;
    let history = series.slice_rows(0, 96)?;
    let future = series.slice_rows(96, 120)?;

    for digit_budget in [2, 3, 4] {
        let config = PipelineConfig {
            mux_scheme: MuxScheme::Di,
            digit_budget,
            num_samples: 3,
            ..PipelineConfig::default()
        };

        // the continuation a perfect generator would emit
        let continuation = encode_continuation(&history, &future, &config)?;
        let oracle = OracleBackend::new(continuation);

        let request = ForecastRequest {
            history: history.clone(),
            horizon: 24,
            config,
        };
        let result = forecast(&request, &oracle)?;

        let scaled = ScaledSeries::fit(&history, digit_budget, DEFAULT_HEADROOM)?;
        for k in 0..2 {
            let bound = 0.5 / scaled.params[k].factor;
            let worst = result
                .forecast
                .column(k)
                .iter()
                .zip(future.column(k))
                .map(|(p, a)| (p - a).abs())
                .fold(0.0f64, f64::max);
            println!(
                "b={digit_budget} {:8}: max error {worst:.6} (quantization bound {bound:.6})",
                history.dim_names()[k]
            );
            assert!(worst <= bound + 1e-9);
        }
    }
    println!("\nevery forecast sits within half a quantization step of the truth");
    Ok(())
}
