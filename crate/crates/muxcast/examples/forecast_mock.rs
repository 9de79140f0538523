//! An end-to-end forecast with the deterministic offline backend.
//!
//! Run with: cargo run -p muxcast --example forecast_mock

use muxcast::backend::MockBackend;
use muxcast::{forecast, ForecastRequest, MultiSeries, MuxScheme, PipelineConfig};

fn main() -> muxcast::Result<()> {
    // two correlated periodic dimensions, 96 observed timestamps
    let n = 96;
    let flow: Vec<f64> = (0..n)
        .map(|t| 10.0 + 2.0 * (2.0 * std::f64::consts::PI * (t % 12) as f64 / 12.0).sin())
        .collect();
    let level: Vec<f64> = flow.iter().map(|v| 40.0 + 3.0 * (v - 10.0)).collect();
    let history = MultiSeries::from_columns(
        vec!["flow".into(), "level".into()],
        vec![flow, level],
    )?;

    let request = ForecastRequest {
        history,
        horizon: 12,
        config: PipelineConfig {
            mux_scheme: MuxScheme::Vi,
            digit_budget: 3,
            num_samples: 5,
            ..PipelineConfig::default()
        },
    };

    let backend = MockBackend::new();
    let result = forecast(&request, &backend)?;

    println!(
        "forecast of {} timestamps from {} samples ({} valid) in {:?}",
        result.forecast.n(),
        request.config.num_samples,
        result.valid_sample_count,
        result.elapsed
    );
    println!("config fingerprint: {}\n", &result.config_fingerprint[..16]);

    println!("t     flow     level");
    for t in 0..result.forecast.n() {
        let row = result.forecast.row(t);
        println!("{t:<4}  {:<7.3}  {:<7.3}", row[0], row[1]);
    }

    // the mock copies repeated patterns, so a periodic history continues
    // its period; rerunning produces bit-identical output
    let again = forecast(&request, &backend)?;
    assert_eq!(again.forecast, result.forecast);
    println!("\nrerun is bit-identical: true");
    Ok(())
}
