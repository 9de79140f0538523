//! The evaluation harness: run several methods over one split, then emit
//! the JSON report, the text table, and an SVG chart.
//!
//! Run with: cargo run -p muxcast --example benchmark

use std::path::PathBuf;

use muxcast::eval::{render_text_table, run_benchmark, Dataset, EvalConfig, Method};
use muxcast::plot::emit_plot;
use muxcast::{MultiSeries, PipelineConfig};

fn main() -> muxcast::Result<()> {
    // a 2x296 series shaped like a gas-furnace run
    let n = 296;
    let columns: Vec<Vec<f64>> = (0..2)
        .map(|k| {
            (0..n)
                .map(|t| {
                    let base = if k == 0 { 2.0 } else { 53.0 };
                    let swing = if k == 0 { 0.8 } else { 4.0 };
                    base + swing * (2.0 * std::f64::consts::PI * ((t + 5 * k) % 14) as f64 / 14.0).sin()
                })
                .collect()
        })
        .collect();
    let dataset = Dataset {
        name: "furnace".into(),
        series: MultiSeries::from_columns(vec!["gas_rate".into(), "co2".into()], columns)?,
        source_path: PathBuf::new(),
    };

    let methods = [
        Method::Persistence,
        Method::Ar(None),
        Method::parse("llm-di")?,
        Method::parse("llm-vi")?,
        Method::parse("llm-vc")?,
        Method::LlmPerDim,
    ];
    let config = EvalConfig {
        pipeline: PipelineConfig {
            digit_budget: 3,
            num_samples: 5,
            ..PipelineConfig::default()
        },
        ..EvalConfig::default()
    };

    let report = run_benchmark(&dataset, &methods, &config)?;
    print!("{}", render_text_table(&report));

    let out = std::env::temp_dir().join("muxcast_benchmark");
    std::fs::create_dir_all(&out)?;
    std::fs::write(out.join("report.json"), report.to_json(false))?;

    // chart the first dimension's best method
    let dim = &report.actual.dim_names()[0];
    let best = report
        .methods
        .iter()
        .filter(|m| m.forecast.is_some())
        .min_by(|a, b| {
            a.per_dim_rmse[dim].total_cmp(&b.per_dim_rmse[dim])
        })
        .expect("at least one method succeeded");
    emit_plot(
        report.history.column(0),
        report.actual.column(0),
        best.forecast.as_ref().unwrap().column(0),
        &best.name,
        dim,
        &out.join("gas_rate.svg"),
    )?;
    println!("\nwrote {}", out.join("report.json").display());
    println!("wrote {} (+ sidecar csv)", out.join("gas_rate.svg").display());
    Ok(())
}
