//! Persistence and AR(p) reference forecasters.
//!
//! Run with: cargo run -p muxcast --example baselines

use muxcast::baselines::{ar_fit, ar_forecast, persistence_forecast};
use muxcast::eval::rmse;
use rand::prelude::*;

fn main() -> muxcast::Result<()> {
    // synthetic AR(2) data with known coefficients
    let (a1, a2, c) = (0.55, 0.3, 0.4);
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(8);
    let mut y = vec![2.0, 2.1];
    for _ in 2..400 {
        let noise: f64 = rng.random_range(-0.05..0.05);
        let next = a1 * y[y.len() - 1] + a2 * y[y.len() - 2] + c + noise;
        y.push(next);
    }
    let (train, test) = y.split_at(360);

    let model = ar_fit(train, 2)?;
    println!(
        "fitted AR(2): y_t = {:.3} + {:.3} y_(t-1) + {:.3} y_(t-2)   (true: {c} + {a1} y + {a2} y)",
        model.intercept, model.coefficients[0], model.coefficients[1]
    );

    let ar_pred = ar_forecast(&model, train, test.len())?;
    let naive = persistence_forecast(train, test.len())?;
    println!("\nforecasting the held-out {} points:", test.len());
    println!("  ar(2) rmse:        {:.4}", rmse(test, &ar_pred)?);
    println!("  persistence rmse:  {:.4}", rmse(test, &naive)?);

    // persistence is AR with a unit lag-1 coefficient
    let unit = muxcast::baselines::ArModel {
        order: 1,
        coefficients: vec![1.0],
        intercept: 0.0,
    };
    assert_eq!(ar_forecast(&unit, train, 5)?, persistence_forecast(train, 5)?);
    println!("\npersistence == AR(1) with coefficient 1 and no intercept");
    Ok(())
}
