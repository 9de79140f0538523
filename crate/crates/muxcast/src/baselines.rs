//! Classical per-dimension reference forecasters.
//!
//! Persistence repeats the last observation. The autoregressive baseline
//! fits AR(p) by least squares on the normal equations and predicts
//! recursively; it deliberately stops short of full ARIMA (no differencing
//! or moving-average terms), and reports label it as AR(p).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default autoregressive order.
pub const DEFAULT_AR_ORDER: usize = 5;

/// Diagonal jitter rescuing degenerate normal equations.
const RIDGE_JITTER: f64 = 1e-8;

/// A fitted autoregressive model `y_t = c + a_1 y_{t-1} + ... + a_p y_{t-p}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArModel {
    pub order: usize,
    /// `coefficients[i]` multiplies lag `i + 1`.
    pub coefficients: Vec<f64>,
    pub intercept: f64,
}

/// Repeat the last observed value `m` times.
pub fn persistence_forecast(history: &[f64], m: usize) -> Result<Vec<f64>> {
    let last = *history.last().ok_or(Error::EmptyHistory)?;
    Ok(vec![last; m])
}

/// Least-squares fit of an AR(p) model with intercept.
pub fn ar_fit(history: &[f64], order: usize) -> Result<ArModel> {
    if order == 0 {
        return Err(Error::InvalidConfig("AR order must be at least 1".into()));
    }
    if history.len() < 2 * order + 1 {
        return Err(Error::TooShort {
            needed: 2 * order + 1,
            got: history.len(),
        });
    }
    let cols = order + 1; // intercept + p lags
    let rows = history.len() - order;

    // accumulate X'X and X'y directly; row t is [1, y_{t-1}, ..., y_{t-p}]
    let mut xtx = vec![vec![0.0; cols]; cols];
    let mut xty = vec![0.0; cols];
    let mut row = vec![0.0; cols];
    for t in order..history.len() {
        row[0] = 1.0;
        for lag in 1..=order {
            row[lag] = history[t - lag];
        }
        let y = history[t];
        for i in 0..cols {
            xty[i] += row[i] * y;
            for j in 0..cols {
                xtx[i][j] += row[i] * row[j];
            }
        }
    }
    for (i, r) in xtx.iter_mut().enumerate() {
        r[i] += RIDGE_JITTER;
    }

    let beta = solve_linear_system(xtx, xty)?;
    debug_assert_eq!(rows, history.len() - order);
    Ok(ArModel {
        order,
        intercept: beta[0],
        coefficients: beta[1..].to_vec(),
    })
}

/// Recursive multi-step prediction, feeding forecasts back as lags.
pub fn ar_forecast(model: &ArModel, history: &[f64], m: usize) -> Result<Vec<f64>> {
    if history.len() < model.order {
        return Err(Error::TooShort {
            needed: model.order,
            got: history.len(),
        });
    }
    let mut window: Vec<f64> = history[history.len() - model.order..].to_vec();
    let mut out = Vec::with_capacity(m);
    for _ in 0..m {
        let mut next = model.intercept;
        for (i, &coef) in model.coefficients.iter().enumerate() {
            next += coef * window[window.len() - 1 - i];
        }
        out.push(next);
        window.push(next);
        window.remove(0);
    }
    Ok(out)
}

/// Gaussian elimination with partial pivoting.
fn solve_linear_system(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Result<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let pivot_row = (col..n)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .expect("nonempty range");
        if a[pivot_row][col].abs() < 1e-300 {
            return Err(Error::SingularDesign);
        }
        a.swap(col, pivot_row);
        b.swap(col, pivot_row);
        let pivot = a[col].clone();
        for row in col + 1..n {
            let ratio = a[row][col] / pivot[col];
            if ratio == 0.0 {
                continue;
            }
            for (entry, p) in a[row][col..].iter_mut().zip(&pivot[col..]) {
                *entry -= ratio * p;
            }
            b[row] -= ratio * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let mut sum = b[row];
        for k in row + 1..n {
            sum -= a[row][k] * x[k];
        }
        x[row] = sum / a[row][row];
        if !x[row].is_finite() {
            return Err(Error::SingularDesign);
        }
    }
    Ok(x)
}
