//! Per-dimension conversion between real values and fixed-digit integers.
//!
//! Each dimension is mapped through `round((v - offset) * factor)` so that
//! every history value lands in `[0, 10^b - 1]`. The fit leaves headroom
//! above the observed range so forecasts that mildly exceed history remain
//! representable; anything further out is clamped.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::MultiSeries;

/// Range multiplier applied when fitting, so forecasts may exceed history.
pub const DEFAULT_HEADROOM: f64 = 1.25;

/// Affine parameters of one dimension's digit mapping.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScaleParams {
    /// Subtracted before scaling; the fitted column minimum.
    pub offset: f64,
    /// Positive multiplier into the integer domain.
    pub factor: f64,
    pub digit_budget: u32,
}

impl ScaleParams {
    pub fn new(offset: f64, factor: f64, digit_budget: u32) -> Self {
        ScaleParams {
            offset,
            factor,
            digit_budget,
        }
    }

    /// Largest representable integer, `10^b - 1`.
    pub fn max_int(&self) -> u64 {
        10u64.pow(self.digit_budget) - 1
    }
}

/// A digit-domain series: integer columns plus the parameters to invert them.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaledSeries {
    /// Per-dimension integer columns, each entry in `[0, 10^b - 1]`.
    pub ints: Vec<Vec<u64>>,
    pub params: Vec<ScaleParams>,
}

impl ScaledSeries {
    /// Fit and apply scaling to every dimension of a series.
    pub fn fit(series: &MultiSeries, digit_budget: u32, headroom: f64) -> Result<Self> {
        let mut ints = Vec::with_capacity(series.d());
        let mut params = Vec::with_capacity(series.d());
        for k in 0..series.d() {
            let p = fit_scale(series.column(k), digit_budget, headroom)?;
            ints.push(apply_scale(series.column(k), &p));
            params.push(p);
        }
        Ok(ScaledSeries { ints, params })
    }
}

fn check_budget(digit_budget: u32) -> Result<()> {
    if !(1..=10).contains(&digit_budget) {
        return Err(Error::InvalidConfig(format!(
            "digit budget must be in [1, 10], got {digit_budget}"
        )));
    }
    Ok(())
}

/// Fit scale parameters on one history column.
///
/// `offset` is the column minimum; `factor` maps `headroom * (max - min)`
/// onto `10^b - 1` (1.0 for a constant column).
pub fn fit_scale(column: &[f64], digit_budget: u32, headroom: f64) -> Result<ScaleParams> {
    check_budget(digit_budget)?;
    if !(headroom >= 1.0 && headroom.is_finite()) {
        return Err(Error::InvalidConfig(format!(
            "headroom must be at least 1, got {headroom}"
        )));
    }
    if column.is_empty() {
        return Err(Error::EmptyColumn);
    }
    let mut min = f64::INFINITY;
    let mut max = f64::NEG_INFINITY;
    for (t, &v) in column.iter().enumerate() {
        if !v.is_finite() {
            return Err(Error::NonFinite {
                value: v,
                row: t,
                col: 0,
            });
        }
        min = min.min(v);
        max = max.max(v);
    }
    let range = max - min;
    let factor = if range == 0.0 {
        1.0
    } else {
        (10f64.powi(digit_budget as i32) - 1.0) / (headroom * range)
    };
    Ok(ScaleParams::new(min, factor, digit_budget))
}

/// Map reals into `[0, 10^b - 1]`, rounding half away from zero and
/// clamping anything outside the fitted range.
pub fn apply_scale(column: &[f64], params: &ScaleParams) -> Vec<u64> {
    let max = params.max_int() as f64;
    column
        .iter()
        .map(|&v| {
            // f64::round rounds half away from zero, as required.
            let scaled = ((v - params.offset) * params.factor).round();
            scaled.clamp(0.0, max) as u64
        })
        .collect()
}

/// Map integers back to reals: `int / factor + offset`.
pub fn invert_scale(ints: &[u64], params: &ScaleParams) -> Result<Vec<f64>> {
    let max = params.max_int();
    ints.iter()
        .map(|&i| {
            if i > max {
                return Err(Error::OutOfRangeInt {
                    value: i,
                    digit_budget: params.digit_budget,
                });
            }
            Ok(i as f64 / params.factor + params.offset)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn fit_matches_hand_computation() {
        let p = fit_scale(&[1.7, 2.6], 2, 1.0).unwrap();
        assert_relative_eq!(p.offset, 1.7, epsilon = 1e-12);
        assert_relative_eq!(p.factor, 99.0 / 0.9, epsilon = 1e-9);
    }

    #[test]
    fn constant_column_scales_to_zero() {
        let p = fit_scale(&[5.0, 5.0], 3, DEFAULT_HEADROOM).unwrap();
        assert_eq!(p.offset, 5.0);
        assert_eq!(p.factor, 1.0);
        assert_eq!(apply_scale(&[5.0, 5.0], &p), vec![0, 0]);
    }

    #[test]
    fn two_digit_fit_uses_full_range() {
        let p = fit_scale(&[0.0, 9.9], 2, 1.0).unwrap();
        assert_relative_eq!(p.factor, 10.0, epsilon = 1e-9);
        let ints = apply_scale(&[0.0, 9.9], &p);
        assert_eq!(ints, vec![0, 99]);
        // brute-force: every mapped history value fits in 2 digits
        for step in 0..=99 {
            let v = step as f64 * 0.1;
            assert!(apply_scale(&[v], &p)[0] <= 99);
        }
    }

    #[test]
    fn worked_example_ints() {
        let p = ScaleParams::new(0.0, 10.0, 2);
        assert_eq!(apply_scale(&[1.7, 2.6], &p), vec![17, 26]);
        assert_eq!(apply_scale(&[2.3, 3.1], &p), vec![23, 31]);
    }

    #[test]
    fn identity_params_round() {
        let p = ScaleParams::new(0.0, 1.0, 3);
        assert_eq!(apply_scale(&[2.4, 2.5, -0.2], &p), vec![2, 3, 0]);
    }

    #[test]
    fn out_of_range_clamps() {
        let p = ScaleParams::new(0.0, 10.0, 2);
        assert_eq!(apply_scale(&[123.0], &p), vec![99]);
        assert_eq!(apply_scale(&[-5.0], &p), vec![0]);
    }

    #[test]
    fn invert_worked_example() {
        let p = ScaleParams::new(0.0, 10.0, 2);
        let out = invert_scale(&[17, 26], &p).unwrap();
        assert_relative_eq!(out[0], 1.7, epsilon = 1e-12);
        assert_relative_eq!(out[1], 2.6, epsilon = 1e-12);
    }

    #[test]
    fn zero_maps_to_offset() {
        let p = ScaleParams::new(4.25, 17.0, 2);
        assert_eq!(invert_scale(&[0], &p).unwrap(), vec![4.25]);
    }

    #[test]
    fn invert_rejects_overflowing_int() {
        let p = ScaleParams::new(0.0, 1.0, 2);
        assert!(matches!(
            invert_scale(&[100], &p),
            Err(Error::OutOfRangeInt { .. })
        ));
    }

    #[test]
    fn empty_column_is_rejected() {
        assert!(matches!(fit_scale(&[], 2, 1.0), Err(Error::EmptyColumn)));
    }

    #[test]
    fn nan_is_rejected() {
        assert!(matches!(
            fit_scale(&[1.0, f64::NAN], 2, 1.0),
            Err(Error::NonFinite { row: 1, .. })
        ));
    }

    proptest! {
        // |invert(apply(x)) - x| <= 0.5/factor inside the fitted range
        #[test]
        fn roundtrip_error_bound(
            values in proptest::collection::vec(-1e6f64..1e6, 1..64),
            budget in 1u32..=10,
        ) {
            let params = fit_scale(&values, budget, 1.0).unwrap();
            let ints = apply_scale(&values, &params);
            let back = invert_scale(&ints, &params).unwrap();
            let bound = 0.5 / params.factor + 1e-9;
            for (v, r) in values.iter().zip(&back) {
                prop_assert!((v - r).abs() <= bound, "|{v} - {r}| > {bound}");
            }
        }

        // ordering is preserved within the unclamped range
        #[test]
        fn monotonic_within_range(
            values in proptest::collection::vec(0f64..100.0, 2..32),
        ) {
            let params = fit_scale(&values, 4, DEFAULT_HEADROOM).unwrap();
            let mut sorted = values.clone();
            sorted.sort_by(f64::total_cmp);
            let ints = apply_scale(&sorted, &params);
            for pair in ints.windows(2) {
                prop_assert!(pair[0] <= pair[1]);
            }
        }
    }

    #[test]
    fn roundtrip_bound_over_many_random_vectors() {
        use rand::prelude::*;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..10_000 {
            let len = rng.random_range(1..12);
            let vals: Vec<f64> = (0..len).map(|_| rng.random_range(-50.0..50.0)).collect();
            let params = fit_scale(&vals, 3, 1.0).unwrap();
            let back = invert_scale(&apply_scale(&vals, &params), &params).unwrap();
            for (v, r) in vals.iter().zip(&back) {
                assert!((v - r).abs() <= 0.5 / params.factor + 1e-9);
            }
        }
    }
}
