//! Composite quadrature over sampled data.

use crate::trajectory::is_uniform_grid;

/// Integral of sampled values: composite Simpson on uniform grids (with a
/// 3/8 panel when the interval count is odd), trapezoid otherwise.
pub fn integrate(times: &[f64], values: &[f64]) -> f64 {
    assert_eq!(times.len(), values.len());
    let n = times.len();
    if n < 2 {
        return 0.0;
    }
    if n < 3 || !is_uniform_grid(times) {
        return trapezoid(times, values);
    }
    let intervals = n - 1;
    let h = (times[n - 1] - times[0]) / intervals as f64;
    let (simpson_end, tail) = if intervals.is_multiple_of(2) {
        (intervals, false)
    } else if intervals >= 3 {
        (intervals - 3, true)
    } else {
        return trapezoid(times, values);
    };
    let mut sum = 0.0;
    let mut k = 0;
    while k < simpson_end {
        sum += values[k] + 4.0 * values[k + 1] + values[k + 2];
        k += 2;
    }
    let mut total = sum * h / 3.0;
    if tail {
        let s = simpson_end;
        total += 3.0 * h / 8.0 * (values[s] + 3.0 * values[s + 1] + 3.0 * values[s + 2] + values[s + 3]);
    }
    total
}

pub fn trapezoid(times: &[f64], values: &[f64]) -> f64 {
    times
        .windows(2)
        .zip(values.windows(2))
        .map(|(t, v)| 0.5 * (t[1] - t[0]) * (v[0] + v[1]))
        .sum()
}
