/// Default OLS window in months.
pub const SLOPE_WINDOW: usize = 6;
/// Smoothing bandwidth used for plotted trajectories.
pub const SMOOTHING_SIGMA: f64 = 0.8;

/// Least-squares slope of the last `window` points against x = 0, 1, ...
/// Uses every point when fewer than `window` exist; 0 for fewer than two.
pub fn ols_slope(series: &[f64], window: usize) -> f64 {
    let k = window.max(1).min(series.len());
    let ys = &series[series.len() - k..];
    match ys {
        [] | [_] => return 0.0,
        [a, b] => return b - a,
        _ => {}
    }
    let n = ys.len() as f64;
    let x_mean = (n - 1.0) / 2.0;
    let y_mean = ys.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (i, y) in ys.iter().enumerate() {
        let dx = i as f64 - x_mean;
        sxy += dx * (y - y_mean);
        sxx += dx * dx;
    }
    if sxx == 0.0 {
        0.0
    } else {
        sxy / sxx
    }
}

/// Gaussian kernel smoothing with weights exp(-d²/2σ²) for |d| ≤ ceil(3σ).
/// Weights are renormalized over the points actually present, so series edges
/// and gaps (`None`) shrink the window instead of pulling toward zero.
/// Gaps stay gaps in the output.
///
/// # Panics
/// If `sigma` is not positive.
pub fn gaussian_smooth(series: &[Option<f64>], sigma: f64) -> Vec<Option<f64>> {
    assert!(sigma > 0.0, "sigma must be positive");
    let radius = (3.0 * sigma).ceil() as isize;
    let weights: Vec<f64> = (-radius..=radius)
        .map(|d| (-((d * d) as f64) / (2.0 * sigma * sigma)).exp())
        .collect();
    let n = series.len() as isize;
    (0..n)
        .map(|i| {
            // offsets are taken against the centre value so constant runs come back unchanged
            let centre = series[i as usize]?;
            let (mut acc, mut norm) = (0.0, 0.0);
            let (mut lo, mut hi) = (centre, centre);
            for d in -radius..=radius {
                let j = i + d;
                if !(0..n).contains(&j) {
                    continue;
                }
                if let Some(v) = series[j as usize] {
                    let w = weights[(d + radius) as usize];
                    acc += w * (v - centre);
                    norm += w;
                    lo = lo.min(v);
                    hi = hi.max(v);
                }
            }
            Some((centre + acc / norm).clamp(lo, hi))
        })
        .collect()
}

/// [`gaussian_smooth`] for gap-free series.
pub fn gaussian_smooth_dense(series: &[f64], sigma: f64) -> Vec<f64> {
    let wrapped: Vec<Option<f64>> = series.iter().copied().map(Some).collect();
    gaussian_smooth(&wrapped, sigma)
        .into_iter()
        .map(|v| v.expect("dense input"))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn slope_examples() {
        assert!((ols_slope(&[0.1, 0.2, 0.3], 6) - 0.1).abs() < 1e-12);
        assert_eq!(ols_slope(&[0.4; 5], 6), 0.0);
        assert_eq!(ols_slope(&[0.4], 6), 0.0);
        assert_eq!(ols_slope(&[], 6), 0.0);
    }

    #[test]
    fn slope_uses_only_window() {
        // steep early history is ignored by a 2-point window
        assert!((ols_slope(&[10.0, 0.0, 1.0, 2.0], 2) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn impulse_response_is_normalized_kernel() {
        // independent evaluation of the σ = 0.8 kernel at offsets -3..=3
        let raw: Vec<f64> = (-3i32..=3).map(|d| (-(d * d) as f64 / 1.28).exp()).collect();
        let total: f64 = raw.iter().sum();
        // padded so every nonzero output sees the full kernel
        let mut series = vec![0.0; 13];
        series[6] = 1.0;
        let out = gaussian_smooth_dense(&series, 0.8);
        for (o, r) in out[3..10].iter().zip(&raw) {
            assert!((o - r / total).abs() < 1e-14);
        }
        assert!(out[..3].iter().chain(&out[10..]).all(|&v| v == 0.0));
        assert!((out.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!((out[3] - out[9]).abs() < 1e-14 && (out[5] - out[7]).abs() < 1e-14);
    }

    #[test]
    fn length_one_and_gaps() {
        assert_eq!(gaussian_smooth(&[Some(0.3)], 0.8), [Some(0.3)]);
        let out = gaussian_smooth(&[Some(1.0), None, Some(1.0)], 0.8);
        assert_eq!(out, [Some(1.0), None, Some(1.0)]);
    }

    proptest! {
        #[test]
        fn two_point_slope_is_difference(a in -1.0f64..1.0, b in -1.0f64..1.0) {
            prop_assert_eq!(ols_slope(&[a, b], 6), b - a);
        }

        #[test]
        fn constant_series_preserved(c in 0.0f64..1.0, n in 1usize..30) {
            let out = gaussian_smooth_dense(&vec![c; n], 0.8);
            for v in out {
                prop_assert_eq!(v, c);
            }
        }

        #[test]
        fn smoothing_stays_in_range(xs in proptest::collection::vec(proptest::option::weighted(0.8, 0.0f64..1.0), 1..40)) {
            let present: Vec<f64> = xs.iter().flatten().copied().collect();
            prop_assume!(!present.is_empty());
            let lo = present.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = present.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let out = gaussian_smooth(&xs, 0.8);
            prop_assert_eq!(out.len(), xs.len());
            for (o, x) in out.iter().zip(&xs) {
                prop_assert_eq!(o.is_some(), x.is_some());
                if let Some(v) = o {
                    prop_assert!(*v >= lo && *v <= hi);
                }
            }
        }
    }
}
