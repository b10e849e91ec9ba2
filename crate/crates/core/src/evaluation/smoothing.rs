//! 1-D signal denoising for the per-crossing evaluation signals.
//!
//! The default is a Haar wavelet decomposition (depth at most 3) with
//! soft thresholding at the universal threshold
//! `tau = sigma_hat * sqrt(2 ln n)`, where `sigma_hat` is the median
//! absolute finest-level detail divided by 0.6745. A centered moving
//! average and the identity are available as alternatives.

use crate::config::Smoothing;

const SQRT2: f64 = std::f64::consts::SQRT_2;

/// Window of the moving-average smoother.
const MOVING_AVERAGE_WINDOW: usize = 9;

/// Smooths a nonnegative signal with the requested method. The output
/// has the same length and is clamped at zero.
pub fn smooth_signal(signal: &[f64], method: Smoothing) -> Vec<f64> {
    match method {
        Smoothing::None => signal.to_vec(),
        Smoothing::MovingAverage => moving_average(signal, MOVING_AVERAGE_WINDOW),
        Smoothing::Wavelet => wavelet_denoise(signal),
    }
}

/// Centered moving average with replicated ends.
fn moving_average(signal: &[f64], window: usize) -> Vec<f64> {
    let n = signal.len();
    if n == 0 {
        return Vec::new();
    }
    let half = (window / 2) as i64;
    (0..n as i64)
        .map(|i| {
            let mut acc = 0.0;
            for d in -half..=half {
                let j = (i + d).clamp(0, n as i64 - 1) as usize;
                acc += signal[j];
            }
            (acc / window as f64).max(0.0)
        })
        .collect()
}

/// One Haar analysis step. An odd trailing sample is carried into the
/// approximation untouched so the transform stays invertible for any
/// length.
fn haar_forward(signal: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let pairs = signal.len() / 2;
    let mut approx = Vec::with_capacity(pairs + signal.len() % 2);
    let mut detail = Vec::with_capacity(pairs);
    for k in 0..pairs {
        let a = signal[2 * k];
        let b = signal[2 * k + 1];
        approx.push((a + b) / SQRT2);
        detail.push((a - b) / SQRT2);
    }
    if signal.len() % 2 == 1 {
        approx.push(signal[signal.len() - 1]);
    }
    (approx, detail)
}

fn haar_inverse(approx: &[f64], detail: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(detail.len() * 2 + (approx.len() - detail.len()));
    for k in 0..detail.len() {
        out.push((approx[k] + detail[k]) / SQRT2);
        out.push((approx[k] - detail[k]) / SQRT2);
    }
    // Odd-length carry.
    for &v in &approx[detail.len()..] {
        out.push(v);
    }
    out
}

fn median(values: &mut [f64]) -> f64 {
    values.sort_by(|a, b| a.partial_cmp(b).expect("finite detail coefficients"));
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

fn soft_threshold(value: f64, tau: f64) -> f64 {
    if value.abs() <= tau {
        0.0
    } else {
        value.signum() * (value.abs() - tau)
    }
}

/// Haar DWT to depth `min(3, floor(log2 n))`, universal soft threshold
/// on every detail level, inverse transform, clamp at zero.
fn wavelet_denoise(signal: &[f64]) -> Vec<f64> {
    let n = signal.len();
    let depth = (usize::BITS - 1).saturating_sub(n.leading_zeros()).min(3) as usize;
    if depth == 0 {
        // Length 0 or 1: no decomposition possible.
        return signal.to_vec();
    }

    let mut details: Vec<Vec<f64>> = Vec::with_capacity(depth);
    let mut approx = signal.to_vec();
    for _ in 0..depth {
        let (a, d) = haar_forward(&approx);
        details.push(d);
        approx = a;
    }

    // Noise scale from the finest details via the median absolute
    // deviation; a clean (e.g. constant) signal gives tau = 0.
    let mut abs_finest: Vec<f64> = details[0].iter().map(|v| v.abs()).collect();
    let sigma_hat = if abs_finest.is_empty() {
        0.0
    } else {
        median(&mut abs_finest) / 0.6745
    };
    let tau = sigma_hat * (2.0 * (n as f64).ln()).sqrt();

    for level in &mut details {
        for v in level.iter_mut() {
            *v = soft_threshold(*v, tau);
        }
    }

    let mut out = approx;
    for d in details.iter().rev() {
        out = haar_inverse(&out, d);
    }
    for v in out.iter_mut() {
        *v = v.max(0.0);
    }
    debug_assert_eq!(out.len(), n);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_signal_is_unchanged() {
        let signal = vec![0.37; 40];
        for method in [Smoothing::Wavelet, Smoothing::MovingAverage, Smoothing::None] {
            let out = smooth_signal(&signal, method);
            for (a, b) in signal.iter().zip(&out) {
                assert!((a - b).abs() < 1e-12, "{method:?}");
            }
        }
    }

    #[test]
    fn short_signals_pass_through_the_wavelet() {
        assert_eq!(smooth_signal(&[0.8], Smoothing::Wavelet), vec![0.8]);
        assert_eq!(smooth_signal(&[], Smoothing::Wavelet), Vec::<f64>::new());
    }

    #[test]
    fn haar_round_trip_is_exact_for_odd_lengths() {
        let signal: Vec<f64> = (0..13).map(|i| (i as f64 * 0.7).sin().abs()).collect();
        let (a, d) = haar_forward(&signal);
        let back = haar_inverse(&a, &d);
        for (x, y) in signal.iter().zip(&back) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn wavelet_recovers_a_step_under_small_noise() {
        // Step of height 0.5 with +-0.02 alternating noise; the denoised
        // signal must sit within the noise amplitude of the clean step
        // except near the edge.
        let n = 64;
        let edge = 32;
        let amplitude = 0.02;
        let clean: Vec<f64> = (0..n).map(|i| if i < edge { 0.1 } else { 0.6 }).collect();
        let noisy: Vec<f64> = clean
            .iter()
            .enumerate()
            .map(|(i, &v)| v + if i % 2 == 0 { amplitude } else { -amplitude })
            .collect();
        let out = smooth_signal(&noisy, Smoothing::Wavelet);
        let mut misses = 0;
        for i in 0..n {
            if (out[i] - clean[i]).abs() > amplitude && (i as i64 - edge as i64).abs() > 4 {
                misses += 1;
            }
        }
        assert_eq!(misses, 0, "out = {out:?}");
    }

    #[test]
    fn outputs_are_never_negative() {
        let signal = vec![0.0, 0.5, 0.0, 0.5, 0.0, 0.5, 0.0, 0.5, 0.0, 0.0];
        for method in [Smoothing::Wavelet, Smoothing::MovingAverage] {
            assert!(smooth_signal(&signal, method).iter().all(|&v| v >= 0.0));
        }
    }

    #[test]
    fn moving_average_replicates_ends() {
        let signal = vec![1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0];
        let out = moving_average(&signal, 9);
        // At index 0 the window sees the first sample replicated 5 times.
        assert!((out[0] - 5.0 / 9.0).abs() < 1e-12);
        assert!((out[9] - 0.0).abs() < 1e-12);
    }
}
