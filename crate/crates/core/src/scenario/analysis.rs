//! Spectral estimate of the dominant oscillation frequency of a sampled trace.

use std::f64::consts::PI;

/// Hann-windowed DFT magnitude at `f` (MHz) of the mean-removed signal.
fn magnitude(times: &[f64], values: &[f64], mean: f64, f: f64) -> f64 {
    let n = times.len();
    let t0 = times[0];
    let span = times[n - 1] - t0;
    let (mut re, mut im) = (0.0, 0.0);
    for (&t, &v) in times.iter().zip(values) {
        let w = 0.5 - 0.5 * (2.0 * PI * (t - t0) / span).cos();
        let phase = 2.0 * PI * f * t;
        re += w * (v - mean) * phase.cos();
        im -= w * (v - mean) * phase.sin();
    }
    re.hypot(im)
}

/// Frequency (MHz, `times` in µs) of the strongest spectral peak, located on a
/// 16× zero-padded grid and refined by golden-section search. `None` for
/// constant or too-short traces.
pub fn dominant_frequency_mhz(times: &[f64], values: &[f64]) -> Option<f64> {
    let n = times.len();
    if n < 8 || values.len() != n {
        return None;
    }
    let span = times[n - 1] - times[0];
    if !(span > 0.0) {
        return None;
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    if values.iter().all(|v| (v - mean).abs() < 1e-14) {
        return None;
    }
    let dt = span / (n - 1) as f64;
    let nyquist = 0.5 / dt;
    let df = 1.0 / (16.0 * span);
    // skip the window's DC lobe (two bins)
    let first = (2.0 / span / df).ceil() as usize;
    let last = (nyquist / df).floor() as usize;
    let mut best = (first, -1.0);
    for k in first..=last {
        let m = magnitude(times, values, mean, k as f64 * df);
        if m > best.1 {
            best = (k, m);
        }
    }
    let (mut a, mut b) = ((best.0 as f64 - 1.0) * df, (best.0 as f64 + 1.0) * df);
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    for _ in 0..80 {
        if magnitude(times, values, mean, c) > magnitude(times, values, mean, d) {
            b = d;
        } else {
            a = c;
        }
        c = b - g * (b - a);
        d = a + g * (b - a);
    }
    Some(0.5 * (a + b))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_cosine_frequency() {
        let times: Vec<f64> = (0..401).map(|k| k as f64 * 0.2 / 400.0).collect();
        for f in [40.0, 44.72, 56.57, 23.3] {
            let v: Vec<f64> = times
                .iter()
                .map(|t| 0.5 + 0.5 * (2.0 * PI * f * t + 0.3).cos())
                .collect();
            let est = dominant_frequency_mhz(&times, &v).unwrap();
            assert!((est - f).abs() < 0.01 * f, "{f} → {est}");
        }
        assert!(dominant_frequency_mhz(&times, &vec![0.3; 401]).is_none());
        assert!(dominant_frequency_mhz(&times[..4], &[0.0; 4]).is_none());
    }
}
