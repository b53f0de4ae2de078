//! Two qualitative baselines: moving-average filtering (deterministic, low
//! diversity) and segment permutation (diverse, incoherent).

use crate::error::{Error, Result};
use crate::sampling::RandomSource;
use crate::series::WindowPair;

fn filter_part(part: &[f64], kernel: usize) -> Vec<f64> {
    let half = kernel / 2;
    let n = part.len();
    (0..n)
        .map(|t| {
            let mut sum = 0.0;
            for k in 0..kernel {
                // Edge replication.
                let idx = (t + k).saturating_sub(half).min(n - 1);
                sum += part[idx];
            }
            sum / kernel as f64
        })
        .collect()
}

/// Centered moving average per channel with edge replication, applied to
/// history and future independently.
pub fn moving_average_filter(window: &WindowPair, kernel: usize) -> Result<WindowPair> {
    if kernel % 2 == 0 || kernel == 0 {
        return Err(Error::Config(format!(
            "filter kernel must be odd and positive, got {kernel}"
        )));
    }
    let limit = window.history_len().min(window.future_len());
    if kernel > limit {
        return Err(Error::Config(format!(
            "filter kernel {kernel} exceeds min(d, h) = {limit}"
        )));
    }
    WindowPair::new(
        window.history.iter().map(|ch| filter_part(ch, kernel)).collect(),
        window.future.iter().map(|ch| filter_part(ch, kernel)).collect(),
        window.source_offset,
    )
}

fn permute_part(channels: &[Vec<f64>], n_segments: usize, rng: &mut RandomSource) -> Vec<Vec<f64>> {
    let len = channels[0].len();
    // Near-equal contiguous blocks; the first len % n_segments blocks get one extra.
    let base = len / n_segments;
    let extra = len % n_segments;
    let mut bounds = Vec::with_capacity(n_segments + 1);
    let mut pos = 0;
    bounds.push(0);
    for s in 0..n_segments {
        pos += base + usize::from(s < extra);
        bounds.push(pos);
    }

    // One block order shared by every channel, keeping them aligned.
    let mut order: Vec<usize> = (0..n_segments).collect();
    rng.shuffle(&mut order);

    channels
        .iter()
        .map(|ch| {
            let mut out = Vec::with_capacity(len);
            for &s in &order {
                out.extend_from_slice(&ch[bounds[s]..bounds[s + 1]]);
            }
            out
        })
        .collect()
}

/// Split history and future independently into near-equal contiguous blocks
/// and shuffle the block order uniformly. The value multiset is preserved.
pub fn segment_permutation(
    window: &WindowPair,
    n_segments: usize,
    rng: &mut RandomSource,
) -> Result<WindowPair> {
    if n_segments == 0 || n_segments > window.history_len() || n_segments > window.future_len() {
        return Err(Error::Config(format!(
            "n_segments must lie in [1, min(d, h)], got {n_segments} for d={}, h={}",
            window.history_len(),
            window.future_len()
        )));
    }
    WindowPair::new(
        permute_part(&window.history, n_segments, rng),
        permute_part(&window.future, n_segments, rng),
        window.source_offset,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ramp_window(d: usize, h: usize) -> WindowPair {
        WindowPair::new(
            vec![(0..d).map(|i| i as f64).collect()],
            vec![(d..d + h).map(|i| i as f64).collect()],
            0,
        )
        .unwrap()
    }

    #[test]
    fn kernel_one_is_identity() {
        let wp = ramp_window(8, 8);
        assert_eq!(moving_average_filter(&wp, 1).unwrap(), wp);
    }

    #[test]
    fn kernel_three_arithmetic() {
        let wp = WindowPair::new(
            vec![vec![1.0, 2.0, 3.0, 4.0, 5.0]],
            vec![vec![1.0, 2.0, 3.0, 4.0, 5.0]],
            0,
        )
        .unwrap();
        let out = moving_average_filter(&wp, 3).unwrap();
        let expected = [4.0 / 3.0, 2.0, 3.0, 4.0, 14.0 / 3.0];
        for (got, want) in out.history[0].iter().zip(&expected) {
            assert!((got - want).abs() < 1e-12, "{got} vs {want}");
        }
    }

    #[test]
    fn even_or_oversized_kernel_rejected() {
        let wp = ramp_window(8, 8);
        assert!(moving_average_filter(&wp, 2).is_err());
        assert!(moving_average_filter(&wp, 9).is_err());
    }

    #[test]
    fn filter_is_deterministic() {
        let wp = ramp_window(16, 16);
        assert_eq!(
            moving_average_filter(&wp, 5).unwrap(),
            moving_average_filter(&wp, 5).unwrap()
        );
    }

    /// Variance of a 9-point mean of iid noise is about 1/9 of the input.
    #[test]
    fn filter_shrinks_noise_variance() {
        let mut rng = RandomSource::new(8);
        let noise: Vec<f64> = (0..512).map(|_| rng.next_normal()).collect();
        let wp = WindowPair::new(
            vec![noise[..256].to_vec()],
            vec![noise[256..].to_vec()],
            0,
        )
        .unwrap();
        let out = moving_average_filter(&wp, 9).unwrap();
        let var = |xs: &[f64]| {
            let m = xs.iter().sum::<f64>() / xs.len() as f64;
            xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / xs.len() as f64
        };
        assert!(var(&out.history[0]) < 0.2 * var(&wp.history[0]));
    }

    #[test]
    fn one_segment_is_identity() {
        let wp = ramp_window(10, 10);
        let out = segment_permutation(&wp, 1, &mut RandomSource::new(1)).unwrap();
        assert_eq!(out, wp);
    }

    #[test]
    fn permutation_preserves_multiset() {
        let wp = ramp_window(13, 7);
        let out = segment_permutation(&wp, 4, &mut RandomSource::new(3)).unwrap();
        let sorted = |xs: &[f64]| {
            let mut v = xs.to_vec();
            v.sort_by(|a, b| a.partial_cmp(b).unwrap());
            v
        };
        assert_eq!(sorted(&out.history[0]), sorted(&wp.history[0]));
        assert_eq!(sorted(&out.future[0]), sorted(&wp.future[0]));
    }

    #[test]
    fn segments_out_of_range_rejected() {
        let wp = ramp_window(8, 4);
        assert!(segment_permutation(&wp, 0, &mut RandomSource::new(1)).is_err());
        assert!(segment_permutation(&wp, 5, &mut RandomSource::new(1)).is_err());
    }

    /// With 4 blocks the history permutation is the identity with p = 1/24.
    /// Over 200 trials, between 1 and 20 identity outcomes is consistent with
    /// the binomial bounds.
    #[test]
    fn permutation_identity_rate_matches_uniform() {
        let wp = ramp_window(16, 16);
        let mut hits = 0;
        for seed in 0..200 {
            let mut rng = RandomSource::new(seed);
            let out = segment_permutation(&wp, 4, &mut rng).unwrap();
            if out.history[0] == wp.history[0] {
                hits += 1;
            }
        }
        assert!((1..=20).contains(&hits), "identity occurred {hits} times");
    }
}
