//! Multivariate series and window types shared by the whole pipeline.
//!
//! Storage is channel-major: each channel is one contiguous `Vec<f64>`, since
//! decomposition and augmentation both walk single channels end to end.

use crate::error::{Error, Result};

/// A c-channel, length-T real-valued sequence with optional timestamps.
#[derive(Debug, Clone, PartialEq)]
pub struct MultivariateSeries {
    values: Vec<Vec<f64>>,
    timestamps: Option<Vec<String>>,
    channel_names: Option<Vec<String>>,
}

impl MultivariateSeries {
    pub fn new(
        values: Vec<Vec<f64>>,
        timestamps: Option<Vec<String>>,
        channel_names: Option<Vec<String>>,
    ) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Shape("series needs at least one channel".into()));
        }
        let len = values[0].len();
        if len == 0 {
            return Err(Error::Shape("series needs at least one step".into()));
        }
        for (c, channel) in values.iter().enumerate() {
            if channel.len() != len {
                return Err(Error::Shape(format!(
                    "channel {c} has length {} but channel 0 has length {len}",
                    channel.len()
                )));
            }
            if let Some(t) = channel.iter().position(|v| !v.is_finite()) {
                return Err(Error::Parse(format!(
                    "non-finite value at channel {c}, step {t}"
                )));
            }
        }
        if let Some(ts) = &timestamps {
            if ts.len() != len {
                return Err(Error::Shape(format!(
                    "{} timestamps for {len} steps",
                    ts.len()
                )));
            }
            for w in ts.windows(2) {
                if !timestamp_lt(&w[0], &w[1]) {
                    return Err(Error::Parse(format!(
                        "timestamps not strictly increasing: {:?} then {:?}",
                        w[0], w[1]
                    )));
                }
            }
        }
        if let Some(names) = &channel_names {
            if names.len() != values.len() {
                return Err(Error::Shape(format!(
                    "{} channel names for {} channels",
                    names.len(),
                    values.len()
                )));
            }
        }
        Ok(Self {
            values,
            timestamps,
            channel_names,
        })
    }

    pub fn from_values(values: Vec<Vec<f64>>) -> Result<Self> {
        Self::new(values, None, None)
    }

    /// Number of channels c.
    pub fn channels(&self) -> usize {
        self.values.len()
    }

    /// Number of steps T.
    pub fn len(&self) -> usize {
        self.values[0].len()
    }

    pub fn is_empty(&self) -> bool {
        false // T >= 1 by construction
    }

    pub fn channel(&self, c: usize) -> &[f64] {
        &self.values[c]
    }

    pub fn values(&self) -> &[Vec<f64>] {
        &self.values
    }

    pub fn timestamps(&self) -> Option<&[String]> {
        self.timestamps.as_deref()
    }

    pub fn channel_names(&self) -> Option<&[String]> {
        self.channel_names.as_deref()
    }

    /// Contiguous sub-series over steps `[start, end)`, keeping metadata.
    pub fn slice(&self, start: usize, end: usize) -> Result<MultivariateSeries> {
        if start >= end || end > self.len() {
            return Err(Error::Bounds(format!(
                "slice [{start}, {end}) outside series of length {}",
                self.len()
            )));
        }
        Ok(MultivariateSeries {
            values: self
                .values
                .iter()
                .map(|ch| ch[start..end].to_vec())
                .collect(),
            timestamps: self
                .timestamps
                .as_ref()
                .map(|ts| ts[start..end].to_vec()),
            channel_names: self.channel_names.clone(),
        })
    }
}

// ISO-8601 timestamps compare correctly as strings; integer indices compare
// numerically when both sides parse.
fn timestamp_lt(a: &str, b: &str) -> bool {
    match (a.parse::<f64>(), b.parse::<f64>()) {
        (Ok(x), Ok(y)) => x < y,
        _ => a < b,
    }
}

/// Aligned (history, future) slices of one series.
///
/// Windows are value copies, never views: augmentation mutates them freely.
#[derive(Debug, Clone, PartialEq)]
pub struct WindowPair {
    /// c x d history matrix, channel-major.
    pub history: Vec<Vec<f64>>,
    /// c x h future matrix, channel-major.
    pub future: Vec<Vec<f64>>,
    /// Start index of the window in its parent series.
    pub source_offset: usize,
}

impl WindowPair {
    pub fn new(history: Vec<Vec<f64>>, future: Vec<Vec<f64>>, source_offset: usize) -> Result<Self> {
        if history.len() != future.len() {
            return Err(Error::Shape(format!(
                "history has {} channels, future has {}",
                history.len(),
                future.len()
            )));
        }
        if history.is_empty() || history[0].is_empty() || future[0].is_empty() {
            return Err(Error::Shape("history and future must be non-empty".into()));
        }
        Ok(Self {
            history,
            future,
            source_offset,
        })
    }

    pub fn channels(&self) -> usize {
        self.history.len()
    }

    /// History length d.
    pub fn history_len(&self) -> usize {
        self.history[0].len()
    }

    /// Future length h.
    pub fn future_len(&self) -> usize {
        self.future[0].len()
    }

    pub fn same_shape(&self, other: &WindowPair) -> bool {
        self.channels() == other.channels()
            && self.history_len() == other.history_len()
            && self.future_len() == other.future_len()
    }

    /// Channel `c` as one contiguous history-then-future signal.
    pub fn full_channel(&self, c: usize) -> Vec<f64> {
        let mut out = self.history[c].clone();
        out.extend_from_slice(&self.future[c]);
        out
    }
}

/// Extract the window at `offset`, split at `d` steps of history and `h` of future.
pub fn slice_window(
    series: &MultivariateSeries,
    offset: usize,
    d: usize,
    h: usize,
) -> Result<WindowPair> {
    if d == 0 || h == 0 {
        return Err(Error::Bounds(format!(
            "window lengths must be positive, got d={d}, h={h}"
        )));
    }
    let t = series.len();
    if offset + d + h > t {
        return Err(Error::Bounds(format!(
            "window [offset={offset}, d={d}, h={h}] needs {} steps but series has {t}",
            offset + d + h
        )));
    }
    let history = (0..series.channels())
        .map(|c| series.channel(c)[offset..offset + d].to_vec())
        .collect();
    let future = (0..series.channels())
        .map(|c| series.channel(c)[offset + d..offset + d + h].to_vec())
        .collect();
    WindowPair::new(history, future, offset)
}

/// All stride-spaced windows that fit in the series, in offset order.
///
/// Returns an empty vector when `d + h > T`.
pub fn enumerate_windows(
    series: &MultivariateSeries,
    d: usize,
    h: usize,
    stride: usize,
) -> Result<Vec<WindowPair>> {
    if stride == 0 {
        return Err(Error::Config("stride must be at least 1".into()));
    }
    let t = series.len();
    if d + h > t {
        return Ok(Vec::new());
    }
    (0..=(t - d - h))
        .step_by(stride)
        .map(|offset| slice_window(series, offset, d, h))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ramp_series(t: usize) -> MultivariateSeries {
        MultivariateSeries::from_values(vec![(0..t).map(|i| i as f64).collect()]).unwrap()
    }

    #[test]
    fn slice_window_splits_at_d() {
        let s = MultivariateSeries::from_values(vec![vec![1.0, 2.0, 3.0, 4.0]]).unwrap();
        let wp = slice_window(&s, 0, 2, 2).unwrap();
        assert_eq!(wp.history, vec![vec![1.0, 2.0]]);
        assert_eq!(wp.future, vec![vec![3.0, 4.0]]);
    }

    #[test]
    fn slice_window_context_96() {
        let s = ramp_series(200);
        let wp = slice_window(&s, 8, 96, 96).unwrap();
        assert_eq!(wp.history[0][0], 8.0);
        assert_eq!(wp.history[0][95], 103.0);
        assert_eq!(wp.future[0][0], 104.0);
        assert_eq!(wp.future[0][95], 199.0);
    }

    #[test]
    fn slice_window_out_of_bounds() {
        let s = ramp_series(100);
        let err = slice_window(&s, 5, 96, 96).unwrap_err();
        assert!(matches!(err, Error::Bounds(_)));
    }

    #[test]
    fn enumerate_counts() {
        let s = ramp_series(10);
        assert_eq!(enumerate_windows(&s, 3, 2, 1).unwrap().len(), 6);
        let s = ramp_series(192);
        assert_eq!(enumerate_windows(&s, 96, 96, 1).unwrap().len(), 1);
        let s = ramp_series(5);
        assert!(enumerate_windows(&s, 4, 4, 1).unwrap().is_empty());
    }

    #[test]
    fn rejects_non_finite() {
        let err = MultivariateSeries::from_values(vec![vec![1.0, f64::NAN]]).unwrap_err();
        assert!(matches!(err, Error::Parse(_)));
    }

    #[test]
    fn rejects_non_monotone_timestamps() {
        let err = MultivariateSeries::new(
            vec![vec![1.0, 2.0]],
            Some(vec!["2".into(), "1".into()]),
            None,
        )
        .unwrap_err();
        assert!(matches!(err, Error::Parse(_)));
    }

    proptest! {
        #[test]
        fn window_concat_reproduces_parent(t in 4usize..64, seed in 0u64..1000) {
            let vals: Vec<f64> = (0..t).map(|i| ((i as u64).wrapping_mul(seed + 1) % 97) as f64).collect();
            let s = MultivariateSeries::from_values(vec![vals.clone()]).unwrap();
            let d = 1 + (seed as usize) % (t - 2);
            let h_max = t - d;
            let h = 1 + (seed as usize / 7) % h_max.max(1);
            if d + h <= t {
                let max_off = t - d - h;
                let off = (seed as usize / 3) % (max_off + 1);
                let wp = slice_window(&s, off, d, h).unwrap();
                let mut concat = wp.history[0].clone();
                concat.extend_from_slice(&wp.future[0]);
                prop_assert_eq!(&concat[..], &vals[off..off + d + h]);
            }
        }

        #[test]
        fn enumerate_count_formula(t in 2usize..80, d in 1usize..20, h in 1usize..20, stride in 1usize..5) {
            let s = ramp_series(t);
            let windows = enumerate_windows(&s, d, h, stride).unwrap();
            let expected = if d + h > t { 0 } else { (t - d - h) / stride + 1 };
            prop_assert_eq!(windows.len(), expected);
        }
    }
}
