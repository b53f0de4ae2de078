//! CSV ingestion, chronological splitting, per-channel normalization,
//! window subsampling, and the synthetic-series generator.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sampling::RandomSource;
use crate::series::{MultivariateSeries, WindowPair};

/// Chronological split ratios, train first.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SplitSpec {
    pub train: f64,
    pub val: f64,
    pub test: f64,
}

impl Default for SplitSpec {
    fn default() -> Self {
        Self {
            train: 0.7,
            val: 0.2,
            test: 0.1,
        }
    }
}

impl SplitSpec {
    pub fn validate(&self) -> Result<()> {
        if self.train <= 0.0 || self.val <= 0.0 || self.test <= 0.0 {
            return Err(Error::Config("split ratios must be positive".into()));
        }
        if ((self.train + self.val + self.test) - 1.0).abs() > 1e-9 {
            return Err(Error::Config(format!(
                "split ratios must sum to 1, got {}",
                self.train + self.val + self.test
            )));
        }
        Ok(())
    }
}

/// Chronological split at floor(train*T) and floor((train+val)*T).
pub fn split(
    series: &MultivariateSeries,
    spec: &SplitSpec,
) -> Result<(MultivariateSeries, MultivariateSeries, MultivariateSeries)> {
    spec.validate()?;
    let t = series.len();
    // Small epsilon so ratios like 0.7 stored inexactly still floor as intended.
    let b1 = (spec.train * t as f64 + 1e-9).floor() as usize;
    let b2 = ((spec.train + spec.val) * t as f64 + 1e-9).floor() as usize;
    if b1 == 0 || b2 <= b1 || b2 >= t {
        return Err(Error::Config(format!(
            "series of length {t} too short for split {spec:?}"
        )));
    }
    Ok((
        series.slice(0, b1)?,
        series.slice(b1, b2)?,
        series.slice(b2, t)?,
    ))
}

/// Per-channel z-score statistics fitted on the train split only.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Normalizer {
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
}

impl Normalizer {
    pub fn fit(train: &MultivariateSeries) -> Result<Self> {
        let n = train.len() as f64;
        let mut mean = Vec::with_capacity(train.channels());
        let mut std = Vec::with_capacity(train.channels());
        for c in 0..train.channels() {
            let ch = train.channel(c);
            let m = ch.iter().sum::<f64>() / n;
            let v = ch.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / n;
            if v <= 0.0 {
                return Err(Error::Config(format!(
                    "channel {c} is constant; z-score normalization undefined"
                )));
            }
            mean.push(m);
            std.push(v.sqrt());
        }
        Ok(Self { mean, std })
    }

    pub fn apply(&self, series: &MultivariateSeries) -> Result<MultivariateSeries> {
        self.map(series, |x, m, s| (x - m) / s)
    }

    pub fn invert(&self, series: &MultivariateSeries) -> Result<MultivariateSeries> {
        self.map(series, |x, m, s| x * s + m)
    }

    fn map(
        &self,
        series: &MultivariateSeries,
        f: impl Fn(f64, f64, f64) -> f64,
    ) -> Result<MultivariateSeries> {
        if series.channels() != self.mean.len() {
            return Err(Error::Shape(format!(
                "normalizer fitted on {} channels, series has {}",
                self.mean.len(),
                series.channels()
            )));
        }
        let values = (0..series.channels())
            .map(|c| {
                series
                    .channel(c)
                    .iter()
                    .map(|&x| f(x, self.mean[c], self.std[c]))
                    .collect()
            })
            .collect();
        MultivariateSeries::new(
            values,
            series.timestamps().map(|t| t.to_vec()),
            series.channel_names().map(|n| n.to_vec()),
        )
    }
}

/// Uniform sample without replacement of ceil(fraction * N) windows, keeping
/// the original order.
pub fn subsample_train(
    windows: &[WindowPair],
    fraction: f64,
    rng: &mut RandomSource,
) -> Result<Vec<WindowPair>> {
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(Error::Config(format!(
            "fraction must lie in (0, 1], got {fraction}"
        )));
    }
    if fraction == 1.0 {
        return Ok(windows.to_vec());
    }
    let n = windows.len();
    let k = ((fraction * n as f64).ceil() as usize).min(n);
    // Partial Fisher-Yates picks k indices, then sort restores order.
    let mut indices: Vec<usize> = (0..n).collect();
    for i in 0..k {
        let j = i + rng.index(n - i);
        indices.swap(i, j);
    }
    let mut chosen = indices[..k].to_vec();
    chosen.sort_unstable();
    Ok(chosen.into_iter().map(|i| windows[i].clone()).collect())
}

/// One sinusoidal component of a synthetic channel.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct Tone {
    /// Cycles per step, in (0, 0.5).
    pub freq: f64,
    pub amplitude: f64,
}

/// Recipe for a seed-deterministic synthetic series: per-channel tones with
/// channel-specific phases, a linear trend, and Gaussian noise.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SynthSpec {
    pub length: usize,
    pub channels: usize,
    pub tones: Vec<Tone>,
    pub trend_slope: f64,
    pub noise_std: f64,
    pub seed: u64,
}

impl SynthSpec {
    pub fn validate(&self) -> Result<()> {
        if self.length < 64 {
            return Err(Error::Config(format!(
                "synthetic series needs at least 64 steps, got {}",
                self.length
            )));
        }
        if self.channels == 0 {
            return Err(Error::Config("channels must be at least 1".into()));
        }
        for tone in &self.tones {
            if !(tone.freq > 0.0 && tone.freq < 0.5) {
                return Err(Error::Config(format!(
                    "tone frequency must lie in (0, 0.5), got {}",
                    tone.freq
                )));
            }
        }
        if self.noise_std < 0.0 {
            return Err(Error::Config("noise_std must be non-negative".into()));
        }
        Ok(())
    }
}

pub fn synth_generate(spec: &SynthSpec) -> Result<MultivariateSeries> {
    spec.validate()?;
    let root = RandomSource::new(spec.seed);
    let values = (0..spec.channels)
        .map(|c| {
            let mut rng = root.child(c as u64);
            let phases: Vec<f64> = spec
                .tones
                .iter()
                .map(|_| rng.uniform(0.0, 2.0 * std::f64::consts::PI))
                .collect();
            (0..spec.length)
                .map(|t| {
                    let t = t as f64;
                    let mut v = spec.trend_slope * t;
                    for (tone, phase) in spec.tones.iter().zip(&phases) {
                        v += tone.amplitude
                            * (2.0 * std::f64::consts::PI * tone.freq * t + phase).sin();
                    }
                    if spec.noise_std > 0.0 {
                        v += spec.noise_std * rng.next_normal();
                    }
                    v
                })
                .collect()
        })
        .collect();
    MultivariateSeries::from_values(values)
}

/// Read an ETT-style CSV: header row, first column timestamp or index,
/// remaining columns numeric channels.
pub fn load_csv(path: impl AsRef<Path>) -> Result<MultivariateSeries> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_path(path.as_ref())?;
    let headers = reader.headers()?.clone();
    if headers.len() < 2 {
        return Err(Error::Parse(format!(
            "need a timestamp column plus at least one channel, got {} columns",
            headers.len()
        )));
    }
    let channel_names: Vec<String> = headers.iter().skip(1).map(String::from).collect();
    let c = channel_names.len();

    let mut timestamps = Vec::new();
    let mut values: Vec<Vec<f64>> = vec![Vec::new(); c];
    for (row_idx, record) in reader.records().enumerate() {
        let record = record?;
        if record.len() != c + 1 {
            return Err(Error::Parse(format!(
                "row {} has {} columns, expected {}",
                row_idx + 2,
                record.len(),
                c + 1
            )));
        }
        timestamps.push(record[0].to_string());
        for (col, cell) in record.iter().skip(1).enumerate() {
            let v: f64 = cell.trim().parse().map_err(|_| {
                Error::Parse(format!(
                    "cannot parse {:?} as a number at row {}, column {:?}",
                    cell,
                    row_idx + 2,
                    channel_names[col]
                ))
            })?;
            if !v.is_finite() {
                return Err(Error::Parse(format!(
                    "non-finite value at row {}, column {:?}",
                    row_idx + 2,
                    channel_names[col]
                )));
            }
            values[col].push(v);
        }
    }
    if timestamps.is_empty() {
        return Err(Error::Parse("file contains no data rows".into()));
    }
    MultivariateSeries::new(values, Some(timestamps), Some(channel_names))
}

/// Write a series in the same CSV format. Floats print with the shortest
/// decimal that round-trips exactly.
pub fn write_csv(series: &MultivariateSeries, path: impl AsRef<Path>) -> Result<()> {
    let mut writer = csv::Writer::from_path(path.as_ref())?;
    let mut header = vec!["timestamp".to_string()];
    match series.channel_names() {
        Some(names) => header.extend(names.iter().cloned()),
        None => header.extend((0..series.channels()).map(|c| format!("ch{c}"))),
    }
    writer.write_record(&header)?;
    for t in 0..series.len() {
        let mut row = Vec::with_capacity(series.channels() + 1);
        match series.timestamps() {
            Some(ts) => row.push(ts[t].clone()),
            None => row.push(t.to_string()),
        }
        for c in 0..series.channels() {
            row.push(format!("{}", series.channel(c)[t]));
        }
        writer.write_record(&row)?;
    }
    writer.flush()?;
    Ok(())
}
