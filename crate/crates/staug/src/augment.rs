//! The augmentation pipeline: frequency-domain recombination of decomposed
//! windows followed by time-domain mix-up of two recombined windows.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::emd::{decompose_window, ChannelDecomposition, Decomposition, EmdConfig, WindowPart};
use crate::error::{Error, Result};
use crate::sampling::{draw_lambda, draw_weights, RandomSource, WeightVector};
use crate::series::WindowPair;

/// What to do with the residue when recombining.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ResiduePolicy {
    /// Re-attach the residue with weight 1 (keeps the trend level).
    FixedOne,
    /// Draw the residue weight from the same U(a, b) as the IMF weights.
    Weighted,
    /// Leave the residue out entirely.
    Dropped,
}

/// Every stochastic knob of the pipeline.
#[derive(Debug, Clone, Serialize)]
pub struct AugmentConfig {
    pub weight_low: f64,
    pub weight_high: f64,
    pub alpha: f64,
    pub residue_policy: ResiduePolicy,
    pub enable_freq: bool,
    pub enable_time: bool,
}

impl Default for AugmentConfig {
    fn default() -> Self {
        Self {
            weight_low: 0.0,
            weight_high: 2.0,
            alpha: 0.5,
            residue_policy: ResiduePolicy::FixedOne,
            enable_freq: true,
            enable_time: true,
        }
    }
}

impl AugmentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.weight_low >= self.weight_high {
            return Err(Error::Config(format!(
                "weight bounds must satisfy low < high, got [{}, {})",
                self.weight_low, self.weight_high
            )));
        }
        if self.alpha <= 0.0 {
            return Err(Error::Config(format!(
                "alpha must be positive, got {}",
                self.alpha
            )));
        }
        Ok(())
    }
}

/// Precomputed decompositions keyed by (series id, window offset).
#[derive(Debug, Default)]
pub struct DecompositionCache {
    entries: HashMap<(u64, usize), Decomposition>,
}

impl DecompositionCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, series_id: u64, offset: usize, dec: Decomposition) {
        self.entries.insert((series_id, offset), dec);
    }

    pub fn get(&self, series_id: u64, offset: usize) -> Result<&Decomposition> {
        self.entries
            .get(&(series_id, offset))
            .ok_or(Error::CacheMiss { series_id, offset })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// One decomposition per window, keyed by source offset. Channels and windows
/// decompose in parallel; content is deterministic either way.
pub fn precompute(
    series_id: u64,
    windows: &[WindowPair],
    part: WindowPart,
    cfg: &EmdConfig,
) -> DecompositionCache {
    let decs: Vec<(usize, Decomposition)> = windows
        .par_iter()
        .map(|wp| (wp.source_offset, decompose_window(wp, part, cfg)))
        .collect();
    let mut cache = DecompositionCache::new();
    for (offset, dec) in decs {
        cache.insert(series_id, offset, dec);
    }
    cache
}

/// Weighted IMF sum for one channel, plus the residue per policy.
pub fn recombine(
    dec: &ChannelDecomposition,
    w: &WeightVector,
    policy: ResiduePolicy,
) -> Result<Vec<f64>> {
    if w.weights.len() != dec.imfs.len() {
        return Err(Error::Shape(format!(
            "{} weights for {} IMFs",
            w.weights.len(),
            dec.imfs.len()
        )));
    }
    let residue_weight = match policy {
        ResiduePolicy::FixedOne => 1.0,
        ResiduePolicy::Weighted => w.residue_weight,
        ResiduePolicy::Dropped => 0.0,
    };
    let mut out: Vec<f64> = dec.residue.iter().map(|r| r * residue_weight).collect();
    for (wi, imf) in w.weights.iter().zip(&dec.imfs) {
        for (o, v) in out.iter_mut().zip(imf) {
            *o += wi * v;
        }
    }
    Ok(out)
}

fn draw_channel_weights(
    n: usize,
    cfg: &AugmentConfig,
    rng: &mut RandomSource,
) -> Result<WeightVector> {
    let mut w = draw_weights(n, cfg.weight_low, cfg.weight_high, rng)?;
    if cfg.residue_policy == ResiduePolicy::Weighted {
        w.residue_weight = rng.uniform(cfg.weight_low, cfg.weight_high);
    }
    Ok(w)
}

/// Recombine every channel of a window with fresh random weights and re-split
/// at the history boundary. A no-op when the frequency stage is disabled.
pub fn freq_augment(
    window: &WindowPair,
    dec: &Decomposition,
    cfg: &AugmentConfig,
    rng: &mut RandomSource,
) -> Result<WindowPair> {
    let (wp, _) = freq_augment_traced(window, dec, cfg, rng)?;
    Ok(wp)
}

fn freq_augment_traced(
    window: &WindowPair,
    dec: &Decomposition,
    cfg: &AugmentConfig,
    rng: &mut RandomSource,
) -> Result<(WindowPair, Vec<WeightVector>)> {
    if !cfg.enable_freq {
        return Ok((window.clone(), Vec::new()));
    }
    if dec.channels.len() != window.channels() {
        return Err(Error::Shape(format!(
            "decomposition has {} channels, window has {}",
            dec.channels.len(),
            window.channels()
        )));
    }
    let d = window.history_len();
    let h = window.future_len();
    let full = dec.source_length() == d + h;
    if !full && dec.source_length() != d {
        return Err(Error::Shape(format!(
            "decomposition length {} matches neither window ({}) nor history ({})",
            dec.source_length(),
            d + h,
            d
        )));
    }

    let mut history = Vec::with_capacity(window.channels());
    let mut future = Vec::with_capacity(window.channels());
    let mut traces = Vec::with_capacity(window.channels());
    for (c, ch_dec) in dec.channels.iter().enumerate() {
        let w = draw_channel_weights(ch_dec.imfs.len(), cfg, rng)?;
        let recombined = recombine(ch_dec, &w, cfg.residue_policy)?;
        traces.push(w);
        if full {
            history.push(recombined[..d].to_vec());
            future.push(recombined[d..].to_vec());
        } else {
            // History-only decomposition: future passes through unchanged.
            history.push(recombined);
            future.push(window.future[c].clone());
        }
    }
    Ok((
        WindowPair::new(history, future, window.source_offset)?,
        traces,
    ))
}

/// Convex combination of two windows with the same lambda applied to every
/// channel and to both history and future.
pub fn mixup(wp_i: &WindowPair, wp_j: &WindowPair, lambda: f64) -> Result<WindowPair> {
    if !wp_i.same_shape(wp_j) {
        return Err(Error::Shape(format!(
            "mixup operands differ in shape: ({}, {}, {}) vs ({}, {}, {})",
            wp_i.channels(),
            wp_i.history_len(),
            wp_i.future_len(),
            wp_j.channels(),
            wp_j.history_len(),
            wp_j.future_len()
        )));
    }
    if !(0.0..=1.0).contains(&lambda) {
        return Err(Error::Config(format!(
            "lambda must lie in [0, 1], got {lambda}"
        )));
    }
    let mix = |a: &[Vec<f64>], b: &[Vec<f64>]| -> Vec<Vec<f64>> {
        a.iter()
            .zip(b)
            .map(|(ca, cb)| {
                ca.iter()
                    .zip(cb)
                    .map(|(x, y)| lambda * x + (1.0 - lambda) * y)
                    .collect()
            })
            .collect()
    };
    WindowPair::new(
        mix(&wp_i.history, &wp_j.history),
        mix(&wp_i.future, &wp_j.future),
        wp_i.source_offset,
    )
}

/// Audit record of one augmented sample: which partner was drawn, the mix-up
/// coefficient, and the per-channel weight vectors.
#[derive(Debug, Clone, Serialize)]
pub struct SampleTrace {
    pub index: usize,
    pub source_offset: usize,
    pub partner_index: usize,
    pub partner_offset: usize,
    pub lambda: Option<f64>,
    pub weights: Vec<WeightVector>,
    pub partner_weights: Vec<WeightVector>,
}

/// One full STAug sample for training window `index`: frequency-recombine the
/// window and a uniformly drawn partner, then mix the pair.
///
/// With the time stage off this is frequency augmentation of window `index`
/// alone; with the frequency stage off the raw windows are mixed.
pub fn staug_sample(
    index: usize,
    dataset: &[WindowPair],
    cache: &DecompositionCache,
    series_id: u64,
    cfg: &AugmentConfig,
    rng: &mut RandomSource,
) -> Result<WindowPair> {
    let (wp, _) = staug_sample_traced(index, dataset, cache, series_id, cfg, rng)?;
    Ok(wp)
}

/// As [`staug_sample`], but also returns the audit trace.
pub fn staug_sample_traced(
    index: usize,
    dataset: &[WindowPair],
    cache: &DecompositionCache,
    series_id: u64,
    cfg: &AugmentConfig,
    rng: &mut RandomSource,
) -> Result<(WindowPair, SampleTrace)> {
    if dataset.is_empty() {
        return Err(Error::Config("dataset must be non-empty".into()));
    }
    if index >= dataset.len() {
        return Err(Error::Bounds(format!(
            "window index {index} outside dataset of {} windows",
            dataset.len()
        )));
    }
    cfg.validate()?;
    let wp_i = &dataset[index];

    if !cfg.enable_time {
        let (out, weights) = if cfg.enable_freq {
            let dec = cache.get(series_id, wp_i.source_offset)?;
            freq_augment_traced(wp_i, dec, cfg, rng)?
        } else {
            (wp_i.clone(), Vec::new())
        };
        let trace = SampleTrace {
            index,
            source_offset: wp_i.source_offset,
            partner_index: index,
            partner_offset: wp_i.source_offset,
            lambda: None,
            weights,
            partner_weights: Vec::new(),
        };
        return Ok((out, trace));
    }

    // Partner drawn with replacement; self-pairing allowed.
    let j = rng.index(dataset.len());
    let wp_j = &dataset[j];

    let (aug_i, weights_i, aug_j, weights_j) = if cfg.enable_freq {
        let dec_i = cache.get(series_id, wp_i.source_offset)?;
        let dec_j = cache.get(series_id, wp_j.source_offset)?;
        let (ai, wi) = freq_augment_traced(wp_i, dec_i, cfg, rng)?;
        let (aj, wj) = freq_augment_traced(wp_j, dec_j, cfg, rng)?;
        (ai, wi, aj, wj)
    } else {
        (wp_i.clone(), Vec::new(), wp_j.clone(), Vec::new())
    };

    let lambda = draw_lambda(cfg.alpha, rng)?;
    let out = mixup(&aug_i, &aug_j, lambda)?;
    let trace = SampleTrace {
        index,
        source_offset: wp_i.source_offset,
        partner_index: j,
        partner_offset: wp_j.source_offset,
        lambda: Some(lambda),
        weights: weights_i,
        partner_weights: weights_j,
    };
    Ok((out, trace))
}
