//! Empirical Mode Decomposition: iterative sifting of a single channel into
//! intrinsic mode functions plus a residue.
//!
//! The residue is always recomputed as input minus the running IMF sum, so the
//! completeness identity holds to rounding error no matter how sifting went.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::series::WindowPair;
use crate::spline::NaturalCubicSpline;

/// Sifting and termination parameters.
#[derive(Debug, Clone, Serialize)]
pub struct EmdConfig {
    /// Cauchy stopping threshold for the sift loop.
    pub sd_threshold: f64,
    /// Cap on sift iterations per IMF.
    pub max_sift_iters: usize,
    /// Cap on extracted IMFs.
    pub max_imfs: usize,
    /// Stop when residue energy falls below this fraction of input energy.
    pub residue_energy_ratio: f64,
    /// Extrema mirrored across each end before envelope fitting.
    pub boundary_extrema: usize,
}

impl Default for EmdConfig {
    fn default() -> Self {
        Self {
            sd_threshold: 0.2,
            max_sift_iters: 10,
            max_imfs: 10,
            residue_energy_ratio: 1e-10,
            // Two mirrored extrema leave enough envelope drift at the ends to
            // put spurious extrema into the slow modes; four keeps the IMF
            // zero-crossing/extrema counts within one on two-tone signals.
            boundary_extrema: 4,
        }
    }
}

impl EmdConfig {
    pub fn validate(&self) -> Result<()> {
        if self.sd_threshold <= 0.0 {
            return Err(Error::Config("sd_threshold must be positive".into()));
        }
        if self.max_sift_iters == 0 {
            return Err(Error::Config("max_sift_iters must be at least 1".into()));
        }
        if self.max_imfs == 0 {
            return Err(Error::Config("max_imfs must be at least 1".into()));
        }
        if !(self.residue_energy_ratio > 0.0 && self.residue_energy_ratio < 1.0) {
            return Err(Error::Config(
                "residue_energy_ratio must lie in (0, 1)".into(),
            ));
        }
        Ok(())
    }
}

/// Why decomposition stopped extracting IMFs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum StopReason {
    /// The residue no longer has enough extrema to sift.
    TooFewExtrema,
    /// Residue energy dropped below the configured fraction of input energy.
    NegligibleEnergy,
    /// The configured IMF cap was reached.
    MaxImfs,
}

/// Decomposition of one channel: IMFs ordered highest frequency first, plus residue.
#[derive(Debug, Clone, Serialize)]
pub struct ChannelDecomposition {
    pub imfs: Vec<Vec<f64>>,
    pub residue: Vec<f64>,
    pub source_length: usize,
    pub stop_reason: StopReason,
}

/// Per-channel decompositions of one window.
#[derive(Debug, Clone, Serialize)]
pub struct Decomposition {
    pub channels: Vec<ChannelDecomposition>,
}

impl Decomposition {
    pub fn source_length(&self) -> usize {
        self.channels.first().map_or(0, |c| c.source_length)
    }
}

/// Which slice of a window to decompose.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum WindowPart {
    History,
    Future,
    Full,
}

/// Strict interior local maxima and minima, in increasing index order.
///
/// A flat plateau that is a local extremum contributes its midpoint index,
/// rounded down. Signals shorter than 3 steps have no interior extrema.
pub fn find_extrema(signal: &[f64]) -> (Vec<usize>, Vec<usize>) {
    let n = signal.len();
    let mut maxima = Vec::new();
    let mut minima = Vec::new();
    if n < 3 {
        return (maxima, minima);
    }

    // Compress equal-value runs, then classify each interior run.
    let mut runs: Vec<(usize, usize)> = Vec::new(); // (start, end) inclusive
    let mut start = 0;
    for i in 1..n {
        if signal[i] != signal[start] {
            runs.push((start, i - 1));
            start = i;
        }
    }
    runs.push((start, n - 1));

    for r in 1..runs.len().saturating_sub(1) {
        let (s, e) = runs[r];
        let v = signal[s];
        let prev = signal[runs[r - 1].1];
        let next = signal[runs[r + 1].0];
        let mid = (s + e) / 2;
        if v > prev && v > next {
            maxima.push(mid);
        } else if v < prev && v < next {
            minima.push(mid);
        }
    }
    (maxima, minima)
}

/// Envelope through the given extrema, evaluated at every integer 0..L-1.
///
/// `boundary_extrema` extrema are mirrored across each end of the signal
/// before fitting so the spline does not swing freely at the boundaries.
pub fn envelope(signal: &[f64], extrema: &[usize], cfg: &EmdConfig) -> Result<Vec<f64>> {
    if extrema.len() < 2 {
        return Err(Error::DegenerateEnvelope(format!(
            "envelope needs at least 2 extrema, got {}",
            extrema.len()
        )));
    }
    let last = (signal.len() - 1) as f64;
    let mut knots: Vec<(f64, f64)> = extrema
        .iter()
        .map(|&i| (i as f64, signal[i]))
        .collect();

    // Mirror across x = 0 and x = last.
    let originals = knots.clone();
    let m = cfg.boundary_extrema;
    for &(x, y) in originals.iter().filter(|&&(x, _)| x > 0.0).take(m) {
        knots.push((-x, y));
    }
    for &(x, y) in originals.iter().rev().filter(|&&(x, _)| x < last).take(m) {
        knots.push((2.0 * last - x, y));
    }

    knots.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    knots.dedup_by(|a, b| a.0 == b.0);

    let (xs, ys): (Vec<f64>, Vec<f64>) = knots.into_iter().unzip();
    let spline = NaturalCubicSpline::fit(xs, ys)?;
    Ok((0..signal.len()).map(|t| spline.eval(t as f64)).collect())
}

/// Result of one sift: the candidate IMF and whether sifting was cut short by
/// a degenerate envelope.
#[derive(Debug, Clone)]
pub struct SiftOutcome {
    pub imf: Vec<f64>,
    pub terminated: bool,
}

/// One round of sifting: subtract the mean extrema envelope until the Cauchy
/// criterion falls below `sd_threshold` or the iteration cap is hit.
pub fn sift(signal: &[f64], cfg: &EmdConfig) -> SiftOutcome {
    let mut h = signal.to_vec();
    for _ in 0..cfg.max_sift_iters {
        let (maxima, minima) = find_extrema(&h);
        if maxima.len() < 2 || minima.len() < 2 {
            return SiftOutcome {
                imf: h,
                terminated: true,
            };
        }
        let upper = match envelope(&h, &maxima, cfg) {
            Ok(e) => e,
            Err(_) => {
                return SiftOutcome {
                    imf: h,
                    terminated: true,
                }
            }
        };
        let lower = match envelope(&h, &minima, cfg) {
            Ok(e) => e,
            Err(_) => {
                return SiftOutcome {
                    imf: h,
                    terminated: true,
                }
            }
        };

        let mut num = 0.0;
        let mut den = 0.0;
        for t in 0..h.len() {
            let mean = 0.5 * (upper[t] + lower[t]);
            num += mean * mean;
            den += h[t] * h[t];
        }
        // SD between h_k and h_{k+1} equals |mean envelope|^2 / |h_k|^2.
        // Checked before subtracting: a candidate already below threshold is
        // an IMF as it stands, so a pure tone passes through unchanged.
        let sd = if den > 0.0 { num / den } else { 0.0 };
        if sd < cfg.sd_threshold {
            break;
        }
        for t in 0..h.len() {
            h[t] -= 0.5 * (upper[t] + lower[t]);
        }
    }
    SiftOutcome {
        imf: h,
        terminated: false,
    }
}

fn energy(signal: &[f64]) -> f64 {
    signal.iter().map(|v| v * v).sum()
}

/// Full decomposition of one signal into IMFs plus residue.
pub fn decompose(signal: &[f64], cfg: &EmdConfig) -> ChannelDecomposition {
    let input_energy = energy(signal);
    let mut imfs: Vec<Vec<f64>> = Vec::new();
    let mut residue = signal.to_vec();
    let stop_reason;
    loop {
        if imfs.len() >= cfg.max_imfs {
            stop_reason = StopReason::MaxImfs;
            break;
        }
        let (maxima, minima) = find_extrema(&residue);
        if maxima.len() < 2 || minima.len() < 2 {
            stop_reason = StopReason::TooFewExtrema;
            break;
        }
        if energy(&residue) < cfg.residue_energy_ratio * input_energy {
            stop_reason = StopReason::NegligibleEnergy;
            break;
        }
        let outcome = sift(&residue, cfg);
        imfs.push(outcome.imf);
        // Exact bookkeeping: residue is always input minus the IMF sum.
        residue = signal.to_vec();
        for imf in &imfs {
            for (r, v) in residue.iter_mut().zip(imf) {
                *r -= v;
            }
        }
    }
    ChannelDecomposition {
        imfs,
        residue,
        source_length: signal.len(),
        stop_reason,
    }
}

/// Per-channel decomposition of the selected slice of a window.
pub fn decompose_window(window: &WindowPair, part: WindowPart, cfg: &EmdConfig) -> Decomposition {
    let channels = (0..window.channels())
        .map(|c| {
            let signal: Vec<f64> = match part {
                WindowPart::History => window.history[c].clone(),
                WindowPart::Future => window.future[c].clone(),
                WindowPart::Full => window.full_channel(c),
            };
            decompose(&signal, cfg)
        })
        .collect();
    Decomposition { channels }
}

/// Zero crossings counted as sign changes, treating exact zeros as boundaries.
pub fn count_zero_crossings(signal: &[f64]) -> usize {
    let mut count = 0;
    let mut prev_sign = 0i8;
    for &v in signal {
        let sign = if v > 0.0 {
            1
        } else if v < 0.0 {
            -1
        } else {
            0
        };
        if sign != 0 {
            if prev_sign != 0 && sign != prev_sign {
                count += 1;
            }
            prev_sign = sign;
        }
    }
    count
}
