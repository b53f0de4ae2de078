//! End-to-end experiment runner: split, normalize, window, subsample,
//! precompute, train with augmentation in the loop, evaluate on raw test
//! windows. Shared by the CLI and the acceptance suite.

use serde::Serialize;

use crate::augment::{precompute, staug_sample, AugmentConfig, DecompositionCache};
use crate::baseline::{moving_average_filter, segment_permutation};
use crate::data::{split, Normalizer, SplitSpec};
use crate::emd::{EmdConfig, WindowPart};
use crate::error::{Error, Result};
use crate::forecaster::{
    evaluate, train, Augmenter, IdentityAugmenter, LinearForecastModel, Metrics, TrainConfig,
};
use crate::sampling::RandomSource;
use crate::series::{enumerate_windows, MultivariateSeries, WindowPair};

/// Augmentation method selected on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum AugMethod {
    None,
    Staug,
    StaugNofreq,
    StaugNotime,
    Filter,
    Permute,
}

impl AugMethod {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "none" => Ok(Self::None),
            "staug" => Ok(Self::Staug),
            "staug-nofreq" => Ok(Self::StaugNofreq),
            "staug-notime" => Ok(Self::StaugNotime),
            "filter" => Ok(Self::Filter),
            "permute" => Ok(Self::Permute),
            other => Err(Error::Config(format!(
                "unknown augmentation method {other:?}; expected none|staug|staug-nofreq|staug-notime|filter|permute"
            ))),
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Self::None => "none",
            Self::Staug => "staug",
            Self::StaugNofreq => "staug-nofreq",
            Self::StaugNotime => "staug-notime",
            Self::Filter => "filter",
            Self::Permute => "permute",
        }
    }
}

/// Full configuration of one train/evaluate run.
#[derive(Debug, Clone, Serialize)]
pub struct ExperimentConfig {
    pub context: usize,
    pub horizon: usize,
    pub stride: usize,
    pub aug: AugMethod,
    pub alpha: f64,
    pub weight_low: f64,
    pub weight_high: f64,
    pub train_fraction: f64,
    pub seed: u64,
    pub epochs: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    pub lr_decay: f64,
    pub split: SplitSpec,
    pub emd: EmdConfig,
    pub emd_part: WindowPart,
    pub filter_kernel: usize,
    pub permute_segments: usize,
}

impl ExperimentConfig {
    pub fn new(context: usize, horizon: usize, aug: AugMethod, seed: u64) -> Self {
        Self {
            context,
            horizon,
            stride: 1,
            aug,
            alpha: 0.5,
            weight_low: 0.0,
            weight_high: 2.0,
            train_fraction: 1.0,
            seed,
            epochs: 10,
            batch_size: 32,
            learning_rate: 1e-4,
            lr_decay: 0.5,
            split: SplitSpec::default(),
            emd: EmdConfig::default(),
            emd_part: WindowPart::Full,
            filter_kernel: 9,
            permute_segments: 8,
        }
    }

    fn augment_config(&self) -> AugmentConfig {
        AugmentConfig {
            weight_low: self.weight_low,
            weight_high: self.weight_high,
            alpha: self.alpha,
            enable_freq: !matches!(self.aug, AugMethod::StaugNofreq),
            enable_time: !matches!(self.aug, AugMethod::StaugNotime),
            ..Default::default()
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ExperimentResult {
    pub metrics: Metrics,
    pub loss_trace: Vec<f64>,
    pub n_train_windows: usize,
    pub n_test_windows: usize,
    #[serde(skip)]
    pub model: LinearForecastModel,
}

struct StaugAugmenter<'a> {
    windows: &'a [WindowPair],
    cache: &'a DecompositionCache,
    cfg: AugmentConfig,
    base: RandomSource,
    counter: u64,
}

impl Augmenter for StaugAugmenter<'_> {
    fn augment(&mut self, index: usize) -> Result<WindowPair> {
        // Fresh child source per call: draws are never reused across epochs.
        let mut rng = self.base.child(self.counter);
        self.counter += 1;
        staug_sample(index, self.windows, self.cache, 0, &self.cfg, &mut rng)
    }
}

struct FilterAugmenter<'a> {
    windows: &'a [WindowPair],
    kernel: usize,
}

impl Augmenter for FilterAugmenter<'_> {
    fn augment(&mut self, index: usize) -> Result<WindowPair> {
        moving_average_filter(&self.windows[index], self.kernel)
    }
}

struct PermuteAugmenter<'a> {
    windows: &'a [WindowPair],
    segments: usize,
    base: RandomSource,
    counter: u64,
}

impl Augmenter for PermuteAugmenter<'_> {
    fn augment(&mut self, index: usize) -> Result<WindowPair> {
        let mut rng = self.base.child(self.counter);
        self.counter += 1;
        segment_permutation(&self.windows[index], self.segments, &mut rng)
    }
}

fn require_window_capacity(name: &str, len: usize, needed: usize) -> Result<()> {
    if len < needed {
        return Err(Error::Config(format!(
            "{name} split has {len} steps but a single window needs {needed}"
        )));
    }
    Ok(())
}

/// Run the whole protocol on one series and return test-set metrics.
pub fn run_experiment(
    series: &MultivariateSeries,
    cfg: &ExperimentConfig,
) -> Result<ExperimentResult> {
    cfg.emd.validate()?;
    cfg.augment_config().validate()?;
    let needed = cfg.context + cfg.horizon;

    let (train_series, val_series, test_series) = split(series, &cfg.split)?;
    require_window_capacity("train", train_series.len(), needed)?;
    require_window_capacity("validation", val_series.len(), needed)?;
    require_window_capacity("test", test_series.len(), needed)?;

    let normalizer = Normalizer::fit(&train_series)?;
    let train_norm = normalizer.apply(&train_series)?;
    let test_norm = normalizer.apply(&test_series)?;

    let all_train = enumerate_windows(&train_norm, cfg.context, cfg.horizon, cfg.stride)?;
    let test_windows = enumerate_windows(&test_norm, cfg.context, cfg.horizon, cfg.stride)?;

    let root = RandomSource::new(cfg.seed);
    let train_windows = crate::data::subsample_train(&all_train, cfg.train_fraction, &mut root.child(1))?;

    let cache = match cfg.aug {
        AugMethod::Staug | AugMethod::StaugNotime => {
            precompute(0, &train_windows, cfg.emd_part, &cfg.emd)
        }
        _ => DecompositionCache::new(),
    };

    let aug_base = root.child(2);
    let mut staug;
    let mut identity;
    let mut filter;
    let mut permute;
    let augmenter: &mut dyn Augmenter = match cfg.aug {
        AugMethod::None => {
            identity = IdentityAugmenter {
                windows: &train_windows,
            };
            &mut identity
        }
        AugMethod::Staug | AugMethod::StaugNofreq | AugMethod::StaugNotime => {
            staug = StaugAugmenter {
                windows: &train_windows,
                cache: &cache,
                cfg: cfg.augment_config(),
                base: aug_base,
                counter: 0,
            };
            &mut staug
        }
        AugMethod::Filter => {
            filter = FilterAugmenter {
                windows: &train_windows,
                kernel: cfg.filter_kernel,
            };
            &mut filter
        }
        AugMethod::Permute => {
            permute = PermuteAugmenter {
                windows: &train_windows,
                segments: cfg.permute_segments,
                base: aug_base,
                counter: 0,
            };
            &mut permute
        }
    };

    let mut model =
        LinearForecastModel::zeros(series.channels(), cfg.context, cfg.horizon);
    let train_cfg = TrainConfig {
        learning_rate: cfg.learning_rate,
        decay: cfg.lr_decay,
        epochs: cfg.epochs,
        batch_size: cfg.batch_size,
        seed: cfg.seed,
    };
    let loss_trace = train(&mut model, train_windows.len(), augmenter, &train_cfg)?;
    let metrics = evaluate(&model, &test_windows)?;

    Ok(ExperimentResult {
        metrics,
        loss_trace,
        n_train_windows: train_windows.len(),
        n_test_windows: test_windows.len(),
        model,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{synth_generate, SynthSpec, Tone};

    fn test_series() -> MultivariateSeries {
        synth_generate(&SynthSpec {
            length: 600,
            channels: 2,
            tones: vec![
                Tone {
                    freq: 0.05,
                    amplitude: 1.0,
                },
                Tone {
                    freq: 0.2,
                    amplitude: 0.5,
                },
            ],
            trend_slope: 0.002,
            noise_std: 0.2,
            seed: 3,
        })
        .unwrap()
    }

    fn quick_cfg(aug: AugMethod, seed: u64) -> ExperimentConfig {
        let mut cfg = ExperimentConfig::new(24, 24, aug, seed);
        cfg.epochs = 3;
        cfg.learning_rate = 1e-3;
        cfg
    }

    #[test]
    fn all_methods_run_and_are_deterministic() {
        let series = test_series();
        for method in [
            AugMethod::None,
            AugMethod::Staug,
            AugMethod::StaugNofreq,
            AugMethod::StaugNotime,
            AugMethod::Filter,
            AugMethod::Permute,
        ] {
            let a = run_experiment(&series, &quick_cfg(method, 1)).unwrap();
            let b = run_experiment(&series, &quick_cfg(method, 1)).unwrap();
            assert_eq!(a.metrics, b.metrics, "{method:?} not deterministic");
            assert!(a.metrics.mse.is_finite());
        }
    }

    #[test]
    fn ablation_variants_differ() {
        let series = test_series();
        let staug = run_experiment(&series, &quick_cfg(AugMethod::Staug, 1)).unwrap();
        let nofreq = run_experiment(&series, &quick_cfg(AugMethod::StaugNofreq, 1)).unwrap();
        let notime = run_experiment(&series, &quick_cfg(AugMethod::StaugNotime, 1)).unwrap();
        assert_ne!(staug.metrics, nofreq.metrics);
        assert_ne!(staug.metrics, notime.metrics);
        assert_ne!(nofreq.metrics, notime.metrics);
    }

    #[test]
    fn horizon_too_long_is_config_error_before_training() {
        let series = test_series();
        let cfg = ExperimentConfig::new(96, 720, AugMethod::None, 0);
        assert!(matches!(
            run_experiment(&series, &cfg),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn aug_method_parsing() {
        assert_eq!(AugMethod::parse("staug-nofreq").unwrap(), AugMethod::StaugNofreq);
        assert!(AugMethod::parse("bogus").is_err());
        for m in ["none", "staug", "staug-notime", "filter", "permute"] {
            assert_eq!(AugMethod::parse(m).unwrap().as_str(), m);
        }
    }
}
