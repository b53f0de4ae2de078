use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use staug::augment::{precompute, staug_sample_traced, AugmentConfig, SampleTrace};
use staug::baseline::{moving_average_filter, segment_permutation};
use staug::data::{load_csv, synth_generate, SynthSpec, Tone};
use staug::emd::{decompose, EmdConfig, WindowPart};
use staug::error::{Error, Result};
use staug::manifest::{hash_file, InputSpec, RunManifest};
use staug::pipeline::{run_experiment, AugMethod, ExperimentConfig};
use staug::sampling::RandomSource;
use staug::series::{enumerate_windows, MultivariateSeries};

#[derive(Parser)]
#[command(name = "staug", version, about = "Spectral and time augmentation for time-series forecasting")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decompose a series into per-channel IMF CSV files.
    Decompose(DecomposeArgs),
    /// Emit augmented windows plus an audit manifest.
    Augment(AugmentArgs),
    /// Train the linear forecaster with augmentation in the loop and evaluate.
    TrainEval(TrainEvalArgs),
    /// Side-by-side CSV of original, filtered, permuted, and staug windows.
    Compare(CompareArgs),
}

#[derive(Args)]
struct EmdFlags {
    /// Cauchy stopping threshold for sifting.
    #[arg(long, default_value_t = 0.2)]
    sd_threshold: f64,
    #[arg(long, default_value_t = 10)]
    max_sift_iters: usize,
    #[arg(long, default_value_t = 10)]
    max_imfs: usize,
}

impl EmdFlags {
    fn config(&self) -> EmdConfig {
        EmdConfig {
            sd_threshold: self.sd_threshold,
            max_sift_iters: self.max_sift_iters,
            max_imfs: self.max_imfs,
            ..Default::default()
        }
    }
}

#[derive(Args)]
struct DecomposeArgs {
    /// Input CSV (header row, timestamp column, numeric channels).
    #[arg(long)]
    input: PathBuf,
    /// Decompose only this channel index; all channels when omitted.
    #[arg(long)]
    channel: Option<usize>,
    #[arg(long)]
    out_dir: PathBuf,
    #[command(flatten)]
    emd: EmdFlags,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct AugmentArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value_t = 96)]
    context: usize,
    #[arg(long, default_value_t = 96)]
    horizon: usize,
    /// Number of augmented windows to emit.
    #[arg(long, default_value_t = 8)]
    count: usize,
    #[arg(long, default_value_t = 0.5)]
    alpha: f64,
    #[arg(long, default_value_t = 0.0)]
    weight_low: f64,
    #[arg(long, default_value_t = 2.0)]
    weight_high: f64,
    /// Disable the frequency-domain stage.
    #[arg(long)]
    no_freq: bool,
    /// Disable the time-domain mix-up stage.
    #[arg(long)]
    no_time: bool,
    #[arg(long)]
    out_dir: PathBuf,
    #[command(flatten)]
    emd: EmdFlags,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct TrainEvalArgs {
    /// Input CSV; mutually exclusive with --synth.
    #[arg(long, conflicts_with = "synth")]
    input: Option<PathBuf>,
    /// Generate a synthetic series instead of reading a file.
    #[arg(long)]
    synth: bool,
    #[arg(long, default_value_t = 2000)]
    synth_length: usize,
    #[arg(long, default_value_t = 7)]
    synth_channels: usize,
    #[arg(long, default_value_t = 0.3)]
    synth_noise: f64,
    #[arg(long, default_value_t = 96)]
    context: usize,
    #[arg(long, default_value_t = 96)]
    horizon: usize,
    /// Step between consecutive training/evaluation windows.
    #[arg(long, default_value_t = 1)]
    stride: usize,
    /// none | staug | staug-nofreq | staug-notime | filter | permute
    #[arg(long, default_value = "none")]
    aug: String,
    #[arg(long, default_value_t = 0.5)]
    alpha: f64,
    #[arg(long, default_value_t = 0.0)]
    weight_low: f64,
    #[arg(long, default_value_t = 2.0)]
    weight_high: f64,
    /// Fraction of training windows kept (scarcity study).
    #[arg(long, default_value_t = 1.0)]
    train_fraction: f64,
    #[arg(long, default_value_t = 10)]
    epochs: usize,
    #[arg(long, default_value_t = 1e-4)]
    lr: f64,
    #[arg(long, default_value_t = 0.5)]
    lr_decay: f64,
    #[arg(long, default_value_t = 32)]
    batch_size: usize,
    /// Independent runs with seeds seed, seed+1, ...
    #[arg(long, default_value_t = 1)]
    runs: usize,
    /// Worker threads for decomposition precompute (0 = all cores).
    #[arg(long, default_value_t = 0)]
    jobs: usize,
    #[arg(long)]
    out_dir: PathBuf,
    #[command(flatten)]
    emd: EmdFlags,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct CompareArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value_t = 96)]
    context: usize,
    #[arg(long, default_value_t = 96)]
    horizon: usize,
    /// Channel written to the long-format CSV.
    #[arg(long, default_value_t = 0)]
    channel: usize,
    /// Window offset to compare at.
    #[arg(long, default_value_t = 0)]
    offset: usize,
    #[arg(long, default_value_t = 9)]
    filter_kernel: usize,
    #[arg(long, default_value_t = 8)]
    permute_segments: usize,
    #[arg(long)]
    out_dir: PathBuf,
    #[command(flatten)]
    emd: EmdFlags,
    #[arg(long)]
    seed: Option<u64>,
}

fn resolve_seed(flag: Option<u64>) -> u64 {
    flag.or_else(|| {
        std::env::var("STAUG_SEED")
            .ok()
            .and_then(|s| s.parse().ok())
    })
    .unwrap_or(0)
}

fn file_input(path: &Path) -> Result<InputSpec> {
    Ok(InputSpec::File {
        path: path.display().to_string(),
        sha256: hash_file(path)?,
    })
}

fn load_input(path: &Path) -> Result<MultivariateSeries> {
    if !path.exists() {
        return Err(Error::Config(format!(
            "input file {} does not exist",
            path.display()
        )));
    }
    load_csv(path)
}

fn cmd_decompose(args: &DecomposeArgs) -> Result<()> {
    let seed = resolve_seed(args.seed);
    let series = load_input(&args.input)?;
    let channels: Vec<usize> = match args.channel {
        Some(c) => {
            if c >= series.channels() {
                return Err(Error::Config(format!(
                    "channel {c} out of range: series has {} channels",
                    series.channels()
                )));
            }
            vec![c]
        }
        None => (0..series.channels()).collect(),
    };
    let cfg = args.emd.config();
    cfg.validate()?;
    std::fs::create_dir_all(&args.out_dir)?;

    let mut imf_counts = Vec::new();
    for &c in &channels {
        let dec = decompose(series.channel(c), &cfg);
        imf_counts.push(dec.imfs.len());
        let path = args.out_dir.join(format!("channel_{c}.csv"));
        let mut writer = csv::Writer::from_path(&path)?;
        let mut header: Vec<String> =
            (1..=dec.imfs.len()).map(|i| format!("imf_{i}")).collect();
        header.push("residue".into());
        writer.write_record(&header)?;
        for t in 0..dec.source_length {
            let mut row: Vec<String> =
                dec.imfs.iter().map(|imf| format!("{}", imf[t])).collect();
            row.push(format!("{}", dec.residue[t]));
            writer.write_record(&row)?;
        }
        writer.flush()?;
    }

    let mut manifest = RunManifest::new(
        "decompose",
        seed,
        file_input(&args.input)?,
        serde_json::json!({ "emd": cfg, "channels": channels }),
    );
    manifest.outputs = Some(serde_json::json!({ "imf_counts": imf_counts }));
    manifest.write(args.out_dir.join("manifest.json"))?;
    println!("decomposed {} channel(s) into {}", channels.len(), args.out_dir.display());
    Ok(())
}

#[derive(Serialize)]
struct AugmentOutputs {
    samples: Vec<SampleTrace>,
    files: Vec<String>,
}

fn cmd_augment(args: &AugmentArgs) -> Result<()> {
    let seed = resolve_seed(args.seed);
    let series = load_input(&args.input)?;
    let cfg = AugmentConfig {
        weight_low: args.weight_low,
        weight_high: args.weight_high,
        alpha: args.alpha,
        enable_freq: !args.no_freq,
        enable_time: !args.no_time,
        ..Default::default()
    };
    cfg.validate()?;
    let emd_cfg = args.emd.config();
    emd_cfg.validate()?;

    let windows = enumerate_windows(&series, args.context, args.horizon, 1)?;
    if windows.is_empty() {
        return Err(Error::Config(format!(
            "series of length {} cannot host a window of {} + {} steps",
            series.len(),
            args.context,
            args.horizon
        )));
    }
    let cache = if cfg.enable_freq {
        precompute(0, &windows, WindowPart::Full, &emd_cfg)
    } else {
        Default::default()
    };

    std::fs::create_dir_all(&args.out_dir)?;
    let root = RandomSource::new(seed);
    let mut traces = Vec::with_capacity(args.count);
    let mut files = Vec::with_capacity(args.count);
    for k in 0..args.count {
        let mut rng = root.child(k as u64);
        let index = k % windows.len();
        let (wp, trace) = staug_sample_traced(index, &windows, &cache, 0, &cfg, &mut rng)?;
        let name = format!("aug_{k:04}.csv");
        let path = args.out_dir.join(&name);
        let mut writer = csv::Writer::from_path(&path)?;
        let mut header = vec!["step".to_string(), "part".to_string()];
        header.extend((0..wp.channels()).map(|c| format!("ch{c}")));
        writer.write_record(&header)?;
        for t in 0..wp.history_len() + wp.future_len() {
            let (part, col) = if t < wp.history_len() {
                ("history", t)
            } else {
                ("future", t - wp.history_len())
            };
            let mut row = vec![t.to_string(), part.to_string()];
            for c in 0..wp.channels() {
                let v = if part == "history" {
                    wp.history[c][col]
                } else {
                    wp.future[c][col]
                };
                row.push(format!("{v}"));
            }
            writer.write_record(&row)?;
        }
        writer.flush()?;
        traces.push(trace);
        files.push(name);
    }

    let mut manifest = RunManifest::new(
        "augment",
        seed,
        file_input(&args.input)?,
        serde_json::json!({
            "augment": cfg,
            "emd": emd_cfg,
            "context": args.context,
            "horizon": args.horizon,
            "count": args.count,
        }),
    );
    manifest.outputs = Some(serde_json::to_value(AugmentOutputs {
        samples: traces,
        files,
    })?);
    manifest.write(args.out_dir.join("manifest.json"))?;
    println!("wrote {} augmented window(s) to {}", args.count, args.out_dir.display());
    Ok(())
}

#[derive(Serialize)]
struct SeedMetrics {
    seed: u64,
    mse: f64,
    mae: f64,
}

#[derive(Serialize)]
struct MetricsReport {
    per_seed: Vec<SeedMetrics>,
    mean_mse: f64,
    std_mse: f64,
    mean_mae: f64,
    std_mae: f64,
    seed: u64,
    config_hash: String,
}

fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    (mean, var.sqrt())
}

fn cmd_train_eval(args: &TrainEvalArgs) -> Result<()> {
    let seed = resolve_seed(args.seed);
    if args.runs == 0 {
        return Err(Error::Config("runs must be at least 1".into()));
    }
    if args.jobs > 0 {
        // Pool size only affects scheduling; decomposition content is
        // deterministic regardless.
        rayon::ThreadPoolBuilder::new()
            .num_threads(args.jobs)
            .build_global()
            .ok();
    }

    let (series, input_spec) = if args.synth {
        let spec = SynthSpec {
            length: args.synth_length,
            channels: args.synth_channels,
            tones: vec![
                Tone {
                    freq: 0.04,
                    amplitude: 1.0,
                },
                Tone {
                    freq: 0.25,
                    amplitude: 0.4,
                },
            ],
            trend_slope: 0.001,
            noise_std: args.synth_noise,
            seed,
        };
        (
            synth_generate(&spec)?,
            InputSpec::Synth {
                spec: serde_json::to_value(&spec)?,
            },
        )
    } else {
        let path = args.input.as_ref().ok_or_else(|| {
            Error::Config("either --input or --synth is required".into())
        })?;
        (load_input(path)?, file_input(path)?)
    };

    let aug = AugMethod::parse(&args.aug)?;
    let mut base_cfg = ExperimentConfig::new(args.context, args.horizon, aug, seed);
    base_cfg.stride = args.stride;
    base_cfg.alpha = args.alpha;
    base_cfg.weight_low = args.weight_low;
    base_cfg.weight_high = args.weight_high;
    base_cfg.train_fraction = args.train_fraction;
    base_cfg.epochs = args.epochs;
    base_cfg.learning_rate = args.lr;
    base_cfg.lr_decay = args.lr_decay;
    base_cfg.batch_size = args.batch_size;
    base_cfg.emd = args.emd.config();

    let mut per_seed = Vec::with_capacity(args.runs);
    for run in 0..args.runs {
        let mut cfg = base_cfg.clone();
        cfg.seed = seed + run as u64;
        let result = run_experiment(&series, &cfg)?;
        per_seed.push(SeedMetrics {
            seed: cfg.seed,
            mse: result.metrics.mse,
            mae: result.metrics.mae,
        });
    }

    let manifest = RunManifest::new(
        "train-eval",
        seed,
        input_spec,
        serde_json::to_value(&base_cfg)?,
    );
    let (mean_mse, std_mse) = mean_std(&per_seed.iter().map(|m| m.mse).collect::<Vec<_>>());
    let (mean_mae, std_mae) = mean_std(&per_seed.iter().map(|m| m.mae).collect::<Vec<_>>());
    let report = MetricsReport {
        per_seed,
        mean_mse,
        std_mse,
        mean_mae,
        std_mae,
        seed,
        config_hash: manifest.config_hash.clone(),
    };

    std::fs::create_dir_all(&args.out_dir)?;
    let metrics_json = serde_json::to_string_pretty(&report)? + "\n";
    std::fs::write(args.out_dir.join("metrics.json"), &metrics_json)?;
    let mut manifest = manifest;
    manifest.outputs = Some(serde_json::to_value(&report)?);
    manifest.write(args.out_dir.join("manifest.json"))?;
    println!(
        "aug={} mse={mean_mse:.6} (+/- {std_mse:.6}) mae={mean_mae:.6} (+/- {std_mae:.6})",
        aug.as_str()
    );
    Ok(())
}

fn cmd_compare(args: &CompareArgs) -> Result<()> {
    let seed = resolve_seed(args.seed);
    let series = load_input(&args.input)?;
    if args.channel >= series.channels() {
        return Err(Error::Config(format!(
            "channel {} out of range: series has {} channels",
            args.channel,
            series.channels()
        )));
    }
    let emd_cfg = args.emd.config();
    emd_cfg.validate()?;
    let windows = enumerate_windows(&series, args.context, args.horizon, 1)?;
    if windows.is_empty() {
        return Err(Error::Config(format!(
            "series of length {} cannot host a window of {} + {} steps",
            series.len(),
            args.context,
            args.horizon
        )));
    }
    let index = windows
        .iter()
        .position(|w| w.source_offset == args.offset)
        .ok_or_else(|| {
            Error::Config(format!(
                "no window starts at offset {}; valid offsets are 0..{}",
                args.offset,
                windows.len() - 1
            ))
        })?;

    let root = RandomSource::new(seed);
    let original = windows[index].clone();
    let filtered = moving_average_filter(&original, args.filter_kernel)?;
    let permuted = segment_permutation(&original, args.permute_segments, &mut root.child(1))?;
    let cache = precompute(0, &windows, WindowPart::Full, &emd_cfg);
    let aug_cfg = AugmentConfig::default();
    let (staug_wp, _) =
        staug_sample_traced(index, &windows, &cache, 0, &aug_cfg, &mut root.child(2))?;

    std::fs::create_dir_all(&args.out_dir)?;
    let path = args.out_dir.join("compare.csv");
    let mut writer = csv::Writer::from_path(&path)?;
    writer.write_record(["step", "variant", "value"])?;
    let c = args.channel;
    for (name, wp) in [
        ("original", &original),
        ("filter", &filtered),
        ("permute", &permuted),
        ("staug", &staug_wp),
    ] {
        let full = wp.full_channel(c);
        for (t, v) in full.iter().enumerate() {
            writer.write_record([t.to_string(), name.to_string(), format!("{v}")])?;
        }
    }
    writer.flush()?;

    let manifest = RunManifest::new(
        "compare",
        seed,
        file_input(&args.input)?,
        serde_json::json!({
            "context": args.context,
            "horizon": args.horizon,
            "channel": args.channel,
            "offset": args.offset,
            "filter_kernel": args.filter_kernel,
            "permute_segments": args.permute_segments,
            "emd": emd_cfg,
        }),
    );
    manifest.write(args.out_dir.join("manifest.json"))?;
    println!("wrote {}", path.display());
    Ok(())
}

fn main() {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Decompose(args) => cmd_decompose(args),
        Command::Augment(args) => cmd_augment(args),
        Command::TrainEval(args) => cmd_train_eval(args),
        Command::Compare(args) => cmd_compare(args),
    };
    if let Err(err) = result {
        eprintln!("error: {err}");
        std::process::exit(err.exit_code());
    }
}
