//! The `mixforge` command-line interface.
//!
//! Subcommands: `mix` (emit mixed samples + masks + a JSON sidecar),
//! `grid` (one-row-per-policy comparison sheet), `stats` (Monte-Carlo mask
//! statistics as CSV), `train`, and `bench`. Identical arguments and seed
//! produce byte-identical output files; wall-clock timings only appear in
//! files behind `--timings`.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use mixforge_core::{
    apply_policy, mix_pair, mix_pair_at, sample_lambda, ImageTensor, LabelVector, MixResult,
    PolicyConfig, PolicyKind, SaliencyMap, SeedSplit,
};
use rand::Rng;
use serde::Serialize;

use crate::bench::bench;
use crate::config::{config_hash, fnv1a64, parse_bench_config, parse_train_config};
use crate::data::{synth_dataset, SynthSpec};
use crate::error::{DeskError, Result};
use crate::pnm::{read_image, read_weight_map, write_image, write_mask};
use crate::sidecar::{MixSidecar, SidecarEntry};
use crate::train::{load_dataset, train, RunReport, TrainConfig};

/// Seed override honored by `train` and `bench` config files.
pub const SEED_ENV: &str = "MIXFORGE_SEED";

#[derive(Parser)]
#[command(name = "mixforge", version, about = "Deterministic mixup augmentation toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Mix an explicit image pair or dataset samples under a policy
    Mix(MixArgs),
    /// Render a comparison sheet with one row per policy at a fixed ratio
    Grid(GridArgs),
    /// Monte-Carlo statistics of realized vs nominal mixing ratios
    Stats(StatsArgs),
    /// Train the tiny classifier from a config file
    Train(TrainArgs),
    /// Run a benchmark sweep from a config file
    Bench(BenchArgs),
}

#[derive(Args)]
struct MixArgs {
    /// Policy name (vanilla|mixup|cutmix|manifoldmix|smoothmix|gridmix|
    /// resizemix|fmix|saliencymix|guidedcut|puzzlemix)
    #[arg(long, required_unless_present = "replay")]
    policy: Option<String>,
    #[arg(long, default_value_t = 1.0)]
    alpha: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Two input images (PPM/PGM)
    #[arg(long, num_args = 2, value_names = ["A", "B"])]
    pair: Vec<PathBuf>,
    /// Dataset config file to draw samples from instead of --pair
    #[arg(long, conflicts_with = "pair")]
    data_config: Option<PathBuf>,
    /// Number of dataset samples to mix
    #[arg(long, default_value_t = 4)]
    count: usize,
    /// External weight map (PGM) for guided cutting
    #[arg(long)]
    weights: Option<PathBuf>,
    /// Policy parameter, e.g. --param decay=3 (repeatable)
    #[arg(long = "param", value_name = "KEY=VALUE")]
    params: Vec<String>,
    /// Output directory
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Also write each input's saliency map as PGM (inspection aid)
    #[arg(long)]
    dump_saliency: bool,
    /// Reproduce a previous invocation from its JSON sidecar
    #[arg(long)]
    replay: Option<PathBuf>,
}

#[derive(Args)]
struct GridArgs {
    /// Fixed mixing ratio shared by every row
    #[arg(long, default_value_t = 0.5)]
    lambda: f64,
    #[arg(long, num_args = 2, value_names = ["A", "B"])]
    pair: Vec<PathBuf>,
    /// Weight map for the guided-cut row (uniform when absent)
    #[arg(long)]
    weights: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Side length of the synthesized pair when --pair is not given
    #[arg(long, default_value_t = 32)]
    size: usize,
    #[arg(long, default_value = "grid.ppm")]
    out: PathBuf,
}

#[derive(Args)]
struct StatsArgs {
    /// Comma-separated policy names
    #[arg(long)]
    policy: String,
    #[arg(long, default_value_t = 1000)]
    draws: usize,
    /// Fixed nominal ratio; mutually exclusive with --alpha
    #[arg(long, conflicts_with = "alpha")]
    lambda: Option<f64>,
    /// Draw nominal ratios from Beta(alpha, alpha)
    #[arg(long)]
    alpha: Option<f64>,
    /// Square image side used for masks
    #[arg(long, default_value_t = 32)]
    size: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long = "param", value_name = "KEY=VALUE")]
    params: Vec<String>,
    #[arg(long, default_value = "stats.csv")]
    out: PathBuf,
}

#[derive(Args)]
struct TrainArgs {
    #[arg(long)]
    config: PathBuf,
    /// Write the run report as JSON
    #[arg(long)]
    out: Option<PathBuf>,
    /// Include wall-clock seconds in the report file
    #[arg(long)]
    timings: bool,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long, default_value = "bench_out")]
    out_dir: PathBuf,
    /// Include wall-clock seconds in the CSV
    #[arg(long)]
    timings: bool,
}

/// Entry point used by `main`; returns the process exit code. Usage errors
/// exit 2 (clap's convention), runtime errors exit 1 with the failing path
/// in the message.
pub fn cli_main<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(err) => {
            let _ = err.print();
            return err.exit_code();
        }
    };
    let result = match cli.command {
        Command::Mix(args) => run_mix(args),
        Command::Grid(args) => run_grid(args),
        Command::Stats(args) => run_stats(args),
        Command::Train(args) => run_train(args),
        Command::Bench(args) => run_bench(args),
    };
    match result {
        Ok(()) => 0,
        Err(err) => {
            eprintln!("error: {err}");
            1
        }
    }
}

fn parse_param_flags(raw: &[String]) -> Result<Vec<(String, String)>> {
    raw.iter()
        .map(|entry| {
            entry
                .split_once('=')
                .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
                .ok_or_else(|| {
                    DeskError::Config(format!("--param expects KEY=VALUE, got '{entry}'"))
                })
        })
        .collect()
}

fn pair_labels() -> (LabelVector, LabelVector) {
    // Pair mode has no dataset labels; the two inputs act as classes 0 and 1
    // of a two-class problem so the mixed label weight is visible.
    (
        LabelVector::one_hot(2, 0).expect("one-hot"),
        LabelVector::one_hot(2, 1).expect("one-hot"),
    )
}

fn image_name(index: usize, channels: usize) -> String {
    if channels == 3 {
        format!("mixed_{index:04}.ppm")
    } else {
        format!("mixed_{index:04}.pgm")
    }
}

fn write_results(out: &Path, results: &[MixResult]) -> Result<Vec<SidecarEntry>> {
    let mut entries = Vec::with_capacity(results.len());
    for (idx, result) in results.iter().enumerate() {
        let image_file = image_name(idx, result.image.channels());
        write_image(&out.join(&image_file), &result.image)?;
        let mask_file = match &result.mask {
            Some(mask) => {
                let name = format!("mask_{idx:04}.pgm");
                write_mask(&out.join(&name), mask)?;
                Some(name)
            }
            None => None,
        };
        entries.push(SidecarEntry {
            image: image_file,
            mask: mask_file,
            lambda_nominal: result.lambda_nominal,
            lambda_effective: result.lambda_effective,
        });
    }
    Ok(entries)
}

fn invocation_hash(fields: &BTreeMap<String, String>) -> String {
    let canonical: Vec<String> = fields.iter().map(|(k, v)| format!("{k}={v}")).collect();
    format!("{:016x}", fnv1a64(canonical.join("\n").as_bytes()))
}

fn run_mix(args: MixArgs) -> Result<()> {
    let (policy, alpha, seed, params, pair, weights, data_config, count) =
        if let Some(replay_path) = &args.replay {
            let sidecar = MixSidecar::read(replay_path)?;
            (
                sidecar.policy.clone(),
                sidecar.alpha,
                sidecar.seed,
                sidecar.params.clone().into_iter().collect::<Vec<_>>(),
                sidecar
                    .pair
                    .as_ref()
                    .map(|[a, b]| vec![PathBuf::from(a), PathBuf::from(b)])
                    .unwrap_or_default(),
                sidecar.weights.as_ref().map(PathBuf::from),
                sidecar.dataset_config.as_ref().map(PathBuf::from),
                sidecar.count.unwrap_or(4),
            )
        } else {
            (
                args.policy.clone().expect("clap enforces policy without --replay"),
                args.alpha,
                args.seed,
                parse_param_flags(&args.params)?,
                args.pair.clone(),
                args.weights.clone(),
                args.data_config.clone(),
                args.count,
            )
        };
    let cfg = PolicyConfig::from_kv(&policy, alpha, &params)?;
    fs::create_dir_all(&args.out).map_err(DeskError::io(&args.out))?;

    let dump_maps = |out: &Path, inputs: &[ImageTensor]| -> Result<()> {
        for (idx, image) in inputs.iter().enumerate() {
            let map = cfg.params.detector.compute(image);
            crate::pnm::write_saliency(&out.join(format!("saliency_{idx:04}.pgm")), &map)?;
        }
        Ok(())
    };
    let results = if !pair.is_empty() {
        let x_i = read_image(&pair[0])?;
        let x_j = read_image(&pair[1])?;
        let weight = weights.as_deref().map(read_weight_map).transpose()?;
        let (y_i, y_j) = pair_labels();
        if args.dump_saliency {
            dump_maps(&args.out, &[x_i.clone(), x_j.clone()])?;
        }
        let mut rng = SeedSplit::new(seed).pair(0);
        vec![mix_pair(&cfg, &x_i, &x_j, &y_i, &y_j, weight.as_ref(), &mut rng)?]
    } else if let Some(config_path) = &data_config {
        let text = fs::read_to_string(config_path).map_err(DeskError::io(config_path))?;
        let mut data_cfg = parse_train_config(&text)?;
        data_cfg.seed = seed;
        let (train_set, _) = load_dataset(&data_cfg)?;
        let take = count.min(train_set.len()).max(1);
        let images: Vec<ImageTensor> = train_set.images[..take].to_vec();
        let labels: Vec<LabelVector> = (0..take).map(|i| train_set.one_hot(i)).collect();
        if args.dump_saliency {
            dump_maps(&args.out, &images)?;
        }
        apply_policy(&cfg, &images, &labels, SeedSplit::new(seed))?
    } else {
        return Err(DeskError::Config("mix needs --pair or --data-config".into()));
    };

    let outputs = write_results(&args.out, &results)?;
    let params_map: BTreeMap<String, String> = params.iter().cloned().collect();
    let mut hash_fields = BTreeMap::from([
        ("policy".to_string(), policy.clone()),
        ("alpha".to_string(), format!("{alpha}")),
        ("seed".to_string(), format!("{seed}")),
    ]);
    for (k, v) in &params_map {
        hash_fields.insert(format!("param.{k}"), v.clone());
    }
    if !pair.is_empty() {
        hash_fields.insert("pair_a".to_string(), pair[0].display().to_string());
        hash_fields.insert("pair_b".to_string(), pair[1].display().to_string());
    }
    if let Some(w) = &weights {
        hash_fields.insert("weights".to_string(), w.display().to_string());
    }
    if let Some(c) = &data_config {
        hash_fields.insert("data_config".to_string(), c.display().to_string());
        hash_fields.insert("count".to_string(), format!("{count}"));
    }
    let dataset_mode = pair.is_empty();
    let sidecar = MixSidecar {
        policy,
        alpha,
        params: params_map,
        seed,
        config_hash: invocation_hash(&hash_fields),
        pair: (!pair.is_empty())
            .then(|| [pair[0].display().to_string(), pair[1].display().to_string()]),
        weights: weights.map(|w| w.display().to_string()),
        dataset_config: data_config.map(|c| c.display().to_string()),
        count: dataset_mode.then_some(count),
        outputs,
    };
    sidecar.write(&args.out.join("mix.json"))?;
    println!(
        "wrote {} mixed sample(s) to {} (sidecar mix.json)",
        sidecar.outputs.len(),
        args.out.display()
    );
    Ok(())
}

/// Deterministic demo pair used when `grid` is not given input files.
fn synth_pair(seed: u64, size: usize) -> Result<(ImageTensor, ImageTensor)> {
    let spec = SynthSpec { n: 2, h: size, w: size, c: 3, k: 2, label_noise: 0.0 };
    let ds = synth_dataset(&spec, seed)?;
    Ok((ds.images[0].clone(), ds.images[1].clone()))
}

fn mask_tile(result: &MixResult, channels: usize) -> ImageTensor {
    let (h, w) = (result.image.height(), result.image.width());
    match &result.mask {
        Some(mask) => {
            let mut data = Vec::with_capacity(h * w * channels);
            for weight in mask.weights() {
                for _ in 0..channels {
                    data.push(*weight);
                }
            }
            ImageTensor::new(h, w, channels, data).expect("mask weights are intensities")
        }
        // Interpolation policies blend uniformly; show the flat weight.
        None => ImageTensor::constant(h, w, channels, result.lambda_effective)
            .expect("lambda is an intensity"),
    }
}

#[derive(Serialize)]
struct GridCaption {
    lambda: f64,
    seed: u64,
    columns: [&'static str; 4],
    rows: Vec<GridCaptionRow>,
}

#[derive(Serialize)]
struct GridCaptionRow {
    policy: String,
    lambda_nominal: f64,
    lambda_effective: f64,
}

fn run_grid(args: GridArgs) -> Result<()> {
    if !(0.0..=1.0).contains(&args.lambda) {
        return Err(DeskError::Config(format!("lambda {} outside [0, 1]", args.lambda)));
    }
    let (x_i, x_j) = if args.pair.is_empty() {
        synth_pair(args.seed, args.size)?
    } else {
        (read_image(&args.pair[0])?, read_image(&args.pair[1])?)
    };
    let weight = args.weights.as_deref().map(read_weight_map).transpose()?;
    let (h, w, c) = x_i.shape();
    let (y_i, y_j) = pair_labels();

    let mut rows = Vec::new();
    for (idx, kind) in PolicyKind::ALL.iter().enumerate() {
        let mut cfg = PolicyConfig::new(*kind, 1.0)?;
        if cfg.params.blocks > h.min(w) {
            cfg.params.blocks = h.min(w);
        }
        if cfg.params.n_cells > h.min(w) {
            cfg.params.n_cells = h.min(w);
        }
        let mut rng = SeedSplit::new(args.seed).pair(idx as u64);
        // The guided row falls back to a uniform map: deterministic corner
        // placement via the documented argmax tie-break.
        let uniform;
        let row_weight = match (*kind, weight.as_ref()) {
            (PolicyKind::Guidedcut, Some(map)) => Some(map),
            (PolicyKind::Guidedcut, None) => {
                uniform = SaliencyMap::new(h, w, vec![1.0; h * w])?;
                Some(&uniform)
            }
            _ => None,
        };
        let result = mix_pair_at(&cfg, &x_i, &x_j, &y_i, &y_j, args.lambda, row_weight, &mut rng)?;
        rows.push((kind.name().to_string(), result));
    }

    // Sheet: one row per policy, tiles [x_i | x_j | mixed | mask].
    const SEP: usize = 2;
    let sheet_h = rows.len() * h + (rows.len() - 1) * SEP;
    let sheet_w = 4 * w + 3 * SEP;
    let mut sheet = ImageTensor::constant(sheet_h, sheet_w, c, 1.0)?;
    for (row_idx, (_, result)) in rows.iter().enumerate() {
        let tiles = [&x_i, &x_j, &result.image, &mask_tile(result, c)];
        let y0 = row_idx * (h + SEP);
        for (tile_idx, tile) in tiles.iter().enumerate() {
            let x0 = tile_idx * (w + SEP);
            for y in 0..h {
                for x in 0..w {
                    for ch in 0..c {
                        sheet.set(y0 + y, x0 + x, ch, tile.get(y, x, ch));
                    }
                }
            }
        }
    }
    write_image(&args.out, &sheet)?;
    let caption = GridCaption {
        lambda: args.lambda,
        seed: args.seed,
        columns: ["sample_i", "sample_j", "mixed", "mask"],
        rows: rows
            .iter()
            .map(|(policy, r)| GridCaptionRow {
                policy: policy.clone(),
                lambda_nominal: r.lambda_nominal,
                lambda_effective: r.lambda_effective,
            })
            .collect(),
    };
    let caption_path = args.out.with_extension("json");
    fs::write(
        &caption_path,
        serde_json::to_string_pretty(&caption).expect("caption serializes") + "\n",
    )
    .map_err(DeskError::io(&caption_path))?;
    println!(
        "wrote sheet {} ({} policies at lambda {})",
        args.out.display(),
        rows.len(),
        args.lambda
    );
    Ok(())
}

fn percentile(sorted: &[f64], q: f64) -> f64 {
    let idx = ((sorted.len() - 1) as f64 * q).round() as usize;
    sorted[idx]
}

fn run_stats(args: StatsArgs) -> Result<()> {
    if args.draws == 0 {
        return Err(DeskError::Config("draws must be >= 1".into()));
    }
    if args.size < 4 {
        return Err(DeskError::Config("size must be >= 4".into()));
    }
    if let Some(lambda) = args.lambda {
        if !(0.0..=1.0).contains(&lambda) {
            return Err(DeskError::Config(format!("lambda {lambda} outside [0, 1]")));
        }
    }
    let alpha = args.alpha.unwrap_or(1.0);
    let params = parse_param_flags(&args.params)?;
    let (y_i, y_j) = pair_labels();
    let size = args.size;

    let mut csv = String::from(
        "policy,draws,mode,alpha,lambda,nominal_mean,nominal_var,beta_mean,beta_var,eff_mean,eff_var,eff_p10,eff_p50,eff_p90\n",
    );
    for name in args.policy.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let kind = PolicyKind::parse(name)?;
        let allowed: Vec<(String, String)> = params
            .iter()
            .filter(|(k, _)| kind.allowed_keys().contains(&k.as_str()))
            .cloned()
            .collect();
        let mut cfg = PolicyConfig::from_kv(name, alpha, &allowed)?;
        if cfg.params.blocks > size {
            cfg.params.blocks = size;
        }
        let needs_images = matches!(
            kind,
            PolicyKind::Saliencymix | PolicyKind::Puzzlemix | PolicyKind::Guidedcut
        );
        let mut nominal = Vec::with_capacity(args.draws);
        let mut effective = Vec::with_capacity(args.draws);
        for draw in 0..args.draws {
            let mut rng = SeedSplit::new(args.seed).pair(draw as u64);
            let lambda = match args.lambda {
                Some(fixed) => fixed,
                None => sample_lambda(alpha, &mut rng)?.lambda,
            };
            let (x_i, x_j) = if needs_images {
                let gen = |rng: &mut rand_chacha::ChaCha8Rng| {
                    let data: Vec<f64> =
                        (0..size * size).map(|_| rng.gen_range(0.0..=1.0)).collect();
                    ImageTensor::new(size, size, 1, data)
                };
                (gen(&mut rng)?, gen(&mut rng)?)
            } else {
                (
                    ImageTensor::constant(size, size, 1, 0.25)?,
                    ImageTensor::constant(size, size, 1, 0.75)?,
                )
            };
            let external;
            let weight = if kind == PolicyKind::Guidedcut {
                let raw: Vec<f64> = (0..size * size).map(|_| rng.gen_range(0.0..1.0)).collect();
                external = SaliencyMap::new(size, size, raw)?;
                Some(&external)
            } else {
                None
            };
            let result = mix_pair_at(&cfg, &x_i, &x_j, &y_i, &y_j, lambda, weight, &mut rng)?;
            nominal.push(result.lambda_nominal);
            effective.push(result.lambda_effective);
        }
        let n = args.draws as f64;
        let mean = |v: &[f64]| v.iter().sum::<f64>() / n;
        let var = |v: &[f64], m: f64| v.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / n;
        let nom_mean = mean(&nominal);
        let nom_var = var(&nominal, nom_mean);
        let eff_mean = mean(&effective);
        let eff_var = var(&effective, eff_mean);
        let mut sorted = effective.clone();
        sorted.sort_by(|a, b| a.partial_cmp(b).expect("ratios are finite"));
        let (mode, alpha_col, lambda_col, beta_mean, beta_var) = match args.lambda {
            Some(l) => ("fixed", String::new(), format!("{l}"), String::new(), String::new()),
            None => (
                "beta",
                format!("{alpha}"),
                String::new(),
                "0.5".to_string(),
                format!("{:.10}", 1.0 / (4.0 * (2.0 * alpha + 1.0))),
            ),
        };
        csv.push_str(&format!(
            "{},{},{},{},{},{:.10},{:.10},{},{},{:.10},{:.10},{:.10},{:.10},{:.10}\n",
            name,
            args.draws,
            mode,
            alpha_col,
            lambda_col,
            nom_mean,
            nom_var,
            beta_mean,
            beta_var,
            eff_mean,
            eff_var,
            percentile(&sorted, 0.1),
            percentile(&sorted, 0.5),
            percentile(&sorted, 0.9),
        ));
    }
    fs::write(&args.out, &csv).map_err(DeskError::io(&args.out))?;
    print!("{csv}");
    Ok(())
}

#[derive(Serialize)]
struct TrainReportJson {
    config_hash: String,
    policy: String,
    alpha: f64,
    seed: u64,
    epochs: usize,
    train_loss: Vec<f64>,
    test_acc_history: Vec<(usize, f64)>,
    final_test_acc: f64,
    final_train_acc: f64,
    final_ece: f64,
    reported_test_acc: f64,
    lambda_hist: Vec<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    wall_seconds: Option<f64>,
}

fn seed_override() -> Result<Option<u64>> {
    match std::env::var(SEED_ENV) {
        Ok(raw) => raw
            .parse()
            .map(Some)
            .map_err(|_| DeskError::Config(format!("{SEED_ENV}='{raw}' is not a seed"))),
        Err(_) => Ok(None),
    }
}

fn summarize(report: &RunReport) {
    println!(
        "train loss {:.4} -> {:.4} | test top-1 {:.4} | train top-1 {:.4} | ece {:.4} | {:.2}s",
        report.train_loss.first().copied().unwrap_or(f64::NAN),
        report.train_loss.last().copied().unwrap_or(f64::NAN),
        report.final_test_acc,
        report.final_train_acc,
        report.final_ece,
        report.wall_seconds
    );
}

fn run_train(args: TrainArgs) -> Result<()> {
    let text = fs::read_to_string(&args.config).map_err(DeskError::io(&args.config))?;
    let mut cfg: TrainConfig = parse_train_config(&text)?;
    if let Some(seed) = seed_override()? {
        cfg.seed = seed;
    }
    let report = train(&cfg)?;
    summarize(&report);
    if let Some(out) = &args.out {
        let json = TrainReportJson {
            config_hash: format!("{:016x}", config_hash(&text)),
            policy: cfg.policy.kind.name().to_string(),
            alpha: cfg.policy.alpha,
            seed: cfg.seed,
            epochs: cfg.epochs,
            train_loss: report.train_loss.clone(),
            test_acc_history: report.test_acc_history.clone(),
            final_test_acc: report.final_test_acc,
            final_train_acc: report.final_train_acc,
            final_ece: report.final_ece,
            reported_test_acc: report.reported_test_acc,
            lambda_hist: report.lambda_hist.clone(),
            wall_seconds: args.timings.then_some(report.wall_seconds),
        };
        fs::write(out, serde_json::to_string_pretty(&json).expect("report serializes") + "\n")
            .map_err(DeskError::io(out))?;
    }
    Ok(())
}

fn run_bench(args: BenchArgs) -> Result<()> {
    let text = fs::read_to_string(&args.config).map_err(DeskError::io(&args.config))?;
    let mut spec = parse_bench_config(&text)?;
    if let Some(seed) = seed_override()? {
        for cfg in &mut spec.configs {
            cfg.seed = seed;
        }
    }
    let table = bench(&spec.configs, spec.trials)?;
    fs::create_dir_all(&args.out_dir).map_err(DeskError::io(&args.out_dir))?;
    let csv_path = args.out_dir.join("bench.csv");
    fs::write(&csv_path, table.to_csv(args.timings)).map_err(DeskError::io(&csv_path))?;
    let txt_path = args.out_dir.join("bench.txt");
    fs::write(&txt_path, table.to_text()).map_err(DeskError::io(&txt_path))?;
    print!("{}", table.to_text());
    let total: f64 = table
        .rows
        .iter()
        .filter_map(|r| r.outcome.as_ref().ok().map(|m| m.wall_seconds))
        .sum();
    println!("total training time: {total:.2}s");
    Ok(())
}
