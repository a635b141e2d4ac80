//! Acceptance suite: one test per criterion, each printing a PASS line with
//! the measured numbers. Run with `cargo test -p mixforge --test acceptance`
//! (add `-- --nocapture` to see the lines).

use std::path::{Path, PathBuf};
use std::process::Command;

use mixforge::data::{CifarVariant, Split, SynthSpec};
use mixforge::model::TinyModel;
use mixforge::train::{train, DatasetRef, TrainConfig};
use mixforge_core::{
    corrected_lambda, cross_entropy, ece, fourier_mask, grid_mask, mix_labels_linear,
    mixup_cross_entropy, optimize_block_mask, rect_mask, sample_lambda, transport_blocks,
    BlockGrid, BlockSaliency, LabelVector, PolicyConfig, PolicyKind, Prediction, SeedSplit,
};
use rand::Rng;

fn random_label<R: Rng>(k: usize, rng: &mut R) -> LabelVector {
    if rng.gen_bool(0.5) {
        LabelVector::one_hot(k, rng.gen_range(0..k)).unwrap()
    } else {
        let raw: Vec<f64> = (0..k).map(|_| rng.gen_range(0.01..1.0)).collect();
        let sum: f64 = raw.iter().sum();
        LabelVector::new(raw.into_iter().map(|v| v / sum).collect()).unwrap()
    }
}

#[test]
fn criterion_1_label_mixing_identities() {
    let mut rng = SeedSplit::new(101).pair(0);
    for _ in 0..10_000 {
        let k = rng.gen_range(2..=10);
        let y_i = random_label(k, &mut rng);
        let y_j = random_label(k, &mut rng);
        let lambda = rng.gen_range(0.0..=1.0);

        let mixed = mix_labels_linear(&y_i, &y_j, lambda).unwrap();
        let swapped = mix_labels_linear(&y_j, &y_i, 1.0 - lambda).unwrap();
        for (a, b) in mixed.probs().iter().zip(swapped.probs()) {
            assert!((a - b).abs() <= 1e-12, "symmetry violated: {a} vs {b}");
        }
        assert!(mixed.probs().iter().all(|p| *p >= 0.0));
        let sum: f64 = mixed.probs().iter().sum();
        assert!((sum - 1.0).abs() <= 1e-6, "closure violated: sum {sum}");

        let raw: Vec<f64> = (0..k).map(|_| rng.gen_range(0.01..1.0)).collect();
        let total: f64 = raw.iter().sum();
        let pred = Prediction::new(raw.into_iter().map(|v| v / total).collect()).unwrap();
        let mce = mixup_cross_entropy(&pred, &y_i, &y_j, lambda).unwrap();
        let soft = cross_entropy(&pred, &mixed).unwrap();
        assert!((mce - soft).abs() <= 1e-12, "MCE identity violated: {mce} vs {soft}");
    }
    println!("[PASS] criterion 1: 10^4 label-mixing instances satisfy symmetry, closure, and the MCE identity within 1e-12");
}

#[test]
fn criterion_2_mask_area_contracts() {
    let mut rng = SeedSplit::new(102).pair(0);
    let mut unclipped_rects = 0usize;
    for round in 0..1000 {
        let h = rng.gen_range(4..=40);
        let w = rng.gen_range(4..=40);
        let lambda: f64 = rng.gen_range(0.0..=1.0);
        let mut mask_rng = SeedSplit::new(5000 + round).pair(0);

        let fmask = fourier_mask(h, w, lambda, 3.0, &mut mask_rng).unwrap();
        let expect = (lambda * (h * w) as f64).round() as usize;
        assert_eq!(fmask.count_ones(), expect, "fourier popcount at {h}x{w} lambda {lambda}");

        let n_cells = rng.gen_range(1..=4.min(h).min(w));
        let gmask = grid_mask(h, w, n_cells, lambda, &mut mask_rng).unwrap();
        let cell_pixels: f64 = gmask.weights().iter().sum();
        // Count kept cells via an independent pixel scan over cell origins.
        let keep = (lambda * (n_cells * n_cells) as f64).round() as usize;
        let (bh, bw) = (h / n_cells, w / n_cells);
        let mut kept = 0;
        let mut kept_area = 0usize;
        for ci in 0..n_cells {
            for cj in 0..n_cells {
                if gmask.get(ci * bh, cj * bw) == 1.0 {
                    kept += 1;
                    let cell_h = if ci + 1 == n_cells { bh + h % n_cells } else { bh };
                    let cell_w = if cj + 1 == n_cells { bw + w % n_cells } else { bw };
                    kept_area += cell_h * cell_w;
                }
            }
        }
        assert_eq!(kept, keep, "grid cell count at {h}x{w} n={n_cells} lambda {lambda}");
        assert_eq!(kept_area as f64, cell_pixels, "grid pixel area mismatch");

        let (rmask, rect) = rect_mask(h, w, lambda, &mut mask_rng).unwrap();
        if rect.fits(h, w) {
            unclipped_rects += 1;
            let expect = 1.0 - (rect.cut_w * rect.cut_h) as f64 / (h * w) as f64;
            assert!((corrected_lambda(&rmask).unwrap() - expect).abs() <= 1e-12);
        }

        // corrected_lambda against a pixel-count oracle.
        let ones = rmask.weights().iter().filter(|v| **v == 1.0).count();
        assert!(
            (corrected_lambda(&rmask).unwrap() - ones as f64 / (h * w) as f64).abs() <= 1e-12
        );
    }
    assert!(unclipped_rects > 50, "too few unclipped rectangles sampled: {unclipped_rects}");
    println!("[PASS] criterion 2: 10^3 random mask cases hit exact popcounts and closed-form areas ({unclipped_rects} unclipped rectangles checked)");
}

#[test]
fn criterion_3_beta_sampler_moments() {
    const DRAWS: usize = 100_000;
    for (slot, &alpha) in [0.1, 0.2, 0.5, 1.0, 2.0, 4.0].iter().enumerate() {
        let mut rng = SeedSplit::new(103).pair(slot as u64);
        let mut sum = 0.0;
        let mut sum_sq = 0.0;
        for _ in 0..DRAWS {
            let lambda = sample_lambda(alpha, &mut rng).unwrap().lambda;
            sum += lambda;
            sum_sq += lambda * lambda;
        }
        let mean = sum / DRAWS as f64;
        let var = sum_sq / DRAWS as f64 - mean * mean;
        let expect_var = 1.0 / (4.0 * (2.0 * alpha + 1.0));
        assert!((mean - 0.5).abs() < 0.01, "alpha {alpha}: mean {mean}");
        assert!(
            (var - expect_var).abs() / expect_var < 0.05,
            "alpha {alpha}: var {var} vs {expect_var}"
        );
    }
    println!("[PASS] criterion 3: Beta sampler moments hold for all six alpha values (10^5 draws each)");
}

fn random_grid<R: Rng>(b: usize, rng: &mut R) -> Vec<f64> {
    let raw: Vec<f64> = (0..b * b).map(|_| rng.gen_range(0.01..1.0)).collect();
    let sum: f64 = raw.iter().sum();
    raw.into_iter().map(|v| v / sum).collect()
}

fn chebyshev(a: usize, b: usize, width: usize) -> usize {
    (a / width).abs_diff(b / width).max((a % width).abs_diff(b % width))
}

#[test]
fn criterion_4_block_transport_optimality() {
    let mut rng = SeedSplit::new(104).pair(0);

    for _ in 0..200 {
        let sal_i = random_grid(3, &mut rng);
        let sal_j = random_grid(3, &mut rng);
        let lambda: f64 = rng.gen_range(0.0..=1.0);
        let grid = BlockGrid { b: 3, sal_i: sal_i.clone(), sal_j: sal_j.clone() };
        let mask = optimize_block_mask(&grid, lambda).unwrap();
        let keep = (lambda * 9.0).round() as usize;
        assert_eq!(mask.iter().filter(|&&m| m).count(), keep);
        let value: f64 = (0..9).map(|k| if mask[k] { sal_i[k] } else { sal_j[k] }).sum();
        let mut best = f64::NEG_INFINITY;
        for bits in 0..512u32 {
            if bits.count_ones() as usize != keep {
                continue;
            }
            let cand: f64 =
                (0..9).map(|k| if bits & (1 << k) != 0 { sal_i[k] } else { sal_j[k] }).sum();
            best = best.max(cand);
        }
        assert!((value - best).abs() < 1e-12, "mask objective {value} vs exhaustive {best}");
    }

    fn brute(sal: &[f64], positions: &[usize], shift: usize, used: &mut Vec<bool>, idx: usize) -> f64 {
        if idx == positions.len() {
            return 0.0;
        }
        let mut best = f64::NEG_INFINITY;
        for src in 0..9 {
            if !used[src] && chebyshev(positions[idx], src, 3) <= shift {
                used[src] = true;
                let rest = brute(sal, positions, shift, used, idx + 1);
                if rest > f64::NEG_INFINITY {
                    best = best.max(sal[src] + rest);
                }
                used[src] = false;
            }
        }
        best
    }

    for _ in 0..200 {
        let values = random_grid(3, &mut rng);
        let zeros = rng.gen_range(1..=6usize);
        let mut mask = vec![true; 9];
        while mask.iter().filter(|&&m| !m).count() < zeros {
            let p = rng.gen_range(0..9);
            mask[p] = false;
        }
        let positions: Vec<usize> = (0..9).filter(|&p| !mask[p]).collect();
        let shift = rng.gen_range(0..=2usize);
        let sal = BlockSaliency { b: 3, values: values.clone() };
        let plan = transport_blocks(&sal, &mask, shift).unwrap();
        assert!(!plan.fell_back);
        let got = plan.transported_saliency(&values);
        let best = brute(&values, &positions, shift, &mut vec![false; 9], 0);
        assert!((got - best).abs() < 1e-9, "transport {got} vs exhaustive {best}");
    }
    println!("[PASS] criterion 4: block-mask selection and transport match exhaustive search on 200 + 200 random instances");
}

#[test]
fn criterion_5_gradient_check() {
    let mut rng = SeedSplit::new(105).pair(0);
    let mut worst_overall = 0.0_f64;
    for instance in 0..50 {
        let input_dim = rng.gen_range(4..=10);
        let hidden = rng.gen_range(3..=8);
        let k = rng.gen_range(2..=5);
        let mut model = TinyModel::new(input_dim, hidden, k, 900 + instance);
        let batch: Vec<(Vec<f64>, LabelVector, LabelVector, f64)> = (0..4)
            .map(|_| {
                let x: Vec<f64> = (0..input_dim).map(|_| rng.gen_range(0.0..1.0)).collect();
                let y_i = LabelVector::one_hot(k, rng.gen_range(0..k)).unwrap();
                let y_j = LabelVector::one_hot(k, rng.gen_range(0..k)).unwrap();
                (x, y_i, y_j, rng.gen_range(0.0..=1.0))
            })
            .collect();

        // Analytic gradient of the batch-mean loss via the soft-label path.
        let mut grads = model.zero_grads();
        for (x, y_i, y_j, lambda) in &batch {
            let y_mix = mix_labels_linear(y_i, y_j, *lambda).unwrap();
            model.accumulate(x, &y_mix, &mut grads).unwrap();
        }

        // Finite differences of the lambda-weighted objective itself: an
        // independent route to the same loss.
        let batch_loss = |m: &TinyModel| -> f64 {
            batch
                .iter()
                .map(|(x, y_i, y_j, lambda)| {
                    mixup_cross_entropy(&m.forward(x), y_i, y_j, *lambda).unwrap()
                })
                .sum::<f64>()
        };
        let eps = 1e-4;
        let mut worst = 0.0_f64;
        for idx in 0..model.param_count() {
            let orig = model.param(idx);
            model.set_param(idx, orig + eps);
            let hi = batch_loss(&model);
            model.set_param(idx, orig - eps);
            let lo = batch_loss(&model);
            model.set_param(idx, orig);
            let numeric = (hi - lo) / (2.0 * eps);
            let analytic = model.grad_at(&grads, idx);
            let scale = analytic.abs().max(numeric.abs()).max(1e-8);
            worst = worst.max((analytic - numeric).abs() / scale);
        }
        assert!(worst <= 1e-3, "instance {instance}: max relative error {worst}");
        worst_overall = worst_overall.max(worst);
    }
    println!("[PASS] criterion 5: analytic MCE gradients match central differences on 50 instances (max relative error {worst_overall:.2e})");
}

// 16x16 images give each sample enough noise dimensions that plain
// training visibly memorizes the flipped labels within 40 epochs, while
// mixed training stays at the clean-structure ceiling; flips are off so
// every sample is seen verbatim.
fn directional_config(kind: PolicyKind, seed: u64) -> TrainConfig {
    TrainConfig {
        dataset: DatasetRef::Synth(SynthSpec {
            n: 2048,
            h: 16,
            w: 16,
            c: 3,
            k: 4,
            label_noise: 0.2,
        }),
        policy: PolicyConfig::new(kind, 1.0).unwrap(),
        epochs: 40,
        batch_size: 32,
        learning_rate: 0.1,
        seed,
        eval_every: 0,
        hidden_dim: 256,
        flip_augment: false,
        median_last_k: 0,
    }
}

#[test]
fn criterion_6_directional_regularization() {
    let mut vanilla_gap = 0.0;
    let mut mixup_gap = 0.0;
    let mut vanilla_acc = 0.0;
    let mut mixup_acc = 0.0;
    for seed in 0..5u64 {
        let vanilla = train(&directional_config(PolicyKind::Vanilla, seed)).unwrap();
        let mixup = train(&directional_config(PolicyKind::Mixup, seed)).unwrap();
        vanilla_gap += vanilla.final_train_acc - vanilla.final_test_acc;
        mixup_gap += mixup.final_train_acc - mixup.final_test_acc;
        vanilla_acc += vanilla.final_test_acc;
        mixup_acc += mixup.final_test_acc;
    }
    vanilla_gap /= 5.0;
    mixup_gap /= 5.0;
    vanilla_acc /= 5.0;
    mixup_acc /= 5.0;
    assert!(
        mixup_gap <= vanilla_gap,
        "mixup gap {mixup_gap:.4} exceeds vanilla gap {vanilla_gap:.4}"
    );
    assert!(
        mixup_acc >= vanilla_acc - 0.005,
        "mixup accuracy {mixup_acc:.4} fell more than 0.5% below vanilla {vanilla_acc:.4}"
    );
    println!("[PASS] criterion 6: train-test gap {mixup_gap:.4} (mixup) <= {vanilla_gap:.4} (vanilla); test acc {mixup_acc:.4} (mixup) vs {vanilla_acc:.4} (vanilla) over 5 seeds");
}

fn cifar_dir() -> Option<PathBuf> {
    if let Ok(dir) = std::env::var("MIXFORGE_CIFAR_DIR") {
        let path = PathBuf::from(dir);
        if path.is_dir() {
            return Some(path);
        }
    }
    for candidate in ["data/cifar-10-batches-bin", "/root/data/cifar-10-batches-bin"] {
        let path = PathBuf::from(candidate);
        if path.is_dir() {
            return Some(path);
        }
    }
    None
}

#[test]
fn criterion_7_cifar_smoke() {
    let Some(dir) = cifar_dir() else {
        println!("[SKIP] criterion 7: CIFAR-10 binaries not present (set MIXFORGE_CIFAR_DIR to enable)");
        return;
    };
    let train_set = mixforge::data::read_cifar(&dir, CifarVariant::Cifar10, Split::Train).unwrap();
    let test_set = mixforge::data::read_cifar(&dir, CifarVariant::Cifar10, Split::Test).unwrap();
    assert_eq!(train_set.len(), 50_000);
    assert_eq!(test_set.len(), 10_000);
    assert_eq!(train_set.num_classes, 10);

    let cfg = TrainConfig {
        dataset: DatasetRef::Cifar {
            variant: CifarVariant::Cifar10,
            dir,
            train_limit: Some(5000),
            test_limit: Some(2000),
        },
        policy: PolicyConfig::new(PolicyKind::Cutmix, 1.0).unwrap(),
        epochs: 10,
        batch_size: 100,
        learning_rate: 0.05,
        seed: 7,
        eval_every: 0,
        hidden_dim: 128,
        flip_augment: true,
        median_last_k: 0,
    };
    let first = train(&cfg).unwrap();
    let second = train(&cfg).unwrap();
    assert!(first.same_metrics(&second), "two identical runs disagreed");
    println!(
        "[PASS] criterion 7: CIFAR-10 record counts verified; cutmix smoke run reproducible (test acc {:.4})",
        first.final_test_acc
    );
}

#[test]
fn criterion_8_ece_constructions() {
    let bins = 15;
    // Perfectly calibrated: bins with center confidence c contain exactly
    // round(c * n) correct samples.
    let mut preds = Vec::new();
    let mut targets = Vec::new();
    for bin in 8..15 {
        let conf = (2 * bin + 1) as f64 / 30.0;
        let n = 3000usize;
        let correct = (conf * n as f64).round() as usize;
        for i in 0..n {
            preds.push(Prediction::new(vec![conf, 1.0 - conf]).unwrap());
            targets.push(if i < correct { 0 } else { 1 });
        }
    }
    let calibrated = ece(&preds, &targets, bins).unwrap();
    assert!(
        calibrated <= 1.0 / (2.0 * bins as f64),
        "calibrated construction has ECE {calibrated}"
    );

    // Fully overconfident and always wrong: ECE equals the mean confidence.
    let mut preds = Vec::new();
    let mut targets = Vec::new();
    let mut conf_sum = 0.0;
    let mut rng = SeedSplit::new(108).pair(0);
    for _ in 0..5000 {
        let conf = rng.gen_range(0.51..1.0);
        conf_sum += conf;
        preds.push(Prediction::new(vec![conf, 1.0 - conf]).unwrap());
        targets.push(1);
    }
    let overconfident = ece(&preds, &targets, bins).unwrap();
    let mean_conf = conf_sum / 5000.0;
    assert!(
        (overconfident - mean_conf).abs() <= 1e-9,
        "ECE {overconfident} vs mean confidence {mean_conf}"
    );
    println!("[PASS] criterion 8: calibrated ECE {calibrated:.5} <= 1/(2*15); overconfident ECE equals mean confidence within 1e-9");
}

fn run_cli(dir: &Path, args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_mixforge"))
        .current_dir(dir)
        .env_remove("MIXFORGE_SEED")
        .args(args)
        .output()
        .expect("spawn mixforge")
}

fn snapshot(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<(String, Vec<u8>)> = std::fs::read_dir(dir)
        .unwrap()
        .filter_map(|e| e.ok())
        .filter(|e| e.path().is_file())
        .map(|e| {
            (
                e.file_name().to_string_lossy().into_owned(),
                std::fs::read(e.path()).unwrap(),
            )
        })
        .collect();
    files.sort_by(|a, b| a.0.cmp(&b.0));
    files
}

#[test]
fn criterion_9_cli_determinism() {
    let root = tempfile::tempdir().unwrap();
    let root = root.path();

    // Shared inputs: a deterministic PPM pair and config files.
    let setup = tempfile::tempdir().unwrap();
    let pair_dir = setup.path();
    let spec = SynthSpec { n: 2, h: 16, w: 16, c: 3, k: 2, label_noise: 0.0 };
    let ds = mixforge::data::synth_dataset(&spec, 42).unwrap();
    let a_path = pair_dir.join("a.ppm");
    let b_path = pair_dir.join("b.ppm");
    mixforge::pnm::write_image(&a_path, &ds.images[0]).unwrap();
    mixforge::pnm::write_image(&b_path, &ds.images[1]).unwrap();
    let train_cfg = pair_dir.join("train.cfg");
    std::fs::write(
        &train_cfg,
        "dataset = synth\nsynth_n = 96\nsynth_h = 6\nsynth_w = 6\nsynth_k = 2\npolicy = fmix\nepochs = 2\nbatch_size = 32\nhidden_dim = 8\nseed = 3\n",
    )
    .unwrap();
    let bench_cfg = pair_dir.join("bench.cfg");
    std::fs::write(
        &bench_cfg,
        "dataset = synth\nsynth_n = 64\nsynth_h = 6\nsynth_w = 6\nsynth_k = 2\npolicies = vanilla,cutmix\nalphas = 1\ntrials = 1\nepochs = 2\nbatch_size = 32\nhidden_dim = 8\nseed = 5\n",
    )
    .unwrap();

    let a = a_path.to_str().unwrap();
    let b = b_path.to_str().unwrap();
    let tc = train_cfg.to_str().unwrap();
    let bc = bench_cfg.to_str().unwrap();
    let invocations: Vec<(&str, Vec<String>)> = vec![
        (
            "mix",
            vec![
                "mix", "--policy", "puzzlemix", "--alpha", "2", "--seed", "11", "--pair", a, b,
                "--param", "blocks=4", "--out", ".",
            ]
            .into_iter()
            .map(String::from)
            .collect(),
        ),
        (
            "grid",
            vec!["grid", "--lambda", "0.5", "--seed", "9", "--out", "sheet.ppm"]
                .into_iter()
                .map(String::from)
                .collect(),
        ),
        (
            "stats",
            vec![
                "stats", "--policy", "fmix,cutmix", "--draws", "200", "--lambda", "0.37",
                "--size", "32", "--seed", "4", "--out", "stats.csv",
            ]
            .into_iter()
            .map(String::from)
            .collect(),
        ),
        (
            "train",
            vec!["train", "--config", tc, "--out", "report.json"]
                .into_iter()
                .map(String::from)
                .collect(),
        ),
        (
            "bench",
            vec!["bench", "--config", bc, "--out-dir", "."]
                .into_iter()
                .map(String::from)
                .collect(),
        ),
    ];

    for (name, args) in &invocations {
        let arg_refs: Vec<&str> = args.iter().map(String::as_str).collect();
        let mut snapshots = Vec::new();
        for run in 0..2 {
            let dir = root.join(format!("{name}_{run}"));
            std::fs::create_dir_all(&dir).unwrap();
            let argv: Vec<String> =
                std::iter::once("mixforge".to_string()).chain(args.iter().cloned()).collect();
            drop(argv);
            let output = run_cli(&dir, &arg_refs);
            assert!(
                output.status.success(),
                "{name} run {run} failed: {}",
                String::from_utf8_lossy(&output.stderr)
            );
            snapshots.push(snapshot(&dir));
        }
        assert!(!snapshots[0].is_empty(), "{name} produced no files");
        assert_eq!(
            snapshots[0].len(),
            snapshots[1].len(),
            "{name}: file sets differ between runs"
        );
        for ((name_a, bytes_a), (name_b, bytes_b)) in snapshots[0].iter().zip(&snapshots[1]) {
            assert_eq!(name_a, name_b, "{name}: file names differ");
            assert_eq!(bytes_a, bytes_b, "{name}: {name_a} differs between runs");
        }
    }
    println!("[PASS] criterion 9: mix, grid, stats, train, and bench each emit byte-identical files across repeated runs");
}
