//! Property tests for the algebraic contracts of mixing.

use mixforge_core::{
    apply_mask, apply_policy, corrected_lambda, cross_entropy, fourier_mask, grid_mask,
    make_pairs, mix_labels_linear, mixup_cross_entropy, mixup_pair, rect_mask, ImageTensor,
    LabelVector, MixMask, PolicyConfig, PolicyKind, Prediction, SeedSplit,
};
use proptest::prelude::*;

fn label_strategy(k: usize) -> impl Strategy<Value = LabelVector> {
    proptest::collection::vec(0.0_f64..1.0, k).prop_map(|raw| {
        let sum: f64 = raw.iter().sum();
        let probs = if sum > 0.0 {
            raw.iter().map(|v| v / sum).collect()
        } else {
            vec![1.0 / raw.len() as f64; raw.len()]
        };
        LabelVector::new(probs).unwrap()
    })
}

fn image_strategy(h: usize, w: usize, c: usize) -> impl Strategy<Value = ImageTensor> {
    proptest::collection::vec(0.0_f64..=1.0, h * w * c)
        .prop_map(move |data| ImageTensor::new(h, w, c, data).unwrap())
}

proptest! {
    #[test]
    fn label_mixing_is_symmetric(
        y_i in label_strategy(6),
        y_j in label_strategy(6),
        lambda in 0.0_f64..=1.0,
    ) {
        let a = mix_labels_linear(&y_i, &y_j, lambda).unwrap();
        let b = mix_labels_linear(&y_j, &y_i, 1.0 - lambda).unwrap();
        for (p, q) in a.probs().iter().zip(b.probs()) {
            prop_assert!((p - q).abs() < 1e-12);
        }
    }

    #[test]
    fn mixed_labels_stay_distributions(
        y_i in label_strategy(8),
        y_j in label_strategy(8),
        lambda in 0.0_f64..=1.0,
    ) {
        let mixed = mix_labels_linear(&y_i, &y_j, lambda).unwrap();
        prop_assert!(mixed.probs().iter().all(|p| *p >= 0.0));
        let sum: f64 = mixed.probs().iter().sum();
        prop_assert!((sum - 1.0).abs() < 1e-6);
    }

    #[test]
    fn pairing_is_a_bijection(batch in 1usize..40, seed in any::<u64>()) {
        let pairs = make_pairs(batch, &mut SeedSplit::new(seed).batch()).unwrap();
        let mut partners: Vec<usize> = pairs.iter().map(|p| p.j).collect();
        partners.sort_unstable();
        prop_assert_eq!(partners, (0..batch).collect::<Vec<_>>());
    }

    #[test]
    fn masked_blend_stays_in_range(
        x_i in image_strategy(6, 5, 1),
        x_j in image_strategy(6, 5, 1),
        weights in proptest::collection::vec(0.0_f64..=1.0, 30),
    ) {
        let mask = MixMask::new(6, 5, weights).unwrap();
        let out = apply_mask(&x_i, &x_j, &mask).unwrap();
        prop_assert!(out.data().iter().all(|v| (0.0..=1.0).contains(v)));
    }

    #[test]
    fn mask_complement_swaps_sources(
        x_i in image_strategy(4, 7, 1),
        x_j in image_strategy(4, 7, 1),
        weights in proptest::collection::vec(0.0_f64..=1.0, 28),
    ) {
        let mask = MixMask::new(4, 7, weights).unwrap();
        let direct = apply_mask(&x_i, &x_j, &mask).unwrap();
        let swapped = apply_mask(&x_j, &x_i, &mask.complement()).unwrap();
        for (a, b) in direct.data().iter().zip(swapped.data()) {
            prop_assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn exact_area_masks_hit_their_popcount(
        seed in any::<u64>(),
        lambda in 0.0_f64..=1.0,
        h in 4usize..24,
        w in 4usize..24,
    ) {
        let split = SeedSplit::new(seed);
        let fmask = fourier_mask(h, w, lambda, 3.0, &mut split.pair(0)).unwrap();
        let expect = (lambda * (h * w) as f64).round() as usize;
        prop_assert_eq!(fmask.count_ones(), expect);
        prop_assert!((corrected_lambda(&fmask).unwrap()
            - expect as f64 / (h * w) as f64).abs() < 1e-12);

        let n = 4.min(h).min(w);
        let gmask = grid_mask(h, w, n, lambda, &mut split.pair(1)).unwrap();
        let cells = (lambda * (n * n) as f64).round() as usize;
        let mut kept_cells = 0;
        // Count kept cells through the pixel at each cell origin.
        let base_h = h / n;
        let base_w = w / n;
        for ci in 0..n {
            for cj in 0..n {
                if gmask.get(ci * base_h, cj * base_w) == 1.0 {
                    kept_cells += 1;
                }
            }
        }
        prop_assert_eq!(kept_cells, cells);
    }

    #[test]
    fn rect_unclipped_area_is_closed_form(seed in any::<u64>(), lambda in 0.0_f64..=1.0) {
        let (mask, rect) = rect_mask(32, 32, lambda, &mut SeedSplit::new(seed).pair(0)).unwrap();
        if rect.fits(32, 32) {
            let expect = 1.0 - (rect.cut_w * rect.cut_h) as f64 / 1024.0;
            prop_assert!((corrected_lambda(&mask).unwrap() - expect).abs() < 1e-12);
        }
    }

    #[test]
    fn mce_is_linear_in_lambda(
        y_i in label_strategy(5),
        y_j in label_strategy(5),
        raw in proptest::collection::vec(0.01_f64..1.0, 5),
        lambda in 0.0_f64..=0.5,
    ) {
        let sum: f64 = raw.iter().sum();
        let pred = Prediction::new(raw.iter().map(|v| v / sum).collect()).unwrap();
        // Three collinear points: lambda, lambda + d, lambda + 2d.
        let d = 0.25;
        let l0 = mixup_cross_entropy(&pred, &y_i, &y_j, lambda).unwrap();
        let l1 = mixup_cross_entropy(&pred, &y_i, &y_j, lambda + d).unwrap();
        let l2 = mixup_cross_entropy(&pred, &y_i, &y_j, lambda + 2.0 * d).unwrap();
        prop_assert!((l2 - 2.0 * l1 + l0).abs() < 1e-9);
        prop_assert!(l0 >= 0.0 && l1 >= 0.0 && l2 >= 0.0);
    }

    #[test]
    fn mce_matches_soft_label_ce(
        y_i in label_strategy(7),
        y_j in label_strategy(7),
        raw in proptest::collection::vec(0.01_f64..1.0, 7),
        lambda in 0.0_f64..=1.0,
    ) {
        let sum: f64 = raw.iter().sum();
        let pred = Prediction::new(raw.iter().map(|v| v / sum).collect()).unwrap();
        let mce = mixup_cross_entropy(&pred, &y_i, &y_j, lambda).unwrap();
        let soft = cross_entropy(&pred, &mix_labels_linear(&y_i, &y_j, lambda).unwrap()).unwrap();
        prop_assert!((mce - soft).abs() < 1e-12);
    }
}

#[test]
fn binary_mask_policies_only_move_pixels() {
    // Every output pixel of a binary-mask policy is one of the two source
    // pixels at that location.
    let mut rng_seed = 0u64;
    for kind in [PolicyKind::Cutmix, PolicyKind::Gridmix, PolicyKind::Fmix, PolicyKind::Saliencymix]
    {
        rng_seed += 1;
        let split = SeedSplit::new(500 + rng_seed);
        let mut data_i = Vec::new();
        let mut data_j = Vec::new();
        for p in 0..8 * 8 {
            data_i.push((p % 7) as f64 / 7.0);
            data_j.push((p % 5) as f64 / 5.0);
        }
        let batch = vec![
            ImageTensor::new(8, 8, 1, data_i).unwrap(),
            ImageTensor::new(8, 8, 1, data_j).unwrap(),
        ];
        let labels = vec![LabelVector::one_hot(2, 0).unwrap(), LabelVector::one_hot(2, 1).unwrap()];
        let mut cfg = PolicyConfig::new(kind, 1.0).unwrap();
        cfg.params.n_cells = 2;
        let out = apply_policy(&cfg, &batch, &labels, split).unwrap();
        let pairs = make_pairs(2, &mut split.batch()).unwrap();
        for (result, pair) in out.iter().zip(&pairs) {
            for p in 0..64 {
                let v = result.image.data()[p];
                let a = batch[pair.i].data()[p];
                let b = batch[pair.j].data()[p];
                assert!(v == a || v == b, "{}: pixel {p} is {v}, not {a} or {b}", kind.name());
            }
        }
    }
}

#[test]
fn interpolation_boundaries_reproduce_sources() {
    let x_i = ImageTensor::constant(6, 6, 3, 0.9).unwrap();
    let x_j = ImageTensor::constant(6, 6, 3, 0.3).unwrap();
    assert_eq!(mixup_pair(&x_i, &x_j, 1.0).unwrap(), x_i);
    assert_eq!(mixup_pair(&x_i, &x_j, 0.0).unwrap(), x_j);
    let mid = mixup_pair(&x_i, &x_j, 0.5).unwrap();
    assert!(mid.data().iter().all(|v| (v - 0.6).abs() < 1e-12));
}

#[test]
fn exact_mask_generators_hit_boundaries_exactly() {
    // Generators with exact area control reproduce a full source at the
    // lambda endpoints; clipped rectangle cuts only guarantee lambda = 1.
    let split = SeedSplit::new(77);
    for (name, mask) in [
        ("grid", grid_mask(12, 12, 3, 0.0, &mut split.pair(0)).unwrap()),
        ("fourier", fourier_mask(12, 12, 0.0, 3.0, &mut split.pair(1)).unwrap()),
    ] {
        assert_eq!(mask.count_ones(), 0, "{name} at lambda 0");
    }
    for (name, mask) in [
        ("grid", grid_mask(12, 12, 3, 1.0, &mut split.pair(2)).unwrap()),
        ("fourier", fourier_mask(12, 12, 1.0, 3.0, &mut split.pair(3)).unwrap()),
        ("rect", rect_mask(12, 12, 1.0, &mut split.pair(4)).unwrap().0),
    ] {
        assert_eq!(mask.count_ones(), 144, "{name} at lambda 1");
    }
}
