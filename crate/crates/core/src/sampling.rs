//! Mixing-ratio draws and in-batch pairing.

use alloc::format;
use alloc::vec::Vec;
use rand::Rng;
use rand_distr::{Distribution, Gamma};

use crate::error::{CoreError, Result};

/// A sampled mixing ratio together with the concentration that produced it.
/// `lambda` is the weight of the first sample of a pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MixRatio {
    pub lambda: f64,
    pub alpha: f64,
}

/// Draws `lambda ~ Beta(alpha, alpha)` as a ratio of two Gamma(alpha, 1)
/// variates (Marsaglia-Tsang, with the uniform-power boost below shape 1),
/// which stays valid across the whole useful alpha range.
///
/// The result is nudged into the open interval `(0, 1)`; for tiny alpha a
/// Gamma draw can underflow to exactly zero.
pub fn sample_lambda<R: Rng + ?Sized>(alpha: f64, rng: &mut R) -> Result<MixRatio> {
    if !alpha.is_finite() || alpha <= 0.0 {
        return Err(CoreError::Param(format!("alpha must be positive, got {alpha}")));
    }
    let gamma = Gamma::new(alpha, 1.0)
        .map_err(|e| CoreError::Param(format!("gamma setup failed: {e}")))?;
    let g1 = gamma.sample(rng);
    let g2 = gamma.sample(rng);
    let lambda = if g1 + g2 > 0.0 { g1 / (g1 + g2) } else { 0.5 };
    let lambda = lambda.clamp(1e-12, 1.0 - 1e-12);
    Ok(MixRatio { lambda, alpha })
}

/// One batch element and its mixing partner.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PairIndex {
    pub i: usize,
    pub j: usize,
}

/// Pairs each batch index `i` with `sigma(i)` for a uniformly random
/// permutation `sigma`, so the partner indices are a bijection onto the
/// batch. Fixed points are allowed (mixing a sample with itself is the
/// identity mix).
pub fn make_pairs<R: Rng + ?Sized>(batch_size: usize, rng: &mut R) -> Result<Vec<PairIndex>> {
    if batch_size == 0 {
        return Err(CoreError::Empty("batch size must be >= 1".into()));
    }
    let mut perm: Vec<usize> = (0..batch_size).collect();
    // Fisher-Yates.
    for i in (1..batch_size).rev() {
        let j = rng.gen_range(0..=i);
        perm.swap(i, j);
    }
    Ok((0..batch_size).map(|i| PairIndex { i, j: perm[i] }).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SeedSplit;
    use alloc::vec;

    #[test]
    fn rejects_nonpositive_alpha() {
        let mut rng = SeedSplit::new(1).pair(0);
        assert!(matches!(sample_lambda(0.0, &mut rng), Err(CoreError::Param(_))));
        assert!(matches!(sample_lambda(-1.0, &mut rng), Err(CoreError::Param(_))));
        assert!(matches!(sample_lambda(f64::NAN, &mut rng), Err(CoreError::Param(_))));
    }

    #[test]
    fn same_seed_same_lambda() {
        let a = sample_lambda(2.0, &mut SeedSplit::new(9).pair(3)).unwrap();
        let b = sample_lambda(2.0, &mut SeedSplit::new(9).pair(3)).unwrap();
        assert_eq!(a.lambda.to_bits(), b.lambda.to_bits());
    }

    #[test]
    fn lambda_stays_in_open_interval() {
        let mut rng = SeedSplit::new(5).pair(0);
        for _ in 0..2000 {
            let r = sample_lambda(0.1, &mut rng).unwrap();
            assert!(r.lambda > 0.0 && r.lambda < 1.0);
        }
    }

    #[test]
    fn single_sample_pairs_with_itself() {
        let mut rng = SeedSplit::new(3).batch();
        let pairs = make_pairs(1, &mut rng).unwrap();
        assert_eq!(pairs, vec![PairIndex { i: 0, j: 0 }]);
    }

    #[test]
    fn partners_form_a_permutation() {
        let mut rng = SeedSplit::new(11).batch();
        let pairs = make_pairs(4, &mut rng).unwrap();
        let mut partners: Vec<usize> = pairs.iter().map(|p| p.j).collect();
        partners.sort_unstable();
        assert_eq!(partners, vec![0, 1, 2, 3]);
        assert_eq!(pairs.iter().map(|p| p.i).collect::<Vec<_>>(), vec![0, 1, 2, 3]);
    }

    #[test]
    fn empty_batch_is_an_error() {
        let mut rng = SeedSplit::new(0).batch();
        assert!(matches!(make_pairs(0, &mut rng), Err(CoreError::Empty(_))));
    }
}
