//! Saliency-maximizing block masks with optimal block transport.
//!
//! A desk-scale reconstruction of optimal-transported cutting: the image is
//! divided into a `b x b` block grid, the mask keeps the blocks where the
//! first image carries more saliency mass than the second, and the donor
//! image's most salient blocks are transported (injectively, within a
//! Chebyshev radius) onto the cut positions before pasting.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use crate::assignment::{min_cost_assignment, FORBIDDEN_COST};
use crate::error::{CoreError, Result};
use crate::image::ImageTensor;
use crate::label::{mix_labels_linear, LabelVector};
use crate::mask::{axis_cells, corrected_lambda, MixMask};
use crate::policy::MixResult;
use crate::saliency::{block_reduce, BlockSaliency, SaliencyDetector};

/// Block-level saliency of both images on the same `b x b` grid.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockGrid {
    pub b: usize,
    pub sal_i: Vec<f64>,
    pub sal_j: Vec<f64>,
}

impl BlockGrid {
    pub fn new(sal_i: BlockSaliency, sal_j: BlockSaliency) -> Result<Self> {
        if sal_i.b != sal_j.b {
            return Err(CoreError::Shape(format!(
                "block grids differ: {} vs {}",
                sal_i.b, sal_j.b
            )));
        }
        for values in [&sal_i.values, &sal_j.values] {
            if values.iter().any(|v| !v.is_finite() || *v < 0.0) {
                return Err(CoreError::Param("block saliency must be finite and >= 0".into()));
            }
            let sum: f64 = values.iter().sum();
            if (sum - 1.0).abs() > 1e-6 {
                return Err(CoreError::Param(format!("block saliency sums to {sum}, not 1")));
            }
        }
        Ok(Self { b: sal_i.b, sal_i: sal_i.values, sal_j: sal_j.values })
    }
}

/// Injective map from cut block positions to donor blocks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransportPlan {
    /// `(destination block, source block)` per cut position, ascending by
    /// destination.
    pub moves: Vec<(usize, usize)>,
    pub max_shift: usize,
    /// Set when no feasible assignment existed and the identity plan was
    /// used instead.
    pub fell_back: bool,
}

impl TransportPlan {
    pub fn is_identity(&self) -> bool {
        self.moves.iter().all(|&(dest, src)| dest == src)
    }

    /// Total donor saliency carried onto the cut positions.
    pub fn transported_saliency(&self, sal_j: &[f64]) -> f64 {
        self.moves.iter().map(|&(_, src)| sal_j[src]).sum()
    }
}

/// Keeps exactly `round(lambda * b^2)` blocks from the first image, chosen
/// to maximize kept `sal_i` plus dropped `sal_j`. The objective separates
/// per block, so sorting on `sal_i - sal_j` (ties toward the lower block
/// index) is exact.
pub fn optimize_block_mask(grid: &BlockGrid, lambda: f64) -> Result<Vec<bool>> {
    if !(0.0..=1.0).contains(&lambda) {
        return Err(CoreError::Param(format!("lambda {lambda} outside [0, 1]")));
    }
    let total = grid.b * grid.b;
    let keep = ((lambda * total as f64).round() as usize).min(total);
    let mut order: Vec<usize> = (0..total).collect();
    order.sort_unstable_by(|&a, &b| {
        let da = grid.sal_i[a] - grid.sal_j[a];
        let db = grid.sal_i[b] - grid.sal_j[b];
        db.partial_cmp(&da).expect("finite saliency").then(a.cmp(&b))
    });
    let mut mask = vec![false; total];
    for &idx in order.iter().take(keep) {
        mask[idx] = true;
    }
    Ok(mask)
}

fn chebyshev(a: usize, b: usize, width: usize) -> usize {
    let (ay, ax) = (a / width, a % width);
    let (by, bx) = (b / width, b % width);
    ay.abs_diff(by).max(ax.abs_diff(bx))
}

/// Assigns donor blocks to the mask's cut positions, maximizing transported
/// donor saliency subject to injectivity and a Chebyshev shift bound. Solved
/// as a min-cost assignment on negated saliency; `max_shift = 0` degenerates
/// to the identity plan.
pub fn transport_blocks(
    sal_j: &BlockSaliency,
    mask: &[bool],
    max_shift: usize,
) -> Result<TransportPlan> {
    let b = sal_j.b;
    if mask.len() != b * b {
        return Err(CoreError::Shape(format!(
            "mask length {} != {b}x{b}",
            mask.len()
        )));
    }
    let positions: Vec<usize> = (0..b * b).filter(|&p| !mask[p]).collect();
    if positions.is_empty() {
        return Ok(TransportPlan { moves: Vec::new(), max_shift, fell_back: false });
    }
    let cols = b * b;
    let mut cost = Vec::with_capacity(positions.len() * cols);
    for &pos in &positions {
        for src in 0..cols {
            if chebyshev(pos, src, b) <= max_shift {
                cost.push(-sal_j.values[src]);
            } else {
                cost.push(FORBIDDEN_COST);
            }
        }
    }
    let assign = min_cost_assignment(&cost, positions.len(), cols)?;
    let infeasible = positions
        .iter()
        .zip(&assign)
        .any(|(&pos, &src)| chebyshev(pos, src, b) > max_shift);
    if infeasible {
        // The identity plan is always shift-0 feasible; keep it and flag.
        return Ok(TransportPlan {
            moves: positions.iter().map(|&p| (p, p)).collect(),
            max_shift,
            fell_back: true,
        });
    }
    Ok(TransportPlan {
        moves: positions.into_iter().zip(assign).collect(),
        max_shift,
        fell_back: false,
    })
}

/// Full optimal-transported cut of a pair: saliency, block reduction, mask
/// optimization, transport, and pixel composition. Labels use the realized
/// pixel-mask mean.
#[allow(clippy::too_many_arguments)]
pub fn puzzle_mix(
    x_i: &ImageTensor,
    x_j: &ImageTensor,
    y_i: &LabelVector,
    y_j: &LabelVector,
    lambda: f64,
    b: usize,
    max_shift: usize,
    detector: SaliencyDetector,
) -> Result<MixResult> {
    x_i.require_same_shape(x_j)?;
    let (h, w, _) = x_i.shape();
    if b == 0 || b > h.min(w) {
        return Err(CoreError::Param(format!(
            "block count {b} outside [1, min({h}, {w})]"
        )));
    }
    let grid = BlockGrid::new(
        block_reduce(&detector.compute(x_i), b)?,
        block_reduce(&detector.compute(x_j), b)?,
    )?;
    let block_mask = optimize_block_mask(&grid, lambda)?;
    let plan = transport_blocks(
        &BlockSaliency { b, values: grid.sal_j.clone() },
        &block_mask,
        max_shift,
    )?;

    let rows = axis_cells(h, b);
    let cols = axis_cells(w, b);
    let rect = |block: usize| {
        let (y0, bh) = rows[block / b];
        let (x0, bw) = cols[block % b];
        (y0, x0, bh, bw)
    };

    let mut image = x_i.clone();
    let mut mask_weights = vec![1.0; h * w];
    for &(dest, src) in &plan.moves {
        let (dy0, dx0, dh, dw) = rect(dest);
        let (sy0, sx0, sh, sw) = rect(src);
        let patch = x_j.crop(sy0, sx0, sh, sw)?;
        // Trailing blocks can be larger on non-divisible grids; resample the
        // donor block to the destination footprint when sizes differ.
        let patch = if (sh, sw) == (dh, dw) { patch } else { patch.bilinear_resize(dh, dw)? };
        for y in 0..dh {
            for x in 0..dw {
                for c in 0..x_i.channels() {
                    image.set(dy0 + y, dx0 + x, c, patch.get(y, x, c));
                }
                mask_weights[(dy0 + y) * w + (dx0 + x)] = 0.0;
            }
        }
    }
    let mask = MixMask::new(h, w, mask_weights)?;
    let lambda_effective = corrected_lambda(&mask)?;
    let label = mix_labels_linear(y_i, y_j, lambda_effective)?;
    Ok(MixResult {
        image,
        label,
        lambda_nominal: lambda,
        lambda_effective,
        mask: Some(mask),
    })
}
