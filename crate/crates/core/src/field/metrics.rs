//! Field quality metrics: orientation error over the occupied region and
//! occupancy IoU / precision over the whole box.

use nalgebra::Vector3;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{HybridField, OCCUPANCY_TAU};
use crate::error::{Error, Result};
use crate::geometry::Aabb;

/// Rejection sampling gives up after this many attempts per requested sample.
const MAX_OVERSAMPLING: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FieldOrientationError {
    /// Mean over samples of ‖d* − d‖₁ / 3.
    pub l1: f64,
    /// Mean over samples of ‖d* − d‖² / 3.
    pub mse: f64,
    pub samples: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OccupancyScores {
    pub iou: f64,
    pub precision: f64,
    pub samples: usize,
}

fn check_same_box(pred: &HybridField, gt: &HybridField) -> Result<()> {
    if pred.aabb() != gt.aabb() {
        return Err(Error::SizeMismatch("fields must share the same box".into()));
    }
    Ok(())
}

fn uniform_point(rng: &mut ChaCha8Rng, b: &Aabb) -> Vector3<f64> {
    Vector3::from_fn(|a, _| {
        let (lo, hi) = (b.min[a] as f64, b.max[a] as f64);
        lo + (hi - lo) * rng.gen::<f64>()
    })
}

/// Orientation error over `n_samples` points drawn uniformly from the
/// ground truth's occupied region.
pub fn field_orientation_mse(pred: &HybridField, gt: &HybridField, n_samples: usize, seed: u64) -> Result<FieldOrientationError> {
    check_same_box(pred, gt)?;
    if n_samples == 0 {
        return Err(Error::InvalidParam("sample count must be >= 1".into()));
    }
    let b = gt.aabb();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut l1, mut mse, mut got) = (0.0f64, 0.0f64, 0usize);
    for _ in 0..n_samples.saturating_mul(MAX_OVERSAMPLING) {
        let x = uniform_point(&mut rng, &b);
        let g = gt.sample(&x);
        if g.norm() <= OCCUPANCY_TAU {
            continue;
        }
        let d = pred.sample(&x) - g;
        l1 += d.abs().sum() / 3.0;
        mse += d.norm_squared() / 3.0;
        got += 1;
        if got == n_samples {
            break;
        }
    }
    if got < n_samples {
        return Err(Error::EmptyOccupancy);
    }
    Ok(FieldOrientationError {
        l1: l1 / got as f64,
        mse: mse / got as f64,
        samples: got,
    })
}

/// IoU and precision of the predicted occupancy against the ground truth
/// over points uniform in the box. Empty-set conventions: IoU of two empty
/// sets is 1, precision of an empty prediction is 1.
pub fn occupancy_iou_precision(pred: &HybridField, gt: &HybridField, n_samples: usize, seed: u64, tau: f64) -> Result<OccupancyScores> {
    check_same_box(pred, gt)?;
    let b = gt.aabb();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut inter, mut union, mut npred) = (0usize, 0usize, 0usize);
    for _ in 0..n_samples {
        let x = uniform_point(&mut rng, &b);
        let p = pred.occupied(&x, tau);
        let g = gt.occupied(&x, tau);
        inter += (p && g) as usize;
        union += (p || g) as usize;
        npred += p as usize;
    }
    Ok(OccupancyScores {
        iou: if union == 0 { 1.0 } else { inter as f64 / union as f64 },
        precision: if npred == 0 { 1.0 } else { inter as f64 / npred as f64 },
        samples: n_samples,
    })
}
