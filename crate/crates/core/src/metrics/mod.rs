//! Strand reconstruction metrics against ground-truth views: HairSale
//! (projected orientation error), HairRida (relative depth accuracy) and
//! projected mask IoU.

mod render;

pub use render::{render_strand_view, StrandRender, DEPTH_TIE, NEAR_PLANE};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::camera::CameraView;
use crate::error::{Error, Result};
use crate::image2::{DepthMap, Mask};
use crate::orientation::{mean_angular_error, AngularError, MaskPolicy, OrientationMap};
use crate::strand::HairModel;

pub const DEFAULT_PAIRS: usize = 10_000;
/// Ground-truth depth difference (meters) below which a pair is not scored.
pub const DEFAULT_DEPTH_FLOOR: f64 = 1e-3;
/// Pair sampling gives up after this many draws per requested pair.
const MAX_PAIR_ATTEMPTS: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RidaScore {
    pub pct: f64,
    pub pairs: usize,
}

/// Mean angular error of the model's render against `gt` over the
/// intersection of both masks.
pub fn hairsale(model: &HairModel, cam: &CameraView, gt: &OrientationMap) -> Result<AngularError> {
    let r = render_strand_view(model, cam);
    mean_angular_error(&r.orientation, gt, MaskPolicy::Intersection)
}

/// HairRida on precomputed depth maps. Pairs are drawn uniformly from the
/// pixels covered by both `pred_mask` and `gt_mask`; a pair counts when the
/// ground-truth depths differ by more than `floor` and the predicted depths
/// are ordered the same way (predicted ties count as wrong).
pub fn hairrida_depth(
    pred: &DepthMap,
    pred_mask: &Mask,
    gt: &DepthMap,
    gt_mask: &Mask,
    n_pairs: usize,
    floor: f64,
    seed: u64,
) -> Result<RidaScore> {
    if n_pairs == 0 {
        return Err(Error::InvalidParam("pair count must be >= 1".into()));
    }
    pred.check_same_size(gt, "depth maps")?;
    pred.check_same_size(pred_mask, "depth and mask")?;
    gt.check_same_size(gt_mask, "depth and mask")?;
    let pixels: Vec<usize> = (0..gt.data.len()).filter(|&i| pred_mask.data[i] && gt_mask.data[i]).collect();
    if pixels.len() < 2 {
        return Err(Error::NoValidPairs);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut valid, mut correct) = (0usize, 0usize);
    for _ in 0..n_pairs.saturating_mul(MAX_PAIR_ATTEMPTS) {
        let a = pixels[rng.gen_range(0..pixels.len())];
        let b = pixels[rng.gen_range(0..pixels.len())];
        let dg = gt.data[a] as f64 - gt.data[b] as f64;
        if dg.abs() <= floor {
            continue;
        }
        let dp = pred.data[a] as f64 - pred.data[b] as f64;
        valid += 1;
        correct += (dp * dg > 0.0) as usize;
        if valid == n_pairs {
            break;
        }
    }
    if valid == 0 {
        return Err(Error::NoValidPairs);
    }
    Ok(RidaScore {
        pct: 100.0 * correct as f64 / valid as f64,
        pairs: valid,
    })
}

pub fn hairrida(model: &HairModel, cam: &CameraView, gt_depth: &DepthMap, gt_mask: &Mask, n_pairs: usize, seed: u64) -> Result<RidaScore> {
    let r = render_strand_view(model, cam);
    hairrida_depth(&r.depth, &r.mask, gt_depth, gt_mask, n_pairs, DEFAULT_DEPTH_FLOOR, seed)
}

/// `|pred ∧ gt| / |pred ∨ gt|`, 1 when both are empty.
pub fn mask_iou(pred: &Mask, gt: &Mask) -> Result<f64> {
    pred.check_same_size(gt, "masks")?;
    let (mut inter, mut union) = (0usize, 0usize);
    for (a, b) in pred.data.iter().zip(&gt.data) {
        inter += (*a && *b) as usize;
        union += (*a || *b) as usize;
    }
    Ok(if union == 0 { 1.0 } else { inter as f64 / union as f64 })
}

/// Ground truth for one view.
#[derive(Debug, Clone)]
pub struct GtView {
    pub orientation: OrientationMap,
    pub depth: DepthMap,
    pub mask: Mask,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ViewEval {
    pub view: usize,
    /// None when the rendered and ground-truth masks do not overlap.
    pub hairsale_deg: Option<f64>,
    pub hairsale_pixels: usize,
    pub hairrida_pct: Option<f64>,
    pub hairrida_pairs: usize,
    pub iou: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EvalParams {
    pub n_pairs: usize,
    pub depth_floor_m: f64,
    pub seed: u64,
}

impl Default for EvalParams {
    fn default() -> Self {
        EvalParams {
            n_pairs: DEFAULT_PAIRS,
            depth_floor_m: DEFAULT_DEPTH_FLOOR,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FieldEval {
    pub l1: f64,
    pub mse: f64,
    pub occupancy_iou: f64,
    pub occupancy_precision: f64,
    pub samples: usize,
}

/// Means over views (views without overlap are left out of the HairSale and
/// HairRida means).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalReport {
    pub hairsale_deg: f64,
    pub hairrida_pct: f64,
    pub iou: f64,
    pub hairsale_pixels: usize,
    pub hairrida_pairs: usize,
    pub per_view: Vec<ViewEval>,
    pub params: EvalParams,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub field: Option<FieldEval>,
}

fn mean(v: impl Iterator<Item = f64>) -> Option<f64> {
    let (s, n) = v.fold((0.0, 0usize), |(s, n), x| (s + x, n + 1));
    (n > 0).then(|| s / n as f64)
}

/// Evaluates a model against ground-truth views. View `k` uses a seed
/// derived from `params.seed` and `k`.
pub fn evaluate(model: &HairModel, cams: &[CameraView], gts: &[GtView], params: &EvalParams) -> Result<EvalReport> {
    use rayon::prelude::*;
    if cams.len() != gts.len() {
        return Err(Error::SizeMismatch(format!("{} cameras but {} ground-truth views", cams.len(), gts.len())));
    }
    if cams.is_empty() {
        return Err(Error::InvalidParam("evaluation needs at least one view".into()));
    }
    let per_view: Vec<ViewEval> = cams
        .par_iter()
        .zip(gts)
        .enumerate()
        .map(|(k, (cam, gt))| {
            let r = render_strand_view(model, cam);
            let sale = match mean_angular_error(&r.orientation, &gt.orientation, MaskPolicy::Intersection) {
                Ok(e) => Some(e),
                Err(Error::NoOverlap) => None,
                Err(e) => return Err(e),
            };
            let seed = params.seed.wrapping_add((k as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
            let rida = match hairrida_depth(&r.depth, &r.mask, &gt.depth, &gt.mask, params.n_pairs, params.depth_floor_m, seed) {
                Ok(s) => Some(s),
                Err(Error::NoValidPairs) => None,
                Err(e) => return Err(e),
            };
            Ok(ViewEval {
                view: k,
                hairsale_deg: sale.map(|e| e.mean_deg),
                hairsale_pixels: sale.map_or(0, |e| e.pixels),
                hairrida_pct: rida.map(|s| s.pct),
                hairrida_pairs: rida.map_or(0, |s| s.pairs),
                iou: mask_iou(&r.mask, &gt.mask)?,
            })
        })
        .collect::<Result<_>>()?;
    Ok(EvalReport {
        hairsale_deg: mean(per_view.iter().filter_map(|v| v.hairsale_deg)).ok_or(Error::NoOverlap)?,
        hairrida_pct: mean(per_view.iter().filter_map(|v| v.hairrida_pct)).ok_or(Error::NoValidPairs)?,
        iou: mean(per_view.iter().map(|v| v.iou)).unwrap_or(1.0),
        hairsale_pixels: per_view.iter().map(|v| v.hairsale_pixels).sum(),
        hairrida_pairs: per_view.iter().map(|v| v.hairrida_pairs).sum(),
        per_view,
        params: *params,
        field: None,
    })
}
