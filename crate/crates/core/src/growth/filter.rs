//! Dropping short strands that do not project into enough hair masks.

use super::GrowthParams;
use crate::camera::CameraView;
use crate::error::{Error, Result};
use crate::geometry::to_f64;
use crate::image2::Mask;
use crate::strand::{HairModel, Strand};

#[derive(Debug, Clone, PartialEq)]
pub struct FilterResult {
    pub model: HairModel,
    pub dropped: usize,
    /// Input index of every kept strand.
    pub kept: Vec<usize>,
}

/// Fraction of the strand's points that land on mask pixels in front of
/// the camera.
pub(crate) fn inside_fraction(s: &Strand, mask: &Mask, cam: &CameraView) -> f64 {
    let hits = s
        .points()
        .iter()
        .filter(|p| {
            let (u, v, z) = cam.project(&to_f64(p));
            z > 0.0 && cam.pixel(u, v).is_some_and(|(x, y)| *mask.get(x, y))
        })
        .count();
    hits as f64 / s.len() as f64
}

/// Strands with at least `p.min_len_points` points always pass. Shorter
/// strands pass when, in at least `min_views` views, at least `inside_frac`
/// of their points project onto the hair mask.
pub fn filter_short_strands(
    model: &HairModel,
    masks: &[Mask],
    cams: &[CameraView],
    p: &GrowthParams,
    min_views: usize,
    inside_frac: f64,
) -> Result<FilterResult> {
    if masks.len() != cams.len() {
        return Err(Error::SizeMismatch(format!("{} masks but {} cameras", masks.len(), cams.len())));
    }
    let mut kept = Vec::with_capacity(model.len());
    let mut kept_idx = Vec::with_capacity(model.len());
    let mut dropped = 0;
    for (i, s) in model.strands().iter().enumerate() {
        let keep = s.len() >= p.min_len_points
            || masks.iter().zip(cams).filter(|(m, c)| inside_fraction(s, m, c) >= inside_frac).count() >= min_views;
        if keep {
            kept.push(s.clone());
            kept_idx.push(i);
        } else {
            dropped += 1;
        }
    }
    Ok(FilterResult {
        model: HairModel::new(kept),
        dropped,
        kept: kept_idx,
    })
}
