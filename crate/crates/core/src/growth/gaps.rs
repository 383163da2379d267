//! Finding image regions the grown strands miss and seeding 3D points for
//! supplementary segments behind them.

use rayon::prelude::*;

use super::GrowthParams;
use crate::camera::CameraView;
use crate::error::{Error, Result};
use crate::field::HybridField;
use crate::geometry::{to_f32, to_f64, Vec3};
use crate::image2::Mask;
use crate::metrics::render_strand_view;
use crate::strand::HairModel;

fn check_views(masks: &[Mask], cams: &[CameraView]) -> Result<()> {
    if masks.len() != cams.len() {
        return Err(Error::SizeMismatch(format!("{} masks but {} cameras", masks.len(), cams.len())));
    }
    for (m, c) in masks.iter().zip(cams) {
        if m.width != c.width || m.height != c.height {
            return Err(Error::SizeMismatch(format!(
                "mask {}x{} does not match camera {}x{}",
                m.width, m.height, c.width, c.height
            )));
        }
    }
    Ok(())
}

/// Per view: hair mask minus the grown strands' coverage dilated by
/// `dilation` pixels.
pub fn detect_coverage_gaps(grown: &HairModel, masks: &[Mask], cams: &[CameraView], dilation: usize) -> Result<Vec<Mask>> {
    check_views(masks, cams)?;
    masks
        .par_iter()
        .zip(cams)
        .map(|(m, c)| {
            let cover = render_strand_view(grown, c).mask.dilate(dilation);
            m.and_not(&cover)
        })
        .collect()
}

/// First occupied point along the ray through pixel (x, y), marching from
/// where the ray enters the field box in steps of `step / 2`.
fn march(f: &HybridField, cam: &CameraView, x: usize, y: usize, p: &GrowthParams) -> Option<Vec3> {
    let origin = cam.position();
    let dir = cam.ray_direction(x as f64 + 0.5, y as f64 + 0.5);
    let (t0, t1) = f.aabb().intersect_ray(&origin, &dir)?;
    let dt = 0.5 * p.step;
    let n = ((t1 - t0) / dt).ceil() as usize;
    (0..=n).find_map(|k| {
        let q = to_f32(&(origin + dir * (t0 + k as f64 * dt).min(t1)));
        f.occupied(&to_f64(&q), p.stop_tau).then_some(q)
    })
}

/// Seeds from a deterministic subsample of all gap pixels (view-major, then
/// row-major): every `stride`-th pixel starting at `seed % stride`, where
/// `stride` spreads `max_seeds` over the total. Rays that never reach the
/// occupied region give no seed.
pub fn seed_gaps(gaps: &[Mask], cams: &[CameraView], f: &HybridField, p: &GrowthParams, max_seeds: usize) -> Result<Vec<Vec3>> {
    check_views(gaps, cams)?;
    if max_seeds == 0 {
        return Ok(Vec::new());
    }
    let pixels: Vec<(usize, usize, usize)> = gaps
        .iter()
        .enumerate()
        .flat_map(|(v, g)| (0..g.data.len()).filter(|&i| g.data[i]).map(move |i| (v, i % g.width, i / g.width)))
        .collect();
    if pixels.is_empty() {
        return Ok(Vec::new());
    }
    let stride = pixels.len().div_ceil(max_seeds).max(1);
    let offset = (p.seed % stride as u64) as usize;
    let picked: Vec<_> = pixels.iter().skip(offset).step_by(stride).take(max_seeds).collect();
    Ok(picked
        .par_iter()
        .map(|&&(v, x, y)| march(f, &cams[v], x, y, p))
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect())
}
