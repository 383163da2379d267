//! Regrowing collapsed (very short) strands from multi-view 2D orientations
//! lifted into the scalp tangent plane.

use nalgebra::Vector3;
use rayon::prelude::*;

use super::GrowthParams;
use crate::camera::CameraView;
use crate::error::{Error, Result};
use crate::field::HybridField;
use crate::geometry::{to_f32, to_f64};
use crate::orientation::OrientationMap;
use crate::strand::{RootSample, Scalp, Strand};

#[derive(Debug, Clone, PartialEq)]
pub struct BuzzcutResult {
    /// One strand per input root; roots seen by no view stay single points.
    pub strands: Vec<Strand>,
    pub directions: Vec<Option<Vector3<f64>>>,
    pub unrecovered: usize,
}

fn tangent_part(v: &Vector3<f64>, n: &Vector3<f64>) -> Vector3<f64> {
    v - n * n.dot(v)
}

/// Lifts the undirected image angle `theta` seen at `root` in `cam` to a 3D
/// unit direction: the intersection of the plane through the camera ray
/// and the image line direction with the tangent plane of normal `n`. The
/// sign is chosen so the result has a non-negative component along `away`.
pub fn lift_orientation(cam: &CameraView, root: &Vector3<f64>, n: &Vector3<f64>, theta: f64, away: &Vector3<f64>) -> Option<Vector3<f64>> {
    let c = cam.to_camera(root);
    if c.z <= 0.0 {
        return None;
    }
    let ray = Vector3::new(c.x / c.z, c.y / c.z, 1.0);
    let line = Vector3::new(theta.cos() / cam.fx, theta.sin() / cam.fy, 0.0);
    let plane_n = cam.rotation().transpose() * ray.cross(&line);
    let d = plane_n.cross(n);
    let len = d.norm();
    if len < 1e-9 {
        return None;
    }
    let d = d / len;
    Some(if d.dot(away) < 0.0 { -d } else { d })
}

/// Direction "away from the apex" in the tangent plane, falling back to
/// straight down for roots at the apex.
fn away_direction(root: &Vector3<f64>, n: &Vector3<f64>, apex: &Vector3<f64>) -> Vector3<f64> {
    let a = tangent_part(&(root - apex), n);
    if a.norm() > 1e-9 {
        return a.normalize();
    }
    tangent_part(&-Vector3::y(), n)
}

/// Mean lifted direction over views where the root is visible: in front of
/// the camera, in frame, on the orientation mask, normal facing the camera.
fn recover_direction(r: &RootSample, omaps: &[OrientationMap], cams: &[CameraView], apex: &Vector3<f64>) -> Option<Vector3<f64>> {
    let root = to_f64(&r.position);
    let n = to_f64(&r.normal).normalize();
    let away = away_direction(&root, &n, apex);
    let mut sum = Vector3::zeros();
    let mut views = 0;
    for (cam, om) in cams.iter().zip(omaps) {
        if n.dot(&(root - cam.position())) >= 0.0 {
            continue;
        }
        let (u, v, z) = cam.project(&root);
        if z <= 0.0 {
            continue;
        }
        let Some((x, y)) = cam.pixel(u, v) else { continue };
        let i = y * om.width + x;
        if !om.mask[i] {
            continue;
        }
        if let Some(d) = lift_orientation(cam, &root, &n, om.angle[i] as f64, &away) {
            sum += d;
            views += 1;
        }
    }
    if views == 0 {
        return None;
    }
    let t = tangent_part(&sum, &n);
    (t.norm() > 1e-12).then(|| t.normalize())
}

/// For each collapsed root, estimates a tangent growth direction from the
/// orientation maps and grows `buzz_points` points: straight along it for
/// the first half, then blending linearly toward the field direction
/// (where the field is occupied).
pub fn recover_buzzcut(
    collapsed: &[RootSample],
    omaps: &[OrientationMap],
    cams: &[CameraView],
    f: &HybridField,
    scalp: &Scalp,
    p: &GrowthParams,
    buzz_points: usize,
) -> Result<BuzzcutResult> {
    p.validate()?;
    if omaps.len() != cams.len() {
        return Err(Error::SizeMismatch(format!("{} orientation maps but {} cameras", omaps.len(), cams.len())));
    }
    if buzz_points < 2 {
        return Err(Error::InvalidParam("buzz_points must be >= 2".into()));
    }
    let apex = to_f64(&scalp.apex());
    let half = buzz_points / 2;
    let out: Vec<(Strand, Option<Vector3<f64>>)> = collapsed
        .par_iter()
        .map(|r| {
            let Some(dir) = recover_direction(r, omaps, cams, &apex) else {
                return Strand::single(r.position).map(|s| (s, None));
            };
            let mut pts = vec![r.position];
            let mut x = to_f64(&r.position);
            for k in 1..buzz_points {
                let mut d = dir;
                if k > half {
                    let fd = f.sample(&x);
                    if fd.norm() > p.stop_tau {
                        let w = (k - half) as f64 / (buzz_points - half) as f64;
                        let b = dir * (1.0 - w) + fd.normalize() * w;
                        if b.norm() > 1e-9 {
                            d = b.normalize();
                        }
                    }
                }
                let next = to_f32(&(x + d * p.step));
                if next == *pts.last().unwrap() {
                    break;
                }
                pts.push(next);
                x = to_f64(&next);
            }
            Strand::new(pts).map(|s| (s, Some(dir)))
        })
        .collect::<Result<_>>()?;
    let unrecovered = out.iter().filter(|(_, d)| d.is_none()).count();
    let (strands, directions) = out.into_iter().unzip();
    Ok(BuzzcutResult {
        strands,
        directions,
        unrecovered,
    })
}
