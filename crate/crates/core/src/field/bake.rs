//! Ground-truth field baking from strand polylines.
//!
//! Segment contributions are accumulated in 32.32 fixed point with atomic
//! adds, so the result does not depend on strand visitation order or thread
//! count. The nearest segment per voxel is tracked with a packed
//! `(distance bits, segment id)` atomic minimum.

use std::sync::atomic::{AtomicI64, AtomicU32, AtomicU64, Ordering};

use nalgebra::Vector3;
use rayon::prelude::*;

use super::HybridField;
use crate::error::{Error, Result};
use crate::geometry::{point_segment_distance, to_f64, Aabb, Vec3};
use crate::strand::HairModel;

const FIXED_SCALE: f64 = (1u64 << 32) as f64;
const CANCEL_EPS: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct GridSpec {
    pub resolution: [usize; 3],
    pub aabb: Aabb,
    /// Strand influence radius, meters.
    pub tube_radius: f64,
}

impl GridSpec {
    pub fn new(resolution: [usize; 3], aabb: Aabb, tube_radius: f64) -> Result<GridSpec> {
        let g = GridSpec {
            resolution,
            aabb,
            tube_radius,
        };
        g.validate()?;
        Ok(g)
    }

    /// Box = model bounds grown by 5% of the extent on every side, tube
    /// radius = 1.5 voxel diagonals.
    pub fn around(model: &HairModel, resolution: usize) -> Result<GridSpec> {
        let bounds = model.bounds().ok_or(Error::EmptyModel)?;
        let pad = bounds.extent().max() * 0.05;
        let aabb = bounds.expanded_by(pad.max(1e-3));
        let res = [resolution; 3];
        let tube_radius = GridSpec::default_tube_radius(&aabb, res);
        GridSpec::new(res, aabb, tube_radius)
    }

    pub fn default_tube_radius(aabb: &Aabb, res: [usize; 3]) -> f64 {
        let e = aabb.extent().cast::<f64>();
        let vs = Vector3::new(e.x / res[0] as f64, e.y / res[1] as f64, e.z / res[2] as f64);
        1.5 * vs.norm()
    }

    pub fn validate(&self) -> Result<()> {
        if self.resolution.iter().any(|&r| r < 8) {
            return Err(Error::InvalidParam("grid resolution must be >= 8 per axis".into()));
        }
        if !(self.tube_radius > 0.0) {
            return Err(Error::InvalidParam("tube radius must be > 0".into()));
        }
        if !self.aabb.has_positive_extent() {
            return Err(Error::InvalidParam("grid box must have positive extent".into()));
        }
        Ok(())
    }
}

fn pack_nearest(dist: f64, seg: u32) -> u64 {
    ((dist as f32).to_bits() as u64) << 32 | seg as u64
}

/// Bakes a field: voxels within `tube_radius` of any segment get the
/// renormalized mean of those segments' root→tip tangents, everything else
/// is exactly zero. A mean that cancels below 1e-6 falls back to the nearest
/// segment's tangent.
pub fn bake_field(model: &HairModel, spec: &GridSpec) -> Result<HybridField> {
    spec.validate()?;
    let bounds = model.bounds().ok_or(Error::EmptyModel)?;
    let mut aabb = spec.aabb;
    if !aabb.contains_box(&bounds) {
        aabb = aabb.union(&bounds.expanded_by(spec.tube_radius as f32));
    }
    let dims = spec.resolution;
    let n_vox = dims.iter().product::<usize>();
    let min = aabb.min_v().cast::<f64>();
    let e = aabb.extent().cast::<f64>();
    let vs = Vector3::new(e.x / dims[0] as f64, e.y / dims[1] as f64, e.z / dims[2] as f64);

    let mut seg_offset = Vec::with_capacity(model.len());
    let mut tangents = Vec::new();
    for s in model.strands() {
        seg_offset.push(tangents.len());
        for w in s.points().windows(2) {
            tangents.push((to_f64(&w[1]) - to_f64(&w[0])).normalize());
        }
    }
    if tangents.len() >= u32::MAX as usize {
        return Err(Error::InvalidParam("too many segments to bake".into()));
    }

    let sums: Vec<[AtomicI64; 3]> = (0..n_vox).map(|_| Default::default()).collect();
    let counts: Vec<AtomicU32> = (0..n_vox).map(|_| AtomicU32::new(0)).collect();
    let nearest: Vec<AtomicU64> = (0..n_vox).map(|_| AtomicU64::new(u64::MAX)).collect();
    let r = spec.tube_radius;

    model.strands().par_iter().enumerate().for_each(|(si, s)| {
        for (j, w) in s.points().windows(2).enumerate() {
            let seg = (seg_offset[si] + j) as u32;
            let (a, b) = (to_f64(&w[0]), to_f64(&w[1]));
            let t = tangents[seg as usize];
            let fixed = [0, 1, 2].map(|c| (t[c] * FIXED_SCALE).round() as i64);
            let mut lo = [0usize; 3];
            let mut hi = [0usize; 3];
            for c in 0..3 {
                let smin = a[c].min(b[c]) - r;
                let smax = a[c].max(b[c]) + r;
                lo[c] = (((smin - min[c]) / vs[c] - 0.5).ceil().max(0.0)) as usize;
                let h = ((smax - min[c]) / vs[c] - 0.5).floor();
                if h < 0.0 {
                    lo[c] = 1;
                    hi[c] = 0;
                } else {
                    hi[c] = (h as usize).min(dims[c] - 1);
                }
            }
            for k in lo[2]..=hi[2] {
                for jj in lo[1]..=hi[1] {
                    for i in lo[0]..=hi[0] {
                        let c = Vector3::new(
                            min.x + (i as f64 + 0.5) * vs.x,
                            min.y + (jj as f64 + 0.5) * vs.y,
                            min.z + (k as f64 + 0.5) * vs.z,
                        );
                        let (d, _) = point_segment_distance(&c, &a, &b);
                        if d > r {
                            continue;
                        }
                        let idx = i + dims[0] * (jj + dims[1] * k);
                        for (acc, v) in sums[idx].iter().zip(fixed) {
                            acc.fetch_add(v, Ordering::Relaxed);
                        }
                        counts[idx].fetch_add(1, Ordering::Relaxed);
                        nearest[idx].fetch_min(pack_nearest(d, seg), Ordering::Relaxed);
                    }
                }
            }
        }
    });

    let vectors: Vec<Vec3> = (0..n_vox)
        .into_par_iter()
        .map(|idx| {
            let n = counts[idx].load(Ordering::Relaxed);
            if n == 0 {
                return Vec3::zeros();
            }
            let sum = Vector3::new(
                sums[idx][0].load(Ordering::Relaxed) as f64,
                sums[idx][1].load(Ordering::Relaxed) as f64,
                sums[idx][2].load(Ordering::Relaxed) as f64,
            ) / FIXED_SCALE;
            let mean = sum / n as f64;
            let dir = if mean.norm() < CANCEL_EPS {
                let seg = (nearest[idx].load(Ordering::Relaxed) & 0xffff_ffff) as usize;
                tangents[seg]
            } else {
                mean.normalize()
            };
            dir.cast::<f32>()
        })
        .collect();
    HybridField::new(dims, aabb, vectors)
}
