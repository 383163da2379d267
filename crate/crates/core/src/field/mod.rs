//! The hybrid growth field: unit growth vectors inside the hair volume, zero
//! outside, stored on a dense voxel grid and sampled trilinearly.
//!
//! Vectors are directed root → tip. Occupancy is derived from the sampled
//! magnitude.

mod bake;
mod io;
mod metrics;

pub use bake::{bake_field, GridSpec};
pub use io::{decode_field, encode_field, load_field, save_field, FIELD_MAGIC};
pub use metrics::{field_orientation_mse, occupancy_iou_precision, FieldOrientationError, OccupancyScores};

use nalgebra::Vector3;

use crate::error::{Error, Result};
use crate::geometry::{Aabb, Vec3};

/// Default occupancy threshold on the field magnitude.
pub const OCCUPANCY_TAU: f64 = 0.1;

#[derive(Debug, Clone, PartialEq)]
pub struct HybridField {
    dims: [usize; 3],
    aabb: Aabb,
    /// x fastest, then y, then z.
    vectors: Vec<Vec3>,
    lattice: Lattice,
}

/// Box-to-lattice mapping precomputed for sampling.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Lattice {
    lo: [f64; 3],
    hi: [f64; 3],
    /// voxels per meter
    scale: [f64; 3],
    last: [f64; 3],
}

impl Lattice {
    fn new(dims: [usize; 3], aabb: &Aabb) -> Lattice {
        let lo = aabb.min.map(|v| v as f64);
        let hi = aabb.max.map(|v| v as f64);
        Lattice {
            lo,
            hi,
            scale: [0, 1, 2].map(|a| dims[a] as f64 / (hi[a] - lo[a])),
            last: dims.map(|d| (d - 1) as f64),
        }
    }
}

impl HybridField {
    pub fn new(dims: [usize; 3], aabb: Aabb, vectors: Vec<Vec3>) -> Result<HybridField> {
        if !aabb.has_positive_extent() {
            return Err(Error::InvalidParam("field box must have positive extent".into()));
        }
        if dims.iter().any(|&d| d == 0) {
            return Err(Error::InvalidParam("field dimensions must be positive".into()));
        }
        let n = dims
            .iter()
            .try_fold(1usize, |acc, &d| acc.checked_mul(d))
            .ok_or_else(|| Error::InvalidParam("field dimensions overflow".into()))?;
        if vectors.len() != n {
            return Err(Error::SizeMismatch(format!("{} vectors for a {:?} grid", vectors.len(), dims)));
        }
        Ok(HybridField {
            dims,
            aabb,
            vectors,
            lattice: Lattice::new(dims, &aabb),
        })
    }

    pub fn zeros(dims: [usize; 3], aabb: Aabb) -> Result<HybridField> {
        let n = dims.iter().product();
        HybridField::new(dims, aabb, vec![Vec3::zeros(); n])
    }

    /// A field holding `v` at every voxel.
    pub fn uniform(dims: [usize; 3], aabb: Aabb, v: Vec3) -> Result<HybridField> {
        let n = dims.iter().product();
        HybridField::new(dims, aabb, vec![v; n])
    }

    pub fn dims(&self) -> [usize; 3] {
        self.dims
    }

    pub fn aabb(&self) -> Aabb {
        self.aabb
    }

    pub fn vectors(&self) -> &[Vec3] {
        &self.vectors
    }

    pub fn voxel_count(&self) -> usize {
        self.vectors.len()
    }

    pub fn voxel_size(&self) -> Vector3<f64> {
        let e = self.aabb.extent().cast::<f64>();
        Vector3::new(e.x / self.dims[0] as f64, e.y / self.dims[1] as f64, e.z / self.dims[2] as f64)
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize, k: usize) -> usize {
        i + self.dims[0] * (j + self.dims[1] * k)
    }

    pub fn get(&self, i: usize, j: usize, k: usize) -> Vec3 {
        self.vectors[self.index(i, j, k)]
    }

    pub fn set(&mut self, i: usize, j: usize, k: usize, v: Vec3) {
        let idx = self.index(i, j, k);
        self.vectors[idx] = v;
    }

    pub fn voxel_center(&self, i: usize, j: usize, k: usize) -> Vector3<f64> {
        let vs = self.voxel_size();
        let min = self.aabb.min_v().cast::<f64>();
        Vector3::new(
            min.x + (i as f64 + 0.5) * vs.x,
            min.y + (j as f64 + 0.5) * vs.y,
            min.z + (k as f64 + 0.5) * vs.z,
        )
    }

    /// Zeroes every voxel whose center satisfies `pred`. Used to construct defects.
    pub fn zero_where(&mut self, pred: impl Fn(&Vector3<f64>) -> bool) -> usize {
        let mut n = 0;
        for k in 0..self.dims[2] {
            for j in 0..self.dims[1] {
                for i in 0..self.dims[0] {
                    if pred(&self.voxel_center(i, j, k)) {
                        self.set(i, j, k, Vec3::zeros());
                        n += 1;
                    }
                }
            }
        }
        n
    }

    /// Trilinear interpolation of the eight surrounding voxel vectors. Points
    /// outside the box sample exactly zero; between the outermost voxel
    /// centers and the box faces the lattice is clamped.
    pub fn sample(&self, x: &Vector3<f64>) -> Vector3<f64> {
        let l = &self.lattice;
        let mut base = [0usize; 3];
        let mut frac = [0.0f64; 3];
        let mut step = [0usize; 3];
        for a in 0..3 {
            let xa = x[a];
            if !(xa >= l.lo[a] && xa <= l.hi[a]) {
                return Vector3::zeros();
            }
            let g = ((xa - l.lo[a]) * l.scale[a] - 0.5).clamp(0.0, l.last[a]);
            let n = self.dims[a];
            let i0 = (g as usize).min(n.saturating_sub(2));
            base[a] = i0;
            frac[a] = if n == 1 { 0.0 } else { g - i0 as f64 };
            step[a] = (n > 1) as usize;
        }
        let [nx, ny, _] = self.dims;
        let i000 = base[0] + nx * (base[1] + ny * base[2]);
        let (sx, sy, sz) = (step[0], step[1] * nx, step[2] * nx * ny);
        let v = &self.vectors;
        let at = |i: usize| v[i].cast::<f64>();
        let [fx, fy, fz] = frac;
        let lerp = |i: usize| at(i) * (1.0 - fx) + at(i + sx) * fx;
        let c0 = lerp(i000) * (1.0 - fy) + lerp(i000 + sy) * fy;
        let c1 = lerp(i000 + sz) * (1.0 - fy) + lerp(i000 + sy + sz) * fy;
        c0 * (1.0 - fz) + c1 * fz
    }

    pub fn sample_f32(&self, x: &Vec3) -> Vector3<f64> {
        self.sample(&x.cast::<f64>())
    }

    pub fn occupied(&self, x: &Vector3<f64>, tau: f64) -> bool {
        self.sample(x).norm() > tau
    }

    /// Number of voxels with a non-zero vector.
    pub fn nonzero_voxels(&self) -> usize {
        self.vectors.iter().filter(|v| **v != Vec3::zeros()).count()
    }
}

/// `|sample_field(f, x)| > tau`.
pub fn occupancy(f: &HybridField, x: &Vector3<f64>, tau: f64) -> bool {
    f.occupied(x, tau)
}

pub fn sample_field(f: &HybridField, x: &Vector3<f64>) -> Vector3<f64> {
    f.sample(x)
}
