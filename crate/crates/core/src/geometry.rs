//! Shared geometric primitives.

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

/// World-space point or direction, meters, single precision.
pub type Vec3 = Vector3<f32>;

/// Axis-aligned bounding box.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Aabb {
    pub min: [f32; 3],
    pub max: [f32; 3],
}

impl Aabb {
    pub fn new(min: Vec3, max: Vec3) -> Self {
        Self {
            min: [min.x, min.y, min.z],
            max: [max.x, max.y, max.z],
        }
    }

    pub fn from_points<'a>(points: impl IntoIterator<Item = &'a Vec3>) -> Option<Self> {
        let mut it = points.into_iter();
        let first = it.next()?;
        let mut b = Aabb::new(*first, *first);
        for p in it {
            b.include(p);
        }
        Some(b)
    }

    pub fn include(&mut self, p: &Vec3) {
        for a in 0..3 {
            self.min[a] = self.min[a].min(p[a]);
            self.max[a] = self.max[a].max(p[a]);
        }
    }

    pub fn union(&self, other: &Aabb) -> Aabb {
        let mut out = *self;
        out.include(&other.min_v());
        out.include(&other.max_v());
        out
    }

    pub fn min_v(&self) -> Vec3 {
        Vec3::from(self.min)
    }

    pub fn max_v(&self) -> Vec3 {
        Vec3::from(self.max)
    }

    pub fn extent(&self) -> Vec3 {
        self.max_v() - self.min_v()
    }

    pub fn center(&self) -> Vec3 {
        (self.min_v() + self.max_v()) * 0.5
    }

    /// Grows every side by `frac` of the extent along that axis.
    pub fn expanded_by_fraction(&self, frac: f32) -> Aabb {
        let pad = self.extent() * frac;
        Aabb::new(self.min_v() - pad, self.max_v() + pad)
    }

    pub fn expanded_by(&self, margin: f32) -> Aabb {
        let pad = Vec3::repeat(margin);
        Aabb::new(self.min_v() - pad, self.max_v() + pad)
    }

    pub fn contains(&self, p: &Vec3) -> bool {
        (0..3).all(|a| p[a] >= self.min[a] && p[a] <= self.max[a])
    }

    pub fn contains_box(&self, other: &Aabb) -> bool {
        self.contains(&other.min_v()) && self.contains(&other.max_v())
    }

    pub fn has_positive_extent(&self) -> bool {
        (0..3).all(|a| self.max[a] > self.min[a])
    }

    /// Ray/box slab intersection. Returns the parametric interval `[t_near, t_far]`
    /// clipped to `t >= 0`, or `None` when the ray misses.
    pub fn intersect_ray(&self, origin: &Vector3<f64>, dir: &Vector3<f64>) -> Option<(f64, f64)> {
        let mut t0 = 0.0f64;
        let mut t1 = f64::INFINITY;
        for a in 0..3 {
            let lo = self.min[a] as f64;
            let hi = self.max[a] as f64;
            if dir[a].abs() < 1e-300 {
                if origin[a] < lo || origin[a] > hi {
                    return None;
                }
                continue;
            }
            let inv = 1.0 / dir[a];
            let (mut ta, mut tb) = ((lo - origin[a]) * inv, (hi - origin[a]) * inv);
            if ta > tb {
                std::mem::swap(&mut ta, &mut tb);
            }
            t0 = t0.max(ta);
            t1 = t1.min(tb);
            if t0 > t1 {
                return None;
            }
        }
        Some((t0, t1))
    }
}

/// Distance from `p` to the segment `[a, b]` together with the clamped parameter.
pub fn point_segment_distance(p: &Vector3<f64>, a: &Vector3<f64>, b: &Vector3<f64>) -> (f64, f64) {
    let ab = b - a;
    let len2 = ab.norm_squared();
    let t = if len2 > 0.0 {
        ((p - a).dot(&ab) / len2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    ((a + ab * t - p).norm(), t)
}

pub fn to_f64(v: &Vec3) -> Vector3<f64> {
    v.cast::<f64>()
}

pub fn to_f32(v: &Vector3<f64>) -> Vec3 {
    v.cast::<f32>()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ray_box_hits_and_misses() {
        let b = Aabb::new(Vec3::repeat(-1.0), Vec3::repeat(1.0));
        let o = Vector3::new(0.0, 0.0, -5.0);
        let (t0, t1) = b.intersect_ray(&o, &Vector3::new(0.0, 0.0, 1.0)).unwrap();
        assert!((t0 - 4.0).abs() < 1e-12 && (t1 - 6.0).abs() < 1e-12);
        assert!(b.intersect_ray(&o, &Vector3::new(0.0, 1.0, 0.0)).is_none());
        let inside = Vector3::zeros();
        let (t0, _) = b.intersect_ray(&inside, &Vector3::new(1.0, 0.0, 0.0)).unwrap();
        assert_eq!(t0, 0.0);
    }

    #[test]
    fn segment_distance_clamps() {
        let a = Vector3::new(0.0, 0.0, 0.0);
        let b = Vector3::new(1.0, 0.0, 0.0);
        let (d, t) = point_segment_distance(&Vector3::new(2.0, 1.0, 0.0), &a, &b);
        assert!((d - 2f64.sqrt()).abs() < 1e-12);
        assert_eq!(t, 1.0);
    }
}
