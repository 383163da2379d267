//! Scalp meshes and root sampling.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::geometry::Vec3;

/// Semi-axes (x, y, z) of the canonical cranium ellipsoid, meters.
pub const CANONICAL_SEMI_AXES: [f32; 3] = [0.085, 0.10, 0.095];

/// Triangle mesh of the hair-bearing region with outward unit vertex normals.
#[derive(Debug, Clone)]
pub struct Scalp {
    vertices: Vec<Vec3>,
    normals: Vec<Vec3>,
    triangles: Vec<[u32; 3]>,
    ellipsoid: Option<[f32; 3]>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootSample {
    pub position: Vec3,
    pub normal: Vec3,
}

impl Scalp {
    pub fn new(vertices: Vec<Vec3>, normals: Vec<Vec3>, triangles: Vec<[u32; 3]>) -> Result<Scalp> {
        if vertices.len() != normals.len() {
            return Err(Error::SizeMismatch("scalp vertices vs normals".into()));
        }
        if normals.iter().any(|n| (n.norm() - 1.0).abs() > 1e-5) {
            return Err(Error::InvalidParam("scalp normals must be unit length".into()));
        }
        for t in &triangles {
            if t.iter().any(|&i| i as usize >= vertices.len()) {
                return Err(Error::InvalidParam("scalp triangle index out of range".into()));
            }
            if triangle_area(&vertices, t) <= 0.0 {
                return Err(Error::InvalidParam("scalp triangle with zero area".into()));
            }
        }
        Ok(Scalp {
            vertices,
            normals,
            triangles,
            ellipsoid: None,
        })
    }

    /// Latitude/longitude tessellation of an origin-centered ellipsoid, keeping
    /// triangles whose three vertices satisfy `keep`.
    pub fn ellipsoid_cap(
        semi_axes: [f32; 3],
        rings: usize,
        segments: usize,
        max_polar: f64,
        keep: impl Fn(&Vec3) -> bool,
    ) -> Result<Scalp> {
        let [a, b, c] = semi_axes.map(|v| v as f64);
        let mut vertices = Vec::new();
        let mut normals = Vec::new();
        let vertex = |theta: f64, phi: f64| {
            let p = nalgebra::Vector3::new(a * theta.sin() * phi.sin(), b * theta.cos(), c * theta.sin() * phi.cos());
            let n = nalgebra::Vector3::new(p.x / (a * a), p.y / (b * b), p.z / (c * c)).normalize();
            (p.cast::<f32>(), n.cast::<f32>())
        };
        let (p, n) = vertex(0.0, 0.0);
        vertices.push(p);
        normals.push(n);
        for r in 1..=rings {
            let theta = max_polar * r as f64 / rings as f64;
            for s in 0..segments {
                let phi = 2.0 * std::f64::consts::PI * s as f64 / segments as f64;
                let (p, n) = vertex(theta, phi);
                vertices.push(p);
                normals.push(n);
            }
        }
        let ring = |r: usize, s: usize| (1 + (r - 1) * segments + s % segments) as u32;
        let mut triangles = Vec::new();
        for s in 0..segments {
            triangles.push([0, ring(1, s), ring(1, s + 1)]);
        }
        for r in 1..rings {
            for s in 0..segments {
                triangles.push([ring(r, s), ring(r + 1, s), ring(r + 1, s + 1)]);
                triangles.push([ring(r, s), ring(r + 1, s + 1), ring(r, s + 1)]);
            }
        }
        triangles.retain(|t| t.iter().all(|&i| keep(&vertices[i as usize])));
        // compact unused vertices away
        let mut remap = vec![u32::MAX; vertices.len()];
        let mut new_v = Vec::new();
        let mut new_n = Vec::new();
        for t in &mut triangles {
            for i in t.iter_mut() {
                if remap[*i as usize] == u32::MAX {
                    remap[*i as usize] = new_v.len() as u32;
                    new_v.push(vertices[*i as usize]);
                    new_n.push(normals[*i as usize]);
                }
                *i = remap[*i as usize];
            }
        }
        let mut scalp = Scalp::new(new_v, new_n, triangles)?;
        scalp.ellipsoid = Some(semi_axes);
        Ok(scalp)
    }

    /// Upper half of a sphere of the given radius.
    pub fn hemisphere(radius: f32, rings: usize, segments: usize) -> Result<Scalp> {
        Scalp::ellipsoid_cap([radius; 3], rings, segments, std::f64::consts::FRAC_PI_2, |_| true)
    }

    /// The procedural head scalp: the upper part of the canonical cranium
    /// ellipsoid above a hairline plane that rises toward the forehead (+Z).
    pub fn canonical() -> Scalp {
        Scalp::ellipsoid_cap(CANONICAL_SEMI_AXES, 48, 96, 0.56 * std::f64::consts::PI, |p| {
            p.y >= 0.02 + 0.3 * p.z && p.y >= -0.01
        })
        .expect("canonical scalp is well formed")
    }

    pub fn vertices(&self) -> &[Vec3] {
        &self.vertices
    }

    pub fn normals(&self) -> &[Vec3] {
        &self.normals
    }

    pub fn triangles(&self) -> &[[u32; 3]] {
        &self.triangles
    }

    pub fn area(&self) -> f64 {
        self.triangles.iter().map(|t| triangle_area(&self.vertices, t)).sum()
    }

    /// The ellipsoid semi-axes when the mesh was generated from one.
    pub fn ellipsoid(&self) -> Option<[f32; 3]> {
        self.ellipsoid
    }

    /// Topmost vertex, used as the reference "apex" of the scalp.
    pub fn apex(&self) -> Vec3 {
        self.vertices
            .iter()
            .copied()
            .fold(Vec3::new(0.0, f32::NEG_INFINITY, 0.0), |a, v| if v.y > a.y { v } else { a })
    }

    /// Outward normal near `p`: analytic for ellipsoid scalps, nearest vertex otherwise.
    pub fn normal_near(&self, p: &Vec3) -> Vec3 {
        if let Some([a, b, c]) = self.ellipsoid {
            let g = Vec3::new(p.x / (a * a), p.y / (b * b), p.z / (c * c));
            if g.norm() > 0.0 {
                return g.normalize();
            }
        }
        let mut best = (f32::INFINITY, Vec3::y());
        for (v, n) in self.vertices.iter().zip(&self.normals) {
            let d = (v - p).norm_squared();
            if d < best.0 {
                best = (d, *n);
            }
        }
        best.1
    }
}

fn triangle_area(v: &[Vec3], t: &[u32; 3]) -> f64 {
    let [a, b, c] = t.map(|i| v[i as usize].cast::<f64>());
    0.5 * (b - a).cross(&(c - a)).norm()
}

/// Area-uniform samples on the scalp with interpolated unit normals.
pub fn sample_scalp_roots(scalp: &Scalp, n: usize, seed: u64) -> Result<Vec<RootSample>> {
    if scalp.triangles.is_empty() {
        return Err(Error::EmptyMesh);
    }
    if n == 0 {
        return Err(Error::InvalidParam("root count must be >= 1".into()));
    }
    let mut cdf = Vec::with_capacity(scalp.triangles.len());
    let mut acc = 0.0f64;
    for t in &scalp.triangles {
        acc += triangle_area(&scalp.vertices, t);
        cdf.push(acc);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let out = (0..n)
        .map(|_| {
            let u = rng.gen::<f64>() * acc;
            let ti = cdf.partition_point(|&c| c <= u).min(cdf.len() - 1);
            let t = scalp.triangles[ti];
            let (r1, r2) = (rng.gen::<f64>().sqrt(), rng.gen::<f64>());
            let w = [1.0 - r1, r1 * (1.0 - r2), r1 * r2];
            let mut p = nalgebra::Vector3::<f64>::zeros();
            let mut nrm = nalgebra::Vector3::<f64>::zeros();
            for k in 0..3 {
                p += scalp.vertices[t[k] as usize].cast::<f64>() * w[k];
                nrm += scalp.normals[t[k] as usize].cast::<f64>() * w[k];
            }
            RootSample {
                position: p.cast(),
                normal: nrm.normalize().cast(),
            }
        })
        .collect();
    Ok(out)
}
