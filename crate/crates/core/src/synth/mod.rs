//! Procedural ground-truth hairstyles and test-case datasets.
//!
//! Guide strands are integral curves of a smooth "comb" field around the
//! cranium ellipsoid: pushed outward near the scalp, sliding along it under
//! gravity above the equator and falling freely below. Integral curves of
//! one field never cross, so baked fields stay coherent. Wavy and curly
//! styles add a helical displacement whose phase follows world height, so
//! neighbouring strands curl in step.

mod testcase;

pub use testcase::{load_testcase, make_testcase, GridPlan, Manifest, ManifestEntry, Testcase, TESTCASE_FORMAT};

use nalgebra::Vector3;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{to_f32, to_f64};
use crate::strand::{resample_strand, sample_scalp_roots, HairModel, RootSample, Scalp, Strand, CANONICAL_SEMI_AXES};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Style {
    Straight,
    Bob,
    Wavy,
    Curly,
    Buzzcut,
}

impl std::str::FromStr for Style {
    type Err = Error;

    fn from_str(s: &str) -> Result<Style> {
        Ok(match s {
            "straight" => Style::Straight,
            "bob" => Style::Bob,
            "wavy" => Style::Wavy,
            "curly" => Style::Curly,
            "buzzcut" => Style::Buzzcut,
            _ => return Err(Error::InvalidParam(format!("unknown style {s:?}"))),
        })
    }
}

impl std::fmt::Display for Style {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Style::Straight => "straight",
            Style::Bob => "bob",
            Style::Wavy => "wavy",
            Style::Curly => "curly",
            Style::Buzzcut => "buzzcut",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StyleSpec {
    pub style: Style,
    pub strand_count: usize,
    /// Guide length cap range (meters), drawn uniformly per strand. Most
    /// strands end at the cut plane first.
    pub length_range: [f64; 2],
    pub curl_radius: f64,
    pub curl_pitch: f64,
    pub buzz_len: f64,
    /// Buzz-cut strands rise this many degrees off the scalp surface.
    pub buzz_tilt_deg: f64,
    /// Strands end where they cross this height (world y, meters).
    pub cut_y: f64,
    /// Output resampling step (meters).
    pub step: f64,
    pub seed: u64,
}

impl StyleSpec {
    pub fn preset(style: Style, strand_count: usize, seed: u64) -> StyleSpec {
        let base = StyleSpec {
            style,
            strand_count,
            length_range: [0.60, 0.70],
            curl_radius: 0.0,
            curl_pitch: 0.05,
            buzz_len: 0.005,
            buzz_tilt_deg: 20.0,
            cut_y: -0.24,
            step: 0.002,
            seed,
        };
        match style {
            Style::Straight => base,
            Style::Bob => StyleSpec {
                length_range: [0.40, 0.50],
                cut_y: -0.06,
                ..base
            },
            Style::Wavy => StyleSpec {
                curl_radius: 0.005,
                curl_pitch: 0.08,
                cut_y: -0.20,
                ..base
            },
            Style::Curly => StyleSpec {
                curl_radius: 0.005,
                curl_pitch: 0.06,
                cut_y: -0.16,
                ..base
            },
            Style::Buzzcut => base,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidParam(m.into()));
        if self.strand_count == 0 {
            return bad("strand_count must be >= 1");
        }
        let [lo, hi] = self.length_range;
        if !(lo > 0.0 && hi >= lo && hi.is_finite()) {
            return bad("length_range must satisfy 0 < min <= max");
        }
        if !(self.step > 0.0) || !(self.buzz_len > 0.0) || !(self.curl_pitch > 0.0) || !(self.curl_radius >= 0.0) {
            return bad("step, buzz_len and curl_pitch must be > 0, curl_radius >= 0");
        }
        if matches!(self.style, Style::Wavy | Style::Curly) && !(self.curl_radius > 0.0) {
            return bad("wavy and curly styles need curl_radius > 0");
        }
        Ok(())
    }
}

/// Fine integration step for guide curves.
const GUIDE_STEP: f64 = 5e-4;
/// Outward push near the scalp and its decay in ellipsoid-level units.
const PUSH: f64 = 1.5;
const PUSH_DECAY: f64 = 0.12;
/// Distance over which the curl amplitude ramps up from the root.
const CURL_RAMP: f64 = 0.03;

fn gravity() -> Vector3<f64> {
    Vector3::new(0.0, -1.0, -0.25).normalize()
}

/// Outward ellipsoid normal and level (1 on the surface).
fn level(x: &Vector3<f64>) -> (Vector3<f64>, f64) {
    let [a, b, c] = CANONICAL_SEMI_AXES.map(|v| v as f64);
    let l = Vector3::new(x.x / a, x.y / b, x.z / c).norm();
    let n = Vector3::new(x.x / (a * a), x.y / (b * b), x.z / (c * c));
    (if n.norm() > 0.0 { n.normalize() } else { Vector3::y() }, l)
}

fn comb(x: &Vector3<f64>) -> Vector3<f64> {
    let g = gravity();
    let (n, l) = level(x);
    let cancel = (-n.dot(&g)).max(0.0);
    let push = PUSH * (-(l - 1.0).max(0.0) / PUSH_DECAY).exp();
    (g + n * (cancel + push)).normalize()
}

/// Midpoint-rule guide from `root` until `length` or the cut plane.
fn guide(root: &Vector3<f64>, length: f64, cut_y: f64, step: f64) -> Vec<Vector3<f64>> {
    let n = (length / step).ceil() as usize;
    let mut pts = Vec::with_capacity(n + 1);
    let mut x = *root;
    pts.push(x);
    for k in 0..n {
        let h = step.min(length - k as f64 * step);
        let mid = x + comb(&x) * (0.5 * h);
        x += comb(&mid) * h;
        if x.y < cut_y {
            break;
        }
        pts.push(x);
    }
    pts
}

fn smoothstep(t: f64) -> f64 {
    let t = t.clamp(0.0, 1.0);
    t * t * (3.0 - 2.0 * t)
}

/// Helical displacement around the guide with phase 2π·(−y)/pitch.
fn curl(g: &[Vector3<f64>], radius: f64, pitch: f64) -> Vec<Vector3<f64>> {
    let n = g.len();
    let mut s = 0.0;
    (0..n)
        .map(|i| {
            if i > 0 {
                s += (g[i] - g[i - 1]).norm();
            }
            if n < 2 {
                return g[i];
            }
            let t = (g[(i + 1).min(n - 1)] - g[i.saturating_sub(1)]).normalize();
            let mut e1 = Vector3::new(-g[i].z, 0.0, g[i].x);
            if e1.norm() < 1e-9 {
                e1 = Vector3::x();
            }
            let e1 = (e1 - t * t.dot(&e1)).normalize();
            let e2 = t.cross(&e1);
            let phi = 2.0 * std::f64::consts::PI * -g[i].y / pitch;
            g[i] + (e1 * phi.cos() + e2 * phi.sin()) * (radius * smoothstep(s / CURL_RAMP))
        })
        .collect()
}

fn buzz_strand(r: &RootSample, spec: &StyleSpec) -> Vec<Vector3<f64>> {
    let root = to_f64(&r.position);
    let n = to_f64(&r.normal).normalize();
    let mut down = -Vector3::y() + n * n.y;
    if down.norm() < 1e-6 {
        down = -Vector3::z() + n * n.z;
    }
    let t = down.normalize();
    let a = spec.buzz_tilt_deg.to_radians();
    let d = (t * a.cos() + n * a.sin()).normalize();
    vec![root, root + d * spec.buzz_len]
}

/// Direction of a buzz-cut strand generated at this root.
pub fn buzz_direction(r: &RootSample, spec: &StyleSpec) -> Vector3<f64> {
    let p = buzz_strand(r, spec);
    (p[1] - p[0]).normalize()
}

/// Roots are area-uniform on the scalp; strands follow the style rule and
/// are resampled at `spec.step`.
pub fn generate_style(spec: &StyleSpec, scalp: &Scalp) -> Result<HairModel> {
    spec.validate()?;
    let roots = sample_scalp_roots(scalp, spec.strand_count, spec.seed)?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed ^ 0x5EED_1E57);
    let lengths: Vec<f64> = (0..roots.len()).map(|_| rng.gen_range(spec.length_range[0]..=spec.length_range[1])).collect();
    let strands = roots
        .par_iter()
        .zip(&lengths)
        .map(|(r, &len)| {
            let pts = match spec.style {
                Style::Buzzcut => buzz_strand(r, spec),
                Style::Straight | Style::Bob => guide(&to_f64(&r.position), len, spec.cut_y, GUIDE_STEP),
                Style::Wavy | Style::Curly => {
                    // fine enough that one turn spans a few hundred samples
                    let h = GUIDE_STEP.min(spec.curl_pitch / 200.0);
                    curl(&guide(&to_f64(&r.position), len, spec.cut_y, h), spec.curl_radius, spec.curl_pitch)
                }
            };
            // keep the root bit-exact so it can be recovered from the file
            let mut out: Vec<_> = pts.iter().map(to_f32).collect();
            out[0] = r.position;
            let s = Strand::from_points_dedup(out)?;
            resample_strand(&s, spec.step)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(HairModel::new(strands))
}

/// The root samples `generate_style` uses for `spec`.
pub fn style_roots(spec: &StyleSpec, scalp: &Scalp) -> Result<Vec<RootSample>> {
    sample_scalp_roots(scalp, spec.strand_count, spec.seed)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn level_of(p: &crate::geometry::Vec3) -> f64 {
        level(&to_f64(p)).1
    }

    #[test]
    fn deterministic_and_outside_the_head() {
        let scalp = Scalp::canonical();
        for style in [Style::Straight, Style::Bob, Style::Wavy, Style::Curly] {
            let spec = StyleSpec::preset(style, 300, 3);
            let a = generate_style(&spec, &scalp).unwrap();
            let b = generate_style(&spec, &scalp).unwrap();
            assert_eq!(a, b);
            assert_eq!(a.len(), 300);
            let inside = a.strands().iter().flat_map(|s| s.points().iter().skip(1)).filter(|p| level_of(p) < 0.995).count();
            assert_eq!(inside, 0, "{style}");
            let other = generate_style(&StyleSpec { seed: 4, ..spec }, &scalp).unwrap();
            assert_ne!(a, other);
        }
    }

    #[test]
    fn bob_is_cut() {
        let spec = StyleSpec::preset(Style::Bob, 400, 1);
        let m = generate_style(&spec, &Scalp::canonical()).unwrap();
        assert!(m.bounds().unwrap().min[1] as f64 >= spec.cut_y - 1e-6);
    }

    #[test]
    fn buzzcut_lengths() {
        let spec = StyleSpec::preset(Style::Buzzcut, 500, 2);
        let m = generate_style(&spec, &Scalp::canonical()).unwrap();
        for s in m.strands() {
            assert!((s.arc_length() - spec.buzz_len).abs() <= spec.step, "{}", s.arc_length());
        }
    }

    /// Menger curvature of consecutive point triples.
    fn curvature(a: &Vector3<f64>, b: &Vector3<f64>, c: &Vector3<f64>) -> f64 {
        let area2 = (b - a).cross(&(c - a)).norm();
        2.0 * area2 / ((b - a).norm() * (c - b).norm() * (c - a).norm())
    }

    #[test]
    fn curly_curvature_matches_helix() {
        let r = 0.01;
        let pitch = 0.01;
        let spec = StyleSpec {
            cut_y: -0.3,
            curl_radius: r,
            curl_pitch: pitch,
            step: 0.001,
            ..StyleSpec::preset(Style::Curly, 200, 8)
        };
        let m = generate_style(&spec, &Scalp::canonical()).unwrap();
        let c = pitch / (2.0 * std::f64::consts::PI);
        let expect = r / (r * r + c * c);
        let mut ks = Vec::new();
        for s in m.strands() {
            let p: Vec<_> = s.points().iter().map(to_f64).collect();
            // interior of the strand where the guide hangs straight down
            for i in 5..p.len().saturating_sub(5) {
                if p[i].y < -0.13 {
                    ks.push(curvature(&p[i - 1], &p[i], &p[i + 1]));
                }
            }
        }
        assert!(ks.len() > 1000, "{}", ks.len());
        ks.sort_by(f64::total_cmp);
        let med = ks[ks.len() / 2];
        assert!((med - expect).abs() / expect < 0.10, "median {med} vs {expect}");
        assert!((med - 1.0 / r).abs() * r < 0.12);
    }
}
