//! Pinhole cameras and orbital rigs.
//!
//! Camera space is x right, y down, z forward (optical axis). Pixel centers
//! sit at integer + 0.5 and v grows downward.

use std::path::Path;

use nalgebra::{Matrix3, Matrix4, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const ORTHONORMAL_TOL: f64 = 1e-5;

/// Intrinsics shared by every camera of a rig.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Intrinsics {
    pub width: usize,
    pub height: usize,
    pub fx: f64,
    pub fy: f64,
    pub cx: f64,
    pub cy: f64,
}

impl Intrinsics {
    /// Square pixels, principal point at the image center.
    pub fn from_vertical_fov(width: usize, height: usize, fov_deg: f64) -> Intrinsics {
        let f = 0.5 * height as f64 / (0.5 * fov_deg.to_radians()).tan();
        Intrinsics {
            width,
            height,
            fx: f,
            fy: f,
            cx: 0.5 * width as f64,
            cy: 0.5 * height as f64,
        }
    }
}

/// 256² keeps a pixel close to one voxel of a 128³ field over the head.
impl Default for Intrinsics {
    fn default() -> Self {
        Intrinsics::from_vertical_fov(256, 256, 55.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CameraView {
    pub width: usize,
    pub height: usize,
    pub fx: f64,
    pub fy: f64,
    pub cx: f64,
    pub cy: f64,
    /// Rigid transform, row-major semantics: `x_cam = R * x_world + t`.
    pub world_to_camera: Matrix4<f64>,
}

impl CameraView {
    pub fn new(intr: Intrinsics, world_to_camera: Matrix4<f64>) -> Result<CameraView> {
        let cam = CameraView {
            width: intr.width,
            height: intr.height,
            fx: intr.fx,
            fy: intr.fy,
            cx: intr.cx,
            cy: intr.cy,
            world_to_camera,
        };
        cam.validate()?;
        Ok(cam)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.fx > 0.0 && self.fy > 0.0) {
            return Err(Error::Schema("focal lengths must be positive".into()));
        }
        if !(self.cx > 0.0 && self.cx < self.width as f64 && self.cy > 0.0 && self.cy < self.height as f64) {
            return Err(Error::Schema("principal point must lie inside the image".into()));
        }
        let r = self.rotation();
        let err = (r * r.transpose() - Matrix3::identity()).abs().max();
        if err > ORTHONORMAL_TOL || (r.determinant() - 1.0).abs() > ORTHONORMAL_TOL {
            return Err(Error::Schema(format!("rotation is not orthonormal (error {err:e})")));
        }
        let last = self.world_to_camera.row(3);
        if last[0] != 0.0 || last[1] != 0.0 || last[2] != 0.0 || last[3] != 1.0 {
            return Err(Error::Schema("world_to_camera last row must be 0 0 0 1".into()));
        }
        Ok(())
    }

    pub fn intrinsics(&self) -> Intrinsics {
        Intrinsics {
            width: self.width,
            height: self.height,
            fx: self.fx,
            fy: self.fy,
            cx: self.cx,
            cy: self.cy,
        }
    }

    pub fn rotation(&self) -> Matrix3<f64> {
        self.world_to_camera.fixed_view::<3, 3>(0, 0).into_owned()
    }

    pub fn translation(&self) -> Vector3<f64> {
        self.world_to_camera.fixed_view::<3, 1>(0, 3).into_owned()
    }

    /// Camera center in world coordinates.
    pub fn position(&self) -> Vector3<f64> {
        -(self.rotation().transpose() * self.translation())
    }

    /// World-space unit optical axis.
    pub fn forward(&self) -> Vector3<f64> {
        self.rotation().row(2).transpose()
    }

    pub fn to_camera(&self, x: &Vector3<f64>) -> Vector3<f64> {
        self.rotation() * x + self.translation()
    }

    /// Pinhole projection; `z` is signed camera-space depth (<= 0 is behind).
    pub fn project(&self, x: &Vector3<f64>) -> (f64, f64, f64) {
        let c = self.to_camera(x);
        (self.fx * c.x / c.z + self.cx, self.fy * c.y / c.z + self.cy, c.z)
    }

    pub fn unproject(&self, u: f64, v: f64, z: f64) -> Result<Vector3<f64>> {
        if !(z > 0.0) {
            return Err(Error::InvalidParam(format!("unproject depth must be > 0, got {z}")));
        }
        let c = Vector3::new((u - self.cx) / self.fx * z, (v - self.cy) / self.fy * z, z);
        Ok(self.rotation().transpose() * (c - self.translation()))
    }

    /// Unit world-space direction of the ray through pixel coordinates (u, v).
    pub fn ray_direction(&self, u: f64, v: f64) -> Vector3<f64> {
        let c = Vector3::new((u - self.cx) / self.fx, (v - self.cy) / self.fy, 1.0);
        (self.rotation().transpose() * c).normalize()
    }

    /// Pixel containing (u, v), if inside the frame.
    pub fn pixel(&self, u: f64, v: f64) -> Option<(usize, usize)> {
        if u >= 0.0 && v >= 0.0 && u < self.width as f64 && v < self.height as f64 {
            Some((u as usize, v as usize))
        } else {
            None
        }
    }
}

/// Camera looking from `eye` at `target` with world +Y as up.
pub fn look_at(intr: Intrinsics, eye: Vector3<f64>, target: Vector3<f64>) -> Result<CameraView> {
    let fwd = target - eye;
    if fwd.norm() == 0.0 {
        return Err(Error::InvalidParam("camera eye coincides with target".into()));
    }
    let fwd = fwd.normalize();
    let right = fwd.cross(&Vector3::y());
    if right.norm() < 1e-9 {
        return Err(Error::InvalidParam("view direction is parallel to the up vector".into()));
    }
    let right = right.normalize();
    let down = fwd.cross(&right);
    let r = Matrix3::from_rows(&[right.transpose(), down.transpose(), fwd.transpose()]);
    let t = -(r * eye);
    let mut m = Matrix4::identity();
    m.fixed_view_mut::<3, 3>(0, 0).copy_from(&r);
    m.fixed_view_mut::<3, 1>(0, 3).copy_from(&t);
    CameraView::new(intr, m)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrbitSpec {
    pub n_views: usize,
    pub radius: f64,
    pub center: [f64; 3],
    pub elevation_deg: f64,
    pub start_azimuth_deg: f64,
}

impl Default for OrbitSpec {
    fn default() -> Self {
        OrbitSpec {
            n_views: 97,
            radius: 0.6,
            center: [0.0, 0.0, 0.0],
            elevation_deg: 10.0,
            start_azimuth_deg: 0.0,
        }
    }
}

impl OrbitSpec {
    /// Azimuth 0 looks at the face from +Z; azimuth grows toward +X.
    pub fn azimuth_deg(&self, k: usize) -> f64 {
        self.start_azimuth_deg + k as f64 * 360.0 / self.n_views as f64
    }
}

/// Cameras equally spaced in azimuth at fixed radius and elevation, all aimed at the center.
pub fn make_orbit(spec: &OrbitSpec, intr: Intrinsics) -> Result<Vec<CameraView>> {
    if spec.n_views == 0 {
        return Err(Error::InvalidParam("orbit needs at least one view".into()));
    }
    if !(spec.radius > 0.0) {
        return Err(Error::InvalidParam("orbit radius must be > 0".into()));
    }
    let center = Vector3::from(spec.center);
    let el = spec.elevation_deg.to_radians();
    (0..spec.n_views)
        .map(|k| {
            let az = spec.azimuth_deg(k).to_radians();
            let offset = Vector3::new(el.cos() * az.sin(), el.sin(), el.cos() * az.cos()) * spec.radius;
            look_at(intr, center + offset, center)
        })
        .collect()
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CameraRecord {
    width: usize,
    height: usize,
    fx: f64,
    fy: f64,
    cx: f64,
    cy: f64,
    world_to_camera: Vec<f64>,
}

pub fn cameras_to_json(views: &[CameraView]) -> String {
    let records: Vec<CameraRecord> = views
        .iter()
        .map(|c| CameraRecord {
            width: c.width,
            height: c.height,
            fx: c.fx,
            fy: c.fy,
            cx: c.cx,
            cy: c.cy,
            world_to_camera: (0..4).flat_map(|r| (0..4).map(move |k| (r, k))).map(|(r, k)| c.world_to_camera[(r, k)]).collect(),
        })
        .collect();
    serde_json::to_string_pretty(&records).expect("camera records serialize")
}

pub fn cameras_from_json(text: &str) -> Result<Vec<CameraView>> {
    let records: Vec<CameraRecord> = serde_json::from_str(text).map_err(|e| Error::Schema(e.to_string()))?;
    records
        .into_iter()
        .enumerate()
        .map(|(i, r)| {
            if r.world_to_camera.len() != 16 {
                return Err(Error::Schema(format!("camera {i}: world_to_camera needs 16 numbers")));
            }
            let cam = CameraView {
                width: r.width,
                height: r.height,
                fx: r.fx,
                fy: r.fy,
                cx: r.cx,
                cy: r.cy,
                world_to_camera: Matrix4::from_row_slice(&r.world_to_camera),
            };
            cam.validate().map_err(|e| Error::Schema(format!("camera {i}: {e}")))?;
            Ok(cam)
        })
        .collect()
}

pub fn save_cameras(views: &[CameraView], path: &Path) -> Result<()> {
    std::fs::write(path, cameras_to_json(views)).map_err(|e| Error::file(path, e))
}

pub fn load_cameras(path: &Path) -> Result<Vec<CameraView>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::file(path, e))?;
    cameras_from_json(&text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn orbit(n: usize) -> Vec<CameraView> {
        make_orbit(&OrbitSpec { n_views: n, ..Default::default() }, Intrinsics::default()).unwrap()
    }

    #[test]
    fn ninety_seven_views_evenly_spaced() {
        let spec = OrbitSpec::default();
        let cams = orbit(97);
        assert_eq!(cams.len(), 97);
        let delta = spec.azimuth_deg(1) - spec.azimuth_deg(0);
        assert!((delta - 3.711).abs() < 1e-3, "{delta}");
        for w in cams.windows(2) {
            let (a, b) = (w[0].position(), w[1].position());
            let (ha, hb) = (Vector3::new(a.x, 0.0, a.z), Vector3::new(b.x, 0.0, b.z));
            let ang = (ha.dot(&hb) / (ha.norm() * hb.norm())).acos().to_degrees();
            assert!((ang - 360.0 / 97.0).abs() < 1e-9);
        }
    }

    #[test]
    fn single_front_camera() {
        let cams = make_orbit(&OrbitSpec { n_views: 1, elevation_deg: 0.0, ..Default::default() }, Intrinsics::default()).unwrap();
        assert_eq!(cams.len(), 1);
        let p = cams[0].position();
        assert!((p - Vector3::new(0.0, 0.0, 0.6)).norm() < 1e-12);
    }

    #[test]
    fn cameras_on_sphere_and_aimed_at_center() {
        let spec = OrbitSpec { center: [0.01, -0.02, 0.03], elevation_deg: 25.0, ..Default::default() };
        let c = Vector3::from(spec.center);
        for cam in make_orbit(&spec, Intrinsics::default()).unwrap() {
            assert!(((cam.position() - c).norm() - spec.radius).abs() < 1e-9);
            // distance from center to the optical axis line
            let to_c = c - cam.position();
            let off = to_c - cam.forward() * to_c.dot(&cam.forward());
            assert!(off.norm() < 1e-9);
            let (u, v, z) = cam.project(&c);
            assert!((u - cam.cx).abs() < 1e-9 && (v - cam.cy).abs() < 1e-9);
            assert!((z - spec.radius).abs() < 1e-9);
        }
    }

    #[test]
    fn orbit_errors() {
        let intr = Intrinsics::default();
        assert!(make_orbit(&OrbitSpec { radius: 0.0, ..Default::default() }, intr).is_err());
        assert!(make_orbit(&OrbitSpec { elevation_deg: 90.0, ..Default::default() }, intr).is_err());
        assert!(make_orbit(&OrbitSpec { n_views: 0, ..Default::default() }, intr).is_err());
    }

    #[test]
    fn behind_camera_has_negative_depth() {
        let cam = &orbit(1)[0];
        let behind = cam.position() - cam.forward();
        assert!(cam.project(&behind).2 < 0.0);
    }

    #[test]
    fn unproject_principal_point_and_corner() {
        let cam = &orbit(5)[2];
        let p = cam.unproject(cam.cx, cam.cy, 0.3).unwrap();
        assert!((p - (cam.position() + cam.forward() * 0.3)).norm() < 1e-12);
        let corner = cam.unproject(0.0, 0.0, 1.0).unwrap();
        let c = cam.to_camera(&corner);
        assert!((c.z - 1.0).abs() < 1e-12);
        assert!((c.x + cam.cx / cam.fx).abs() < 1e-12 && (c.y + cam.cy / cam.fy).abs() < 1e-12);
        assert!(cam.unproject(1.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn project_unproject_round_trip_random() {
        let cams = orbit(8);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..1000 {
            let x = Vector3::new(rng.gen_range(-0.15..0.15), rng.gen_range(-0.2..0.15), rng.gen_range(-0.15..0.15));
            for cam in &cams {
                let (u, v, z) = cam.project(&x);
                let back = cam.unproject(u, v, z).unwrap();
                assert!((back - x).norm() < 1e-6);
            }
        }
    }

    #[test]
    fn json_round_trip() {
        let cams = orbit(97);
        let back = cameras_from_json(&cameras_to_json(&cams)).unwrap();
        assert_eq!(back.len(), 97);
        for (a, b) in cams.iter().zip(&back) {
            assert_eq!((a.width, a.height), (b.width, b.height));
            for (x, y) in [(a.fx, b.fx), (a.fy, b.fy), (a.cx, b.cx), (a.cy, b.cy)] {
                assert!((x - y).abs() <= 1e-12);
            }
            assert!((a.world_to_camera - b.world_to_camera).abs().max() <= 1e-12);
            b.validate().unwrap();
        }
        assert!(cameras_from_json("[]").unwrap().is_empty());
    }

    #[test]
    fn json_schema_errors() {
        let text = cameras_to_json(&orbit(1)).replace("\"fx\"", "\"focal\"");
        assert!(matches!(cameras_from_json(&text), Err(Error::Schema(_))));
        let mut cam = orbit(1).remove(0);
        cam.world_to_camera[(0, 0)] *= 1.01;
        assert!(matches!(cameras_from_json(&cameras_to_json(&[cam])), Err(Error::Schema(_))));
    }
}
