//! Hair strand data model, resampling and tangents.

mod io;
mod scalp;

pub use io::{encode_native, encode_usc, load_strands, parse_strands, save_strands, LoadReport, StrandFormat};
pub use scalp::{sample_scalp_roots, RootSample, Scalp, CANONICAL_SEMI_AXES};

use crate::error::{Error, Result};
use crate::geometry::{to_f32, to_f64, Aabb, Vec3};

/// An ordered polyline from root (first point) to tip.
#[derive(Debug, Clone, PartialEq)]
pub struct Strand {
    points: Vec<Vec3>,
}

impl Strand {
    /// Builds a strand, rejecting empty input, non-finite coordinates and
    /// consecutive duplicate points.
    pub fn new(points: Vec<Vec3>) -> Result<Strand> {
        if points.is_empty() {
            return Err(Error::InvalidParam("strand needs at least one point".into()));
        }
        if points.iter().any(|p| !p.iter().all(|c| c.is_finite())) {
            return Err(Error::NonFinite("strand"));
        }
        if points.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidParam("strand has a zero-length segment".into()));
        }
        Ok(Strand { points })
    }

    /// Like [`Strand::new`] but merges consecutive duplicates instead of failing.
    pub fn from_points_dedup(mut points: Vec<Vec3>) -> Result<Strand> {
        points.dedup();
        Strand::new(points)
    }

    pub fn single(root: Vec3) -> Result<Strand> {
        Strand::new(vec![root])
    }

    pub fn points(&self) -> &[Vec3] {
        &self.points
    }

    pub fn into_points(self) -> Vec<Vec3> {
        self.points
    }

    pub fn root(&self) -> Vec3 {
        self.points[0]
    }

    pub fn tip(&self) -> Vec3 {
        *self.points.last().unwrap()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn arc_length(&self) -> f64 {
        self.points
            .windows(2)
            .map(|w| (to_f64(&w[1]) - to_f64(&w[0])).norm())
            .sum()
    }
}

/// A collection of strands with a cached bounding box.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct HairModel {
    strands: Vec<Strand>,
    bounds: Option<Aabb>,
}

impl HairModel {
    pub fn new(strands: Vec<Strand>) -> HairModel {
        let mut m = HairModel {
            strands,
            bounds: None,
        };
        m.recompute_bounds();
        m
    }

    pub fn strands(&self) -> &[Strand] {
        &self.strands
    }

    pub fn into_strands(self) -> Vec<Strand> {
        self.strands
    }

    pub fn len(&self) -> usize {
        self.strands.len()
    }

    pub fn is_empty(&self) -> bool {
        self.strands.is_empty()
    }

    /// Exact min/max over all points, `None` for an empty model.
    pub fn bounds(&self) -> Option<Aabb> {
        self.bounds
    }

    pub fn push(&mut self, s: Strand) {
        match &mut self.bounds {
            Some(b) => s.points().iter().for_each(|p| b.include(p)),
            None => self.bounds = Aabb::from_points(s.points()),
        }
        self.strands.push(s);
    }

    pub fn extend(&mut self, strands: impl IntoIterator<Item = Strand>) {
        for s in strands {
            self.push(s);
        }
    }

    pub fn point_count(&self) -> usize {
        self.strands.iter().map(Strand::len).sum()
    }

    fn recompute_bounds(&mut self) {
        self.bounds = Aabb::from_points(self.strands.iter().flat_map(|s| s.points()));
    }
}

/// Resamples the polyline at uniform arc-length spacing `step`. The root and
/// the tip are kept exactly; the final interval is at most `step` long.
pub fn resample_strand(s: &Strand, step: f64) -> Result<Strand> {
    if !(step > 0.0) || !step.is_finite() {
        return Err(Error::InvalidParam(format!("resample step must be > 0, got {step}")));
    }
    if s.len() == 1 {
        return Ok(s.clone());
    }
    let pts: Vec<_> = s.points().iter().map(to_f64).collect();
    let total = s.arc_length();
    // intervals shorter than this fraction of a step are folded into the tip
    let tail_eps = 1e-3 * step;
    let mut out = vec![s.root()];
    let mut seg = 0usize;
    let mut seg_start = 0.0f64;
    let mut seg_len = (pts[1] - pts[0]).norm();
    let mut k = 1usize;
    loop {
        let target = k as f64 * step;
        if target >= total - tail_eps {
            break;
        }
        while seg_start + seg_len < target && seg + 2 < pts.len() {
            seg_start += seg_len;
            seg += 1;
            seg_len = (pts[seg + 1] - pts[seg]).norm();
        }
        let t = if seg_len > 0.0 {
            ((target - seg_start) / seg_len).clamp(0.0, 1.0)
        } else {
            0.0
        };
        let p = to_f32(&(pts[seg] + (pts[seg + 1] - pts[seg]) * t));
        if Some(&p) != out.last() {
            out.push(p);
        }
        k += 1;
    }
    let tip = s.tip();
    if Some(&tip) != out.last() {
        out.push(tip);
    }
    Strand::new(out)
}

/// Unit tangent per point: forward difference, the last entry copies the previous.
pub fn strand_tangents(s: &Strand) -> Result<Vec<Vec3>> {
    if s.len() < 2 {
        return Err(Error::InvalidParam("tangents need at least two points".into()));
    }
    let mut out: Vec<Vec3> = s
        .points()
        .windows(2)
        .map(|w| to_f32(&(to_f64(&w[1]) - to_f64(&w[0])).normalize()))
        .collect();
    out.push(*out.last().unwrap());
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn line(n: usize, dir: Vec3, spacing: f32) -> Strand {
        Strand::new((0..n).map(|i| dir * (i as f32 * spacing)).collect()).unwrap()
    }

    #[test]
    fn strand_invariants_enforced() {
        assert!(Strand::new(vec![]).is_err());
        assert!(Strand::new(vec![Vec3::zeros(), Vec3::zeros()]).is_err());
        assert!(Strand::new(vec![Vec3::new(f32::NAN, 0.0, 0.0)]).is_err());
        let s = Strand::from_points_dedup(vec![Vec3::zeros(), Vec3::zeros(), Vec3::x()]).unwrap();
        assert_eq!(s.len(), 2);
    }

    #[test]
    fn bounds_track_pushes() {
        let mut m = HairModel::default();
        assert!(m.bounds().is_none());
        m.push(line(3, Vec3::y(), 0.1));
        m.push(Strand::new(vec![Vec3::new(-1.0, 5.0, 2.0)]).unwrap());
        let b = m.bounds().unwrap();
        assert_eq!(b.min, [-1.0, 0.0, 0.0]);
        assert_eq!(b.max, [0.0, 5.0, 2.0]);
        assert_eq!(HairModel::new(m.strands().to_vec()).bounds(), m.bounds());
    }

    #[test]
    fn resample_straight_ten_cm() {
        let s = Strand::new(vec![Vec3::zeros(), Vec3::new(0.0, -0.1, 0.0)]).unwrap();
        let r = resample_strand(&s, 0.01).unwrap();
        assert_eq!(r.len(), 11);
        assert_eq!(r.root(), s.root());
        assert_eq!(r.tip(), s.tip());
        for w in r.points().windows(2) {
            assert!(((w[1] - w[0]).norm() - 0.01).abs() < 1e-6);
        }
    }

    #[test]
    fn resample_single_point_and_bad_step() {
        let s = Strand::single(Vec3::new(1.0, 2.0, 3.0)).unwrap();
        assert_eq!(resample_strand(&s, 0.01).unwrap(), s);
        assert!(resample_strand(&s, 0.0).is_err());
        assert!(resample_strand(&s, -1.0).is_err());
    }

    #[test]
    fn resample_circle_preserves_arc_length() {
        // densely sampled quarter circle of radius 5 cm: chord error of the
        // input polyline is far below the tolerance
        let r = 0.05f64;
        let n = 4000;
        let pts: Vec<Vec3> = (0..=n)
            .map(|i| {
                let a = std::f64::consts::FRAC_PI_2 * i as f64 / n as f64;
                Vec3::new((r * a.cos()) as f32, (r * a.sin()) as f32, 0.0)
            })
            .collect();
        let s = Strand::new(pts).unwrap();
        let arc = r * std::f64::consts::FRAC_PI_2;
        let out = resample_strand(&s, arc / 100.0).unwrap();
        let rel = (out.arc_length() - arc).abs() / arc;
        assert!(rel < 0.005, "relative arc error {rel}");
        assert!((out.len() as i64 - 101).abs() <= 1);
    }

    #[test]
    fn tangents_of_line_and_two_points() {
        let s = line(5, Vec3::y(), 0.01);
        for t in strand_tangents(&s).unwrap() {
            assert!((t - Vec3::y()).norm() < 1e-6);
        }
        let two = Strand::new(vec![Vec3::zeros(), Vec3::new(1.0, 1.0, 0.0)]).unwrap();
        let t = strand_tangents(&two).unwrap();
        assert_eq!(t.len(), 2);
        assert_eq!(t[0], t[1]);
        assert!(strand_tangents(&Strand::single(Vec3::zeros()).unwrap()).is_err());
    }

    #[test]
    fn helix_tangents_match_derivative() {
        // helix r = 1 cm, pitch 2 cm; resample step 1/1000 of one turn's arc length
        let (r, pitch) = (0.01f64, 0.02f64);
        let c = pitch / (2.0 * std::f64::consts::PI);
        let turn_len = 2.0 * std::f64::consts::PI * (r * r + c * c).sqrt();
        let pos = |a: f64| Vec3::new((r * a.cos()) as f32, (c * a) as f32, (r * a.sin()) as f32);
        let dense: Vec<Vec3> = (0..=40_000).map(|i| pos(i as f64 * 6.0 * std::f64::consts::PI / 40_000.0)).collect();
        let s = resample_strand(&Strand::new(dense).unwrap(), turn_len / 1000.0).unwrap();
        let tangents = strand_tangents(&s).unwrap();
        let mut worst = 0.0f64;
        for (p, t) in s.points().iter().zip(&tangents).take(s.len() - 1) {
            // analytic derivative at the angle of this point, advanced by half a step
            let a = (p.z as f64).atan2(p.x as f64).rem_euclid(2.0 * std::f64::consts::PI);
            let turns = ((p.y as f64 / c) - a) / (2.0 * std::f64::consts::PI);
            let ang = a + turns.round() * 2.0 * std::f64::consts::PI + 0.5 * (turn_len / 1000.0) / (r * r + c * c).sqrt();
            let d = nalgebra::Vector3::new(-r * ang.sin(), c, r * ang.cos()).normalize();
            let cos = d.dot(&t.cast::<f64>()).clamp(-1.0, 1.0);
            worst = worst.max(cos.acos().to_degrees());
        }
        assert!(worst < 1.0, "worst tangent error {worst} deg");
    }

    fn arb_strand() -> impl Strategy<Value = Strand> {
        prop::collection::vec((-0.2f32..0.2, -0.2f32..0.2, -0.2f32..0.2), 2..40).prop_filter_map(
            "degenerate",
            |v| Strand::from_points_dedup(v.into_iter().map(|(x, y, z)| Vec3::new(x, y, z)).collect()).ok(),
        )
    }

    proptest! {
        #[test]
        fn tangents_are_unit(s in arb_strand()) {
            prop_assume!(s.len() >= 2);
            for t in strand_tangents(&s).unwrap() {
                prop_assert!((t.norm() - 1.0).abs() <= 1e-6);
            }
        }

        #[test]
        fn resample_is_idempotent(
            dirs in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0, -1.0f64..1.0), 1..40),
            step in 0.002f64..0.05,
            tail in 0.05f64..1.0,
        ) {
            // a strand whose chords are exactly `step`, with a shorter last interval
            let mut p = nalgebra::Vector3::<f64>::zeros();
            let mut pts = vec![to_f32(&p)];
            let n = dirs.len();
            for (i, (x, y, z)) in dirs.into_iter().enumerate() {
                let d = nalgebra::Vector3::new(x, y, z);
                prop_assume!(d.norm() > 0.1);
                let len = if i + 1 == n { step * tail } else { step };
                p += d.normalize() * len;
                pts.push(to_f32(&p));
            }
            let s = Strand::new(pts).unwrap();
            let again = resample_strand(&s, step).unwrap();
            prop_assert_eq!(s.len(), again.len());
            for (a, b) in s.points().iter().zip(again.points()) {
                prop_assert!((a - b).norm() <= 1e-6);
            }
        }
    }
}
