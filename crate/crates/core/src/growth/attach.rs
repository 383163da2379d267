//! Attaching supplementary segments to the nearest scalp-rooted strand.

use std::collections::HashMap;

use super::Segment;
use crate::error::{Error, Result};
use crate::geometry::{to_f32, to_f64, Vec3};
use crate::strand::{HairModel, Strand};

/// Uniform grid over all main-strand vertices for nearest queries.
struct VertexGrid {
    cell: f64,
    origin: [f64; 3],
    kmax: [i64; 3],
    cells: HashMap<[i64; 3], Vec<(u32, u32)>>,
}

impl VertexGrid {
    fn new(main: &HairModel) -> VertexGrid {
        let b = main.bounds().expect("non-empty model");
        let n = main.point_count().max(1) as f64;
        let cell = (b.extent().max() as f64 / n.cbrt()).max(1e-6);
        let origin = [b.min[0] as f64, b.min[1] as f64, b.min[2] as f64];
        let mut cells: HashMap<[i64; 3], Vec<(u32, u32)>> = HashMap::new();
        for (si, s) in main.strands().iter().enumerate() {
            for (vi, p) in s.points().iter().enumerate() {
                cells.entry(Self::key_of(origin, cell, p)).or_default().push((si as u32, vi as u32));
            }
        }
        let kmax = Self::key_of(origin, cell, &b.max_v());
        VertexGrid { cell, origin, kmax, cells }
    }

    fn key_of(origin: [f64; 3], cell: f64, p: &Vec3) -> [i64; 3] {
        [0, 1, 2].map(|a| ((p[a] as f64 - origin[a]) / cell).floor() as i64)
    }

    /// Nearest vertex to `q`, ties to the lowest (strand, vertex). Visits
    /// Chebyshev rings of cells around `q`, clipped to the occupied key range.
    fn nearest(&self, main: &HairModel, q: &Vec3) -> (usize, usize) {
        let c = Self::key_of(self.origin, self.cell, q);
        let qd = to_f64(q);
        let lo = [0, 1, 2].map(|a| -c[a]);
        let hi = [0, 1, 2].map(|a| self.kmax[a] - c[a]);
        let r_max = (0..3).map(|a| lo[a].abs().max(hi[a].abs())).max().unwrap();
        let mut best: Option<(f64, u32, u32)> = None;
        let visit = |key: [i64; 3], best: &mut Option<(f64, u32, u32)>| {
            let Some(list) = self.cells.get(&key) else { return };
            for &(s, v) in list {
                let d2 = (to_f64(&main.strands()[s as usize].points()[v as usize]) - qd).norm_squared();
                if best.is_none_or(|b| (d2, s, v) < b) {
                    *best = Some((d2, s, v));
                }
            }
        };
        for r in 0..=r_max {
            if let Some((d2, _, _)) = best {
                let reach = (r - 1) as f64 * self.cell;
                if reach > 0.0 && reach * reach > d2 {
                    break;
                }
            }
            let span = |a: usize| lo[a].max(-r)..=hi[a].min(r);
            for dx in span(0) {
                for dy in span(1) {
                    if dx.abs() == r || dy.abs() == r {
                        for dz in span(2) {
                            visit([c[0] + dx, c[1] + dy, c[2] + dz], &mut best);
                        }
                    } else {
                        // interior column: only the two caps lie on the ring (r > 0 here)
                        for dz in [-r, r] {
                            if dz >= lo[2] && dz <= hi[2] {
                                visit([c[0] + dx, c[1] + dy, c[2] + dz], &mut best);
                            }
                        }
                    }
                }
            }
        }
        let (_, s, v) = best.expect("grid holds every vertex");
        (s as usize, v as usize)
    }
}

/// Each segment becomes a new strand: the nearest main strand's points from
/// the root through its vertex closest to the segment start, then the
/// segment, with the junction smoothed over `smooth_window` points per side.
/// New strands follow the unchanged main strands, in segment order.
pub fn attach_segments(main: &HairModel, segs: &[Segment], smooth_window: usize) -> Result<HairModel> {
    let mut out = main.clone();
    if segs.is_empty() {
        return Ok(out);
    }
    if main.is_empty() {
        return Err(Error::EmptyModel);
    }
    let grid = VertexGrid::new(main);
    for seg in segs {
        let (si, vi) = grid.nearest(main, &seg.start());
        let mut pts = main.strands()[si].points()[..=vi].to_vec();
        pts.extend_from_slice(seg.points());
        let joined = Strand::from_points_dedup(pts)?;
        out.push(smooth_junction(&joined, vi, smooth_window)?);
    }
    Ok(out)
}

/// Centered moving average over points within `window` of `junction`, with
/// the radius shrunk near the strand ends; root and tip stay fixed. Averages
/// are taken over the original points.
pub fn smooth_junction(s: &Strand, junction: usize, window: usize) -> Result<Strand> {
    let n = s.len();
    if junction >= n {
        return Err(Error::InvalidParam(format!("junction {junction} outside strand of {n} points")));
    }
    if window == 0 || n < 3 {
        return Ok(s.clone());
    }
    let orig = s.points();
    let mut pts = orig.to_vec();
    let lo = junction.saturating_sub(window).max(1);
    let hi = (junction + window).min(n - 2);
    for (i, slot) in pts.iter_mut().enumerate().take(hi + 1).skip(lo) {
        let r = window.min(i).min(n - 1 - i);
        let sum = orig[i - r..=i + r].iter().fold(nalgebra::Vector3::<f64>::zeros(), |a, p| a + to_f64(p));
        *slot = to_f32(&(sum / (2 * r + 1) as f64));
    }
    Strand::from_points_dedup(pts)
}
