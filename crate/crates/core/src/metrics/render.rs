//! Z-buffered polyline rasterizer producing orientation, depth and mask
//! channels for one camera.

use nalgebra::{Vector2, Vector3};
use rayon::prelude::*;

use crate::camera::CameraView;
use crate::geometry::to_f64;
use crate::image2::{DepthMap, Mask};
use crate::orientation::{wrap_pi, OrientationMap};
use crate::strand::HairModel;

/// Camera-space depth below which geometry is clipped.
pub const NEAR_PLANE: f64 = 1e-3;
/// A later strand only overwrites a pixel when nearer by more than this.
pub const DEPTH_TIE: f64 = 1e-7;
const TILE: usize = 32;

#[derive(Debug, Clone, PartialEq)]
pub struct StrandRender {
    pub orientation: OrientationMap,
    pub depth: DepthMap,
    pub mask: Mask,
}

/// Screen-space segment clipped to the image; inverse depth is linear in
/// screen space, so it is carried per endpoint.
#[derive(Debug, Clone, Copy)]
struct ScreenSeg {
    a: Vector2<f64>,
    b: Vector2<f64>,
    inv_za: f64,
    inv_zb: f64,
    angle: f32,
}

fn clip_near(c0: Vector3<f64>, c1: Vector3<f64>) -> Option<(Vector3<f64>, Vector3<f64>)> {
    match (c0.z >= NEAR_PLANE, c1.z >= NEAR_PLANE) {
        (true, true) => Some((c0, c1)),
        (false, false) => None,
        (in0, _) => {
            let t = (NEAR_PLANE - c0.z) / (c1.z - c0.z);
            let mut m = c0 + (c1 - c0) * t;
            m.z = NEAR_PLANE;
            if in0 {
                Some((c0, m))
            } else {
                Some((m, c1))
            }
        }
    }
}

/// Liang–Barsky clip of a..b to [0,w]×[0,h]; returns the parameter range.
fn clip_rect(a: &Vector2<f64>, d: &Vector2<f64>, w: f64, h: f64) -> Option<(f64, f64)> {
    let (mut t0, mut t1) = (0.0f64, 1.0f64);
    for (p, q) in [(-d.x, a.x), (d.x, w - a.x), (-d.y, a.y), (d.y, h - a.y)] {
        if p == 0.0 {
            if q < 0.0 {
                return None;
            }
        } else {
            let r = q / p;
            if p < 0.0 {
                t0 = t0.max(r);
            } else {
                t1 = t1.min(r);
            }
        }
    }
    (t0 <= t1).then_some((t0, t1))
}

fn project_segment(cam: &CameraView, p0: &Vector3<f64>, p1: &Vector3<f64>) -> Option<ScreenSeg> {
    let (c0, c1) = clip_near(cam.to_camera(p0), cam.to_camera(p1))?;
    let a = Vector2::new(cam.fx * c0.x / c0.z + cam.cx, cam.fy * c0.y / c0.z + cam.cy);
    let b = Vector2::new(cam.fx * c1.x / c1.z + cam.cx, cam.fy * c1.y / c1.z + cam.cy);
    let d = b - a;
    let angle = wrap_pi(d.y.atan2(d.x)) as f32;
    let (t0, t1) = clip_rect(&a, &d, cam.width as f64, cam.height as f64)?;
    let (ia, ib) = (1.0 / c0.z, 1.0 / c1.z);
    Some(ScreenSeg {
        a: a + d * t0,
        b: a + d * t1,
        inv_za: ia + (ib - ia) * t0,
        inv_zb: ia + (ib - ia) * t1,
        angle,
    })
}

/// Every pixel cell the segment passes through, in order from `a` to `b`.
fn traverse(s: &ScreenSeg, w: usize, h: usize, mut visit: impl FnMut(usize, usize)) {
    let cell = |p: &Vector2<f64>| ((p.x.floor() as i64).clamp(0, w as i64 - 1), (p.y.floor() as i64).clamp(0, h as i64 - 1));
    let (mut x, mut y) = cell(&s.a);
    let (xe, ye) = cell(&s.b);
    let d = s.b - s.a;
    let axis = |a: f64, da: f64, c: i64| -> (i64, f64, f64) {
        if da > 0.0 {
            (1, (c as f64 + 1.0 - a) / da, 1.0 / da)
        } else if da < 0.0 {
            (-1, (a - c as f64) / -da, -1.0 / da)
        } else {
            (0, f64::INFINITY, f64::INFINITY)
        }
    };
    let (sx, mut tx, dtx) = axis(s.a.x, d.x, x);
    let (sy, mut ty, dty) = axis(s.a.y, d.y, y);
    let budget = (xe - x).abs() + (ye - y).abs();
    visit(x as usize, y as usize);
    for _ in 0..budget {
        if tx < ty {
            x += sx;
            tx += dtx;
        } else {
            y += sy;
            ty += dty;
        }
        if x < 0 || y < 0 || x >= w as i64 || y >= h as i64 {
            break;
        }
        visit(x as usize, y as usize);
    }
}

struct TileBuf {
    x0: usize,
    y0: usize,
    w: usize,
    h: usize,
    depth: Vec<f64>,
    angle: Vec<f32>,
}

fn render_tile(segs: &[ScreenSeg], ids: &[u32], x0: usize, y0: usize, tw: usize, th: usize, w: usize, h: usize) -> TileBuf {
    let mut depth = vec![f64::INFINITY; tw * th];
    let mut angle = vec![0.0f32; tw * th];
    for &id in ids {
        let s = &segs[id as usize];
        let d = s.b - s.a;
        let len2 = d.norm_squared();
        traverse(s, w, h, |x, y| {
            if x < x0 || y < y0 || x >= x0 + tw || y >= y0 + th {
                return;
            }
            let c = Vector2::new(x as f64 + 0.5, y as f64 + 0.5);
            let t = if len2 > 0.0 { ((c - s.a).dot(&d) / len2).clamp(0.0, 1.0) } else { 0.0 };
            let z = 1.0 / (s.inv_za + (s.inv_zb - s.inv_za) * t);
            let i = (y - y0) * tw + (x - x0);
            if z < depth[i] - DEPTH_TIE {
                depth[i] = z;
                angle[i] = s.angle;
            }
        });
    }
    TileBuf { x0, y0, w: tw, h: th, depth, angle }
}

/// Rasterizes every strand segment as a supercover line. Each covered pixel
/// holds the nearest segment's projected direction mod π and its
/// perspective-correct camera depth; near ties go to the earlier strand.
pub fn render_strand_view(model: &HairModel, cam: &CameraView) -> StrandRender {
    render_tiled(model, cam, TILE)
}

pub(crate) fn render_tiled(model: &HairModel, cam: &CameraView, tile: usize) -> StrandRender {
    let (w, h) = (cam.width, cam.height);
    let segs: Vec<ScreenSeg> = model
        .strands()
        .par_iter()
        .map(|s| {
            let p = s.points();
            let mut out = Vec::with_capacity(p.len());
            if p.len() == 1 {
                let x = to_f64(&p[0]);
                out.extend(project_segment(cam, &x, &x));
            }
            for pair in p.windows(2) {
                out.extend(project_segment(cam, &to_f64(&pair[0]), &to_f64(&pair[1])));
            }
            out
        })
        .collect::<Vec<_>>()
        .concat();

    let (ntx, nty) = (w.div_ceil(tile), h.div_ceil(tile));
    let mut bins: Vec<Vec<u32>> = vec![Vec::new(); ntx * nty];
    for (id, s) in segs.iter().enumerate() {
        let lo = s.a.inf(&s.b);
        let hi = s.a.sup(&s.b);
        let tx0 = ((lo.x.floor().max(0.0) as usize) / tile).min(ntx - 1);
        let tx1 = ((hi.x.floor().max(0.0) as usize) / tile).min(ntx - 1);
        let ty0 = ((lo.y.floor().max(0.0) as usize) / tile).min(nty - 1);
        let ty1 = ((hi.y.floor().max(0.0) as usize) / tile).min(nty - 1);
        for ty in ty0..=ty1 {
            for tx in tx0..=tx1 {
                bins[ty * ntx + tx].push(id as u32);
            }
        }
    }

    let tiles: Vec<TileBuf> = (0..ntx * nty)
        .into_par_iter()
        .map(|t| {
            let (x0, y0) = ((t % ntx) * tile, (t / ntx) * tile);
            render_tile(&segs, &bins[t], x0, y0, tile.min(w - x0), tile.min(h - y0), w, h)
        })
        .collect();

    let mut depth = DepthMap::filled(w, h, 0.0);
    let mut angle = vec![0.0f32; w * h];
    let mut mask = vec![false; w * h];
    for t in &tiles {
        for yy in 0..t.h {
            for xx in 0..t.w {
                let z = t.depth[yy * t.w + xx];
                if z.is_finite() {
                    let i = (t.y0 + yy) * w + t.x0 + xx;
                    depth.data[i] = z as f32;
                    angle[i] = t.angle[yy * t.w + xx];
                    mask[i] = true;
                }
            }
        }
    }
    let confidence = mask.iter().map(|&m| m as u8 as f32).collect();
    let orientation = OrientationMap::from_parts(w, h, angle, mask.clone(), confidence).expect("render buffers are consistent");
    StrandRender {
        orientation,
        depth,
        mask: Mask::from_vec(w, h, mask).expect("render buffers are consistent"),
    }
}
