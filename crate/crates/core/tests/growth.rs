use nalgebra::Vector3;

use strandfield::camera::{make_orbit, CameraView, Intrinsics, OrbitSpec};
use strandfield::field::{bake_field, GridSpec, HybridField};
use strandfield::geometry::to_f64;
use strandfield::growth::{
    detect_coverage_gaps, filter_short_strands, grow_from_roots, grow_hair, recover_buzzcut, GrowthParams, PipelineParams, Stages,
    ViewInput,
};
use strandfield::image2::Mask;
use strandfield::metrics::render_strand_view;
use strandfield::strand::{HairModel, Scalp, Strand};
use strandfield::synth::{buzz_direction, generate_style, style_roots, Style, StyleSpec};

fn orbit(n: usize, px: usize) -> Vec<CameraView> {
    make_orbit(&OrbitSpec { n_views: n, ..Default::default() }, Intrinsics::from_vertical_fov(px, px, 55.0)).unwrap()
}

fn tangent(v: &Vector3<f64>, n: &Vector3<f64>) -> Vector3<f64> {
    (v - n * v.dot(n)).normalize()
}

#[test]
fn buzzcut_directions_recovered_from_rendered_views() {
    let scalp = Scalp::canonical();
    let spec = StyleSpec::preset(Style::Buzzcut, 2000, 3);
    let gt = generate_style(&spec, &scalp).unwrap();
    let roots = style_roots(&spec, &scalp).unwrap();
    let cams = orbit(8, 512);
    let omaps: Vec<_> = cams.iter().map(|c| render_strand_view(&gt, c).orientation).collect();
    let grid = GridSpec::around(&gt, 64).unwrap();
    let f = bake_field(&gt, &grid).unwrap();
    let p = GrowthParams::for_field(&f);
    let res = recover_buzzcut(&roots, &omaps, &cams, &f, &scalp, &p, 6).unwrap();

    let mut good = 0;
    for (r, d) in roots.iter().zip(&res.directions) {
        let n = to_f64(&r.normal);
        let want = tangent(&buzz_direction(r, &spec), &n);
        if let Some(d) = d {
            assert!(d.dot(&n).abs() < 1e-6, "direction leaves the tangent plane");
            if d.dot(&want).clamp(-1.0, 1.0).acos().to_degrees() <= 15.0 {
                good += 1;
            }
        }
    }
    let frac = good as f64 / roots.len() as f64;
    assert!(frac >= 0.8, "only {:.1}% within 15 degrees", 100.0 * frac);
    for (s, d) in res.strands.iter().zip(&res.directions) {
        assert_eq!(s.len() > 1, d.is_some());
    }
}

#[test]
fn octant_defect_shows_up_as_gaps() {
    let scalp = Scalp::canonical();
    let spec = StyleSpec::preset(Style::Straight, 3000, 5);
    let gt = generate_style(&spec, &scalp).unwrap();
    let grid = GridSpec::around(&gt, 64).unwrap();
    let mut f = bake_field(&gt, &grid).unwrap();
    let c = to_f64(&grid.aabb.center());
    let in_octant = |x: &Vector3<f64>| x.x > c.x && x.y < c.y && x.z > c.z;
    assert!(f.zero_where(in_octant) > 0);

    let roots: Vec<_> = gt.strands().iter().map(|s| s.root()).collect();
    let mut p = GrowthParams::for_field(&f);
    p.max_points = 1500;
    let grown = grow_from_roots(&f, &roots, &p).unwrap();
    let cams = orbit(8, 128);
    let renders: Vec<_> = cams.iter().map(|c| render_strand_view(&gt, c)).collect();
    let masks: Vec<Mask> = renders.iter().map(|r| r.mask.clone()).collect();
    let gaps = detect_coverage_gaps(&grown, &masks, &cams, 1).unwrap();

    // a gap pixel belongs to the octant when its ground-truth surface point does
    let mut best = 0.0f64;
    for ((g, r), cam) in gaps.iter().zip(&renders).zip(&cams) {
        let (mut inside, mut total) = (0usize, 0usize);
        for y in 0..g.height {
            for x in 0..g.width {
                if !*g.get(x, y) {
                    continue;
                }
                let x3 = cam.unproject(x as f64 + 0.5, y as f64 + 0.5, *r.depth.get(x, y) as f64).unwrap();
                total += 1;
                inside += in_octant(&x3) as usize;
            }
        }
        if total >= 20 {
            best = best.max(inside as f64 / total as f64);
        }
    }
    assert!(best > 0.5, "best octant share {best:.2}");
}

fn testcase_views(gt: &HairModel, cams: &[CameraView]) -> Vec<ViewInput> {
    cams.iter()
        .map(|c| {
            let r = render_strand_view(gt, c);
            ViewInput {
                cam: c.clone(),
                mask: r.mask,
                orientation: r.orientation,
            }
        })
        .collect()
}

fn defect_case() -> (HybridField, Vec<strandfield::strand::RootSample>, Vec<ViewInput>, GrowthParams) {
    let scalp = Scalp::canonical();
    let spec = StyleSpec::preset(Style::Bob, 2000, 9);
    let gt = generate_style(&spec, &scalp).unwrap();
    let grid = GridSpec::around(&gt, 64).unwrap();
    let mut f = bake_field(&gt, &grid).unwrap();
    // a band just below the scalp cuts every strand that passes it
    f.zero_where(|x| (-0.01..0.01).contains(&x.y) && x.z > 0.0);
    let roots = style_roots(&spec, &scalp).unwrap();
    let views = testcase_views(&gt, &orbit(8, 128));
    let mut p = GrowthParams::for_field(&f);
    p.max_points = 800;
    (f, roots, views, p)
}

#[test]
fn segments_reduce_gaps_and_stage_isolation_holds() {
    let (f, roots, views, p) = defect_case();
    let scalp = Scalp::canonical();
    let params = PipelineParams::new(p);
    let none = Stages {
        segments: false,
        filter: false,
        buzzcut: false,
    };
    let (c1, _) = grow_hair(&f, &roots, &views, &scalp, &params, none).unwrap();
    let positions: Vec<_> = roots.iter().map(|r| r.position).collect();
    assert_eq!(c1, grow_from_roots(&f, &positions, &p).unwrap());

    let (full, report) = grow_hair(&f, &roots, &views, &scalp, &params, Stages::default()).unwrap();
    assert!(report.segments > 0);
    assert_eq!(report.strands, full.len());
    let masks: Vec<Mask> = views.iter().map(|v| v.mask.clone()).collect();
    let cams: Vec<CameraView> = views.iter().map(|v| v.cam.clone()).collect();
    let g1: usize = detect_coverage_gaps(&c1, &masks, &cams, 1).unwrap().iter().map(|g| g.count()).sum();
    let g2: usize = detect_coverage_gaps(&full, &masks, &cams, 1).unwrap().iter().map(|g| g.count()).sum();
    assert!(g2 < g1, "full {g2} vs scalp-only {g1}");

    // main strands come first and are untouched by attachment
    for (a, b) in c1.strands().iter().zip(full.strands()).filter(|(a, _)| a.len() >= p.min_len_points) {
        assert_eq!(a, b);
    }
}

#[test]
fn pipeline_ignores_thread_count() {
    let (f, roots, views, p) = defect_case();
    let scalp = Scalp::canonical();
    let params = PipelineParams::new(p);
    let run = |t| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .unwrap()
            .install(|| grow_hair(&f, &roots, &views, &scalp, &params, Stages::default()).unwrap())
    };
    let a = run(1);
    assert_eq!(a, run(4));
}

#[test]
fn filter_view_rule_on_orbit() {
    let cams = orbit(8, 128);
    // a tiny strand right in front of the face, visible from the front views
    let s = Strand::new(vec![Vector3::new(0.0, 0.0, 0.2), Vector3::new(0.0, -0.002, 0.2), Vector3::new(0.0, -0.004, 0.2)]).unwrap();
    let model = HairModel::new(vec![s.clone()]);
    let mut p = GrowthParams::default();
    p.min_len_points = 10;
    let hit = |k: usize| {
        let mut m = Mask::filled(128, 128, false);
        for q in s.points() {
            let (u, v, _) = cams[k].project(&to_f64(q));
            if let Some((x, y)) = cams[k].pixel(u, v) {
                m.set(x, y, true);
            }
        }
        m
    };
    let empty = Mask::filled(128, 128, false);
    let two: Vec<Mask> = (0..8).map(|k| if k < 2 { hit(k) } else { empty.clone() }).collect();
    let one: Vec<Mask> = (0..8).map(|k| if k < 1 { hit(k) } else { empty.clone() }).collect();
    assert_eq!(filter_short_strands(&model, &two, &cams, &p, 2, 0.9).unwrap().model.len(), 1);
    let r = filter_short_strands(&model, &one, &cams, &p, 2, 0.9).unwrap();
    assert_eq!((r.model.len(), r.dropped), (0, 1));
}
