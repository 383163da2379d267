//! The full growing pipeline with individually skippable stages.

use serde::Serialize;

use super::{
    attach_segments, detect_coverage_gaps, filter_short_strands, grow_from_roots, grow_segments, recover_buzzcut, seed_gaps,
    GrowthParams,
};
use crate::camera::CameraView;
use crate::error::Result;
use crate::field::HybridField;
use crate::image2::Mask;
use crate::orientation::OrientationMap;
use crate::strand::{HairModel, RootSample, Scalp};

#[derive(Debug, Clone)]
pub struct ViewInput {
    pub cam: CameraView,
    pub mask: Mask,
    pub orientation: OrientationMap,
}

/// Which optional stages run after scalp-rooted growth.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Stages {
    /// Gap detection, seeding, segment growth and attachment.
    pub segments: bool,
    pub filter: bool,
    pub buzzcut: bool,
}

impl Default for Stages {
    fn default() -> Self {
        Stages {
            segments: true,
            filter: true,
            buzzcut: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PipelineParams {
    pub growth: GrowthParams,
    /// Coverage dilation (pixels) before gaps are taken.
    pub dilation: usize,
    pub max_seeds: usize,
    pub seg_max_points: usize,
    pub smooth_window: usize,
    pub min_views: usize,
    pub inside_frac: f64,
    pub buzz_points: usize,
}

impl PipelineParams {
    pub fn new(growth: GrowthParams) -> PipelineParams {
        PipelineParams {
            growth,
            dilation: 1,
            max_seeds: 2000,
            seg_max_points: 100,
            smooth_window: 3,
            min_views: 2,
            inside_frac: 0.9,
            buzz_points: 6,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct PipelineReport {
    pub main_strands: usize,
    pub main_points: usize,
    /// Per-view gap pixels left by the scalp-rooted strands.
    pub gap_pixels: Vec<usize>,
    pub seeds: usize,
    pub segments: usize,
    pub filtered: usize,
    pub buzz_candidates: usize,
    pub buzz_recovered: usize,
    pub strands: usize,
}

pub fn grow_hair(
    f: &HybridField,
    roots: &[RootSample],
    views: &[ViewInput],
    scalp: &Scalp,
    params: &PipelineParams,
    stages: Stages,
) -> Result<(HairModel, PipelineReport)> {
    let gp = &params.growth;
    let positions: Vec<_> = roots.iter().map(|r| r.position).collect();
    let main = grow_from_roots(f, &positions, gp)?;
    let n_main = main.len();
    let mut report = PipelineReport {
        main_strands: n_main,
        main_points: main.point_count(),
        ..Default::default()
    };
    let cams: Vec<CameraView> = views.iter().map(|v| v.cam.clone()).collect();
    let masks: Vec<Mask> = views.iter().map(|v| v.mask.clone()).collect();

    let mut model = main;
    if stages.segments {
        let gaps = detect_coverage_gaps(&model, &masks, &cams, params.dilation)?;
        report.gap_pixels = gaps.iter().map(|g| g.count()).collect();
        let seeds = seed_gaps(&gaps, &cams, f, gp, params.max_seeds)?;
        let segs = grow_segments(f, &seeds, gp, params.seg_max_points)?;
        report.seeds = seeds.len();
        report.segments = segs.len();
        model = attach_segments(&model, &segs, params.smooth_window)?;
    }

    // original index of every surviving strand, to find collapsed main strands
    let mut origin: Vec<usize> = (0..model.len()).collect();
    if stages.filter {
        let filtered = filter_short_strands(&model, &masks, &cams, gp, params.min_views, params.inside_frac)?;
        report.filtered = filtered.dropped;
        origin = filtered.kept;
        model = filtered.model;
    }

    if stages.buzzcut {
        let candidates: Vec<usize> = (0..model.len())
            .filter(|&k| {
                let s = &model.strands()[k];
                origin[k] < n_main
                    && s.len() < gp.min_len_points
                    && masks.iter().zip(&cams).any(|(m, c)| root_on_mask(&s.root(), m, c))
            })
            .collect();
        let collapsed: Vec<RootSample> = candidates.iter().map(|&k| roots[origin[k]]).collect();
        let omaps: Vec<OrientationMap> = views.iter().map(|v| v.orientation.clone()).collect();
        let rec = recover_buzzcut(&collapsed, &omaps, &cams, f, scalp, gp, params.buzz_points)?;
        report.buzz_candidates = candidates.len();
        report.buzz_recovered = collapsed.len() - rec.unrecovered;
        let mut strands = model.into_strands();
        for (&k, (s, d)) in candidates.iter().zip(rec.strands.into_iter().zip(rec.directions)) {
            if d.is_some() {
                strands[k] = s;
            }
        }
        model = HairModel::new(strands);
    }
    report.strands = model.len();
    Ok((model, report))
}

fn root_on_mask(root: &crate::geometry::Vec3, mask: &Mask, cam: &CameraView) -> bool {
    let (u, v, z) = cam.project(&crate::geometry::to_f64(root));
    z > 0.0 && cam.pixel(u, v).is_some_and(|(x, y)| *mask.get(x, y))
}
