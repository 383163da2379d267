//! Command-line front end.
//!
//! Every command validates its flags before touching the file system, writes
//! outputs through a temporary file plus rename, and prints one `key=value`
//! summary line on success.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use crate::camera::{load_cameras, CameraView, Intrinsics, OrbitSpec};
use crate::depth::load_pfm;
use crate::field::{
    bake_field, field_orientation_mse, load_field, occupancy_iou_precision, save_field, GridSpec, HybridField, OCCUPANCY_TAU,
};
use crate::growth::{grow_hair, GrowthParams, PipelineParams, Stages, ViewInput};
use crate::image2::{GrayImage, Mask};
use crate::metrics::{evaluate, EvalParams, FieldEval, GtView};
use crate::orientation::{decode_orientation_png, encode_confidence_png, encode_orientation_png, gabor_orientation, GaborBank};
use crate::strand::{load_strands, sample_scalp_roots, save_strands, HairModel, RootSample, Scalp, StrandFormat};
use crate::synth::{load_testcase, make_testcase, GridPlan, Style, StyleSpec, Testcase};

#[derive(Debug, Parser)]
#[command(name = "strandfield", version, about = "Strand-level hair geometry from hybrid growth fields")]
pub struct Cli {
    /// Seed for every stochastic choice.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads (0 = one per core).
    #[arg(long, global = true, default_value_t = 0)]
    pub threads: usize,
    #[arg(short, long, global = true)]
    pub verbose: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate an oracle test case: strands, cameras, views and field.
    Synth(SynthArgs),
    /// Gabor orientation map of an image + mask pair or a directory of them.
    Orient(OrientArgs),
    /// Bake a hybrid field from a strand file.
    Bake(BakeArgs),
    /// Grow strands through a field.
    Grow(GrowArgs),
    /// Evaluate strands against the views of a test case.
    Eval(EvalArgs),
    /// Summarize an artifact file or test-case directory.
    Info(InfoArgs),
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value = "straight")]
    pub style: Style,
    #[arg(long, default_value_t = 10_000)]
    pub strands: usize,
    #[arg(long, default_value_t = 8)]
    pub views: usize,
    /// Field resolution per axis.
    #[arg(long, default_value_t = 128)]
    pub resolution: usize,
    #[command(flatten)]
    pub camera: CameraArgs,
}

#[derive(Debug, Args)]
pub struct CameraArgs {
    #[arg(long, default_value_t = Intrinsics::default().width)]
    pub width: usize,
    #[arg(long, default_value_t = Intrinsics::default().height)]
    pub height: usize,
    /// Vertical field of view, degrees.
    #[arg(long, default_value_t = 55.0)]
    pub fov: f64,
    #[arg(long, default_value_t = OrbitSpec::default().radius)]
    pub radius: f64,
    #[arg(long, default_value_t = OrbitSpec::default().elevation_deg)]
    pub elevation: f64,
}

#[derive(Debug, Args)]
pub struct OrientArgs {
    /// Grayscale input image.
    #[arg(long, conflicts_with = "dir", requires_all = ["mask", "out"])]
    pub image: Option<PathBuf>,
    #[arg(long)]
    pub mask: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also write the confidence channel here.
    #[arg(long, conflicts_with = "dir")]
    pub confidence: Option<PathBuf>,
    /// Process every `X.image.png` that has a sibling `X.mask.png`, writing `X.gabor.png`.
    #[arg(long)]
    pub dir: Option<PathBuf>,
    #[command(flatten)]
    pub bank: BankArgs,
}

#[derive(Debug, Args)]
pub struct BankArgs {
    #[arg(long, default_value_t = GaborBank::default().n_orientations)]
    pub orientations: usize,
    #[arg(long, default_value_t = GaborBank::default().wavelength)]
    pub wavelength: f64,
    #[arg(long, default_value_t = GaborBank::default().sigma)]
    pub sigma: f64,
    #[arg(long, default_value_t = GaborBank::default().aspect_ratio)]
    pub aspect: f64,
    #[arg(long, default_value_t = GaborBank::default().kernel_radius)]
    pub kernel_radius: usize,
}

impl BankArgs {
    fn bank(&self) -> GaborBank {
        GaborBank {
            n_orientations: self.orientations,
            wavelength: self.wavelength,
            sigma: self.sigma,
            aspect_ratio: self.aspect,
            kernel_radius: self.kernel_radius,
        }
    }
}

#[derive(Debug, Args)]
pub struct BakeArgs {
    #[arg(long)]
    pub strands: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 128)]
    pub resolution: usize,
    /// Influence radius in meters (default 1.5 voxel diagonals).
    #[arg(long)]
    pub tube_radius: Option<f64>,
}

#[derive(Debug, Args)]
pub struct GrowArgs {
    /// Test-case directory supplying field, roots, cameras and views.
    #[arg(long)]
    pub testcase: Option<PathBuf>,
    /// Field file (overrides the test case's).
    #[arg(long)]
    pub field: Option<PathBuf>,
    /// Take roots from the first point of every strand in this file.
    #[arg(long, conflicts_with = "n_roots")]
    pub roots: Option<PathBuf>,
    /// Sample this many roots on the canonical scalp instead.
    #[arg(long)]
    pub n_roots: Option<usize>,
    #[arg(long)]
    pub out: PathBuf,
    /// Also write the stage report as JSON.
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// Euler step in meters (default half the smallest voxel edge).
    #[arg(long)]
    pub step: Option<f64>,
    #[arg(long, default_value_t = GrowthParams::default().max_points)]
    pub max_points: usize,
    #[arg(long, default_value_t = GrowthParams::default().stop_tau)]
    pub stop_tau: f64,
    #[arg(long, default_value_t = GrowthParams::default().min_len_points)]
    pub min_len_points: usize,
    #[arg(long, default_value_t = PipelineParams::new(GrowthParams::default()).dilation)]
    pub dilation: usize,
    #[arg(long, default_value_t = PipelineParams::new(GrowthParams::default()).max_seeds)]
    pub max_seeds: usize,
    #[arg(long, default_value_t = PipelineParams::new(GrowthParams::default()).seg_max_points)]
    pub seg_max_points: usize,
    #[arg(long, default_value_t = PipelineParams::new(GrowthParams::default()).smooth_window)]
    pub smooth_window: usize,
    #[arg(long, default_value_t = PipelineParams::new(GrowthParams::default()).min_views)]
    pub min_views: usize,
    #[arg(long, default_value_t = PipelineParams::new(GrowthParams::default()).inside_frac)]
    pub inside_frac: f64,
    #[arg(long, default_value_t = PipelineParams::new(GrowthParams::default()).buzz_points)]
    pub buzz_points: usize,
    /// Skip gap detection and supplementary segments.
    #[arg(long)]
    pub skip_segments: bool,
    /// Skip the short-strand filter only.
    #[arg(long)]
    pub skip_filter: bool,
    /// Skip short-strand handling altogether: filter and buzz-cut recovery.
    #[arg(long)]
    pub skip_buzzcut: bool,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[arg(long)]
    pub testcase: PathBuf,
    #[arg(long)]
    pub strands: PathBuf,
    /// Also score this field against the test case's field.
    #[arg(long)]
    pub field: Option<PathBuf>,
    /// Write the full report as JSON here.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, default_value_t = EvalParams::default().n_pairs)]
    pub pairs: usize,
    #[arg(long, default_value_t = EvalParams::default().depth_floor_m)]
    pub depth_floor: f64,
    #[arg(long, default_value_t = 100_000)]
    pub field_samples: usize,
    /// Check test-case checksums before evaluating.
    #[arg(long)]
    pub verify: bool,
}

#[derive(Debug, Args)]
pub struct InfoArgs {
    pub path: PathBuf,
}

/// Parses the process arguments, runs the command and returns the exit code.
pub fn main_with_args(args: impl IntoIterator<Item = std::ffi::OsString>) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return 0;
            }
            let text = e.to_string();
            let line = text.lines().next().unwrap_or("invalid arguments");
            eprintln!("strandfield: {}", line.trim_start_matches("error: "));
            return 2;
        }
    };
    let level = if cli.verbose { "debug" } else { "warn" };
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).try_init();
    match run(&cli) {
        Ok(summary) => {
            println!("{summary}");
            0
        }
        Err(e) => {
            let msg = format!("{e:#}").replace('\n', " ");
            eprintln!("strandfield: error: {msg}");
            1
        }
    }
}

/// Runs one command and returns its summary line.
pub fn run(cli: &Cli) -> Result<String> {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build()?;
    pool.install(|| match &cli.command {
        Command::Synth(a) => cmd_synth(a, cli.seed),
        Command::Orient(a) => cmd_orient(a),
        Command::Bake(a) => cmd_bake(a),
        Command::Grow(a) => cmd_grow(a, cli.seed),
        Command::Eval(a) => cmd_eval(a, cli.seed),
        Command::Info(a) => cmd_info(a),
    })
}

/// Writes through `<path>.partial` so an error never leaves a half-written file.
fn write_atomic(path: &Path, write: impl FnOnce(&Path) -> crate::Result<()>) -> Result<()> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".partial");
    let tmp = PathBuf::from(tmp);
    if let Err(e) = write(&tmp) {
        let _ = std::fs::remove_file(&tmp);
        return Err(e.into());
    }
    std::fs::rename(&tmp, path).with_context(|| format!("renaming into {}", path.display()))
}

fn check_parent(path: &Path) -> Result<()> {
    match path.parent() {
        Some(p) if !p.as_os_str().is_empty() && !p.is_dir() => bail!("output directory {} does not exist", p.display()),
        _ => Ok(()),
    }
}

fn strand_format(path: &Path) -> Result<StrandFormat> {
    StrandFormat::from_extension(path).ok_or_else(|| anyhow!("{}: strand files must end in .hair or .data", path.display()))
}

fn load_model(path: &Path) -> Result<HairModel> {
    let report = load_strands(path, strand_format(path)?)?;
    if report.dropped > 0 {
        log::warn!("{}: dropped {} degenerate strands", path.display(), report.dropped);
    }
    Ok(report.model)
}

pub fn cmd_synth(a: &SynthArgs, seed: u64) -> Result<String> {
    let spec = StyleSpec::preset(a.style, a.strands, seed);
    spec.validate()?;
    let orbit = OrbitSpec {
        n_views: a.views,
        radius: a.camera.radius,
        elevation_deg: a.camera.elevation,
        ..Default::default()
    };
    if a.views == 0 || !(a.camera.radius > 0.0) {
        bail!("--views must be >= 1 and --radius > 0");
    }
    if a.camera.width == 0 || a.camera.height == 0 || !(a.camera.fov > 0.0 && a.camera.fov < 180.0) {
        bail!("--width and --height must be >= 1 and --fov in (0, 180)");
    }
    if a.resolution < 8 {
        bail!("--resolution must be >= 8");
    }
    if a.out.exists() && std::fs::read_dir(&a.out)?.next().is_some() {
        bail!("{} exists and is not empty", a.out.display());
    }
    let intr = Intrinsics::from_vertical_fov(a.camera.width, a.camera.height, a.camera.fov);
    let m = make_testcase(&spec, &orbit, intr, GridPlan::Around(a.resolution), &a.out)?;
    Ok(format!(
        "synth style={} strands={} views={} resolution={} files={} out={}",
        a.style,
        m.strands,
        m.views,
        a.resolution,
        m.files.len() + 1,
        a.out.display()
    ))
}

pub fn cmd_orient(a: &OrientArgs) -> Result<String> {
    let bank = a.bank.bank();
    bank.validate()?;
    let jobs: Vec<(PathBuf, PathBuf, PathBuf)> = if let Some(dir) = &a.dir {
        let mut jobs = Vec::new();
        let mut entries: Vec<PathBuf> = std::fs::read_dir(dir)
            .with_context(|| format!("reading {}", dir.display()))?
            .map(|e| Ok(e?.path()))
            .collect::<std::io::Result<_>>()?;
        entries.sort();
        for p in entries {
            let Some(name) = p.file_name().and_then(|n| n.to_str()) else { continue };
            let Some(stem) = name.strip_suffix(".image.png") else { continue };
            let mask = dir.join(format!("{stem}.mask.png"));
            if mask.is_file() {
                jobs.push((p.clone(), mask, dir.join(format!("{stem}.gabor.png"))));
            }
        }
        if jobs.is_empty() {
            bail!("{}: no X.image.png with a matching X.mask.png", dir.display());
        }
        jobs
    } else {
        match (&a.image, &a.mask, &a.out) {
            (Some(i), Some(m), Some(o)) => {
                check_parent(o)?;
                vec![(i.clone(), m.clone(), o.clone())]
            }
            _ => bail!("pass --image, --mask and --out, or --dir"),
        }
    };
    let mut masked = 0;
    for (img, mask, out) in &jobs {
        let image = GrayImage::load_png(img)?;
        let mask = Mask::load_png(mask)?;
        let o = gabor_orientation(&image, &mask, &bank)?;
        masked += o.mask.iter().filter(|&&m| m).count();
        write_atomic(out, |t| encode_orientation_png(&o, t))?;
        if let Some(c) = &a.confidence {
            write_atomic(c, |t| encode_confidence_png(&o, t))?;
        }
    }
    Ok(format!("orient maps={} masked_pixels={masked} filters={}", jobs.len(), bank.n_orientations))
}

pub fn cmd_bake(a: &BakeArgs) -> Result<String> {
    if a.resolution < 8 {
        bail!("--resolution must be >= 8");
    }
    if a.tube_radius.is_some_and(|r| !(r > 0.0 && r.is_finite())) {
        bail!("--tube-radius must be > 0");
    }
    check_parent(&a.out)?;
    let model = load_model(&a.strands)?;
    let mut grid = GridSpec::around(&model, a.resolution)?;
    if let Some(r) = a.tube_radius {
        grid.tube_radius = r;
    }
    let f = bake_field(&model, &grid)?;
    write_atomic(&a.out, |t| save_field(&f, t))?;
    Ok(format!(
        "bake strands={} resolution={} tube_radius={:.6} occupied_voxels={} out={}",
        model.len(),
        a.resolution,
        grid.tube_radius,
        f.nonzero_voxels(),
        a.out.display()
    ))
}

/// `f = None` checks the flags alone, with a placeholder step.
fn growth_params(a: &GrowArgs, f: Option<&HybridField>, seed: u64) -> Result<PipelineParams> {
    let mut g = f.map_or_else(GrowthParams::default, GrowthParams::for_field);
    if let Some(s) = a.step {
        g.step = s;
    }
    g.max_points = a.max_points;
    g.stop_tau = a.stop_tau;
    g.min_len_points = a.min_len_points;
    g.seed = seed;
    g.validate()?;
    let mut p = PipelineParams::new(g);
    p.dilation = a.dilation;
    p.max_seeds = a.max_seeds;
    p.seg_max_points = a.seg_max_points;
    p.smooth_window = a.smooth_window;
    p.min_views = a.min_views;
    p.inside_frac = a.inside_frac;
    p.buzz_points = a.buzz_points;
    if p.seg_max_points < 2 || p.buzz_points < 2 {
        bail!("--seg-max-points and --buzz-points must be >= 2");
    }
    if !(0.0..=1.0).contains(&p.inside_frac) {
        bail!("--inside-frac must be in [0, 1]");
    }
    Ok(p)
}

fn stages(a: &GrowArgs) -> Stages {
    Stages {
        segments: !a.skip_segments,
        filter: !a.skip_filter && !a.skip_buzzcut,
        buzzcut: !a.skip_buzzcut,
    }
}

pub fn cmd_grow(a: &GrowArgs, seed: u64) -> Result<String> {
    let stages = stages(a);
    let needs_views = stages.segments || stages.filter || stages.buzzcut;
    if a.testcase.is_none() {
        if a.field.is_none() {
            bail!("pass --testcase or --field");
        }
        if a.roots.is_none() && a.n_roots.is_none() {
            bail!("pass --testcase, --roots or --n-roots");
        }
        if needs_views {
            bail!("segments, filter and buzz-cut stages need the views of --testcase; pass --skip-segments --skip-buzzcut");
        }
    }
    if a.n_roots == Some(0) {
        bail!("--n-roots must be >= 1");
    }
    growth_params(a, None, seed)?;
    strand_format(&a.out)?;
    check_parent(&a.out)?;
    if let Some(r) = &a.report {
        check_parent(r)?;
    }

    let tc = a.testcase.as_deref().map(|d| load_testcase(d, false)).transpose()?;
    let field = match (&a.field, &tc) {
        (Some(p), _) => load_field(p)?,
        (None, Some(tc)) => tc.field.clone(),
        (None, None) => unreachable!(),
    };
    let params = growth_params(a, Some(&field), seed)?;
    let scalp = Scalp::canonical();
    let roots: Vec<RootSample> = if let Some(n) = a.n_roots {
        sample_scalp_roots(&scalp, n, seed)?
    } else {
        let model = match (&a.roots, &tc) {
            (Some(p), _) => load_model(p)?,
            (None, Some(tc)) => tc.model.clone(),
            (None, None) => unreachable!(),
        };
        model
            .strands()
            .iter()
            .map(|s| RootSample {
                position: s.root(),
                normal: scalp.normal_near(&s.root()),
            })
            .collect()
    };
    let views = match &tc {
        Some(tc) if needs_views => view_inputs(tc),
        _ => Vec::new(),
    };
    let (model, report) = grow_hair(&field, &roots, &views, &scalp, &params, stages)?;
    write_atomic(&a.out, |t| save_strands(&model, t))?;
    if let Some(r) = &a.report {
        let text = serde_json::to_string_pretty(&serde_json::json!({ "params": params, "stages": stages, "report": report }))?;
        write_atomic(r, |t| std::fs::write(t, text + "\n").map_err(|e| crate::Error::file(t, e)))?;
    }
    Ok(format!(
        "grow strands={} points={} main={} gap_pixels={} seeds={} segments={} filtered={} buzz_candidates={} buzz_recovered={} out={}",
        model.len(),
        model.point_count(),
        report.main_strands,
        report.gap_pixels.iter().sum::<usize>(),
        report.seeds,
        report.segments,
        report.filtered,
        report.buzz_candidates,
        report.buzz_recovered,
        a.out.display()
    ))
}

fn view_inputs(tc: &Testcase) -> Vec<ViewInput> {
    tc.cameras
        .iter()
        .zip(&tc.views)
        .map(|(cam, v)| ViewInput {
            cam: cam.clone(),
            mask: v.mask.clone(),
            orientation: v.orientation.clone(),
        })
        .collect()
}

pub fn cmd_eval(a: &EvalArgs, seed: u64) -> Result<String> {
    if a.pairs == 0 || a.field_samples == 0 {
        bail!("--pairs and --field-samples must be >= 1");
    }
    if !(a.depth_floor >= 0.0) {
        bail!("--depth-floor must be >= 0");
    }
    if let Some(o) = &a.out {
        check_parent(o)?;
    }
    let tc = load_testcase(&a.testcase, a.verify)?;
    let model = load_model(&a.strands)?;
    let params = EvalParams {
        n_pairs: a.pairs,
        depth_floor_m: a.depth_floor,
        seed,
    };
    let cams: Vec<CameraView> = tc.cameras.clone();
    let gts: Vec<GtView> = tc.views.clone();
    let mut report = evaluate(&model, &cams, &gts, &params)?;
    if let Some(p) = &a.field {
        let pred = load_field(p)?;
        let e = field_orientation_mse(&pred, &tc.field, a.field_samples, seed)?;
        let o = occupancy_iou_precision(&pred, &tc.field, a.field_samples, seed, OCCUPANCY_TAU)?;
        report.field = Some(FieldEval {
            l1: e.l1,
            mse: e.mse,
            occupancy_iou: o.iou,
            occupancy_precision: o.precision,
            samples: e.samples,
        });
    }
    if let Some(o) = &a.out {
        let text = serde_json::to_string_pretty(&report)?;
        write_atomic(o, |t| std::fs::write(t, text + "\n").map_err(|e| crate::Error::file(t, e)))?;
    }
    let mut line = format!(
        "eval hairsale_deg={:.4} hairrida_pct={:.4} iou={:.4} views={} pixels={} pairs={}",
        report.hairsale_deg,
        report.hairrida_pct,
        report.iou,
        report.per_view.len(),
        report.hairsale_pixels,
        report.hairrida_pairs
    );
    if let Some(f) = &report.field {
        write!(line, " field_mse={:.6} field_iou={:.4} field_precision={:.4}", f.mse, f.occupancy_iou, f.occupancy_precision)?;
    }
    Ok(line)
}

fn dims(d: [usize; 3]) -> String {
    format!("{}x{}x{}", d[0], d[1], d[2])
}

pub fn cmd_info(a: &InfoArgs) -> Result<String> {
    let p = &a.path;
    if p.is_dir() {
        let tc = load_testcase(p, true)?;
        let m = &tc.manifest;
        return Ok(format!(
            "info kind=testcase style={} strands={} views={} resolution={} files={} checksums=ok",
            m.style.style,
            m.strands,
            m.views,
            dims(m.grid.resolution),
            m.files.len()
        ));
    }
    let name = p.file_name().and_then(|n| n.to_str()).unwrap_or_default();
    let ext = p.extension().and_then(|e| e.to_str()).unwrap_or_default();
    match ext {
        "hair" | "data" => {
            let r = load_strands(p, strand_format(p)?)?;
            let m = &r.model;
            let (lo, hi) = m.strands().iter().map(|s| s.len()).fold((usize::MAX, 0), |(lo, hi), n| (lo.min(n), hi.max(n)));
            Ok(format!(
                "info kind=strands strands={} points={} min_points={} max_points={} dropped={}",
                m.len(),
                m.point_count(),
                if m.is_empty() { 0 } else { lo },
                hi,
                r.dropped
            ))
        }
        "hfld" => {
            let f = load_field(p)?;
            let vs = f.voxel_size();
            Ok(format!(
                "info kind=field dims={} voxel_size=[{:.6},{:.6},{:.6}] nonzero_voxels={} voxels={}",
                dims(f.dims()),
                vs.x,
                vs.y,
                vs.z,
                f.nonzero_voxels(),
                f.voxel_count()
            ))
        }
        "pfm" => {
            let d = load_pfm(p)?;
            let valid: Vec<f32> = d.data.iter().copied().filter(|&z| z > 0.0).collect();
            let (lo, hi) = valid.iter().fold((f32::INFINITY, 0.0f32), |(lo, hi), &z| (lo.min(z), hi.max(z)));
            Ok(format!(
                "info kind=depth width={} height={} valid_pixels={} min_depth={} max_depth={}",
                d.width,
                d.height,
                valid.len(),
                if valid.is_empty() { 0.0 } else { lo },
                hi
            ))
        }
        "json" if name == "manifest.json" => cmd_info(&InfoArgs {
            path: p.parent().map(Path::to_path_buf).unwrap_or_default(),
        }),
        "json" => {
            let cams = load_cameras(p)?;
            let i = cams.first().map(|c| c.intrinsics());
            Ok(format!(
                "info kind=cameras views={} width={} height={} fx={:.3}",
                cams.len(),
                i.map_or(0, |i| i.width),
                i.map_or(0, |i| i.height),
                i.map_or(0.0, |i| i.fx)
            ))
        }
        "png" => {
            let img = image::open(p).with_context(|| format!("reading {}", p.display()))?;
            if img.color().channel_count() >= 3 {
                let o = decode_orientation_png(p)?;
                let n = o.mask.iter().filter(|&&m| m).count();
                Ok(format!("info kind=orientation width={} height={} masked_pixels={n}", o.width, o.height))
            } else {
                let m = Mask::load_png(p)?;
                Ok(format!("info kind=mask width={} height={} masked_pixels={}", m.width, m.height, m.count()))
            }
        }
        _ => bail!("{}: unknown artifact type", p.display()),
    }
}
