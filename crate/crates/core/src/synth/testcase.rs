//! Writing and reading oracle test-case directories.

use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{generate_style, StyleSpec};
use crate::camera::{load_cameras, make_orbit, save_cameras, CameraView, Intrinsics, OrbitSpec};
use crate::depth::{load_pfm, save_pfm};
use crate::error::{Error, Result};
use crate::field::{bake_field, load_field, save_field, GridSpec, HybridField};
use crate::image2::Mask;
use crate::metrics::{render_strand_view, GtView};
use crate::orientation::{decode_orientation_png, encode_orientation_png};
use crate::strand::{load_strands, save_strands, HairModel, Scalp, StrandFormat};

pub const TESTCASE_FORMAT: &str = "strandfield-testcase/1";

/// How the field grid is chosen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GridPlan {
    /// Cubic resolution over the padded strand bounds.
    Around(usize),
    Fixed(GridSpec),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub path: String,
    pub sha256: String,
    pub bytes: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub format: String,
    pub style: StyleSpec,
    pub orbit: OrbitSpec,
    pub intrinsics: Intrinsics,
    pub grid: GridSpec,
    pub strands: usize,
    pub views: usize,
    pub files: Vec<ManifestEntry>,
}

#[derive(Debug, Clone)]
pub struct Testcase {
    pub manifest: Manifest,
    pub model: HairModel,
    pub cameras: Vec<CameraView>,
    pub views: Vec<GtView>,
    pub field: HybridField,
}

fn sha256_file(path: &Path) -> Result<(String, u64)> {
    let bytes = std::fs::read(path).map_err(|e| Error::file(path, e))?;
    Ok((hex::encode(Sha256::digest(&bytes)), bytes.len() as u64))
}

pub fn view_stem(k: usize) -> String {
    format!("views/view_{k:03}")
}

/// Generates the style, renders every orbit view and bakes the field, then
/// writes `strands.hair`, `cameras.json`, `views/view_%03d.{orient.png,
/// mask.png, depth.pfm}`, `field.hfld` and a `manifest.json` with sha256
/// checksums of everything else.
pub fn make_testcase(spec: &StyleSpec, orbit: &OrbitSpec, intr: Intrinsics, grid: GridPlan, out_dir: &Path) -> Result<Manifest> {
    let model = generate_style(spec, &Scalp::canonical())?;
    let cams = make_orbit(orbit, intr)?;
    let grid = match grid {
        GridPlan::Around(res) => GridSpec::around(&model, res)?,
        GridPlan::Fixed(g) => g,
    };
    let field = bake_field(&model, &grid)?;

    std::fs::create_dir_all(out_dir.join("views")).map_err(|e| Error::file(out_dir, e))?;
    let mut rel: Vec<String> = vec!["strands.hair".into(), "cameras.json".into()];
    save_strands(&model, &out_dir.join("strands.hair"))?;
    save_cameras(&cams, &out_dir.join("cameras.json"))?;
    cams.par_iter()
        .enumerate()
        .map(|(k, cam)| {
            let r = render_strand_view(&model, cam);
            let stem = out_dir.join(view_stem(k));
            encode_orientation_png(&r.orientation, &stem.with_extension("orient.png"))?;
            r.mask.save_png(&stem.with_extension("mask.png"))?;
            save_pfm(&r.depth, &stem.with_extension("depth.pfm"))
        })
        .collect::<Result<()>>()?;
    for k in 0..cams.len() {
        for ext in ["orient.png", "mask.png", "depth.pfm"] {
            rel.push(format!("{}.{ext}", view_stem(k)));
        }
    }
    save_field(&field, &out_dir.join("field.hfld"))?;
    rel.push("field.hfld".into());

    let files = rel
        .iter()
        .map(|p| {
            let (sha256, bytes) = sha256_file(&out_dir.join(p))?;
            Ok(ManifestEntry { path: p.clone(), sha256, bytes })
        })
        .collect::<Result<Vec<_>>>()?;
    let manifest = Manifest {
        format: TESTCASE_FORMAT.into(),
        style: *spec,
        orbit: *orbit,
        intrinsics: intr,
        grid,
        strands: model.len(),
        views: cams.len(),
        files,
    };
    let text = serde_json::to_string_pretty(&manifest).map_err(|e| Error::Schema(e.to_string()))?;
    let mpath = out_dir.join("manifest.json");
    std::fs::write(&mpath, text + "\n").map_err(|e| Error::file(&mpath, e))?;
    Ok(manifest)
}

/// Reads a test-case directory; with `verify`, every checksum is checked.
pub fn load_testcase(dir: &Path, verify: bool) -> Result<Testcase> {
    let mpath = dir.join("manifest.json");
    let text = std::fs::read_to_string(&mpath).map_err(|e| Error::file(&mpath, e))?;
    let manifest: Manifest = serde_json::from_str(&text).map_err(|e| Error::Schema(format!("{}: {e}", mpath.display())))?;
    if manifest.format != TESTCASE_FORMAT {
        return Err(Error::Schema(format!("unsupported test-case format {:?}", manifest.format)));
    }
    if verify {
        for f in &manifest.files {
            let (sha, _) = sha256_file(&dir.join(&f.path))?;
            if sha != f.sha256 {
                return Err(Error::Schema(format!("checksum mismatch for {}", f.path)));
            }
        }
    }
    let model = load_strands(&dir.join("strands.hair"), StrandFormat::Native)?.model;
    let cameras = load_cameras(&dir.join("cameras.json"))?;
    if cameras.len() != manifest.views {
        return Err(Error::Schema(format!("manifest lists {} views, camera file has {}", manifest.views, cameras.len())));
    }
    let views = (0..cameras.len())
        .into_par_iter()
        .map(|k| {
            let stem = dir.join(view_stem(k));
            Ok(GtView {
                orientation: decode_orientation_png(&stem.with_extension("orient.png"))?,
                mask: Mask::load_png(&stem.with_extension("mask.png"))?,
                depth: load_pfm(&stem.with_extension("depth.pfm"))?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let field = load_field(&dir.join("field.hfld"))?;
    Ok(Testcase {
        manifest,
        model,
        cameras,
        views,
        field,
    })
}
