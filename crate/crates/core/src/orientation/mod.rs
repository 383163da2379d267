//! Undirected 2D orientation maps.

mod gabor;
mod png;

pub use gabor::{gabor_orientation, GaborBank};
pub use png::{decode_orientation_png, decode_orientation_rgb, encode_confidence_png, encode_orientation_png, encode_orientation_rgb};

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::image2::Mask;

/// Per-pixel line direction in [0, π), measured from image +x with y pointing down.
#[derive(Debug, Clone, PartialEq)]
pub struct OrientationMap {
    pub width: usize,
    pub height: usize,
    pub angle: Vec<f32>,
    pub mask: Vec<bool>,
    pub confidence: Vec<f32>,
}

/// Reduces any angle to [0, π).
pub fn wrap_pi(theta: f64) -> f64 {
    let t = theta.rem_euclid(PI);
    if t >= PI {
        0.0
    } else {
        t
    }
}

/// Distance between two undirected angles, in [0, π/2].
pub fn undirected_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(PI);
    d.min(PI - d)
}

impl OrientationMap {
    pub fn empty(width: usize, height: usize) -> OrientationMap {
        OrientationMap {
            width,
            height,
            angle: vec![0.0; width * height],
            mask: vec![false; width * height],
            confidence: vec![0.0; width * height],
        }
    }

    /// Builds a map from raw angles, normalizing masked pixels into [0, π) and
    /// clearing everything outside the mask.
    pub fn from_parts(width: usize, height: usize, angle: Vec<f32>, mask: Vec<bool>, confidence: Vec<f32>) -> Result<OrientationMap> {
        let n = width * height;
        if angle.len() != n || mask.len() != n || confidence.len() != n {
            return Err(Error::SizeMismatch("orientation map channels".into()));
        }
        let mut o = OrientationMap {
            width,
            height,
            angle,
            mask,
            confidence,
        };
        for i in 0..n {
            if o.mask[i] {
                if !o.angle[i].is_finite() {
                    return Err(Error::NonFinite("orientation angle"));
                }
                o.angle[i] = (wrap_pi(o.angle[i] as f64) as f32).min(std::f32::consts::PI.next_down());
                o.confidence[i] = o.confidence[i].clamp(0.0, 1.0);
            } else {
                o.angle[i] = 0.0;
                o.confidence[i] = 0.0;
            }
        }
        Ok(o)
    }

    pub fn mask_image(&self) -> Mask {
        Mask {
            width: self.width,
            height: self.height,
            data: self.mask.clone(),
        }
    }

    pub fn with_mask(mut self, mask: &Mask) -> Result<OrientationMap> {
        if mask.width != self.width || mask.height != self.height {
            return Err(Error::SizeMismatch("orientation map vs mask".into()));
        }
        for i in 0..self.mask.len() {
            self.mask[i] = mask.data[i];
            if !self.mask[i] {
                self.angle[i] = 0.0;
                self.confidence[i] = 0.0;
            }
        }
        Ok(self)
    }
}

/// Which pixels enter the angular error.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MaskPolicy {
    /// Pixels where both maps are masked.
    #[default]
    Intersection,
    /// Pixels masked in the ground truth; predicted angles are read regardless of the predicted mask.
    GroundTruth,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AngularError {
    pub mean_deg: f64,
    pub pixels: usize,
}

/// Mean undirected angular error in degrees. Returns [`Error::NoOverlap`]
/// when no pixel qualifies under the policy.
pub fn mean_angular_error(pred: &OrientationMap, gt: &OrientationMap, policy: MaskPolicy) -> Result<AngularError> {
    if pred.width != gt.width || pred.height != gt.height {
        return Err(Error::SizeMismatch(format!(
            "orientation maps {}x{} vs {}x{}",
            pred.width, pred.height, gt.width, gt.height
        )));
    }
    let mut sum = 0.0f64;
    let mut n = 0usize;
    for i in 0..gt.angle.len() {
        let use_px = match policy {
            MaskPolicy::Intersection => pred.mask[i] && gt.mask[i],
            MaskPolicy::GroundTruth => gt.mask[i],
        };
        if use_px {
            sum += undirected_distance(pred.angle[i] as f64, gt.angle[i] as f64);
            n += 1;
        }
    }
    if n == 0 {
        return Err(Error::NoOverlap);
    }
    Ok(AngularError {
        mean_deg: (sum / n as f64).to_degrees(),
        pixels: n,
    })
}
