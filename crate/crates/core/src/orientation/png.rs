//! Doubled-angle RGB encoding of orientation maps.
//!
//! R = round((cos 2θ + 1) / 2 · 255), G = round((sin 2θ + 1) / 2 · 255),
//! B = 255 inside the mask; all channels are 0 outside.

use std::path::Path;

use super::OrientationMap;
use crate::error::{Error, Result};

fn quantize(v: f64) -> u8 {
    // angles are f32; residue below their precision would flip ties at 127.5
    let v = if v.abs() < 1e-6 { 0.0 } else { v };
    ((v + 1.0) * 0.5 * 255.0).round().clamp(0.0, 255.0) as u8
}

fn dequantize(q: u8) -> f64 {
    q as f64 / 255.0 * 2.0 - 1.0
}

pub fn encode_orientation_rgb(o: &OrientationMap) -> Vec<u8> {
    let mut out = vec![0u8; o.width * o.height * 3];
    for i in 0..o.angle.len() {
        if o.mask[i] {
            let (s, c) = (2.0 * o.angle[i] as f64).sin_cos();
            out[3 * i] = quantize(c);
            out[3 * i + 1] = quantize(s);
            out[3 * i + 2] = 255;
        }
    }
    out
}

pub fn decode_orientation_rgb(width: usize, height: usize, rgb: &[u8]) -> Result<OrientationMap> {
    if rgb.len() != width * height * 3 {
        return Err(Error::SizeMismatch("orientation rgb buffer".into()));
    }
    let mut angle = vec![0.0f32; width * height];
    let mut mask = vec![false; width * height];
    for i in 0..width * height {
        if rgb[3 * i + 2] >= 128 {
            mask[i] = true;
            let two = dequantize(rgb[3 * i + 1]).atan2(dequantize(rgb[3 * i]));
            angle[i] = super::wrap_pi(0.5 * two) as f32;
        }
    }
    let confidence = mask.iter().map(|&m| if m { 1.0 } else { 0.0 }).collect();
    OrientationMap::from_parts(width, height, angle, mask, confidence)
}

pub fn encode_orientation_png(o: &OrientationMap, path: &Path) -> Result<()> {
    let img = image::RgbImage::from_raw(o.width as u32, o.height as u32, encode_orientation_rgb(o))
        .ok_or_else(|| Error::Image("orientation buffer size".into()))?;
    img.save_with_format(path, image::ImageFormat::Png)
        .map_err(|e| Error::Image(format!("{}: {e}", path.display())))
}

/// Decodes an 8-bit RGB orientation PNG. The decoded confidence is 1 inside the mask.
pub fn decode_orientation_png(path: &Path) -> Result<OrientationMap> {
    let img = image::open(path).map_err(|e| Error::Image(format!("{}: {e}", path.display())))?;
    let rgb = match img {
        image::DynamicImage::ImageRgb8(rgb) => rgb,
        other => {
            return Err(Error::Image(format!(
                "{}: orientation map must be 8-bit RGB, got {:?}",
                path.display(),
                other.color()
            )))
        }
    };
    let (w, h) = rgb.dimensions();
    decode_orientation_rgb(w as usize, h as usize, rgb.as_raw())
}

/// Writes confidence as an 8-bit grayscale PNG.
pub fn encode_confidence_png(o: &OrientationMap, path: &Path) -> Result<()> {
    let raw = o.confidence.iter().map(|c| (c.clamp(0.0, 1.0) * 255.0).round() as u8).collect();
    let img = image::GrayImage::from_raw(o.width as u32, o.height as u32, raw)
        .ok_or_else(|| Error::Image("confidence buffer size".into()))?;
    img.save_with_format(path, image::ImageFormat::Png)
        .map_err(|e| Error::Image(format!("{}: {e}", path.display())))
}
