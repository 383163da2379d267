//! Classical orientation estimation with a bank of oriented Gabor filters.

use rayon::prelude::*;

use super::OrientationMap;
use crate::error::{Error, Result};
use crate::image2::{GrayImage, Mask};

/// Responses within this relative distance of the maximum count as a tie.
const TIE_REL: f64 = 1e-9;
const CONF_EPS: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaborBank {
    pub n_orientations: usize,
    pub wavelength: f64,
    pub sigma: f64,
    pub aspect_ratio: f64,
    pub kernel_radius: usize,
}

impl Default for GaborBank {
    fn default() -> Self {
        GaborBank {
            n_orientations: 32,
            wavelength: 4.0,
            sigma: 2.0,
            aspect_ratio: 0.5,
            kernel_radius: 8,
        }
    }
}

impl GaborBank {
    pub fn validate(&self) -> Result<()> {
        if self.n_orientations == 0 {
            return Err(Error::InvalidParam("Gabor bank has zero filters".into()));
        }
        if self.n_orientations < 4 {
            return Err(Error::InvalidParam("Gabor bank needs at least 4 orientations".into()));
        }
        if !(self.wavelength > 0.0 && self.sigma > 0.0 && self.aspect_ratio > 0.0) {
            return Err(Error::InvalidParam("Gabor wavelength, sigma and aspect must be > 0".into()));
        }
        Ok(())
    }

    pub fn angle(&self, k: usize) -> f64 {
        k as f64 * std::f64::consts::PI / self.n_orientations as f64
    }

    /// Quadrature kernel pair for the line direction of filter `k`: the carrier
    /// runs across the line, the envelope is elongated along it. The even
    /// part is made zero-mean over its support.
    fn kernel(&self, k: usize) -> (Vec<f64>, Vec<f64>) {
        let r = self.kernel_radius as isize;
        let (s, c) = self.angle(k).sin_cos();
        let mut even = Vec::new();
        let mut odd = Vec::new();
        for dy in -r..=r {
            for dx in -r..=r {
                let (x, y) = (dx as f64, dy as f64);
                let across = -x * s + y * c;
                let along = x * c + y * s;
                let env = (-(across * across + self.aspect_ratio.powi(2) * along * along) / (2.0 * self.sigma * self.sigma)).exp();
                let ph = 2.0 * std::f64::consts::PI * across / self.wavelength;
                even.push(env * ph.cos());
                odd.push(env * ph.sin());
            }
        }
        let mean = even.iter().sum::<f64>() / even.len() as f64;
        even.iter_mut().for_each(|v| *v -= mean);
        (even, odd)
    }
}

#[inline]
fn reflect(i: isize, n: usize) -> usize {
    let n = n as isize;
    if n == 1 {
        return 0;
    }
    let period = 2 * (n - 1);
    let mut m = i.rem_euclid(period);
    if m >= n {
        m = period - m;
    }
    m as usize
}

/// Per-pixel orientation of the strongest filter response inside `mask`.
pub fn gabor_orientation(image: &GrayImage, mask: &Mask, bank: &GaborBank) -> Result<OrientationMap> {
    bank.validate()?;
    image.check_same_size(mask, "gabor image vs mask")?;
    let (w, h) = (image.width, image.height);
    let kernels: Vec<(Vec<f64>, Vec<f64>)> = (0..bank.n_orientations).map(|k| bank.kernel(k)).collect();
    let r = bank.kernel_radius as isize;
    let side = (2 * r + 1) as usize;

    let rows: Vec<(Vec<f32>, Vec<f32>)> = (0..h)
        .into_par_iter()
        .map(|y| {
            let mut angle = vec![0.0f32; w];
            let mut conf = vec![0.0f32; w];
            let mut patch = vec![0.0f64; side * side];
            let mut resp = vec![0.0f64; bank.n_orientations];
            for x in 0..w {
                if !mask.data[y * w + x] {
                    continue;
                }
                for dy in -r..=r {
                    let sy = reflect(y as isize + dy, h);
                    for dx in -r..=r {
                        let sx = reflect(x as isize + dx, w);
                        patch[((dy + r) as usize) * side + (dx + r) as usize] = image.data[sy * w + sx] as f64;
                    }
                }
                for (k, (even, odd)) in kernels.iter().enumerate() {
                    let (mut re, mut im) = (0.0f64, 0.0f64);
                    for ((p, e), o) in patch.iter().zip(even).zip(odd) {
                        re += p * e;
                        im += p * o;
                    }
                    resp[k] = (re * re + im * im).sqrt();
                }
                let max = resp.iter().cloned().fold(0.0f64, f64::max);
                let best = resp.iter().position(|&v| v >= max * (1.0 - TIE_REL)).unwrap_or(0);
                let mean = resp.iter().sum::<f64>() / resp.len() as f64;
                angle[x] = bank.angle(best) as f32;
                conf[x] = ((max - mean) / (max + CONF_EPS)).clamp(0.0, 1.0) as f32;
            }
            (angle, conf)
        })
        .collect();

    let mut angle = Vec::with_capacity(w * h);
    let mut confidence = Vec::with_capacity(w * h);
    for (a, c) in rows {
        angle.extend(a);
        confidence.extend(c);
    }
    OrientationMap::from_parts(w, h, angle, mask.data.clone(), confidence)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::orientation::{mean_angular_error, undirected_distance, MaskPolicy};

    /// Sinusoidal stripes whose lines run along `theta` (image coordinates, y down).
    pub(crate) fn grating(n: usize, theta: f64, period: f64) -> GrayImage {
        let (s, c) = theta.sin_cos();
        let data = (0..n * n)
            .map(|i| {
                let (x, y) = ((i % n) as f64, (i / n) as f64);
                let across = -x * s + y * c;
                (0.5 + 0.5 * (2.0 * std::f64::consts::PI * across / period).cos()) as f32
            })
            .collect();
        GrayImage::from_vec(n, n, data).unwrap()
    }

    fn interior(n: usize, border: usize) -> impl Iterator<Item = usize> {
        (0..n * n).filter(move |i| {
            let (x, y) = (i % n, i / n);
            x >= border && y >= border && x < n - border && y < n - border
        })
    }

    #[test]
    fn reflect_indices() {
        assert_eq!(reflect(-1, 5), 1);
        assert_eq!(reflect(5, 5), 3);
        assert_eq!(reflect(-9, 5), 1);
        assert_eq!(reflect(3, 1), 0);
    }

    #[test]
    fn forty_five_degree_grating() {
        let n = 64;
        let img = grating(n, 45f64.to_radians(), 4.0);
        let o = gabor_orientation(&img, &Mask::filled(n, n, true), &GaborBank::default()).unwrap();
        let tol = (180.0f64 / 32.0).to_radians();
        let pixels: Vec<usize> = interior(n, 8).collect();
        let good = pixels
            .iter()
            .filter(|&&i| undirected_distance(o.angle[i] as f64, 45f64.to_radians()) <= tol)
            .count();
        assert!(good as f64 >= 0.99 * pixels.len() as f64, "{good}/{}", pixels.len());
    }

    #[test]
    fn flat_image_has_no_confidence() {
        let img = GrayImage::filled(24, 24, 0.6);
        let o = gabor_orientation(&img, &Mask::filled(24, 24, true), &GaborBank::default()).unwrap();
        assert!(o.confidence.iter().all(|&c| c < 1e-3), "{:?}", o.confidence.iter().cloned().fold(0.0f32, f32::max));
    }

    #[test]
    fn rotation_by_one_step_shifts_argmax() {
        let bank = GaborBank::default();
        let n = 48;
        let mask = Mask::filled(n, n, true);
        for k in [3usize, 10, 21] {
            let a = gabor_orientation(&grating(n, bank.angle(k), 4.0), &mask, &bank).unwrap();
            let b = gabor_orientation(&grating(n, bank.angle(k + 1), 4.0), &mask, &bank).unwrap();
            for i in interior(n, 8) {
                let ka = (a.angle[i] as f64 / bank.angle(1)).round() as usize;
                let kb = (b.angle[i] as f64 / bank.angle(1)).round() as usize;
                assert_eq!((ka, kb), (k, k + 1));
            }
        }
    }

    #[test]
    fn masked_out_pixels_stay_empty() {
        let n = 20;
        let mut mask = Mask::filled(n, n, false);
        mask.set(10, 10, true);
        let o = gabor_orientation(&grating(n, 0.4, 4.0), &mask, &GaborBank::default()).unwrap();
        assert_eq!(o.mask.iter().filter(|&&m| m).count(), 1);
        assert_eq!(o.confidence[0], 0.0);
    }

    #[test]
    fn errors() {
        let img = GrayImage::filled(8, 8, 0.0);
        assert!(matches!(gabor_orientation(&img, &Mask::filled(8, 9, true), &GaborBank::default()), Err(Error::SizeMismatch(_))));
        let none = GaborBank { n_orientations: 0, ..Default::default() };
        assert!(gabor_orientation(&img, &Mask::filled(8, 8, true), &none).is_err());
    }

    #[test]
    fn affine_intensity_keeps_argmax() {
        let n = 40;
        let mask = Mask::filled(n, n, true);
        let img = grating(n, 1.1, 4.0);
        let mut scaled = img.clone();
        scaled.data.iter_mut().for_each(|v| *v = 3.7 * *v + 0.25);
        let a = gabor_orientation(&img, &mask, &GaborBank::default()).unwrap();
        let b = gabor_orientation(&scaled, &mask, &GaborBank::default()).unwrap();
        assert_eq!(a.angle, b.angle);
        assert!(mean_angular_error(&a, &b, MaskPolicy::Intersection).unwrap().mean_deg == 0.0);
    }
}
