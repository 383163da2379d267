//! Dense row-major 2D grids used for masks, depth maps and grayscale images.

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Image2<T> {
    pub width: usize,
    pub height: usize,
    pub data: Vec<T>,
}

pub type Mask = Image2<bool>;
pub type GrayImage = Image2<f32>;
/// Camera-space depth in meters; 0 encodes "no hair".
pub type DepthMap = Image2<f32>;

impl<T: Clone> Image2<T> {
    pub fn filled(width: usize, height: usize, value: T) -> Self {
        Self {
            width,
            height,
            data: vec![value; width * height],
        }
    }
}

impl<T> Image2<T> {
    pub fn from_vec(width: usize, height: usize, data: Vec<T>) -> Result<Self> {
        if data.len() != width * height {
            return Err(Error::SizeMismatch(format!(
                "{} values for a {width}x{height} image",
                data.len()
            )));
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }

    #[inline]
    pub fn idx(&self, x: usize, y: usize) -> usize {
        y * self.width + x
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> &T {
        &self.data[y * self.width + x]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, v: T) {
        let i = self.idx(x, y);
        self.data[i] = v;
    }

    pub fn same_size<U>(&self, other: &Image2<U>) -> bool {
        self.width == other.width && self.height == other.height
    }

    pub fn check_same_size<U>(&self, other: &Image2<U>, what: &str) -> Result<()> {
        if self.same_size(other) {
            Ok(())
        } else {
            Err(Error::SizeMismatch(format!(
                "{what}: {}x{} vs {}x{}",
                self.width, self.height, other.width, other.height
            )))
        }
    }
}

impl Mask {
    pub fn count(&self) -> usize {
        self.data.iter().filter(|&&m| m).count()
    }

    pub fn and(&self, other: &Mask) -> Result<Mask> {
        self.check_same_size(other, "mask and")?;
        Ok(Mask {
            width: self.width,
            height: self.height,
            data: self.data.iter().zip(&other.data).map(|(a, b)| *a && *b).collect(),
        })
    }

    pub fn and_not(&self, other: &Mask) -> Result<Mask> {
        self.check_same_size(other, "mask and-not")?;
        Ok(Mask {
            width: self.width,
            height: self.height,
            data: self.data.iter().zip(&other.data).map(|(a, b)| *a && !*b).collect(),
        })
    }

    /// Binary dilation with a Euclidean disk of the given pixel radius.
    pub fn dilate(&self, radius: usize) -> Mask {
        if radius == 0 {
            return self.clone();
        }
        let r = radius as isize;
        let offsets: Vec<(isize, isize)> = (-r..=r)
            .flat_map(|dy| (-r..=r).map(move |dx| (dx, dy)))
            .filter(|(dx, dy)| dx * dx + dy * dy <= r * r)
            .collect();
        let (w, h) = (self.width as isize, self.height as isize);
        let mut out = Mask::filled(self.width, self.height, false);
        for y in 0..h {
            for x in 0..w {
                if !self.data[(y * w + x) as usize] {
                    continue;
                }
                for (dx, dy) in &offsets {
                    let (nx, ny) = (x + dx, y + dy);
                    if nx >= 0 && ny >= 0 && nx < w && ny < h {
                        out.data[(ny * w + nx) as usize] = true;
                    }
                }
            }
        }
        out
    }

    pub fn load_png(path: &std::path::Path) -> Result<Mask> {
        let img = image::open(path).map_err(|e| Error::Image(format!("{}: {e}", path.display())))?;
        let gray = match img {
            image::DynamicImage::ImageLuma8(g) => g,
            other => {
                return Err(Error::Image(format!(
                    "{}: mask must be 8-bit grayscale, got {:?}",
                    path.display(),
                    other.color()
                )))
            }
        };
        let (w, h) = gray.dimensions();
        Ok(Mask {
            width: w as usize,
            height: h as usize,
            data: gray.into_raw().into_iter().map(|v| v >= 128).collect(),
        })
    }

    pub fn save_png(&self, path: &std::path::Path) -> Result<()> {
        let raw: Vec<u8> = self.data.iter().map(|&m| if m { 255 } else { 0 }).collect();
        let img = image::GrayImage::from_raw(self.width as u32, self.height as u32, raw)
            .ok_or_else(|| Error::Image("mask buffer size".into()))?;
        img.save_with_format(path, image::ImageFormat::Png)
            .map_err(|e| Error::Image(format!("{}: {e}", path.display())))
    }
}

impl GrayImage {
    /// Loads an 8-bit grayscale PNG scaled to [0, 1].
    pub fn load_png(path: &std::path::Path) -> Result<GrayImage> {
        let img = image::open(path).map_err(|e| Error::Image(format!("{}: {e}", path.display())))?;
        let gray = img.to_luma8();
        let (w, h) = gray.dimensions();
        Ok(GrayImage {
            width: w as usize,
            height: h as usize,
            data: gray.into_raw().into_iter().map(|v| v as f32 / 255.0).collect(),
        })
    }
}
