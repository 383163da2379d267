//! Grayscale PFM depth maps: `"Pf\n{w} {h}\n-1.0\n"`, then little-endian f32
//! rows from the bottom of the image up. Meters; 0 means no hair.

use std::path::Path;

use crate::error::{Error, Result};
use crate::image2::DepthMap;

pub fn encode_pfm(d: &DepthMap) -> Vec<u8> {
    let mut out = format!("Pf\n{} {}\n-1.0\n", d.width, d.height).into_bytes();
    out.reserve(d.data.len() * 4);
    for y in (0..d.height).rev() {
        for v in &d.data[y * d.width..(y + 1) * d.width] {
            out.extend_from_slice(&v.to_le_bytes());
        }
    }
    out
}

/// Reads the three whitespace-separated header tokens and returns them with
/// the offset of the first data byte.
fn header(buf: &[u8]) -> Result<([String; 4], usize)> {
    let mut tokens: Vec<String> = Vec::with_capacity(4);
    let mut i = 0;
    while tokens.len() < 4 {
        while i < buf.len() && buf[i].is_ascii_whitespace() {
            i += 1;
        }
        let start = i;
        while i < buf.len() && !buf[i].is_ascii_whitespace() {
            i += 1;
        }
        if start == i || i >= buf.len() {
            return Err(Error::Truncated("pfm header"));
        }
        tokens.push(String::from_utf8_lossy(&buf[start..i]).into_owned());
    }
    // exactly one whitespace byte separates the scale from the data
    Ok((tokens.try_into().unwrap(), i + 1))
}

pub fn decode_pfm(buf: &[u8]) -> Result<DepthMap> {
    if buf.len() < 2 {
        return Err(Error::Truncated("pfm header"));
    }
    if &buf[..2] != b"Pf" {
        return Err(Error::BadMagic { expected: "Pf" });
    }
    let ([magic, w, h, scale], off) = header(buf)?;
    if magic != "Pf" {
        return Err(Error::BadMagic { expected: "Pf" });
    }
    let parse = |s: &str| s.parse::<usize>().map_err(|_| Error::Schema(format!("bad pfm dimension {s:?}")));
    let (width, height) = (parse(&w)?, parse(&h)?);
    let scale: f64 = scale.parse().map_err(|_| Error::Schema(format!("bad pfm scale {scale:?}")))?;
    if scale == 0.0 || !scale.is_finite() {
        return Err(Error::Schema("pfm scale must be non-zero".into()));
    }
    let little = scale < 0.0;
    let n = width
        .checked_mul(height)
        .and_then(|n| n.checked_mul(4))
        .ok_or_else(|| Error::InvalidCount(format!("pfm size {width}x{height} overflows")))?;
    if buf.len() < off || buf.len() - off < n {
        return Err(Error::Truncated("pfm body"));
    }
    let mut data = vec![0.0f32; width * height];
    for (r, row) in buf[off..off + n].chunks_exact(4 * width.max(1)).enumerate().take(height) {
        let y = height - 1 - r;
        for (x, c) in row.chunks_exact(4).enumerate() {
            let b: [u8; 4] = c.try_into().unwrap();
            data[y * width + x] = if little { f32::from_le_bytes(b) } else { f32::from_be_bytes(b) };
        }
    }
    DepthMap::from_vec(width, height, data)
}

pub fn save_pfm(d: &DepthMap, path: &Path) -> Result<()> {
    std::fs::write(path, encode_pfm(d)).map_err(|e| Error::file(path, e))
}

pub fn load_pfm(path: &Path) -> Result<DepthMap> {
    let buf = std::fs::read(path).map_err(|e| Error::file(path, e))?;
    decode_pfm(&buf)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn layout_is_bottom_up() {
        let d = DepthMap::from_vec(2, 2, vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        let b = encode_pfm(&d);
        let hdr = b"Pf\n2 2\n-1.0\n";
        assert_eq!(&b[..hdr.len()], hdr);
        let first = f32::from_le_bytes(b[hdr.len()..hdr.len() + 4].try_into().unwrap());
        assert_eq!(first, 3.0);
        assert_eq!(decode_pfm(&b).unwrap(), d);
    }

    #[test]
    fn file_round_trip_bit_exact() {
        let data: Vec<f32> = (0..37 * 23).map(|i| if i % 5 == 0 { 0.0 } else { 0.4 + i as f32 * 1e-5 }).collect();
        let d = DepthMap::from_vec(37, 23, data).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("d.pfm");
        save_pfm(&d, &p).unwrap();
        let back = load_pfm(&p).unwrap();
        assert!(d.data.iter().zip(&back.data).all(|(a, b)| a.to_bits() == b.to_bits()));
        assert_eq!((back.width, back.height), (37, 23));
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(decode_pfm(b"PF\n1 1\n-1.0\n\0\0\0\0\0\0\0\0\0\0\0\0"), Err(Error::BadMagic { .. })));
        assert!(decode_pfm(b"Pf\n4 4\n-1.0\n\0\0\0\0").unwrap_err().to_string().contains("truncated"));
        assert!(decode_pfm(b"Pf\nx 4\n-1.0\n").is_err());
        let big_endian = {
            let mut b = b"Pf\n1 1\n1.0\n".to_vec();
            b.extend_from_slice(&2.5f32.to_be_bytes());
            b
        };
        assert_eq!(decode_pfm(&big_endian).unwrap().data, vec![2.5]);
    }
}
