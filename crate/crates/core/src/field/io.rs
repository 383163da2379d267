//! `.hfld` files: `"HFLD"`, u32 nx, ny, nz, 6 × f32 box (min xyz, max xyz),
//! then nx·ny·nz × 3 × f32 with x fastest. Little-endian.

use std::path::Path;

use super::HybridField;
use crate::error::{Error, Result};
use crate::geometry::{Aabb, Vec3};

pub const FIELD_MAGIC: &[u8; 4] = b"HFLD";
const HEADER_LEN: usize = 4 + 12 + 24;

pub fn encode_field(f: &HybridField) -> Vec<u8> {
    let mut out = Vec::with_capacity(HEADER_LEN + f.voxel_count() * 12);
    out.extend_from_slice(FIELD_MAGIC);
    for d in f.dims() {
        out.extend_from_slice(&(d as u32).to_le_bytes());
    }
    let b = f.aabb();
    for v in b.min.iter().chain(&b.max) {
        out.extend_from_slice(&v.to_le_bytes());
    }
    for v in f.vectors() {
        for c in v.iter() {
            out.extend_from_slice(&c.to_le_bytes());
        }
    }
    out
}

pub fn decode_field(buf: &[u8]) -> Result<HybridField> {
    if buf.len() < 4 {
        return Err(Error::Truncated("field header"));
    }
    if &buf[..4] != FIELD_MAGIC {
        return Err(Error::BadMagic { expected: "HFLD" });
    }
    if buf.len() < HEADER_LEN {
        return Err(Error::Truncated("field header"));
    }
    let u32_at = |o: usize| u32::from_le_bytes(buf[o..o + 4].try_into().unwrap());
    let f32_at = |o: usize| f32::from_le_bytes(buf[o..o + 4].try_into().unwrap());
    let dims = [u32_at(4) as usize, u32_at(8) as usize, u32_at(12) as usize];
    let aabb = Aabb {
        min: [f32_at(16), f32_at(20), f32_at(24)],
        max: [f32_at(28), f32_at(32), f32_at(36)],
    };
    if aabb.min.iter().chain(&aabb.max).any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("field box"));
    }
    let n = dims
        .iter()
        .try_fold(1usize, |acc, &d| acc.checked_mul(d))
        .ok_or_else(|| Error::InvalidCount(format!("field dimensions {dims:?} overflow")))?;
    let body = n.checked_mul(12).ok_or_else(|| Error::InvalidCount(format!("field dimensions {dims:?} overflow")))?;
    if buf.len() - HEADER_LEN < body {
        return Err(Error::Truncated("field body"));
    }
    let vectors: Vec<Vec3> = buf[HEADER_LEN..HEADER_LEN + body]
        .chunks_exact(12)
        .map(|c| {
            let g = |i: usize| f32::from_le_bytes(c[i * 4..i * 4 + 4].try_into().unwrap());
            Vec3::new(g(0), g(1), g(2))
        })
        .collect();
    if vectors.iter().any(|v| !v.iter().all(|c| c.is_finite())) {
        return Err(Error::NonFinite("field vectors"));
    }
    HybridField::new(dims, aabb, vectors)
}

pub fn save_field(f: &HybridField, path: &Path) -> Result<()> {
    std::fs::write(path, encode_field(f)).map_err(|e| Error::file(path, e))
}

pub fn load_field(path: &Path) -> Result<HybridField> {
    let buf = std::fs::read(path).map_err(|e| Error::file(path, e))?;
    decode_field(&buf)
}
