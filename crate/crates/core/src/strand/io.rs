//! Binary strand files.
//!
//! Native `.hair`: `"HAIR"`, u32 strand count, then per strand a u32 point
//! count and `count * 3` f32 coordinates. USC-HairSalon `.data`: i32 strand
//! count, then per strand an i32 vertex count and `count * 3` f32. Both are
//! little-endian.

use std::io::Write;
use std::path::Path;

use super::{HairModel, Strand};
use crate::error::{Error, Result};
use crate::geometry::Vec3;

pub const NATIVE_MAGIC: &[u8; 4] = b"HAIR";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StrandFormat {
    Native,
    Usc,
}

impl StrandFormat {
    /// Guess from the file extension; never from the file content.
    pub fn from_extension(path: &Path) -> Option<StrandFormat> {
        match path.extension()?.to_str()? {
            "hair" => Some(StrandFormat::Native),
            "data" => Some(StrandFormat::Usc),
            _ => None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct LoadReport {
    pub model: HairModel,
    /// Strands discarded because they were empty or collapsed below two
    /// points when consecutive duplicates were merged.
    pub dropped: usize,
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn remaining(&self) -> usize {
        self.buf.len() - self.pos
    }

    fn take(&mut self, n: usize, what: &'static str) -> Result<&'a [u8]> {
        if self.remaining() < n {
            return Err(Error::Truncated(what));
        }
        let s = &self.buf[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }

    fn u32(&mut self, what: &'static str) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4, what)?.try_into().unwrap()))
    }

    fn i32(&mut self, what: &'static str) -> Result<i32> {
        Ok(i32::from_le_bytes(self.take(4, what)?.try_into().unwrap()))
    }
}

pub fn parse_strands(buf: &[u8], format: StrandFormat) -> Result<LoadReport> {
    let mut r = Reader { buf, pos: 0 };
    let count = match format {
        StrandFormat::Native => {
            if r.take(4, "header")? != NATIVE_MAGIC {
                return Err(Error::BadMagic { expected: "HAIR" });
            }
            r.u32("header")? as u64
        }
        StrandFormat::Usc => {
            let c = r.i32("header")?;
            if c < 0 {
                return Err(Error::InvalidCount(format!("negative strand count {c}")));
            }
            c as u64
        }
    };
    // every strand needs at least its 4-byte point count
    if count.saturating_mul(4) > r.remaining() as u64 {
        return Err(Error::Truncated("strand table"));
    }
    let mut strands = Vec::with_capacity(count as usize);
    let mut dropped = 0usize;
    for _ in 0..count {
        let n = match format {
            StrandFormat::Native => r.u32("strand header")? as u64,
            StrandFormat::Usc => {
                let n = r.i32("strand header")?;
                if n < 0 {
                    return Err(Error::InvalidCount(format!("negative vertex count {n}")));
                }
                n as u64
            }
        };
        let bytes = n.checked_mul(12).filter(|&b| b <= r.remaining() as u64).ok_or(Error::Truncated("strand points"))?;
        let raw = r.take(bytes as usize, "strand points")?;
        let mut pts: Vec<Vec3> = raw
            .chunks_exact(12)
            .map(|c| {
                let f = |i: usize| f32::from_le_bytes(c[i * 4..i * 4 + 4].try_into().unwrap());
                Vec3::new(f(0), f(1), f(2))
            })
            .collect();
        if pts.iter().any(|p| !p.iter().all(|c| c.is_finite())) {
            return Err(Error::NonFinite("strand file"));
        }
        let before = pts.len();
        pts.dedup();
        if pts.is_empty() || (pts.len() < 2 && before >= 2) {
            dropped += 1;
            continue;
        }
        strands.push(Strand::new(pts)?);
    }
    Ok(LoadReport {
        model: HairModel::new(strands),
        dropped,
    })
}

pub fn load_strands(path: &Path, format: StrandFormat) -> Result<LoadReport> {
    let buf = std::fs::read(path).map_err(|e| Error::file(path, e))?;
    parse_strands(&buf, format)
}

pub fn encode_native(model: &HairModel) -> Vec<u8> {
    let mut out = Vec::with_capacity(8 + model.len() * 4 + model.point_count() * 12);
    out.extend_from_slice(NATIVE_MAGIC);
    out.extend_from_slice(&(model.len() as u32).to_le_bytes());
    for s in model.strands() {
        out.extend_from_slice(&(s.len() as u32).to_le_bytes());
        for p in s.points() {
            for c in p.iter() {
                out.extend_from_slice(&c.to_le_bytes());
            }
        }
    }
    out
}

pub fn encode_usc(model: &HairModel) -> Vec<u8> {
    let mut out = Vec::with_capacity(4 + model.len() * 4 + model.point_count() * 12);
    out.extend_from_slice(&(model.len() as i32).to_le_bytes());
    for s in model.strands() {
        out.extend_from_slice(&(s.len() as i32).to_le_bytes());
        for p in s.points() {
            for c in p.iter() {
                out.extend_from_slice(&c.to_le_bytes());
            }
        }
    }
    out
}

/// Writes the native format.
pub fn save_strands(model: &HairModel, path: &Path) -> Result<()> {
    let mut f = std::fs::File::create(path).map_err(|e| Error::file(path, e))?;
    f.write_all(&encode_native(model)).map_err(|e| Error::file(path, e))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn strand(pts: &[[f32; 3]]) -> Strand {
        Strand::new(pts.iter().map(|p| Vec3::from(*p)).collect()).unwrap()
    }

    #[test]
    fn empty_model_is_eight_bytes() {
        let bytes = encode_native(&HairModel::default());
        assert_eq!(bytes, b"HAIR\0\0\0\0");
        let r = parse_strands(&bytes, StrandFormat::Native).unwrap();
        assert!(r.model.is_empty());
        assert_eq!(r.dropped, 0);
    }

    #[test]
    fn one_strand_three_points_size() {
        let m = HairModel::new(vec![strand(&[[0.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 2.0, 0.0]])]);
        assert_eq!(encode_native(&m).len(), 8 + 4 + 36);
    }

    #[test]
    fn two_strands_round_trip_with_bounds() {
        let a: Vec<[f32; 3]> = (0..5).map(|i| [0.01 * i as f32, 0.1, -0.2]).collect();
        let b: Vec<[f32; 3]> = (0..5).map(|i| [-0.3, 0.02 * i as f32, 0.05 * i as f32]).collect();
        let m = HairModel::new(vec![strand(&a), strand(&b)]);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("two.hair");
        save_strands(&m, &path).unwrap();
        let back = load_strands(&path, StrandFormat::Native).unwrap();
        assert_eq!(back.model, m);
        let bb = back.model.bounds().unwrap();
        assert_eq!(bb.min, [-0.3, 0.0, -0.2]);
        assert_eq!(bb.max, [0.04, 0.1, 0.2]);
    }

    #[test]
    fn truncated_strand_table() {
        let m = HairModel::new(vec![strand(&[[0.0; 3], [1.0, 0.0, 0.0]]), strand(&[[0.0; 3], [0.0, 1.0, 0.0]])]);
        let mut bytes = encode_native(&m);
        bytes[4..8].copy_from_slice(&3u32.to_le_bytes());
        let err = parse_strands(&bytes, StrandFormat::Native).unwrap_err();
        assert!(err.to_string().contains("truncated"), "{err}");
        let short = &encode_native(&m)[..20];
        assert!(matches!(parse_strands(short, StrandFormat::Native), Err(Error::Truncated(_))));
    }

    #[test]
    fn bad_counts_and_nan_rejected() {
        let mut usc = Vec::new();
        usc.extend_from_slice(&(-1i32).to_le_bytes());
        assert!(matches!(parse_strands(&usc, StrandFormat::Usc), Err(Error::InvalidCount(_))));

        let mut huge = b"HAIR".to_vec();
        huge.extend_from_slice(&1u32.to_le_bytes());
        huge.extend_from_slice(&u32::MAX.to_le_bytes());
        assert!(matches!(parse_strands(&huge, StrandFormat::Native), Err(Error::Truncated(_))));

        let m = HairModel::new(vec![strand(&[[0.0; 3], [1.0, 0.0, 0.0]])]);
        let mut bytes = encode_native(&m);
        let n = bytes.len();
        bytes[n - 4..].copy_from_slice(&f32::NAN.to_le_bytes());
        assert!(matches!(parse_strands(&bytes, StrandFormat::Native), Err(Error::NonFinite(_))));
        assert!(matches!(parse_strands(b"HAI", StrandFormat::Native), Err(Error::Truncated(_))));
        assert!(matches!(parse_strands(b"NOPE\0\0\0\0", StrandFormat::Native), Err(Error::BadMagic { .. })));
    }

    #[test]
    fn duplicates_merged_and_collapsed_strands_dropped() {
        let mut bytes = b"HAIR".to_vec();
        bytes.extend_from_slice(&3u32.to_le_bytes());
        let mut push = |pts: &[[f32; 3]]| {
            bytes.extend_from_slice(&(pts.len() as u32).to_le_bytes());
            for p in pts {
                for c in p {
                    bytes.extend_from_slice(&c.to_le_bytes());
                }
            }
        };
        push(&[[0.0; 3], [0.0; 3], [1.0, 0.0, 0.0]]);
        push(&[[2.0; 3], [2.0; 3]]);
        push(&[]);
        let r = parse_strands(&bytes, StrandFormat::Native).unwrap();
        assert_eq!(r.model.len(), 1);
        assert_eq!(r.model.strands()[0].len(), 2);
        assert_eq!(r.dropped, 2);
    }

    #[test]
    fn usc_round_trip() {
        let m = HairModel::new(vec![strand(&[[0.0, 0.1, 0.2], [0.3, 0.4, 0.5]])]);
        let r = parse_strands(&encode_usc(&m), StrandFormat::Usc).unwrap();
        assert_eq!(r.model, m);
    }

    #[test]
    fn ten_thousand_strand_round_trip() {
        let strands: Vec<Strand> = (0..10_000)
            .map(|i| {
                let x = i as f32 * 1e-5;
                strand(&[[x, 0.0, 0.0], [x, -0.01, 0.001], [x, -0.02, 0.003]])
            })
            .collect();
        let m = HairModel::new(strands);
        let bytes = encode_native(&m);
        let back = parse_strands(&bytes, StrandFormat::Native).unwrap().model;
        assert_eq!(encode_native(&back), bytes);
    }

    proptest! {
        #[test]
        fn native_round_trip_is_bit_exact(
            raw in prop::collection::vec(
                prop::collection::vec((-1.0f32..1.0, -1.0f32..1.0, -1.0f32..1.0), 1..12), 0..20)
        ) {
            let strands: Vec<Strand> = raw
                .into_iter()
                .filter_map(|v| Strand::from_points_dedup(v.into_iter().map(|(x, y, z)| Vec3::new(x, y, z)).collect()).ok())
                .collect();
            let m = HairModel::new(strands);
            let back = parse_strands(&encode_native(&m), StrandFormat::Native).unwrap();
            prop_assert_eq!(back.dropped, 0);
            prop_assert_eq!(back.model, m);
        }
    }
}
