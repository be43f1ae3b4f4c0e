//! SEMLAT1 container: the on-disk interchange format for latent vectors and
//! embedding batches.
//!
//! Layout: magic bytes `"SEMLAT1\0"` (8 bytes), `u32` little-endian count,
//! `u32` little-endian dim, then `count * dim` `f32` little-endian values in
//! row-major order. Parse errors name the offending byte offset.

use std::path::Path;

use crate::error::{Error, Result};

pub const SEMLAT_MAGIC: [u8; 8] = *b"SEMLAT1\0";

const HEADER_LEN: usize = 16;

/// A batch of equal-length real vectors read from a SEMLAT1 container.
#[derive(Debug, Clone, PartialEq)]
pub struct LatentBatch {
    pub dim: usize,
    pub vectors: Vec<Vec<f64>>,
}

impl LatentBatch {
    pub fn count(&self) -> usize {
        self.vectors.len()
    }
}

/// Parse a SEMLAT1 byte stream.
pub fn read_semlat(bytes: &[u8]) -> Result<LatentBatch> {
    if bytes.len() < 8 {
        return Err(Error::Format {
            offset: bytes.len() as u64,
            what: format!("magic truncated: need 8 bytes, have {}", bytes.len()),
        });
    }
    if bytes[..8] != SEMLAT_MAGIC {
        return Err(Error::Format {
            offset: 0,
            what: format!("bad magic {:02x?}, expected \"SEMLAT1\\0\"", &bytes[..8]),
        });
    }
    if bytes.len() < HEADER_LEN {
        return Err(Error::Format {
            offset: bytes.len() as u64,
            what: "header truncated: count/dim fields missing".into(),
        });
    }
    let count = u32::from_le_bytes(bytes[8..12].try_into().unwrap()) as u64;
    let dim = u32::from_le_bytes(bytes[12..16].try_into().unwrap()) as u64;
    if count > 0 && dim == 0 {
        return Err(Error::Format {
            offset: 12,
            what: format!("dim is 0 but count is {count}"),
        });
    }
    let expected = count
        .checked_mul(dim)
        .and_then(|n| n.checked_mul(4))
        .ok_or_else(|| Error::Format { offset: 8, what: "count*dim overflows".into() })?;
    let have = (bytes.len() - HEADER_LEN) as u64;
    if have < expected {
        return Err(Error::Format {
            offset: bytes.len() as u64,
            what: format!(
                "payload truncated: expected {expected} bytes of f32 data, have {have}"
            ),
        });
    }
    if have > expected {
        return Err(Error::Format {
            offset: HEADER_LEN as u64 + expected,
            what: format!("trailing data: {} unexpected bytes", have - expected),
        });
    }
    let mut vectors = Vec::with_capacity(count as usize);
    let mut off = HEADER_LEN;
    for _ in 0..count {
        let mut v = Vec::with_capacity(dim as usize);
        for _ in 0..dim {
            let raw: [u8; 4] = bytes[off..off + 4].try_into().unwrap();
            v.push(f32::from_le_bytes(raw) as f64);
            off += 4;
        }
        vectors.push(v);
    }
    Ok(LatentBatch { dim: dim as usize, vectors })
}

/// Serialize a batch of vectors into SEMLAT1 bytes. Every vector must have
/// length `dim`; values are stored as `f32`.
pub fn write_semlat(dim: usize, vectors: &[Vec<f64>]) -> Result<Vec<u8>> {
    if u32::try_from(dim).is_err() || u32::try_from(vectors.len()).is_err() {
        return Err(Error::InvalidConfig("count and dim must fit in u32".into()));
    }
    for (i, v) in vectors.iter().enumerate() {
        if v.len() != dim {
            return Err(Error::DimensionMismatch(format!(
                "vector {i} has length {}, expected dim {dim}",
                v.len()
            )));
        }
    }
    let mut out = Vec::with_capacity(HEADER_LEN + vectors.len() * dim * 4);
    out.extend_from_slice(&SEMLAT_MAGIC);
    out.extend_from_slice(&(vectors.len() as u32).to_le_bytes());
    out.extend_from_slice(&(dim as u32).to_le_bytes());
    for v in vectors {
        for &x in v {
            out.extend_from_slice(&(x as f32).to_le_bytes());
        }
    }
    Ok(out)
}

/// Read a SEMLAT1 file from disk.
pub fn load_semlat<P: AsRef<Path>>(path: P) -> Result<LatentBatch> {
    let bytes = std::fs::read(path)?;
    read_semlat(&bytes)
}

/// Write a SEMLAT1 file to disk.
pub fn save_semlat<P: AsRef<Path>>(path: P, dim: usize, vectors: &[Vec<f64>]) -> Result<()> {
    let bytes = write_semlat(dim, vectors)?;
    std::fs::write(path, bytes)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_bytes(count: u32, dim: u32, values: &[f32]) -> Vec<u8> {
        let mut b = Vec::new();
        b.extend_from_slice(&SEMLAT_MAGIC);
        b.extend_from_slice(&count.to_le_bytes());
        b.extend_from_slice(&dim.to_le_bytes());
        for v in values {
            b.extend_from_slice(&v.to_le_bytes());
        }
        b
    }

    #[test]
    fn reads_two_vectors_in_order() {
        let b = sample_bytes(2, 4, &[1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0]);
        let batch = read_semlat(&b).unwrap();
        assert_eq!(batch.dim, 4);
        assert_eq!(batch.vectors[0], vec![1.0, 2.0, 3.0, 4.0]);
        assert_eq!(batch.vectors[1], vec![5.0, 6.0, 7.0, 8.0]);
    }

    #[test]
    fn empty_batch_is_ok() {
        let b = sample_bytes(0, 4, &[]);
        let batch = read_semlat(&b).unwrap();
        assert_eq!(batch.count(), 0);
    }

    #[test]
    fn truncation_reports_byte_offset() {
        // count=1, dim=4, only 3 floats present: error at offset 16 + 12
        let b = sample_bytes(1, 4, &[1.0, 2.0, 3.0]);
        match read_semlat(&b) {
            Err(Error::Format { offset, .. }) => assert_eq!(offset, 28),
            other => panic!("expected truncation error, got {other:?}"),
        }
    }

    #[test]
    fn bad_magic_is_rejected_at_offset_zero() {
        let mut b = sample_bytes(0, 4, &[]);
        b[0] = b'X';
        match read_semlat(&b) {
            Err(Error::Format { offset, .. }) => assert_eq!(offset, 0),
            other => panic!("expected magic error, got {other:?}"),
        }
    }

    #[test]
    fn trailing_bytes_are_rejected() {
        let mut b = sample_bytes(1, 2, &[1.0, 2.0]);
        b.push(0);
        match read_semlat(&b) {
            Err(Error::Format { offset, .. }) => assert_eq!(offset, 24),
            other => panic!("expected trailing-data error, got {other:?}"),
        }
    }

    #[test]
    fn write_then_read_is_byte_identical() {
        let vectors = vec![vec![0.5, -1.25, 3.0, 0.0], vec![7.5, 2.5, -0.125, 1.0]];
        let bytes = write_semlat(4, &vectors).unwrap();
        let batch = read_semlat(&bytes).unwrap();
        let bytes2 = write_semlat(batch.dim, &batch.vectors).unwrap();
        assert_eq!(bytes, bytes2);
        assert_eq!(batch.vectors, vectors);
    }

    #[test]
    fn writer_rejects_ragged_batches() {
        let vectors = vec![vec![1.0, 2.0], vec![1.0]];
        assert!(write_semlat(2, &vectors).is_err());
    }
}
