//! Binary model file.
//!
//! Layout: `b"DRE1"`, little-endian `u32` k, m, d, then little-endian
//! `f32` row-major arrays phi (k x m), w1 (k x d), b1 (d), w2 (d x m),
//! b2 (m), then k little-endian `u32` seed indices.

use super::params::{DecoderParams, EncoderLogits, SeedItemset};
use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;
use std::io::{Read, Write};

pub const MAGIC: &[u8; 4] = b"DRE1";

#[derive(Clone, Debug, PartialEq)]
pub struct Checkpoint {
    pub encoder: EncoderLogits<f32>,
    pub decoder: DecoderParams<f32>,
    pub seeds: SeedItemset,
}

impl Checkpoint {
    pub fn k(&self) -> usize {
        self.encoder.k()
    }

    pub fn m(&self) -> usize {
        self.encoder.m()
    }

    pub fn d(&self) -> usize {
        self.decoder.d()
    }

    pub fn to_bytes(&self) -> Result<Vec<u8>> {
        let (k, m, d) = (self.k(), self.m(), self.d());
        self.decoder.check_shapes()?;
        if self.decoder.k() != k || self.decoder.m() != m || self.seeds.len() != k {
            return Err(Error::Format("encoder, decoder and seeds disagree on k or m".into()));
        }
        let floats = k * m + k * d + d + d * m + m;
        let mut out = Vec::with_capacity(16 + 4 * (floats + k));
        out.extend_from_slice(MAGIC);
        for dim in [k, m, d] {
            let dim = u32::try_from(dim).map_err(|_| Error::Format(format!("dimension {dim} exceeds u32")))?;
            out.extend_from_slice(&dim.to_le_bytes());
        }
        let [w1, b1, w2, b2] = self.decoder.tensors();
        for tensor in [self.encoder.phi.values(), w1, b1, w2, b2] {
            for v in tensor {
                out.extend_from_slice(&v.to_le_bytes());
            }
        }
        for &s in self.seeds.items() {
            out.extend_from_slice(&(s as u32).to_le_bytes());
        }
        Ok(out)
    }

    pub fn write_to(&self, mut w: impl Write) -> Result<()> {
        w.write_all(&self.to_bytes()?).map_err(|e| Error::io("<checkpoint>", e))
    }

    pub fn read_from(mut r: impl Read) -> Result<Self> {
        let mut bytes = Vec::new();
        r.read_to_end(&mut bytes).map_err(|e| Error::io("<checkpoint>", e))?;
        Self::from_bytes(&bytes)
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut cursor = Cursor { bytes, pos: 0 };
        if cursor.take(4)? != MAGIC {
            return Err(Error::Format("checkpoint does not start with DRE1".into()));
        }
        let k = cursor.u32()? as usize;
        let m = cursor.u32()? as usize;
        let d = cursor.u32()? as usize;
        let phi = cursor.matrix(k, m)?;
        let w1 = cursor.matrix(k, d)?;
        let b1 = cursor.floats(d)?;
        let w2 = cursor.matrix(d, m)?;
        let b2 = cursor.floats(m)?;
        let seeds = (0..k).map(|_| cursor.u32().map(|s| s as usize)).collect::<Result<Vec<_>>>()?;
        if cursor.pos != bytes.len() {
            return Err(Error::Format(format!("{} trailing bytes in checkpoint", bytes.len() - cursor.pos)));
        }
        Ok(Self {
            encoder: EncoderLogits::new(phi),
            decoder: DecoderParams { w1, b1, w2, b2 },
            seeds: SeedItemset::new(seeds, m)?,
        })
    }
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self.pos.checked_add(n).filter(|&e| e <= self.bytes.len());
        let end = end.ok_or_else(|| Error::Format("checkpoint truncated".into()))?;
        let out = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(out)
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn floats(&mut self, n: usize) -> Result<Vec<f32>> {
        let raw = self.take(n.checked_mul(4).ok_or_else(|| Error::Format("size overflow".into()))?)?;
        Ok(raw.chunks_exact(4).map(|c| f32::from_le_bytes(c.try_into().unwrap())).collect())
    }

    fn matrix(&mut self, rows: usize, cols: usize) -> Result<DenseMatrix<f32>> {
        DenseMatrix::from_vec(rows, cols, self.floats(rows * cols)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;

    fn sample() -> Checkpoint {
        let mut rng = seeded(1);
        Checkpoint {
            encoder: EncoderLogits::init(2, 5, 1.0, &mut rng),
            decoder: DecoderParams::init(2, 3, 5, &mut rng),
            seeds: SeedItemset::new(vec![4, 1], 5).unwrap(),
        }
    }

    #[test]
    fn layout_header_and_length() {
        let bytes = sample().to_bytes().unwrap();
        assert_eq!(&bytes[..4], b"DRE1");
        assert_eq!(&bytes[4..16], &[2, 0, 0, 0, 5, 0, 0, 0, 3, 0, 0, 0]);
        let floats = 2 * 5 + 2 * 3 + 3 + 3 * 5 + 5;
        assert_eq!(bytes.len(), 16 + 4 * floats + 4 * 2);
        assert_eq!(&bytes[bytes.len() - 8..], &[4, 0, 0, 0, 1, 0, 0, 0]);
    }

    #[test]
    fn bytes_round_trip() {
        let c = sample();
        assert_eq!(Checkpoint::from_bytes(&c.to_bytes().unwrap()).unwrap(), c);
    }

    #[test]
    fn corrupt_files_rejected() {
        let bytes = sample().to_bytes().unwrap();
        assert!(Checkpoint::from_bytes(&bytes[..bytes.len() - 1]).is_err());
        let mut extra = bytes.clone();
        extra.push(0);
        assert!(Checkpoint::from_bytes(&extra).is_err());
        let mut bad = bytes;
        bad[0] = b'X';
        assert!(Checkpoint::from_bytes(&bad).is_err());
    }
}
