//! The `.vrep` representation format.
//!
//! Little-endian throughout:
//!
//! ```text
//! magic        4 bytes  "VREP"
//! version      u32      1
//! n_layers     u32
//! dim          u32
//! n_sentences  u32
//! per sentence:
//!   n_words    u32
//!   values     n_layers * n_words * dim f32, layer-major then word-major
//! ```

use std::fs;
use std::path::Path;

use super::RepresentationBundle;
use crate::error::{Error, Result};

pub const MAGIC: &[u8; 4] = b"VREP";
pub const VERSION: u32 = 1;

pub fn encode(bundle: &RepresentationBundle) -> Vec<u8> {
    let values: usize = bundle.sentences().iter().map(|s| s.raw().len()).sum();
    let mut out = Vec::with_capacity(20 + 4 * bundle.n_sentences() + 4 * values);
    out.extend_from_slice(MAGIC);
    for v in [
        VERSION,
        bundle.n_layers() as u32,
        bundle.dim() as u32,
        bundle.n_sentences() as u32,
    ] {
        out.extend_from_slice(&v.to_le_bytes());
    }
    for s in bundle.sentences() {
        out.extend_from_slice(&(s.n_words() as u32).to_le_bytes());
        for v in s.raw() {
            out.extend_from_slice(&v.to_le_bytes());
        }
    }
    out
}

struct Cursor<'a> {
    bytes: &'a [u8],
    offset: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let remaining = self.bytes.len() - self.offset;
        if remaining < n {
            return Err(Error::Length {
                offset: self.offset as u64,
                expected: n as u64,
                found: remaining as u64,
            });
        }
        let out = &self.bytes[self.offset..self.offset + n];
        self.offset += n;
        Ok(out)
    }

    fn u32(&mut self) -> Result<u32> {
        let b = self.take(4)?;
        Ok(u32::from_le_bytes([b[0], b[1], b[2], b[3]]))
    }
}

pub fn decode(bytes: &[u8]) -> Result<RepresentationBundle> {
    let mut cur = Cursor { bytes, offset: 0 };
    if cur.take(4)? != MAGIC {
        return Err(Error::Format {
            offset: 0,
            message: "bad magic, expected \"VREP\"".into(),
        });
    }
    let version = cur.u32()?;
    if version != VERSION {
        return Err(Error::Format {
            offset: 4,
            message: format!("unsupported version {version}"),
        });
    }
    let n_layers = cur.u32()? as usize;
    let dim = cur.u32()? as usize;
    let n_sentences = cur.u32()? as usize;
    let mut bundle = RepresentationBundle::new(n_layers, dim).map_err(|_| Error::Format {
        offset: 8,
        message: format!("n_layers ({n_layers}) and dim ({dim}) must be positive"),
    })?;
    for _ in 0..n_sentences {
        let n_words = cur.u32()? as usize;
        let count = n_layers * n_words * dim;
        let raw = cur.take(count * 4)?;
        let data = raw
            .chunks_exact(4)
            .map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]]))
            .collect();
        bundle.push_raw(n_words, data);
    }
    if cur.offset != bytes.len() {
        return Err(Error::Format {
            offset: cur.offset as u64,
            message: format!("{} trailing bytes", bytes.len() - cur.offset),
        });
    }
    Ok(bundle)
}

pub fn write_bundle(path: impl AsRef<Path>, bundle: &RepresentationBundle) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, encode(bundle)).map_err(|e| Error::io(path, e))
}

pub fn read_bundle(path: impl AsRef<Path>) -> Result<RepresentationBundle> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    decode(&bytes).map_err(|e| Error::InFile {
        path: path.to_owned(),
        source: Box::new(e),
    })
}
