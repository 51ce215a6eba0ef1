//! Versioned binary checkpoints.
//!
//! Layout, all integers little-endian:
//!
//! ```text
//! "QLG1" | u32 version | u32 config length | config (UTF-8 key = value lines)
//! then six arrays, each u64 length + f64 values:
//!   generator, discriminator, generator ADAM m, v, discriminator ADAM m, v
//! ```

use std::fs;
use std::path::Path;

use anyhow::Context;

use crate::settings::KvMap;

pub const MAGIC: &[u8; 4] = b"QLG1";
pub const VERSION: u32 = 1;
pub const ARRAY_COUNT: usize = 6;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
#[error("corrupt checkpoint: {0}")]
pub struct CorruptCheckpoint(pub String);

fn corrupt(msg: impl Into<String>) -> CorruptCheckpoint {
    CorruptCheckpoint(msg.into())
}

#[derive(Debug, Clone, PartialEq)]
pub struct Checkpoint {
    pub meta: KvMap,
    pub arrays: Vec<Vec<f64>>,
}

impl Checkpoint {
    pub fn encode(&self) -> Vec<u8> {
        let config = self.meta.render().into_bytes();
        let mut out = Vec::with_capacity(12 + config.len() + self.arrays.iter().map(|a| 8 + 8 * a.len()).sum::<usize>());
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&VERSION.to_le_bytes());
        out.extend_from_slice(&(config.len() as u32).to_le_bytes());
        out.extend_from_slice(&config);
        for a in &self.arrays {
            out.extend_from_slice(&(a.len() as u64).to_le_bytes());
            for v in a {
                out.extend_from_slice(&v.to_le_bytes());
            }
        }
        out
    }

    pub fn decode(bytes: &[u8]) -> Result<Self, CorruptCheckpoint> {
        let mut r = Reader { bytes, pos: 0 };
        if r.take(4)? != MAGIC {
            return Err(corrupt("bad magic"));
        }
        let version = r.u32()?;
        if version != VERSION {
            return Err(corrupt(format!("unsupported version {version}")));
        }
        let len = r.u32()? as usize;
        let text = std::str::from_utf8(r.take(len)?).map_err(|_| corrupt("config block is not UTF-8"))?;
        let meta = KvMap::parse(text).map_err(|e| corrupt(format!("config block: {e}")))?;
        let mut arrays = Vec::with_capacity(ARRAY_COUNT);
        for _ in 0..ARRAY_COUNT {
            let n = r.u64()? as usize;
            let raw = r.take(n.checked_mul(8).ok_or_else(|| corrupt("array length overflow"))?)?;
            arrays.push(raw.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().unwrap())).collect());
        }
        if r.pos != bytes.len() {
            return Err(corrupt("trailing bytes"));
        }
        Ok(Checkpoint { meta, arrays })
    }

    pub fn save(&self, path: &Path) -> anyhow::Result<()> {
        fs::write(path, self.encode()).with_context(|| format!("writing {}", path.display()))
    }

    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
        Ok(Self::decode(&bytes)?)
    }
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8], CorruptCheckpoint> {
        let end = self.pos.checked_add(n).filter(|&e| e <= self.bytes.len()).ok_or_else(|| corrupt("truncated"))?;
        let s = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    fn u32(&mut self) -> Result<u32, CorruptCheckpoint> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<u64, CorruptCheckpoint> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
}
