//! Binary configuration files (`.perc`).
//!
//! Layout, all integers little-endian:
//! magic `PERC3`, version byte `0x01`, `u32` half-side `n`, `u64` seed,
//! `f64` open probability `p`, then `ceil((2n+1)³/8)` bytes of site states in
//! linear index order, least significant bit first within each byte.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use thiserror::Error;

use super::bits::BitSet;
use super::{BoxSpec, Configuration};

const MAGIC: &[u8; 5] = b"PERC3";
const VERSION: u8 = 0x01;

#[derive(Debug, Error)]
pub enum PercFileError {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("not a PERC3 file (bad magic)")]
    BadMagic,
    #[error("unsupported PERC3 version {0:#04x}")]
    BadVersion(u8),
    #[error("box half-side {0} too large for this build")]
    BadHalfSide(u32),
    #[error("payload length mismatch or stray padding bits")]
    BadPayload,
    #[error("open probability {0} outside [0,1]")]
    BadProbability(f64),
}

/// Writes `config` in the `.perc` format.
pub fn write_perc<W: Write>(config: &Configuration, mut w: W) -> Result<(), PercFileError> {
    w.write_all(MAGIC)?;
    w.write_all(&[VERSION])?;
    w.write_all(&(config.n() as u32).to_le_bytes())?;
    w.write_all(&config.seed().to_le_bytes())?;
    w.write_all(&config.p().to_le_bytes())?;
    w.write_all(&config.states().to_bytes())?;
    Ok(())
}

/// Reads a configuration in the `.perc` format; bit-exact round trip with
/// [`write_perc`].
pub fn read_perc<R: Read>(mut r: R) -> Result<Configuration, PercFileError> {
    let mut magic = [0u8; 5];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(PercFileError::BadMagic);
    }
    let mut version = [0u8; 1];
    r.read_exact(&mut version)?;
    if version[0] != VERSION {
        return Err(PercFileError::BadVersion(version[0]));
    }
    let mut b4 = [0u8; 4];
    r.read_exact(&mut b4)?;
    let n = u32::from_le_bytes(b4);
    if n > i32::MAX as u32 / 4 {
        return Err(PercFileError::BadHalfSide(n));
    }
    let mut b8 = [0u8; 8];
    r.read_exact(&mut b8)?;
    let seed = u64::from_le_bytes(b8);
    r.read_exact(&mut b8)?;
    let p = f64::from_le_bytes(b8);
    if !(0.0..=1.0).contains(&p) {
        return Err(PercFileError::BadProbability(p));
    }
    let count = BoxSpec::lambda(n as i32).site_count();
    let mut payload = vec![0u8; count.div_ceil(8)];
    r.read_exact(&mut payload)?;
    // Trailing garbage also means the file is not what it claims to be.
    if r.read(&mut [0u8; 1])? != 0 {
        return Err(PercFileError::BadPayload);
    }
    let states = BitSet::from_bytes(&payload, count).ok_or(PercFileError::BadPayload)?;
    Ok(Configuration::from_parts(n as i32, p, seed, states))
}

pub fn save_perc(config: &Configuration, path: &Path) -> Result<(), PercFileError> {
    let mut w = BufWriter::new(File::create(path)?);
    write_perc(config, &mut w)?;
    w.flush()?;
    Ok(())
}

pub fn load_perc(path: &Path) -> Result<Configuration, PercFileError> {
    read_perc(BufReader::new(File::open(path)?))
}
