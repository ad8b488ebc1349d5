//! Binary snapshots.
//!
//! Layout, all integers little-endian:
//!
//! | offset | size | field                                  |
//! |--------|------|----------------------------------------|
//! | 0      | 4    | magic `BKYD`                           |
//! | 4      | 2    | format version                         |
//! | 6      | 1    | mode: 0 backyard, 1 succinct           |
//! | 7      | 1    | reserved, zero                         |
//! | 8      | 4    | `P`, length of the parameter block     |
//! | 12     | P    | bincode of the parameters              |
//! | 12 + P | 8    | `S`, length of the state block         |
//! | 20 + P | S    | bincode of the whole dictionary        |
//!
//! The state block repeats the parameters so it decodes on its own.
//! Step counters are not stored.

use crate::backyard::{BackyardDict, BackyardParams};
use crate::error::{Error, Result};
use crate::succinct::{SuccinctDict, SuccinctParams};
use serde::de::DeserializeOwned;
use serde::Serialize;
use std::io::{Read, Write};

pub const MAGIC: [u8; 4] = *b"BKYD";
pub const VERSION: u16 = 1;
pub const MODE_BACKYARD: u8 = 0;
pub const MODE_SUCCINCT: u8 = 1;
const HEADER_LEN: usize = 12;

#[derive(Clone, Debug)]
pub enum Snapshot {
    Backyard(BackyardDict),
    Succinct(SuccinctDict),
}

fn err(e: impl std::fmt::Display) -> Error {
    Error::Snapshot(e.to_string())
}

fn encode<P: Serialize, S: Serialize>(mode: u8, params: &P, state: &S) -> Result<Vec<u8>> {
    let p = bincode::serialize(params).map_err(err)?;
    let s = bincode::serialize(state).map_err(err)?;
    let plen = u32::try_from(p.len()).map_err(err)?;
    let mut out = Vec::with_capacity(HEADER_LEN + p.len() + 8 + s.len());
    out.extend_from_slice(&MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.push(mode);
    out.push(0);
    out.extend_from_slice(&plen.to_le_bytes());
    out.extend_from_slice(&p);
    out.extend_from_slice(&(s.len() as u64).to_le_bytes());
    out.extend_from_slice(&s);
    Ok(out)
}

pub fn backyard_to_bytes(d: &BackyardDict) -> Result<Vec<u8>> {
    encode(MODE_BACKYARD, d.params(), d)
}

pub fn succinct_to_bytes(d: &SuccinctDict) -> Result<Vec<u8>> {
    encode(MODE_SUCCINCT, d.params(), d)
}

fn take<'a>(bytes: &'a [u8], at: &mut usize, len: usize) -> Result<&'a [u8]> {
    let end = at
        .checked_add(len)
        .filter(|&e| e <= bytes.len())
        .ok_or_else(|| err("truncated"))?;
    let s = &bytes[*at..end];
    *at = end;
    Ok(s)
}

fn decode<P, S>(bytes: &[u8], at: &mut usize) -> Result<(P, S)>
where
    P: DeserializeOwned,
    S: DeserializeOwned,
{
    let plen = u32::from_le_bytes(take(bytes, at, 4)?.try_into().unwrap()) as usize;
    let params = bincode::deserialize(take(bytes, at, plen)?).map_err(err)?;
    let slen = u64::from_le_bytes(take(bytes, at, 8)?.try_into().unwrap());
    let state =
        bincode::deserialize(take(bytes, at, usize::try_from(slen).map_err(err)?)?).map_err(err)?;
    if *at != bytes.len() {
        return Err(err("trailing bytes"));
    }
    Ok((params, state))
}

pub fn from_bytes(bytes: &[u8]) -> Result<Snapshot> {
    let mut at = 0;
    if take(bytes, &mut at, 4)? != MAGIC {
        return Err(err("bad magic"));
    }
    let version = u16::from_le_bytes(take(bytes, &mut at, 2)?.try_into().unwrap());
    if version != VERSION {
        return Err(err(format!("unsupported version {version}")));
    }
    let mode = take(bytes, &mut at, 2)?[0];
    match mode {
        MODE_BACKYARD => {
            let (p, d): (BackyardParams, BackyardDict) = decode(bytes, &mut at)?;
            if *d.params() != p {
                return Err(err("parameter block disagrees with state"));
            }
            Ok(Snapshot::Backyard(d))
        }
        MODE_SUCCINCT => {
            let (p, mut d): (SuccinctParams, SuccinctDict) = decode(bytes, &mut at)?;
            if *d.params() != p {
                return Err(err("parameter block disagrees with state"));
            }
            d.relink()?;
            Ok(Snapshot::Succinct(d))
        }
        m => Err(err(format!("unknown mode {m}"))),
    }
}

pub fn write_to<W: Write>(snap: &Snapshot, mut w: W) -> Result<()> {
    let bytes = match snap {
        Snapshot::Backyard(d) => backyard_to_bytes(d)?,
        Snapshot::Succinct(d) => succinct_to_bytes(d)?,
    };
    w.write_all(&bytes).map_err(err)
}

pub fn read_from<R: Read>(mut r: R) -> Result<Snapshot> {
    let mut bytes = Vec::new();
    r.read_to_end(&mut bytes).map_err(err)?;
    from_bytes(&bytes)
}
