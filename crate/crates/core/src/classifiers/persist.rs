//! Model files.
//!
//! Layout: the 7 bytes `HDMODEL`, the format version as a little-endian
//! u32, the payload length as a little-endian u64, then that many bytes of
//! UTF-8 JSON holding the [`TrainedModel`]. Object keys follow struct field
//! order and floats are written in shortest round-trip form.

use std::fs;
use std::io::{Read, Write};
use std::path::Path;

use super::TrainedModel;
use crate::error::{Error, Result};

pub const MAGIC: &[u8; 7] = b"HDMODEL";
pub const SCHEMA_VERSION: u32 = 1;

const HEADER_LEN: usize = MAGIC.len() + 4 + 8;

pub fn write_model(model: &TrainedModel, mut out: impl Write) -> std::io::Result<()> {
    let payload = serde_json::to_vec(model).map_err(std::io::Error::other)?;
    out.write_all(MAGIC)?;
    out.write_all(&SCHEMA_VERSION.to_le_bytes())?;
    out.write_all(&(payload.len() as u64).to_le_bytes())?;
    out.write_all(&payload)?;
    out.flush()
}

pub fn read_model(bytes: &[u8]) -> Result<TrainedModel> {
    if bytes.len() < MAGIC.len() || &bytes[..MAGIC.len()] != MAGIC {
        return Err(Error::ModelFormat("missing HDMODEL magic bytes".into()));
    }
    if bytes.len() < HEADER_LEN {
        return Err(Error::ModelFormat(format!(
            "truncated header ({} of {HEADER_LEN} bytes)",
            bytes.len()
        )));
    }
    let version = u32::from_le_bytes(bytes[7..11].try_into().unwrap());
    if version != SCHEMA_VERSION {
        return Err(Error::ModelVersion {
            found: version,
            supported: SCHEMA_VERSION,
        });
    }
    let declared = u64::from_le_bytes(bytes[11..19].try_into().unwrap());
    let body = &bytes[HEADER_LEN..];
    if (body.len() as u64) < declared {
        return Err(Error::ModelFormat(format!(
            "truncated payload ({} of {declared} bytes)",
            body.len()
        )));
    }
    if body.len() as u64 > declared {
        return Err(Error::ModelFormat(format!(
            "{} trailing bytes after the payload",
            body.len() as u64 - declared
        )));
    }
    let model: TrainedModel =
        serde_json::from_slice(body).map_err(|e| Error::ModelFormat(format!("bad payload: {e}")))?;
    if model.schema_version != version {
        return Err(Error::ModelFormat(format!(
            "payload says version {} but the header says {version}",
            model.schema_version
        )));
    }
    Ok(model)
}

pub fn save_model(model: &TrainedModel, path: &Path) -> Result<()> {
    let mut buf = Vec::new();
    write_model(model, &mut buf).map_err(|e| Error::io(path, e))?;
    fs::write(path, buf).map_err(|e| Error::io(path, e))
}

pub fn load_model(path: &Path) -> Result<TrainedModel> {
    let mut bytes = Vec::new();
    fs::File::open(path)
        .and_then(|mut f| f.read_to_end(&mut bytes))
        .map_err(|e| Error::io(path, e))?;
    read_model(&bytes)
}
