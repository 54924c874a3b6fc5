//! Binary checkpoints. All integers and floats are little-endian:
//!
//! ```text
//! magic      8 bytes  "ARGMCKPT"
//! version    u32      currently 1
//! config_len u32, config bytes (UTF-8 JSON)
//! n_tensors  u32
//! per tensor:
//!   name_len u32, name bytes (UTF-8)
//!   ndim     u32, dims u64 x ndim
//!   data     f64 x product(dims)
//! ```

use std::io::{Read, Write};

use super::Tensor;
use crate::error::{Error, Result};

pub const CHECKPOINT_MAGIC: &[u8; 8] = b"ARGMCKPT";
pub const CHECKPOINT_VERSION: u32 = 1;

pub fn write_checkpoint<W: Write>(mut w: W, config_json: &str, tensors: &[(&str, &Tensor)]) -> Result<()> {
    w.write_all(CHECKPOINT_MAGIC)?;
    w.write_all(&CHECKPOINT_VERSION.to_le_bytes())?;
    write_bytes(&mut w, config_json.as_bytes())?;
    w.write_all(&(tensors.len() as u32).to_le_bytes())?;
    for (name, t) in tensors {
        write_bytes(&mut w, name.as_bytes())?;
        w.write_all(&(t.shape().len() as u32).to_le_bytes())?;
        for d in t.shape() {
            w.write_all(&(*d as u64).to_le_bytes())?;
        }
        for v in t.data() {
            w.write_all(&v.to_le_bytes())?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Returns the config JSON and the named tensors in file order.
pub fn read_checkpoint<R: Read>(mut r: R) -> Result<(String, Vec<(String, Tensor)>)> {
    let mut magic = [0u8; 8];
    r.read_exact(&mut magic)?;
    if &magic != CHECKPOINT_MAGIC {
        return Err(Error::Format("not a checkpoint (bad magic)".into()));
    }
    let version = read_u32(&mut r)?;
    if version != CHECKPOINT_VERSION {
        return Err(Error::Format(format!("unsupported checkpoint version {version}")));
    }
    let config = read_string(&mut r)?;
    let n = read_u32(&mut r)?;
    let mut out = Vec::with_capacity(n as usize);
    for _ in 0..n {
        let name = read_string(&mut r)?;
        let ndim = read_u32(&mut r)? as usize;
        let mut shape = Vec::with_capacity(ndim);
        for _ in 0..ndim {
            let mut b = [0u8; 8];
            r.read_exact(&mut b)?;
            shape.push(u64::from_le_bytes(b) as usize);
        }
        let len: usize = shape.iter().product();
        let mut data = Vec::with_capacity(len);
        let mut b = [0u8; 8];
        for _ in 0..len {
            r.read_exact(&mut b)?;
            data.push(f64::from_le_bytes(b));
        }
        out.push((name, Tensor::from_vec(&shape, data)?));
    }
    Ok((config, out))
}

fn write_bytes<W: Write>(w: &mut W, b: &[u8]) -> Result<()> {
    w.write_all(&(b.len() as u32).to_le_bytes())?;
    w.write_all(b)?;
    Ok(())
}

fn read_u32<R: Read>(r: &mut R) -> Result<u32> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b)?;
    Ok(u32::from_le_bytes(b))
}

fn read_string<R: Read>(r: &mut R) -> Result<String> {
    let len = read_u32(r)? as usize;
    let mut b = vec![0u8; len];
    r.read_exact(&mut b)?;
    String::from_utf8(b).map_err(|_| Error::Format("checkpoint string is not UTF-8".into()))
}
