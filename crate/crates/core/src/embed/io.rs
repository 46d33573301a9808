//! Index files, JSON or binary.
//!
//! JSON: `{"scheme", "alpha", "beta", "dim", "entries": [{"node_id", "vector"}]}`.
//! Binary (little-endian): magic `GKIX`, version `u32`, scheme `u8`, alpha
//! `f64`, beta `f64`, dim `u32`, count `u64`, then per entry a `u32` id byte
//! length, the UTF-8 id, and `dim` `f32`s. Readers detect the format from the
//! leading bytes.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{EmbedParams, IndexError, NodeIndex, Scheme};

const MAGIC: &[u8; 4] = b"GKIX";
const VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IndexFormat {
    Json,
    Binary,
}

impl IndexFormat {
    /// `.json` files are JSON; anything else is binary.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(e) if e.eq_ignore_ascii_case("json") => IndexFormat::Json,
            _ => IndexFormat::Binary,
        }
    }
}

#[derive(Serialize, Deserialize)]
struct JsonEntry {
    node_id: String,
    vector: Vec<f32>,
}

#[derive(Serialize, Deserialize)]
struct JsonIndex {
    scheme: Scheme,
    alpha: f64,
    beta: f64,
    dim: usize,
    entries: Vec<JsonEntry>,
}

pub fn write_index(index: &NodeIndex, format: IndexFormat, mut w: impl Write) -> Result<(), IndexError> {
    match format {
        IndexFormat::Json => {
            let file = JsonIndex {
                scheme: index.params.scheme,
                alpha: index.params.alpha,
                beta: index.params.beta,
                dim: index.dim,
                entries: index
                    .iter()
                    .map(|(id, v)| JsonEntry { node_id: id.to_string(), vector: v.to_vec() })
                    .collect(),
            };
            serde_json::to_writer(&mut w, &file)?;
            w.write_all(b"\n")?;
        }
        IndexFormat::Binary => {
            w.write_all(MAGIC)?;
            w.write_all(&VERSION.to_le_bytes())?;
            w.write_all(&[index.params.scheme.code()])?;
            w.write_all(&index.params.alpha.to_le_bytes())?;
            w.write_all(&index.params.beta.to_le_bytes())?;
            w.write_all(&(index.dim as u32).to_le_bytes())?;
            w.write_all(&(index.len() as u64).to_le_bytes())?;
            for (id, v) in index.iter() {
                w.write_all(&(id.len() as u32).to_le_bytes())?;
                w.write_all(id.as_bytes())?;
                for x in v {
                    w.write_all(&x.to_le_bytes())?;
                }
            }
        }
    }
    Ok(())
}

fn take<const N: usize>(r: &mut impl Read, what: &str) -> Result<[u8; N], IndexError> {
    let mut b = [0u8; N];
    r.read_exact(&mut b).map_err(|_| IndexError::Format(format!("truncated {what}")))?;
    Ok(b)
}

fn read_binary(mut r: impl Read) -> Result<NodeIndex, IndexError> {
    let version = u32::from_le_bytes(take(&mut r, "header")?);
    if version != VERSION {
        return Err(IndexError::Format(format!("unsupported version {version}")));
    }
    let [code] = take::<1>(&mut r, "header")?;
    let scheme = Scheme::from_code(code).ok_or_else(|| IndexError::Format(format!("unknown scheme code {code}")))?;
    let alpha = f64::from_le_bytes(take(&mut r, "header")?);
    let beta = f64::from_le_bytes(take(&mut r, "header")?);
    let dim = u32::from_le_bytes(take(&mut r, "header")?) as usize;
    let count = u64::from_le_bytes(take(&mut r, "header")?);
    let mut rows = Vec::new();
    let mut buf = vec![0u8; dim * 4];
    for _ in 0..count {
        let len = u32::from_le_bytes(take(&mut r, "entry")?) as usize;
        let mut id = vec![0u8; len];
        r.read_exact(&mut id).map_err(|_| IndexError::Format("truncated entry".into()))?;
        let id = String::from_utf8(id).map_err(|_| IndexError::Format("node id is not UTF-8".into()))?;
        r.read_exact(&mut buf).map_err(|_| IndexError::Format("truncated entry".into()))?;
        let v = buf.chunks_exact(4).map(|b| f32::from_le_bytes(b.try_into().expect("4 bytes"))).collect();
        rows.push((id, v));
    }
    let mut rest = [0u8; 1];
    if r.read(&mut rest)? != 0 {
        return Err(IndexError::Format("trailing bytes after last entry".into()));
    }
    NodeIndex::from_rows(EmbedParams { scheme, alpha, beta }, dim, rows)
}

pub fn read_index(mut r: impl Read) -> Result<NodeIndex, IndexError> {
    let mut head = [0u8; 4];
    let mut got = 0;
    while got < 4 {
        match r.read(&mut head[got..])? {
            0 => break,
            n => got += n,
        }
    }
    if got == 4 && &head == MAGIC {
        return read_binary(r);
    }
    let file: JsonIndex = serde_json::from_reader(head[..got].chain(r))?;
    let rows = file.entries.into_iter().map(|e| (e.node_id, e.vector)).collect();
    NodeIndex::from_rows(EmbedParams { scheme: file.scheme, alpha: file.alpha, beta: file.beta }, file.dim, rows)
}

pub fn save_index(index: &NodeIndex, path: impl AsRef<Path>) -> Result<(), IndexError> {
    let path = path.as_ref();
    let mut w = BufWriter::new(File::create(path)?);
    write_index(index, IndexFormat::from_path(path), &mut w)?;
    w.flush()?;
    Ok(())
}

pub fn load_index(path: impl AsRef<Path>) -> Result<NodeIndex, IndexError> {
    read_index(BufReader::new(File::open(path)?))
}
