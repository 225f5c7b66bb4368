//! Embedding files.
//!
//! Text: a `n k` header line, then one `id v1 ... vk` line per node with six
//! significant digits. Binary: the 8-byte magic `RFNEMB01`, `n` and `k` as
//! little-endian `u64`, then `n * k` little-endian `f32` values row by row.
//! Binary files carry no ids; rows are nodes `0..n`.

use std::io::{BufRead, Read, Write};

use byteorder::{LittleEndian, ReadBytesExt, WriteBytesExt};
use refine_core::DenseMatrix;

use crate::edgelist::fields;
use crate::error::{Error, Result};

pub const MAGIC: &[u8; 8] = b"RFNEMB01";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum Format {
    #[default]
    Text,
    Binary,
}

/// Embedding rows together with the node id of each row.
#[derive(Clone, Debug, PartialEq)]
pub struct Embedding {
    pub ids: Vec<u64>,
    pub matrix: DenseMatrix,
}

pub fn write_embedding(mut w: impl Write, emb: &Embedding, format: Format) -> Result<()> {
    let (n, k) = emb.matrix.shape();
    assert_eq!(emb.ids.len(), n);
    match format {
        Format::Text => {
            writeln!(w, "{n} {k}")?;
            let mut line = String::new();
            for (i, id) in emb.ids.iter().enumerate() {
                use std::fmt::Write as _;
                line.clear();
                write!(line, "{id}").unwrap();
                for v in emb.matrix.row(i) {
                    write!(line, " {v:.5e}").unwrap();
                }
                line.push('\n');
                w.write_all(line.as_bytes())?;
            }
        }
        Format::Binary => {
            w.write_all(MAGIC)?;
            w.write_u64::<LittleEndian>(n as u64)?;
            w.write_u64::<LittleEndian>(k as u64)?;
            for &v in emb.matrix.as_slice() {
                w.write_f32::<LittleEndian>(v as f32)?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

/// Reads either format, telling them apart by the magic bytes.
pub fn read_embedding(mut r: impl BufRead) -> Result<Embedding> {
    let binary = r.fill_buf()?.starts_with(MAGIC);
    if binary {
        read_binary(r)
    } else {
        read_text(r)
    }
}

fn read_binary(mut r: impl Read) -> Result<Embedding> {
    let mut magic = [0u8; 8];
    r.read_exact(&mut magic)?;
    let n = r.read_u64::<LittleEndian>()? as usize;
    let k = r.read_u64::<LittleEndian>()? as usize;
    let len = n
        .checked_mul(k)
        .ok_or_else(|| Error::Format(format!("binary header {n} x {k} overflows")))?;
    let mut data = Vec::with_capacity(len);
    for _ in 0..len {
        let v = r.read_f32::<LittleEndian>().map_err(|e| {
            if e.kind() == std::io::ErrorKind::UnexpectedEof {
                Error::Format(format!(
                    "binary embedding truncated, expected {n} x {k} values"
                ))
            } else {
                e.into()
            }
        })?;
        data.push(v as f64);
    }
    Ok(Embedding {
        ids: (0..n as u64).collect(),
        matrix: DenseMatrix::from_vec(n, k, data)?,
    })
}

fn read_text(r: impl BufRead) -> Result<Embedding> {
    let mut lines = r.lines().enumerate();
    let (n, k) = loop {
        let Some((idx, line)) = lines.next() else {
            return Err(Error::Format("empty embedding file".into()));
        };
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let head: Vec<&str> = fields(&line).collect();
        let dims = match head.as_slice() {
            [n, k] => n.parse::<usize>().ok().zip(k.parse::<usize>().ok()),
            _ => None,
        };
        break dims.ok_or_else(|| Error::parse(idx + 1, "expected header `n k`"))?;
    };
    let mut ids = Vec::with_capacity(n);
    let mut data = Vec::with_capacity(n * k);
    for (idx, line) in lines {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let lineno = idx + 1;
        let mut it = fields(&line);
        let tok = it.next().expect("non-empty line");
        ids.push(
            tok.parse()
                .map_err(|_| Error::parse(lineno, format!("bad node id {tok:?}")))?,
        );
        let before = data.len();
        for tok in it {
            data.push(
                tok.parse::<f64>()
                    .map_err(|_| Error::parse(lineno, format!("bad value {tok:?}")))?,
            );
        }
        if data.len() - before != k {
            return Err(Error::parse(
                lineno,
                format!("expected {k} values, got {}", data.len() - before),
            ));
        }
    }
    if ids.len() != n {
        return Err(Error::Format(format!(
            "header says {n} rows, found {}",
            ids.len()
        )));
    }
    Ok(Embedding {
        ids,
        matrix: DenseMatrix::from_vec(n, k, data)?,
    })
}
