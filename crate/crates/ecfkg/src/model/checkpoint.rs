//! Binary checkpoint format for [`EmbeddingModel`].
//!
//! Layout, in order:
//!
//! 1. magic bytes `ECFKG1\n`
//! 2. one ASCII header line: `dim=<d> types=<c0,c1,c2,c3,c4> relations=7`
//! 3. one vocabulary line per entity, grouped by type in declaration order,
//!    each `type\tindex\tkey` with strictly sequential indexes
//! 4. raw little-endian `f64` matrices, row-major: the five entity matrices
//!    in type order followed by the relation matrix
//!
//! Loading is strict: any structural problem is reported as a
//! [`CheckpointError::Format`] carrying the byte offset where parsing failed,
//! and trailing bytes after the final matrix are rejected. A save/load round
//! trip reproduces the model bit for bit.

use std::collections::HashSet;
use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use thiserror::Error;

use super::EmbeddingModel;
use crate::graph::{EntityType, RelationType, Vocabularies, Vocabulary};

/// First bytes of every checkpoint file.
pub const CHECKPOINT_MAGIC: &[u8] = b"ECFKG1\n";

#[derive(Debug, Error)]
pub enum CheckpointError {
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error("malformed checkpoint at byte {offset}: {message}")]
    Format { offset: u64, message: String },
    #[error("{entity_type} key {key:?} contains a tab or newline and cannot be serialized")]
    UnwritableKey { entity_type: EntityType, key: String },
}

fn fmt_err(offset: u64, message: impl Into<String>) -> CheckpointError {
    CheckpointError::Format { offset, message: message.into() }
}

pub fn save_checkpoint(
    model: &EmbeddingModel,
    path: impl AsRef<Path>,
) -> Result<(), CheckpointError> {
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(CHECKPOINT_MAGIC)?;
    let counts: Vec<String> = EntityType::ALL
        .iter()
        .map(|t| model.vocabularies().size(*t).to_string())
        .collect();
    writeln!(
        w,
        "dim={} types={} relations={}",
        model.dim(),
        counts.join(","),
        RelationType::ALL.len()
    )?;
    for t in EntityType::ALL {
        for (i, key) in model.vocabularies().vocab(t).keys().iter().enumerate() {
            if key.contains('\t') || key.contains('\n') {
                return Err(CheckpointError::UnwritableKey { entity_type: t, key: key.clone() });
            }
            writeln!(w, "{t}\t{i}\t{key}")?;
        }
    }
    for t in EntityType::ALL {
        for v in model.entity_matrix(t) {
            w.write_all(&v.to_le_bytes())?;
        }
    }
    for v in model.relation_matrix() {
        w.write_all(&v.to_le_bytes())?;
    }
    w.flush()?;
    Ok(())
}

/// Byte-counting wrapper so errors can point at the exact input position.
struct Counting<R> {
    inner: R,
    offset: u64,
}

impl<R: BufRead> Counting<R> {
    fn new(inner: R) -> Self {
        Counting { inner, offset: 0 }
    }
}

impl<R: BufRead> Read for Counting<R> {
    fn read(&mut self, buf: &mut [u8]) -> io::Result<usize> {
        let available = self.inner.fill_buf()?;
        let n = available.len().min(buf.len());
        buf[..n].copy_from_slice(&available[..n]);
        self.inner.consume(n);
        self.offset += n as u64;
        Ok(n)
    }
}

impl<R: BufRead> BufRead for Counting<R> {
    fn fill_buf(&mut self) -> io::Result<&[u8]> {
        self.inner.fill_buf()
    }

    fn consume(&mut self, amt: usize) {
        self.offset += amt as u64;
        self.inner.consume(amt);
    }
}

/// Reads one `\n`-terminated line, returning its starting offset and content
/// without the terminator.
fn read_line(
    r: &mut Counting<impl BufRead>,
    what: &str,
) -> Result<(u64, String), CheckpointError> {
    let offset = r.offset;
    let mut buf = Vec::new();
    let n = r.read_until(b'\n', &mut buf)?;
    if n == 0 {
        return Err(fmt_err(offset, format!("unexpected end of file while reading {what}")));
    }
    if buf.last() != Some(&b'\n') {
        return Err(fmt_err(offset, format!("unterminated line while reading {what}")));
    }
    buf.pop();
    String::from_utf8(buf)
        .map(|line| (offset, line))
        .map_err(|_| fmt_err(offset, format!("invalid UTF-8 while reading {what}")))
}

fn read_matrix(
    r: &mut Counting<impl BufRead>,
    len: usize,
    what: &str,
) -> Result<Vec<f64>, CheckpointError> {
    let mut out = Vec::with_capacity(len);
    let mut buf = [0u8; 8];
    for _ in 0..len {
        let offset = r.offset;
        r.read_exact(&mut buf).map_err(|e| {
            if e.kind() == io::ErrorKind::UnexpectedEof {
                fmt_err(offset, format!("unexpected end of file in the {what} matrix"))
            } else {
                CheckpointError::Io(e)
            }
        })?;
        out.push(f64::from_le_bytes(buf));
    }
    Ok(out)
}

pub fn load_checkpoint(path: impl AsRef<Path>) -> Result<EmbeddingModel, CheckpointError> {
    let file = File::open(path)?;
    let mut r = Counting::new(BufReader::new(file));

    let mut magic = [0u8; CHECKPOINT_MAGIC.len()];
    r.read_exact(&mut magic).map_err(|e| {
        if e.kind() == io::ErrorKind::UnexpectedEof {
            fmt_err(0, "file too short to hold the magic bytes")
        } else {
            CheckpointError::Io(e)
        }
    })?;
    if magic != CHECKPOINT_MAGIC {
        return Err(fmt_err(0, "not a checkpoint file (bad magic bytes)"));
    }

    let (hdr_off, header) = read_line(&mut r, "the header")?;
    let mut dim: Option<usize> = None;
    let mut counts: Option<Vec<usize>> = None;
    let mut relations: Option<usize> = None;
    for field in header.split(' ') {
        let (k, v) = field
            .split_once('=')
            .ok_or_else(|| fmt_err(hdr_off, format!("malformed header field {field:?}")))?;
        match k {
            "dim" => {
                dim = Some(v.parse().map_err(|_| {
                    fmt_err(hdr_off, format!("invalid dimension {v:?} in the header"))
                })?);
            }
            "types" => {
                let parsed: Result<Vec<usize>, _> = v.split(',').map(str::parse).collect();
                counts = Some(parsed.map_err(|_| {
                    fmt_err(hdr_off, format!("invalid type counts {v:?} in the header"))
                })?);
            }
            "relations" => {
                relations = Some(v.parse().map_err(|_| {
                    fmt_err(hdr_off, format!("invalid relation count {v:?} in the header"))
                })?);
            }
            other => {
                return Err(fmt_err(hdr_off, format!("unknown header field {other:?}")));
            }
        }
    }
    let dim = dim.ok_or_else(|| fmt_err(hdr_off, "header is missing the dim field"))?;
    let counts = counts.ok_or_else(|| fmt_err(hdr_off, "header is missing the types field"))?;
    let relations =
        relations.ok_or_else(|| fmt_err(hdr_off, "header is missing the relations field"))?;
    if dim == 0 {
        return Err(fmt_err(hdr_off, "dimension must be at least 1"));
    }
    if counts.len() != EntityType::ALL.len() {
        return Err(fmt_err(
            hdr_off,
            format!("expected {} type counts, found {}", EntityType::ALL.len(), counts.len()),
        ));
    }
    if relations != RelationType::ALL.len() {
        return Err(fmt_err(
            hdr_off,
            format!("expected {} relations, found {relations}", RelationType::ALL.len()),
        ));
    }

    let mut per_type: [Vocabulary; 5] = Default::default();
    for t in EntityType::ALL {
        let count = counts[t as usize];
        let mut keys = Vec::with_capacity(count);
        let mut seen = HashSet::with_capacity(count);
        for i in 0..count {
            let (off, line) = read_line(&mut r, "a vocabulary entry")?;
            let mut parts = line.splitn(3, '\t');
            let (Some(ty), Some(idx), Some(key)) = (parts.next(), parts.next(), parts.next())
            else {
                return Err(fmt_err(off, "vocabulary line needs three tab-separated fields"));
            };
            if ty != t.name() {
                return Err(fmt_err(off, format!("expected a {t} entry, found type {ty:?}")));
            }
            let idx: usize = idx
                .parse()
                .map_err(|_| fmt_err(off, format!("invalid vocabulary index {idx:?}")))?;
            if idx != i {
                return Err(fmt_err(off, format!("expected index {i}, found {idx}")));
            }
            if key.is_empty() {
                return Err(fmt_err(off, "empty vocabulary key"));
            }
            if !seen.insert(key.to_string()) {
                return Err(fmt_err(off, format!("duplicate {t} key {key:?}")));
            }
            keys.push(key.to_string());
        }
        per_type[t as usize] =
            Vocabulary::from_keys(keys).expect("duplicates were rejected line by line");
    }

    let mut entity_vecs: [Vec<f64>; 5] = Default::default();
    for t in EntityType::ALL {
        entity_vecs[t as usize] = read_matrix(&mut r, counts[t as usize] * dim, t.name())?;
    }
    let relation_vecs = read_matrix(&mut r, RelationType::ALL.len() * dim, "relation")?;

    let offset = r.offset;
    if !r.fill_buf()?.is_empty() {
        return Err(fmt_err(offset, "trailing bytes after the final matrix"));
    }

    Ok(EmbeddingModel::from_parts(
        dim,
        Vocabularies::from_parts(per_type),
        entity_vecs,
        relation_vecs,
    ))
}
