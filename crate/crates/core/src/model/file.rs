//! Binary model container and plain-text export.
//!
//! Layout (all integers and floats in the byte order named by the tag):
//!
//! ```text
//! magic       8 bytes  "UKGMODEL"
//! version     u32
//! endianness  u8       0 = little, 1 = big
//! variant     u8       0 = logistic, 1 = rectifier
//! reserved    u16
//! dim         u64
//! entities    u64
//! relations   u64
//! entity hash 32 bytes (SHA-256 of the entity vocabulary)
//! relation hash 32 bytes
//! w, b        f64, f64
//! entity matrix   entities * dim f64, row-major
//! relation matrix relations * dim f64, row-major
//! ```

use std::io::{Read, Write};

use byteorder::{BigEndian, ByteOrder, LittleEndian, ReadBytesExt, WriteBytesExt};

use super::{ModelParams, Variant};
use crate::data::Vocabulary;
use crate::error::{Error, Result};

const MAGIC: &[u8; 8] = b"UKGMODEL";
pub const MODEL_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModelHeader {
    pub version: u32,
    pub variant: Variant,
    pub dim: usize,
    pub num_entities: usize,
    pub num_relations: usize,
    pub entity_hash: [u8; 32],
    pub relation_hash: [u8; 32],
}

impl ModelHeader {
    /// Fails unless both vocabulary hashes match `vocab`.
    pub fn check_vocabulary(&self, vocab: &Vocabulary) -> Result<()> {
        if self.entity_hash != vocab.entity_hash() || self.relation_hash != vocab.relation_hash() {
            return Err(Error::ModelFormat(
                "model was trained against a different vocabulary".into(),
            ));
        }
        Ok(())
    }
}

pub fn write_model<W: Write>(mut sink: W, params: &ModelParams, vocab: &Vocabulary) -> Result<()> {
    if params.num_entities() != vocab.num_entities()
        || params.num_relations() != vocab.num_relations()
    {
        return Err(Error::ModelFormat(format!(
            "model has {}x{} rows but vocabulary has {}x{}",
            params.num_entities(),
            params.num_relations(),
            vocab.num_entities(),
            vocab.num_relations()
        )));
    }
    sink.write_all(MAGIC)?;
    sink.write_u32::<LittleEndian>(MODEL_FORMAT_VERSION)?;
    sink.write_u8(0)?;
    sink.write_u8(match params.variant() {
        Variant::Logistic => 0,
        Variant::Rectifier => 1,
    })?;
    sink.write_u16::<LittleEndian>(0)?;
    for n in [params.dim(), params.num_entities(), params.num_relations()] {
        sink.write_u64::<LittleEndian>(n as u64)?;
    }
    sink.write_all(&vocab.entity_hash())?;
    sink.write_all(&vocab.relation_hash())?;
    sink.write_f64::<LittleEndian>(params.w)?;
    sink.write_f64::<LittleEndian>(params.b)?;
    let mut buf = vec![0u8; 8 * params.entities.len().max(params.relations.len())];
    for matrix in [&params.entities, &params.relations] {
        let bytes = &mut buf[..8 * matrix.len()];
        LittleEndian::write_f64_into(matrix, bytes);
        sink.write_all(bytes)?;
    }
    Ok(())
}

pub fn read_model<R: Read>(mut source: R) -> Result<(ModelHeader, ModelParams)> {
    let mut magic = [0u8; 8];
    source.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(Error::ModelFormat("bad magic; not a model file".into()));
    }
    let mut version_bytes = [0u8; 4];
    source.read_exact(&mut version_bytes)?;
    let endianness = source.read_u8()?;
    match endianness {
        0 => read_body::<LittleEndian, R>(source, LittleEndian::read_u32(&version_bytes)),
        1 => read_body::<BigEndian, R>(source, BigEndian::read_u32(&version_bytes)),
        other => Err(Error::ModelFormat(format!(
            "unknown endianness tag {other}"
        ))),
    }
}

fn read_body<B: ByteOrder, R: Read>(
    mut source: R,
    version: u32,
) -> Result<(ModelHeader, ModelParams)> {
    if version != MODEL_FORMAT_VERSION {
        return Err(Error::ModelFormat(format!(
            "unsupported format version {version}"
        )));
    }
    let variant = match source.read_u8()? {
        0 => Variant::Logistic,
        1 => Variant::Rectifier,
        other => return Err(Error::ModelFormat(format!("unknown variant tag {other}"))),
    };
    let _reserved = source.read_u16::<B>()?;
    let mut dims = [0usize; 3];
    for d in &mut dims {
        *d = usize::try_from(source.read_u64::<B>()?)
            .map_err(|_| Error::ModelFormat("dimension overflows usize".into()))?;
    }
    let [dim, num_entities, num_relations] = dims;
    if dim == 0 {
        return Err(Error::ModelFormat("zero embedding dimension".into()));
    }
    let mut entity_hash = [0u8; 32];
    let mut relation_hash = [0u8; 32];
    source.read_exact(&mut entity_hash)?;
    source.read_exact(&mut relation_hash)?;
    let w = source.read_f64::<B>()?;
    let b = source.read_f64::<B>()?;

    let mut read_matrix = |rows: usize| -> Result<Vec<f64>> {
        let len = rows
            .checked_mul(dim)
            .ok_or_else(|| Error::ModelFormat("matrix size overflows".into()))?;
        let mut values = vec![0.0; len];
        source.read_f64_into::<B>(&mut values)?;
        Ok(values)
    };
    let entities = read_matrix(num_entities)?;
    let relations = read_matrix(num_relations)?;
    let params = ModelParams::from_parts(dim, variant, entities, relations, w, b)
        .map_err(|e| Error::ModelFormat(e.to_string()))?;
    let header = ModelHeader {
        version,
        variant,
        dim,
        num_entities,
        num_relations,
        entity_hash,
        relation_hash,
    };
    Ok((header, params))
}

/// One line per entity and relation: `entity<TAB>name<TAB>v1 v2 ...`.
pub fn write_text_export<W: Write>(
    mut sink: W,
    params: &ModelParams,
    vocab: &Vocabulary,
) -> Result<()> {
    writeln!(
        sink,
        "# variant={} dim={} w={} b={}",
        params.variant(),
        params.dim(),
        params.w,
        params.b
    )?;
    let row = |values: &[f64]| {
        values
            .iter()
            .map(f64::to_string)
            .collect::<Vec<_>>()
            .join(" ")
    };
    for (id, name) in vocab.entities().enumerate() {
        writeln!(sink, "entity\t{name}\t{}", row(params.entity(id)))?;
    }
    for (id, name) in vocab.relations().enumerate() {
        writeln!(sink, "relation\t{name}\t{}", row(params.relation(id)))?;
    }
    Ok(())
}
