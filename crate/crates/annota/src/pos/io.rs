//! Model persistence.
//!
//! Layout (little-endian; full byte map in `docs/model-format.md`):
//!
//! ```text
//! "POSM" | version u16 | template_version u16 | epochs u32 |
//! corpus_sha256 [32] | tag_count u32 | tags: (len u16 | utf8)* |
//! feature_count u64 | features sorted by byte order:
//!     (len u16 | utf8 | nnz u32 | (tag_index u16 | weight f64)*)*
//! ```
//!
//! Weight rows are stored sparsely; weights are IEEE 754 doubles, so
//! save∘load is the identity on weights and tagset and a saved model
//! re-saves byte-identically.

use std::collections::HashMap;
use std::fs;
use std::path::Path;

use thiserror::Error;

use crate::pos::TaggerModel;

pub const MODEL_MAGIC: &[u8; 4] = b"POSM";
pub const MODEL_VERSION: u16 = 1;

#[derive(Debug, Error)]
pub enum ModelIoError {
    #[error("failed to read or write model file")]
    Io(#[from] std::io::Error),
    #[error("not a tagger model (bad magic bytes)")]
    BadMagic,
    #[error("unsupported model version {0}")]
    UnsupportedVersion(u16),
    #[error("model was trained with feature template {found}, this build uses {expected}")]
    TemplateMismatch { found: u16, expected: u16 },
    #[error("model file is truncated or malformed ({0})")]
    Truncated(&'static str),
    #[error("pos annotator needs a trained model: set the `model` property")]
    MissingModelPath,
}

struct Reader<'a> {
    data: &'a [u8],
    at: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize, what: &'static str) -> Result<&'a [u8], ModelIoError> {
        if self.at + n > self.data.len() {
            return Err(ModelIoError::Truncated(what));
        }
        let slice = &self.data[self.at..self.at + n];
        self.at += n;
        Ok(slice)
    }

    fn u16(&mut self, what: &'static str) -> Result<u16, ModelIoError> {
        Ok(u16::from_le_bytes(self.take(2, what)?.try_into().unwrap()))
    }

    fn u32(&mut self, what: &'static str) -> Result<u32, ModelIoError> {
        Ok(u32::from_le_bytes(self.take(4, what)?.try_into().unwrap()))
    }

    fn u64(&mut self, what: &'static str) -> Result<u64, ModelIoError> {
        Ok(u64::from_le_bytes(self.take(8, what)?.try_into().unwrap()))
    }

    fn f64(&mut self, what: &'static str) -> Result<f64, ModelIoError> {
        Ok(f64::from_le_bytes(self.take(8, what)?.try_into().unwrap()))
    }

    fn string(&mut self, what: &'static str) -> Result<String, ModelIoError> {
        let len = self.u16(what)? as usize;
        let bytes = self.take(len, what)?;
        String::from_utf8(bytes.to_vec()).map_err(|_| ModelIoError::Truncated(what))
    }
}

impl TaggerModel {
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        out.extend_from_slice(MODEL_MAGIC);
        out.extend_from_slice(&MODEL_VERSION.to_le_bytes());
        out.extend_from_slice(&self.template_version().to_le_bytes());
        out.extend_from_slice(&self.epochs().to_le_bytes());
        out.extend_from_slice(self.corpus_checksum());
        out.extend_from_slice(&(self.tagset().len() as u32).to_le_bytes());
        for tag in self.tagset() {
            out.extend_from_slice(&(tag.len() as u16).to_le_bytes());
            out.extend_from_slice(tag.as_bytes());
        }
        let mut features: Vec<&String> = self.weights().keys().collect();
        features.sort();
        out.extend_from_slice(&(features.len() as u64).to_le_bytes());
        for feature in features {
            let row = &self.weights()[feature];
            out.extend_from_slice(&(feature.len() as u16).to_le_bytes());
            out.extend_from_slice(feature.as_bytes());
            let nonzero: Vec<(u16, f64)> = row
                .iter()
                .enumerate()
                .filter(|(_, w)| **w != 0.0)
                .map(|(i, w)| (i as u16, *w))
                .collect();
            out.extend_from_slice(&(nonzero.len() as u32).to_le_bytes());
            for (tag_index, weight) in nonzero {
                out.extend_from_slice(&tag_index.to_le_bytes());
                out.extend_from_slice(&weight.to_le_bytes());
            }
        }
        out
    }

    pub fn from_bytes(data: &[u8]) -> Result<Self, ModelIoError> {
        let mut r = Reader { data, at: 0 };
        if r.take(4, "magic")? != MODEL_MAGIC {
            return Err(ModelIoError::BadMagic);
        }
        let version = r.u16("version")?;
        if version != MODEL_VERSION {
            return Err(ModelIoError::UnsupportedVersion(version));
        }
        let template_version = r.u16("template version")?;
        if template_version != crate::pos::TEMPLATE_VERSION {
            return Err(ModelIoError::TemplateMismatch {
                found: template_version,
                expected: crate::pos::TEMPLATE_VERSION,
            });
        }
        let epochs = r.u32("epochs")?;
        let corpus_checksum: [u8; 32] = r
            .take(32, "corpus checksum")?
            .try_into()
            .expect("fixed width");
        let tag_count = r.u32("tag count")? as usize;
        let mut tagset = Vec::with_capacity(tag_count);
        for _ in 0..tag_count {
            tagset.push(r.string("tag")?);
        }
        let feature_count = r.u64("feature count")? as usize;
        let mut weights = HashMap::with_capacity(feature_count);
        for _ in 0..feature_count {
            let feature = r.string("feature")?;
            let nnz = r.u32("weight count")? as usize;
            let mut row = vec![0.0f64; tag_count];
            for _ in 0..nnz {
                let tag_index = r.u16("tag index")? as usize;
                let weight = r.f64("weight")?;
                if tag_index >= tag_count {
                    return Err(ModelIoError::Truncated("tag index out of range"));
                }
                row[tag_index] = weight;
            }
            weights.insert(feature, row);
        }
        if r.at != data.len() {
            return Err(ModelIoError::Truncated("trailing bytes"));
        }
        Ok(TaggerModel::from_parts(
            tagset,
            template_version,
            epochs,
            corpus_checksum,
            weights,
        ))
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), ModelIoError> {
        fs::write(path, self.to_bytes())?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, ModelIoError> {
        let data = fs::read(path)?;
        Self::from_bytes(&data)
    }
}
