//! Immutable sorted on-disk lexicon store.
//!
//! Layout (all integers little-endian; full byte map in
//! `docs/store-format.md`):
//!
//! ```text
//! header   "MLEX" | version u16 | entry_count u64 | source_sha256 [32] | block_size u32
//! blocks   entries sorted by key byte order, packed into ~4 KiB blocks:
//!          key_len u16 | key | value_len u32 | value
//! index    block_count u32, then per block: key_len u16 | first_key |
//!          offset u64 | length u32
//! footer   index_offset u64 | index_length u64 | content_sha256 [32]
//! ```
//!
//! The whole file is read into memory on open; lookups binary-search the
//! sparse index, then scan one block. The file is never mutated after
//! compilation.

use std::fs;
use std::io::{BufRead, BufReader};
use std::path::Path;

use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::morph::tags::TagGrammar;
use crate::morph::{MorphAnalysis, MorphCategory};

pub const STORE_MAGIC: &[u8; 4] = b"MLEX";
pub const STORE_VERSION: u16 = 1;
pub const BLOCK_SIZE: usize = 4096;

const HEADER_LEN: usize = 4 + 2 + 8 + 32 + 4;
const FOOTER_LEN: usize = 8 + 8 + 32;

/// Case handling for lookups. `FoldFirst` retries with the initial
/// character lowercased (sentence-initial capitalization); `FoldAll`
/// retries fully lowercased.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CasePolicy {
    Exact,
    FoldFirst,
    FoldAll,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StoreHeader {
    pub version: u16,
    pub entry_count: u64,
    pub source_checksum: [u8; 32],
    pub block_size: u32,
}

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("failed to read store file")]
    Io(#[from] std::io::Error),
    #[error("not a lexicon store (bad magic bytes)")]
    BadMagic,
    #[error("unsupported store version {0}")]
    UnsupportedVersion(u16),
    #[error("store is corrupt: {0}")]
    Corrupt(String),
}

#[derive(Debug, Error)]
pub enum CompileError {
    #[error("failed to read lexicon input")]
    Io(#[from] std::io::Error),
    #[error("{malformed} of {total} lines are malformed (more than 10%)")]
    TooManyMalformed { malformed: usize, total: usize },
}

/// Outcome of compiling a lexicon: the written header plus the malformed
/// lines that were skipped.
#[derive(Clone, Debug)]
pub struct CompileReport {
    pub header: StoreHeader,
    pub malformed_lines: Vec<usize>,
    pub total_lines: usize,
}

struct IndexEntry {
    key_start: usize,
    key_len: usize,
    block_off: usize,
    block_len: usize,
}

/// Immutable sorted surface-form → analyses map, backed by one file.
pub struct LexiconStore {
    data: Vec<u8>,
    index: Vec<IndexEntry>,
    header: StoreHeader,
}

impl std::fmt::Debug for LexiconStore {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("LexiconStore")
            .field("entries", &self.header.entry_count)
            .field("blocks", &self.index.len())
            .field("bytes", &self.data.len())
            .finish()
    }
}

impl LexiconStore {
    pub fn open(path: impl AsRef<Path>) -> Result<Self, StoreError> {
        let data = fs::read(path)?;
        Self::from_bytes(data)
    }

    pub fn from_bytes(data: Vec<u8>) -> Result<Self, StoreError> {
        if data.len() < HEADER_LEN + FOOTER_LEN {
            return Err(StoreError::Corrupt("file shorter than header + footer".into()));
        }
        if &data[0..4] != STORE_MAGIC {
            return Err(StoreError::BadMagic);
        }
        let version = u16::from_le_bytes([data[4], data[5]]);
        if version != STORE_VERSION {
            return Err(StoreError::UnsupportedVersion(version));
        }
        let entry_count = u64::from_le_bytes(data[6..14].try_into().unwrap());
        let mut source_checksum = [0u8; 32];
        source_checksum.copy_from_slice(&data[14..46]);
        let block_size = u32::from_le_bytes(data[46..50].try_into().unwrap());

        let footer_start = data.len() - FOOTER_LEN;
        let index_off = u64::from_le_bytes(data[footer_start..footer_start + 8].try_into().unwrap())
            as usize;
        let index_len =
            u64::from_le_bytes(data[footer_start + 8..footer_start + 16].try_into().unwrap())
                as usize;
        let stored_sum = &data[footer_start + 16..footer_start + 48];
        if index_off
            .checked_add(index_len)
            .is_none_or(|end| end != footer_start)
        {
            return Err(StoreError::Corrupt("index does not abut the footer".into()));
        }
        let computed = Sha256::digest(&data[..footer_start]);
        if computed.as_slice() != stored_sum {
            return Err(StoreError::Corrupt("content checksum mismatch".into()));
        }

        let mut index = Vec::new();
        let mut at = index_off;
        let read_err = || StoreError::Corrupt("index entry out of bounds".into());
        if index_len < 4 {
            return Err(read_err());
        }
        let block_count = u32::from_le_bytes(data[at..at + 4].try_into().unwrap()) as usize;
        at += 4;
        for _ in 0..block_count {
            if at + 2 > footer_start {
                return Err(read_err());
            }
            let key_len = u16::from_le_bytes(data[at..at + 2].try_into().unwrap()) as usize;
            at += 2;
            if at + key_len + 12 > footer_start {
                return Err(read_err());
            }
            let key_start = at;
            at += key_len;
            let block_off = u64::from_le_bytes(data[at..at + 8].try_into().unwrap()) as usize;
            at += 8;
            let block_len = u32::from_le_bytes(data[at..at + 4].try_into().unwrap()) as usize;
            at += 4;
            if block_off < HEADER_LEN || block_off + block_len > index_off {
                return Err(read_err());
            }
            index.push(IndexEntry {
                key_start,
                key_len,
                block_off,
                block_len,
            });
        }

        Ok(LexiconStore {
            data,
            index,
            header: StoreHeader {
                version,
                entry_count,
                source_checksum,
                block_size,
            },
        })
    }

    pub fn header(&self) -> &StoreHeader {
        &self.header
    }

    /// Number of distinct surface forms.
    pub fn len(&self) -> u64 {
        self.header.entry_count
    }

    pub fn is_empty(&self) -> bool {
        self.header.entry_count == 0
    }

    pub fn block_count(&self) -> usize {
        self.index.len()
    }

    fn index_key(&self, i: usize) -> &[u8] {
        let e = &self.index[i];
        &self.data[e.key_start..e.key_start + e.key_len]
    }

    /// Binary search for the block that may hold `key`, counting index
    /// probes. Returns `None` when `key` sorts before every block.
    fn locate_block(&self, key: &[u8]) -> (Option<usize>, u32) {
        let mut probes = 0u32;
        let mut lo = 0usize;
        let mut hi = self.index.len();
        // Invariant: blocks [0, lo) have first_key <= key.
        while lo < hi {
            let mid = lo + (hi - lo) / 2;
            probes += 1;
            if self.index_key(mid) <= key {
                lo = mid + 1;
            } else {
                hi = mid;
            }
        }
        (lo.checked_sub(1), probes)
    }

    fn scan_block(&self, block: usize, key: &[u8]) -> Option<Vec<MorphAnalysis>> {
        let e = &self.index[block];
        let mut at = e.block_off;
        let end = e.block_off + e.block_len;
        while at < end {
            let key_len = u16::from_le_bytes(self.data[at..at + 2].try_into().unwrap()) as usize;
            at += 2;
            let entry_key = &self.data[at..at + key_len];
            at += key_len;
            let val_len = u32::from_le_bytes(self.data[at..at + 4].try_into().unwrap()) as usize;
            at += 4;
            match entry_key.cmp(key) {
                std::cmp::Ordering::Equal => {
                    return Some(decode_analyses(&self.data[at..at + val_len]));
                }
                std::cmp::Ordering::Greater => return None,
                std::cmp::Ordering::Less => at += val_len,
            }
        }
        None
    }

    fn get(&self, key: &str) -> Option<Vec<MorphAnalysis>> {
        let (block, _) = self.locate_block(key.as_bytes());
        block.and_then(|b| self.scan_block(b, key.as_bytes()))
    }

    /// Exact lookup with the index probe count, for instrumented tests of
    /// the O(log blocks) bound.
    pub fn lookup_with_probes(&self, key: &str) -> (Vec<MorphAnalysis>, u32) {
        let (block, probes) = self.locate_block(key.as_bytes());
        let found = block.and_then(|b| self.scan_block(b, key.as_bytes()));
        (found.unwrap_or_default(), probes)
    }

    /// Lookup under a case policy. Missing keys yield an empty list, never
    /// an error.
    pub fn lookup(&self, surface: &str, policy: CasePolicy) -> Vec<MorphAnalysis> {
        if let Some(found) = self.get(surface) {
            return found;
        }
        let retry = match policy {
            CasePolicy::Exact => None,
            CasePolicy::FoldFirst => fold_first(surface),
            CasePolicy::FoldAll => {
                let lower = surface.to_lowercase();
                (lower != surface).then_some(lower)
            }
        };
        retry.and_then(|k| self.get(&k)).unwrap_or_default()
    }

    /// All keys in on-disk order (strictly increasing byte order).
    pub fn keys(&self) -> impl Iterator<Item = &str> + '_ {
        self.index.iter().flat_map(move |e| {
            let mut at = e.block_off;
            let end = e.block_off + e.block_len;
            std::iter::from_fn(move || {
                if at >= end {
                    return None;
                }
                let key_len =
                    u16::from_le_bytes(self.data[at..at + 2].try_into().unwrap()) as usize;
                at += 2;
                let key = std::str::from_utf8(&self.data[at..at + key_len]).ok()?;
                at += key_len;
                let val_len =
                    u32::from_le_bytes(self.data[at..at + 4].try_into().unwrap()) as usize;
                at += 4 + val_len;
                Some(key)
            })
        })
    }
}

/// Lowercases the first character when that changes the string.
pub(crate) fn fold_first(s: &str) -> Option<String> {
    let first = s.chars().next()?;
    if !first.is_uppercase() {
        return None;
    }
    let mut folded = String::with_capacity(s.len());
    folded.extend(first.to_lowercase());
    folded.push_str(&s[first.len_utf8()..]);
    Some(folded)
}

fn encode_analyses(analyses: &[MorphAnalysis], out: &mut Vec<u8>) {
    out.extend_from_slice(&(analyses.len() as u16).to_le_bytes());
    for a in analyses {
        out.extend_from_slice(&(a.lemma.len() as u16).to_le_bytes());
        out.extend_from_slice(a.lemma.as_bytes());
        out.push(a.category.code());
        out.push(a.features.len() as u8);
        for (k, v) in &a.features {
            out.push(k.len() as u8);
            out.extend_from_slice(k.as_bytes());
            out.push(v.len() as u8);
            out.extend_from_slice(v.as_bytes());
        }
    }
}

fn decode_analyses(mut bytes: &[u8]) -> Vec<MorphAnalysis> {
    let count = u16::from_le_bytes(bytes[0..2].try_into().unwrap()) as usize;
    bytes = &bytes[2..];
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let lemma_len = u16::from_le_bytes(bytes[0..2].try_into().unwrap()) as usize;
        bytes = &bytes[2..];
        let lemma = String::from_utf8_lossy(&bytes[..lemma_len]).into_owned();
        bytes = &bytes[lemma_len..];
        let category = MorphCategory::from_code(bytes[0]).unwrap_or(MorphCategory::Other);
        let feat_count = bytes[1] as usize;
        bytes = &bytes[2..];
        let mut analysis = MorphAnalysis::new(lemma, category);
        for _ in 0..feat_count {
            let klen = bytes[0] as usize;
            let key = String::from_utf8_lossy(&bytes[1..1 + klen]).into_owned();
            bytes = &bytes[1 + klen..];
            let vlen = bytes[0] as usize;
            let value = String::from_utf8_lossy(&bytes[1..1 + vlen]).into_owned();
            bytes = &bytes[1 + vlen..];
            analysis.features.insert(key, value);
        }
        out.push(analysis);
    }
    out
}

/// Compiles TSV lines (`form<TAB>lemma<TAB>tagstring`) into store bytes.
/// Malformed lines are skipped and reported; more than 10% malformed is a
/// hard failure.
pub fn compile_lexicon_bytes(
    input: &str,
    grammar: &TagGrammar,
) -> Result<(Vec<u8>, CompileReport), CompileError> {
    compile_lines(input.lines().map(|l| l.to_string()), input.as_bytes(), grammar)
}

/// Compiles a lexicon file to `output`, returning the report.
pub fn compile_lexicon(
    input: impl AsRef<Path>,
    output: impl AsRef<Path>,
    grammar: &TagGrammar,
) -> Result<CompileReport, CompileError> {
    let raw = fs::read(input)?;
    let reader = BufReader::new(raw.as_slice());
    let lines: Vec<String> = reader.lines().collect::<Result<_, _>>()?;
    let (bytes, report) = compile_lines(lines.into_iter(), &raw, grammar)?;
    fs::write(output, bytes)?;
    Ok(report)
}

fn compile_lines(
    lines: impl Iterator<Item = String>,
    source_bytes: &[u8],
    grammar: &TagGrammar,
) -> Result<(Vec<u8>, CompileReport), CompileError> {
    let mut entries: std::collections::BTreeMap<String, Vec<MorphAnalysis>> =
        std::collections::BTreeMap::new();
    let mut malformed_lines = Vec::new();
    let mut total_lines = 0usize;

    for (lineno, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        total_lines += 1;
        let mut fields = line.split('\t');
        let (form, lemma, tag) = match (fields.next(), fields.next(), fields.next(), fields.next())
        {
            (Some(f), Some(l), Some(t), None) if !f.is_empty() && !l.is_empty() && !t.is_empty() => {
                (f, l, t)
            }
            _ => {
                malformed_lines.push(lineno + 1);
                continue;
            }
        };
        let analysis = grammar.analysis(lemma, tag);
        let list = entries.entry(form.to_string()).or_default();
        if !list.contains(&analysis) {
            list.push(analysis);
        }
    }

    if total_lines > 0 && malformed_lines.len() * 10 > total_lines {
        return Err(CompileError::TooManyMalformed {
            malformed: malformed_lines.len(),
            total: total_lines,
        });
    }

    let header = StoreHeader {
        version: STORE_VERSION,
        entry_count: entries.len() as u64,
        source_checksum: Sha256::digest(source_bytes).into(),
        block_size: BLOCK_SIZE as u32,
    };

    let mut out = Vec::new();
    out.extend_from_slice(STORE_MAGIC);
    out.extend_from_slice(&header.version.to_le_bytes());
    out.extend_from_slice(&header.entry_count.to_le_bytes());
    out.extend_from_slice(&header.source_checksum);
    out.extend_from_slice(&header.block_size.to_le_bytes());

    // Pack entries into blocks, remembering each block's first key.
    let mut blocks: Vec<(String, usize, usize)> = Vec::new(); // (first_key, off, len)
    let mut block_first: Option<String> = None;
    let mut block_start = out.len();
    let mut value_buf = Vec::new();
    for (key, analyses) in &entries {
        value_buf.clear();
        encode_analyses(analyses, &mut value_buf);
        let entry_len = 2 + key.len() + 4 + value_buf.len();
        if block_first.is_some() && out.len() - block_start + entry_len > BLOCK_SIZE {
            blocks.push((
                block_first.take().unwrap(),
                block_start,
                out.len() - block_start,
            ));
            block_start = out.len();
        }
        if block_first.is_none() {
            block_first = Some(key.clone());
        }
        out.extend_from_slice(&(key.len() as u16).to_le_bytes());
        out.extend_from_slice(key.as_bytes());
        out.extend_from_slice(&(value_buf.len() as u32).to_le_bytes());
        out.extend_from_slice(&value_buf);
    }
    if let Some(first) = block_first {
        blocks.push((first, block_start, out.len() - block_start));
    }

    let index_off = out.len();
    out.extend_from_slice(&(blocks.len() as u32).to_le_bytes());
    for (first, off, len) in &blocks {
        out.extend_from_slice(&(first.len() as u16).to_le_bytes());
        out.extend_from_slice(first.as_bytes());
        out.extend_from_slice(&(*off as u64).to_le_bytes());
        out.extend_from_slice(&(*len as u32).to_le_bytes());
    }
    let index_len = out.len() - index_off;

    let content_sum: [u8; 32] = Sha256::digest(&out).into();
    out.extend_from_slice(&(index_off as u64).to_le_bytes());
    out.extend_from_slice(&(index_len as u64).to_le_bytes());
    out.extend_from_slice(&content_sum);

    Ok((
        out,
        CompileReport {
            header,
            malformed_lines,
            total_lines,
        },
    ))
}
