//! CoNLL-U reading/writing and a line-oriented JSON document dump.
//!
//! CoNLL-U follows the Universal Dependencies 10-column TSV layout. The
//! JSON dump is the offset-bearing machine format (CoNLL has no offsets);
//! offsets are Unicode scalar values. Its schema is documented in
//! `docs/document.schema.json`.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::Serialize;
use thiserror::Error;

use crate::doc::Document;
use crate::morph::{Decomposition, MorphAnalysis};

#[derive(Debug, Error)]
pub enum ConlluError {
    #[error("failed to read file")]
    Io(#[from] std::io::Error),
    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },
}

/// Row id: plain word, multiword range (`4-5`) or empty node (`8.1`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RowId {
    Plain(u32),
    Range(u32, u32),
    Empty(u32, u32),
}

impl RowId {
    fn parse(s: &str) -> Option<RowId> {
        if let Some((a, b)) = s.split_once('-') {
            return Some(RowId::Range(a.parse().ok()?, b.parse().ok()?));
        }
        if let Some((a, b)) = s.split_once('.') {
            return Some(RowId::Empty(a.parse().ok()?, b.parse().ok()?));
        }
        s.parse().ok().map(RowId::Plain)
    }

    fn render(&self) -> String {
        match self {
            RowId::Plain(n) => n.to_string(),
            RowId::Range(a, b) => format!("{a}-{b}"),
            RowId::Empty(a, b) => format!("{a}.{b}"),
        }
    }
}

/// One CoNLL-U row; empty columns hold `_`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConlluRow {
    pub id: RowId,
    pub form: String,
    pub lemma: String,
    pub upos: String,
    pub xpos: String,
    pub feats: String,
    pub head: String,
    pub deprel: String,
    pub deps: String,
    pub misc: String,
}

impl ConlluRow {
    pub fn word(index: u32, form: impl Into<String>) -> Self {
        ConlluRow {
            id: RowId::Plain(index),
            form: form.into(),
            lemma: "_".into(),
            upos: "_".into(),
            xpos: "_".into(),
            feats: "_".into(),
            head: "_".into(),
            deprel: "_".into(),
            deps: "_".into(),
            misc: "_".into(),
        }
    }

    /// Plain single-word row (not a range or empty node).
    pub fn is_word(&self) -> bool {
        matches!(self.id, RowId::Plain(_))
    }

    fn render(&self) -> String {
        [
            self.id.render().as_str(),
            &self.form,
            &self.lemma,
            &self.upos,
            &self.xpos,
            &self.feats,
            &self.head,
            &self.deprel,
            &self.deps,
            &self.misc,
        ]
        .join("\t")
    }
}

/// One sentence: comment lines plus rows. Multiword range rows are
/// preserved verbatim but excluded from word counts.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ConlluSentence {
    pub comments: Vec<String>,
    pub rows: Vec<ConlluRow>,
}

impl ConlluSentence {
    /// Plain word rows, in order.
    pub fn words(&self) -> impl Iterator<Item = &ConlluRow> {
        self.rows.iter().filter(|r| r.is_word())
    }

    pub fn word_count(&self) -> usize {
        self.words().count()
    }
}

/// Parses CoNLL-U text: sentences split on blank lines, comments attached
/// to the following sentence, exactly 10 columns per row, plain ids
/// consecutive from 1. Fails fast on the first malformed line.
pub fn read_conllu_str(text: &str) -> Result<Vec<ConlluSentence>, ConlluError> {
    let mut sentences = Vec::new();
    let mut current = ConlluSentence::default();
    let mut expected_id = 1u32;

    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim_end_matches(['\r']);
        let err = |reason: &str| ConlluError::Parse {
            line: lineno + 1,
            reason: reason.to_string(),
        };
        if line.is_empty() {
            if !current.rows.is_empty() {
                sentences.push(std::mem::take(&mut current));
                expected_id = 1;
            } else {
                // Comment-only blocks are tolerated and dropped.
                current.comments.clear();
            }
            continue;
        }
        if line.starts_with('#') {
            current.comments.push(line.to_string());
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 10 {
            return Err(err(&format!("expected 10 columns, found {}", fields.len())));
        }
        if fields.iter().any(|f| f.is_empty()) {
            return Err(err("empty column"));
        }
        let id = RowId::parse(fields[0]).ok_or_else(|| err("unparseable id column"))?;
        if let RowId::Plain(n) = id {
            if n != expected_id {
                return Err(err(&format!(
                    "word ids must be consecutive: expected {expected_id}, found {n}"
                )));
            }
            expected_id += 1;
        }
        current.rows.push(ConlluRow {
            id,
            form: fields[1].to_string(),
            lemma: fields[2].to_string(),
            upos: fields[3].to_string(),
            xpos: fields[4].to_string(),
            feats: fields[5].to_string(),
            head: fields[6].to_string(),
            deprel: fields[7].to_string(),
            deps: fields[8].to_string(),
            misc: fields[9].to_string(),
        });
    }
    if !current.rows.is_empty() {
        sentences.push(current);
    }
    Ok(sentences)
}

pub fn read_conllu(path: impl AsRef<Path>) -> Result<Vec<ConlluSentence>, ConlluError> {
    let text = fs::read_to_string(path)?;
    read_conllu_str(&text)
}

/// Renders sentences back to CoNLL-U text. `read_conllu_str ∘ render` is
/// the identity on well-formed input modulo trailing whitespace.
pub fn render_conllu(sentences: &[ConlluSentence]) -> String {
    let mut out = String::new();
    for sent in sentences {
        for comment in &sent.comments {
            out.push_str(comment);
            out.push('\n');
        }
        for row in &sent.rows {
            out.push_str(&row.render());
            out.push('\n');
        }
        out.push('\n');
    }
    out
}

/// Writes a tokenized document as CoNLL rows: index within sentence,
/// surface, lemma, UPOS, remaining columns `_`. Each sentence block ends
/// with a blank line; byte-deterministic. A tokenized document without
/// sentence spans is written as one sentence.
pub fn write_conll(doc: &Document) -> String {
    let mut out = String::new();
    let sentence_ranges: Vec<(usize, usize)> = if doc.sentences().is_empty() {
        if doc.tokens().is_empty() {
            Vec::new()
        } else {
            vec![(0, doc.tokens().len() - 1)]
        }
    } else {
        doc.sentences().iter().map(|s| (s.first, s.last)).collect()
    };
    for (first, last) in sentence_ranges {
        for (offset, tok) in doc.tokens()[first..=last].iter().enumerate() {
            let _ = writeln!(
                out,
                "{}\t{}\t{}\t{}\t_\t_\t_\t_\t_\t_",
                offset + 1,
                tok.surface(),
                tok.lemma().unwrap_or("_"),
                tok.pos().unwrap_or("_"),
            );
        }
        out.push('\n');
    }
    out
}

#[derive(Serialize)]
struct JsonDoc<'a> {
    text: &'a str,
    sentences: Vec<JsonSentence>,
    tokens: Vec<JsonToken<'a>>,
}

#[derive(Serialize)]
struct JsonSentence {
    first: usize,
    last: usize,
}

#[derive(Serialize)]
struct JsonToken<'a> {
    begin: usize,
    end: usize,
    surface: &'a str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pos: Option<&'a str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    lemma: Option<&'a str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    morph: Option<Vec<JsonAnalysis<'a>>>,
}

#[derive(Serialize)]
struct JsonAnalysis<'a> {
    lemma: &'a str,
    category: &'a str,
    features: &'a std::collections::BTreeMap<String, String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    decomposition: Option<JsonDecomposition<'a>>,
}

#[derive(Serialize)]
struct JsonDecomposition<'a> {
    #[serde(skip_serializing_if = "Option::is_none")]
    prefix: Option<&'a str>,
    root: &'a str,
    infixes: &'a [String],
    #[serde(skip_serializing_if = "Option::is_none")]
    suffix: Option<&'a str>,
    root_lemma: &'a str,
}

fn json_analysis(a: &MorphAnalysis) -> JsonAnalysis<'_> {
    JsonAnalysis {
        lemma: &a.lemma,
        category: a.category.as_str(),
        features: &a.features,
        decomposition: a.derivation.as_ref().map(|d: &Decomposition| JsonDecomposition {
            prefix: d.prefix.as_deref(),
            root: &d.root,
            infixes: &d.infixes,
            suffix: d.suffix.as_deref(),
            root_lemma: &d.root_analysis.lemma,
        }),
    }
}

/// One-line JSON dump with character offsets; stable key ordering, no
/// trailing newline. Offsets can be re-based for chunked streams.
pub fn write_json(doc: &Document) -> String {
    write_json_rebased(doc, 0)
}

/// Like [`write_json`] but adds `offset_base` to every token span, for
/// callers that chunk a larger stream (the `text` field still holds the
/// chunk).
pub fn write_json_rebased(doc: &Document, offset_base: usize) -> String {
    let json = JsonDoc {
        text: doc.text(),
        sentences: doc
            .sentences()
            .iter()
            .map(|s| JsonSentence {
                first: s.first,
                last: s.last,
            })
            .collect(),
        tokens: doc
            .tokens()
            .iter()
            .map(|t| JsonToken {
                begin: t.begin() + offset_base,
                end: t.end() + offset_base,
                surface: t.surface(),
                pos: t.pos(),
                lemma: t.lemma(),
                morph: t.morph().map(|m| m.iter().map(json_analysis).collect()),
            })
            .collect(),
    };
    serde_json::to_string(&json).expect("document serializes")
}
