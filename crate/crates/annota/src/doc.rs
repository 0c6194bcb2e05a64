//! Document model shared by all annotators: source text, tokens, sentence
//! spans and per-token annotation layers.
//!
//! All offsets are expressed in Unicode scalar values (`char` positions),
//! not bytes, so they stay stable across encodings. Writers that serialize
//! offsets document this convention.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::lemma::LemmaDecision;
use crate::morph::MorphAnalysis;

/// Half-open character span `[begin, end)` into a document's text.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Span {
    pub begin: usize,
    pub end: usize,
}

impl Span {
    pub fn new(begin: usize, end: usize) -> Self {
        Span { begin, end }
    }

    pub fn len(&self) -> usize {
        self.end.saturating_sub(self.begin)
    }

    pub fn is_empty(&self) -> bool {
        self.end <= self.begin
    }
}

/// Kind of regular-expression pattern that produced a merged token.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PatternKind {
    Email,
    Url,
    Number,
    Date,
}

impl PatternKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            PatternKind::Email => "email",
            PatternKind::Url => "url",
            PatternKind::Number => "number",
            PatternKind::Date => "date",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        match s {
            "email" => Some(PatternKind::Email),
            "url" => Some(PatternKind::Url),
            "number" => Some(PatternKind::Number),
            "date" => Some(PatternKind::Date),
            _ => None,
        }
    }
}

/// Inclusive token-index range `[first, last]` forming one sentence.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SentenceSpan {
    pub first: usize,
    pub last: usize,
}

impl SentenceSpan {
    pub fn new(first: usize, last: usize) -> Self {
        SentenceSpan { first, last }
    }

    pub fn token_count(&self) -> usize {
        self.last - self.first + 1
    }
}

/// One token: a character span into the source text plus annotation layers.
///
/// The `pos`, `lemma` and `morph` layers are absent until the corresponding
/// annotator has run. Plugin annotators may attach additional string layers
/// through [`Token::set_extra`].
#[derive(Clone, Debug, PartialEq)]
pub struct Token {
    index: usize,
    begin: usize,
    end: usize,
    surface: String,
    pos: Option<String>,
    lemma: Option<LemmaDecision>,
    morph: Option<Vec<MorphAnalysis>>,
    is_abbreviation: bool,
    pattern_kind: Option<PatternKind>,
    extra: BTreeMap<String, String>,
}

impl Token {
    pub fn new(index: usize, begin: usize, end: usize, surface: impl Into<String>) -> Self {
        Token {
            index,
            begin,
            end,
            surface: surface.into(),
            pos: None,
            lemma: None,
            morph: None,
            is_abbreviation: false,
            pattern_kind: None,
            extra: BTreeMap::new(),
        }
    }

    pub fn index(&self) -> usize {
        self.index
    }

    pub fn begin(&self) -> usize {
        self.begin
    }

    pub fn end(&self) -> usize {
        self.end
    }

    pub fn span(&self) -> Span {
        Span::new(self.begin, self.end)
    }

    pub fn surface(&self) -> &str {
        &self.surface
    }

    pub fn pos(&self) -> Option<&str> {
        self.pos.as_deref()
    }

    pub fn set_pos(&mut self, pos: impl Into<String>) {
        self.pos = Some(pos.into());
    }

    pub fn lemma(&self) -> Option<&str> {
        self.lemma.as_ref().map(|d| d.lemma.as_str())
    }

    pub fn lemma_decision(&self) -> Option<&LemmaDecision> {
        self.lemma.as_ref()
    }

    pub fn set_lemma(&mut self, decision: LemmaDecision) {
        self.lemma = Some(decision);
    }

    pub fn morph(&self) -> Option<&[MorphAnalysis]> {
        self.morph.as_deref()
    }

    pub fn set_morph(&mut self, analyses: Vec<MorphAnalysis>) {
        self.morph = Some(analyses);
    }

    pub fn is_abbreviation(&self) -> bool {
        self.is_abbreviation
    }

    pub fn set_abbreviation(&mut self, flag: bool) {
        self.is_abbreviation = flag;
    }

    pub fn pattern_kind(&self) -> Option<PatternKind> {
        self.pattern_kind
    }

    pub fn set_pattern_kind(&mut self, kind: PatternKind) {
        self.pattern_kind = Some(kind);
    }

    pub fn extra(&self, layer: &str) -> Option<&str> {
        self.extra.get(layer).map(|s| s.as_str())
    }

    pub fn set_extra(&mut self, layer: impl Into<String>, value: impl Into<String>) {
        self.extra.insert(layer.into(), value.into());
    }

    pub fn extra_layers(&self) -> impl Iterator<Item = &str> {
        self.extra.keys().map(|k| k.as_str())
    }

    pub(crate) fn set_index(&mut self, index: usize) {
        self.index = index;
    }

    /// Shifts both offsets by `delta` characters. Used when re-basing
    /// chunked output onto a larger input stream.
    pub fn shift(&mut self, delta: usize) {
        self.begin += delta;
        self.end += delta;
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DocumentError {
    #[error("token {index} has empty or inverted span {begin}..{end}")]
    BadSpan { index: usize, begin: usize, end: usize },
    #[error("token {index} overlaps or precedes the previous token")]
    Unordered { index: usize },
    #[error("token {index} surface {surface:?} does not match text slice {slice:?}")]
    SurfaceMismatch {
        index: usize,
        surface: String,
        slice: String,
    },
    #[error("token {index} span {begin}..{end} exceeds text length {len}")]
    OutOfBounds {
        index: usize,
        begin: usize,
        end: usize,
        len: usize,
    },
    #[error("sentence {index} is empty or inverted")]
    EmptySentence { index: usize },
    #[error("sentence spans do not partition the token list at sentence {index}")]
    SentenceGap { index: usize },
}

/// Annotated document: the source text plus ordered tokens and sentences.
///
/// Consecutive tokens never overlap, every token surface equals the exact
/// text slice it covers, and sentence spans partition the token list once
/// sentence splitting has run. [`Document::set_tokens`] and
/// [`Document::set_sentences`] enforce these invariants.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Document {
    text: String,
    tokens: Vec<Token>,
    sentences: Vec<SentenceSpan>,
    meta: BTreeMap<String, String>,
}

impl Document {
    pub fn new(text: impl Into<String>) -> Self {
        Document {
            text: text.into(),
            tokens: Vec::new(),
            sentences: Vec::new(),
            meta: BTreeMap::new(),
        }
    }

    pub fn text(&self) -> &str {
        &self.text
    }

    pub fn char_len(&self) -> usize {
        self.text.chars().count()
    }

    pub fn tokens(&self) -> &[Token] {
        &self.tokens
    }

    pub fn tokens_mut(&mut self) -> &mut [Token] {
        &mut self.tokens
    }

    pub fn sentences(&self) -> &[SentenceSpan] {
        &self.sentences
    }

    pub fn meta(&self) -> &BTreeMap<String, String> {
        &self.meta
    }

    pub fn set_meta(&mut self, key: impl Into<String>, value: impl Into<String>) {
        self.meta.insert(key.into(), value.into());
    }

    /// Replaces the token list, re-numbering indices and validating the
    /// ordering and surface-fidelity invariants in one pass over the text.
    pub fn set_tokens(&mut self, mut tokens: Vec<Token>) -> Result<(), DocumentError> {
        let mut prev_end = 0usize;
        for (i, tok) in tokens.iter_mut().enumerate() {
            tok.set_index(i);
            if tok.begin >= tok.end || tok.surface.is_empty() {
                return Err(DocumentError::BadSpan {
                    index: i,
                    begin: tok.begin,
                    end: tok.end,
                });
            }
            if tok.begin < prev_end {
                return Err(DocumentError::Unordered { index: i });
            }
            prev_end = tok.end;
        }

        // The error path may slice again; only the happy path must stay
        // linear.
        let mismatch = |text: &str, tok: &Token| DocumentError::SurfaceMismatch {
            index: tok.index,
            surface: tok.surface.clone(),
            slice: slice_chars(text, tok.begin, tok.end).to_string(),
        };
        let mut ti = 0usize;
        let mut surface = tokens.first().map(|t| t.surface.chars());
        let mut char_count = 0usize;
        for (pos, ch) in self.text.chars().enumerate() {
            char_count = pos + 1;
            if ti >= tokens.len() {
                continue;
            }
            let tok = &tokens[ti];
            if pos < tok.begin {
                continue;
            }
            match surface.as_mut().and_then(|s| s.next()) {
                Some(expected) if expected == ch => {}
                _ => return Err(mismatch(&self.text, tok)),
            }
            if pos + 1 == tok.end {
                if surface.as_mut().is_some_and(|s| s.next().is_some()) {
                    return Err(mismatch(&self.text, tok));
                }
                ti += 1;
                surface = tokens.get(ti).map(|t| t.surface.chars());
            }
        }
        if ti < tokens.len() {
            let tok = &tokens[ti];
            return Err(DocumentError::OutOfBounds {
                index: tok.index,
                begin: tok.begin,
                end: tok.end,
                len: char_count,
            });
        }
        self.tokens = tokens;
        self.sentences.clear();
        Ok(())
    }

    /// Replaces the sentence spans, validating that they are non-empty and
    /// partition the token list without gaps or overlaps.
    pub fn set_sentences(&mut self, spans: Vec<SentenceSpan>) -> Result<(), DocumentError> {
        let mut next = 0usize;
        for (i, s) in spans.iter().enumerate() {
            if s.last < s.first {
                return Err(DocumentError::EmptySentence { index: i });
            }
            if s.first != next {
                return Err(DocumentError::SentenceGap { index: i });
            }
            next = s.last + 1;
        }
        if next != self.tokens.len() && !spans.is_empty() {
            return Err(DocumentError::SentenceGap { index: spans.len() });
        }
        if spans.is_empty() && !self.tokens.is_empty() {
            self.sentences = spans;
            return Ok(());
        }
        self.sentences = spans;
        Ok(())
    }

    /// Tokens of one sentence span.
    pub fn sentence_tokens(&self, sentence: &SentenceSpan) -> &[Token] {
        &self.tokens[sentence.first..=sentence.last]
    }

    /// Names of every annotation layer populated on at least one token
    /// (or at document level for `tokens`/`sentences`).
    pub fn populated_layers(&self) -> BTreeSet<String> {
        let mut layers = BTreeSet::new();
        if !self.tokens.is_empty() {
            layers.insert("tokens".to_string());
        }
        if !self.sentences.is_empty() {
            layers.insert("sentences".to_string());
        }
        for tok in &self.tokens {
            if tok.pos.is_some() {
                layers.insert("pos".to_string());
            }
            if tok.lemma.is_some() {
                layers.insert("lemma".to_string());
            }
            if tok.morph.is_some() {
                layers.insert("morph".to_string());
            }
            for k in tok.extra.keys() {
                layers.insert(k.clone());
            }
        }
        layers
    }

    /// Full invariant check, useful in tests and after plugin annotators.
    pub fn validate(&self) -> Result<(), DocumentError> {
        let tokens = self.tokens.clone();
        let sentences = self.sentences.clone();
        let mut probe = Document::new(self.text.clone());
        probe.set_tokens(tokens)?;
        probe.set_sentences(sentences)?;
        Ok(())
    }
}

/// Slices `text` by character offsets. O(n) in the prefix length; fine for
/// validation and tests, hot paths precompute byte offsets instead.
pub fn slice_chars(text: &str, begin: usize, end: usize) -> &str {
    let mut iter = text.char_indices();
    let start_byte = iter
        .by_ref()
        .nth(begin)
        .map(|(b, _)| b)
        .unwrap_or(text.len());
    if end <= begin {
        return &text[start_byte..start_byte];
    }
    let mut end_byte = text.len();
    for (count, (b, _)) in text.char_indices().enumerate() {
        if count == end {
            end_byte = b;
            break;
        }
    }
    &text[start_byte..end_byte]
}
