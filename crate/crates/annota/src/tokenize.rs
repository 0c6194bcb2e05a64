//! Two-pass tokenization and sentence splitting.
//!
//! The gross pass splits on whitespace and detaches every punctuation
//! character into its own proto-token. The merge pass reassembles runs of
//! adjacent proto-tokens that form an abbreviation from a configurable list
//! or match a pattern (e-mail, URL, number, date). Sentence boundaries fall
//! after terminator tokens unless the token is a non-breaking abbreviation.

use std::collections::HashSet;
use std::fs;
use std::path::Path;
use std::sync::OnceLock;

use regex::Regex;
use thiserror::Error;

use crate::doc::{Document, PatternKind, SentenceSpan, Span, Token};
use crate::pipeline::{Annotator, BoxedError, Properties};
use crate::resources;

/// Sentence-terminator characters.
const TERMINATORS: [char; 4] = ['.', '!', '?', '…'];

#[derive(Debug, Error)]
pub enum ResourceError {
    #[error("failed to read resource file {path}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: abbreviation {entry:?} must end with '.' and contain a letter")]
    BadAbbreviation { line: usize, entry: String },
    #[error("line {line}: expected kind<TAB>regex")]
    BadPatternLine { line: usize },
    #[error("line {line}: unknown pattern kind {kind:?}")]
    UnknownPatternKind { line: usize, kind: String },
    #[error("line {line}: regex does not compile: {source}")]
    BadRegex {
        line: usize,
        #[source]
        source: Box<regex::Error>,
    },
}

/// Set of non-breaking abbreviations, each ending in `.`.
#[derive(Clone, Debug)]
pub struct AbbreviationList {
    entries: Vec<String>,
    lookup: HashSet<String>,
    case_sensitive: bool,
}

impl AbbreviationList {
    /// Parses the one-entry-per-line format (`#` comments, UTF-8).
    pub fn parse(text: &str, case_sensitive: bool) -> Result<Self, ResourceError> {
        let mut entries = Vec::new();
        let mut lookup = HashSet::new();
        for (lineno, raw) in text.lines().enumerate() {
            let entry = raw.trim();
            if entry.is_empty() || entry.starts_with('#') {
                continue;
            }
            if !entry.ends_with('.') || !entry.chars().any(|c| c.is_alphabetic()) {
                return Err(ResourceError::BadAbbreviation {
                    line: lineno + 1,
                    entry: entry.to_string(),
                });
            }
            let key = if case_sensitive {
                entry.to_string()
            } else {
                entry.to_lowercase()
            };
            if lookup.insert(key) {
                entries.push(entry.to_string());
            }
        }
        Ok(AbbreviationList {
            entries,
            lookup,
            case_sensitive,
        })
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self, ResourceError> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|source| ResourceError::Io {
            path: path.display().to_string(),
            source,
        })?;
        // Abbreviation matching is case-insensitive by default so that
        // sentence-initial occurrences still merge.
        Self::parse(&text, false)
    }

    /// Bundled Italian defaults.
    pub fn default_italian() -> &'static AbbreviationList {
        static DEFAULT: OnceLock<AbbreviationList> = OnceLock::new();
        DEFAULT.get_or_init(|| {
            Self::parse(resources::ABBREVIATIONS_IT, false).expect("bundled abbreviation list")
        })
    }

    pub fn contains(&self, candidate: &str) -> bool {
        if self.case_sensitive {
            self.lookup.contains(candidate)
        } else {
            self.lookup.contains(&candidate.to_lowercase())
        }
    }

    pub fn entries(&self) -> &[String] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Ordered, compiled merge patterns; the first full match wins.
#[derive(Clone, Debug)]
pub struct PatternSet {
    patterns: Vec<(PatternKind, Regex)>,
}

impl PatternSet {
    /// Parses `kind<TAB>regex` lines (`#` comments). Each regex is anchored
    /// so it must cover a candidate run entirely.
    pub fn parse(text: &str) -> Result<Self, ResourceError> {
        let mut patterns = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim_end();
            if line.trim().is_empty() || line.trim_start().starts_with('#') {
                continue;
            }
            let (kind, source) = line
                .split_once('\t')
                .ok_or(ResourceError::BadPatternLine { line: lineno + 1 })?;
            let kind = PatternKind::from_name(kind.trim()).ok_or_else(|| {
                ResourceError::UnknownPatternKind {
                    line: lineno + 1,
                    kind: kind.trim().to_string(),
                }
            })?;
            let anchored = format!("^(?:{})$", source.trim());
            let regex = Regex::new(&anchored).map_err(|source| ResourceError::BadRegex {
                line: lineno + 1,
                source: Box::new(source),
            })?;
            patterns.push((kind, regex));
        }
        Ok(PatternSet { patterns })
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self, ResourceError> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|source| ResourceError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::parse(&text)
    }

    pub fn default_italian() -> &'static PatternSet {
        static DEFAULT: OnceLock<PatternSet> = OnceLock::new();
        DEFAULT.get_or_init(|| Self::parse(resources::PATTERNS_IT).expect("bundled pattern set"))
    }

    /// The kind of the first pattern matching `candidate` entirely.
    pub fn full_match(&self, candidate: &str) -> Option<PatternKind> {
        self.patterns
            .iter()
            .find(|(_, re)| re.is_match(candidate))
            .map(|(kind, _)| *kind)
    }

    pub fn len(&self) -> usize {
        self.patterns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.patterns.is_empty()
    }
}

/// Characters the gross pass detaches as single-character proto-tokens:
/// ASCII punctuation plus the common typographic marks of Italian text.
fn is_detachable_punct(c: char) -> bool {
    c.is_ascii_punctuation()
        || matches!(
            c,
            '«' | '»'
                | '“'
                | '”'
                | '‘'
                | '’'
                | '…'
                | '–'
                | '—'
                | '¡'
                | '¿'
                | '·'
                | '•'
                | '€'
                | '°'
                | '§'
        )
}

/// Text with a char-offset to byte-offset table, for O(1) span slicing.
struct CharText<'a> {
    text: &'a str,
    byte_of_char: Vec<usize>,
}

impl<'a> CharText<'a> {
    fn new(text: &'a str) -> Self {
        let mut byte_of_char = Vec::with_capacity(text.len() + 1);
        for (b, _) in text.char_indices() {
            byte_of_char.push(b);
        }
        byte_of_char.push(text.len());
        CharText { text, byte_of_char }
    }

    fn slice(&self, begin: usize, end: usize) -> &'a str {
        &self.text[self.byte_of_char[begin]..self.byte_of_char[end]]
    }
}

/// Gross pass: whitespace-separated spans with every punctuation character
/// detached as its own proto-token. Total over all inputs.
pub fn gross_tokenize(text: &str) -> Vec<Span> {
    let mut spans = Vec::new();
    let mut word_start: Option<usize> = None;
    let mut pos = 0usize;
    for c in text.chars() {
        if c.is_whitespace() {
            if let Some(s) = word_start.take() {
                spans.push(Span::new(s, pos));
            }
        } else if is_detachable_punct(c) {
            if let Some(s) = word_start.take() {
                spans.push(Span::new(s, pos));
            }
            spans.push(Span::new(pos, pos + 1));
        } else if word_start.is_none() {
            word_start = Some(pos);
        }
        pos += 1;
    }
    if let Some(s) = word_start {
        spans.push(Span::new(s, pos));
    }
    spans
}

/// Merge pass: within each whitespace-delimited chunk of adjacent
/// proto-tokens, the longest run matching a pattern or equal to an
/// abbreviation entry becomes one token; everything else passes through.
pub fn merge_tokens(
    proto: &[Span],
    text: &str,
    abbrevs: &AbbreviationList,
    patterns: &PatternSet,
) -> Vec<Token> {
    let ct = CharText::new(text);
    let mut tokens: Vec<Token> = Vec::with_capacity(proto.len());

    let mut chunk_start = 0usize;
    while chunk_start < proto.len() {
        // A chunk is a maximal run of touching proto-tokens; pattern and
        // abbreviation matches never cross whitespace.
        let mut chunk_end = chunk_start + 1;
        while chunk_end < proto.len() && proto[chunk_end].begin == proto[chunk_end - 1].end {
            chunk_end += 1;
        }
        let chunk = &proto[chunk_start..chunk_end];
        let chunk_text = ct.slice(chunk[0].begin, chunk[chunk.len() - 1].end);
        let try_patterns = chunk_text.chars().any(|c| c.is_ascii_digit() || c == '@')
            || chunk_text.contains("://")
            || chunk_text.contains("www.");
        let try_abbrevs = chunk_text.contains('.');

        let mut i = 0usize;
        while i < chunk.len() {
            let mut merged: Option<(usize, Option<PatternKind>)> = None;
            if try_patterns || try_abbrevs {
                // Longest run first, so an abbreviation that is a prefix of
                // another ("p." vs "p.es.") can never shadow it.
                for j in (i + 1..=chunk.len()).rev() {
                    let run = ct.slice(chunk[i].begin, chunk[j - 1].end);
                    if try_patterns
                        && let Some(kind) = patterns.full_match(run) {
                            merged = Some((j, Some(kind)));
                            break;
                        }
                    if try_abbrevs && run.ends_with('.') && abbrevs.contains(run) {
                        merged = Some((j, None));
                        break;
                    }
                }
            }
            match merged {
                Some((j, kind)) => {
                    let begin = chunk[i].begin;
                    let end = chunk[j - 1].end;
                    let mut tok = Token::new(tokens.len(), begin, end, ct.slice(begin, end));
                    match kind {
                        Some(k) => tok.set_pattern_kind(k),
                        None => tok.set_abbreviation(true),
                    }
                    tokens.push(tok);
                    i = j;
                }
                None => {
                    let span = chunk[i];
                    tokens.push(Token::new(
                        tokens.len(),
                        span.begin,
                        span.end,
                        ct.slice(span.begin, span.end),
                    ));
                    i += 1;
                }
            }
        }
        chunk_start = chunk_end;
    }
    tokens
}

/// Sentence boundaries fall after tokens ending in `.`, `!`, `?` or `…`
/// that are not flagged as abbreviations; a trailing sentence without a
/// terminator is still emitted.
pub fn split_sentences(
    tokens: &[Token],
    _text: &str,
    abbrevs: &AbbreviationList,
) -> Vec<SentenceSpan> {
    let mut sentences = Vec::new();
    let mut first = 0usize;
    for (i, tok) in tokens.iter().enumerate() {
        let terminal = tok
            .surface()
            .chars()
            .last()
            .is_some_and(|c| TERMINATORS.contains(&c));
        if terminal && !tok.is_abbreviation() && !abbrevs.contains(tok.surface()) {
            sentences.push(SentenceSpan::new(first, i));
            first = i + 1;
        }
    }
    if first < tokens.len() {
        sentences.push(SentenceSpan::new(first, tokens.len() - 1));
    }
    sentences
}

/// Annotator providing `tokens` and `sentences`. Re-running it re-tokenizes
/// from the source text, so it is idempotent.
#[derive(Clone, Debug)]
pub struct TokenizeAnnotator {
    abbrevs: AbbreviationList,
    patterns: PatternSet,
}

impl TokenizeAnnotator {
    pub fn new(abbrevs: AbbreviationList, patterns: PatternSet) -> Self {
        TokenizeAnnotator { abbrevs, patterns }
    }

    pub fn default_italian() -> Self {
        TokenizeAnnotator {
            abbrevs: AbbreviationList::default_italian().clone(),
            patterns: PatternSet::default_italian().clone(),
        }
    }

    /// Reads `abbrevFile` / `patternFile` properties, falling back to the
    /// bundled Italian defaults.
    pub fn from_properties(props: &Properties) -> Result<Self, ResourceError> {
        let abbrevs = match props.get("abbrevFile") {
            Some(path) => AbbreviationList::from_file(path)?,
            None => AbbreviationList::default_italian().clone(),
        };
        let patterns = match props.get("patternFile") {
            Some(path) => PatternSet::from_file(path)?,
            None => PatternSet::default_italian().clone(),
        };
        Ok(TokenizeAnnotator { abbrevs, patterns })
    }

    pub fn abbreviations(&self) -> &AbbreviationList {
        &self.abbrevs
    }

    pub fn tokenize(&self, doc: &mut Document) -> Result<(), BoxedError> {
        let proto = gross_tokenize(doc.text());
        let text = doc.text().to_string();
        let tokens = merge_tokens(&proto, &text, &self.abbrevs, &self.patterns);
        let sentences = split_sentences(&tokens, &text, &self.abbrevs);
        doc.set_tokens(tokens)?;
        doc.set_sentences(sentences)?;
        Ok(())
    }
}

impl Annotator for TokenizeAnnotator {
    fn annotate(&self, doc: &mut Document) -> Result<(), BoxedError> {
        self.tokenize(doc)
    }
}

/// Convenience wrapper running both passes and the splitter.
pub fn tokenize_text(
    text: &str,
    abbrevs: &AbbreviationList,
    patterns: &PatternSet,
) -> (Vec<Token>, Vec<SentenceSpan>) {
    let proto = gross_tokenize(text);
    let tokens = merge_tokens(&proto, text, abbrevs, patterns);
    let sentences = split_sentences(&tokens, text, abbrevs);
    (tokens, sentences)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn surfaces(tokens: &[Token]) -> Vec<&str> {
        tokens.iter().map(|t| t.surface()).collect()
    }

    fn tokenize(text: &str) -> (Vec<Token>, Vec<SentenceSpan>) {
        tokenize_text(
            text,
            AbbreviationList::default_italian(),
            PatternSet::default_italian(),
        )
    }

    #[test]
    fn gross_split_detaches_punctuation() {
        let spans = gross_tokenize("Ciao, mondo.");
        let text = "Ciao, mondo.";
        let got: Vec<&str> = spans
            .iter()
            .map(|s| crate::doc::slice_chars(text, s.begin, s.end))
            .collect();
        assert_eq!(got, ["Ciao", ",", "mondo", "."]);
    }

    #[test]
    fn gross_split_of_empty_text() {
        assert!(gross_tokenize("").is_empty());
        assert!(gross_tokenize("   \t\n").is_empty());
    }

    #[test]
    fn gross_split_breaks_spa_into_pieces() {
        let text = "S.p.A.";
        let spans = gross_tokenize(text);
        let got: Vec<&str> = spans
            .iter()
            .map(|s| crate::doc::slice_chars(text, s.begin, s.end))
            .collect();
        assert_eq!(got, ["S", ".", "p", ".", "A", "."]);
    }

    #[test]
    fn merge_restores_abbreviations() {
        let (tokens, _) = tokenize("Il dott. Rossi arriva.");
        assert_eq!(surfaces(&tokens), ["Il", "dott.", "Rossi", "arriva", "."]);
        assert!(tokens[1].is_abbreviation());
        assert!(!tokens[4].is_abbreviation());
    }

    #[test]
    fn merge_restores_multi_dot_abbreviation() {
        let (tokens, sentences) = tokenize("Arriva la S.p.A. domani");
        assert_eq!(surfaces(&tokens), ["Arriva", "la", "S.p.A.", "domani"]);
        assert!(tokens[2].is_abbreviation());
        assert_eq!(sentences.len(), 1);
    }

    #[test]
    fn merge_email_into_single_token() {
        let (tokens, _) = tokenize("Scrivi a mario.rossi@example.com subito.");
        let email = tokens
            .iter()
            .find(|t| t.pattern_kind() == Some(PatternKind::Email))
            .expect("email token");
        assert_eq!(email.surface(), "mario.rossi@example.com");
    }

    #[test]
    fn merge_url_number_date() {
        let (tokens, _) = tokenize("Vedi www.example.com/it il 05/05/2024 con 1.234,56 euro.");
        let kinds: Vec<_> = tokens.iter().filter_map(|t| t.pattern_kind()).collect();
        assert!(kinds.contains(&PatternKind::Url));
        assert!(kinds.contains(&PatternKind::Date));
        assert!(kinds.contains(&PatternKind::Number));
        let date = tokens
            .iter()
            .find(|t| t.pattern_kind() == Some(PatternKind::Date))
            .unwrap();
        assert_eq!(date.surface(), "05/05/2024");
        let number = tokens
            .iter()
            .find(|t| t.pattern_kind() == Some(PatternKind::Number))
            .unwrap();
        assert_eq!(number.surface(), "1.234,56");
    }

    #[test]
    fn no_rule_leaves_tokens_unchanged() {
        let (tokens, _) = tokenize("Ciao, mondo");
        assert_eq!(surfaces(&tokens), ["Ciao", ",", "mondo"]);
        assert!(tokens.iter().all(|t| t.pattern_kind().is_none()));
    }

    #[test]
    fn longest_abbreviation_wins_over_prefix() {
        let list = AbbreviationList::parse("p.\np.es.\n", false).unwrap();
        let patterns = PatternSet::default_italian();
        let (tokens, _) = tokenize_text("Vedi p.es. questo", &list, patterns);
        assert_eq!(surfaces(&tokens), ["Vedi", "p.es.", "questo"]);
    }

    #[test]
    fn custom_single_entry_list_keeps_entry_whole() {
        let list = AbbreviationList::parse("q.b.\n", false).unwrap();
        let patterns = PatternSet::default_italian();
        let (tokens, sentences) = tokenize_text("Sale q.b. per tutti.", &list, patterns);
        assert_eq!(surfaces(&tokens), ["Sale", "q.b.", "per", "tutti", "."]);
        assert_eq!(sentences.len(), 1);
    }

    #[test]
    fn abbreviation_suppresses_sentence_break() {
        let (_, sentences) = tokenize("Il dott. Rossi arriva.");
        assert_eq!(sentences.len(), 1);
    }

    #[test]
    fn plain_periods_split_sentences() {
        let (tokens, sentences) = tokenize("Piove. Esco.");
        assert_eq!(surfaces(&tokens), ["Piove", ".", "Esco", "."]);
        assert_eq!(sentences.len(), 2);
        assert_eq!(sentences[0], SentenceSpan::new(0, 1));
        assert_eq!(sentences[1], SentenceSpan::new(2, 3));
    }

    #[test]
    fn empty_token_list_has_no_sentences() {
        let (tokens, sentences) = tokenize("");
        assert!(tokens.is_empty());
        assert!(sentences.is_empty());
    }

    #[test]
    fn trailing_sentence_without_terminator() {
        let (_, sentences) = tokenize("Piove. Esco senza ombrello");
        assert_eq!(sentences.len(), 2);
    }

    #[test]
    fn other_terminators_split() {
        let (_, sentences) = tokenize("Davvero? Sì! Forse…");
        assert_eq!(sentences.len(), 3);
    }

    #[test]
    fn annotator_is_idempotent() {
        let annot = TokenizeAnnotator::default_italian();
        let mut doc = Document::new("Il dott. Rossi arriva.");
        annot.annotate(&mut doc).unwrap();
        let first = doc.clone();
        annot.annotate(&mut doc).unwrap();
        assert_eq!(doc, first);
        assert_eq!(doc.tokens().len(), 5);
        assert_eq!(doc.sentences().len(), 1);
    }

    #[test]
    fn missing_resource_file_is_an_error() {
        let mut props = Properties::new();
        props.insert("abbrevFile".to_string(), "/nonexistent/abbrev.txt".to_string());
        let err = TokenizeAnnotator::from_properties(&props).unwrap_err();
        assert!(matches!(err, ResourceError::Io { .. }));
    }

    #[test]
    fn malformed_abbreviation_entry_is_rejected() {
        let err = AbbreviationList::parse("dott.\nbad\n", false).unwrap_err();
        assert!(matches!(err, ResourceError::BadAbbreviation { line: 2, .. }));
        let err = AbbreviationList::parse("...\n", false).unwrap_err();
        assert!(matches!(err, ResourceError::BadAbbreviation { line: 1, .. }));
    }

    #[test]
    fn bad_pattern_file_is_rejected() {
        assert!(matches!(
            PatternSet::parse("email\t[unclosed"),
            Err(ResourceError::BadRegex { line: 1, .. })
        ));
        assert!(matches!(
            PatternSet::parse("phone\t\\d+"),
            Err(ResourceError::UnknownPatternKind { line: 1, .. })
        ));
        assert!(matches!(
            PatternSet::parse("email no tab"),
            Err(ResourceError::BadPatternLine { line: 1 })
        ));
    }

    #[test]
    fn offsets_are_unicode_scalar_values() {
        let text = "È bello così.";
        let (tokens, _) = tokenize(text);
        assert_eq!(surfaces(&tokens), ["È", "bello", "così", "."]);
        assert_eq!(tokens[0].begin(), 0);
        assert_eq!(tokens[0].end(), 1);
        assert_eq!(tokens[2].begin(), 8);
        assert_eq!(tokens[2].end(), 12);
    }
}
