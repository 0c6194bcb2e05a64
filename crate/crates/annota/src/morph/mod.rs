//! Lexicon-backed morphological analysis.
//!
//! A full-form lexicon (Morph-it style TSV) is compiled once into an
//! immutable sorted store ([`store::LexiconStore`]); lookups return every
//! recorded analysis for a surface form. Complex forms that miss the store
//! fall back to prefix-root-infix-suffix decomposition ([`decompose`]).

pub mod decompose;
pub mod store;
pub mod tags;

use std::collections::BTreeMap;
use std::sync::Arc;

use thiserror::Error;

use crate::doc::Document;
use crate::pipeline::{Annotator, BoxedError, Properties};

pub use decompose::{AffixTables, Decomposition, decompose};
pub use store::{CasePolicy, CompileReport, LexiconStore, StoreError, StoreHeader, compile_lexicon};
pub use tags::TagGrammar;

/// Coarse morphological class of an analysis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum MorphCategory {
    Noun,
    Verb,
    Adjective,
    Adverb,
    Determiner,
    Pronoun,
    Other,
}

impl MorphCategory {
    pub fn as_str(&self) -> &'static str {
        match self {
            MorphCategory::Noun => "noun",
            MorphCategory::Verb => "verb",
            MorphCategory::Adjective => "adjective",
            MorphCategory::Adverb => "adverb",
            MorphCategory::Determiner => "determiner",
            MorphCategory::Pronoun => "pronoun",
            MorphCategory::Other => "other",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        match s {
            "noun" => Some(MorphCategory::Noun),
            "verb" => Some(MorphCategory::Verb),
            "adjective" => Some(MorphCategory::Adjective),
            "adverb" => Some(MorphCategory::Adverb),
            "determiner" => Some(MorphCategory::Determiner),
            "pronoun" => Some(MorphCategory::Pronoun),
            "other" => Some(MorphCategory::Other),
            _ => None,
        }
    }

    pub(crate) fn code(&self) -> u8 {
        match self {
            MorphCategory::Noun => 0,
            MorphCategory::Verb => 1,
            MorphCategory::Adjective => 2,
            MorphCategory::Adverb => 3,
            MorphCategory::Determiner => 4,
            MorphCategory::Pronoun => 5,
            MorphCategory::Other => 6,
        }
    }

    pub(crate) fn from_code(code: u8) -> Option<Self> {
        match code {
            0 => Some(MorphCategory::Noun),
            1 => Some(MorphCategory::Verb),
            2 => Some(MorphCategory::Adjective),
            3 => Some(MorphCategory::Adverb),
            4 => Some(MorphCategory::Determiner),
            5 => Some(MorphCategory::Pronoun),
            6 => Some(MorphCategory::Other),
            _ => None,
        }
    }
}

/// One candidate analysis of a surface form: lemma, category and a feature
/// map (keys lowercase ASCII; `gender` ranges over m/f, `number` over s/p).
/// `derivation` is set when the analysis came from affix decomposition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MorphAnalysis {
    pub lemma: String,
    pub category: MorphCategory,
    pub features: BTreeMap<String, String>,
    pub derivation: Option<Decomposition>,
}

impl MorphAnalysis {
    pub fn new(lemma: impl Into<String>, category: MorphCategory) -> Self {
        MorphAnalysis {
            lemma: lemma.into(),
            category,
            features: BTreeMap::new(),
            derivation: None,
        }
    }

    pub fn with_feature(mut self, key: impl Into<String>, value: impl Into<String>) -> Self {
        self.features.insert(key.into(), value.into());
        self
    }

    pub fn feature(&self, key: &str) -> Option<&str> {
        self.features.get(key).map(|s| s.as_str())
    }
}

#[derive(Debug, Error)]
pub enum MorphError {
    #[error("morph annotator needs a compiled lexicon: set the `lexicon` property")]
    MissingLexicon,
    #[error("unknown casePolicy {0:?} (expected exact, fold_first or fold_all)")]
    BadCasePolicy(String),
    #[error(transparent)]
    Store(#[from] StoreError),
    #[error(transparent)]
    Resource(#[from] crate::tokenize::ResourceError),
}

/// Annotator requiring `tokens`, providing `morph`.
///
/// Each token receives the store's analyses for its surface form; forms
/// without a direct hit fall back to decomposition-derived analyses with
/// the root's category and features projected onto the token. Tokens with
/// neither get an empty list.
#[derive(Debug)]
pub struct MorphAnnotator {
    store: Arc<LexiconStore>,
    affixes: AffixTables,
    policy: CasePolicy,
}

impl MorphAnnotator {
    pub fn new(store: Arc<LexiconStore>) -> Self {
        MorphAnnotator {
            store,
            affixes: AffixTables::default_italian().clone(),
            policy: CasePolicy::FoldFirst,
        }
    }

    pub fn with_affixes(mut self, affixes: AffixTables) -> Self {
        self.affixes = affixes;
        self
    }

    pub fn with_case_policy(mut self, policy: CasePolicy) -> Self {
        self.policy = policy;
        self
    }

    /// Builds from pipeline properties: `lexicon` (required store path),
    /// optional `prefixFile`/`cliticFile` and `casePolicy`
    /// (exact|fold_first|fold_all).
    pub fn from_properties(props: &Properties) -> Result<Self, MorphError> {
        let path = props.get("lexicon").ok_or(MorphError::MissingLexicon)?;
        let store = Arc::new(LexiconStore::open(path)?);
        let affixes = match (props.get("prefixFile"), props.get("cliticFile")) {
            (None, None) => AffixTables::default_italian().clone(),
            (prefix, clitic) => AffixTables::from_files(
                prefix.map(|p| p.as_str()),
                clitic.map(|p| p.as_str()),
            )?,
        };
        let policy = match props.get("casePolicy").map(|s| s.as_str()) {
            None | Some("fold_first") => CasePolicy::FoldFirst,
            Some("exact") => CasePolicy::Exact,
            Some("fold_all") => CasePolicy::FoldAll,
            Some(other) => return Err(MorphError::BadCasePolicy(other.to_string())),
        };
        Ok(MorphAnnotator {
            store,
            affixes,
            policy,
        })
    }

    pub fn store(&self) -> &Arc<LexiconStore> {
        &self.store
    }

    /// Analyses for one surface form: store lookup first, decomposition as
    /// fallback. Decomposition-derived analyses carry the resolved root's
    /// category and features, with the lemma rebuilt as prefix + root lemma
    /// (clitics are never part of the lemma).
    pub fn analyze(&self, surface: &str) -> Vec<MorphAnalysis> {
        let direct = self.store.lookup(surface, self.policy);
        if !direct.is_empty() {
            return direct;
        }
        let mut decomps = decompose(&self.store, surface, &self.affixes);
        if decomps.is_empty() && self.policy != CasePolicy::Exact
            && let Some(folded) = store::fold_first(surface) {
                decomps = decompose(&self.store, &folded, &self.affixes);
            }
        decomps
            .into_iter()
            .map(|d| {
                let mut lemma = String::new();
                if let Some(prefix) = &d.prefix {
                    lemma.push_str(prefix);
                }
                lemma.push_str(&d.root_analysis.lemma);
                MorphAnalysis {
                    lemma,
                    category: d.root_analysis.category,
                    features: d.root_analysis.features.clone(),
                    derivation: Some(d),
                }
            })
            .collect()
    }
}

impl Annotator for MorphAnnotator {
    fn annotate(&self, doc: &mut Document) -> Result<(), BoxedError> {
        let analyses: Vec<Vec<MorphAnalysis>> = doc
            .tokens()
            .iter()
            .map(|t| self.analyze(t.surface()))
            .collect();
        for (tok, a) in doc.tokens_mut().iter_mut().zip(analyses) {
            tok.set_morph(a);
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::doc::Token;

    fn desk_store() -> Arc<LexiconStore> {
        let tsv = "\
latte\tlatte\tNOUN-M:s
latte\tlatta\tNOUN-F:p
cane\tcane\tNOUN-M:s
portare\tportare\tVER:inf+pres
porta\tportare\tVER:ind+pres+3+s
porta\tporta\tNOUN-F:s
direzionale\tdirezionale\tADJ:pos+m+s
";
        let grammar = TagGrammar::default_italian();
        let (bytes, _) = store::compile_lexicon_bytes(tsv, grammar).unwrap();
        Arc::new(LexiconStore::from_bytes(bytes).unwrap())
    }

    #[test]
    fn annotator_populates_morph_layer() {
        let annot = MorphAnnotator::new(desk_store());
        let mut doc = Document::new("cane ,");
        doc.set_tokens(vec![Token::new(0, 0, 4, "cane"), Token::new(0, 5, 6, ",")])
            .unwrap();
        annot.annotate(&mut doc).unwrap();
        let cane = doc.tokens()[0].morph().unwrap();
        assert_eq!(cane.len(), 1);
        assert_eq!(cane[0].lemma, "cane");
        // Punctuation is absent from the lexicon: empty, not missing.
        assert_eq!(doc.tokens()[1].morph().unwrap().len(), 0);
    }

    #[test]
    fn decomposition_fallback_carries_derivation() {
        let annot = MorphAnnotator::new(desk_store());
        let analyses = annot.analyze("portarglielo");
        assert!(!analyses.is_empty());
        let a = &analyses[0];
        assert_eq!(a.lemma, "portare");
        assert_eq!(a.category, MorphCategory::Verb);
        let d = a.derivation.as_ref().expect("derivation recorded");
        assert_eq!(d.root, "portare");
    }

    #[test]
    fn prefix_decomposition_rebuilds_lemma_with_prefix() {
        let annot = MorphAnnotator::new(desk_store());
        let analyses = annot.analyze("bidirezionale");
        assert_eq!(analyses[0].lemma, "bidirezionale");
        let d = analyses[0].derivation.as_ref().unwrap();
        assert_eq!(d.prefix.as_deref(), Some("bi"));
        assert_eq!(d.root, "direzionale");
    }

    #[test]
    fn sentence_initial_complex_form_is_folded_before_decomposition() {
        let annot = MorphAnnotator::new(desk_store());
        let analyses = annot.analyze("Portarglielo");
        assert_eq!(analyses.len(), 1);
        assert_eq!(analyses[0].lemma, "portare");
    }

    #[test]
    fn missing_lexicon_property_is_an_error() {
        let err = MorphAnnotator::from_properties(&Properties::new()).unwrap_err();
        assert!(matches!(err, MorphError::MissingLexicon));
    }
}
