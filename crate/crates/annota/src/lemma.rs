//! Rule-based lemmatization.
//!
//! The lemma of a token is chosen by combining its POS tag with the
//! morphological analyses: analyses whose category is incompatible with
//! the tag are dropped; ambiguous nouns are resolved through the nearest
//! preceding article (e.g. "il latte" → latte, "le latte" → latta);
//! remaining ties fall back to store order; forms explained only by
//! decomposition take the root's lemma with clitics stripped; everything
//! else falls back to the surface form.

use std::collections::{HashMap, HashSet};
use std::fs;
use std::path::Path;
use std::sync::OnceLock;

use thiserror::Error;

use crate::doc::{Document, Token};
use crate::morph::{MorphAnalysis, MorphCategory};
use crate::pipeline::{Annotator, BoxedError, Properties};
use crate::resources;
use crate::tokenize::ResourceError;

/// How a lemma was decided.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LemmaSource {
    LexiconMatch,
    Decomposition,
    ArticleDisambiguated,
    FallbackSurface,
}

impl LemmaSource {
    pub fn as_str(&self) -> &'static str {
        match self {
            LemmaSource::LexiconMatch => "lexicon_match",
            LemmaSource::Decomposition => "decomposition",
            LemmaSource::ArticleDisambiguated => "article_disambiguated",
            LemmaSource::FallbackSurface => "fallback_surface",
        }
    }
}

/// A lemma plus its provenance. When the source is a lexicon match or an
/// article disambiguation, the selected analysis is kept and its category
/// is POS-compatible by construction.
#[derive(Clone, Debug, PartialEq)]
pub struct LemmaDecision {
    pub lemma: String,
    pub source: LemmaSource,
    pub chosen_analysis: Option<MorphAnalysis>,
}

#[derive(Debug, Error)]
pub enum LemmaError {
    #[error("token {index}: lemmatization needs the {layer} layer")]
    MissingPrerequisite { index: usize, layer: &'static str },
}

/// Closed table of articles with their gender (possibly unknown for
/// elided forms) and number.
#[derive(Clone, Debug)]
pub struct ArticleTable {
    entries: HashMap<String, (Option<char>, char)>,
}

impl ArticleTable {
    pub fn parse(text: &str) -> Result<Self, ResourceError> {
        let mut entries = HashMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let bad = || ResourceError::BadPatternLine { line: lineno + 1 };
            let fields: Vec<&str> = line.split('\t').collect();
            if fields.len() != 3 {
                return Err(bad());
            }
            let gender = match fields[1] {
                "m" => Some('m'),
                "f" => Some('f'),
                "-" => None,
                _ => return Err(bad()),
            };
            let number = match fields[2] {
                "s" => 's',
                "p" => 'p',
                _ => return Err(bad()),
            };
            entries.insert(fields[0].to_lowercase(), (gender, number));
        }
        Ok(ArticleTable { entries })
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self, ResourceError> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|source| ResourceError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::parse(&text)
    }

    pub fn default_italian() -> &'static ArticleTable {
        static DEFAULT: OnceLock<ArticleTable> = OnceLock::new();
        DEFAULT.get_or_init(|| Self::parse(resources::ARTICLES_IT).expect("bundled article table"))
    }

    pub fn get(&self, surface: &str) -> Option<(Option<char>, char)> {
        self.entries.get(&surface.to_lowercase()).copied()
    }

    pub fn forms(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(|k| k.as_str())
    }
}

/// Category ⇄ UPOS compatibility table.
#[derive(Clone, Debug)]
pub struct CompatTable {
    pairs: HashSet<(MorphCategory, String)>,
}

impl CompatTable {
    pub fn parse(text: &str) -> Result<Self, ResourceError> {
        let mut pairs = HashSet::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let bad = || ResourceError::BadPatternLine { line: lineno + 1 };
            let (category, upos) = line.split_once('\t').ok_or_else(bad)?;
            let category = MorphCategory::from_name(category.trim()).ok_or_else(bad)?;
            pairs.insert((category, upos.trim().to_string()));
        }
        Ok(CompatTable { pairs })
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self, ResourceError> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|source| ResourceError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::parse(&text)
    }

    pub fn default_upos() -> &'static CompatTable {
        static DEFAULT: OnceLock<CompatTable> = OnceLock::new();
        DEFAULT.get_or_init(|| Self::parse(resources::POS_COMPAT).expect("bundled compat table"))
    }

    pub fn compatible(&self, category: MorphCategory, upos: &str) -> bool {
        self.pairs.contains(&(category, upos.to_string()))
    }
}

/// Keeps the analyses whose category is compatible with `pos`, preserving
/// order.
pub fn compatible_analyses<'a>(
    analyses: &'a [MorphAnalysis],
    pos: &str,
    table: &CompatTable,
) -> Vec<&'a MorphAnalysis> {
    analyses
        .iter()
        .filter(|a| table.compatible(a.category, pos))
        .collect()
}

/// Scans left from `index` (window of 3 tokens, stopping at the sentence
/// start or at any verb-tagged token) for an article; returns the unique
/// candidate whose gender and number match it. The nearest article
/// decides: zero or several matching candidates yield `None`.
pub fn resolve_by_article<'a>(
    tokens: &[Token],
    index: usize,
    sentence_first: usize,
    candidates: &[&'a MorphAnalysis],
    articles: &ArticleTable,
) -> Option<&'a MorphAnalysis> {
    let mut j = index;
    for _ in 0..3 {
        if j == sentence_first {
            return None;
        }
        j -= 1;
        let tok = &tokens[j];
        if matches!(tok.pos(), Some("VERB") | Some("AUX")) {
            return None;
        }
        if let Some((art_gender, art_number)) = articles.get(tok.surface()) {
            let matching: Vec<&&MorphAnalysis> = candidates
                .iter()
                .filter(|a| {
                    let gender_ok = match art_gender {
                        Some(g) => a.feature("gender") == Some(&g.to_string()),
                        None => true,
                    };
                    let number_ok = a.feature("number") == Some(&art_number.to_string());
                    gender_ok && number_ok
                })
                .collect();
            return if matching.len() == 1 {
                Some(*matching[0])
            } else {
                None
            };
        }
    }
    None
}

/// Decision chain: unique compatible analysis → its lemma; several and a
/// nominal tag → article resolution; still ambiguous → first analysis in
/// store order; no compatible analysis but a decomposition → the
/// decomposition lemma (root lemma, clitics stripped); otherwise the
/// surface (lowercased, except PROPN keeps casing and PUNCT/NUM/SYM keep
/// the exact surface).
pub fn lemmatize_token(
    tokens: &[Token],
    index: usize,
    sentence_first: usize,
    articles: &ArticleTable,
    compat: &CompatTable,
) -> Result<LemmaDecision, LemmaError> {
    let token = &tokens[index];
    let pos = token.pos().ok_or(LemmaError::MissingPrerequisite {
        index,
        layer: "pos",
    })?;
    let analyses = token.morph().ok_or(LemmaError::MissingPrerequisite {
        index,
        layer: "morph",
    })?;

    let decide = |analysis: &MorphAnalysis, source: LemmaSource| LemmaDecision {
        lemma: analysis.lemma.clone(),
        source: if analysis.derivation.is_some() {
            LemmaSource::Decomposition
        } else {
            source
        },
        chosen_analysis: Some(analysis.clone()),
    };

    let compatible = compatible_analyses(analyses, pos, compat);
    match compatible.len() {
        1 => return Ok(decide(compatible[0], LemmaSource::LexiconMatch)),
        n if n >= 2 => {
            if matches!(pos, "NOUN" | "PROPN")
                && let Some(chosen) =
                    resolve_by_article(tokens, index, sentence_first, &compatible, articles)
                {
                    return Ok(decide(chosen, LemmaSource::ArticleDisambiguated));
                }
            return Ok(decide(compatible[0], LemmaSource::LexiconMatch));
        }
        _ => {}
    }

    if let Some(derived) = analyses.iter().find(|a| a.derivation.is_some()) {
        return Ok(decide(derived, LemmaSource::Decomposition));
    }

    let surface = token.surface();
    let lemma = match pos {
        "PROPN" | "PUNCT" | "NUM" | "SYM" => surface.to_string(),
        _ => surface.to_lowercase(),
    };
    Ok(LemmaDecision {
        lemma,
        source: LemmaSource::FallbackSurface,
        chosen_analysis: None,
    })
}

/// Annotator requiring `tokens`, `sentences`, `pos` and `morph`,
/// providing `lemma`.
pub struct LemmaAnnotator {
    articles: ArticleTable,
    compat: CompatTable,
}

impl LemmaAnnotator {
    pub fn new() -> Self {
        LemmaAnnotator {
            articles: ArticleTable::default_italian().clone(),
            compat: CompatTable::default_upos().clone(),
        }
    }

    /// Optional properties: `articleFile`, `compatFile`.
    pub fn from_properties(props: &Properties) -> Result<Self, ResourceError> {
        let articles = match props.get("articleFile") {
            Some(path) => ArticleTable::from_file(path)?,
            None => ArticleTable::default_italian().clone(),
        };
        let compat = match props.get("compatFile") {
            Some(path) => CompatTable::from_file(path)?,
            None => CompatTable::default_upos().clone(),
        };
        Ok(LemmaAnnotator { articles, compat })
    }
}

impl Default for LemmaAnnotator {
    fn default() -> Self {
        Self::new()
    }
}

impl Annotator for LemmaAnnotator {
    fn annotate(&self, doc: &mut Document) -> Result<(), BoxedError> {
        let mut decisions: Vec<(usize, LemmaDecision)> = Vec::with_capacity(doc.tokens().len());
        let ranges: Vec<(usize, usize)> = if doc.sentences().is_empty() {
            if doc.tokens().is_empty() {
                Vec::new()
            } else {
                vec![(0, doc.tokens().len() - 1)]
            }
        } else {
            doc.sentences().iter().map(|s| (s.first, s.last)).collect()
        };
        for (first, last) in ranges {
            for index in first..=last {
                let decision =
                    lemmatize_token(doc.tokens(), index, first, &self.articles, &self.compat)?;
                decisions.push((index, decision));
            }
        }
        for (index, decision) in decisions {
            doc.tokens_mut()[index].set_lemma(decision);
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::doc::SentenceSpan;

    fn noun(lemma: &str, gender: char, number: char) -> MorphAnalysis {
        MorphAnalysis::new(lemma, MorphCategory::Noun)
            .with_feature("gender", gender.to_string())
            .with_feature("number", number.to_string())
    }

    fn latte_candidates() -> Vec<MorphAnalysis> {
        vec![noun("latte", 'm', 's'), noun("latta", 'f', 'p')]
    }

    fn doc_with(words: &[(&str, &str)]) -> Document {
        let mut text = String::new();
        let mut tokens = Vec::new();
        let mut at = 0usize;
        for (i, (w, _)) in words.iter().enumerate() {
            if i > 0 {
                text.push(' ');
                at += 1;
            }
            let len = w.chars().count();
            tokens.push(Token::new(i, at, at + len, *w));
            text.push_str(w);
            at += len;
        }
        let mut doc = Document::new(text);
        doc.set_tokens(tokens).unwrap();
        let last = words.len() - 1;
        doc.set_sentences(vec![SentenceSpan::new(0, last)]).unwrap();
        for (i, (_, pos)) in words.iter().enumerate() {
            doc.tokens_mut()[i].set_pos(*pos);
        }
        doc
    }

    #[test]
    fn compatible_filter_keeps_matching_categories() {
        let table = CompatTable::default_upos();
        let analyses = latte_candidates();
        assert_eq!(compatible_analyses(&analyses, "NOUN", table).len(), 2);

        let verb = vec![MorphAnalysis::new("portare", MorphCategory::Verb)];
        assert!(compatible_analyses(&verb, "NOUN", table).is_empty());
        assert_eq!(compatible_analyses(&verb, "VERB", table).len(), 1);
        assert_eq!(compatible_analyses(&verb, "AUX", table).len(), 1);
        assert!(compatible_analyses(&[], "NOUN", table).is_empty());
    }

    #[test]
    fn article_selects_milk_or_metal_sheet() {
        let mut doc = doc_with(&[("il", "DET"), ("latte", "NOUN")]);
        doc.tokens_mut()[1].set_morph(latte_candidates());
        let d = lemmatize_token(
            doc.tokens(),
            1,
            0,
            ArticleTable::default_italian(),
            CompatTable::default_upos(),
        )
        .unwrap();
        assert_eq!(d.lemma, "latte");
        assert_eq!(d.source, LemmaSource::ArticleDisambiguated);
        let chosen = d.chosen_analysis.unwrap();
        assert_eq!(chosen.feature("gender"), Some("m"));

        let mut doc = doc_with(&[("le", "DET"), ("latte", "NOUN")]);
        doc.tokens_mut()[1].set_morph(latte_candidates());
        let d = lemmatize_token(
            doc.tokens(),
            1,
            0,
            ArticleTable::default_italian(),
            CompatTable::default_upos(),
        )
        .unwrap();
        assert_eq!(d.lemma, "latta");
        assert_eq!(d.source, LemmaSource::ArticleDisambiguated);
    }

    #[test]
    fn article_exhaustive_over_gender_number_pairs() {
        let articles = ArticleTable::default_italian();
        for form in articles.forms() {
            let (gender, number) = articles.get(form).unwrap();
            let candidates_owned = [noun("maschile", 'm', number), noun("femminile", 'f', number)];
            let candidates: Vec<&MorphAnalysis> = candidates_owned.iter().collect();
            let tokens = vec![
                {
                    let mut t = Token::new(0, 0, form.chars().count(), form);
                    t.set_pos("DET");
                    t
                },
                {
                    let mut t = Token::new(
                        1,
                        form.chars().count() + 1,
                        form.chars().count() + 2,
                        "x",
                    );
                    t.set_pos("NOUN");
                    t
                },
            ];
            let resolved = resolve_by_article(&tokens, 1, 0, &candidates, articles);
            match gender {
                Some('m') => assert_eq!(resolved.unwrap().lemma, "maschile", "article {form}"),
                Some('f') => assert_eq!(resolved.unwrap().lemma, "femminile", "article {form}"),
                // Elided articles do not reveal gender: both candidates
                // match on number, so resolution must abstain.
                _ => assert!(resolved.is_none(), "article {form}"),
            }
        }
    }

    #[test]
    fn no_article_in_window_yields_none() {
        let mut doc = doc_with(&[("latte", "NOUN")]);
        doc.tokens_mut()[0].set_morph(latte_candidates());
        let d = lemmatize_token(
            doc.tokens(),
            0,
            0,
            ArticleTable::default_italian(),
            CompatTable::default_upos(),
        )
        .unwrap();
        // Store-order tie-break.
        assert_eq!(d.lemma, "latte");
        assert_eq!(d.source, LemmaSource::LexiconMatch);
    }

    #[test]
    fn verb_barrier_stops_the_article_scan() {
        let mut doc = doc_with(&[("le", "DET"), ("vede", "VERB"), ("latte", "NOUN")]);
        doc.tokens_mut()[2].set_morph(latte_candidates());
        let d = lemmatize_token(
            doc.tokens(),
            2,
            0,
            ArticleTable::default_italian(),
            CompatTable::default_upos(),
        )
        .unwrap();
        assert_eq!(d.source, LemmaSource::LexiconMatch);
    }

    #[test]
    fn window_is_three_tokens() {
        let mut doc = doc_with(&[
            ("le", "DET"),
            ("due", "NUM"),
            ("belle", "ADJ"),
            ("grandi", "ADJ"),
            ("latte", "NOUN"),
        ]);
        doc.tokens_mut()[4].set_morph(latte_candidates());
        // Article sits 4 tokens back: out of the window.
        let d = lemmatize_token(
            doc.tokens(),
            4,
            0,
            ArticleTable::default_italian(),
            CompatTable::default_upos(),
        )
        .unwrap();
        assert_eq!(d.source, LemmaSource::LexiconMatch);
    }

    #[test]
    fn fallback_surface_rules() {
        let articles = ArticleTable::default_italian();
        let compat = CompatTable::default_upos();
        let mut doc = doc_with(&[("Xyzzy", "NOUN"), ("Rossi", "PROPN"), (",", "PUNCT")]);
        for i in 0..3 {
            doc.tokens_mut()[i].set_morph(Vec::new());
        }
        let d = lemmatize_token(doc.tokens(), 0, 0, articles, compat).unwrap();
        assert_eq!(d.lemma, "xyzzy");
        assert_eq!(d.source, LemmaSource::FallbackSurface);
        let d = lemmatize_token(doc.tokens(), 1, 0, articles, compat).unwrap();
        assert_eq!(d.lemma, "Rossi");
        let d = lemmatize_token(doc.tokens(), 2, 0, articles, compat).unwrap();
        assert_eq!(d.lemma, ",");
    }

    #[test]
    fn decomposition_route_strips_clitics() {
        let root = MorphAnalysis::new("portare", MorphCategory::Verb);
        let derived = MorphAnalysis {
            lemma: "portare".into(),
            category: MorphCategory::Verb,
            features: root.features.clone(),
            derivation: Some(crate::morph::Decomposition {
                prefix: None,
                root: "portare".into(),
                infixes: vec!["glie".into()],
                suffix: Some("lo".into()),
                root_analysis: Box::new(root),
            }),
        };
        let mut doc = doc_with(&[("portarglielo", "VERB")]);
        doc.tokens_mut()[0].set_morph(vec![derived]);
        let d = lemmatize_token(
            doc.tokens(),
            0,
            0,
            ArticleTable::default_italian(),
            CompatTable::default_upos(),
        )
        .unwrap();
        assert_eq!(d.lemma, "portare");
        assert_eq!(d.source, LemmaSource::Decomposition);
    }

    #[test]
    fn missing_pos_layer_is_an_error() {
        let mut doc = Document::new("ciao");
        doc.set_tokens(vec![Token::new(0, 0, 4, "ciao")]).unwrap();
        doc.tokens_mut()[0].set_morph(Vec::new());
        let err = lemmatize_token(
            doc.tokens(),
            0,
            0,
            ArticleTable::default_italian(),
            CompatTable::default_upos(),
        )
        .unwrap_err();
        assert!(matches!(
            err,
            LemmaError::MissingPrerequisite { layer: "pos", .. }
        ));
    }

    #[test]
    fn tables_load_from_files() {
        let dir = tempfile::tempdir().unwrap();
        let articles_path = dir.path().join("articles.tsv");
        std::fs::write(&articles_path, "der\tm\ts\ndie\tf\ts\n").unwrap();
        let compat_path = dir.path().join("compat.tsv");
        std::fs::write(&compat_path, "noun\tNOUN\nverb\tVERB\n").unwrap();

        let mut props = crate::pipeline::Properties::new();
        props.insert("articleFile".into(), articles_path.display().to_string());
        props.insert("compatFile".into(), compat_path.display().to_string());
        let annot = LemmaAnnotator::from_properties(&props).unwrap();
        assert!(annot.articles.get("der").is_some());
        assert!(annot.articles.get("il").is_none());
        assert!(annot.compat.compatible(MorphCategory::Noun, "NOUN"));
        assert!(!annot.compat.compatible(MorphCategory::Noun, "PROPN"));

        props.insert("articleFile".into(), "/nonexistent.tsv".into());
        assert!(LemmaAnnotator::from_properties(&props).is_err());
    }

    #[test]
    fn pos_consistency_of_chosen_analyses() {
        let compat = CompatTable::default_upos();
        let mut doc = doc_with(&[("il", "DET"), ("latte", "NOUN")]);
        doc.tokens_mut()[0].set_morph(vec![
            MorphAnalysis::new("il", MorphCategory::Determiner)
                .with_feature("gender", "m")
                .with_feature("number", "s"),
        ]);
        doc.tokens_mut()[1].set_morph(latte_candidates());
        let annot = LemmaAnnotator::new();
        use crate::pipeline::Annotator as _;
        annot.annotate(&mut doc).unwrap();
        for tok in doc.tokens() {
            let d = tok.lemma_decision().unwrap();
            assert!(!d.lemma.is_empty());
            if matches!(
                d.source,
                LemmaSource::LexiconMatch | LemmaSource::ArticleDisambiguated
            ) {
                let a = d.chosen_analysis.as_ref().unwrap();
                assert!(compat.compatible(a.category, tok.pos().unwrap()));
            }
        }
    }
}
